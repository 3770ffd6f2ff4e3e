#!/usr/bin/env python3
"""
Frame and Descriptor Models

Defines images, feature descriptors and ordered descriptor sets.
"""

from typing import List, Sequence
from dataclasses import dataclass, field

import numpy as np

from ..errors import ValidationError

DESCRIPTOR_KINDS = ('sad', 'external')


@dataclass(frozen=True)
class ImageFrame:
    """Grayscale image, intensities in [0, 255], row-major (height x width)."""
    pixels: np.ndarray

    def __post_init__(self):
        pixels = np.asarray(self.pixels, dtype=np.float64)
        if pixels.ndim != 2 or pixels.shape[0] == 0 or pixels.shape[1] == 0:
            raise ValidationError(
                f"Image must be a non-empty 2-D array, got shape {pixels.shape}",
                module='descriptors'
            )
        if not np.all(np.isfinite(pixels)):
            raise ValidationError("Image contains non-finite intensities", module='descriptors')
        pixels.setflags(write=False)
        object.__setattr__(self, 'pixels', pixels)

    @property
    def width(self) -> int:
        return int(self.pixels.shape[1])

    @property
    def height(self) -> int:
        return int(self.pixels.shape[0])


@dataclass(frozen=True)
class Descriptor:
    """A single feature vector and its frame index along the traverse."""
    values: np.ndarray
    id: int


@dataclass(frozen=True)
class DescriptorSet:
    """
    Ordered, immutable set of descriptors stored as a (count x dim) matrix.

    Row k holds the descriptor with id k, so ids are always 0..k-1.
    """
    matrix: np.ndarray
    kind: str = 'external'
    sources: List[str] = field(default_factory=list)

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=np.float64)
        if matrix.ndim != 2 or matrix.shape[0] == 0 or matrix.shape[1] == 0:
            raise ValidationError(
                f"Descriptor set must be a non-empty 2-D array, got shape {matrix.shape}",
                module='descriptors'
            )
        bad = np.argwhere(~np.isfinite(matrix))
        if bad.size:
            row, col = (int(v) for v in bad[0])
            raise ValidationError("Non-finite descriptor value", module='descriptors', row=row, column=col)
        if self.kind not in DESCRIPTOR_KINDS:
            raise ValidationError(f"Unknown descriptor kind: {self.kind}", module='descriptors')
        matrix.setflags(write=False)
        object.__setattr__(self, 'matrix', matrix)

    @classmethod
    def from_descriptors(cls, descriptors: Sequence[Descriptor], kind: str = 'external') -> 'DescriptorSet':
        """Build a set, checking ids are consecutive and dimensions uniform."""
        if not descriptors:
            raise ValidationError("Descriptor set is empty", module='descriptors')
        dim = len(descriptors[0].values)
        for position, descriptor in enumerate(descriptors):
            if descriptor.id != position:
                raise ValidationError(
                    f"Descriptor ids must be consecutive from 0, found {descriptor.id} at position {position}",
                    module='descriptors', index=position
                )
            if len(descriptor.values) != dim:
                raise ValidationError(
                    f"Descriptor dimension {len(descriptor.values)} differs from {dim}",
                    module='descriptors', index=position
                )
        return cls(np.vstack([np.asarray(d.values, dtype=np.float64) for d in descriptors]), kind=kind)

    @property
    def count(self) -> int:
        return int(self.matrix.shape[0])

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[1])

    @property
    def descriptors(self) -> List[Descriptor]:
        return [Descriptor(values=row, id=i) for i, row in enumerate(self.matrix)]

    def __len__(self) -> int:
        return self.count

    def __getitem__(self, index: int) -> Descriptor:
        if not 0 <= index < self.count:
            raise ValidationError(f"Descriptor index out of range: {index}", module='descriptors', index=index)
        return Descriptor(values=self.matrix[index], id=index)
