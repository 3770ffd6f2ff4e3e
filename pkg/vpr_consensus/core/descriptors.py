#!/usr/bin/env python3
"""
Descriptor Module

Built-in SAD front-end (patch-normalized downsampled grayscale images) and
ingestion of precomputed descriptors, so that downstream stages never care
which VPR technique produced the features.
"""

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import List, Optional, Union

import numpy as np
from PIL import Image, UnidentifiedImageError

from ..errors import DecodeError, ValidationError
from ..export.matrix_io import read_matrix, write_matrix
from ..models.config import SadConfig
from ..models.frames import ImageFrame, Descriptor, DescriptorSet

IMAGE_EXTENSIONS = {'.png', '.jpg', '.jpeg'}

# ITU-R BT.601 luma
LUMA_WEIGHTS = np.array([0.299, 0.587, 0.114], dtype=np.float64)

# Patches whose standard deviation falls below this are treated as flat.
FLAT_PATCH_STD = 1e-12


def load_image(path: Union[str, Path]) -> ImageFrame:
    """Decode a PNG/JPEG file into a float64 BT.601 luma frame."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"No such image: {path}")
    try:
        with Image.open(path) as img:
            img.load()
            if img.mode in ('L', 'I', 'I;16', 'F'):
                pixels = np.asarray(img, dtype=np.float64)
            else:
                rgb = np.asarray(img.convert('RGB'), dtype=np.float64)
                pixels = rgb @ LUMA_WEIGHTS
    except (UnidentifiedImageError, OSError) as e:
        raise DecodeError(f"Cannot decode image: {e}", module='descriptors', path=path)
    if pixels.size == 0:
        raise ValidationError("Image has zero size", module='descriptors', path=path)
    return ImageFrame(pixels=pixels)


def _area_weights(source: int, target: int) -> np.ndarray:
    """(target x source) matrix of overlap fractions for area averaging."""
    edges = np.arange(target + 1, dtype=np.float64) * (source / target)
    lo = np.arange(source, dtype=np.float64)
    hi = lo + 1.0
    overlap = np.clip(
        np.minimum(edges[1:, None], hi[None, :]) - np.maximum(edges[:-1, None], lo[None, :]),
        0.0, None
    )
    return overlap / overlap.sum(axis=1, keepdims=True)


def downsample(pixels: np.ndarray, width: int, height: int) -> np.ndarray:
    """Area-average an image to (height x width)."""
    rows = _area_weights(pixels.shape[0], height)
    cols = _area_weights(pixels.shape[1], width)
    return rows @ pixels @ cols.T


def patch_normalize(small: np.ndarray, patch_width: int, patch_height: int) -> np.ndarray:
    """Normalize each patch to zero mean and unit std; flat patches become zeros."""
    height, width = small.shape
    blocks = small.reshape(height // patch_height, patch_height, width // patch_width, patch_width)
    mean = blocks.mean(axis=(1, 3), keepdims=True)
    centered = blocks - mean
    std = np.sqrt((centered ** 2).mean(axis=(1, 3), keepdims=True))
    flat = std < FLAT_PATCH_STD
    normalized = np.where(flat, 0.0, centered / np.where(flat, 1.0, std))
    return normalized.reshape(height, width)


def sad_descriptor(img: ImageFrame, cfg: Optional[SadConfig] = None, frame_id: int = 0) -> Descriptor:
    """Downsample, patch-normalize and flatten (row-major) one image."""
    cfg = cfg or SadConfig()
    errors = cfg.validate()
    if errors:
        raise ValidationError("; ".join(errors), module='descriptors')
    small = downsample(img.pixels, cfg.width, cfg.height)
    normalized = patch_normalize(small, cfg.patch_width, cfg.patch_height)
    return Descriptor(values=normalized.ravel(), id=frame_id)


def list_images(directory: Union[str, Path]) -> List[Path]:
    """PNG/JPEG files in a directory, sorted by filename (traverse order)."""
    directory = Path(directory)
    if not directory.is_dir():
        raise FileNotFoundError(f"Image directory does not exist: {directory}")
    return sorted(
        (p for p in directory.iterdir() if p.is_file() and p.suffix.lower() in IMAGE_EXTENSIONS),
        key=lambda p: p.name
    )


class SadExtractor:
    """Extracts SAD descriptors for a whole traverse of images."""

    def __init__(self, config: Optional[SadConfig] = None, max_workers: int = 1):
        self.config = config or SadConfig()
        self.max_workers = max_workers

        errors = self.config.validate()
        if errors:
            raise ValidationError("; ".join(errors), module='descriptors')

    def _describe(self, path: Path) -> np.ndarray:
        return sad_descriptor(load_image(path), self.config).values

    def extract(self, directory: Union[str, Path]) -> DescriptorSet:
        """Describe every image in a directory, preserving filename order."""
        paths = list_images(directory)
        if not paths:
            raise ValidationError("No PNG/JPEG images found", module='descriptors', path=directory)

        logging.info(f"Extracting SAD descriptors from {len(paths)} images in {directory}")
        start_time = time.time()

        if self.max_workers == 1:
            rows = [self._describe(p) for p in paths]
        else:
            with ThreadPoolExecutor(max_workers=self.max_workers) as executor:
                rows = list(executor.map(self._describe, paths))

        logging.info(f"SAD extraction completed in {time.time() - start_time:.2f}s")
        return DescriptorSet(np.vstack(rows), kind='sad', sources=[str(p) for p in paths])


def extract_directory(directory: Union[str, Path], cfg: Optional[SadConfig] = None, max_workers: int = 1) -> DescriptorSet:
    """Convenience wrapper around SadExtractor.extract."""
    return SadExtractor(cfg, max_workers=max_workers).extract(directory)


def load_descriptors(path: Union[str, Path], fmt: Optional[str] = None) -> DescriptorSet:
    """Ingest precomputed descriptors: one row per frame, id = row index."""
    matrix = read_matrix(path, fmt)
    logging.info(f"Loaded {matrix.shape[0]} descriptors of dimension {matrix.shape[1]} from {path}")
    return DescriptorSet(matrix, kind='external', sources=[str(path)])


def save_descriptors(descriptors: DescriptorSet, path: Union[str, Path], fmt: Optional[str] = None) -> Path:
    """Write a descriptor set in CSV or VPRD binary format."""
    return write_matrix(descriptors.matrix, path, fmt)
