#!/usr/bin/env python3
"""
Platform Utilities for VPR Consensus

Platform detection and the hardware echo attached to benchmark reports, so
latency numbers can be read against the machine that produced them.
"""

import sys
import platform
from typing import Dict, Any
from enum import Enum

import numpy as np
import psutil


class Platform(Enum):
    """Supported platforms."""
    MACOS = "macos"
    WINDOWS = "windows"
    LINUX = "linux"
    UNKNOWN = "unknown"


class PlatformUtils:
    """Platform detection and hardware information."""

    @staticmethod
    def detect_platform() -> Platform:
        """Detect the current platform."""
        system = platform.system().lower()
        if system == "darwin":
            return Platform.MACOS
        elif system == "windows":
            return Platform.WINDOWS
        elif system == "linux":
            return Platform.LINUX
        return Platform.UNKNOWN

    @staticmethod
    def get_memory_info() -> Dict[str, Any]:
        """Total/available system memory and this process's resident set, in MiB."""
        virtual = psutil.virtual_memory()
        process = psutil.Process()
        return {
            "total_mb": virtual.total / 2**20,
            "available_mb": virtual.available / 2**20,
            "process_rss_mb": process.memory_info().rss / 2**20
        }

    @staticmethod
    def get_cpu_info() -> Dict[str, Any]:
        try:
            frequency = psutil.cpu_freq()
        except (NotImplementedError, OSError):
            frequency = None
        return {
            "processor": platform.processor(),
            "machine": platform.machine(),
            "logical_cores": psutil.cpu_count(logical=True),
            "physical_cores": psutil.cpu_count(logical=False),
            "max_frequency_mhz": frequency.max if frequency else None
        }

    @staticmethod
    def get_platform_info() -> Dict[str, Any]:
        """Get comprehensive platform information."""
        platform_type = PlatformUtils.detect_platform()

        return {
            "platform": platform_type.value,
            "system": platform.system(),
            "release": platform.release(),
            "python_version": sys.version.split()[0],
            "numpy_version": np.__version__,
            "cpu": PlatformUtils.get_cpu_info(),
            "memory": PlatformUtils.get_memory_info()
        }
