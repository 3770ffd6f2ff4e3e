#!/usr/bin/env python3
"""
Setup script for VPR Consensus
"""
from setuptools import setup, find_packages

# Read the README file
def read_readme():
    try:
        with open("README.md", "r", encoding="utf-8") as fh:
            return fh.read()
    except FileNotFoundError:
        return "Unsupervised localization-quality prediction and prediction-weighted sequence matching for visual place recognition"

# Read requirements
def read_requirements():
    try:
        with open("requirements.txt", "r", encoding="utf-8") as fh:
            return [line.strip() for line in fh if line.strip() and not line.startswith("#") and "pytest" not in line]
    except FileNotFoundError:
        return []

setup(
    name="vpr-consensus",
    version="1.0.0",
    author="VPR Consensus Team",
    description="Unsupervised localization-quality prediction and prediction-weighted sequence matching for visual place recognition",
    long_description=read_readme(),
    long_description_content_type="text/markdown",
    packages=find_packages(exclude=["tests", "tests.*", "examples", "examples.*"]),
    python_requires=">=3.9",
    install_requires=read_requirements(),
    extras_require={
        "test": ["pytest>=7.0"],
    },
    entry_points={
        "console_scripts": [
            "vpr-consensus=vpr_consensus.app:main",
            "vpr-consensus-sweep=vpr_consensus.batch:main",
        ],
    },
    classifiers=[
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Programming Language :: Python :: 3.12",
        "Topic :: Scientific/Engineering :: Image Recognition",
        "Topic :: Scientific/Engineering :: Artificial Intelligence",
    ],
    keywords=[
        "visual place recognition", "localization", "seqslam", "sequence matching",
        "precision recall", "robotics"
    ],
)
