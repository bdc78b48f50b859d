#!/usr/bin/env python
"""Packaging for yamabelab."""

import os

from setuptools import find_packages, setup

from yamabelab import __version__

HERE = os.path.dirname(os.path.abspath(__file__))


def _read(name: str) -> str:
    path = os.path.join(HERE, name)
    if not os.path.exists(path):
        return ""
    with open(path, "r", encoding="utf-8") as reader:
        return reader.read()


def requirements(name: str = "requirements.txt") -> list:
    """Pinned dependencies, comments and blank lines skipped."""
    lines = (line.strip() for line in _read(name).splitlines())
    return [line for line in lines if line and not line.startswith("#")]


setup(
    name="yamabelab",
    version=__version__,
    description="Kernel, spectra, periodic branch and Morse-index certificates for the nonlocal Yamabe operator",
    long_description=_read("README.md"),
    long_description_content_type="text/markdown",
    author="yamabelab developers",
    license="Apache-2.0",
    python_requires=">=3.9",
    keywords=["fractional laplacian", "nonlocal operator", "morse index", "bifurcation", "galerkin"],
    classifiers=[
        "Environment :: Console",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: Apache Software License",
        "Programming Language :: Python :: 3 :: Only",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
    packages=find_packages(include=["yamabelab", "yamabelab.*"]),
    package_data={"yamabelab": ["config.ini", "templates/*.j2"]},
    install_requires=requirements(),
    # mpmath is the high-precision oracle of the special-function tests
    extras_require={"dev": ["pytest>=7.0.0", "pytest-cov>=4.0.0", "flake8>=6.0.0", "mpmath==1.3.0"]},
    entry_points={"console_scripts": ["yamabelab=yamabelab.cli:main"]},
)
