"""
Setup script for the Platoon Route Planner package.
"""
import os
from setuptools import setup, find_packages

# Get version from environment or default
version = os.environ.get("VERSION", "0.1.0")

# Read requirements
with open("requirements.txt") as f:
    requirements = [line for line in f.read().splitlines() if line and not line.startswith("#")]

# Read the README file
with open("README.md", encoding="utf-8") as f:
    long_description = f.read()

setup(
    name="platoon-route-planner",
    version=version,
    description="Joint master/member route optimization and Monte Carlo simulation for vehicle platoons",
    long_description=long_description,
    long_description_content_type="text/markdown",
    author="Platoon Planner Team",
    author_email="example@example.com",
    url="https://github.com/example/platoon-route-planner",
    packages=find_packages(exclude=["tests", "tests.*"]),
    python_requires=">=3.9",
    install_requires=requirements,
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.9",
        "Topic :: Scientific/Engineering",
    ],
    entry_points={
        "console_scripts": [
            "platoon-planner=src.cli:main",
        ],
    },
)
