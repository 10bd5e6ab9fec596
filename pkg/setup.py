"""
setup.py - Legacy setup.py for backward compatibility
Use pyproject.toml for modern builds
"""
from setuptools import find_packages, setup

# Read README for long description
with open("README.md", "r", encoding="utf-8") as f:
    long_description = f.read()

setup(
    name="cddp-toolkit",
    version="0.3.0",
    description="Cross-dock door design under demand uncertainty: models, bounds and the SCS4B matheuristic",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=find_packages(exclude=["tests*", "docs*", "scripts*", "examples*"]),
    classifiers=[
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "Topic :: Scientific/Engineering :: Mathematics",
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python :: 3",
        "Operating System :: OS Independent",
    ],
    python_requires=">=3.9",
    install_requires=[
        "pyyaml>=6.0",
        "colorama>=0.4.6",
        "pyfiglet>=0.7",
        "termcolor>=1.1.0",
        "psutil>=5.8.0",
        "python-dotenv>=1.0.0",
        "numpy>=1.22",
        "scipy>=1.9",
    ],
    extras_require={
        "test": [
            "pytest>=7.4.0",
            "pytest-cov>=4.1.0",
            "pytest-mock>=3.11.0",
            "hypothesis>=6.80",
        ],
    },
    entry_points={
        "console_scripts": [
            "cddp=src.main:main",
        ],
    },
    include_package_data=True,
    package_data={
        "src": ["config/**/*"],
    },
    zip_safe=False,
)
