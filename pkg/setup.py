"""Setup file for the skeleton retargeting package."""
from setuptools import setup, find_packages

setup(
    name="skeleton-retarget",
    version="0.1.0",
    packages=find_packages(exclude=["tests", "tests.*", "examples", "examples.*"]),
    install_requires=[
        "numpy>=1.24.0",
        "pandas>=2.0.0",
        "pydantic>=2.0.0",
        "python-dotenv>=1.0.0",
        "torch>=2.1.0",
        "matplotlib>=3.7.0",
        "plotly>=5.13.0",
    ],
    entry_points={
        "console_scripts": [
            "retarget=src.scripts.retarget_cli:main",
        ],
    },
    python_requires=">=3.9",
)
