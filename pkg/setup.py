# setup.py
from setuptools import setup, find_packages

setup(
    name="hnets",
    version="0.1.0",
    packages=find_packages(where="src"),
    package_dir={"": "src"},
    install_requires=[
        "numpy",
        "scipy",
        "networkx",
        "pandas",
        "python-dotenv",
        "pyyaml"
    ],
    extras_require={
        "tests": ["pytest", "hypothesis"],
    },
    python_requires=">=3.8",
    entry_points={
        "console_scripts": [
            "hnets=hnets.main:main",
        ],
    },
)
