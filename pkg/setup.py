from setuptools import find_packages, setup

with open("README.md", "r", encoding="utf-8") as fh:
    long_description = fh.read()

setup(
    name="causal-switch",
    version="0.1.0",
    description="Holevo capacity of noisy channels composed in a quantum switch",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=find_packages(exclude=["tests", "tests.*"]),
    py_modules=["main"],
    package_data={"app": ["data/*.csv"]},
    install_requires=[
        "pydantic~=2.10.4",
        "loguru~=0.7.3",
        "numpy",
        "scipy~=1.15.2",
        "aiofiles~=24.1.0",
        "pydantic_core>=2.27.2,<2.28.0",
    ],
    extras_require={
        "test": ["pytest~=8.3.5", "pytest-asyncio~=0.25.3", "hypothesis~=6.122.0"],
    },
    classifiers=[
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.12",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
    ],
    python_requires=">=3.12",
    entry_points={
        "console_scripts": [
            "causal-switch=main:main",
        ],
    },
)
