from setuptools import setup, find_packages

setup(
    name="mmwave-channel-toolkit",
    version="0.1.0",
    packages=find_packages(include=["chanmodel", "chanmodel.*"]),
    install_requires=[
        "pyyaml",
        "numpy>=1.24",
        "scipy>=1.10",
        "pandas>=1.5",
        "pytest",
        "black",
        "ruff",
    ],
    entry_points={
        "console_scripts": [
            "chanmodel=chanmodel.main:main",
        ],
    },
    python_requires=">=3.10",
    description="Evaluate, fit and simulate mmWave path loss, LOS probability, "
    "penetration loss and ray clustering",
)
