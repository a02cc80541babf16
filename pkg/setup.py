from setuptools import setup

setup(
    name="biquant",
    version="0.1.0",
    packages=["biquant"],
    py_modules=["app"],
    install_requires=[
        "numpy",
        "pandas",
        "pyparsing>=3.0",
        "sympy",
    ],
    extras_require={
        "test": ["pytest", "hypothesis"],
    },
    entry_points={
        "console_scripts": ["biquant=app:main"],
    },
    description="Exact invariants and characters of quotients of enveloping algebras of nilpotent Lie algebras",
    long_description=open("README.md").read(),
    long_description_content_type="text/markdown",
    classifiers=[
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
    python_requires=">=3.10",
)
