#!/usr/bin/env python
import pathlib

try:
    from setuptools import setup
except ImportError:
    from distutils.core import setup

curdir = pathlib.Path(__file__).parent


def get_version():
    scope = {}
    exec(open(str(curdir.joinpath('bayeslab_core', '_version.py'))).read(), scope)
    return scope['__version__']


def requirements(name):
    lines = open(str(curdir.joinpath(name))).readlines()
    return [line.strip() for line in lines if line.strip() and not line.startswith('#')]


packages = {
    'bayeslab',
    'bayeslab.tests',
    'bayeslab.tests.cases',
    'bayeslab_core',
    'bayeslab_tests',
}

setup(
    name='bayeslab',
    version=get_version(),
    author="bayeslab contributors",
    license="Apache License 2.0",
    description="Smoothness and Bayes-Nash verification lab for games of incomplete information",
    long_description=open(str(curdir.joinpath("README.rst")), "r").read(),
    long_description_content_type='text/x-rst',
    keywords=["game theory", "price of anarchy", "smoothness", "bayes-nash", "auctions"],
    classifiers=[
        "Development Status :: 3 - Alpha",
        "License :: OSI Approved :: Apache Software License",
        "Intended Audience :: Science/Research",
        "Operating System :: OS Independent",
        "Programming Language :: Python",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: Implementation :: CPython",
        "Topic :: Scientific/Engineering :: Mathematics",
        "Topic :: Software Development :: Libraries :: Python Modules"],
    python_requires=">=3.6",
    packages=sorted(packages),
    package_data={'bayeslab': ['instances/*.json']},
    install_requires=requirements('requirements.txt'),
    tests_require=requirements('dev_requirements.txt'),
    entry_points={'console_scripts': ['lab = bayeslab.cli:main']},
)
