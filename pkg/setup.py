#!/usr/bin/env python

"""The setup script."""

from setuptools import find_packages, setup

__author__ = "mta_rtc developers"
__contact__ = "mta-rtc@users.noreply.github.com"
__copyright__ = "Copyright 2026 mta_rtc developers"
__license__ = "BSD - see LICENSE file in top-level package directory"

with open("README.rst") as readme_file:
    readme = readme_file.read()

with open("HISTORY.rst") as history_file:
    history = history_file.read()

requirements = [line.strip() for line in open("requirements.txt")]

dev_requirements = [line.strip() for line in open("requirements_dev.txt")]

test_requirements = [
    "pytest>=3",
    "hypothesis>=6.0",
]

docs_requirements = [
    "sphinx",
    "sphinx-rtd-theme",
]

setup(
    author=__author__,
    author_email=__contact__,
    python_requires=">=3.8",
    setup_requires=["setuptools_scm"],
    use_scm_version=True,
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Environment :: Console",
        "Intended Audience :: Developers",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: BSD License",
        "Natural Language :: English",
        "Operating System :: POSIX :: Linux",
        "Programming Language :: Python",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Topic :: Scientific/Engineering",
        "Topic :: Software Development :: Embedded Systems",
    ],
    description="Granularity-based interval-curve analysis of power-managed "
    "components",
    entry_points={
        "console_scripts": [
            "mta_rtc=mta_rtc.cli:main",
        ],
    },
    install_requires=requirements,
    license=__license__,
    long_description=readme + "\n\n" + history,
    long_description_content_type="text/x-rst",
    include_package_data=True,
    package_data={"mta_rtc": ["data/*.yaml", "tests/*.yaml"]},
    keywords="mta_rtc real-time-calculus timed-automata",
    name="mta_rtc_granularity",
    packages=find_packages(),
    test_suite="tests",
    tests_require=test_requirements,
    extras_require={"docs": docs_requirements, "dev": dev_requirements},
    url="https://github.com/mta-rtc/mta_rtc_granularity",
    zip_safe=False,
)
