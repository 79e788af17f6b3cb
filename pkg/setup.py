from setuptools import find_packages
from setuptools import setup

setup(
    name="geom-bp",
    packages=find_packages(exclude=["tests", "tests.*"]),
    setup_requires=["setuptools_scm"],
    use_scm_version={"fallback_version": "0.1.0"},
)
