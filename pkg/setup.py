from setuptools import setup, find_packages
import os


def get_version(fname=os.path.join("fedalign", "__init__.py")):
    with open(fname) as fin:
        for line in fin:
            line = line.strip()
            if "__version__" in line:
                v = line.split("=")[1]
                # stripe white space, and ' or " in string
                if "'" in v:
                    version = v.strip("' ")
                elif '"' in v:
                    version = v.strip('" ')
                break
    return version


fedalign_scripts = ["bin/fedalign"]


setup(
    name="fedalign",
    version=get_version(),
    packages=find_packages(exclude=["tests", "tests.*"]),
    install_requires=["numpy", "scipy", "pytest"],
    scripts=fedalign_scripts,
    description="Simulator of prioritized federated learning with loss-matching "
    "client selection",
    long_description="Simulator of prioritized federated learning with loss-matching "
    "client selection, convergence-bound diagnostics and an experiment runner.",
    classifiers=[
        "Programming Language :: Python :: 3.6",
        "Programming Language :: Python :: 3.7",
        "Programming Language :: Python :: 3.8",
        "Operating System :: OS Independent",
    ],
    zip_safe=False,
)
