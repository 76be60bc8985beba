import os

from pybind11.setup_helpers import Pybind11Extension, build_ext
from setuptools import setup

core = [
    "rng",
    "quadrature",
    "design",
    "criteria",
    "selection",
    "shrinkage",
    "simbench",
    "csv",
    "report",
]

include_dirs = ["include", "vendor"]
for eigen in ("/usr/include/eigen3", "/usr/local/include/eigen3"):
    if os.path.isdir(eigen):
        include_dirs.append(eigen)
        break

setup(
    ext_modules=[
        Pybind11Extension(
            "gbf._gbf",
            ["python/bindings.cpp"] + [f"src/{name}.cpp" for name in core],
            include_dirs=include_dirs,
            cxx_std=20,
        )
    ],
    cmdclass={"build_ext": build_ext},
)
