import subprocess
import sys
from pathlib import Path

import pybind11
from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class CMakeExtension(Extension):
    def __init__(self, name):
        super().__init__(name, sources=[])


class CMakeBuild(build_ext):
    def build_extension(self, ext):
        extdir = Path(self.get_ext_fullpath(ext.name)).resolve().parent
        build_temp = Path(self.build_temp) / ext.name
        build_temp.mkdir(parents=True, exist_ok=True)
        source_dir = Path(__file__).resolve().parent
        args = [
            f"-DCMAKE_LIBRARY_OUTPUT_DIRECTORY={extdir}",
            f"-DCMAKE_BUILD_TYPE={'Debug' if self.debug else 'Release'}",
            f"-DPython_EXECUTABLE={sys.executable}",
            f"-Dpybind11_DIR={pybind11.get_cmake_dir()}",
            "-DSATSYNC_BUILD_PYTHON=ON",
            "-DSATSYNC_BUILD_TESTS=OFF",
            "-DSATSYNC_BUILD_CLI=OFF",
        ]
        subprocess.run(["cmake", str(source_dir), *args], cwd=build_temp, check=True)
        subprocess.run(
            ["cmake", "--build", ".", "--target", "_core", "--parallel"],
            cwd=build_temp,
            check=True,
        )


setup(
    ext_modules=[CMakeExtension("satsync._core")],
    cmdclass={"build_ext": CMakeBuild},
)
