# setup.py
#
# Copyright (C) 2026, the PyEpiC developers
#
# This program is free software; you can redistribute it and/or
# modify it under the terms of the GNU General Public License
# as published by the Free Software Foundation, version 2.

from setuptools import setup

setup (name = "PyEpiC",
       version = "0.3.0",

       description = "Constrained consensus curves of epidemic trajectories",
       author = "The PyEpiC developers",
       license = "GPL-2.0-only",

       package_dir = { 'pyepic' : 'src'},
       packages = ["pyepic"],
       package_data = { 'pyepic' : ['data/*.json']},
       python_requires = ">=3.8",
       install_requires = ["numpy>=1.20", "scipy>=1.7", "matplotlib>=3.3"],
       extras_require = { 'test' : ["pytest"]},
       entry_points = { 'console_scripts' : ['pyepic=pyepic.cli:main']},
       )
