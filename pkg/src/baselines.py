# baselines.py

"""Pointwise mean and median of an ensemble of trajectories

"""
#
# Copyright (C) 2026, the PyEpiC developers
#
# This program is free software; you can redistribute it and/or
# modify it under the terms of the GNU General Public License
# as published by the Free Software Foundation, version 2.
#
# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU General Public License for more details.

import numpy
import pyepic.tools
import pyepic.epimodels

ptools = pyepic.tools
pem = pyepic.epimodels


def _common(trajs):
  grid = ptools.checkcommongrid(trajs)
  names = [n for n in trajs[0].names() if all(n in t for t in trajs)]
  return grid, names


def pointwise_mean(trajs):
  """Arithmetic mean of every shared column at every grid point

  Raises 'ContractViolation' if the grids differ.
  """
  grid, names = _common(trajs)
  return pem.SampledTrajectory(grid, [
      (n, numpy.add.reduce([t[n] for t in trajs]) / float(len(trajs)))
      for n in names])


def pointwise_median(trajs):
  """Pointwise median of every shared column

  The lower median is taken for an even number of curves, so every value
  comes from one of the inputs.
  """
  grid, names = _common(trajs)
  return pem.SampledTrajectory(grid, [
      (n, ptools.lowermedian(numpy.array([t[n] for t in trajs]), 0))
      for n in names])
