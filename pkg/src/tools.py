# tools.py

"""Some tools used in other modules

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
#
import hashlib
import numpy
import pyepic.pyepicexcpt

excpt = pyepic.pyepicexcpt

def pyepicversion():
  "Returns the currently installed version of PyEpiC as a string"
  return "0.3.0"

def lowermedian(data, axis=0):
  """Median along 'axis' that always returns one of the data values

  For an even number of records the lower of the two central values is
  returned.
  """
  sdata = numpy.sort(numpy.asarray(data, numpy.float64), axis)
  records = sdata.shape[axis]
  return numpy.take(sdata, (records - 1) // 2, axis)

def meanstd(values):
  """Mean and sample standard deviation of a 1D sequence

  The standard deviation is 0 when fewer than two values are given.
  """
  data = numpy.asarray(values, numpy.float64)
  if len(data) == 0:
    return numpy.nan, numpy.nan
  mean = numpy.add.reduce(data) / float(len(data))
  if len(data) < 2:
    return mean, 0.0
  anom = data - mean
  return mean, numpy.sqrt(numpy.add.reduce(anom * anom) / float(len(data)-1))

def checkcommongrid(trajs, atol=1.0e-9):
  """Check that all trajectories share the same time grid

  Returns the common grid. Raises 'ContractViolation' otherwise.
  """
  if len(trajs) == 0:
    raise excpt.ContractViolation("At least one trajectory is needed")
  grid = trajs[0].grid
  for j, traj in enumerate(trajs[1:]):
    if traj.grid.shape != grid.shape or \
       numpy.abs(traj.grid - grid).max() > atol:
      raise excpt.ContractViolation(
          "Trajectory %d is not on the grid of trajectory 0" % (j+1,), j+1)
  return grid

def filedigest(fname):
  "SHA-256 hex digest of the bytes of a file"
  h = hashlib.sha256()
  with open(fname, "rb") as f:
    for block in iter(lambda: f.read(1 << 16), b""):
      h.update(block)
  return h.hexdigest()

