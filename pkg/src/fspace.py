# fspace.py

"""The H1 product space of (E, I) curve pairs

  A pair of curves expanded in a common B-spline basis is represented by
  its 2K coefficients, 'CoefVector'. Distances are measured with the
  block-diagonal Gram matrix diag(G, G) of the H1 inner product.

  Curves are registered by translation: the shift of y by delta is
  t -> y(t + delta), with y held constant outside the sampled range.
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
import scipy.linalg
import pyepic.pyepicexcpt
import pyepic.epimodels
import pyepic.bsplines

pex = pyepic.pyepicexcpt
pem = pyepic.epimodels
pbs = pyepic.bsplines


class CoefVector:
  """Coefficients c = (cE, cI) of an (E, I) pair

  'c' is the 2K array, 'cE' and 'cI' are views of its two halves.
  """
  def __init__(self, c):
    self.c = numpy.array(c, numpy.float64)
    if self.c.ndim != 1 or len(self.c) % 2:
      raise pex.ContractViolation("A coefficient vector has 2K entries",
                                  self.c.shape)
    if not numpy.all(numpy.isfinite(self.c)):
      raise pex.ContractViolation("Coefficients must be finite")
    self.c.setflags(write=False)

  @classmethod
  def frompair(cls, cE, cI):
    cE = numpy.asarray(cE, numpy.float64)
    cI = numpy.asarray(cI, numpy.float64)
    if cE.shape != cI.shape:
      raise pex.ContractViolation("cE and cI lengths differ")
    return cls(numpy.concatenate((cE, cI)))

  @property
  def K(self):
    return len(self.c) // 2

  @property
  def cE(self):
    return self.c[:self.K]

  @property
  def cI(self):
    return self.c[self.K:]

  def curves(self, basis, t):
    "E and I evaluated at 't'"
    B = basis.eval(t)
    return numpy.dot(B, self.cE), numpy.dot(B, self.cI)

  def __len__(self):
    return len(self.c)


def asarray(c):
  "The 2K array of a 'CoefVector' or of anything array-like"
  if isinstance(c, CoefVector):
    return c.c
  return numpy.asarray(c, numpy.float64)


class BlockGram:
  """Metric of the product space

  'GY' = diag(G, G) and 'L' is its upper Cholesky factor, GY = L^T L.
  """
  def __init__(self, gram):
    """Constructor for 'BlockGram'

    Argument:

      'gram' -- A 'GramH1' object, or a K x K positive definite matrix.
    """
    G = gram.G if isinstance(gram, pbs.GramH1) else numpy.asarray(gram)
    self.gram = gram
    self.G = numpy.array(G, numpy.float64)
    self.K = self.G.shape[0]
    self.GY = scipy.linalg.block_diag(self.G, self.G)
    self.L = scipy.linalg.cholesky(self.GY, lower=False)
    for a in (self.G, self.GY, self.L):
      a.setflags(write=False)

  def inner(self, x, y):
    "Inner product of two 2K arrays (or of the rows of 2D arrays with y)"
    x = asarray(x)
    y = asarray(y)
    K = self.K
    return numpy.dot(x[..., :K], numpy.dot(self.G, y[:K])) + \
        numpy.dot(x[..., K:], numpy.dot(self.G, y[K:]))

  def norm(self, x):
    x = asarray(x)
    return numpy.sqrt(max(self.inner(x, x), 0.0))


def distance(c1, c2, gram):
  """H1 distance between two coefficient vectors

  Arguments:

    'c1', 'c2' -- 'CoefVector' objects or 2K arrays.

    'gram' -- A 'BlockGram'.

  Returns sqrt((c1-c2)^T GY (c1-c2)).
  """
  x = asarray(c1)
  y = asarray(c2)
  if x.shape != y.shape or x.shape != (2 * gram.K,):
    raise pex.ContractViolation("Coefficient lengths do not match the metric")
  return gram.norm(x - y)


def distances(c, cjs, gram):
  "Distances ||L (c_j - c)|| from 'c' to the rows of the J x 2K 'cjs'"
  diff = numpy.asarray(cjs, numpy.float64) - asarray(c)[None, :]
  Ld = numpy.dot(diff, gram.L.T)
  return numpy.sqrt(numpy.einsum("jk,jk->j", Ld, Ld))


def _shiftedvalues(traj, names, delta):
  grid = traj.grid
  query = numpy.clip(grid + delta, grid[0], grid[-1])
  return [traj.interpolant(n)(query) for n in names]


def shift(traj, delta, delta_max=None):
  """Shift a trajectory in time with constant extension

  Arguments:

    'traj' -- A 'SampledTrajectory'.

    'delta' -- Shift in days; the result is t -> y(t+delta).

  Optional arguments:

    'delta_max' -- Largest admissible |delta|.

  Off-grid values come from a cubic Hermite interpolant of the samples.
  A zero shift returns an exact copy.
  """
  if delta_max is not None and abs(delta) > delta_max:
    raise pex.ContractViolation(
        "|delta|=%g exceeds delta_max=%g" % (abs(delta), delta_max), delta)
  names = traj.names()
  if delta == 0:
    values = [numpy.array(traj[n]) for n in names]
  else:
    values = _shiftedvalues(traj, names, delta)
  return pem.SampledTrajectory(traj.grid, zip(names, values))


def resample(traj, grid):
  """Trajectory evaluated on another grid by cubic Hermite interpolation

  Times outside the sampled range take the nearest endpoint value.
  """
  grid = numpy.asarray(grid, numpy.float64)
  if grid.shape == traj.grid.shape and numpy.all(grid == traj.grid):
    return traj
  query = numpy.clip(grid, traj.grid[0], traj.grid[-1])
  names = traj.names()
  return pem.SampledTrajectory(
      grid, [(n, traj.interpolant(n)(query)) for n in names], N=None)


def shifted_coefficients(traj, delta, basis, delta_max=None):
  """Coefficients of the shifted (E, I) pair of a trajectory

  Arguments:

    'traj' -- A 'SampledTrajectory' on a grid inside [0, T].

    'delta' -- Shift in days.

    'basis' -- A 'BasisSystem'.

  Optional arguments:

    'delta_max' -- Largest admissible |delta|.

  Returns a 'CoefVector'.
  """
  if delta_max is not None and abs(delta) > delta_max:
    raise pex.ContractViolation(
        "|delta|=%g exceeds delta_max=%g" % (abs(delta), delta_max), delta)
  if delta == 0:
    E, I = traj["E"], traj["I"]
  else:
    E, I = _shiftedvalues(traj, ("E", "I"), delta)
  coefs = pbs.fit_coefficients(basis, numpy.column_stack((E, I)), traj.grid)
  return CoefVector(numpy.concatenate((coefs[:, 0], coefs[:, 1])))
