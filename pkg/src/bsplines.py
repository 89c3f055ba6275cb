# bsplines.py

"""Clamped B-spline basis systems on [0, T]

  Basis functions, their derivatives and their running integrals are
  evaluated exactly (up to round-off) through scipy's B-spline machinery.
  The H1 Gram matrix is assembled by Gauss-Legendre quadrature on each
  knot interval, which is exact for the piecewise polynomial integrands.
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

import logging
import numpy
import scipy.interpolate
import scipy.linalg
import pyepic.pyepicexcpt

pex = pyepic.pyepicexcpt
log = logging.getLogger(__name__)

# Largest acceptable condition number of a least-squares design
MAXCOND = 1.0e12

# Default spacing of the constraint grid in knot intervals. Successive
# grid points move by about 0.38 of an interval relative to the knots.
GRIDSPACING = 1.382


class BasisSystem:
  """B-spline basis with uniform interior knots and clamped ends

  'K' basis functions of degree 'degree' on [0, 'T']. Evaluation methods
  take a scalar (returning a K-vector) or an array of n times (returning
  an n x K matrix).
  """
  def __init__(self, K, degree, T):
    """Constructor for 'BasisSystem'

    Arguments:

      'K' -- Number of basis functions (K >= degree+1).

      'degree' -- Polynomial degree.

      'T' -- Right end of the domain (T > 0).
    """
    if degree < 0 or K < degree + 1:
      raise pex.ContractViolation(
          "K=%d basis functions need K >= degree+1=%d" % (K, degree+1), K)
    if T <= 0:
      raise pex.ContractViolation("Domain end T must be positive", T)
    self.K = int(K)
    self.degree = int(degree)
    self.T = float(T)
    interior = numpy.linspace(0.0, self.T, self.K - self.degree + 1)[1:-1]
    self.knots = numpy.concatenate((numpy.zeros(self.degree + 1), interior,
                                    numpy.repeat(self.T, self.degree + 1)))
    self.knots.setflags(write=False)
    self._spl = scipy.interpolate.BSpline(self.knots, numpy.eye(self.K),
                                          self.degree, extrapolate=True)
    self._dspl = self._spl.derivative(1)
    self._ispl = self._spl.antiderivative(1)
    self._ispl0 = self._ispl(0.0)
    self._fitters = {}

  def breakpoints(self):
    "Distinct knots, from 0 to T"
    return numpy.unique(self.knots)

  def _times(self, t):
    t = numpy.asarray(t, numpy.float64)
    tol = 1.0e-12 * self.T
    if numpy.any(t < -tol) or numpy.any(t > self.T + tol):
      raise pex.ContractViolation(
          "Evaluation times must lie in [0, %g]" % self.T)
    return numpy.clip(t, 0.0, self.T)

  def eval(self, t):
    "Values of the K basis functions at 't'"
    return self._spl(self._times(t))

  def eval_deriv(self, t):
    "First derivatives of the K basis functions at 't'"
    return self._dspl(self._times(t))

  def eval_integral(self, t):
    "Integrals from 0 to 't' of the K basis functions"
    return self._ispl(self._times(t)) - self._ispl0

  def curve(self, coefs, t):
    "Values at 't' of the curve with coefficient vector 'coefs'"
    return numpy.dot(self.eval(t), coefs)

  def fitter(self, grid):
    "QR least-squares fitter for 'grid' (cached per grid)"
    grid = numpy.asarray(grid, numpy.float64)
    key = (grid.shape, grid.tobytes())
    if key not in self._fitters:
      self._fitters[key] = _LSFitter(self, grid)
    return self._fitters[key]

  def __repr__(self):
    return "BasisSystem(K=%d, degree=%d, T=%g)" % (self.K, self.degree,
                                                   self.T)


def build_basis(K, degree, T):
  "Clamped B-spline basis with uniformly spaced interior knots"
  return BasisSystem(K, degree, T)


class DesignMatrices:
  """Basis values, derivatives and running integrals on a grid

  Fields 'B', 'Bp' and 'Phi' are (M+1) x K matrices and 'grid' holds the
  M+1 evaluation times.
  """
  def __init__(self, basis, grid):
    self.grid = numpy.array(grid, numpy.float64)
    if self.grid.ndim != 1 or len(self.grid) < 2 or \
       numpy.any(numpy.diff(self.grid) <= 0):
      raise pex.ContractViolation("Constraint grid must be increasing")
    self.B = basis.eval(self.grid)
    self.Bp = basis.eval_deriv(self.grid)
    self.Phi = basis.eval_integral(self.grid)
    for a in (self.grid, self.B, self.Bp, self.Phi):
      a.setflags(write=False)
    self.K = basis.K

  @property
  def M(self):
    return len(self.grid) - 1


def default_intervals(K, degree):
  "Number of constraint grid intervals used when none is given"
  return max(1, int(round((K - degree) / GRIDSPACING)))


def design_matrices(basis, M=None, grid=None):
  """Design matrices of 'basis' on a grid

  Optional arguments:

    'M' -- Number of intervals of an equally spaced grid on [0, T].
           Defaults to 'default_intervals'.

    'grid' -- Explicit evaluation times. Overrides 'M'.
  """
  if grid is None:
    if M is None:
      M = default_intervals(basis.K, basis.degree)
    if M < 1:
      raise pex.ContractViolation("Constraint grid needs M >= 1", M)
    grid = numpy.linspace(0.0, basis.T, int(M) + 1)
  return DesignMatrices(basis, grid)


class GramH1:
  """Gram matrix of a basis under the H1 inner product

  'G' is the K x K matrix of int(phi_k phi_l) + rho int(phi'_k phi'_l),
  'G0' and 'G1' its two parts and 'lambda_min' its smallest eigenvalue.
  """
  def __init__(self, G0, G1, rho):
    self.rho = float(rho)
    self.G0 = G0
    self.G1 = G1
    G = G0 + self.rho * G1
    self.G = 0.5 * (G + G.T)
    self.lambda_min = float(numpy.linalg.eigvalsh(self.G)[0])
    if self.lambda_min <= 0:
      raise pex.DegenerateBasis(self.lambda_min)
    self.G.setflags(write=False)


def quadrature_nodes(basis):
  """Gauss-Legendre nodes and weights covering every knot interval

  ceil((2*degree+1)/2)+1 nodes per interval.
  """
  npts = (2 * basis.degree + 2) // 2 + 1
  x, w = numpy.polynomial.legendre.leggauss(npts)
  br = basis.breakpoints()
  a = br[:-1, None]
  b = br[1:, None]
  nodes = 0.5 * (b - a) * x[None, :] + 0.5 * (b + a)
  weights = 0.5 * (b - a) * w[None, :]
  return nodes.ravel(), weights.ravel()


def gram_h1(basis, rho):
  """H1 Gram matrix of a basis system

  Arguments:

    'basis' -- A 'BasisSystem'.

    'rho' -- Weight of the derivative term (rho >= 0; the metric of the
             consensus problems needs rho > 0).

  Raises 'DegenerateBasis' when the matrix is not positive definite.
  """
  if rho < 0:
    raise pex.ContractViolation("rho must be nonnegative", rho)
  nodes, weights = quadrature_nodes(basis)
  V = basis.eval(nodes)
  D = basis.eval_deriv(nodes)
  G0 = numpy.dot(V.T * weights, V)
  G1 = numpy.dot(D.T * weights, D)
  gram = GramH1(0.5 * (G0 + G0.T), 0.5 * (G1 + G1.T), rho)
  log.debug("H1 Gram for %r, rho=%g: lambda_min=%g", basis, rho,
            gram.lambda_min)
  return gram


class _LSFitter:
  "Least-squares projection onto a basis, via QR of the design matrix"
  def __init__(self, basis, grid):
    if len(grid) < basis.K:
      raise pex.ContractViolation(
          "%d grid points cannot determine %d coefficients" % (
              len(grid), basis.K))
    B = basis.eval(grid)
    self.Q, self.R = numpy.linalg.qr(B)
    sv = numpy.linalg.svd(self.R, compute_uv=False)
    self.cond = numpy.inf if sv[-1] == 0 else sv[0] / sv[-1]
    if self.cond > MAXCOND:
      raise pex.IllPosedFit(self.cond)
    self.grid = grid

  def __call__(self, values):
    values = numpy.asarray(values, numpy.float64)
    if values.shape[0] != len(self.grid):
      raise pex.ContractViolation(
          "%d values for %d grid points" % (values.shape[0], len(self.grid)))
    return scipy.linalg.solve_triangular(self.R, numpy.dot(self.Q.T, values))


def fit_coefficients(basis, curve, grid):
  """Least-squares coefficients of sampled values

  Arguments:

    'basis' -- A 'BasisSystem'.

    'curve' -- Values on 'grid' (a 1D array, or a 2D array whose columns
               are fitted at once).

    'grid' -- Sample times inside [0, T], at least K of them.

  Raises 'IllPosedFit' with the condition number when the design is rank
  deficient.
  """
  return basis.fitter(grid)(curve)
