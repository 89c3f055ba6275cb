# qpsolver.py

"""Dense primal-dual interior-point solver for convex quadratic programs

  Problems have the form

      minimize    1/2 x^T H x + g^T x
      subject to  A x = b,  C x <= d

  with H positive semidefinite. The solver is Mehrotra's predictor-corrector
  method and returns the multipliers of every constraint, so that the
  sensitivity of the optimal value to the problem data can be computed.

  Redundant equality rows are tolerated: the equalities are replaced by an
  orthonormal basis of their row space before iterating, and the
  multipliers are mapped back onto the original rows.
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
import scipy.linalg
import pyepic.pyepicexcpt

pex = pyepic.pyepicexcpt
log = logging.getLogger(__name__)

# Fraction to the boundary
STEPFRAC = 0.995


class QuadraticProgram:
  "Data (H, g, A, b, C, d) of a convex QP"
  def __init__(self, H, g, A=None, b=None, C=None, d=None):
    self.H = numpy.asarray(H, numpy.float64)
    self.g = numpy.asarray(g, numpy.float64)
    n = len(self.g)
    if self.H.shape != (n, n):
      raise pex.ContractViolation("H must be %dx%d" % (n, n), self.H.shape)
    if A is None:
      A, b = numpy.zeros((0, n)), numpy.zeros(0)
    if C is None:
      C, d = numpy.zeros((0, n)), numpy.zeros(0)
    self.A = numpy.atleast_2d(numpy.asarray(A, numpy.float64))
    self.b = numpy.asarray(b, numpy.float64).ravel()
    self.C = numpy.atleast_2d(numpy.asarray(C, numpy.float64))
    self.d = numpy.asarray(d, numpy.float64).ravel()
    if self.A.shape[1] != n or self.A.shape[0] != len(self.b):
      raise pex.ContractViolation("Equality block has shape %s, rhs %d" % (
          self.A.shape, len(self.b)))
    if self.C.shape[1] != n or self.C.shape[0] != len(self.d):
      raise pex.ContractViolation("Inequality block has shape %s, rhs %d" % (
          self.C.shape, len(self.d)))

  @property
  def n(self):
    return len(self.g)

  def objective(self, x):
    return 0.5 * numpy.dot(x, numpy.dot(self.H, x)) + numpy.dot(self.g, x)

  def violations(self, x):
    "Absolute equality residuals and positive parts of C x - d"
    return (numpy.abs(numpy.dot(self.A, x) - self.b),
            numpy.maximum(numpy.dot(self.C, x) - self.d, 0.0))


class QPResult:
  """Solution of a 'QuadraticProgram'

  'x' primal point, 'y' multipliers of the equalities (one per original
  row), 'z' >= 0 multipliers of the inequalities, 's' their slacks,
  'objective', 'kkt_residual', 'iterations' and 'status' ('optimal' or
  'inaccurate' when only the loose tolerance was met).
  """
  def __init__(self, x, y, z, s, objective, kkt_residual, iterations,
               status):
    self.x = x
    self.y = y
    self.z = z
    self.s = s
    self.objective = objective
    self.kkt_residual = kkt_residual
    self.iterations = iterations
    self.status = status


def _maxstep(v, dv):
  neg = dv < 0
  if not numpy.any(neg):
    return 1.0
  return min(1.0, float(numpy.min(-v[neg] / dv[neg])))


def _rowspace(A, b, tol):
  """Orthonormal replacement of the equality system A x = b

  Returns (V, beta, U, sv, residual): V^T x = beta is equivalent to
  A x = b when 'residual' (the part of b outside the range of A) is zero.
  """
  if A.shape[0] == 0:
    n = A.shape[1]
    return numpy.zeros((0, n)), numpy.zeros(0), numpy.zeros((0, 0)), \
        numpy.zeros(0), 0.0
  U, sv, Vt = numpy.linalg.svd(A, full_matrices=False)
  rank = int(numpy.sum(sv > tol * max(sv[0], 1.0e-300) * max(A.shape)))
  U, sv, Vt = U[:, :rank], sv[:rank], Vt[:rank]
  Utb = numpy.dot(U.T, b)
  residual = float(numpy.linalg.norm(b - numpy.dot(U, Utb), numpy.inf))
  return Vt, Utb / sv, U, sv, residual


class MehrotraIPMSolver:
  """Mehrotra predictor-corrector interior-point method

  Optional arguments of the constructor:

    'max_iter' -- Iteration cap (100).

    'tol' -- Relative tolerance on the primal and dual residuals and on
             the complementarity gap (1e-10).

    'loose_tol' -- When the iteration stalls but every residual is below
                   this value the point is accepted as 'inaccurate'.
  """
  def __init__(self, max_iter=100, tol=1.0e-10, loose_tol=1.0e-7):
    self.max_iter = max_iter
    self.tol = tol
    self.loose_tol = loose_tol

  def solve(self, qp):
    """Solve a 'QuadraticProgram'

    Returns a 'QPResult'. Raises 'Infeasible' with the most violated
    constraint row (equalities first, then inequalities) when no
    acceptable point is reached.
    """
    n = qp.n
    V, beta, U, sv, inconsistent = _rowspace(qp.A, qp.b, 1.0e-12)
    if inconsistent > 1.0e-9 * (1.0 + numpy.abs(qp.b).max(initial=0.0)):
      row = int(numpy.argmax(numpy.abs(qp.b - numpy.dot(
          U, numpy.dot(U.T, qp.b)))))
      raise pex.Infeasible(row, inconsistent,
                           "Equality constraints are inconsistent")
    mi = qp.C.shape[0]
    H, g, C, d = qp.H, qp.g, qp.C, qp.d
    if mi == 0:
      x, w = self._kkt(H, V, -g, beta)
      return self._result(qp, x, w, U, sv, numpy.zeros(0), numpy.zeros(0),
                          0, "optimal")

    # Starting point: least squares with unit slacks
    x, w = self._kkt(H + numpy.dot(C.T, C), V, -g + numpy.dot(C.T, d), beta)
    shat = d - numpy.dot(C, x)
    s = shat + max(0.0, 1.0 - shat.min())
    z = -shat + max(0.0, 1.0 - (-shat).min())

    scale_d = 1.0 + numpy.abs(g).max()
    scale_p = 1.0 + numpy.abs(beta).max(initial=0.0)
    scale_i = 1.0 + numpy.abs(d).max()
    best = None
    status = None
    stalls = 0
    for it in range(1, self.max_iter + 1):
      rd = numpy.dot(H, x) + g + numpy.dot(V.T, w) + numpy.dot(C.T, z)
      rp = numpy.dot(V, x) - beta
      ri = numpy.dot(C, x) + s - d
      mu = numpy.dot(s, z) / mi
      err = max(numpy.abs(rd).max() / scale_d,
                numpy.abs(rp).max(initial=0.0) / scale_p,
                numpy.abs(ri).max() / scale_i, mu)
      if best is None or err < best[0]:
        best = (err, x.copy(), w.copy(), z.copy(), s.copy(), it)
      if err <= self.tol:
        status = "optimal"
        break
      if numpy.abs(x).max() > 1.0e12 or z.max() > 1.0e14:
        log.debug("QP iterates diverge at iteration %d", it)
        break

      Wd = z / s
      KKT = self._matrix(H + numpy.dot(C.T * Wd, C), V)
      try:
        lu = scipy.linalg.lu_factor(KKT, check_finite=False)
      except (ValueError, numpy.linalg.LinAlgError):
        log.debug("Singular KKT matrix at iteration %d", it)
        break

      def direction(rc):
        rhs = numpy.concatenate((
            -rd + numpy.dot(C.T, (rc - z * ri) / s), -rp))
        sol = scipy.linalg.lu_solve(lu, rhs, check_finite=False)
        dx, dw = sol[:n], sol[n:]
        Cdx = numpy.dot(C, dx)
        dz = (-rc + z * ri + z * Cdx) / s
        ds = -ri - Cdx
        return dx, dw, dz, ds

      # Predictor
      dx, dw, dz, ds = direction(s * z)
      alpha = min(_maxstep(s, ds), _maxstep(z, dz))
      muaff = numpy.dot(s + alpha * ds, z + alpha * dz) / mi
      centering = (muaff / mu) ** 3 if mu > 0 else 0.0
      # Corrector
      dx, dw, dz, ds = direction(s * z + ds * dz - centering * mu)
      alpha = STEPFRAC * min(_maxstep(s, ds), _maxstep(z, dz))
      alpha = min(alpha, 1.0)
      if alpha < 1.0e-12:
        stalls += 1
        if stalls > 3:
          log.debug("QP step length collapsed at iteration %d", it)
          break
      else:
        stalls = 0
      x = x + alpha * dx
      w = w + alpha * dw
      z = z + alpha * dz
      s = s + alpha * ds

    err, x, w, z, s, it = best
    if status is None:
      if err <= self.loose_tol:
        status = "inaccurate"
        log.debug("QP accepted at loose tolerance (%g)", err)
      else:
        veq, vin = qp.violations(x)
        allv = numpy.concatenate((veq, vin))
        row = int(numpy.argmax(allv))
        raise pex.Infeasible(row, float(allv[row]),
                             "Interior-point iteration stopped with KKT"
                             " residual %g after %d iterations" % (err, it))
    return self._result(qp, x, w, U, sv, z, s, it, status, err)

  def _matrix(self, Hbar, V):
    me = V.shape[0]
    return numpy.block([[Hbar, V.T], [V, numpy.zeros((me, me))]])

  def _kkt(self, Hbar, V, rhs1, rhs2):
    n = len(rhs1)
    sol = scipy.linalg.solve(self._matrix(Hbar, V),
                             numpy.concatenate((rhs1, rhs2)),
                             assume_a="sym")
    return sol[:n], sol[n:]

  def _result(self, qp, x, w, U, sv, z, s, it, status, err=0.0):
    # Multipliers of the original equality rows
    y = numpy.dot(U, w / sv) if len(sv) else numpy.zeros(qp.A.shape[0])
    z = numpy.maximum(z, 0.0)
    return QPResult(x, y, z, s, float(qp.objective(x)), float(err), it,
                    status)


def solve_qp(H, g, A=None, b=None, C=None, d=None, **kwargs):
  "Shortcut: build a 'QuadraticProgram' and solve it"
  return MehrotraIPMSolver(**kwargs).solve(
      QuadraticProgram(H, g, A, b, C, d))
