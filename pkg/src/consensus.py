# consensus.py

"""Constrained power Frechet mean of (E, I) trajectory pairs

  Given J trajectories, the consensus curve is the (E, I) pair c that
  minimizes

      F(c, sigma, gamma, delta) = 1/J sum_j D(c, c_j(delta_j))^q

  over coefficient vectors satisfying, on a grid t_0..t_M,

      I'(t_m) = sigma E(t_m) - gamma I(t_m)
      E(t_m) >= 0,  I(t_m) >= 0,  E(t_m) + I(t_m) + gamma int_0^t_m I <= N

  with (sigma, gamma) in a box and shifts delta_j in [-delta_max, delta_max]
  summing to zero. c_j(delta) are the coefficients of curve j shifted by
  delta and D is the H1 distance.

  The problem is solved by alternating minimization. For fixed shifts the
  coefficients are profiled out by convex inner problems (a QP for q=2,
  iteratively reweighted QPs otherwise) and (sigma, gamma) are optimized
  with envelope-theorem gradients. The shifts are then updated one curve
  at a time by bounded Brent minimization and re-centered.
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
import time
import numpy
import scipy.optimize
import pyepic.pyepicexcpt
import pyepic.tools
import pyepic.bsplines
import pyepic.fspace
import pyepic.qpsolver

pex = pyepic.pyepicexcpt
ptools = pyepic.tools
pbs = pyepic.bsplines
pfs = pyepic.fspace
pqp = pyepic.qpsolver
log = logging.getLogger(__name__)

# Finite-difference step and tolerated mismatch of envelope gradients
FDSTEP = 1.0e-5
FDMISMATCH = 1.0e-1

# Tolerated violation of a check-grid row, relative to 1 + max|rhs|, and
# the number of QP rounds spent adding violated rows
CHECKTOL = 1.0e-9
MAXROUNDS = 20

# Relative increase of the IRLS objective reported as a stall
STALLTOL = 1.0e-6


class ProblemSpec:
  """Settings of a consensus problem

  Keyword arguments of the constructor (defaults in brackets):

    'q' -- Power of the distance [1.0]. q=1 is solved as q=1+'eps_q'.

    'rho' -- Weight of the derivative term of the metric [1.0].

    'K', 'degree' -- Basis size and degree [30, 3].

    'M' -- Number of intervals of the constraint grid
           [None: 'bsplines.default_intervals'(K, degree)].

    'bounds' -- Dict with (min, max) pairs for 'sigma', 'gamma' and 'beta'
                [all (1e-3, 2) except beta (1e-3, 10)].

    'delta_max' -- Largest shift in days [120].

    'N', 'T' -- Population and horizon [1e6, 720].

    'eps_q' -- Smoothing of q=1 [1e-3].

    'eps_irls' -- IRLS regularizer, relative to the median pairwise
                  squared distance [1e-8].

    'tol_outer', 'max_outer' -- Stopping rule of the alternating scheme
                                [1e-3, 50].

    'tol_inner', 'max_inner' -- Stopping rule of the IRLS loop
                                [1e-8, 200].
  """
  def __init__(self, q=1.0, rho=1.0, K=30, degree=3, M=None, bounds=None,
               delta_max=120.0, N=1.0e6, T=720.0, eps_q=1.0e-3,
               eps_irls=1.0e-8, tol_outer=1.0e-3, max_outer=50,
               tol_inner=1.0e-8, max_inner=200):
    b = {"sigma": (1.0e-3, 2.0), "gamma": (1.0e-3, 2.0),
         "beta": (1.0e-3, 10.0)}
    if bounds:
      b.update(dict((k, tuple(float(x) for x in v))
                    for k, v in bounds.items()))
    self.q = float(q)
    self.rho = float(rho)
    self.K = int(K)
    self.degree = int(degree)
    self.M = None if M is None else int(M)
    self.bounds = b
    self.delta_max = float(delta_max)
    self.N = float(N)
    self.T = float(T)
    self.eps_q = float(eps_q)
    self.eps_irls = float(eps_irls)
    self.tol_outer = float(tol_outer)
    self.max_outer = int(max_outer)
    self.tol_inner = float(tol_inner)
    self.max_inner = int(max_inner)
    for name in ("sigma", "gamma", "beta"):
      lo, hi = self.bounds[name]
      if not 0 < lo < hi < numpy.inf:
        raise pex.ContractViolation(
            "Bounds of %s must satisfy 0 < min < max" % name, (lo, hi))
    if self.q <= 0:
      raise pex.ContractViolation("q must be positive", self.q)
    if self.rho <= 0:
      raise pex.ContractViolation("rho must be positive", self.rho)
    if self.delta_max < 0:
      raise pex.ContractViolation("delta_max must be nonnegative",
                                  self.delta_max)
    if self.eps_irls <= 0 or self.eps_q <= 0:
      raise pex.ContractViolation("eps_irls and eps_q must be positive")
    if self.N <= 0 or self.T <= 0:
      raise pex.ContractViolation("N and T must be positive")
    if self.max_outer < 1:
      raise pex.ContractViolation("max_outer must be at least 1")

  @property
  def q_effective(self):
    "q actually solved for"
    return effective_q(self.q, self.eps_q)

  @property
  def M_effective(self):
    if self.M is None:
      return pbs.default_intervals(self.K, self.degree)
    return self.M

  def asdict(self):
    return {"q": self.q, "rho": self.rho, "K": self.K,
            "degree": self.degree, "M": self.M_effective,
            "bounds": dict((k, list(v)) for k, v in self.bounds.items()),
            "delta_max": self.delta_max, "N": self.N, "T": self.T,
            "eps_q": self.eps_q, "eps_irls": self.eps_irls,
            "tol_outer": self.tol_outer, "max_outer": self.max_outer}


def effective_q(q, eps_q):
  "q=1 is replaced by 1+eps_q"
  return 1.0 + eps_q if q == 1.0 else q


###########################################################
# Constraints
###########################################################
class Constraints:
  """Discretized constraints A_eq c = b_eq, A_ineq c <= b_ineq

  The inequality rows come in three blocks of equal length 'nblock':
  -E <= 0, -I <= 0 and the population cap. Each block holds the 'ngrid'
  rows of the constraint grid followed by the rows of an optional check
  grid. Only the rows flagged in 'working' go to the QP solver; the
  constraint-grid rows always do, check rows join through 'enforce'.
  """
  def __init__(self, A_eq, b_eq, A_ineq, b_ineq, N, sigma=None,
               gamma=None, ngrid=None, B=None, Phi=None):
    self.A_eq = A_eq
    self.b_eq = b_eq
    self.A_ineq = A_ineq
    self.b_ineq = b_ineq
    self.N = float(N)
    self.sigma = sigma
    self.gamma = gamma
    self.nblock = A_ineq.shape[0] // 3
    self.ngrid = self.nblock if ngrid is None else int(ngrid)
    # Values on the constraint grid and running integrals on all rows
    self.B = B
    self.Phi = Phi
    self.working = numpy.zeros(A_ineq.shape[0], bool)
    for k in range(3):
      self.working[k*self.nblock:k*self.nblock + self.ngrid] = True

  @property
  def nworking(self):
    return int(self.working.sum())

  def program(self, H, g, scale=1.0):
    "QP on the working rows, for coefficients divided by 'scale'"
    w = self.working
    return pqp.QuadraticProgram(H, g, self.A_eq, self.b_eq / scale,
                                self.A_ineq[w], self.b_ineq[w] / scale)

  def enforce(self, x, scale=1.0):
    """Add the check rows violated at 'x' to the working set

    'x' is in units of 'scale'. Of every run of consecutive violated rows
    only the most violated one is added. Returns the number of rows added.
    """
    d = self.b_ineq / scale
    viol = numpy.dot(self.A_ineq, x) - d
    tol = CHECKTOL * (1.0 + numpy.abs(d).max(initial=0.0))
    rows = numpy.flatnonzero((viol > tol) & ~self.working)
    if len(rows) == 0:
      return 0
    breaks = numpy.flatnonzero((numpy.diff(rows) != 1) |
                               (numpy.diff(rows // self.nblock) != 0)) + 1
    added = [run[numpy.argmax(viol[run])]
             for run in numpy.split(rows, breaks)]
    self.working[added] = True
    return len(added)

  def adopt(self, other):
    "Working rows of 'other', a 'Constraints' with the same row layout"
    if other is not None and other.working.shape == self.working.shape:
      self.working |= other.working

  def residuals(self, c):
    "Largest equality residual and largest inequality violation at 'c'"
    c = pfs.asarray(c)
    eq = numpy.abs(numpy.dot(self.A_eq, c) - self.b_eq).max(initial=0.0)
    ineq = (numpy.dot(self.A_ineq, c) - self.b_ineq).max(initial=0.0)
    return float(eq), float(max(ineq, 0.0))

  def envelope(self, c, nu, z):
    """Derivatives of the optimal value in sigma and gamma

    'c' is the solution, 'nu' and 'z' the multipliers of the equality
    rows and of all inequality rows, in objective units:
      dV/dsigma = -nu^T B cE,
      dV/dgamma = nu^T B cI + z_pop^T Phi cI.
    """
    c = pfs.asarray(c)
    K = self.B.shape[1]
    cE, cI = c[:K], c[K:]
    dsigma = -numpy.dot(nu, numpy.dot(self.B, cE))
    dgamma = numpy.dot(nu, numpy.dot(self.B, cI)) + \
        numpy.dot(z[2*self.nblock:], numpy.dot(self.Phi, cI))
    return float(dsigma), float(dgamma)


def _checkrows(design, check):
  "Values and integrals of 'check' at times off the grid of 'design'"
  if check is None:
    return numpy.zeros((0, design.K)), numpy.zeros((0, design.K))
  if check.K != design.K:
    raise pex.ContractViolation("Check grid and design sizes differ")
  gap = numpy.abs(check.grid[:, None] - design.grid[None, :]).min(axis=1)
  keep = gap > 1.0e-9 * (1.0 + numpy.abs(check.grid))
  return check.B[keep], check.Phi[keep]


def constraint_matrices(basis, design, sigma, gamma, N, check=None):
  """Constraint blocks of the discretized problem

  Arguments:

    'basis' -- The 'BasisSystem' of the coefficients (None skips the
               size check).

    'design' -- 'DesignMatrices' on the M+1 constraint times.

    'sigma', 'gamma' -- Rates in the equality constraint.

    'N' -- Population.

  Optional arguments:

    'check' -- 'DesignMatrices' on which the inequalities must hold as
               well (typically the output grid). Its rows are appended
               to every inequality block and enforced on demand.

  Returns a 'Constraints' object with
    A_eq = [-sigma B | B' + gamma B], b_eq = 0,
    A_ineq = [[-B, 0], [0, -B], [B, B + gamma Phi]],
    b_ineq = (0, 0, N).
  """
  if basis is not None and design.K != basis.K:
    raise pex.ContractViolation("Design and basis sizes differ")
  B, Bp, Phi = design.B, design.Bp, design.Phi
  m = B.shape[0]
  Bc, Phic = _checkrows(design, check)
  Bx = numpy.vstack((B, Bc))
  Phix = numpy.vstack((Phi, Phic))
  Z = numpy.zeros_like(Bx)
  mx = Bx.shape[0]
  A_eq = numpy.hstack((-sigma * B, Bp + gamma * B))
  A_ineq = numpy.vstack((numpy.hstack((-Bx, Z)), numpy.hstack((Z, -Bx)),
                         numpy.hstack((Bx, Bx + gamma * Phix))))
  b_ineq = numpy.concatenate((numpy.zeros(2 * mx),
                              numpy.repeat(float(N), mx)))
  return Constraints(A_eq, numpy.zeros(m), A_ineq, b_ineq, N, sigma, gamma,
                     m, B, Phix)


def reduced_constraints(design, N, check=None):
  "Nonnegativity and E + I <= N only, without dynamics"
  m = design.B.shape[0]
  Bx = numpy.vstack((design.B, _checkrows(design, check)[0]))
  Z = numpy.zeros_like(Bx)
  mx = Bx.shape[0]
  A_ineq = numpy.vstack((numpy.hstack((-Bx, Z)), numpy.hstack((Z, -Bx)),
                         numpy.hstack((Bx, Bx))))
  b_ineq = numpy.concatenate((numpy.zeros(2 * mx),
                              numpy.repeat(float(N), mx)))
  return Constraints(numpy.zeros((0, 2 * design.K)), numpy.zeros(0), A_ineq,
                     b_ineq, N, ngrid=m)


###########################################################
# Inner problems
###########################################################
class InnerSolution:
  """Solution of an inner problem at fixed (sigma, gamma)

  'c' ('CoefVector'), multipliers 'nu' of the equality rows and
  'lambda_E', 'lambda_I', 'lambda_pop' >= 0 of the inequality blocks on
  the constraint grid, all in population units and scaled as derivatives
  of 'objective' (the power mean 1/J sum D^q). 'multipliers' holds the
  multipliers of every inequality row, check rows included.
  'kkt_residual' is the residual of the last QP in scaled units.
  """
  def __init__(self, c, nu, lambda_E, lambda_I, lambda_pop, kkt_residual,
               objective, iterations=1, weights=None, status="optimal",
               multipliers=None):
    self.c = c
    self.nu = nu
    self.lambda_E = lambda_E
    self.lambda_I = lambda_I
    self.lambda_pop = lambda_pop
    self.kkt_residual = kkt_residual
    self.objective = objective
    self.iterations = iterations
    self.weights = weights
    self.status = status
    if multipliers is None:
      multipliers = numpy.concatenate((lambda_E, lambda_I, lambda_pop))
    self.multipliers = multipliers

  def asdict(self):
    return {"objective": self.objective, "kkt_residual": self.kkt_residual,
            "iterations": self.iterations, "status": self.status}


def _stack(cjs):
  if isinstance(cjs, numpy.ndarray) and cjs.ndim == 2:
    return numpy.array(cjs, numpy.float64)
  return numpy.array([pfs.asarray(c) for c in cjs], numpy.float64)


def data_scale(X):
  "Largest absolute coefficient of a stack, 1 when all vanish"
  s = float(numpy.abs(X).max(initial=0.0))
  return s if s > 0 else 1.0


def _project(xtilde, gram, constraints, solver, scale):
  """G-metric projection of a scaled vector onto the feasible set

  Check rows violated by the projection join the working set and the QP
  is solved again. Returns the last 'QPResult' and its inequality
  multipliers spread over all rows.
  """
  H = 2.0 * gram.GY
  g = -2.0 * numpy.dot(gram.GY, xtilde)
  for _ in range(MAXROUNDS):
    rows = constraints.working.copy()
    res = solver.solve(constraints.program(H, g, scale))
    if not constraints.enforce(res.x, scale):
      break
  else:
    log.warning("Check grid still violated after %d rounds", MAXROUNDS)
  z = numpy.zeros(len(constraints.b_ineq))
  z[rows] = res.z
  return res, z


def _innersolution(res, z, constraints, scale, factor, objective,
                   iterations=1, weights=None):
  m = constraints.nblock
  mg = constraints.ngrid
  z = z * factor
  nu = res.y * factor if len(res.y) else numpy.zeros(0)
  return InnerSolution(pfs.CoefVector(res.x * scale), nu, z[:mg],
                       z[m:m+mg], z[2*m:2*m+mg], res.kkt_residual,
                       objective, iterations, weights, res.status, z)


def inner_solve_q2(cbars, gram, constraints, solver=None):
  """Constrained Frechet mean (q=2) at fixed constraints

  Arguments:

    'cbars' -- J 'CoefVector' objects (or a J x 2K array).

    'gram' -- A 'BlockGram'.

    'constraints' -- A 'Constraints' object.

  Minimizes (c - cbar)^T GY (c - cbar), cbar being the coefficient mean.
  The QP is posed for c / s, s the largest coefficient of the input.
  Returns an 'InnerSolution'. Raises 'Infeasible' from the QP solver.
  """
  solver = solver or pqp.MehrotraIPMSolver()
  X = _stack(cbars)
  s = data_scale(X)
  X = X / s
  res, z = _project(X.mean(axis=0), gram, constraints, solver, s)
  d = pfs.distances(res.x, X, gram)
  objective = float(numpy.mean(d * d)) * s * s
  return _innersolution(res, z, constraints, s, s, objective)


def irls_epsilon(X, gram, eps_irls):
  "IRLS regularizer: eps_irls times the median pairwise squared distance"
  J = len(X)
  if J < 2:
    return eps_irls
  sq = []
  for j in range(J - 1):
    d = pfs.distances(X[j], X[j+1:], gram)
    sq.extend(d * d)
  med = float(numpy.median(sq))
  return eps_irls * med if med > 0 else eps_irls


def inner_solve_irls(q, cjs, gram, constraints, warm_start=None,
                     eps_q=1.0e-3, eps_irls=1.0e-8, tol=1.0e-8,
                     max_iter=200, solver=None):
  """Constrained power Frechet mean by iteratively reweighted QPs

  Arguments:

    'q' -- Power (> 0); q=1 is replaced by 1+'eps_q'.

    'cjs' -- J 'CoefVector' objects (or a J x 2K array).

    'gram' -- A 'BlockGram'.

    'constraints' -- A 'Constraints' object.

  Optional arguments:

    'warm_start' -- Starting coefficients (default: the coefficient mean).

    'eps_q' -- Smoothing of q=1.

    'eps_irls' -- Regularizer relative to the median pairwise squared
                  distance.

    'tol', 'max_iter' -- Stop when ||c_new - c||_G <= tol (1 + ||c||_G).

  Each step projects the weighted mean of the c_j, weights
  (D_j^2 + eps)^(q/2-1), onto the feasible set. The multipliers of the
  final QP are rescaled to the smoothed objective.
  Raises 'SolverStall' when the smoothed objective increases by more
  than a relative 'STALLTOL' (q <= 2); smaller increases end the loop.
  """
  if q <= 0:
    raise pex.ContractViolation("q must be positive", q)
  q = effective_q(q, eps_q)
  solver = solver or pqp.MehrotraIPMSolver()
  X = _stack(cjs)
  s = data_scale(X)
  X = X / s
  J = len(X)
  if q == 2.0:
    sol = inner_solve_q2(X * s, gram, constraints, solver)
    sol.weights = numpy.ones(J)
    return sol
  eps = irls_epsilon(X, gram, eps_irls)

  def smoothed(x):
    d = pfs.distances(x, X, gram)
    return float(numpy.mean((d * d + eps) ** (0.5 * q)))

  if warm_start is not None:
    x = pfs.asarray(warm_start) / s
  else:
    x = X.mean(axis=0)
  # The monotone decrease holds from the first projected iterate on, as
  # long as the working set does not grow
  feasible = False
  fold = None
  res = z = None
  it = 0
  for it in range(1, max_iter + 1):
    d = pfs.distances(x, X, gram)
    w = (d * d + eps) ** (0.5 * q - 1.0)
    W = float(w.sum())
    xtilde = numpy.dot(w / W, X)
    nrows = constraints.nworking
    res, z = _project(xtilde, gram, constraints, solver, s)
    fnew = smoothed(res.x)
    if feasible and q <= 2.0 and constraints.nworking == nrows and \
       fnew >= fold:
      if fnew > fold * (1.0 + STALLTOL):
        raise pex.SolverStall(fold, fnew)
      log.debug("IRLS objective flat at %.12g after %d iterations", fnew,
                it)
      x = res.x
      break
    step = gram.norm(res.x - x)
    done = feasible and step <= tol * (1.0 + gram.norm(x))
    x = res.x
    fold = fnew
    feasible = True
    if done:
      break
  else:
    log.debug("IRLS stopped after %d iterations", max_iter)
  d = pfs.distances(x, X, gram)
  objective = float(numpy.mean(d ** q)) * s ** q
  factor = s ** (q - 1.0) * q * W / (2.0 * J)
  return _innersolution(res, z, constraints, s, factor, objective, it,
                        w / W)


def inner_solve(q, cjs, gram, constraints, warm_start=None, spec=None,
                solver=None):
  "q=2 closed path or IRLS, with the tolerances of 'spec'"
  spec = spec or ProblemSpec(q=q)
  if effective_q(q, spec.eps_q) == 2.0:
    return inner_solve_q2(cjs, gram, constraints, solver)
  return inner_solve_irls(q, cjs, gram, constraints, warm_start,
                          spec.eps_q, spec.eps_irls, spec.tol_inner,
                          spec.max_inner, solver)


def gamma_upper_bound(c, design, N, check=None):
  """Largest gamma compatible with the population cap at 'c'

  min over grid points with int_0^t I > 0 of (N - E - I) / int_0^t I,
  on the grid of 'design' and on that of 'check' when given;
  +inf when I integrates to zero everywhere.
  """
  c = pfs.asarray(c)
  bound = numpy.inf
  for dm in (design, check):
    if dm is None:
      continue
    K = dm.K
    E = numpy.dot(dm.B, c[:K])
    I = numpy.dot(dm.B, c[K:])
    intI = numpy.dot(dm.Phi, c[K:])
    mask = intI > 0
    if numpy.any(mask):
      bound = min(bound, float(numpy.min((N - E[mask] - I[mask]) /
                                         intI[mask])))
  return bound


###########################################################
# Profile in (sigma, gamma)
###########################################################
class _Profile:
  """Cached evaluations of the profiled objective

  Successive evaluations start from the previous solution and keep the
  check rows found active so far. An IRLS stall from a warm start is
  retried once from the coefficient mean.
  """
  def __init__(self, cjs, gram, design, spec, warm_start=None, solver=None,
               check=None):
    self.cjs = _stack(cjs)
    self.gram = gram
    self.design = design
    self.spec = spec
    self.solver = solver or pqp.MehrotraIPMSolver()
    self.warm = warm_start
    self.check = check
    self.last = None
    self.cache = {}
    self.best = None

  def __call__(self, sigma, gamma):
    key = (float(sigma), float(gamma))
    if key in self.cache:
      return self.cache[key]
    cons = constraint_matrices(None, self.design, sigma, gamma, self.spec.N,
                               self.check)
    cons.adopt(self.last)
    try:
      inner = inner_solve(self.spec.q, self.cjs, self.gram, cons, self.warm,
                          self.spec, self.solver)
    except pex.SolverStall as e:
      if self.warm is None:
        raise
      log.debug("%s Restarting from the coefficient mean.", e.message)
      inner = inner_solve(self.spec.q, self.cjs, self.gram, cons, None,
                          self.spec, self.solver)
    self.last = cons
    dsigma, dgamma = cons.envelope(inner.c, inner.nu, inner.multipliers)
    value = (inner.objective, dsigma, dgamma, inner)
    self.cache[key] = value
    if self.best is None or inner.objective < self.best[0]:
      self.best = (inner.objective, key, inner)
    self.warm = inner.c
    return value


def profile_value_and_gradient(sigma, gamma, cjs, gram, design, spec,
                               warm_start=None, solver=None, check=None):
  """Profiled objective and its envelope gradient

  Arguments:

    'sigma', 'gamma' -- Rates inside the bounds of 'spec'.

    'cjs' -- J coefficient vectors.

    'gram', 'design', 'spec' -- 'BlockGram', 'DesignMatrices' and
                                'ProblemSpec'.

  Optional arguments:

    'check' -- 'DesignMatrices' of a grid on which the inequalities are
               enforced as well.

  Returns (V, dV/dsigma, dV/dgamma, InnerSolution) with
    dV/dsigma = -nu^T B cE,
    dV/dgamma = nu^T B cI + lambda_pop^T Phi cI,
  lambda_pop and Phi covering the check rows too.
  """
  for name, value in (("sigma", sigma), ("gamma", gamma)):
    lo, hi = spec.bounds[name]
    if not lo <= value <= hi:
      raise pex.ContractViolation("%s=%g outside [%g, %g]" % (
          name, value, lo, hi), value)
  return _Profile(cjs, gram, design, spec, warm_start, solver,
                  check)(sigma, gamma)


def _fdgradient(profile, theta, lower, upper):
  grad = numpy.zeros(2)
  for i in range(2):
    h = FDSTEP * max(abs(theta[i]), 1.0e-3)
    lo = max(theta[i] - h, lower[i])
    hi = min(theta[i] + h, upper[i])
    if hi <= lo:
      continue
    tp = theta.copy()
    tm = theta.copy()
    tp[i] = hi
    tm[i] = lo
    grad[i] = (profile(*tp)[0] - profile(*tm)[0]) / (hi - lo)
  return grad


def optimize_profile(cjs, gram, design, spec, init, warm_start=None,
                     solver=None, check=None):
  """Minimize the profiled objective over the (sigma, gamma) box

  Arguments:

    'cjs' -- J coefficient vectors.

    'gram', 'design', 'spec', 'check' -- As in
                                         'profile_value_and_gradient'.

    'init' -- Starting (sigma, gamma).

  L-BFGS-B with envelope gradients on [sigma_min, sigma_max] x
  [gamma_min, min(gamma_max, gamma bound)]. When the envelope gradient
  disagrees with central differences at the result (a change of active
  set) or an inner solve stalls, the search is repeated with Nelder-Mead
  on the same box, stalled points counting as +inf. The best point
  evaluated, initializer included, is returned as
  (sigma, gamma, InnerSolution).
  """
  profile = _Profile(cjs, gram, design, spec, warm_start, solver, check)
  slo, shi = spec.bounds["sigma"]
  glo, ghi = spec.bounds["gamma"]
  theta0 = numpy.array([numpy.clip(init[0], slo, shi),
                        numpy.clip(init[1], glo, ghi)], numpy.float64)
  v0, _, _, inner0 = profile(*theta0)
  gbound = gamma_upper_bound(inner0.c, design, spec.N, check)
  ghi = max(min(ghi, gbound), theta0[1])
  lower = numpy.array([slo, glo])
  upper = numpy.array([shi, ghi])
  scale = v0 if v0 > 0 else 1.0

  def fun(theta):
    theta = numpy.clip(theta, lower, upper)
    v, ds, dg, _ = profile(*theta)
    return v / scale, numpy.array([ds, dg]) / scale

  def bounded(theta):
    try:
      return profile(*numpy.clip(theta, lower, upper))[0] / scale
    except pex.SolverStall as e:
      log.debug("Nelder-Mead point rejected: %s", e.message)
      return numpy.inf

  if v0 > 0:
    try:
      res = scipy.optimize.minimize(
          fun, theta0, jac=True, method="L-BFGS-B",
          bounds=list(zip(lower, upper)),
          options={"maxiter": 100, "gtol": 1.0e-6, "ftol": 1.0e-12})
      success = res.success
      theta = numpy.clip(res.x, lower, upper)
    except pex.SolverStall as e:
      log.warning("Inner IRLS stalled during L-BFGS-B: %s", e.message)
      success = False
      theta = numpy.array(profile.best[1])
    if success:
      try:
        envelope = numpy.array(profile(*theta)[1:3])
        fd = _fdgradient(profile, theta, lower, upper)
        mismatch = numpy.linalg.norm(envelope - fd)
        success = mismatch <= FDMISMATCH * numpy.linalg.norm(fd) + \
            1.0e-8 * scale
      except pex.SolverStall as e:
        log.debug("Gradient check stalled: %s", e.message)
        success = False
    if not success:
      log.warning("Envelope gradient unreliable near sigma=%g gamma=%g;"
                  " falling back to Nelder-Mead", theta[0], theta[1])
      start = numpy.array(profile.best[1])
      scipy.optimize.minimize(
          bounded, start, method="Nelder-Mead", bounds=list(zip(lower, upper)),
          options={"xatol": 1.0e-7, "fatol": 1.0e-12, "maxiter": 400})
  value, key, inner = profile.best
  return key[0], key[1], inner


###########################################################
# Initialization and shifts
###########################################################
def init_solution(cjs, gram, design, spec, lsdesign=None, solver=None,
                  check=None):
  """Starting point of the alternating scheme

  Arguments:

    'cjs' -- Coefficient vectors at the initial shifts.

    'gram', 'design', 'spec' -- As in 'optimize_profile'.

  Optional arguments:

    'lsdesign' -- 'DesignMatrices' on which the rates are fitted
                  (defaults to 'design').

    'check' -- 'DesignMatrices' of a grid on which the inequalities are
               enforced as well.

  The coefficients solve the power mean problem with nonnegativity and
  the cap E + I <= N only. The rates fit I' = sigma E - gamma I in least
  squares on the grid, clipped to the box. When E or I vanishes the box
  midpoint is used for the rate it determines.
  Returns (c_init, sigma_init, gamma_init).
  """
  cons = reduced_constraints(design, spec.N, check)
  inner = inner_solve(spec.q, cjs, gram, cons, None, spec, solver)
  c = inner.c
  lsdesign = lsdesign or design
  E = numpy.dot(lsdesign.B, c.cE)
  I = numpy.dot(lsdesign.B, c.cI)
  dI = numpy.dot(lsdesign.Bp, c.cI)
  slo, shi = spec.bounds["sigma"]
  glo, ghi = spec.bounds["gamma"]
  sigma, gamma = rates_least_squares(E, I, dI, spec.N)
  if sigma is None:
    sigma = 0.5 * (slo + shi)
    log.warning("E vanishes at the start; sigma starts at midpoint %g", sigma)
  if gamma is None:
    gamma = 0.5 * (glo + ghi)
    log.warning("I vanishes at the start; gamma starts at midpoint %g", gamma)
  return c, float(numpy.clip(sigma, slo, shi)), \
      float(numpy.clip(gamma, glo, ghi))


def rates_least_squares(E, I, dI, N=1.0):
  """Least squares (sigma, gamma) in dI = sigma E - gamma I

  A rate is None when its regressor vanishes, that is stays below a
  millionth of N (both when the system is singular). If only one
  regressor is present the other rate is fitted alone.
  """
  tiny = 1.0e-6 * N
  hasE = numpy.abs(E).max() > tiny
  hasI = numpy.abs(I).max() > tiny
  if hasE and hasI:
    X = numpy.column_stack((E, -I))
    coef, _, rank, _ = numpy.linalg.lstsq(X, dI, rcond=None)
    if rank == 2:
      return float(coef[0]), float(coef[1])
    return None, None
  if hasE:
    return float(numpy.dot(E, dI) / numpy.dot(E, E)), None
  if hasI:
    return None, float(-numpy.dot(I, dI) / numpy.dot(I, I))
  return None, None


def center_shifts(raw, delta_max):
  """Shifts clip(raw - mu, -delta_max, delta_max) summing to zero

  'mu' is 0 when the clipped raw shifts already sum to zero, otherwise
  the root of the nonincreasing clipped sum, found by bisection.
  """
  raw = numpy.asarray(raw, numpy.float64)
  if delta_max == 0:
    return numpy.zeros_like(raw)

  def f(mu):
    return float(numpy.clip(raw - mu, -delta_max, delta_max).sum())

  if abs(f(0.0)) <= 1.0e-12 * max(1.0, len(raw) * delta_max):
    mu = 0.0
  else:
    mu = scipy.optimize.bisect(f, raw.min() - delta_max,
                               raw.max() + delta_max, xtol=1.0e-12,
                               maxiter=200)
  delta = numpy.clip(raw - mu, -delta_max, delta_max)
  free = numpy.abs(delta) < delta_max
  if numpy.any(free):
    delta[free] -= delta.sum() / free.sum()
    delta = numpy.clip(delta, -delta_max, delta_max)
  return delta


def init_shifts(trajs, delta_max):
  """Initial shifts aligning the first peaks of I

  delta_j = (peak time of I_j) - (mean peak time), clipped to
  [-delta_max, delta_max], centered and clipped again; bisection
  centering is applied when clipping broke the zero sum.
  """
  if len(trajs) < 1:
    raise pex.ContractViolation("At least one trajectory is needed")
  peaks = numpy.array([traj.peaktime("I") for traj in trajs])
  raw = peaks - peaks.mean()
  delta = numpy.clip(raw, -delta_max, delta_max)
  delta = numpy.clip(delta - delta.mean(), -delta_max, delta_max)
  if abs(delta.sum()) > 1.0e-10:
    delta = center_shifts(raw, delta_max)
  return delta


def update_shifts(c_hat, trajs, basis, gram, spec, current=None):
  """Best shift of every curve towards 'c_hat', then re-centered

  Arguments:

    'c_hat' -- Current consensus coefficients.

    'trajs' -- The J 'SampledTrajectory' objects.

    'basis', 'gram', 'spec' -- 'BasisSystem', 'BlockGram', 'ProblemSpec'.

  Optional arguments:

    'current' -- Current shifts, also tried as candidates.

  Each shift minimizes D(c_hat, c_j(delta))^q over [-delta_max, delta_max]
  by bounded Brent search (tolerance 1e-3 days); the end points, zero and
  the current shift compete with the Brent result and ties go to the
  smaller shift.
  """
  dm = spec.delta_max
  q = spec.q_effective
  raw = numpy.zeros(len(trajs))
  for j, traj in enumerate(trajs):
    def cost(delta):
      c = pfs.shifted_coefficients(traj, delta, basis)
      return pfs.distance(c_hat, c, gram) ** q
    if dm == 0:
      continue
    res = scipy.optimize.minimize_scalar(cost, bounds=(-dm, dm),
                                         method="bounded",
                                         options={"xatol": 1.0e-3})
    candidates = [(float(res.fun), float(res.x)), (cost(-dm), -dm),
                  (cost(dm), dm), (cost(0.0), 0.0)]
    if current is not None:
      candidates.append((cost(float(current[j])), float(current[j])))
    raw[j] = min(candidates)[1]
  return center_shifts(raw, dm)


###########################################################
# Alternating scheme
###########################################################
class ConsensusSolution:
  """Result of 'solve'

  'c_hat' ('CoefVector'), 'sigma_hat', 'gamma_hat', 'delta_hat' (J
  shifts), 'objective_trace' (one value per outer iteration), 'inner'
  (last 'InnerSolution'), 'converged', 'iterations' and 'diagnostics'
  (residuals and timing). 'basis', 'gram', 'design' and 'spec' are the
  objects the solution was computed with.
  """
  def __init__(self, c_hat, sigma_hat, gamma_hat, delta_hat,
               objective_trace, inner, converged, iterations, diagnostics,
               basis, gram, design, spec):
    self.c_hat = c_hat
    self.sigma_hat = sigma_hat
    self.gamma_hat = gamma_hat
    self.delta_hat = delta_hat
    self.objective_trace = objective_trace
    self.inner = inner
    self.converged = converged
    self.iterations = iterations
    self.diagnostics = diagnostics
    self.basis = basis
    self.gram = gram
    self.design = design
    self.spec = spec

  @property
  def inner_diagnostics(self):
    if self.inner is None:
      return {}
    return self.inner.asdict()

  def curves(self, t):
    "Consensus E and I at times 't'"
    return self.c_hat.curves(self.basis, t)


def shifted_stack(trajs, delta, basis):
  "J x 2K coefficients of the trajectories shifted by 'delta'"
  return numpy.array([pfs.shifted_coefficients(traj, d, basis).c
                      for traj, d in zip(trajs, delta)])


def power_objective(c, cjs, gram, q):
  "1/J sum_j D(c, c_j)^q"
  d = pfs.distances(pfs.asarray(c), _stack(cjs), gram)
  return float(numpy.mean(d ** q))


def feasibility_report(c, sigma, gamma, basis, design, N, fine_grid=None):
  """Constraint residuals of a solution

  Returns a dict with the equality residual and the smallest slacks on the
  constraint grid, plus the equality residual and the minima of E, I and
  S = N - E - I - gamma int I on 'fine_grid' (daily by default).
  """
  c = pfs.asarray(c)
  cons = constraint_matrices(basis, design, sigma, gamma, N)
  eq, viol = cons.residuals(c)
  if fine_grid is None:
    fine_grid = numpy.linspace(0.0, basis.T, int(round(basis.T)) + 1)
  fine = pbs.design_matrices(basis, grid=fine_grid)
  K = basis.K
  E = numpy.dot(fine.B, c[:K])
  I = numpy.dot(fine.B, c[K:])
  dI = numpy.dot(fine.Bp, c[K:])
  R = gamma * numpy.dot(fine.Phi, c[K:])
  S = N - E - I - R
  Igrid = numpy.dot(design.B, c[K:])
  return {"equality_residual": eq,
          "equality_residual_relative": eq / max(numpy.abs(Igrid).max(),
                                                 1.0e-300),
          "inequality_violation": viol,
          "fine_equality_residual": float(numpy.abs(
              dI - sigma * E + gamma * I).max()),
          "fine_min_E": float(E.min()), "fine_min_I": float(I.min()),
          "fine_min_S": float(S.min())}


def output_grid(grid, T):
  "Sampling grid of the data joined with the whole days of [0, T]"
  return numpy.union1d(numpy.clip(grid, 0.0, T),
                       numpy.arange(0.0, numpy.floor(T) + 1.0))


def solve(trajs, spec, solver=None):
  """Consensus of J trajectories

  Arguments:

    'trajs' -- J >= 1 'SampledTrajectory' objects on a common grid in
               [0, spec.T], with E and I columns.

    'spec' -- A 'ProblemSpec'.

  Alternates (I) profile optimization of (sigma, gamma) with the
  coefficients at the current shifts and (II) shift updates. Besides the
  constraint grid, the inequalities are enforced on 'output_grid'. A shift
  update is kept only when it does not increase the objective, so the
  objective trace is non-increasing. Stops when the largest relative
  change of sigma, gamma and the shifts (relative to delta_max) falls
  below 'tol_outer' or after 'max_outer' iterations.
  Returns a 'ConsensusSolution'.
  """
  start = time.perf_counter()
  if len(trajs) < 1:
    raise pex.ContractViolation("At least one trajectory is needed")
  grid = ptools.checkcommongrid(trajs)
  if grid[0] < -1.0e-9 or grid[-1] > spec.T * (1.0 + 1.0e-12):
    raise pex.ContractViolation(
        "Trajectories must be sampled inside [0, %g]" % spec.T)
  solver = solver or pqp.MehrotraIPMSolver()
  basis = pbs.build_basis(spec.K, spec.degree, spec.T)
  gram = pfs.BlockGram(pbs.gram_h1(basis, spec.rho))
  design = pbs.design_matrices(basis, spec.M_effective)
  lsdesign = pbs.design_matrices(basis, grid=numpy.clip(grid, 0.0, spec.T))
  check = pbs.design_matrices(basis, grid=output_grid(grid, spec.T))
  q = spec.q_effective

  delta = init_shifts(trajs, spec.delta_max)
  cjs = shifted_stack(trajs, delta, basis)
  c, sigma, gamma = init_solution(cjs, gram, design, spec, lsdesign, solver,
                                  check)
  log.info("start: sigma=%.5f gamma=%.5f shifts in [%g, %g]", sigma, gamma,
           delta.min(), delta.max())
  trace = []
  converged = False
  inner = None
  iterations = 0
  for r in range(1, spec.max_outer + 1):
    iterations = r
    try:
      snew, gnew, inner = optimize_profile(cjs, gram, design, spec,
                                           (sigma, gamma), c, solver, check)
    except pex.Infeasible as e:
      raise pex.Infeasible(e.value[0], e.value[1],
                           "Outer iteration %d at sigma=%g, gamma=%g" % (
                               r, sigma, gamma))
    value = inner.objective / spec.N ** q
    dnew = update_shifts(inner.c, trajs, basis, gram, spec, delta)
    cjsnew = shifted_stack(trajs, dnew, basis)
    shifted = power_objective(inner.c.c / spec.N, cjsnew / spec.N, gram, q)
    if shifted <= value:
      value = shifted
    else:
      log.debug("shift update rejected (%.6g > %.6g)", shifted, value)
      dnew, cjsnew = delta, cjs
    trace.append(value * spec.N ** q)
    if spec.delta_max > 0:
      dchange = numpy.abs(dnew - delta).max() / spec.delta_max
    else:
      dchange = 0.0
    change = max(abs(snew - sigma) / sigma, abs(gnew - gamma) / gamma,
                 dchange)
    log.info("outer %d: sigma=%.5f gamma=%.5f F=%.6g change=%.2e", r, snew,
             gnew, trace[-1], change)
    sigma, gamma, delta, cjs, c = snew, gnew, dnew, cjsnew, inner.c
    if change < spec.tol_outer:
      converged = True
      break
  if not converged:
    log.warning("No convergence after %d outer iterations", spec.max_outer)

  diagnostics = feasibility_report(c, sigma, gamma, basis, design, spec.N,
                                   numpy.clip(grid, 0.0, spec.T))
  diagnostics["centering_residual"] = float(abs(delta.sum()))
  diagnostics["elapsed_seconds"] = time.perf_counter() - start
  return ConsensusSolution(c, sigma, gamma, delta, trace, inner, converged,
                           iterations, diagnostics, basis, gram, design, spec)
