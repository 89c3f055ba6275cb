# epimodels.py

"""SEIR-type compartmental models

  The models are integrated with an embedded Runge-Kutta 4(5) method and
  sampled on a time grid. Trajectories are stored as 'SampledTrajectory'
  objects: a strictly increasing grid plus one array per compartment.

  Parameter sets can be drawn under the uncertainty reported in the
  literature by means of two-piece normal distributions matched to
  95% confidence intervals.
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
import scipy.integrate
import scipy.interpolate
import pyepic.pyepicexcpt

pex = pyepic.pyepicexcpt
log = logging.getLogger(__name__)

VARIANTS = ("SEIR", "SEIUR", "SEIQR", "SEIRD")
# Extra compartment stored after S,E,I,R for each variant
EXTRA = {"SEIR": None, "SEIUR": "U", "SEIQR": "Q", "SEIRD": "D"}
COMPARTMENTS = ("S", "E", "I", "R", "U", "Q", "D")

RTOL = 1.0e-8
ATOL = 1.0e-8
# Round-off allowances, relative to the population
TOL_NEG = 1.0e-9
TOL_SUM = 1.0e-6
# 97.5% quantile of the standard normal
Z975 = 1.96


def columnnames(variant):
  "Compartment names of 'variant' in state order"
  extra = EXTRA[variant]
  if extra is None:
    return ("S", "E", "I", "R")
  return ("S", "E", "I", "R", extra)


class ModelParams:
  "Rate parameters and initial conditions of one SEIR-type model"
  def __init__(self, beta, sigma, gamma, N, E0, I0, T, variant="SEIR",
               f=1.0, nu=None, xi=None):
    """Constructor for 'ModelParams'

    Arguments:

      'beta', 'sigma', 'gamma' -- Transmission, incubation and removal
                                  rates (per day).

      'N' -- Total population.

      'E0', 'I0' -- Initial exposed and infectious counts.

      'T' -- Horizon in days.

    Optional arguments:

      'variant' -- One of 'SEIR' (default), 'SEIUR', 'SEIQR', 'SEIRD'.

      'f' -- Proportion for SEIUR (reported fraction) and SEIRD
             (recovered fraction). Defaults to 1.

      'nu', 'xi' -- Quarantine and release rates, SEIQR only.

    Raises 'ContractViolation' if any invariant is broken. A zero 'beta'
    is accepted so that the decoupled linear system can be integrated.
    """
    if variant not in VARIANTS:
      raise pex.ContractViolation("Unknown model variant %r" % (variant,),
                                  variant)
    self.variant = variant
    self.beta = float(beta)
    self.sigma = float(sigma)
    self.gamma = float(gamma)
    self.N = float(N)
    self.E0 = float(E0)
    self.I0 = float(I0)
    self.T = float(T)
    self.f = float(f)
    self.nu = nu
    self.xi = xi
    if self.beta < 0 or self.sigma <= 0 or self.gamma <= 0:
      raise pex.ContractViolation(
          "Rates must be positive (beta=%g, sigma=%g, gamma=%g)" % (
              self.beta, self.sigma, self.gamma))
    if not 0.0 <= self.f <= 1.0:
      raise pex.ContractViolation("Proportion f=%g outside [0,1]" % self.f,
                                  self.f)
    if variant == "SEIQR":
      if nu is None or xi is None or nu <= 0 or xi <= 0:
        raise pex.ContractViolation("SEIQR needs nu > 0 and xi > 0",
                                    (nu, xi))
      self.nu = float(nu)
      self.xi = float(xi)
    if self.E0 < 0 or self.I0 < 0 or self.E0 + self.I0 <= 0:
      raise pex.ContractViolation(
          "Initial counts must be nonnegative and not both zero")
    if self.N - self.E0 - self.I0 <= 0:
      raise pex.ContractViolation("N - E0 - I0 must be positive", self.N)
    if self.T <= 0:
      raise pex.ContractViolation("Horizon T must be positive", self.T)

  def initialstate(self):
    "(N-E0-I0, E0, I0, 0[, 0])"
    state = [self.N - self.E0 - self.I0, self.E0, self.I0, 0.0]
    if EXTRA[self.variant] is not None:
      state.append(0.0)
    return numpy.array(state, numpy.float64)

  def names(self):
    return columnnames(self.variant)

  def __repr__(self):
    return "ModelParams(%s, beta=%g, sigma=%g, gamma=%g, N=%g)" % (
        self.variant, self.beta, self.sigma, self.gamma, self.N)


class SampledTrajectory:
  """A trajectory evaluated on a time grid

  Columns are read-only numpy arrays keyed by compartment name. At least
  'E' and 'I' must be present.
  """
  def __init__(self, grid, columns, N=None):
    """Constructor for 'SampledTrajectory'

    Arguments:

      'grid' -- Strictly increasing array of times.

      'columns' -- Mapping (or sequence of pairs) name -> array, each of
                   the same length as 'grid'.

    Optional arguments:

      'N' -- Total population. When given, values below -1e-9*N and,
             if every compartment is present, a sum off N by more than
             1e-6*N raise 'ContractViolation'.
    """
    self.grid = numpy.array(grid, numpy.float64)
    if self.grid.ndim != 1 or len(self.grid) < 2:
      raise pex.ContractViolation("A grid needs at least two times")
    if numpy.any(numpy.diff(self.grid) <= 0):
      raise pex.ContractViolation("Grid is not strictly increasing")
    self.columns = {}
    for name, values in dict(columns).items():
      values = numpy.array(values, numpy.float64)
      if values.shape != self.grid.shape:
        raise pex.ContractViolation(
            "Column %s has %d values for %d grid points" % (
                name, values.size, self.grid.size))
      values.setflags(write=False)
      self.columns[name] = values
    self.grid.setflags(write=False)
    for name in ("E", "I"):
      if name not in self.columns:
        raise pex.ContractViolation("Column %s is missing" % name, name)
    self.N = None if N is None else float(N)
    self._interpolants = {}
    if self.N is not None:
      self._check()

  def _check(self):
    tol = TOL_NEG * self.N
    for name in self.compartments():
      vmin = self.columns[name].min()
      if vmin < -tol:
        raise pex.ContractViolation(
            "Column %s reaches %g (below -%g)" % (name, vmin, tol), name)
    if all(name in self.columns for name in ("S", "E", "I", "R")):
      total = numpy.add.reduce([self.columns[n] for n in
                                self.compartments()])
      err = numpy.abs(total - self.N).max()
      if err > TOL_SUM * self.N:
        raise pex.ContractViolation(
            "Compartments add up to N within %g only" % err, err)

  def compartments(self):
    "Names of the compartment columns, in canonical order"
    return [n for n in COMPARTMENTS if n in self.columns]

  def names(self):
    return list(self.columns.keys())

  @property
  def T(self):
    return float(self.grid[-1])

  def __getitem__(self, name):
    return self.columns[name]

  def __contains__(self, name):
    return name in self.columns

  def __len__(self):
    return len(self.grid)

  def peaktime(self, name="I"):
    "Time of the (first) maximum of a column"
    return float(self.grid[numpy.argmax(self.columns[name])])

  def interpolant(self, name):
    "Shape-preserving cubic Hermite interpolant of a column (cached)"
    if name not in self._interpolants:
      self._interpolants[name] = scipy.interpolate.PchipInterpolator(
          self.grid, self.columns[name], extrapolate=False)
    return self._interpolants[name]


def rhs(params, state, t=0.0):
  """Right-hand side of the compartmental ODE system

  Arguments:

    'params' -- A 'ModelParams' object.

    'state' -- Compartment vector in the order of 'columnnames()'.

    't' -- Time (the systems are autonomous).

  The components of the returned vector add up to zero.
  """
  state = numpy.asarray(state, numpy.float64)
  names = params.names()
  if state.shape != (len(names),):
    raise pex.ContractViolation(
        "%s state has %d components, got shape %s" % (
            params.variant, len(names), state.shape))
  S, E, I = state[0], state[1], state[2]
  N = params.N
  out = numpy.zeros(len(names), numpy.float64)
  if params.variant == "SEIR":
    infection = params.beta * S * I / N
    out[0] = -infection
    out[1] = infection - params.sigma * E
    out[2] = params.sigma * E - params.gamma * I
    out[3] = params.gamma * I
  elif params.variant == "SEIUR":
    # Unreported cases U transmit as well
    U = state[4]
    infection = params.beta * S * (I + U) / N
    out[0] = -infection
    out[1] = infection - params.sigma * E
    out[2] = params.f * params.sigma * E - params.gamma * I
    out[3] = params.gamma * (I + U)
    out[4] = (1.0 - params.f) * params.sigma * E - params.gamma * U
  elif params.variant == "SEIQR":
    Q = state[4]
    infection = params.beta * S * I / N
    out[0] = -infection
    out[1] = infection - params.sigma * E
    out[2] = params.sigma * E - (params.gamma + params.nu) * I
    out[3] = params.gamma * I + params.xi * Q
    out[4] = params.nu * I - params.xi * Q
  else:
    infection = params.beta * S * I / N
    out[0] = -infection
    out[1] = infection - params.sigma * E
    out[2] = params.sigma * E - params.gamma * I
    out[3] = params.f * params.gamma * I
    out[4] = (1.0 - params.f) * params.gamma * I
  return out


def integrate(params, grid, rtol=RTOL, atol=ATOL):
  """Integrate a model and sample it on a grid

  Arguments:

    'params' -- A 'ModelParams' object.

    'grid' -- Increasing times inside [0, params.T].

  Optional arguments:

    'rtol', 'atol' -- Tolerances of the Dormand-Prince 4(5) integrator.
                      Both default to 1e-8.

  Returns a 'SampledTrajectory' with all compartments of the variant.
  Raises 'IntegrationFailure' when the integrator stops before T.
  """
  grid = numpy.asarray(grid, numpy.float64)
  if grid[0] < 0 or grid[-1] > params.T or numpy.any(numpy.diff(grid) <= 0):
    raise pex.ContractViolation("Grid must be increasing inside [0, T]")
  sol = scipy.integrate.solve_ivp(
      lambda t, y: rhs(params, y, t), (0.0, params.T), params.initialstate(),
      method="RK45", t_eval=grid, rtol=rtol, atol=atol)
  if sol.status != 0:
    raise pex.IntegrationFailure(float(sol.t[-1]) if len(sol.t) else 0.0,
                                 sol.message)
  states = sol.y
  negative = states < 0
  if negative.any():
    log.debug("Clamping %d negative values (min %g) after integration",
              negative.sum(), states.min())
    states = numpy.where(negative, 0.0, states)
  columns = list(zip(params.names(), states))
  return SampledTrajectory(grid, columns, N=params.N)


def dailygrid(T, step=1.0):
  "Equally spaced grid on [0, T] (721 points for T=720)"
  n = int(round(T / step))
  return numpy.linspace(0.0, T, n + 1)


###########################################################
# Parameter uncertainty
###########################################################
class TwoPieceNormalSpec:
  "Two-piece normal with separate left and right standard deviations"
  def __init__(self, point_estimate, s_left, s_right, floor=1.0e-4):
    """Constructor for 'TwoPieceNormalSpec'

    Arguments:

      'point_estimate' -- Median of the distribution.

      's_left', 's_right' -- Left and right standard deviations (> 0).

    Optional arguments:

      'floor' -- Value replacing negative draws. Defaults to 1e-4.
    """
    if s_left <= 0 or s_right <= 0:
      raise pex.ContractViolation("Standard deviations must be positive",
                                  (s_left, s_right))
    if floor <= 0:
      raise pex.ContractViolation("Floor must be positive", floor)
    self.point_estimate = float(point_estimate)
    self.s_left = float(s_left)
    self.s_right = float(s_right)
    self.floor = float(floor)

  @classmethod
  def from_ci(cls, point_estimate, lower, upper, floor=1.0e-4):
    "Spec whose 2.5% and 97.5% quantiles are 'lower' and 'upper'"
    return cls(point_estimate, (point_estimate - lower) / Z975,
               (upper - point_estimate) / Z975, floor)

  def __repr__(self):
    return "TPN(%g; %g, %g)" % (self.point_estimate, self.s_left,
                                self.s_right)


def transform_two_piece_normal(spec, z):
  "Map standard normal values 'z' to the two-piece normal of 'spec'"
  z = numpy.asarray(z, numpy.float64)
  theta = numpy.where(z < 0, spec.point_estimate + spec.s_left * z,
                      spec.point_estimate + spec.s_right * z)
  theta = numpy.where(theta < 0, spec.floor, theta)
  if theta.ndim == 0:
    return float(theta)
  return theta


def sample_two_piece_normal(spec, rng, size=None):
  """Draw from a two-piece normal distribution

  Arguments:

    'spec' -- A 'TwoPieceNormalSpec'.

    'rng' -- A numpy 'Generator'.

  Optional arguments:

    'size' -- Number (or shape) of draws. A single float is returned
              when omitted.
  """
  return transform_two_piece_normal(spec, rng.standard_normal(size))


def params_from_quantities(D_E, D_I, R0):
  """Rates from incubation period, infectious period and R0

  Returns the tuple (sigma, gamma, beta) = (1/D_E, 1/D_I, R0/D_I).
  """
  if D_E <= 0 or D_I <= 0 or R0 <= 0:
    raise pex.ContractViolation(
        "D_E, D_I and R0 must be positive (%g, %g, %g)" % (D_E, D_I, R0))
  sigma = 1.0 / D_E
  gamma = 1.0 / D_I
  return sigma, gamma, R0 * gamma


def literature_specs(floor=1.0e-4):
  """Two-piece normal specs for (D_E, D_I, R0) of the early COVID-19 phase

  Point estimates 5.2, 7.5 and 2.2 with 95% CIs 4.1-7.0, 5.3-19.0 and
  1.4-3.9.
  """
  return (TwoPieceNormalSpec.from_ci(5.2, 4.1, 7.0, floor),
          TwoPieceNormalSpec.from_ci(7.5, 5.3, 19.0, floor),
          TwoPieceNormalSpec.from_ci(2.2, 1.4, 3.9, floor))


class Ensemble:
  """Trajectories simulated from sampled parameter sets

  'trajectories' holds the 'SampledTrajectory' objects and 'draws' one
  dict per trajectory with the sampled (D_E, D_I, R0) and the derived
  (sigma, gamma, beta), kept for auditing.
  """
  def __init__(self, trajectories, draws, seed=None):
    self.trajectories = list(trajectories)
    self.draws = list(draws)
    self.seed = seed

  def __len__(self):
    return len(self.trajectories)

  def __getitem__(self, j):
    return self.trajectories[j]

  def __iter__(self):
    return iter(self.trajectories)


def trajectory_streams(seed, J):
  """One independent numpy Generator per trajectory index

  A 'SeedSequence' argument is copied before spawning, so the streams
  depend on its entropy and spawn key only.
  """
  if isinstance(seed, numpy.random.SeedSequence):
    seed = numpy.random.SeedSequence(seed.entropy, spawn_key=seed.spawn_key,
                                     pool_size=seed.pool_size)
  else:
    seed = numpy.random.SeedSequence(seed)
  return [numpy.random.default_rng(child) for child in seed.spawn(J)]


def simulate_ensemble(J, specs, N, E0, I0, T, grid, seed, variant="SEIR",
                      **extras):
  """Simulate 'J' trajectories under parameter uncertainty

  Arguments:

    'J' -- Number of trajectories (>= 1).

    'specs' -- Three 'TwoPieceNormalSpec' for D_E, D_I and R0.

    'N', 'E0', 'I0', 'T' -- Population, initial counts and horizon,
                            common to all trajectories.

    'grid' -- Common output grid.

    'seed' -- Integer or numpy 'SeedSequence'. Each trajectory gets its own
              child stream so the ensemble does not depend on execution
              order.

  Optional arguments:

    'variant' -- Model variant (default 'SEIR'). Any other keyword is
                 passed on to 'ModelParams' (f, nu, xi).

  Returns an 'Ensemble'. An 'IntegrationFailure' carries the index of the
  failing trajectory.
  """
  if J < 1:
    raise pex.ContractViolation("J must be at least 1", J)
  specE, specI, specR = specs
  trajs = []
  draws = []
  for j, rng in enumerate(trajectory_streams(seed, J)):
    D_E = sample_two_piece_normal(specE, rng)
    D_I = sample_two_piece_normal(specI, rng)
    R0 = sample_two_piece_normal(specR, rng)
    sigma, gamma, beta = params_from_quantities(D_E, D_I, R0)
    params = ModelParams(beta, sigma, gamma, N, E0, I0, T, variant=variant,
                         **extras)
    try:
      trajs.append(integrate(params, grid))
    except pex.IntegrationFailure as e:
      raise pex.IntegrationFailure(e.value, e.reason, index=j)
    draws.append({"D_E": D_E, "D_I": D_I, "R0": R0, "sigma": sigma,
                  "gamma": gamma, "beta": beta})
    log.debug("trajectory %d: D_E=%.4f D_I=%.4f R0=%.4f", j, D_E, D_I, R0)
  return Ensemble(trajs, draws, seed)


def point_estimate_params(N=1.0e6, E0=1.0, I0=0.0, T=720.0):
  "SEIR with beta=2.2/7.5, sigma=1/5.2 and gamma=1/7.5"
  sigma, gamma, beta = params_from_quantities(5.2, 7.5, 2.2)
  return ModelParams(beta, sigma, gamma, N, E0, I0, T)
