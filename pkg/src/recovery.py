# recovery.py

"""Full SEIR state and transmission rate from a consensus (E, I) pair

  R(t) = gamma int_0^t I and S = N - E - I - R. The transmission rate is
  fitted to the integrated E equation

      E(t) - E(0) + sigma int_0^t E = beta int_0^t S I / N

  by linear least squares over the grid.
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
import pyepic.pyepicexcpt
import pyepic.epimodels
import pyepic.bsplines

pex = pyepic.pyepicexcpt
pem = pyepic.epimodels
pbs = pyepic.bsplines
log = logging.getLogger(__name__)

# Allowed negative round-off of S, relative to N
TOL_S = 1.0e-6


class FullTrajectory(pem.SampledTrajectory):
  """Recovered (S, E, I, R) trajectory

  Besides the columns it keeps 'intE', the exact running integral of E,
  the rates 'sigma' and 'gamma' and 'provenance', the consensus solution
  it derives from.
  """
  def __init__(self, grid, S, E, I, R, N, intE=None, sigma=None, gamma=None,
               provenance=None):
    pem.SampledTrajectory.__init__(
        self, grid, [("S", S), ("E", E), ("I", I), ("R", R)])
    self.N = float(N)
    self.intE = intE
    self.sigma = sigma
    self.gamma = gamma
    self.provenance = provenance


def recover_full(sol, basis=None, design=None, N=None, grid=None):
  """Full trajectory of a consensus solution

  Arguments:

    'sol' -- A 'ConsensusSolution' (its basis and population are used when
             'basis' or 'N' are omitted).

  Optional arguments:

    'basis' -- 'BasisSystem' of the coefficients.

    'design' -- 'DesignMatrices' on the output grid; built from 'grid'
                when omitted.

    'N' -- Population.

    'grid' -- Output times (default: daily on [0, T]).

  E and I are evaluated through B, R = gamma Phi cI and S by complement.
  Negative S values are clamped to zero, with a warning when they reach
  below -1e-6 N (the solution is then infeasible on 'grid').
  """
  basis = basis or sol.basis
  N = sol.spec.N if N is None else float(N)
  if design is None:
    if grid is None:
      grid = numpy.linspace(0.0, basis.T, int(round(basis.T)) + 1)
    design = pbs.design_matrices(basis, grid=grid)
  cE, cI = sol.c_hat.cE, sol.c_hat.cI
  E = numpy.dot(design.B, cE)
  I = numpy.dot(design.B, cI)
  R = sol.gamma_hat * numpy.dot(design.Phi, cI)
  S = N - E - I - R
  low = S.min()
  if low < -TOL_S * N:
    log.warning("Recovered S reaches %g, below -%g; clamped to zero", low,
                TOL_S * N)
  elif low < 0:
    log.debug("Clamping recovered S (min %g) to zero", low)
  S = numpy.maximum(S, 0.0)
  intE = numpy.dot(design.Phi, cE)
  return FullTrajectory(design.grid, S, E, I, R, N, intE, sol.sigma_hat,
                        sol.gamma_hat, sol)


def estimate_beta(full, sigma_hat, bounds):
  """Transmission rate of a full trajectory

  Arguments:

    'full' -- A 'FullTrajectory' (or any trajectory with S, E and I).

    'sigma_hat' -- Incubation rate.

    'bounds' -- (beta_min, beta_max).

  beta = sum(a b) / sum(a a) with a_m = int_0^t_m S I / N (trapezoid rule)
  and b_m = E(t_m) - E(0) + sigma int_0^t_m E, clipped to the bounds.
  Raises 'DegenerateEstimate' when S I vanishes on the grid.
  """
  grid = full.grid
  N = full.N
  if N is None:
    raise pex.ContractViolation("The population of the trajectory is unknown")
  S, E, I = full["S"], full["E"], full["I"]
  a = scipy.integrate.cumulative_trapezoid(S * I / N, grid, initial=0.0)
  intE = getattr(full, "intE", None)
  if intE is None:
    intE = scipy.integrate.cumulative_trapezoid(E, grid, initial=0.0)
  b = E - E[0] + sigma_hat * intE
  den = numpy.dot(a, a)
  if not den > 0:
    raise pex.DegenerateEstimate("no transmission signal (S I = 0)")
  beta = numpy.dot(a, b) / den
  lo, hi = bounds
  if not lo <= beta <= hi:
    log.warning("beta=%g clipped to [%g, %g]", beta, lo, hi)
  return float(numpy.clip(beta, lo, hi))


def estimates(sigma, gamma, beta):
  "Parameter summary: rates, R0 = beta/gamma and the mean periods"
  return {"sigma": sigma, "gamma": gamma, "beta": beta, "R0": beta / gamma,
          "D_E": 1.0 / sigma, "D_I": 1.0 / gamma}
