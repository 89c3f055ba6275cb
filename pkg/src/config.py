# config.py

"""Configuration of PyEpiC runs

  A configuration is a plain dict. 'load_config' starts from DEFAULTS,
  merges a JSON file over them and command line overrides over both, and
  validates the result. Unknown keys and invalid values raise
  'ConfigError'.
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

import copy
import json
import pyepic.pyepicexcpt
import pyepic.epimodels
import pyepic.consensus

pex = pyepic.pyepicexcpt
pem = pyepic.epimodels
pcs = pyepic.consensus

EXPERIMENTS = ("sim_table", "realdata_table", "sensitivity")

DEFAULTS = {
    "q": 1.0,
    "rho": 1.0,
    "K": 30,
    "degree": 3,
    "M": None,
    "delta_max": 120.0,
    "N": 1.0e6,
    "T": 720.0,
    "output_step": 1.0,
    "bounds": {"sigma": [1.0e-3, 2.0], "gamma": [1.0e-3, 2.0],
               "beta": [1.0e-3, 10.0]},
    "eps_q": 1.0e-3,
    "eps_irls": 1.0e-8,
    "tol_outer": 1.0e-3,
    "max_outer": 50,
    "seed": 20200101,
    "simulation": {"J": 10, "E0": 1.0, "I0": 0.0, "variant": "SEIR",
                   "f": 1.0, "nu": None, "xi": None,
                   "D_E": [5.2, 4.1, 7.0], "D_I": [7.5, 5.3, 19.0],
                   "R0": [2.2, 1.4, 3.9], "floor": 1.0e-4},
    "report": {"experiment": "sim_table", "reps": 100, "J": [10],
               "q": [1.0, 1.5, 2.0], "K": [30], "rho": [1.0],
               "threads": 1},
}


def _merge(base, update, prefix=""):
  for key, value in update.items():
    name = prefix + key
    if key not in base:
      raise pex.ConfigError(name, "unknown key")
    if isinstance(base[key], dict) and key != "bounds":
      if not isinstance(value, dict):
        raise pex.ConfigError(name, "expected a group of keys")
      _merge(base[key], value, name + ".")
    elif key == "bounds":
      if not isinstance(value, dict):
        raise pex.ConfigError(name, "expected a group of keys")
      for bkey, bvalue in value.items():
        if bkey not in base[key]:
          raise pex.ConfigError(name + "." + bkey, "unknown key")
        base[key][bkey] = bvalue
    else:
      base[key] = value


def _number(cfg, key, positive=True, integer=False, allow_none=False):
  group, _, leaf = key.rpartition(".")
  holder = cfg[group] if group else cfg
  value = holder[leaf]
  if value is None and allow_none:
    return
  try:
    value = int(value) if integer else float(value)
  except (TypeError, ValueError):
    raise pex.ConfigError(key, "not a number: %r" % (holder[leaf],))
  if positive and not value > 0:
    raise pex.ConfigError(key, "must be positive")
  holder[leaf] = value


def _pair(cfg, key, triple=False):
  group, _, leaf = key.rpartition(".")
  holder = cfg[group] if group else cfg
  value = holder[leaf]
  n = 3 if triple else 2
  if not isinstance(value, (list, tuple)) or len(value) != n:
    raise pex.ConfigError(key, "expected a list of %d numbers" % n)
  try:
    holder[leaf] = [float(v) for v in value]
  except (TypeError, ValueError):
    raise pex.ConfigError(key, "expected a list of %d numbers" % n)


def _list(cfg, key, integer=False):
  value = cfg["report"][key]
  if not isinstance(value, (list, tuple)):
    value = [value]
  try:
    value = [int(v) if integer else float(v) for v in value]
  except (TypeError, ValueError):
    raise pex.ConfigError("report." + key, "expected numbers")
  if not value or min(value) <= 0:
    raise pex.ConfigError("report." + key, "expected positive numbers")
  cfg["report"][key] = value


def validate(cfg):
  "Check and normalize every key of a configuration dict in place"
  for key in ("q", "rho", "delta_max", "N", "T", "output_step", "eps_q",
              "eps_irls", "tol_outer"):
    _number(cfg, key, positive=(key != "delta_max"))
  if cfg["delta_max"] < 0:
    raise pex.ConfigError("delta_max", "must be nonnegative")
  for key in ("K", "degree", "max_outer", "seed"):
    _number(cfg, key, positive=(key in ("K", "max_outer")), integer=True)
  _number(cfg, "M", integer=True, allow_none=True)
  if cfg["seed"] < 0:
    raise pex.ConfigError("seed", "must be nonnegative")
  if cfg["K"] < cfg["degree"] + 1:
    raise pex.ConfigError("K", "needs at least degree+1 basis functions")
  for name in ("sigma", "gamma", "beta"):
    _pair(cfg["bounds"], name)
    lo, hi = cfg["bounds"][name]
    if not 0 < lo < hi:
      raise pex.ConfigError("bounds." + name, "must satisfy 0 < min < max")
  sim = cfg["simulation"]
  _number(cfg, "simulation.J", integer=True)
  _number(cfg, "simulation.E0", positive=False)
  _number(cfg, "simulation.I0", positive=False)
  _number(cfg, "simulation.floor")
  _number(cfg, "simulation.f", positive=False)
  _number(cfg, "simulation.nu", allow_none=True)
  _number(cfg, "simulation.xi", allow_none=True)
  if sim["variant"] not in pem.VARIANTS:
    raise pex.ConfigError("simulation.variant",
                          "one of %s" % ", ".join(pem.VARIANTS))
  for name in ("D_E", "D_I", "R0"):
    _pair(sim, name, triple=True)
    point, lower, upper = sim[name]
    if not lower < point < upper:
      raise pex.ConfigError("simulation." + name,
                            "expected [point, lower, upper] with"
                            " lower < point < upper")
  rep = cfg["report"]
  if rep["experiment"] not in EXPERIMENTS:
    raise pex.ConfigError("report.experiment",
                          "one of %s" % ", ".join(EXPERIMENTS))
  _number(cfg, "report.reps", integer=True)
  _number(cfg, "report.threads", integer=True)
  _list(cfg, "J", integer=True)
  _list(cfg, "q")
  _list(cfg, "K", integer=True)
  _list(cfg, "rho")
  try:
    problem_spec(cfg)
  except pex.ContractViolation as e:
    raise pex.ConfigError("problem", e.message)
  return cfg


def load_config(fname=None, overrides=None):
  """Configuration dict from defaults, a JSON file and overrides

  Optional arguments:

    'fname' -- JSON configuration file.

    'overrides' -- Dict merged last; dotted keys such as 'simulation.J'
                   address group members. None values are ignored.
  """
  cfg = copy.deepcopy(DEFAULTS)
  if fname is not None:
    with open(fname) as ifile:
      try:
        fromfile = json.load(ifile)
      except ValueError as e:
        raise pex.ConfigError(fname, "invalid JSON: %s" % e)
    if not isinstance(fromfile, dict):
      raise pex.ConfigError(fname, "expected a JSON object")
    _merge(cfg, fromfile)
  for key, value in (overrides or {}).items():
    if value is None:
      continue
    nested = value
    for part in reversed(key.split(".")):
      nested = {part: nested}
    _merge(cfg, nested)
  return validate(cfg)


def problem_spec(cfg, **changes):
  """'ProblemSpec' of a configuration

  Keyword arguments replace configuration values (q, K, rho, ...).
  """
  values = dict((k, cfg[k]) for k in (
      "q", "rho", "K", "degree", "M", "bounds", "delta_max", "N", "T",
      "eps_q", "eps_irls", "tol_outer", "max_outer"))
  values.update(changes)
  return pcs.ProblemSpec(**values)


def two_piece_specs(cfg):
  "The three 'TwoPieceNormalSpec' (D_E, D_I, R0) of the simulation group"
  sim = cfg["simulation"]
  return tuple(pem.TwoPieceNormalSpec.from_ci(
      sim[name][0], sim[name][1], sim[name][2], sim["floor"])
               for name in ("D_E", "D_I", "R0"))


def variant_extras(cfg):
  "Keyword arguments of 'ModelParams' specific to the model variant"
  sim = cfg["simulation"]
  extras = {"f": sim["f"]}
  if sim["variant"] == "SEIQR":
    extras.update(nu=sim["nu"], xi=sim["xi"])
  return extras
