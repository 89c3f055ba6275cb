# experiments.py

"""Replicated experiments: simulation table, literature table and
  hyperparameter sensitivity

  Every experiment produces a list of rows, one per cell (J, q), (q) or
  (K, rho, q), with the mean and the Monte Carlo standard deviation of the
  estimated sigma, gamma, 1/sigma, 1/gamma, beta and R0 = beta/gamma.
  Replications are independent: replication r of every cell uses the r-th
  child of the configured seed, so results do not depend on the number of
  worker processes. A replication that fails with a numerical error is
  logged and left out; the number of exclusions is part of each row.
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

import csv
import logging
import multiprocessing
import os
import numpy
import pyepic.pyepicexcpt
import pyepic.tools
import pyepic.config
import pyepic.epimodels
import pyepic.consensus
import pyepic.recovery
import pyepic.baselines
import pyepic.trajio
import pyepic.plots

pex = pyepic.pyepicexcpt
ptools = pyepic.tools
pcfg = pyepic.config
pem = pyepic.epimodels
pcs = pyepic.consensus
prc = pyepic.recovery
pbl = pyepic.baselines
pio = pyepic.trajio
pplt = pyepic.plots
log = logging.getLogger(__name__)

STATISTICS = ("sigma", "gamma", "D_E", "D_I", "beta", "R0")


def estimate_all(trajs, cfg, q, K, rho):
  """Consensus, full trajectory and parameter estimates of one ensemble

  Returns (solution, full trajectory, estimates dict).
  """
  spec = pcfg.problem_spec(cfg, q=q, K=K, rho=rho)
  sol = pcs.solve(trajs, spec)
  full = prc.recover_full(sol, grid=trajs[0].grid)
  beta = prc.estimate_beta(full, sol.sigma_hat, cfg["bounds"]["beta"])
  return sol, full, prc.estimates(sol.sigma_hat, sol.gamma_hat, beta)


def simulate(cfg, J, seed):
  "Ensemble of 'J' trajectories of the simulation group of 'cfg'"
  sim = cfg["simulation"]
  grid = pem.dailygrid(cfg["T"], cfg["output_step"])
  return pem.simulate_ensemble(J, pcfg.two_piece_specs(cfg), cfg["N"],
                               sim["E0"], sim["I0"], cfg["T"], grid, seed,
                               variant=sim["variant"],
                               **pcfg.variant_extras(cfg))


def replication(task):
  """One replication: simulate an ensemble, estimate for every q

  'task' is (index, cfg, J, K, rho, qs, seed). Returns (index, dict q ->
  estimates, None) or (index, None, error message). Runs in worker
  processes, so it only takes and returns picklable values.
  """
  index, cfg, J, K, rho, qs, seed = task
  try:
    trajs = simulate(cfg, J, seed).trajectories
    results = {}
    for q in qs:
      results[q] = estimate_all(trajs, cfg, q, K, rho)[2]
    return index, results, None
  except (pex.PyEpiCException, numpy.linalg.LinAlgError) as e:
    return index, None, str(e).replace("\n", " ")


def runtasks(tasks, threads=1):
  """Results of 'replication' over 'tasks', in task order

  With 'threads' > 1 the tasks are mapped over a process pool.
  """
  if threads > 1 and len(tasks) > 1:
    with multiprocessing.Pool(processes=threads) as pool:
      results = pool.map(replication, tasks)
  else:
    results = [replication(t) for t in tasks]
  for index, res, error in results:
    if res is None:
      log.warning("replication %d excluded: %s", index, error)
  return results


def summarize_cell(cell, estimates, failed):
  """Row of a results table

  Arguments:

    'cell' -- Dict of the cell keys (J, q, K, rho).

    'estimates' -- List of estimates dicts of the successful replications.

    'failed' -- Number of excluded replications.
  """
  row = dict(cell)
  row["replications"] = len(estimates)
  row["excluded"] = failed
  for name in STATISTICS:
    mean, sd = ptools.meanstd([e[name] for e in estimates])
    row[name] = {"mean": mean, "sd": sd}
  return row


def _collect(results, qs):
  ok = [res for _, res, _ in results if res is not None]
  failed = len(results) - len(ok)
  return dict((q, [res[q] for res in ok]) for q in qs), failed


def _seeds(cfg, reps, *key):
  root = numpy.random.SeedSequence([cfg["seed"]] + [int(k) for k in key])
  return root.spawn(reps)


def sim_table(cfg, outdir=None):
  """Replicated simulation study over report.J x report.q

  K and rho are the first entries of report.K and report.rho. With
  'outdir', the ensemble of the first replication of every J is drawn
  with its consensus curves.
  """
  rep = cfg["report"]
  K, rho, qs = rep["K"][0], rep["rho"][0], rep["q"]
  rows = []
  for J in rep["J"]:
    seeds = _seeds(cfg, rep["reps"], J)
    tasks = [(r, cfg, J, K, rho, qs, s) for r, s in enumerate(seeds)]
    log.info("sim_table: J=%d, %d replications", J, len(tasks))
    byq, failed = _collect(runtasks(tasks, rep["threads"]), qs)
    for q in qs:
      rows.append(summarize_cell({"J": J, "q": q, "K": K, "rho": rho},
                                 byq[q], failed))
    if outdir is not None:
      trajs = simulate(cfg, J, seeds[0]).trajectories
      ensemble_figure(os.path.join(outdir, "sim_J%d.svg" % J), trajs, cfg,
                      qs, K, rho, "Simulated ensemble, J=%d" % J)
  return rows


def sensitivity(cfg, outdir=None):
  """Replicated simulation study over report.K x report.rho x report.q

  J is the first entry of report.J. All cells share the replication
  seeds, so the cells differ only by their hyperparameters. With
  'outdir', the ensemble of the first replication is drawn with the
  consensus curves of every (K, rho) cell.
  """
  rep = cfg["report"]
  J, qs = rep["J"][0], rep["q"]
  seeds = _seeds(cfg, rep["reps"], J)
  rows = []
  trajs = None
  if outdir is not None:
    trajs = simulate(cfg, J, seeds[0]).trajectories
  for K in rep["K"]:
    for rho in rep["rho"]:
      tasks = [(r, cfg, J, K, rho, qs, s) for r, s in enumerate(seeds)]
      log.info("sensitivity: K=%d rho=%g, %d replications", K, rho,
               len(tasks))
      byq, failed = _collect(runtasks(tasks, rep["threads"]), qs)
      for q in qs:
        rows.append(summarize_cell({"J": J, "q": q, "K": K, "rho": rho},
                                   byq[q], failed))
      if trajs is not None:
        ensemble_figure(os.path.join(outdir, "sensitivity_K%d_rho%g.svg" % (
            K, rho)), trajs, cfg, qs, K, rho,
            "Simulated ensemble, K=%d, rho=%g" % (K, rho))
  return rows


def realdata_table(cfg, outdir=None, data=None):
  """Estimates from the literature parameter table, one row per q

  The run is deterministic; the standard deviations are 0. With 'outdir'
  the ensemble figure and the full trajectory of q=1 are drawn.
  """
  rep = cfg["report"]
  K, rho, qs = rep["K"][0], rep["rho"][0], rep["q"]
  data = data or pio.loadliterature()
  ids, trajs = pio.literature_trajectories(data)
  log.info("realdata_table: %d studies (%s)", len(ids), ", ".join(ids))
  rows = []
  curves = {}
  fulls = {}
  for q in qs:
    try:
      sol, full, est = estimate_all(trajs, cfg, q, K, rho)
    except (pex.PyEpiCException, numpy.linalg.LinAlgError) as e:
      log.warning("q=%g excluded: %s", q, str(e).replace("\n", " "))
      rows.append(summarize_cell({"J": len(trajs), "q": q, "K": K,
                                  "rho": rho}, [], 1))
      continue
    rows.append(summarize_cell({"J": len(trajs), "q": q, "K": K,
                                "rho": rho}, [est], 0))
    curves[q] = (full.grid, full["E"], full["I"])
    fulls[q] = full
  if outdir is not None:
    pplt.plot_ensemble(os.path.join(outdir, "realdata.svg"), trajs, curves,
                       pbl.pointwise_mean(trajs), pbl.pointwise_median(trajs),
                       "Literature parameter sets")
    if 1.0 in fulls:
      reference = pem.integrate(pem.point_estimate_params(
          data["N"], data["E0"], data["I0"], data["T"]), fulls[1.0].grid)
      pplt.plot_full(os.path.join(outdir, "realdata_full_q1.svg"),
                     fulls[1.0], reference, "Recovered trajectory, q=1")
  return rows


def ensemble_figure(fname, trajs, cfg, qs, K, rho, title=None):
  "Ensemble figure with the consensus curves of every q that solves"
  curves = {}
  for q in qs:
    try:
      sol = pcs.solve(trajs, pcfg.problem_spec(cfg, q=q, K=K, rho=rho))
    except pex.PyEpiCException as e:
      log.warning("figure: q=%g skipped: %s", q, str(e).replace("\n", " "))
      continue
    E, I = sol.curves(trajs[0].grid)
    curves[q] = (trajs[0].grid, E, I)
  pplt.plot_ensemble(fname, trajs, curves, pbl.pointwise_mean(trajs),
                     pbl.pointwise_median(trajs), title)


RUNNERS = {"sim_table": sim_table, "realdata_table": realdata_table,
           "sensitivity": sensitivity}


def run(experiment, cfg, outdir=None):
  "Rows of 'experiment' (one of config.EXPERIMENTS)"
  if experiment not in RUNNERS:
    raise pex.ConfigError("report.experiment",
                          "one of %s" % ", ".join(sorted(RUNNERS)))
  return RUNNERS[experiment](cfg, outdir)


def formatcell(stat):
  "'mean (sd)' with three decimals"
  if numpy.isnan(stat["mean"]):
    return "nan"
  return "%.3f (%.3f)" % (stat["mean"], stat["sd"])


def writetable(fname, rows):
  """CSV results table, one line per cell

  Statistics are written as 'mean (sd)'.
  """
  keys = ("J", "q", "K", "rho", "replications", "excluded")
  with open(fname, "w", newline="") as ofile:
    writer = csv.writer(ofile)
    writer.writerow(keys + STATISTICS)
    for row in rows:
      writer.writerow([row[k] for k in keys] +
                      [formatcell(row[s]) for s in STATISTICS])
