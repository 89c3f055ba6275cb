# cli.py

"""Command line interface of PyEpiC

  pyepic simulate   -- simulate an ensemble of trajectories
  pyepic summarize  -- consensus curve and baselines of trajectory files
  pyepic recover    -- full trajectory and parameters of a solution
  pyepic report     -- replicated experiments, tables and figures

  Every command writes a JSON manifest with the configuration, the seed,
  the SHA-256 digests of the files it read and wrote, and the elapsed
  time. The exit status is 0 on success, 2 for configuration errors, 3 for
  infeasible problems, 4 for I/O errors and 5 for numerical failures.
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

import argparse
import logging
import os
import sys
import time
import numpy
import scipy
import pyepic.pyepicexcpt
import pyepic.tools
import pyepic.config
import pyepic.epimodels
import pyepic.fspace
import pyepic.consensus
import pyepic.recovery
import pyepic.baselines
import pyepic.trajio
import pyepic.plots
import pyepic.experiments

pex = pyepic.pyepicexcpt
ptools = pyepic.tools
pcfg = pyepic.config
pem = pyepic.epimodels
pfs = pyepic.fspace
pcs = pyepic.consensus
prc = pyepic.recovery
pbl = pyepic.baselines
pio = pyepic.trajio
pplt = pyepic.plots
pexp = pyepic.experiments
log = logging.getLogger(__name__)

IOERROR = 4


def versions():
  return {"pyepic": ptools.pyepicversion(), "numpy": numpy.__version__,
          "scipy": scipy.__version__}


class RunManifest:
  """Inputs, outputs and settings of one command

  'inputs' and 'outputs' are lists of {path, sha256} records. 'write'
  stores the manifest as JSON and returns its path.
  """
  def __init__(self, command, cfg):
    self.command = command
    self.cfg = cfg
    self.inputs = []
    self.outputs = []
    self.extra = {}
    self.start = time.perf_counter()

  def read(self, fname):
    self.inputs.append(pio.inputrecord(fname))

  def wrote(self, fname):
    self.outputs.append(pio.inputrecord(fname))

  def write(self, fname, **extra):
    manifest = {"kind": self.command, "config": self.cfg,
                "seed": self.cfg["seed"], "versions": versions(),
                "inputs": self.inputs, "outputs": self.outputs,
                "elapsed_seconds": time.perf_counter() - self.start}
    manifest.update(self.extra)
    manifest.update(extra)
    pio.writejson(fname, manifest)
    return fname


def _outfile(args, name):
  return os.path.join(args.out, name)


###########################################################
# Commands
###########################################################
def cmd_simulate(cfg, args):
  "J trajectory CSV files and an ensemble manifest"
  run = RunManifest("ensemble", cfg)
  sim = cfg["simulation"]
  ensemble = pexp.simulate(cfg, sim["J"], cfg["seed"])
  for j, traj in enumerate(ensemble):
    fname = _outfile(args, "traj_%03d.csv" % j)
    pio.writetrajectory(fname, traj, "%s trajectory %d of %d" % (
        sim["variant"], j, len(ensemble)))
    run.wrote(fname)
  run.write(_outfile(args, "ensemble.json"), draws=ensemble.draws)
  log.info("simulated %d trajectories into %s", len(ensemble), args.out)
  return ensemble


def _readinputs(cfg, args, run):
  if args.literature:
    fname = args.literature_file or pio.LITERATURE
    run.read(fname)
    return pio.literature_trajectories(pio.loadliterature(fname))[1]
  if not args.inputs:
    raise pex.ContractViolation("No input trajectory files given")
  trajs = []
  for fname in args.inputs:
    trajs.append(pio.readtrajectory(fname))
    run.read(fname)
  try:
    ptools.checkcommongrid(trajs)
  except pex.ContractViolation:
    grid = pem.dailygrid(cfg["T"], cfg["output_step"])
    log.info("inputs on different grids, resampled onto %d points",
             len(grid))
    trajs = [pfs.resample(t, grid) for t in trajs]
  return trajs


def exportmatrices(sol, outdir):
  "Design, Gram and constraint matrices of a solution as CSV files"
  K = sol.basis.K
  names = ["b%d" % k for k in range(K)]
  written = []
  for label, matrix in (("B", sol.design.B), ("Bp", sol.design.Bp),
                        ("Phi", sol.design.Phi), ("G", sol.gram.G)):
    fname = os.path.join(outdir, "matrix_%s.csv" % label)
    pio.writedat(fname, matrix, names, "%s, K=%d" % (label, K))
    written.append(fname)
  cons = pcs.constraint_matrices(sol.basis, sol.design, sol.sigma_hat,
                                 sol.gamma_hat, sol.spec.N)
  names2 = ["cE%d" % k for k in range(K)] + ["cI%d" % k for k in range(K)]
  for label, matrix in (("A_eq", cons.A_eq), ("A_ineq", cons.A_ineq)):
    fname = os.path.join(outdir, "matrix_%s.csv" % label)
    pio.writedat(fname, matrix, names2, "%s at sigma=%.17g gamma=%.17g" % (
        label, sol.sigma_hat, sol.gamma_hat))
    written.append(fname)
  return written


def cmd_summarize(cfg, args):
  "Solution manifest, consensus CSV and baseline CSVs of the inputs"
  run = RunManifest("summary", cfg)
  trajs = _readinputs(cfg, args, run)
  grid = trajs[0].grid
  sol = pcs.solve(trajs, pcfg.problem_spec(cfg))
  E, I = sol.curves(grid)
  outputs = []
  fname = _outfile(args, "consensus.csv")
  pio.writetrajectory(fname, pem.SampledTrajectory(grid, [("E", E),
                                                          ("I", I)]),
                      "consensus q=%g sigma=%.17g gamma=%.17g" % (
                          sol.spec.q, sol.sigma_hat, sol.gamma_hat))
  outputs.append(fname)
  mean = pbl.pointwise_mean(trajs)
  median = pbl.pointwise_median(trajs)
  for name, traj in (("mean.csv", mean), ("median.csv", median)):
    fname = _outfile(args, name)
    pio.writetrajectory(fname, traj, "pointwise " + name[:-4])
    outputs.append(fname)
  fname = _outfile(args, "summary.svg")
  pplt.plot_ensemble(fname, trajs, {sol.spec.q: (grid, E, I)}, mean, median,
                     "Consensus, q=%g" % sol.spec.q)
  outputs.append(fname)
  if args.export_matrices:
    outputs.extend(exportmatrices(sol, args.out))
  for fname in outputs:
    run.wrote(fname)
  manifest = pio.solutionmanifest(sol, run.inputs, grid,
                                  outputs=run.outputs, seed=cfg["seed"],
                                  versions=versions())
  pio.writejson(_outfile(args, "solution.json"), manifest)
  log.info("sigma=%.5f gamma=%.5f after %d outer iterations", sol.sigma_hat,
           sol.gamma_hat, sol.iterations)
  return sol


def cmd_recover(cfg, args):
  "Full trajectory CSV and parameter JSON of a solution manifest"
  run = RunManifest("recovery", cfg)
  manifest = pio.readjson(args.solution)
  pio.verifyinputs(manifest)
  run.read(args.solution)
  sol = pio.solutionfrommanifest(manifest)
  grid = manifest.get("grid")
  if grid is None:
    grid = pem.dailygrid(sol.spec.T, cfg["output_step"])
  full = prc.recover_full(sol, grid=numpy.asarray(grid, numpy.float64))
  beta = prc.estimate_beta(full, sol.sigma_hat, sol.spec.bounds["beta"])
  params = prc.estimates(sol.sigma_hat, sol.gamma_hat, beta)
  fname = _outfile(args, "full.csv")
  pio.writetrajectory(fname, full, "recovered from %s" % args.solution)
  run.wrote(fname)
  fname = _outfile(args, "parameters.json")
  pio.writejson(fname, params)
  run.wrote(fname)
  fname = _outfile(args, "full.svg")
  reference = pem.integrate(pem.point_estimate_params(sol.spec.N,
                                                      T=sol.spec.T),
                            full.grid)
  pplt.plot_full(fname, full, reference, "Recovered trajectory")
  run.wrote(fname)
  run.write(_outfile(args, "recovery.json"), parameters=params)
  log.info("beta=%.5f R0=%.4f", beta, params["R0"])
  return params


def cmd_report(cfg, args):
  "Results table of a replicated experiment as CSV and JSON"
  run = RunManifest("report", cfg)
  experiment = args.experiment or cfg["report"]["experiment"]
  rows = pexp.run(experiment, cfg, args.out)
  fname = _outfile(args, "%s.csv" % experiment)
  pexp.writetable(fname, rows)
  run.wrote(fname)
  for name in sorted(os.listdir(args.out)):
    if name.endswith(".svg"):
      run.wrote(_outfile(args, name))
  excluded = sum(row["excluded"] for row in rows)
  if excluded:
    log.warning("%d replication results excluded", excluded)
  run.write(_outfile(args, "%s.json" % experiment), experiment=experiment,
            rows=rows)
  return rows


COMMANDS = {"simulate": cmd_simulate, "summarize": cmd_summarize,
            "recover": cmd_recover, "report": cmd_report}


###########################################################
# Argument parsing
###########################################################
def parser():
  p = argparse.ArgumentParser(
      prog="pyepic",
      description="Consensus curves of ensembles of epidemic trajectories")
  p.add_argument("--version", action="version",
                 version="%(prog)s " + ptools.pyepicversion())
  common = argparse.ArgumentParser(add_help=False)
  common.add_argument("--config", help="JSON configuration file")
  common.add_argument("--out", default=".", help="Output directory")
  common.add_argument("--seed", type=int)
  common.add_argument("--q", type=float, nargs="+")
  common.add_argument("--K", type=int, nargs="+")
  common.add_argument("--rho", type=float, nargs="+")
  common.add_argument("--J", type=int, nargs="+")
  common.add_argument("--reps", type=int, help="Replications per cell")
  common.add_argument("--threads", type=int, help="Worker processes")
  verbosity = common.add_mutually_exclusive_group()
  verbosity.add_argument("-v", "--verbose", action="store_true")
  verbosity.add_argument("-q", "--quiet", action="store_true")
  sub = p.add_subparsers(dest="command", required=True)
  sub.add_parser("simulate", parents=[common],
                 help="Simulate an ensemble of trajectories")
  s = sub.add_parser("summarize", parents=[common],
                     help="Consensus of trajectory files")
  s.add_argument("inputs", nargs="*", help="Trajectory CSV files")
  s.add_argument("--literature", action="store_true",
                 help="Use the bundled literature parameter table")
  s.add_argument("--literature-file", help="Another literature table")
  s.add_argument("--export-matrices", action="store_true",
                 help="Write design, Gram and constraint matrices as CSV")
  r = sub.add_parser("recover", parents=[common],
                     help="Full trajectory of a solution manifest")
  r.add_argument("solution", help="solution.json of 'summarize'")
  e = sub.add_parser("report", parents=[common],
                     help="Replicated experiment tables and figures")
  e.add_argument("experiment", nargs="?", choices=pcfg.EXPERIMENTS)
  return p


def overrides(args):
  """Configuration overrides of the command line flags

  --q, --K, --rho and --J set the single-run values from their first
  entry and the report lists from all of them.
  """
  o = {"seed": args.seed, "report.reps": args.reps,
       "report.threads": args.threads}
  for flag in ("q", "K", "rho"):
    values = getattr(args, flag)
    if values:
      o[flag] = values[0]
      o["report." + flag] = list(values)
  if args.J:
    o["simulation.J"] = args.J[0]
    o["report.J"] = list(args.J)
  return o


def setuplogging(args):
  level = logging.INFO
  if args.verbose:
    level = logging.DEBUG
  elif args.quiet:
    level = logging.WARNING
  handler = logging.StreamHandler(sys.stderr)
  handler.setFormatter(
      logging.Formatter("%(levelname)s %(name)s: %(message)s"))
  root = logging.getLogger()
  root.handlers[:] = [handler]
  root.setLevel(level)


def main(argv=None):
  "Entry point; returns the exit status"
  args = parser().parse_args(argv)
  setuplogging(args)
  try:
    cfg = pcfg.load_config(args.config, overrides(args))
    os.makedirs(args.out, exist_ok=True)
    COMMANDS[args.command](cfg, args)
  except pex.PyEpiCException as e:
    log.error("%s", str(e).replace("\n", ": ", 1))
    return e.exitcode
  except OSError as e:
    log.error("I/O error: %s", e)
    return IOERROR
  return 0


if __name__ == "__main__":
  sys.exit(main())
