# trajio.py

"""Reading and writing trajectories, tables and manifests

  Trajectories are CSV files: optional '#' comment lines (a line
  '# N = <population>' records the population), a header line 't,S,E,I,R'
  (any subset containing E and I) and one row per grid point. Numbers are
  written with 17 significant digits so that files read back bit for bit.

  Manifests are JSON documents listing the configuration, the SHA-256
  digests of the inputs and the outputs of a run.
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

import json
import os
import numpy
import pyepic.pyepicexcpt
import pyepic.tools
import pyepic.epimodels
import pyepic.bsplines
import pyepic.fspace
import pyepic.consensus

pex = pyepic.pyepicexcpt
ptools = pyepic.tools
pem = pyepic.epimodels
pbs = pyepic.bsplines
pfs = pyepic.fspace
pcs = pyepic.consensus

DATADIR = os.path.join(os.path.dirname(__file__), "data")
LITERATURE = os.path.join(DATADIR, "literature_2020.json")


def writedat(fname, matrix, names, header="", formatstring="%.17g"):
  """Dumps a two-dimensional array as CSV

  Arguments:

    'fname' -- Output file name.

    'matrix' -- NumPy array, one column per name.

    'names' -- Column names, written as the first non-comment line.

  Optional arguments:

    'header' -- Comment text; every line is prefixed with '# '.

    'formatstring' -- Format of each number. Defaults to "%.17g".
  """
  matrix = numpy.asarray(matrix, numpy.float64)
  if matrix.ndim == 1:
    matrix = matrix[:, None]
  if matrix.ndim != 2 or matrix.shape[1] != len(names):
    raise pex.ContractViolation(
        "%d column names for an array of shape %s" % (len(names),
                                                       matrix.shape))
  lines = ["# " + line for line in header.splitlines()]
  lines.append(",".join(names))
  with open(fname, "w") as ofile:
    ofile.write("\n".join(lines) + "\n")
    numpy.savetxt(ofile, matrix, fmt=formatstring, delimiter=",")


def readdat(fname):
  """Read a CSV file written by 'writedat'

  Returns (names, matrix, comments), comments being the text of the '#'
  lines without the leading '# '.
  """
  try:
    with open(fname) as ifile:
      lines = ifile.read().splitlines()
  except UnicodeDecodeError as e:
    raise pex.DataFormatError(fname, str(e))
  comments = [l[1:].strip() for l in lines if l.startswith("#")]
  body = [l for l in lines if l.strip() and not l.startswith("#")]
  if not body:
    raise pex.DataFormatError(fname, "no header line")
  names = [n.strip() for n in body[0].split(",")]
  try:
    matrix = numpy.loadtxt(body[1:], delimiter=",", ndmin=2)
  except ValueError as e:
    raise pex.DataFormatError(fname, str(e))
  if matrix.size and matrix.shape[1] != len(names):
    raise pex.DataFormatError(fname, "%d names for %d columns" % (
        len(names), matrix.shape[1]))
  return names, matrix, comments


def writetrajectory(fname, traj, header=""):
  "Dumps a 'SampledTrajectory' as CSV, time in the first column"
  names = traj.compartments() + [n for n in traj.names()
                                 if n not in pem.COMPARTMENTS]
  if traj.N is not None:
    header = ("N = %.17g\n" % traj.N) + header
  matrix = numpy.column_stack([traj.grid] + [traj[n] for n in names])
  writedat(fname, matrix, ["t"] + names, header)


def readtrajectory(fname, N=None):
  """Read a trajectory CSV file

  Optional arguments:

    'N' -- Population; taken from a '# N = ...' comment when omitted.
           When known, the invariants of 'SampledTrajectory' are checked.
  """
  names, matrix, comments = readdat(fname)
  if N is None:
    for c in comments:
      key, sep, value = c.partition("=")
      if sep and key.strip() == "N":
        N = float(value)
  if not names or names[0] != "t":
    raise pex.DataFormatError(fname, "first column must be 't'")
  if len(matrix) < 2:
    raise pex.DataFormatError(fname, "fewer than two rows")
  try:
    return pem.SampledTrajectory(
        matrix[:, 0], [(n, matrix[:, i+1]) for i, n in enumerate(names[1:])],
        N=N)
  except pex.ContractViolation as e:
    raise pex.DataFormatError(fname, e.message)


def _default(obj):
  if isinstance(obj, numpy.ndarray):
    return obj.tolist()
  if isinstance(obj, (numpy.floating, numpy.integer, numpy.bool_)):
    return obj.item()
  raise TypeError("%r is not JSON serializable" % (obj,))


def writejson(fname, obj):
  "Write 'obj' as indented JSON (numpy values converted)"
  with open(fname, "w") as ofile:
    json.dump(obj, ofile, indent=2, sort_keys=True, default=_default)
    ofile.write("\n")


def readjson(fname):
  try:
    with open(fname) as ifile:
      return json.load(ifile)
  except ValueError as e:
    raise pex.DataFormatError(fname, str(e))


def inputrecord(fname):
  "Path and SHA-256 digest of an input file"
  return {"path": os.path.abspath(fname), "sha256": ptools.filedigest(fname)}


def verifyinputs(manifest):
  """Check the digests of the inputs listed in a manifest

  Raises 'DigestMismatch' when a file changed; a missing file raises
  'OSError'.
  """
  for record in manifest.get("inputs", []):
    found = ptools.filedigest(record["path"])
    if found != record["sha256"]:
      raise pex.DigestMismatch(record["path"], record["sha256"], found)


###########################################################
# Literature dataset
###########################################################
def loadliterature(fname=None):
  "The bundled (or a compatible) literature parameter table"
  return readjson(fname or LITERATURE)


def literature_trajectories(data=None, grid=None):
  """SEIR trajectories of every study of a literature table

  Each study is integrated as a plain SEIR model with the population,
  initial counts and horizon of the table. Returns (ids, trajectories).
  """
  data = data or loadliterature()
  T = float(data["T"])
  if grid is None:
    grid = pem.dailygrid(T)
  ids = []
  trajs = []
  for study in data["studies"]:
    sigma, gamma, beta = pem.params_from_quantities(
        study["D_E"], study["D_I"], study["R0"])
    params = pem.ModelParams(beta, sigma, gamma, data["N"], data["E0"],
                             data["I0"], T)
    ids.append(study["id"])
    trajs.append(pem.integrate(params, grid))
  return ids, trajs


###########################################################
# Solution manifests
###########################################################
def solutionmanifest(sol, inputs=(), grid=None, **extra):
  """JSON-ready description of a 'ConsensusSolution'

  The coefficient vectors are stored so that the full trajectory can be
  rebuilt without solving again.
  """
  manifest = {
      "kind": "solution",
      "version": ptools.pyepicversion(),
      "config": sol.spec.asdict(),
      "inputs": list(inputs),
      "estimates": {"sigma": sol.sigma_hat, "gamma": sol.gamma_hat,
                    "D_E": 1.0 / sol.sigma_hat, "D_I": 1.0 / sol.gamma_hat},
      "shifts": sol.delta_hat,
      "objective_trace": sol.objective_trace,
      "converged": sol.converged,
      "iterations": sol.iterations,
      "diagnostics": sol.diagnostics,
      "inner": sol.inner_diagnostics,
      "basis": {"K": sol.basis.K, "degree": sol.basis.degree,
                "T": sol.basis.T},
      "coefficients": {"E": sol.c_hat.cE, "I": sol.c_hat.cI},
  }
  if grid is not None:
    manifest["grid"] = grid
  manifest.update(extra)
  return manifest


def solutionfrommanifest(manifest):
  """Rebuild a 'ConsensusSolution' from a solution manifest

  The objective trace and diagnostics are restored; the inner solution
  and the Gram matrix are not.
  """
  if manifest.get("kind") != "solution":
    raise pex.DataFormatError("manifest", "not a solution manifest")
  config = dict(manifest["config"])
  spec = pcs.ProblemSpec(**config)
  b = manifest["basis"]
  basis = pbs.build_basis(b["K"], b["degree"], b["T"])
  design = pbs.design_matrices(basis, spec.M_effective)
  c = pfs.CoefVector.frompair(manifest["coefficients"]["E"],
                              manifest["coefficients"]["I"])
  est = manifest["estimates"]
  return pcs.ConsensusSolution(
      c, float(est["sigma"]), float(est["gamma"]),
      numpy.asarray(manifest["shifts"], numpy.float64),
      list(manifest["objective_trace"]), None, manifest["converged"],
      manifest["iterations"], manifest["diagnostics"], basis, None, design,
      spec)
