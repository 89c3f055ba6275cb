# plots.py

"""Figures of ensembles, consensus curves and recovered trajectories

  All figures are written as SVG through the non-interactive Agg backend.
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
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

log = logging.getLogger(__name__)

INPUTCOLOR = "0.6"
QCOLORS = {2.0: "tab:blue", 1.5: "tab:purple", 1.0: "tab:red"}
MEANCOLOR = "tab:green"
MEDIANCOLOR = "tab:orange"


def qcolor(q):
  "Line color of the consensus curve of exponent 'q'"
  return QCOLORS.get(float(q), "black")


def plot_ensemble(fname, trajs, consensus=None, mean=None, median=None,
                  title=None):
  """E and I panels of an ensemble with its summaries

  Arguments:

    'fname' -- Output SVG file.

    'trajs' -- Input 'SampledTrajectory' objects, drawn in gray.

  Optional arguments:

    'consensus' -- Dict q -> (grid, E, I) of consensus curves.

    'mean', 'median' -- Pointwise summaries as trajectories.

    'title' -- Figure title.
  """
  fig, axes = plt.subplots(1, 2, figsize=(11, 4.5), sharex=True)
  for ax, name in zip(axes, ("E", "I")):
    for j, traj in enumerate(trajs):
      ax.plot(traj.grid, traj[name], color=INPUTCOLOR, lw=0.8,
              label="inputs" if j == 0 else None)
    if mean is not None:
      ax.plot(mean.grid, mean[name], color=MEANCOLOR, lw=1.5, label="mean")
    if median is not None:
      ax.plot(median.grid, median[name], color=MEDIANCOLOR, lw=1.5,
              label="median")
    for q in sorted(consensus or {}, reverse=True):
      grid, E, I = consensus[q]
      ax.plot(grid, E if name == "E" else I, color=qcolor(q), lw=2.0,
              label="consensus q=%g" % q)
    ax.set_xlabel("Days")
    ax.set_ylabel(name)
    ax.grid(True)
  axes[1].legend(loc="best", fontsize="small")
  if title:
    fig.suptitle(title)
  fig.tight_layout()
  fig.savefig(fname, format="svg")
  plt.close(fig)
  log.info("wrote %s", fname)


def plot_full(fname, full, reference=None, title=None):
  """S, E, I and R of a recovered trajectory

  'reference' (a trajectory with the same columns) is drawn dashed.
  """
  names = ("S", "E", "I", "R")
  fig, axes = plt.subplots(2, 2, figsize=(10, 7), sharex=True)
  for ax, name in zip(axes.flat, names):
    ax.plot(full.grid, full[name], color=qcolor(1.0), lw=2.0,
            label="consensus")
    if reference is not None and name in reference:
      ax.plot(reference.grid, reference[name], color="black", lw=1.2,
              ls="--", label="point estimate")
    ax.set_ylabel(name)
    ax.grid(True)
  for ax in axes[1]:
    ax.set_xlabel("Days")
  axes[0, 0].legend(loc="best", fontsize="small")
  if title:
    fig.suptitle(title)
  fig.tight_layout()
  fig.savefig(fname, format="svg")
  plt.close(fig)
  log.info("wrote %s", fname)
