# __init__.py

"""PyEpiC: consensus curves of ensembles of epidemic trajectories

  The package summarizes heterogeneous SEIR-type trajectories by a single
  curve that still satisfies the infectious-compartment dynamics, and
  recovers the full compartmental state and the model parameters from it.
"""
