"""PyEpiC Exceptions, as classes

"""

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

##########################################################
# All PyEpiC exceptions share this behaviour
# They can be written as strings and some values can be returned.
# 'exitcode' is what the command line tool returns for them.
#################################################
class PyEpiCException(Exception):
  "Mother class for all pyepic exceptions"
  exitcode = 5
  message = ""
  value = None

  def __str__(self):
    if self.message:
      return "PyEpiC Exception\n"+self.message
    else:
      return "PyEpiC Exception\n"

  def GetExceptionValue(self):
    return self.value

##################################################
# Broken preconditions, raised everywhere
##################################################
class ContractViolation(PyEpiCException):
  exitcode = 2
  def __init__(self, what, value=None):
    self.message = "Contract violation\n"+what
    self.value = value

class ConfigError(PyEpiCException):
  exitcode = 2
  def __init__(self, key, reason):
    self.message = "Configuration Exception\n"
    self.message += "Key '%s': %s" % (key, reason)
    self.value = key

##################################################
# epimodels
##################################################
class IntegrationFailure(PyEpiCException):
  def __init__(self, t, reason="", index=None):
    self.message = "epimodels Exception\nIntegration stopped at t=%g" % (t,)
    if index is not None:
      self.message += " (trajectory %d)" % (index,)
    if reason:
      self.message += "\n" + reason
    self.value = t
    self.reason = reason
    self.index = index

##################################################
# bsplines
##################################################
class DegenerateBasis(PyEpiCException):
  def __init__(self, lambda_min):
    self.message = "bsplines Exception\nGram matrix is not positive"
    self.message += " definite (smallest eigenvalue %g)." % (lambda_min,)
    self.value = lambda_min

class IllPosedFit(PyEpiCException):
  def __init__(self, cond):
    self.message = "bsplines Exception\nLeast-squares design is rank"
    self.message += " deficient (condition number %g)." % (cond,)
    self.value = cond

##################################################
# qpsolver and consensus
##################################################
class Infeasible(PyEpiCException):
  exitcode = 3
  def __init__(self, row, violation, context=""):
    self.message = "QP Exception\nNo feasible point found; most violated"
    self.message += " constraint row %d (violation %g)." % (row, violation)
    if context:
      self.message += "\n" + context
    self.value = (row, violation)

class SolverStall(PyEpiCException):
  def __init__(self, before, after):
    self.message = "IRLS Exception\nSmoothed objective increased"
    self.message += " from %.17g to %.17g." % (before, after)
    self.value = (before, after)

##################################################
# recovery
##################################################
class DegenerateEstimate(PyEpiCException):
  def __init__(self, what):
    self.message = "recovery Exception\nDegenerate estimate: " + what
    self.value = what

###############################################
# Files and manifests
##############################################
class DataFormatError(PyEpiCException):
  exitcode = 4
  def __init__(self, path, reason):
    self.message = "I/O Exception\nCannot read %s: %s" % (path, reason)
    self.value = path

class DigestMismatch(PyEpiCException):
  exitcode = 4
  def __init__(self, path, expected, found):
    self.message = "Manifest Exception\nInput %s changed:\n" % (path,)
    self.message += "expected %s, found %s" % (expected, found)
    self.value = path
