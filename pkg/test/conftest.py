# conftest.py
#
# Makes the 'pyepic' package importable from a source checkout, where the
# modules live in src/ (setup.py maps them onto 'pyepic' at install time).

import importlib.util
import os
import sys
import numpy
import pytest

SRC = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(
    __file__))), "src")

if "pyepic" not in sys.modules:
  try:
    import pyepic
  except ImportError:
    spec = importlib.util.spec_from_file_location(
        "pyepic", os.path.join(SRC, "__init__.py"),
        submodule_search_locations=[SRC])
    module = importlib.util.module_from_spec(spec)
    sys.modules["pyepic"] = module
    spec.loader.exec_module(module)


@pytest.fixture
def rng():
  return numpy.random.default_rng(12345)


@pytest.fixture(scope="session")
def seir_point():
  "Point-estimate SEIR trajectory on a daily grid over 720 days"
  import pyepic.epimodels as pem
  params = pem.point_estimate_params()
  return pem.integrate(params, pem.dailygrid(params.T))


@pytest.fixture(scope="session")
def point_solution(seir_point):
  "Consensus (q=2, K=30) of the single point-estimate trajectory"
  import pyepic.consensus as pcs
  spec = pcs.ProblemSpec(q=2.0, K=30, T=720.0, N=1.0e6)
  return pcs.solve([seir_point], spec)


def pytest_addoption(parser):
  parser.addoption("--runslow", action="store_true", default=False,
                   help="Run the full-size reproduction tests")


def pytest_configure(config):
  config.addinivalue_line("markers", "slow: full-size reproduction run")


def pytest_collection_modifyitems(config, items):
  if config.getoption("--runslow"):
    return
  skip = pytest.mark.skip(reason="needs --runslow")
  for item in items:
    if "slow" in item.keywords:
      item.add_marker(skip)
