# test_epimodels.py
#
# Compartmental models, integration and the two-piece normal sampler

import numpy
import numpy.testing as npt
import pytest
import scipy.stats
import pyepic.pyepicexcpt as pex
import pyepic.epimodels as pem


def test_rhs_conserves_population():
  for variant in pem.VARIANTS:
    extras = {"nu": 0.1, "xi": 0.05} if variant == "SEIQR" else {}
    params = pem.ModelParams(0.5, 0.2, 0.1, 1000.0, 10.0, 5.0, 100.0,
                             variant=variant, f=0.7, **extras)
    state = numpy.arange(1.0, len(params.names()) + 1.0) * 100.0
    assert abs(pem.rhs(params, state).sum()) < 1.0e-9


def test_rhs_disease_free_state():
  params = pem.ModelParams(0.5, 0.2, 0.1, 1000.0, 1.0, 0.0, 100.0)
  npt.assert_array_equal(pem.rhs(params, [1000.0, 0.0, 0.0, 0.0]),
                         numpy.zeros(4))


def test_rhs_wrong_state_size():
  params = pem.ModelParams(0.5, 0.2, 0.1, 1000.0, 1.0, 0.0, 100.0)
  with pytest.raises(pex.ContractViolation):
    pem.rhs(params, [1.0, 2.0, 3.0])


def test_invalid_parameters():
  with pytest.raises(pex.ContractViolation):
    pem.ModelParams(0.5, -0.2, 0.1, 1000.0, 1.0, 0.0, 100.0)
  with pytest.raises(pex.ContractViolation):
    pem.ModelParams(0.5, 0.2, 0.1, 1000.0, 0.0, 0.0, 100.0)
  with pytest.raises(pex.ContractViolation):
    pem.ModelParams(0.5, 0.2, 0.1, 1000.0, 1.0, 0.0, 100.0, variant="SIS")
  with pytest.raises(pex.ContractViolation):
    pem.ModelParams(0.5, 0.2, 0.1, 1000.0, 1.0, 0.0, 100.0,
                    variant="SEIQR")


def test_integrate_point_estimate(seir_point):
  assert len(seir_point) == 721
  total = seir_point["S"] + seir_point["E"] + seir_point["I"] + \
      seir_point["R"]
  assert numpy.abs(total - 1.0e6).max() < 1.0e-6 * 1.0e6
  assert seir_point["R"][0] == 0.0
  assert numpy.all(numpy.diff(seir_point["R"]) >= -1.0e-6)
  # R0 = 2.2: an epidemic wave inside the horizon
  assert 50.0 < seir_point.peaktime("I") < 600.0
  assert seir_point["I"].max() > 1.0e4


def test_integrate_zero_beta_decays():
  params = pem.ModelParams(0.0, 0.2, 0.1, 1000.0, 10.0, 0.0, 50.0)
  traj = pem.integrate(params, pem.dailygrid(50.0))
  # Linear system: E(t) = E0 exp(-sigma t)
  npt.assert_allclose(traj["E"], 10.0 * numpy.exp(-0.2 * traj.grid),
                      rtol=1.0e-5, atol=1.0e-7)
  npt.assert_allclose(traj["S"], 990.0)


def test_integrate_variants():
  grid = pem.dailygrid(200.0)
  for variant, extra in (("SEIUR", "U"), ("SEIQR", "Q"), ("SEIRD", "D")):
    extras = {"nu": 0.1, "xi": 0.05} if variant == "SEIQR" else {}
    params = pem.ModelParams(0.6, 0.2, 0.1, 1.0e5, 10.0, 0.0, 200.0,
                             variant=variant, f=0.6, **extras)
    traj = pem.integrate(params, grid)
    assert extra in traj
    total = numpy.add.reduce([traj[n] for n in traj.compartments()])
    assert numpy.abs(total - 1.0e5).max() < 1.0e-6 * 1.0e5


def test_integrate_grid_outside_horizon():
  params = pem.ModelParams(0.5, 0.2, 0.1, 1000.0, 1.0, 0.0, 10.0)
  with pytest.raises(pex.ContractViolation):
    pem.integrate(params, numpy.linspace(0.0, 11.0, 12))


def test_sampled_trajectory_contracts():
  grid = numpy.arange(5.0)
  with pytest.raises(pex.ContractViolation):
    pem.SampledTrajectory(grid, [("E", numpy.ones(5))])
  with pytest.raises(pex.ContractViolation):
    pem.SampledTrajectory(grid, [("E", numpy.ones(4)), ("I", numpy.ones(5))])
  with pytest.raises(pex.ContractViolation):
    pem.SampledTrajectory(grid, [("E", -numpy.ones(5)),
                                 ("I", numpy.ones(5))], N=100.0)
  traj = pem.SampledTrajectory(grid, [("E", numpy.ones(5)),
                                      ("I", numpy.arange(5.0))])
  with pytest.raises(ValueError):
    traj["E"][0] = 3.0


def test_params_from_quantities():
  sigma, gamma, beta = pem.params_from_quantities(5.2, 7.5, 2.2)
  assert abs(sigma - 0.1923) < 1.0e-4
  assert abs(gamma - 0.1333) < 1.0e-4
  assert abs(beta - 0.2933) < 1.0e-4
  npt.assert_allclose(pem.params_from_quantities(1.0, 1.0, 1.0),
                      (1.0, 1.0, 1.0))
  with pytest.raises(pex.ContractViolation):
    pem.params_from_quantities(0.0, 7.5, 2.2)


def test_two_piece_normal_quantiles():
  spec = pem.TwoPieceNormalSpec.from_ci(5.2, 4.1, 7.0)
  assert pem.transform_two_piece_normal(spec, 0.0) == 5.2
  npt.assert_allclose(pem.transform_two_piece_normal(spec, -1.96), 4.1)
  npt.assert_allclose(pem.transform_two_piece_normal(spec, 1.96), 7.0)


def test_two_piece_normal_percentiles(rng):
  spec = pem.TwoPieceNormalSpec.from_ci(5.2, 4.1, 7.0)
  draws = pem.sample_two_piece_normal(spec, rng, size=10**6)
  lo, hi = numpy.percentile(draws, [2.5, 97.5])
  assert abs(lo - 4.1) < 0.02
  assert abs(hi - 7.0) < 0.02


def test_two_piece_normal_floor(rng):
  spec = pem.TwoPieceNormalSpec(0.0, 1.0, 1.0, floor=1.0e-4)
  draws = pem.sample_two_piece_normal(spec, rng, size=1000)
  assert draws.min() >= 1.0e-4
  assert numpy.any(draws == 1.0e-4)
  assert isinstance(pem.sample_two_piece_normal(spec, rng), float)


def test_simulate_ensemble_reproducible():
  specs = pem.literature_specs()
  grid = pem.dailygrid(300.0)
  a = pem.simulate_ensemble(3, specs, 1.0e6, 1.0, 0.0, 300.0, grid, 7)
  b = pem.simulate_ensemble(3, specs, 1.0e6, 1.0, 0.0, 300.0, grid, 7)
  assert len(a) == 3
  for ta, tb in zip(a, b):
    npt.assert_array_equal(ta["I"], tb["I"])
  assert a.draws[0]["D_E"] != a.draws[1]["D_E"]


def test_simulate_ensemble_prefix_stable():
  # Trajectory j depends on the seed and j only
  specs = pem.literature_specs()
  grid = pem.dailygrid(100.0)
  small = pem.simulate_ensemble(2, specs, 1.0e6, 1.0, 0.0, 100.0, grid, 3)
  large = pem.simulate_ensemble(4, specs, 1.0e6, 1.0, 0.0, 100.0, grid, 3)
  assert small.draws == large.draws[:2]


def test_simulate_ensemble_zero_variance(seir_point):
  tiny = 1.0e-12
  specs = (pem.TwoPieceNormalSpec(5.2, tiny, tiny),
           pem.TwoPieceNormalSpec(7.5, tiny, tiny),
           pem.TwoPieceNormalSpec(2.2, tiny, tiny))
  ens = pem.simulate_ensemble(1, specs, 1.0e6, 1.0, 0.0, 720.0,
                              seir_point.grid, 1)
  npt.assert_allclose(ens[0]["I"], seir_point["I"], rtol=1.0e-6,
                      atol=1.0e-3)


def test_simulate_ensemble_needs_one():
  with pytest.raises(pex.ContractViolation):
    pem.simulate_ensemble(0, pem.literature_specs(), 1.0e6, 1.0, 0.0, 10.0,
                          pem.dailygrid(10.0), 1)


def test_peak_against_fixed_step_rk4(seir_point):
  params = pem.point_estimate_params()
  h = 0.01
  per_day = 100
  y = numpy.array(params.initialstate(), numpy.float64)
  daily = [y[2]]
  t = 0.0
  for day in range(int(params.T)):
    for _ in range(per_day):
      k1 = pem.rhs(params, y, t)
      k2 = pem.rhs(params, y + 0.5 * h * k1, t + 0.5 * h)
      k3 = pem.rhs(params, y + 0.5 * h * k2, t + 0.5 * h)
      k4 = pem.rhs(params, y + h * k3, t + h)
      y = y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
      t += h
    daily.append(y[2])
  peak = max(daily)
  assert abs(seir_point["I"].max() - peak) / peak <= 1.0e-4
  assert seir_point.peaktime("I") == float(numpy.argmax(daily))


def test_two_piece_normal_distribution(rng):
  spec = pem.TwoPieceNormalSpec.from_ci(5.2, 4.1, 7.0)
  draws = pem.sample_two_piece_normal(spec, rng, size=20000)

  def cdf(x):
    x = numpy.asarray(x)
    s = numpy.where(x < spec.point_estimate, spec.s_left, spec.s_right)
    return scipy.stats.norm.cdf((x - spec.point_estimate) / s)

  assert scipy.stats.kstest(draws, cdf).pvalue > 1.0e-3
  # Half of the mass on each side of the point estimate
  assert abs(numpy.mean(draws < spec.point_estimate) - 0.5) < 0.02


def test_trajectory_streams_leave_seed_untouched():
  seed = numpy.random.SeedSequence(2020)
  first = [g.standard_normal() for g in pem.trajectory_streams(seed, 3)]
  again = [g.standard_normal() for g in pem.trajectory_streams(seed, 3)]
  from_int = [g.standard_normal() for g in pem.trajectory_streams(2020, 3)]
  assert first == again == from_int
  grid = pem.dailygrid(50.0)
  specs = pem.literature_specs()
  a = pem.simulate_ensemble(2, specs, 1.0e4, 1.0, 0.0, 50.0, grid, seed)
  b = pem.simulate_ensemble(2, specs, 1.0e4, 1.0, 0.0, 50.0, grid, seed)
  assert a.draws == b.draws


def test_integration_failure_keeps_reason(monkeypatch):
  def failing(params, grid):
    raise pex.IntegrationFailure(3.5, "Required step size is less than"
                                 " spacing between numbers.")
  monkeypatch.setattr(pem, "integrate", failing)
  with pytest.raises(pex.IntegrationFailure) as info:
    pem.simulate_ensemble(2, pem.literature_specs(), 1.0e4, 1.0, 0.0, 10.0,
                          pem.dailygrid(10.0), 1)
  assert info.value.index == 0
  assert info.value.value == 3.5
  assert "Required step size" in info.value.message
  assert "trajectory 0" in info.value.message
