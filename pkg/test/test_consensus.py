# test_consensus.py
#
# Constrained power Frechet mean with shifts. Sizes are kept small (short
# horizons, few basis functions) so that every solve runs in seconds.

import itertools
import numpy
import numpy.testing as npt
import pytest
import pyepic.pyepicexcpt as pex
import pyepic.epimodels as pem
import pyepic.bsplines as pbs
import pyepic.fspace as pfs
import pyepic.consensus as pcs
import pyepic.recovery as prc


def small_ensemble(T=120.0, N=1.0e4):
  grid = pem.dailygrid(T)
  trajs = []
  for beta, sigma, gamma in ((0.60, 0.25, 0.20), (0.70, 0.30, 0.22),
                             (0.55, 0.22, 0.18)):
    params = pem.ModelParams(beta, sigma, gamma, N, 10.0, 0.0, T)
    trajs.append(pem.integrate(params, grid))
  return trajs


def small_spec(**changes):
  values = {"q": 2.0, "K": 10, "T": 120.0, "N": 1.0e4, "delta_max": 20.0,
            "max_outer": 6}
  values.update(changes)
  return pcs.ProblemSpec(**values)


def setting(spec, trajs):
  basis = pbs.build_basis(spec.K, spec.degree, spec.T)
  gram = pfs.BlockGram(pbs.gram_h1(basis, spec.rho))
  design = pbs.design_matrices(basis, spec.M_effective)
  cjs = pcs.shifted_stack(trajs, numpy.zeros(len(trajs)), basis)
  return basis, gram, design, cjs


def test_problem_spec_contracts():
  spec = pcs.ProblemSpec()
  assert spec.M_effective == pbs.default_intervals(spec.K, spec.degree)
  assert pcs.ProblemSpec(M=720).M_effective == 720
  assert spec.q_effective == 1.0 + spec.eps_q
  assert pcs.ProblemSpec(q=1.5).q_effective == 1.5
  with pytest.raises(pex.ContractViolation):
    pcs.ProblemSpec(q=0.0)
  with pytest.raises(pex.ContractViolation):
    pcs.ProblemSpec(bounds={"sigma": (0.5, 0.1)})


def test_constraint_matrices():
  basis = pbs.build_basis(5, 3, 10.0)
  design = pbs.design_matrices(basis, 4)
  cons = pcs.constraint_matrices(basis, design, 0.3, 0.2, 100.0)
  assert cons.A_eq.shape == (5, 10)
  assert cons.A_ineq.shape == (15, 10)
  npt.assert_array_equal(cons.b_ineq[:10], 0.0)
  npt.assert_array_equal(cons.b_ineq[10:], 100.0)
  # E = 2, I = 3 constant: I' - sigma E + gamma I = -0.6 + 0.6 = 0
  c = numpy.concatenate((numpy.full(5, 2.0), numpy.full(5, 3.0)))
  eq, viol = cons.residuals(c)
  assert eq < 1.0e-12
  assert viol == 0.0
  with pytest.raises(pex.ContractViolation):
    pcs.constraint_matrices(pbs.build_basis(6, 3, 10.0), design, 0.3, 0.2,
                            100.0)


def active_set_oracle(H, g, A, b, C, d):
  n = len(g)
  best = None
  for size in range(0, n + 1):
    for active in itertools.combinations(range(C.shape[0]), size):
      Aa = numpy.vstack((A, C[list(active)]))
      if numpy.linalg.matrix_rank(Aa) < Aa.shape[0]:
        continue
      ba = numpy.concatenate((b, d[list(active)]))
      m = Aa.shape[0]
      KKT = numpy.block([[H, Aa.T], [Aa, numpy.zeros((m, m))]])
      sol = numpy.linalg.solve(KKT, numpy.concatenate((-g, ba)))
      x, mult = sol[:n], sol[n:]
      if numpy.any(numpy.dot(C, x) - d > 1.0e-9) or \
         numpy.any(mult[A.shape[0]:] < -1.0e-9):
        continue
      f = 0.5 * numpy.dot(x, numpy.dot(H, x)) + numpy.dot(g, x)
      if best is None or f < best[0]:
        best = (f, x)
    if best is not None and size >= n - A.shape[0]:
      break
  return best[1]


def test_inner_q2_against_active_sets(rng):
  basis = pbs.build_basis(4, 3, 10.0)
  design = pbs.design_matrices(basis, 3)
  gram = pfs.BlockGram(pbs.gram_h1(basis, 1.0))
  N = 1.0
  for _ in range(20):
    sigma, gamma = rng.uniform(0.05, 0.5, size=2)
    cons = pcs.constraint_matrices(basis, design, sigma, gamma, N)
    cbars = rng.uniform(-0.1, 0.6, size=(3, 8))
    sol = pcs.inner_solve_q2(cbars, gram, cons)
    cbar = cbars.mean(axis=0)
    x = active_set_oracle(2.0 * gram.GY, -2.0 * numpy.dot(gram.GY, cbar),
                          cons.A_eq, cons.b_eq, cons.A_ineq, cons.b_ineq)
    npt.assert_allclose(sol.c.c, x, atol=1.0e-6)


def test_inner_q2_multipliers_in_population_units(rng):
  basis = pbs.build_basis(6, 3, 30.0)
  design = pbs.design_matrices(basis)
  gram = pfs.BlockGram(pbs.gram_h1(basis, 1.0))
  N = 50.0
  cons = pcs.constraint_matrices(basis, design, 0.3, 0.2, N)
  cbars = rng.uniform(0.0, 40.0, size=(4, 12))
  sol = pcs.inner_solve_q2(cbars, gram, cons)
  cbar = cbars.mean(axis=0)
  lam = numpy.concatenate((sol.lambda_E, sol.lambda_I, sol.lambda_pop))
  stationarity = 2.0 * numpy.dot(gram.GY, sol.c.c - cbar) + \
      numpy.dot(cons.A_eq.T, sol.nu) + numpy.dot(cons.A_ineq.T, lam)
  scale = numpy.abs(2.0 * numpy.dot(gram.GY, cbar)).max()
  assert numpy.abs(stationarity).max() < 1.0e-6 * scale
  assert numpy.all(lam >= 0)
  npt.assert_allclose(sol.objective,
                      pcs.power_objective(sol.c, cbars, gram, 2.0),
                      rtol=1.0e-10)


def test_irls_geometric_median(rng):
  basis = pbs.build_basis(5, 3, 10.0)
  design = pbs.design_matrices(basis)
  gram = pfs.BlockGram(pbs.gram_h1(basis, 1.0))
  cons = pcs.reduced_constraints(design, 1.0e6)
  c0 = numpy.full(10, 50.0)
  v = rng.uniform(1.0, 2.0, size=10)
  cjs = numpy.array([c0, c0 + v, c0 + 3.0 * v])
  sol = pcs.inner_solve_irls(1.0, cjs, gram, cons)
  assert pfs.distance(sol.c, c0 + v, gram) < 0.05 * gram.norm(v)
  assert sol.weights is not None
  npt.assert_allclose(sol.weights.sum(), 1.0)


def test_irls_q2_matches_closed_path(rng):
  basis = pbs.build_basis(5, 3, 10.0)
  design = pbs.design_matrices(basis)
  gram = pfs.BlockGram(pbs.gram_h1(basis, 1.0))
  cons = pcs.constraint_matrices(basis, design, 0.3, 0.2, 1.0e3)
  cjs = rng.uniform(0.0, 100.0, size=(3, 10))
  a = pcs.inner_solve_irls(2.0, cjs, gram, cons)
  b = pcs.inner_solve_q2(cjs, gram, cons)
  npt.assert_allclose(a.c.c, b.c.c)


def test_gamma_upper_bound():
  basis = pbs.build_basis(5, 3, 10.0)
  design = pbs.design_matrices(basis)
  # E = 1, I = 2 constant: bound (N - 3) / (2 T)
  c = numpy.concatenate((numpy.full(5, 1.0), numpy.full(5, 2.0)))
  npt.assert_allclose(pcs.gamma_upper_bound(c, design, 103.0), 5.0)
  assert pcs.gamma_upper_bound(numpy.zeros(10), design, 1.0) == numpy.inf


def test_rates_least_squares():
  t = numpy.linspace(0.0, 10.0, 50)
  E = 1.0 + t
  I = numpy.exp(-0.1 * t) * 5.0
  dI = 0.2 * E - 0.1 * I
  sigma, gamma = pcs.rates_least_squares(E, I, dI)
  npt.assert_allclose((sigma, gamma), (0.2, 0.1))
  assert pcs.rates_least_squares(numpy.zeros(5), numpy.zeros(5),
                                 numpy.zeros(5)) == (None, None)


def _bump(peak, T=300.0):
  grid = pem.dailygrid(T)
  I = 100.0 * numpy.exp(-((grid - peak) / 15.0)**2)
  return pem.SampledTrajectory(grid, [("E", 0.5 * I), ("I", I)])


def test_init_shifts_align_peaks():
  delta = pcs.init_shifts([_bump(100.0), _bump(140.0)], 120.0)
  npt.assert_allclose(delta, [-20.0, 20.0])
  # y(t + delta) moves each peak onto the mean peak time
  shifted = [pfs.shift(t, d) for t, d in zip([_bump(100.0), _bump(140.0)],
                                             delta)]
  assert shifted[0].peaktime() == shifted[1].peaktime() == 120.0
  npt.assert_array_equal(pcs.init_shifts([_bump(50.0)], 120.0), [0.0])


def test_init_shifts_clipped_and_centered():
  trajs = [_bump(p) for p in (20.0, 40.0, 280.0)]
  delta = pcs.init_shifts(trajs, 60.0)
  assert abs(delta.sum()) < 1.0e-8
  assert numpy.all(numpy.abs(delta) <= 60.0 + 1.0e-12)


def test_center_shifts():
  delta = pcs.center_shifts([-200.0, 50.0, 150.0], 120.0)
  assert abs(delta.sum()) < 1.0e-8
  assert numpy.abs(delta).max() <= 120.0
  npt.assert_array_equal(pcs.center_shifts([5.0, -5.0], 0.0), [0.0, 0.0])


def test_update_shifts_recovers_offset():
  spec = small_spec(T=300.0, K=20, delta_max=40.0)
  basis = pbs.build_basis(spec.K, spec.degree, spec.T)
  gram = pfs.BlockGram(pbs.gram_h1(basis, spec.rho))
  target = pfs.shifted_coefficients(_bump(150.0), 0.0, basis)
  trajs = [_bump(130.0), _bump(170.0)]
  delta = pcs.update_shifts(target, trajs, basis, gram, spec)
  npt.assert_allclose(delta, [-20.0, 20.0], atol=0.5)
  assert abs(delta.sum()) < 1.0e-8


def _active_rows(inner):
  lam = inner.multipliers
  return lam > 1.0e-4 * max(lam.max(), 1.0e-300)


@pytest.mark.parametrize("q", [2.0, 1.5, 1.0])
def test_envelope_gradient_against_differences(rng, q):
  trajs = small_ensemble()
  spec = small_spec(q=q)
  basis, gram, design, cjs = setting(spec, trajs)
  stable = 0
  for sigma, gamma in rng.uniform([0.2, 0.15], [0.3, 0.25], size=(10, 2)):
    v, ds, dg, inner = pcs.profile_value_and_gradient(
        sigma, gamma, cjs, gram, design, spec)
    fd = []
    same = True
    for i, (dsig, dgam) in enumerate(((1, 0), (0, 1))):
      h = 1.0e-5 * (sigma if i == 0 else gamma)
      vp = pcs.profile_value_and_gradient(sigma + dsig * h, gamma + dgam * h,
                                          cjs, gram, design, spec)
      vm = pcs.profile_value_and_gradient(sigma - dsig * h, gamma - dgam * h,
                                          cjs, gram, design, spec)
      same = same and numpy.array_equal(_active_rows(vp[3]),
                                        _active_rows(vm[3]))
      fd.append((vp[0] - vm[0]) / (2.0 * h))
    if not same:
      continue
    stable += 1
    envelope = numpy.array([ds, dg])
    fd = numpy.array(fd)
    assert numpy.linalg.norm(envelope - fd) <= \
        1.0e-3 * numpy.linalg.norm(fd) + 1.0e-9 * v
  assert stable >= 5


def test_profile_outside_bounds():
  trajs = small_ensemble()
  spec = small_spec()
  basis, gram, design, cjs = setting(spec, trajs)
  with pytest.raises(pex.ContractViolation):
    pcs.profile_value_and_gradient(5.0, 0.2, cjs, gram, design, spec)


@pytest.mark.parametrize("q", [1.0, 1.5, 2.0])
def test_solve_feasible_and_monotone(q):
  trajs = small_ensemble()
  spec = small_spec(q=q)
  sol = pcs.solve(trajs, spec)
  diag = sol.diagnostics
  assert diag["inequality_violation"] <= 1.0e-6 * spec.N
  assert diag["equality_residual_relative"] <= 1.0e-4
  assert abs(sol.delta_hat.sum()) <= 1.0e-8
  assert numpy.all(numpy.abs(sol.delta_hat) <= spec.delta_max)
  trace = numpy.array(sol.objective_trace)
  assert len(trace) == sol.iterations
  assert numpy.all(numpy.diff(trace) <= 1.0e-6 * trace[0])
  lo, hi = spec.bounds["sigma"]
  assert lo <= sol.sigma_hat <= hi
  E, I = sol.curves(trajs[0].grid)
  assert E.shape == I.shape == trajs[0].grid.shape


def test_solve_rejects_grid_beyond_horizon():
  trajs = small_ensemble(T=150.0)
  with pytest.raises(pex.ContractViolation):
    pcs.solve(trajs, small_spec())


def test_single_curve_round_trip(seir_point, point_solution):
  sol = point_solution
  spec = sol.spec
  npt.assert_array_equal(sol.delta_hat, [0.0])
  full = prc.recover_full(sol, grid=seir_point.grid)
  beta = prc.estimate_beta(full, sol.sigma_hat, spec.bounds["beta"])
  sigma, gamma, beta0 = pem.params_from_quantities(5.2, 7.5, 2.2)
  assert abs(sol.sigma_hat - sigma) / sigma < 0.05
  assert abs(sol.gamma_hat - gamma) / gamma < 0.05
  assert abs(beta - beta0) / beta0 < 0.05


@pytest.mark.parametrize("N", [1.0e3, 1.0e6])
def test_inner_q2_interior_target(rng, N):
  # No dynamics and slack inequalities: the projection is the mean itself
  basis = pbs.build_basis(5, 3, 10.0)
  design = pbs.design_matrices(basis)
  gram = pfs.BlockGram(pbs.gram_h1(basis, 1.0))
  cons = pcs.reduced_constraints(design, N)
  cbars = 50.0 + rng.uniform(0.0, 5.0, size=(3, 10))
  sol = pcs.inner_solve_q2(cbars, gram, cons)
  cbar = cbars.mean(axis=0)
  assert pfs.distance(sol.c, cbar, gram) <= 1.0e-6 * gram.norm(cbar)
  assert numpy.abs(sol.multipliers).max() <= 1.0e-6 * numpy.abs(cbar).max()


def test_irls_geometric_median_large_population(rng):
  basis = pbs.build_basis(5, 3, 10.0)
  design = pbs.design_matrices(basis)
  gram = pfs.BlockGram(pbs.gram_h1(basis, 1.0))
  c0 = numpy.full(10, 50.0)
  v = rng.uniform(1.0, 2.0, size=10)
  cjs = numpy.array([c0, c0 + v, c0 + 3.0 * v])
  small = pcs.inner_solve_irls(1.0, cjs, gram,
                               pcs.reduced_constraints(design, 1.0e3))
  large = pcs.inner_solve_irls(1.0, cjs, gram,
                               pcs.reduced_constraints(design, 1.0e6))
  assert pfs.distance(large.c, small.c, gram) <= 1.0e-6 * gram.norm(c0)
  assert pfs.distance(large.c, c0 + v, gram) < 0.05 * gram.norm(v)


def _dip():
  # E vanishes at the grid times 0, 15 and 30 but dips below zero between
  cbar = numpy.concatenate(([0.0, -2.0, 3.0, 3.0, -2.0, 0.0],
                            numpy.ones(6)))
  basis = pbs.build_basis(6, 3, 30.0)
  return basis, cbar


def test_check_rows_enforced_on_demand():
  basis, cbar = _dip()
  design = pbs.design_matrices(basis, 2)
  check = pbs.design_matrices(basis, grid=numpy.arange(31.0))
  gram = pfs.BlockGram(pbs.gram_h1(basis, 1.0))
  cons = pcs.constraint_matrices(basis, design, 0.3, 0.2, 50.0, check)
  assert (cons.ngrid, cons.nblock, cons.nworking) == (3, 31, 9)
  assert cons.A_ineq.shape == (93, 12)
  assert cons.program(numpy.eye(12), numpy.zeros(12)).C.shape == (9, 12)

  coarse = pcs.inner_solve_q2([cbar], gram,
                              pcs.reduced_constraints(design, 50.0))
  assert numpy.dot(check.B, coarse.c.cE).min() < -0.1
  reduced = pcs.reduced_constraints(design, 50.0, check)
  fine = pcs.inner_solve_q2([cbar], gram, reduced)
  assert numpy.dot(check.B, fine.c.cE).min() >= -1.0e-6 * 50.0
  assert reduced.nworking > 9
  assert len(fine.multipliers) == 93
  assert len(fine.lambda_E) == 3
  # Multipliers of rows never handed to the solver vanish
  assert numpy.all(fine.multipliers[~reduced.working] == 0.0)
  npt.assert_allclose(pcs.gamma_upper_bound(fine.c, design, 50.0, check),
                      min(pcs.gamma_upper_bound(fine.c, design, 50.0),
                          pcs.gamma_upper_bound(fine.c, check, 50.0)))


def test_envelope_with_check_rows(rng):
  trajs = small_ensemble()
  spec = small_spec()
  basis, gram, design, cjs = setting(spec, trajs)
  check = pbs.design_matrices(basis, grid=pem.dailygrid(spec.T))
  v, ds, dg, inner = pcs.profile_value_and_gradient(
      0.25, 0.2, cjs, gram, design, spec, check=check)
  h = 1.0e-5
  fd = []
  for sigma, gamma in ((0.25 + h, 0.2), (0.25 - h, 0.2), (0.25, 0.2 + h),
                       (0.25, 0.2 - h)):
    fd.append(pcs.profile_value_and_gradient(
        sigma, gamma, cjs, gram, design, spec, check=check)[0])
  fd = numpy.array([fd[0] - fd[1], fd[2] - fd[3]]) / (2.0 * h)
  assert numpy.linalg.norm(numpy.array([ds, dg]) - fd) <= \
      1.0e-3 * numpy.linalg.norm(fd) + 1.0e-9 * v
  E = numpy.dot(check.B, inner.c.cE)
  assert E.min() >= -1.0e-6 * spec.N


def test_irls_without_stall_over_rates(rng):
  trajs = small_ensemble()
  spec = small_spec(q=1.0)
  basis, gram, design, cjs = setting(spec, trajs)
  for sigma, gamma in rng.uniform([0.15, 0.12], [0.35, 0.3], size=(10, 2)):
    cons = pcs.constraint_matrices(basis, design, sigma, gamma, spec.N)
    inner = pcs.inner_solve(spec.q, cjs, gram, cons, spec=spec)
    mean = pcs.inner_solve_q2(cjs, gram, cons)
    # The power mean does at least as well as the projected mean
    assert inner.objective <= pcs.power_objective(
        mean.c, cjs, gram, spec.q_effective) * (1.0 + 1.0e-6)


def test_profile_restarts_after_stall(monkeypatch):
  trajs = small_ensemble()
  spec = small_spec(q=1.5)
  basis, gram, design, cjs = setting(spec, trajs)
  real = pcs.inner_solve
  cold = []

  def flaky(q, cjs, gram, constraints, warm_start=None, spec=None,
            solver=None):
    cold.append(warm_start is None)
    if warm_start is not None:
      raise pex.SolverStall(1.0, 1.1)
    return real(q, cjs, gram, constraints, None, spec, solver)

  monkeypatch.setattr(pcs, "inner_solve", flaky)
  v = pcs.profile_value_and_gradient(0.25, 0.2, cjs, gram, design, spec,
                                     warm_start=cjs[0])
  assert cold == [False, True]
  assert numpy.isfinite(v[0])


def test_optimize_profile_survives_stalls(monkeypatch):
  trajs = small_ensemble()
  spec = small_spec(q=1.5)
  basis, gram, design, cjs = setting(spec, trajs)
  real = pcs.inner_solve

  def flaky(q, cjs, gram, constraints, warm_start=None, spec=None,
            solver=None):
    if constraints.gamma > 0.21:
      raise pex.SolverStall(1.0, 1.0 + 1.0e-3)
    return real(q, cjs, gram, constraints, warm_start, spec, solver)

  monkeypatch.setattr(pcs, "inner_solve", flaky)
  sigma, gamma, inner = pcs.optimize_profile(cjs, gram, design, spec,
                                             (0.25, 0.2))
  assert gamma <= 0.21
  assert numpy.isfinite(inner.objective)
  lo, hi = spec.bounds["sigma"]
  assert lo <= sigma <= hi


def common_rates(T=160.0, N=1.0e4, sigma=0.25, gamma=0.2):
  "Two curves sharing (sigma, gamma), with different beta"
  grid = pem.dailygrid(T)
  return [pem.integrate(pem.ModelParams(beta, sigma, gamma, N, 10.0, 0.0, T),
                        grid) for beta in (0.6, 0.7)]


def test_optimize_profile_self_consistency():
  trajs = common_rates()
  spec = small_spec(K=40, T=160.0)
  basis, gram, design, cjs = setting(spec, trajs)
  sigma, gamma, inner = pcs.optimize_profile(cjs, gram, design, spec,
                                             (0.3, 0.15))
  assert abs(sigma - 0.25) / 0.25 < 0.05
  assert abs(gamma - 0.2) / 0.2 < 0.05


def test_optimize_profile_against_grid():
  trajs = small_ensemble()
  spec = small_spec()
  basis, gram, design, cjs = setting(spec, trajs)
  sigma, gamma, inner = pcs.optimize_profile(cjs, gram, design, spec,
                                             (0.25, 0.2))
  scale = pcs.profile_value_and_gradient(0.25, 0.2, cjs, gram, design,
                                         spec)[0]
  best = numpy.inf
  for s in numpy.linspace(0.05, 1.0, 20):
    for g in numpy.linspace(0.05, 0.6, 20):
      try:
        v = pcs.profile_value_and_gradient(s, g, cjs, gram, design, spec)[0]
      except pex.Infeasible:
        continue
      best = min(best, v)
  assert inner.objective <= best + 1.0e-6 * scale


def test_init_solution_self_consistency():
  trajs = common_rates()[:1]
  spec = small_spec(K=40, T=160.0)
  basis, gram, design, cjs = setting(spec, trajs)
  lsdesign = pbs.design_matrices(basis, grid=trajs[0].grid)
  c, sigma, gamma = pcs.init_solution(cjs, gram, design, spec, lsdesign)
  assert abs(sigma - 0.25) / 0.25 < 0.02
  assert abs(gamma - 0.2) / 0.2 < 0.02


def test_init_solution_without_exposed(caplog):
  grid = pem.dailygrid(120.0)
  I = 100.0 * numpy.exp(-0.1 * grid)
  traj = pem.SampledTrajectory(grid, [("E", numpy.zeros_like(grid)),
                                      ("I", I)])
  spec = small_spec()
  basis, gram, design, cjs = setting(spec, [traj])
  c, sigma, gamma = pcs.init_solution(cjs, gram, design, spec)
  lo, hi = spec.bounds["sigma"]
  assert sigma == 0.5 * (lo + hi)
  assert abs(gamma - 0.1) / 0.1 < 0.05
  assert any("midpoint" in r.getMessage() for r in caplog.records)


def test_objective_coercive():
  trajs = small_ensemble()
  spec = small_spec(q=1.5)
  sol = pcs.solve(trajs, spec)
  cjs = pcs.shifted_stack(trajs, sol.delta_hat, sol.basis)
  values = [pcs.power_objective(t * sol.c_hat.c, cjs, sol.gram, 1.5)
            for t in (1.0, 2.0, 10.0, 100.0)]
  assert values[0] < values[1] < values[2] < values[3]


def random_instance(seed):
  rng = numpy.random.default_rng(seed)
  T, N = 120.0, 1.0e4
  J = int(rng.integers(1, 4))
  trajs = []
  for _ in range(J):
    sigma, gamma = rng.uniform(0.15, 0.35), rng.uniform(0.12, 0.3)
    beta = gamma * rng.uniform(1.8, 3.5)
    trajs.append(pem.integrate(pem.ModelParams(beta, sigma, gamma, N,
                                               rng.uniform(1.0, 20.0), 0.0,
                                               T), pem.dailygrid(T)))
  spec = small_spec(q=float(rng.choice([1.0, 1.5, 2.0])), max_outer=4)
  return trajs, spec


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(50))
def test_random_instances_feasible_and_monotone(seed):
  trajs, spec = random_instance(seed)
  sol = pcs.solve(trajs, spec)
  diag = sol.diagnostics
  assert diag["inequality_violation"] <= 1.0e-6 * spec.N
  for name in ("fine_min_E", "fine_min_I", "fine_min_S"):
    assert diag[name] >= -1.0e-6 * spec.N
  assert diag["equality_residual_relative"] <= 1.0e-4
  assert abs(sol.delta_hat.sum()) <= 1.0e-8
  trace = numpy.array(sol.objective_trace)
  assert numpy.all(numpy.diff(trace) <= 1.0e-6 * trace[0])
