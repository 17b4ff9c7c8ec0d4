import numpy as np
import pytest

from cekit import channels as chn
from cekit.cause import (SolverConfig, ce_max, ce_min, ce_pi_average, ce_weighted_max,
                         ce_weighted_min, dp_min, dp_min_search, hermitian_kernel, pair_value)
from cekit.cause.solvers import _seesaw_max
from cekit.numkit import DimensionError, haar_unitary, proj, trace_norm

from oracles import bloch_grid_values


def check_report(ch, rep, orthogonal=True):
    rho, rho2 = rep.witness_pair
    assert 0 <= rep.value <= 1
    assert rep.value == pytest.approx(trace_norm(ch.apply_op(rho - rho2)) / 2, abs=1e-7)
    if orthogonal:
        assert abs(np.trace(rho @ rho2)) < 1e-8
    w = np.linalg.eigvalsh(rep.certificate)
    assert w.min() >= -1 - 1e-9 and w.max() <= 1 + 1e-9


def test_solver_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(restarts=0)
    with pytest.raises(ValueError):
        SolverConfig(tol=0)


@pytest.mark.parametrize("d", [2, 3])
def test_identity_channel(d, quick):
    ch = chn.identity_channel(d)
    for solve in (ce_max, ce_min):
        rep = solve(ch, quick)
        assert rep.value == pytest.approx(1, abs=1e-9)
        check_report(ch, rep)
    assert dp_min(ch, quick) == pytest.approx(1, abs=1e-9)


def test_discard_reprepare_is_zero(quick):
    ch = chn.discard_reprepare(3, proj([1, 0]))
    rep = ce_max(ch, quick)
    assert rep.value == 0.0
    assert ce_min(ch, quick).value == 0.0


def test_input_dimension_one_rejected(quick):
    with pytest.raises(DimensionError):
        ce_max(chn.identity_channel(1), quick)


def test_amplitude_damping_against_grid(quick):
    ch = chn.amplitude_damping(0.36)
    grid = bloch_grid_values(ch)
    rep = ce_max(ch, quick)
    check_report(ch, rep)
    assert abs(rep.value - grid.max()) < 2e-3
    assert rep.value >= grid.max() - 1e-9


@pytest.mark.parametrize("gamma", [0.1, 0.36, 0.8])
def test_amplitude_damping_ce_min(gamma, quick):
    ch = chn.amplitude_damping(gamma)
    rep = ce_min(ch, quick)
    check_report(ch, rep)
    assert rep.value == pytest.approx(1 - gamma, abs=1e-6)
    assert rep.value == pytest.approx(bloch_grid_values(ch, 4000).min(), abs=2e-3)


def test_ii_d_example_ce_min_zero(quick):
    ch = chn.embed_classical(chn.ii_d_example())
    rep = ce_min(ch, quick)
    assert rep.value < 1e-9
    check_report(ch, rep)
    # the mixtures of 00/11 and 01/10 are also a witness
    rho = (proj([1, 0, 0, 0]) + proj([0, 0, 0, 1])) / 2
    rho2 = (proj([0, 1, 0, 0]) + proj([0, 0, 1, 0])) / 2
    assert pair_value(ch, rho, rho2) < 1e-12


def test_seesaw_is_monotone():
    ch = chn.random_channel(3, 3, 5)
    u = haar_unitary(3, 1)
    cfg = SolverConfig(tol=1e-14, max_iters=200)
    *_, trace, iters, _ = _seesaw_max(ch, u[:, 0], u[:, 1], cfg)
    assert np.all(np.diff(trace) >= -1e-12)


def test_ce_min_kernel_shortcut():
    ch = chn.classical_to_quantum([proj([1, 0]), proj([0, 1]), np.eye(2) / 2])
    assert hermitian_kernel(ch) is not None
    assert hermitian_kernel(chn.identity_channel(3)) is None


def test_completely_depolarizing_dp_min(quick):
    res = dp_min_search(chn.depolarizing(2, 0.0), quick)
    assert res.value == pytest.approx(0, abs=1e-9)
    assert res.p == 0.5


@pytest.mark.parametrize("seed", range(4))
def test_theorem1_bound(seed, quick):
    ch = chn.random_channel(2, 2, seed)
    mn = ce_min(ch, quick)
    dp = dp_min_search(ch, quick, mn)
    assert dp.value >= 2 * mn.value - 1 - 1e-6
    assert dp.value <= mn.value + 1e-12


@pytest.mark.parametrize("seed", range(3))
def test_weighted_at_half(seed, quick):
    ch = chn.random_channel(2, 2, seed + 20)
    assert ce_weighted_max(ch, 0.5, quick) == pytest.approx(ce_max(ch, quick).value, abs=1e-6)
    assert ce_weighted_min(ch, 0.5, quick) == pytest.approx(ce_min(ch, quick).value, abs=1e-6)


@pytest.mark.parametrize("p", [0.0, 1.0])
def test_weighted_endpoints(p, quick):
    ch = chn.random_channel(2, 2, 3)
    assert ce_weighted_max(ch, p, quick) == 1.0
    assert ce_weighted_min(ch, p, quick) == 1.0


@pytest.mark.parametrize("p", [0.2, 0.7])
def test_weighted_identity(p, quick):
    ch = chn.identity_channel(2)
    assert ce_weighted_max(ch, p, quick) == pytest.approx(1, abs=1e-9)
    assert ce_weighted_min(ch, p, quick) == pytest.approx(1, abs=1e-9)


def test_weighted_rejects_bad_p(quick):
    with pytest.raises(ValueError):
        ce_weighted_max(chn.identity_channel(2), 1.5, quick)


def test_pi_average():
    ident = ce_pi_average(chn.identity_channel(3), 50, seed=1)
    assert ident.mean == pytest.approx(1, abs=1e-12)
    dep = ce_pi_average(chn.depolarizing(2, 0.5), 100, seed=1)
    assert dep.mean == pytest.approx(0.5, abs=1e-9)
    with pytest.raises(ValueError):
        ce_pi_average(chn.identity_channel(2), 0)


@pytest.mark.parametrize("seed", range(3))
def test_sandwich(seed, quick):
    ch = chn.random_channel(3, 3, seed)
    avg = ce_pi_average(ch, 300, seed=seed)
    assert ce_min(ch, quick).value - 3 * avg.stderr <= avg.mean <= ce_max(ch, quick).value + 3 * avg.stderr


def test_results_independent_of_workers():
    ch = chn.random_channel(3, 3, 9)
    a = ce_max(ch, SolverConfig(restarts=6, workers=1))
    b = ce_max(ch, SolverConfig(restarts=6, workers=3))
    assert a.value == b.value
    assert a.iterations_per_restart == b.iterations_per_restart


def test_seed_determinism():
    ch = chn.random_channel(3, 3, 2)
    cfg = SolverConfig(restarts=4, seed=5)
    assert ce_min(ch, cfg).value == ce_min(ch, cfg).value
