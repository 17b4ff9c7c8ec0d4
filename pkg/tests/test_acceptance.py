"""Acceptance criteria 1-10, each reported as one PASS/FAIL line in the summary."""

import time

import numpy as np
import pytest

from cekit import analytic as an
from cekit import channels as chn
from cekit import vqa
from cekit.cause import (SolverConfig, ce_max, ce_min, ce_pi_average, classical_ace,
                         conditional_ce, correctability_check, dp_min_search, duality_check,
                         pair_value, petz_recovery, recovery_error)
from cekit.numkit import haar_unitary, proj, random_density

from oracles import bloch_grid_values

CFG = SolverConfig(restarts=16, seed=0)
PS = {p: an.PartialSwapParams(8, np.pi / 4, p) for p in (0.0, 0.5, 1.0)}
VQA_CFG = vqa.VqaConfig(optimizer="adam", seed=0)


def superposed_cases():
    dep = chn.depolarizing(2, 0.0)
    return {
        "1q": chn.PathChannelSpec(dep, chn.uniform_gammas(4), chn.maximally_coherent(2)),
        "2q": chn.PathChannelSpec(chn.tensor(dep, dep), chn.uniform_gammas(16), chn.maximally_coherent(2)),
    }


# --- 1: partial swap, exact path ---------------------------------------------------


def test_criterion_1_formula(accept):
    t0 = time.perf_counter()
    vals = [an.partial_swap_ce_max(PS[p]).value for p in (0.0, 0.5, 1.0)]
    ok = np.allclose(vals, [0.5, 0.591, 0.741], atol=5e-4) and time.perf_counter() - t0 < 60
    accept(1, ok, "closed form " + ", ".join(f"{v:.4f}" for v in vals))
    assert ok


@pytest.mark.xfail(strict=True, reason="closed form exceeds the channel's true CE_max for p > 0; see notes")
def test_criterion_1_solver_matches_formula(accept):
    t0 = time.perf_counter()
    rows = []
    for p, par in PS.items():
        solver = ce_max(par.channel(), CFG).value
        rows.append((p, solver, an.partial_swap_ce_max(par).value, an.partial_swap_ce_max_exact(par)))
    wall = time.perf_counter() - t0
    ok = all(abs(s - f) <= 2e-3 for _, s, f, _ in rows) and wall < 60
    detail = "solver vs formula " + ", ".join(f"p={p}: {s:.4f}/{f:.4f}" for p, s, f, _ in rows)
    detail += f" (solver vs sqrt(a^2+b^2) max dev {max(abs(s - e) for _, s, _, e in rows):.1e}, {wall:.0f}s)"
    accept(1, ok, detail)
    assert ok


# --- 2: partial swap, variational path ----------------------------------------------


@pytest.mark.slow
def test_criterion_2_vqa_partial_swap(accept):
    t0 = time.perf_counter()
    bad, parts = [], []
    for p, par in PS.items():
        ch = par.channel()
        assert vqa.register_sizes(ch) == (3, 4)  # 3 state qubits, 4-qubit measurement unitary
        est = vqa.run_vqa_best(ch, VQA_CFG, restarts=4).estimate
        formula = an.partial_swap_ce_max(par).value
        exact = an.partial_swap_ce_max_exact(par)
        # band around the stated value, and never above the channel's true value
        inside = formula - 0.06 <= est <= formula + 1e-6 and est <= exact + 1e-6
        parts.append(f"p={p}: {est:.4f}")
        if not inside:
            bad.append(p)
    reported = {0.0: 0.4999, 0.5: 0.553, 1.0: 0.6959}  # known variational values must sit in the bands
    reported_ok = all(an.partial_swap_ce_max(PS[p]).value - 0.06 <= v <= an.partial_swap_ce_max(PS[p]).value
                   for p, v in reported.items())
    wall = time.perf_counter() - t0
    ok = not bad and reported_ok and wall < 600
    accept(2, ok, "vqa " + ", ".join(parts) + f" ({wall:.0f}s)")
    assert ok


# --- 3: superposed depolarizing channels ----------------------------------------------


@pytest.mark.slow
def test_criterion_3_superposition(accept):
    t0 = time.perf_counter()
    targets = {"1q": 0.25, "2q": (2 + 3**0.5) / 32}
    ok, parts = True, []
    for name, spec in superposed_cases().items():
        formula = an.superposition_ce_max_bound(spec, 0.0)
        ch = chn.superposed_paths(spec)
        exact = ce_max(ch, CFG).value
        est = vqa.run_vqa_best(ch, VQA_CFG, restarts=4).estimate
        ok &= abs(formula - targets[name]) < 1e-12
        ok &= abs(exact - formula) <= 2e-3
        ok &= formula - 0.05 <= est <= formula + 1e-6
        parts.append(f"{name}: formula {formula:.4f} solver {exact:.4f} vqa {est:.4f}")
    wall = time.perf_counter() - t0
    ok &= wall < 600
    accept(3, ok, "; ".join(parts) + f" ({wall:.0f}s)")
    assert ok


# --- 4: equality regime of the superposition bound ------------------------------------


def test_criterion_4_superposition_equality(accept):
    rng = np.random.default_rng(4)
    dep = chn.depolarizing(2, 0.0)
    worst = 0.0
    for k in (2, 3):
        for _ in range(10):
            g = rng.normal(size=4) + 1j * rng.normal(size=4)
            spec = chn.PathChannelSpec(dep, g / np.linalg.norm(g), random_density(k, rng))
            bound = an.superposition_ce_max_bound(spec, 0.0)
            worst = max(worst, abs(ce_max(chn.superposed_paths(spec), CFG).value - bound))
    ok = worst <= 2e-3
    accept(4, ok, f"20 specs, max |solver - bound| = {worst:.1e}")
    assert ok


# --- 5: invariant suite ---------------------------------------------------------------


def _properties(d, seed, cfg, big):
    """Return a list of violation strings for one random channel."""
    out = []
    rng = np.random.default_rng(1000 * d + seed)
    ch = chn.random_channel(d, d, rng)
    mx, mn = ce_max(ch, cfg), ce_min(ch, cfg)
    dp = dp_min_search(ch, cfg, mn)
    tag = f"d={d} seed={seed}"

    if not (0 <= mn.value <= mx.value + 1e-6 and mx.value <= 1 + 1e-12 and 0 <= dp.value <= 1 + 1e-12):
        out.append(f"{tag} range")

    # data processing: the side that must be larger gets the extra restarts
    a = chn.random_channel(int(rng.integers(2, 5)), d, rng)
    b = chn.random_channel(d, int(rng.integers(2, 5)), rng)
    if ce_max(chn.compose(b, chn.compose(ch, a)), cfg).value > ce_max(ch, big).value + 1e-6:
        out.append(f"{tag} data-processing max")
    if ce_min(chn.compose(b, ch), big).value > mn.value + 1e-6:
        out.append(f"{tag} data-processing min")

    other = chn.random_channel(d, d, rng)
    mx2 = ce_max(other, big).value
    mx_big = ce_max(ch, big).value
    for p in (0.25, 0.5, 0.75):
        lhs = ce_max(chn.mixture([ch, other], [p, 1 - p]), cfg).value
        if lhs > p * mx_big + (1 - p) * mx2 + 1e-6:
            out.append(f"{tag} convexity p={p}")

    eps = 0.05
    mixed = chn.mixture([ch, chn.depolarizing(d, 0.0)], [1 - eps, eps])
    if abs(ce_max(mixed, cfg).value - mx.value) > 2 * eps + 1e-6:
        out.append(f"{tag} continuity max")
    if abs(ce_min(mixed, cfg).value - mn.value) > 2 * eps + 1e-6:
        out.append(f"{tag} continuity min")

    if dp.value < 2 * mn.value - 1 - 1e-6:
        out.append(f"{tag} theorem 1")

    avg = ce_pi_average(ch, 300, seed=seed)
    band = 3 * avg.stderr + 1e-9  # floor for rank-one channels, where stderr is ~1e-17
    if not mn.value - band <= avg.mean <= mx.value + band:
        out.append(f"{tag} sandwich")

    q = rng.dirichlet(np.ones(d), size=int(rng.integers(2, 5))).T
    qc = chn.StochasticChannel(q)
    if abs(ce_max(chn.embed_classical(qc), cfg).value - classical_ace(qc)) > 1e-6:
        out.append(f"{tag} maxclass")

    d_out = int(rng.integers(2, 4))
    c2q = chn.classical_to_quantum([random_density(d_out, rng) for _ in range(d)])
    f = np.exp(2j * np.pi * np.outer(np.arange(d), np.arange(d)) / d) / np.sqrt(d)
    if ce_min(c2q, cfg).value > 1e-6 or pair_value(c2q, proj(f[:, 0]), proj(f[:, 1])) > 1e-12:
        out.append(f"{tag} minclass")
    return out


@pytest.mark.slow
def test_criterion_5_invariants(accept):
    t0 = time.perf_counter()
    cfg = SolverConfig(restarts=8, seed=0)
    big = cfg.with_(restarts=32)
    violations = []
    for d in (2, 3, 4):
        for seed in range(20):
            violations += _properties(d, seed, cfg, big)

    ch = chn.embed_classical(chn.ii_d_example())
    rho = (proj([1, 0, 0, 0]) + proj([0, 0, 0, 1])) / 2
    rho2 = (proj([0, 1, 0, 0]) + proj([0, 0, 1, 0])) / 2
    if ce_min(ch, cfg).value > 1e-9 or pair_value(ch, rho, rho2) > 1e-12:
        violations.append("section II.D example")

    wall = time.perf_counter() - t0
    ok = not violations and wall < 300
    accept(5, ok, f"60 channels, {len(violations)} violations {violations[:5]} ({wall:.0f}s)")
    assert ok


# --- 6: duality / monogamy --------------------------------------------------------------


def test_criterion_6_duality(accept):
    t0 = time.perf_counter()
    failed = [s for s in range(20) if not (lambda r: r.stmt1_ok and r.stmt2_ok)(
        duality_check(chn.random_channel(2, 2, s), CFG))]
    ident = duality_check(chn.identity_channel(2), CFG)
    disc = duality_check(chn.discard_reprepare(2, np.diag([0.3, 0.7])), CFG)
    extremes = (ident.ce_max_N == pytest.approx(1, abs=1e-9) and ident.ce_min_N == pytest.approx(1, abs=1e-9)
                and ident.ce_max_Nc == 0 and disc.ce_max_N == 0
                and disc.ce_min_Nc == pytest.approx(1, abs=1e-9)
                and ident.stmt1_ok and ident.stmt2_ok and disc.stmt1_ok and disc.stmt2_ok)
    wall = time.perf_counter() - t0
    ok = not failed and extremes and wall < 300
    accept(6, ok, f"20 random qubit channels, failures {failed}, extremes exact {extremes} ({wall:.0f}s)")
    assert ok


# --- 7: recovery -----------------------------------------------------------------------


def test_criterion_7_recovery(accept):
    t0 = time.perf_counter()
    worst_unitary = 0.0
    for d in (2, 3):
        for s in range(3):
            ch = chn.unitary_channel(haar_unitary(d, s))
            worst_unitary = max(worst_unitary, recovery_error(ch, petz_recovery(ch), CFG))
    converse_bad, theorem_bad = [], []
    for s in range(20):
        rec = correctability_check(chn.random_channel(2, 2, 100 + s), CFG)
        if not rec.converse_ok:
            converse_bad.append(s)
        if not rec.theorem_ok:
            theorem_bad.append(s)
    wall = time.perf_counter() - t0
    ok = worst_unitary < 1e-8 and not converse_bad and not theorem_bad and wall < 300
    accept(7, ok, f"unitary error {worst_unitary:.1e}, converse failures {converse_bad}, "
                  f"theorem-bound violations {theorem_bad} ({wall:.0f}s)")
    assert ok


# --- 8: oracle equivalence ---------------------------------------------------------------


def test_criterion_8_bloch_oracle(accept):
    t0 = time.perf_counter()
    dmax = dmin = 0.0
    for s in range(10):
        ch = chn.random_channel(2, int(np.random.default_rng(s).integers(2, 4)), 200 + s)
        grid = bloch_grid_values(ch, 10_000)
        dmax = max(dmax, abs(ce_max(ch, CFG).value - grid.max()))
        dmin = max(dmin, abs(ce_min(ch, CFG).value - grid.min()))
    wall = time.perf_counter() - t0
    ok = dmax <= 2e-3 and dmin <= 2e-3 and wall < 120
    accept(8, ok, f"max dev ce_max {dmax:.1e}, ce_min {dmin:.1e} ({wall:.0f}s)")
    assert ok


# --- 9: Naimark dilation -----------------------------------------------------------------


def test_criterion_9_naimark(accept):
    rng = np.random.default_rng(9)
    worst = 0.0
    for _ in range(10):
        a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        q0 = a @ a.conj().T
        q0 /= np.linalg.eigvalsh(q0).max() * rng.uniform(1.0, 2.0)
        q1 = np.eye(2) - q0
        u = vqa.naimark_dilation(q0, q1)
        for _ in range(5):
            rho = random_density(2, rng)
            big = (u @ np.kron(rho, np.diag([1, 0])) @ u.conj().T).reshape(2, 2, 2, 2)
            for j, qj in enumerate((q0, q1)):
                worst = max(worst, abs(np.trace(big[:, j, :, j]).real - np.trace(qj @ rho).real))
    ok = worst <= 1e-9
    accept(9, ok, f"10 POVMs, max probability error {worst:.1e}")
    assert ok


# --- 10: one-time pad ---------------------------------------------------------------------


def test_criterion_10_one_time_pad(accept):
    cfg = SolverConfig(restarts=8, seed=0)
    vals = {}
    for name, bip in (("classical", chn.one_time_pad()), ("pauli", chn.pauli_one_time_pad())):
        vals[name] = (conditional_ce(bip, "max|min", cfg), conditional_ce(bip, "min|max", cfg))
    ok = all(abs(a) <= 1e-6 and abs(b - 1) <= 1e-6 for a, b in vals.values())
    accept(10, ok, ", ".join(f"{k}: max|min {a:.1e}, min|max {b:.6f}" for k, (a, b) in vals.items()))
    assert ok
