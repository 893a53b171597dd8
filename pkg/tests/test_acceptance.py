"""Acceptance criteria 1-9.

Each test records one PASS/FAIL line (with timing) that is printed in the
terminal summary; run ``pytest tests/test_acceptance.py -s`` to also see them
inline.
"""
import time

import numpy as np
import sympy as sp

from quatquot._lattice import lattice_index, smith_invariants
from quatquot.group_action import build_omega, integer_kernel, locally_free_screen, quotient_is_F
from quatquot.joyce import correspondence_check
from quatquot.moment import build_Bstar, holomorphicity_residual_batch, nu, scan_transversality, spec_for
from quatquot.qalg import UPoint
from quatquot.quotient_geom import DescentError, conformal_rep, descend_H, random_P_samples, same_conformal_class
from quatquot.toric_data import ConformalData, derive_T, recover_S, validate_S
from quatquot.twistor_class import Psi, deformability, deformability_bruteforce, involution_residual, psi, pushforward, random_line_params

from .conftest import FIXTURE_NAMES, VALID, load_fixture, random_S, random_upoints

RESULTS: dict[int, str] = {}


def record(n: int, ok: bool, detail: str, elapsed: float) -> None:
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'} ({elapsed:.2f}s) {detail}"
    RESULTS[n] = line
    print(line)


def test_criterion_1_holomorphicity():
    t0 = time.perf_counter()
    worst, mutated = 0.0, np.inf
    for name in FIXTURE_NAMES:
        inp = load_fixture(name)
        spec = spec_for(inp.S, inp.theta)
        x, y = random_upoints(np.random.default_rng(100), 1000, inp.k)
        worst = max(worst, float(holomorphicity_residual_batch(x, y, spec).max()))
        for flip in range(3):
            mutated = min(mutated, float(holomorphicity_residual_batch(x, y, spec, flip).max()))
    dt = time.perf_counter() - t0
    ok = worst <= 1e-10 and mutated > 1e-1 and dt < 5
    record(1, ok, f"max residual {worst:.2e}, weakest mutation {mutated:.2e}", dt)
    assert ok


def test_criterion_2_transversality():
    t0 = time.perf_counter()
    detail = []
    ok = True
    for name in ("k3", "k4", "k5"):
        inp = load_fixture(name)
        rep = scan_transversality(inp.S, inp.theta, 50)
        good = rep["samples"] == 2500 and rep["sign_changes"] == 0 and rep["sign"] != 0 and rep["min_abs_det"] > 1e-9
        ok &= good
        detail.append(f"{name} min {rep['min_abs_det']:.3g}")
    bad = load_fixture("nonconvex")
    rep = scan_transversality(bad.S, bad.theta, 50)
    ok &= rep["sign_changes"] > 0
    detail.append(f"nonconvex sign changes {rep['sign_changes']}")
    dt = time.perf_counter() - t0
    ok &= dt < 10
    record(2, ok, ", ".join(detail), dt)
    assert ok


def test_criterion_3_joyce_correspondence():
    t0 = time.perf_counter()
    fractions = {}
    for name in VALID:
        inp = load_fixture(name)
        rep = correspondence_check(inp.S, inp.theta, 50)
        fractions[name] = (rep["fraction_matched"], rep["rearrangement_error"])
    dt = time.perf_counter() - t0
    ok = all(f == 1.0 for f, _ in fractions.values()) and dt < 20
    record(3, ok, ", ".join(f"{n} {f:.0%} (identity err {e:.1e})" for n, (f, e) in fractions.items()), dt)
    assert ok


def test_criterion_4_descended_relations():
    t0 = time.perf_counter()
    worst_rel, worst_cls = 0.0, 0.0
    accepted = {}
    dims_ok = True
    rng = np.random.default_rng(400)
    for name in VALID:
        inp = load_fixture(name)
        spec = spec_for(inp.S, inp.theta)
        n = 0
        for p in random_P_samples(inp.R, 220, np.random.default_rng(401)):
            try:
                fr = descend_H(p, spec)
            except DescentError:
                continue
            n += 1
            dims_ok &= fr.dim_K - (inp.k + 2) == 4 and fr.basis.shape[1] == 4
            worst_rel = max(worst_rel, fr.max_residual())
            A = rng.normal(size=(4, 4))
            fr2 = descend_H(p, spec, basis=fr.basis @ A)
            worst_cls = max(worst_cls, same_conformal_class(A.T @ conformal_rep(fr) @ A, conformal_rep(fr2)))
        accepted[name] = n
    dt = time.perf_counter() - t0
    ok = all(n >= 200 for n in accepted.values()) and worst_rel <= 1e-6 and worst_cls <= 1e-5 and dims_ok and dt < 60
    record(4, ok, f"accepted {accepted}, relations {worst_rel:.1e}, class {worst_cls:.1e}", dt)
    assert ok


def test_criterion_5_meromorphic_involution():
    t0 = time.perf_counter()
    inv, push = 0.0, 0.0
    for name in VALID + ("nonconvex", "sublattice"):
        inp = load_fixture(name)
        for z in random_line_params(inp.R, 1000, np.random.default_rng(500)):
            inv = max(inv, involution_residual(inp.R, z))
            direct = np.array(psi(inp.S, inp.R, z))
            via = np.array(pushforward(inp.T, Psi(inp.R, z)))
            push = max(push, float(np.max(np.abs(direct - via) / np.maximum(1.0, np.abs(direct)))))
    dt = time.perf_counter() - t0
    ok = inv <= 1e-9 and push <= 1e-12
    record(5, ok, f"projective residual {inv:.1e}, pushforward {push:.1e}", dt)
    assert ok


def test_criterion_6_exact_round_trips():
    t0 = time.perf_counter()
    rng = np.random.default_rng(600)
    ok = True
    for _ in range(100):
        S = random_S(rng, int(rng.integers(3, 9)))
        assert validate_S(S).ok
        T = derive_T(S)
        ok &= recover_S(T) == S
        ok &= [sum(v[c] for v in T.T) for c in range(2)] == [2 * S[-1][0], 2 * S[-1][1]]
        D = integer_kernel(build_omega(T)).D
        ok &= set(smith_invariants(D)) == {1}
    agree = 0
    non_generating = 0
    for _ in range(50):
        S = random_S(rng, int(rng.integers(3, 7)), require_generating=False)
        flag = lattice_index(S, 2) == 1
        non_generating += not flag
        agree += quotient_is_F(S) == flag
    ok &= agree == 50
    dt = time.perf_counter() - t0
    record(6, ok, f"100 round trips, quotient_is_F agreement {agree}/50 ({non_generating} non-generating)", dt)
    assert ok


def test_criterion_7_nu1_selection():
    t0 = time.perf_counter()
    rng = np.random.default_rng(700)
    x, y = random_upoints(rng, 10_000, 3)
    zero = rng.random(10_000) < 0.3
    x[zero, 0] = 0
    y[zero, 0] = 0
    n1 = np.array([nu(UPoint(a, b))[0] for a, b in zip(x[:, :1], y[:, :1])])
    numeric = bool(np.array_equal(np.all(n1 == 0, axis=1), zero))
    # exact: |nu_1|^2 = (|x|^2 + |y|^2)^2, so nu_1 = 0 iff q_1 = 0
    a, b, c, d = sp.symbols("a b c d", real=True)
    xs, ys = a + sp.I * b, c + sp.I * d
    comps = (sp.Abs(xs) ** 2 - sp.Abs(ys) ** 2, sp.re(2 * sp.I * xs * ys), sp.im(2 * sp.I * xs * ys))
    symbolic = sp.expand(sum(t**2 for t in comps) - (a**2 + b**2 + c**2 + d**2) ** 2) == 0
    # nu_1 is not a combination of the mu components: e_1 pairs to Re z_1 = 1 with W
    span_ok = True
    for _ in range(200):
        k = int(rng.integers(3, 9))
        theta = np.concatenate([[0.0], np.sort(rng.uniform(0.01, np.pi - 0.01, k - 1))])
        R = ConformalData(tuple(theta))
        B = build_Bstar(R).Bstar
        e1 = np.eye(k)[0]
        # distance from the mu span is |proj_W e_1| >= (e_1 . Re z) / |Re z| = 1 / |Re z|
        dist = np.linalg.norm(e1 - B.T @ (B @ e1))
        span_ok &= R.z[0].real == 1.0 and dist >= (1 - 1e-12) / np.linalg.norm(R.z.real)
    dt = time.perf_counter() - t0
    ok = numeric and symbolic and span_ok
    record(7, ok, f"10^4 points ({int(zero.sum())} with q_1 = 0), symbolic identity {symbolic}", dt)
    assert ok


def test_criterion_8_deformability_oracle():
    t0 = time.perf_counter()
    agree = True
    dims = {}
    for name in FIXTURE_NAMES:
        T = load_fixture(name).T
        a, b = deformability(T), deformability_bruteforce(T)
        agree &= a["extra_weights"] == b["extra_weights"] and a["extra_dim"] == b["extra_dim"]
        dims[name] = a["extra_dim"]
    ok = agree and dims["k3"] == 6 and dims["k5"] == 0
    dt = time.perf_counter() - t0
    record(8, ok, f"oracle agreement {agree}, extra dims {dims}", dt)
    assert ok


def test_criterion_9_locally_free():
    t0 = time.perf_counter()
    statuses = {name: locally_free_screen(load_fixture(name).T).status for name in VALID}
    degenerate = locally_free_screen(derive_T([(1, 0), (-1, 1), (-2, 2)]))
    ok = all(s == "PASS" for s in statuses.values()) and degenerate.status == "FAIL" and bool(degenerate.witnesses)
    dt = time.perf_counter() - t0
    record(9, ok, f"{statuses}, degenerate witnesses {len(degenerate.witnesses)}", dt)
    assert ok
