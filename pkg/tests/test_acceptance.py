"""Acceptance suite: each test checks one criterion at its stated tolerance
and records a PASS/FAIL line shown in the pytest terminal summary."""

import json
import time

import numpy as np
import pytest

from boxlasso.cli import main
from boxlasso.denoise import Transform, denoise_identity, denoise_transform, denoising_multipliers
from boxlasso.generate import generate_problem
from boxlasso.geometry import DiagonalGeometry, diagonal_g, diagonal_g_gradient, g_value, p_star_diagonal
from boxlasso.model import Problem, column_norms_sq
from boxlasso.multipliers import diagonal_multipliers, gradient_sign_multipliers, scalar_multiplier
from boxlasso.solvers import solve_box_ls, solve_weighted_lasso, solve_weighted_tikhonov
from boxlasso.verify import dual_value, kkt_residuals, verify_equivalence
from oracles import central_difference, convex_grid_argmin_1d, q_grid_min_h

SEED = 1729


def diagonal_sweep(count=500):
    """The diagonal-Gram instances shared by criteria 2 and 6."""
    rng = np.random.default_rng(SEED)
    for k in range(count):
        n = int(rng.integers(1, 11))
        m = int(rng.integers(1, 13))
        yield generate_problem("diagonal", n=n, m=m, seed=SEED + k)


def drop_zero_columns(p):
    keep = column_norms_sq(p.a) > 0
    return Problem(p.a[:, keep], p.b, p.tau[keep])


def test_scalar_equivalence(acceptance_line):
    rng = np.random.default_rng(SEED)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(1000):
        a = 0.0
        while abs(a) < 0.1:
            a = rng.uniform(-5, 5)
        b = rng.uniform(-5, 5)
        tau = 5.0 - rng.uniform(0, 5)  # (0, 5]
        lam = scalar_multiplier(a, b, tau)
        x_pen = convex_grid_argmin_1d(lambda x: (a * x - b) ** 2 + lam * abs(x), -10.0, 10.0, 1e-5)
        x_con = min(max(b / a, -tau), tau)
        worst = max(worst, abs(x_pen - x_con))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-4 and elapsed < 10
    acceptance_line("1 scalar equivalence", ok, f"max |argmin diff| {worst:.2e} (tol 1e-4), {elapsed:.2f}s (< 10s)")
    assert ok


def test_diagonal_duality_and_kkt(acceptance_line):
    start = time.perf_counter()
    worst_gap = worst_kkt = 0.0
    for p in diagonal_sweep():
        rep = verify_equivalence(p, diagonal_multipliers(p))
        worst_gap = max(worst_gap, abs(rep.gap))
        worst_kkt = max(worst_kkt, rep.max_kkt_residual)
    elapsed = time.perf_counter() - start
    ok = worst_gap <= 1e-6 and worst_kkt <= 1e-6 and elapsed < 60
    acceptance_line(
        "2 diagonal duality/KKT", ok, f"max gap {worst_gap:.2e}, max KKT {worst_kkt:.2e} (tol 1e-6), {elapsed:.2f}s (< 60s)"
    )
    assert ok


def test_gradient_sign(acceptance_line):
    rng = np.random.default_rng(SEED)
    worst_gap = worst_kkt = 0.0
    for k in range(200):
        n = int(rng.integers(1, 9))
        m = int(rng.integers(n, n + 5))
        p = generate_problem("gradient-sign", n=n, m=m, seed=SEED + k)
        res = gradient_sign_multipliers(p)
        np.testing.assert_allclose(res.lam, 2 * p.a.T @ (p.b - p.a @ p.tau), rtol=1e-12, atol=1e-12)
        rep = verify_equivalence(p, res)
        worst_gap = max(worst_gap, abs(rep.gap))
        worst_kkt = max(worst_kkt, rep.max_kkt_residual)
    uncorrected = kkt_residuals([[1.0]], [3.0], [2.0], [1.0])[0]
    ok = worst_gap <= 1e-6 and worst_kkt <= 1e-6 and uncorrected >= 1
    acceptance_line(
        "3 gradient-sign",
        ok,
        f"max gap {worst_gap:.2e}, max KKT {worst_kkt:.2e} (tol 1e-6); uncorrected lambda=2 KKT residual {uncorrected:g} (>= 1)",
    )
    assert ok


def test_value_function_equality(acceptance_line):
    rng = np.random.default_rng(SEED)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(1, 5))
        m = int(rng.integers(1, 7))
        a = rng.normal(size=(m, n)) / np.sqrt(m)
        b = rng.normal(size=m)
        tau = rng.uniform(0.05, 0.25, n)
        p = Problem(a, b, tau)
        for _ in range(10):
            u = rng.uniform(-tau, 0.25)
            worst = max(worst, abs(q_grid_min_h(a, b, tau, u, 1e-2) - g_value(p, u)))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-3 and elapsed < 120
    acceptance_line("4 h = g", ok, f"max |grid h_G - g| {worst:.2e} (tol 1e-3), {elapsed:.2f}s (< 120s)")
    assert ok


def test_diagonal_value_function(acceptance_line):
    rng = np.random.default_rng(SEED)
    worst_g = worst_grad = 0.0
    exact = True
    for k in range(500):
        n = int(rng.integers(1, 11))
        m = int(rng.integers(n, 13))
        p = generate_problem("diagonal", n=n, m=m, seed=SEED + k)
        geo = DiagonalGeometry.from_problem(p)
        u = rng.uniform(-p.tau + 1e-3, 2.0)
        worst_g = max(worst_g, abs(diagonal_g(geo, u) - g_value(p, u)))
        smooth = np.abs(u - geo.c) > 1e-3
        fd = central_difference(lambda v: diagonal_g(geo, v), u)
        grad = diagonal_g_gradient(geo, u)
        if smooth.any():
            worst_grad = max(worst_grad, float(np.max(np.abs(grad - fd)[smooth])))
        exact &= bool(np.array_equal(-diagonal_g_gradient(geo, np.zeros(n)), diagonal_multipliers(p).lam))
    ok = worst_g <= 1e-6 and worst_grad <= 1e-4 and exact
    acceptance_line(
        "5 diagonal g",
        ok,
        f"max |g diff| {worst_g:.2e} (tol 1e-6), max gradient diff {worst_grad:.2e} (tol 1e-4), -grad g(0) == lambda: {exact}",
    )
    assert ok


def test_p_star_closed_form(acceptance_line):
    worst = 0.0
    for p in diagonal_sweep():
        closed = p_star_diagonal(DiagonalGeometry.from_problem(drop_zero_columns(p)))
        worst = max(worst, abs(closed - solve_box_ls(p).objective))
    ok = worst <= 1e-6
    acceptance_line("6 p* closed form", ok, f"max |p* diff| {worst:.2e} (tol 1e-6)")
    assert ok


def test_worked_example_cli(acceptance_line, tmp_path, capsys):
    path = tmp_path / "example.json"
    path.write_text(json.dumps({"m": 2, "n": 2, "A": [1, 0, 0, 1], "b": [2, 2], "tau": [1, 1]}))
    code = main(["solve", str(path), "--formulation", "box"])
    x = np.array(json.loads(capsys.readouterr().out)["x"])
    err = float(np.max(np.abs(x - 1.0)))
    ok = code == 0 and err <= 1e-8
    acceptance_line("7 worked example", ok, f"x = {x.tolist()}, max error {err:.2e} (tol 1e-8), exit {code}")
    assert ok


def test_tikhonov(acceptance_line):
    rng = np.random.default_rng(SEED)
    worst_res = 0.0
    beaten = 0
    for _ in range(200):
        n = int(rng.integers(1, 9))
        m = int(rng.integers(1, 11))
        a = rng.normal(size=(m, n))
        b = rng.normal(size=m)
        lam = rng.uniform(0.1, 5.0, n)
        x = solve_weighted_tikhonov(a, b, lam)
        worst_res = max(worst_res, float(np.max(np.abs((a.T @ a + np.diag(lam)) @ x - a.T @ b))))

        def objective(v):
            r = a @ v - b
            return r @ r + lam @ (v * v)

        base = objective(x)
        d = rng.normal(size=(100, n))
        d *= 1e-3 / np.linalg.norm(d, axis=1, keepdims=True)
        beaten += sum(objective(x + di) < base for di in d)
    ok = worst_res <= 1e-10 and beaten == 0
    acceptance_line(
        "8 Tikhonov", ok, f"max normal-equation residual {worst_res:.2e} (tol 1e-10), perturbations beating x: {beaten}"
    )
    assert ok


def test_denoising_clamp(acceptance_line):
    rng = np.random.default_rng(SEED)
    exact = True
    worst = 0.0
    for _ in range(500):
        n = int(rng.integers(1, 33))
        b = rng.normal(scale=3.0, size=n)
        tau = rng.uniform(0, 3.0, n)
        x = denoise_identity(b, tau).samples
        exact &= bool(np.array_equal(x, np.minimum(np.maximum(b, -tau), tau)))
        cd = solve_weighted_lasso(np.eye(n), b, denoising_multipliers(b, tau)).x
        worst = max(worst, float(np.max(np.abs(cd - x))))
    ok = exact and worst <= 1e-8
    acceptance_line("9 denoising clamp", ok, f"clamp exact: {exact}, max |CD - clamp| {worst:.2e} (tol 1e-8)")
    assert ok


def test_transform_denoising(acceptance_line):
    rng = np.random.default_rng(SEED)
    t = Transform("dct", 16)
    b = rng.normal(size=16)
    round_trip = float(np.max(np.abs(denoise_transform(b, np.abs(t.analyze(b)), t).samples - b)))
    ortho = max(float(np.max(np.abs(Transform("dct", n).matrix.T @ Transform("dct", n).matrix - np.eye(n)))) for n in range(1, 65))
    ok = round_trip <= 1e-8 and ortho <= 1e-10
    acceptance_line(
        "10 transform denoising", ok, f"DCT round-trip error {round_trip:.2e} (tol 1e-8), max |Phi^T Phi - I| {ortho:.2e} (tol 1e-10)"
    )
    assert ok


def test_weak_duality(acceptance_line):
    rng = np.random.default_rng(SEED)
    worst = -np.inf
    for _ in range(1000):
        n = int(rng.integers(1, 7))
        m = int(rng.integers(1, 9))
        p = Problem(rng.normal(size=(m, n)), rng.normal(scale=2.0, size=m), rng.uniform(0, 2, n))
        lam = rng.exponential(2.0, size=n)
        worst = max(worst, dual_value(p, lam) - solve_box_ls(p).objective)
    ok = worst <= 1e-8
    acceptance_line("11 weak duality", ok, f"max H(lambda) - p* {worst:.2e} (tol 1e-8)")
    assert ok


@pytest.fixture(autouse=True)
def _no_warnings():
    with np.errstate(all="raise"):
        yield
