import cmath
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from arakelian import (ExpOf, GridSet, LinearFactor, LogGrid, Obstruction, Polynomial, Product,
                       WeierstrassProduct, Window, corpus_scene, evaluate, fn_from_dict,
                       log_on_path, log_on_set, weierstrass_build, winding_details,
                       winding_number)
from arakelian.analysis import far_genus, winding_many
from arakelian.errors import (DomainError, PolicyError, ScaledRepresentationError, SchemaError,
                              ZeroOnContourError)
from arakelian.topology import PolyPath

from conftest import roots_inside_polygon

ZOO = [
    LinearFactor(0.3 - 0.2j),
    Polynomial((1.0, -2.0, 0.5j, 1.0)),
    Polynomial.from_roots([1.5, -0.5 + 2j]),
    weierstrass_build([3.0, 5.0j, -8.0], 1.0),
    weierstrass_build([1.5, -2.0 + 0.5j], 4.0),
    Product((LinearFactor(2.0), Polynomial((1.0, 0.0, 1.0)))),
    ExpOf(Polynomial((0.1, 0.2, -0.3j))),
    Product((ExpOf(LinearFactor(0.5)), weierstrass_build([4.0, 6.0], 2.0))),
]


def circle(c, r, n=64):
    return PolyPath.circle(c, r, n)


# ---------------------------------------------------------------------------
# evaluation


def test_linear_factor_value_and_derivative():
    assert evaluate(LinearFactor(0j), 2 + 0j) == (2, 1)


def test_polynomial_value_and_derivative():
    v, d = evaluate(Polynomial((-1.0, 0.0, 1.0)), 1 + 0j)
    assert v == 0 and d == 2


def test_weierstrass_matches_high_precision_product():
    zeros = [3.0, 5.0]
    f = weierstrass_build(zeros, 1.0)
    mpmath.mp.dps = 40

    def direct(z):
        out = mpmath.mpf(1)
        for zeta, p in zip(zeros, f.genera):
            w = mpmath.mpc(z) / zeta
            out *= (1 - w) * mpmath.exp(sum(w ** k / k for k in range(1, p + 1)))
        return complex(out)

    for z in (0j, 0.3 + 0.4j, -0.9j, 0.7):
        assert abs(evaluate(f, z)[0] - direct(z)) <= 1e-9 * max(1, abs(direct(z)))


def test_single_zero_product_is_one_minus_z():
    f = weierstrass_build([1.0], 0.5)
    assert f.genera == (0,)
    assert evaluate(f, 1 + 0j)[0] == 0 and evaluate(f, 0j)[0] == 1


def test_weierstrass_zeros_and_nonvanishing_disk():
    f = weierstrass_build([2.0, 4.0, 8.0], 1.0)
    for zeta in (2.0, 4.0, 8.0):
        assert abs(evaluate(f, complex(zeta))[0]) < 1e-10
    r = np.sqrt(np.linspace(0, 1, 200))[:, None]
    t = np.linspace(0, 2 * np.pi, 400)[None, :]
    assert np.min(np.abs(f.value(r * np.exp(1j * t)))) > 0


def test_far_genus_policy():
    # (R/|ζ_n|)^(p+1) <= 2^-n with p minimal
    for zeta, n, R in ((2.0, 1, 1.0), (2.0, 3, 1.0), (10.0, 5, 3.0), (1.01, 1, 1.0)):
        p = far_genus(zeta, n, R)
        q = R / zeta
        assert q ** (p + 1) <= 2.0 ** -n
        assert p == 0 or q ** p > 2.0 ** -n
    with pytest.raises(PolicyError):
        far_genus(0.5, 1, 1.0)


def test_weierstrass_tail_bound_is_recorded():
    f = weierstrass_build([3.0, 5.0], 1.0)
    q = [1 / 3, 1 / 5]
    want = sum(x ** (p + 1) / (1 - x) for x, p in zip(q, f.genera))
    assert f.tail_bound == pytest.approx(want)


def test_weierstrass_rejects_bad_zero_lists():
    with pytest.raises(DomainError):
        weierstrass_build([], 1.0)
    with pytest.raises(DomainError):
        weierstrass_build([2.0, 2.0], 1.0)
    with pytest.raises(DomainError):
        weierstrass_build([4.0, 2.0], 1.0)


def test_overflow_is_scaled_representation_error():
    f = ExpOf(Polynomial((0.0, 1.0)))
    with pytest.raises(ScaledRepresentationError):
        f.evaluate(np.array([800.0 + 0j]))


@pytest.mark.parametrize("f", ZOO, ids=lambda f: f.kind)
def test_derivative_matches_central_difference(f):
    rng = np.random.default_rng(11)
    z = rng.uniform(-2, 2, 20) + 1j * rng.uniform(-2, 2, 20)
    step = 1e-6
    _, d = f.evaluate(z)
    fd = (f.value(z + step) - f.value(z - step)) / (2 * step)
    assert np.all(np.abs(fd - d) <= 1e-6 * np.abs(d))


@pytest.mark.parametrize("f", ZOO, ids=lambda f: f.kind)
def test_function_json_round_trip(f):
    g = fn_from_dict(f.to_dict())
    z = np.array([0.1 + 0.2j, -1.3 + 0.4j])
    assert np.allclose(f.value(z), g.value(z), rtol=1e-14)


def test_function_schema_errors():
    with pytest.raises(SchemaError):
        fn_from_dict({"kind": "sine"})
    with pytest.raises(SchemaError):
        fn_from_dict({"kind": "linear", "params": {}})
    with pytest.raises(SchemaError):
        fn_from_dict({"kind": "exp", "children": []})


# ---------------------------------------------------------------------------
# winding numbers


def test_winding_around_own_zero_is_one():
    zeta = 0.4 - 0.7j
    assert winding_number(LinearFactor(zeta), circle(zeta, 1.0)) == 1


def test_winding_around_distant_zero_is_zero():
    assert winding_number(LinearFactor(3 + 0j), circle(0j, 1.0)) == 0


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_winding_equals_root_count(seed):
    rng = np.random.default_rng(seed)
    k = int(rng.integers(0, 4))
    roots = list(rng.uniform(-2, 2, 3) + 1j * rng.uniform(-2, 2, 3))
    inside = rng.choice(3, size=k, replace=False)
    for m in range(3):
        mag = 0.6 * rng.uniform(0.05, 1.0) if m in inside else rng.uniform(1.4, 3.0)
        roots[m] = mag * np.exp(2j * np.pi * rng.random())
    gamma = circle(0j, 1.0, 48)
    r = winding_details(Polynomial.from_roots(roots), gamma)
    assert r.winding == roots_inside_polygon(roots, gamma.points) == k
    assert r.integrality_error < 1e-6


def test_winding_zero_on_contour():
    with pytest.raises(ZeroOnContourError):
        winding_number(LinearFactor(1 + 0j), circle(0j, 1.0, 4))


def test_winding_open_path_rejected():
    with pytest.raises(DomainError):
        winding_number(LinearFactor(0j), PolyPath(np.array([1, 1j, -1]), closed=False))


def test_winding_many_agrees_with_single_calls():
    f = Polynomial.from_roots([0.2, 2 + 1j, -1.5j])
    cycles = [circle(0j, 1.0), circle(2 + 1j, 0.5), circle(-3 + 0j, 0.5), circle(0j, 2.5)]
    batch = [r.winding for r in winding_many(f, cycles)]
    assert batch == [winding_number(f, c) for c in cycles] == [1, 1, 0, 3]


# ---------------------------------------------------------------------------
# logarithms along paths


def test_log_of_constant_is_constant():
    c = -2 + 0.5j
    path = PolyPath(np.linspace(0, 3 + 1j, 50))
    lp = log_on_path(Polynomial((c,)), path)
    assert np.allclose(lp.g, cmath.log(c), atol=1e-12)


def test_log_along_upper_semicircle():
    t = np.linspace(0, np.pi, 200)
    lp = log_on_path(LinearFactor(0j), PolyPath(np.exp(1j * t)), basepoint_log=0j)
    # oracle: the continuous argument of e^{it} is t
    assert abs(lp.g[-1] - 1j * math.pi) <= 1e-9
    assert lp.max_residual <= 1e-9


def test_log_around_closed_circle_records_branch_jump():
    lp = log_on_path(LinearFactor(0j), circle(0j, 1.0, 16), basepoint_log=0j)
    assert abs(lp.closing_jump - 2j * math.pi) <= 1e-9
    assert np.all(np.abs(np.diff(lp.g.imag)) < np.pi / 2)


def test_log_path_refines_large_phase_steps():
    lp = log_on_path(Polynomial((0, 0, 0, 0, 0, 1.0)), circle(0j, 1.0, 4))
    assert np.all(np.abs(np.diff(lp.g.imag)) < np.pi / 2)
    assert abs(lp.total_phase - 10 * math.pi) < 1e-9


def test_bad_basepoint_rejected():
    with pytest.raises(DomainError):
        log_on_path(LinearFactor(0j), circle(0j, 1.0), basepoint_log=1.0)


# ---------------------------------------------------------------------------
# logarithms on grid sets


def test_half_plane_log_is_principal_after_translation():
    s = corpus_scene("half_plane").grid()
    zeta = -1j
    res = log_on_set(LinearFactor(zeta), s)
    assert isinstance(res, LogGrid)
    assert res.max_residual < 1e-9
    z = s.points()
    g = res.g[s.mask]
    # z - ζ has positive imaginary part on F, so the principal log is continuous there
    oracle = np.log(z - zeta)
    k = np.round((g - oracle).imag / (2 * np.pi))
    assert np.all(k == k[0])
    assert np.allclose(g - 2j * np.pi * k[0], oracle, atol=1e-12)


def test_thick_annulus_log_of_z_is_obstructed_once():
    s = corpus_scene("thick_annulus").grid()
    res = log_on_set(LinearFactor(0j), s)
    assert isinstance(res, Obstruction) and res.winding == 1
    assert winding_number(LinearFactor(0j), res.cycle) == 1
    assert all(p in s for p in res.cycle.points)


def test_thick_annulus_log_of_z_squared_winds_twice():
    s = corpus_scene("thick_annulus").grid()
    f = Polynomial((0, 0, 1.0))
    res = log_on_set(f, s)
    assert isinstance(res, Obstruction) and res.winding == 2
    assert winding_number(f, res.cycle) == 2


def test_disconnected_set_gets_independent_branches():
    sf = corpus_scene("comb_with_gaps")
    s = sf.grid()
    res = log_on_set(LinearFactor(20j), s)
    assert isinstance(res, LogGrid) and res.max_residual <= 1e-9


def test_branch_freedom():
    s = corpus_scene("strip").grid()
    f = Polynomial.from_roots([3j, -3j])
    base = log_on_set(f, s)
    first = np.flatnonzero(s.mask.ravel())[0]
    g0 = base.g.ravel()[first]
    for k in (-2, 1, 3):
        shifted = log_on_set(f, s, basepoint_log=g0 + 2j * np.pi * k)
        assert np.allclose(shifted.g[s.mask] - base.g[s.mask], 2j * np.pi * k, atol=1e-12)


def test_zero_on_set_is_error():
    s = corpus_scene("strip").grid()
    with pytest.raises(Exception) as exc:
        log_on_set(LinearFactor(s.points()[100]), s)
    assert getattr(exc.value, "exit_code", None) == 4


def small_cycles(s: GridSet):
    """All 2x2 blocks of marked cells as closed 4-cycles."""
    m = s.mask
    blk = m[:-1, :-1] & m[1:, :-1] & m[1:, 1:] & m[:-1, 1:]
    w = s.window
    out = []
    for i, j in np.argwhere(blk):
        pts = [w.center(i, j), w.center(i, j + 1), w.center(i + 1, j + 1), w.center(i + 1, j)]
        out.append(PolyPath(np.array(pts), closed=True))
    return out


def test_loggrid_implies_zero_winding_on_small_cycles():
    s = corpus_scene("broken_ring").grid(h=1 / 16)
    assert s.window.shape == (128, 128)
    # the central 64x64 patch is exactly the window [-2, 2]^2
    sub = GridSet(Window(-2, 2, -2, 2, 1 / 16), s.mask[32:96, 32:96])
    f = Polynomial.from_roots([0.1j, 2.9])
    res = log_on_set(f, sub)
    assert isinstance(res, LogGrid)
    ws = winding_many(f, small_cycles(sub))
    assert ws and all(r.winding == 0 for r in ws)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_obstruction_soundness_random(seed):
    rng = np.random.default_rng(seed)
    w = Window(-2, 2, -2, 2, 1 / 8)
    mask = rng.random(w.shape) < 0.72
    s = GridSet(w, mask)
    roots = rng.uniform(-2, 2, 2) + 1j * rng.uniform(-2, 2, 2)
    roots = roots + (w.h / 2) * (1 + 1j) * 0.37  # keep roots off cell centres
    f = Polynomial.from_roots(list(roots))
    try:
        res = log_on_set(f, s)
    except Exception as exc:  # zero too close to a centre
        assert getattr(exc, "exit_code", None) == 4
        return
    if isinstance(res, Obstruction):
        assert res.winding > 0
        assert winding_number(f, res.cycle) == res.winding
        assert all(p in s for p in res.cycle.points)
    else:
        assert res.max_residual <= 1e-9
        cycles = small_cycles(s)
        if cycles:
            assert all(r.winding == 0 for r in winding_many(f, cycles))


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_exponential_identity_on_paths(seed):
    rng = np.random.default_rng(seed)
    roots = list(rng.uniform(-1, 1, 3) + 1j * rng.uniform(-1, 1, 3))
    f = Product((Polynomial.from_roots(roots), ExpOf(LinearFactor(complex(*rng.normal(size=2))))))
    pts = 2.5 * np.exp(1j * np.sort(rng.uniform(0, 2 * np.pi, 12)))
    lp = log_on_path(f, PolyPath(pts, closed=True))
    vals = f.value(lp.z)
    assert np.max(np.abs(np.exp(lp.g) - vals) / np.abs(vals)) <= 1e-9
    assert np.all(np.abs(np.diff(lp.g.imag)) < np.pi / 2)


def test_weierstrass_product_direct_construction_checks():
    with pytest.raises(DomainError):
        WeierstrassProduct((0j,), (0,))
    with pytest.raises(DomainError):
        WeierstrassProduct((1 + 0j,), (0, 1))
