"""Charts, frames, curvature identities and quadrature."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from msk.errors import DomainError, ImmersionError, IntegrationError, ValidationError
from msk.functionals import make_potential
from msk.geometry import (
    EllipsoidChart,
    FiniteDifferenceChart,
    GraphChart,
    PerturbedSphereChart,
    QuadraticAmbient,
    ScalarField,
    SphereChart,
    check_gradient,
    codazzi_residual,
    covariant_hessian,
    div_newton_residual,
    ellipsoid_patch_chart,
    frame_at,
    gauss_residual,
    integrate,
    jet_at,
    kconvexity_scan,
    make_grid,
    make_surface,
    paraboloid_chart,
    restriction_hessian_residual,
    riemann,
    saddle_chart,
)
from msk.geometry.identities import div_newton_terms, restriction_hessian_terms
from msk.symcalc import sigma_matrix

CATALOG = ["sphere:r=1:n=2", "sphere:r=2:n=3", "ellipsoid:1,1.3,0.8", "ellipsoid:1,1.3,0.8,1.1",
           "ellipsoid-patch:1,1.3,0.8", "paraboloid-patch:n=2", "paraboloid-patch:n=3",
           "perturbed-sphere:0.05:n=2", "perturbed-sphere:0.05:n=3"]


def charts():
    return [make_surface(sid) for sid in CATALOG]


def flat_chart(n=2):
    return GraphChart("flat", n, h=lambda u: np.zeros(u.shape[:-1]), grad=lambda u: np.zeros(u.shape),
                      hess=lambda u: np.zeros(u.shape + (n,)), third=lambda u: np.zeros(u.shape + (n, n)))


def sphere_area(n, r=1.0):
    return 2.0 * math.pi ** ((n + 1) / 2) / math.gamma((n + 1) / 2) * r**n


# ---------------------------------------------------------------- charts

@pytest.mark.parametrize("sid", CATALOG)
def test_chart_derivatives_match_central_differences(sid):
    """d1 against central differences of embed; halving h cuts the error by about 4."""
    chart = make_surface(sid)
    pts = chart.random_points(10, seed=1)
    errs = []
    for h in (1e-3, 5e-4):
        fd = np.stack([(chart.embed(pts + h * e) - chart.embed(pts - h * e)) / (2 * h) for e in np.eye(chart.n)],
                      axis=-1)
        errs.append(float(np.max(np.abs(fd - chart.d1(pts)))))
        fd2 = np.stack([(chart.d1(pts + h * e) - chart.d1(pts - h * e)) / (2 * h) for e in np.eye(chart.n)],
                       axis=-1)
        assert np.max(np.abs(fd2 - chart.d2(pts))) < 1e-4
        fd3 = np.stack([(chart.d2(pts + h * e) - chart.d2(pts - h * e)) / (2 * h) for e in np.eye(chart.n)],
                       axis=-1)
        assert np.max(np.abs(fd3 - chart.d3(pts))) < 1e-4
    assert errs[0] < 1e-5
    assert errs[1] < errs[0] / 3.0 or errs[1] < 1e-11


def test_catalog_rejects_unknown():
    with pytest.raises(ValidationError):
        make_surface("torus")


def test_immersion_error_at_pole():
    with pytest.raises(ImmersionError):
        frame_at(SphereChart(1.0, 2), np.array([0.0, 0.3]))


# ---------------------------------------------------------------- frames

@pytest.mark.parametrize("n", [2, 3, 4])
def test_unit_sphere_L_is_identity(n):
    chart = SphereChart(1.0, n)
    fp = frame_at(chart, chart.random_points(20, seed=n))
    assert np.max(np.abs(fp.L - np.eye(n))) <= 1e-10


def test_sphere_radius_two():
    chart = SphereChart(2.0, 2)
    fp = frame_at(chart, np.array([0.7, 1.9]))
    assert np.allclose(fp.L, 0.5 * np.eye(2), atol=1e-12)
    assert sigma_matrix(fp.L, 1) == pytest.approx(1.0, abs=1e-12)
    assert sigma_matrix(fp.L, 2) == pytest.approx(0.25, abs=1e-12)


@pytest.mark.parametrize("n", [2, 3])
def test_paraboloid_apex(n):
    fp = frame_at(paraboloid_chart(n), np.zeros(n))
    assert np.allclose(fp.L, np.eye(n), atol=1e-14)
    assert np.allclose(fp.g, np.eye(n), atol=1e-14)


@pytest.mark.parametrize("chart", charts(), ids=CATALOG)
def test_frame_invariants(chart):
    fp = frame_at(chart, chart.random_points(25, seed=3))
    n = chart.n
    F = fp.frame
    assert np.max(np.abs(np.einsum("...ca,...cb->...ab", F, F) - np.eye(n))) <= 1e-12
    assert np.max(np.abs(np.einsum("...ca,...c->...a", F, fp.normal))) <= 1e-12
    assert np.max(np.abs(fp.L - np.swapaxes(fp.L, -1, -2))) == 0.0
    assert np.all(fp.area > 0)


def test_inner_normal_points_inward():
    for sid in ("sphere:r=2:n=3", "ellipsoid:1,1.3,0.8,1.1", "perturbed-sphere:0.05:n=2"):
        chart = make_surface(sid)
        fp = frame_at(chart, chart.random_points(10, seed=0))
        assert np.all(np.einsum("...c,...c->...", fp.normal, -fp.x) > 0)


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(CATALOG), st.integers(0, 2**31 - 1), st.data())
def test_sigma_of_L_independent_of_gram_schmidt_order(sid, seed, data):
    chart = make_surface(sid)
    u = chart.random_points(1, seed=seed)[0]
    perm = data.draw(st.permutations(range(chart.n)))
    L0 = frame_at(chart, u).L
    L1 = frame_at(chart, u, order=list(perm)).L
    for k in range(1, chart.n + 1):
        assert abs(sigma_matrix(L0, k) - sigma_matrix(L1, k)) <= 1e-10


@settings(max_examples=30, deadline=None)
@given(st.floats(0.2, 5.0), st.integers(2, 4), st.integers(0, 2**31 - 1))
def test_dilation_scaling_law(r, n, seed):
    base = SphereChart(1.0, n)
    big = SphereChart(r, n)
    u = base.random_points(3, seed=seed)
    L1, Lr = frame_at(base, u).L, frame_at(big, u).L
    assert np.max(np.abs(Lr - L1 / r)) <= 1e-10
    for k in range(1, n + 1):
        assert np.max(np.abs(sigma_matrix(Lr, k) - r ** (-k) * sigma_matrix(L1, k))) <= 1e-10


def test_ellipsoid_dilation_scaling_law():
    axes = np.array([1.0, 1.3, 0.8])
    u = np.array([[0.9, 2.1], [1.7, 4.0]])
    L1 = frame_at(EllipsoidChart(axes), u).L
    L3 = frame_at(EllipsoidChart(3.0 * axes), u).L
    assert np.max(np.abs(L3 - L1 / 3.0)) <= 1e-12


# ---------------------------------------------------------------- covariant Hessian

def test_covariant_hessian_constant_is_zero():
    chart = make_surface("ellipsoid:1,1.3,0.8")
    f = ScalarField(lambda u: np.ones(u.shape[:-1]), lambda u: np.zeros(u.shape), lambda u: np.zeros(u.shape + (2,)))
    assert np.max(np.abs(covariant_hessian(chart, f, np.array([0.8, 1.1])))) == 0.0


def test_covariant_hessian_flat_quadratic():
    chart = flat_chart(3)
    f = ScalarField(lambda u: 0.5 * np.sum(u * u, -1), lambda u: u, lambda u: np.broadcast_to(np.eye(3), u.shape + (3,)))
    assert np.allclose(covariant_hessian(chart, f, np.array([0.1, -0.3, 0.2])), np.eye(3), atol=1e-14)


def test_covariant_hessian_linear_on_sphere_is_bL():
    chart = SphereChart(1.0, 2)
    a = np.array([0.3, -0.5, 0.7])
    f = ScalarField(lambda u: chart.embed(u) @ a,
                    lambda u: np.einsum("...ci,c->...i", chart.d1(u), a),
                    lambda u: np.einsum("...cij,c->...ij", chart.d2(u), a))
    for u in chart.random_points(5, seed=2):
        fp = frame_at(chart, u)
        b = float(fp.normal @ a)
        assert np.max(np.abs(covariant_hessian(chart, f, u) - b * fp.L)) <= 1e-10


def test_covariant_hessian_requires_callbacks():
    with pytest.raises(ValidationError):
        covariant_hessian(SphereChart(1.0, 2), ScalarField(lambda u: u[..., 0]), np.array([1.0, 1.0]))


def test_check_gradient():
    f = ScalarField(lambda u: np.sin(u[..., 0]) * u[..., 1], lambda u: np.stack(
        [np.cos(u[..., 0]) * u[..., 1], np.sin(u[..., 0])], -1))
    assert check_gradient(f, np.random.default_rng(0).uniform(-1, 1, (10, 2))) < 1e-9


# ---------------------------------------------------------------- restriction formula

POTENTIAL_IDS = ["linear", "zero", "smoothdist", "lse", "quadratic"]


@pytest.mark.parametrize("pid", POTENTIAL_IDS)
@pytest.mark.parametrize("chart", charts(), ids=CATALOG)
def test_restriction_hessian_catalog(chart, pid):
    pot = make_potential(pid, chart.n + 1)
    for u in chart.random_points(4, seed=5):
        assert restriction_hessian_residual(chart, pot, u) <= 1e-8


def test_restriction_linear_is_tight():
    chart = make_surface("ellipsoid:1,1.3,0.8")
    pot = make_potential("linear", 3)
    assert max(restriction_hessian_residual(chart, pot, u) for u in chart.random_points(5, seed=0)) <= 1e-10


def test_quadratic_on_unit_sphere_has_zero_hessian():
    chart = SphereChart(1.0, 3)
    for u in chart.random_points(5, seed=4):
        lhs, tan, b, L = restriction_hessian_terms(chart, QuadraticAmbient(), u)
        assert np.max(np.abs(lhs)) <= 1e-10
        assert b == pytest.approx(-1.0, abs=1e-12)
        assert np.max(np.abs(tan + b * L)) <= 1e-10


# ---------------------------------------------------------------- Gauss and Codazzi

@pytest.mark.parametrize("chart", charts(), ids=CATALOG)
def test_gauss_codazzi_analytic(chart):
    pts = chart.random_points(6, seed=7)
    assert codazzi_residual(chart, pts) <= 1e-8
    assert gauss_residual(chart, pts) <= 1e-8


def test_gauss_on_spheres_in_frame():
    for r, K in ((1.0, 1.0), (2.0, 0.25)):
        jet = jet_at(SphereChart(r, 2), np.array([1.1, 0.4]))
        R = riemann(jet)
        R1212 = np.einsum("ia,jb,kc,ld,ijkl->abcd", jet.P, jet.P, jet.P, jet.P, R)[0, 1, 0, 1]
        assert R1212 == pytest.approx(K, abs=1e-10)
        assert R1212 == pytest.approx(jet.L[0, 0] * jet.L[1, 1] - jet.L[0, 1] ** 2, abs=1e-10)


def fd_ratios(residual, chart, u, steps):
    vals = [residual(FiniteDifferenceChart(chart, h), u) for h in steps]
    return vals, [vals[i] / vals[i + 1] for i in range(len(vals) - 1)]


@pytest.mark.parametrize("residual", [codazzi_residual, gauss_residual], ids=["codazzi", "gauss"])
def test_finite_difference_fallback_is_second_order(residual):
    chart = ellipsoid_patch_chart()
    u = np.array([[0.2, -0.1], [0.3, 0.25]])
    vals, ratios = fd_ratios(residual, chart, u, [0.04, 0.02, 0.01])
    assert all(3.5 <= q <= 4.5 for q in ratios), (vals, ratios)


def test_finite_difference_chart_hides_d3():
    fdc = FiniteDifferenceChart(make_surface("sphere"), 1e-3)
    assert not fdc.analytic_d3
    assert codazzi_residual(fdc, np.array([[1.0, 2.0]])) <= 1e-6


# ---------------------------------------------------------------- Newton divergence

DIV_CHARTS = ["sphere:r=1:n=3", "ellipsoid:1,1.3,0.8,1.1", "paraboloid-patch:n=3", "perturbed-sphere:0.05:n=3"]


@pytest.mark.parametrize("sid", DIV_CHARTS)
def test_newton_tensor_divergence_free(sid):
    chart = make_surface(sid)
    pts = chart.random_points(4, seed=8)
    for k in range(1, chart.n):
        assert np.max(div_newton_residual(chart, pts, k, 0)) <= 1e-7


def test_divergence_on_unit_sphere_is_tiny():
    chart = SphereChart(1.0, 3)
    assert np.max(div_newton_residual(chart, chart.random_points(4, seed=0), 2, 0)) <= 1e-10


@pytest.mark.parametrize("sid", DIV_CHARTS)
@pytest.mark.parametrize("pid", ["linear", "smoothdist"])
def test_divergence_with_hessian_slots(sid, pid):
    chart = make_surface(sid)
    pot = make_potential(pid, chart.n + 1)
    pts = chart.random_points(4, seed=9)
    for k in range(2, chart.n):
        for m in range(1, k):
            assert np.max(div_newton_residual(chart, pts, k, m, pot)) <= 1e-7


def test_literal_unit_coefficient_fails_where_minus_m_holds():
    """The divergence with m Hessian slots equals -m times the contracted term, not +1 times it."""
    chart = make_surface("ellipsoid:1,1.3,0.8,1.1,0.9")
    pot = make_potential("smoothdist", 5)
    pts = chart.random_points(3, seed=10)
    for k, m in ((2, 1), (3, 1), (3, 2)):
        lhs, unit = div_newton_terms(chart, pts, k, m, pot)
        assert np.max(np.abs(unit)) > 1e-3
        assert np.max(div_newton_residual(chart, pts, k, m, pot)) <= 1e-7
        assert np.max(div_newton_residual(chart, pts, k, m, pot, coefficient=1.0)) > 1e-3
        ratio = np.sum(lhs * unit) / np.sum(unit * unit)
        assert ratio == pytest.approx(-m, abs=1e-8)


def test_divergence_domain_errors():
    chart = SphereChart(1.0, 3)
    u = np.array([1.0, 1.0, 1.0])
    with pytest.raises(DomainError):
        div_newton_residual(chart, u, 2, 2, make_potential("linear", 4))
    with pytest.raises(DomainError):
        div_newton_residual(chart, u, 3, 0)
    with pytest.raises(ValidationError):
        div_newton_residual(chart, u, 2, 1)


# ---------------------------------------------------------------- quadrature

def test_grid_weights_sum_to_box_volume():
    for sid in CATALOG:
        chart = make_surface(sid)
        grid = make_grid(chart, (7,) * chart.n)
        assert abs(math.fsum(grid.weights) - chart.volume) <= 1e-12 * chart.volume
        assert np.all(grid.weights > 0)


def test_sphere_area_and_curvature_integrals():
    chart = SphereChart(1.0, 2)
    grid = make_grid(chart, (200, 400))
    one = integrate(chart, grid, lambda fp: np.ones(fp.batch_shape))
    s1 = integrate(chart, grid, lambda fp: sigma_matrix(fp.L, 1))
    assert one == pytest.approx(4 * math.pi, rel=1e-6)
    assert s1 == pytest.approx(8 * math.pi, rel=1e-6)
    for r in (0.5, 2.0):
        c = SphereChart(r, 2)
        assert integrate(c, grid, lambda fp: sigma_matrix(fp.L, 2)) == pytest.approx(4 * math.pi, rel=1e-6)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_sphere_area_converges_at_least_quadratically(n):
    chart = SphereChart(1.0, n)
    exact = sphere_area(n)
    errs = []
    for m in (4, 8, 16):
        counts = (m,) * (n - 1) + (2 * m,)
        errs.append(abs(integrate(chart, make_grid(chart, counts), lambda fp: np.ones(fp.batch_shape)) - exact))
    for e0, e1 in zip(errs, errs[1:]):
        assert e1 <= e0 / 4.0 or e1 <= 1e-12 * exact


def test_integration_reports_bad_node():
    chart = SphereChart(1.0, 2)
    grid = make_grid(chart, (4, 8))

    def bad(fp):
        out = np.ones(fp.batch_shape)
        out[5] = np.nan
        return out

    with pytest.raises(IntegrationError, match="node 5"):
        integrate(chart, grid, bad)


def test_integration_chunk_invariance():
    chart = make_surface("ellipsoid:1,1.3,0.8")
    grid = make_grid(chart, (20, 40))
    f = lambda fp: sigma_matrix(fp.L, 2)  # noqa: E731
    assert integrate(chart, grid, f, chunk=37) == integrate(chart, grid, f, chunk=100000)


# ---------------------------------------------------------------- k-convexity

def test_kconvexity_sphere_margins():
    chart = SphereChart(1.0, 3)
    scan = kconvexity_scan(chart, make_grid(chart, (6, 6, 12)), 2)
    assert scan.passed
    # L = I: margins are C(3, j), smallest is sigma_3 = 1
    assert scan.worst_margin == pytest.approx(1.0, abs=1e-10)


def test_kconvexity_rejects_saddle_and_accepts_ellipsoid():
    saddle = saddle_chart()
    passed, margin = kconvexity_scan(saddle, make_grid(saddle, (20, 20)), 2)
    assert not passed and margin < 0
    ell = make_surface("ellipsoid:1,1.3,0.8")
    passed, margin = kconvexity_scan(ell, make_grid(ell, (20, 40)), 2)
    assert passed and margin > 0


def test_perturbed_sphere_is_convex_for_small_eps():
    chart = PerturbedSphereChart(0.05, 2)
    assert kconvexity_scan(chart, make_grid(chart, (20, 40)), 2).passed
