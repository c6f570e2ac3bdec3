import json
import math

import numpy as np
import pytest
from scipy import integrate

from diskmaps import (BlaschkeProduct, DomainError, EstimatorConfig, GridLevels,
                      MoebiusTransform, MonteCarloLevels, PowerRadialMap, RasterGrid, bound_sweep,
                      check_bound, count_components, moebius_monotonicity_check,
                      moebius_superlevel_closed_form, rasterize_sublevel, sharp_sublevel_bound,
                      sublevel_area_grid, sublevel_area_mc, superlevel_area)
from diskmaps.maps import random_blaschke

PI = math.pi

# Superlevel areas from 2-D quadrature of |g'(w)|^2 over t < |w| < 1 (scipy dblquad).
MOEBIUS_ORACLE = {
    (0.5, 0.5): 2.638937829015426,
    (0.9, 0.1): 3.140439940316333,
    (0.7, 0.9): 1.3219060961743776,
    (0.3, 0.3): 2.9036132420730167,
    (0.0, 0.5): 2.356194490192345,
}


def moebius_area_by_change_of_variables(a, t):
    def integrand(r, th):
        w = r * complex(math.cos(th), math.sin(th))
        return r * (1 - a * a) ** 2 / abs(1 - w * a) ** 4

    value, _ = integrate.dblquad(integrand, 0, 2 * PI, t, 1, epsabs=1e-12, epsrel=1e-12)
    return value


class TestClosedForms:
    @pytest.mark.parametrize("key", sorted(MOEBIUS_ORACLE))
    def test_moebius_against_frozen_oracle(self, key):
        assert moebius_superlevel_closed_form(*key) == pytest.approx(MOEBIUS_ORACLE[key], rel=1e-13)

    def test_moebius_live_oracle(self):
        assert moebius_superlevel_closed_form(0.45, 0.65) == pytest.approx(
            moebius_area_by_change_of_variables(0.45, 0.65), rel=1e-11)

    def test_moebius_examples(self):
        assert moebius_superlevel_closed_form(0, 0.5) == pytest.approx(0.75 * PI)
        assert moebius_superlevel_closed_form(0.77, 1.0) == 0.0
        assert moebius_superlevel_closed_form(0.5, 0.5) == pytest.approx(0.84 * PI, rel=1e-15)

    def test_moebius_domain(self):
        with pytest.raises(DomainError):
            moebius_superlevel_closed_form(1.0, 0.5)
        with pytest.raises(DomainError):
            moebius_superlevel_closed_form(0.5, 1.5)

    def test_monotonicity(self):
        assert moebius_monotonicity_check(0.5, [k / 10 for k in range(10)])
        assert moebius_monotonicity_check(0.0, [0.0, 0.3, 0.2, 0.9])
        assert moebius_monotonicity_check(0.9, [0, 0.5, 0.99])
        assert not moebius_monotonicity_check(0.5, [0.9, 0.1])

    def test_monotonicity_derivative_positive(self):
        # d/dr of the closed form: 4 pi r (1-r^2) t^2 (1-t^2) / (1 - r^2 t^2)^3
        t = 0.9
        h = 1e-6
        for r in (0.1, 0.5, 0.99):
            fd = (moebius_superlevel_closed_form(r + h, t) - moebius_superlevel_closed_form(r - h, t)) / (2 * h)
            exact = 4 * PI * r * (1 - r * r) * t * t * (1 - t * t) / (1 - r * r * t * t) ** 3
            assert fd == pytest.approx(exact, rel=1e-4, abs=1e-9)
            assert exact >= 0

    def test_sharp_bound(self):
        assert sharp_sublevel_bound(1.0, 3, 2.0) == PI
        assert sharp_sublevel_bound(1 / 8, 4, 1) == pytest.approx(PI / math.sqrt(8))
        assert sharp_sublevel_bound(0.25, 1, 2) == pytest.approx(PI / 4)
        assert sharp_sublevel_bound(0.0, 2, 1) == 0.0


class TestMonteCarlo:
    def test_level_zero(self, figure_map):
        est = sublevel_area_mc(figure_map, 0.0, 1000)
        assert est.value == 0.0 and est.stderr == 0.0

    def test_identity_quarter(self):
        est = sublevel_area_mc(BlaschkeProduct((0,)), 0.5, 10**6, seed=1)
        assert abs(est.value - PI / 4) <= 3 * est.stderr
        assert est.method == "monte_carlo" and est.samples == 10**6
        p = est.value / PI
        assert est.stderr == pytest.approx(PI * math.sqrt(p * (1 - p) / 10**6))

    def test_figure_map_below_bound(self, figure_map):
        est = sublevel_area_mc(figure_map, 1 / 8, 10**6, seed=3)
        assert sharp_sublevel_bound(1 / 8, 4) - est.value > 3 * est.stderr

    def test_domain(self, figure_map):
        with pytest.raises(DomainError):
            sublevel_area_mc(figure_map, 1.2, 10**4)
        with pytest.raises(DomainError):
            sublevel_area_mc(figure_map, 0.5, 999)

    def test_seed_determinism_independent_of_workers(self, figure_map):
        a = MonteCarloLevels(figure_map, 300_000, seed=11, workers=1, chunk_size=2**15)
        b = MonteCarloLevels(figure_map, 300_000, seed=11, workers=4, chunk_size=2**15)
        assert np.array_equal(a.moduli, b.moduli)
        assert a.sublevel(0.3) == b.sublevel(0.3)

    def test_different_seeds_differ(self, figure_map):
        a = MonteCarloLevels(figure_map, 10**4, seed=1)
        b = MonteCarloLevels(figure_map, 10**4, seed=2)
        assert not np.array_equal(a.moduli, b.moduli)

    def test_complement_identity(self, figure_map):
        s = MonteCarloLevels(figure_map, 10**5, seed=5)
        for t in (0.1, 0.37, 0.5, 0.93):
            sub, sup = s.sublevel(t), s.superlevel(t)
            assert sub.value + sup.value == pytest.approx(PI, abs=4e-16)
            assert sub.stderr == sup.stderr

    def test_nonincreasing_superlevel(self, rng):
        B = random_blaschke(rng, 4)
        s = MonteCarloLevels(B, 10**5, seed=2)
        values = [s.superlevel(t).value for t in np.linspace(0, 1, 41)]
        assert all(x >= y for x, y in zip(values, values[1:]))

    @pytest.mark.parametrize("a,t", [(0.3, 0.7), (0.9, 0.3), (0.5, 0.5), (0.0, 0.1)])
    def test_moebius_oracle(self, a, t):
        est = superlevel_area(MoebiusTransform(a * np.exp(1.3j)), t, n=10**6, seed=8)
        assert abs(est.value - moebius_superlevel_closed_form(a, t)) <= 3 * est.stderr

    def test_to_dict_keys(self):
        est = sublevel_area_mc(BlaschkeProduct((0,)), 0.5, 10**4)
        assert set(est.to_dict()) == {"value", "stderr", "method", "samples"}
        json.dumps(est.to_dict())


class TestGrid:
    def test_identity(self):
        est = sublevel_area_grid(BlaschkeProduct((0,)), 0.5, 2048)
        assert est.value == pytest.approx(PI / 4, rel=2e-3)
        lo, hi = est.bracket
        assert lo <= est.value <= hi and lo <= PI / 4 <= hi

    def test_equality_family(self):
        est = sublevel_area_grid(PowerRadialMap(1, 2), 0.25, 2048)
        assert est.value == pytest.approx(PI / 4, rel=2e-3)

    def test_moebius_sublevel(self):
        est = sublevel_area_grid(MoebiusTransform(0.5), 0.5, 2048)
        assert est.value == pytest.approx(0.16 * PI, rel=5e-3)
        assert est.bracket[0] <= 0.16 * PI <= est.bracket[1]

    def test_exact_endpoints(self, figure_map):
        g = GridLevels(figure_map, 64)
        assert g.sublevel(0.0).value == 0.0
        assert g.sublevel(1.0).value == PI
        assert g.superlevel(0.0).value == PI

    def test_resolution_minimum(self, figure_map):
        with pytest.raises(DomainError):
            sublevel_area_grid(figure_map, 0.5, 32)

    @pytest.mark.parametrize("K,d", [(1.0, 1), (2.0, 1), (1.0, 3), (1.5, 2)])
    def test_equality_family_relative_error(self, K, d):
        g = GridLevels(PowerRadialMap(d, K), 1024)
        for t in np.arange(1, 10) / 10:
            bound = sharp_sublevel_bound(t, d, K)
            assert abs(g.sublevel(t).value - bound) / bound <= 4 / 1024

    def test_bracket_contains_closed_form(self):
        g = GridLevels(MoebiusTransform(0.7j), 512)
        for t in (0.1, 0.5, 0.9):
            est = g.superlevel(t)
            lo, hi = est.bracket
            assert lo <= est.value <= hi
            assert lo <= moebius_superlevel_closed_form(0.7, t) <= hi

    def test_grid_and_mc_agree(self, figure_map):
        g = sublevel_area_grid(figure_map, 0.3, 1024)
        m = sublevel_area_mc(figure_map, 0.3, 10**6, seed=4)
        assert abs(g.value - m.value) <= 3 * m.stderr + (g.bracket[1] - g.bracket[0])


class TestBoundChecks:
    def test_equality_case(self):
        rep = check_bound(BlaschkeProduct.monomial(4), 1 / 8, EstimatorConfig(n=10**6, seed=1))
        assert rep.verdict == "holds_within_error"
        assert rep.measured_sublevel.value == pytest.approx(PI / math.sqrt(8), abs=0.01)

    def test_figure_map_strict(self, figure_map):
        rep = check_bound(figure_map, 1 / 8, EstimatorConfig(n=10**6, seed=1))
        assert rep.verdict == "holds" and rep.margin > 0
        assert rep.d == 4 and rep.K == 1.0

    def test_moebius_margin(self):
        rep = check_bound(MoebiusTransform(0.5), 0.5, EstimatorConfig(n=10**6, seed=1))
        assert rep.verdict == "holds"
        assert rep.sharp_bound - (PI - moebius_superlevel_closed_form(0.5, 0.5)) == pytest.approx(0.09 * PI)
        assert abs(rep.margin - 0.09 * PI) <= 3 * rep.measured_sublevel.stderr

    def test_grid_verdict(self):
        rep = check_bound(BlaschkeProduct.monomial(2), 0.5, EstimatorConfig("grid", resolution=512))
        assert rep.verdict == "holds_within_error"

    def test_violation_detected(self):
        class Liar(PowerRadialMap):
            # claims a smaller K than its true dilatation
            @property
            def boundary_K(self):
                return 1.0

        rep = check_bound(Liar(1, 3.0), 0.5, EstimatorConfig(n=10**5, seed=1))
        assert rep.verdict == "violated"

    def test_degree_from_winding(self, figure_map):
        class NoHint(BlaschkeProduct):
            @property
            def degree_hint(self):
                return None

        rep = check_bound(NoHint(figure_map.zeros), 0.5, EstimatorConfig(n=10**4))
        assert rep.d == 4

    def test_random_products_never_violate(self, rng):
        ts = np.arange(1, 10) / 10
        for _ in range(10):
            B = random_blaschke(rng, int(rng.integers(1, 7)))
            for rep in bound_sweep(B, ts, EstimatorConfig(n=2 * 10**5, seed=9)):
                assert rep.verdict != "violated"

    def test_csv_row_and_dict(self, figure_map):
        rep = check_bound(figure_map, 0.5, EstimatorConfig(n=10**4))
        assert len(rep.csv_row()) == len(rep.CSV_HEADER)
        d = rep.to_dict()
        assert set(d) == {"t", "d", "K", "measured_sublevel", "sharp_bound", "margin", "verdict"}


class TestRaster:
    def test_monomial_disk(self):
        grid = rasterize_sublevel(BlaschkeProduct.monomial(4), 1 / 8, 512)
        c = -1 + (np.arange(512) + 0.5) * 2 / 512
        r = np.hypot(c[None, :], c[::-1, None])
        assert np.array_equal(grid.mask, r < (1 / 8) ** 0.25)
        assert count_components(grid) == 1

    def test_figure_three_blobs(self, figure_map):
        grid = rasterize_sublevel(figure_map, 1 / 18, 1024)
        assert count_components(grid) == 4
        n = 1024
        c = -1 + (np.arange(n) + 0.5) * 2 / n
        # each zero lies inside a set pixel region
        for z in (0.5, -0.5, 0.5j, -0.5j):
            i = int(np.argmin(abs(c[::-1] - complex(z).imag)))
            j = int(np.argmin(abs(c - complex(z).real)))
            assert grid.mask[i, j]

    def test_figure_two_single_domain(self, figure_map):
        assert count_components(rasterize_sublevel(figure_map, 1 / 8, 1024)) == 1

    def test_empty(self, figure_map):
        grid = rasterize_sublevel(figure_map, 0.0, 64)
        assert not grid.mask.any() and count_components(grid) == 0

    def test_outside_disk_clear(self):
        grid = rasterize_sublevel(BlaschkeProduct((0,)), 1.0, 128)
        c = -1 + (np.arange(128) + 0.5) * 2 / 128
        outside = np.hypot(c[None, :], c[::-1, None]) >= 1
        assert not grid.mask[outside].any()

    def test_four_connectivity(self):
        mask = np.zeros((64, 64), bool)
        mask[10, 10] = mask[11, 11] = True
        assert count_components(RasterGrid(64, mask)) == 2

    def test_raster_matches_grid_value(self, figure_map):
        grid = rasterize_sublevel(figure_map, 0.4, 256)
        assert grid.area() == pytest.approx(sublevel_area_grid(figure_map, 0.4, 256).value)
