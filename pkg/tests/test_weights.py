"""Analytic extension, closed/Laurent forms, Muckenhoupt, Riesz projection."""

import numpy as np
import pytest
import scipy.integrate

import toepforms
from toepforms import weights
from toepforms.errors import GridResolutionError, InvalidMeasureError

from conftest import random_trig_density


class TestAnalyticExtension:
    def test_basis_vectors(self):
        ext0 = toepforms.analytic_extension_eval(np.array([1.0]), 1.0, 64)
        np.testing.assert_allclose(ext0.values, np.ones(64), atol=1e-14)
        ext1 = toepforms.analytic_extension_eval(np.array([0.0, 1.0]), 1.0, 64)
        np.testing.assert_allclose(ext1.values, np.exp(1j * ext1.thetas), atol=1e-13)

    def test_matches_horner_oracle(self, rng):
        g = rng.standard_normal(17) + 1j * rng.standard_normal(17)
        for r in (1.0, 0.5):
            ext = toepforms.analytic_extension_eval(g, r, 128)
            z = r * np.exp(1j * ext.thetas)
            want = np.polyval(g[::-1], z)
            np.testing.assert_allclose(ext.values, want, rtol=1e-12, atol=1e-12)

    def test_radius_validation(self):
        with pytest.raises(ValueError):
            toepforms.analytic_extension_eval(np.ones(4), 0.0, 64)
        with pytest.raises(ValueError):
            toepforms.analytic_extension_eval(np.ones(4), 1.5, 64)
        with pytest.raises(GridResolutionError):
            toepforms.analytic_extension_eval(np.ones(40), 1.0, 64)


class TestClosedForm:
    def test_parseval(self, rng):
        for _ in range(5):
            g = rng.standard_normal(12) + 1j * rng.standard_normal(12)
            value = toepforms.closed_form_eval(toepforms.BuiltinDensity("lebesgue"), g)
            assert value == pytest.approx(float(np.real(np.vdot(g, g))), rel=1e-10)

    def test_two_plus_two_cos_basis(self):
        density = toepforms.BuiltinDensity("2+2cos")
        value = toepforms.closed_form_eval(density, np.array([1.0]), 1.0)
        assert value == pytest.approx(2.0, abs=1e-12)

    def test_extends_quadratic_form(self, rng):
        for _ in range(5):
            density = random_trig_density(rng)
            g = rng.standard_normal(20) + 1j * rng.standard_normal(20)
            closed = toepforms.closed_form_eval(density, g, 1.0)
            measure = toepforms.CircleMeasure(ac=density)
            table = toepforms.coefficient_table(measure, g.size - 1)
            direct = toepforms.quadratic_form_direct(table, g)
            assert closed == pytest.approx(direct, rel=1e-8)

    def test_extends_quadratic_form_for_grid_density(self, rng):
        # grid-sampled densities integrate on their own nodes, so the closed
        # form and the coefficient route share one discrete measure
        samples = 1.5 + np.sin(2.0 * np.pi * np.arange(256) / 256)
        density = toepforms.GridDensity(tuple(samples))
        g = rng.standard_normal(12) + 1j * rng.standard_normal(12)
        closed = toepforms.closed_form_eval(density, g, 1.0)
        table = toepforms.coefficient_table(
            toepforms.CircleMeasure(ac=density), g.size - 1)
        direct = toepforms.quadratic_form_direct(table, g)
        assert closed == pytest.approx(direct, rel=1e-10)

    def test_form_identity_with_atoms(self, rng):
        # t[g, g] = integral |A g|^2 dM: density part by quadrature, point
        # masses as |A g|^2 at the atom
        density = random_trig_density(rng)
        atoms = (toepforms.Atom(0.9, 0.5), toepforms.Atom(4.0, 1.25))
        measure = toepforms.CircleMeasure(ac=density, atoms=atoms)
        g = rng.standard_normal(15) + 1j * rng.standard_normal(15)
        table = toepforms.coefficient_table(measure, g.size - 1)
        direct = toepforms.quadratic_form_direct(table, g)
        integral = toepforms.closed_form_eval(density, g, 1.0)
        for atom in atoms:
            value = np.polyval(g[::-1], np.exp(1j * atom.angle))
            integral += atom.mass * abs(value) ** 2
        assert direct == pytest.approx(integral, rel=1e-8)

    def test_radial_value_matches_double_sum(self, rng):
        # integral |A g(r z)|^2 w dm = sum t_{n-m} g_m conj(g_n) r^{n+m}
        density = random_trig_density(rng, degree=3)
        g = rng.standard_normal(6) + 1j * rng.standard_normal(6)
        table = toepforms.coefficient_table(
            toepforms.CircleMeasure(ac=density), g.size - 1)
        for r in (0.3, 0.75, 0.99):
            want = sum(
                table.at(n - m) * g[m] * np.conj(g[n]) * r ** (n + m)
                for n in range(g.size)
                for m in range(g.size)
            )
            got = toepforms.closed_form_eval(density, g, r)
            assert got == pytest.approx(want.real, rel=1e-10)

    def test_radial_monotone_for_lebesgue(self, rng):
        g = rng.standard_normal(10) + 1j * rng.standard_normal(10)
        ladder = toepforms.radial_ladder(toepforms.BuiltinDensity("lebesgue"), g, depth=6)
        values = [v for _, v in ladder]
        assert all(b >= a - 1e-12 for a, b in zip(values, values[1:]))
        assert ladder[-1][0] == 1.0

    def test_negative_weight_rejected(self, rng):
        g = np.ones(4)
        with pytest.raises(InvalidMeasureError):
            toepforms.closed_form_eval(np.full(64, -1.0), g)


class TestLaurentForm:
    def test_unitary_on_lebesgue(self, rng):
        density = toepforms.BuiltinDensity("lebesgue")
        g = rng.standard_normal(9) + 1j * rng.standard_normal(9)
        value = toepforms.laurent_form_eval(density, g, offset=-4)
        assert value == pytest.approx(float(np.real(np.vdot(g, g))), rel=1e-12)

    def test_bilateral_double_sum_oracle(self):
        # support {-1, 0} against t_0 = 2, t_{+-1} = 1
        density = toepforms.BuiltinDensity("2+2cos")
        g = np.array([0.7 - 0.2j, -0.4 + 1.1j])
        value = toepforms.laurent_form_eval(density, g, offset=-1)
        t = {0: 2.0, 1: 1.0, -1: 1.0}
        want = sum(
            t.get(n - m, 0.0) * g[m] * np.conj(g[n])
            for n in range(2)
            for m in range(2)
        )
        assert value == pytest.approx(want.real, rel=1e-12)

    def test_translation_invariance(self, rng):
        density = random_trig_density(rng)
        g = rng.standard_normal(7) + 1j * rng.standard_normal(7)
        base = toepforms.laurent_form_eval(density, g, offset=0)
        for offset in (5, -9, 123):
            again = toepforms.laurent_form_eval(density, g, offset=offset)
            assert again == pytest.approx(base, rel=1e-12)


def power_density(alpha):
    return toepforms.BuiltinDensity("power", alpha=alpha)


class TestMuckenhoupt:
    def test_unit_weight_exact(self):
        report = toepforms.muckenhoupt_estimate(np.ones(1024), 6)
        assert report.estimates == [1.0] * 7
        assert report.verdict == "bounded"

    def test_cauchy_schwarz_floor(self, rng):
        density = random_trig_density(rng)
        shifted = toepforms.FourierDensity(
            (density.coeffs[0] + 1.0,) + density.coeffs[1:]
        )
        report = toepforms.muckenhoupt_estimate(shifted, 6, grid=4096)
        assert all(e >= 1.0 - 1e-12 for e in report.estimates)

    def test_a2_power_weight_bounded(self):
        report = toepforms.muckenhoupt_estimate(power_density(0.5), 8, grid=2**14)
        assert report.verdict == "bounded"
        # continuum arc oracle: estimates sit near 1/(1 - alpha^2) = 4/3
        for estimate in report.estimates[:7]:
            assert estimate == pytest.approx(4.0 / 3.0, rel=0.05)

    def test_arc_integral_oracle(self):
        # independent adaptive-quadrature oracle for one singular arc
        alpha = 0.5
        length = 2.0 * np.pi / 2**4

        def w(theta):
            return (abs(theta) / np.pi) ** alpha

        int_w, _ = scipy.integrate.quad(w, 0, length)
        int_winv, _ = scipy.integrate.quad(lambda t: 1.0 / w(t), 0, length)
        oracle = (int_w / length) * (int_winv / length)
        report = toepforms.muckenhoupt_estimate(power_density(alpha), 4, grid=2**14)
        assert report.estimates[4] == pytest.approx(oracle, rel=0.03)

    def test_non_a2_power_weight_diverges(self):
        report = toepforms.muckenhoupt_estimate(power_density(1.5), 8, grid=2**14)
        assert report.verdict == "diverging"
        for ratio in report.ratios[-3:]:
            assert 1.2 <= ratio <= 1.6

    def test_scale_invariance(self):
        base = toepforms.muckenhoupt_estimate(power_density(0.5), 5, grid=4096)
        doubled = weights.weight_samples(power_density(0.5), 4096) * 2.0
        report2 = toepforms.muckenhoupt_estimate(doubled, 5)
        assert report2.estimates == base.estimates  # powers of two scale exactly
        tripled = weights.weight_samples(power_density(0.5), 4096) * 3.0
        report3 = toepforms.muckenhoupt_estimate(tripled, 5)
        np.testing.assert_allclose(report3.estimates, base.estimates, rtol=1e-12)

    def test_positivity_required(self):
        samples = np.ones(512)
        samples[17] = 0.0
        with pytest.raises(InvalidMeasureError):
            toepforms.muckenhoupt_estimate(samples, 4)

    def test_levels_capped_by_grid(self):
        with pytest.raises(GridResolutionError):
            toepforms.muckenhoupt_estimate(np.ones(256), 7)

    def test_concurrent_scans_match_serial(self):
        from concurrent.futures import ThreadPoolExecutor

        weights_list = [power_density(a) for a in (0.25, 0.5, 0.75, -0.25)]
        serial = [toepforms.muckenhoupt_estimate(w, 5, grid=2048).estimates
                  for w in weights_list]
        with ThreadPoolExecutor(max_workers=4) as pool:
            threaded = list(pool.map(
                lambda w: toepforms.muckenhoupt_estimate(w, 5, grid=2048).estimates,
                weights_list))
        assert serial == threaded


class TestRieszProjection:
    def test_drops_conjugate_mode(self):
        thetas = toepforms.midpoint_nodes(128)
        projection = toepforms.riesz_project(2.0 * np.cos(thetas))
        np.testing.assert_allclose(projection.values, np.exp(1j * thetas), atol=1e-13)

    def test_constant_unchanged(self):
        projection = toepforms.riesz_project(np.full(64, 3.5))
        np.testing.assert_allclose(projection.values, np.full(64, 3.5), atol=1e-14)

    def test_idempotent_exactly(self, rng):
        f = rng.standard_normal(256) + 1j * rng.standard_normal(256)
        once = toepforms.riesz_project(f)
        twice = toepforms.riesz_project(once)
        np.testing.assert_array_equal(twice.values, once.values)
        np.testing.assert_array_equal(twice.spectrum, once.spectrum)

    def test_unweighted_contraction(self, rng):
        for _ in range(20):
            f = rng.standard_normal(128) + 1j * rng.standard_normal(128)
            ratio = toepforms.riesz_project(f).weighted_ratio(np.ones(128))
            assert ratio <= 1.0 + 1e-10

    def test_weighted_ratio_exceeds_one_for_non_a2_weight(self):
        # probe localized at the zero of the weight, in L^2(w dm) but with an
        # analytic part that the weight cannot suppress
        size = 4096
        thetas = toepforms.midpoint_nodes(size)
        folded = np.abs(np.angle(np.exp(1j * thetas))) / np.pi
        w = folded**1.5
        probe = np.minimum(folded, 1.0) ** -0.75
        ratio = toepforms.riesz_project(probe).weighted_ratio(w)
        assert ratio > 1.0

    def test_analytic_samples_reproduced_in_weighted_norm(self, rng):
        # density statement: P+ leaves analytic interpolants fixed, measured
        # in the weighted norm of a Muckenhoupt builtin
        size = 512
        thetas = toepforms.midpoint_nodes(size)
        coeffs = rng.standard_normal(8) + 1j * rng.standard_normal(8)
        u = sum(c * np.exp(1j * k * thetas) for k, c in enumerate(coeffs))
        projection = toepforms.riesz_project(u)
        w = weights.weight_samples(power_density(0.5), size)
        distance = np.sqrt(np.mean(np.abs(projection.values - u) ** 2 * w))
        scale = np.sqrt(np.mean(np.abs(u) ** 2 * w))
        assert distance < 1e-6 * scale

    def test_odd_length_rejected(self):
        with pytest.raises(ValueError):
            toepforms.riesz_project(np.ones(63))
