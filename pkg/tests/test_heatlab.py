import copy

import numpy as np
import pytest

from conftest import small_spec
from gutzmerlab.constants import BERGMAN_NORM_C, heat_image_c
from gutzmerlab.grids import fft_grid
from gutzmerlab.heatlab import (
    HeatError,
    gauss_bessel_check,
    gauss_heat,
    heat_apply,
    heat_image_norm,
    lemma63_check,
    reproducing_bound_check,
    thm35_converse_tail,
    thm35_forward,
    twisted_heat_kernel,
)
from gutzmerlab.specfun import LaguerreArg, laguerre_phi
from gutzmerlab.spectral import GridFunction, analyze, synth_bandlimited, twisted_conv

BOX = [(k, lam, t, n) for n in (1, 2) for k in (0, 1, 4)
       for lam in (0.25, 1.0) for t in (0.1, 0.5)]


class TestGaussHeat:
    def test_normalization(self):
        x = np.linspace(-40, 40, 4001)
        h = x[1] - x[0]
        vals = gauss_heat(1, 0.7, x[:, None])
        assert np.sum(vals) * h == pytest.approx(1.0, abs=1e-10)

    def test_exponential_moment_oracle(self):
        # integral e^{a.w} p_t(w) dw = e^{|a|^2 t}
        t, a = 0.4, 1.3
        x = np.linspace(-60, 60, 12001)
        h = x[1] - x[0]
        vals = gauss_heat(1, t, x[:, None]) * np.exp(a * x)
        assert np.sum(vals) * h == pytest.approx(np.exp(a * a * t), rel=1e-9)

    def test_semigroup(self):
        t, s = 0.3, 0.5
        x = np.linspace(-40, 40, 2001)
        h = x[1] - x[0]
        f1 = gauss_heat(1, t, x[:, None])
        f2 = gauss_heat(1, s, x[:, None])
        conv = np.convolve(f1, f2, mode="same") * h
        ref = gauss_heat(1, t + s, x[:, None])
        assert np.max(np.abs(conv - ref)) < 1e-7

    def test_bad_time(self):
        with pytest.raises(HeatError):
            gauss_heat(1, -0.1, [0.0])


class TestGaussBessel:
    @pytest.mark.parametrize("k,lam,t,n", BOX)
    def test_identity_box(self, k, lam, t, n):
        assert gauss_bessel_check(k, lam, t, n) <= 1e-6

    def test_lambda_to_zero_reduces(self):
        assert gauss_bessel_check(0, 1e-6, 0.25, 1) <= 1e-6

    def test_t_to_zero_value_goes_to_one(self):
        # heat kernel -> delta: both sides -> 1
        assert gauss_bessel_check(2, 1.0, 1e-4, 1) <= 1e-5


class TestHeatApply:
    def test_zero_time_identity(self, fixture_small):
        _, _, sd = fixture_small
        assert heat_apply(sd, 0.0) is sd

    def test_semigroup(self, fixture_small):
        _, _, sd = fixture_small
        a = heat_apply(heat_apply(sd, 0.2), 0.3)
        b = heat_apply(sd, 0.5)
        assert np.max(np.abs(a.norms2 - b.norms2)) < 1e-14 * np.max(b.norms2)
        assert np.max(np.abs(a.projections[3] - b.projections[3])) < 1e-14

    def test_single_mode_scaling(self, fixture_small):
        _, _, sd = fixture_small
        t = 0.3
        sdh = heat_apply(sd, t)
        ks, js = np.nonzero(sd.norms2)
        k0, j0 = int(ks[0]), int(js[0])
        lam0 = sd.lam[j0]
        want = sd.norms2[k0, j0] * np.exp(-2 * t * lam0 ** 2 - 2 * (2 * k0 + 1) * abs(lam0) * t)
        assert sdh.norms2[k0, j0] == pytest.approx(want, rel=1e-12)


class TestHeatImage:
    def test_t_independent(self, fixture_small):
        _, f, sd = fixture_small
        vals = [heat_image_norm(heat_apply(sd, t), t) for t in (0.1, 0.2, 0.4)]
        spread = (max(vals) - min(vals)) / vals[0]
        assert spread <= 1e-3

    def test_equals_frozen_constant_times_norm(self, fixture_small):
        _, f, sd = fixture_small
        v = heat_image_norm(heat_apply(sd, 0.2), 0.2)
        assert v == pytest.approx(heat_image_c(1) * f.squared_norm(), rel=1e-9)

    def test_zero_function(self, fixture_small):
        _, _, sd0 = fixture_small
        sd = copy.copy(sd0)
        sd.norms2 = np.zeros_like(sd0.norms2)
        assert heat_image_norm(heat_apply(sd, 0.1), 0.1) == 0.0

    def test_quadratic_scaling(self, fixture_small):
        _, _, sd0 = fixture_small
        sd = copy.copy(sd0)
        sd.norms2 = 4.0 * sd0.norms2  # |2 f|^2
        v0 = heat_image_norm(heat_apply(sd0, 0.1), 0.1)
        v1 = heat_image_norm(heat_apply(sd, 0.1), 0.1)
        assert v1 == pytest.approx(4.0 * v0, rel=1e-12)


class TestTwistedHeatKernel:
    def test_lambda_to_zero_limit(self):
        t, rho = 0.7, 2.3
        got = twisted_heat_kernel(1e-10, t, rho)
        want = (4 * np.pi) ** -1 * (1 / t) * np.exp(-rho / (4 * t))
        assert got == pytest.approx(want, rel=1e-9)

    def test_positive_at_real_arguments(self):
        for lam in (-1.2, 0.4, 2.0):
            for t in (0.1, 1.0):
                for rho in (0.0, 3.0, 20.0):
                    assert np.real(twisted_heat_kernel(lam, t, rho)) > 0

    @pytest.mark.parametrize("lam,k,t", [(1.0, 0, 0.5), (1.0, 2, 0.5), (-0.8, 1, 0.4)])
    def test_laguerre_eigenrelation_oracle(self, lam, k, t):
        # phi_k *_lam p_t^lam = e^{-(2k+1)|lam| t} phi_k via twisted_conv
        N, L = 48, 11.0
        xg = fft_grid(N, L)
        rho = np.abs(xg[:, None] + 1j * xg[None, :]) ** 2
        phik = np.real(laguerre_phi(LaguerreArg(k, 0, rho), lam)) + 0j
        pt = np.real(twisted_heat_kernel(lam, t, rho)) + 0j
        conv = twisted_conv(phik, pt, lam, xg, xg)
        want = np.exp(-(2 * k + 1) * abs(lam) * t) * phik
        assert np.max(np.abs(conv - want)) <= 1e-4 * np.max(np.abs(want))

    def test_bad_time(self):
        with pytest.raises(HeatError):
            twisted_heat_kernel(1.0, 0.0, 1.0)


class TestLemma63:
    @pytest.mark.parametrize("k,lam,t", [(k, lam, t) for k in (0, 1, 4)
                                         for lam in (0.25, 1.0) for t in (0.1, 0.5)])
    def test_identity_box_n1(self, k, lam, t):
        assert lemma63_check(k, lam, t, 1) <= 1e-5

    def test_n2(self):
        assert lemma63_check(2, 0.5, 0.3, 2) <= 1e-5

    def test_ratio_between_levels(self):
        # target ratio k=1 vs k=0 at n=1 is e^{2 lam t}
        lam, t = 1.0, 0.5
        r0 = lemma63_check(0, lam, t, 1)
        r1 = lemma63_check(1, lam, t, 1)
        assert max(r0, r1) <= 1e-5  # both match their targets, ratio implied

    def test_small_lambda_gaussian_moment(self):
        assert lemma63_check(2, 1e-3, 0.5, 1) <= 1e-5


class TestReproducingBound:
    @pytest.mark.parametrize("k", [0, 2, 8])
    @pytest.mark.parametrize("lam", [0.25, 1.0])
    @pytest.mark.parametrize("t", [0.1, 0.5])
    def test_margin_nonnegative_on_ray(self, k, lam, t):
        for r in np.linspace(0.0, 3.0, 7):
            ok, margin = reproducing_bound_check(k, lam, t, r)
            assert ok and margin >= 0.0

    def test_origin_binomial_bound(self):
        # at r = 0 the bound reads 1 <= C * K_diag * e^{2(2k+n)|lam| t}
        ok, margin = reproducing_bound_check(0, 0.25, 0.5, 0.0)
        assert ok
        kdiag = np.real(twisted_heat_kernel(0.25, 1.0, 0.0))
        rhs = BERGMAN_NORM_C * kdiag * np.exp(2 * 1 * 0.25 * 0.5)
        assert margin == pytest.approx(rhs - 1.0, rel=1e-12)

    def test_hilb_regime_ratio_bounded(self):
        # k large at fixed (2k+n) lam: both sides grow like e^{2 sqrt(fan) r}
        fan = 6.0
        ratios = []
        for k in (4, 16, 64):
            lam = fan / (2 * k + 1)
            lhs = abs(np.real(laguerre_phi(LaguerreArg(k, 0, -4.0 * 4.0), lam)))
            kd = np.real(twisted_heat_kernel(lam, 2 * 0.3, -16.0 * 4.0))
            rhs = kd * BERGMAN_NORM_C * np.exp(2 * fan * 0.3)
            ratios.append(lhs / rhs)
        assert max(ratios) <= 1.0


@pytest.fixture(scope="module")
def positive_sd():
    spec = small_spec()
    _, sd = synth_bandlimited(1.0, 5.0, seed=13, spec=spec)
    sd.norms2[:, sd.lam < 0] = 0.0
    for j, lv in enumerate(sd.lam):
        if lv < 0:
            sd.modal[j].coef[:] = 0.0
            sd.projections[j][:] = 0.0
    return sd


class TestThm35:

    def test_forward_bound(self, positive_sd):
        bl = positive_sd.achieved_band()
        rep = thm35_forward(positive_sd, bl.A, bl.B)
        assert rep["passes"]
        assert rep["max_slope"] <= rep["slope_bound"]

    def test_scaled_values_bounded_in_t(self, positive_sd):
        bl = positive_sd.achieved_band()
        rep = thm35_forward(positive_sd, bl.A, bl.B, t_grid=(1.0, 2.0, 4.0))
        for pt in rep["points"]:
            assert pt["sup_scaled"] < np.inf

    def test_single_mode_slope_bound(self):
        spec = small_spec()
        _, sd = synth_bandlimited(1.0, 5.0, seed=4, spec=spec)
        from test_complexification import single_cell

        j0 = int(np.argmin(np.abs(sd.lam - 0.875)))
        sd = single_cell(sd, 1, j0, 1.0)
        lam0 = sd.lam[j0]
        rep = thm35_forward(sd, lam0, (2 * 1 + 1) * lam0)
        assert rep["max_slope"] <= 2 * (lam0 ** 2 + 3 * lam0)

    def test_negative_mass_rejected(self, fixture_small):
        _, _, sd = fixture_small
        with pytest.raises(HeatError, match="lambda < 0"):
            thm35_forward(sd, 1.0, 5.0)

    def test_tail_supported(self, positive_sd):
        bl = positive_sd.achieved_band()
        rep = thm35_converse_tail(positive_sd, bl.B)
        assert rep["verdict"] == "supported"

    def test_tail_violated_by_planted_cell(self, positive_sd):
        sd = copy.copy(positive_sd)
        sd.norms2 = positive_sd.norms2.copy()
        B = positive_sd.achieved_band().B
        lam_t = 2.0 * B / (2 * 3 + 1)
        j = int(np.argmin(np.abs(sd.lam - lam_t)))
        sd.norms2[3, j] += 0.1
        rep = thm35_converse_tail(sd, B, C=B + 0.5 * B)
        assert rep["verdict"] == "violated"
        assert rep["offending_cells"]

    def test_empty_spectrum_supported(self, positive_sd):
        sd = copy.copy(positive_sd)
        sd.norms2 = np.zeros_like(positive_sd.norms2)
        rep = thm35_converse_tail(sd, 1.0)
        assert rep["verdict"] == "supported"
