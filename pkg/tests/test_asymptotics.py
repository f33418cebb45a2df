import numpy as np
import pytest

import bvm_uq as b
from bvm_uq.prior import eigenvalues


def test_info_gram_is_symmetric_psd(ig8):
    G = ig8.G_info
    np.testing.assert_allclose(G, G.T)
    evals = np.linalg.eigvalsh(G)
    assert evals.min() > -1e-18
    assert ig8.symmetry_defect < 1e-8


def test_info_gram_aliasing_guard(lp64):
    with pytest.raises(ValueError):
        b.build_info_gram(lp64, 40)


def test_scale_identity(ig8, psi8):
    # s^2 = t^2/N-term decomposition: s^2 - t^2 equals the prior part
    # tau^{-2} c^T Lambda^alpha c of the quadratic form, an exact identity.
    N, tau, alpha = 1000, 0.7, 6.0
    c = b.perturbation(psi8, ig8, N, tau, alpha)
    s = b.scale_s(psi8, ig8, N, tau, alpha)
    t = b.scale_t(c, ig8, N)
    lam = eigenvalues(ig8.J)
    prior_part = float(np.sum(lam**alpha * c.coeffs**2)) / tau**2
    assert s**2 == pytest.approx(t**2 + prior_part, rel=1e-10)
    assert 0.0 <= t < s


def test_bias_vanishes_at_zero_truth(ig8, psi8):
    c = b.perturbation(psi8, ig8, 100, 1.0, 6.0)
    zero = b.SpectralVector(ig8.J)
    assert b.bias_b(zero, c, 1.0, 6.0) == 0.0


def test_spectral_distribution_monotone(ig8, psi8):
    alpha = 6.0
    lam = eigenvalues(ig8.J)
    psi_lam_norm = float(np.sqrt(np.sum((lam ** (-alpha / 2) * psi8.coeffs) ** 2)))
    ts = np.logspace(-30, 0, 12)
    vals = [b.spectral_distribution(psi8, ig8, alpha, t) for t in ts]
    assert all(v2 >= v1 for v1, v2 in zip(vals, vals[1:]))
    assert vals[-1] == pytest.approx(psi_lam_norm, rel=1e-12)


def test_distance_function_limits(ig8, psi8):
    alpha = 6.0
    lam = eigenvalues(ig8.J)
    psi_lam_norm = float(np.sqrt(np.sum((lam ** (-alpha / 2) * psi8.coeffs) ** 2)))
    d0 = b.distance_function(psi8, ig8, alpha, 0.0)
    assert d0 == pytest.approx(psi_lam_norm, rel=1e-12)
    rs = [1e-2, 1.0, 1e2, 1e4]
    ds = [b.distance_function(psi8, ig8, alpha, R) for R in rs]
    assert all(d2 <= d1 + 1e-15 for d1, d2 in zip(ds, ds[1:]))
    assert all(0.0 <= d <= d0 + 1e-15 for d in ds)


def test_rate_fit_recovers_power_law():
    ns = np.logspace(2, 6, 9)
    slope, stderr = b.rate_fit([(n, 3.0 * n**-0.37) for n in ns])
    assert slope == pytest.approx(-0.37, abs=1e-12)
    assert stderr == pytest.approx(0.0, abs=1e-10)


def test_rate_fit_rejects_degenerate_input():
    with pytest.raises(b.DomainError):
        b.rate_fit([(10.0, 1.0), (100.0, 0.5)])
    with pytest.raises(b.DomainError):
        b.rate_fit([(10.0, 1.0), (100.0, -0.5), (1000.0, 0.1)])


def test_condition_checker_dimension_guard():
    with pytest.raises(b.DomainError):
        b.check_coverage_conditions(6.0, 8.0, d=4)


def test_report_serializes(tmp_path, ig8, psi8):
    zero = b.SpectralVector(ig8.J)
    rep = b.asymptotic_report(psi8, zero, ig8, N=1000, tau=1.0, alpha=6.0, beta=8.0)
    path = tmp_path / "report.json"
    rep.to_json(path)
    import json

    loaded = json.loads(path.read_text())
    assert loaded["s_N"] == rep.s_N
    assert loaded["conditions"]["all"] in (True, False)


def test_report_rejects_inverted_scales(ig8, psi8):
    with pytest.raises(b.BvmUqError):
        b.AsymptoticReport(
            N=10, alpha=6.0, beta=8.0, tau=1.0, s_N=1.0, t_N=2.0, b_N=0.0,
            psi_bar=psi8, ratio_t_over_s=2.0, conditions={},
        )
