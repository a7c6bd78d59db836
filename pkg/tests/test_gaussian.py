import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hemtdiscord import gaussian, oracles
from hemtdiscord.checks import sample_physical_cms
from hemtdiscord.errors import DegenerateChannelError, DomainError, NonPhysicalStateError
from hemtdiscord.langevin import SpectralMoments


def moments(n_o1, n_o2, d_o12):
    z = np.zeros(1)
    return SpectralMoments(z, z, z.astype(complex), np.array([n_o1]), np.array([n_o2]),
                           np.array([d_o12], dtype=complex), z)


def tmsv(r):
    return gaussian.make_cm(math.cosh(2 * r), math.cosh(2 * r), math.sinh(2 * r))


@st.composite
def physical_cm(draw):
    a = draw(st.floats(1.0, 80.0))
    b = draw(st.floats(1.0, 80.0))
    frac = draw(st.floats(-1.0, 1.0))
    c = frac * math.sqrt((min(a, b) - 1) * (max(a, b) + 1))
    return a, b, c


def test_vacuum_cm():
    cm = gaussian.covariance_matrix(moments(0.0, 0.0, 0.0))
    assert (cm.a[0], cm.b[0], cm.c[0]) == (1.0, 1.0, 0.0)


def test_uncorrelated_channel_parameters():
    cm = gaussian.covariance_matrix(moments(3.0, 12.0, 0.0))
    assert cm.b[0] == 25.0 and cm.tau[0] == 0.0 and cm.eta[0] == cm.a[0]


def test_large_occupancy_b():
    cm = gaussian.covariance_matrix(moments(0.2, 13.01, 0.0))
    assert cm.b[0] == pytest.approx(27.02)


def test_channel_parameters_definition():
    cm = gaussian.make_cm(5.0, 7.0, 3.0)
    assert cm.tau == pytest.approx(9 / 48)
    assert cm.eta == pytest.approx(5 - 7 * 9 / 48)
    assert cm.tau + cm.eta == pytest.approx(gaussian.conditional_variance(cm))


def test_degenerate_channel():
    with pytest.raises(DegenerateChannelError):
        gaussian.covariance_matrix(moments(1.0, 0.0, 0.1))


def test_negative_occupancy_rejected():
    with pytest.raises(NonPhysicalStateError):
        gaussian.covariance_matrix(moments(-0.1, 0.0, 0.0))


@pytest.mark.parametrize("x, expected", [(1.0, 0.0), (3.0, 2.0), (5.0, 3 * math.log2(3) - 2)])
def test_entropy_values(x, expected):
    assert gaussian.entropy_h(x) == pytest.approx(expected, abs=1e-12)


def test_entropy_f5_tolerance():
    assert abs(gaussian.entropy_h(5.0) - 2.75489) <= 1e-5


def test_entropy_domain():
    assert gaussian.entropy_h(1 - 1e-9) == 0.0
    assert gaussian.entropy_h(1 - 5e-7) == 0.0
    with pytest.raises(DomainError):
        gaussian.entropy_h(1 - 1e-5)
    with pytest.raises(DomainError):
        gaussian.entropy_h(np.nan)


def test_entropy_increasing_nonnegative():
    x = np.linspace(1, 100, 5000)
    f = gaussian.entropy_h(x)
    assert f[0] == 0 and np.all(np.diff(f) > 0)


def test_entropy_matches_thermal_oracle():
    for n in (0.01, 0.5, 3.0, 12.97):
        assert gaussian.entropy_h(2 * n + 1) == pytest.approx(oracles.thermal_entropy(n), rel=1e-12)


@pytest.mark.parametrize("abc, expected", [((1, 1, 0), (1, 1)), ((25, 25, 0), (25, 25)), ((3, 9, 0), (3, 9))])
def test_symplectic_simple(abc, expected):
    nu = gaussian.symplectic_eigenvalues(gaussian.make_cm(*abc))
    assert nu == pytest.approx(expected, abs=1e-14)


@pytest.mark.parametrize("r", [0.0, 0.3, 1.0, 2.5])
def test_tmsv_pure(r):
    cm = tmsv(r)
    nm, npl = gaussian.symplectic_eigenvalues(cm)
    assert nm == pytest.approx(1, abs=1e-10) and npl == pytest.approx(1, abs=1e-10)
    assert gaussian.pt_smaller_eigenvalue(cm) == pytest.approx(math.exp(-2 * r), abs=1e-10)


def test_nonphysical_detected():
    with pytest.raises(NonPhysicalStateError):
        gaussian.symplectic_eigenvalues(gaussian.make_cm(2.0, 3.0, 3.0))
    with pytest.raises(NonPhysicalStateError):
        gaussian.make_cm(0.5, 2.0, 0.0)


def test_symplectic_against_williamson(rng):
    a, b, c = sample_physical_cms(rng, 300, a_max=20)
    for ai, bi, ci in zip(a, b, c):
        cm = gaussian.make_cm(ai, bi, ci)
        ref = oracles.williamson_spectrum(cm.matrix())
        got = np.array(gaussian.symplectic_eigenvalues(cm), dtype=float)
        np.testing.assert_allclose(got, ref, rtol=1e-8)
        pt = oracles.williamson_spectrum(oracles.partial_transpose(cm.matrix()))[0]
        assert gaussian.pt_smaller_eigenvalue(cm) == pytest.approx(pt, rel=1e-8)


def test_product_law_exact_det(rng):
    a, b, c = sample_physical_cms(rng, 100)
    for ai, bi, ci in zip(a, b, c):
        cm = gaussian.make_cm(ai, bi, ci)
        nm, npl = gaussian.symplectic_eigenvalues(cm)
        root_det = math.sqrt(float(oracles.exact_det(cm.matrix())))
        assert nm * npl == pytest.approx(root_det, rel=1e-10)


def test_pt_product_state():
    assert gaussian.pt_smaller_eigenvalue(gaussian.make_cm(4.0, 2.5, 0.0)) == 2.5


def test_entangled_flag():
    assert bool(gaussian.gaussian_discord(tmsv(0.5)).entangled)
    assert not bool(gaussian.gaussian_discord(gaussian.make_cm(3.0, 3.0, 0.5)).entangled)


def test_product_state_zero_correlations():
    rep = gaussian.gaussian_discord(gaussian.make_cm(7.0, 25.0, 0.0))
    assert rep.discord == 0 and rep.classical == 0 and rep.mutual == 0


@pytest.mark.parametrize("r", [0.1, 0.5, 1.0, 2.0])
def test_tmsv_discord_is_entanglement_entropy(r):
    cm = tmsv(r)
    rep = gaussian.gaussian_discord(cm)
    assert gaussian.entropy_h(gaussian.conditional_variance(cm)) == pytest.approx(0, abs=1e-9)
    assert rep.discord == pytest.approx(oracles.thermal_entropy(math.sinh(r) ** 2), abs=1e-9)


@settings(max_examples=300, deadline=None)
@given(physical_cm())
def test_identities_hypothesis(abc):
    rep = gaussian.gaussian_discord(gaussian.make_cm(*abc))
    assert rep.discord >= -1e-9
    assert rep.classical >= -1e-9
    assert rep.mutual >= rep.classical - 1e-9
    assert rep.discord + rep.classical == pytest.approx(rep.mutual, abs=1e-9)
    assert rep.nu_plus >= rep.nu_minus >= 1 - 1e-9
    assert bool(rep.entangled) == (rep.d_tilde < 1)


def test_sign_of_c_irrelevant(rng):
    a, b, c = sample_physical_cms(rng, 200)
    pos = gaussian.gaussian_discord(gaussian.make_cm(a, b, np.abs(c)))
    neg = gaussian.gaussian_discord(gaussian.make_cm(a, b, -np.abs(c)))
    for name in ("discord", "classical", "mutual", "nu_minus", "nu_plus", "d_tilde"):
        np.testing.assert_array_equal(getattr(pos, name), getattr(neg, name))


@pytest.mark.parametrize("a, b", [(3.0, 3.0), (5.0, 20.0), (30.0, 2.0)])
def test_discord_nondecreasing_in_c(a, b):
    c = np.linspace(0, math.sqrt((min(a, b) - 1) * (max(a, b) + 1)), 400)
    D = gaussian.gaussian_discord(gaussian.make_cm(np.full_like(c, a), np.full_like(c, b), c)).discord
    assert np.all(np.diff(D) >= -1e-12)


def test_half_convention_round_trip(rng):
    a, b, c = sample_physical_cms(rng, 500)
    cm = gaussian.make_cm(a, b, c)
    back = gaussian.from_half_vacuum(*gaussian.to_half_vacuum(cm))
    r1, r2 = gaussian.gaussian_discord(cm), gaussian.gaussian_discord(back)
    for name in ("discord", "classical", "mutual"):
        np.testing.assert_array_equal(getattr(r1, name), getattr(r2, name))


def test_vectorized_matches_scalar(rng):
    a, b, c = sample_physical_cms(rng, 50)
    vec = gaussian.gaussian_discord(gaussian.make_cm(a, b, c))
    for i in range(50):
        sc = gaussian.gaussian_discord(gaussian.make_cm(a[i], b[i], c[i]))
        assert sc.discord == vec.discord[i]
        assert sc.d_tilde == vec.d_tilde[i]
