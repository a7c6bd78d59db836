import numpy as np
import pytest

from hemtdiscord import checks, gaussian
from hemtdiscord.checks import injected_fault, sample_physical_cms


def test_self_check_pristine():
    report = checks.self_check()
    assert report["passed"], [c for c in report["checks"] if not c["passed"]]
    assert {c["name"] for c in report["checks"]} == set(checks.CHECKS)


def test_fault_is_scoped():
    with injected_fault("pt-sign"):
        assert gaussian._PT_SIGN == -1.0
    assert gaussian._PT_SIGN == 1.0
    with pytest.raises(ValueError):
        with injected_fault("nope"):
            pass


def test_samples_are_physical(rng):
    a, b, c = sample_physical_cms(rng, 5000)
    nm, _ = gaussian.symplectic_eigenvalues(gaussian.make_cm(a, b, c))
    assert nm.min() >= 1 - 1e-9
    # the sampling bound is tight: the boundary is a pure-ish state
    edge = np.sqrt((np.minimum(a, b) - 1) * (np.maximum(a, b) + 1))
    nm_edge, _ = gaussian.symplectic_eigenvalues(gaussian.make_cm(a, b, edge))
    np.testing.assert_allclose(nm_edge, 1.0, atol=1e-6)
