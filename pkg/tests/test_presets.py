import itertools

import numpy as np
import pytest

from symflat.errors import SceneError
from symflat.forms import SU2, permutation_sign, sup_norm
from symflat.gauge import curvature
from symflat.presets import REGISTRY, bpst, parse_preset, thooft_symbols


def _levi_civita4():
    eps = np.zeros((4, 4, 4, 4))
    for p in itertools.permutations(range(4)):
        eps[p] = permutation_sign(p)
    return eps


def test_thooft_symbols_self_dual_and_orthogonal():
    eta = thooft_symbols()
    eps = _levi_civita4()
    np.testing.assert_array_equal(eta, -np.swapaxes(eta, 1, 2))
    dual = 0.5 * np.einsum("mnrs,ars->amn", eps, eta)
    np.testing.assert_allclose(dual, eta, atol=1e-14)
    np.testing.assert_allclose(np.einsum("amn,bmn->ab", eta, eta), 4 * np.eye(3), atol=1e-14)


@pytest.mark.parametrize("text, name, res", [
    ("flat_wilson", "flat_wilson", 16),
    ("flat_wilson(0.1, 0.2)", "flat_wilson", 16),
    ("constant_flux(c=0.5, resolution=8)", "constant_flux", 8),
    ("random_su2(3, 0.2, resolution=8, max_mode=1)", "random_su2", 8),
    ("t4_yang_mills_example(8)", "t4_yang_mills_example", 8),
])
def test_parse_preset(text, name, res):
    p = parse_preset(text)
    assert p.name == name
    assert p.domain.shape == (res,) * 4


def test_parse_preset_overrides():
    p = parse_preset("constant_flux(0.5)", resolution=8)
    assert p.domain.shape == (8,) * 4
    np.testing.assert_allclose(p.phi.data, 0.5)


@pytest.mark.parametrize("text", ["nope", "flat_wilson(", "flat_wilson(x)", "bpst(bogus=1)",
                                  "flat_wilson(1, 2, 3, 4, 5, 6)", "import os"])
def test_parse_preset_errors(text):
    with pytest.raises(SceneError):
        parse_preset(text)


def test_registry_presets_build():
    for name, fn in REGISTRY.items():
        p = fn(100) if name == "bpst" else fn(resolution=8)
        assert p.connection.a.domain is p.domain
        assert p.metric.domain is p.domain


def test_random_presets_deterministic():
    a = parse_preset("random_su2(5, resolution=8)")
    b = parse_preset("random_su2(5, resolution=8)")
    c = parse_preset("random_su2(6, resolution=8)")
    np.testing.assert_array_equal(a.connection.a.data, b.connection.a.data)
    assert not np.array_equal(a.connection.a.data, c.connection.a.data)
    assert a.connection.algebra is SU2


def test_bpst_curvature_matches_reference():
    p = bpst(200)
    F = curvature(p.connection)
    assert sup_norm(F - p.extras["F_reference"], p.metric) <= 1e-12
