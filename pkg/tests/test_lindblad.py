import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from cqad.core_algebra import annihilation, tensor, identity
from cqad.device import (
    DeviceParams,
    FrameSpec,
    bose_einstein,
    build_hamiltonian,
    build_probe,
    cavity_lowering,
)
from cqad.errors import InvalidDimensionError
from cqad.lindblad import (
    LiouvillianBuilder,
    build_liouvillian,
    dissipator,
    qubit_collapse,
    spost,
    spre,
    unvec,
    vec,
)


def random_density(rng, d):
    x = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = x @ x.conj().T
    return rho / np.trace(rho)


def dense_rhs(params, qubit_freq, probe, rho):
    """Master-equation right-hand side evaluated with plain matrix products."""
    h = (build_hamiltonian(params, qubit_freq, FrameSpec(probe)) + build_probe(params)).entries
    a = cavity_lowering(params).entries
    s = qubit_collapse(params).entries
    n_th = bose_einstein(params.omega_r, params.temperature)
    n_q = bose_einstein(qubit_freq, params.temperature)
    out = -1j * (h @ rho - rho @ h)
    for op, rate in (
        (a, params.kappa * (n_th + 1)),
        (a.conj().T, params.kappa * n_th),
        (s, params.gamma_q * (n_q + 1)),
        (s.conj().T, params.gamma_q * n_q),
    ):
        od = op.conj().T
        out += 0.5 * rate * (2 * op @ rho @ od - od @ op @ rho - rho @ od @ op)
    return out


class TestVectorization:
    def test_column_stacking(self):
        m = np.arange(6).reshape(2, 3)
        np.testing.assert_array_equal(vec(m), [0, 3, 1, 4, 2, 5])

    def test_roundtrip(self):
        rng = np.random.default_rng(0)
        rho = rng.normal(size=(4, 4))
        np.testing.assert_array_equal(unvec(vec(rho)), rho)

    def test_unvec_rejects_non_square(self):
        with pytest.raises(InvalidDimensionError):
            unvec(np.zeros(5))

    def test_pre_post(self):
        rng = np.random.default_rng(1)
        a, b, rho = (rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)) for _ in range(3))
        np.testing.assert_allclose(unvec(spre(a) @ vec(rho)), a @ rho, atol=1e-12)
        np.testing.assert_allclose(unvec(spost(b) @ vec(rho)), rho @ b, atol=1e-12)


class TestDissipator:
    def test_zero_rate(self):
        assert sp.linalg.norm(dissipator(annihilation(3), 0.0)) == 0

    def test_negative_rate(self):
        with pytest.raises(ValueError):
            dissipator(annihilation(3), -1.0)

    def test_population_decay(self):
        kappa = 1.56
        rho = np.zeros((3, 3), complex)
        rho[1, 1] = 1.0
        drho = unvec(dissipator(annihilation(3), kappa) @ vec(rho))
        expected = np.zeros((3, 3))
        expected[0, 0], expected[1, 1] = kappa, -kappa
        np.testing.assert_allclose(drho, expected, atol=1e-14)
        n_rate = np.trace(np.diag([0, 1, 2]) @ drho)
        assert n_rate == pytest.approx(-kappa)

    def test_coherence_decay(self):
        kappa = 1.56
        rho = np.zeros((3, 3), complex)
        rho[0, 1] = 1.0
        drho = unvec(dissipator(annihilation(3), kappa) @ vec(rho))
        np.testing.assert_allclose(drho, -0.5 * kappa * rho, atol=1e-14)


class TestQubitCollapse:
    def test_two_level(self):
        p = DeviceParams(transmon_levels=2, fock_cutoff=3)
        expected = tensor(annihilation(2), identity(3)).entries
        np.testing.assert_array_equal(qubit_collapse(p).entries, expected)

    def test_three_level_weights(self):
        p = DeviceParams(transmon_levels=3, fock_cutoff=2)
        s = qubit_collapse(p).entries
        assert s[0, 2] == pytest.approx(1.0)
        assert s[2, 4] == pytest.approx(np.sqrt(2.0))
        assert np.all(np.tril(s) == 0)


CONFIGS = [
    dict(transmon_levels=2, fock_cutoff=3, temperature=98.5),
    dict(transmon_levels=3, fock_cutoff=4, temperature=349.0, gamma_q=7.9),
    dict(transmon_levels=2, fock_cutoff=5, temperature=16.5, kappa=0.4, gamma_q=6.0, epsilon=0.5),
]


@pytest.mark.parametrize("kw", CONFIGS)
@pytest.mark.parametrize("qubit_freq, probe", [(3162.0, 3162.0), (3100.0, 3180.0)])
def test_matches_dense_master_equation(kw, qubit_freq, probe):
    params = DeviceParams(**kw)
    L = build_liouvillian(params, qubit_freq, probe)
    rng = np.random.default_rng(11)
    rho = random_density(rng, L.dim)
    np.testing.assert_allclose(L.apply(rho), dense_rhs(params, qubit_freq, probe, rho), atol=1e-9)


@pytest.mark.parametrize("kw", CONFIGS)
def test_trace_and_hermiticity_preserved(kw):
    params = DeviceParams(**kw)
    L = build_liouvillian(params, 3162.0, 3170.0)
    rng = np.random.default_rng(5)
    for _ in range(20):
        x = rng.normal(size=(L.dim, L.dim)) + 1j * rng.normal(size=(L.dim, L.dim))
        rho = x + x.conj().T
        rho /= np.trace(rho)
        out = L.apply(rho)
        assert abs(np.trace(out)) <= 1e-12 * max(1.0, np.abs(out).max())
        np.testing.assert_allclose(out, out.conj().T, atol=1e-10)


def test_ground_state_is_null_vector():
    params = DeviceParams(transmon_levels=3, fock_cutoff=5, temperature=0.0, epsilon=0.0, g=0.0)
    L = build_liouvillian(params, 3162.0, 3162.0)
    ground = np.zeros((L.dim, L.dim))
    ground[0, 0] = 1.0
    assert np.abs(L.matrix @ vec(ground)).max() < 1e-10


@pytest.mark.parametrize("temp", [50.5, 98.5, 349.0])
def test_gibbs_product_is_null_vector(temp):
    params = DeviceParams(transmon_levels=3, fock_cutoff=8, temperature=temp, epsilon=0.0, g=0.0)
    wa = 3050.0
    L = build_liouvillian(params, wa, 3162.0)

    def gibbs(n_th, d):
        x = n_th / (n_th + 1)
        w = x ** np.arange(d)
        return np.diag(w / w.sum())

    rho = np.kron(
        gibbs(bose_einstein(wa, temp), 3),
        gibbs(bose_einstein(params.omega_r, temp), 8),
    )
    assert np.abs(L.matrix @ vec(rho)).max() < 1e-8


@settings(max_examples=15, deadline=None)
@given(
    st.integers(2, 3), st.integers(2, 4), st.floats(0, 30), st.floats(0.1, 5), st.floats(0, 12),
    st.floats(0, 400), st.floats(3000, 3300),
)
def test_spectral_abscissa(levels, cutoff, g, kappa, gamma, temp, probe):
    params = DeviceParams(
        transmon_levels=levels, fock_cutoff=cutoff, g=g, kappa=kappa, gamma_q=gamma, temperature=temp,
        epsilon=0.2,
    )
    ev = np.linalg.eigvals(build_liouvillian(params, 3162.0, probe).matrix.toarray())
    assert ev.real.max() <= 1e-9


def test_closed_system_spectrum_is_imaginary():
    params = DeviceParams(transmon_levels=2, fock_cutoff=3, kappa=0.0, gamma_q=0.0, epsilon=0.0, temperature=50)
    ev = np.linalg.eigvals(build_liouvillian(params, 3140.0, 3162.0).matrix.toarray())
    assert np.abs(ev.real).max() < 1e-9


def test_dimension_bookkeeping():
    params = DeviceParams(transmon_levels=5, fock_cutoff=12, gamma_q=7.9)
    L = build_liouvillian(params, 3162.0, 3162.0)
    assert L.matrix.shape == ((5 * 12) ** 2, (5 * 12) ** 2)


def test_builder_matches_direct_build():
    params = DeviceParams(transmon_levels=3, fock_cutoff=4, temperature=98.5)
    builder = LiouvillianBuilder(params, 3150.0)
    for probe in (3100.0, 3162.0, 3199.5):
        a = builder.at(probe).matrix.toarray()
        rng = np.random.default_rng(2)
        rho = random_density(rng, 12)
        np.testing.assert_allclose(unvec(a @ vec(rho)), dense_rhs(params, 3150.0, probe, rho), atol=1e-9)


def test_probe_block_structure():
    params = DeviceParams(transmon_levels=3, fock_cutoff=4, epsilon=0.0)
    L = build_liouvillian(params, 3150.0, 3170.0)
    coo = L.matrix.tocoo()
    assert np.all(L.sectors[coo.row] == L.sectors[coo.col])
    driven = build_liouvillian(params.replace(epsilon=0.3), 3150.0, 3170.0).matrix.tocoo()
    jumps = np.abs(L.sectors[driven.row] - L.sectors[driven.col])
    assert jumps.max() == 1


def test_rejects_bad_probe():
    with pytest.raises(ValueError):
        build_liouvillian(DeviceParams(transmon_levels=2, fock_cutoff=3), 3162.0, 0.0)
