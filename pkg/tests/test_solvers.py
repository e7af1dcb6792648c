import numpy as np
import pytest

from gge.errors import ParameterError
from gge.hamiltonians import (
    anisotropic_haldane,
    disordered_heisenberg,
    extended_haldane,
    j1j2,
    to_dense_matrix,
    to_mpo,
)
from gge.mps import overlap, to_dense
from gge.solvers import (
    DmrgConfig,
    aklt_exact_mps,
    dmrg_ground_state,
    exact_spectrum,
    mid_spectrum,
    sector_mid_spectrum,
    sector_spectrum,
)


def ground_truth(spec):
    h = to_dense_matrix(spec)
    vals, vecs = np.linalg.eigh(h)
    return vals[0], vecs[:, 0]


def test_dmrg_config_validation():
    with pytest.raises(ParameterError):
        DmrgConfig(max_bond=0)
    with pytest.raises(ParameterError):
        DmrgConfig(energy_tol=0.0)
    with pytest.raises(ParameterError):
        DmrgConfig.from_dict({"bogus": 1})
    cfg = DmrgConfig(max_bond=16)
    assert DmrgConfig.from_dict(cfg.to_dict()) == cfg


@pytest.mark.parametrize("spec", [
    extended_haldane(6, 0.6),
    anisotropic_haldane(6, 1.0, 0.5, 0.2),
    disordered_heisenberg(8, 1.0, 2.0, 3)[0],
    j1j2(8, 1.0, 0.5),
], ids=lambda s: s.model)
def test_dmrg_matches_dense_ground_state(spec):
    e0, _ = ground_truth(spec)
    res = dmrg_ground_state(to_mpo(spec), DmrgConfig(max_bond=32, sweeps=14))
    assert res.converged
    assert res.energy == pytest.approx(e0, abs=1e-8)


def test_dmrg_deterministic():
    spec = j1j2(8, 1.0, 0.3)
    a = dmrg_ground_state(to_mpo(spec), DmrgConfig(max_bond=16, sweeps=6))
    b = dmrg_ground_state(to_mpo(spec), DmrgConfig(max_bond=16, sweeps=6))
    assert a.energy == b.energy
    assert abs(overlap(a.state, b.state)) ** 2 == pytest.approx(1.0, abs=1e-12)


def test_aklt_exact_mps_is_ground_state():
    for n in (4, 5, 6):
        spec = extended_haldane(n, 1.0)
        vbs = aklt_exact_mps(n)
        e0, g = ground_truth(spec)
        # bulk bonds contribute -2/3 each, the two edge bonds -1 each
        assert e0 == pytest.approx(-(n - 3) * 2.0 / 3.0 - 2.0, abs=1e-12)
        psi = to_dense(vbs)
        fid = abs(np.vdot(g, psi.amplitudes)) ** 2
        assert fid == pytest.approx(1.0, abs=1e-10)
        assert max(vbs.bond_dims) == 2


def test_exact_spectrum_and_mu():
    spec, _ = disordered_heisenberg(4, 1.0, 1.0, 9)
    sol = exact_spectrum(to_dense_matrix(spec), site_dims=spec.site_dims)
    assert sol.energies.shape == (16,)
    assert np.all(np.diff(sol.energies) >= -1e-12)
    assert sol.mu[0] == pytest.approx(0.0)
    assert sol.mu[-1] == pytest.approx(1.0)


def test_exact_spectrum_rejects_nonhermitian():
    with pytest.raises(Exception):
        exact_spectrum(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_mid_spectrum_selection():
    h = np.diag([0.0, 1.0, 2.0, 3.0, 10.0])
    sol = exact_spectrum(h)
    # mu = 0, .1, .2, .3, 1; closest to 1/2 are energies 3 then 2
    picked = mid_spectrum(sol, 2)
    idx = [int(np.argmax(np.abs(s.amplitudes))) for s in picked]
    assert idx == [2, 3]  # returned in increasing mu order
    with pytest.raises(ParameterError):
        mid_spectrum(sol, 6)


def test_sector_spectrum_matches_exact():
    spec, _ = disordered_heisenberg(8, 1.0, 3.0, 17)
    energies, mu, _ = sector_spectrum(spec)
    sol = exact_spectrum(to_dense_matrix(spec), site_dims=spec.site_dims)
    assert np.allclose(energies, sol.energies, atol=1e-10)
    assert np.allclose(mu, sol.mu, atol=1e-12)


def test_sector_mid_spectrum_states_are_eigenstates():
    spec, _ = disordered_heisenberg(8, 1.0, 2.0, 23)
    h = to_dense_matrix(spec)
    for mu, energy, state in sector_mid_spectrum(spec, 3):
        resid = h @ state.amplitudes - energy * state.amplitudes
        assert np.linalg.norm(resid) < 1e-9
        assert 0.0 <= mu <= 1.0
        assert state.norm == pytest.approx(1.0, abs=1e-12)


def test_sector_mid_spectrum_matches_dense_selection():
    spec, _ = disordered_heisenberg(6, 1.0, 1.5, 4)
    sol = exact_spectrum(to_dense_matrix(spec), site_dims=spec.site_dims)
    dense_states = mid_spectrum(sol, 3)
    sector_states = [s for _, _, s in sector_mid_spectrum(spec, 3)]
    for a, b in zip(dense_states, sector_states):
        assert abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2 == pytest.approx(1.0, abs=1e-9)
