import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qsorter.algebra import NonUnitaryError, controlled, fourier, identity, pauli_x
from qsorter.mesh import Beamsplitter, BeamsplitterMesh, PhaseShifter, decompose, reconstruct
from qsorter.sorter import ideal_module, interferometer


def haar_ish(d, rng):
    q, r = np.linalg.qr(rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def test_identity_needs_no_beamsplitters():
    m = decompose(identity(5))
    assert m.beamsplitters == []
    assert all(isinstance(e, PhaseShifter) and e.phase == 0 for e in m.elements)


def test_hadamard_single_beamsplitter():
    h = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    m = decompose(h)
    (bs,) = m.beamsplitters
    # |H_00| = cos(theta) fixes the splitting angle
    assert bs.theta == pytest.approx(np.arccos(abs(h[0, 0])), abs=1e-15)
    assert bs.theta == pytest.approx(np.pi / 4)
    assert reconstruct(m).max_diff(h) < 1e-12


def test_fourier_8():
    m = decompose(fourier(8))
    assert len(m.beamsplitters) <= 28
    assert reconstruct(m).max_diff(fourier(8)) < 1e-10


def test_reconstruct_examples():
    assert reconstruct(BeamsplitterMesh(3, ())).allclose(np.eye(3), 0)
    ps = reconstruct(BeamsplitterMesh(2, (PhaseShifter(0, np.pi),)))
    assert ps.allclose(np.diag([-1, 1]), 1e-15)


def test_beamsplitter_convention():
    theta, phi = 0.3, 1.1
    u = np.asarray(reconstruct(BeamsplitterMesh(3, (Beamsplitter(0, 2, theta, phi),))))
    c, s = np.cos(theta), np.sin(theta)
    expected = np.eye(3, dtype=complex)
    expected[0, 0], expected[0, 2] = c, -np.exp(-1j * phi) * s
    expected[2, 0], expected[2, 2] = np.exp(1j * phi) * s, c
    np.testing.assert_allclose(u, expected, atol=1e-15)


def test_elements_apply_in_order():
    a = Beamsplitter(0, 1, 0.4, 0.2)
    b = PhaseShifter(1, 0.7)
    ua = np.asarray(reconstruct(BeamsplitterMesh(2, (a,))))
    ub = np.asarray(reconstruct(BeamsplitterMesh(2, (b,))))
    np.testing.assert_allclose(np.asarray(reconstruct(BeamsplitterMesh(2, (a, b)))), ub @ ua, atol=1e-15)


def test_reconstruct_rejects_bad_modes():
    with pytest.raises(ValueError):
        reconstruct(BeamsplitterMesh(2, (PhaseShifter(2, 0.1),)))
    with pytest.raises(ValueError):
        Beamsplitter(1, 1, 0.1, 0.1)


def test_decompose_rejects_non_unitary():
    with pytest.raises(NonUnitaryError):
        decompose(np.array([[1, 0.1], [0, 1]]))


@pytest.mark.parametrize("d", [2, 4, 8, 16])
def test_random_round_trip(d):
    rng = np.random.default_rng(d)
    for _ in range(20):
        u = haar_ish(d, rng)
        m = decompose(u)
        assert len(m.beamsplitters) <= d * (d - 1) // 2
        assert reconstruct(m).max_diff(u) < 1e-10


@given(st.integers(1, 12), st.integers(0, 2 ** 32 - 1))
@settings(max_examples=40, deadline=None)
def test_round_trip_property(d, seed):
    u = haar_ish(d, np.random.default_rng(seed))
    m = decompose(u)
    assert len(m.beamsplitters) <= d * (d - 1) // 2
    assert reconstruct(m).max_diff(u) < 1e-10


def test_phases_sit_on_output_side():
    m = decompose(haar_ish(5, np.random.default_rng(0)))
    kinds = [type(e) for e in m.elements]
    first_ps = kinds.index(PhaseShifter)
    assert all(k is PhaseShifter for k in kinds[first_ps:])


@pytest.mark.parametrize("d", [2, 3, 8])
def test_sorter_from_mesh(d):
    f_mesh = reconstruct(decompose(fourier(d)))
    u = interferometer(ideal_module(d).phases, f_mesh, f_mesh.dag)
    assert u.allclose(controlled(pauli_x(d)), 1e-9)


def test_mesh_json_round_trip():
    m = decompose(haar_ish(4, np.random.default_rng(9)))
    data = json.loads(json.dumps(m.to_dict()))
    for item in data["elements"]:
        assert set(item) == {"kind", "modes", "theta", "phi"}
        assert item["kind"] in ("bs", "ps")
    assert BeamsplitterMesh.from_dict(data) == m
    with pytest.raises(ValueError):
        BeamsplitterMesh.from_dict({"d": 2, "elements": [{"kind": "mzi", "modes": [0, 1]}]})
