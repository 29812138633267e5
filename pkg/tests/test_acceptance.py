"""Exit criteria for the sorter build, one test per criterion.

A PASS/FAIL line per criterion is printed in the terminal summary.
"""

import json
import time

import numpy as np
import pytest

from qsorter import cli
from qsorter.algebra import CompositeState, controlled, fourier, identity, pauli_x, pauli_z, tensor
from qsorter.devices import OamBasisMap, awg_design, awg_module, oam_module, pbs_module
from qsorter.mesh import decompose, reconstruct
from qsorter.sorter import (
    SorterSpec,
    build_michelson,
    build_mzi,
    efficiency,
    ideal_module,
    interferometer,
    simulate,
    sorting_matrix,
    sweep_perturbations,
)

from oracles import exact_awg_solutions, five_factor_michelson, reflection_perm


def criterion(number, title):
    return pytest.mark.criterion(number, title)


@criterion(1, "diagonalization (1 x F^dag) C(Z_d) (1 x F) = C(X_d), d = 2..32, 1e-12, < 5 s")
def test_ac1_diagonalization():
    start = time.perf_counter()
    worst = 0.0
    for d in range(2, 33):
        left = tensor(identity(d), fourier(d).dag).entries
        cz = np.diag(controlled(pauli_z(d)).entries)
        # C(Z_d) is diagonal: multiplying by it scales columns
        product = (left * cz[None, :]) @ tensor(identity(d), fourier(d)).entries
        worst = max(worst, controlled(pauli_x(d)).max_diff(product))
    elapsed = time.perf_counter() - start
    print(f"AC1 max error {worst:.2e}, {elapsed:.2f} s")
    assert worst <= 1e-12
    assert elapsed < 5


@criterion(2, "ideal OAM MZI sorts with efficiency 1, d = 2..64, diag >= 1 - 1e-10, < 30 s")
def test_ac2_full_efficiency():
    start = time.perf_counter()
    lowest = 1.0
    for d in range(2, 65):
        p = sorting_matrix(build_mzi(SorterSpec(d, oam_module(OamBasisMap.standard(d)))))
        assert np.max(np.abs(p.p - np.eye(d))) <= 1e-10, d
        lowest = min(lowest, efficiency(p)[0])
    elapsed = time.perf_counter() - start
    print(f"AC2 lowest diagonal {lowest!r}, {elapsed:.2f} s")
    assert lowest >= 1 - 1e-10
    assert elapsed < 30


@criterion(3, "PBS: d=2 module is CNOT; H -> port 0, V -> port 1 with probability 1 +- 1e-12")
def test_ac3_pbs():
    u = build_mzi(SorterSpec(2, pbs_module()))
    cnot = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])
    assert u.allclose(cnot, 1e-12)
    p = sorting_matrix(u).p
    assert abs(p[0, 0] - 1) <= 1e-12
    assert abs(p[1, 1] - 1) <= 1e-12


@criterion(4, "entanglement: 100 random superpositions per d in {2,4,8,16}, fidelity 1 within 1e-12")
def test_ac4_entanglement():
    rng = np.random.default_rng(2016)
    worst = 0.0
    for d in (2, 4, 8, 16):
        u = build_mzi(SorterSpec(d, ideal_module(d)))
        for _ in range(100):
            a = rng.normal(size=d) + 1j * rng.normal(size=d)
            a /= np.linalg.norm(a)
            target = np.zeros((d, d), dtype=complex)
            target[np.arange(d), np.arange(d)] = a
            fid = simulate(u, CompositeState.on_port(a, 0)).fidelity(CompositeState(d, target.ravel()))
            worst = max(worst, abs(fid - 1))
    print(f"AC4 max |fidelity - 1| {worst:.2e}")
    assert worst <= 1e-12


@criterion(5, "output gate F relabels ports j -> -j mod d, d = 2..16")
def test_ac5_relabeling():
    for d in range(2, 17):
        p = sorting_matrix(build_mzi(SorterSpec(d, ideal_module(d), output_gate="f"))).p
        assert np.max(np.abs(p - reflection_perm(d))) <= 1e-10, d


@criterion(6, "Michelson: retroreflector permutes j -> -j; mirror + OAM sends all to port 0 with s -> -s, d = 2..8")
def test_ac6_michelson():
    for d in range(2, 9):
        oam_map = OamBasisMap.standard(d)
        module = oam_module(oam_map)
        retro = build_michelson(SorterSpec(d, module, architecture="michelson"))
        p = sorting_matrix(retro).p
        assert np.max(np.abs(p - reflection_perm(d))) <= 1e-10
        assert retro.allclose(five_factor_michelson(oam_map.levels, mirror=False), 1e-10)

        mirror = build_michelson(SorterSpec(d, module, architecture="michelson", reflector="mirror"))
        assert mirror.allclose(five_factor_michelson(oam_map.levels, mirror=True), 1e-10)
        p = sorting_matrix(mirror).p
        assert np.max(np.abs(p[0] - 1)) <= 1e-10
        for s in range(d):
            out = simulate(mirror, CompositeState.basis(d, s, 0))
            assert abs(out.fidelity(CompositeState.basis(d, (-s) % d, 0)) - 1) <= 1e-10


@criterion(7, "AWG: lambda=(3,2) gives L=(6,3), residual 0, identity sorting; lambda=(2,1) inexact")
def test_ac7_awg():
    design = awg_design(2, [3, 2], search_bound=50)
    exact = exact_awg_solutions([3, 2], 50)
    assert design.lengths == (6.0, 3.0) == (float(exact[0][0]), float(exact[1][0]))
    assert design.residual == 0
    p = sorting_matrix(build_mzi(SorterSpec(2, awg_module(design)))).p
    assert np.max(np.abs(p - np.eye(2))) <= 1e-10

    assert exact_awg_solutions([2, 1], 50)[1] == []
    infeasible = awg_design(2, [2, 1], search_bound=50)
    assert infeasible.residual > 0
    assert not infeasible.exact


@criterion(8, "mesh: decompose F, d in {2,4,8,16,32}: error < 1e-10, <= d(d-1)/2 splitters, sorter within 1e-9")
def test_ac8_mesh():
    for d in (2, 4, 8, 16, 32):
        f = fourier(d)
        mesh = decompose(f)
        f_mesh = reconstruct(mesh)
        assert f_mesh.max_diff(f) < 1e-10
        assert len(mesh.beamsplitters) <= d * (d - 1) // 2
        u = interferometer(ideal_module(d).phases, f_mesh, f_mesh.dag)
        assert u.max_diff(controlled(pauli_x(d))) <= 1e-9


@criterion(9, "compare-cascade: d=8 -> 7 MZIs, 14 prisms, 3 holograms vs 1 interferometer + 8 prisms")
def test_ac9_cascade(capsys):
    assert cli.main(["compare-cascade", "--d", "8"]) == 0
    text = capsys.readouterr().out
    assert "cascade: 7 MZIs, 14 Dove prisms, 3 holograms" in text
    assert "this scheme: 1 interferometer, 8 Dove prisms" in text
    report = cli.compare_cascade(8)
    assert report["cascade"] == {"applicable": True, "mzis": 7, "dove_prisms": 14, "holograms": 3, "stages": 3}
    assert report["this_scheme"]["interferometers"] == 1 and report["this_scheme"]["dove_prisms"] == 8
    assert cli.main(["compare-cascade", "--d", "6"]) == 0
    assert "not applicable (d not a power of 2)" in capsys.readouterr().out


@criterion(10, "noise: sigma=0 gives exactly (1.0, 1.0); d=2 crosstalk (1+cos delta)/2 within 1e-12; seeded sweeps byte-identical")
def test_ac10_noise(tmp_path):
    for d in (2, 3, 4, 8):
        res = sweep_perturbations(SorterSpec(d, ideal_module(d)), 0.0, 25, seed=9)
        assert all((w, m) == (1.0, 1.0) for _, w, m in res.rows)

    for delta in (0.0, np.pi / 2, np.pi):
        spec = SorterSpec(2, pbs_module(), perturbations=[0.0, delta])
        _, mean = efficiency(sorting_matrix(build_mzi(spec)))
        assert abs(mean - (1 + np.cos(delta)) / 2) <= 1e-12

    cfg = tmp_path / "sweep.json"
    cfg.write_text(json.dumps({"d": 4, "observable": "oam",
                               "sweep": {"sigmas": [0.0, 0.05, 0.2], "trials": 200, "seed": 42}}))
    outs = [tmp_path / "a.json", tmp_path / "b.json"]
    for out in outs:
        assert cli.main(["sweep", "--config", str(cfg), "--out", str(out)]) == 0
    assert outs[0].read_bytes() == outs[1].read_bytes()
