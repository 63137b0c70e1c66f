import os

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from ql1pipe.probgen import (Rng, gen_elastic_net, gen_sigrec, gen_strict_comp,
                             gen_suite, generate, manifest_from_paths,
                             read_manifest)
from ql1pipe.problem import OperatorKind, read_problem, write_problem
from ql1pipe.solver.subgrad import compute_v

MASK = (1 << 64) - 1


def splitmix64(seed, count):
    """Scalar reference implementation."""
    state = seed & MASK
    out = list()
    for _ in range(count):
        state = (state + 0x9E3779B97F4A7C15) & MASK
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
        out.append(z ^ (z >> 31))

    return out


class TestRng:

    def test_seed_zero(self):
        rng = Rng(0)
        assert [rng.next() for _ in range(4)] == [0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4,
                                                  0x06C45D188009454F, 0xF88BB8A8724C81EC]

    def test_seed_one(self):
        assert [int(z) for z in Rng(1).next_block(4)] == [0x910A2DEC89025CC1, 0xBEEB8DA1658EEC67,
                                                          0xF893A2EEFB32555E, 0x71C18690EE42C90B]

    def test_matches_scalar_reference(self):
        rng = Rng(0xDEADBEEF)
        block = [int(z) for z in rng.next_block(10)] + [rng.next() for _ in range(6)]
        assert block == splitmix64(0xDEADBEEF, 16)

    def test_negative_and_large_seeds_wrap(self):
        assert Rng(-1).next() == splitmix64(MASK, 1)[0]
        assert Rng(1 << 64).next() == Rng(0).next()

    def test_uniforms(self):
        u = Rng(42).uniforms(1000)
        expected = np.array([(z >> 11) * 2.0 ** -53 for z in splitmix64(42, 1000)])
        assert_array_equal(u, expected)
        assert np.all((u >= 0.0) & (u < 1.0))

    def test_normals_use_the_cosine_branch(self):
        z = Rng(5).normals(50)
        u = np.array([(w >> 11) * 2.0 ** -53 for w in splitmix64(5, 100)])
        assert_allclose(z, np.sqrt(-2.0 * np.log(u[0::2])) * np.cos(2.0 * np.pi * u[1::2]), rtol=1e-14, atol=1e-15)

    def test_streams_continue(self):
        rng = Rng(9)
        first = rng.normals(3); second = rng.normals(3)
        assert_array_equal(np.concatenate([first, second]), Rng(9).normals(6))

    def test_sample_positions(self):
        positions = Rng(3).sample_positions(50, 20)
        assert len(set(positions.tolist())) == 20
        assert positions.min() >= 0 and positions.max() < 50
        assert_array_equal(positions, Rng(3).sample_positions(50, 20))
        assert Rng(3).sample_positions(5, 0).size == 0
        assert sorted(Rng(4).sample_positions(6, 6).tolist()) == list(range(6))

        with pytest.raises(ValueError):
            Rng(3).sample_positions(5, 6)


class TestElasticNet:

    def test_structure(self):
        inst = gen_elastic_net(m=6, n=9, scale=2.0, gamma=0.5, tau=1.0, seed=1)
        P = inst.problem
        assert P.op.kind is OperatorKind.FACTORED
        assert P.op.B.shape == (6, 9) and P.op.gamma == 0.5 and P.tau == 1.0
        rng = Rng(1)
        B = rng.normals(54).reshape(6, 9)
        y = 2.0 * rng.normals(6)
        assert_array_equal(P.op.B, B)
        assert_allclose(P.b, B.T @ y)
        assert inst.meta == {"family": "elastic_net", "seed": 1,
                             "params": {"m": 6, "n": 9, "scale": 2.0, "gamma": 0.5, "tau": 1.0}}

    def test_same_seed_same_file(self, tmp_path):
        paths = [str(tmp_path / "a.ql1p"), str(tmp_path / "b.ql1p")]
        for path in paths:
            write_problem(path, gen_elastic_net(m=5, n=7, scale=1.0, gamma=0.0, tau=0.1, seed=77).problem)

        with open(paths[0], "rb") as f1, open(paths[1], "rb") as f2:
            assert f1.read() == f2.read()

    def test_different_seeds_differ(self):
        a = gen_elastic_net(m=5, n=7, scale=1.0, gamma=0.0, tau=0.1, seed=1).problem
        b = gen_elastic_net(m=5, n=7, scale=1.0, gamma=0.0, tau=0.1, seed=2).problem
        assert not np.array_equal(a.op.B, b.op.B)

    def test_rejects_oversized_dimensions(self):
        with pytest.raises(ValueError):
            gen_elastic_net(m=1 << 16, n=1 << 16, scale=1.0, gamma=0.0, tau=1.0, seed=0)

    def test_rejects_negative_gamma(self):
        with pytest.raises(ValueError):
            gen_elastic_net(m=2, n=2, scale=1.0, gamma=-1.0, tau=1.0, seed=0)


class TestSigrec:

    def test_signal(self):
        inst = gen_sigrec(m=16, n=64, signal_nnz=5, noise_sigma=0.01, gamma=0.0, tau=0.01, seed=4)
        signal = inst.meta["signal"]
        assert np.count_nonzero(signal) == 5
        assert set(np.abs(signal[signal != 0]).tolist()) == {1.0}
        assert inst.problem.op.B.shape == (16, 64)

    def test_empty_signal_has_zero_solution(self):
        inst = gen_sigrec(m=16, n=32, signal_nnz=0, noise_sigma=0.1, gamma=0.0, tau=1.0, seed=4)
        P = inst.problem
        tau = float(np.max(np.abs(P.b)))
        assert_array_equal(compute_v(np.zeros(P.n), -P.b, tau), np.zeros(P.n))

    def test_rejects_wide_encoding(self):
        with pytest.raises(ValueError):
            gen_sigrec(m=10, n=5, signal_nnz=1, noise_sigma=0.0, gamma=0.0, tau=1.0, seed=0)


class TestStrictComp:

    def test_solution_satisfies_optimality(self):
        inst = gen_strict_comp(n=40, nnz=12, cond_target=1e3, tau=0.3, margin=0.2, seed=5)
        P = inst.problem
        A = P.op.matrix()
        g = A @ inst.x_star - P.b
        assert np.max(np.abs(compute_v(inst.x_star, g, P.tau))) <= 1e-10
        assert np.count_nonzero(inst.x_star) == 12
        nz = np.abs(inst.x_star[inst.x_star != 0])
        assert nz.min() >= 0.5 and nz.max() <= 1.5
        assert np.all(np.abs(g[inst.x_star == 0]) <= 0.8 * P.tau + 1e-12)

    def test_spectrum(self):
        inst = gen_strict_comp(n=30, nnz=5, cond_target=100.0, tau=1.0, margin=0.2, seed=6, L=2.0)
        eigs = np.linalg.eigvalsh(inst.problem.op.matrix())
        assert eigs[-1] == pytest.approx(2.0, rel=1e-10)
        assert eigs[0] == pytest.approx(0.02, rel=1e-8)

    def test_empty_support(self):
        inst = gen_strict_comp(n=10, nnz=0, cond_target=10.0, tau=0.5, margin=0.25, seed=2)
        assert np.all(inst.x_star == 0.0)
        assert np.max(np.abs(inst.problem.b)) <= 0.75 * 0.5 + 1e-15

    def test_rejects_bad_margin(self):
        with pytest.raises(ValueError):
            gen_strict_comp(n=10, nnz=2, cond_target=10.0, tau=0.5, margin=1.0, seed=2)


def test_generate_dispatch():
    inst = generate("strict_comp", 3, n=8, nnz=2, cond_target=5.0, tau=0.1, margin=0.5)
    assert inst.meta["family"] == "strict_comp" and inst.meta["seed"] == 3
    with pytest.raises(ValueError):
        generate("lasso", 0)


class TestManifest:

    def test_gen_suite_roundtrip(self, tmp_path):
        directives = [("en1", "elastic_net", 1, {"m": 4, "n": 6, "scale": 1.0, "gamma": 0.1, "tau": 0.5}),
                      ("sc1", "strict_comp", 2, {"n": 6, "nnz": 2, "cond_target": 10.0, "tau": 0.1, "margin": 0.5})]
        out_dir = str(tmp_path / "suite")
        manifest = gen_suite(directives, out_dir)

        assert list(manifest["problem"]) == ["en1", "sc1"]
        assert os.path.isfile(os.path.join(out_dir, "manifest.csv"))

        again = read_manifest(os.path.join(out_dir, "manifest.csv"))
        assert list(again["problem"]) == ["en1", "sc1"]
        assert list(again["path"]) == list(manifest["path"])
        assert read_problem(again["path"][1]).n == 6

    def test_missing_manifest(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            read_manifest(str(tmp_path / "manifest.csv"))

    def test_manifest_from_paths(self, tmp_path):
        paths = [str(tmp_path / "b.ql1p"), str(tmp_path / "a.ql1p")]
        manifest = manifest_from_paths(paths)
        assert list(manifest["problem"]) == ["a", "b"]
