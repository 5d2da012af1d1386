import numpy as np
import pytest

import darwinbounds._kernels._pure as pure
from darwinbounds import _kernels

try:
    import darwinbounds._kernels._core as core
except ImportError:
    core = None

needs_core = pytest.mark.skipif(core is None, reason="compiled backend not built")


def random_problem(d, m, seed):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((d * m, d * m)) + 1j * rng.standard_normal((d * m, d * m))
    rho = x @ x.conj().T
    rho /= np.trace(rho)
    q, _ = np.linalg.qr(rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m)))
    return np.ascontiguousarray(rho.reshape(d, m, d, m)), q


class TestPureKernelProperties:
    @pytest.mark.parametrize("d,m", [(2, 2), (2, 4), (3, 3), (4, 2)])
    def test_bounded_by_kept_entropy(self, d, m):
        rho4, basis = random_problem(d, m, seed=d * 10 + m)
        val = pure.measured_mutual_info(rho4, basis)
        rho_keep = np.einsum("iaja->ij", rho4)
        lam = np.linalg.eigvalsh(rho_keep)
        h_keep = -np.sum(lam[lam > 0] * np.log2(lam[lam > 0]))
        assert -1e-12 <= val <= h_keep + 1e-12

    def test_batch_matches_single(self):
        rho4, _ = random_problem(2, 2, seed=3)
        rng = np.random.default_rng(4)
        bases = np.stack([
            np.linalg.qr(rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)))[0]
            for _ in range(17)
        ])
        batch = pure.measured_mutual_info_batch(rho4, bases)
        singles = [pure.measured_mutual_info(rho4, b) for b in bases]
        assert np.allclose(batch, singles, atol=1e-13)

    def test_gram_entropy_limits(self):
        w = 1.0 / np.sqrt(2.0)
        # orthogonal kept branches, decohering complement: one full bit
        assert pure.rank_two_entropy(w, w, 0.0, 0.0) == pytest.approx(1.0, abs=1e-12)
        # coherence fully preserved by the complement: pure superposition
        assert pure.rank_two_entropy(w, w, 0.0, 1.0) == pytest.approx(0.0, abs=1e-12)
        # identical branches everywhere (weights carry the norm): pure marginal
        assert pure.rank_two_entropy(0.5, 0.5, 1.0, 1.0) == pytest.approx(0.0, abs=1e-12)
        # decohered complement with kept overlap x: entropy of ((1-x)/2,(1+x)/2)
        assert pure.rank_two_entropy(w, w, 0.5, 0.0) == pytest.approx(
            0.8112781244591328, abs=1e-12
        )


@needs_core
class TestBackendAgreement:
    @pytest.mark.parametrize("d,m", [(2, 2), (2, 4), (2, 8), (3, 4), (4, 2), (8, 2)])
    def test_measured_mutual_info(self, d, m):
        rho4, basis = random_problem(d, m, seed=d * 100 + m)
        assert core.measured_mutual_info(rho4, basis) == pytest.approx(
            pure.measured_mutual_info(rho4, basis), abs=1e-12
        )

    def test_batch(self):
        rho4, _ = random_problem(2, 4, seed=8)
        rng = np.random.default_rng(9)
        bases = np.stack([
            np.linalg.qr(rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)))[0]
            for _ in range(25)
        ])
        assert np.allclose(
            core.measured_mutual_info_batch(rho4, bases),
            pure.measured_mutual_info_batch(rho4, bases),
            atol=1e-12,
        )

    def test_gram_entropies(self):
        rng = np.random.default_rng(12)
        gin = rng.uniform(-1, 1, 50) + 1j * rng.uniform(-1, 1, 50)
        gin /= np.maximum(1.0, np.abs(gin))
        gout = rng.uniform(-1, 1, 50) + 1j * rng.uniform(-1, 1, 50)
        gout /= np.maximum(1.0, np.abs(gout))
        c0 = 0.6 + 0.2j
        c1 = np.sqrt(1.0 - abs(c0) ** 2)
        assert np.allclose(
            core.rank_two_entropy_batch(c0, c1, gin, gout),
            pure.rank_two_entropy_batch(c0, c1, gin, gout),
            atol=1e-12,
        )

    def test_read_only_input_accepted(self):
        rho4, basis = random_problem(2, 2, seed=1)
        rho4.flags.writeable = False
        assert core.measured_mutual_info(rho4, basis) == pytest.approx(
            pure.measured_mutual_info(rho4, basis), abs=1e-12
        )


class TestBackendSelection:
    def test_backend_reports_name(self):
        assert _kernels.BACKEND in ("compiled", "pure")

    def test_large_kept_dimension_routes_to_pure(self):
        # beyond the compiled kernel's stack limit the dispatcher must
        # transparently use the pure implementation
        rho4, basis = random_problem(20, 2, seed=6)
        got = _kernels.measured_mutual_info(rho4, basis)
        assert got == pytest.approx(pure.measured_mutual_info(rho4, basis), abs=1e-12)

    def test_pure_env_override(self, tmp_path):
        import subprocess
        import sys

        code = "from darwinbounds._kernels import BACKEND; print(BACKEND)"
        out = subprocess.run(
            [sys.executable, "-c", code],
            capture_output=True, text=True,
            env={"PATH": "/usr/bin:/bin", "DARWINBOUNDS_PURE": "1"},
            cwd=str(tmp_path),
        )
        assert out.stdout.strip() == "pure"
