import itertools
import math

import numpy as np
import pytest

from darwinbounds import branching as br
from darwinbounds import models
from darwinbounds import qstate as qs
from darwinbounds.qstate import FragmentSpec, overlap_entropy

from oracles import born_joint_distribution

ZERO = np.array([1.0, 0.0], dtype=complex)
ONE = np.array([0.0, 1.0], dtype=complex)


def equal_weights():
    w = 1.0 / math.sqrt(2.0)
    return (w, w)


class TestMakeBranching:
    def test_ghz_dense_equality(self):
        bs = br.make_branching(equal_weights(), [(ZERO, ONE)] * 4)
        dense = br.to_dense(bs)
        expected = np.zeros(16)
        expected[0] = expected[-1] = 1.0 / math.sqrt(2.0)
        assert np.allclose(dense.amplitudes, expected, atol=1e-12)

    def test_identical_environment_branches_give_product(self):
        bs = br.make_branching(equal_weights(), [(ZERO, ONE), (ZERO, ZERO), (ZERO, ZERO)])
        dense = br.to_dense(bs)
        plus = qs.tensor_product(
            [qs.PureState((2,), np.array([1, 1]) / math.sqrt(2))]
            + [qs.PureState((2,), ZERO)] * 2
        )
        assert np.allclose(dense.amplitudes, plus.amplitudes, atol=1e-12)

    @pytest.mark.parametrize("n_env", [2, 5, 10])
    @pytest.mark.parametrize("a", [0.0, 0.35, 0.8, 1.0])
    def test_cmaybe_matches_dense_circuit(self, n_env, a):
        bs = models.cmaybe_universe(models.CMaybeParams(a, n_env))
        dense = models.cmaybe_universe_dense(models.CMaybeParams(a, n_env))
        assert np.allclose(br.to_dense(bs).amplitudes, dense.amplitudes, atol=1e-12)

    def test_zero_branch_vector_rejected(self):
        with pytest.raises(ValueError, match="zero-norm"):
            br.make_branching(equal_weights(), [(ZERO, np.zeros(2))])

    def test_cancelling_branches_rejected(self):
        with pytest.raises(ValueError, match="normalizable"):
            br.make_branching((1.0, -1.0), [(ZERO, ZERO)], renormalize=True)

    def test_norm_violation_needs_flag(self):
        overlapping = [(ZERO, ZERO), (ZERO, (ZERO + ONE) / math.sqrt(2))]
        with pytest.raises(ValueError, match="renormalize"):
            br.make_branching(equal_weights(), overlapping)
        bs = br.make_branching(equal_weights(), overlapping, renormalize=True)
        assert np.vdot(br.to_dense(bs).amplitudes, br.to_dense(bs).amplitudes).real == pytest.approx(
            1.0, abs=1e-12
        )


class TestFragmentOverlap:
    @pytest.mark.parametrize("a", [0.0, 0.4, 1.0])
    def test_cmaybe_single_and_full(self, a):
        n = 5
        bs = models.cmaybe_universe(models.CMaybeParams(a, n))
        assert br.fragment_overlap(bs, FragmentSpec([1])) == pytest.approx(a, abs=1e-12)
        env = FragmentSpec(range(1, n + 1))
        assert br.fragment_overlap(bs, env) == pytest.approx(a**n, abs=1e-12)

    def test_ghz_orthogonal_branches(self):
        bs = models.ghz(4)
        for frag in ([0], [1], [1, 2], [0, 1, 2]):
            assert br.fragment_overlap(bs, FragmentSpec(frag)) == 0.0

    def test_empty_fragment(self):
        bs = models.ghz(3)
        assert br.fragment_overlap(bs, FragmentSpec([])) == 1.0


class TestMarginalEntropy:
    @pytest.mark.parametrize("a", [0.0, 0.3, 0.7, 1.0])
    @pytest.mark.parametrize("n", [2, 4, 9])
    def test_cmaybe_closed_values(self, a, n):
        bs = models.cmaybe_universe(models.CMaybeParams(a, n))
        assert br.marginal_entropy(bs, FragmentSpec([0])) == pytest.approx(
            overlap_entropy(a**n), abs=1e-12
        )
        assert br.marginal_entropy(bs, FragmentSpec([1])) == pytest.approx(
            overlap_entropy(a), abs=1e-12
        )
        for k in range(1, n):
            frag = FragmentSpec([0] + list(range(1, k + 1)))
            assert br.marginal_entropy(bs, frag) == pytest.approx(
                overlap_entropy(a ** (n - k)), abs=1e-12
            )

    @pytest.mark.parametrize("seed", range(4))
    def test_dense_agreement_all_fragments(self, seed):
        bs = models.random_branching(4, seed=seed)
        dense = br.to_dense(bs)
        n = bs.n_sites
        for r in range(0, n + 1):
            for frag in itertools.combinations(range(n), r):
                f = FragmentSpec(frag)
                assert br.marginal_entropy(bs, f) == pytest.approx(
                    qs.schmidt_entropy(dense, f), abs=1e-10
                )

    @pytest.mark.parametrize("seed", range(4))
    def test_purity_symmetry(self, seed):
        bs = models.random_branching(6, seed=seed)
        n = bs.n_sites
        for r in range(1, n):
            for frag in itertools.combinations(range(n), min(r, 3)):
                f = FragmentSpec(frag)
                assert br.marginal_entropy(bs, f) == pytest.approx(
                    br.marginal_entropy(bs, f.complement(n)), abs=1e-10
                )

    def test_permutation_covariance(self):
        bs = models.cmaybe_universe(models.CMaybeParams(0.45, 6))
        values = {
            br.marginal_entropy(bs, FragmentSpec(frag))
            for frag in itertools.combinations(range(1, 7), 3)
        }
        assert max(values) - min(values) < 1e-12


class TestMeasuredJointDistribution:
    def comp_bases(self, k):
        return [np.eye(2, dtype=complex)] * k

    def test_ghz_computational(self):
        bs = models.ghz(4)
        p = br.measured_joint_distribution(
            bs, FragmentSpec([1]), self.comp_bases(1), FragmentSpec([2]), self.comp_bases(1)
        )
        assert np.allclose(p, [[0.5, 0.0], [0.0, 0.5]], atol=1e-12)

    def test_product_universe_factorizes(self):
        bs = br.make_branching(
            equal_weights(), [(ZERO, ONE), (ZERO, ZERO), ((ZERO + ONE) / math.sqrt(2),) * 2]
        )
        rng = np.random.default_rng(5)
        q1, _ = np.linalg.qr(rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)))
        q2, _ = np.linalg.qr(rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)))
        p = br.measured_joint_distribution(bs, FragmentSpec([1]), [q1], FragmentSpec([2]), [q2])
        px = p.sum(axis=1, keepdims=True)
        py = p.sum(axis=0, keepdims=True)
        assert np.allclose(p, px @ py, atol=1e-12)

    @pytest.mark.parametrize("a", [0.5])
    def test_cmaybe_matches_born_oracle(self, a):
        bs = models.cmaybe_universe(models.CMaybeParams(a, 4))
        dense = br.to_dense(bs)
        rng = np.random.default_rng(11)
        bases_a = []
        bases_b = []
        for _ in range(2):
            q, _ = np.linalg.qr(rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)))
            bases_a.append(q)
        for _ in range(1):
            q, _ = np.linalg.qr(rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)))
            bases_b.append(q)
        frag_a, frag_b = FragmentSpec([1, 3]), FragmentSpec([4])
        got = br.measured_joint_distribution(bs, frag_a, bases_a, frag_b, bases_b)
        want = born_joint_distribution(
            dense.amplitudes, dense.dims, list(frag_a), bases_a, list(frag_b), bases_b
        )
        assert np.allclose(got, want, atol=1e-10)
        assert got.sum() == pytest.approx(1.0, abs=1e-10)

    @pytest.mark.parametrize("seed", range(3))
    def test_marginals_consistent(self, seed):
        bs = models.random_branching(5, seed=seed)
        rng = np.random.default_rng(seed + 100)
        mk_basis = lambda: np.linalg.qr(
            rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        )[0]
        ba, bb = [mk_basis(), mk_basis()], [mk_basis()]
        frag_a, frag_b = FragmentSpec([1, 2]), FragmentSpec([4])
        p = br.measured_joint_distribution(bs, frag_a, ba, frag_b, bb)
        # marginal of the joint equals the single-fragment distribution
        single = br.measured_joint_distribution(bs, frag_a, ba, FragmentSpec([3]), [np.eye(2)])
        assert np.allclose(p.sum(axis=1), single.sum(axis=1), atol=1e-12)

    def test_non_orthonormal_basis_rejected(self):
        bs = models.ghz(3)
        with pytest.raises(ValueError, match="orthonormal"):
            br.measured_joint_distribution(
                bs, FragmentSpec([1]), [np.ones((2, 2))], FragmentSpec([2]), [np.eye(2)]
            )

    def test_outcome_cap(self):
        bs = models.cmaybe_universe(models.CMaybeParams(0.5, 20))
        big = FragmentSpec(range(1, 10))
        other = FragmentSpec(range(10, 19))
        with pytest.raises(ValueError, match="cap"):
            br.measured_joint_distribution(
                bs, big, [np.eye(2)] * 9, other, [np.eye(2)] * 9
            )


class TestReducedPairState:
    @pytest.mark.parametrize("seed", range(3))
    def test_matches_dense_entropies(self, seed):
        bs = models.random_branching(4, seed=seed)
        pair = br.reduced_pair_state(bs, FragmentSpec([0]), FragmentSpec([2, 3]))
        joint_entropy = qs.von_neumann_entropy(pair)
        assert joint_entropy == pytest.approx(
            br.marginal_entropy(bs, FragmentSpec([0, 2, 3])), abs=1e-10
        )
        sys_marg = qs.partial_trace(pair, FragmentSpec([0]))
        assert qs.von_neumann_entropy(sys_marg) == pytest.approx(
            br.marginal_entropy(bs, FragmentSpec([0])), abs=1e-10
        )
