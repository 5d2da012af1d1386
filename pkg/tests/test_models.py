import itertools
import math

import numpy as np
import pytest

from darwinbounds import branching as br
from darwinbounds import correlations as corr
from darwinbounds import models
from darwinbounds import qstate as qs
from darwinbounds.models import CMaybeParams
from darwinbounds.qstate import FragmentSpec


class TestCMaybeGate:
    def test_full_coupling_is_controlled_phase(self):
        gate = models.cmaybe_gate(1.0)
        want = np.diag([1.0, 1.0, 1.0, -1.0])
        assert np.allclose(gate, want, atol=1e-12)

    def test_zero_coupling_is_controlled_flip(self):
        gate = models.cmaybe_gate(0.0)
        want = np.eye(4)[:, [0, 1, 3, 2]]
        assert np.allclose(gate, want, atol=1e-12)

    @pytest.mark.parametrize("a", [0.1, 0.6, 0.9])
    def test_unitarity(self, a):
        gate = models.cmaybe_gate(a)
        assert np.max(np.abs(gate @ gate.conj().T - np.eye(4))) < 1e-12
        assert np.allclose(gate[:2, :2], np.eye(2))
        assert np.allclose(gate[:2, 2:], 0.0)

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            models.cmaybe_gate(1.5)
        with pytest.raises(ValueError):
            CMaybeParams(-0.1, 3)


class TestCMaybeUniverse:
    def test_zero_coupling_gives_ghz(self):
        bs = models.cmaybe_universe(CMaybeParams(0.0, 4))
        ghz = models.ghz(5)
        assert np.allclose(br.to_dense(bs).amplitudes, br.to_dense(ghz).amplitudes, atol=1e-12)

    def test_full_coupling_gives_product(self):
        bs = models.cmaybe_universe(CMaybeParams(1.0, 4))
        dense = br.to_dense(bs)
        plus = np.array([1.0, 1.0]) / math.sqrt(2.0)
        want = plus
        for _ in range(4):
            want = np.kron(want, [1.0, 0.0])
        assert np.allclose(dense.amplitudes, want, atol=1e-12)

    def test_dense_and_branching_agree_on_all_fragments(self):
        params = CMaybeParams(0.5, 3)
        bs = models.cmaybe_universe(params)
        dense = models.cmaybe_universe_dense(params)
        for r in range(0, 5):
            for frag in itertools.combinations(range(4), r):
                f = FragmentSpec(frag)
                assert br.marginal_entropy(bs, f) == pytest.approx(
                    qs.schmidt_entropy(dense, f), abs=1e-10
                )


class TestClosedForms:
    def test_ghz_endpoint(self):
        cf = models.closed_forms(CMaybeParams(0.0, 4))
        assert (cf.H_S, cf.H_eps, cf.J_bar, cf.D_bar, cf.delta) == (1.0, 1.0, 1.0, 0.0, 0.0)

    def test_product_endpoint(self):
        cf = models.closed_forms(CMaybeParams(1.0, 4))
        assert (cf.H_S, cf.H_eps, cf.J_bar, cf.D_bar, cf.delta) == (0.0, 0.0, 0.0, 0.0, 0.0)

    def test_midpoint_values(self):
        cf = models.closed_forms(CMaybeParams(0.5, 4))
        assert cf.H_S == pytest.approx(0.9971803988942642, abs=1e-12)
        assert cf.H_eps == pytest.approx(0.8112781244591328, abs=1e-12)
        assert cf.J_bar == pytest.approx(0.6468955966706942, abs=1e-12)
        assert cf.D_bar == pytest.approx(0.17286351839420538, abs=1e-12)
        assert cf.delta == pytest.approx(0.35127525833037593, abs=1e-12)

    def test_single_environment_edge(self):
        cf = models.closed_forms(CMaybeParams(0.7, 1))
        # with one environment qubit the classical record is everything
        assert cf.J_bar == pytest.approx(cf.H_S, abs=1e-12)
        assert cf.D_bar == pytest.approx(cf.H_eps, abs=1e-12)

    @pytest.mark.parametrize("n", range(2, 11))
    def test_pipeline_agreement_on_grid(self, n):
        worst = 0.0
        for a in np.linspace(0.0, 1.0, 101):
            cf = models.closed_forms(CMaybeParams(float(a), n))
            bs = models.cmaybe_universe(CMaybeParams(float(a), n))
            h_s = br.marginal_entropy(bs, FragmentSpec([0]))
            h_e = br.marginal_entropy(bs, FragmentSpec([1]))
            assert abs(h_s - cf.H_S) < 1e-9
            assert abs(h_e - cf.H_eps) < 1e-9
            rep = corr.fragment_report(bs, FragmentSpec([1]))
            delta = corr.information_deficit(bs, FragmentSpec([1]))
            worst = max(worst, abs(rep.classical_J - cf.J_bar),
                        abs(rep.discord_D - cf.D_bar), abs(delta - cf.delta))
        assert worst < 1e-6

    def test_two_site_saturation(self):
        for a in np.linspace(0.0, 1.0, 101):
            cf = models.closed_forms(CMaybeParams(float(a), 2))
            assert abs(cf.D_bar - cf.delta * cf.H_S) < 1e-6

    def test_bound_chain(self):
        for a in np.linspace(0.0, 1.0, 21):
            for n in (2, 5):
                cf = models.closed_forms(CMaybeParams(float(a), n))
                assert cf.D_bar + cf.J_bar <= cf.H_S + 1e-9


class TestGhz:
    def test_fragment_entropies(self):
        g = models.ghz(6)
        for r in range(1, 6):
            f = FragmentSpec(range(1, r + 1))
            assert br.marginal_entropy(g, f) == pytest.approx(1.0, abs=1e-12)

    def test_minimum_size(self):
        with pytest.raises(ValueError):
            models.ghz(1)


class TestHaarRandomPure:
    def test_seed_reproducibility(self):
        a = models.haar_random_pure((2, 2, 2), seed=11)
        b = models.haar_random_pure((2, 2, 2), seed=11)
        c = models.haar_random_pure((2, 2, 2), seed=12)
        assert np.array_equal(a.amplitudes, b.amplitudes)
        assert not np.array_equal(a.amplitudes, c.amplitudes)

    def test_normalized(self):
        state = models.haar_random_pure((4, 2), seed=5)
        assert np.vdot(state.amplitudes, state.amplitudes).real == pytest.approx(1.0, abs=1e-12)

    def test_dimension_cap(self):
        with pytest.raises(ValueError, match="cap"):
            models.haar_random_pure((2,) * 17, seed=0)

    def test_mean_marginal_purity_matches_haar_average(self):
        # E[tr(rho_A^2)] = (dA + dB) / (dA dB + 1) = 0.8 for two qubits
        n = 10_000
        vals = np.empty(n)
        for i in range(n):
            state = models.haar_random_pure((2, 2), seed=50_000 + i)
            rho = qs.partial_trace(state, FragmentSpec([0])).matrix
            vals[i] = np.trace(rho @ rho).real
        se = vals.std(ddof=1) / math.sqrt(n)
        assert abs(vals.mean() - 0.8) < 3.0 * se


class TestRandomBranching:
    def test_seed_reproducibility(self):
        a = models.random_branching(4, seed=2)
        b = models.random_branching(4, seed=2)
        assert np.array_equal(br.to_dense(a).amplitudes, br.to_dense(b).amplitudes)

    def test_normalized_dense(self):
        bs = models.random_branching(5, seed=9)
        amps = br.to_dense(bs).amplitudes
        assert np.vdot(amps, amps).real == pytest.approx(1.0, abs=1e-12)

    def test_dense_agreement_small(self):
        bs = models.random_branching(3, seed=4)
        dense = br.to_dense(bs)
        for frag in ([0], [1], [1, 2], [0, 3]):
            f = FragmentSpec(frag)
            assert br.marginal_entropy(bs, f) == pytest.approx(
                qs.schmidt_entropy(dense, f), abs=1e-10
            )

    def test_weight_specs(self):
        random_w = models.random_branching(3, seed=1, weight_spec="random")
        explicit = models.random_branching(3, seed=1, weight_spec=(0.6, 0.8))
        for bs in (random_w, explicit):
            amps = br.to_dense(bs).amplitudes
            assert np.vdot(amps, amps).real == pytest.approx(1.0, abs=1e-12)
