import math

import numpy as np
import pytest

from esslab import (
    Gaussian1D,
    MisScheme,
    compute_weights,
    ess_mis,
    estimate_zhat_variance,
    identity,
    mis_sample,
    mixture_log_weight,
    snis_estimate,
    stream,
    substream,
)
from esslab.experiments import mis_scheme, mis_target

TARGET = mis_target()
TARGET_VARIANCE = 7.0  # mixture second moment: mean 0, (1/3)(10 + 1 + 10)


class TestMisScheme:
    def test_kind_is_validated(self):
        with pytest.raises(ValueError):
            MisScheme("N2", (Gaussian1D(0.0, 1.0),))

    def test_mixture_has_equal_component_weights(self):
        psi = mis_scheme("N3", 2).mixture()
        assert all(w == 1.0 / 3.0 for w, _ in psi.components)

    def test_total_must_be_multiple_of_j_for_deterministic_schemes(self):
        scheme = mis_scheme("N1", 1)
        with pytest.raises(ValueError):
            mis_sample(scheme, TARGET, stream(0), 10)
        # R3 samples iid from the mixture: any count is fine
        mis_sample(mis_scheme("R3", 1), TARGET, stream(0), 10)


class TestScenario1Weights:
    """With psi identical to the target, N3 and R3 weights are exactly 1."""

    @pytest.mark.parametrize("kind", ["N3", "R3"])
    def test_all_log_weights_exactly_zero(self, kind):
        ws = mis_sample(mis_scheme(kind, 1), TARGET, stream(5), 48)
        assert np.all(ws.log_weights == 0.0)
        assert ws.provenance == kind

    def test_n1_weights_are_generally_not_one(self):
        ws = mis_sample(mis_scheme("N1", 1), TARGET, stream(5), 48)
        assert not np.allclose(ws.log_weights, 0.0)
        # first block is drawn from q_1 = N(-3, 1): weight = target / q_1
        q1 = Gaussian1D(-3.0, 1.0)
        x = ws.samples[:16]
        expected = TARGET.log_density(x) - q1.log_density(x)
        np.testing.assert_array_equal(ws.log_weights[:16], expected)


class TestSingleProposalReduction:
    def test_all_schemes_match_plain_is_weights(self):
        proposal = Gaussian1D(1.0, 2.0)
        target = Gaussian1D(0.0, 1.0)
        for kind in ("N1", "N3", "R3"):
            scheme = MisScheme(kind, (proposal,))
            ws = mis_sample(scheme, target, stream(12), 32)
            plain = compute_weights(target, proposal, ws.samples)
            np.testing.assert_array_equal(ws.log_weights, plain.log_weights)


class TestWeightFunctionEquality:
    """N3 and R3 share the weight function target/psi."""

    def test_sampled_weights_come_from_the_shared_function(self):
        scheme = mis_scheme("N3", 2)
        for kind in ("N3", "R3"):
            ws = mis_sample(mis_scheme(kind, 2), TARGET, stream(9), 30)
            np.testing.assert_array_equal(
                ws.log_weights, mixture_log_weight(scheme, TARGET, ws.samples)
            )

    def test_equality_on_a_shared_grid(self):
        xs = np.linspace(-8.0, 8.0, 101)
        a = mixture_log_weight(mis_scheme("N3", 3), TARGET, xs)
        b = mixture_log_weight(mis_scheme("R3", 3), TARGET, xs)
        np.testing.assert_array_equal(a, b)


class TestConsistency:
    """Scenario-1 target-mean estimates converge for every scheme."""

    @pytest.mark.parametrize("kind", ["N1", "N3", "R3"])
    def test_snis_estimate_near_target_mean(self, kind):
        total = 3 * 2 ** 14
        scheme = mis_scheme(kind, 1)
        reps = 30
        estimates = np.array([
            snis_estimate(mis_sample(scheme, TARGET, substream(777, r), total),
                          identity)
            for r in range(reps)
        ])
        se = estimates.std(ddof=1) / math.sqrt(reps)
        assert abs(estimates.mean()) < 3 * se


class TestZhatVariance:
    def test_scenario1_deterministic_mixture_weights_have_zero_variance(self):
        vz_n3 = estimate_zhat_variance(TARGET, mis_scheme("N3", 1), 48, 200, 3)
        vz_r3 = estimate_zhat_variance(TARGET, mis_scheme("R3", 1), 48, 200, 3)
        assert vz_n3 == 0.0 and vz_r3 == 0.0
        assert vz_n3 <= vz_r3

    def test_scenario2_stratification_does_not_hurt(self):
        reps = 3000
        vz_n3 = estimate_zhat_variance(TARGET, mis_scheme("N3", 2), 96, reps, 17)
        vz_r3 = estimate_zhat_variance(TARGET, mis_scheme("R3", 2), 96, reps, 18)
        band = 3.0 * (vz_n3 + vz_r3) * math.sqrt(2.0 / (reps - 1))
        assert vz_n3 <= vz_r3 + band


class TestEssMis:
    def test_zero_variance_gives_n(self):
        assert ess_mis(48, 0.0) == 48.0

    def test_unit_variance_halves_n(self):
        assert ess_mis(10, 1.0) == 5.0

    def test_validation(self):
        with pytest.raises(ValueError):
            ess_mis(0, 0.0)
        with pytest.raises(ValueError):
            ess_mis(10, -0.5)

    def test_single_proposal_variance_scales_as_var_w_over_n(self):
        # for iid single-proposal IS, Var[Zhat] = Var_q[W] / N
        target, proposal = Gaussian1D(0.0, 1.0), Gaussian1D(1.0, 1.0)
        n = 64
        true_var_w = math.e - 1.0
        reps = 20
        estimates = np.array([
            estimate_zhat_variance(target, MisScheme("R3", (proposal,)),
                                   n, 2000, 100 + r)
            for r in range(reps)
        ])
        se = estimates.std(ddof=1) / math.sqrt(reps)
        assert abs(estimates.mean() - true_var_w / n) < 3 * se
        value = ess_mis(n, float(estimates.mean()))
        assert value == pytest.approx(n / (1 + true_var_w / n), rel=0.05)
