import numpy as np
import pytest

from frames.base import PartitionMask, ShapeMismatch
from frames.generators import gen_woven_pair, gen_dft
from frames.weaving import weaving_context, canonical_weaving_dual, random_alternate_dual
from identities.base import InvalidDual, alt_dual_context
from identities.dual_bounds import (
    altdual_re_batch, altdual_complex_batch, altdual_weighted_batch,
    thm_altdual_re, thm_altdual_complex, thm_altdual_weighted
)

LAMBDAS = [-1.0, 0.0, 0.5, 1.0, 2.0]


@pytest.fixture(scope='module')
def woven_contexts():
    phi, psi, _ = gen_woven_pair(2, 5, 0.1, seed=17)
    return [weaving_context(phi, psi, PartitionMask.from_int(m, 5)) for m in range(32)]


def random_f(rng, d):
    return rng.standard_normal(d) + 1j * rng.standard_normal(d)


def random_weights(rng, n):
    return rng.standard_normal(n) + 1j * rng.standard_normal(n)


class TestAltDualContext:

    def test_partition_defect_vanishes_for_duals(self, woven_contexts, rng):
        for m, ctx in enumerate(woven_contexts):
            for theta in (canonical_weaving_dual(ctx), random_alternate_dual(ctx, seed=m)):
                assert alt_dual_context(ctx, theta).partition_defect() <= 1e-10
                weighted = alt_dual_context(ctx, theta, random_weights(rng, 5))
                assert weighted.partition_defect() <= 1e-10

    def test_unweighted_has_no_f_operators(self, woven_contexts):
        ctx = woven_contexts[5]
        adc = alt_dual_context(ctx, canonical_weaving_dual(ctx))
        assert adc.weights is None and adc.F_sigma is None

    def test_shape_errors(self, woven_contexts):
        ctx = woven_contexts[5]
        with pytest.raises(ShapeMismatch):
            alt_dual_context(ctx, gen_dft(2, 4))
        with pytest.raises(ShapeMismatch):
            alt_dual_context(ctx, canonical_weaving_dual(ctx), weights=[1, 1])

    def test_require_valid(self, woven_contexts):
        ctx = woven_contexts[9]
        alt_dual_context(ctx, canonical_weaving_dual(ctx)).require_valid()
        with pytest.raises(InvalidDual):
            alt_dual_context(ctx, canonical_weaving_dual(ctx).scaled(2.0)).require_valid()


class TestRealAndComplex:

    @pytest.mark.parametrize("lam", LAMBDAS)
    def test_real_identity_all_partitions(self, woven_contexts, rng, lam):
        for m, ctx in enumerate(woven_contexts):
            for theta in (canonical_weaving_dual(ctx), random_alternate_dual(ctx, seed=m)):
                record = thm_altdual_re(alt_dual_context(ctx, theta), random_f(rng, 2), lam)
                assert record.passed, record.to_dict()

    def test_complex_identity_all_partitions(self, woven_contexts, rng):
        for m, ctx in enumerate(woven_contexts):
            for theta in (canonical_weaving_dual(ctx), random_alternate_dual(ctx, seed=m)):
                record = thm_altdual_complex(alt_dual_context(ctx, theta), random_f(rng, 2))
                assert record.passed, record.to_dict()
                assert record.lam is None

    def test_self_pair_at_half_has_three_quarter_bound(self, rng):
        phi, _, _ = gen_woven_pair(2, 4, 0.1, seed=30)
        for m in range(16):
            ctx = weaving_context(phi, phi, PartitionMask.from_int(m, 4))
            f = random_f(rng, 2)
            record = thm_altdual_re(alt_dual_context(ctx, random_alternate_dual(ctx, seed=m)), f, 0.5)
            # Re s_sigma + Re s_sigma_c = ||f||^2 for any dual
            assert record.terms['lower_bound'] == pytest.approx(0.75 * np.vdot(f, f).real, rel=1e-9)
            assert record.equality_residual <= 1e-9
            assert record.passed

    def test_real_slack_is_a_square(self, woven_contexts, rng):
        ctx = woven_contexts[13]
        adc = alt_dual_context(ctx, random_alternate_dual(ctx, seed=3))
        f = random_f(rng, 2)
        lam = 0.7
        expected = np.linalg.norm((adc.E_sigma - lam * np.eye(2)) @ f) ** 2
        record = thm_altdual_re(adc, f, lam)
        assert record.slack * record.scale == pytest.approx(expected, rel=1e-8, abs=1e-12)

    def test_s_sigma_is_the_e_sigma_form(self, woven_contexts, rng):
        ctx = woven_contexts[26]
        adc = alt_dual_context(ctx, random_alternate_dual(ctx, seed=1))
        f = random_f(rng, 2)
        record = thm_altdual_complex(adc, f)
        assert record.terms['s_sigma'] == pytest.approx(np.vdot(f, adc.E_sigma @ f), rel=1e-10)
        assert record.terms['s_sigma_c'] == pytest.approx(np.vdot(f, adc.E_sigma_c @ f), rel=1e-10)

    def test_real_is_real_part_of_complex(self, woven_contexts, rng):
        ctx = woven_contexts[7]
        adc = alt_dual_context(ctx, random_alternate_dual(ctx, seed=7))
        f = random_f(rng, 2)
        re = thm_altdual_re(adc, f, 1.0).terms
        cx = thm_altdual_complex(adc, f).terms
        assert re['lhs'] == pytest.approx(cx['lhs'].real, rel=1e-12)
        assert re['rhs'] == pytest.approx(cx['rhs'].real, rel=1e-12)

    def test_doubled_canonical_dual_breaks_the_identity(self, rng):
        family = gen_dft(2, 4)
        ctx = weaving_context(family, family, PartitionMask.empty(4))
        adc = alt_dual_context(ctx, canonical_weaving_dual(ctx).scaled(2.0))
        f = np.array([1, 1j]) / np.sqrt(2)

        with pytest.raises(InvalidDual):
            thm_altdual_complex(adc, f)

        record = thm_altdual_complex(adc, f, check_dual=False)
        assert abs(record.terms['lhs'] - record.terms['rhs']) == pytest.approx(2.0, abs=1e-12)
        assert not record.passed

    def test_weighted_context_rejected(self, woven_contexts):
        ctx = woven_contexts[4]
        adc = alt_dual_context(ctx, canonical_weaving_dual(ctx), weights=np.ones(5))
        with pytest.raises(ValueError):
            thm_altdual_re(adc, [1, 0], 1.0)
        with pytest.raises(ValueError):
            thm_altdual_complex(adc, [1, 0])


class TestWeighted:

    def test_random_weights_all_partitions(self, woven_contexts, rng):
        for m, ctx in enumerate(woven_contexts):
            theta = random_alternate_dual(ctx, seed=m)
            adc = alt_dual_context(ctx, theta, random_weights(rng, 5))
            record = thm_altdual_weighted(adc, random_f(rng, 2))
            assert record.passed, record.to_dict()

    def test_sigma_indicator_reproduces_complex_identity(self, woven_contexts, rng):
        ctx = woven_contexts[21]
        theta = random_alternate_dual(ctx, seed=4)
        f = random_f(rng, 2)
        indicator = ctx.sigma.as_array().astype(float)

        weighted = thm_altdual_weighted(alt_dual_context(ctx, theta, indicator), f).terms
        plain = thm_altdual_complex(alt_dual_context(ctx, theta), f).terms
        assert weighted['lhs'] == pytest.approx(plain['lhs'], rel=1e-10)
        assert weighted['rhs'] == pytest.approx(plain['rhs'], rel=1e-10)
        assert weighted['weighted_norm_sq'] == pytest.approx(plain['e_sigma_sq'], rel=1e-10)
        assert weighted['rest_norm_sq'] == pytest.approx(plain['e_sigma_c_sq'], rel=1e-10)

    def test_complement_indicator_conjugates_the_sides(self, woven_contexts, rng):
        ctx = woven_contexts[21]
        theta = random_alternate_dual(ctx, seed=4)
        f = random_f(rng, 2)
        indicator = 1.0 - ctx.sigma.as_array().astype(float)

        weighted = thm_altdual_weighted(alt_dual_context(ctx, theta, indicator), f).terms
        plain = thm_altdual_complex(alt_dual_context(ctx, theta), f).terms
        assert weighted['lhs'] == pytest.approx(np.conj(plain['rhs']), rel=1e-10)
        assert weighted['rhs'] == pytest.approx(np.conj(plain['lhs']), rel=1e-10)

    def test_requires_weights(self, woven_contexts):
        ctx = woven_contexts[2]
        with pytest.raises(ValueError):
            thm_altdual_weighted(alt_dual_context(ctx, canonical_weaving_dual(ctx)), [1, 0])

    def test_invalid_dual(self, woven_contexts):
        ctx = woven_contexts[2]
        adc = alt_dual_context(ctx, canonical_weaving_dual(ctx).scaled(0.5), weights=np.ones(5))
        with pytest.raises(InvalidDual):
            thm_altdual_weighted(adc, [1, 0])


def test_batches_match_single_vector_records(woven_contexts, rng):
    ctx = woven_contexts[13]
    theta = random_alternate_dual(ctx, seed=3)
    adc = alt_dual_context(ctx, theta)
    weighted = alt_dual_context(ctx, theta, random_weights(rng, 5))
    stack = np.stack([random_f(rng, 2) for _ in range(6)])

    batches = [
        (altdual_re_batch(adc, stack, 0.5), lambda f: thm_altdual_re(adc, f, 0.5)),
        (altdual_complex_batch(adc, stack), lambda f: thm_altdual_complex(adc, f)),
        (altdual_weighted_batch(weighted, stack), lambda f: thm_altdual_weighted(weighted, f)),
    ]
    for batch, single in batches:
        assert len(batch) == 6 and batch.passed.all()
        for j, f in enumerate(stack):
            record = single(f)
            assert batch.record(j).terms['lhs'] == pytest.approx(record.terms['lhs'], rel=1e-12, abs=1e-14)
            assert batch.record(j).passed == record.passed
