import numpy as np
import pytest

from frames.base import PartitionMask
from frames.generators import gen_woven_pair, gen_dft
from frames.operators import frame_operator, partial_frame_operator
from frames.weaving import weaving_context
from identities.base import NotParsevalWeaving, NotTightWeaving
from identities.weaving_bounds import (
    weaving_sums, require_tight, thm_parseval_weaving, thm_general_weaving,
    thm_sandwich, thm_double, cor_tight
)

LAMBDAS = [-2.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0, 3.0]
F_HALF = np.array([1, 1]) / np.sqrt(2)


@pytest.fixture(scope='module')
def woven_contexts():
    phi, psi, _ = gen_woven_pair(3, 6, 0.15, seed=21)
    return [weaving_context(phi, psi, PartitionMask.from_int(m, 6)) for m in range(64)]


def random_f(rng, d):
    return rng.standard_normal(d) + 1j * rng.standard_normal(d)


class TestWeavingSums:

    def test_routes_agree(self, woven_contexts, rng):
        # 64 contexts x 16 vectors
        for ctx in woven_contexts:
            stack = np.stack([random_f(rng, 3) for _ in range(16)])
            direct = weaving_sums(ctx, stack, 'direct')
            operator = weaving_sums(ctx, stack, 'operator')
            assert len(direct) == len(operator) == 16
            scale = np.maximum(1.0, direct.a + direct.b)
            for name in ('a', 'b', 'x', 'y', 'sigma_synthesis_sq', 'sigma_c_synthesis_sq'):
                assert np.all(np.abs(getattr(direct, name) - getattr(operator, name)) <= 1e-11 * scale)

    def test_stack_matches_one_vector_at_a_time(self, woven_contexts, rng):
        ctx = woven_contexts[21]
        stack = np.stack([random_f(rng, 3) for _ in range(5)])
        together = weaving_sums(ctx, stack)
        for j, f in enumerate(stack):
            alone = weaving_sums(ctx, f)
            assert len(alone) == 1
            assert alone.x[0] == pytest.approx(together.x[j], rel=1e-12, abs=1e-14)
            assert alone.b[0] == pytest.approx(together.b[j], rel=1e-12, abs=1e-14)

    def test_unknown_route(self, woven_contexts):
        with pytest.raises(ValueError):
            weaving_sums(woven_contexts[0], [1, 0, 0], 'guess')

    def test_a_plus_b_is_weaving_form(self, woven_contexts, rng):
        ctx = woven_contexts[37]
        f = random_f(rng, 3)
        s = weaving_sums(ctx, f)
        assert s.a[0] + s.b[0] == pytest.approx(np.real(np.vdot(f, ctx.S_W @ f)), rel=1e-12)


class TestParsevalWeaving:

    def test_onb_with_itself_gives_one(self, onb2):
        ctx = weaving_context(onb2, onb2, PartitionMask.from_indices([0], 2))
        record = thm_parseval_weaving(ctx, F_HALF)
        assert record.terms['lhs'] == pytest.approx(1.0, abs=1e-12)
        assert record.terms['rhs'] == pytest.approx(1.0, abs=1e-12)
        assert record.passed

    def test_three_quarters_is_attained(self, doubled_basis):
        ctx = weaving_context(doubled_basis, doubled_basis, PartitionMask.from_bits("1100"))
        assert np.allclose(ctx.S_W_sigma, 0.5 * np.eye(2))
        record = thm_parseval_weaving(ctx, F_HALF)
        assert record.terms['lhs'] == pytest.approx(0.75, abs=1e-12)
        assert record.terms['rhs'] == pytest.approx(0.75, abs=1e-12)
        assert record.slack == pytest.approx(0.0, abs=1e-12)
        assert record.passed

    @pytest.mark.parametrize("n", [3, 4, 5])
    def test_dft_self_weavings(self, n, rng):
        family = gen_dft(2, n)
        for m in range(1 << n):
            ctx = weaving_context(family, family, PartitionMask.from_int(m, n))
            for _ in range(5):
                assert thm_parseval_weaving(ctx, random_f(rng, 2)).passed

    def test_rejects_non_parseval(self, mercedes):
        ctx = weaving_context(mercedes, mercedes, PartitionMask.from_bits("100"))
        with pytest.raises(NotParsevalWeaving):
            thm_parseval_weaving(ctx, F_HALF)


class TestGeneralWeaving:

    def test_self_pair_matches_single_frame_operators(self, rng):
        phi, _, _ = gen_woven_pair(2, 4, 0.1, seed=5)
        sigma = PartitionMask.from_bits("1010")
        ctx = weaving_context(phi, phi, sigma)
        f = random_f(rng, 2)
        S = frame_operator(phi)
        S_sigma = partial_frame_operator(phi, sigma)
        S_sigma_c = partial_frame_operator(phi, sigma.complement())
        S_inv = np.linalg.inv(S)

        a = np.real(np.vdot(f, S_sigma @ f))
        x = np.real(np.vdot(S_sigma @ f, S_inv @ S_sigma @ f))
        y = np.real(np.vdot(S_sigma_c @ f, S_inv @ S_sigma_c @ f))

        record = thm_general_weaving(ctx, f, lam=1.0)
        assert record.terms['a'] == pytest.approx(a, rel=1e-10)
        assert record.terms['x'] == pytest.approx(x, rel=1e-10)
        assert record.terms['lhs'] == pytest.approx(a + y, rel=1e-10)
        assert record.passed

    def test_self_pair_at_lambda_one_has_three_quarter_bound(self, rng):
        phi, _, _ = gen_woven_pair(3, 5, 0.1, seed=8)
        for m in range(32):
            ctx = weaving_context(phi, phi, PartitionMask.from_int(m, 5))
            record = thm_general_weaving(ctx, random_f(rng, 3), lam=1.0)
            t = record.terms
            assert t['lower_bound'] == pytest.approx(0.75 * (t['a'] + t['b']), rel=1e-12, abs=1e-15)
            assert record.equality_residual <= 1e-9
            assert record.passed

    def test_empty_sigma(self, woven_contexts, rng):
        ctx = woven_contexts[0]
        f = random_f(rng, 3)
        record = thm_general_weaving(ctx, f, lam=0.5)
        assert record.terms['a'] == pytest.approx(0.0, abs=1e-14)
        assert record.terms['x'] == pytest.approx(0.0, abs=1e-14)
        assert record.terms['y'] == pytest.approx(record.terms['b'], rel=1e-10)
        assert record.passed

    @pytest.mark.parametrize("lam", LAMBDAS)
    def test_all_partitions(self, woven_contexts, rng, lam):
        for ctx in woven_contexts:
            record = thm_general_weaving(ctx, random_f(rng, 3), lam)
            assert record.passed, record.to_dict()

    def test_slack_is_a_square(self, woven_contexts, rng):
        # lhs - bound = ||(P - lam/2) g||^2 with g = S_W^{1/2} f
        ctx = woven_contexts[22]
        f = random_f(rng, 3)
        lam = 0.8
        P = ctx.S_W_inv_sqrt @ ctx.S_W_sigma @ ctx.S_W_inv_sqrt
        g = ctx.S_W_sqrt @ f
        expected = np.linalg.norm((P - lam / 2 * np.eye(3)) @ g) ** 2
        record = thm_general_weaving(ctx, f, lam)
        assert record.slack * record.scale == pytest.approx(expected, rel=1e-8, abs=1e-12)


class TestSandwichAndDouble:

    @pytest.mark.parametrize("lam", LAMBDAS)
    def test_sandwich_all_partitions(self, woven_contexts, rng, lam):
        for ctx in woven_contexts:
            assert thm_sandwich(ctx, random_f(rng, 3), lam).passed

    def test_sandwich_upper_at_lambda_two_is_b(self, woven_contexts, rng):
        record = thm_sandwich(woven_contexts[45], random_f(rng, 3), lam=2.0)
        assert record.terms['upper_bound'] == pytest.approx(record.terms['b'], rel=1e-12)
        assert record.passed

    def test_sandwich_has_no_equality_part(self, woven_contexts, rng):
        assert thm_sandwich(woven_contexts[3], random_f(rng, 3), 1.0).equality_residual is None

    @pytest.mark.parametrize("lam", LAMBDAS)
    def test_double_all_partitions(self, woven_contexts, rng, lam):
        for ctx in woven_contexts:
            assert thm_double(ctx, random_f(rng, 3), lam).passed

    def test_double_lower_at_lambda_one(self, woven_contexts, rng):
        record = thm_double(woven_contexts[19], random_f(rng, 3), lam=1.0)
        t = record.terms
        assert t['lower_bound'] == pytest.approx(0.5 * t['a'] + 0.5 * t['b'], rel=1e-12)
        assert t['upper_bound'] == pytest.approx(t['a'] + t['b'], rel=1e-12)


class TestTightChain:

    def test_mercedes_full_sigma(self, mercedes, unit_vector):
        ctx = weaving_context(mercedes, mercedes, PartitionMask.full(3))
        record = cor_tight(ctx, unit_vector(2), lam=1.0)
        t = record.terms
        assert t['A'] == pytest.approx(1.5, abs=1e-12)
        assert t['second_middle'] == pytest.approx(2.25, abs=1e-12)
        assert t['second_upper'] == pytest.approx(2.25, abs=1e-12)
        assert t['upper_printed'] == pytest.approx(1.5, abs=1e-12)
        assert t['first_middle'] == pytest.approx(0.0, abs=1e-12)
        assert record.passed

    @pytest.mark.parametrize("lam", LAMBDAS)
    def test_mercedes_all_partitions(self, mercedes, rng, lam):
        for m in range(8):
            ctx = weaving_context(mercedes, mercedes, PartitionMask.from_int(m, 3))
            assert cor_tight(ctx, random_f(rng, 2), lam).passed

    def test_parseval_case_upper_printed_agrees(self, dft24, rng):
        ctx = weaving_context(dft24, dft24, PartitionMask.from_bits("0110"))
        t = cor_tight(ctx, random_f(rng, 2), lam=0.5).terms
        assert t['upper_printed'] == pytest.approx(t['second_upper'], rel=1e-12)

    def test_explicit_constant(self, dft24, rng):
        scaled = dft24.scaled(np.sqrt(2))
        ctx = weaving_context(scaled, scaled, PartitionMask.from_bits("1000"))
        assert require_tight(ctx) == pytest.approx(2.0, abs=1e-12)
        assert cor_tight(ctx, random_f(rng, 2), lam=1.0, A=2.0).passed
        with pytest.raises(NotTightWeaving):
            require_tight(ctx, A=1.0)

    def test_rejects_non_tight(self, onb_scaled_pair):
        ctx = weaving_context(*onb_scaled_pair, PartitionMask.from_indices([0], 2))
        with pytest.raises(NotTightWeaving):
            cor_tight(ctx, F_HALF, lam=1.0)


def test_zero_vector_passes_everything(woven_contexts, mercedes):
    ctx = woven_contexts[9]
    zero = np.zeros(3)
    for record in (thm_general_weaving(ctx, zero, 1.0), thm_sandwich(ctx, zero, 1.0),
                   thm_double(ctx, zero, 1.0)):
        assert record.passed
        assert record.slack == 0.0
    tight_ctx = weaving_context(mercedes, mercedes, PartitionMask.from_bits("101"))
    assert cor_tight(tight_ctx, np.zeros(2), 1.0).passed
