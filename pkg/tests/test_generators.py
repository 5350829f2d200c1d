import numpy as np
import pytest

import frames.generators as generators
from frames.base import BadShape, GenerationFailed, NotWoven, PartitionMask
from frames.generators import (
    GenSpec, generate, gen_onb, gen_dft, gen_mercedes, gen_random, gen_woven_pair
)
from frames.operators import frame_operator, frame_tightness, is_parseval


def test_onb():
    assert np.allclose(gen_onb(3).vectors, np.eye(3))
    with pytest.raises(BadShape):
        gen_onb(0)


@pytest.mark.parametrize("d,n", [(1, 1), (2, 4), (3, 7), (4, 4)])
def test_dft_is_parseval(d, n):
    family = gen_dft(d, n)
    assert family.n == n and family.dim == d
    assert is_parseval(family)
    assert np.allclose(np.linalg.norm(family.vectors, axis=1), np.sqrt(d / n))


def test_dft_shape_errors():
    with pytest.raises(BadShape):
        gen_dft(3, 2)
    with pytest.raises(BadShape):
        gen_dft(0, 4)


def test_mercedes_is_tight_with_three_halves():
    family = gen_mercedes()
    assert np.allclose(frame_operator(family), 1.5 * np.eye(2))
    assert frame_tightness(family) == (True, pytest.approx(1.5))


def test_random_is_seeded():
    first = gen_random(3, 6, seed=42)
    assert np.array_equal(first.vectors, gen_random(3, 6, seed=42).vectors)
    assert not np.array_equal(first.vectors, gen_random(3, 6, seed=43).vectors)
    with pytest.raises(BadShape):
        gen_random(3, 2, seed=0)


def test_woven_pair_is_deterministic():
    phi, psi, cert = gen_woven_pair(2, 5, 0.1, seed=7)
    phi2, psi2, cert2 = gen_woven_pair(2, 5, 0.1, seed=7)
    assert np.array_equal(phi.vectors, phi2.vectors)
    assert np.array_equal(psi.vectors, psi2.vectors)
    assert cert == cert2
    assert cert.complete and 0 < cert.universal_lower <= cert.universal_upper


def test_woven_pair_perturbation_radius():
    phi, psi, _ = gen_woven_pair(3, 6, 0.05, seed=1)
    shifts = np.linalg.norm(psi.vectors - phi.vectors, axis=1)
    assert np.allclose(shifts, 0.05)
    assert np.array_equal(phi.vectors, gen_random(3, 6, seed=1).vectors)


def test_zero_epsilon_gives_identical_frames():
    phi, psi, cert = gen_woven_pair(2, 4, 0.0, seed=3)
    assert phi.allclose(psi)


def test_negative_epsilon_rejected():
    with pytest.raises(BadShape):
        gen_woven_pair(2, 4, -0.1, seed=0)


def test_epsilon_is_halved_after_a_failed_certification(monkeypatch):
    real = generators.woven_bounds_bruteforce
    calls = []

    def fail_once(phi, psi, max_n):
        calls.append(psi)
        if len(calls) == 1:
            raise NotWoven("forced", PartitionMask.full(phi.n))
        return real(phi, psi, max_n=max_n)

    monkeypatch.setattr(generators, 'woven_bounds_bruteforce', fail_once)
    phi, psi, _ = gen_woven_pair(2, 4, 0.2, seed=0)
    assert len(calls) == 2
    assert np.allclose(np.linalg.norm(psi.vectors - phi.vectors, axis=1), 0.1)


def test_generation_failed_after_retries(monkeypatch):
    def never_woven(phi, psi, max_n):
        raise NotWoven("forced", PartitionMask.empty(phi.n))

    monkeypatch.setattr(generators, 'woven_bounds_bruteforce', never_woven)
    with pytest.raises(GenerationFailed):
        gen_woven_pair(2, 4, 0.1, seed=0, retries=3)


class TestGenSpec:

    @pytest.mark.parametrize("spec", [
        GenSpec(kind='spiral'),
        GenSpec(kind='random', dim=0),
        GenSpec(kind='dft', dim=4, count=3),
        GenSpec(kind='woven_pair', epsilon=-1.0),
        GenSpec(kind='random', seed=-5),
    ])
    def test_invalid(self, spec):
        with pytest.raises(BadShape):
            spec.validate()

    def test_mercedes_ignores_shape(self):
        GenSpec(kind='mercedes', dim=0, count=0).validate()

    def test_dict_round_trip(self):
        spec = GenSpec(kind='dft', dim=3, count=5, seed=2, epsilon=0.2)
        assert GenSpec.from_dict(spec.to_dict()) == spec
        assert GenSpec.from_dict({'kind': 'onb'}) == GenSpec(kind='onb')

    def test_generate_dispatch(self):
        assert generate(GenSpec(kind='onb', dim=2)).allclose(gen_onb(2))
        assert generate(GenSpec(kind='dft', dim=2, count=4)).allclose(gen_dft(2, 4))
        assert generate(GenSpec(kind='mercedes')).allclose(gen_mercedes())
        assert generate(GenSpec(kind='random', dim=2, count=3, seed=9)).allclose(gen_random(2, 3, 9))
        phi, psi, cert = generate(GenSpec(kind='woven_pair', dim=2, count=4, seed=1, epsilon=0.1))
        assert cert.partitions_checked == 16
