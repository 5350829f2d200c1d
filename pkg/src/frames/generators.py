"""
Deterministic and seeded frame constructors used as test inputs.

Randomness comes from numpy's default generator (PCG64) seeded with the
integer seed; the same GenSpec always yields the same family bit for bit.
"""

import logging
from dataclasses import dataclass, asdict
from typing import Dict, Tuple, Union

import numpy as np

from config import (
    FRAME_KINDS, DEFAULT_DIM, DEFAULT_COUNT, DEFAULT_EPSILON, DEFAULT_MAX_N,
    GENERATION_RETRIES
)
from frames.base import FrameFamily, BadShape, NotWoven, GenerationFailed
from frames.operators import frame_bounds
from frames.weaving import WovenCertificate, woven_bounds_bruteforce

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GenSpec:
    """What to generate: kind, shape, seed and perturbation radius"""
    kind: str = 'random'
    dim: int = DEFAULT_DIM
    count: int = DEFAULT_COUNT
    seed: int = 0
    epsilon: float = DEFAULT_EPSILON

    def validate(self):
        """
        Raises:
            BadShape: on an unknown kind or an impossible shape
        """
        if self.kind not in FRAME_KINDS:
            raise BadShape(f"Unknown frame kind {self.kind!r}; expected one of {FRAME_KINDS}")
        if self.kind == 'mercedes':
            return
        if self.dim < 1:
            raise BadShape(f"dim must be >= 1, got {self.dim}")
        if self.kind != 'onb' and self.count < self.dim:
            raise BadShape(f"count={self.count} < dim={self.dim}: cannot be a frame")
        if self.epsilon < 0:
            raise BadShape(f"epsilon must be >= 0, got {self.epsilon}")
        if self.seed < 0:
            raise BadShape(f"seed must be >= 0, got {self.seed}")

    def to_dict(self) -> Dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict) -> 'GenSpec':
        """
        Raises:
            TypeError, ValueError: if a field does not convert to its type
        """
        casts = {'kind': str, 'dim': int, 'count': int, 'seed': int, 'epsilon': float}
        return cls(**{k: cast(data[k]) for k, cast in casts.items() if k in data})


def _complex_gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def gen_onb(d: int) -> FrameFamily:
    """Standard basis of C^d"""
    if d < 1:
        raise BadShape(f"dim must be >= 1, got {d}")
    return FrameFamily(np.eye(d, dtype=complex))


def gen_dft(d: int, n: int) -> FrameFamily:
    """
    Harmonic frame: phi_k[j] = exp(2 pi i j k / n) / sqrt(n), j < d, k < n

    The first d rows of the unitary n-point DFT matrix, read column-wise, so
    the frame operator is the identity (Parseval).
    """
    if d < 1 or n < d:
        raise BadShape(f"DFT frame needs 1 <= d <= n, got d={d}, n={n}")
    k = np.arange(n)[:, None]
    j = np.arange(d)[None, :]
    return FrameFamily(np.exp(2j * np.pi * j * k / n) / np.sqrt(n))


def gen_mercedes() -> FrameFamily:
    """Mercedes-Benz frame in R^2 (inside C^2): tight with A = 3/2"""
    r = np.sqrt(3) / 2
    return FrameFamily([[0.0, 1.0], [-r, -0.5], [r, -0.5]])


def gen_random(d: int, n: int, seed: int) -> FrameFamily:
    """
    n i.i.d. standard complex Gaussian vectors in C^d

    Raises:
        BadShape: if n < d
        NotAFrame: on a degenerate draw
    """
    if d < 1 or n < d:
        raise BadShape(f"Random frame needs 1 <= d <= n, got d={d}, n={n}")
    rng = np.random.default_rng(seed)
    family = FrameFamily(_complex_gaussian(rng, (n, d)))
    frame_bounds(family)
    return family


def gen_woven_pair(d: int, n: int, epsilon: float, seed: int,
                   max_n: int = DEFAULT_MAX_N,
                   retries: int = GENERATION_RETRIES) -> Tuple[FrameFamily, FrameFamily, WovenCertificate]:
    """
    Generate-and-certify a woven pair

    Phi is gen_random(d, n, seed); Psi = Phi + epsilon * u_i with seeded unit
    vectors u_i. If the pair is not woven, epsilon is halved (same directions)
    up to `retries` times.

    Returns:
        (Phi, Psi, certificate)

    Raises:
        GenerationFailed: if every attempt fails certification
    """
    if epsilon < 0:
        raise BadShape(f"epsilon must be >= 0, got {epsilon}")
    phi = gen_random(d, n, seed)

    # a separate stream so the perturbations do not shift Phi
    rng = np.random.default_rng([seed, 1])
    directions = _complex_gaussian(rng, (n, d))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)

    eps = float(epsilon)
    for attempt in range(retries + 1):
        psi = FrameFamily(phi.vectors + eps * directions)
        try:
            cert = woven_bounds_bruteforce(phi, psi, max_n=max_n)
            logger.info(f"Woven pair certified (d={d}, n={n}, epsilon={eps:g}, attempt {attempt + 1})")
            return phi, psi, cert
        except NotWoven as e:
            logger.warning(f"Attempt {attempt + 1}: not woven at sigma={e.sigma}, halving epsilon")
            eps /= 2

    raise GenerationFailed(
        f"No woven pair for d={d}, n={n}, seed={seed} after {retries + 1} attempts"
    )


def generate(spec: GenSpec) -> Union[FrameFamily, Tuple[FrameFamily, FrameFamily, WovenCertificate]]:
    """Dispatch a GenSpec to the matching constructor"""
    spec.validate()
    if spec.kind == 'onb':
        return gen_onb(spec.dim)
    if spec.kind == 'dft':
        return gen_dft(spec.dim, spec.count)
    if spec.kind == 'mercedes':
        return gen_mercedes()
    if spec.kind == 'random':
        return gen_random(spec.dim, spec.count, spec.seed)
    return gen_woven_pair(spec.dim, spec.count, spec.epsilon, spec.seed)
