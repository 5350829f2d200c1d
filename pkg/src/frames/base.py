"""
Base types for frame computations: exceptions, frame families and partitions
"""

import logging
from dataclasses import dataclass
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

logger = logging.getLogger(__name__)


class FrameError(Exception):
    """Base class for every error raised by the frame library"""
    pass


class DimMismatch(FrameError):
    """A vector or coefficient list does not match the family's shape"""
    pass


class ShapeMismatch(FrameError):
    """Two families (or a family and a dual) disagree on count or dimension"""
    pass


class BadShape(FrameError):
    """Generator called with an impossible (dim, count) combination"""
    pass


class NotHermitian(FrameError):
    """An operator expected to be self-adjoint is not, within HERM_TOL"""
    pass


class NotPositiveDefinite(FrameError):
    """An operator has an eigenvalue at or below the positive-definiteness threshold"""
    pass


class NotAFrame(FrameError):
    """The family does not span C^d"""
    pass


class NotWovenAtPartition(FrameError):
    """The weaving at one particular partition is not a frame"""

    def __init__(self, message: str, sigma: Optional['PartitionMask'] = None):
        super().__init__(message)
        self.sigma = sigma


class NotWoven(FrameError):
    """Some weaving of the pair is not a frame; carries the first failing partition"""

    def __init__(self, message: str, sigma: Optional['PartitionMask'] = None):
        super().__init__(message)
        self.sigma = sigma


class TooLarge(FrameError):
    """Exhaustive partition enumeration refused because n exceeds max_n"""
    pass


class NoFreedom(FrameError):
    """n = d, so the canonical dual is the only dual"""
    pass


class GenerationFailed(FrameError):
    """A certified woven pair could not be produced within the retry budget"""
    pass


class FrameFamily:
    """
    Ordered family of n vectors in C^d.

    Stored as an (n, d) complex array, one row per vector, so that row i is
    phi_i. The array is read-only; every operation returns new families.
    Frame status is not checked here (see operators.frame_bounds).
    """

    def __init__(self, vectors, dim: Optional[int] = None):
        arr = np.array(vectors, dtype=complex)
        if arr.ndim == 1 and arr.size == 0 and dim is not None:
            arr = arr.reshape(0, dim)
        if arr.ndim != 2:
            raise DimMismatch(f"Frame vectors must form a 2-D array, got shape {arr.shape}")
        if dim is not None and arr.shape[1] != dim:
            raise DimMismatch(f"Vectors have length {arr.shape[1]}, expected dim {dim}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("Frame vectors must be finite (no NaN/Inf)")
        arr.setflags(write=False)
        self._vectors = arr

    @property
    def vectors(self) -> np.ndarray:
        return self._vectors

    @property
    def dim(self) -> int:
        return self._vectors.shape[1]

    @property
    def n(self) -> int:
        return self._vectors.shape[0]

    def __len__(self) -> int:
        return self.n

    def __getitem__(self, i: int) -> np.ndarray:
        return self._vectors[i]

    def __iter__(self) -> Iterator[np.ndarray]:
        return iter(self._vectors)

    def scaled(self, factor: complex) -> 'FrameFamily':
        """Family with every vector multiplied by factor"""
        return FrameFamily(self._vectors * factor)

    def allclose(self, other: 'FrameFamily', tol: float = 1e-12) -> bool:
        """Same shape and entries within tol"""
        if self._vectors.shape != other.vectors.shape:
            return False
        return bool(np.allclose(self._vectors, other.vectors, rtol=0.0, atol=tol))

    def __repr__(self):
        return f"FrameFamily(n={self.n}, dim={self.dim})"


@dataclass(frozen=True)
class PartitionMask:
    """
    A subset sigma of {0..n-1}; the complement is always derived, never stored.

    Integer form: bit i of the mask is membership of index i, so binary
    counting 0, 1, 2, ... enumerates partitions in the canonical order.
    String form: character i is '1' when i is in sigma ("1000" is {0} for n=4).
    """
    n: int
    bits: Tuple[bool, ...]

    def __post_init__(self):
        if len(self.bits) != self.n:
            raise ShapeMismatch(f"Mask has {len(self.bits)} bits for n={self.n}")

    @classmethod
    def from_int(cls, value: int, n: int) -> 'PartitionMask':
        if value < 0 or value >= (1 << n):
            raise ValueError(f"Mask value {value} out of range for n={n}")
        return cls(n, tuple(bool((value >> i) & 1) for i in range(n)))

    @classmethod
    def from_indices(cls, indices: Iterable[int], n: int) -> 'PartitionMask':
        chosen = set(indices)
        bad = [i for i in chosen if i < 0 or i >= n]
        if bad:
            raise ValueError(f"Indices {sorted(bad)} outside 0..{n - 1}")
        return cls(n, tuple(i in chosen for i in range(n)))

    @classmethod
    def from_bits(cls, text: str) -> 'PartitionMask':
        if any(c not in '01' for c in text):
            raise ValueError(f"Mask string must contain only 0/1, got {text!r}")
        return cls(len(text), tuple(c == '1' for c in text))

    @classmethod
    def full(cls, n: int) -> 'PartitionMask':
        return cls(n, (True,) * n)

    @classmethod
    def empty(cls, n: int) -> 'PartitionMask':
        return cls(n, (False,) * n)

    def complement(self) -> 'PartitionMask':
        return PartitionMask(self.n, tuple(not b for b in self.bits))

    def indices(self) -> List[int]:
        return [i for i, b in enumerate(self.bits) if b]

    def complement_indices(self) -> List[int]:
        return [i for i, b in enumerate(self.bits) if not b]

    def as_array(self) -> np.ndarray:
        return np.array(self.bits, dtype=bool)

    def to_int(self) -> int:
        return sum(1 << i for i, b in enumerate(self.bits) if b)

    def to_bits(self) -> str:
        return ''.join('1' if b else '0' for b in self.bits)

    def __contains__(self, i: int) -> bool:
        return self.bits[i]

    def __str__(self):
        return self.to_bits()


@dataclass(frozen=True)
class FrameBounds:
    """Optimal frame bounds: extreme eigenvalues of the frame operator"""
    lower: float
    upper: float

    def to_dict(self) -> dict:
        return {'A': self.lower, 'B': self.upper}


def as_vector(f: Sequence, dim: int) -> np.ndarray:
    """
    Coerce f to a complex vector of length dim

    Raises:
        DimMismatch: if the length differs from dim
    """
    vec = np.asarray(f, dtype=complex)
    if vec.ndim != 1 or vec.shape[0] != dim:
        raise DimMismatch(f"Vector of shape {vec.shape} does not live in C^{dim}")
    return vec


def as_vectors(f: Sequence, dim: int) -> np.ndarray:
    """
    Coerce one vector or a stack of row vectors to a (k, dim) complex array

    Raises:
        DimMismatch: if a row does not have length dim or the stack is empty
    """
    arr = np.asarray(f, dtype=complex)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] != dim:
        raise DimMismatch(f"Vectors of shape {np.shape(f)} do not live in C^{dim}")
    return arr
