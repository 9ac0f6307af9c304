"""Quantum side of the three-setting N-party Bell test on GHZ correlations.

Contents:
    SettingsGrid        -- the fixed per-party measurement phase triples
    CorrelationTensor   -- flat 3^N full-correlation tensor with JSON I/O
    build_settings      -- construct the grid for N parties
    joint_probability   -- GHZ joint sign probability for one setting choice
    quantum_correlation -- full correlation cos(sum of phases)
    quantum_tensor      -- the 3^N tensor of quantum correlations
    tensor_norm_sq, tensor_entry_sum, scalar_product -- inner-product helpers
    entry_sum_closed_form -- closed form for the tensor entry sum

Every phase in the grid is an exact rational multiple of pi (stored as a
Fraction in units of pi) and every phase in play is a multiple of pi/6, so
tensor entries are evaluated through an exact 12-entry cosine table and land
exactly in {0, +-1/2, +-sqrt(3)/2, +-1}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

HALF_SQRT3 = math.sqrt(3.0) / 2.0

# cos(c * pi/6) for c = 0..11, built from exact constants rather than math.cos
# so that multiples of pi/2 are exactly 0/1 and the rest exactly +-1/2, +-s3/2.
COS12 = (
    1.0, HALF_SQRT3, 0.5, 0.0, -0.5, -HALF_SQRT3,
    -1.0, -HALF_SQRT3, -0.5, 0.0, 0.5, HALF_SQRT3,
)
SIN12 = (
    0.0, 0.5, HALF_SQRT3, 1.0, HALF_SQRT3, 0.5,
    0.0, -0.5, -HALF_SQRT3, -1.0, -HALF_SQRT3, -0.5,
)
_COS12_ARRAY = np.asarray(COS12, dtype=np.float64)

# Phase triples in units of pi: the first party's triple is offset by pi/6,
# every other party shares the unshifted triple. Spacing within a party is
# exactly pi/3.
FIRST_PARTY_PHASES = (Fraction(1, 6), Fraction(1, 2), Fraction(5, 6))
OTHER_PARTY_PHASES = (Fraction(0), Fraction(1, 3), Fraction(2, 3))


def _phase_class(phase: Fraction) -> int:
    """Integer c with phase = c * pi/6 (phase given in units of pi), mod 12."""
    c = phase * 6
    if c.denominator != 1:
        raise ValueError(f"phase {phase}*pi is not a multiple of pi/6")
    return int(c) % 12


@dataclass(frozen=True)
class SettingsGrid:
    """Measurement phases for N parties, three settings each.

    ``phases[k][i]`` is party k's phase for setting i, in units of pi.
    Party 0 must carry (1/6, 1/2, 5/6) and every later party (0, 1/3, 2/3);
    construction rejects anything else.
    """

    n_parties: int
    phases: tuple[tuple[Fraction, Fraction, Fraction], ...]

    def __post_init__(self) -> None:
        if self.n_parties < 2:
            raise ValueError(f"need at least 2 parties, got {self.n_parties}")
        if len(self.phases) != self.n_parties:
            raise ValueError("one phase triple required per party")
        for k, triple in enumerate(self.phases):
            expected = FIRST_PARTY_PHASES if k == 0 else OTHER_PARTY_PHASES
            if tuple(triple) != expected:
                raise ValueError(f"party {k} phases {triple} differ from the fixed grid")
            if not (triple[0] < triple[1] < triple[2]):
                raise ValueError("phases must be strictly increasing within a party")
            if triple[1] - triple[0] != Fraction(1, 3) or triple[2] - triple[1] != Fraction(1, 3):
                raise ValueError("settings within a party must be pi/3 apart")

    def phase_classes(self) -> tuple[tuple[int, int, int], ...]:
        """Each phase as its integer multiple of pi/6, per party and setting."""
        return tuple(
            (_phase_class(t[0]), _phase_class(t[1]), _phase_class(t[2]))
            for t in self.phases
        )

    def radians(self) -> tuple[tuple[float, float, float], ...]:
        """Phases as plain float radians."""
        return tuple(
            (float(t[0]) * math.pi, float(t[1]) * math.pi, float(t[2]) * math.pi)
            for t in self.phases
        )


def build_settings(n_parties: int) -> SettingsGrid:
    """Grid for ``n_parties`` parties: offset triple for party 0, shared triple after."""
    if n_parties < 2:
        raise ValueError(f"need at least 2 parties, got {n_parties}")
    phases = (FIRST_PARTY_PHASES,) + (OTHER_PARTY_PHASES,) * (n_parties - 1)
    return SettingsGrid(n_parties=n_parties, phases=phases)


@dataclass(frozen=True, eq=False)
class CorrelationTensor:
    """Dense full-correlation tensor over 3^N setting combinations.

    ``entries`` is flat, row-major with the first party's setting index
    slowest. Entries are correlations, so magnitudes never exceed 1.
    """

    n_parties: int
    entries: np.ndarray

    def __post_init__(self) -> None:
        if self.n_parties < 2:
            raise ValueError(f"need at least 2 parties, got {self.n_parties}")
        arr = np.array(self.entries, dtype=np.float64).ravel()
        if arr.size != 3 ** self.n_parties:
            raise ValueError(
                f"expected {3 ** self.n_parties} entries for {self.n_parties} parties, got {arr.size}"
            )
        if not np.all(np.isfinite(arr)):
            raise ValueError("tensor entries must be finite")
        if np.max(np.abs(arr), initial=0.0) > 1.0 + 1e-9:
            raise ValueError("correlation magnitudes cannot exceed 1")
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    def as_grid(self) -> np.ndarray:
        """View shaped (3,)*N, axis k = party k's setting index (0-based)."""
        return self.entries.reshape((3,) * self.n_parties)

    def entry(self, indices: Sequence[int]) -> float:
        """Entry at a 1-based multi-index (each index in {1,2,3})."""
        if len(indices) != self.n_parties:
            raise ValueError(f"expected {self.n_parties} indices, got {len(indices)}")
        if any(i not in (1, 2, 3) for i in indices):
            raise ValueError(f"setting indices must be in 1..3, got {tuple(indices)}")
        return float(self.as_grid()[tuple(i - 1 for i in indices)])

    def to_dict(self) -> dict:
        return {"n_parties": self.n_parties, "entries": [float(x) for x in self.entries]}

    @classmethod
    def from_dict(cls, data: dict) -> "CorrelationTensor":
        return cls(n_parties=int(data["n_parties"]), entries=np.asarray(data["entries"]))


def joint_probability(results: Sequence[int], angles: Sequence[float]) -> float:
    """Probability of one joint sign outcome at the given phases.

    ``results`` are the N station signs (+1 or -1), ``angles`` the N chosen
    phases in radians. Returns 2^-N (1 + prod(results) cos(sum(angles))).
    """
    n = len(results)
    if n < 1:
        raise ValueError("need at least one party")
    if len(angles) != n:
        raise ValueError(f"got {n} results but {len(angles)} angles")
    prod = 1
    for r in results:
        if r not in (-1, 1):
            raise ValueError(f"results must be +1 or -1, got {r}")
        prod *= r
    return (1.0 + prod * math.cos(math.fsum(angles))) / 2.0 ** n


def quantum_correlation(angles: Sequence[float]) -> float:
    """Full correlation (expectation of the sign product): cos(sum(angles))."""
    if len(angles) < 1:
        raise ValueError("need at least one angle")
    return math.cos(math.fsum(angles))


def setting_phase_classes(grid: SettingsGrid) -> np.ndarray:
    """Total phase class (multiple of pi/6 mod 12) of every setting combination.

    Flat int array of length 3^N, same ordering as CorrelationTensor entries.
    """
    n = grid.n_parties
    total = np.zeros((3,) * n, dtype=np.int64)
    for k, classes in enumerate(grid.phase_classes()):
        shape = [1] * n
        shape[k] = 3
        total = total + np.asarray(classes, dtype=np.int64).reshape(shape)
    return (total % 12).ravel()


def quantum_tensor(grid: SettingsGrid) -> CorrelationTensor:
    """Tensor of quantum correlations cos(sum of chosen phases) over the grid."""
    entries = _COS12_ARRAY[setting_phase_classes(grid)]
    return CorrelationTensor(n_parties=grid.n_parties, entries=entries)


def tensor_norm_sq(tensor: CorrelationTensor) -> float:
    """Sum of squared entries."""
    return float(np.dot(tensor.entries, tensor.entries))


def tensor_entry_sum(tensor: CorrelationTensor) -> float:
    """Plain sum of all entries."""
    return float(np.sum(tensor.entries))


def scalar_product(a: CorrelationTensor, b: CorrelationTensor) -> float:
    """Entrywise product summed over all setting combinations."""
    if a.n_parties != b.n_parties:
        raise ValueError(
            f"tensor party counts differ: {a.n_parties} vs {b.n_parties}"
        )
    return float(np.dot(a.entries, b.entries))


def entry_sum_closed_form(n_parties: int) -> float:
    """Closed form for the quantum tensor entry sum: -2^N sin((N-1) pi/3).

    sin((N-1) pi/3) only takes the values {0, +-sqrt(3)/2}, so the result is
    exactly 0 whenever N = 1 (mod 3).
    """
    if n_parties < 2:
        raise ValueError(f"need at least 2 parties, got {n_parties}")
    sin_table = (0.0, HALF_SQRT3, HALF_SQRT3, 0.0, -HALF_SQRT3, -HALF_SQRT3)
    return -(2.0 ** n_parties) * sin_table[(n_parties - 1) % 6]
