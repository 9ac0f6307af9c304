"""Critical visibility and detection efficiency for the N-party test.

Contents:
    ThresholdResult     -- critical visibility at a given efficiency
    critical_visibility -- smallest visibility violating the bound at fixed eta
    critical_efficiency -- smallest efficiency admitting violation at V = 1
    two_setting_visibility_threshold -- the classic two-setting figure 2^((1-N)/2)
    ThresholdRow, threshold_table    -- per-N comparison table
    render_table_csv    -- CSV serialization with the pinned header
    percent_string      -- percentage rounded half-away-from-zero to 1 decimal

The violation condition with visibility V and detection efficiency eta reads

    eta^N (3^N / 2) V > 2^(N-1) sqrt(3) - |q_N| (1 - eta)^N,

with q_N the quantum tensor entry sum. Solving at equality in V gives
critical_visibility; setting V = 1 and solving for eta gives
critical_efficiency. At eta = 1 the critical visibility collapses to the
closed form sqrt(3) (2/3)^N.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal

from .lhv import lhv_bound
from .quantum import entry_sum_closed_form

BISECTION_LO = 1e-6
BISECTION_TOL = 1e-12
BISECTION_MAX_ITER = 200


@dataclass(frozen=True)
class ThresholdResult:
    """Critical visibility at one (N, eta) point.

    ``v_critical`` above 1 means no physical visibility violates the bound at
    this efficiency; math.inf marks the degenerate case of a negative
    numerator (cannot occur for eta in (0, 1], kept for totality).
    """

    n_parties: int
    eta: float
    v_critical: float
    bound_lhs: float
    q_n_abs: float

    def __post_init__(self) -> None:
        if self.v_critical < 0:
            raise ValueError("critical visibility cannot be negative")

    @property
    def attainable(self) -> bool:
        """Whether some physical visibility V <= 1 violates the bound."""
        return self.v_critical <= 1.0

    def to_dict(self) -> dict:
        return {
            "n_parties": self.n_parties,
            "eta": self.eta,
            "v_critical": self.v_critical,
            "bound_lhs": self.bound_lhs,
            "q_n_abs": self.q_n_abs,
            "attainable": self.attainable,
        }


def critical_visibility(n_parties: int, eta: float = 1.0) -> ThresholdResult:
    """Visibility at which the quantum value meets the detection-adjusted bound.

    v_cr = [2^(N-1) sqrt(3) - |q_N| (1-eta)^N] / [eta^N 3^N / 2]. Requires
    eta in (0, 1]; eta = 0 leaves no detected coincidences to violate with.
    """
    if n_parties < 2:
        raise ValueError(f"need at least 2 parties, got {n_parties}")
    if not 0.0 < eta <= 1.0:
        raise ValueError(f"efficiency must be in (0, 1], got {eta}")
    bound = lhv_bound(n_parties)
    q_abs = abs(entry_sum_closed_form(n_parties))
    numerator = bound - q_abs * (1.0 - eta) ** n_parties
    if numerator < 0.0:
        v_critical = math.inf
    else:
        v_critical = numerator / (eta ** n_parties * 3.0 ** n_parties / 2.0)
    return ThresholdResult(
        n_parties=n_parties,
        eta=eta,
        v_critical=v_critical,
        bound_lhs=bound,
        q_n_abs=q_abs,
    )


def _efficiency_margin(eta: float, n_parties: int) -> float:
    """Quantum-minus-classical margin at V = 1; its positive root is eta_cr."""
    bound = lhv_bound(n_parties)
    q_abs = abs(entry_sum_closed_form(n_parties))
    return eta ** n_parties * 3.0 ** n_parties / 2.0 + q_abs * (1.0 - eta) ** n_parties - bound


def critical_efficiency(n_parties: int) -> float:
    """Smallest detection efficiency allowing violation at perfect visibility.

    Bisection on [1e-6, 1] to 1e-12 absolute tolerance. When q_N != 0 the
    margin also vanishes at eta = 0 and dips negative before recovering, so
    instead of monotonicity the solver asserts a single minus-to-plus sign
    change across the bracket, which is what makes the bracketed root unique.
    When q_N = 0 (N = 1 mod 3) the root has the closed form
    (2^N sqrt(3) / 3^N)^(1/N); the bisection result is still returned, and the
    two agree to the solver tolerance.
    """
    if n_parties < 2:
        raise ValueError(f"need at least 2 parties, got {n_parties}")
    lo, hi = BISECTION_LO, 1.0
    g_lo, g_hi = _efficiency_margin(lo, n_parties), _efficiency_margin(hi, n_parties)
    if not (g_lo < 0.0 < g_hi):
        raise RuntimeError(
            f"bisection bracket does not straddle the root: g({lo})={g_lo}, g({hi})={g_hi}"
        )
    samples = [lo + (hi - lo) * i / 200 for i in range(201)]
    signs = [_efficiency_margin(x, n_parties) >= 0.0 for x in samples]
    changes = sum(1 for a, b in zip(signs, signs[1:]) if a != b)
    if changes != 1:
        raise RuntimeError(
            f"margin changes sign {changes} times on the bracket; root not unique"
        )
    for _ in range(BISECTION_MAX_ITER):
        mid = 0.5 * (lo + hi)
        if _efficiency_margin(mid, n_parties) < 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < BISECTION_TOL:
            break
    return 0.5 * (lo + hi)


def efficiency_closed_form(n_parties: int) -> float:
    """Closed-form eta_cr for the q_N = 0 cases (N = 1 mod 3)."""
    if n_parties < 2:
        raise ValueError(f"need at least 2 parties, got {n_parties}")
    if entry_sum_closed_form(n_parties) != 0.0:
        raise ValueError(
            f"closed form only holds when the entry sum vanishes (N = 1 mod 3), got N={n_parties}"
        )
    return (lhv_bound(n_parties) * 2.0 / 3.0 ** n_parties) ** (1.0 / n_parties)


def two_setting_visibility_threshold(n_parties: int) -> float:
    """Critical visibility of the classic two-setting inequalities: 2^((1-N)/2)."""
    if n_parties < 2:
        raise ValueError(f"need at least 2 parties, got {n_parties}")
    return 2.0 ** ((1 - n_parties) / 2)


@dataclass(frozen=True)
class ThresholdRow:
    """One table row: thresholds for N parties at perfect detection."""

    n: int
    v_cr_new: float
    v_cr_old: float
    eta_cr: float

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "v_cr_new": self.v_cr_new,
            "v_cr_old": self.v_cr_old,
            "eta_cr": self.eta_cr,
        }


def threshold_table(n_max: int) -> list[ThresholdRow]:
    """Rows for N = 2..n_max: three-setting and two-setting visibility, eta_cr."""
    if n_max < 2:
        raise ValueError(f"table needs n_max >= 2, got {n_max}")
    rows = []
    for n in range(2, n_max + 1):
        rows.append(
            ThresholdRow(
                n=n,
                v_cr_new=critical_visibility(n, 1.0).v_critical,
                v_cr_old=two_setting_visibility_threshold(n),
                eta_cr=critical_efficiency(n),
            )
        )
    return rows


CSV_HEADER = "n,v_cr_new,v_cr_old,eta_cr"


def render_table_csv(rows: list[ThresholdRow]) -> str:
    """CSV text with the pinned header and full-precision values."""
    lines = [CSV_HEADER]
    for row in rows:
        lines.append(f"{row.n},{row.v_cr_new!r},{row.v_cr_old!r},{row.eta_cr!r}")
    return "\n".join(lines) + "\n"


def percent_string(value: float) -> str:
    """``value`` as a percentage, one decimal, ties rounded away from zero."""
    return str(
        Decimal(repr(100.0 * value)).quantize(Decimal("0.1"), rounding=ROUND_HALF_UP)
    )
