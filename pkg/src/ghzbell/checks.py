"""Self-verification suite behind the ``verify`` CLI command.

Each check recomputes one identity of the toolkit through two independent
routes (direct evaluation vs closed form, exhaustive search vs dynamic
program, sampled strategies vs analytic bound) and reports pass/fail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .lhv import (
    SIGN_TRIPLES,
    THREE_OUTCOME,
    lhv_bound,
    max_score_brute,
    max_score_factorized,
    party_phasor,
    random_strategy,
    strategy_score,
    strategy_score_factorized,
    to_two_outcome,
    violation_factor,
)
from .quantum import (
    build_settings,
    entry_sum_closed_form,
    quantum_tensor,
    tensor_entry_sum,
    tensor_norm_sq,
)
from .thresholds import (
    critical_efficiency,
    critical_visibility,
    efficiency_closed_form,
    percent_string,
    two_setting_visibility_threshold,
)

IDENTITY_TOL = 1e-9
CLOSED_FORM_TOL = 1e-12


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


def _check_norm_identity(inject_fault: bool) -> CheckResult:
    # A fault injection knob exercises the failure path of the harness itself.
    offset = 1e-3 if inject_fault else 0.0
    worst = 0.0
    for n in range(2, 11):
        q = quantum_tensor(build_settings(n))
        worst = max(worst, abs(tensor_norm_sq(q) - (3.0 ** n / 2.0 + offset)))
    return CheckResult(
        name="norm-identity",
        passed=worst < IDENTITY_TOL,
        detail=f"max |norm_sq - 3^N/2| = {worst:.3e} over N=2..10",
    )


def _check_entry_sum() -> CheckResult:
    worst = 0.0
    for n in range(2, 11):
        q = quantum_tensor(build_settings(n))
        worst = max(worst, abs(tensor_entry_sum(q) - entry_sum_closed_form(n)))
    return CheckResult(
        name="entry-sum-identity",
        passed=worst < IDENTITY_TOL,
        detail=f"max |sum - (-2^N sin((N-1)pi/3))| = {worst:.3e} over N=2..10",
    )


def _check_bound_brute(n_max: int) -> CheckResult:
    top = min(n_max, 8)
    worst = 0.0
    for n in range(2, top + 1):
        best, strategy = max_score_brute(n)
        worst = max(worst, abs(best - lhv_bound(n)))
        q = quantum_tensor(build_settings(n))
        worst = max(worst, abs(strategy_score(strategy, q) - best))
    return CheckResult(
        name="bound-brute",
        passed=worst < IDENTITY_TOL,
        detail=f"max |brute max - 2^(N-1) sqrt(3)| = {worst:.3e} over N=2..{top}",
    )


def _check_oracle_equivalence(n_max: int) -> CheckResult:
    top = min(n_max, 8)
    ok = True
    worst = 0.0
    for n in range(2, top + 1):
        brute, _ = max_score_brute(n)
        dp = max_score_factorized(n)
        ok = ok and round(brute, 9) == round(dp, 9)
        worst = max(worst, abs(brute - dp))
    return CheckResult(
        name="oracle-equivalence",
        passed=ok,
        detail=f"brute vs factorized max, rounded to 1e-9, N=2..{top}; max gap {worst:.3e}",
    )


def _check_factorization_identity() -> CheckResult:
    worst = 0.0
    for n in (2, 3):
        grid = build_settings(n)
        q = quantum_tensor(grid)
        for strategy in _all_strategies(n):
            direct = strategy_score(strategy, q)
            phasor = strategy_score_factorized(strategy, grid)
            worst = max(worst, abs(direct - phasor))
    return CheckResult(
        name="factorization-identity",
        passed=worst < IDENTITY_TOL,
        detail=f"max |tensor score - phasor score| = {worst:.3e}, exhaustive N=2,3",
    )


def _all_strategies(n_parties: int):
    from itertools import product

    from .lhv import DeterministicStrategy

    for combo in product(range(8), repeat=n_parties):
        yield DeterministicStrategy(
            assignments=tuple(SIGN_TRIPLES[c] for c in combo)
        )


def _check_phasor_sets() -> CheckResult:
    grid = build_settings(2)
    expected = {0: {1, 3, 5, 7, 9, 11}, 1: {0, 2, 4, 6, 8, 10}}
    ok = True
    for party, classes in expected.items():
        phasors = {party_phasor(t, party, grid) for t in SIGN_TRIPLES}
        zero = {p for p in phasors if p.magnitude == 0}
        nonzero_classes = {p.phase_class for p in phasors if p.magnitude == 2}
        ok = ok and len(phasors) == 7 and len(zero) == 1 and nonzero_classes == classes
    return CheckResult(
        name="phasor-onto",
        passed=ok,
        detail="8 sign triples map onto exactly the 7 documented phasor values per party type",
    )


def _check_violation_factor() -> CheckResult:
    worst = 0.0
    for n in range(2, 11):
        quantum_value = 3.0 ** n / 2.0
        worst = max(worst, abs(quantum_value / lhv_bound(n) - violation_factor(n)))
    return CheckResult(
        name="violation-factor",
        passed=worst < CLOSED_FORM_TOL,
        detail=f"max |(3^N/2)/bound - (3/2)^N/sqrt(3)| = {worst:.3e} over N=2..10",
    )


def _check_visibility_closed_form() -> CheckResult:
    worst = 0.0
    for n in range(2, 21):
        v = critical_visibility(n, 1.0).v_critical
        worst = max(worst, abs(v - math.sqrt(3.0) * (2.0 / 3.0) ** n))
    return CheckResult(
        name="visibility-closed-form",
        passed=worst < CLOSED_FORM_TOL,
        detail=f"max |v_cr(N, 1) - sqrt(3)(2/3)^N| = {worst:.3e} over N=2..20",
    )


def _check_threshold_percents() -> CheckResult:
    expectations = [
        (percent_string(critical_visibility(2, 1.0).v_critical), "77.0"),
        (percent_string(critical_visibility(3, 1.0).v_critical), "51.3"),
        (percent_string(critical_visibility(4, 1.0).v_critical), "34.2"),
        (percent_string(critical_visibility(5, 1.0).v_critical), "22.8"),
        (percent_string(critical_visibility(10, 1.0).v_critical), "3.0"),
        (percent_string(two_setting_visibility_threshold(2)), "70.7"),
        (percent_string(two_setting_visibility_threshold(3)), "50.0"),
        (percent_string(two_setting_visibility_threshold(4)), "35.4"),
        (percent_string(two_setting_visibility_threshold(5)), "25.0"),
        (percent_string(two_setting_visibility_threshold(10)), "4.4"),
        (percent_string(critical_efficiency(2)), "87.0"),
        (percent_string(critical_efficiency(3)), "79.8"),
        (percent_string(critical_efficiency(4)), "76.5"),
        (percent_string(critical_efficiency(5)), "74.4"),
    ]
    bad = [f"{got}!={want}" for got, want in expectations if got != want]
    return CheckResult(
        name="threshold-percents",
        passed=not bad,
        detail="all rounded percentages match" if not bad else "; ".join(bad),
    )


def _check_efficiency_consistency() -> CheckResult:
    worst = 0.0
    for n in range(2, 13):
        eta = critical_efficiency(n)
        worst = max(worst, abs(critical_visibility(n, eta).v_critical - 1.0))
    worst_closed = abs(critical_efficiency(4) - efficiency_closed_form(4))
    return CheckResult(
        name="efficiency-consistency",
        passed=worst < IDENTITY_TOL and worst_closed < CLOSED_FORM_TOL,
        detail=(
            f"max |v_cr(N, eta_cr(N)) - 1| = {worst:.3e} over N=2..12; "
            f"|bisection - closed form| = {worst_closed:.3e} at N=4"
        ),
    )


def _check_folded_strategies() -> CheckResult:
    rng = np.random.default_rng(20260814)
    grid = build_settings(3)
    q = quantum_tensor(grid)
    bound = lhv_bound(3)
    worst = -math.inf
    for _ in range(10_000):
        strategy = random_strategy(3, rng, alphabet=THREE_OUTCOME)
        worst = max(worst, strategy_score(to_two_outcome(strategy), q))
    return CheckResult(
        name="folded-strategy-bound",
        passed=worst <= bound + IDENTITY_TOL,
        detail=f"max folded score {worst:.9f} vs bound {bound:.9f} over 10000 samples",
    )


def run_checks(n_max: int = 6, inject_fault: bool = False) -> list[CheckResult]:
    """Run every check; ``n_max`` caps the exhaustive-search depth (<= 8)."""
    if n_max < 2:
        raise ValueError(f"n_max must be at least 2, got {n_max}")
    return [
        _check_norm_identity(inject_fault),
        _check_entry_sum(),
        _check_bound_brute(n_max),
        _check_oracle_equivalence(n_max),
        _check_factorization_identity(),
        _check_phasor_sets(),
        _check_violation_factor(),
        _check_visibility_closed_form(),
        _check_threshold_percents(),
        _check_efficiency_consistency(),
        _check_folded_strategies(),
    ]
