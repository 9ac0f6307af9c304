"""Tests for deterministic local strategies and their tensor scores.

Core claims covered here:
  * strategy tensors are rank-one sign products and score against the quantum
    tensor via the plain scalar product,
  * per-party responses factorize into a phasor with magnitude in {0, 2} and
    one of twelve phases; the eight sign triples land onto seven phasors,
  * the exhaustive maximum equals 2^(N-1) sqrt(3) and the factorized search
    reproduces it while scaling to thousands of parties,
  * an explicit strategy attains the bound at every size,
  * folding a zero outcome onto -1 keeps three-outcome strategies under the
    two-outcome bound.
"""

import cmath
import itertools
import math

import numpy as np
import pytest

from ghzbell import (
    THREE_OUTCOME,
    TWO_OUTCOME,
    DeterministicStrategy,
    bound_attaining_strategy,
    build_settings,
    lhv_bound,
    max_score_brute,
    max_score_factorized,
    party_phasor,
    quantum_tensor,
    random_strategy,
    scalar_product,
    strategy_score,
    strategy_score_factorized,
    strategy_tensor,
    to_two_outcome,
    violation_factor,
)

SQRT3 = math.sqrt(3.0)


def _all_two_outcome(n):
    triples = list(itertools.product((-1, 1), repeat=3))
    for assignment in itertools.product(triples, repeat=n):
        yield DeterministicStrategy(assignments=assignment)


def _naive_max(n):
    """Plain loop over all 8^n strategies and all 3^n entries."""
    q = quantum_tensor(build_settings(n)).as_grid()
    best = -math.inf
    winners = []
    for strategy in _all_two_outcome(n):
        total = 0.0
        for combo in itertools.product(range(3), repeat=n):
            total += q[combo] * math.prod(
                strategy.assignments[k][combo[k]] for k in range(n)
            )
        if total > best + 1e-9:
            best = total
            winners = [strategy.assignments]
        elif abs(total - best) <= 1e-9:
            winners.append(strategy.assignments)
    return best, winners


class TestDeterministicStrategy:
    def test_valid(self):
        s = DeterministicStrategy(assignments=((1, -1, 1), (1, 1, 1)))
        assert s.n_parties == 2
        assert s.alphabet == TWO_OUTCOME

    def test_rejects_single_party(self):
        with pytest.raises(ValueError):
            DeterministicStrategy(assignments=(((1, 1, 1)),))

    def test_rejects_wrong_setting_count(self):
        with pytest.raises(ValueError):
            DeterministicStrategy(assignments=((1, 1), (1, 1)))

    def test_rejects_value_outside_alphabet(self):
        with pytest.raises(ValueError):
            DeterministicStrategy(assignments=((1, 0, 1), (1, 1, 1)))
        DeterministicStrategy(assignments=((1, 0, 1), (1, 1, 1)), alphabet=THREE_OUTCOME)

    def test_rejects_unknown_alphabet(self):
        with pytest.raises(ValueError):
            DeterministicStrategy(assignments=((1, 1, 1), (1, 1, 1)), alphabet="spin")


class TestStrategyTensor:
    def test_rank_one_products(self):
        s = DeterministicStrategy(assignments=((1, -1, 1), (1, 1, -1)))
        grid = strategy_tensor(s, build_settings(2)).as_grid()
        for i, j in itertools.product(range(3), repeat=2):
            assert grid[i, j] == s.assignments[0][i] * s.assignments[1][j]

    def test_zero_propagates(self):
        s = DeterministicStrategy(
            assignments=((1, 0, 1), (1, 1, -1)), alphabet=THREE_OUTCOME
        )
        grid = strategy_tensor(s, build_settings(2)).as_grid()
        assert np.array_equal(grid[1, :], np.zeros(3))
        assert not np.any(grid[0, :] == 0)

    def test_party_count_mismatch(self):
        s = DeterministicStrategy(assignments=((1, 1, 1), (1, 1, 1)))
        with pytest.raises(ValueError):
            strategy_tensor(s, build_settings(3))


class TestStrategyScore:
    def test_bound_attaining_example(self):
        s = DeterministicStrategy(assignments=((1, 1, -1), (1, 1, -1)))
        q = quantum_tensor(build_settings(2))
        assert strategy_score(s, q) == pytest.approx(2 * SQRT3, abs=1e-12)

    def test_all_plus_example(self):
        # z_1 = e^{i pi/6}+e^{i pi/2}+e^{i 5pi/6} = 2i, z_2 = 2 e^{i pi/3},
        # so the score is Re(2i * 2 e^{i pi/3}) = 4 cos(5 pi/6) = -2 sqrt(3).
        s = DeterministicStrategy(assignments=((1, 1, 1), (1, 1, 1)))
        q = quantum_tensor(build_settings(2))
        assert strategy_score(s, q) == pytest.approx(-2 * SQRT3, abs=1e-12)

    def test_three_outcome_rejected(self):
        s = DeterministicStrategy(
            assignments=((1, 0, 1), (1, 1, 1)), alphabet=THREE_OUTCOME
        )
        q = quantum_tensor(build_settings(2))
        with pytest.raises(ValueError):
            strategy_score(s, q)

    def test_size_mismatch(self):
        s = DeterministicStrategy(assignments=((1, 1, 1), (1, 1, 1)))
        with pytest.raises(ValueError):
            strategy_score(s, quantum_tensor(build_settings(3)))

    def test_matches_scalar_product(self):
        rng = np.random.default_rng(5)
        grid = build_settings(3)
        q = quantum_tensor(grid)
        for _ in range(20):
            s = random_strategy(3, rng)
            assert strategy_score(s, q) == pytest.approx(
                scalar_product(q, strategy_tensor(s, grid)), abs=1e-12
            )


class TestPartyPhasor:
    def test_shared_triple_plus_plus_minus(self):
        ph = party_phasor((1, 1, -1), 1, build_settings(2))
        assert ph.magnitude == 2
        assert ph.phase_class == 0
        assert ph.value == pytest.approx(2.0 + 0.0j)

    def test_cancellation_gives_zero(self):
        ph = party_phasor((1, -1, 1), 0, build_settings(2))
        assert ph.magnitude == 0
        assert ph.value == 0j

    def test_first_party_offset(self):
        ph = party_phasor((1, 1, -1), 0, build_settings(2))
        assert (ph.magnitude, ph.phase_class) == (2, 1)

    def test_matches_complex_sum_exhaustively(self):
        grid = build_settings(2)
        for party in (0, 1):
            radians = grid.radians()[party]
            for triple in itertools.product((-1, 1), repeat=3):
                direct = sum(
                    v * cmath.exp(1j * phi) for v, phi in zip(triple, radians)
                )
                ph = party_phasor(triple, party, grid)
                assert ph.value == pytest.approx(direct, abs=1e-12)

    def test_eight_triples_land_onto_seven_phasors(self):
        grid = build_settings(2)
        expected_classes = {0: {1, 3, 5, 7, 9, 11}, 1: {0, 2, 4, 6, 8, 10}}
        for party in (0, 1):
            phasors = {
                party_phasor(t, party, grid)
                for t in itertools.product((-1, 1), repeat=3)
            }
            assert len(phasors) == 7
            zeros = {p for p in phasors if p.magnitude == 0}
            assert len(zeros) == 1
            classes = {p.phase_class for p in phasors if p.magnitude == 2}
            assert classes == expected_classes[party]

    def test_invalid_inputs(self):
        grid = build_settings(2)
        with pytest.raises(ValueError):
            party_phasor((1, 1), 0, grid)
        with pytest.raises(ValueError):
            party_phasor((1, 1, 0), 0, grid)
        with pytest.raises(ValueError):
            party_phasor((1, 1, 1), 2, grid)


class TestFactorizedScore:
    def test_matches_direct_score_exhaustively(self):
        for n in (2, 3):
            grid = build_settings(n)
            q = quantum_tensor(grid)
            for s in _all_two_outcome(n):
                assert strategy_score_factorized(s, grid) == pytest.approx(
                    strategy_score(s, q), abs=1e-9
                )

    def test_three_outcome_rejected(self):
        s = DeterministicStrategy(
            assignments=((1, 0, 1), (1, 1, 1)), alphabet=THREE_OUTCOME
        )
        with pytest.raises(ValueError):
            strategy_score_factorized(s, build_settings(2))


class TestMaxScore:
    def test_brute_equals_bound(self):
        for n in range(2, 7):
            best, argmax = max_score_brute(n)
            assert abs(best - lhv_bound(n)) < 1e-9
            assert argmax.n_parties == n

    def test_brute_matches_naive_loop(self):
        for n in (2, 3):
            naive_best, naive_winners = _naive_max(n)
            best, argmax = max_score_brute(n)
            assert best == pytest.approx(naive_best, abs=1e-12)
            # Several strategies tie at the top; the reported one is the
            # lexicographically smallest of them.
            assert len(naive_winners) >= 2
            assert argmax.assignments == min(naive_winners)

    def test_frozen_argmaxes(self):
        assert max_score_brute(2)[1].assignments == ((-1, -1, -1), (-1, 1, 1))
        assert max_score_brute(3)[1].assignments == ((-1, -1, -1),) * 3
        assert max_score_brute(4)[1].assignments == ((-1, -1, -1),) * 3 + ((1, -1, -1),)

    def test_argmax_attains_reported_score(self):
        for n in (2, 3, 4, 5):
            best, argmax = max_score_brute(n)
            q = quantum_tensor(build_settings(n))
            assert strategy_score(argmax, q) == pytest.approx(best, abs=1e-12)

    def test_brute_size_limits(self):
        with pytest.raises(ValueError):
            max_score_brute(1)
        with pytest.raises(ValueError):
            max_score_brute(9)

    def test_factorized_agrees_with_brute(self):
        for n in range(2, 7):
            assert round(max_score_factorized(n), 9) == round(max_score_brute(n)[0], 9)

    def test_factorized_equals_bound_at_large_sizes(self):
        for n in (10, 50, 400, 1000):
            assert max_score_factorized(n) == lhv_bound(n)

    def test_factorized_size_limits(self):
        with pytest.raises(ValueError):
            max_score_factorized(1)
        with pytest.raises(OverflowError):
            max_score_factorized(1100)

    def test_bound_attaining_strategy(self):
        for n in range(2, 10):
            s = bound_attaining_strategy(n)
            assert s.assignments == ((1, 1, -1),) * n
            assert strategy_score_factorized(s, build_settings(n)) == pytest.approx(
                lhv_bound(n), abs=1e-12
            )
        q = quantum_tensor(build_settings(4))
        assert strategy_score(bound_attaining_strategy(4), q) == pytest.approx(
            lhv_bound(4), abs=1e-12
        )

    def test_convex_mixtures_stay_below_max(self):
        # Mixtures of strategy tensors never beat the best vertex.
        rng = np.random.default_rng(7)
        grid = build_settings(2)
        q = quantum_tensor(grid)
        best = lhv_bound(2)
        for _ in range(50):
            parts = [
                strategy_tensor(random_strategy(2, rng), grid).entries
                for _ in range(6)
            ]
            weights = rng.dirichlet(np.ones(len(parts)))
            mix = sum(w * p for w, p in zip(weights, parts))
            assert float(q.entries @ mix) <= best + 1e-9


class TestBoundAndViolation:
    def test_lhv_bound_values(self):
        assert lhv_bound(2) == pytest.approx(2 * SQRT3, abs=1e-15)
        assert lhv_bound(3) == pytest.approx(4 * SQRT3, abs=1e-15)
        assert lhv_bound(3) == 2.0 * lhv_bound(2)

    def test_violation_factor_frozen(self):
        assert violation_factor(2) == pytest.approx(1.299038105676658, abs=1e-12)
        assert violation_factor(3) == pytest.approx(1.948557158514987, abs=1e-12)

    def test_violation_factor_identity_and_growth(self):
        for n in range(2, 11):
            assert abs(violation_factor(n) - (3.0 ** n / 2.0) / lhv_bound(n)) < 1e-12
            assert abs(violation_factor(n + 1) / violation_factor(n) - 1.5) < 1e-12


class TestThreeOutcomeFolding:
    def test_fold_example(self):
        s = DeterministicStrategy(
            assignments=((1, 0, -1), (0, 0, 1)), alphabet=THREE_OUTCOME
        )
        folded = to_two_outcome(s)
        assert folded.alphabet == TWO_OUTCOME
        assert folded.assignments == ((1, -1, -1), (-1, -1, 1))

    def test_fold_is_identity_on_two_outcome(self):
        s = DeterministicStrategy(assignments=((1, 1, -1), (-1, 1, 1)))
        assert to_two_outcome(s).assignments == s.assignments

    def test_folded_strategies_respect_bound(self):
        rng = np.random.default_rng(321)
        q = quantum_tensor(build_settings(3))
        bound = lhv_bound(3)
        for _ in range(2000):
            s = random_strategy(3, rng, alphabet=THREE_OUTCOME)
            folded_score = strategy_score(to_two_outcome(s), q)
            assert folded_score <= bound + 1e-9

    def test_random_strategy_alphabets(self):
        rng = np.random.default_rng(1)
        s2 = random_strategy(4, rng)
        assert s2.alphabet == TWO_OUTCOME
        assert all(v in (-1, 1) for row in s2.assignments for v in row)
        s3 = random_strategy(4, rng, alphabet=THREE_OUTCOME)
        assert s3.alphabet == THREE_OUTCOME
        assert all(v in (-1, 0, 1) for row in s3.assignments for v in row)
