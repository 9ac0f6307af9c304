"""Monte Carlo simulation of the N-party test with imperfect visibility and detectors.

Model. Each trial fixes one setting (phase) per party. Detection comes first:
every station independently registers with probability eta. If all N register,
the joint sign pattern r in {-1,+1}^N is drawn from the visibility-V law

    P(r) = 2^-N (1 + V prod(r) cos(phi_1 + ... + phi_N))

at the chosen phases. If at least one station fails to register, every
registered station outputs an independent fair sign; non-registrations are
recorded as outcome 0.

Why independent fair signs are the consistent completion: summing P(r) over
the two signs of any one party cancels the two interference terms
+-V prod(r') cos(...) exactly, leaving the uniform law 2^-(N-1) on the other
parties, independent of every phase and of V. Iterating, any strict subset of
stations sees exactly independent fair signs under the ideal law. A lost
detection carries no sign information, so the registered subset keeps that
uniform marginal; drawing registered stations as independent fair signs
realizes precisely this symmetry property, and it is the property under which
the detection-adjusted comparison implemented here is valid.

Estimators. The per-setting mean of the full outcome product (any 0
annihilates the product) estimates eta^N V cos(sum of phases); the frequency
of all-zero trials estimates (1-eta)^N. The statistic lhs = |(Q, E_est)| is
compared against rhs = 2^(N-1) sqrt(3) - p_all_zero |q_N|, with |q_N| the
magnitude of the quantum tensor entry sum. The auxiliary estimator instead
folds every 0 into -1 before taking products, which shifts each expected
entry by exactly (-1)^N (1-eta)^N.

Determinism. Trials are split into fixed blocks of 65536. Block b draws all
its randomness from child b of the experiment seed's SeedSequence and reduces
to integer-valued sufficient statistics, so results are bit-identical for any
worker count; worker threads only pick up blocks.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .lhv import lhv_bound
from .quantum import (
    COS12,
    CorrelationTensor,
    build_settings,
    entry_sum_closed_form,
    quantum_tensor,
    setting_phase_classes,
)

ROUND_ROBIN = "round-robin"
UNIFORM_RANDOM = "uniform-random"
SETTING_POLICIES = (ROUND_ROBIN, UNIFORM_RANDOM)

BLOCK_TRIALS = 65536
MAX_SEED = 2 ** 64 - 1


@dataclass(frozen=True)
class ExperimentConfig:
    """Full description of one simulated experiment."""

    n_parties: int
    visibility: float
    efficiency: float
    trials: int
    seed: int
    setting_policy: str = ROUND_ROBIN

    def __post_init__(self) -> None:
        if self.n_parties < 2:
            raise ValueError(f"need at least 2 parties, got {self.n_parties}")
        if not 0.0 <= self.visibility <= 1.0:
            raise ValueError(f"visibility must be in [0, 1], got {self.visibility}")
        if not 0.0 <= self.efficiency <= 1.0:
            raise ValueError(f"efficiency must be in [0, 1], got {self.efficiency}")
        if self.trials < 1:
            raise ValueError(f"trials must be positive, got {self.trials}")
        if not 0 <= self.seed <= MAX_SEED:
            raise ValueError(f"seed must fit in 64 unsigned bits, got {self.seed}")
        if self.setting_policy not in SETTING_POLICIES:
            raise ValueError(
                f"setting policy must be one of {SETTING_POLICIES}, got {self.setting_policy!r}"
            )
        if self.setting_policy == ROUND_ROBIN and self.trials % 3 ** self.n_parties != 0:
            raise ValueError(
                "round-robin needs trials divisible by 3^N for exactly equal "
                f"per-combination counts: {self.trials} % {3 ** self.n_parties} != 0"
            )

    @property
    def n_combos(self) -> int:
        return 3 ** self.n_parties

    def to_dict(self) -> dict:
        return {
            "n_parties": self.n_parties,
            "visibility": self.visibility,
            "efficiency": self.efficiency,
            "trials": self.trials,
            "seed": self.seed,
            "setting_policy": self.setting_policy,
        }


@dataclass(frozen=True)
class TrialRecord:
    """One trial: 1-based setting index and outcome per party (0 = no detection)."""

    settings: tuple[int, ...]
    outcomes: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.settings) != len(self.outcomes):
            raise ValueError("settings and outcomes must have one entry per party")
        if any(s not in (1, 2, 3) for s in self.settings):
            raise ValueError(f"setting indices must be in 1..3, got {self.settings}")
        if any(m not in (-1, 0, 1) for m in self.outcomes):
            raise ValueError(f"outcomes must be in {{-1, 0, +1}}, got {self.outcomes}")


@dataclass
class TrialBatch:
    """Column-oriented batch of trials.

    ``settings`` is (trials, N) with 1-based setting indices; ``outcomes`` is
    (trials, N) with values in {-1, 0, +1}. Persists as newline-delimited
    ``s_1 ... s_N | m_1 ... m_N`` records.
    """

    settings: np.ndarray
    outcomes: np.ndarray

    def __post_init__(self) -> None:
        self.settings = np.asarray(self.settings, dtype=np.int8)
        self.outcomes = np.asarray(self.outcomes, dtype=np.int8)
        if self.settings.ndim != 2 or self.settings.shape != self.outcomes.shape:
            raise ValueError("settings and outcomes must be equal-shaped 2-D arrays")
        if self.settings.size and not np.isin(self.settings, (1, 2, 3)).all():
            raise ValueError("setting indices must be in 1..3")
        if self.outcomes.size and not np.isin(self.outcomes, (-1, 0, 1)).all():
            raise ValueError("outcomes must be in {-1, 0, +1}")

    def __len__(self) -> int:
        return self.settings.shape[0]

    @property
    def n_parties(self) -> int:
        return self.settings.shape[1]

    def save(self, path) -> None:
        with open(path, "w", encoding="ascii") as fh:
            for s_row, m_row in zip(self.settings, self.outcomes):
                fh.write(
                    " ".join(str(int(s)) for s in s_row)
                    + " | "
                    + " ".join(str(int(m)) for m in m_row)
                    + "\n"
                )

    @classmethod
    def load(cls, path) -> "TrialBatch":
        settings, outcomes = [], []
        with open(path, "r", encoding="ascii") as fh:
            for lineno, line in enumerate(fh, 1):
                if not line.strip():
                    continue
                left, sep, right = line.partition("|")
                if not sep:
                    raise ValueError(f"{path}:{lineno}: missing '|' separator")
                settings.append([int(tok) for tok in left.split()])
                outcomes.append([int(tok) for tok in right.split()])
        if not settings:
            raise ValueError(f"{path}: no trial records")
        return cls(settings=np.asarray(settings), outcomes=np.asarray(outcomes))


@dataclass(frozen=True)
class ExperimentSummary:
    """Result of one simulated experiment."""

    estimated_tensor: CorrelationTensor
    p_all_zero: float
    lhs: float
    rhs: float
    violated: bool
    standard_error_lhs: float

    def to_dict(self) -> dict:
        return {
            "p_all_zero": self.p_all_zero,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "violated": self.violated,
            "standard_error_lhs": self.standard_error_lhs,
            "estimated_tensor": self.estimated_tensor.to_dict(),
        }


@dataclass(frozen=True)
class SweepPoint:
    """One visibility sweep sample."""

    visibility: float
    lhs: float
    rhs: float
    violated: bool

    def to_dict(self) -> dict:
        return {
            "visibility": self.visibility,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "violated": self.violated,
        }


def _sign_patterns(n_parties: int) -> np.ndarray:
    """All 2^N sign patterns, party-major; bit set means +1."""
    idx = np.arange(2 ** n_parties, dtype=np.int64)
    bits = (idx[:, None] >> (n_parties - 1 - np.arange(n_parties))) & 1
    return (2 * bits - 1).astype(np.int8)


def _pattern_cdfs(n_parties: int, visibility: float, classes) -> dict[int, np.ndarray]:
    """Inverse-transform tables of the all-detected sign law, per phase class.

    The law depends on the setting combination only through the total phase
    class c (cos of a multiple of pi/6), so one table per class present is the
    per-combination table, stored once.
    """
    patterns = _sign_patterns(n_parties)
    parity = patterns.prod(axis=1).astype(np.float64)
    tables: dict[int, np.ndarray] = {}
    for c in classes:
        c = int(c)
        probs = (1.0 + visibility * COS12[c] * parity) / 2.0 ** n_parties
        if probs.min() < -1e-12:
            raise RuntimeError(
                f"negative joint probability {probs.min()} at phase class {c}"
            )
        np.clip(probs, 0.0, None, out=probs)
        cdf = np.cumsum(probs)
        cdf[-1] = 1.0
        tables[c] = cdf
    return tables


def _n_blocks(trials: int) -> int:
    return (trials + BLOCK_TRIALS - 1) // BLOCK_TRIALS


def _block_trials(
    config: ExperimentConfig,
    block: int,
    seed_seq: np.random.SeedSequence,
    combo_classes: np.ndarray,
    cdfs: dict[int, np.ndarray],
    patterns: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """Draw one block. Returns (combo index, outcomes) arrays.

    Draw order per block is fixed: setting combos (uniform-random policy
    only), then detection uniforms, then one pattern uniform per trial, then
    one fair-sign uniform per station.
    """
    n = config.n_parties
    start = block * BLOCK_TRIALS
    size = min(BLOCK_TRIALS, config.trials - start)
    rng = np.random.default_rng(seed_seq)
    if config.setting_policy == UNIFORM_RANDOM:
        combos = rng.integers(0, config.n_combos, size=size, dtype=np.int64)
    else:
        combos = (start + np.arange(size, dtype=np.int64)) % config.n_combos
    detect_u = rng.random((size, n))
    pattern_u = rng.random(size)
    sign_u = rng.random((size, n))

    detected = detect_u < config.efficiency
    outcomes = np.zeros((size, n), dtype=np.int8)
    all_det = detected.all(axis=1)
    if all_det.any():
        cls = combo_classes[combos[all_det]]
        u = pattern_u[all_det]
        idx = np.empty(u.size, dtype=np.int64)
        for c in np.unique(cls):
            mask = cls == c
            idx[mask] = np.searchsorted(cdfs[int(c)], u[mask], side="right")
        np.minimum(idx, patterns.shape[0] - 1, out=idx)
        outcomes[all_det] = patterns[idx]
    partial = ~all_det
    if partial.any():
        fair = np.where(sign_u < 0.5, -1, 1).astype(np.int8)
        outcomes[partial] = np.where(detected[partial], fair[partial], 0)
    return combos, outcomes


def _sampler_state(config: ExperimentConfig):
    grid = build_settings(config.n_parties)
    combo_classes = setting_phase_classes(grid)
    patterns = _sign_patterns(config.n_parties)
    cdfs = _pattern_cdfs(config.n_parties, config.visibility, np.unique(combo_classes))
    return combo_classes, cdfs, patterns


def _map_blocks(config: ExperimentConfig, func, workers: int) -> list:
    if workers < 1:
        raise ValueError(f"workers must be positive, got {workers}")
    blocks = _n_blocks(config.trials)
    children = np.random.SeedSequence(config.seed).spawn(blocks)
    if workers == 1 or blocks == 1:
        return [func(b, children[b]) for b in range(blocks)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda b: func(b, children[b]), range(blocks)))


def generate_trials(config: ExperimentConfig, workers: int = 1) -> TrialBatch:
    """Sample every trial of the experiment as an explicit batch."""
    combo_classes, cdfs, patterns = _sampler_state(config)
    n = config.n_parties

    def work(block, seq):
        return _block_trials(config, block, seq, combo_classes, cdfs, patterns)

    parts = _map_blocks(config, work, workers)
    combos = np.concatenate([p[0] for p in parts])
    outcomes = np.concatenate([p[1] for p in parts])
    place = 3 ** (n - 1 - np.arange(n, dtype=np.int64))
    settings = ((combos[:, None] // place) % 3 + 1).astype(np.int8)
    return TrialBatch(settings=settings, outcomes=outcomes)


def _stats(combos: np.ndarray, outcomes: np.ndarray, n_combos: int):
    """Integer sufficient statistics of a set of trials."""
    prods = outcomes.astype(np.int64).prod(axis=1)
    counts = np.bincount(combos, minlength=n_combos)
    sum_prod = np.bincount(combos, weights=prods.astype(np.float64), minlength=n_combos)
    nonzero = np.bincount(combos[prods != 0], minlength=n_combos)
    all_zero = int((outcomes == 0).all(axis=1).sum())
    return counts, sum_prod, nonzero, all_zero


def _summary_from_stats(
    config: ExperimentConfig,
    counts: np.ndarray,
    sum_prod: np.ndarray,
    nonzero: np.ndarray,
    all_zero: int,
) -> ExperimentSummary:
    n = config.n_parties
    m = config.n_combos
    est = np.zeros(m)
    seen = counts > 0
    est[seen] = sum_prod[seen] / counts[seen]

    # Sample variance (ddof=1) of the product per combination; (prod)^2 is the
    # nonzero indicator, so sum of squares == nonzero count.
    se_sq = np.full(m, np.inf)
    enough = counts >= 2
    var = (nonzero[enough] - sum_prod[enough] ** 2 / counts[enough]) / (counts[enough] - 1)
    se_sq[enough] = np.clip(var, 0.0, None) / counts[enough]

    q = build_q_cached(n)
    lhs = abs(float(np.dot(q.entries, est)))
    # Zero-weight entries contribute nothing even when their se is infinite,
    # so multiply only where the weight is positive.
    weights = q.entries ** 2
    pos = weights > 0.0
    terms = np.zeros(m)
    terms[pos] = weights[pos] * se_sq[pos]
    se_lhs = float(np.sqrt(np.sum(terms)))

    p_all_zero = all_zero / config.trials
    rhs = lhv_bound(n) - p_all_zero * abs(entry_sum_closed_form(n))
    return ExperimentSummary(
        estimated_tensor=CorrelationTensor(n_parties=n, entries=est),
        p_all_zero=p_all_zero,
        lhs=lhs,
        rhs=rhs,
        violated=bool(lhs > rhs),
        standard_error_lhs=se_lhs,
    )


_Q_CACHE: dict[int, CorrelationTensor] = {}


def build_q_cached(n_parties: int) -> CorrelationTensor:
    """Quantum tensor, cached per party count (it is immutable)."""
    tensor = _Q_CACHE.get(n_parties)
    if tensor is None:
        tensor = _Q_CACHE.setdefault(n_parties, quantum_tensor(build_settings(n_parties)))
    return tensor


def run_experiment(config: ExperimentConfig, workers: int = 1) -> ExperimentSummary:
    """Simulate the whole experiment and reduce it to an ExperimentSummary.

    Statistics are merged from fixed per-seed trial blocks, so the summary is
    bit-identical for any ``workers`` value.
    """
    combo_classes, cdfs, patterns = _sampler_state(config)
    m = config.n_combos

    def work(block, seq):
        combos, outcomes = _block_trials(config, block, seq, combo_classes, cdfs, patterns)
        return _stats(combos, outcomes, m)

    parts = _map_blocks(config, work, workers)
    counts = np.zeros(m, dtype=np.int64)
    sum_prod = np.zeros(m, dtype=np.float64)
    nonzero = np.zeros(m, dtype=np.int64)
    all_zero = 0
    for c, s, z, a in parts:
        counts += c
        sum_prod += s
        nonzero += z
        all_zero += a
    return _summary_from_stats(config, counts, sum_prod, nonzero, all_zero)


def _batch_combos(batch: TrialBatch) -> np.ndarray:
    n = batch.n_parties
    place = 3 ** (n - 1 - np.arange(n, dtype=np.int64))
    return ((batch.settings.astype(np.int64) - 1) * place).sum(axis=1)


def summarize_batch(batch: TrialBatch, config: ExperimentConfig) -> ExperimentSummary:
    """Summary of an explicit trial batch (e.g. one loaded from disk)."""
    if batch.n_parties != config.n_parties:
        raise ValueError(
            f"batch has {batch.n_parties} parties but config has {config.n_parties}"
        )
    if len(batch) != config.trials:
        raise ValueError(f"batch has {len(batch)} trials but config says {config.trials}")
    counts, sum_prod, nonzero, all_zero = _stats(
        _batch_combos(batch), batch.outcomes, config.n_combos
    )
    return _summary_from_stats(config, counts, sum_prod, nonzero, all_zero)


def auxiliary_tensor(batch: TrialBatch, config: ExperimentConfig) -> CorrelationTensor:
    """Estimator with non-detections folded to -1 before taking products.

    Entrywise, its expectation exceeds the plain estimator's by
    (-1)^N (1-eta)^N.
    """
    if batch.n_parties != config.n_parties:
        raise ValueError(
            f"batch has {batch.n_parties} parties but config has {config.n_parties}"
        )
    folded = np.where(batch.outcomes == 0, -1, batch.outcomes).astype(np.int64)
    prods = folded.prod(axis=1)
    combos = _batch_combos(batch)
    m = config.n_combos
    counts = np.bincount(combos, minlength=m)
    sums = np.bincount(combos, weights=prods.astype(np.float64), minlength=m)
    est = np.zeros(m)
    seen = counts > 0
    est[seen] = sums[seen] / counts[seen]
    return CorrelationTensor(n_parties=config.n_parties, entries=est)


def sample_trial(
    config: ExperimentConfig, settings: tuple[int, ...], rng: np.random.Generator
) -> TrialRecord:
    """Draw a single trial at fixed 1-based settings from an external generator.

    Uses the same draw order as the batch sampler: detection uniforms, one
    pattern uniform, then fair-sign uniforms.
    """
    n = config.n_parties
    settings = tuple(int(s) for s in settings)
    if len(settings) != n:
        raise ValueError(f"expected {n} setting indices, got {len(settings)}")
    if any(s not in (1, 2, 3) for s in settings):
        raise ValueError(f"setting indices must be in 1..3, got {settings}")
    classes = build_settings(n).phase_classes()
    total = sum(classes[k][settings[k] - 1] for k in range(n)) % 12
    cdf = _pattern_cdfs(n, config.visibility, [total])[total]
    patterns = _sign_patterns(n)

    detect_u = rng.random(n)
    pattern_u = float(rng.random())
    sign_u = rng.random(n)
    detected = detect_u < config.efficiency
    if detected.all():
        idx = min(int(np.searchsorted(cdf, pattern_u, side="right")), 2 ** n - 1)
        outcomes = tuple(int(v) for v in patterns[idx])
    else:
        outcomes = tuple(
            (-1 if u < 0.5 else 1) if d else 0 for d, u in zip(detected, sign_u)
        )
    return TrialRecord(settings=settings, outcomes=outcomes)


def visibility_sweep(
    n_parties: int,
    eta: float,
    v_grid,
    trials_per_point: int,
    seed: int,
    setting_policy: str = ROUND_ROBIN,
    workers: int = 1,
) -> list[SweepPoint]:
    """Run one experiment per visibility value and collect the verdicts.

    Each point derives an independent child seed from (seed, point index), so
    the whole sweep is reproducible from ``seed`` alone.
    """
    points = []
    for i, v in enumerate(v_grid):
        v = float(v)
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"visibility grid values must be in [0, 1], got {v}")
        child = int(np.random.SeedSequence(entropy=[int(seed), i]).generate_state(1, np.uint64)[0])
        config = ExperimentConfig(
            n_parties=n_parties,
            visibility=v,
            efficiency=eta,
            trials=trials_per_point,
            seed=child,
            setting_policy=setting_policy,
        )
        summary = run_experiment(config, workers=workers)
        points.append(
            SweepPoint(visibility=v, lhs=summary.lhs, rhs=summary.rhs, violated=summary.violated)
        )
    return points
