"""Seeded Monte Carlo runs of a hidden-variable model.

Each trial draws a cause assignment, then a setting pair from the policy
(possibly depending on the assignment), then outcomes from the response
rule.  Randomness comes from numpy's counter-based Philox generator, one
independent key per (seed, substream); trials in a substream consume the
stream in order, so a table is a pure function of (model, trials, seed,
substreams).
"""

from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from statistics import NormalDist

import numpy as np
from scipy import stats

from .derivation import bell_check
from .models import (
    ASSIGNMENTS,
    PAIRS,
    HiddenVariableModel,
    InvalidModel,
    TargetStatistics,
    cause_conjunctions,
    pair_label,
)

__all__ = [
    "DEFAULT_SEED",
    "EmptySubensemble",
    "Estimate",
    "FrequencyTable",
    "RunConfig",
    "empirical_bell",
    "empirical_no_cons",
    "estimate",
    "estimate_cell",
    "run",
]

# outcome codes in count arrays
# seed used by the CLI default and the convergence acceptance run
DEFAULT_SEED = 7

CODES = ("+", "-", "0")
_CODE = {"+": 0, "-": 1, None: 2}


class EmptySubensemble(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    trials: int
    seed: int
    substreams: int = 1
    blind: bool = False

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be positive")
        if self.substreams < 1:
            raise ValueError("substreams must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    def split(self) -> list[int]:
        base, extra = divmod(self.trials, self.substreams)
        return [base + (s < extra) for s in range(self.substreams)]


@dataclass(frozen=True)
class FrequencyTable:
    """Counts per (setting pair, left code, right code), plus oracle cause counts.

    ``outcomes`` has shape (9, 3, 3) indexed by PAIRS order and codes
    ``+, -, 0`` (0 = no outcome).  ``causes`` has shape (8, 9): assignment
    by setting pair, or is None for a blind run.
    """

    trials: int
    outcomes: np.ndarray
    causes: np.ndarray | None

    def __post_init__(self):
        if int(self.outcomes.sum()) != self.trials:
            raise ValueError("outcome counts do not sum to the trial count")
        if self.causes is not None and int(self.causes.sum()) != self.trials:
            raise ValueError("cause counts do not sum to the trial count")

    def __eq__(self, other):
        if not isinstance(other, FrequencyTable):
            return NotImplemented
        same_causes = (self.causes is None and other.causes is None) or (
            self.causes is not None and other.causes is not None and np.array_equal(self.causes, other.causes)
        )
        return self.trials == other.trials and np.array_equal(self.outcomes, other.outcomes) and same_causes

    def __add__(self, other: FrequencyTable) -> FrequencyTable:
        causes = None
        if self.causes is not None and other.causes is not None:
            causes = self.causes + other.causes
        return FrequencyTable(self.trials + other.trials, self.outcomes + other.outcomes, causes)

    def pair_total(self, pair: tuple[int, int]) -> int:
        return int(self.outcomes[PAIRS.index(pair)].sum())

    def count(self, pair: tuple[int, int], a: str | None, b: str | None) -> int:
        return int(self.outcomes[PAIRS.index(pair), _CODE[a], _CODE[b]])

    @classmethod
    def from_targets(cls, targets: TargetStatistics, per_pair: int, pairs=None) -> FrequencyTable:
        """A table whose frequencies match ``targets`` up to integer rounding."""
        pairs = pairs or targets.pairs()
        out = np.zeros((9, 3, 3), dtype=np.int64)
        for pair in pairs:
            cells = [(a, b, targets.p(*pair, a, b) * per_pair) for a in "+-" for b in "+-"]
            counts = [math.floor(v) for *_, v in cells]
            # largest remainders take the leftover trials
            order = sorted(range(4), key=lambda k: cells[k][2] - counts[k], reverse=True)
            for k in order[: per_pair - sum(counts)]:
                counts[k] += 1
            for (a, b, _), n in zip(cells, counts):
                out[PAIRS.index(pair), _CODE[a], _CODE[b]] = n
        return cls(int(out.sum()), out, None)

    # -- export -----------------------------------------------------------

    def rows(self, confidence: float = 0.99, exact: bool = False) -> list[dict]:
        rows = []
        for p, pair in enumerate(PAIRS):
            n = self.pair_total(pair)
            for a in range(3):
                for b in range(3):
                    c = int(self.outcomes[p, a, b])
                    if a == 2 or b == 2:
                        if c == 0:
                            continue
                    row = {"pair": pair_label(pair), "outcome": CODES[a] + CODES[b], "count": c,
                           "estimate": None, "ci_low": None, "ci_high": None}
                    if n:
                        e = estimate_cell(c, n, confidence, exact)
                        row.update(estimate=e.point, ci_low=e.low, ci_high=e.high)
                    rows.append(row)
        return rows

    def to_csv(self, confidence: float = 0.99, exact: bool = False) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["pair", "outcome", "count", "estimate", "ci_low", "ci_high"])
        for r in self.rows(confidence, exact):
            w.writerow([r["pair"], r["outcome"], r["count"],
                        *("" if r[k] is None else f"{r[k]:.6f}" for k in ("estimate", "ci_low", "ci_high"))])
        return buf.getvalue()

    def to_json(self, confidence: float = 0.99, exact: bool = False) -> dict:
        doc = {"trials": self.trials, "rows": self.rows(confidence, exact)}
        if self.causes is not None:
            doc["causes"] = {a.label: {pair_label(p): int(self.causes[a.index, k]) for k, p in enumerate(PAIRS)}
                             for a in ASSIGNMENTS}
        return doc


def _cdf(weights) -> np.ndarray:
    """Float cdf whose tail from the last positive weight on is +inf.

    Zero weights add exactly 0.0, so interior zero-weight entries can never
    be drawn, and rounding shortfall cannot select a trailing one.
    """
    cdf = np.cumsum([float(w) for w in weights])
    last = max(k for k, w in enumerate(weights) if w > 0)
    cdf[last:] = np.inf
    return cdf


def _lookup_tables(m: HiddenVariableModel):
    cause_cdf = _cdf([m.cause_dist[a] for a in ASSIGNMENTS])
    pair_cdf = np.array([_cdf([m.policy.dist(a)[p] for p in PAIRS]) for a in ASSIGNMENTS])
    left = np.zeros((8, 9), dtype=np.int64)
    right = np.zeros((8, 9), dtype=np.int64)
    for a in ASSIGNMENTS:
        for k, pair in enumerate(PAIRS):
            lo, ro = m.outcomes(a, pair)
            left[a.index, k] = _CODE[lo]
            right[a.index, k] = _CODE[ro]
    return cause_cdf, pair_cdf, left, right


def _sample(u: np.ndarray, cdf: np.ndarray) -> np.ndarray:
    return np.searchsorted(cdf, u, side="right")


def _run_substream(m, tables, seed: int, substream: int, n: int, blind: bool) -> FrequencyTable:
    cause_cdf, pair_cdf, left, right = tables
    key = np.random.SeedSequence([seed & 0xFFFFFFFF, seed >> 32, substream]).generate_state(2, np.uint64)
    rng = np.random.Generator(np.random.Philox(key=key))
    u = rng.random((n, 2))
    a = _sample(u[:, 0], cause_cdf)
    pair = np.empty(n, dtype=np.int64)
    for idx in range(8):
        sel = a == idx
        if sel.any():
            pair[sel] = _sample(u[sel, 1], pair_cdf[idx])
    lo = left[a, pair]
    ro = right[a, pair]
    outcomes = np.bincount(pair * 9 + lo * 3 + ro, minlength=81).reshape(9, 3, 3)
    causes = None if blind else np.bincount(a * 9 + pair, minlength=72).reshape(8, 9)
    return FrequencyTable(n, outcomes.astype(np.int64), None if causes is None else causes.astype(np.int64))


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("BELLWRIGHT_THREADS", os.cpu_count() or 1)))
    except ValueError:
        return 1


def run(m: HiddenVariableModel, cfg: RunConfig) -> FrequencyTable:
    """Simulate ``cfg.trials`` runs; deterministic for a fixed config."""
    if not isinstance(m, HiddenVariableModel):
        raise InvalidModel("run() needs a HiddenVariableModel")
    tables = _lookup_tables(m)
    sizes = cfg.split()
    jobs = [(s, n) for s, n in enumerate(sizes) if n]
    workers = min(_threads(), len(jobs))
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda job: _run_substream(m, tables, cfg.seed, job[0], job[1], cfg.blind), jobs))
    else:
        parts = [_run_substream(m, tables, cfg.seed, s, n, cfg.blind) for s, n in jobs]
    total = parts[0]
    for part in parts[1:]:
        total = total + part
    return total


# ---------------------------------------------------------------------------
# Estimates
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Estimate:
    count: int
    n: int
    point: float
    low: float
    high: float

    @property
    def half_width(self) -> float:
        return max(self.point - self.low, self.high - self.point)


def _z(confidence: float) -> float:
    return NormalDist().inv_cdf(1 - (1 - confidence) / 2)


def estimate_cell(count: int, n: int, confidence: float = 0.99, exact: bool = False) -> Estimate:
    """Point estimate count/n with a normal (or Clopper-Pearson) interval."""
    if n <= 0:
        raise EmptySubensemble("conditioning subensemble is empty")
    p = count / n
    if exact:
        alpha = 1 - confidence
        low = 0.0 if count == 0 else float(stats.beta.ppf(alpha / 2, count, n - count + 1))
        high = 1.0 if count == n else float(stats.beta.ppf(1 - alpha / 2, count + 1, n - count))
        return Estimate(count, n, p, low, high)
    h = _z(confidence) * math.sqrt(p * (1 - p) / n)
    return Estimate(count, n, p, max(0.0, p - h), min(1.0, p + h))


def estimate(
    t: FrequencyTable, confidence: float = 0.99, exact: bool = False, pairs=None
) -> dict[tuple[int, int, str, str], Estimate]:
    """Conditional estimates p_ij(a, b) for every requested pair."""
    out = {}
    for pair in pairs or PAIRS:
        n = t.pair_total(pair)
        if n == 0:
            if pairs is not None:
                raise EmptySubensemble(f"no trials with settings {pair_label(pair)}")
            continue
        for a in "+-":
            for b in "+-":
                out[(*pair, a, b)] = estimate_cell(t.count(pair, a, b), n, confidence, exact)
    return out


@dataclass(frozen=True)
class EmpiricalBell:
    p13: Estimate
    p12: Estimate
    p23: Estimate
    slack: float
    low: float
    high: float

    @property
    def verdict(self) -> str:
        if self.low > 0:
            return "satisfied"
        if self.high < 0:
            return "violated"
        return "inconclusive"


def empirical_bell(t: FrequencyTable, confidence: float = 0.99, exact: bool = False) -> EmpiricalBell:
    """Slack p12 + p23 - p13 with the sum of the three half-widths as interval."""
    est = estimate(t, confidence, exact, pairs=[(1, 3), (1, 2), (2, 3)])
    p13, p12, p23 = est[(1, 3, "+", "+")], est[(1, 2, "+", "+")], est[(2, 3, "+", "+")]
    _, slack = bell_check(p13.point, p12.point, p23.point)
    half = p13.half_width + p12.half_width + p23.half_width
    return EmpiricalBell(p13, p12, p23, slack, slack - half, slack + half)


@dataclass(frozen=True)
class NoConsCell:
    event: str
    literals: int
    pair: tuple[int, int]
    conditional: float
    marginal: float
    half_width: float
    status: str  # "ok" | "flagged" | "inconclusive"

    @property
    def delta(self) -> float:
        return self.conditional - self.marginal


@dataclass(frozen=True)
class EmpiricalNoCons:
    cells: tuple[NoConsCell, ...]

    @property
    def flagged(self) -> list[NoConsCell]:
        return [c for c in self.cells if c.status == "flagged"]

    @property
    def single_atom_flagged(self) -> list[NoConsCell]:
        return [c for c in self.flagged if c.literals == 1]

    @property
    def all_inconclusive(self) -> bool:
        return all(c.status == "inconclusive" for c in self.cells)


def empirical_no_cons(
    t: FrequencyTable, confidence: float = 0.99, min_count: int = 30, family_wise: bool = True
) -> EmpiricalNoCons:
    """Flag cause conjunctions whose frequency moves with the setting pair.

    For each conjunction and setting pair, compares p(phi | pair) with the
    overall p(phi), flagging when the gap exceeds z * sqrt(p(1-p)/n_pair).
    With ``family_wise`` the confidence applies to the whole family of
    tests (Bonferroni), so an honest policy raises no flag with probability
    at least ``confidence``; without it each cell is tested on its own and
    about (1 - confidence) of honest cells get flagged.  Pairs seen fewer
    than ``min_count`` times are inconclusive.
    """
    if t.causes is None:
        raise ValueError("blind table: cause assignments were not recorded")
    conj = [(label, len(getattr(e, "parts", (e,))), sat) for label, e, sat in cause_conjunctions()]
    n_tests = len(conj) * len(PAIRS)
    level = 1 - (1 - confidence) / n_tests if family_wise else confidence
    z = _z(level)
    total = t.trials
    per_assignment = t.causes.sum(axis=1)
    cells = []
    for label, nlit, sat in conj:
        idx = sorted(sat)
        marginal = float(per_assignment[idx].sum()) / total
        for k, pair in enumerate(PAIRS):
            n = int(t.causes[:, k].sum())
            if n == 0:
                continue
            cond = float(t.causes[idx, k].sum()) / n
            hw = z * math.sqrt(marginal * (1 - marginal) / n)
            if n < min_count:
                status = "inconclusive"
            else:
                status = "flagged" if abs(cond - marginal) > hw else "ok"
            cells.append(NoConsCell(label, nlit, pair, cond, marginal, hw, status))
    return EmpiricalNoCons(tuple(cells))
