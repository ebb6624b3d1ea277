"""Exact feasibility of separate-common-cause models for target statistics.

Under the minimal-theory response rule and setting-independent causes,
every outcome probability is a sum of cause-assignment probabilities
q(c) over the assignments producing that outcome.  Deciding whether a
model reproduces a target table is therefore a linear feasibility problem
over the simplex of q.  It is solved exactly with a rational phase-1
simplex; either a witness distribution or a Farkas functional comes back,
and both are re-verified before :func:`solve` returns.
"""

from __future__ import annotations

import itertools
import json
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .models import (
    ASSIGNMENTS,
    OUTCOME_PAIRS,
    HiddenVariableModel,
    MalformedTargets,
    SettingPolicy,
    TargetStatistics,
    frac_str,
    pair_label,
    parse_pair,
    predicted_conditionals,
)

__all__ = [
    "CertificateMismatch",
    "FeasibilityProblem",
    "FeasibilityResult",
    "encode",
    "solve",
    "verify_certificate",
]

MAX_CAUSES = 12
WARN_CAUSES = 8

NORM = ("norm",)


class CertificateMismatch(AssertionError):
    pass


def _assignments(k: int) -> list[tuple[bool, ...]]:
    # index = sum c_i 2^(k-i), same order as models.ASSIGNMENTS for k = 3
    return list(itertools.product((False, True), repeat=k))


def _outcome_of(c: tuple[bool, ...], i: int, j: int) -> tuple[str, str]:
    return ("+" if c[i - 1] else "-"), ("-" if c[j - 1] else "+")


def _row_label(label) -> str:
    return "norm" if label == NORM else f"{label[0]}{label[1]}{label[2]}{label[3]}"


def _parse_row_label(text: str):
    if text == "norm":
        return NORM
    return int(text[0]), int(text[1]), text[2], text[3]


@dataclass(frozen=True)
class FeasibilityProblem:
    """Full 0/1 constraint system plus the independent subset the solver uses.

    Row ``norm`` is sum q = 1; row ``(i, j, a, b)`` is
    sum of q over assignments giving outcome (a, b) on setting pair (i, j).
    """

    causes: int
    pairs: tuple[tuple[int, int], ...]
    labels: tuple[tuple, ...]
    matrix: tuple[tuple[int, ...], ...]
    rhs: tuple[Fraction, ...]
    independent: tuple[int, ...]
    radius: Fraction = Fraction(0)

    @property
    def n_vars(self) -> int:
        return 2**self.causes

    def row(self, label) -> int:
        return self.labels.index(label)

    def reduced(self) -> list[tuple[tuple, tuple[int, ...], Fraction]]:
        return [(self.labels[r], self.matrix[r], self.rhs[r]) for r in self.independent]

    def to_json(self) -> dict:
        return {
            "causes": self.causes,
            "pairs": [pair_label(p) for p in self.pairs],
            "rows": [
                {"label": _row_label(l), "coeffs": list(a), "target": frac_str(b)}
                for l, a, b in zip(self.labels, self.matrix, self.rhs)
            ],
            "independent": list(self.independent),
            "radius": frac_str(self.radius),
        }

    @classmethod
    def from_json(cls, doc: dict) -> FeasibilityProblem:
        rows = doc["rows"]
        return cls(
            doc["causes"],
            tuple(parse_pair(p) for p in doc["pairs"]),
            tuple(_parse_row_label(r["label"]) for r in rows),
            tuple(tuple(r["coeffs"]) for r in rows),
            tuple(Fraction(r["target"]) for r in rows),
            tuple(doc["independent"]),
            Fraction(doc.get("radius", "0")),
        )


def _independent_rows(matrix, rhs) -> list[int]:
    """Indices of rows that raise the rank of [A | b].

    A row whose coefficients are dependent but whose target is not is kept:
    it is an inconsistency the solver must report.
    """
    basis: list[tuple[int, list[Fraction]]] = []  # (pivot column, row)
    keep = []
    for r, (a, b) in enumerate(zip(matrix, rhs)):
        v = [Fraction(x) for x in a] + [Fraction(b)]
        for piv, brow in basis:
            if v[piv]:
                f = v[piv] / brow[piv]
                v = [x - f * y for x, y in zip(v, brow)]
        nz = next((c for c, x in enumerate(v) if x), None)
        if nz is None:
            continue
        keep.append(r)
        basis.append((nz, v))
    return keep


def encode(
    targets: TargetStatistics,
    pairs: Sequence[tuple[int, int]] | None = None,
    causes: int | None = None,
) -> FeasibilityProblem:
    """Build the linear system for the selected setting pairs.

    ``causes`` defaults to the highest direction index used (at least 3).
    """
    pairs = tuple(sorted(set(map(tuple, pairs)))) if pairs is not None else tuple(targets.pairs())
    if not pairs:
        raise MalformedTargets("no setting pairs selected")
    targets.validate(pairs)
    k = causes if causes is not None else max(3, max(max(p) for p in pairs))
    if max(max(p) for p in pairs) > k or min(min(p) for p in pairs) < 1:
        raise MalformedTargets(f"pair indices exceed the {k} cause atoms")
    if k > MAX_CAUSES:
        raise ValueError(f"at most {MAX_CAUSES} cause atoms are supported, got {k}")
    if k > WARN_CAUSES:
        warnings.warn(
            f"{k} cause atoms give {2**k} exact-rational variables; expect a slow solve",
            RuntimeWarning,
            stacklevel=2,
        )
    cols = _assignments(k)
    labels, matrix, rhs = [NORM], [tuple(1 for _ in cols)], [Fraction(1)]
    for i, j in pairs:
        for a, b in OUTCOME_PAIRS:
            labels.append((i, j, a, b))
            matrix.append(tuple(int(_outcome_of(c, i, j) == (a, b)) for c in cols))
            rhs.append(targets.p(i, j, a, b))
    keep = _independent_rows(matrix, rhs)
    return FeasibilityProblem(k, pairs, tuple(labels), tuple(matrix), tuple(rhs), tuple(keep), targets.radius)


# ---------------------------------------------------------------------------
# Exact phase-1 simplex
# ---------------------------------------------------------------------------


def _phase_one(rows: list[tuple[Sequence[int], Fraction]], n: int):
    """Minimise the sum of artificials for A x = b, x >= 0.

    Returns ``(x, y)``: ``x`` the basic solution (length n) when the optimum
    is zero, else None; ``y`` the optimal dual, one entry per row, satisfying
    y^T A <= 0 and y^T b = optimum.
    """
    m = len(rows)
    sign = [1 if b >= 0 else -1 for _, b in rows]
    # tableau: m rows of n + m coefficients and the rhs
    T = []
    for r, (a, b) in enumerate(rows):
        s = sign[r]
        T.append([Fraction(s * x) for x in a] + [Fraction(int(r == k)) for k in range(m)] + [s * Fraction(b)])
    basis = [n + r for r in range(m)]
    cost = [Fraction(0)] * n + [Fraction(1)] * m
    # reduced costs d_j = c_j - c_B B^-1 A_j
    d = [cost[j] - sum(T[r][j] for r in range(m)) for j in range(n + m)]

    while True:
        enter = next((j for j in range(n + m) if d[j] < 0), None)  # Bland
        if enter is None:
            break
        best, leave = None, None
        for r in range(m):
            if T[r][enter] > 0:
                ratio = T[r][-1] / T[r][enter]
                if best is None or ratio < best or (ratio == best and basis[r] < basis[leave]):
                    best, leave = ratio, r
        if leave is None:  # unbounded cannot happen: objective is bounded below by 0
            raise AssertionError("phase-1 objective unbounded")
        piv = T[leave][enter]
        T[leave] = [x / piv for x in T[leave]]
        for r in range(m):
            if r != leave and T[r][enter]:
                f = T[r][enter]
                T[r] = [x - f * y for x, y in zip(T[r], T[leave])]
        f = d[enter]
        d = [x - f * y for x, y in zip(d, T[leave][:-1])]
        basis[leave] = enter

    obj = sum((T[r][-1] for r, j in enumerate(basis) if j >= n), Fraction(0))

    # artificial column r has cost 1 and reduced cost 1 - y_r
    y = [sign[r] * (1 - d[n + r]) for r in range(m)]
    if obj != 0:
        return None, y
    x = [Fraction(0)] * n
    for r, j in enumerate(basis):
        if j < n:
            x[j] = T[r][-1]
    return x, y


def _primitive(vec: list[Fraction]) -> list[Fraction]:
    """Positive rescaling to the smallest integer vector."""
    nz = [v for v in vec if v]
    if not nz:
        return vec
    lcm = 1
    for v in nz:
        lcm = lcm * v.denominator // math.gcd(lcm, v.denominator)
    ints = [int(v * lcm) for v in vec]
    g = 0
    for v in ints:
        g = math.gcd(g, abs(v))
    return [Fraction(v, g) for v in ints]


# ---------------------------------------------------------------------------
# Named inequalities
# ---------------------------------------------------------------------------


def _named_functionals(p: FeasibilityProblem):
    """Known valid inequalities expressible on the problem's rows.

    Yields ``(name, {row label: coefficient})`` with the convention
    y^T A <= 0 on every assignment, violated when y^T b > 0.
    """
    have = set(p.pairs)
    k = p.causes
    for i, j, l in itertools.permutations(range(1, k + 1), 3):
        if {(i, l), (i, j), (j, l)} <= have:
            for ab in ("++", "--"):
                a, b = ab
                name = "eq32" if (i, j, l, ab) == (1, 2, 3, "++") else f"wigner[{i}{j}{l},{ab}]"
                yield name, {(i, l, a, b): 1, (i, j, a, b): -1, (j, l, a, b): -1}
    for trio in itertools.combinations(range(1, k + 1), 3):
        y = {NORM: 1}
        for i, j in itertools.combinations(trio, 2):
            pair = (i, j) if (i, j) in have else (j, i) if (j, i) in have else None
            if pair is None:
                break
            y[(*pair, "+", "-")] = -1
            y[(*pair, "-", "+")] = -1
        else:
            yield f"agreement[{''.join(map(str, trio))}]", y


def _order_named(names):
    # eq32 first, then the other Wigner forms, then agreement bounds
    return sorted(names, key=lambda item: (item[0] != "eq32", not item[0].startswith("wigner"), item[0]))


# ---------------------------------------------------------------------------
# Results
# ---------------------------------------------------------------------------

FEASIBLE, INFEASIBLE, INDETERMINATE = "Feasible", "Infeasible", "Indeterminate"


@dataclass(frozen=True)
class FeasibilityResult:
    verdict: str
    witness: tuple[Fraction, ...] | None = None
    model: HiddenVariableModel | None = None
    certificate: dict = field(default_factory=dict)  # row label -> coefficient
    certificate_name: str | None = None
    violation: Fraction | None = None
    bound: Fraction = Fraction(0)

    @property
    def feasible(self) -> bool:
        return self.verdict == FEASIBLE

    def describe(self) -> str:
        if self.verdict == FEASIBLE:
            return "Feasible: witness cause distribution reproduces the targets"
        name = self.certificate_name or "separating functional"
        if self.verdict == INFEASIBLE:
            return f"Infeasible: {name} violated by {self.violation} (> rounding bound {self.bound})"
        return f"Indeterminate: {name} violated by {self.violation}, within rounding bound {self.bound}"

    def to_json(self) -> dict:
        doc: dict = {"verdict": self.verdict}
        if self.witness is not None:
            doc["witness"] = [frac_str(w) for w in self.witness]
        if self.model is not None:
            doc["model"] = self.model.to_json()
        if self.certificate:
            doc["certificate"] = {_row_label(k): frac_str(v) for k, v in self.certificate.items()}
            doc["certificate_name"] = self.certificate_name
            doc["violation"] = frac_str(self.violation)
            doc["bound"] = frac_str(self.bound)
        return doc

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1)

    @classmethod
    def from_json(cls, doc: dict) -> FeasibilityResult:
        return cls(
            doc["verdict"],
            tuple(Fraction(w) for w in doc["witness"]) if "witness" in doc else None,
            HiddenVariableModel.from_json(doc["model"]) if "model" in doc else None,
            {_parse_row_label(k): Fraction(v) for k, v in doc.get("certificate", {}).items()},
            doc.get("certificate_name"),
            Fraction(doc["violation"]) if "violation" in doc else None,
            Fraction(doc.get("bound", "0")),
        )


def _functional_value(p: FeasibilityProblem, y: dict):
    """Return (max over assignments of y^T A_c, y^T b, weighted rounding bound)."""
    rows = {l: r for r, l in enumerate(p.labels)}
    worst = max(sum(Fraction(c) * p.matrix[rows[l]][col] for l, c in y.items()) for col in range(p.n_vars))
    value = sum(Fraction(c) * p.rhs[rows[l]] for l, c in y.items())
    bound = sum(abs(Fraction(c)) for l, c in y.items() if l != NORM) * p.radius
    return worst, value, bound


def solve(p: FeasibilityProblem) -> FeasibilityResult:
    """Exact verdict with an attached, re-verified certificate."""
    reduced = p.reduced()
    x, y_red = _phase_one([(a, b) for _, a, b in reduced], p.n_vars)

    if x is not None:
        model = None
        if p.causes == 3:
            model = HiddenVariableModel(dict(zip(ASSIGNMENTS, x)), SettingPolicy.uniform(), label="witness")
        result = FeasibilityResult(FEASIBLE, tuple(x), model)
    else:
        lp_y = {}
        for (label, _, _), c in zip(reduced, _primitive(y_red)):
            if c:
                lp_y[label] = c
        candidates = []
        for name, y in _order_named(list(_named_functionals(p))):
            worst, value, bound = _functional_value(p, y)
            if worst <= 0 and value > 0:
                candidates.append((value > bound, name, {l: Fraction(c) for l, c in y.items()}, value, bound))
        worst, value, bound = _functional_value(p, lp_y)
        if worst > 0 or value <= 0:
            raise AssertionError("simplex dual is not a separating functional")
        candidates.append((value > bound, None, lp_y, value, bound))
        # prefer a functional that clears the rounding bound, then named over unnamed
        decisive, name, y, value, bound = next((c for c in candidates if c[0]), candidates[0])
        verdict = INFEASIBLE if decisive else INDETERMINATE
        result = FeasibilityResult(verdict, certificate=y, certificate_name=name, violation=value, bound=bound)

    verify_certificate(result, p)
    return result


def _witness_targets(p: FeasibilityProblem, w: Sequence[Fraction]) -> dict:
    """Outcome probabilities of a witness, computed by direct enumeration."""
    out = {}
    for i, j in p.pairs:
        for a, b in OUTCOME_PAIRS:
            out[(i, j, a, b)] = sum(
                (q for c, q in zip(_assignments(p.causes), w) if _outcome_of(c, i, j) == (a, b)), Fraction(0)
            )
    return out


def verify_certificate(r: FeasibilityResult, p: FeasibilityProblem) -> bool:
    """Re-check a result against its problem without re-running the solver."""
    if r.verdict == FEASIBLE:
        if r.witness is None or len(r.witness) != p.n_vars:
            raise CertificateMismatch("feasible result lacks a witness of the right size")
        if any(w < 0 for w in r.witness) or sum(r.witness) != 1:
            raise CertificateMismatch("witness is not a probability distribution")
        if p.causes == 3:
            if r.model is None:
                raise CertificateMismatch("feasible result lacks a witness model")
            if tuple(r.model.cause_dist[a] for a in ASSIGNMENTS) != tuple(r.witness):
                raise CertificateMismatch("witness model disagrees with witness vector")
            predicted = predicted_conditionals(r.model).probs
        else:
            predicted = _witness_targets(p, r.witness)
        for label, b in zip(p.labels, p.rhs):
            if label != NORM and predicted[label] != b:
                raise CertificateMismatch(f"witness gives {predicted[label]} for {_row_label(label)}, target {b}")
        return True
    if r.verdict not in (INFEASIBLE, INDETERMINATE):
        raise CertificateMismatch(f"unknown verdict {r.verdict!r}")
    if not r.certificate or any(l not in p.labels for l in r.certificate):
        raise CertificateMismatch("certificate references rows outside the problem")
    worst, value, bound = _functional_value(p, r.certificate)
    if worst > 0:
        raise CertificateMismatch(f"functional is positive ({worst}) on some assignment")
    if value <= 0:
        raise CertificateMismatch(f"functional does not separate the targets (value {value})")
    if value != r.violation or bound != r.bound:
        raise CertificateMismatch("recorded violation or bound does not match")
    if (r.verdict == INFEASIBLE) != (value > bound):
        raise CertificateMismatch("verdict inconsistent with rounding bound")
    return True
