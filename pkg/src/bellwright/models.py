"""Separate-common-cause hidden-variable models.

A model has three boolean cause atoms ``C11, C22, C33`` (one per
measurement direction), a distribution over their 8 joint assignments, a
setting policy over the 9 setting pairs ``(L_i, R_j)`` that may depend on
the assignment, and a response rule giving the outcome pair for every
(assignment, setting pair).  The default response is the minimal-theory
rule: left outcome ``+`` iff ``C_ii`` under ``L_i``, right outcome ``+``
iff not ``C_jj`` under ``R_j``.

Assignment order, used everywhere including JSON, is
``itertools.product((False, True), repeat=3)``; index = 4*c1 + 2*c2 + c3.
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Mapping, NamedTuple

from .core import (
    And,
    Atom,
    EventExpr,
    FiniteProbabilitySpace,
    Not,
    Or,
    ZeroConditioning,
    cond_prob,
    prob,
)

__all__ = [
    "ASSIGNMENTS",
    "BUILTIN_MODELS",
    "CauseAssignment",
    "HiddenVariableModel",
    "InvalidModel",
    "MalformedTargets",
    "NoConsReport",
    "NoConsViolation",
    "PAIRS",
    "SettingPolicy",
    "TargetStatistics",
    "cause_atom",
    "cause_conjunctions",
    "check_ex_nowm",
    "check_ex_nowm_space",
    "check_no_cons",
    "model_to_space",
    "mth_outcomes",
    "predicted_conditionals",
    "anti_13_model",
    "conspiratorial_model",
    "forced_settings_model",
    "no_outcome_model",
    "point_mass",
    "product_model",
    "random_model",
    "szabo_standin",
    "uniform_model",
]

OUTCOME_PAIRS = (("+", "+"), ("+", "-"), ("-", "+"), ("-", "-"))


class InvalidModel(ValueError):
    pass


class MalformedTargets(ValueError):
    pass


class CauseAssignment(NamedTuple):
    c1: bool
    c2: bool
    c3: bool

    @property
    def index(self) -> int:
        return 4 * self.c1 + 2 * self.c2 + self.c3

    @property
    def label(self) -> str:
        return "".join("T" if c else "F" for c in self)

    def cause(self, i: int) -> bool:
        return self[i - 1]

    @classmethod
    def parse(cls, label: str) -> CauseAssignment:
        if len(label) != 3 or set(label) - {"T", "F"}:
            raise ValueError(f"bad assignment label {label!r}")
        return cls(*(ch == "T" for ch in label))


ASSIGNMENTS: tuple[CauseAssignment, ...] = tuple(
    CauseAssignment(*bits) for bits in itertools.product((False, True), repeat=3)
)
PAIRS: tuple[tuple[int, int], ...] = tuple((i, j) for i in (1, 2, 3) for j in (1, 2, 3))


def cause_atom(i: int) -> Atom:
    return Atom(f"C{i}{i}")


def pair_label(pair: tuple[int, int]) -> str:
    return f"{pair[0]}{pair[1]}"


def parse_pair(text: str) -> tuple[int, int]:
    text = text.strip()
    if len(text) != 2 or not text.isdigit():
        raise ValueError(f"bad setting pair {text!r}")
    return int(text[0]), int(text[1])


def _frac(x) -> Fraction:
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        raise TypeError(f"floats are not accepted as exact weights: {x!r}")
    return Fraction(x)


def frac_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


# ---------------------------------------------------------------------------
# Target statistics
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TargetStatistics:
    """Table ``(i, j, a, b) -> p_ij(a, b)`` of rational outcome probabilities.

    ``radius`` bounds the absolute rounding error of every entry (zero for
    exact tables).
    """

    probs: Mapping[tuple[int, int, str, str], Fraction]
    radius: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "probs", {k: _frac(v) for k, v in self.probs.items()})
        object.__setattr__(self, "radius", _frac(self.radius))

    def __getitem__(self, key: tuple[int, int, str, str]) -> Fraction:
        return self.probs[key]

    def p(self, i: int, j: int, a: str = "+", b: str = "+") -> Fraction:
        return self.probs[(i, j, a, b)]

    @property
    def exact(self) -> bool:
        return self.radius == 0

    def pairs(self) -> list[tuple[int, int]]:
        return sorted({(i, j) for i, j, _, _ in self.probs})

    def directions(self) -> int:
        return max(max(i, j) for i, j in self.pairs())

    def validate(self, pairs=None) -> None:
        """Raise MalformedTargets unless each selected pair is a distribution."""
        for pair in pairs if pairs is not None else self.pairs():
            row = []
            for a, b in OUTCOME_PAIRS:
                key = (*pair, a, b)
                if key not in self.probs:
                    raise MalformedTargets(f"missing target {key}")
                v = self.probs[key]
                if v < 0 or v > 1:
                    raise MalformedTargets(f"target {key} = {v} outside [0, 1]")
                row.append(v)
            if sum(row) != 1:
                raise MalformedTargets(f"targets for pair {pair_label(pair)} sum to {sum(row)}")

    def restrict(self, pairs) -> TargetStatistics:
        keep = set(map(tuple, pairs))
        return TargetStatistics({k: v for k, v in self.probs.items() if k[:2] in keep}, self.radius)

    def to_json(self) -> dict:
        rows = {}
        for (i, j, a, b), v in sorted(self.probs.items()):
            rows.setdefault(pair_label((i, j)), {})[a + b] = frac_str(v)
        return {"targets": rows, "radius": frac_str(self.radius)}

    @classmethod
    def from_json(cls, doc: Mapping) -> TargetStatistics:
        probs = {}
        for pl, row in doc["targets"].items():
            i, j = parse_pair(pl)
            for ab, v in row.items():
                probs[(i, j, ab[0], ab[1])] = _frac(v)
        return cls(probs, _frac(doc.get("radius", "0")))


# ---------------------------------------------------------------------------
# Policies and models
# ---------------------------------------------------------------------------


def _pair_dist(raw: Mapping) -> dict[tuple[int, int], Fraction]:
    dist = {pair: Fraction(0) for pair in PAIRS}
    for pair, w in raw.items():
        pair = parse_pair(pair) if isinstance(pair, str) else tuple(pair)
        if pair not in dist:
            raise InvalidModel(f"unknown setting pair {pair}")
        dist[pair] = _frac(w)
    if any(w < 0 for w in dist.values()):
        raise InvalidModel("negative setting probability")
    if sum(dist.values()) != 1:
        raise InvalidModel(f"setting probabilities sum to {sum(dist.values())}")
    return dist


@dataclass(frozen=True)
class SettingPolicy:
    """Distribution over the 9 setting pairs, optionally per cause assignment.

    ``by_assignment`` overrides ``default`` for the listed assignments; a
    policy with no overrides is setting-independent of the causes.
    """

    default: Mapping[tuple[int, int], Fraction]
    by_assignment: Mapping[CauseAssignment, Mapping[tuple[int, int], Fraction]] = field(
        default_factory=dict
    )

    def __post_init__(self):
        default = _pair_dist(self.default)
        overrides = {}
        for a, dist in self.by_assignment.items():
            a = CauseAssignment(*a)
            dist = _pair_dist(dist)
            if dist != default:
                overrides[a] = dist
        object.__setattr__(self, "default", default)
        object.__setattr__(self, "by_assignment", overrides)

    @classmethod
    def uniform(cls) -> SettingPolicy:
        return cls({pair: Fraction(1, 9) for pair in PAIRS})

    @classmethod
    def only(cls, *pairs: tuple[int, int]) -> SettingPolicy:
        w = Fraction(1, len(pairs))
        return cls({pair: w for pair in pairs})

    @property
    def independent(self) -> bool:
        return not self.by_assignment

    def dist(self, a: CauseAssignment) -> dict[tuple[int, int], Fraction]:
        return self.by_assignment.get(a, self.default)


def mth_outcomes(a: CauseAssignment, pair: tuple[int, int]) -> tuple[str, str]:
    i, j = pair
    left = "+" if a.cause(i) else "-"
    right = "-" if a.cause(j) else "+"
    return left, right


@dataclass(frozen=True)
class HiddenVariableModel:
    """Cause distribution + setting policy + response rule.

    ``response`` is either ``"mth"`` or a complete table mapping
    ``(assignment, pair)`` to ``(left, right)`` where each outcome is
    ``"+"``, ``"-"`` or ``None`` (no outcome registered).
    """

    cause_dist: Mapping[CauseAssignment, Fraction]
    policy: SettingPolicy = field(default_factory=SettingPolicy.uniform)
    response: str | Mapping = "mth"
    label: str = ""

    def __post_init__(self):
        dist = {a: Fraction(0) for a in ASSIGNMENTS}
        for a, w in self.cause_dist.items():
            a = CauseAssignment.parse(a) if isinstance(a, str) else CauseAssignment(*a)
            dist[a] = _frac(w)
        if any(w < 0 for w in dist.values()):
            raise InvalidModel("negative cause probability")
        if sum(dist.values()) != 1:
            raise InvalidModel(f"cause distribution sums to {sum(dist.values())}")
        object.__setattr__(self, "cause_dist", dist)
        if isinstance(self.response, str):
            if self.response != "mth":
                raise InvalidModel(f"unknown response rule {self.response!r}")
        else:
            table = {}
            for a in ASSIGNMENTS:
                for pair in PAIRS:
                    if (a, pair) not in self.response:
                        raise InvalidModel(f"response table misses {a.label}/{pair_label(pair)}")
                    left, right = self.response[(a, pair)]
                    if left not in ("+", "-", None) or right not in ("+", "-", None):
                        raise InvalidModel(f"bad outcome in response table at {a.label}/{pair_label(pair)}")
                    table[(a, pair)] = (left, right)
            object.__setattr__(self, "response", table)

    def outcomes(self, a: CauseAssignment, pair: tuple[int, int]) -> tuple[str | None, str | None]:
        if self.response == "mth":
            return mth_outcomes(a, pair)
        return self.response[(a, pair)]

    @property
    def is_mth(self) -> bool:
        return self.response == "mth"

    def with_policy(self, policy: SettingPolicy) -> HiddenVariableModel:
        return HiddenVariableModel(self.cause_dist, policy, self.response, self.label)

    # -- serialization ----------------------------------------------------

    def to_json(self) -> dict:
        doc = {
            "cause_dist": [frac_str(self.cause_dist[a]) for a in ASSIGNMENTS],
            "policy": [
                [frac_str(self.policy.default[pair])]
                + [frac_str(self.policy.dist(a)[pair]) for a in ASSIGNMENTS]
                for pair in PAIRS
            ],
        }
        if self.is_mth:
            doc["response"] = "mth"
        else:
            doc["response"] = [
                ["".join(o or "0" for o in self.response[(a, pair)]) for pair in PAIRS]
                for a in ASSIGNMENTS
            ]
        if self.label:
            doc["label"] = self.label
        return doc

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1)

    @classmethod
    def from_json(cls, doc: Mapping) -> HiddenVariableModel:
        unknown = set(doc) - {"cause_dist", "policy", "response", "label"}
        if unknown:
            raise InvalidModel(f"unknown model fields {sorted(unknown)}")
        try:
            cd = doc["cause_dist"]
            if len(cd) != 8:
                raise InvalidModel("cause_dist needs 8 entries")
            cause_dist = {a: _frac(w) for a, w in zip(ASSIGNMENTS, cd)}
            rows = doc.get("policy")
            if rows is None:
                policy = SettingPolicy.uniform()
            else:
                if len(rows) != 9 or any(len(r) != 9 for r in rows):
                    raise InvalidModel("policy must be 9 rows of 1+8 rationals")
                default = {pair: _frac(r[0]) for pair, r in zip(PAIRS, rows)}
                by = {a: {pair: _frac(r[k + 1]) for pair, r in zip(PAIRS, rows)} for k, a in enumerate(ASSIGNMENTS)}
                policy = SettingPolicy(default, by)
            resp = doc.get("response", "mth")
            if not isinstance(resp, str):
                if len(resp) != 8 or any(len(r) != 9 for r in resp):
                    raise InvalidModel("explicit response must be 8 rows of 9 outcome pairs")
                resp = {
                    (a, pair): tuple(None if ch == "0" else ch for ch in cell)
                    for a, row in zip(ASSIGNMENTS, resp)
                    for pair, cell in zip(PAIRS, row)
                }
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            if isinstance(exc, InvalidModel):
                raise
            raise InvalidModel(f"malformed model document: {exc}") from exc
        return cls(cause_dist, policy, resp, doc.get("label", ""))

    @classmethod
    def loads(cls, text: str) -> HiddenVariableModel:
        return cls.from_json(json.loads(text))


# ---------------------------------------------------------------------------
# Induced probability space
# ---------------------------------------------------------------------------


def model_to_space(m: HiddenVariableModel, keep_zero: bool = False) -> FiniteProbabilitySpace:
    """Realize the model as one finite space over (assignment, i, j) atoms.

    Zero-weight atoms are dropped unless ``keep_zero``.  Outcome atoms only
    ever sit inside the matching setting's extension.
    """
    atoms, weight = [], {}
    ext: dict[str, set] = {}
    for k in (1, 2, 3):
        for name in (f"L{k}", f"R{k}", f"L{k}+", f"L{k}-", f"R{k}+", f"R{k}-", f"C{k}{k}"):
            ext[name] = set()
    for a in ASSIGNMENTS:
        qa = m.cause_dist[a]
        pol = m.policy.dist(a)
        for pair in PAIRS:
            w = qa * pol[pair]
            if w == 0 and not keep_zero:
                continue
            atom = (a.label, *pair)
            atoms.append(atom)
            weight[atom] = w
            i, j = pair
            ext[f"L{i}"].add(atom)
            ext[f"R{j}"].add(atom)
            for k in (1, 2, 3):
                if a.cause(k):
                    ext[f"C{k}{k}"].add(atom)
            left, right = m.outcomes(a, pair)
            if left is not None:
                ext[f"L{i}{left}"].add(atom)
            if right is not None:
                ext[f"R{j}{right}"].add(atom)
    try:
        return FiniteProbabilitySpace(tuple(atoms), weight, {k: frozenset(v) for k, v in ext.items()})
    except ValueError as exc:
        raise InvalidModel(str(exc)) from exc


def settings(i: int, j: int) -> EventExpr:
    return And((Atom(f"L{i}"), Atom(f"R{j}")))


def predicted_conditionals(m: HiddenVariableModel, space: FiniteProbabilitySpace | None = None) -> TargetStatistics:
    """p_ij(a, b) = p(L_i^a & R_j^b | L_i & R_j) on the induced space."""
    space = space if space is not None else model_to_space(m)
    probs = {}
    for i, j in PAIRS:
        given = settings(i, j)
        if prob(space, given) == 0:
            raise ZeroConditioning(f"setting pair {i}{j} has probability zero")
        for a, b in OUTCOME_PAIRS:
            probs[(i, j, a, b)] = cond_prob(space, And((Atom(f"L{i}{a}"), Atom(f"R{j}{b}"))), given)
    return TargetStatistics(probs)


# ---------------------------------------------------------------------------
# Assumption checks
# ---------------------------------------------------------------------------


def _literal(i: int, positive: bool) -> EventExpr:
    return cause_atom(i) if positive else Not(cause_atom(i))


def cause_conjunctions(max_literals: int = 3) -> Iterator[tuple[str, EventExpr, frozenset[int]]]:
    """All conjunctions of 1..max_literals cause literals.

    Yields ``(label, expression, satisfying assignment indices)``.
    """
    for r in range(1, max_literals + 1):
        for idx in itertools.combinations((1, 2, 3), r):
            for signs in itertools.product((True, False), repeat=r):
                lits = [_literal(i, s) for i, s in zip(idx, signs)]
                expr = lits[0] if r == 1 else And(tuple(lits))
                sat = frozenset(
                    a.index for a in ASSIGNMENTS if all(a.cause(i) == s for i, s in zip(idx, signs))
                )
                yield str(expr), expr, sat


def _assignment_expr(a: CauseAssignment) -> EventExpr:
    return And(tuple(_literal(k, a.cause(k)) for k in (1, 2, 3)))


def all_cause_events() -> Iterator[tuple[str, EventExpr, frozenset[int]]]:
    """Every boolean combination of cause atoms, one per distinct extension (256)."""
    for mask in range(256):
        members = [a for a in ASSIGNMENTS if mask >> a.index & 1]
        label = "{" + ",".join(a.label for a in members) + "}"
        yield label, Or(tuple(_assignment_expr(a) for a in members)), frozenset(a.index for a in members)


@dataclass(frozen=True)
class NoConsViolation:
    event: str
    pair: tuple[int, int]
    conditional: Fraction
    marginal: Fraction
    literals: int | None

    @property
    def delta(self) -> Fraction:
        return self.conditional - self.marginal


@dataclass(frozen=True)
class NoConsReport:
    checked: int
    violations: tuple[NoConsViolation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def single_atom_ok(self) -> bool:
        return not any(v.literals == 1 for v in self.violations)

    def first(self) -> NoConsViolation | None:
        return self.violations[0] if self.violations else None


def check_no_cons(m: HiddenVariableModel | FiniteProbabilitySpace, full: bool = False) -> NoConsReport:
    """Statistical independence of cause combinations from setting pairs.

    Checks every conjunction of up to three cause literals against every
    setting pair of positive probability; ``full=True`` sweeps all 256
    boolean combinations instead.
    """
    space = m if isinstance(m, FiniteProbabilitySpace) else model_to_space(m)
    if full:
        events = [(label, e, None) for label, e, _ in all_cause_events()]
    else:
        events = [(label, e, len(e.parts) if isinstance(e, And) else 1) for label, e, _ in cause_conjunctions()]
    violations = []
    checked = 0
    for i, j in PAIRS:
        given = settings(i, j)
        if prob(space, given) == 0:
            continue
        for label, e, nlit in events:
            checked += 1
            pc = cond_prob(space, e, given)
            pm = prob(space, e)
            if pc != pm:
                violations.append(NoConsViolation(label, (i, j), pc, pm, nlit))
    return NoConsReport(checked, tuple(violations))


@dataclass(frozen=True)
class ExNowmReport:
    # (wing, setting pair, message)
    ex_failures: tuple[tuple[str, tuple[int, int], str], ...]
    nowm_failures: tuple[str, ...]

    @property
    def ex_ok(self) -> bool:
        return not self.ex_failures

    @property
    def nowm_ok(self) -> bool:
        return not self.nowm_failures

    @property
    def ok(self) -> bool:
        return self.ex_ok and self.nowm_ok


def check_ex_nowm_space(space: FiniteProbabilitySpace) -> ExNowmReport:
    ex, nowm = [], []
    for i, j in PAIRS:
        given = settings(i, j)
        if prob(space, given) == 0:
            continue
        for wing, k in (("L", i), ("R", j)):
            plus, minus = Atom(f"{wing}{k}+"), Atom(f"{wing}{k}-")
            total = cond_prob(space, plus, given) + cond_prob(space, minus, given)
            if total != 1:
                ex.append((wing, (i, j), f"pair {i}{j}: p({plus}) + p({minus}) = {total}"))
            both = cond_prob(space, And((plus, minus)), given)
            if both != 0:
                ex.append((wing, (i, j), f"pair {i}{j}: p({plus} & {minus}) = {both}"))
    for k in (1, 2, 3):
        for wing in ("L", "R"):
            for o in ("+", "-"):
                stray = prob(space, And((Atom(f"{wing}{k}{o}"), Not(Atom(f"{wing}{k}")))))
                if stray != 0:
                    nowm.append(f"p({wing}{k}{o} & ~{wing}{k}) = {stray}")
    return ExNowmReport(tuple(ex), tuple(nowm))


def check_ex_nowm(m: HiddenVariableModel) -> ExNowmReport:
    """Exactly-one-of-two outcomes per wing, and no outcome without a setting."""
    return check_ex_nowm_space(model_to_space(m))


# ---------------------------------------------------------------------------
# Stock models
# ---------------------------------------------------------------------------


def _dist_from(fn) -> dict[CauseAssignment, Fraction]:
    return {a: Fraction(fn(a)) for a in ASSIGNMENTS}


def uniform_model() -> HiddenVariableModel:
    return HiddenVariableModel(_dist_from(lambda a: Fraction(1, 8)), label="uniform")


def product_model(p1, p2, p3, policy: SettingPolicy | None = None) -> HiddenVariableModel:
    ps = tuple(map(Fraction, (p1, p2, p3)))

    def w(a):
        out = Fraction(1)
        for k, p in enumerate(ps, 1):
            out *= p if a.cause(k) else 1 - p
        return out

    return HiddenVariableModel(_dist_from(w), policy or SettingPolicy.uniform(), label="product")


def point_mass(a: CauseAssignment | str, policy: SettingPolicy | None = None) -> HiddenVariableModel:
    a = CauseAssignment.parse(a) if isinstance(a, str) else a
    return HiddenVariableModel(_dist_from(lambda b: b == a), policy or SettingPolicy.uniform(), label=f"point-{a.label}")


def anti_13_model() -> HiddenVariableModel:
    """C1 fair, C2 fair and independent, C3 = not C1."""
    return HiddenVariableModel(
        _dist_from(lambda a: Fraction(1, 4) if a.c3 != a.c1 else 0), label="c3-not-c1"
    )


def szabo_standin(tilt: Fraction = Fraction(1, 2)) -> HiddenVariableModel:
    """Stand-in (not Szabó's published model) for the conjunction phenomenon.

    Causes are uniform.  The setting policy tilts toward pair 12 and away
    from pair 21 when C1 and C2 agree, and the reverse when they disagree.
    Agreement is balanced inside every single-atom event, so each
    ``p(C_kk | L_i & R_j)`` is exactly 1/2, while ``p(C11 & C22 | L_1 & R_2)``
    moves to ``(1 + tilt)/4``.
    """
    tilt = Fraction(tilt)
    if not 0 < tilt <= 1:
        raise ValueError("tilt must lie in (0, 1]")
    base = Fraction(1, 9)
    by = {}
    for a in ASSIGNMENTS:
        chi = 1 if a.c1 == a.c2 else -1
        dist = {pair: base for pair in PAIRS}
        dist[(1, 2)] = base * (1 + tilt * chi)
        dist[(2, 1)] = base * (1 - tilt * chi)
        by[a] = dist
    policy = SettingPolicy({pair: base for pair in PAIRS}, by)
    return HiddenVariableModel(_dist_from(lambda a: Fraction(1, 8)), policy, label="szabo-standin")


def conspiratorial_model() -> HiddenVariableModel:
    """Uniform causes; pair 12 is favoured whenever C11 holds (all pairs still realized)."""
    by = {}
    for a in ASSIGNMENTS:
        if a.c1:
            dist = {pair: Fraction(1, 12) for pair in PAIRS}
            dist[(1, 2)] = Fraction(1, 3)
            by[a] = dist
    policy = SettingPolicy(SettingPolicy.uniform().default, by)
    return HiddenVariableModel(_dist_from(lambda a: Fraction(1, 8)), policy, label="conspiratorial")


def forced_settings_model() -> HiddenVariableModel:
    """Settings 12 iff C11, else 23: the cause dictates the measurement."""
    by = {a: ({(1, 2): 1} if a.c1 else {(2, 3): 1}) for a in ASSIGNMENTS}
    policy = SettingPolicy({(1, 2): Fraction(1, 2), (2, 3): Fraction(1, 2)}, by)
    return HiddenVariableModel(_dist_from(lambda a: Fraction(1, 8)), policy, label="forced-settings")


def no_outcome_model(a: CauseAssignment | str = "TTT", pair: tuple[int, int] = (1, 2)) -> HiddenVariableModel:
    """Uniform MTH model except that one (assignment, pair) registers no left outcome."""
    a = CauseAssignment.parse(a) if isinstance(a, str) else a
    table = {(b, p): mth_outcomes(b, p) for b in ASSIGNMENTS for p in PAIRS}
    table[(a, pair)] = (None, table[(a, pair)][1])
    return HiddenVariableModel(_dist_from(lambda b: Fraction(1, 8)), response=table, label="no-outcome-defect")


BUILTIN_MODELS = {
    "uniform": uniform_model,
    "c3-not-c1": anti_13_model,
    "szabo-standin": szabo_standin,
    "conspiratorial": conspiratorial_model,
    "forced-settings": forced_settings_model,
    "no-outcome-defect": no_outcome_model,
}


def random_model(rng: random.Random, denominator: int = 60, policy: SettingPolicy | None = None) -> HiddenVariableModel:
    """Random MTH model with rational cause weights on a common denominator.

    Zero weights occur; every cause assignment gets an integer share of
    ``denominator`` drawn by a random composition.
    """
    cuts = sorted(rng.randint(0, denominator) for _ in range(7))
    parts = [b - a for a, b in zip([0, *cuts], [*cuts, denominator])]
    dist = {a: Fraction(n, denominator) for a, n in zip(ASSIGNMENTS, parts)}
    return HiddenVariableModel(dist, policy or SettingPolicy.uniform(), label="random")
