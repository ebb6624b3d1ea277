"""Step-by-step exact replay of the separate-common-cause derivation.

Every step is an identity on a finite space, so all comparisons are exact
``Fraction`` equalities.  :func:`run_derivation` walks the steps in order
and marks a step ``blocked`` as soon as anything upstream is not proven;
blocked steps still carry whatever could be computed, for information.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .core import (
    FALSE,
    And,
    Atom,
    EventExpr,
    FiniteProbabilitySpace,
    Not,
    Or,
    TRUE,
    Variable,
    ZeroConditioning,
    cond_prob,
    prob,
    screens_off,
)
from .models import (
    HiddenVariableModel,
    cause_atom,
    check_ex_nowm_space,
    check_no_cons,
    frac_str,
    model_to_space,
    settings,
)

__all__ = [
    "BiconditionalFails",
    "BinarySplit",
    "DerivationReport",
    "MinimalTheory",
    "NotPerfectlyCorrelated",
    "NotScreeningOff",
    "OutOfRange",
    "Step",
    "bell_check",
    "cause_probabilities",
    "decompose_probabilities",
    "derive_minimal_theories",
    "reduce_to_binary",
    "run_derivation",
]


class NotPerfectlyCorrelated(ValueError):
    pass


class NotScreeningOff(ValueError):
    def __init__(self, value: str, delta):
        super().__init__(f"value {value!r} does not screen off (delta = {delta})")
        self.value = value
        self.delta = delta


class BiconditionalFails(ValueError):
    def __init__(self, which: str, atom, direction: str):
        super().__init__(f"{which} fails at atom {atom!r} ({direction})")
        self.which = which
        self.atom = atom
        self.direction = direction


class OutOfRange(ValueError):
    pass


# ---------------------------------------------------------------------------
# Two-valued reduction
# ---------------------------------------------------------------------------


def _cp_or_none(space, e, given):
    try:
        return cond_prob(space, e, given)
    except ZeroConditioning:
        return None


@dataclass(frozen=True)
class BinarySplit:
    variable: Variable
    plus_values: tuple[str, ...]
    minus_values: tuple[str, ...]
    event: EventExpr
    # residuals per equation key: list of (value label, computed, required)
    residuals: dict = field(default_factory=dict, compare=False)

    @property
    def complement(self) -> EventExpr:
        return Not(self.event)


def reduce_to_binary(
    space: FiniteProbabilitySpace,
    v: Variable,
    a: EventExpr,
    b: EventExpr,
    given: EventExpr = TRUE,
) -> BinarySplit:
    """Collapse a screening variable of a perfect correlation to one event C.

    C is the disjunction of the values q with p(a & Vq & given) > 0.  The
    returned split is checked exactly: C is necessary and sufficient for
    both a and b within ``given``.
    """
    # a and b must coincide almost surely within ``given``; when both are
    # defined this is p(a|b) = p(b|a) = 1, and it also admits the degenerate
    # case where neither ever occurs
    for x, y, name in ((a, b, "p(a|b)"), (b, a, "p(b|a)")):
        stray = prob(space, And((y, Not(x), given)))
        if stray != 0:
            raise NotPerfectlyCorrelated(f"{name} = {cond_prob(space, x, And((y, given)))}, not 1")
    for r in screens_off(space, v, a, b, given):
        if r.status == "fails":
            raise NotScreeningOff(r.value, r.delta)

    plus, minus = [], []
    for q, vq in v.values:
        (plus if prob(space, And((a, vq, given))) != 0 else minus).append(q)

    # requirement per key: (events, values, required value)
    checks = {
        "eq15": (a, minus, 0),
        "eq16": (a, plus, 1),
        "eq17": (b, plus, 1),
        "eq18": (b, minus, 0),
    }
    residuals = {}
    for key, (x, labels, want) in checks.items():
        rows = []
        for q in labels:
            got = _cp_or_none(space, x, And((v.event(q), given)))
            rows.append((q, got, want))
            if got is not None and got != want:
                raise AssertionError(f"{key} fails for value {q}: {got} != {want}")
        residuals[key] = rows

    event = Or(tuple(v.event(q) for q in plus)) if plus else FALSE
    if len(plus) == 1:
        event = v.event(plus[0])
    for x in (a, b):
        for cond, want in ((event, 1), (Not(event), 0)):
            got = _cp_or_none(space, x, And((cond, given)))
            if got is not None and got != want:
                raise AssertionError(f"reduced event fails: p({x}|{cond}) = {got}")
    return BinarySplit(v, tuple(plus), tuple(minus), event, residuals)


# ---------------------------------------------------------------------------
# Minimal theories
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MinimalTheory:
    outcome: str
    setting: str
    cause: str
    cause_positive: bool

    @property
    def condition(self) -> EventExpr:
        c = cause_atom(int(self.cause[1]))
        return And((Atom(self.setting), c if self.cause_positive else Not(c)))

    def __str__(self) -> str:
        lit = self.cause if self.cause_positive else f"~{self.cause}"
        return f"({self.setting} & {lit}) <-> {self.outcome}"


MINIMAL_THEORIES = (
    MinimalTheory("L1+", "L1", "C11", True),
    MinimalTheory("L2+", "L2", "C22", True),
    MinimalTheory("R2+", "R2", "C22", False),
    MinimalTheory("R3+", "R3", "C33", False),
)


def _implication_counterexample(space, lhs: EventExpr, rhs: EventExpr):
    """A positive-weight atom where lhs holds but rhs does not, or None."""
    bad = (lhs.atoms_in(space) - rhs.atoms_in(space)) & space.support
    return min(bad, key=repr) if bad else None


def verify_biconditional(space: FiniteProbabilitySpace, theory: MinimalTheory) -> None:
    cond, out = theory.condition, Atom(theory.outcome)
    atom = _implication_counterexample(space, cond, out)
    if atom is not None:
        raise BiconditionalFails(str(theory), atom, "condition without outcome")
    atom = _implication_counterexample(space, out, cond)
    if atom is not None:
        raise BiconditionalFails(str(theory), atom, "outcome without condition")


def derive_minimal_theories(space: FiniteProbabilitySpace) -> list[MinimalTheory]:
    """The four outcome biconditionals, each verified on every positive-weight atom."""
    for t in MINIMAL_THEORIES:
        verify_biconditional(space, t)
    return list(MINIMAL_THEORIES)


# ---------------------------------------------------------------------------
# Probability identities
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Identity:
    key: str
    lhs: Fraction | None
    rhs: Fraction | None
    note: str = ""

    @property
    def holds(self) -> bool:
        return self.lhs is not None and self.lhs == self.rhs

    def to_json(self) -> dict:
        out = {
            "lhs": None if self.lhs is None else frac_str(self.lhs),
            "rhs": None if self.rhs is None else frac_str(self.rhs),
            "holds": self.holds,
        }
        if self.note:
            out["note"] = self.note
        return out


_CROSS = (("eq25", 1, 2), ("eq26", 2, 3), ("eq27", 1, 3))
_CAUSE_SUMS = (("eq28", 1, 2), ("eq29", 2, 3), ("eq30", 1, 3))


def _plus_plus(i: int, j: int) -> EventExpr:
    return And((Atom(f"L{i}+"), Atom(f"R{j}+")))


def _cause_pp(i: int, j: int) -> EventExpr:
    return And((cause_atom(i), Not(cause_atom(j))))


def decompose_probabilities(space: FiniteProbabilitySpace) -> list[Identity]:
    """p(L_i+ & R_j+ & L_i & R_j) = p(L_i & C_ii & R_j & ~C_jj) for 12, 23, 13."""
    out = []
    for key, i, j in _CROSS:
        lhs = prob(space, And((_plus_plus(i, j), settings(i, j))))
        rhs = prob(space, And((Atom(f"L{i}"), cause_atom(i), Atom(f"R{j}"), Not(cause_atom(j)))))
        out.append(Identity(key, lhs, rhs))
    return out


def cause_probabilities(space: FiniteProbabilitySpace) -> tuple[list[Identity], dict]:
    """p(L_i+ & R_j+ | L_i & R_j) as a sum of two cause-only probabilities.

    Returns the three identities plus a record of the middle step, where
    the setting-conditional cause probability is replaced by the
    unconditional one.  If that replacement fails the identity is reported
    with a note naming the violating combination.
    """
    out = []
    step_ii = {}
    for key, i, j in _CAUSE_SUMS:
        k = ({1, 2, 3} - {i, j}).pop()
        given = settings(i, j)
        lhs = _cp_or_none(space, _plus_plus(i, j), given)
        conditional = _cp_or_none(space, _cause_pp(i, j), given)
        marginal = prob(space, _cause_pp(i, j))
        rhs = prob(space, And((_cause_pp(i, j), cause_atom(k)))) + prob(
            space, And((_cause_pp(i, j), Not(cause_atom(k))))
        )
        ok_ii = conditional == marginal
        step_ii[key] = {"conditional": conditional, "marginal": marginal, "holds": ok_ii}
        note = "" if ok_ii else f"no-conspiracy step fails for {_cause_pp(i, j)} given L{i} & R{j}"
        out.append(Identity(key, lhs, rhs, note))
    return out, step_ii


def bell_check(p13, p12, p23) -> tuple[bool, object]:
    """Return ``(satisfied, slack)`` with slack = p12 + p23 - p13."""
    for name, v in (("p13", p13), ("p12", p12), ("p23", p23)):
        if not 0 <= v <= 1:
            raise OutOfRange(f"{name} = {v} outside [0, 1]")
    slack = p12 + p23 - p13
    return slack >= 0, slack


# ---------------------------------------------------------------------------
# Full replay
# ---------------------------------------------------------------------------

PROVEN, FAILED, BLOCKED, PREMISE = "proven", "failed", "blocked", "premise"


@dataclass
class Step:
    key: str
    title: str
    status: str
    holds: bool | None
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"title": self.title, "status": self.status, "holds": self.holds, "detail": _jsonable(self.detail)}


def _jsonable(x):
    if isinstance(x, Fraction):
        return frac_str(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, Identity):
        return x.to_json()
    return x


@dataclass
class DerivationReport:
    steps: list[Step]
    p13: Fraction | None = None
    p12: Fraction | None = None
    p23: Fraction | None = None

    def __getitem__(self, key: str) -> Step:
        for s in self.steps:
            if s.key == key:
                return s
        raise KeyError(key)

    @property
    def all_proven(self) -> bool:
        return all(s.status in (PROVEN, PREMISE) for s in self.steps)

    def first_failure(self) -> Step | None:
        return next((s for s in self.steps if s.status == FAILED), None)

    def to_json(self) -> dict:
        return {
            "steps": {s.key: s.to_json() for s in self.steps},
            "p13": None if self.p13 is None else frac_str(self.p13),
            "p12": None if self.p12 is None else frac_str(self.p12),
            "p23": None if self.p23 is None else frac_str(self.p23),
            "all_proven": self.all_proven,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1)


def _parallel(i: int) -> EventExpr:
    return settings(i, i)


def _conditional_checks(space, rows):
    """rows: (label, event, given, required). Zero-weight conditions are vacuous."""
    detail, ok = {}, True
    for label, e, given, want in rows:
        got = _cp_or_none(space, e, given)
        if got is None:
            detail[label] = "vacuous"
        else:
            detail[label] = got
            ok = ok and got == want
    return ok, detail


def _unrealized_parallel(space) -> list[int]:
    return [i for i in (1, 2, 3) if prob(space, _parallel(i)) == 0]


def run_derivation(m: HiddenVariableModel | FiniteProbabilitySpace) -> DerivationReport:
    """Check every derivation step on the model's induced space, in order."""
    space = m if isinstance(m, FiniteProbabilitySpace) else model_to_space(m)
    steps: list[Step] = []
    upstream_ok = True

    def record(key, title, fn):
        nonlocal upstream_ok
        try:
            holds, detail = fn()
        except (ZeroConditioning, ValueError, AssertionError) as exc:
            holds, detail = False, {"error": str(exc)}
        if upstream_ok:
            status = PROVEN if holds else FAILED
        else:
            status = BLOCKED
        steps.append(Step(key, title, status, holds, detail))
        if status != PROVEN:
            upstream_ok = False

    def premise(key, title, text):
        steps.append(Step(key, title, PREMISE, None, {"note": text}))

    missing = _unrealized_parallel(space)

    def pcorr():
        if missing:
            return False, {"error": f"parallel settings never realized for directions {missing}"}
        rows = []
        for i in (1, 2, 3):
            given = _parallel(i)
            rows.append((f"p{i}{i}(R{i}-|L{i}+)", Atom(f"R{i}-"), And((Atom(f"L{i}+"), given)), 1))
            rows.append((f"p{i}{i}(L{i}+|R{i}-)", Atom(f"L{i}+"), And((Atom(f"R{i}-"), given)), 1))
        return _conditional_checks(space, rows)

    record("eq9", "perfect correlation", pcorr)
    premise("sep", "separability", "coinciding left and right outcomes are distinct events (causal premise, not checkable)")
    premise("loc1", "locality 1", "no outcome is causally relevant for the other wing (causal premise, not checkable)")

    def result1():
        detail, ok = {}, True
        for i in (1, 2, 3):
            v = Variable.binary(f"C{i}{i}", cause_atom(i))
            rep = screens_off(space, v, Atom(f"L{i}+"), Atom(f"R{i}-"), _parallel(i))
            detail[f"C{i}{i}"] = {r.value: (r.status if r.delta is None else r.delta) for r in rep}
            ok = ok and all(r.holds for r in rep)
        return ok, detail

    record("eq14", "common cause screens off each parallel correlation", result1)

    splits = {}

    def reduction():
        detail = {}
        for i in (1, 2, 3):
            v = Variable.binary(f"C{i}{i}", cause_atom(i))
            split = reduce_to_binary(space, v, Atom(f"L{i}+"), Atom(f"R{i}-"), _parallel(i))
            splits[i] = split
            detail[f"C{i}{i}"] = {"plus": list(split.plus_values), "minus": list(split.minus_values)}
        return True, detail

    record("eq15_18", "reduction to a two-valued common cause", reduction)
    for key in ("eq15", "eq16", "eq17", "eq18"):
        def per_key(key=key):
            if not splits:
                return False, {"error": "reduction unavailable"}
            return True, {f"C{i}{i}": [list(r) for r in splits[i].residuals[key]] for i in splits}

        record(key, f"reduction identity {key}", per_key)

    record("eq19", "cause sufficient for L_i+ and R_i-",
           lambda: _conditional_checks(space, [
               (f"p{i}{i}({o}|C{i}{i})", Atom(o), And((cause_atom(i), _parallel(i))), 1)
               for i in (1, 2, 3) for o in (f"L{i}+", f"R{i}-")]))
    record("eq20", "cause necessary for L_i+ and R_i-",
           lambda: _conditional_checks(space, [
               (f"p{i}{i}({o}|~C{i}{i})", Atom(o), And((Not(cause_atom(i)), _parallel(i))), 0)
               for i in (1, 2, 3) for o in (f"L{i}+", f"R{i}-")]))

    ex = check_ex_nowm_space(space)
    for key, wing, side in (("eq21", "L", "left"), ("eq22", "R", "right")):
        failures = [msg for w, _, msg in ex.ex_failures if w == wing]
        record(key, f"exactly one of two outcomes, {side} wing",
               lambda failures=failures: (not failures, {"failures": failures}))
    record("eq23", "cause excludes the opposite outcomes",
           lambda: _conditional_checks(space, [
               (f"p{i}{i}({o}|C{i}{i})", Atom(o), And((cause_atom(i), _parallel(i))), 0)
               for i in (1, 2, 3) for o in (f"L{i}-", f"R{i}+")]))
    record("eq24", "absence of cause yields the opposite outcomes",
           lambda: _conditional_checks(space, [
               (f"p{i}{i}({o}|~C{i}{i})", Atom(o), And((Not(cause_atom(i)), _parallel(i))), 1)
               for i in (1, 2, 3) for o in (f"L{i}-", f"R{i}+")]))

    def loc(kind):
        # LOC2: local setting + cause literal alone suffices for the + outcome.
        # LOC3: local setting + opposite literal alone suffices for its negation.
        def fn():
            detail, ok = {}, True
            for i in (1, 2, 3):
                for wing, lit in (("L", cause_atom(i)), ("R", Not(cause_atom(i)))):
                    setting, outcome = Atom(f"{wing}{i}"), Atom(f"{wing}{i}+")
                    if kind == "loc2":
                        lhs, rhs, label = And((setting, lit)), outcome, f"{setting} & {lit} -> {outcome}"
                    else:
                        lhs, rhs, label = And((setting, Not(lit))), Not(outcome), f"{setting} & {Not(lit)} -> ~{outcome}"
                    bad = _implication_counterexample(space, lhs, rhs)
                    detail[label] = "holds" if bad is None else f"fails at {bad!r}"
                    ok = ok and bad is None
            return ok, detail

        return fn

    record("loc2", "locality 2: distant setting dropped from sufficient condition", loc("loc2"))
    record("nowm", "no outcome without measurement",
           lambda: (ex.nowm_ok, {"failures": list(ex.nowm_failures)}))
    record("loc3", "locality 3: distant setting dropped from condition for the negation", loc("loc3"))

    def mth():
        return True, {"theories": [str(t) for t in derive_minimal_theories(space)]}

    record("mth", "minimal theories", mth)

    decomposed = decompose_probabilities(space)
    for ident in decomposed:
        record(ident.key, f"joint ++ probability as a cause-setting conjunction ({ident.key})",
               lambda ident=ident: (ident.holds, {"identity": ident}))

    def nocons():
        rep = check_no_cons(space)
        viol = [
            {"event": v.event, "pair": f"{v.pair[0]}{v.pair[1]}", "conditional": v.conditional,
             "marginal": v.marginal, "delta": v.delta}
            for v in rep.violations
        ]
        return rep.ok, {"checked": rep.checked, "violations": viol[:20], "violation_count": len(viol)}

    record("eq31", "no conspiracy", nocons)

    sums, _ = cause_probabilities(space)
    for ident in sums:
        record(ident.key, f"conditional ++ probability as cause sums ({ident.key})",
               lambda ident=ident: (ident.holds, {"identity": ident}))

    report = DerivationReport(steps)
    try:
        report.p13 = cond_prob(space, _plus_plus(1, 3), settings(1, 3))
        report.p12 = cond_prob(space, _plus_plus(1, 2), settings(1, 2))
        report.p23 = cond_prob(space, _plus_plus(2, 3), settings(2, 3))
    except ZeroConditioning:
        pass

    def bell():
        if report.p13 is None:
            return False, {"error": "a cross setting pair is never realized"}
        satisfied, slack = bell_check(report.p13, report.p12, report.p23)
        return satisfied, {"p13": report.p13, "p12": report.p12, "p23": report.p23,
                           "slack": slack, "holds_numerically": satisfied}

    record("eq32", "Bell inequality p13 <= p12 + p23", bell)
    return report
