"""Exact finite probability spaces and a small boolean event algebra.

Events are symbolic expressions over named atomic event types (``L1``,
``R2+``, ``C11``, ...).  A :class:`FiniteProbabilitySpace` assigns each
atomic name a set of worlds ("atoms"); evaluating an expression is plain
set algebra over those atoms, and probabilities are exact
:class:`fractions.Fraction` sums.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Iterable, Mapping

__all__ = [
    "And",
    "Atom",
    "EventExpr",
    "FALSE",
    "FiniteProbabilitySpace",
    "InvalidSpace",
    "InvalidVariable",
    "Not",
    "Or",
    "ScreeningResult",
    "TRUE",
    "UndeclaredAtom",
    "Variable",
    "ZeroConditioning",
    "all_of",
    "any_of",
    "cond_prob",
    "correlated",
    "ev",
    "prob",
    "screens_off",
]


class UndeclaredAtom(KeyError):
    def __init__(self, name: str):
        super().__init__(name)
        self.name = name

    def __str__(self) -> str:
        return f"undeclared atomic event {self.name!r}"


class ZeroConditioning(ZeroDivisionError):
    """Raised when conditioning on an event of probability zero."""


class InvalidSpace(ValueError):
    pass


class InvalidVariable(ValueError):
    pass


# ---------------------------------------------------------------------------
# Event expressions
# ---------------------------------------------------------------------------


class EventExpr:
    """Base class for event expressions; combine with ``&``, ``|`` and ``~``."""

    __slots__ = ()

    def __and__(self, other: EventExpr) -> EventExpr:
        return And((self, other))

    def __or__(self, other: EventExpr) -> EventExpr:
        return Or((self, other))

    def __invert__(self) -> EventExpr:
        return Not(self)

    def leaves(self) -> frozenset[str]:
        raise NotImplementedError

    def atoms_in(self, space: FiniteProbabilitySpace) -> frozenset:
        raise NotImplementedError


@dataclass(frozen=True, slots=True)
class Atom(EventExpr):
    name: str

    def leaves(self) -> frozenset[str]:
        return frozenset((self.name,))

    def atoms_in(self, space: FiniteProbabilitySpace) -> frozenset:
        try:
            return space.extension[self.name]
        except KeyError:
            raise UndeclaredAtom(self.name) from None

    def __invert__(self) -> EventExpr:
        return _Not(self)

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, slots=True)
class _Not(EventExpr):
    inner: EventExpr

    def leaves(self) -> frozenset[str]:
        return self.inner.leaves()

    def atoms_in(self, space: FiniteProbabilitySpace) -> frozenset:
        return space.all_atoms - self.inner.atoms_in(space)

    def __invert__(self) -> EventExpr:
        return self.inner

    def __str__(self) -> str:
        inner = str(self.inner)
        if isinstance(self.inner, (Atom, _Not)):
            return f"~{inner}"
        return f"~({inner})"


def Not(e: EventExpr) -> EventExpr:
    """Negation; ``Not(Not(e))`` is ``e`` itself."""
    if isinstance(e, _Not):
        return e.inner
    return _Not(e)


@dataclass(frozen=True, slots=True)
class And(EventExpr):
    parts: tuple[EventExpr, ...]

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))

    def leaves(self) -> frozenset[str]:
        return frozenset().union(*(p.leaves() for p in self.parts))

    def atoms_in(self, space: FiniteProbabilitySpace) -> frozenset:
        result = space.all_atoms
        for p in self.parts:
            result = result & p.atoms_in(space)
        return result

    def __str__(self) -> str:
        if not self.parts:
            return "TRUE"
        return " & ".join(_wrap(p) for p in self.parts)


@dataclass(frozen=True, slots=True)
class Or(EventExpr):
    parts: tuple[EventExpr, ...]

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))

    def leaves(self) -> frozenset[str]:
        return frozenset().union(*(p.leaves() for p in self.parts))

    def atoms_in(self, space: FiniteProbabilitySpace) -> frozenset:
        result: frozenset = frozenset()
        for p in self.parts:
            result = result | p.atoms_in(space)
        return result

    def __str__(self) -> str:
        if not self.parts:
            return "FALSE"
        return " | ".join(_wrap(p) for p in self.parts)


def _wrap(e: EventExpr) -> str:
    s = str(e)
    return f"({s})" if isinstance(e, (And, Or)) and len(e.parts) > 1 else s


TRUE: EventExpr = And(())
FALSE: EventExpr = Or(())


def ev(name: str) -> Atom:
    return Atom(name)


def all_of(*events: EventExpr) -> EventExpr:
    return events[0] if len(events) == 1 else And(events)


def any_of(*events: EventExpr) -> EventExpr:
    return events[0] if len(events) == 1 else Or(events)


# ---------------------------------------------------------------------------
# Spaces
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FiniteProbabilitySpace:
    """Finite set of atoms with exact rational weights.

    ``extension`` maps each atomic event name to the atoms on which it holds.
    Atoms with weight zero are allowed; they never change a probability but
    still take part in extension-level (logical) checks.
    """

    atoms: tuple[Hashable, ...]
    weight: Mapping[Hashable, Fraction]
    extension: Mapping[str, frozenset]
    all_atoms: frozenset = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        atoms = tuple(self.atoms)
        all_atoms = frozenset(atoms)
        if len(all_atoms) != len(atoms):
            raise InvalidSpace("duplicate atom identifiers")
        weight = {}
        for a in atoms:
            if a not in self.weight:
                raise InvalidSpace(f"atom {a!r} has no weight")
            w = Fraction(self.weight[a])
            if w < 0:
                raise InvalidSpace(f"atom {a!r} has negative weight {w}")
            weight[a] = w
        if set(self.weight) - all_atoms:
            raise InvalidSpace("weights given for undeclared atoms")
        total = sum(weight.values(), Fraction(0))
        if total != 1:
            raise InvalidSpace(f"weights sum to {total}, not 1")
        extension = {}
        for name, ext in self.extension.items():
            ext = frozenset(ext)
            stray = ext - all_atoms
            if stray:
                raise InvalidSpace(f"extension of {name!r} has undeclared atoms {sorted(map(repr, stray))}")
            extension[name] = ext
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "weight", weight)
        object.__setattr__(self, "extension", extension)
        object.__setattr__(self, "all_atoms", all_atoms)

    @classmethod
    def uniform(cls, atoms: Iterable[Hashable], extension: Mapping[str, Iterable]) -> FiniteProbabilitySpace:
        atoms = tuple(atoms)
        w = Fraction(1, len(atoms))
        return cls(atoms, {a: w for a in atoms}, {k: frozenset(v) for k, v in extension.items()})

    @property
    def support(self) -> frozenset:
        return frozenset(a for a in self.atoms if self.weight[a] > 0)

    def atoms_of(self, e: EventExpr) -> frozenset:
        return e.atoms_in(self)

    def measure(self, atoms: Iterable[Hashable]) -> Fraction:
        return sum((self.weight[a] for a in atoms), Fraction(0))

    def holds_at(self, e: EventExpr, atom: Hashable) -> bool:
        return atom in e.atoms_in(self)

    def with_extension(self, name: str, atoms: Iterable[Hashable]) -> FiniteProbabilitySpace:
        """Copy of the space with one atomic event's extension replaced."""
        ext = dict(self.extension)
        ext[name] = frozenset(atoms)
        return FiniteProbabilitySpace(self.atoms, self.weight, ext)


def prob(space: FiniteProbabilitySpace, e: EventExpr) -> Fraction:
    return space.measure(e.atoms_in(space))


def cond_prob(space: FiniteProbabilitySpace, e: EventExpr, given: EventExpr) -> Fraction:
    denom = prob(space, given)
    if denom == 0:
        raise ZeroConditioning(f"p({given}) = 0")
    return prob(space, And((e, given))) / denom


def correlated(
    space: FiniteProbabilitySpace, a: EventExpr, b: EventExpr, given: EventExpr = TRUE
) -> tuple[bool, Fraction]:
    """Return ``(correlated, delta)`` with delta = p(a&b|given) - p(a|given) p(b|given)."""
    pab = cond_prob(space, And((a, b)), given)
    delta = pab - cond_prob(space, a, given) * cond_prob(space, b, given)
    return delta != 0, delta


# ---------------------------------------------------------------------------
# Variables and screening off
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Variable:
    """A finite-valued variable; each value label is bound to an event."""

    name: str
    values: tuple[tuple[str, EventExpr], ...]

    def __post_init__(self):
        vals = tuple((str(q), e if isinstance(e, EventExpr) else Atom(e)) for q, e in self.values)
        if not vals:
            raise InvalidVariable(f"variable {self.name!r} has no values")
        if len({q for q, _ in vals}) != len(vals):
            raise InvalidVariable(f"variable {self.name!r} has repeated value labels")
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_mapping(cls, name: str, values: Mapping[str, EventExpr | str]) -> Variable:
        return cls(name, tuple(values.items()))

    @classmethod
    def binary(cls, name: str, event: EventExpr) -> Variable:
        """Two-valued variable {event, not event}."""
        return cls(name, (("true", event), ("false", Not(event))))

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(q for q, _ in self.values)

    def event(self, label: str) -> EventExpr:
        for q, e in self.values:
            if q == label:
                return e
        raise KeyError(label)

    def check(self, space: FiniteProbabilitySpace) -> None:
        """Raise InvalidVariable unless the values partition the atoms."""
        seen: set = set()
        for q, e in self.values:
            ext = e.atoms_in(space)
            overlap = seen & ext
            if overlap:
                raise InvalidVariable(f"value {q!r} of {self.name!r} overlaps earlier values")
            seen |= ext
        if seen != space.all_atoms:
            raise InvalidVariable(f"values of {self.name!r} do not cover every atom")


@dataclass(frozen=True)
class ScreeningResult:
    value: str
    status: str  # "holds" | "fails" | "vacuous"
    delta: Fraction | None

    @property
    def holds(self) -> bool:
        return self.status != "fails"


def screens_off(
    space: FiniteProbabilitySpace,
    v: Variable,
    a: EventExpr,
    b: EventExpr,
    given: EventExpr = TRUE,
) -> list[ScreeningResult]:
    """Per-value screening-off report for ``v`` over the pair ``a``, ``b``.

    Values whose conjunction with ``given`` has zero weight are reported as
    vacuous rather than failed.
    """
    v.check(space)
    report = []
    for q, vq in v.values:
        cond = And((vq, given))
        if prob(space, cond) == 0:
            report.append(ScreeningResult(q, "vacuous", None))
            continue
        _, delta = correlated(space, a, b, cond)
        report.append(ScreeningResult(q, "holds" if delta == 0 else "fails", delta))
    return report
