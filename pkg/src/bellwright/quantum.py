"""Singlet-state outcome statistics for three measurement directions.

Angles are given in degrees.  Every quantity is available in floating
point; for pairwise angles whose cosine is rational (0, 60, 90, 120, 180
degrees) the same quantity is also available as an exact ``Fraction``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational, Real

from .models import TargetStatistics

__all__ = [
    "DIRECTIONS",
    "OUTCOMES",
    "DirectionConfig",
    "correlation",
    "exact_cos",
    "joint_prob",
    "marginal_prob",
    "quantum_targets",
]

DIRECTIONS = (1, 2, 3)
OUTCOMES = ("+", "-")

# cos of the angles whose half-angle sin^2 is rational
_EXACT_COS = {
    Fraction(0): Fraction(1),
    Fraction(60): Fraction(1, 2),
    Fraction(90): Fraction(0),
    Fraction(120): Fraction(-1, 2),
    Fraction(180): Fraction(-1),
}

# float evaluation error allowance when rounding to rationals
_FLOAT_SLACK = Fraction(1, 2**48)


def _as_fraction(x: Real) -> Fraction | None:
    if isinstance(x, Rational):
        return Fraction(x)
    if isinstance(x, float) and math.isfinite(x) and x == round(x, 9):
        f = Fraction(x).limit_denominator(10**9)
        if float(f) == x:
            return f
    return None


@dataclass(frozen=True)
class DirectionConfig:
    """Three measurement directions, in degrees, shared by both wings."""

    angles: tuple[Real, Real, Real]

    def __post_init__(self):
        angles = tuple(self.angles)
        if len(angles) != 3:
            raise ValueError(f"need exactly three directions, got {len(angles)}")
        for a in angles:
            if not math.isfinite(float(a)):
                raise ValueError(f"angle {a!r} is not finite")
        object.__setattr__(self, "angles", angles)

    @classmethod
    def parse(cls, text: str) -> DirectionConfig:
        """Parse ``"0,60,120"``; integers stay exact."""
        parts = [p.strip() for p in text.split(",")]
        vals: list[Real] = []
        for p in parts:
            try:
                vals.append(int(p))
            except ValueError:
                vals.append(Fraction(p) if "/" in p else float(p))
        return cls(tuple(vals))

    @classmethod
    def equally_spaced(cls, theta: Real) -> DirectionConfig:
        return cls((0, theta, 2 * theta))

    def phi_deg(self, i: int, j: int) -> Real:
        """Angle between directions i and j, folded into [0, 180]."""
        a, b = self.angles[i - 1], self.angles[j - 1]
        fa, fb = _as_fraction(a), _as_fraction(b)
        if fa is not None and fb is not None:
            d = abs(fa - fb) % 360
            return d if d <= 180 else 360 - d
        d = math.fmod(abs(float(a) - float(b)), 360.0)
        return d if d <= 180.0 else 360.0 - d

    def phi(self, i: int, j: int) -> float:
        return math.radians(float(self.phi_deg(i, j)))

    def is_exact(self) -> bool:
        return all(
            _as_fraction(self.phi_deg(i, j)) in _EXACT_COS for i in DIRECTIONS for j in DIRECTIONS
        )


def exact_cos(phi_deg: Real) -> Fraction | None:
    f = _as_fraction(phi_deg)
    return _EXACT_COS.get(f) if f is not None else None


def _check(i: int, j: int, *outcomes: str) -> None:
    if i not in DIRECTIONS or j not in DIRECTIONS:
        raise ValueError(f"direction indices must be in 1..3, got ({i}, {j})")
    for o in outcomes:
        if o not in OUTCOMES:
            raise ValueError(f"outcome must be '+' or '-', got {o!r}")


def joint_prob(cfg: DirectionConfig, i: int, j: int, a: str, b: str, exact: bool = False):
    """p(L_i^a & R_j^b | L_i & R_j) for the singlet state.

    Equal outcomes get sin^2(phi/2)/2, opposite outcomes cos^2(phi/2)/2.
    With ``exact=True`` a Fraction is returned, or ValueError raised if the
    angle between i and j has no rational value.
    """
    _check(i, j, a, b)
    if exact:
        c = exact_cos(cfg.phi_deg(i, j))
        if c is None:
            raise ValueError(f"angle {cfg.phi_deg(i, j)} deg has no exact rational prediction")
        # sin^2(x/2) = (1 - cos x)/2
        return (1 - c) / 4 if a == b else (1 + c) / 4
    half = cfg.phi(i, j) / 2
    return 0.5 * math.sin(half) ** 2 if a == b else 0.5 * math.cos(half) ** 2


def marginal_prob(cfg: DirectionConfig, wing: str, i: int, j: int, a: str, exact: bool = False):
    """Single-wing outcome probability given settings (i, j); always one half."""
    if wing not in ("left", "right"):
        raise ValueError(f"wing must be 'left' or 'right', got {wing!r}")
    _check(i, j, a)
    if wing == "left":
        total = sum(joint_prob(cfg, i, j, a, b, exact) for b in OUTCOMES)
    else:
        total = sum(joint_prob(cfg, i, j, b, a, exact) for b in OUTCOMES)
    return Fraction(total) if exact else total


def correlation(cfg: DirectionConfig, i: int, j: int, exact: bool = False):
    """E(i,j) = p(++) + p(--) - p(+-) - p(-+); equals -cos(phi_ij)."""
    p = lambda a, b: joint_prob(cfg, i, j, a, b, exact)  # noqa: E731
    return p("+", "+") + p("-", "-") - p("+", "-") - p("-", "+")


def quantum_targets(
    cfg: DirectionConfig, exact: bool | None = None, denominator: int = 10**6
) -> TargetStatistics:
    """Full 9-pair outcome table as rational targets.

    ``exact=None`` picks exact mode when every pairwise angle allows it.
    Otherwise each equal-outcome entry is rounded to the nearest rational
    with denominator at most ``denominator`` and the opposite-outcome
    entries are set to ``1/2 - x`` so that rows still sum to exactly one.
    The worst rounding error is recorded as the table's radius.
    """
    if exact is None:
        exact = cfg.is_exact()
    probs: dict = {}
    radius = Fraction(0)
    for i in DIRECTIONS:
        for j in DIRECTIONS:
            if exact:
                same = joint_prob(cfg, i, j, "+", "+", exact=True)
            else:
                s = joint_prob(cfg, i, j, "+", "+")
                c = exact_cos(cfg.phi_deg(i, j))
                if c is not None:
                    same = (1 - c) / 4
                else:
                    same = Fraction(s).limit_denominator(denominator)
                    radius = max(radius, abs(Fraction(s) - same) + _FLOAT_SLACK)
            opp = Fraction(1, 2) - same
            probs[(i, j, "+", "+")] = same
            probs[(i, j, "-", "-")] = same
            probs[(i, j, "+", "-")] = opp
            probs[(i, j, "-", "+")] = opp
    return TargetStatistics(probs, radius=radius)
