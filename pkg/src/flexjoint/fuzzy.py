"""Type-1 Sugeno fuzzy inference for PD gain regulation.

Each regulator maps a (error, error-rate) pair to a pair of gain increments
(dkp, dkd) through a 5x5 rule base over the linguistic terms
NB, NS, ZE, PS, PB.  Antecedents are triangular memberships with evenly
spaced peaks; consequents are zero-order singletons evenly spaced over the
output interval (NB -> lower bound, ZE -> midpoint, PB -> upper bound).
The t-norm is the product, and firing strengths are normalized, so the
output is a convex combination of the singletons and therefore always lies
inside the configured bounds.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

TERMS = ("NB", "NS", "ZE", "PS", "PB")
_TERM_INDEX = {t: i for i, t in enumerate(TERMS)}

# Rule consequents, row = error term, column = error-rate term (NB..PB).
KP_RULES = (
    ("NB", "NB", "NS", "NS", "ZE"),
    ("NB", "NS", "NS", "ZE", "PS"),
    ("NS", "NS", "ZE", "PS", "PS"),
    ("NS", "ZE", "PS", "PS", "PB"),
    ("ZE", "PS", "PS", "PB", "PB"),
)
KD_RULES = (
    ("PB", "PB", "PS", "PS", "ZE"),
    ("PB", "PS", "PS", "ZE", "NS"),
    ("PS", "PS", "ZE", "NS", "NS"),
    ("PS", "ZE", "NS", "NS", "NB"),
    ("ZE", "NS", "NS", "NB", "NB"),
)


class FuzzyConfigError(ValueError):
    """Malformed scale or rule base."""


@dataclass(frozen=True)
class TriangularMF:
    left: float
    peak: float
    right: float

    def __post_init__(self):
        if not (self.left <= self.peak <= self.right):
            raise FuzzyConfigError(
                f"triangle requires left <= peak <= right, got "
                f"({self.left}, {self.peak}, {self.right})")


def grade(mf: TriangularMF, x: float) -> float:
    """Membership of x in [0, 1]; linear on each flank, 0 outside support.

    Edge membership functions may have a zero-width flank (left == peak or
    peak == right); the degenerate side simply never fires.
    """
    if x == mf.peak:
        return 1.0
    if x <= mf.left or x >= mf.right:
        return 0.0
    if x < mf.peak:
        return (x - mf.left) / (mf.peak - mf.left)
    return (mf.right - x) / (mf.right - mf.peak)


@dataclass(frozen=True)
class LinguisticScale:
    """Five-term partition of [lo, hi] with evenly spaced peaks.

    Interior terms are full triangles spanning the two neighbouring peaks;
    NB and PB are half-triangles peaking at the domain edge.  Adjacent
    memberships sum to 1 everywhere in the domain (partition of unity),
    provided inputs are clamped to [lo, hi] first.
    """

    lo: float
    hi: float
    mfs: tuple[TriangularMF, ...] = field(init=False)

    def __post_init__(self):
        if not self.lo < self.hi:
            raise FuzzyConfigError(f"need lo < hi, got [{self.lo}, {self.hi}]")
        peaks = np.linspace(self.lo, self.hi, 5)
        mfs = []
        for i in range(5):
            left = peaks[i - 1] if i > 0 else peaks[0]
            right = peaks[i + 1] if i < 4 else peaks[4]
            mfs.append(TriangularMF(float(left), float(peaks[i]), float(right)))
        object.__setattr__(self, "mfs", tuple(mfs))

    def clamp(self, x: float) -> float:
        return min(max(x, self.lo), self.hi)

    def grades(self, x: float) -> np.ndarray:
        x = self.clamp(x)
        return np.array([grade(mf, x) for mf in self.mfs])


# Input domains: angular error in rad, angular-velocity error in rad/s.
ERROR_SCALE = LinguisticScale(-np.pi, np.pi)
RATE_SCALE = LinguisticScale(-5.0, 5.0)


def _check_table(table) -> None:
    if len(table) != 5 or any(len(r) != 5 for r in table):
        raise FuzzyConfigError("rule table must be 5x5")
    for row in table:
        for t in row:
            if t not in _TERM_INDEX:
                raise FuzzyConfigError(f"unknown linguistic term {t!r}")


@dataclass(frozen=True)
class RuleBase:
    """Rule tables plus output bounds for one regulator (dkp and dkd)."""

    kp_bounds: tuple[float, float]
    kd_bounds: tuple[float, float]
    table_kp: tuple = KP_RULES
    table_kd: tuple = KD_RULES

    def __post_init__(self):
        _check_table(self.table_kp)
        _check_table(self.table_kd)
        for lo, hi in (self.kp_bounds, self.kd_bounds):
            if lo > hi:
                raise FuzzyConfigError(f"bounds must satisfy lower <= upper, got ({lo}, {hi})")

    def singletons(self, bounds: tuple[float, float]) -> np.ndarray:
        lo, hi = bounds
        return np.linspace(lo, hi, 5)


@dataclass(frozen=True)
class FlrBounds:
    """Output intervals of both regulators, (lower, upper) per gain."""

    dkp1: tuple[float, float] = (0.0, 0.0)
    dkd1: tuple[float, float] = (0.0, 0.0)
    dkp2: tuple[float, float] = (0.0, 0.0)
    dkd2: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        for name in ("dkp1", "dkd1", "dkp2", "dkd2"):
            lo, hi = getattr(self, name)
            if lo > hi:
                raise FuzzyConfigError(f"{name} bounds must be ordered, got ({lo}, {hi})")

    @staticmethod
    def ordered(dkp1, dkd1, dkp2, dkd2) -> "FlrBounds":
        """Build bounds from possibly swapped (a, b) pairs by taking
        (min, max) of each pair."""
        fix = lambda p: (min(p), max(p))
        return FlrBounds(fix(dkp1), fix(dkd1), fix(dkp2), fix(dkd2))


def firing_strengths(e_scale: LinguisticScale, de_scale: LinguisticScale,
                     e: float, de: float) -> np.ndarray:
    """Normalized rule activations as a 5x5 array (rows: e terms,
    columns: de terms); non-negative and summing to 1."""
    w = np.outer(e_scale.grades(e), de_scale.grades(de))
    total = w.sum()
    if total <= 0.0:
        raise FuzzyConfigError("no rule fired; scale violates partition of unity")
    return w / total


def infer(rb: RuleBase, e: float, de: float,
          e_scale: LinguisticScale = ERROR_SCALE,
          de_scale: LinguisticScale = RATE_SCALE) -> tuple[float, float]:
    """Sugeno output (dkp, dkd): firing-strength-weighted singleton average."""
    w = firing_strengths(e_scale, de_scale, e, de)
    out = []
    for table, bounds in ((rb.table_kp, rb.kp_bounds), (rb.table_kd, rb.kd_bounds)):
        sing = rb.singletons(bounds)
        idx = np.array([[_TERM_INDEX[t] for t in row] for row in table])
        out.append(float(np.sum(w * sing[idx])))
    return out[0], out[1]
