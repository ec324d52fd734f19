"""Functions on the orbit graph and their superharmonicity bookkeeping.

A function phi is superharmonic for the simple 4-generator walk when
phi(v) >= P phi(v) at every vertex, where P averages phi over the four
labeled neighbor images (loops count with multiplicity).  The two bundled
families evaluate to exact Fractions; user-supplied functions may return
floats, in which case margin comparisons take a tolerance.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from .dyadic import Dyadic, ROOT
from .errors import PreconditionFailed
from .graph import (
    Ball,
    act_letter,
    ball,
    classify,
    gen_for_turn,
    hair_point,
    neighbors,
    struct_info,
)

__all__ = [
    "VertexFn",
    "markov_apply_X",
    "SuperharmonicReport",
    "is_superharmonic_on",
    "canonical_phi_u",
    "phi_family",
    "hair_property_suite",
    "HairPropertyReport",
    "level_min",
    "harmonic_witness_search",
]

_POW2: dict[int, Fraction] = {}


def pow2(k: int) -> Fraction:
    """Fraction 2**k, cached (the bundled families only ever produce these)."""
    q = _POW2.get(k)
    if q is None:
        q = Fraction(1 << k) if k >= 0 else Fraction(1, 1 << -k)
        _POW2[k] = q
    return q


@dataclass(frozen=True)
class VertexFn:
    """Evaluatable function on vertices plus its claimed properties.

    find_below, when present, returns some skeleton vertex with value below a
    given positive threshold; the constructors use it instead of scanning
    tree levels (which is hopeless once the needed depth passes ~20) and
    always re-check the returned value.
    """

    name: str
    fn: Callable[[Dyadic], Fraction]
    superharmonic: Optional[bool] = None
    max_at_p: Optional[bool] = None
    infimum: Optional[Fraction] = None
    constant_on_hairs: Optional[bool] = None
    find_below: Optional[Callable[[Fraction], Dyadic]] = None

    def __call__(self, v: Dyadic):
        return self.fn(v)


def markov_apply_X(phi, v: Dyadic):
    """One step of the walk operator: quarter-sum of phi over labeled images."""
    nb = neighbors(v)
    return (phi(nb["a"]) + phi(nb["b"]) + phi(nb["A"]) + phi(nb["B"])) / 4


@dataclass
class SuperharmonicReport:
    center: Dyadic
    radius: int
    entries: list = field(default_factory=list)  # (vertex, phi, P phi, margin)
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def margin_at(self, v: Dyadic):
        for u, _, _, m in self.entries:
            if u == v:
                return m
        raise KeyError(v)

    def to_json(self) -> dict:
        return {
            "center": str(self.center),
            "radius": self.radius,
            "interior_vertices": len(self.entries),
            "violations": [[str(v), str(m)] for v, m in self.violations],
            "ok": self.ok,
        }

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["vertex", "phi", "P_phi", "margin"])
            for v, val, pval, m in self.entries:
                w.writerow([str(v), str(val), str(pval), str(m)])


def is_superharmonic_on(phi, region: Ball, tol=0) -> SuperharmonicReport:
    """Margins phi - P phi on the interior of the region; negatives are violations."""
    rep = SuperharmonicReport(region.center, region.radius)
    for v in region.interior():
        val = phi(v)
        pval = markov_apply_X(phi, v)
        margin = val - pval
        rep.entries.append((v, val, pval, margin))
        if margin < -tol:
            rep.violations.append((v, margin))
    return rep


def canonical_phi_u() -> VertexFn:
    """2**(2 - u) where u is the skeleton depth of the vertex's tree point.

    Constant on hairs, maximum 4 at the root, and its walk margin vanishes
    everywhere except the root where it equals 1.
    """

    def fn(v: Dyadic) -> Fraction:
        _, _, depth = struct_info(v)
        return pow2(2 - depth)

    def find_below(threshold: Fraction) -> Dyadic:
        d = 0
        while pow2(2 - d) >= threshold:
            d += 1
        cur = ROOT
        down = gen_for_turn("L")
        for _ in range(d):
            cur = act_letter(down, cur)
        return cur

    return VertexFn(
        name="phi_u",
        fn=fn,
        superharmonic=True,
        max_at_p=True,
        infimum=Fraction(0),
        constant_on_hairs=True,
        find_below=find_below,
    )


def phi_family(n: int) -> VertexFn:
    """Member n of the subtree-localized family.

    Value 2**-n off subtree n; inside it, 2**-d at skeleton depth d (hairs
    inherit their base's value).  Each member is superharmonic with maximum
    2**-n attained everywhere outside the subtree, in particular at the root.
    """
    if n < 0:
        raise ValueError("family index must be >= 0")

    def fn(v: Dyadic) -> Fraction:
        lead, deeper, depth = struct_info(v)
        if lead == n and deeper:
            return pow2(-depth)
        return pow2(-n)

    def find_below(threshold: Fraction) -> Dyadic:
        k = 0
        while pow2(-(n + 1 + k)) >= threshold:
            k += 1
        down, right = gen_for_turn("L"), gen_for_turn("R")
        cur = ROOT
        for _ in range(n):
            cur = act_letter(down, cur)
        cur = act_letter(right, cur)
        for _ in range(k):
            cur = act_letter(down, cur)
        return cur

    return VertexFn(
        name=f"phi:{n}",
        fn=fn,
        superharmonic=True,
        max_at_p=True,
        infimum=Fraction(0),
        constant_on_hairs=True,
        find_below=find_below,
    )


@dataclass
class HairPropertyReport:
    base: Dyadic
    values: list
    failures: list  # (property name, offset m, detail)

    @property
    def ok(self) -> bool:
        return not self.failures


def hair_property_suite(phi, base: Dyadic, M: int, tol=0) -> HairPropertyReport:
    """Check the three hair facts for offsets up to M.

    For a positive function that is superharmonic along the probed hair:
    increments are non-increasing, values never decrease outward, and the
    value m steps out is at most (3m+1) times the base value.  The
    superharmonicity precondition is checked exactly at the base and at the
    probed hair points themselves (a radius-M ball around a deep base is
    exponentially large and the facts only use margins along the hair).
    """
    pts = [hair_point(base, m) for m in range(M + 2)]
    for v in pts[: M + 1]:
        val = phi(v)
        if val <= 0:
            raise PreconditionFailed(f"phi({v}) = {val} is not positive")
        if val - markov_apply_X(phi, v) < -tol:
            raise PreconditionFailed(f"phi is not superharmonic at {v}")
    values = [phi(v) for v in pts]
    rep = HairPropertyReport(base, values[: M + 1], [])
    for m in range(M):
        inc0 = values[m + 1] - values[m]
        inc1 = values[m + 2] - values[m + 1]
        if inc1 > inc0 + tol:
            rep.failures.append(("concave_increments", m, (inc0, inc1)))
            break
    for m in range(M):
        if values[m + 1] < values[m] - tol:
            rep.failures.append(("non_decreasing", m, (values[m], values[m + 1])))
            break
    for m in range(M + 1):
        if values[m] > (3 * m + 1) * values[0] + tol:
            rep.failures.append(("linear_bound", m, values[m]))
            break
    return rep


def level_min(phi, n: int):
    """(min of phi over skeleton depths 0..n, a witness at depth n).

    For a superharmonic positive function with its maximum at the root the
    minimum is attained on the deepest level; if no depth-n vertex attains
    it the precondition was broken and we refuse.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    level = [ROOT]
    best = phi(ROOT)
    witness = None
    for depth in range(n + 1):
        vals = [phi(v) for v in level]
        lo = min(vals)
        if lo < best:
            best = lo
        if depth == n:
            for v, val in zip(level, vals):
                if val == best:
                    witness = v
                    break
        if depth < n:
            nxt = []
            for v in level:
                nxt.append(act_letter("a", v))
                nxt.append(act_letter("b", v))
            level = nxt
    if witness is None:
        raise PreconditionFailed(
            f"minimum over depths 0..{n} not attained at depth {n}; "
            "phi is not a superharmonic max-at-root function"
        )
    return best, witness


def harmonic_witness_search(h, n: int, d: int, region: Ball, sup):
    """First vertex in the region with h above sup - 1/(n * d**n), else None."""
    if n < 1 or d < 1:
        raise ValueError("n and d must be >= 1")
    threshold = sup - Fraction(1, n * d**n)
    for v in region.vertices:
        if h(v) > threshold:
            return v
    return None
