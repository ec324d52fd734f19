"""Superharmonic functions on configurations built from vertex functions.

The basic construction takes the minimum of a vertex function over the
configuration (empty set valued at the root).  On top of that: positive
weighted sums, certified truncations of countable sums, walk images, and the
generalized form that feeds the sorted value vector into a symmetric concave
non-decreasing function after padding with 1.
"""

from __future__ import annotations

import random
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence

from .dyadic import Dyadic, ROOT
from .errors import (
    MissingTailBound,
    PreconditionFailed,
    PropertySelfTestFailed,
)
from .graph import ball
from .harmonic import VertexFn, canonical_phi_u, markov_apply_X, phi_family, pow2
from .lamplighter import Config, SetFn, apply_letter, markov_apply_set, markov_iterate

__all__ = [
    "minfun",
    "T_operator",
    "non_superharmonic_transfer",
    "weighted_sum",
    "countable_sum",
    "phi_family_tail_bound",
    "markov_image",
    "SymmetricConcaveFn",
    "r_family_kmean",
    "generalized_minfun",
    "resolve_setfn",
]


def _check_max_at_root(phi, radius: int = 3) -> bool:
    top = phi(ROOT)
    return all(phi(v) <= top for v in ball(ROOT, radius).vertices)


def minfun(phi) -> SetFn:
    """Minimum of phi over the configuration; the empty set takes phi(root)."""
    if phi.max_at_p is not True and not _check_max_at_root(phi):
        warnings.warn(f"{phi.name}: maximum at the root not confirmed on a probe ball")
    root_val = phi(ROOT)

    def fn(E: Config):
        if not E:
            return root_val
        return min(phi(x) for x in E)

    return SetFn(
        name=f"minfun:{phi.name}",
        fn=fn,
        switch_invariant=True,
        superharmonic=phi.superharmonic,
        meta=(("phi", phi),),
    )


def T_operator(F, E: Config, alpha: Fraction):
    """alpha times the 4-letter average plus (1 - alpha) times the switch image."""
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie strictly between 0 and 1")
    t1 = (
        F(apply_letter(E, "a"))
        + F(apply_letter(E, "b"))
        + F(apply_letter(E, "A"))
        + F(apply_letter(E, "B"))
    ) / 4
    t2 = F(apply_letter(E, "s"))
    return alpha * t1 + (1 - alpha) * t2


@dataclass
class TransferReport:
    q: Dyadic
    vertex_gap: Fraction  # P phi(q) - phi(q), positive by precondition
    set_margin: Fraction  # P F({q}) - F({q}) for the min-function F

    @property
    def ok(self) -> bool:
        return self.set_margin > 0


def non_superharmonic_transfer(phi, q: Dyadic) -> TransferReport:
    """Show the min-function inherits a walk violation from phi at q.

    Requires phi(q) < P phi(q) and phi bounded by its root value near q; the
    resulting margin on the singleton equals 4/5 of the vertex gap, which is
    recomputed and asserted.
    """
    if q == ROOT:
        raise PreconditionFailed("the root cannot be a violation point here")
    gap = markov_apply_X(phi, q) - phi(q)
    if gap <= 0:
        raise PreconditionFailed(f"phi is superharmonic at {q} (gap {gap})")
    if phi(q) > phi(ROOT):
        raise PreconditionFailed("phi must stay below its root value")

    def fn(E: Config):
        if not E:
            return phi(ROOT)
        return min(phi(x) for x in E)

    F = SetFn(name=f"minfun:{phi.name}", fn=fn)
    margin = markov_apply_set(F, (q,)) - F((q,))
    assert margin == Fraction(4, 5) * gap, "transfer margin must be 4/5 of the gap"
    return TransferReport(q=q, vertex_gap=gap, set_margin=margin)


def weighted_sum(Fs: Sequence[SetFn], lambdas: Sequence[Fraction]) -> SetFn:
    """Pointwise positive combination; preserves superharmonicity."""
    if len(Fs) != len(lambdas):
        raise ValueError("need one weight per function")
    if any(lam <= 0 for lam in lambdas):
        raise ValueError("weights must be positive")
    terms = list(zip(lambdas, Fs))

    def fn(E: Config):
        return sum(lam * F(E) for lam, F in terms)

    return SetFn(
        name="+".join(f"{lam}*{F.name}" for lam, F in terms),
        fn=fn,
        switch_invariant=all(F.switch_invariant for F in Fs) or None,
        superharmonic=all(F.superharmonic for F in Fs) or None,
        meta=(("terms", tuple(terms)),),
    )


def phi_family_tail_bound(eps: Fraction) -> int:
    """Smallest N with the family's root values beyond N summing below eps."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    N = 0
    while pow2(-N) >= eps:
        N += 1
    return N


def countable_sum(
    family: Callable[[int], VertexFn],
    eps: Fraction,
    tail_bound: Optional[Callable[[Fraction], int]] = None,
    family_name: str = "phi_family",
) -> SetFn:
    """Truncated sum of min-functions of family(0), family(1), ... .

    tail_bound(eps) must return N with the tail of root values (indices > N)
    summing below eps; each term is bounded by its root value, so the
    truncation error is certified below eps.  The result records the
    truncation index and the certified error.
    """
    if tail_bound is None:
        raise MissingTailBound("countable_sum needs a certified tail bound")
    N = tail_bound(eps)
    terms = [minfun(family(i)) for i in range(N + 1)]

    def fn(E: Config):
        return sum(term(E) for term in terms)

    out = SetFn(
        name=f"sum:{family_name}:eps={eps}",
        fn=fn,
        switch_invariant=True,
        superharmonic=True,
        meta=(("truncation_N", N), ("certified_error", eps), ("family", family_name)),
    )
    return out


def markov_image(F: SetFn, n: int, cap: int = 8) -> SetFn:
    """The n-step walk image of F as a SetFn (exact dynamic programming)."""

    def fn(E: Config):
        return markov_iterate(F, E, n, cap=cap)

    return SetFn(
        name=f"P^{n}[{F.name}]",
        fn=fn,
        switch_invariant=None,
        superharmonic=F.superharmonic,
        meta=(("base", F), ("power", n)),
    )


# ---------------------------------------------------------------------------
# generalized min-functions


@dataclass(frozen=True)
class SymmetricConcaveFn:
    """Symmetric, concave, coordinatewise non-decreasing function on (0,1]^arity.

    Declared properties cannot be certified for arbitrary callables, so
    ensure_tested() probes them with random exact-rational points and raises
    PropertySelfTestFailed on any counterexample.
    """

    name: str
    arity: int
    fn: Callable[[tuple], Fraction]

    def __call__(self, xs: tuple):
        if len(xs) != self.arity:
            raise ValueError(f"{self.name} expects {self.arity} coordinates")
        return self.fn(xs)

    def ensure_tested(self, probes: int = 1000, seed: int = 0) -> None:
        if getattr(self, "_tested", False):
            return
        rng = random.Random(seed)
        m = self.arity

        def rand_point():
            return tuple(Fraction(rng.randint(1, 64), 64) for _ in range(m))

        for _ in range(probes):
            u = rand_point()
            val = self.fn(u)
            if val < 0:
                raise PropertySelfTestFailed(f"{self.name}: negative value at {u}")
            perm = list(range(m))
            rng.shuffle(perm)
            if self.fn(tuple(u[i] for i in perm)) != val:
                raise PropertySelfTestFailed(f"{self.name}: not symmetric at {u}")
            v = rand_point()
            mid = tuple((ui + vi) / 2 for ui, vi in zip(u, v))
            if self.fn(mid) < (val + self.fn(v)) / 2:
                raise PropertySelfTestFailed(
                    f"{self.name}: concavity fails between {u} and {v}"
                )
            j = rng.randrange(m)
            bump = Fraction(rng.randint(1, 16), 64)
            w = list(u)
            w[j] = min(Fraction(1), w[j] + bump)
            if self.fn(tuple(w)) < val:
                raise PropertySelfTestFailed(
                    f"{self.name}: decreasing in coordinate {j} at {u}"
                )
        object.__setattr__(self, "_tested", True)


def r_family_kmean(k: int, m: int) -> SymmetricConcaveFn:
    """Mean of the k smallest of m coordinates.

    Concave because it is the minimum over k-subsets of the subset means;
    k = 1 recovers the plain minimum and k = m the full mean.
    """
    if not 1 <= k <= m:
        raise ValueError("need 1 <= k <= m")

    def fn(xs: tuple) -> Fraction:
        return sum(sorted(xs)[:k]) / k

    return SymmetricConcaveFn(name=f"kmean:{k}:{m}", arity=m, fn=fn)


def generalized_minfun(r: SymmetricConcaveFn, phi) -> SetFn:
    """Feed the sorted, root-normalized values of phi on E into r.

    Values are sorted ascending, truncated to the arity's worth of smallest
    entries, and padded with 1 (the normalized root value); the empty set
    maps to r(1, ..., 1).  The normalization factor is recorded.
    """
    r.ensure_tested()
    factor = phi(ROOT)
    if factor <= 0:
        raise PreconditionFailed("phi must be positive at the root")
    m = r.arity
    one = Fraction(1)

    def fn(E: Config):
        vals = sorted(phi(x) / factor for x in E)[:m]
        vals.extend([one] * (m - len(vals)))
        return r(tuple(vals))

    return SetFn(
        name=f"gmin:{r.name}:{phi.name}",
        fn=fn,
        switch_invariant=True,
        superharmonic=phi.superharmonic,
        meta=(("r", r), ("phi", phi), ("normalization", factor)),
    )


# ---------------------------------------------------------------------------
# registry


def _parse_eps(s: str) -> Fraction:
    try:
        return Fraction(s)
    except ValueError:
        return Fraction(float(s))


def _resolve_phi(token: Sequence[str]) -> VertexFn:
    if token[0] == "phi_u":
        return canonical_phi_u()
    if token[0] == "phi" and len(token) == 2:
        return phi_family(int(token[1]))
    raise KeyError(f"unknown vertex function {':'.join(token)!r}")


def resolve_setfn(name: str) -> SetFn:
    """Look up a SetFn by its registry name.

    Supported forms: minfun:phi_u, minfun:phi:<n>, gmin:kmean:<k>:<m>:<phi...>,
    sum:phi_family:eps=<rational or float>.
    """
    parts = name.split(":")
    if parts[0] == "minfun":
        return minfun(_resolve_phi(parts[1:]))
    if parts[0] == "gmin" and parts[1] == "kmean":
        k, m = int(parts[2]), int(parts[3])
        return generalized_minfun(r_family_kmean(k, m), _resolve_phi(parts[4:]))
    if parts[0] == "sum" and parts[1] == "phi_family":
        if len(parts) != 3 or not parts[2].startswith("eps="):
            raise KeyError(f"malformed sum name {name!r}")
        eps = _parse_eps(parts[2][4:])
        return countable_sum(phi_family, eps, tail_bound=phi_family_tail_bound)
    raise KeyError(f"unknown set function {name!r}")
