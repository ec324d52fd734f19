"""Approximately invariant lamp configurations.

Verification is exact: the whole length-<=n word orbit is enumerated and the
relative change of the target function is compared with the tolerance beta.
The constructors park lamps far out on hairs below skeleton vertices whose
function values sit strictly under everything reachable from the root, which
pins the minimum and makes the target exactly invariant on the orbit.  In the
other direction, golden_witness produces a short word that refutes
invariance of the family sum for any configuration with few lamps.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .dyadic import Dyadic, ROOT
from .errors import (
    PreconditionFailed,
    SearchExhausted,
    StructuralAssertFailed,
    ZeroBase,
)
from .graph import act_letter, act_word, ball, classify, golden_path, hair_point, subtree_T, Hair
from .harmonic import VertexFn, level_min, phi_family, pow2
from .lamplighter import (
    LAMP_LETTERS,
    Config,
    SetFn,
    apply_word,
    config,
    orbit_enumerate,
    serialize_config,
)
from .minfn import (
    SymmetricConcaveFn,
    countable_sum,
    generalized_minfun,
    markov_image,
    minfun,
    phi_family_tail_bound,
    weighted_sum,
)

__all__ = [
    "BetaSchedule",
    "beta_schedule",
    "VerifyReport",
    "strong_verify",
    "weak_verify",
    "ConstructionResult",
    "construct_En_single",
    "construct_En_sum",
    "construct_En_markov",
    "construct_En_countable",
    "explicit_En_hairs",
    "WitnessResult",
    "golden_witness",
    "SearchResult",
    "generalized_En_search",
]


@dataclass(frozen=True)
class BetaSchedule:
    """Tolerance as a function of the level n."""

    name: str
    fn: Callable[[int], Fraction]

    def value(self, n: int) -> Fraction:
        return self.fn(n)


BETA_SCHEDULES = {
    "inv_n": BetaSchedule("inv_n", lambda n: Fraction(1, n)),
    "inv_2n": BetaSchedule("inv_2n", lambda n: pow2(-n)),
}


def beta_schedule(name: str) -> BetaSchedule:
    try:
        return BETA_SCHEDULES[name]
    except KeyError:
        raise KeyError(f"unknown beta schedule {name!r}") from None


@dataclass
class VerifyReport:
    fn_name: str
    E: Config
    n: int
    beta: Fraction
    mode: str
    checked: int
    base_value: Fraction
    worst_word: str
    worst_deviation: Fraction

    @property
    def passed(self) -> bool:
        return self.worst_deviation <= self.beta

    def to_json(self) -> dict:
        return {
            "fn": self.fn_name,
            "set": serialize_config(self.E),
            "n": self.n,
            "beta": str(self.beta),
            "mode": self.mode,
            "checked": self.checked,
            "base_value": str(self.base_value),
            "worst_word": self.worst_word,
            "worst_deviation": str(self.worst_deviation),
            "passed": self.passed,
        }


def strong_verify(F, E: Config, n: int, beta: Fraction, cap: int = 10**6) -> VerifyReport:
    """Exact relative deviation of F over the whole length-<=n orbit of E."""
    base = F(E)
    if base == 0:
        raise ZeroBase(f"{F.name} vanishes on the tested configuration")
    worst = Fraction(0)
    worst_word = ""
    orbit = orbit_enumerate(E, n, cap=cap)
    for C, word in orbit.items():
        dev = abs(F(C) - base) / base
        if dev > worst:
            worst, worst_word = dev, word
    return VerifyReport(
        fn_name=F.name,
        E=E,
        n=n,
        beta=beta,
        mode="strong",
        checked=len(orbit),
        base_value=base,
        worst_word=worst_word,
        worst_deviation=worst,
    )


def weak_verify(
    F, E: Config, n: int, beta: Fraction, samples: int = 500, seed: int = 0
) -> VerifyReport:
    """Same deviation statistic over random words instead of the full orbit."""
    base = F(E)
    if base == 0:
        raise ZeroBase(f"{F.name} vanishes on the tested configuration")
    rng = random.Random(seed)
    worst = Fraction(0)
    worst_word = ""
    for _ in range(samples):
        word = "".join(rng.choice(LAMP_LETTERS) for _ in range(rng.randint(1, n)))
        dev = abs(F(apply_word(E, word)) - base) / base
        if dev > worst:
            worst, worst_word = dev, word
    return VerifyReport(
        fn_name=F.name,
        E=E,
        n=n,
        beta=beta,
        mode="weak",
        checked=samples,
        base_value=base,
        worst_word=worst_word,
        worst_deviation=worst,
    )


# ---------------------------------------------------------------------------
# constructors


@dataclass
class ConstructionResult:
    E: Config
    setfn: SetFn
    n: int
    beta: Fraction
    notes: tuple[tuple[str, str], ...] = ()

    def to_json(self) -> dict:
        return {
            "set": serialize_config(self.E),
            "fn": self.setfn.name,
            "n": self.n,
            "beta": str(self.beta),
            "notes": dict(self.notes),
        }


_SCAN_WIDTH_CAP = 1 << 16


def find_vertex_below(phi, threshold: Fraction, max_depth: int = 96) -> Dyadic:
    """A skeleton vertex with phi strictly below threshold.

    Uses the function's own descent hint when present (re-checking the value,
    since hints are advisory); otherwise scans levels, which is only viable
    while the threshold is moderate.
    """
    if threshold <= 0:
        raise PreconditionFailed("threshold must be positive")
    if phi.find_below is not None:
        q = phi.find_below(threshold)
        if not phi(q) < threshold:
            raise StructuralAssertFailed(
                f"{phi.name}: descent hint gave {q} with value {phi(q)} >= {threshold}"
            )
        return q
    level = [ROOT]
    for depth in range(1, max_depth + 1):
        level = [act_letter(ch, v) for v in level for ch in ("a", "b")]
        best = min(level, key=phi)
        if phi(best) < threshold:
            return best
        if len(level) * 2 > _SCAN_WIDTH_CAP:
            raise SearchExhausted(
                f"{phi.name}: no value below {threshold} within scannable depth",
                frontier={"depth": depth, "width": len(level), "best": str(phi(best))},
            )
    raise SearchExhausted(
        f"{phi.name}: no value below {threshold} by depth {max_depth}",
        frontier={"depth": max_depth},
    )


def _require_level(n: int) -> None:
    # offset n**2 minus at most n steps must stay strictly on the hair
    if n < 2:
        raise PreconditionFailed("constructions need n >= 2")


def construct_En_single(
    phi, n: int, beta: BetaSchedule = BETA_SCHEDULES["inv_n"]
) -> ConstructionResult:
    """One lamp far out on a hair under a vertex where phi is already tiny."""
    _require_level(n)
    r_n, _ = level_min(phi, n)
    if r_n <= 0:
        raise PreconditionFailed(f"{phi.name} must stay positive down to level {n}")
    threshold = r_n / (4 * n * n)
    q = find_vertex_below(phi, threshold)
    E = config([hair_point(q, n * n)])
    return ConstructionResult(
        E=E,
        setfn=minfun(phi),
        n=n,
        beta=beta.value(n),
        notes=(
            ("level_min", str(r_n)),
            ("threshold", str(threshold)),
            ("base_vertex", str(q)),
            ("hair_offset", str(n * n)),
        ),
    )


def construct_En_sum(
    phis: Sequence[VertexFn],
    n: int,
    lambdas: Optional[Sequence[Fraction]] = None,
    beta: BetaSchedule = BETA_SCHEDULES["inv_n"],
) -> ConstructionResult:
    """One lamp per summand, each pinning its own minimum below the common floor."""
    _require_level(n)
    if not phis:
        raise PreconditionFailed("need at least one summand")
    if lambdas is None:
        lambdas = [Fraction(1)] * len(phis)
    region = ball(ROOT, n)
    eps = min(min(phi(v) for v in region.vertices) for phi in phis)
    threshold = eps / (4 * n * n)
    points = [hair_point(find_vertex_below(phi, threshold), n * n) for phi in phis]
    E = config(points)
    F = weighted_sum([minfun(phi) for phi in phis], lambdas)
    return ConstructionResult(
        E=E,
        setfn=F,
        n=n,
        beta=beta.value(n),
        notes=(
            ("ball_floor", str(eps)),
            ("threshold", str(threshold)),
            ("hair_offset", str(n * n)),
        ),
    )


def construct_En_markov(
    phis: Sequence[VertexFn],
    powers: Sequence[int],
    n: int,
    lambdas: Optional[Sequence[Fraction]] = None,
    beta: BetaSchedule = BETA_SCHEDULES["inv_n"],
) -> ConstructionResult:
    """Walk images only widen the word window, so delegate to the sum recipe
    at level n plus the largest power."""
    if len(phis) != len(powers):
        raise PreconditionFailed("need one walk power per summand")
    if any(k < 0 for k in powers):
        raise PreconditionFailed("walk powers must be >= 0")
    m = n + max(powers)
    inner = construct_En_sum(phis, m, lambdas=lambdas, beta=beta)
    if lambdas is None:
        lambdas = [Fraction(1)] * len(phis)
    F = weighted_sum(
        [markov_image(minfun(phi), k) for phi, k in zip(phis, powers)], lambdas
    )
    return ConstructionResult(
        E=inner.E,
        setfn=F,
        n=n,
        beta=beta.value(n),
        notes=inner.notes + (("delegated_level", str(m)),),
    )


def construct_En_countable(
    n: int,
    eps: Fraction = Fraction(1, 2**20),
    beta: BetaSchedule = BETA_SCHEDULES["inv_n"],
) -> ConstructionResult:
    """Enough lamps that every summand of the family sum is pinned.

    The index cutoff N is driven by the smallest family value achieved, so
    beyond it the summands cannot see the root's n-ball at all and stay
    constant without their own lamp.
    """
    _require_level(n)
    region = ball(ROOT, n)

    def floor_of(phi) -> Fraction:
        return min(phi(v) for v in region.vertices)

    fam0 = phi_family(0)
    z0 = find_vertex_below(fam0, floor_of(fam0) / (16 * n * n))
    delta = fam0(z0)
    N = 0
    while pow2(-N) >= delta / (3 * n):
        N += 1
    points = [hair_point(z0, 4 * n * n)]
    for i in range(1, N + 1):
        fam = phi_family(i)
        z = find_vertex_below(fam, floor_of(fam) / (16 * n * n))
        points.append(hair_point(z, 4 * n * n))
    E = config(points)
    F = countable_sum(phi_family, eps, tail_bound=phi_family_tail_bound)
    return ConstructionResult(
        E=E,
        setfn=F,
        n=n,
        beta=beta.value(n),
        notes=(
            ("delta", str(delta)),
            ("index_cutoff", str(N)),
            ("lamps", str(len(E))),
            ("hair_offset", str(4 * n * n)),
        ),
    )


# ---------------------------------------------------------------------------
# the explicit hair family and its refutation counterpart


def explicit_En_hairs(n: int) -> Config:
    """The n-lamp configuration A^n b^n a^j . root for j = 0..n-1.

    Each lamp is validated structurally: offset n on a hair that loops on b,
    attached at depth j+n inside subtree j.  Any mismatch raises
    StructuralAssertFailed rather than returning a dubious configuration.
    """
    if n < 1:
        raise PreconditionFailed("need n >= 1")
    points = []
    for j in range(n):
        x = act_word("A" * n + "b" * n + "a" * j, ROOT)
        if act_letter("b", x) != x:
            raise StructuralAssertFailed(f"lamp {j}: expected a hair looping on b")
        addr = classify(x)
        if not isinstance(addr, Hair) or addr.offset != n:
            raise StructuralAssertFailed(f"lamp {j}: expected hair offset {n}, got {addr}")
        lead = 0
        for t in addr.base:
            if t != "L":
                break
            lead += 1
        if not (lead == j and len(addr.base) == j + n and lead < len(addr.base)):
            raise StructuralAssertFailed(
                f"lamp {j}: base path {addr.base} is not subtree {j} at depth {j + n}"
            )
        points.append(x)
    E = config(points)
    if len(E) != n:
        raise StructuralAssertFailed("explicit lamps must be pairwise distinct")
    return E


@dataclass
class WitnessResult:
    word: str
    index: int
    case: str
    base_value: Fraction
    deviation: Fraction

    def to_json(self) -> dict:
        return {
            "word": self.word,
            "index": self.index,
            "case": self.case,
            "base_value": str(self.base_value),
            "deviation": str(self.deviation),
        }


def golden_witness(E: Config, n: int, F: Optional[SetFn] = None) -> WitnessResult:
    """A word of length <= n that moves the family sum by at least 2^-n.

    Works for any configuration with at most n-2 lamps: some subtree with
    index below n-1 holds no lamp, and steering a lamp (or a freshly
    switched root lamp) down its golden path drops that summand by half.
    Switch and forward letters never increase any summand, so the drop
    survives in the sum.
    """
    if n < 2:
        raise PreconditionFailed("need n >= 2")
    if len(E) > n - 2:
        raise PreconditionFailed(f"guaranteed only for at most {n - 2} lamps")
    if F is None:
        F = countable_sum(phi_family, pow2(-n), tail_bound=phi_family_tail_bound)
    i = next(
        idx for idx in range(n - 1) if not any(subtree_T(idx, x) for x in E)
    )
    spine = golden_path(i)[:-1]
    lamp_depths = [k for k, v in enumerate(spine) if v in E]
    if lamp_depths:
        k = max(lamp_depths)
        word = "b" + "a" * (i - k)
        case = "spine-lamp"
    else:
        word = "b" + "a" * i + "s"
        case = "vacant-path"
    base = F(E)
    deviation = (base - F(apply_word(E, word))) / base
    assert deviation >= pow2(-n), (
        f"witness {word!r} moved the sum by {deviation}, below {pow2(-n)}"
    )
    return WitnessResult(
        word=word, index=i, case=case, base_value=base, deviation=deviation
    )


# ---------------------------------------------------------------------------
# search for generalized targets


@dataclass
class SearchResult:
    found: Optional[Config]
    tried: int
    report: Optional[VerifyReport]

    def to_json(self) -> dict:
        return {
            "found": None if self.found is None else serialize_config(self.found),
            "tried": self.tried,
            "report": None if self.report is None else self.report.to_json(),
        }


def generalized_En_search(
    r: SymmetricConcaveFn,
    phi,
    n: int,
    beta: Optional[Fraction] = None,
    budget: int = 8,
    cap: int = 10**6,
) -> SearchResult:
    """Verified search for a configuration the generalized function accepts.

    Candidates fill the function's arity with lamps on hairs under distinct,
    progressively deeper low-value vertices; each candidate is checked with
    strong_verify and the first pass wins.  Exhausting the budget returns a
    result with found=None and the last report.
    """
    _require_level(n)
    if beta is None:
        beta = Fraction(1, n)
    F = generalized_minfun(r, phi)
    region = ball(ROOT, n)
    floor = min(phi(v) for v in region.vertices)
    tried = 0
    last: Optional[VerifyReport] = None
    for t in range(budget):
        tried += 1
        bases: list[Dyadic] = []
        s = 0
        while len(bases) < r.arity:
            threshold = floor / (4 * n * n) / pow2(t + s)
            q = find_vertex_below(phi, threshold)
            if q not in bases:
                bases.append(q)
            s += 1
            if s > r.arity + 16:
                raise SearchExhausted(
                    "could not collect distinct base vertices",
                    frontier={"candidate": t, "collected": len(bases)},
                )
        E = config(hair_point(q, n * n) for q in bases)
        report = strong_verify(F, E, n, beta, cap=cap)
        if report.passed:
            return SearchResult(found=E, tried=tried, report=report)
        last = report
    return SearchResult(found=None, tried=tried, report=last)
