"""Random-walk statistics on the labeled graph and on lamp configurations.

Exact return probabilities at the root go through a depth/offset lumping of
the four-letter walk: all skeleton vertices of one depth act alike, as do all
hair vertices of one (depth, offset), so the chain on those pairs reproduces
the root return probabilities with a state space that grows quadratically in
the horizon instead of exponentially.  Monte Carlo runs vectorize the same
lumped chain.  Long lamp trajectories use a structural state that parks
hair-bound lamps in wake buckets so a step costs time in the number of lamps
actually on the skeleton.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .dyadic import Dyadic, ROOT
from .errors import CapExceeded, PreconditionFailed
from .graph import EDGE_LABELS, act_letter, ball, hair_point, vertex_at
from .harmonic import canonical_phi_u, markov_apply_X, pow2
from .lamplighter import (
    LAMP_LETTERS,
    Config,
    apply_letter,
    config,
    markov_apply_set,
)
from .minfn import resolve_setfn

__all__ = [
    "lumped_return_series",
    "pn_exact",
    "green_partial",
    "MCReport",
    "green_mc",
    "ReturnReport",
    "return_prob",
    "spectral_radius_proxy",
    "DeltaReport",
    "delta_check_phi_u",
    "SupermartingaleReport",
    "supermartingale_check",
    "StructuralLampWalk",
    "WalkConfig",
    "DecayReport",
    "potential_decay_experiment",
]


# ---------------------------------------------------------------------------
# the lumped chain

_ZERO = Fraction(0)


def _lumped_step(dist: dict) -> dict:
    out: dict = {}

    def add(state, w):
        out[state] = out.get(state, _ZERO) + w

    for (u, m), w in dist.items():
        if m == 0:
            if u == 0:
                # two children, two hair entries
                add((1, 0), w / 2)
                add((0, 1), w / 2)
            else:
                # two children, one parent, one hair entry
                add((u + 1, 0), w / 2)
                add((u - 1, 0), w / 4)
                add((u, 1), w / 4)
        else:
            # one step toward the base, one away, two loops
            add((u, m - 1), w / 4)
            add((u, m + 1), w / 4)
            add((u, m), w / 2)
    return out


def lumped_return_series(N: int) -> list[Fraction]:
    """P^n(root, root) for n = 0..N via the depth/offset lumping."""
    if N < 0:
        raise ValueError("N must be >= 0")
    dist = {(0, 0): Fraction(1)}
    out = [Fraction(1)]
    for _ in range(N):
        dist = _lumped_step(dist)
        out.append(dist.get((0, 0), _ZERO))
    return out


def _x_step(dist: dict, cap: int) -> dict:
    out: dict = {}
    for v, w in dist.items():
        share = w / 4
        for ch in EDGE_LABELS:
            img = act_letter(ch, v)
            out[img] = out.get(img, _ZERO) + share
    if len(out) > cap:
        raise CapExceeded(f"walk support {len(out)} exceeds cap {cap}")
    return out


def pn_exact(x: Dyadic, y: Dyadic, n: int, cap: int = 200_000) -> Fraction:
    """Exact n-step probability from x to y, evolving the full distribution."""
    if n < 0:
        raise ValueError("n must be >= 0")
    dist = {x: Fraction(1)}
    for _ in range(n):
        dist = _x_step(dist, cap)
    assert sum(dist.values()) == 1, "walk weights must sum to 1"
    return dist.get(y, _ZERO)


def green_partial(x: Dyadic, y: Dyadic, r: Fraction, N: int, cap: int = 200_000):
    """Partial Green sum: p_n(x,y) r^n over n = 0..N.

    The root-to-root case runs on the lumped chain; other pairs evolve the
    full distribution once and read off the y-mass each step.
    """
    if N < 0:
        raise ValueError("N must be >= 0")
    if x == ROOT and y == ROOT:
        series = lumped_return_series(N)
    else:
        series = [Fraction(1) if x == y else _ZERO]
        dist = {x: Fraction(1)}
        for _ in range(N):
            dist = _x_step(dist, cap)
            series.append(dist.get(y, _ZERO))
    total = _ZERO
    rk = Fraction(1)
    for term in series:
        total += term * rk
        rk *= r
    return total


@dataclass
class MCReport:
    estimate: float
    stderr: float
    trials: int
    steps: int
    seed: int

    def to_json(self) -> dict:
        return {
            "estimate": self.estimate,
            "stderr": self.stderr,
            "trials": self.trials,
            "steps": self.steps,
            "seed": self.seed,
        }


def green_mc(trials: int, steps: int, seed: int = 0, cap: int = 10**10) -> MCReport:
    """Monte Carlo estimate of the expected number of root visits.

    Simulates the lumped chain with a counter-based generator, so results
    replay exactly for a given seed.
    """
    if trials <= 0 or steps <= 0:
        raise ValueError("trials and steps must be positive")
    if trials * steps > cap:
        raise CapExceeded(f"trials*steps = {trials * steps} exceeds cap {cap}")
    try:
        import numpy as np
    except ImportError:
        return _green_mc_python(trials, steps, seed)
    rng = np.random.Generator(np.random.Philox(seed))
    u = np.zeros(trials, dtype=np.int64)
    m = np.zeros(trials, dtype=np.int64)
    visits = np.ones(trials, dtype=np.int64)
    for _ in range(steps):
        r = rng.integers(0, 4, size=trials)
        at_root = (m == 0) & (u == 0)
        on_skel = (m == 0) & (u > 0)
        on_hair = m > 0
        child = (m == 0) & (r < 2)
        to_parent = on_skel & (r == 2)
        to_hair = (on_skel & (r == 3)) | (at_root & (r >= 2))
        h_down = on_hair & (r == 0)
        h_up = on_hair & (r == 1)
        u = u + child - to_parent
        m = np.where(to_hair, 1, m - h_down + h_up)
        visits += (u == 0) & (m == 0)
    est = float(visits.mean())
    err = float(visits.std(ddof=1)) / math.sqrt(trials)
    return MCReport(estimate=est, stderr=err, trials=trials, steps=steps, seed=seed)


def _green_mc_python(trials: int, steps: int, seed: int) -> MCReport:
    counts = []
    for trial in range(trials):
        rng = random.Random(seed * 1_000_003 + trial)
        u = m = 0
        visits = 1
        for _ in range(steps):
            r = rng.randrange(4)
            if m == 0:
                if r < 2:
                    u += 1
                elif u == 0:
                    m = 1
                elif r == 2:
                    u -= 1
                else:
                    m = 1
            elif r == 0:
                m -= 1
            elif r == 1:
                m += 1
            if u == 0 and m == 0:
                visits += 1
        counts.append(visits)
    mean = sum(counts) / trials
    var = sum((c - mean) ** 2 for c in counts) / (trials - 1) if trials > 1 else 0.0
    return MCReport(
        estimate=float(mean),
        stderr=math.sqrt(var / trials),
        trials=trials,
        steps=steps,
        seed=seed,
    )


@dataclass
class ReturnReport:
    N: int
    first_return: list[Fraction]
    partials: list[Fraction]

    @property
    def total(self) -> Fraction:
        return self.partials[-1]

    def to_json(self) -> dict:
        return {
            "N": self.N,
            "first_return": [str(f) for f in self.first_return],
            "partials": [str(s) for s in self.partials],
            "total": str(self.total),
        }


def return_prob(N: int) -> ReturnReport:
    """First-return mass at the root through time N, by the renewal identity."""
    u = lumped_return_series(N)
    f = [_ZERO] * (N + 1)
    for n in range(1, N + 1):
        f[n] = u[n] - sum(f[k] * u[n - k] for k in range(1, n))
    partials = []
    running = _ZERO
    for n in range(N + 1):
        running += f[n]
        partials.append(running)
    return ReturnReport(N=N, first_return=f, partials=partials)


def spectral_radius_proxy(n: int, mode: str = "X", cap: int = 10**6) -> float:
    """Lower proxy for the walk's spectral radius from even return terms."""
    if n < 2:
        raise ValueError("need n >= 2")
    if mode == "X":
        series = lumped_return_series(n)
    elif mode == "lamp":
        series = [Fraction(1)]
        dist: dict[Config, Fraction] = {(): Fraction(1)}
        for _ in range(n):
            nxt: dict[Config, Fraction] = {}
            for C, w in dist.items():
                share = w / 5
                for ch in LAMP_LETTERS:
                    img = apply_letter(C, ch)
                    nxt[img] = nxt.get(img, _ZERO) + share
            if len(nxt) > cap:
                raise CapExceeded(f"lamp walk support exceeds cap {cap}")
            dist = nxt
            series.append(dist.get((), _ZERO))
    else:
        raise ValueError("mode must be 'X' or 'lamp'")
    best = 0.0
    for k in range(2, n + 1, 2):
        if series[k] > 0:
            best = max(best, float(series[k]) ** (1.0 / k))
    return best


# ---------------------------------------------------------------------------
# exact one-step checks


@dataclass
class DeltaReport:
    radius: int
    checked: int
    mismatches: list

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def to_json(self) -> dict:
        return {
            "radius": self.radius,
            "checked": self.checked,
            "mismatches": [
                (str(v), str(m), str(e)) for v, m, e in self.mismatches
            ],
            "ok": self.ok,
        }


def delta_check_phi_u(R: int, cap: int = 10**6) -> DeltaReport:
    """phi_u minus its one-step average: 1 at the root, 0 at every other vertex."""
    phi = canonical_phi_u()
    region = ball(ROOT, R, cap=cap)
    mismatches = []
    checked = 0
    for v in region.interior():
        checked += 1
        margin = phi(v) - markov_apply_X(phi, v)
        expected = Fraction(1) if v == ROOT else _ZERO
        if margin != expected:
            mismatches.append((v, margin, expected))
    return DeltaReport(radius=R, checked=checked, mismatches=mismatches)


@dataclass
class SupermartingaleReport:
    mode: str
    checked: int
    violations: list

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "checked": self.checked,
            "violations": [(str(s), str(m)) for s, m in self.violations],
            "ok": self.ok,
        }


def supermartingale_check(fn, states: Iterable, mode: str = "lamp") -> SupermartingaleReport:
    """Exact one-step mean decrease of fn at each given state."""
    if mode not in ("X", "lamp"):
        raise ValueError("mode must be 'X' or 'lamp'")
    if getattr(fn, "superharmonic", None) is False:
        raise PreconditionFailed(f"{fn.name} is declared non-superharmonic")
    step = markov_apply_X if mode == "X" else markov_apply_set
    violations = []
    checked = 0
    for st in states:
        checked += 1
        margin = fn(st) - step(fn, st)
        if margin < 0:
            violations.append((st, margin))
    return SupermartingaleReport(mode=mode, checked=checked, violations=violations)


# ---------------------------------------------------------------------------
# structural lamp trajectories


class StructuralLampWalk:
    """Lamp configuration under the five-letter walk, in structural form.

    Skeleton vertices are interned tree nodes.  A lamp that steps onto a hair
    is parked in a wake bucket keyed by the value the matching letter counter
    will hold when the lamp is back at its base, so hair-bound lamps cost
    nothing per step.  Buckets fire only when a counter decreases: a sleeping
    lamp's offset is the counter minus its key, stays positive while parked,
    and keys are always strictly below the counter when created.
    """

    __slots__ = (
        "parent",
        "depth",
        "side",
        "kids",
        "sk",
        "bktA",
        "bktB",
        "cA",
        "cB",
        "sleep_cnt",
        "sleep_total",
        "_mhair",
    )

    def __init__(self) -> None:
        # node 0 is the root; side is 0 for an L child, 1 for an R child
        self.parent = [-1]
        self.depth = [0]
        self.side = [-1]
        self.kids: dict[tuple[int, int], int] = {}
        self.sk: set[int] = set()
        self.bktA: dict[int, set[int]] = {}
        self.bktB: dict[int, set[int]] = {}
        self.cA = 0
        self.cB = 0
        self.sleep_cnt: dict[int, int] = {}
        self.sleep_total = 0
        self._mhair = 0

    def _child(self, nid: int, s: int) -> int:
        key = (nid, s)
        c = self.kids.get(key)
        if c is None:
            c = len(self.parent)
            self.parent.append(nid)
            self.depth.append(self.depth[nid] + 1)
            self.side.append(s)
            self.kids[key] = c
        return c

    def _sleep_add(self, d: int) -> None:
        self.sleep_cnt[d] = self.sleep_cnt.get(d, 0) + 1
        self.sleep_total += 1
        if d > self._mhair:
            self._mhair = d

    def _sleep_remove(self, d: int) -> None:
        left = self.sleep_cnt[d] - 1
        if left:
            self.sleep_cnt[d] = left
        else:
            del self.sleep_cnt[d]
            if d == self._mhair:
                while self._mhair > 0 and self._mhair not in self.sleep_cnt:
                    self._mhair -= 1
        self.sleep_total -= 1

    def lamp_count(self) -> int:
        return len(self.sk) + self.sleep_total

    def step(self, ch: str) -> None:
        if ch == "s":
            if 0 in self.sk:
                self.sk.discard(0)
            else:
                self.sk.add(0)
            return
        if ch == "a" or ch == "b":
            want = 0 if ch == "a" else 1
            new_sk = {self._child(nid, want) for nid in self.sk}
            if ch == "a":
                self.cA -= 1
                woke = self.bktA.pop(self.cA, None)
            else:
                self.cB -= 1
                woke = self.bktB.pop(self.cB, None)
            if woke:
                for nid in woke:
                    assert nid not in new_sk, "waking lamp collided with a resident"
                    new_sk.add(nid)
                    self._sleep_remove(self.depth[nid])
            self.sk = new_sk
            return
        if ch == "A" or ch == "B":
            up_side = 0 if ch == "A" else 1
            new_sk = set()
            entering = []
            for nid in self.sk:
                if self.side[nid] == up_side:
                    new_sk.add(self.parent[nid])
                else:
                    entering.append(nid)
            if ch == "A":
                self.cA += 1
                key, bkt = self.cA - 1, self.bktA
            else:
                self.cB += 1
                key, bkt = self.cB - 1, self.bktB
            if entering:
                bucket = bkt.setdefault(key, set())
                for nid in entering:
                    assert nid not in bucket, "lamp rejoined an occupied hair point"
                    bucket.add(nid)
                    self._sleep_add(self.depth[nid])
            self.sk = new_sk
            return
        raise ValueError(f"unknown letter {ch!r}")

    def _k_parts(self):
        depth = self.depth
        side = self.side
        msk = mka = mkb = -1
        for nid in self.sk:
            d = depth[nid]
            if d > msk:
                msk = d
            s = side[nid]
            da = d - 1 if s == 0 else d
            db = d - 1 if s == 1 else d
            if da > mka:
                mka = da
            if db > mkb:
                mkb = db
        mh = self._mhair if self.sleep_total else -1
        return msk, mka, mkb, mh

    def k_now(self) -> int:
        """Largest lamp depth (hair lamps count their base), 0 when empty."""
        msk, _, _, mh = self._k_parts()
        return max(msk, mh, 0)

    def f_now(self) -> Fraction:
        return pow2(2 - self.k_now())

    def supermartingale_margin_ok(self) -> bool:
        """Exact one-step mean decrease of the depth potential, in integers."""
        msk, mka, mkb, mh = self._k_parts()
        k0 = max(msk, mh, 0)
        kab = max(msk + 1 if msk >= 0 else -1, mh, 0)
        kA = max(mka, mh, 0)
        kB = max(mkb, mh, 0)
        km = max(k0, kab, kA, kB)
        lhs = 5 << (km - k0)
        rhs = (
            2 * (1 << (km - kab))
            + (1 << (km - kA))
            + (1 << (km - kB))
            + (1 << (km - k0))
        )
        return lhs >= rhs

    def _path(self, nid: int) -> tuple[str, ...]:
        turns = []
        while nid != 0:
            turns.append("L" if self.side[nid] == 0 else "R")
            nid = self.parent[nid]
        return tuple(reversed(turns))

    def to_config(self) -> Config:
        """Reconstruct the explicit configuration (slow; for cross-checks)."""
        pts = [vertex_at(self._path(nid)) for nid in self.sk]
        for counter, bkt, letter in ((self.cA, self.bktA, "A"), (self.cB, self.bktB, "B")):
            for key, bucket in bkt.items():
                off = counter - key
                assert off >= 1, "parked lamp with nonpositive offset"
                for nid in bucket:
                    base = vertex_at(self._path(nid))
                    pts.append(hair_point(base, off, root_hair=letter))
        return config(pts)


@dataclass(frozen=True)
class WalkConfig:
    trials: int = 500
    steps: int = 10_000
    seed: int = 0
    checkpoints: tuple[int, ...] = (100, 10_000)
    fn_name: str = "minfun:phi_u"
    start: Config = ()


@dataclass
class DecayReport:
    walk: WalkConfig
    medians: dict
    supermartingale_violations: int
    states_checked: int
    never_removed_fraction: float

    @property
    def ok(self) -> bool:
        return self.supermartingale_violations == 0

    def to_json(self) -> dict:
        return {
            "trials": self.walk.trials,
            "steps": self.walk.steps,
            "seed": self.walk.seed,
            "fn": self.walk.fn_name,
            "medians": {str(k): str(v) for k, v in sorted(self.medians.items())},
            "supermartingale_violations": self.supermartingale_violations,
            "states_checked": self.states_checked,
            "never_removed_fraction": self.never_removed_fraction,
        }


def potential_decay_experiment(walk: WalkConfig = WalkConfig()) -> DecayReport:
    """Seeded lamp trajectories with exact per-state supermartingale checks.

    The bundled depth potential runs on the structural state; any other
    registered set function falls back to explicit configurations, which is
    exact but far slower and only sensible for short horizons.
    """
    if walk.trials <= 0 or walk.steps <= 0:
        raise ValueError("trials and steps must be positive")
    marks = sorted(set(walk.checkpoints))
    if not marks or marks[-1] > walk.steps:
        raise ValueError("checkpoints must be nonempty and within the horizon")
    values: dict[int, list] = {t: [] for t in marks}
    violations = 0
    checked = 0
    nonempty = 0
    fast = walk.fn_name == "minfun:phi_u" and walk.start == ()
    F = None if fast else resolve_setfn(walk.fn_name)
    for trial in range(walk.trials):
        rng = random.Random(walk.seed * 1_000_003 + trial)
        if fast:
            state = StructuralLampWalk()
            for t in range(1, walk.steps + 1):
                checked += 1
                if not state.supermartingale_margin_ok():
                    violations += 1
                state.step(LAMP_LETTERS[rng.randrange(5)])
                if t in values:
                    values[t].append(state.f_now())
            checked += 1
            if not state.supermartingale_margin_ok():
                violations += 1
            if state.lamp_count():
                nonempty += 1
        else:
            E = walk.start
            for t in range(1, walk.steps + 1):
                checked += 1
                if markov_apply_set(F, E) > F(E):
                    violations += 1
                E = apply_letter(E, LAMP_LETTERS[rng.randrange(5)])
                if t in values:
                    values[t].append(F(E))
            checked += 1
            if markov_apply_set(F, E) > F(E):
                violations += 1
            if E:
                nonempty += 1
    medians = {t: sorted(vals)[len(vals) // 2] for t, vals in values.items()}
    return DecayReport(
        walk=walk,
        medians=medians,
        supermartingale_violations=violations,
        states_checked=checked,
        never_removed_fraction=nonempty / walk.trials,
    )
