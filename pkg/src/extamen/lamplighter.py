"""Dynamics on finite vertex subsets: the 5-letter alphabet and its walk.

A configuration is a finite set of vertices.  The four generator letters act
pointwise; the switch letter 's' toggles membership of the root.  Words act
right to left, matching the convention for the underlying vertex action.
The walk operator averages uniformly over the five letters.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Optional

from .dyadic import Dyadic, ROOT, parse_dyadic
from .errors import CapExceeded
from .graph import act_letter

__all__ = [
    "Config",
    "config",
    "EMPTY",
    "parse_config",
    "SetFn",
    "LAMP_LETTERS",
    "apply_letter",
    "apply_word",
    "markov_apply_set",
    "markov_iterate",
    "orbit_enumerate",
    "switch_invariant_check",
]

LAMP_LETTERS = ("a", "A", "b", "B", "s")

Config = tuple[Dyadic, ...]  # canonically sorted, no duplicates


def config(elements: Iterable[Dyadic]) -> Config:
    return tuple(sorted(set(elements)))


EMPTY: Config = ()


def serialize_config(E: Config) -> str:
    return ",".join(str(x) for x in E)


def parse_config(s: str) -> Config:
    s = s.strip()
    if not s:
        return EMPTY
    return config(parse_dyadic(part) for part in s.split(","))


@dataclass(frozen=True)
class SetFn:
    """Evaluatable nonnegative function on configurations, with claimed traits."""

    name: str
    fn: Callable[[Config], Fraction]
    switch_invariant: Optional[bool] = None
    superharmonic: Optional[bool] = None
    meta: tuple = ()

    def __call__(self, E: Config):
        return self.fn(E)


def _toggle_root(E: Config) -> Config:
    if ROOT in E:
        return tuple(x for x in E if x != ROOT)
    return config(E + (ROOT,))


def apply_letter(E: Config, ch: str) -> Config:
    if ch == "s":
        return _toggle_root(E)
    # the action is injective, so the image needs sorting but no dedup
    return tuple(sorted(act_letter(ch, x) for x in E))


def apply_word(E: Config, word: str) -> Config:
    """Apply a word over aAbBs, rightmost letter first."""
    for ch in reversed(word):
        E = apply_letter(E, ch)
    return E


def markov_apply_set(F, E: Config):
    """Uniform 5-letter average of F over the one-step images of E."""
    total = F(apply_letter(E, "a")) + F(apply_letter(E, "b"))
    total += F(apply_letter(E, "A")) + F(apply_letter(E, "B"))
    total += F(_toggle_root(E))
    return total / 5


def markov_iterate(F, E: Config, n: int, cap: int = 8):
    """Exact n-step walk average of F started at E.

    Dynamic programming over distinct reachable configurations; the weights
    are exact rationals with denominator 5**n and always sum to 1, which is
    asserted.  Equal by construction to the naive 5**n enumeration.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if n > cap:
        raise CapExceeded(f"markov_iterate n={n} exceeds cap {cap}")
    dist: dict[Config, Fraction] = {E: Fraction(1)}
    fifth = Fraction(1, 5)
    for _ in range(n):
        nxt: dict[Config, Fraction] = {}
        for C, w in dist.items():
            share = w * fifth
            for ch in LAMP_LETTERS:
                img = apply_letter(C, ch)
                nxt[img] = nxt.get(img, Fraction(0)) + share
        dist = nxt
    assert sum(dist.values()) == 1, "walk weights must sum to 1"
    return sum(w * F(C) for C, w in dist.items())


def orbit_enumerate(E: Config, n: int, cap: int = 10**6) -> dict[Config, str]:
    """Configurations reachable by words of length <= n, each with one witness word.

    Breadth-first with deduplication; the witness is the first word found,
    so witnesses are shortest and deterministic given the letter order.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    seen: dict[Config, str] = {E: ""}
    frontier = [E]
    for _ in range(n):
        nxt = []
        for C in frontier:
            w = seen[C]
            for ch in LAMP_LETTERS:
                img = apply_letter(C, ch)
                if img not in seen:
                    if len(seen) >= cap:
                        raise CapExceeded(f"orbit of {E} exceeds cap {cap}")
                    # the new word acts after w, so it goes on the left
                    seen[img] = ch + w
                    nxt.append(img)
        frontier = nxt
    return seen


def switch_invariant_check(F, samples: Iterable[Config]):
    """Per-sample check of F(E) == F(E with the root toggled)."""
    results = []
    for E in samples:
        results.append((E, F(E) == F(_toggle_root(E))))
    ok = all(flag for _, flag in results)
    return ok, results
