"""A labeled graph with Folner sets but no approximately invariant lamps.

The graph is the right Cayley tree of the rank-2 free group with the branch
through the first letter 'a' cut off and replaced by a one-way tail that
loops on b and B.  Tail segments have vanishing boundary ratio, yet for the
min-function of the geometric vertex weight every lamp configuration admits
a refuting word of at most two letters: the mass always drops by a factor of
exactly three.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

from .errors import PreconditionFailed

__all__ = [
    "ZVertex",
    "Z_E",
    "Z_LETTERS",
    "z_apply",
    "z_neighbors",
    "z_config",
    "z_apply_letter_set",
    "z_apply_word_set",
    "phi_Z",
    "minfun_Z",
    "witness_word",
    "tail_segment",
    "z_boundary_ratio",
    "z_ball",
    "random_z_configs",
]

Z_LETTERS = ("a", "A", "b", "B")
_INV = {"a": "A", "A": "a", "b": "B", "B": "b"}


@dataclass(frozen=True)
class ZVertex:
    """Either a reduced word not starting with 'a', or a tail point k >= 1."""

    kind: str
    word: str = ""
    k: int = 0

    def __post_init__(self):
        if self.kind == "word":
            if self.word.startswith("a"):
                raise ValueError("words starting with 'a' live on the tail")
            for i in range(len(self.word) - 1):
                if _INV[self.word[i]] == self.word[i + 1]:
                    raise ValueError(f"word {self.word!r} is not reduced")
        elif self.kind == "tail":
            if self.k < 1:
                raise ValueError("tail index starts at 1")
        else:
            raise ValueError(f"unknown vertex kind {self.kind!r}")

    def __str__(self) -> str:
        if self.kind == "tail":
            return f"tail({self.k})"
        return self.word or "e"


Z_E = ZVertex("word", "")


def z_apply(v: ZVertex, g: str) -> ZVertex:
    """Right multiplication by one letter."""
    if g not in Z_LETTERS:
        raise ValueError(f"unknown letter {g!r}")
    if v.kind == "tail":
        if g == "a":
            return ZVertex("tail", k=v.k + 1)
        if g == "A":
            return Z_E if v.k == 1 else ZVertex("tail", k=v.k - 1)
        return v
    w = v.word
    if not w and g == "a":
        return ZVertex("tail", k=1)
    if w and w[-1] == _INV[g]:
        return ZVertex("word", w[:-1])
    return ZVertex("word", w + g)


def z_neighbors(v: ZVertex) -> dict[str, ZVertex]:
    return {g: z_apply(v, g) for g in Z_LETTERS}


def _zkey(v: ZVertex):
    return (v.kind, v.k, v.word)


def z_config(elements: Iterable[ZVertex]) -> tuple[ZVertex, ...]:
    return tuple(sorted(set(elements), key=_zkey))


def z_apply_letter_set(E: tuple[ZVertex, ...], ch: str) -> tuple[ZVertex, ...]:
    """One walk letter on a configuration; 's' toggles the lamp at e."""
    if ch == "s":
        if Z_E in E:
            return tuple(v for v in E if v != Z_E)
        return z_config(E + (Z_E,))
    return tuple(sorted((z_apply(v, ch) for v in E), key=_zkey))


def z_apply_word_set(E: tuple[ZVertex, ...], word: str) -> tuple[ZVertex, ...]:
    for ch in reversed(word):
        E = z_apply_letter_set(E, ch)
    return E


def phi_Z(v: ZVertex) -> Fraction:
    """1 on the tail, 3^-|w| on words; superharmonic with a margin only at e."""
    if v.kind == "tail":
        return Fraction(1)
    return Fraction(1, 3 ** len(v.word))


def minfun_Z(E: tuple[ZVertex, ...]) -> Fraction:
    if not E:
        return Fraction(1)
    return min(phi_Z(v) for v in E)


def witness_word(E: tuple[ZVertex, ...]) -> tuple[str, Fraction]:
    """A word of at most two letters dropping the minimum by a factor of 3.

    With only tail lamps (or none), switch a lamp on at e and push it to a
    length-one word.  Otherwise extend a deepest word lamp by any letter
    that does not cancel; every other lamp's value shrinks by at most the
    same factor, so the ratio is exactly one third.
    """
    words = [v for v in E if v.kind == "word"]
    if not words:
        word = "bs"
    else:
        x = max(words, key=lambda v: len(v.word))
        if not x.word:
            word = "b"
        else:
            word = next(g for g in "bBaA" if g != _INV[x.word[-1]])
    base = minfun_Z(E)
    after = minfun_Z(z_apply_word_set(E, word))
    ratio = after / base
    assert ratio == Fraction(1, 3), f"witness {word!r} gave ratio {ratio}"
    return word, ratio


def tail_segment(L: int, start: int = 1) -> tuple[ZVertex, ...]:
    if L < 1 or start < 1:
        raise PreconditionFailed("segment needs L >= 1 and start >= 1")
    return tuple(ZVertex("tail", k=k) for k in range(start, start + L))


def z_boundary_ratio(segment: Iterable[ZVertex]) -> Fraction:
    """Leaving edge-ends over all edge-ends of the segment."""
    seg = set(segment)
    if not seg:
        raise PreconditionFailed("segment must be nonempty")
    leaving = 0
    for v in seg:
        for w in z_neighbors(v).values():
            if w not in seg:
                leaving += 1
    return Fraction(leaving, 4 * len(seg))


def z_ball(radius: int) -> list[ZVertex]:
    """Vertices within the given distance of e, in breadth-first order."""
    if radius < 0:
        raise ValueError("radius must be >= 0")
    seen = {Z_E}
    order = [Z_E]
    frontier = [Z_E]
    for _ in range(radius):
        nxt = []
        for v in frontier:
            for w in z_neighbors(v).values():
                if w not in seen:
                    seen.add(w)
                    order.append(w)
                    nxt.append(w)
        frontier = nxt
    return order


def random_z_configs(
    count: int, radius: int = 10, max_size: int = 6, seed: int = 0
) -> list[tuple[ZVertex, ...]]:
    """Seeded sample of small configurations inside a ball around e."""
    verts = z_ball(radius)
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        size = rng.randint(0, max_size)
        out.append(z_config(rng.sample(verts, size)))
    return out
