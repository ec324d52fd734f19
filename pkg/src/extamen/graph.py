"""The orbit graph of the dyadic action: neighbors, balls, skeleton/hair structure.

Vertices are dyadics in (0,1).  The graph is 4-regular with labeled edges
a, A, b, B (A and B are the inverse generators).  Structurally it is a binary
tree (the skeleton) rooted at 5/8 with an infinite ray (hair) attached to
every vertex, two rays at the root.  Nothing in this module assumes that
picture: classification is derived from the action itself and the asserted
shape is checked by the test suite.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable

from .dyadic import Dyadic, ROOT, letter_map
from .errors import CapExceeded, StructuralAssertFailed, Undetermined

__all__ = [
    "act_letter",
    "act_word",
    "neighbors",
    "Skeleton",
    "Hair",
    "Ball",
    "ball",
    "classify",
    "struct_info",
    "hair_point",
    "subtree_T",
    "golden_path",
    "folner_hair_segment",
    "boundary_ratio",
    "set_orientation",
    "get_orientation",
    "gen_for_turn",
    "vertex_at",
    "root_hair_letter",
]

EDGE_LABELS = ("a", "b", "A", "B")


def _mk(num: int, exp: int) -> Dyadic:
    return Dyadic(num, exp)


def act_letter(ch: str, d: Dyadic) -> Dyadic:
    """Image of d under one generator letter, by the closed-form branches.

    Integer arithmetic only; agrees with applying the PLMap of the letter
    (the test suite keeps both routes honest against each other).
    """
    n, e = d.num, d.exp
    scale = 1 << e
    if ch == "a":
        # 2x on [0,1/4]; x/2 + 3/8 on (1/4,3/4]; x on (3/4,1]
        if n << 2 <= scale:
            return _mk(n << 1, e)
        if n << 2 <= 3 * scale:
            return _mk((n << 2) + 3 * scale, e + 3)
        return d
    if ch == "A":
        # x/2 on [0,1/2]; 2x - 3/4 on (1/2,3/4]; x on (3/4,1]
        if n << 1 <= scale:
            return _mk(n, e + 1)
        if n << 2 <= 3 * scale:
            return _mk((n << 3) - 3 * scale, e + 2)
        return d
    if ch == "b":
        # x on [0,1/2]; x/2 + 1/4 on (1/2,3/4]; x - 1/8 on (3/4,7/8]; 2x - 1 on (7/8,1]
        if n << 1 <= scale:
            return d
        if n << 2 <= 3 * scale:
            return _mk((n << 1) + scale, e + 2)
        if n << 3 <= 7 * scale:
            return _mk((n << 3) - scale, e + 3)
        return _mk((n << 1) - scale, e)
    if ch == "B":
        # x on [0,1/2]; 2x - 1/2 on (1/2,5/8]; x + 1/8 on (5/8,3/4]; (x+1)/2 on (3/4,1]
        if n << 1 <= scale:
            return d
        if n << 3 <= 5 * scale:
            return _mk((n << 2) - scale, e + 1)
        if n << 2 <= 3 * scale:
            return _mk((n << 3) + scale, e + 3)
        return _mk(n + scale, e + 1)
    raise ValueError(f"unknown letter {ch!r}")


def act_word(w: str, d: Dyadic) -> Dyadic:
    """Apply a word over aAbB, rightmost letter first."""
    for ch in reversed(w):
        d = act_letter(ch, d)
    return d


def neighbors(v: Dyadic) -> dict[str, Dyadic]:
    """The four labeled images of v (loops included, as labels)."""
    return {ch: act_letter(ch, v) for ch in EDGE_LABELS}


# ---------------------------------------------------------------------------
# structural addresses


@dataclass(frozen=True)
class Skeleton:
    """Tree address of a skeleton vertex: path of 'L'/'R' turns from the root."""

    path: tuple[str, ...]


@dataclass(frozen=True)
class Hair:
    """Address on the ray attached to the skeleton vertex with the given path."""

    base: tuple[str, ...]
    offset: int


# Orientation maps tree turns to generator letters.  Under 'lr' the a-image
# of a skeleton vertex is its L child and the b-image its R child; 'rl' swaps
# them.  Exactly one orientation matches the bundled function families, which
# the test suite pins via the golden-path value pattern.
_STATE = {"orientation": "lr"}

_ADDR_MEMO: dict[Dyadic, object] = {}
_INFO_MEMO: dict[Dyadic, tuple] = {}


def set_orientation(o: str) -> None:
    if o not in ("lr", "rl"):
        raise ValueError("orientation must be 'lr' or 'rl'")
    if o != _STATE["orientation"]:
        _STATE["orientation"] = o
        _ADDR_MEMO.clear()
        _INFO_MEMO.clear()


def get_orientation() -> str:
    return _STATE["orientation"]


def gen_for_turn(turn: str) -> str:
    """Generator letter producing the given tree turn under the current orientation."""
    if _STATE["orientation"] == "lr":
        return "a" if turn == "L" else "b"
    return "b" if turn == "L" else "a"


def vertex_at(path: Iterable[str]) -> Dyadic:
    """Skeleton vertex reached from the root by the given L/R turns."""
    cur = ROOT
    for turn in path:
        cur = act_letter(gen_for_turn(turn), cur)
    return cur


def _turn_for_gen(gen: str) -> str:
    if _STATE["orientation"] == "lr":
        return "L" if gen == "a" else "R"
    return "R" if gen == "a" else "L"


def _loop_count(v: Dyadic) -> int:
    return sum(1 for ch in EDGE_LABELS if act_letter(ch, v) == v)


def _is_hair_vertex(v: Dyadic) -> bool:
    return _loop_count(v) == 2


def classify(v: Dyadic, probe_depth: int = 8, max_probe_depth: int = 4096):
    """Structural address of v: Skeleton(path) or Hair(base path, offset).

    Skeleton vertices have four distinct neighbors; hair vertices have two
    loops and two ray neighbors.  Hair classification walks both ray
    directions up to probe_depth looking for the skeleton end, doubling the
    probe up to max_probe_depth before giving up with Undetermined.
    """
    memo = _ADDR_MEMO
    if v in memo:
        return memo[v]
    loops = _loop_count(v)
    if loops == 0:
        addr = _classify_skeleton(v)
    elif loops == 2:
        addr = _classify_hair(v, probe_depth, max_probe_depth)
    else:
        raise Undetermined(f"{v} has {loops} loop edges; expected 0 or 2")
    return addr


def _classify_skeleton(v: Dyadic) -> Skeleton:
    # Walk up to the root.  For a non-root skeleton vertex exactly one of the
    # two inverse images is a skeleton vertex (the parent); the other starts
    # the vertex's own hair.  At the root both inverse images are hair points.
    chain: list[tuple[Dyadic, str]] = []
    cur = v
    while cur not in _ADDR_MEMO and cur != ROOT:
        qa = act_letter("A", cur)
        qb = act_letter("B", cur)
        a_hair = _is_hair_vertex(qa)
        b_hair = _is_hair_vertex(qb)
        if a_hair and b_hair:
            raise StructuralAssertFailed(
                f"{cur} != root but both inverse images are hair points"
            )
        if not a_hair and not b_hair:
            raise StructuralAssertFailed(
                f"{cur}: both inverse images look like skeleton vertices"
            )
        if a_hair:
            parent, turn = qb, _turn_for_gen("b")
        else:
            parent, turn = qa, _turn_for_gen("a")
        chain.append((cur, turn))
        cur = parent
    base_addr = _ADDR_MEMO.get(cur)
    path = base_addr.path if base_addr is not None else ()
    if cur == ROOT and base_addr is None:
        _ADDR_MEMO[ROOT] = Skeleton(())
    for node, turn in reversed(chain):
        path = path + (turn,)
        _ADDR_MEMO[node] = Skeleton(path)
    return _ADDR_MEMO[v]


def _classify_hair(v: Dyadic, probe_depth: int, max_probe_depth: int) -> Hair:
    ray_labels = [ch for ch in EDGE_LABELS if act_letter(ch, v) != v]
    if len(ray_labels) != 2:
        raise Undetermined(f"{v}: hair vertex without two ray directions")
    depth = probe_depth
    while depth <= max_probe_depth:
        for lab in ray_labels:
            trail = [v]
            cur = v
            for _ in range(depth):
                cur = act_letter(lab, cur)
                if not _is_hair_vertex(cur):
                    base = classify(cur, probe_depth, max_probe_depth)
                    if not isinstance(base, Skeleton):
                        raise StructuralAssertFailed(f"{cur}: ray ends off-skeleton")
                    for off, pt in enumerate(reversed(trail), start=1):
                        _ADDR_MEMO[pt] = Hair(base.path, off)
                    return _ADDR_MEMO[v]
                trail.append(cur)
        depth *= 2
    raise Undetermined(
        f"{v}: no skeleton end within probe depth {max_probe_depth}"
    )


def struct_info(v: Dyadic) -> tuple[int, bool, int]:
    """(leading L-turns, whether the path continues past them, base depth).

    Cached digest of classify(v) used by the bundled vertex functions: a
    vertex belongs to subtree i exactly when leading == i and the path
    continues (its first non-L turn is an R by construction).
    """
    info = _INFO_MEMO.get(v)
    if info is None:
        addr = classify(v)
        path = addr.path if isinstance(addr, Skeleton) else addr.base
        lead = 0
        for t in path:
            if t != "L":
                break
            lead += 1
        info = (lead, len(path) > lead, len(path))
        _INFO_MEMO[v] = info
    return info


def subtree_T(i: int, v: Dyadic) -> bool:
    """Is v (skeleton or hair) inside the subtree hanging right of spine depth i?"""
    lead, deeper, _ = struct_info(v)
    return lead == i and deeper


def root_hair_letter(root_hair: str | None = None) -> str:
    """Which inverse letter walks the designated root hair (default 'B').

    The root carries two hairs; the bundled constructions that walk hairs by
    repeated A-steps use the other one, so 'B' is the neutral default.  The
    choice is recorded in every CLI manifest.
    """
    if root_hair is None:
        return "B"
    if root_hair not in ("A", "B"):
        raise ValueError("root hair must be 'A' or 'B'")
    return root_hair


def hair_point(base: Dyadic, m: int, root_hair: str | None = None) -> Dyadic:
    """The vertex m steps out on the hair attached at the skeleton vertex base."""
    if m < 0:
        raise ValueError("hair offset must be >= 0")
    addr = classify(base)
    if not isinstance(addr, Skeleton):
        raise StructuralAssertFailed(f"{base} is not a skeleton vertex")
    if m == 0:
        return base
    if addr.path:
        gen = gen_for_turn(addr.path[-1])
        away = "B" if gen == "a" else "A"
    else:
        away = root_hair_letter(root_hair)
    cur = base
    for off in range(1, m + 1):
        cur = act_letter(away, cur)
        _ADDR_MEMO.setdefault(cur, Hair(addr.path, off))
    return cur


def golden_path(i: int) -> list[Dyadic]:
    """[root, a.root, ..., a^i.root, b a^i.root], computed by the action."""
    if i < 0:
        raise ValueError("index must be >= 0")
    pts = [ROOT]
    cur = ROOT
    for _ in range(i):
        cur = act_letter("a", cur)
        pts.append(cur)
    pts.append(act_letter("b", cur))
    return pts


# ---------------------------------------------------------------------------
# balls


@dataclass(frozen=True)
class Ball:
    center: Dyadic
    radius: int
    vertices: tuple[Dyadic, ...]
    dist: dict = field(compare=False)
    edges: tuple[tuple[Dyadic, str, Dyadic], ...] = field(compare=False)

    def interior(self) -> list[Dyadic]:
        return [v for v in self.vertices if self.dist[v] < self.radius]

    def to_json(self) -> dict:
        return {
            "center": str(self.center),
            "radius": self.radius,
            "vertices": [str(v) for v in self.vertices],
            "edges": [[str(u), lab, str(v)] for u, lab, v in self.edges],
        }


def ball(center: Dyadic, radius: int, cap: int = 10**6) -> Ball:
    """All vertices within graph distance radius, with labeled edges among them.

    BFS in fixed label order, so the vertex ordering is deterministic.
    """
    if radius < 0:
        raise ValueError("radius must be >= 0")
    dist = {center: 0}
    order = [center]
    queue = deque([center])
    while queue:
        u = queue.popleft()
        if dist[u] == radius:
            continue
        for ch in EDGE_LABELS:
            w = act_letter(ch, u)
            if w not in dist:
                if len(dist) >= cap:
                    raise CapExceeded(f"ball({center}, {radius}) exceeds cap {cap}")
                dist[w] = dist[u] + 1
                order.append(w)
                queue.append(w)
    edges = []
    for u in order:
        for ch in EDGE_LABELS:
            w = act_letter(ch, u)
            if w in dist:
                edges.append((u, ch, w))
    return Ball(center, radius, tuple(order), dist, tuple(edges))


# ---------------------------------------------------------------------------
# hair segments as small-boundary sets


def folner_hair_segment(L: int, root_hair: str | None = None) -> tuple[Dyadic, ...]:
    """L consecutive points on the designated root hair, offsets 1..L."""
    if L < 1:
        raise ValueError("segment length must be >= 1")
    away = root_hair_letter(root_hair)
    pts = []
    cur = ROOT
    for _ in range(L):
        cur = act_letter(away, cur)
        pts.append(cur)
    return tuple(pts)


def boundary_ratio(segment: Iterable[Dyadic]) -> Fraction:
    """(labeled edge-ends leaving the set) / (4 |set|)."""
    pts = set(segment)
    if not pts:
        raise ValueError("empty set has no boundary ratio")
    out = 0
    for u in pts:
        for ch in EDGE_LABELS:
            if act_letter(ch, u) not in pts:
                out += 1
    return Fraction(out, 4 * len(pts))
