"""Illuminated sets, coordinate quadruples, the relation catalog and abstract systems."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations
from typing import Callable, Iterable

from .diagram import Diagram
from .geometry import Point, below_roof as _below_roof, in_lit, in_llit, in_notched_box, in_rlit
from .lamps import Lamp, lamps
from .order import BudgetExceeded, MalformedInput, Poset, SearchStats, is_isomorphic, maximal_elements

ALTERNATIVES = (
    "left_of", "right_of", "under", "over", "bm", "bm_flip", "bl", "bl_flip", "br", "br_flip",
)


class TrichotomyViolation(RuntimeError):
    pass


@dataclass(frozen=True)
class Quadruple:
    p: Fraction
    q: Fraction
    r: Fraction
    s: Fraction

    def __iter__(self):
        return iter((self.p, self.q, self.r, self.s))


@dataclass(frozen=True)
class LitSet:
    """The illuminated set of one lamp.

    ``kind`` is ``left`` or ``right`` for the two stripe families and
    ``internal`` for A-shapes.  ``U`` is the bottom-path position of the
    bottom vertex, so that quadruples and (u, v) points convert both ways.
    """

    name: str
    kind: str
    quad: Quadruple
    U: Fraction
    tubes: tuple[tuple[Point, Point], ...] = ()

    @property
    def internal(self) -> bool:
        return self.kind == "internal"

    @property
    def shape(self) -> str:
        return "A-shape" if self.internal else "stripe"

    @property
    def foot(self) -> Point:
        return (self.U - self.quad.q, self.quad.r - self.U)

    @property
    def peak(self) -> Point:
        return (self.U - self.quad.p, self.quad.s - self.U)

    def to_doc(self) -> dict:
        p, q, r, s = self.quad
        return {"name": self.name, "kind": self.kind, "p": str(p), "q": str(q), "r": str(r), "s": str(s)}


_KIND = {"left-boundary": "left", "right-boundary": "right", "internal": "internal"}


def quadruple(d: Diagram, lamp: Lamp) -> Quadruple:
    U = d.u_max
    (uf, vf), (up, vp) = lamp.foot_pt, lamp.peak_pt
    return Quadruple(U - up, U - uf, U + vf, U + vp)


def lit(d: Diagram, lamp: Lamp) -> LitSet:
    tubes = tuple((t.foot_pt, t.peak_pt) for t in lamp.tubes)
    return LitSet(lamp.name, _KIND[lamp.kind], quadruple(d, lamp), d.u_max, tubes)


def litsets(d: Diagram) -> list[LitSet]:
    return [lit(d, lp) for lp in lamps(d)]


def contains(ls: LitSet, point: Point, interior: bool = False) -> bool:
    """Exact membership; uses the tube envelope when known, the quadruple otherwise."""
    if ls.tubes and not interior:
        return any(in_llit(f, p, point) or in_rlit(f, p, point) for f, p in ls.tubes)
    return in_notched_box(ls.foot, ls.peak, point, interior)


def below_roof(d: Diagram, point: Point, lamp: Lamp) -> bool:
    return _below_roof(point, lamp.peak_pt)


# ---------------------------------------------------------------------------
# the relation catalog


def _ext(ls: LitSet) -> tuple:
    """Quadruple entries as (value, tie-break) pairs.

    The degenerate arm of a stripe sits at a corner of the bottom path and
    ties with every other stripe of its family.  Left stripes get a negative
    infinitesimal offset increasing with r, right stripes a positive one
    increasing with p.  This separates same-family stripes in their
    geometric order and leaves every strict comparison untouched.
    """
    p, q, r, s = ls.quad
    zero = Fraction(0)
    if ls.kind == "left":
        tb = -1 / (r + 1)
        return (p, tb), (q, tb), (r, zero), (s, zero)
    if ls.kind == "right":
        tb = p + 1
        return (p, zero), (q, zero), (r, tb), (s, tb)
    return (p, zero), (q, zero), (r, zero), (s, zero)


def _lam(g, h) -> bool:
    return g[1] <= h[0] and g[3] <= h[2]


def _delta(g, h) -> bool:
    return h[1] <= g[0] and g[3] <= h[2]


def _bm(g, h) -> bool:
    return h[0] < g[0] < g[1] < h[1] < h[2] < g[2] < g[3] < h[3]


def _bl(g, h, g_internal) -> bool:
    return g_internal and h[0] <= g[0] < g[1] < h[1] and g[3] <= h[2]


def _br(g, h, g_internal) -> bool:
    return g_internal and h[1] <= g[0] and h[2] < g[2] < g[3] <= h[3]


def relation_flags(G: LitSet, H: LitSet) -> dict[str, bool]:
    g, h = _ext(G), _ext(H)
    gi, hi = G.internal, H.internal
    return {
        "left_of": _lam(g, h),
        "right_of": _lam(h, g),
        "under": _delta(g, h),
        "over": _delta(h, g),
        "bm": _bm(g, h),
        "bm_flip": _bm(h, g),
        "bl": _bl(g, h, gi),
        "bl_flip": _bl(h, g, hi),
        "br": _br(g, h, gi),
        "br_flip": _br(h, g, hi),
    }


def geom_relation(G: LitSet, H: LitSet) -> str:
    if G.name == H.name and G.quad == H.quad:
        raise ValueError("geom_relation needs two distinct illuminated sets")
    flags = relation_flags(G, H)
    hits = [a for a in ALTERNATIVES if flags[a]]
    if len(hits) != 1:
        raise TrichotomyViolation(f"{G.name} vs {H.name}: alternatives {hits or 'none'}")
    return hits[0]


MIRROR = {
    "left_of": "right_of", "right_of": "left_of", "under": "under", "over": "over",
    "bm": "bm", "bm_flip": "bm_flip", "bl": "br", "br": "bl", "bl_flip": "br_flip", "br_flip": "bl_flip",
}


def foot_in(G: LitSet, H: LitSet, interior: bool = False) -> bool:
    """Foot of G in H (photon reading) or in its interior, directly on quadruples."""
    return in_lit(H.foot, H.peak, G.foot, "interior" if interior else "photon")


def litset_poset(d: Diagram) -> Poset:
    ls = litsets(d)
    pairs = [(G.name, H.name) for G in ls if G.internal for H in ls if H is not G and foot_in(G, H)]
    return Poset.from_relation([x.name for x in ls], pairs)


# ---------------------------------------------------------------------------
# abstract illuminated systems


@dataclass(frozen=True)
class AbstractSystem:
    entries: tuple[LitSet, ...]

    @classmethod
    def from_diagram(cls, d: Diagram) -> "AbstractSystem":
        return cls(tuple(litsets(d)))

    @classmethod
    def from_doc(cls, doc) -> "AbstractSystem":
        try:
            raw = [
                (str(e.get("name", f"s{i}")), str(e["kind"]), Quadruple(*(Fraction(str(e[k])) for k in "pqrs")))
                for i, e in enumerate(doc)
            ]
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise MalformedInput(f"bad abstract system: {exc}") from exc
        for _, kind, _ in raw:
            if kind not in ("left", "right", "internal"):
                raise MalformedInput(f"unknown kind {kind}")
        U = _bottom_position([(k, q) for _, k, q in raw])
        return cls(tuple(LitSet(n, k, q, U) for n, k, q in raw))

    def to_doc(self) -> list[dict]:
        return [e.to_doc() for e in self.entries]

    def poset(self, interior: bool = True) -> Poset:
        es = self.entries
        pairs = [(G.name, H.name) for G in es if G.internal for H in es if H is not G and foot_in(G, H, interior)]
        return Poset.from_relation([e.name for e in es], pairs)

    def relation_matrix(self) -> list[list[str | None]]:
        es = self.entries
        return [[None if i == j else geom_relation(a, b) for j, b in enumerate(es)] for i, a in enumerate(es)]

    def rescaled(self, factor: Fraction, shift: Fraction = Fraction(0)) -> "AbstractSystem":
        def f(x):
            return x * factor + shift

        return AbstractSystem(
            tuple(LitSet(e.name, e.kind, Quadruple(*(f(x) for x in e.quad)), f(e.U)) for e in self.entries)
        )


def _bottom_position(items) -> Fraction:
    lefts = [q.r for k, q in items if k == "left"]
    if lefts:
        return min(lefts)
    rights = [q.q for k, q in items if k == "right"]
    if rights:
        return max(rights)
    return max((q.q for _, q in items), default=Fraction(0))


def validate_system(s: AbstractSystem, plugins: Iterable[Callable[[AbstractSystem], bool]] | None = None) -> dict:
    """Condition (#1) pairwise, (#2) through plugins, and the foot/infoot equality status."""
    problems = []
    es = s.entries
    for e in es:
        p, q, r, t = e.quad
        if not p <= q <= r <= t:
            problems.append(f"{e.name}: entries not ordered")
        if e.internal and not (p < q <= r < t):
            problems.append(f"{e.name}: internal entry is not an A-shape")
        if not e.internal and not (p == q or r == t):
            problems.append(f"{e.name}: stripe without a degenerate arm")
    for i, a in enumerate(es):
        for b in es[i + 1:]:
            try:
                geom_relation(a, b)
            except TrichotomyViolation as exc:
                problems.append(str(exc))
    plugins = list(plugins or [])
    cond2 = "skipped" if not plugins else ("ok" if all(p(s) for p in plugins) else "failed")
    foot_eq = None
    if not problems:
        closed = {(a.name, b.name) for a in es if a.internal for b in es if a is not b and foot_in(a, b)}
        inner = {(a.name, b.name) for a in es if a.internal for b in es if a is not b and foot_in(a, b, True)}
        foot_eq = closed == inner
    return {
        "valid": not problems and cond2 != "failed",
        "condition1": not problems,
        "condition2": cond2,
        "foot_equals_infoot": foot_eq,
        "problems": problems,
    }


def similar(s1: AbstractSystem, s2: AbstractSystem) -> dict[str, str] | None:
    """A bijection preserving the five relations both ways, or None."""
    a, b = s1.entries, s2.entries
    if len(a) != len(b):
        return None
    ma, mb = s1.relation_matrix(), s2.relation_matrix()
    n = len(a)
    perm = [-1] * n
    used = [False] * n

    def rec(i: int) -> bool:
        if i == n:
            return True
        for j in range(n):
            if used[j]:
                continue
            if any(ma[i][k] != mb[j][perm[k]] or ma[k][i] != mb[perm[k]][j] for k in range(i)):
                continue
            perm[i], used[j] = j, True
            if rec(i + 1):
                return True
            used[j] = False
        perm[i] = -1
        return False

    if rec(0):
        return {a[i].name: b[perm[i]].name for i in range(n)}
    return None


@dataclass
class SystemSearchResult:
    system: AbstractSystem | None
    exhausted: bool
    nodes: int
    log: list[str] = field(default_factory=list)


def system_search(target: Poset, budget: int = 200_000) -> SystemSearchResult:
    """Look for an abstract system (condition (#1) only) whose poset is isomorphic to ``target``.

    Boundary stripes take the maximal elements; internal A-shapes are placed
    one at a time along a top-down linear extension, each on a rank grid
    with room for every order type, and pruned as soon as its up-set differs
    from the target's.  ``exhausted`` is True when the whole grid was searched.
    """
    stats = SearchStats(limit=budget)
    n = len(target)
    maxs = sorted(maximal_elements(target))
    m = len(maxs)
    if n == 0:
        return SystemSearchResult(AbstractSystem(()), True, 0)
    if m < 2:
        return SystemSearchResult(None, True, 0, ["fewer than two maximal elements"])
    inner = _top_down(target, set(maxs))
    step = 2 * len(inner) + 2
    try:
        for c in range(1, m):
            d = m - c
            U = Fraction(d * step)
            E = U + c * step
            for chosen in permutations(maxs):
                rights = chosen[:d]
                lefts = chosen[d:]
                base = []
                for i, name in enumerate(rights):
                    base.append(LitSet(name, "right", Quadruple(Fraction(i * step), Fraction((i + 1) * step), E, E), U))
                for i, name in enumerate(lefts):
                    base.append(LitSet(name, "left", Quadruple(Fraction(0), Fraction(0), U + i * step, U + (i + 1) * step), U))
                found = _place(target, inner, base, U, E, stats)
                if found is not None:
                    return SystemSearchResult(AbstractSystem(tuple(found)), False, stats.nodes)
    except BudgetExceeded:
        return SystemSearchResult(None, False, stats.nodes, ["budget exhausted"])
    return SystemSearchResult(None, True, stats.nodes)


def _top_down(p: Poset, maxs: set[str]) -> list[str]:
    rest = [e for e in p.elements if e not in maxs]
    # a strictly larger element has a strictly smaller up-set, so it comes first
    return sorted(rest, key=lambda e: (len(p.upset(e)), e))


def _place(target: Poset, inner: list[str], placed: list[LitSet], U, E, stats: SearchStats):
    if not inner:
        return placed
    name = inner[0]
    want = {x for x in target.upset(name) if x != name}
    names = {e.name for e in placed}
    if not want <= names:
        return None
    lo_vals = [Fraction(x) for x in range(0, int(U) + 1)]
    hi_vals = [Fraction(x) for x in range(int(U), int(E) + 1)]
    for p in lo_vals:
        for q in lo_vals:
            if not p < q < U:
                continue
            for r in hi_vals:
                if not U < r:
                    continue
                for s in hi_vals:
                    if not r < s:
                        continue
                    stats.tick()
                    cand = LitSet(name, "internal", Quadruple(p, q, r, s), U)
                    if not _fits(cand, placed, target, want):
                        continue
                    out = _place(target, inner[1:], placed + [cand], U, E, stats)
                    if out is not None:
                        return out
    return None


def _fits(cand: LitSet, placed: list[LitSet], target: Poset, want: set[str]) -> bool:
    for other in placed:
        try:
            geom_relation(cand, other)
        except TrichotomyViolation:
            return False
    gen = {o.name for o in placed if foot_in(cand, o, True)}
    # an earlier (higher) entry never lies below a later one
    if any(foot_in(o, cand, True) for o in placed if o.internal):
        return False
    up = set(gen)
    sys_names = {o.name: o for o in placed}
    frontier = list(gen)
    while frontier:
        x = frontier.pop()
        o = sys_names[x]
        for y in placed:
            if y.name not in up and o.internal and foot_in(o, y, True):
                up.add(y.name)
                frontier.append(y.name)
    return up == want
