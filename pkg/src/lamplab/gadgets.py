"""The forbidden gadgets CTF_n and CDE_n and the checkers for their properties."""
from __future__ import annotations

from fractions import Fraction

from .order import (
    BudgetExceeded,
    MorphismSpec,
    Poset,
    SearchStats,
    check_morphism,
    find_morphism,
    maximal_elements,
)

CTF_SPEC = MorphismSpec(injective=True, reflect_order=True, cover_preserving=True, maximum_preserving=True)
DEFAULT_NODE_LIMIT = 2_000_000


def ctf(n: int) -> Poset:
    """Crown with Two Fences of order n (6n - 2 elements)."""
    if n < 2:
        raise ValueError("CTF_n needs n >= 2")
    els = [f"{k}{i}" for k in "abcd" for i in range(n)]
    els += [f"{k}{j}" for k in "xy" for j in range(n - 1)]
    covers = []
    for i in range(n):
        nxt = (i + 1) % n
        covers += [(f"c{i}", f"a{i}"), (f"c{i}", f"b{i}"), (f"d{i}", f"b{i}"), (f"d{i}", f"a{nxt}")]
    for j in range(n - 1):
        covers += [(f"x{j}", f"c{j}"), (f"x{j}", f"c{j + 1}"), (f"y{j}", f"d{j}"), (f"y{j}", f"d{j + 1}")]
    return Poset(els, covers)


class HalfIndex:
    """The group of half-integers modulo n; Z_n sits inside as the integers."""

    def __init__(self, n: int):
        self.n = n

    def norm(self, x) -> Fraction:
        return Fraction(x) % self.n

    def add(self, x, y) -> Fraction:
        return self.norm(Fraction(x) + Fraction(y))

    def sub(self, x, y) -> Fraction:
        return self.norm(Fraction(x) - Fraction(y))

    def values(self) -> list[Fraction]:
        return [Fraction(k, 2) for k in range(2 * self.n)]

    @staticmethod
    def fmt(x: Fraction) -> str:
        return str(int(x)) if x.denominator == 1 else f"{float(x):g}"


def _cde_names(n: int):
    g = HalfIndex(n)
    f = g.fmt
    a = {i: f"a{i}" for i in range(n)}
    b = {i: f"b{f(g.add(i, '1/2'))}" for i in range(n)}
    d = {i: f"d{i},{f(g.add(i, '3/2'))}" for i in range(n)}
    e = {i: f"e{i},{f(g.sub(i, '3/2'))}" for i in range(n)}
    return g, a, b, d, e


def cde(n: int) -> Poset:
    """Crown with Diamonds and Emeralds of order n (4n elements).

    Labels: ``a0``, ``b0.5``, ``d0,1.5`` and ``e0,2.5`` (for n = 4).  The
    emerald covers are e_{i,i-1.5} < a_i and e_{i,i-1.5} < b_{i-1.5}.
    """
    if n < 3:
        raise ValueError("CDE_n needs n >= 3")
    g, a, b, d, e = _cde_names(n)
    f = g.fmt
    bname = {g.norm(Fraction(2 * i + 1, 2)): b[i] for i in range(n)}
    covers = []
    for i in range(n):
        covers += [
            (bname[g.sub(i, "1/2")], a[i]),
            (bname[g.add(i, "1/2")], a[i]),
            (d[i], a[i]),
            (d[i], bname[g.add(i, "3/2")]),
            (e[i], a[i]),
            (e[i], bname[g.sub(i, "3/2")]),
        ]
    els = [a[i] for i in range(n)] + [b[i] for i in range(n)] + [d[i] for i in range(n)] + [e[i] for i in range(n)]
    assert len(set(els)) == 4 * n, f
    return Poset(els, covers)


def cde_parts(n: int) -> dict[str, list[str]]:
    _, a, b, d, e = _cde_names(n)
    return {k: [m[i] for i in range(n)] for k, m in (("maximal", a), ("atoms", b), ("diamonds", d), ("emeralds", e))}


def cde_spec(n: int) -> MorphismSpec:
    parts = cde_parts(n)
    p = cde(n)
    tops = set(parts["maximal"])
    coat = frozenset((x, y) for x, y in p.covers if y in tops)
    return MorphismSpec(
        coatomic_edges=coat,
        collapse_classes=(frozenset(parts["diamonds"]), frozenset(parts["emeralds"])),
    )


def _verdict(prop: str, n: int, gadget: Poset, p: Poset, spec: MorphismSpec, node_limit) -> dict:
    stats = SearchStats(limit=node_limit)
    try:
        phi = find_morphism(gadget, p, spec, stats=stats)
    except BudgetExceeded:
        return {"property": prop, "n": n, "verdict": "inconclusive", "nodes": stats.nodes}
    if phi is None:
        return {"property": prop, "n": n, "verdict": "holds", "nodes": stats.nodes}
    problems = check_morphism(gadget, p, phi, spec)
    if problems:
        raise AssertionError(f"{prop} witness failed the standalone check: {problems[:3]}")
    return {"property": prop, "n": n, "verdict": "fails", "witness": dict(sorted(phi.items())), "nodes": stats.nodes}


def has_ctf_property(p: Poset, n: int, node_limit: int | None = DEFAULT_NODE_LIMIT) -> dict:
    """Verdict document; ``fails`` carries a maximum- and cover-preserving embedding of ctf(n)."""
    g = ctf(n)
    if len(g) > len(p):
        return {"property": "CTF", "n": n, "verdict": "holds", "note": "holds-trivially (size)"}
    return _verdict("CTF", n, g, p, CTF_SPEC, node_limit)


def has_cde_property(p: Poset, n: int, node_limit: int | None = DEFAULT_NODE_LIMIT) -> dict:
    """Verdict document; ``fails`` carries a de-embedding of cde(n) preserving the coatomic edges."""
    g = cde(n)
    # the restriction away from the diamonds is injective on 3n elements
    if 3 * n > len(p):
        return {"property": "CDE", "n": n, "verdict": "holds", "note": "holds-trivially (size)"}
    return _verdict("CDE", n, g, p, cde_spec(n), node_limit)


def property_report(p: Poset, n_max: int, node_limit: int | None = DEFAULT_NODE_LIMIT) -> list[dict]:
    out = [has_ctf_property(p, n, node_limit) for n in range(2, n_max + 1)]
    out += [has_cde_property(p, n, node_limit) for n in range(3, n_max + 1)]
    return out


def three_pendant_three_crown(p: Poset, node_limit: int | None = DEFAULT_NODE_LIMIT) -> dict:
    """The older property: no cover-preserving embedding of CDE_3 without its emeralds."""
    g = cde(3)
    keep = [x for x in g.elements if not x.startswith("e")]
    src = g.subposet(keep)
    spec = MorphismSpec(injective=True, reflect_order=True, cover_preserving=True)
    return _verdict("3P3C", 3, src, p, spec, node_limit)


def cde3_extension() -> Poset:
    """CDE_3 with every non-coatomic edge into an atom subdivided by a new element.

    The identity is still a de-embedding preserving the coatomic edges, while
    the lengthened edges block every cover-preserving copy of the
    three-pendant three-crown.
    """
    g = cde(3)
    tops = set(cde_parts(3)["maximal"])
    covers = []
    extra = []
    for x, y in g.covers:
        if y in tops:
            covers.append((x, y))
        else:
            z = f"z[{x}>{y}]"
            extra.append(z)
            covers += [(x, z), (z, y)]
    return Poset(list(g.elements) + extra, covers)
