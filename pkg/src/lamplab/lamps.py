"""Neon tubes, lamps, the six lamp relations and the Neon Tube Lemma check."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .diagram import Diagram
from .geometry import Point, Rect, in_lit
from .lattice import jir_con_poset, principal_congruence
from .order import Poset

RELATIONS = ("alg", "foot", "infoot", "body", "nu_infoot", "nu_circr")


@dataclass(frozen=True)
class NeonTube:
    foot: str
    peak: str
    kind: str  # left-boundary | right-boundary | internal
    foot_pt: Point
    peak_pt: Point

    @property
    def u_f(self) -> Fraction:
        return self.foot_pt[0]

    @property
    def v_f(self) -> Fraction:
        return self.foot_pt[1]

    @property
    def x(self) -> Fraction:
        return self.foot_pt[1] - self.foot_pt[0]


@dataclass(frozen=True)
class Lamp:
    name: str  # the foot label; feet determine lamps
    foot: str
    peak: str
    tubes: tuple[NeonTube, ...]  # left to right
    kind: str
    foot_pt: Point
    peak_pt: Point
    circ_bottom: str
    circ_bottom_pt: Point

    @property
    def internal(self) -> bool:
        return self.kind == "internal"

    @property
    def circ_rect(self) -> Rect:
        return Rect.spanning(self.circ_bottom_pt, self.peak_pt)

    @property
    def body_box(self) -> Rect:
        return Rect.spanning(self.foot_pt, self.peak_pt)

    def to_doc(self) -> dict:
        return {
            "name": self.name,
            "kind": self.kind,
            "foot": self.foot,
            "peak": self.peak,
            "tubes": [t.foot for t in self.tubes],
            "circ_rect": [self.circ_bottom, self.peak],
        }


def _tube_kind(d: Diagram, foot: str, peak: str) -> str:
    (uf, vf), (up, vp) = d.coords[foot], d.coords[peak]
    if uf != up and vf != vp:
        return "internal"
    if uf == up == d.u_max:
        return "left-boundary"
    if vf == vp == d.v_max:
        return "right-boundary"
    raise ValueError(f"normal neon tube {foot}->{peak} off the upper boundary")


def neon_tubes(d: Diagram) -> list[NeonTube]:
    out = []
    for e in d.elements:
        ups = d.upper[e]
        if len(ups) == 1:
            p = ups[0]
            out.append(NeonTube(e, p, _tube_kind(d, e, p), d.coords[e], d.coords[p]))
    return out


def lamps(d: Diagram) -> list[Lamp]:
    return list(_lamps_cached(d))


def _lamps_cached(d: Diagram) -> tuple[Lamp, ...]:
    # diagrams are immutable, so the result is memoized on the instance
    hit = d.__dict__.get("_lamps")
    if hit is None:
        hit = d.__dict__["_lamps"] = _compute_lamps(d)
    return hit


def _compute_lamps(d: Diagram) -> tuple[Lamp, ...]:
    groups: dict[str, list[NeonTube]] = {}
    out = []
    for t in neon_tubes(d):
        if t.kind == "internal":
            groups.setdefault(t.peak, []).append(t)
        else:
            out.append(_lamp(d, t.foot, t.peak, (t,), t.kind))
    for peak, ts in groups.items():
        ts.sort(key=lambda t: t.x)
        foot = ts[0].foot
        for t in ts[1:]:
            foot = d.meet(foot, t.foot)
        out.append(_lamp(d, foot, peak, tuple(ts), "internal"))
    out.sort(key=lambda lp: (lp.kind != "left-boundary", lp.kind != "right-boundary", lp.foot_pt[0] + lp.foot_pt[1], lp.foot_pt[1] - lp.foot_pt[0]))
    return tuple(out)


def _lamp(d: Diagram, foot: str, peak: str, tubes, kind) -> Lamp:
    lows = d.lower[foot]
    cb = lows[0] if lows else foot
    for x in lows[1:]:
        cb = d.meet(cb, x)
    return Lamp(foot, foot, peak, tubes, kind, d.coords[foot], d.coords[peak], cb, d.coords[cb])


def lamp_by_name(d: Diagram) -> dict[str, Lamp]:
    return {lp.name: lp for lp in lamps(d)}


# ---------------------------------------------------------------------------
# regions


def lit_contains(lamp: Lamp, p: Point, mode: str = "photon") -> bool:
    return in_lit(lamp.foot_pt, lamp.peak_pt, p, mode)


def exclusive_areas(d: Diagram, tube: NeonTube) -> tuple[Rect, Rect]:
    """(LEA, REA) of a tube as closed rectangles.

    For a boundary tube these are its two one-sided illuminated sets, exactly
    one of which has positive area.
    """
    U, V = d.u_max, d.v_max
    (uf, vf), (up, vp) = tube.foot_pt, tube.peak_pt
    zero = Fraction(0)
    if tube.kind == "left-boundary":
        return Rect(U, U, zero, vp), Rect(zero, U, vf, vp)
    if tube.kind == "right-boundary":
        return Rect(uf, up, zero, V), Rect(zero, up, V, V)
    lamp = next(lp for lp in lamps(d) if lp.peak == tube.peak and lp.internal)
    ts = lamp.tubes
    i = ts.index(tube)
    if i == 0:
        lea = Rect(uf, up, zero, lamp.circ_bottom_pt[1])
    else:
        left = ts[i - 1]
        lea = Rect(uf, left.u_f, zero, left.v_f)
    if i == len(ts) - 1:
        rea = Rect(zero, lamp.circ_bottom_pt[0], vf, vp)
    else:
        right = ts[i + 1]
        rea = Rect(zero, right.u_f, vf, right.v_f)
    return lea, rea


def _areas(d: Diagram) -> dict[str, tuple[Rect, Rect]]:
    return {t.foot: exclusive_areas(d, t) for t in neon_tubes(d)}


# ---------------------------------------------------------------------------
# the six relations


def lamp_relation(d: Diagram, which: str) -> set[tuple[str, str]]:
    if which not in RELATIONS:
        raise ValueError(f"unknown relation {which}")
    ls = lamps(d)
    areas = _areas(d) if which.startswith("nu_") else None
    out = set()
    for I in ls:
        if not I.internal:
            continue
        for J in ls:
            if I is J:
                continue
            if _holds(d, which, I, J, areas):
                out.add((I.name, J.name))
    return out


def _holds(d: Diagram, which: str, I: Lamp, J: Lamp, areas) -> bool:
    if which == "alg":
        return d.leq(I.peak, J.peak) and not d.leq(I.foot, J.foot)
    if which == "foot":
        return lit_contains(J, I.foot_pt)
    if which == "infoot":
        return lit_contains(J, I.foot_pt, "interior")
    if which == "body":
        # Body I lies in the box [Foot I, Peak I] and contains both corners;
        # the closed illuminated set is a box minus a lower-left notch
        up, vp = I.peak_pt
        return up <= J.peak_pt[0] and vp <= J.peak_pt[1] and lit_contains(J, I.foot_pt, "closed")
    if which == "nu_infoot":
        return any(
            r.contains(I.foot_pt, interior=True) for t in J.tubes for r in areas[t.foot]
        )
    return any(r.contains_rect(I.circ_rect) for t in J.tubes for r in areas[t.foot])


def all_relations(d: Diagram) -> dict[str, set[tuple[str, str]]]:
    return {w: lamp_relation(d, w) for w in RELATIONS}


def lamp_poset(d: Diagram, which: str = "alg") -> Poset:
    """Reflexive-transitive closure of a lamp relation (``alg`` by default)."""
    names = [lp.name for lp in lamps(d)]
    return Poset.from_relation(names, lamp_relation(d, which))


def geometric_lamp_poset(d: Diagram) -> Poset:
    """Closure of the foot-containment relation; pure coordinate arithmetic."""
    ls = lamps(d)
    pairs = [(I.name, J.name) for I in ls if I.internal for J in ls if J is not I and lit_contains(J, I.foot_pt)]
    return Poset.from_relation([lp.name for lp in ls], pairs)


def lamp_congruence_map(d: Diagram) -> dict[str, tuple[int, ...]]:
    lat = d.lattice
    return {
        lp.name: principal_congruence(lat, lat.idx(lp.foot), lat.idx(lp.peak)).block_of for lp in lamps(d)
    }


def verify_neon_tube_lemma(d: Diagram) -> dict:
    """Parts (i)-(iii) of the Neon Tube Lemma against the congruence oracle."""
    failures = []
    rels = all_relations(d)
    base = rels["alg"]
    for w, r in rels.items():
        if r != base:
            failures.append(f"relation {w} differs from alg: {sorted(r ^ base)}")
    lp = lamp_poset(d)
    oracle, cons = jir_con_poset(d.lattice)
    by_blocks = {th.block_of: name for name, th in cons.items()}
    cmap = lamp_congruence_map(d)
    image = {}
    for name, blocks in cmap.items():
        if blocks not in by_blocks:
            failures.append(f"con of lamp {name} is not join-irreducible")
        else:
            image[name] = by_blocks[blocks]
    if not failures:
        if len(set(image.values())) != len(image) or len(image) != len(oracle):
            failures.append("lamp -> con map is not a bijection")
        else:
            for a in lp.elements:
                for b in lp.elements:
                    if lp.leq(a, b) != oracle.leq(image[a], image[b]):
                        failures.append(f"order mismatch at ({a}, {b})")
    for a, b in lp.covers:
        if (a, b) not in base:
            failures.append(f"cover ({a}, {b}) not in rho_alg")
    return {"ok": not failures, "failures": failures, "lamps": len(lp), "relations": {w: len(r) for w, r in rels.items()}}


# ---------------------------------------------------------------------------
# tube classification


def classify_tubes(d: Diagram) -> dict[str, bool]:
    """foot label -> True when the tube is primary."""
    feet = [lp.foot_pt for lp in lamps(d)]
    out = {}
    for t in neon_tubes(d):
        lea, rea = exclusive_areas(d, t)
        out[t.foot] = any(lea.contains(f, True) or rea.contains(f, True) for f in feet)
    return out


def classify_tubes_circr(d: Diagram) -> dict[str, bool]:
    """The second formulation: primary when some lamp's CircR fits inside an exclusive area."""
    rects = [lp.circ_rect for lp in lamps(d) if lp.internal]
    out = {}
    for t in neon_tubes(d):
        lea, rea = exclusive_areas(d, t)
        out[t.foot] = any(lea.contains_rect(r) or rea.contains_rect(r) for r in rects)
    return out


def consecutive_secondary_triples(d: Diagram) -> list[tuple[NeonTube, NeonTube, NeonTube]]:
    primary = classify_tubes(d)
    out = []
    for lp in lamps(d):
        ts = lp.tubes
        for i in range(len(ts) - 2):
            tri = ts[i : i + 3]
            if not any(primary[t.foot] for t in tri):
                out.append(tuple(tri))
    return out


def cell_factorization_check(d: Diagram) -> dict:
    """For every 4-cell count the tube pairs (n, m) with LEA(n) ∩ REA(m) equal to the cell's box."""
    from .diagram import four_cells

    areas = _areas(d)
    rows = []
    for cell, _ in four_cells(d):
        box = Rect.spanning(d.coords[cell.bottom], d.coords[cell.top])
        pairs = [
            (n, m)
            for n, (lea, _) in areas.items()
            for m, (_, rea) in areas.items()
            if lea.intersect(rea) == box
        ]
        rows.append({"cell": cell.bottom, "pairs": pairs, "ok": len(pairs) == 1})
    return {"ok": all(r["ok"] for r in rows), "cells": rows}


def lamps_report(d: Diagram) -> dict:
    from .photon import quadruple

    primary = classify_tubes(d)
    out = []
    for lp in lamps(d):
        doc = lp.to_doc()
        q = quadruple(d, lp)
        doc["quadruple"] = [str(q.p), str(q.q), str(q.r), str(q.s)]
        doc["primary"] = [t.foot for t in lp.tubes if primary[t.foot]]
        out.append(doc)
    poset = lamp_poset(d)
    return {"lamps": out, "poset": poset.to_doc()}
