"""Exact region predicates in diamond coordinates.

Every region used by the lamp calculus is either an axis-parallel rectangle
in (u, v), the area under a single neon tube, or a box with its lower corner
notch removed (the illuminated set of a lamp).  Interiors are taken relative
to the plane.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

Point = tuple[Fraction, Fraction]


@dataclass(frozen=True)
class Rect:
    """Closed rectangle [u0, u1] x [v0, v1]; may be degenerate."""

    u0: Fraction
    u1: Fraction
    v0: Fraction
    v1: Fraction

    @classmethod
    def spanning(cls, lo: Point, hi: Point) -> "Rect":
        return cls(lo[0], hi[0], lo[1], hi[1])

    @property
    def empty(self) -> bool:
        return self.u0 > self.u1 or self.v0 > self.v1

    @property
    def has_area(self) -> bool:
        return self.u0 < self.u1 and self.v0 < self.v1

    def contains(self, p: Point, interior: bool = False) -> bool:
        u, v = p
        if interior:
            return self.u0 < u < self.u1 and self.v0 < v < self.v1
        return self.u0 <= u <= self.u1 and self.v0 <= v <= self.v1

    def contains_rect(self, other: "Rect") -> bool:
        # corner containment is enough for axis-parallel rectangles
        if other.empty:
            return True
        return self.u0 <= other.u0 and other.u1 <= self.u1 and self.v0 <= other.v0 and other.v1 <= self.v1

    def intersect(self, other: "Rect") -> "Rect":
        return Rect(max(self.u0, other.u0), min(self.u1, other.u1), max(self.v0, other.v0), min(self.v1, other.v1))

    def corners(self) -> list[Point]:
        return [(self.u0, self.v0), (self.u1, self.v0), (self.u0, self.v1), (self.u1, self.v1)]

    def to_doc(self) -> dict:
        return {"u": [str(self.u0), str(self.u1)], "v": [str(self.v0), str(self.v1)]}


def tube_v_at(foot: Point, peak: Point, u: Fraction) -> Fraction:
    (uf, vf), (up, vp) = foot, peak
    return vf + (u - uf) * (vp - vf) / (up - uf)


def tube_u_at(foot: Point, peak: Point, v: Fraction) -> Fraction:
    (uf, vf), (up, vp) = foot, peak
    return uf + (v - vf) * (up - uf) / (vp - vf)


def in_llit(foot: Point, peak: Point, p: Point, interior: bool = False) -> bool:
    """Point hit by the photons leaving the tube towards the lower left (up-right ray meets the tube)."""
    (uf, vf), (up, vp) = foot, peak
    u, v = p
    if uf == up:
        return not interior and u == uf and 0 <= v <= vp
    if interior:
        return uf < u < up and 0 < v < tube_v_at(foot, peak, u)
    return uf <= u <= up and 0 <= v <= tube_v_at(foot, peak, u)


def in_rlit(foot: Point, peak: Point, p: Point, interior: bool = False) -> bool:
    (uf, vf), (up, vp) = foot, peak
    u, v = p
    if vf == vp:
        return not interior and v == vf and 0 <= u <= up
    if interior:
        return vf < v < vp and 0 < u < tube_u_at(foot, peak, v)
    return vf <= v <= vp and 0 <= u <= tube_u_at(foot, peak, v)


def in_notched_box(foot: Point, peak: Point, p: Point, interior: bool = False) -> bool:
    """Membership in [0, u_peak] x [0, v_peak] minus the open notch below-left of ``foot``.

    This is the illuminated set of a lamp with these foot and peak points.
    """
    (uf, vf), (up, vp) = foot, peak
    u, v = p
    if interior:
        return 0 < u < up and 0 < v < vp and (u > uf or v > vf)
    return 0 <= u <= up and 0 <= v <= vp and (u >= uf or v >= vf)


def in_lit(foot: Point, peak: Point, p: Point, mode: str = "photon") -> bool:
    """Membership in a lamp's illuminated set.

    ``closed`` is the closed region, ``interior`` its plane interior.
    ``photon`` lets every tube point except the peak emit: points reached only
    from the peak (the parts of the two roof lines through it that are not on
    a tube) stay dark.
    """
    if mode == "closed":
        return in_notched_box(foot, peak, p)
    if mode == "interior":
        return in_notched_box(foot, peak, p, True)
    if mode != "photon":
        raise ValueError(f"unknown mode {mode}")
    (uf, vf), (up, vp) = foot, peak
    u, v = p
    return in_notched_box(foot, peak, p) and (u < up or uf == up) and (v < vp or vf == vp)


def below_roof(p: Point, peak: Point) -> bool:
    """Whether the vertical up-ray from ``p`` meets one of the two roof rays from ``peak``."""
    (u, v), (uk, vk) = p, peak
    return (u <= uk and v - u <= vk - uk) or (v <= vk and u - v <= uk - vk)
