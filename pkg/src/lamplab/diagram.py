"""Slim rectangular lattices as exact-coordinate planar diagrams.

Points live in diamond coordinates ``(u, v)``; the drawing is ``x = v - u``,
``y = u + v``.  Edges with ``du == 0`` run up-right, edges with ``dv == 0`` run
up-left, and the only other edges are the precipitous internal neon tubes.
Multiforks are built as successive forks whose legs follow the lines
``u = const`` and ``v = const`` down to the lower boundary, so no element ever
moves once placed.
"""
from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Callable, Iterable

from .lattice import Lattice, is_rectangular, is_semimodular, is_slim, jir_con_poset
from .order import MalformedInput, Poset, _bits, canonical_form, is_isomorphic

Point = tuple[Fraction, Fraction]


class PreconditionError(ValueError):
    pass


class IntegrityError(RuntimeError):
    pass


def label_of(p: Point) -> str:
    return f"{p[0]}:{p[1]}"


def point_of(label: str) -> Point:
    u, v = label.split(":")
    return Fraction(u), Fraction(v)


def frac_doc(x: Fraction) -> list[int]:
    return [x.numerator, x.denominator]


def doc_frac(x) -> Fraction:
    if isinstance(x, (list, tuple)):
        if len(x) != 2 or x[1] == 0:
            raise MalformedInput(f"bad rational {x!r}")
        return Fraction(int(x[0]), int(x[1]))
    if isinstance(x, (int, str)):
        return Fraction(x)
    raise MalformedInput(f"bad rational {x!r}")


# ---------------------------------------------------------------------------
# scripts


@dataclass(frozen=True)
class Step:
    """One build step.

    ``kind`` is ``"multifork"`` (a k-fold multifork into a distributive cell),
    ``"fork"`` (a single fork into any cell) or ``"remove"`` (drop the tube
    with the given foot).
    """

    kind: str
    point: Point
    k: int = 1
    unsafe: bool = False

    def to_doc(self) -> dict:
        pt = [frac_doc(self.point[0]), frac_doc(self.point[1])]
        if self.kind == "remove":
            return {"remove": pt, "unsafe": self.unsafe}
        doc = {"cell_bottom": pt, "k": self.k}
        if self.kind == "fork":
            doc["fork"] = True
        return doc

    @classmethod
    def from_doc(cls, doc: dict) -> "Step":
        try:
            if "remove" in doc:
                u, v = doc["remove"]
                return cls("remove", (doc_frac(u), doc_frac(v)), 1, bool(doc.get("unsafe", False)))
            u, v = doc["cell_bottom"]
            k = int(doc.get("k", 1))
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedInput(f"bad step {doc!r}") from exc
        if k < 1:
            raise MalformedInput("k must be positive")
        kind = "fork" if doc.get("fork") else "multifork"
        if kind == "fork" and k != 1:
            raise MalformedInput("a raw fork step has k = 1")
        return cls(kind, (doc_frac(u), doc_frac(v)), k)


@dataclass(frozen=True)
class BuildScript:
    grid: tuple[int, int]
    steps: tuple[Step, ...] = ()

    def to_doc(self) -> dict:
        return {"grid": list(self.grid), "steps": [s.to_doc() for s in self.steps]}

    @classmethod
    def from_doc(cls, doc: dict) -> "BuildScript":
        try:
            c, d = (int(x) for x in doc["grid"])
            steps = tuple(Step.from_doc(s) for s in doc.get("steps", []))
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedInput(f"bad script document: {exc}") from exc
        if c < 1 or d < 1:
            raise MalformedInput("grid dimensions must be positive")
        return cls((c, d), steps)

    def then(self, step: Step) -> "BuildScript":
        return BuildScript(self.grid, self.steps + (step,))

    @property
    def length(self) -> int:
        total = self.grid[0] + self.grid[1]
        for s in self.steps:
            total += -1 if s.kind == "remove" else s.k
        return total


# ---------------------------------------------------------------------------
# diagrams


@dataclass(frozen=True)
class Cell:
    bottom: str
    left: str
    right: str
    top: str


@dataclass(frozen=True, eq=False)
class Diagram:
    coords: dict[str, Point]
    covers: frozenset[tuple[str, str]]
    script: BuildScript
    history: tuple[dict, ...] = field(default=())

    def __eq__(self, other):
        return isinstance(other, Diagram) and self.coords == other.coords and self.covers == other.covers

    def __hash__(self):
        return hash(self.covers)

    @cached_property
    def elements(self) -> list[str]:
        return sorted(self.coords, key=lambda e: _sort_key(self.coords[e]))

    @cached_property
    def poset(self) -> Poset:
        return Poset(self.elements, sorted(self.covers, key=lambda c: (_sort_key(self.coords[c[0]]), _sort_key(self.coords[c[1]]))))

    @cached_property
    def lattice(self) -> Lattice:
        return Lattice(self.poset)

    def __len__(self) -> int:
        return len(self.coords)

    @cached_property
    def u_max(self) -> Fraction:
        return max(p[0] for p in self.coords.values())

    @cached_property
    def v_max(self) -> Fraction:
        return max(p[1] for p in self.coords.values())

    @cached_property
    def upper(self) -> dict[str, list[str]]:
        out: dict[str, list[str]] = {e: [] for e in self.coords}
        for a, b in self.covers:
            out[a].append(b)
        for e in out:
            out[e].sort(key=lambda x: _xkey(self.coords[x]))
        return out

    @cached_property
    def lower(self) -> dict[str, list[str]]:
        out: dict[str, list[str]] = {e: [] for e in self.coords}
        for a, b in self.covers:
            out[b].append(a)
        for e in out:
            out[e].sort(key=lambda x: _xkey(self.coords[x]))
        return out

    @cached_property
    def left_chain(self) -> list[str]:
        """Lower-left boundary, bottom to left corner."""
        return sorted((e for e, p in self.coords.items() if p[1] == 0), key=lambda e: self.coords[e][0])

    @cached_property
    def right_chain(self) -> list[str]:
        return sorted((e for e, p in self.coords.items() if p[0] == 0), key=lambda e: self.coords[e][1])

    @property
    def bottom(self) -> str:
        return label_of((Fraction(0), Fraction(0)))

    @property
    def top(self) -> str:
        return label_of((self.u_max, self.v_max))

    @property
    def length(self) -> int:
        return self.lattice.heights[self.lattice.top]

    def height(self, x: str) -> int:
        return self.lattice.heights[self.lattice.idx(x)]

    def leq(self, a: str, b: str) -> bool:
        return self.poset.leq(a, b)

    def meet(self, a: str, b: str) -> str:
        l = self.lattice
        return l.label(l.meet[l.idx(a)][l.idx(b)])

    def join(self, a: str, b: str) -> str:
        l = self.lattice
        return l.label(l.join[l.idx(a)][l.idx(b)])

    def is_precipitous(self, a: str, b: str) -> bool:
        (ua, va), (ub, vb) = self.coords[a], self.coords[b]
        return ub != ua and vb != va

    def to_doc(self) -> dict:
        doc = self.poset.to_doc()
        doc["kind"] = "lattice"
        doc["coords"] = {e: [frac_doc(self.coords[e][0]), frac_doc(self.coords[e][1])] for e in self.elements}
        doc["script"] = self.script.to_doc()
        return doc


def _sort_key(p: Point):
    return (p[0] + p[1], p[1] - p[0])


def _xkey(p: Point):
    return p[1] - p[0]


def _make(coords: dict[str, Point], covers: Iterable[tuple[str, str]], script: BuildScript, history=()) -> Diagram:
    return Diagram(dict(coords), frozenset(covers), script, tuple(history))


def diagram_from_doc(doc: dict) -> Diagram:
    """Rebuild a diagram from its export; the stored script is kept but not replayed."""
    try:
        coords = {str(e): (doc_frac(p[0]), doc_frac(p[1])) for e, p in doc["coords"].items()}
        covers = [(str(a), str(b)) for a, b in doc["covers"]]
        script = BuildScript.from_doc(doc["script"]) if "script" in doc else BuildScript((1, 1))
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedInput(f"bad diagram document: {exc}") from exc
    if set(coords) != set(doc.get("elements", coords)):
        raise MalformedInput("coords do not match elements")
    for a, b in covers:
        if a not in coords or b not in coords:
            raise MalformedInput(f"unknown element in cover ({a}, {b})")
    return _make(coords, covers, script)


def grid(c: int, d: int) -> Diagram:
    if c < 1 or d < 1:
        raise PreconditionError("grid dimensions must be positive")
    coords = {}
    covers = []
    for i in range(c + 1):
        for j in range(d + 1):
            p = (Fraction(i), Fraction(j))
            coords[label_of(p)] = p
            if i < c:
                covers.append((label_of(p), label_of((Fraction(i + 1), Fraction(j)))))
            if j < d:
                covers.append((label_of(p), label_of((Fraction(i), Fraction(j + 1)))))
    return _make(coords, covers, BuildScript((c, d)))


def mirror(d: Diagram) -> Diagram:
    """Reflect the drawing about the vertical axis: (u, v) becomes (v, u)."""
    ren = {e: label_of((p[1], p[0])) for e, p in d.coords.items()}
    coords = {ren[e]: (p[1], p[0]) for e, p in d.coords.items()}
    covers = [(ren[a], ren[b]) for a, b in d.covers]
    c, w = d.script.grid
    return _make(coords, covers, BuildScript((w, c)), d.history + ({"mirror": True},))


def four_cells(d: Diagram) -> list[tuple[Cell, bool]]:
    """All 4-cells, left to right within each top, with the distributivity flag of the top's ideal."""
    out = []
    for t in d.elements:
        lows = d.lower[t]
        for l, r in zip(lows, lows[1:]):
            b = d.meet(l, r)
            if b in d.lower[l] and b in d.lower[r]:
                out.append((Cell(b, l, r, t), ideal_is_distributive(d, t)))
    return out


def ideal_is_distributive(d: Diagram, t: str) -> bool:
    # a slim semimodular ideal is distributive exactly when it holds no precipitous edge
    return not any(d.leq(b, t) and d.is_precipitous(a, b) for a, b in d.covers)


def cell_at(d: Diagram, bottom: Point) -> Cell:
    lab = label_of(bottom)
    for cell, _ in four_cells(d):
        if cell.bottom == lab:
            return cell
    raise PreconditionError(f"no 4-cell with bottom {lab}")


def _lane(lo: Fraction, hi: Fraction, used: Iterable[Fraction]) -> Fraction:
    # midpoint of the widest gap between existing coordinate values in (lo, hi)
    pts = sorted({lo, hi} | {x for x in used if lo < x < hi})
    best = max(range(len(pts) - 1), key=lambda i: (pts[i + 1] - pts[i], -i))
    return (pts[best] + pts[best + 1]) / 2


def insert_fork(d: Diagram, cell: Cell, *, _record: bool = True) -> Diagram:
    """Insert one fork into ``cell``; the foot becomes a new lower cover of the cell top."""
    co = d.coords
    for e in (cell.bottom, cell.left, cell.right, cell.top):
        if e not in co:
            raise PreconditionError(f"unknown element {e}")
    if not (
        cell.bottom in d.lower[cell.left]
        and cell.bottom in d.lower[cell.right]
        and cell.left in d.lower[cell.top]
        and cell.right in d.lower[cell.top]
    ):
        raise PreconditionError("not a 4-cell")
    ub, vb = co[cell.bottom]
    ul, vl = co[cell.left]
    ur, vr = co[cell.right]
    if vl != vb or ur != ub:
        raise PreconditionError("cell sides are not normal")
    um = _lane(ub, ul, (p[0] for p in co.values()))
    vm = _lane(vb, vr, (p[1] for p in co.values()))
    foot = (um, vm)

    covers = set(d.covers)
    new_coords = dict(co)
    left_leg: list[Point] = []
    right_leg: list[Point] = []
    for a, b in d.covers:
        (ua, va), (ubb, vbb) = co[a], co[b]
        if va == vbb and ua < um < ubb and va < vm:
            left_leg.append((um, va))
            covers.discard((a, b))
            covers |= {(a, label_of((um, va))), (label_of((um, va)), b)}
        elif ua == ubb and va < vm < vbb and ua < um:
            right_leg.append((ua, vm))
            covers.discard((a, b))
            covers |= {(a, label_of((ua, vm))), (label_of((ua, vm)), b)}
        elif ua != ubb and va != vbb:
            _check_tube_clear(co[a], co[b], foot)
    for p in [foot] + left_leg + right_leg:
        new_coords[label_of(p)] = p
    for leg, axis in ((left_leg, 1), (right_leg, 0)):
        chain = sorted(leg, key=lambda p: p[axis], reverse=True)
        prev = foot
        for p in chain:
            covers.add((label_of(p), label_of(prev)))
            prev = p
        if not chain or chain[-1][axis] != 0:
            raise IntegrityError("fork leg does not reach the lower boundary")
    covers.add((label_of(foot), cell.top))
    script = d.script.then(Step("fork", co[cell.bottom])) if _record else d.script
    return _make(new_coords, covers, script, d.history)


def _check_tube_clear(a: Point, b: Point, foot: Point) -> None:
    # the legs {u = um, v < vm} and {v = vm, u < um} must not cross a precipitous edge
    (ua, va), (ub, vb) = a, b
    um, vm = foot
    if ua < um < ub:
        v_at = va + (um - ua) * (vb - va) / (ub - ua)
        if v_at < vm:
            raise IntegrityError("left leg would cross a neon tube")
    if va < vm < vb:
        u_at = ua + (vm - va) * (ub - ua) / (vb - va)
        if u_at < um:
            raise IntegrityError("right leg would cross a neon tube")


def insert_multifork(d: Diagram, cell: Cell, k: int, side: str = "left") -> Diagram:
    """Insert a k-fold multifork into a distributive cell as k successive forks.

    Each later fork enters the cell with the same top lying immediately left
    (or right, with ``side="right"``) of the previous foot.
    """
    if k < 1:
        raise PreconditionError("k must be positive")
    if side not in ("left", "right"):
        raise PreconditionError("side must be left or right")
    if not ideal_is_distributive(d, cell.top):
        raise PreconditionError("multiforks go into distributive cells only")
    bottom_pt = d.coords[cell.bottom]
    cur = d
    c = cell
    for _ in range(k):
        before = set(cur.coords)
        cur = insert_fork(cur, c, _record=False)
        foot = next(e for e in cur.lower[c.top] if e not in before)
        if side == "left":
            c = Cell(cur.meet(c.left, foot), c.left, foot, c.top)
        else:
            c = Cell(cur.meet(foot, c.right), foot, c.right, c.top)
    step = Step("multifork", bottom_pt, k)
    script = d.script.then(step) if side == "left" else d.script
    return _make(cur.coords, cur.covers, script, d.history)


def ljc(d: Diagram, a: str) -> str:
    """Largest element of the lower-left boundary chain below ``a``."""
    return max((e for e in d.left_chain if d.leq(e, a)), key=lambda e: d.coords[e][0])


def rjc(d: Diagram, a: str) -> str:
    return max((e for e in d.right_chain if d.leq(e, a)), key=lambda e: d.coords[e][1])


def leg_elements(d: Diagram, foot: str) -> tuple[list[str], list[str]]:
    """The intervals [ljc(foot), foot] and [rjc(foot), foot], each listed bottom-up."""
    lj, rj = ljc(d, foot), rjc(d, foot)
    left = sorted((e for e in d.elements if d.leq(lj, e) and d.leq(e, foot)), key=lambda e: d.height(e))
    right = sorted((e for e in d.elements if d.leq(rj, e) and d.leq(e, foot)), key=lambda e: d.height(e))
    return left, right


def remove_tube(d: Diagram, foot: str, *, unsafe: bool = False, validate: bool = True) -> Diagram:
    """Remove an internal neon tube together with its two legs; the peak stays.

    In safe mode the tube must be the middle of three consecutive secondary
    tubes of one lamp.  The result is always re-validated as a slim
    rectangular lattice; in safe mode its congruence poset is also compared.
    """
    from .lamps import consecutive_secondary_triples, neon_tubes

    tubes = {t.foot: t for t in neon_tubes(d)}
    if foot not in tubes:
        raise PreconditionError(f"{foot} is not the foot of a neon tube")
    if tubes[foot].kind != "internal":
        raise PreconditionError("only internal tubes can be removed")
    if not unsafe and not any(tr[1].foot == foot for tr in consecutive_secondary_triples(d)):
        raise PreconditionError("tube is not the middle of three consecutive secondary tubes")
    left, right = leg_elements(d, foot)
    gone = set(left) | set(right)
    keep = [e for e in d.elements if e not in gone]
    sub = d.poset.subposet(keep)
    coords = {e: d.coords[e] for e in keep}
    script = d.script.then(Step("remove", d.coords[foot], 1, unsafe))
    out = _make(coords, sub.covers, script, d.history)
    if validate:
        problems = structural_problems(out)
        if problems:
            raise IntegrityError("removal broke the diagram: " + "; ".join(problems))
        if len(neon_tubes(out)) != len(tubes) - 1:
            raise IntegrityError("tube count did not drop by one")
        if not unsafe and not is_isomorphic(jir_con_poset(d.lattice)[0], jir_con_poset(out.lattice)[0]):
            raise IntegrityError("congruence lattice changed")
    return out


def structural_problems(d: Diagram) -> list[str]:
    """Checks of the diagram invariants; empty when everything holds."""
    probs = []
    try:
        lat = d.lattice
    except MalformedInput as exc:
        return [f"not a lattice: {exc}"]
    zero = (Fraction(0), Fraction(0))
    if d.coords[lat.label(lat.bottom)] != zero:
        probs.append("bottom is not at (0,0)")
    if d.coords[lat.label(lat.top)] != (d.u_max, d.v_max):
        probs.append("top is not at (u_max, v_max)")
    if any(p[0] < 0 or p[1] < 0 or p[0] > d.u_max or p[1] > d.v_max for p in d.coords.values()):
        probs.append("element outside the rectangle")
    for a, b in d.covers:
        (ua, va), (ub, vb) = d.coords[a], d.coords[b]
        if ub < ua or vb < va or (ua, va) == (ub, vb):
            probs.append(f"edge {a}->{b} is not upward")
        if ua != ub and va != vb and len(d.upper[a]) != 1:
            probs.append(f"precipitous edge {a}->{b} is not a neon tube")
    if len(d) > 1:
        if not is_semimodular(lat):
            probs.append("not semimodular")
        if not is_slim(lat):
            probs.append("not slim")
        if d.length >= 2 and not is_rectangular(lat):
            probs.append("not rectangular")
    if _has_crossing(d):
        probs.append("edges cross")
    return probs


def _xy(p: Point):
    return (p[1] - p[0], p[0] + p[1])


def _orient(a, b, c) -> int:
    v = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
    return (v > 0) - (v < 0)


def _has_crossing(d: Diagram) -> bool:
    segs = [(_xy(d.coords[a]), _xy(d.coords[b]), a, b) for a, b in d.covers]
    segs.sort(key=lambda s: min(s[0][0], s[1][0]))
    for i, (p1, p2, a1, b1) in enumerate(segs):
        hi = max(p1[0], p2[0])
        for q1, q2, a2, b2 in segs[i + 1:]:
            if min(q1[0], q2[0]) > hi:
                break
            if {a1, b1} & {a2, b2}:
                continue
            o1, o2 = _orient(p1, p2, q1), _orient(p1, p2, q2)
            o3, o4 = _orient(q1, q2, p1), _orient(q1, q2, p2)
            if o1 * o2 < 0 and o3 * o4 < 0:
                return True
            if 0 in (o1, o2, o3, o4) and _touches(p1, p2, q1, q2):
                return True
    return False


def _touches(p1, p2, q1, q2) -> bool:
    def on(a, b, c):
        return _orient(a, b, c) == 0 and min(a[0], b[0]) <= c[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= c[1] <= max(a[1], b[1])

    return on(p1, p2, q1) or on(p1, p2, q2) or on(q1, q2, p1) or on(q1, q2, p2)


# ---------------------------------------------------------------------------
# scripts and enumeration


def apply_step(d: Diagram, step: Step) -> Diagram:
    if step.kind == "remove":
        lab = label_of(step.point)
        if lab not in d.coords:
            raise PreconditionError(f"stale reference {lab}")
        return remove_tube(d, lab, unsafe=step.unsafe)
    cell = cell_at(d, step.point)
    if step.kind == "fork":
        return insert_fork(d, cell)
    return insert_multifork(d, cell, step.k)


def replay(s: BuildScript) -> Diagram:
    d = grid(*s.grid)
    for step in s.steps:
        d = apply_step(d, step)
    return d


def script_of(d: Diagram) -> BuildScript:
    return d.script


def distributive_cells(d: Diagram) -> list[Cell]:
    return [c for c, ok in four_cells(d) if ok]


def lattice_key(d: Diagram) -> tuple:
    return canonical_form(d.poset)


def _extend(task: tuple[Diagram, int]) -> list[tuple[tuple, Diagram]]:
    base, k = task
    out = []
    for cell in distributive_cells(base):
        ext = insert_multifork(base, cell, k)
        out.append((lattice_key(ext), ext))
    return out


def enumerate_lattices(
    max_length: int,
    visitor: Callable[[Diagram], None] | None = None,
    min_length: int = 2,
    workers: int = 1,
) -> dict[int, int]:
    """Visit every slim rectangular lattice of length in [min_length, max_length] once up to isomorphism.

    Returns the census {length: number of isomorphism classes}.  Lengths are
    processed in increasing order and each level is visited in a fixed order;
    with ``workers`` > 1 the extensions are computed in a process pool whose
    results are merged in task order, so the output does not depend on it.
    """
    levels: dict[int, dict[tuple, Diagram]] = {}
    census = {}
    pool = ProcessPoolExecutor(workers) if workers > 1 else None
    try:
        for length in range(2, max_length + 1):
            found: dict[tuple, Diagram] = {}
            for c in range(1, length):
                g = grid(c, length - c)
                found.setdefault(lattice_key(g), g)
            tasks = [
                (base, k)
                for k in range(1, length - 1)
                for _, base in sorted(levels.get(length - k, {}).items())
            ]
            results = pool.map(_extend, tasks, chunksize=8) if pool else map(_extend, tasks)
            for batch in results:
                for key, ext in batch:
                    found.setdefault(key, ext)
            levels[length] = found
            if length >= min_length:
                census[length] = len(found)
                if visitor is not None:
                    for key in sorted(found):
                        visitor(found[key])
    finally:
        if pool:
            pool.shutdown()
    return census


def corpus(max_length: int) -> list[Diagram]:
    out: list[Diagram] = []
    enumerate_lattices(max_length, out.append)
    return out


def random_script(rng: random.Random, max_length: int) -> BuildScript:
    """Seeded sampler: geometric target length, uniform distributive cell, k weighted to 1..3."""
    if max_length < 2:
        raise PreconditionError("max_length must be at least 2")
    target = 2
    while target < max_length and rng.random() < 0.75:
        target += 1
    c = rng.randint(1, target - 1)
    d_ = rng.randint(1, target - c) if target - c > 1 and rng.random() < 0.5 else 1
    d = grid(c, d_)
    length = c + d_
    while length < target:
        cells = distributive_cells(d)
        room = target - length
        ks = [k for k in (1, 2, 3, 4, 5) if k <= room]
        k = rng.choices(ks, weights=[8, 4, 2, 1, 1][: len(ks)])[0]
        cell = rng.choice(cells)
        d = insert_multifork(d, cell, k)
        length += k
    return d.script


def random_diagram(rng: random.Random, max_length: int) -> Diagram:
    return replay(random_script(rng, max_length))
