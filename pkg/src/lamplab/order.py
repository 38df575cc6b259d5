"""Finite posets, Birkhoff downset lattices, isomorphism and morphism search.

Labels are opaque strings.  Internally every poset is re-indexed densely and
order ideals/filters are stored as Python int bitmasks.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations
from typing import Iterable, Sequence


class MalformedInput(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    pass


def _bits(mask: int) -> Iterable[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class Poset:
    """Immutable finite poset given by its cover relation.

    ``covers`` must be the transitive reduction of the order it generates;
    use :meth:`from_relation` to build a poset from an arbitrary relation.
    """

    __slots__ = ("elements", "covers", "index", "up", "down", "upper", "lower", "_hash")

    def __init__(self, elements: Sequence[str], covers: Iterable[tuple[str, str]] = ()):
        elements = tuple(str(e) for e in elements)
        if len(set(elements)) != len(elements):
            raise MalformedInput("duplicate labels")
        index = {e: i for i, e in enumerate(elements)}
        n = len(elements)
        upper = [0] * n
        lower = [0] * n
        cov = []
        for a, b in covers:
            a, b = str(a), str(b)
            if a not in index or b not in index:
                raise MalformedInput(f"unknown label in cover ({a}, {b})")
            if a == b:
                raise MalformedInput(f"loop at {a}")
            i, j = index[a], index[b]
            if upper[i] >> j & 1:
                continue
            upper[i] |= 1 << j
            lower[j] |= 1 << i
            cov.append((a, b))
        up = _closure(upper, n)
        for i in range(n):
            if up[i] >> i & 1:
                raise MalformedInput("cover relation has a cycle")
        for i in range(n):
            for j in _bits(upper[i]):
                # j must not be reachable through another upper cover of i
                if any(up[k] >> j & 1 for k in _bits(upper[i] & ~(1 << j))):
                    raise MalformedInput(f"({elements[i]}, {elements[j]}) is not a cover")
        self.elements = elements
        self.covers = tuple(cov)
        self.index = index
        self.upper = tuple(upper)
        self.lower = tuple(lower)
        self.up = tuple(m | 1 << i for i, m in enumerate(up))
        down = [1 << i for i in range(n)]
        for i in range(n):
            for j in _bits(up[i]):
                down[j] |= 1 << i
        self.down = tuple(down)
        self._hash = None

    @classmethod
    def from_relation(cls, elements: Sequence[str], pairs: Iterable[tuple[str, str]]) -> "Poset":
        """Build the poset generated by ``pairs`` (any relation whose closure is an order)."""
        elements = tuple(str(e) for e in elements)
        index = {e: i for i, e in enumerate(elements)}
        n = len(elements)
        succ = [0] * n
        for a, b in pairs:
            i, j = index[str(a)], index[str(b)]
            if i != j:
                succ[i] |= 1 << j
        up = _closure(succ, n)
        for i in range(n):
            if up[i] >> i & 1:
                raise MalformedInput("relation is not antisymmetric")
        return cls(elements, _reduction(elements, up))

    def __len__(self) -> int:
        return len(self.elements)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Poset)
            and set(self.elements) == set(other.elements)
            and set(self.covers) == set(other.covers)
        )

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((frozenset(self.elements), frozenset(self.covers)))
        return self._hash

    def __repr__(self) -> str:
        return f"Poset({len(self)} elements, {len(self.covers)} covers)"

    def leq(self, a: str, b: str) -> bool:
        return bool(self.up[self.index[a]] >> self.index[b] & 1)

    def lt(self, a: str, b: str) -> bool:
        return a != b and self.leq(a, b)

    def covered_by(self, a: str, b: str) -> bool:
        return bool(self.upper[self.index[a]] >> self.index[b] & 1)

    def upset(self, a: str) -> set[str]:
        return {self.elements[j] for j in _bits(self.up[self.index[a]])}

    def downset(self, a: str) -> set[str]:
        return {self.elements[j] for j in _bits(self.down[self.index[a]])}

    def minimal_elements(self) -> set[str]:
        return {e for i, e in enumerate(self.elements) if not self.lower[i]}

    def subposet(self, keep: Iterable[str]) -> "Poset":
        keep = [e for e in self.elements if e in set(keep)]
        pairs = [(a, b) for a in keep for b in keep if a != b and self.leq(a, b)]
        return Poset.from_relation(keep, pairs)

    def relabel(self, mapping: dict[str, str]) -> "Poset":
        return Poset([mapping[e] for e in self.elements], [(mapping[a], mapping[b]) for a, b in self.covers])

    def dual(self) -> "Poset":
        return Poset(self.elements, [(b, a) for a, b in self.covers])

    def to_doc(self) -> dict:
        return {"elements": list(self.elements), "covers": [list(c) for c in self.covers]}

    @classmethod
    def from_doc(cls, doc: dict) -> "Poset":
        try:
            return cls(doc["elements"], [tuple(c) for c in doc["covers"]])
        except (KeyError, TypeError) as exc:
            raise MalformedInput(f"bad poset document: {exc}") from exc


def _closure(succ: list[int], n: int) -> list[int]:
    # strict reachability; Warshall on bit rows
    up = list(succ)
    for k in range(n):
        bk = 1 << k
        uk = up[k]
        for i in range(n):
            if up[i] & bk:
                up[i] |= uk
    return up


def _reduction(elements: Sequence[str], up: list[int]) -> list[tuple[str, str]]:
    covers = []
    for i, mask in enumerate(up):
        for j in _bits(mask):
            if not any(up[k] >> j & 1 for k in _bits(mask & ~(1 << j))):
                covers.append((elements[i], elements[j]))
    return covers


def chain(n: int, prefix: str = "c") -> Poset:
    labels = [f"{prefix}{i}" for i in range(n)]
    return Poset(labels, list(zip(labels, labels[1:])))


def antichain(n: int, prefix: str = "x") -> Poset:
    return Poset([f"{prefix}{i}" for i in range(n)])


def order_of(p: Poset) -> set[tuple[str, str]]:
    """Reflexive transitive closure of the cover relation."""
    return {
        (p.elements[i], p.elements[j]) for i in range(len(p)) for j in _bits(p.up[i])
    }


def maximal_elements(p: Poset) -> set[str]:
    return {e for i, e in enumerate(p.elements) if not p.upper[i]}


def downsets(p: Poset, limit: int | None = None) -> list[int]:
    """All order ideals of ``p`` as bitmasks, in a deterministic order."""
    n = len(p)
    # add elements in a linear extension; an ideal is closed downward
    order = _linear_extension(p)
    result = [0]
    for i in order:
        need = p.down[i] & ~(1 << i)
        result += [m | 1 << i for m in result if m & need == need]
        if limit is not None and len(result) > limit:
            raise BudgetExceeded(f"more than {limit} downsets")
    return sorted(result, key=lambda m: (bin(m).count("1"), m)) if n else result


def _linear_extension(p: Poset) -> list[int]:
    n = len(p)
    indeg = [bin(p.lower[i]).count("1") for i in range(n)]
    ready = sorted(i for i in range(n) if indeg[i] == 0)
    out = []
    while ready:
        i = ready.pop(0)
        out.append(i)
        for j in _bits(p.upper[i]):
            indeg[j] -= 1
            if indeg[j] == 0:
                ready.append(j)
        ready.sort()
    return out


def downset_lattice(p: Poset, limit: int = 200_000):
    """Lattice of order ideals under inclusion (Birkhoff)."""
    from .lattice import Lattice

    ideals = downsets(p, limit)
    label = {m: "{" + ",".join(p.elements[i] for i in sorted(_bits(m))) + "}" for m in ideals}
    members = set(ideals)
    covers = []
    for m in ideals:
        for i in range(len(p)):
            if not m >> i & 1:
                t = m | 1 << i
                if t in members:
                    covers.append((label[m], label[t]))
    return Lattice(Poset([label[m] for m in ideals], covers))


# ---------------------------------------------------------------------------
# morphism search


@dataclass(frozen=True)
class MorphismSpec:
    injective: bool = False
    reflect_order: bool = False
    cover_preserving: bool = False
    maximum_preserving: bool = False
    coatomic_edges: frozenset[tuple[str, str]] | None = None
    collapse_classes: tuple[frozenset[str], ...] | None = None

    def __post_init__(self):
        if self.collapse_classes:
            seen: set[str] = set()
            for cls in self.collapse_classes:
                if seen & cls:
                    raise MalformedInput("collapse classes overlap")
                seen |= cls


@dataclass
class SearchStats:
    nodes: int = 0
    limit: int | None = None

    def tick(self):
        self.nodes += 1
        if self.limit is not None and self.nodes > self.limit:
            raise BudgetExceeded(f"node limit {self.limit} exceeded")


def check_morphism(src: Poset, dst: Poset, mapping: dict[str, str], spec: MorphismSpec) -> list[str]:
    """Return the list of violated requirements (empty when ``mapping`` is valid).

    Works pair by pair on labels; deliberately shares no code with the search.
    """
    problems = []
    if set(mapping) != set(src.elements):
        return ["mapping is not total on the source"]
    if not set(mapping.values()) <= set(dst.elements):
        return ["mapping leaves the target"]
    els = src.elements
    dmax = maximal_elements(dst)
    for x in els:
        for y in els:
            if x == y:
                continue
            fx, fy = mapping[x], mapping[y]
            if src.leq(x, y) and not dst.leq(fx, fy):
                problems.append(f"order not preserved: {x} <= {y}")
            if spec.injective and fx == fy:
                problems.append(f"not injective: {x}, {y}")
            if spec.reflect_order and dst.leq(fx, fy) and not src.leq(x, y):
                problems.append(f"order not reflected: {x}, {y}")
            if spec.cover_preserving and src.covered_by(x, y) != (fx != fy and dst.covered_by(fx, fy)):
                problems.append(f"cover mismatch: {x}, {y}")
    if spec.maximum_preserving:
        for x in maximal_elements(src):
            if mapping[x] not in dmax:
                problems.append(f"maximal {x} not sent to a maximal element")
    if spec.coatomic_edges:
        for x, y in spec.coatomic_edges:
            if not dst.covered_by(mapping[x], mapping[y]):
                problems.append(f"coatomic edge ({x}, {y}) not preserved")
    for cls in spec.collapse_classes or ():
        rest = [e for e in els if e not in cls]
        for x in rest:
            for y in rest:
                if x != y:
                    fx, fy = mapping[x], mapping[y]
                    if fx == fy or src.leq(x, y) != dst.leq(fx, fy):
                        problems.append(f"restriction away from {sorted(cls)} is not an embedding at {x}, {y}")
    return problems


def find_morphism(
    src: Poset,
    dst: Poset,
    spec: MorphismSpec,
    node_limit: int | None = None,
    stats: SearchStats | None = None,
) -> dict[str, str] | None:
    """First morphism satisfying ``spec`` in a deterministic search order, or None.

    Raises :class:`BudgetExceeded` when more than ``node_limit`` nodes are expanded.
    """
    stats = stats or SearchStats(limit=node_limit)
    n, m = len(src), len(dst)
    strict_inj = spec.injective or spec.reflect_order
    if strict_inj and n > m:
        return None
    if n == 0:
        return {}
    classes = spec.collapse_classes or ()
    cls_of = [frozenset(k for k, c in enumerate(classes) if src.elements[i] in c) for i in range(n)]
    # pairs (i, j) that must behave like an embedding
    def must_embed(i: int, j: int) -> bool:
        if strict_inj:
            return True
        if not classes:
            return False
        # embedding in every restriction that keeps both
        return any(k not in cls_of[i] and k not in cls_of[j] for k in range(len(classes)))

    embed_pair = [[must_embed(i, j) for j in range(n)] for i in range(n)]
    src_max = {src.index[e] for e in maximal_elements(src)}
    dst_max = {dst.index[e] for e in maximal_elements(dst)}
    coat = [[False] * n for _ in range(n)]
    for a, b in spec.coatomic_edges or ():
        coat[src.index[a]][src.index[b]] = True

    up_sz = [bin(x).count("1") for x in src.up]
    dn_sz = [bin(x).count("1") for x in src.down]
    dup_sz = [bin(x).count("1") for x in dst.up]
    ddn_sz = [bin(x).count("1") for x in dst.down]

    # candidate lists, sorted by label for determinism
    dst_sorted = sorted(range(m), key=lambda j: dst.elements[j])
    cands: list[list[int]] = []
    for i in range(n):
        cs = []
        for j in dst_sorted:
            if spec.maximum_preserving and i in src_max and j not in dst_max:
                continue
            if strict_inj and (up_sz[i] > dup_sz[j] or dn_sz[i] > ddn_sz[j]):
                continue
            if spec.cover_preserving:
                if bin(src.upper[i]).count("1") > bin(dst.upper[j]).count("1"):
                    continue
                if bin(src.lower[i]).count("1") > bin(dst.lower[j]).count("1"):
                    continue
            cs.append(j)
        if not cs:
            return None
        cands.append(cs)

    # assignment order: connected growth from the most constrained element
    order: list[int] = []
    placed = 0
    rel = [src.up[i] | src.down[i] for i in range(n)]
    while len(order) < n:
        best = None
        for i in range(n):
            if placed >> i & 1:
                continue
            key = (-(bin(rel[i] & placed).count("1")), len(cands[i]), -up_sz[i] - dn_sz[i], src.elements[i])
            if best is None or key < best[0]:
                best = (key, i)
        order.append(best[1])
        placed |= 1 << best[1]

    phi = [-1] * n
    used: dict[int, int] = {}

    def consistent(i: int, j: int) -> bool:
        for k in range(n):
            fk = phi[k]
            if fk < 0:
                continue
            s_le = src.up[k] >> i & 1  # k <= i
            s_ge = src.up[i] >> k & 1  # i <= k
            d_le = dst.up[fk] >> j & 1
            d_ge = dst.up[j] >> fk & 1
            if s_le and not d_le:
                return False
            if s_ge and not d_ge:
                return False
            if embed_pair[i][k]:
                if fk == j or d_le != s_le or d_ge != s_ge:
                    return False
            if spec.cover_preserving:
                if (src.upper[k] >> i & 1) != (fk != j and dst.upper[fk] >> j & 1):
                    return False
                if (src.upper[i] >> k & 1) != (fk != j and dst.upper[j] >> fk & 1):
                    return False
            if coat[k][i] and not (fk != j and dst.upper[fk] >> j & 1):
                return False
            if coat[i][k] and not (fk != j and dst.upper[j] >> fk & 1):
                return False
        return True

    def rec(pos: int) -> bool:
        if pos == n:
            return True
        i = order[pos]
        for j in cands[i]:
            if spec.injective and used.get(j):
                continue
            stats.tick()
            if not consistent(i, j):
                continue
            phi[i] = j
            used[j] = used.get(j, 0) + 1
            if rec(pos + 1):
                return True
            used[j] -= 1
            phi[i] = -1
        return False

    if rec(0):
        return {src.elements[i]: dst.elements[phi[i]] for i in range(n)}
    return None


ISO_SPEC = MorphismSpec(injective=True, reflect_order=True)


def is_isomorphic(p: Poset, q: Poset, node_limit: int | None = None) -> dict[str, str] | None:
    if len(p) != len(q) or len(p.covers) != len(q.covers):
        return None
    return find_morphism(p, q, ISO_SPEC, node_limit=node_limit)


# ---------------------------------------------------------------------------
# canonical form


def _refine(p: Poset, colors: list[int]) -> list[int]:
    n = len(p)
    while True:
        sig = [
            (
                colors[i],
                tuple(sorted(colors[j] for j in _bits(p.upper[i]))),
                tuple(sorted(colors[j] for j in _bits(p.lower[i]))),
            )
            for i in range(n)
        ]
        ranks = {s: r for r, s in enumerate(sorted(set(sig)))}
        new = [ranks[s] for s in sig]
        if len(set(new)) == len(set(colors)):
            return new
        colors = new


def _initial_colors(p: Poset) -> list[int]:
    n = len(p)
    level = [0] * n
    for i in _linear_extension(p):
        for j in _bits(p.upper[i]):
            level[j] = max(level[j], level[i] + 1)
    sig = [
        (
            bin(p.lower[i]).count("1"),
            bin(p.upper[i]).count("1"),
            level[i],
            bin(p.up[i]).count("1"),
            bin(p.down[i]).count("1"),
        )
        for i in range(n)
    ]
    ranks = {s: r for r, s in enumerate(sorted(set(sig)))}
    return [ranks[s] for s in sig]


def canonical_form(p: Poset) -> tuple:
    """Isomorphism-invariant encoding: equal iff the posets are isomorphic.

    Individualization/refinement with exhaustive branching over the first
    non-singleton colour cell; the encoding is the lexicographically least
    strict-order matrix over all leaves.
    """
    n = len(p)
    if n == 0:
        return (0, ())
    best: list[tuple] = []

    def encode(colors: list[int]) -> tuple:
        perm = sorted(range(n), key=lambda i: colors[i])
        pos = {v: k for k, v in enumerate(perm)}
        rows = []
        for v in perm:
            rows.append(tuple(sorted(pos[j] for j in _bits(p.up[v] & ~(1 << v)))))
        return tuple(rows)

    def search(colors: list[int]):
        colors = _refine(p, colors)
        if len(set(colors)) == n:
            code = encode(colors)
            if not best or code < best[0]:
                best[:] = [code]
            return
        counts: dict[int, int] = {}
        for c in colors:
            counts[c] = counts.get(c, 0) + 1
        target = min(c for c, k in counts.items() if k > 1)
        seen_twins = set()
        for v in range(n):
            if colors[v] != target:
                continue
            # interchangeable twins give identical leaves
            twin_key = (p.up[v] & ~(1 << v), p.down[v] & ~(1 << v))
            if twin_key in seen_twins:
                continue
            seen_twins.add(twin_key)
            # individualize v: split its cell, v first
            new = [2 * c + (1 if c == target and u != v else 0) for u, c in enumerate(colors)]
            search(new)

    search([2 * c for c in _initial_colors(p)])
    return (n, best[0])


def brute_isomorphic(p: Poset, q: Poset) -> bool:
    """Reference isomorphism test by trying every bijection (small posets only)."""
    if len(p) != len(q):
        return False
    qo = order_of(q)
    po = order_of(p)
    for perm in permutations(q.elements):
        f = dict(zip(p.elements, perm))
        if {(f[a], f[b]) for a, b in po} == qo:
            return True
    return False
