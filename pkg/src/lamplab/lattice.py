"""Finite lattices: tables, structural predicates and the congruence oracle."""
from __future__ import annotations

from dataclasses import dataclass

from .order import BudgetExceeded, MalformedInput, Poset, _bits, downset_lattice


class NotALattice(MalformedInput):
    pass


class Lattice:
    """A finite lattice backed by its cover poset and join/meet tables.

    Element ``i`` of the tables is ``poset.elements[i]``.
    """

    def __init__(self, poset: Poset):
        n = len(poset)
        if n == 0:
            raise NotALattice("empty poset")
        self.poset = poset
        self.n = n
        up, down = poset.up, poset.down
        size_down = [bin(m).count("1") for m in down]
        size_up = [bin(m).count("1") for m in up]
        join = [[0] * n for _ in range(n)]
        meet = [[0] * n for _ in range(n)]
        for a in range(n):
            for b in range(a, n):
                ub = up[a] & up[b]
                j = _least(ub, up, size_down)
                if j is None:
                    raise NotALattice(f"{poset.elements[a]}, {poset.elements[b]} have no join")
                lb = down[a] & down[b]
                m = _least(lb, down, size_up)
                if m is None:
                    raise NotALattice(f"{poset.elements[a]}, {poset.elements[b]} have no meet")
                join[a][b] = join[b][a] = j
                meet[a][b] = meet[b][a] = m
        self.join = join
        self.meet = meet
        self.bottom = next(i for i in range(n) if down[i] == 1 << i)
        self.top = next(i for i in range(n) if up[i] == 1 << i)
        self._height: list[int] | None = None

    @classmethod
    def from_covers(cls, elements, covers) -> "Lattice":
        return cls(Poset(elements, covers))

    # label-level helpers
    def idx(self, x: str) -> int:
        return self.poset.index[x]

    def label(self, i: int) -> str:
        return self.poset.elements[i]

    def leq(self, a: int, b: int) -> bool:
        return bool(self.poset.up[a] >> b & 1)

    def upper_covers(self, a: int) -> list[int]:
        return list(_bits(self.poset.upper[a]))

    def lower_covers(self, a: int) -> list[int]:
        return list(_bits(self.poset.lower[a]))

    def join_all(self, items) -> int:
        r = self.bottom
        for x in items:
            r = self.join[r][x]
        return r

    def meet_all(self, items) -> int:
        r = self.top
        for x in items:
            r = self.meet[r][x]
        return r

    @property
    def heights(self) -> list[int]:
        if self._height is None:
            h = [0] * self.n
            for i in sorted(range(self.n), key=lambda i: bin(self.poset.down[i]).count("1")):
                for j in self.lower_covers(i):
                    h[i] = max(h[i], h[j] + 1)
            self._height = h
        return self._height


def _least(mask: int, rows, sizes) -> int | None:
    # the element of ``mask`` whose principal filter/ideal contains all of mask
    best = None
    for i in _bits(mask):
        if best is None or sizes[i] < sizes[best]:
            best = i
    if best is None or mask & ~rows[best]:
        return None
    return best


def lattice_from_covers(p: Poset) -> Lattice:
    return Lattice(p)


def cov_star(l: Lattice, u: int) -> int:
    """Join of all upper covers of ``u``."""
    if u == l.top:
        raise ValueError("cov* is undefined at the top element")
    return l.join_all(l.upper_covers(u))


def jir(l: Lattice) -> set[int]:
    return {i for i in range(l.n) if len(l.lower_covers(i)) == 1}


def mir(l: Lattice) -> set[int]:
    return {i for i in range(l.n) if len(l.upper_covers(i)) == 1}


def height(l: Lattice, x: int) -> int:
    return l.heights[x]


def length(l: Lattice) -> int:
    return l.heights[l.top]


def jir_poset(l: Lattice) -> Poset:
    js = sorted(jir(l))
    labels = [l.label(i) for i in js]
    pairs = [(l.label(a), l.label(b)) for a in js for b in js if a != b and l.leq(a, b)]
    return Poset.from_relation(labels, pairs)


def is_semimodular(l: Lattice) -> bool:
    """Upper semimodularity: a ≺ b, a ≺ c, b ≠ c imply b ≺ b∨c."""
    for a in range(l.n):
        ups = l.upper_covers(a)
        for i, b in enumerate(ups):
            for c in ups[i + 1:]:
                j = l.join[b][c]
                if not (l.poset.upper[b] >> j & 1 and l.poset.upper[c] >> j & 1):
                    return False
    return True


def is_distributive(l: Lattice) -> bool:
    J, M = l.join, l.meet
    for x in range(l.n):
        for y in range(l.n):
            jy = J[y]
            mxy = M[x][y]
            for z in range(y + 1, l.n):
                if M[x][jy[z]] != J[mxy][M[x][z]]:
                    return False
    return True


def _width_at_most_two(p: Poset) -> bool:
    # Dilworth: width = n - maximum matching in the strict comparability bipartite graph
    n = len(p)
    succ = [list(_bits(p.up[i] & ~(1 << i))) for i in range(n)]
    match_r = [-1] * n

    def augment(u: int, seen: list[bool]) -> bool:
        for v in succ[u]:
            if not seen[v]:
                seen[v] = True
                if match_r[v] < 0 or augment(match_r[v], seen):
                    match_r[v] = u
                    return True
        return False

    matched = sum(augment(u, [False] * n) for u in range(n))
    return n - matched <= 2


def is_slim(l: Lattice) -> bool:
    return _width_at_most_two(jir_poset(l))


def corners(l: Lattice) -> set[int]:
    return jir(l) & mir(l)


def is_rectangular(l: Lattice) -> bool:
    if not (is_semimodular(l) and is_slim(l)):
        return False
    cs = sorted(corners(l))
    if len(cs) != 2:
        return False
    a, b = cs
    return l.join[a][b] == l.top and l.meet[a][b] == l.bottom


def is_patch(l: Lattice) -> bool:
    if not is_rectangular(l):
        return False
    coatoms = set(l.lower_covers(l.top))
    return corners(l) <= coatoms


# ---------------------------------------------------------------------------
# congruences


@dataclass(frozen=True)
class CongruencePartition:
    """Partition of lattice indices; ``block_of[i]`` is the least index in i's block."""

    block_of: tuple[int, ...]

    @property
    def blocks(self) -> list[list[int]]:
        out: dict[int, list[int]] = {}
        for i, r in enumerate(self.block_of):
            out.setdefault(r, []).append(i)
        return sorted(out.values())

    def related(self, a: int, b: int) -> bool:
        return self.block_of[a] == self.block_of[b]

    def refines(self, other: "CongruencePartition") -> bool:
        return all(other.block_of[i] == other.block_of[r] for i, r in enumerate(self.block_of))

    def __len__(self) -> int:
        return len(set(self.block_of))


def _normalize(parent: list[int]) -> tuple[int, ...]:
    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    roots = [find(i) for i in range(len(parent))]
    least: dict[int, int] = {}
    for i, r in enumerate(roots):
        least.setdefault(r, i)
    return tuple(least[r] for r in roots)


def principal_congruence(l: Lattice, a: int, b: int) -> CongruencePartition:
    """Least congruence collapsing ``a`` and ``b``.

    Union-find fixpoint: every pair that gets merged is pushed through all
    translations x ↦ x∨c and x ↦ x∧c.
    """
    n = l.n
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    queue = []

    def union(x, y):
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[max(rx, ry)] = min(rx, ry)
            queue.append((x, y))

    union(a, b)
    J, M = l.join, l.meet
    while queue:
        x, y = queue.pop()
        jx, jy, mx, my = J[x], J[y], M[x], M[y]
        for c in range(n):
            if jx[c] != jy[c]:
                union(jx[c], jy[c])
            if mx[c] != my[c]:
                union(mx[c], my[c])
    return CongruencePartition(_normalize(parent))


def cover_pairs(l: Lattice) -> list[tuple[int, int]]:
    return [(a, b) for a in range(l.n) for b in l.upper_covers(a)]


def jir_con_poset(l: Lattice) -> tuple[Poset, dict[str, CongruencePartition]]:
    """Join-irreducible congruences (the distinct con(a, b) over covers a ≺ b) ordered by refinement.

    Returns the poset and the congruence behind every label; a label is
    ``"a|b"`` for the lexicographically first cover generating it.
    """
    found: dict[tuple[int, ...], tuple[str, CongruencePartition]] = {}
    for a, b in sorted(cover_pairs(l), key=lambda p: (l.label(p[0]), l.label(p[1]))):
        theta = principal_congruence(l, a, b)
        if theta.block_of not in found:
            found[theta.block_of] = (f"{l.label(a)}|{l.label(b)}", theta)
    items = sorted(found.values(), key=lambda t: t[0])
    labels = [t[0] for t in items]
    pairs = [
        (s, t)
        for s, th in items
        for t, ph in items
        if s != t and th.refines(ph)
    ]
    return Poset.from_relation(labels, pairs), {s: th for s, th in items}


def con_lattice(l: Lattice, limit: int = 200_000) -> Lattice:
    p, _ = jir_con_poset(l)
    return downset_lattice(p, limit)


def all_congruences(l: Lattice, max_size: int = 14) -> list[CongruencePartition]:
    """Every compatible partition, by pruned search over restricted growth strings.

    Independent of :func:`principal_congruence`; meant as a test oracle.
    """
    n = l.n
    if n > max_size:
        raise BudgetExceeded(f"exhaustive congruence enumeration capped at {max_size} elements")
    J, M = l.join, l.meet
    block = [-1] * n
    out = []

    def ok(upto: int) -> bool:
        # check substitution for all pairs among assigned elements whose images are assigned
        for x in range(upto + 1):
            for y in range(x + 1, upto + 1):
                if block[x] != block[y]:
                    continue
                for c in range(upto + 1):
                    for u, v in ((J[x][c], J[y][c]), (M[x][c], M[y][c])):
                        if u <= upto and v <= upto and block[u] != block[v]:
                            return False
        return True

    def rec(i: int, nblocks: int):
        if i == n:
            out.append(CongruencePartition(_normalize_blocks(block)))
            return
        for bl in range(nblocks + 1):
            block[i] = bl
            if ok(i):
                rec(i + 1, max(nblocks, bl + 1))
        block[i] = -1

    rec(0, 0)
    return out


def _normalize_blocks(block: list[int]) -> tuple[int, ...]:
    least: dict[int, int] = {}
    for i, b in enumerate(block):
        least.setdefault(b, i)
    return tuple(least[b] for b in block)


def congruence_lattice_exhaustive(l: Lattice) -> tuple[Poset, list[CongruencePartition]]:
    """Con L as a poset of partitions under refinement, from :func:`all_congruences`."""
    cons = all_congruences(l)
    labels = [f"t{i}" for i in range(len(cons))]
    pairs = [
        (labels[i], labels[j])
        for i, a in enumerate(cons)
        for j, b in enumerate(cons)
        if i != j and a.refines(b)
    ]
    return Poset.from_relation(labels, pairs), cons
