"""Representability: bounds, the x(n) estimate, necessary-condition filters and the script search."""
from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from itertools import permutations
from math import factorial
from typing import Callable, Iterable

from .diagram import BuildScript, Diagram, distributive_cells, grid, insert_multifork, replay
from .gadgets import has_cde_property, has_ctf_property
from .lamps import lamps, lit_contains
from .lattice import Lattice, is_distributive, jir_con_poset, jir_poset
from .order import BudgetExceeded, MalformedInput, Poset, SearchStats, is_isomorphic, maximal_elements

DEFAULT_LENGTH_BUDGET = 12
DEFAULT_NODE_BUDGET = 10**7


def bounds(n: int) -> dict[str, int]:
    """Raw formula values; no clamping for tiny n."""
    if n < 1:
        raise ValueError("n must be positive")
    return {
        "length_bound": 3 * n * n,
        "size_bound": 9 * n**4,
        "tubes_per_lamp": 3 * n - 4,
        "tubes_total": 3 * n * n - 9 * n + 8,
    }


def estimate_x(n: int, digits: int = 30) -> Decimal:
    """(e^2 / 2) * sum_{k=2}^{3n^2} (k-2)!, the factorial sum taken exactly."""
    if n < 1:
        raise ValueError("n must be positive")
    total = 0
    f = 1
    for k in range(2, 3 * n * n + 1):
        # f == (k - 2)!
        total += f
        f *= k - 1
    with localcontext() as ctx:
        ctx.prec = digits
        return Decimal(2).exp() / 2 * Decimal(total)


def mantissa_exponent(x: Decimal, places: int = 4) -> tuple[str, int]:
    """Write x as 0.ddd * 10^e, the display used for these magnitudes."""
    sign, digits, exp = x.as_tuple()
    e = len(digits) + exp
    with localcontext() as ctx:
        ctx.prec = places
        m = +(x.scaleb(-e))
    if m >= 1:
        m, e = m / 10, e + 1
    return f"{m:.{places}f}", e


def _check_factorial_sum(n: int) -> int:
    # independent spelling of the sum, used by tests
    return sum(factorial(k - 2) for k in range(2, 3 * n * n + 1))


# ---------------------------------------------------------------------------
# targets and verdicts


def target_poset(t) -> Poset:
    """Accept a Poset (taken as Jir D) or a distributive Lattice."""
    if isinstance(t, Lattice):
        if not is_distributive(t):
            raise MalformedInput("target lattice is not distributive")
        return jir_poset(t)
    if isinstance(t, Poset):
        return t
    raise MalformedInput(f"unsupported target {type(t).__name__}")


@dataclass
class Verdict:
    outcome: str  # representable | not_representable | inconclusive
    script: BuildScript | None = None
    reason: str = ""
    log: list[dict] = field(default_factory=list)
    budget: dict = field(default_factory=dict)
    note: str = ""
    mapping: dict[str, str] | None = None

    def to_doc(self) -> dict:
        doc = {"outcome": self.outcome, "filters": self.log, "budget": self.budget}
        if self.script is not None:
            doc["witness"] = self.script.to_doc()
        if self.mapping is not None:
            doc["mapping"] = dict(sorted(self.mapping.items()))
        if self.reason:
            doc["reason"] = self.reason
        if self.note:
            doc["note"] = self.note
        return doc


def filters(
    p: Poset,
    *,
    n_max: int = 5,
    use_systems: bool = False,
    system_budget: int = 200_000,
    plugins: Iterable[Callable[[Poset], bool]] = (),
    node_limit: int | None = 2_000_000,
) -> list[dict]:
    """Necessary conditions, in order; stops at the first failure."""
    log = []

    def add(name, ok, **extra):
        log.append({"filter": name, "result": ok, **extra})
        return ok in ("pass", "skipped")

    if len(p) >= 2:
        if not add("maximal-elements", "pass" if len(maximal_elements(p)) >= 2 else "fail"):
            return log
    for kind, check, lo in (("CTF", has_ctf_property, 2), ("CDE", has_cde_property, 3)):
        for n in range(lo, n_max + 1):
            v = check(p, n, node_limit)
            res = {"holds": "pass", "fails": "fail", "inconclusive": "skipped"}[v["verdict"]]
            extra = {"witness": v["witness"]} if "witness" in v else {}
            if not add(f"{kind}_{n}", res, **extra):
                return log
    if use_systems:
        from .photon import system_search

        r = system_search(p, system_budget)
        if r.system is not None:
            add("abstract-system", "pass")
        elif r.exhausted:
            # a complete (#1)-only search found nothing, so no representation exists
            if not add("abstract-system", "fail"):
                return log
        else:
            add("abstract-system", "skipped", reason="budget")
    for i, plug in enumerate(plugins):
        if not add(f"plugin-{i}", "pass" if plug(p) else "fail"):
            return log
    return log


def complete_length(n: int, m: int) -> int:
    """A length budget at which the script search is exhaustive."""
    return min(3 * n * n, m + (n - m) * max(1, 3 * n - 4))


# ---------------------------------------------------------------------------
# the script search


@dataclass
class _Search:
    target: Poset
    length_budget: int
    stats: SearchStats
    max_tubes: int
    seen: set = field(default_factory=set)


def _upset_of_new(d: Diagram, new, old_names: dict[str, str], target: Poset) -> set[str]:
    """Target images of the lamps above the new (minimal) lamp."""
    by = {lp.name: lp for lp in lamps(d)}
    direct = [name for name in old_names if lit_contains(by[name], new.foot_pt)]
    out = set()
    for name in direct:
        out |= target.upset(old_names[name])
    return out


def _grow(s: _Search, d: Diagram, phi: dict[str, str]) -> tuple[Diagram, dict[str, str]] | None:
    t = s.target
    remaining = len(t) - len(phi)
    if remaining == 0:
        return d, phi
    realised = set(phi.values())
    avail = [x for x in t.elements if x not in realised and t.upset(x) - {x} <= realised]
    want = {x: t.upset(x) - {x} for x in avail}
    room = s.length_budget - d.length - (remaining - 1)
    if room < 1:
        return None
    kmax = min(room, s.max_tubes)
    old = {lp.name for lp in lamps(d)}
    for cell in sorted(distributive_cells(d), key=lambda c: d.coords[c.bottom]):
        for k in range(1, kmax + 1):
            s.stats.tick()
            ext = insert_multifork(d, cell, k)
            new = [lp for lp in lamps(ext) if lp.name not in old]
            if len(new) != 1:
                raise AssertionError("a multifork must create exactly one lamp")
            up = _upset_of_new(ext, new[0], phi, t)
            for x in avail:
                if want[x] != up:
                    continue
                nphi = dict(phi)
                nphi[new[0].name] = x
                key = (ext.covers, tuple(sorted(nphi.items())))
                if key in s.seen:
                    continue
                s.seen.add(key)
                found = _grow(s, ext, nphi)
                if found is not None:
                    return found
    return None


def _roots(p: Poset):
    maxs = sorted(maximal_elements(p))
    m = len(maxs)
    for c in range(1, m):
        g = grid(c, m - c)
        names = [lp.name for lp in lamps(g)]
        for perm in permutations(maxs):
            yield g, dict(zip(names, perm))


def decide(
    t,
    *,
    length_budget: int = DEFAULT_LENGTH_BUDGET,
    node_budget: int = DEFAULT_NODE_BUDGET,
    n_max_filters: int = 5,
    use_systems: bool = False,
    plugins: Iterable[Callable[[Poset], bool]] = (),
) -> Verdict:
    p = target_poset(t)
    n = len(p)
    if n <= 1:
        # rectangular lattices have two boundary lamps; chains answer the trivial targets
        chain_len = n + 1
        return Verdict(
            "representable",
            reason=f"{chain_len}-element chain",
            note="slim planar semimodular but not rectangular",
            budget={"length": length_budget},
        )
    log = filters(p, n_max=n_max_filters, use_systems=use_systems, plugins=plugins)
    failed = [f for f in log if f["result"] == "fail"]
    if failed:
        return Verdict("not_representable", reason=f"filter {failed[0]['filter']}", log=log)
    m = len(maximal_elements(p))
    need = complete_length(n, m)
    stats = SearchStats(limit=node_budget)
    s = _Search(p, min(length_budget, 3 * n * n), stats, max(1, 3 * n - 4))
    try:
        for g, phi in _roots(p):
            if g.length > s.length_budget:
                continue
            found = _grow(s, g, phi)
            if found is not None:
                d, mapping = found
                return Verdict(
                    "representable",
                    script=d.script,
                    log=log,
                    mapping=mapping,
                    budget={"length": s.length_budget, "nodes": stats.nodes},
                )
    except BudgetExceeded:
        return Verdict(
            "inconclusive",
            reason="node budget exhausted",
            log=log,
            budget={"length": s.length_budget, "nodes": stats.nodes, "complete_at": need},
        )
    if s.length_budget >= need:
        return Verdict(
            "not_representable",
            reason="exhaustive script search",
            log=log,
            budget={"length": s.length_budget, "nodes": stats.nodes, "complete_at": need},
        )
    return Verdict(
        "inconclusive",
        reason=f"no witness of length <= {s.length_budget}; lengths up to {need} untried",
        log=log,
        budget={"length": s.length_budget, "nodes": stats.nodes, "complete_at": need},
    )


def verify_witness(t, script: BuildScript) -> bool:
    """Replay the script and compare the oracle poset with the target; independent of the search."""
    p = target_poset(t)
    try:
        d = replay(script)
    except Exception:
        return False
    oracle, _ = jir_con_poset(d.lattice)
    return is_isomorphic(oracle, p) is not None
