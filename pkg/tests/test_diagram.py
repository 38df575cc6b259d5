import random
from fractions import Fraction

import pytest
from hypothesis import given
from strategies import scripts

from conftest import cached_corpus
from lamplab.diagram import (
    BuildScript,
    IntegrityError,
    PreconditionError,
    Step,
    cell_at,
    diagram_from_doc,
    distributive_cells,
    enumerate_lattices,
    four_cells,
    grid,
    insert_fork,
    insert_multifork,
    lattice_key,
    ljc,
    mirror,
    random_script,
    remove_tube,
    replay,
    rjc,
    structural_problems,
)
from lamplab.lattice import is_rectangular, is_semimodular, is_slim
from lamplab.order import MalformedInput, canonical_form


def test_grid_shape():
    g = grid(2, 3)
    assert len(g) == 12 and g.length == 5
    assert is_rectangular(g.lattice)
    assert not structural_problems(g)
    with pytest.raises(PreconditionError):
        grid(0, 2)


def test_s7(s7):
    assert len(s7) == 7 and s7.length == 3
    assert is_slim(s7.lattice) and is_semimodular(s7.lattice)
    steep = [(a, b) for a, b in s7.covers if s7.is_precipitous(a, b)]
    assert len(steep) == 1


def test_every_element_is_ljc_join_rjc():
    d = replay(BuildScript((2, 2), (Step("multifork", (Fraction(0), Fraction(1)), 2),)))
    for x in d.elements:
        if x != d.bottom:
            assert d.join(ljc(d, x), rjc(d, x)) == x


def test_multifork_needs_a_distributive_cell():
    d = grid(1, 1)
    d = insert_multifork(d, distributive_cells(d)[0], 1)
    bad = [c for c, ok in four_cells(d) if not ok]
    assert bad
    with pytest.raises(PreconditionError):
        insert_multifork(d, bad[0], 1)
    # a raw fork is allowed anywhere
    assert not structural_problems(insert_fork(d, bad[0]))


def test_multifork_sides_give_the_same_lattice():
    g = grid(2, 2)
    cell = distributive_cells(g)[-1]
    a, b = insert_multifork(g, cell, 3), insert_multifork(g, cell, 3, side="right")
    assert lattice_key(a) == lattice_key(b)


def test_script_round_trip_and_errors():
    s = BuildScript((1, 2), (Step("multifork", (Fraction(0), Fraction(1)), 2),))
    assert BuildScript.from_doc(s.to_doc()) == s
    assert s.length == 5
    with pytest.raises(MalformedInput):
        BuildScript.from_doc({"grid": [0, 1]})
    with pytest.raises(MalformedInput):
        BuildScript.from_doc({"grid": [1, 1], "steps": [{"cell_bottom": [0, 0], "k": 0}]})
    with pytest.raises(PreconditionError):
        cell_at(grid(1, 1), (Fraction(5), Fraction(5)))


def test_diagram_doc_round_trip(s7):
    assert diagram_from_doc(s7.to_doc()) == s7
    with pytest.raises(MalformedInput):
        diagram_from_doc({"coords": {"a": [[0, 1], [0, 1]]}, "covers": [["a", "b"]]})


def test_remove_tube_requires_secondary_triple(s7):
    feet = [a for a, b in s7.covers if s7.is_precipitous(a, b)]
    with pytest.raises(PreconditionError):
        remove_tube(s7, feet[0])
    # unsafe removal of the only fork gives back the grid
    back = remove_tube(s7, feet[0], unsafe=True)
    assert canonical_form(back.poset) == canonical_form(grid(1, 1).poset)


@given(scripts(8))
def test_random_scripts_are_slim_rectangular(s):
    d = replay(s)
    assert not structural_problems(d)
    assert d.length == s.length


@given(scripts(7))
def test_mirror_is_an_isomorphic_diagram(s):
    d = replay(s)
    m = mirror(d)
    assert not structural_problems(m)
    assert lattice_key(m) == lattice_key(d)
    assert mirror(m) == d


def _fork_census(max_length):
    """Independent route: single forks into any 4-cell, deduplicated by canonical form."""
    levels = {}
    for length in range(2, max_length + 1):
        found = {}
        for c in range(1, length):
            g = grid(c, length - c)
            found.setdefault(canonical_form(g.poset), g)
        for base in levels.get(length - 1, {}).values():
            for cell, _ in four_cells(base):
                try:
                    e = insert_fork(base, cell)
                except (IntegrityError, PreconditionError):
                    continue  # the legs would cross a tube; not drawable here
                found.setdefault(canonical_form(e.poset), e)
        levels[length] = found
    return {k: len(v) for k, v in levels.items()}


def test_census_matches_fork_closure():
    assert enumerate_lattices(6) == _fork_census(6)


def test_census_values_and_corpus():
    census = enumerate_lattices(6)
    assert census == {2: 1, 3: 2, 4: 6, 5: 19, 6: 78}
    assert len(cached_corpus(6)) == sum(census.values())
    assert enumerate_lattices(6, min_length=4) == {4: 6, 5: 19, 6: 78}


def test_random_script_is_seeded():
    a = random_script(random.Random(5), 9)
    b = random_script(random.Random(5), 9)
    assert a == b
    with pytest.raises(PreconditionError):
        random_script(random.Random(0), 1)
