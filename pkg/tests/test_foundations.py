from hypothesis import given
from hypothesis import strategies as st

from strategies import index_sets
from transs.foundations import (
    IndexOrder,
    check_domination_chain,
    dominates,
    in_upset,
    leq,
    mi_leq,
    min_elements,
)


def _brute_min(E):
    return {k for k in E if not any(leq(p, k) and p != k for p in E)}


def test_mi_leq_examples():
    assert mi_leq((0, 1), (1, 1)) is IndexOrder.LEQ
    assert mi_leq((1, 0), (0, 1)) is IndexOrder.INCOMPARABLE
    assert mi_leq((2, 3), (2, 3)) is IndexOrder.LEQ
    assert mi_leq((2, 2), (1, 2)) is IndexOrder.GREATER


def test_min_elements_examples():
    assert min_elements({(0, 1), (1, 0), (1, 1)}) == {(0, 1), (1, 0)}
    assert min_elements(set()) == set()
    assert min_elements({(2, 3), (3, 3), (2, 4)}) == {(2, 3)}


def test_dominates_examples():
    assert dominates({(0, 0)}, {(1, 1)})
    assert dominates({(5, 5)}, set())
    assert dominates(set(), set())
    assert not dominates({(1, 0)}, {(0, 1)})


def test_chain_examples():
    assert check_domination_chain([{(0, 0)}, {(1, 1)}, {(2, 2)}])
    assert not check_domination_chain([{(0, 0)}, {(0, 0)}])


def test_upset_membership():
    assert in_upset((3, 1), [(2, 0)])
    assert not in_upset((1, 5), [(2, 0)])


@given(index_sets)
def test_min_elements_is_brute_force_antichain(E):
    M = min_elements(E)
    assert set(M) == _brute_min(E)
    for a in M:
        for b in M:
            assert a == b or not leq(a, b)


@given(index_sets, index_sets)
def test_dominates_only_depends_on_minimal_elements(E, F):
    assert dominates(E, F) == dominates(min_elements(E), min_elements(F))


@given(index_sets, index_sets)
def test_dominated_sets_share_no_minimal_element(E, F):
    if dominates(E, F) and F:
        assert not (set(min_elements(E)) & set(min_elements(F)))


@given(index_sets, index_sets, index_sets)
def test_dominates_is_transitive(E, F, G):
    if dominates(E, F) and dominates(F, G):
        assert dominates(E, G)


@given(st.lists(index_sets, min_size=1, max_size=4))
def test_chain_matches_pairwise_definition(chain):
    expect = all(dominates(a, b) for a, b in zip(chain, chain[1:]))
    assert check_domination_chain(chain) == expect
