#!/usr/bin/env python3
from itertools import product

import numpy as np
import pytest
from numpy.testing import assert_allclose

from completion.engine import (PartialSymmetricMatrix, build_minor_poset, certify_full_rank, clique_pair_complete,
                               clique_pair_min_rank, complete_cliques, definite_block_pair, disjoint_union_min_rank,
                               disjoint_union_rank, esd, esd_partial, format_partial, multi_clique_complete,
                               one_missing_entry_solve, parse_partial)
from completion.errors import (InputError, MatrixFormatError, NonGenericInputError, NotCertifiedError,
                               NotFullRankTypicalError, PatternError, SingularBlockError)
from completion.graph_core import complement, cycle, from_edges, looped_clique, looped_cycle
from completion.symmetric_linalg import (Inertia, Tolerance, assemble_blocks, det_sign, format_matrix, inertia,
                                         numeric_rank, principal_submatrix)
from consts import DEFICIENT, FULL_RANK


def random_symmetric(rng, n, positives):
    q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    values = np.concatenate([rng.uniform(0.5, 2, positives), -rng.uniform(0.5, 2, n - positives)])
    a = q @ np.diag(values) @ q.T
    return (a + a.T) / 2


def two_singletons(a, b):
    return PartialSymmetricMatrix(from_edges(2, [(1, 1), (2, 2)]), {(1, 1): a, (2, 2): b})


def looped_four_cycle(d, e, a, b, c):
    """C_4° with diagonal d and edge values 12, 23, 34, 14."""
    values = {(i, i): v for i, v in enumerate(d, start=1)}
    values.update({(1, 2): e, (2, 3): a, (3, 4): b, (1, 4): c})
    return PartialSymmetricMatrix(looped_cycle(4), values)


# Every completion is invertible with inertia (2, 2, 0)
FULL_RANK_C4 = looped_four_cycle((1.0, 1.0, -1.0, -1.0), 0.5, 1.0, 0.5, 1.0)
# Positive-definite 2 x 2 minors on every edge
DEFICIENT_C4 = looped_four_cycle((1.0, 1.0, 1.0, 1.0), 0.5, 0.5, 0.5, 0.5)

# Patterns whose complements are K_{3,3}, a perfect matching and a star, plus C_4°
CERTIFIED_PATTERNS = [
    complement(from_edges(6, [(i, j) for i in (1, 2, 3) for j in (4, 5, 6)])),
    complement(from_edges(6, [(1, 6), (2, 5), (3, 4)])),
    complement(from_edges(4, [(1, 2), (1, 3), (1, 4)])),
    looped_cycle(4),
]


## Partial matrices ##

def test_partial_matrix_needs_exactly_the_pattern_values():
    with pytest.raises(MatrixFormatError):
        PartialSymmetricMatrix(looped_clique(2), {(1, 1): 1.0, (2, 2): 1.0})
    with pytest.raises(MatrixFormatError):
        PartialSymmetricMatrix(from_edges(1, [(1, 1)]), {(1, 1): 1.0, (1, 2): 1.0})
    with pytest.raises(MatrixFormatError):
        PartialSymmetricMatrix(from_edges(1, [(1, 1)]), {(1, 1): np.inf})


def test_complete_and_zero_fill():
    m = PartialSymmetricMatrix(from_edges(2, [(1, 1), (2, 2)]), {(1, 1): 1.0, (2, 2): 4.0})
    assert m.unknowns() == ((1, 2),)
    assert_allclose(m.zero_fill(), np.diag([1.0, 4.0]))
    assert_allclose(m.complete([2.0]), [[1.0, 2.0], [2.0, 4.0]])
    with pytest.raises(MatrixFormatError):
        m.complete([1.0, 2.0])


def test_unknowns_include_missing_diagonal():
    m = PartialSymmetricMatrix(from_edges(2, [(1, 2)]), {(1, 2): 3.0})
    assert m.unknowns() == ((1, 1), (2, 2))
    assert_allclose(m.complete([1.0, 9.0]), [[1.0, 3.0], [3.0, 9.0]])


def test_from_blocks():
    m = PartialSymmetricMatrix.from_blocks([np.eye(2), np.array([[5.0]])])
    assert m.pattern == from_edges(3, [(1, 1), (1, 2), (2, 2), (3, 3)])
    assert_allclose(m.zero_fill(), np.diag([1.0, 1.0, 5.0]))


def test_partial_file_round_trip():
    text = '{"n": 2, "entries": [{"i": 1, "j": 1, "v": 1.0}, {"i": 2, "j": 2, "v": -1.0}]}'
    m = parse_partial(text)
    assert m.values == {(1, 1): 1.0, (2, 2): -1.0}
    assert format_partial(parse_partial(format_partial(m))) == format_partial(m)


@pytest.mark.parametrize("text", [
    "[]",
    '{"n": 2}',
    '{"n": 2, "entries": [{"i": 2, "j": 1, "v": 1.0}]}',
    '{"n": 2, "entries": [{"i": 1, "j": 1, "v": 1.0}, {"i": 1, "j": 1, "v": 2.0}]}',
    '{"n": 2, "entries": [{"i": 1, "j": 3, "v": 1.0}]}',
    '{"n": 2, "entries": [{"i": 1, "v": 1.0}]}',
    '{"n": 2, "rows": [[1.0, 2.0], [3.0, 1.0]]}',
    '{"n": 2, "rows": [[1.0, 2.0]]}',
])
def test_partial_file_errors(text):
    with pytest.raises(InputError):
        parse_partial(text)


def test_full_matrix_file_is_fully_specified():
    m = parse_partial('{"n": 2, "rows": [[1.0, 2.0], [2.0, -1.0]]}')
    assert m.pattern == looped_clique(2)
    assert m.values == {(1, 1): 1.0, (1, 2): 2.0, (2, 2): -1.0}
    assert not m.unknowns()
    assert parse_partial(format_matrix(m.zero_fill())).values == m.values


## Eigenvalue sign disagreement ##

@pytest.mark.parametrize("ia, ib, expected", [
    (Inertia(2, 0, 0), Inertia(0, 2, 0), 2),
    (Inertia(1, 1, 0), Inertia(1, 1, 0), 0),
    (Inertia(3, 1, 0), Inertia(1, 2, 0), 1),
])
def test_esd(ia, ib, expected):
    assert esd(ia, ib) == expected


def test_esd_is_symmetric():
    inertias = [Inertia(p, q, 0) for p, q in product(range(9), repeat=2) if p + q <= 8]
    for ia, ib in product(inertias, repeat=2):
        assert esd(ia, ib) == esd(ib, ia)


def test_esd_needs_full_rank():
    with pytest.raises(SingularBlockError):
        esd(Inertia(1, 0, 1), Inertia(1, 0, 0))


## Two cliques ##

@pytest.mark.parametrize("a, b, expected", [
    (np.eye(2), -np.eye(2), 4),
    (np.array([[1.0]]), np.array([[4.0]]), 1),
    (np.diag([1.0, -1.0]), np.diag([1.0, -1.0]), 2),
])
def test_clique_pair_min_rank(a, b, expected):
    assert clique_pair_min_rank(a, b) == expected


def test_clique_pair_min_rank_needs_invertible_blocks():
    with pytest.raises(SingularBlockError):
        clique_pair_min_rank(np.diag([1.0, 0.0]), np.eye(1))


def test_clique_pair_complete_rank_one():
    result = clique_pair_complete(np.array([[1.0]]), np.array([[4.0]]))
    assert abs(result.x[0, 0]) == pytest.approx(2.0)
    assert result.rank == 1
    assert numeric_rank(assemble_blocks([[1.0]], result.x, [[4.0]])) == 1


def test_clique_pair_complete_definite_blocks():
    result = clique_pair_complete(np.eye(2), -np.eye(2))
    assert result.matches == 0
    assert result.rank == 4


def test_clique_pair_complete_mixed_signs():
    result = clique_pair_complete(np.diag([2.0, -3.0]), np.array([[8.0]]))
    assert_allclose(np.abs(result.x.ravel()), [4.0, 0.0], atol=1e-12)
    assert result.rank == 2


def test_clique_pair_complete_reaches_the_esd_rank():
    rng = np.random.default_rng(10)
    for _ in range(200):
        m, n = int(rng.integers(1, 5)), int(rng.integers(1, 5))
        a = random_symmetric(rng, m, int(rng.integers(0, m + 1)))
        b = random_symmetric(rng, n, int(rng.integers(0, n + 1)))
        result = clique_pair_complete(a, b)
        assert result.rank == clique_pair_min_rank(a, b)
        assert numeric_rank(assemble_blocks(a, result.x, b)) == result.rank


def test_definite_blocks_only_complete_to_full_rank():
    rng = np.random.default_rng(11)
    for _ in range(100):
        m, n = int(rng.integers(1, 5)), int(rng.integers(1, 5))
        a, b = definite_block_pair(m, n, rng)
        assert inertia(a) == Inertia(m, 0, 0)
        assert inertia(b) == Inertia(0, n, 0)
        x = 10 * rng.standard_normal((m, n))
        assert numeric_rank(assemble_blocks(a, x, b)) == m + n


## Many cliques ##

def assert_blocks_kept(full, blocks):
    offset = 0
    for b in blocks:
        size = b.shape[0]
        assert_allclose(full[offset:offset + size, offset:offset + size], b)
        offset += size
    assert_allclose(full, full.T)


def test_three_singletons_complete_to_rank_two():
    blocks = [np.array([[1.0]]), np.array([[-1.0]]), np.array([[1.0]])]
    result = multi_clique_complete(blocks)
    assert result.rank == 2
    assert_blocks_kept(result.matrix, blocks)


def test_definite_pair_with_extra_block():
    blocks = [np.eye(2), -np.eye(2), np.array([[5.0]])]
    result = multi_clique_complete(blocks)
    assert result.anchors == (0, 1)
    assert result.rank == 4
    assert_blocks_kept(result.matrix, blocks)


def test_anchor_pair_search_when_first_choice_cannot_match():
    rng = np.random.default_rng(12)
    blocks = [random_symmetric(rng, 4, 2), random_symmetric(rng, 4, 0), random_symmetric(rng, 4, 4)]
    result = multi_clique_complete(blocks)
    assert result.anchors == (1, 2)
    assert result.rank <= 8
    assert_blocks_kept(result.matrix, blocks)


def test_multi_clique_rank_bound_on_random_blocks():
    rng = np.random.default_rng(13)
    for _ in range(100):
        k = int(rng.integers(2, 5))
        sizes = sorted((int(rng.integers(1, 4)) for _ in range(k)), reverse=True)
        blocks = [random_symmetric(rng, s, int(rng.integers(0, s + 1))) for s in sizes]
        result = multi_clique_complete(blocks)
        assert result.rank <= sizes[0] + sizes[1]
        assert numeric_rank(result.matrix) == result.rank
        assert_blocks_kept(result.matrix, blocks)


def test_multi_clique_needs_two_invertible_blocks():
    with pytest.raises(PatternError):
        multi_clique_complete([np.eye(2)])
    with pytest.raises(SingularBlockError):
        multi_clique_complete([np.eye(2), np.zeros((1, 1))])


def test_complete_cliques_in_original_labels():
    # Cliques {1, 3} and {2}
    g = from_edges(3, [(1, 1), (3, 3), (1, 3), (2, 2)])
    m = PartialSymmetricMatrix(g, {(1, 1): 1.0, (3, 3): -1.0, (1, 3): 0.0, (2, 2): 4.0})
    full, rank, method = complete_cliques(m)
    assert method == "clique-pair"
    assert rank == 2
    assert full[1, 1] == 4.0 and full[0, 2] == 0.0 and full[2, 2] == -1.0
    _, rank, method = complete_cliques(m, maximal=True)
    assert method == "multi-clique"
    assert rank == 3


## One missing entry ##

def one_missing(rows):
    a = np.array(rows, dtype=float)
    n = a.shape[0]
    pattern = complement(from_edges(n, [(1, n)]))
    return PartialSymmetricMatrix.from_matrix(pattern, a)


def test_one_missing_entry_indefinite_pair():
    result = one_missing_entry_solve(one_missing([[1, 0], [0, -1]]))
    assert not result.deficient_completable
    assert result.roots == ()
    assert result.determinant_product == pytest.approx(-1.0)


def test_one_missing_entry_square_root():
    result = one_missing_entry_solve(one_missing([[1, 0], [0, 4]]))
    assert result.deficient_completable
    assert_allclose(result.roots, [-2.0, 2.0])


def test_one_missing_entry_three_by_three():
    result = one_missing_entry_solve(one_missing([[2, 1, 0], [1, 1, 1], [0, 1, 2]]))
    assert result.deficient_completable
    assert_allclose(result.roots, [0.0, 2.0], atol=1e-12)
    assert_allclose(result.coefficients, [-1.0, 2.0, 0.0], atol=1e-12)
    assert result.discriminant == pytest.approx(1.0)
    assert result.determinant_product == pytest.approx(1.0)


def test_one_missing_entry_relabels_the_unknown():
    a = np.array([[2.0, 0.0, 1.0], [0.0, 2.0, 1.0], [1.0, 1.0, 1.0]])
    m = PartialSymmetricMatrix.from_matrix(complement(from_edges(3, [(1, 2)])), a)
    result = one_missing_entry_solve(m)
    assert result.unknown == (1, 2)
    assert result.permutation == (1, 3, 2)
    for root in result.roots:
        assert numeric_rank(m.complete([root])) == 2


def test_one_missing_entry_discriminant_identity():
    rng = np.random.default_rng(14)
    checked = 0
    for _ in range(500):
        n = int(rng.integers(2, 7))
        g = rng.standard_normal((n, n))
        m = one_missing(g + g.T)
        result = one_missing_entry_solve(m)
        quadratic, linear, constant = result.coefficients
        scale = max(1.0, (linear / 2) ** 2, abs(quadratic * constant), abs(result.determinant_product))
        assert abs(result.discriminant - result.determinant_product) <= 1e-8 * scale
        # Real roots exactly when the corner cofactors agree in sign
        if abs(result.determinant_product) > 1e-6 * scale:
            assert result.deficient_completable == (result.determinant_product > 0)
            if abs(quadratic) > 0.1:
                for root in result.roots:
                    assert numeric_rank(m.complete([root]), Tolerance(rank_tol=1e-6)) < n
            checked += 1
    assert checked > 400


def test_one_missing_entry_needs_one_off_diagonal_unknown():
    with pytest.raises(PatternError):
        one_missing_entry_solve(PartialSymmetricMatrix.from_matrix(looped_clique(2), np.eye(2)))
    with pytest.raises(PatternError):
        one_missing_entry_solve(PartialSymmetricMatrix.from_matrix(from_edges(2, [(1, 1), (1, 2)]), np.eye(2)))


## Minor poset ##

def cover_map(poset):
    return {"".join(map(str, sorted(s))): tuple("".join(map(str, sorted(c))) for c in children)
            for s, children in poset.covers.items()}


def test_minor_poset_star_complement():
    g = complement(from_edges(4, [(1, 2), (1, 3), (1, 4)]))
    poset = build_minor_poset(g)
    assert len(poset.elements) == 7
    assert cover_map(poset) == {"1234": ("234", "134"), "134": ("34", "14"), "14": ("4", "1")}
    assert sorted("".join(map(str, sorted(s))) for s in poset.minimal) == ["1", "234", "34", "4"]


def test_minor_poset_complete_bipartite_complement():
    g = complement(from_edges(6, [(i, j) for i in (1, 2, 3) for j in (4, 5, 6)]))
    poset = build_minor_poset(g)
    assert sorted("".join(map(str, sorted(s))) for s in poset.elements) == sorted(
        ["123456", "12356", "23456", "1236", "2356", "3456", "123", "236", "356", "456",
         "23", "36", "56", "3", "6"])
    assert cover_map(poset) == {
        "123456": ("23456", "12356"), "12356": ("2356", "1236"), "1236": ("236", "123"),
        "23456": ("3456", "2356"), "2356": ("356", "236"), "236": ("36", "23"),
        "3456": ("456", "356"), "356": ("56", "36"), "36": ("6", "3")}


def test_minor_poset_perfect_matching_complement():
    g = complement(from_edges(6, [(1, 6), (2, 5), (3, 4)]))
    poset = build_minor_poset(g)
    assert sorted("".join(map(str, sorted(s))) for s in poset.elements) == sorted(
        ["123456", "12345", "23456", "1234", "1345", "2346", "3456",
         "123", "124", "135", "145", "236", "246", "356", "456"])
    assert cover_map(poset) == {
        "123456": ("23456", "12345"), "12345": ("1345", "1234"), "23456": ("3456", "2346"),
        "1234": ("124", "123"), "1345": ("145", "135"), "2346": ("246", "236"), "3456": ("456", "356")}
    assert len(poset.minimal) == 8


def test_minor_poset_single_non_edge():
    poset = build_minor_poset(from_edges(2, [(1, 1), (2, 2)]))
    assert cover_map(poset) == {"12": ("2", "1")}


def test_minor_poset_structure():
    for g in [looped_cycle(4), complement(from_edges(5, [(1, 2), (2, 3), (3, 4), (4, 5)])),
              complement(from_edges(6, [(1, 4), (1, 5), (2, 6)]))]:
        poset = build_minor_poset(g)
        assert frozenset(g.vertices) in poset.elements
        for s, children in poset.covers.items():
            assert len(children) == 2 and all(c in poset.elements for c in children)
        for s in poset.minimal:
            assert all(g.has_edge(u, v) for u in s for v in s)


def test_minor_poset_needs_bipartite_complement():
    with pytest.raises(NotFullRankTypicalError):
        build_minor_poset(complement(cycle(3)))


def test_minor_poset_ordering_must_cover_non_edges():
    with pytest.raises(PatternError):
        build_minor_poset(looped_cycle(4), ordering=[(1, 3)])
    poset = build_minor_poset(looped_cycle(4), ordering=[(4, 2), (1, 3)])
    assert poset.ordering == ((2, 4), (1, 3))


## Certificates ##

def test_certify_indefinite_singletons():
    certificate = certify_full_rank(two_singletons(1.0, -1.0))
    assert certificate.verdict == FULL_RANK
    assert certificate.fixed_inertia == Inertia(1, 1, 0)
    assert all(c.opposite for c in certificate.cover_signs)


def test_certify_definite_singletons():
    certificate = certify_full_rank(two_singletons(1.0, 1.0))
    assert certificate.verdict == DEFICIENT
    assert certificate.witness_element == (1, 2)
    assert certificate.fixed_inertia is None


def test_certify_looped_four_cycles():
    full = certify_full_rank(FULL_RANK_C4)
    assert full.full_rank
    assert full.fixed_inertia == Inertia(2, 2, 0)
    assert not certify_full_rank(DEFICIENT_C4).full_rank


def test_certify_singular_fixed_minor_is_not_generic():
    with pytest.raises(NonGenericInputError):
        certify_full_rank(two_singletons(0.0, 1.0))


def test_certify_given_values_on_singular_minor():
    # det of the {2, 3, 4} minor vanishes at x_24 = 1
    with pytest.raises(NonGenericInputError):
        certify_full_rank(DEFICIENT_C4, x0=[0.0, 1.0])
    certificate = certify_full_rank(DEFICIENT_C4, x0=[0.0, 0.0])
    assert certificate.attempts == 1
    assert certificate.x0 == (0.0, 0.0)


def test_certificate_sign_table_matches_minors():
    certificate = certify_full_rank(FULL_RANK_C4)
    full = FULL_RANK_C4.complete(certificate.x0)
    for cover in certificate.cover_signs:
        assert cover.signs == tuple(det_sign(principal_submatrix(full, c)) for c in cover.children)


def test_fixed_inertia_is_shared_by_all_completions():
    rng = np.random.default_rng(15)
    for m in [FULL_RANK_C4, two_singletons(2.0, -0.5)]:
        certificate = certify_full_rank(m, rng=rng)
        assert certificate.full_rank
        for _ in range(50):
            x = 5 * rng.standard_normal(len(m.unknowns()))
            assert inertia(m.complete(x)) == certificate.fixed_inertia


def test_verdict_does_not_depend_on_ordering():
    rng = np.random.default_rng(16)
    for m in [FULL_RANK_C4, DEFICIENT_C4]:
        expected = certify_full_rank(m).verdict
        non_edges = list(complement(m.pattern).non_loop_edges)
        for _ in range(5):
            ordering = [non_edges[k] for k in rng.permutation(len(non_edges))]
            assert certify_full_rank(m, ordering=ordering, rng=rng).verdict == expected


@pytest.mark.parametrize("g", CERTIFIED_PATTERNS)
def test_verdict_does_not_depend_on_ordering_on_random_instances(g):
    rng = np.random.default_rng(17)
    non_edges = list(complement(g).non_loop_edges)
    for _ in range(20):
        m = PartialSymmetricMatrix.random(g, rng)
        expected = certify_full_rank(m, rng=rng).verdict
        for _ in range(5):
            ordering = [non_edges[k] for k in rng.permutation(len(non_edges))]
            assert certify_full_rank(m, ordering=ordering, rng=rng).verdict == expected


@pytest.mark.slow
def test_inertia_is_rigid_on_certified_instances():
    rng = np.random.default_rng(18)
    certified, attempt = 0, 0
    while certified < 50:
        g = CERTIFIED_PATTERNS[attempt % len(CERTIFIED_PATTERNS)]
        attempt += 1
        m = PartialSymmetricMatrix.random(g, rng)
        certificate = certify_full_rank(m, rng=rng)
        if not certificate.full_rank:
            continue
        certified += 1
        for _ in range(50):
            x = 3 * rng.standard_normal(len(m.unknowns()))
            assert inertia(m.complete(x)) == certificate.fixed_inertia


def test_certificate_serialises_cover_table():
    payload = certify_full_rank(two_singletons(1.0, -1.0)).to_dict()
    assert payload["verdict"] == FULL_RANK
    assert payload["cover_signs"] == [{"element": [1, 2], "children": [[2], [1]], "signs": [-1, 1],
                                       "opposite": True}]
    assert payload["fixed_inertia"] == {"positives": 1, "negatives": 1, "kernel": 0}


## Partial esd ##

def test_esd_partial_singletons():
    plus = PartialSymmetricMatrix(looped_clique(1), {(1, 1): 1.0})
    minus = PartialSymmetricMatrix(looped_clique(1), {(1, 1): -1.0})
    assert esd_partial(plus, minus) == 1
    assert disjoint_union_min_rank(plus, minus) == 2
    assert esd_partial(plus, plus) == 0


def test_esd_partial_looped_four_cycles():
    assert esd_partial(FULL_RANK_C4, FULL_RANK_C4) == 0
    assert disjoint_union_min_rank(FULL_RANK_C4, FULL_RANK_C4) == 4


def test_esd_partial_needs_certified_operands():
    with pytest.raises(NotCertifiedError):
        esd_partial(DEFICIENT_C4, FULL_RANK_C4)


def test_disjoint_union_rank_report():
    plus = PartialSymmetricMatrix.from_matrix(looped_clique(2), np.diag([1.0, 2.0]))
    minus = PartialSymmetricMatrix(looped_clique(1), {(1, 1): -1.0})
    report = disjoint_union_rank(plus, minus)
    assert report.inertias == (Inertia(2, 0, 0), Inertia(0, 1, 0))
    assert report.esd == 1
    assert report.min_rank == 3
    assert report.to_dict()["inertias"][1] == Inertia(0, 1, 0)
    with pytest.raises(NotCertifiedError, match="Operand 2"):
        disjoint_union_rank(FULL_RANK_C4, DEFICIENT_C4)
