"""
Constructive and certifying completion procedures:
eigenvalue sign disagreement, minimum-rank completions of looped-clique unions,
the one-missing-entry solver and the minor-poset full-rank certificate.
"""
import json
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np
from scipy import linalg

from completion.errors import (InternalConsistencyError, MatrixFormatError, NonGenericInputError,
                               NotCertifiedError, NotFullRankTypicalError, PatternError, SingularBlockError)
from completion.graph_core import (SemisimpleGraph, complement, disjoint_union, is_bipartite,
                                   looped_clique, from_edges)
from completion.report import Report, dumps
from completion.symmetric_linalg import (DEFAULT_TOLERANCE, Inertia, Tolerance, as_symmetric, assemble_blocks,
                                         det, det_sign, inertia, is_near_tolerance, minor_det, numeric_rank,
                                         orthogonal_diagonalize, parse_matrix, principal_submatrix)
from consts import DEFICIENT, FULL_RANK
from logger import prepare_logger
from settings import RESAMPLE_ATTEMPTS, SEED

logger = prepare_logger()

Edge = Tuple[int, int]


@dataclass(frozen=True)
class PartialSymmetricMatrix:
    """
    Values on the specified entries of a symmetric matrix.
    :param pattern: Graph whose edges are the specified entries (loops are diagonal entries).
    :param values: Map from each pattern edge (i, j), i <= j, to its value.
    """
    pattern: SemisimpleGraph
    values: Dict[Edge, float] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        values = {}
        for (i, j), v in dict(self.values).items():
            key = (min(i, j), max(i, j))
            if key in values:
                raise MatrixFormatError(f"Entry {{{i},{j}}} is given twice")
            if not np.isfinite(v):
                raise MatrixFormatError(f"Entry {{{i},{j}}} is not finite")
            values[key] = float(v)
        if set(values) != set(self.pattern.edges):
            raise MatrixFormatError("Every pattern edge needs exactly one value and non-edges none")
        object.__setattr__(self, "values", values)

    @property
    def n(self) -> int:
        return self.pattern.n

    def unknowns(self) -> Tuple[Edge, ...]:
        """Unspecified entries, in lexicographic order; x in complete(x) follows this order."""
        return tuple(sorted(complement(self.pattern).edges))

    def complete(self, x: Sequence[float]) -> np.ndarray:
        unknowns = self.unknowns()
        x = np.asarray(x, dtype=float).ravel()
        if x.size != len(unknowns):
            raise MatrixFormatError(f"Expected {len(unknowns)} completion values, got {x.size}")
        full = np.zeros((self.n, self.n))
        for (i, j), v in list(self.values.items()) + list(zip(unknowns, x)):
            full[i - 1, j - 1] = full[j - 1, i - 1] = v
        return full

    def zero_fill(self) -> np.ndarray:
        return self.complete(np.zeros(len(self.unknowns())))

    def random_values(self, rng: np.random.Generator) -> np.ndarray:
        """Generic completion values x: i.i.d. standard normal."""
        return rng.standard_normal(len(self.unknowns()))

    @classmethod
    def from_matrix(cls, pattern: SemisimpleGraph, a) -> "PartialSymmetricMatrix":
        a = np.asarray(a, dtype=float)
        return cls(pattern, {(i, j): a[i - 1, j - 1] for i, j in pattern.edges})

    @classmethod
    def random(cls, pattern: SemisimpleGraph, rng: np.random.Generator) -> "PartialSymmetricMatrix":
        """Standard normal values on the pattern edges, drawn in lexicographic edge order."""
        edges = sorted(pattern.edges)
        return cls(pattern, dict(zip(edges, rng.standard_normal(len(edges)))))

    @classmethod
    def from_blocks(cls, blocks: Sequence) -> "PartialSymmetricMatrix":
        """Disjoint union of fully specified blocks, laid out in the given order."""
        blocks = [as_symmetric(b) for b in blocks]
        pattern = SemisimpleGraph(0)
        for b in blocks:
            pattern = disjoint_union(pattern, looped_clique(b.shape[0]))
        return cls.from_matrix(pattern, linalg.block_diag(*blocks) if blocks else np.zeros((0, 0)))


@dataclass(frozen=True)
class CoverSign:
    element: Tuple[int, ...]
    children: Tuple[Tuple[int, ...], Tuple[int, ...]]
    signs: Tuple[int, int]

    @property
    def opposite(self) -> bool:
        return self.signs[0] * self.signs[1] == -1

    def to_dict(self) -> dict:
        return {"element": list(self.element), "children": [list(c) for c in self.children],
                "signs": list(self.signs), "opposite": self.opposite}


@dataclass(frozen=True)
class MinorPoset(Report):
    """
    Family of index sets grown from V by splitting every leaf S that contains
    a non-edge {i, j} into S - {i} and S - {j}, one non-edge at a time.
    """
    n: int
    ordering: Tuple[Edge, ...]
    elements: Tuple[frozenset, ...]
    covers: Dict[frozenset, Tuple[frozenset, frozenset]] = field(compare=False)

    @property
    def minimal(self) -> Tuple[frozenset, ...]:
        return tuple(s for s in self.elements if s not in self.covers)

    def to_dict(self) -> dict:
        return {"ordering": [list(e) for e in self.ordering],
                "elements": [sorted(s) for s in self.elements],
                "covers": [{"element": sorted(s), "children": [sorted(c) for c in self.covers[s]]}
                           for s in self.elements if s in self.covers]}


def _element_key(s: frozenset):
    return -len(s), sorted(s)


def build_minor_poset(g: SemisimpleGraph, ordering: Optional[Sequence[Edge]] = None) -> MinorPoset:
    missing = complement(g)
    if not is_bipartite(missing).is_bipartite:
        raise NotFullRankTypicalError("Complement of the pattern is not bipartite")
    non_edges = sorted(missing.non_loop_edges)
    if ordering is None:
        ordering = non_edges
    else:
        ordering = [(min(i, j), max(i, j)) for i, j in ordering]
        if sorted(ordering) != non_edges:
            raise PatternError("Ordering must list every non-edge of the pattern exactly once")

    top = frozenset(g.vertices)
    family, leaves, covers = {top}, {top}, {}
    for i, j in ordering:
        for s in sorted(leaves, key=_element_key):
            if i in s and j in s:
                children = (s - {i}, s - {j})
                covers[s] = children
                leaves.discard(s)
                for child in children:
                    if child not in family:
                        family.add(child)
                        leaves.add(child)
    return MinorPoset(g.n, tuple(ordering), tuple(sorted(family, key=_element_key)), covers)


@dataclass(frozen=True)
class CompletionCertificate(Report):
    verdict: str
    ordering: Tuple[Edge, ...]
    cover_signs: Tuple[CoverSign, ...]
    x0: Tuple[float, ...]
    attempts: int
    near_tolerance: bool
    fixed_inertia: Optional[Inertia] = None
    witness_element: Optional[Tuple[int, ...]] = None

    @property
    def full_rank(self) -> bool:
        return self.verdict == FULL_RANK

    def to_dict(self) -> dict:
        return {"verdict": self.verdict,
                "ordering": [list(e) for e in self.ordering],
                "cover_signs": [c.to_dict() for c in self.cover_signs],
                "x0": list(self.x0),
                "attempts": self.attempts,
                "near_tolerance": self.near_tolerance,
                "fixed_inertia": self.fixed_inertia.to_dict() if self.fixed_inertia else None,
                "witness_element": list(self.witness_element) if self.witness_element else None}


def certify_full_rank(m: PartialSymmetricMatrix, x0: Optional[Sequence[float]] = None,
                      tol: Tolerance = DEFAULT_TOLERANCE, ordering: Optional[Sequence[Edge]] = None,
                      rng: Optional[np.random.Generator] = None) -> CompletionCertificate:
    """
    Decides whether every completion of m is invertible by comparing determinant signs
    of M(x0) across each cover pair of the minor poset.
    Without x0, generic values are drawn from rng and redrawn when a non-minimal
    minor vanishes. A vanishing minimal minor is fixed by m itself and is reported.
    """
    poset = build_minor_poset(m.pattern, ordering)
    given = x0 is not None
    rng = rng if rng is not None else np.random.default_rng(SEED)
    minimal = set(poset.minimal)

    for attempt in range(1, (1 if given else RESAMPLE_ATTEMPTS) + 1):
        x = np.asarray(x0, dtype=float) if given else m.random_values(rng)
        full = m.complete(x)
        minors = {s: principal_submatrix(full, s) for s in poset.elements}
        signs = {s: det_sign(minors[s], tol) for s in poset.elements}

        degenerate = sorted((s for s in minimal if signs[s] == 0), key=_element_key)
        if degenerate:
            raise NonGenericInputError(
                f"Fully specified minor on {sorted(degenerate[0])} is singular; the partial matrix is not generic")
        if all(signs[c] for s in poset.covers for c in poset.covers[s]):
            break
        if given:
            raise NonGenericInputError("Given completion values make a tested minor singular")
        logger.warning(f"Completion values hit a singular minor, resampling (attempt {attempt})")
    else:
        raise NonGenericInputError(f"No generic completion values found in {RESAMPLE_ATTEMPTS} attempts")

    table = tuple(CoverSign(tuple(sorted(s)), tuple(tuple(sorted(c)) for c in poset.covers[s]),
                            tuple(signs[c] for c in poset.covers[s]))
                  for s in poset.elements if s in poset.covers)
    near = any(is_near_tolerance(minors[s], tol) for s in poset.elements if minors[s].size)
    agreeing = [c for c in table if not c.opposite]
    # With no covers the only element is V, already checked non-singular
    if agreeing:
        certificate = CompletionCertificate(DEFICIENT, poset.ordering, table, tuple(x), attempt, near,
                                            witness_element=agreeing[0].element)
    else:
        certificate = CompletionCertificate(FULL_RANK, poset.ordering, table, tuple(x), attempt, near,
                                            fixed_inertia=inertia(full, tol))
    logger.info(f"Certificate verdict: {certificate.verdict} ({len(table)} cover pairs)")
    return certificate


## Eigenvalue sign disagreement ##

def esd(ia: Inertia, ib: Inertia) -> int:
    if ia.kernel or ib.kernel:
        raise SingularBlockError("Eigenvalue sign disagreement needs full-rank blocks")
    dp, dn = ia.positives - ib.positives, ia.negatives - ib.negatives
    if dp * dn >= 0:
        return 0
    return min(abs(dp), abs(dn))


def _full_rank_inertia(a, tol: Tolerance) -> Inertia:
    result = inertia(a, tol)
    if result.kernel:
        raise SingularBlockError(f"Block with inertia {result.as_tuple()} is singular at the configured tolerance")
    return result


def clique_pair_min_rank(a, b, tol: Tolerance = DEFAULT_TOLERANCE) -> int:
    ia, ib = _full_rank_inertia(a, tol), _full_rank_inertia(b, tol)
    return max(ia.n, ib.n) + esd(ia, ib)


@dataclass(frozen=True)
class PairCompletion:
    x: np.ndarray
    rank: int
    matches: int

    @property
    def shape(self):
        return self.x.shape


def clique_pair_complete(a, b, tol: Tolerance = DEFAULT_TOLERANCE) -> PairCompletion:
    """
    Fills the off-diagonal block X of [[A, X], [X^T, B]] so that the rank is max(m, n) + esd.
    In the eigenbases of A and B, each positive eigenvalue of A is paired with a positive one
    of B (then negatives with negatives) and X holds sqrt(alpha beta) on the pairs,
    which zeroes those directions of the Schur complement.
    """
    a, b = as_symmetric(a), as_symmetric(b)
    expected = clique_pair_min_rank(a, b, tol)
    c, alpha = orthogonal_diagonalize(a)
    d, beta = orthogonal_diagonalize(b)

    pairs = list(zip(np.flatnonzero(alpha > 0), np.flatnonzero(beta > 0))) + \
        list(zip(np.flatnonzero(alpha < 0), np.flatnonzero(beta < 0)))
    y = np.zeros((a.shape[0], b.shape[0]))
    for i, j in pairs:
        y[i, j] = np.sqrt(alpha[i] * beta[j])
    x = c @ y @ d.T

    achieved = numeric_rank(assemble_blocks(a, x, b), tol)
    if achieved != expected:
        raise InternalConsistencyError(f"Constructed completion has rank {achieved}, expected {expected}")
    return PairCompletion(x, achieved, len(pairs))


@dataclass(frozen=True)
class MultiCliqueCompletion:
    matrix: np.ndarray
    rank: int
    anchors: Tuple[int, int]  # 0-based block indices


def _sign_matchable(inertias: List[Inertia], anchors: Tuple[int, int]) -> bool:
    i, j = anchors
    positives = inertias[i].positives + inertias[j].positives
    negatives = inertias[i].negatives + inertias[j].negatives
    return all(r.positives <= positives and r.negatives <= negatives
               for k, r in enumerate(inertias) if k not in anchors)


def _anchor_pair(inertias: List[Inertia]) -> Tuple[int, int]:
    """
    Block 1 (largest) with the block of largest esd against it, lowest index on ties.
    Falls back to other pairs of the same total size, then to the pair holding the most
    positives and the most negatives, which always sign-matches the rest.
    """
    k = len(inertias)
    sizes = [r.n for r in inertias]
    by_size = sorted(range(k), key=lambda i: (-sizes[i], i))
    first = by_size[0]
    rival = max((i for i in range(k) if i != first), key=lambda i: (esd(inertias[first], inertias[i]), -i))
    target = sizes[first] + sizes[by_size[1]]

    candidates = [tuple(sorted((first, rival)))]
    candidates += [(i, j) for i in range(k) for j in range(i + 1, k) if sizes[i] + sizes[j] == target]
    most_pos = max(range(k), key=lambda i: (inertias[i].positives, -i))
    most_neg = max((i for i in range(k) if i != most_pos), key=lambda i: (inertias[i].negatives, -i))
    candidates.append(tuple(sorted((most_pos, most_neg))))
    for pair in candidates:
        if _sign_matchable(inertias, pair):
            return pair
    raise InternalConsistencyError("No sign-matchable anchor pair found")


def multi_clique_complete(blocks: Sequence, tol: Tolerance = DEFAULT_TOLERANCE) -> MultiCliqueCompletion:
    """
    Completes the disjoint union of fully specified blocks M_1..M_k to rank at most n_1 + n_2.
    Two anchor blocks stay uncoupled; every other block is written, in the eigenbasis,
    as Y_k^T A^-1 Y_k over the anchor part A, and the unknown blocks between non-anchor
    blocks are filled with Y_k^T A^-1 Y_l, so the Schur complement over A vanishes.
    """
    blocks = [as_symmetric(b) for b in blocks]
    if len(blocks) < 2:
        raise PatternError("Multi-clique completion needs at least two blocks")
    inertias = [_full_rank_inertia(b, tol) for b in blocks]
    sizes = [b.shape[0] for b in blocks]
    anchors = _anchor_pair(inertias)

    bases = [orthogonal_diagonalize(b) for b in blocks]
    anchor_values = np.concatenate([bases[i][1] for i in anchors])
    y = {}
    for k in range(len(blocks)):
        if k in anchors:
            continue
        values = bases[k][1]
        free_pos = list(np.flatnonzero(anchor_values > 0))
        free_neg = list(np.flatnonzero(anchor_values < 0))
        y[k] = np.zeros((anchor_values.size, sizes[k]))
        for col, v in enumerate(values):
            row = (free_pos if v > 0 else free_neg).pop(0)
            y[k][row, col] = np.sqrt(v * anchor_values[row])

    # Assemble in the eigenbasis, then rotate back block by block
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    spans = [slice(offsets[k], offsets[k + 1]) for k in range(len(blocks))]
    anchor_span = np.concatenate([np.arange(offsets[i], offsets[i + 1]) for i in anchors])
    diagonal = np.zeros((offsets[-1], offsets[-1]))
    diagonal[np.ix_(anchor_span, anchor_span)] = np.diag(anchor_values)
    inverse = np.diag(1 / anchor_values)
    for k, yk in y.items():
        diagonal[anchor_span, spans[k]] = yk
        diagonal[spans[k], anchor_span] = yk.T
        for l, yl in y.items():
            diagonal[spans[k], spans[l]] = yk.T @ inverse @ yl

    rotation = linalg.block_diag(*(basis for basis, _ in bases))
    full = rotation @ diagonal @ rotation.T
    for k, b in enumerate(blocks):
        full[spans[k], spans[k]] = b
    full = (full + full.T) / 2

    achieved = numeric_rank(full, tol)
    bound = sizes[anchors[0]] + sizes[anchors[1]]
    if achieved > bound:
        raise InternalConsistencyError(f"Multi-clique completion has rank {achieved}, above {bound}")
    logger.debug(f"Multi-clique completion anchored on blocks {anchors} has rank {achieved}")
    return MultiCliqueCompletion(full, achieved, anchors)


def definite_block_pair(m: int, n: int, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
    """A positive-definite m x m block and a negative-definite n x n block."""
    g, h = rng.standard_normal((m, m)), rng.standard_normal((n, n))
    return g @ g.T + np.eye(m), -(h @ h.T + np.eye(n))


## One missing entry ##

@dataclass(frozen=True)
class OneMissingEntryResult(Report):
    unknown: Edge
    permutation: Tuple[int, ...]
    coefficients: Tuple[float, float, float]  # det(M(t)) = c2 t^2 + c1 t + c0
    discriminant: float
    determinant_product: float
    deficient_completable: bool
    roots: Tuple[float, ...]

    def to_dict(self) -> dict:
        return {"unknown": list(self.unknown), "permutation": list(self.permutation),
                "coefficients": list(self.coefficients), "discriminant": self.discriminant,
                "determinant_product": self.determinant_product,
                "deficient_completable": self.deficient_completable, "roots": list(self.roots)}


def one_missing_entry_solve(m: PartialSymmetricMatrix, tol: Tolerance = DEFAULT_TOLERANCE) -> OneMissingEntryResult:
    """
    Finds the values t of the single unknown entry with det(M(t)) = 0.
    After moving the unknown to (1, n), det(M(t)) = -d t^2 + 2 s c t + f with
    d = det(M_1n,1n), c = det(M(0) without row 1 and column n), f = det(M(0)), s = (-1)^(n+1),
    and the reduced discriminant c^2 + d f equals det(M_1,1) det(M_n,n).
    """
    unknowns = m.unknowns()
    if len(unknowns) != 1 or unknowns[0][0] == unknowns[0][1]:
        raise PatternError("Pattern must be a looped clique minus exactly one non-loop edge")
    i, j = unknowns[0]
    n = m.n
    order = (i,) + tuple(v for v in m.pattern.vertices if v not in (i, j)) + (j,)
    index = np.array(order) - 1
    a = m.zero_fill()[np.ix_(index, index)]

    d = minor_det(a, [1, n], [1, n])
    c = minor_det(a, [1], [n])
    f = det(a)
    s = 1 if (n + 1) % 2 == 0 else -1
    discriminant = c * c + d * f
    product = minor_det(a, [1], [1]) * minor_det(a, [n], [n])
    scale = max(1.0, c * c, abs(d * f), abs(product))
    if abs(discriminant - product) > 1e-8 * scale:
        raise InternalConsistencyError(
            f"Discriminant {discriminant} disagrees with det(M_1,1) det(M_n,n) = {product}")

    if det_sign(principal_submatrix(a, range(2, n)), tol) != 0:
        if discriminant < -tol.rank_tol * scale:
            roots = ()
        elif discriminant <= tol.rank_tol * scale:
            roots = (s * c / d,)
        else:
            root = np.sqrt(discriminant)
            roots = tuple(sorted(((s * c - root) / d, (s * c + root) / d)))
    elif abs(c) > tol.rank_tol * max(1.0, abs(f)):
        # The quadratic term vanishes
        roots = (-f / (2 * s * c),)
    elif det_sign(a, tol) == 0:
        # Every value of t gives a singular matrix
        roots = (0.0,)
    else:
        roots = ()

    return OneMissingEntryResult((i, j), order, (-d, 2 * s * c, f), discriminant, product, bool(roots),
                                 tuple(float(r) for r in roots))


## Partial matrices with certified full rank ##

def _certified_inertia(m: PartialSymmetricMatrix, tol: Tolerance, rng, operand: int) -> Inertia:
    certificate = certify_full_rank(m, tol=tol, rng=rng)
    if not certificate.full_rank:
        raise NotCertifiedError(f"Operand {operand} can be completed below full rank")
    return certificate.fixed_inertia


@dataclass(frozen=True)
class DisjointUnionRank(Report):
    """Minimum rank over completions of the disjoint union of two full-rank-only partial matrices."""
    inertias: Tuple[Inertia, Inertia]
    esd: int

    @property
    def min_rank(self) -> int:
        return max(i.n for i in self.inertias) + self.esd

    def to_dict(self) -> dict:
        return {"esd": self.esd, "inertias": list(self.inertias), "min_rank": self.min_rank}


def disjoint_union_rank(m1: PartialSymmetricMatrix, m2: PartialSymmetricMatrix,
                        tol: Tolerance = DEFAULT_TOLERANCE,
                        rng: Optional[np.random.Generator] = None) -> DisjointUnionRank:
    inertias = (_certified_inertia(m1, tol, rng, 1), _certified_inertia(m2, tol, rng, 2))
    return DisjointUnionRank(inertias, esd(*inertias))


def esd_partial(m1: PartialSymmetricMatrix, m2: PartialSymmetricMatrix, tol: Tolerance = DEFAULT_TOLERANCE,
                rng: Optional[np.random.Generator] = None) -> int:
    """esd of the fixed inertias of two partial matrices whose completions are all invertible."""
    return disjoint_union_rank(m1, m2, tol, rng).esd


def disjoint_union_min_rank(m1: PartialSymmetricMatrix, m2: PartialSymmetricMatrix,
                            tol: Tolerance = DEFAULT_TOLERANCE, rng: Optional[np.random.Generator] = None) -> int:
    return disjoint_union_rank(m1, m2, tol, rng).min_rank


## Looped-clique patterns ##

def clique_blocks(m: PartialSymmetricMatrix) -> List[Tuple[Tuple[int, ...], np.ndarray]]:
    """
    Splits a pattern made of disjoint looped cliques into (vertices, block) pairs,
    ordered by the smallest vertex of each clique.
    """
    full = m.zero_fill()
    blocks = []
    components = sorted((sorted(c) for c in nx.connected_components(m.pattern.to_networkx())), key=lambda c: c[0])
    for component in components:
        vertices = tuple(component)
        if any(not m.pattern.has_edge(u, v) for u in vertices for v in vertices):
            raise PatternError("Pattern is not a disjoint union of looped cliques")
        blocks.append((vertices, principal_submatrix(full, vertices)))
    return blocks


def complete_cliques(m: PartialSymmetricMatrix, maximal: bool = False,
                     tol: Tolerance = DEFAULT_TOLERANCE) -> Tuple[np.ndarray, int, str]:
    """
    Completes a looped-clique union in the original vertex labels.
    Two cliques use the minimal pair construction; `maximal` or three and more cliques
    use the multi-clique construction.
    """
    parts = clique_blocks(m)
    vertices = [v for part, _ in parts for v in part]
    blocks = [b for _, b in parts]
    if len(blocks) == 1:
        method, layout = "fully-specified", blocks[0]
    elif len(blocks) == 2 and not maximal:
        pair = clique_pair_complete(blocks[0], blocks[1], tol)
        method, layout = "clique-pair", assemble_blocks(blocks[0], pair.x, blocks[1])
    else:
        method, layout = "multi-clique", multi_clique_complete(blocks, tol).matrix
    index = np.array(vertices) - 1
    full = np.zeros((m.n, m.n))
    full[np.ix_(index, index)] = layout
    return full, numeric_rank(full, tol), method


## File format ##

def parse_partial(text: str) -> PartialSymmetricMatrix:
    """
    Reads {"n": int, "entries": [{"i", "j", "v"}, ...]}; the pattern is the set of entries.
    A full matrix file {"n": int, "rows": [...]} is read as fully specified.
    """
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as e:
        raise MatrixFormatError(f"Partial matrix file is not valid JSON: {e}")
    if isinstance(payload, dict) and "rows" in payload and "entries" not in payload:
        a = parse_matrix(text)
        return PartialSymmetricMatrix.from_matrix(looped_clique(a.shape[0]), a)
    if not isinstance(payload, dict) or not isinstance(payload.get("n"), int) \
            or not isinstance(payload.get("entries"), list):
        raise MatrixFormatError("Partial matrix file needs integer 'n' and list 'entries'")
    values = {}
    for entry in payload["entries"]:
        try:
            i, j, v = int(entry["i"]), int(entry["j"]), float(entry["v"])
        except (KeyError, TypeError, ValueError):
            raise MatrixFormatError(f"Malformed entry {entry}")
        if i > j:
            raise MatrixFormatError(f"Entry ({i}, {j}) must have i <= j")
        if (i, j) in values:
            raise MatrixFormatError(f"Entry ({i}, {j}) is given twice")
        values[(i, j)] = v
    pattern = from_edges(payload["n"], values)
    return PartialSymmetricMatrix(pattern, values)


def format_partial(m: PartialSymmetricMatrix) -> str:
    entries = [{"i": i, "j": j, "v": v} for (i, j), v in sorted(m.values.items())]
    return dumps({"n": m.n, "entries": entries})
