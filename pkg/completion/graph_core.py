"""
Semisimple graphs: undirected, loops allowed, no multi-edges.
Vertices are labelled 1..n and a loop {i, i} marks a specified diagonal entry.
"""
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Optional, Tuple

import networkx as nx

from completion.errors import GraphFormatError, PatternError, SizeLimitError
from consts import (ACYCLIC, FAMILY_CLIQUES, FAMILY_CYCLE, FAMILY_FOREST, FAMILY_GCR_ONE,
                    FAMILY_STAR, FAMILY_UNRECOGNIZED, MULTIPLE, UNIQUE_EVEN, UNIQUE_ODD)
from settings import BIPARTITE_LIMIT, MIS_LIMIT

Edge = Tuple[int, int]


@dataclass(frozen=True)
class SemisimpleGraph:
    """
    Pattern of specified entries of an n x n symmetric matrix.
    :param n: Vertex count, vertices are 1..n.
    :param edges: Unordered pairs (i, j), stored with i <= j; (i, i) is a loop.
    """
    n: int
    edges: frozenset = frozenset()

    def __post_init__(self):
        if self.n < 0:
            raise GraphFormatError(f"Vertex count must be non-negative, got {self.n}")
        normalised = set()
        for i, j in self.edges:
            i, j = int(i), int(j)
            if not (1 <= i <= self.n and 1 <= j <= self.n):
                raise GraphFormatError(f"Edge {{{i},{j}}} has an endpoint outside 1..{self.n}")
            normalised.add((min(i, j), max(i, j)))
        object.__setattr__(self, "edges", frozenset(normalised))

    @property
    def vertices(self) -> range:
        return range(1, self.n + 1)

    @property
    def loops(self) -> Tuple[int, ...]:
        return tuple(sorted(i for i, j in self.edges if i == j))

    @property
    def non_loop_edges(self) -> Tuple[Edge, ...]:
        return tuple(sorted(e for e in self.edges if e[0] != e[1]))

    @property
    def is_looped(self) -> bool:
        return len(self.loops) == self.n

    def has_edge(self, i: int, j: int) -> bool:
        return (min(i, j), max(i, j)) in self.edges

    def neighbours(self, v: int) -> frozenset:
        """Vertices adjacent to v, v itself excluded even when looped."""
        return frozenset(j if i == v else i for i, j in self.edges if v in (i, j) and i != j)

    def to_networkx(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(self.vertices)
        graph.add_edges_from(sorted(self.edges))
        return graph


@dataclass(frozen=True)
class BipartiteResult:
    is_bipartite: bool
    classes: Optional[Tuple[Tuple[int, ...], Tuple[int, ...]]] = None
    odd_walk: Optional[Tuple[int, ...]] = None  # closed: first vertex == last vertex

    def to_dict(self) -> dict:
        return {"bipartite": self.is_bipartite,
                "classes": [list(c) for c in self.classes] if self.classes else None,
                "odd_closed_walk": list(self.odd_walk) if self.odd_walk else None}


@dataclass(frozen=True)
class ComponentProfile:
    vertices: Tuple[int, ...]
    edge_count: int
    kind: str
    cycle: Optional[Tuple[int, ...]] = None

    @property
    def cycle_is_odd(self) -> Optional[bool]:
        return None if self.cycle is None else len(self.cycle) % 2 == 1


@dataclass(frozen=True)
class CycleProfile:
    components: Tuple[ComponentProfile, ...]

    @property
    def odd_cycle_count(self) -> int:
        """Number of odd cycles, meaningful when no component has several cycles."""
        return sum(1 for c in self.components if c.kind == UNIQUE_ODD)

    def kinds(self) -> Tuple[str, ...]:
        return tuple(c.kind for c in self.components)


@dataclass(frozen=True)
class FamilyClassification:
    tags: Tuple[str, ...]
    clique_sizes: Optional[Tuple[int, ...]] = None

    def to_dict(self) -> dict:
        return {"tags": list(self.tags),
                "clique_sizes": list(self.clique_sizes) if self.clique_sizes else None}


## Constructors ##

def from_edges(n: int, edges: Iterable[Edge]) -> SemisimpleGraph:
    edges = list(edges)
    if len({(min(i, j), max(i, j)) for i, j in edges}) != len(edges):
        raise GraphFormatError("Duplicate edge in edge list")
    return SemisimpleGraph(n, frozenset(edges))


def empty_graph(n: int) -> SemisimpleGraph:
    return SemisimpleGraph(n)


def looped_clique(n: int) -> SemisimpleGraph:
    """K_n°: every pair adjacent and every vertex looped."""
    return SemisimpleGraph(n, frozenset((i, j) for i in range(1, n + 1) for j in range(i, n + 1)))


def cycle(n: int, looped: bool = False) -> SemisimpleGraph:
    edges = {(i, i % n + 1) for i in range(1, n + 1)}
    if looped:
        edges |= {(i, i) for i in range(1, n + 1)}
    return SemisimpleGraph(n, frozenset(edges))


def looped_cycle(n: int) -> SemisimpleGraph:
    return cycle(n, looped=True)


def looped_path(n: int) -> SemisimpleGraph:
    edges = {(i, i + 1) for i in range(1, n)} | {(i, i) for i in range(1, n + 1)}
    return SemisimpleGraph(n, frozenset(edges))


def looped_star(leaves: int) -> SemisimpleGraph:
    """Looped star tree with centre 1 and leaves 2..leaves+1."""
    n = leaves + 1
    edges = {(1, i) for i in range(2, n + 1)} | {(i, i) for i in range(1, n + 1)}
    return SemisimpleGraph(n, frozenset(edges))


def disjoint_union(g: SemisimpleGraph, h: SemisimpleGraph) -> SemisimpleGraph:
    shifted = {(i + g.n, j + g.n) for i, j in h.edges}
    return SemisimpleGraph(g.n + h.n, g.edges | frozenset(shifted))


def add_suspension_vertex(g: SemisimpleGraph, looped: bool = True) -> SemisimpleGraph:
    """Appends vertex n+1 adjacent to every other vertex."""
    v = g.n + 1
    edges = set(g.edges) | {(i, v) for i in g.vertices}
    if looped:
        edges.add((v, v))
    return SemisimpleGraph(v, frozenset(edges))


def induced_subgraph(g: SemisimpleGraph, keep: Iterable[int]) -> SemisimpleGraph:
    """Subgraph on `keep`, relabelled 1..|keep| in increasing order."""
    keep = sorted(set(keep))
    relabel = {v: k for k, v in enumerate(keep, start=1)}
    edges = {(relabel[i], relabel[j]) for i, j in g.edges if i in relabel and j in relabel}
    return SemisimpleGraph(len(keep), frozenset(edges))


## Operations ##

def complement(g: SemisimpleGraph) -> SemisimpleGraph:
    """Edges of K_n° that are not edges of g; loops participate."""
    return SemisimpleGraph(g.n, looped_clique(g.n).edges - g.edges)


def _odd_closed_walk(i: int, j: int, parent: dict, depth: dict) -> Tuple[int, ...]:
    """Closes the BFS tree paths from i and j with the edge {i, j}."""
    left, right = [i], [j]
    while left[-1] != right[-1]:
        if depth[left[-1]] >= depth[right[-1]]:
            left.append(parent[left[-1]])
        else:
            right.append(parent[right[-1]])
    return tuple(left + right[-2::-1] + [i])


def is_bipartite(g: SemisimpleGraph) -> BipartiteResult:
    """
    2-colours g by breadth-first search.
    A loop is an odd cycle of length one, so a looped graph is never bipartite.
    """
    if g.loops:
        v = g.loops[0]
        return BipartiteResult(False, odd_walk=(v, v))

    graph = g.to_networkx()
    colour, parent, depth = {}, {}, {}
    for root in g.vertices:
        if root in colour:
            continue
        colour[root], parent[root], depth[root] = 0, None, 0
        for u, v in nx.bfs_edges(graph, root):
            colour[v], parent[v], depth[v] = 1 - colour[u], u, depth[u] + 1

    for i, j in g.non_loop_edges:
        if colour[i] == colour[j]:
            return BipartiteResult(False, odd_walk=_odd_closed_walk(i, j, parent, depth))

    classes = (tuple(v for v in g.vertices if colour[v] == 0),
               tuple(v for v in g.vertices if colour[v] == 1))
    return BipartiteResult(True, classes=classes)


def cycle_profile(g: SemisimpleGraph) -> CycleProfile:
    """
    Classifies each connected component by comparing its edge count (loops included)
    with its vertex count, then locates the unique cycle when there is exactly one.
    """
    graph = g.to_networkx()
    profiles = []
    for component in sorted((sorted(c) for c in nx.connected_components(graph)), key=lambda c: c[0]):
        sub = graph.subgraph(component)
        v, e = len(component), sub.number_of_edges()
        if e <= v - 1:
            profiles.append(ComponentProfile(tuple(component), e, ACYCLIC))
            continue
        if e > v:
            profiles.append(ComponentProfile(tuple(component), e, MULTIPLE))
            continue

        looped = sorted(nx.nodes_with_selfloops(sub))
        if looped:
            found = (looped[0],)
        else:
            # Leaf pruning leaves the cycle as the 2-core
            core = nx.k_core(nx.Graph(sub), 2)
            found = tuple(u for u, _ in nx.find_cycle(core, source=min(core.nodes)))
        kind = UNIQUE_ODD if len(found) % 2 == 1 else UNIQUE_EVEN
        profiles.append(ComponentProfile(tuple(component), e, kind, found))
    return CycleProfile(tuple(profiles))


def odd_cycle_count(g: SemisimpleGraph) -> int:
    """Odd cycles of g, for graphs with at most one cycle per component."""
    profile = cycle_profile(g)
    if MULTIPLE in profile.kinds():
        raise PatternError("Odd cycle count needs at most one cycle per component")
    return profile.odd_cycle_count


def _is_looped_clique_component(g: SemisimpleGraph, component) -> bool:
    return all(g.has_edge(i, j) for i, j in combinations(component, 2)) \
        and all(g.has_edge(v, v) for v in component)


def _simple_graph(g: SemisimpleGraph) -> nx.Graph:
    graph = nx.Graph()
    graph.add_nodes_from(g.vertices)
    graph.add_edges_from(g.non_loop_edges)
    return graph


def is_gcr_one(g: SemisimpleGraph) -> bool:
    """No even cycle and at most one odd cycle in each component, with at least one edge."""
    if not g.edges:
        return False
    return all(kind in (ACYCLIC, UNIQUE_ODD) for kind in cycle_profile(g).kinds())


def is_looped_forest(g: SemisimpleGraph) -> bool:
    return g.n > 0 and g.is_looped and nx.is_forest(_simple_graph(g))


def is_looped_star_plus_isolated(g: SemisimpleGraph) -> bool:
    """A looped star tree with at least one non-loop edge plus looped isolated vertices."""
    if not is_looped_forest(g) or not g.non_loop_edges:
        return False
    simple = _simple_graph(g)
    big = [c for c in nx.connected_components(simple) if len(c) > 1]
    if len(big) != 1:
        return False
    return sum(1 for v in big[0] if simple.degree(v) > 1) <= 1


def is_looped_cycle(g: SemisimpleGraph) -> bool:
    if g.n < 3 or not g.is_looped:
        return False
    simple = _simple_graph(g)
    return nx.is_connected(simple) and all(d == 2 for _, d in simple.degree())


def classify_family(g: SemisimpleGraph) -> FamilyClassification:
    """All family tags that apply, most specific first."""
    tags, sizes = [], None
    components = [sorted(c) for c in nx.connected_components(g.to_networkx())]
    if g.n and all(_is_looped_clique_component(g, c) for c in components):
        sizes = tuple(sorted((len(c) for c in components), reverse=True))
        tags.append(FAMILY_CLIQUES)
    if is_looped_star_plus_isolated(g):
        tags.append(FAMILY_STAR)
    if is_looped_cycle(g):
        tags.append(FAMILY_CYCLE)
    if is_looped_forest(g):
        tags.append(FAMILY_FOREST)
    if is_gcr_one(g):
        tags.append(FAMILY_GCR_ONE)
    if not tags:
        tags.append(FAMILY_UNRECOGNIZED)
    return FamilyClassification(tuple(tags), sizes)


def _bit_count(x: int) -> int:
    return bin(x).count("1")


def max_independent_set(g: SemisimpleGraph, limit: int = MIS_LIMIT) -> Tuple[int, ...]:
    """
    Exact maximum independent set by branch and bound over vertex bitmasks.
    Loops do not matter: only edges between distinct chosen vertices are forbidden.
    """
    if g.n > limit:
        raise SizeLimitError(f"Independent set search limited to {limit} vertices, graph has {g.n}")
    adjacency = [0] * g.n
    for i, j in g.non_loop_edges:
        adjacency[i - 1] |= 1 << (j - 1)
        adjacency[j - 1] |= 1 << (i - 1)

    best = [0, 0]  # size, mask

    def search(candidates: int, chosen: int, size: int):
        if candidates == 0:
            if size > best[0]:
                best[:] = [size, chosen]
            return
        if size + _bit_count(candidates) <= best[0]:
            return
        v = (candidates & -candidates).bit_length() - 1
        search(candidates & ~(1 << v) & ~adjacency[v], chosen | (1 << v), size + 1)
        # Excluding v only helps when v blocks a neighbour
        if adjacency[v] & candidates:
            search(candidates & ~(1 << v), chosen, size)

    search((1 << g.n) - 1, 0, 0)
    return tuple(v + 1 for v in range(g.n) if best[1] >> v & 1)


def max_independent_set_size(g: SemisimpleGraph, limit: int = MIS_LIMIT) -> int:
    return len(max_independent_set(g, limit))


def max_bipartite_induced_size(g: SemisimpleGraph, limit: int = BIPARTITE_LIMIT) -> int:
    """
    Largest |S| with the induced subgraph on S bipartite.
    Branches on each vertex: leave it out, or add it with either colour.
    A looped vertex never enters S.
    """
    if g.n > limit:
        raise SizeLimitError(f"Bipartite induced search limited to {limit} vertices, graph has {g.n}")
    looped = set(g.loops)
    neighbours = {v: g.neighbours(v) for v in g.vertices}
    order = sorted(g.vertices, key=lambda v: -len(neighbours[v]))
    colours = {}
    best = 0

    def search(index: int, size: int):
        nonlocal best
        if size + (len(order) - index) <= best:
            return
        if index == len(order):
            best = size
            return
        v = order[index]
        if v not in looped:
            # The first chosen vertex only needs one colour
            for c in ((0,) if not colours else (0, 1)):
                if all(colours.get(u) != c for u in neighbours[v]):
                    colours[v] = c
                    search(index + 1, size + 1)
                    del colours[v]
        search(index + 1, size)

    search(0, 0)
    return best


def bicolorings(g: SemisimpleGraph) -> Tuple[Tuple[int, int], ...]:
    """
    Every (red, blue) class-size pair over all proper 2-colourings of g.
    Each component may be flipped independently. Empty when g is not bipartite.
    """
    if not is_bipartite(g).is_bipartite:
        return ()
    options = {(0, 0)}
    for component in nx.connected_components(g.to_networkx()):
        sub = induced_subgraph(g, component)
        red, blue = (len(c) for c in is_bipartite(sub).classes)
        options = {(r + a, b + c) for r, b in options for a, c in ((red, blue), (blue, red))}
    return tuple(sorted(options))


def looped_suspension_vertices(g: SemisimpleGraph) -> Tuple[int, ...]:
    """Looped vertices adjacent to every other vertex."""
    return tuple(v for v in g.loops if len(g.neighbours(v)) == g.n - 1)


## File format ##

def parse_graph(text: str) -> SemisimpleGraph:
    """
    Parses `n <count>` followed by one `i j` line per edge (`i i` is a loop).
    `#` starts a comment.
    """
    n, edges = None, []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if n is None:
            if len(fields) != 2 or fields[0] != "n":
                raise GraphFormatError(f"Line {number}: expected 'n <count>', got '{line}'")
            try:
                n = int(fields[1])
            except ValueError:
                raise GraphFormatError(f"Line {number}: vertex count '{fields[1]}' is not an integer")
            continue
        if len(fields) != 2:
            raise GraphFormatError(f"Line {number}: expected 'i j', got '{line}'")
        try:
            edges.append((int(fields[0]), int(fields[1])))
        except ValueError:
            raise GraphFormatError(f"Line {number}: edge endpoints must be integers, got '{line}'")
    if n is None:
        raise GraphFormatError("Graph file has no 'n <count>' line")
    return from_edges(n, edges)


def format_graph(g: SemisimpleGraph) -> str:
    lines = [f"n {g.n}"] + [f"{i} {j}" for i, j in sorted(g.edges)]
    return "\n".join(lines) + "\n"
