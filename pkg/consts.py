SCHEMA_VERSION = "1.0"

# Floats in reports are written with this many significant digits
FLOAT_DIGITS = 17

# Provenance tags, one per result the reports can cite
PROVENANCE = {
    "typical-rank-interval": "typical ranks form the interval [gcr, max] and max <= 2 gcr",
    "full-rank-typical": "full rank is typical iff the complement is bipartite",
    "bipartite-induced-lower-bound": "max typical rank >= largest bipartite induced subgraph of the complement",
    "two-cliques": "two looped cliques of sizes n, m have typical ranks max(n, m)..n + m",
    "many-cliques": "k looped cliques n_1 >= n_2 >= ... have max typical rank n_1 + n_2",
    "gcr-one-graphs": "gcr 1 iff no even cycle and at most one odd cycle per component",
    "gcr-one-typical": "a gcr-1 graph has typical rank 2 iff it has at least two odd cycles",
    "looped-forests": "looped forests: gcr <= 2, max typical rank 2, 3 or 4 by shape",
    "suspension": "a looped suspension vertex shifts every typical rank by one",
    "star-tree": "a looped star tree on >= 3 vertices has typical ranks 2 and 3",
    "independent-set-bound": "looped graph: max typical rank <= 2 + n - (max independent set)",
    "looped-cycles": "looped cycles have gcr 3, typical rank 4 when n >= 4, never 6",
    "edgeless": "no specified entry: the zero completion has rank 0",
    "trivial": "typical ranks never exceed the vertex count",
}

# Family tags reported by the classifier
FAMILY_CLIQUES = "disjoint-union-of-looped-cliques"
FAMILY_FOREST = "looped-forest"
FAMILY_STAR = "looped-star-tree-plus-looped-isolated-vertices"
FAMILY_GCR_ONE = "gcr-one-graph"
FAMILY_CYCLE = "looped-cycle"
FAMILY_UNRECOGNIZED = "unrecognized"

# Cycle kinds reported per connected component
ACYCLIC = "acyclic"
UNIQUE_ODD = "unique-odd-cycle"
UNIQUE_EVEN = "unique-even-cycle"
MULTIPLE = "multiple-cycles"

# Certificate verdicts
FULL_RANK = "all-completions-full-rank"
DEFICIENT = "completable-below-full-rank"
