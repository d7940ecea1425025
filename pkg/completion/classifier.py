"""
Typical ranks of a pattern: exact sets for the characterised families, rigorous bounds otherwise.
"""
from dataclasses import dataclass, replace
from typing import Optional, Tuple

from completion.errors import InexactReportError, InternalConsistencyError, SizeLimitError
from completion.graph_core import (SemisimpleGraph, BipartiteResult, classify_family, complement,
                                   induced_subgraph, is_bipartite, is_looped_star_plus_isolated,
                                   looped_suspension_vertices, max_bipartite_induced_size,
                                   max_independent_set_size, odd_cycle_count)
from completion.report import Report
from consts import (FAMILY_CLIQUES, FAMILY_CYCLE, FAMILY_FOREST, FAMILY_GCR_ONE, PROVENANCE)
from logger import prepare_logger

logger = prepare_logger()


@dataclass(frozen=True)
class FullRankTypicality(Report):
    decision: bool
    witness: BipartiteResult  # on the complement

    def to_dict(self) -> dict:
        return {"full_rank_typical": self.decision, "complement": self.witness.to_dict()}


def is_full_rank_typical(g: SemisimpleGraph) -> FullRankTypicality:
    result = is_bipartite(complement(g))
    return FullRankTypicality(result.is_bipartite, result)


@dataclass(frozen=True)
class Bound:
    value: Optional[int]
    source: str

    def to_dict(self) -> dict:
        return {"value": self.value, "source": self.source}


@dataclass(frozen=True)
class TypicalRankReport(Report):
    """
    Typical ranks of a pattern.
    The bounds are bounds on the maximum typical rank; an exact report has both equal to it.
    """
    n: int
    families: Tuple[str, ...]
    gcr: Optional[int]
    typical_set: Optional[Tuple[int, ...]]
    lower_bound: Bound
    upper_bound: Bound
    provenance: Tuple[Tuple[str, str], ...] = ()
    notes: Tuple[str, ...] = ()

    @property
    def exact(self) -> bool:
        return self.typical_set is not None

    def to_dict(self) -> dict:
        return {"n": self.n,
                "families": list(self.families),
                "gcr": self.gcr,
                "typical_set": list(self.typical_set) if self.exact else None,
                "exact": self.exact,
                "lower_bound": self.lower_bound.to_dict(),
                "upper_bound": self.upper_bound.to_dict(),
                "provenance": [{"tag": tag, "note": note} for tag, note in self.provenance],
                "notes": list(self.notes)}


def _exact(g: SemisimpleGraph, families, gcr: int, top: int, provenance) -> TypicalRankReport:
    tags = [tag for tag, _ in provenance]
    source = tags[-1]
    report = TypicalRankReport(g.n, tuple(families), gcr, tuple(range(gcr, top + 1)),
                               Bound(top, source), Bound(top, source),
                               tuple(provenance) + (("typical-rank-interval", PROVENANCE["typical-rank-interval"]),))
    _check(report)
    return report


def _check(report: TypicalRankReport):
    lower, upper = report.lower_bound.value, report.upper_bound.value
    if lower is not None and upper is not None and lower > upper:
        raise InternalConsistencyError(f"Lower bound {lower} exceeds upper bound {upper}")
    if report.gcr is not None and upper is not None and upper > 2 * report.gcr:
        raise InternalConsistencyError(f"Maximum typical rank {upper} exceeds twice the gcr {report.gcr}")


def _clique_rule(g, family):
    sizes = family.clique_sizes
    if len(sizes) == 1:
        return sizes[0], sizes[0], [("trivial", "a fully specified block has its own rank")]
    tag = "two-cliques" if len(sizes) == 2 else "many-cliques"
    return sizes[0], sizes[0] + sizes[1], [(tag, PROVENANCE[tag])]


def _gcr_one_rule(g, family):
    top = 2 if odd_cycle_count(g) >= 2 else 1
    return 1, top, [("gcr-one-graphs", PROVENANCE["gcr-one-graphs"]),
                    ("gcr-one-typical", PROVENANCE["gcr-one-typical"])]


def _forest_rule(g, family):
    provenance = [("looped-forests", PROVENANCE["looped-forests"])]
    if not g.non_loop_edges:
        return 1, 1 if g.n == 1 else 2, provenance
    if g.n == 2:
        return 2, 2, provenance
    if is_looped_star_plus_isolated(g):
        return 2, 3, provenance + [("star-tree", PROVENANCE["star-tree"])]
    return 2, 4, provenance


def _cycle_rule(g, family):
    if g.n == 4:
        return 3, 4, [("looped-cycles", PROVENANCE["looped-cycles"]),
                      ("full-rank-typical", PROVENANCE["full-rank-typical"])]
    return None


RULES = {FAMILY_CLIQUES: _clique_rule, FAMILY_GCR_ONE: _gcr_one_rule,
         FAMILY_FOREST: _forest_rule, FAMILY_CYCLE: _cycle_rule}


def _bounds(g: SemisimpleGraph, families, gcr: Optional[int] = None, lower: int = 0,
            upper: Optional[int] = None, provenance=(), notes=()) -> TypicalRankReport:
    """Maximum typical rank bounds for a pattern outside the characterised families."""
    provenance, notes = list(provenance), list(notes)
    given_source = provenance[-1][0] if provenance else "trivial"
    lower_source = given_source if lower else "trivial"
    try:
        found = max_bipartite_induced_size(complement(g))
        if found > lower:
            lower, lower_source = found, "bipartite-induced-lower-bound"
        provenance.append(("bipartite-induced-lower-bound", PROVENANCE["bipartite-induced-lower-bound"]))
    except SizeLimitError as e:
        logger.warning(f"Lower bound degraded: {e}")
        notes.append(f"lower bound search skipped: {e}")

    candidates = [(g.n, "trivial")]
    if upper is not None:
        candidates.append((upper, given_source))
    if g.is_looped and g.n:
        try:
            candidates.append((2 + g.n - max_independent_set_size(g), "independent-set-bound"))
            provenance.append(("independent-set-bound", PROVENANCE["independent-set-bound"]))
        except SizeLimitError as e:
            logger.warning(f"Upper bound degraded: {e}")
            notes.append(f"independent set search skipped: {e}")
    if gcr is not None:
        candidates.append((2 * gcr, "typical-rank-interval"))
    value, source = min(candidates)
    report = TypicalRankReport(g.n, tuple(families), gcr, None, Bound(lower, lower_source), Bound(value, source),
                               tuple(provenance), tuple(notes))
    _check(report)
    return report


def typical_ranks(g: SemisimpleGraph) -> TypicalRankReport:
    family = classify_family(g)
    families = family.tags
    if not g.edges:
        return _exact(g, families, 0, 0, [("edgeless", PROVENANCE["edgeless"])])

    results = []
    for tag in families:
        rule = RULES.get(tag)
        found = rule(g, family) if rule else None
        if found:
            results.append((tag,) + found)
    if results:
        distinct = {(gcr, top) for _, gcr, top, _ in results}
        if len(distinct) > 1:
            raise InternalConsistencyError(f"Family rules disagree on {g.n}-vertex pattern: {results}")
        _, gcr, top, provenance = results[0]
        return _exact(g, families, gcr, top, [p for result in results for p in result[3]])

    if FAMILY_CYCLE in families:
        # gcr 3; typical rank 4 is attained and 6 never is
        provenance = [("looped-cycles", PROVENANCE["looped-cycles"])]
        return _bounds(g, families, gcr=3, lower=4, upper=5, provenance=provenance,
                       notes=("whether 5 is typical for a looped cycle is open",))

    suspension = looped_suspension_vertices(g)
    if suspension:
        # Swapping two suspension vertices is an automorphism, so one removal decides
        v = suspension[0]
        base = typical_ranks(induced_subgraph(g, [u for u in g.vertices if u != v]))
        if base.exact:
            logger.debug(f"Typical ranks derived by removing suspension vertex {v}")
            return replace(suspension_shift(base), n=g.n, families=families)
    return _bounds(g, families)


def suspension_shift(report: TypicalRankReport) -> TypicalRankReport:
    """Typical ranks after adding a looped vertex adjacent to every vertex."""
    if not report.exact:
        raise InexactReportError("Suspension shift needs an exact typical rank report")
    top = report.typical_set[-1] + 1
    return TypicalRankReport(report.n + 1, report.families, report.gcr + 1,
                             tuple(r + 1 for r in report.typical_set),
                             Bound(top, "suspension"), Bound(top, "suspension"),
                             report.provenance + (("suspension", PROVENANCE["suspension"]),), report.notes)
