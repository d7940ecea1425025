"""
Numeric ground truth: minimum completion rank by multi-start factored least squares,
and Monte Carlo estimates of typical ranks and of fixed inertias.
"""
import queue
from dataclasses import dataclass
from functools import partial
from multiprocessing import Manager, Process
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from scipy.optimize import least_squares

from completion.engine import PartialSymmetricMatrix, certify_full_rank
from completion.errors import (InputError, InternalConsistencyError, NonGenericInputError,
                               NotFullRankTypicalError, NumericError, SizeLimitError)
from completion.graph_core import SemisimpleGraph, bicolorings, complement, is_bipartite
from completion.report import Report
from completion.symmetric_linalg import Tolerance, numeric_rank, principal_submatrix
from logger import prepare_logger
from settings import (MAX_ITER, OPT_TOL, ORACLE_MAX_N, RANK_TOL, RESAMPLE_ATTEMPTS, RESTARTS, SAMPLES,
                      SEED, THREADS, THRESHOLD, WORKER_POLL)


@dataclass(frozen=True)
class OracleConfig:
    """
    :param restarts: Random starts per rank and signature.
    :param max_iter: Function evaluations per start.
    :param opt_tol: Success when the residual is at most opt_tol * (1 + sum of squared data).
    :param seed: Master seed, split per sample.
    :param min_rank: Lowest rank to try; the fully specified lower bound still applies.
    """
    restarts: int = RESTARTS
    max_iter: int = MAX_ITER
    opt_tol: float = OPT_TOL
    rank_tol: float = RANK_TOL
    seed: int = SEED
    min_rank: int = 0

    def __post_init__(self):
        if self.restarts < 1:
            raise InputError(f"restarts must be at least 1, got {self.restarts}")
        if self.max_iter < 1:
            raise InputError(f"max_iter must be at least 1, got {self.max_iter}")
        if not self.opt_tol > 0:
            raise InputError(f"opt_tol must be positive, got {self.opt_tol}")
        if not 0 <= self.seed < 2 ** 64:
            raise InputError(f"seed must be a 64-bit unsigned integer, got {self.seed}")

    @property
    def tolerance(self) -> Tolerance:
        return Tolerance(self.rank_tol, self.opt_tol)


@dataclass(frozen=True)
class OracleResult(Report):
    rank: int
    witness: np.ndarray
    residual: float
    signature: Tuple[int, int]  # positive and negative factor columns
    lower_bound: int
    witness_rank: int

    def to_dict(self) -> dict:
        return {"rank": self.rank, "witness": self.witness, "residual": self.residual,
                "signature": list(self.signature), "lower_bound": self.lower_bound,
                "witness_rank": self.witness_rank}


def fully_specified_lower_bound(m: PartialSymmetricMatrix, tol: Tolerance = Tolerance()) -> Tuple[int, Tuple[int, ...]]:
    """
    Rank of a fully specified principal block, found greedily from each looped vertex.
    Every completion has at least this rank.
    """
    g = m.pattern
    full = m.zero_fill()
    order = sorted(g.loops, key=lambda v: (-len(g.neighbours(v)), v))
    best = (0, ())
    for seed in order:
        clique = [seed]
        for v in order:
            if v not in clique and all(g.has_edge(u, v) for u in clique):
                clique.append(v)
        rank = numeric_rank(principal_submatrix(full, clique), tol)
        best = max(best, (rank, tuple(sorted(clique))))
    return best


class MinimumRankOracle:
    """
    Fits F S F^T to the specified entries for growing r, with F n x r and
    S = diag(+1 x p, -1 x (r - p)) for every p, so indefinite completions are reachable.
    """

    def __init__(self, config: OracleConfig = OracleConfig()):
        self.logger = prepare_logger()
        self.config = config

    def min_rank_complete(self, m: PartialSymmetricMatrix, rng: Optional[np.random.Generator] = None) -> OracleResult:
        if m.n > ORACLE_MAX_N:
            raise SizeLimitError(f"Oracle is limited to {ORACLE_MAX_N} vertices, pattern has {m.n}")
        rng = rng if rng is not None else np.random.default_rng(np.random.SeedSequence(self.config.seed))
        tol = self.config.tolerance
        lower, _ = fully_specified_lower_bound(m, tol)

        if not m.unknowns():
            full = m.zero_fill()
            rank = numeric_rank(full, tol)
            return OracleResult(rank, full, 0.0, (0, 0), lower, rank)

        edges = sorted(m.values)
        rows = np.array([i - 1 for i, _ in edges])
        cols = np.array([j - 1 for _, j in edges])
        target = np.array([m.values[e] for e in edges])
        budget = self.config.opt_tol * (1 + float(np.sum(target ** 2)))

        for r in range(max(lower, self.config.min_rank), m.n):
            found = self._fit(m.n, r, rows, cols, target, budget, rng)
            if found is not None:
                witness, residual, p = found
                witness_rank = numeric_rank(witness, tol)
                if witness_rank != r:
                    self.logger.warning(f"Rank {r} fit has numeric rank {witness_rank}")
                return OracleResult(r, witness, residual, (p, r - p), lower, witness_rank)
            self.logger.debug(f"No rank {r} fit within {self.config.restarts} restarts per signature")

        # A generic completion has full rank
        for _ in range(RESAMPLE_ATTEMPTS):
            witness = m.complete(m.random_values(rng))
            if numeric_rank(witness, tol) == m.n:
                inertia_p = int(np.sum(np.linalg.eigvalsh(witness) > 0))
                return OracleResult(m.n, witness, 0.0, (inertia_p, m.n - inertia_p), lower, m.n)
        raise InternalConsistencyError("No full-rank completion found")

    def _fit(self, n: int, r: int, rows, cols, target, budget: float, rng: np.random.Generator):
        if r == 0:
            residual = float(np.sum(target ** 2))
            return (np.zeros((n, n)), residual, 0) if residual <= budget else None

        k = np.arange(target.size)
        scale = np.sqrt(max(float(np.sqrt(np.mean(target ** 2))), 1e-3)) / r ** 0.25
        for p in range(r + 1):
            signs = np.array([1.0] * p + [-1.0] * (r - p))

            def residuals(theta):
                f = theta.reshape(n, r)
                return np.sum(f[rows] * signs * f[cols], axis=1) - target

            def jacobian(theta):
                f = theta.reshape(n, r)
                jac = np.zeros((target.size, n, r))
                jac[k, rows, :] += signs * f[cols]
                jac[k, cols, :] += signs * f[rows]
                return jac.reshape(target.size, n * r)

            for _ in range(self.config.restarts):
                start = rng.standard_normal(n * r) * scale
                fit = least_squares(residuals, start, jac=jacobian, method="trf", xtol=1e-14, ftol=1e-14,
                                    gtol=1e-14, max_nfev=self.config.max_iter)
                residual = 2 * float(fit.cost)
                if residual <= budget:
                    f = fit.x.reshape(n, r)
                    witness = (f * signs) @ f.T
                    return (witness + witness.T) / 2, residual, p
        return None


## Sampling ##

def _sample_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, index]))


def _rank_task(g: SemisimpleGraph, config: OracleConfig, index: int):
    """(index, minimal rank or None, resamples)"""
    rng = _sample_rng(config.seed, index)
    oracle = MinimumRankOracle(config)
    for attempt in range(RESAMPLE_ATTEMPTS):
        m = PartialSymmetricMatrix.random(g, rng)
        try:
            return index, oracle.min_rank_complete(m, rng).rank, attempt
        except NumericError as e:
            oracle.logger.warning(f"Sample {index} resampled: {e}")
    return index, None, RESAMPLE_ATTEMPTS


def _census_task(g: SemisimpleGraph, config: OracleConfig, index: int):
    """(index, fixed inertia, None when not certified, or 'non-generic')"""
    rng = _sample_rng(config.seed, index)
    m = PartialSymmetricMatrix.random(g, rng)
    try:
        certificate = certify_full_rank(m, tol=config.tolerance, rng=rng)
    except NonGenericInputError:
        return index, "non-generic"
    return index, certificate.fixed_inertia.as_tuple() if certificate.full_rank else None


def _worker(task: Callable, indices: List[int], results):
    """Puts (True, result) per index; on the first exception puts (False, error) and stops."""
    for index in indices:
        try:
            results.put((True, task(index)))
        except Exception as e:
            try:
                results.put((False, e))
            except Exception:
                # Unpicklable error
                results.put((False, InternalConsistencyError(f"Sample {index} failed: {e!r}")))
            return


@dataclass(frozen=True)
class TypicalRankEstimate(Report):
    samples: int
    counts: Dict[int, int]
    threshold: float
    seed: int
    resampled: int = 0
    failed: int = 0

    @property
    def solved(self) -> int:
        return sum(self.counts.values())

    @property
    def histogram(self) -> Dict[int, float]:
        solved = self.solved
        return {r: c / solved for r, c in sorted(self.counts.items())} if solved else {}

    @property
    def declared(self) -> Tuple[int, ...]:
        return tuple(r for r, f in self.histogram.items() if f >= self.threshold)

    def to_dict(self) -> dict:
        return {"samples": self.samples, "histogram": self.histogram, "counts": self.counts,
                "declared": list(self.declared), "threshold": self.threshold, "seed": self.seed,
                "resampled": self.resampled, "failed": self.failed}


@dataclass(frozen=True)
class InertiaCensus(Report):
    samples: int
    counts: Dict[Tuple[int, int, int], int]
    bicolorings: Tuple[Tuple[int, int], ...]
    seed: int
    not_certified: int = 0
    non_generic: int = 0

    @property
    def certified(self) -> int:
        return sum(self.counts.values())

    @property
    def inertias(self) -> Tuple[Tuple[int, int, int], ...]:
        return tuple(sorted(self.counts))

    def to_dict(self) -> dict:
        key = ",".join
        return {"samples": self.samples,
                "counts": {key(map(str, i)): c for i, c in sorted(self.counts.items())},
                "frequencies": {key(map(str, i)): c / self.certified for i, c in sorted(self.counts.items())},
                "certified": self.certified, "not_certified": self.not_certified,
                "non_generic": self.non_generic,
                "bicolorings": [list(b) for b in self.bicolorings], "seed": self.seed}


class TypicalRankSampler:
    """
    Draws standard normal partial matrices on a pattern and runs one task per sample.
    Sample k always uses the seed [seed, k], so serial and parallel runs agree.
    """

    def __init__(self, config: OracleConfig = OracleConfig(), threads: int = THREADS):
        if threads < 1:
            raise InputError(f"threads must be at least 1, got {threads}")
        self.logger = prepare_logger()
        self.config = config
        self.threads = threads

    def _map(self, task: Callable, n_samples: int) -> list:
        if self.threads == 1:
            return [task(index) for index in range(n_samples)]

        manager = Manager()
        results = manager.Queue()
        workers = [Process(target=_worker, args=(task, list(range(w, n_samples, self.threads)), results))
                   for w in range(self.threads)]
        for worker in workers:
            worker.start()
        self.logger.debug(f"{len(workers)} sampling processes started")
        collected, error = [], None
        while len(collected) < n_samples and error is None:
            try:
                ok, payload = results.get(timeout=WORKER_POLL)
            except queue.Empty:
                if not any(worker.is_alive() for worker in workers) and results.empty():
                    error = InternalConsistencyError(
                        f"Sampling processes exited after {len(collected)} of {n_samples} samples")
                continue
            if ok:
                collected.append(payload)
            else:
                error = payload
        for worker in workers:
            if error is not None:
                worker.terminate()
            worker.join()
        if error is not None:
            self.logger.error(f"Sampling failed: {error!r}")
            raise error
        return sorted(collected, key=lambda result: result[0])

    @staticmethod
    def _check_samples(n_samples: int):
        if n_samples < 1:
            raise InputError(f"Number of samples must be at least 1, got {n_samples}")

    def typical_rank_sample(self, g: SemisimpleGraph, n_samples: int = SAMPLES,
                            threshold: float = THRESHOLD) -> TypicalRankEstimate:
        self._check_samples(n_samples)
        if not 0 < threshold <= 1:
            raise InputError(f"Threshold must lie in (0, 1], got {threshold}")
        if g.n > ORACLE_MAX_N:
            raise SizeLimitError(f"Oracle is limited to {ORACLE_MAX_N} vertices, pattern has {g.n}")
        self.logger.info(f"Sampling {n_samples} partial matrices on a {g.n}-vertex pattern")

        counts, resampled, failed = {}, 0, 0
        for _, rank, attempts in self._map(partial(_rank_task, g, self.config), n_samples):
            resampled += attempts
            if rank is None:
                failed += 1
                continue
            counts[rank] = counts.get(rank, 0) + 1
        estimate = TypicalRankEstimate(n_samples, dict(sorted(counts.items())), threshold, self.config.seed,
                                       resampled, failed)
        self.logger.info(f"Declared typical ranks: {list(estimate.declared)}")
        return estimate

    def inertia_census(self, g: SemisimpleGraph, n_samples: int = SAMPLES) -> InertiaCensus:
        """
        Fixed inertias of sampled partial matrices whose completions are all invertible,
        next to the class sizes of every proper bicoloring of the complement.
        """
        self._check_samples(n_samples)
        missing = complement(g)
        if not is_bipartite(missing).is_bipartite:
            raise NotFullRankTypicalError("Census needs a pattern with bipartite complement")
        self.logger.info(f"Inertia census over {n_samples} samples")

        counts, not_certified, non_generic = {}, 0, 0
        for _, outcome in self._map(partial(_census_task, g, self.config), n_samples):
            if outcome == "non-generic":
                non_generic += 1
            elif outcome is None:
                not_certified += 1
            else:
                counts[outcome] = counts.get(outcome, 0) + 1
        return InertiaCensus(n_samples, dict(sorted(counts.items())), bicolorings(missing), self.config.seed,
                             not_certified, non_generic)
