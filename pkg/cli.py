#!/usr/bin/env python3
import argparse
import sys
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np

from completion.classifier import is_full_rank_typical, typical_ranks
from completion.engine import (PartialSymmetricMatrix, certify_full_rank, complete_cliques, disjoint_union_rank,
                               one_missing_entry_solve, parse_partial)
from completion.errors import CompletionError, GraphFormatError, InputError, PatternError
from completion.graph_core import SemisimpleGraph, classify_family, parse_graph
from completion.oracle import MinimumRankOracle, OracleConfig, TypicalRankSampler
from completion.report import dumps
from completion.symmetric_linalg import Tolerance
from consts import FAMILY_CLIQUES, SCHEMA_VERSION
from logger import prepare_logger
from settings import OPT_TOL, RANK_TOL, RESTARTS, SAMPLES, SEED, THREADS, THRESHOLD


class CliArgumentParser(argparse.ArgumentParser):
    """Argument errors are input errors: exit status 1 with a JSON error object."""

    def error(self, message):
        raise InputError(message)


class CompletionCli:
    """
    Command-line front end. Every verb prints one JSON envelope
    {"schema_version", "command", "result" | "error"} on standard output.
    """

    def __init__(self):
        self.logger = prepare_logger()
        self.parser = self._build_parser()

    @staticmethod
    def _build_parser() -> argparse.ArgumentParser:
        common = CliArgumentParser(add_help=False)
        common.add_argument("--tol", type=float, default=RANK_TOL, help="Relative eigenvalue threshold")
        common.add_argument("--opt-tol", type=float, default=OPT_TOL, help="Oracle residual threshold")
        common.add_argument("--seed", type=int, default=SEED, help="Master seed for all randomness")
        common.add_argument("--samples", type=int, default=SAMPLES, help="Monte Carlo sample count")
        common.add_argument("--restarts", type=int, default=RESTARTS, help="Oracle starts per rank and signature")
        common.add_argument("--threads", type=int, default=THREADS, help="Sampling worker processes")
        common.add_argument("--ordering", default="lex", help="'lex' or a file of non-edges 'i j', one per line")
        common.add_argument("--threshold", type=float, default=THRESHOLD, help="Typicality frequency threshold")
        common.add_argument("--log-level", default=None, help="Logging level, e.g. DEBUG")
        common.add_argument("--log-file", default=None, help="Also write the log to this file")

        parser = CliArgumentParser(description="Minimum-rank completion of partial symmetric matrices")
        verbs = parser.add_subparsers(dest="command", required=True, parser_class=CliArgumentParser)
        verbs.add_parser("classify", parents=[common], help="Typical ranks of a graph").add_argument("graph")
        verbs.add_parser("certify", parents=[common], help="Full-rank certificate").add_argument("partial")
        complete = verbs.add_parser("complete", parents=[common], help="Low-rank completion")
        complete.add_argument("partial")
        complete.add_argument("--max", action="store_true", help="Rank n_1 + n_2 construction for clique unions")
        verbs.add_parser("solve-entry", parents=[common], help="One missing entry").add_argument("partial")
        pair = verbs.add_parser("esd", parents=[common], help="Eigenvalue sign disagreement")
        pair.add_argument("partial", nargs=2)
        verbs.add_parser("sample", parents=[common], help="Sampled typical ranks").add_argument("graph")
        verbs.add_parser("census", parents=[common], help="Inertia census").add_argument("graph")
        return parser

    def run(self, argv: List[str]) -> Tuple[int, str]:
        """
        Parses and executes one command.
        :return: Exit status and the JSON envelope.
        """
        command = None
        try:
            args = self.parser.parse_args(argv)
            command = args.command
            prepare_logger(args.log_level, args.log_file)
            self.logger.info(f"Running {command}")
            result = getattr(self, "do_" + command.replace("-", "_"))(args)
            return 0, dumps({"schema_version": SCHEMA_VERSION, "command": command, "result": result})
        except CompletionError as e:
            self.logger.error(f"{command or 'cli'} failed: {e.code}: {e}")
            return e.exit_status, dumps({"schema_version": SCHEMA_VERSION, "command": command, "error": e.to_dict()})

    ## Inputs ##

    @staticmethod
    def _read(path: str) -> str:
        try:
            return Path(path).read_text(encoding="utf-8")
        except OSError as e:
            raise InputError(f"Cannot read {path}: {e.strerror}")
        except UnicodeDecodeError as e:
            raise InputError(f"{path} is not UTF-8 text: {e.reason} at byte {e.start}")

    def _graph(self, path: str) -> SemisimpleGraph:
        return parse_graph(self._read(path))

    def _partial(self, path: str) -> PartialSymmetricMatrix:
        return parse_partial(self._read(path))

    @staticmethod
    def _tolerance(args) -> Tolerance:
        return Tolerance(args.tol, args.opt_tol)

    @staticmethod
    def _config(args) -> OracleConfig:
        return OracleConfig(restarts=args.restarts, opt_tol=args.opt_tol, rank_tol=args.tol, seed=args.seed)

    @staticmethod
    def _rng(args) -> np.random.Generator:
        return np.random.default_rng(np.random.SeedSequence(args.seed))

    def _ordering(self, args) -> Optional[List[Tuple[int, int]]]:
        if args.ordering == "lex":
            return None
        ordering = []
        for number, raw in enumerate(self._read(args.ordering).splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                i, j = (int(v) for v in line.split())
            except ValueError:
                raise GraphFormatError(f"Ordering line {number}: expected 'i j', got '{line}'")
            ordering.append((i, j))
        return ordering

    ## Verbs ##

    def do_classify(self, args) -> dict:
        g = self._graph(args.graph)
        return {"family": classify_family(g), "full_rank_typical": is_full_rank_typical(g),
                "typical_ranks": typical_ranks(g)}

    def do_certify(self, args):
        m = self._partial(args.partial)
        return certify_full_rank(m, tol=self._tolerance(args), ordering=self._ordering(args), rng=self._rng(args))

    def do_complete(self, args) -> dict:
        m = self._partial(args.partial)
        tol = self._tolerance(args)
        if m.n and FAMILY_CLIQUES in classify_family(m.pattern).tags:
            full, rank, method = complete_cliques(m, maximal=args.max, tol=tol)
            return {"method": method, "rank": rank, "matrix": full}
        if args.max:
            raise PatternError("--max needs a pattern made of disjoint looped cliques")
        result = MinimumRankOracle(self._config(args)).min_rank_complete(m, self._rng(args))
        return {"method": "oracle", "rank": result.rank, "matrix": result.witness, "residual": result.residual}

    def do_solve_entry(self, args):
        return one_missing_entry_solve(self._partial(args.partial), self._tolerance(args))

    def do_esd(self, args):
        first, second = (self._partial(path) for path in args.partial)
        return disjoint_union_rank(first, second, self._tolerance(args), self._rng(args))

    def do_sample(self, args):
        sampler = TypicalRankSampler(self._config(args), args.threads)
        return sampler.typical_rank_sample(self._graph(args.graph), args.samples, args.threshold)

    def do_census(self, args):
        sampler = TypicalRankSampler(self._config(args), args.threads)
        return sampler.inertia_census(self._graph(args.graph), args.samples)


def main(argv: Optional[List[str]] = None) -> int:
    status, output = CompletionCli().run(sys.argv[1:] if argv is None else argv)
    print(output)
    return status


if __name__ == "__main__":
    sys.exit(main())
