"""
main.py - S-ring Toolkit entry point

Subcommands:
- validate FILE         check the S-ring axioms of a partition file
- ci-check FILE         Babai CI verdict with conjugator table
- decompose FILE        wreath / star certificates, P1 and Q1, trichotomy table
- verify-theorem        sampled case analysis over C_p^3 x C_q
- classify              enumerate S-rings over a small group (census over C_p^3)
- non-ci                exhaustive search for a non-CI Cayley (di)graph
- catalog               dump B1..B6 over C_p^3

Exit codes: 0 ok, 1 semantic failure (invalid, not CI, refuted),
2 input error, 3 resource bound. Reports go to stdout (or --out), logs to
stderr.
"""

import argparse
import logging
import sys
from typing import List, Optional, Tuple

import sring_config
from abelian_core import check_simple_divisor, parse_group_spec, prime_factors
from catalog_classify import (CATALOG_PRIMES, build_catalog, census, classify_group,
                              elementary_group, wreath_certificates)
from ci_engine import babai_ci_check
from data_manager import (dumps, load_partition, partition_to_dict, verdict_to_dict,
                          write_jsonl, write_refutations, write_report)
from errors import InvalidSpecError, NotSimpleDivisorError, SchurError, SizeLimitError
from schur_core import (detect_gwreath, find_star, p1_q1, trichotomy_table, validate)
from sring_config import RunConfig
from theorem_check import find_non_ci_search, verify_main_theorem

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INPUT = 2
EXIT_LIMIT = 3


# ========== Argument parsing ==========

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sring", description="Schur rings and the CI property")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("--verbose", "-v", action="store_true", help="debug logging")
    verbosity.add_argument("--quiet", action="store_true", help="errors only")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default=None)
    common.add_argument("--out", default=None, help="report directory")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--max-order", dest="max_order", type=int, default=None)
    common.add_argument("--workers", type=int, default=None)

    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("validate", "ci-check", "decompose"):
        cmd = sub.add_parser(name, parents=[common])
        cmd.add_argument("file")
        if name == "decompose":
            cmd.add_argument("--q", type=int, default=None,
                             help="simple prime divisor (default: largest one)")

    cmd = sub.add_parser("verify-theorem", parents=[common])
    cmd.add_argument("--p", type=int, default=2)
    cmd.add_argument("--q", type=int, default=3)
    cmd.add_argument("--samples", type=int, default=None)

    cmd = sub.add_parser("classify", parents=[common])
    cmd.add_argument("--group", required=True)
    cmd.add_argument("--allow-large", dest="allow_large", action="store_true")

    cmd = sub.add_parser("non-ci", parents=[common])
    cmd.add_argument("--group", required=True)
    cmd.add_argument("--undirected", action="store_true")

    cmd = sub.add_parser("catalog", parents=[common])
    cmd.add_argument("--p", type=int, default=2)
    return parser


def configure_logging(args) -> None:
    level = logging.DEBUG if args.verbose else logging.ERROR if args.quiet else logging.INFO
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(message)s")


# ========== Commands ==========

def _header(cfg: RunConfig, result) -> dict:
    return {"command": cfg.command, "seed": cfg.seed, "result": result}


def cmd_validate(cfg: RunConfig) -> Tuple[int, dict, List[str]]:
    P = load_partition(cfg.file)
    report = validate(P)
    lines = [f"{P.group.label}: rank {P.rank}, " +
             ("valid" if report.valid else f"{report.axiom} axiom fails: {report.message}")]
    return (EXIT_OK if report.valid else EXIT_FAILURE), report.to_dict(), lines


def cmd_ci_check(cfg: RunConfig) -> Tuple[int, dict, List[str]]:
    P = load_partition(cfg.file)
    report = validate(P)
    if not report.valid:
        return EXIT_FAILURE, {"validity": report.to_dict()}, [f"not an S-ring: {report.message}"]
    verdict = babai_ci_check(P, bound=cfg.max_order)
    lines = [f"{P.group.label}: {verdict.verdict} ({verdict.method}, "
             f"{verdict.regular_subgroup_count} regular subgroups)"]
    return (EXIT_OK if verdict.is_ci else EXIT_FAILURE), verdict_to_dict(verdict), lines


def _default_q(order: int) -> Optional[int]:
    simple = [r for r in set(prime_factors(order)) if (order // r) % r]
    return max(simple) if simple else None


def cmd_decompose(cfg: RunConfig) -> Tuple[int, dict, List[str]]:
    P = load_partition(cfg.file)
    report = validate(P)
    if not report.valid:
        return EXIT_FAILURE, {"validity": report.to_dict()}, [f"not an S-ring: {report.message}"]
    certs = detect_gwreath(P)
    result = {"partition": partition_to_dict(P),
              "generalized_wreath": [c.to_dict() for c in certs]}
    lines = [f"{P.group.label}: {sum(not c.trivial for c in certs)} nontrivial "
             f"generalized wreath certificates ({len(certs)} total)"]
    q = cfg.q if cfg.q is not None else _default_q(P.group.order)
    if q is not None:
        try:
            check_simple_divisor(P.group, q)
        except NotSimpleDivisorError as e:
            raise InvalidSpecError(f"--q: {e}") from e
        P1, Q1 = p1_q1(P, q)
        star = find_star(P, q)
        table = trichotomy_table(P, q)
        result.update({"q": q, "P1": list(P1.members), "Q1": list(Q1.members),
                       "star": star.to_dict() if star else None,
                       "trichotomy": [row.to_dict() for row in table]})
        lines.append(f"q={q}: |P1|={P1.order} |Q1|={Q1.order} star={'yes' if star else 'no'} "
                     f"trichotomy cases {''.join(row.case for row in table)}")
    return EXIT_OK, result, lines


def cmd_verify_theorem(cfg: RunConfig) -> Tuple[int, dict, List[str]]:
    report = verify_main_theorem(cfg.p, cfg.q, samples=cfg.samples, seed=cfg.seed,
                                 workers=cfg.workers, bound=cfg.max_order)
    if cfg.out:
        write_refutations(cfg.out, report.refutations)
    lines = [f"{branch}: {count}" for branch, count in report.histogram.items()]
    lines.append(f"{len(report.samples)} modules, {len(report.refutations)} refutations")
    return (EXIT_OK if report.clean else EXIT_FAILURE), report.to_dict(), lines


def cmd_classify(cfg: RunConfig) -> Tuple[int, dict, List[str]]:
    G = parse_group_spec(cfg.group)
    p = G.invariant_factors[0]
    if G == elementary_group(p) and p in CATALOG_PRIMES:
        rows = [row.to_dict() for row in census(p, allow_large=cfg.allow_large, workers=cfg.workers)]
    else:
        rows = classify_group(G, allow_large=cfg.allow_large, workers=cfg.workers)
        for row in rows:
            row["group"] = G.label
    if cfg.out:
        write_jsonl(f"{cfg.out}/classify-{G.label}.jsonl", rows)
    lines = [f"{G.label}: {len(rows)} S-rings"]
    lines += [f"  rank {row['rank']:>2} sizes {[len(b) for b in row['blocks']]}"
              f"{' ' + row['label'] if row.get('label') else ''}" for row in rows]
    return EXIT_OK, {"group": G.label, "count": len(rows), "srings": rows}, lines


def cmd_non_ci(cfg: RunConfig) -> Tuple[int, dict, List[str]]:
    G = parse_group_spec(cfg.group)
    result = find_non_ci_search(G, undirected=cfg.undirected)
    lines = [f"{G.label}: " + ("exhausted, no witness" if result.exhausted
                               else f"witness connection set {result.witness_set}")]
    return EXIT_OK, result.to_dict(), lines


def cmd_catalog(cfg: RunConfig) -> Tuple[int, dict, List[str]]:
    entries = build_catalog(cfg.p)
    rows = []
    for entry in entries:
        row = entry.to_dict()
        row["generalized_wreath"] = wreath_certificates(entry)
        rows.append(row)
    lines = [f"{e.label}: sizes {e.partition.block_sizes()}" for e in entries]
    return EXIT_OK, {"p": cfg.p, "entries": rows}, lines


COMMANDS = {
    "validate": cmd_validate,
    "ci-check": cmd_ci_check,
    "decompose": cmd_decompose,
    "verify-theorem": cmd_verify_theorem,
    "classify": cmd_classify,
    "non-ci": cmd_non_ci,
    "catalog": cmd_catalog,
}


def _check_bounds(cfg: RunConfig) -> None:
    if cfg.max_order > sring_config.MAX_SCHEME_DEGREE:
        raise SizeLimitError("--max-order", cfg.max_order, sring_config.MAX_SCHEME_DEGREE)
    if cfg.samples < 0 or cfg.workers < 1:
        raise InvalidSpecError("--samples must be >= 0 and --workers >= 1")


def run(cfg: RunConfig) -> int:
    """Dispatch one command; returns the exit code."""
    try:
        _check_bounds(cfg)
        code, result, lines = COMMANDS[cfg.command](cfg)
    except InvalidSpecError as e:
        logger.error("[CLI] input error: %s", e)
        return EXIT_INPUT
    except SizeLimitError as e:
        logger.error("[CLI] resource bound: %s", e)
        return EXIT_LIMIT
    except SchurError as e:
        logger.error("[CLI] %s: %s", type(e).__name__, e)
        return EXIT_FAILURE

    payload = _header(cfg, result)
    if cfg.out:
        write_report(cfg.out, cfg.command, payload)
    if cfg.format == "text":
        print(f"# {cfg.command} seed={cfg.seed}")
        print("\n".join(lines))
    else:
        sys.stdout.write(dumps(payload))
    return code


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args)
    return run(RunConfig.from_args(args))


if __name__ == "__main__":
    sys.exit(main())
