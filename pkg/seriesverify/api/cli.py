import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

from pydantic import ValidationError

from seriesverify.api.reports import load_report, render
from seriesverify.arith.realball import working_prec
from seriesverify.common.logging.config import configure_logging
from seriesverify.common.metrics import write_metrics
from seriesverify.constants import keys
from seriesverify.constants.cache import configure_constant_cache
from seriesverify.exceptions import RegistryError, SeriesVerifyError, UnknownRecordError
from seriesverify.expr.registry import ConjectureRegistry, load_registry
from seriesverify.models.records import RecordKind
from seriesverify.models.run_config import RunConfig
from seriesverify.services.discovery_service import discover_closed_form
from seriesverify.services.verification_service import VerificationService, exit_code

logger = logging.getLogger(__name__)

# sysexits.h
EX_USAGE = 64
EX_DATAERR = 65
EX_NOINPUT = 66

# Constants filled into the disk cache by `cache warm`
WARM_KEYS = [
    keys.PI, keys.CATALAN, keys.K3, keys.L8, keys.GOLDEN_PHI,
    keys.zeta(3), keys.zeta(5), keys.beta(4), keys.log_q(2), keys.log_q(3),
    keys.sqrt_q(2), keys.sqrt_q(3), keys.gamma_rat("1/4"), keys.gamma_rat("1/3"),
]


class UsageError(Exception):
    pass


class ArgumentParser(argparse.ArgumentParser):
    """argparse with usage errors mapped to EX_USAGE instead of 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(
        prog="seriesverify",
        description="Certify harmonic-number series identities and test supercongruences",
    )
    parser.add_argument("--config", type=Path, help="TOML run configuration ([run] table)")
    parser.add_argument("--registry", type=Path, help="Conjecture registry (default: bundled data/registry.toml)")
    parser.add_argument("--output", type=Path, help="Write the report here instead of stdout")
    parser.add_argument("--metrics-file", type=Path, help="Write prometheus textfile metrics here")
    parser.add_argument("--no-cache", action="store_true", help="Keep constant enclosures in memory only")
    parser.add_argument("--parallelism", type=int, help="Worker processes for verify-all")
    parser.add_argument("--log-level", help="Logging level (default: LOG_LEVEL or INFO)")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=ArgumentParser)

    listing = sub.add_parser("list", help="List registry records")
    listing.add_argument("--kind", choices=[k.value for k in RecordKind], help="Only records of this kind")

    def run_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument("--digits", type=int, help="Decimal digits certified for identities")
        p.add_argument("--prime-min", type=int, help="Smallest prime tested for congruences")
        p.add_argument("--prime-max", type=int, help="Largest prime tested for congruences")
        p.add_argument("--strategy", choices=["auto", "exact", "fast", "both"], help="Congruence strategy")
        p.add_argument("--format", dest="output_format", choices=["json", "markdown", "csv"], help="Report format")

    verify = sub.add_parser("verify", help="Verify selected records")
    verify.add_argument("--id", dest="ids", action="append", required=True,
                        help="Record id or prefix (C2.1 selects C2.1.i, C2.1.ii, ...); repeatable")
    run_flags(verify)

    verify_all = sub.add_parser("verify-all", help="Verify the whole registry")
    run_flags(verify_all)

    discover = sub.add_parser("discover", help="Search for a closed form with PSLQ")
    target = discover.add_mutually_exclusive_group(required=True)
    target.add_argument("--id", dest="target_id", help="Open-series or record id")
    target.add_argument("--summand", help="Summand in k, e.g. '1/(k^3*C(2k,k))'")
    discover.add_argument("--start", type=int, help="First index of a raw summand (default 0)")
    discover.add_argument("--basis", nargs="+", help="Closed-form basis elements, e.g. 'zeta(5)' 'pi^2*zeta(3)'")
    discover.add_argument("--digits", type=int, help="Digits used by PSLQ")

    report = sub.add_parser("report", help="Re-render a saved JSON report")
    report.add_argument("--input", type=Path, required=True, help="JSON report from verify/verify-all")
    report.add_argument("--format", dest="output_format", choices=["json", "markdown", "csv"], default="markdown")

    cache = sub.add_parser("cache", help="Inspect or manage the constant cache")
    cache.add_argument("action", choices=["info", "clear", "warm"])
    cache.add_argument("--digits", type=int, help="Precision (digits) for warm")
    return parser


def _emit(text: str, output: Optional[Path]) -> None:
    if output is None:
        sys.stdout.write(text)
        return
    output.parent.mkdir(parents=True, exist_ok=True)
    output.write_text(text, encoding="utf-8")
    logger.info(f"Wrote {output}")


def _run_config(args) -> RunConfig:
    overrides = {
        "registry_path": args.registry,
        "parallelism": args.parallelism,
        "cache_enabled": False if args.no_cache else None,
        "digits": getattr(args, "digits", None),
        "prime_min": getattr(args, "prime_min", None),
        "prime_max": getattr(args, "prime_max", None),
        "strategy": getattr(args, "strategy", None),
        "output_format": getattr(args, "output_format", None),
        "ids": getattr(args, "ids", None),
    }
    return RunConfig.load(args.config, **overrides)


def _list(registry: ConjectureRegistry, args) -> int:
    records = registry.records
    if args.kind:
        records = [r for r in records if r.kind.value == args.kind]
    lines = [
        f"{r.id}\t{r.kind.value}\t{r.category.value}\t{r.provenance.label}"
        + (f"\t[{', '.join(r.flags)}]" if r.flags else "")
        for r in records
    ]
    _emit("\n".join(lines) + "\n", args.output)
    return 0


def _verify(registry: ConjectureRegistry, config: RunConfig, args) -> int:
    records = registry.select(config.ids)
    report = VerificationService(registry, config).run(records)
    _emit(render(report, config.output_format), args.output)
    return exit_code(report)


def _discover(registry: ConjectureRegistry, args) -> int:
    if args.target_id:
        if args.target_id in registry.open_series:
            target = registry.get_open_series(args.target_id)
        else:
            target = registry.get(args.target_id)
    else:
        target = args.summand
    candidate = discover_closed_form(target, args.basis, args.digits, registry.sequences, args.start)
    payload = {
        "target": candidate.target,
        "label": candidate.label,
        "expression": candidate.expression,
        "coefficients": candidate.relation.coefficients,
        "basis": candidate.basis,
        "digits": candidate.relation.digits,
        "margin": round(candidate.margin, 2),
    }
    _emit(json.dumps(payload, indent=2) + "\n", args.output)
    return 0


def _cache(config: RunConfig, args) -> int:
    cache = configure_constant_cache(config.cache_dir, config.cache_enabled)
    if args.action == "info":
        rows = cache.info()
        lines = [f"{cache.cache_dir}: {len(rows)} enclosures"]
        lines += [f"{row['key']}\t{row['prec']}\t{row['preview']}" for row in rows]
        _emit("\n".join(lines) + "\n", args.output)
    elif args.action == "clear":
        removed = cache.clear()
        _emit(f"Removed {removed} enclosures\n", args.output)
    else:
        prec = working_prec(config.digits)
        warmed = cache.warm(WARM_KEYS, prec)
        _emit(f"Warmed {warmed} constants at {prec} bits\n", args.output)
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        print(f"seriesverify: error: {str(e)}", file=sys.stderr)
        return EX_USAGE

    configure_logging("seriesverify", args.log_level)
    try:
        if args.command == "report":
            report = load_report(args.input)
            _emit(render(report, args.output_format), args.output)
            return exit_code(report)
        config = _run_config(args)
        if args.command == "cache":
            return _cache(config, args)

        configure_constant_cache(config.cache_dir, config.cache_enabled)
        registry = load_registry(config.registry_path)

        if args.command == "list":
            return _list(registry, args)
        if args.command == "discover":
            return _discover(registry, args)
        return _verify(registry, config, args)
    except FileNotFoundError as e:
        logger.error(f"Input not found: {str(e)}")
        return EX_NOINPUT
    except ValidationError as e:
        logger.error(f"Invalid run configuration: {str(e)}")
        return EX_USAGE
    except UnknownRecordError as e:
        logger.error(f"Unknown record: {str(e)}")
        return EX_USAGE
    except RegistryError as e:
        logger.error(f"Registry error: {str(e)}")
        return EX_DATAERR
    except (SeriesVerifyError, ValueError) as e:
        logger.error(f"Error: {str(e)}")
        return EX_DATAERR
    finally:
        if getattr(args, "metrics_file", None):
            write_metrics(str(args.metrics_file))
