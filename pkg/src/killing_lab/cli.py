"""Command line entry point: ``killing-lab verify | list | certificate | report``."""

from __future__ import annotations

import argparse
import json
import sys

from . import catalog, harness, sasaki

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="killing-lab", description="Verify Killing-spinor and Einstein-stability identities numerically.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("verify", help="run a suite and write its report")
    v.add_argument("suite", help="shipped suite name (see 'list suites') or path to a JSON config")
    v.add_argument("--format", choices=("json", "csv"), default="json")
    v.add_argument("--output", "-o", help="write the report here instead of stdout")
    v.add_argument("--tolerance", type=float, help="override every entry tolerance")
    v.add_argument("--tolerance-scale", type=float, help="multiply every entry tolerance")
    v.add_argument("--workers", type=int, default=1, help="worker processes (default 1)")
    v.add_argument("--timing", action="store_true", help="include wall times (makes output run-dependent)")
    v.add_argument("--quiet", "-q", action="store_true", help="no summary line on stderr")

    ls = sub.add_parser("list", help="list catalog spaces, shipped suites or operations")
    ls.add_argument("what", choices=("catalog", "suites", "operations"))

    c = sub.add_parser("certificate", help="instability certificate for a product base")
    c.add_argument("--p1", type=int, default=1)
    c.add_argument("--p2", type=int, default=1)
    c.add_argument("--samples", type=int, default=4)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--no-numeric", action="store_true", help="closed-form values only")

    r = sub.add_parser("report", help="re-emit a saved JSON report")
    r.add_argument("input", help="JSON report written by 'verify'")
    r.add_argument("--format", choices=("json", "csv"), default="csv")
    r.add_argument("--output", "-o")
    return p


def _write(text, path):
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_verify(args) -> int:
    for name in ("tolerance", "tolerance_scale"):
        val = getattr(args, name)
        if val is not None and not val > 0:
            print(f"killing-lab: --{name.replace('_', '-')} must be positive", file=sys.stderr)
            return EXIT_USAGE
    try:
        report = harness.run_suite(args.suite, args.tolerance, args.tolerance_scale, max(1, args.workers))
    except harness.ConfigError as exc:
        print(f"killing-lab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _write(harness.render_report(report, args.format, args.timing), args.output)
    if not args.quiet:
        s = report.summary
        print(
            f"{report.suite}: {s['pass']} pass, {s['fail']} fail, {s['inconclusive']} inconclusive ({s['total']} entries)",
            file=sys.stderr,
        )
        for e in report.entries:
            if e.status != "pass":
                print(f"  {e.status.upper()} {e.id}: {e.reason}", file=sys.stderr)
    return report.exit_code


def cmd_list(args) -> int:
    if args.what == "catalog":
        data = {"catalog_hash": catalog.catalog_hash(), "spaces": catalog.list_catalog()}
    elif args.what == "suites":
        data = harness.shipped_suites()
    else:
        data = sorted(harness.OPERATIONS)
    sys.stdout.write(harness.dumps(harness._jsonable(data)) + "\n")
    return EXIT_PASS


def cmd_certificate(args) -> int:
    try:
        cert = sasaki.instability_certificate(
            args.p1, args.p2, rng=harness.make_rng(args.seed), samples=max(1, args.samples), numeric=not args.no_numeric
        )
    except ValueError as exc:
        print(f"killing-lab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    sys.stdout.write(harness.dumps(harness._jsonable(cert.as_dict())) + "\n")
    return EXIT_PASS if cert.verdict == "UNSTABLE" else EXIT_FAIL


def cmd_report(args) -> int:
    try:
        with open(args.input) as fh:
            data = json.load(fh)
        harness.validate_report(data)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"killing-lab: cannot read report: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except harness.jsonschema.ValidationError as exc:
        print(f"killing-lab: not a valid report: {exc.message}", file=sys.stderr)
        return EXIT_USAGE
    _write(harness.render_report(data, args.format), args.output)
    return EXIT_PASS if data["summary"]["fail"] == 0 and data["summary"]["inconclusive"] == 0 else EXIT_FAIL


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = {"verify": cmd_verify, "list": cmd_list, "certificate": cmd_certificate, "report": cmd_report}[args.command]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())
