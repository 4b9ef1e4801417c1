"""Command line entry point.

Exit codes: 0 when every check and assertion passes, 1 on any failed
check or assertion, 2 on a parse or structural error.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from . import suites
from .pipeline import (
    SCENARIOS,
    FibreSumStep,
    PipelineError,
    Report,
    builtin_scenario,
    emit_report,
    parse_pipeline,
    report_text,
    run_pipeline,
)


def _verbose_hook(stream):
    def hook(index, step, report: Report):
        stream.write(f"-- after step {index} ({step.op}) --\n")
        stream.write(report_text(report.to_dict()))
    return hook


def _write(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _run_and_emit(pipeline, args) -> int:
    hook = _verbose_hook(sys.stderr) if args.verbose else None
    reports = run_pipeline(pipeline, on_step=hook)
    _write(emit_report(reports, args.format), args.out)
    return 0 if all(r.passed for r in reports) else 1


def check_all() -> dict:
    """Run every built-in scenario and every consistency suite."""
    scenario_out = {}
    split_cases = []
    seen = set()

    for name in SCENARIOS:
        def collect(index, step, report: Report):
            if isinstance(step, FibreSumStep) and report.result is not None:
                for side in (report.result.spec.left, report.result.spec.right):
                    key = (side.manifold.label, side.surface, side.dual)
                    if key not in seen:
                        seen.add(key)
                        split_cases.append(
                            (f"{side.manifold.label}:{side.surface}/{side.dual}",
                             side.manifold.h2, side.sigma.h2_class, side.b.h2_class)
                        )

        reports = run_pipeline(builtin_scenario(name), on_step=collect)
        scenario_out[name] = [r.to_dict() for r in reports]

    suite_results = [
        suites.snf_suite(),
        suites.cokernel_invariance_suite(),
        suites.solve_suite(),
        suites.signature_congruence_suite(),
        suites.split_suite(split_cases),
        suites.rank_nullity_suite(),
    ]
    suite_out = {s.name: s.to_dict() for s in suite_results}
    ok = all(r["status"] == "pass" for rs in scenario_out.values() for r in rs) and all(
        s.passed for s in suite_results
    )
    return {"scenarios": scenario_out, "suites": suite_out, "status": "pass" if ok else "fail"}


def _check_all_text(result: dict) -> str:
    lines = []
    for name, reports in result["scenarios"].items():
        for r in reports:
            failed = [a["check"] for a in r["asserts"] if a["status"] != "pass"]
            failed += [k for k, c in r["checks"].items() if c["status"] == "fail"]
            extra = f" failed: {', '.join(failed)}" if failed else ""
            lines.append(f"scenario {name} [{r['label']}]: {r['status']} ({len(r['asserts'])} asserts){extra}")
    for name, s in result["suites"].items():
        lines.append(f"suite {name}: {s['status']} ({s['trials']} trials, {s['failures']} failures)")
    lines.append(f"overall: {result['status']}")
    return "\n".join(lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gfsum", description="Generalized fibre sum calculator")
    parser.add_argument("--verbose", action="store_true", help="print a report after every step")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument("--out", help="write the report to this file")
        p.add_argument("--verbose", action="store_true", default=argparse.SUPPRESS)

    p_run = sub.add_parser("run", help="run a pipeline file")
    p_run.add_argument("file")
    common(p_run)
    p_sc = sub.add_parser("scenario", help="run a built-in scenario")
    p_sc.add_argument("name", choices=SCENARIOS)
    common(p_sc)
    p_all = sub.add_parser("check-all", help="run all scenarios and consistency suites")
    common(p_all)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            try:
                with open(args.file, encoding="utf-8") as fh:
                    text = fh.read()
            except OSError as exc:
                print(f"error: {exc}", file=sys.stderr)
                return 2
            return _run_and_emit(parse_pipeline(text), args)
        if args.command == "scenario":
            return _run_and_emit(builtin_scenario(args.name), args)
        result = check_all()
        if args.format == "json":
            text = json.dumps(result, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
        else:
            text = _check_all_text(result)
        _write(text, args.out)
        return 0 if result["status"] == "pass" else 1
    except PipelineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
