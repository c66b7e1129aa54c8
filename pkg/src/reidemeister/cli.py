"""Batch front end: build groups from selectors or spec files, run checks, emit reports.

Exit status is 0 when every verdict is pass, not-applicable or skipped, 1 when
any check fails and 2 for usage or spec errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import __version__
from .catalog import (
    DEFAULT_CATALOG,
    AffineSpec,
    CatalogEntry,
    GpnSpec,
    catalog_listing,
    multiplicative_order,
    reproduce_paper_examples,
    resolve,
    verify_7pr,
    verify_lincom,
    verify_nux,
)
from .derivations import derivation_family_holds, theta_map, verify_corex, verify_derivations
from .errors import GroupError, HypothesisError, SpecError, TooLargeError
from .groups import check_axioms
from .report import FAIL, NOT_APPLICABLE, PASS, SKIPPED, CheckReport, combine, render_set
from .series import lower_central_series, series_properties, verify_width_bounds, verify_wfin
from .twisted import ALL, INNER, condition_report, reidemeister_report, verify_lemmas
from .words import DEFAULT_BUDGET, parse_word, verbal_subgroup, verbal_width

CHECKS = (
    "axioms",
    "condition-inner",
    "condition-all",
    "lemmas",
    "series",
    "wfin",
    "width-bounds",
    "corex",
    "derivations",
    "theta",
    "gpn-goldens",
    "lincom",
    "reidemeister",
)
DEFAULT_CHECKS = ("axioms", "condition-inner", "series")
SCAN_CHECKS = ("axioms", "condition-inner", "condition-all", "series")


@dataclass
class RunConfig:
    groups: list[str]
    checks: list[str] = field(default_factory=lambda: list(DEFAULT_CHECKS))
    seed: int = 0
    budget: int = DEFAULT_BUDGET
    words: list[str] = field(default_factory=list)
    structured: bool = False
    timing: bool = False

    def echo(self) -> dict:
        return {
            "groups": list(self.groups),
            "checks": list(self.checks),
            "seed": self.seed,
            "budget": self.budget,
            "words": list(self.words),
        }


def _not_applicable(name: str, reason: str) -> CheckReport:
    return CheckReport(name, NOT_APPLICABLE, details={"reason": reason})


def _series(entry: CatalogEntry, cfg: RunConfig) -> CheckReport:
    G = entry.group
    series = lower_central_series(G)
    props = series_properties(G)
    return CheckReport(
        "series",
        PASS if all(props.values()) else FAIL,
        details={
            "sizes": series.sizes(),
            "nilpotency_class": series.nilpotency_class,
            "nilpotent": series.nilpotency_class is not None,
            **props,
        },
    )


def _corex(entry: CatalogEntry, cfg: RunConfig) -> CheckReport:
    if entry.extension is None:
        return _not_applicable("corex", "no abelian-by-cyclic structure recorded for this group")
    return verify_corex(entry.group, entry.extension)


def _derivations(entry: CatalogEntry, cfg: RunConfig) -> CheckReport:
    if entry.extension is None:
        return _not_applicable("derivations", "no abelian-by-cyclic structure recorded for this group")
    return verify_derivations(entry.extension)


def _theta(entry: CatalogEntry, cfg: RunConfig) -> CheckReport:
    if entry.extension is None:
        return _not_applicable("theta", "no abelian-by-cyclic structure recorded for this group")
    try:
        result = theta_map(entry.extension.action)
    except HypothesisError as exc:
        return _not_applicable("theta", str(exc))
    holds = derivation_family_holds(entry.extension)
    details = {
        "condition_inner_and_derivation": holds,
        "p": result.p,
        "acting_exponent": result.exponent,
        "image_in_omega": result.image_in_omega,
        "filtration": {str(k): v for k, v in result.filtration.items()},
    }
    if not holds:
        # the filtration is only forced under the condition; report it without a verdict
        return CheckReport("theta", NOT_APPLICABLE, details=details, witnesses=result.witness or {})
    return CheckReport("theta", PASS if result.ok else FAIL, details=details, witnesses=result.witness or {})


def _gpn_goldens(entry: CatalogEntry, cfg: RunConfig) -> CheckReport:
    spec = entry.group.cache.get("construction")
    if not isinstance(spec, GpnSpec):
        return _not_applicable("gpn-goldens", "not a G(p,n) group")
    parts = [verify_nux(entry.group), verify_7pr(entry.group)]
    order = multiplicative_order(spec.p, spec.n)
    parts.append(
        CheckReport(
            "order-of-p+1",
            PASS if order == spec.p ** (spec.n - 1) else FAIL,
            details={"order": order, "expected": spec.p ** (spec.n - 1)},
        )
    )
    if (spec.p, spec.n) == (3, 3):
        parts.append(reproduce_paper_examples())
    return CheckReport(
        "gpn-goldens",
        combine([p.verdict for p in parts]),
        details={p.name: {"verdict": p.verdict, **p.details} for p in parts},
        witnesses={p.name: p.witnesses for p in parts if p.witnesses},
    )


def _lincom(entry: CatalogEntry, cfg: RunConfig) -> CheckReport:
    if not isinstance(entry.group.cache.get("construction"), AffineSpec):
        return _not_applicable("lincom", "not an affine group")
    return verify_lincom(entry.group)


RUNNERS: dict[str, Callable[[CatalogEntry, RunConfig], CheckReport]] = {
    "axioms": lambda e, c: check_axioms(e.group, seed=c.seed),
    "condition-inner": lambda e, c: condition_report(e.group, INNER),
    "condition-all": lambda e, c: condition_report(e.group, ALL),
    "lemmas": lambda e, c: verify_lemmas(e.group, seed=c.seed),
    "series": _series,
    "wfin": lambda e, c: verify_wfin(e.group),
    "width-bounds": lambda e, c: verify_width_bounds(e.group, c.budget),
    "corex": _corex,
    "derivations": _derivations,
    "theta": _theta,
    "gpn-goldens": _gpn_goldens,
    "lincom": _lincom,
    "reidemeister": lambda e, c: reidemeister_report(e.group),
}


def _word_report(entry: CatalogEntry, text: str, cfg: RunConfig) -> CheckReport:
    G = entry.group
    w = parse_word(text)
    try:
        sub = verbal_subgroup(G, w, cfg.budget)
        width = verbal_width(G, w, cfg.budget)
    except TooLargeError as exc:
        return CheckReport(f"word {w}", SKIPPED, notes=[str(exc)])
    details = {"word": str(w), "verbal_subgroup_order": len(sub), "width": width}
    if len(sub) <= 32:
        details["verbal_subgroup"] = render_set(G, sub)
    return CheckReport(f"word {w}", PASS, details=details)


def _timed(fn, *args) -> CheckReport:
    start = time.perf_counter()
    report = fn(*args)
    report.timing_ms = round((time.perf_counter() - start) * 1000, 3)
    return report


def run_entry(entry: CatalogEntry, cfg: RunConfig) -> list[CheckReport]:
    """Axioms first, then the requested checks in the requested order."""
    order = ["axioms"] + [c for c in cfg.checks if c != "axioms"]
    reports = []
    axioms = None
    for name in order:
        if axioms is not None and axioms.failed:
            reports.append(CheckReport(name, SKIPPED, notes=["group axioms failed"]))
            continue
        try:
            report = _timed(RUNNERS[name], entry, cfg)
        except TooLargeError as exc:
            report = CheckReport(name, SKIPPED, notes=[str(exc)])
        except HypothesisError as exc:
            report = _not_applicable(name, str(exc))
        if name == "axioms":
            axioms = report
            if "axioms" not in cfg.checks:
                if report.failed:
                    reports.append(report)
                continue
        reports.append(report)
    for text in cfg.words:
        reports.append(_timed(_word_report, entry, text, cfg))
    return reports


def _group_block(selector: str, cfg: RunConfig) -> dict:
    try:
        entry = resolve(selector)
    except TooLargeError as exc:
        checks = [CheckReport(name, SKIPPED, notes=[str(exc)]) for name in cfg.checks]
        return {"group": selector, "error": None, "checks": checks}
    G = entry.group
    return {
        "group": selector,
        "name": G.name,
        "order": G.order,
        "generators": [G.label(g) for g in G.generators],
        "checks": run_entry(entry, cfg),
    }


def _render_block(block: dict, timing: bool) -> dict:
    out = {k: v for k, v in block.items() if k not in ("checks", "error")}
    if block.get("error"):
        out["error"] = block["error"]
    out["checks"] = [c.to_dict(include_timing=timing) for c in block["checks"]]
    return out


def run(cfg: RunConfig) -> dict:
    """Run every requested check on every group; raises ``SpecError`` on a bad selector."""
    unknown = [c for c in cfg.checks if c not in RUNNERS]
    if unknown:
        raise SpecError(f"unknown check(s): {', '.join(unknown)}; known: {', '.join(CHECKS)}")
    for text in cfg.words:
        parse_word(text)
    blocks = [_group_block(sel, cfg) for sel in cfg.groups]
    return {
        "tool_version": __version__,
        "config_echo": cfg.echo(),
        "reports": [_render_block(b, cfg.timing) for b in blocks],
    }


def scan(batch: list[str], cfg: RunConfig) -> dict:
    """Condition verdicts against nilpotency class over a batch, one isolated entry per selector."""
    selectors = list(dict.fromkeys(s.strip() for s in batch))
    entry_cfg = RunConfig(selectors, list(SCAN_CHECKS), cfg.seed, cfg.budget)
    reports, summary = [], []
    for sel in selectors:
        try:
            block = _group_block(sel, entry_cfg)
        except GroupError as exc:
            reports.append({"group": sel, "error": str(exc), "checks": []})
            summary.append({"group": sel, "error": str(exc)})
            continue
        reports.append(_render_block(block, cfg.timing))
        verdicts = {c.name: c for c in block["checks"]}
        series = verdicts.get("series")
        nil_class = series.details.get("nilpotency_class") if series and series.details else None
        inner = verdicts["condition-inner"].verdict
        row = {
            "group": sel,
            "order": block.get("order"),
            "condition_inner": inner,
            "condition_all": verdicts["condition-all"].verdict,
            "nilpotency_class": nil_class,
        }
        # inner condition holding must force nilpotency on a finite group
        row["consistent"] = inner != PASS or nil_class is not None
        summary.append(row)
    return {
        "tool_version": __version__,
        "config_echo": {**cfg.echo(), "groups": selectors, "checks": list(SCAN_CHECKS)},
        "reports": reports,
        "summary": summary,
    }


def exit_code(document: dict) -> int:
    for block in document["reports"]:
        if block.get("error"):
            return 1
        if any(c["verdict"] == FAIL for c in block["checks"]):
            return 1
    if any(row.get("consistent") is False for row in document.get("summary", [])):
        return 1
    return 0


def _render_text(document: dict) -> str:
    lines = []
    for block in document["reports"]:
        head = block["group"]
        if "order" in block:
            head += f"  {block.get('name', '')} order {block['order']}"
        lines.append(head)
        if block.get("error"):
            lines.append(f"  error: {block['error']}")
        for c in block["checks"]:
            extra = ""
            if c["verdict"] == FAIL and c.get("witnesses"):
                extra = "  witness: " + json.dumps(c["witnesses"], sort_keys=True, default=_jsonable)[:300]
            lines.append(f"  {c['check']:<16} {c['verdict']}{extra}")
            for note in c.get("notes", []):
                lines.append(f"    note: {note}")
    if "summary" in document:
        lines.append("")
        lines.append(f"{'group':<28} {'order':>6}  {'inner':<15} {'all':<15} class")
        for row in document["summary"]:
            if "error" in row:
                lines.append(f"{row['group']:<28} error: {row['error']}")
                continue
            lines.append(
                f"{row['group']:<28} {row['order'] or '-':>6}  {row['condition_inner']:<15} "
                f"{row['condition_all']:<15} {row['nilpotency_class']}"
            )
    return "\n".join(lines)


def _jsonable(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(document: dict) -> str:
    return json.dumps(document, sort_keys=True, indent=2, default=_jsonable)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="reidemeister",
        description="Check twisted conjugacy class conditions on finite groups.",
    )
    parser.add_argument("--group", action="append", default=[], help="catalog selector or spec file; repeatable")
    parser.add_argument("--check", action="append", default=[], help=f"comma separated subset of: {', '.join(CHECKS)}")
    parser.add_argument("--seed", type=int, default=0, help="seed for every sampled check")
    parser.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="word evaluation cap")
    parser.add_argument("--word", action="append", default=[], help="word such as '[x1,x2,x3]' to evaluate")
    parser.add_argument("--json", action="store_true", help="emit the structured report")
    parser.add_argument("--list-catalog", action="store_true", help="list the default catalog and exit")
    parser.add_argument("--scan", action="store_true", help="condition vs nilpotency summary over the groups (default catalog if none)")
    parser.add_argument("--timing", action="store_true", help="include per-check timings (breaks byte-identical output)")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    if args.seed < 0 or args.seed >= 2**64:
        print("error: --seed must be an unsigned 64-bit integer", file=sys.stderr)
        return 2
    if args.budget <= 0:
        print("error: --budget must be positive", file=sys.stderr)
        return 2
    if args.list_catalog:
        rows = catalog_listing()
        if args.json:
            print(dumps({"tool_version": __version__, "catalog": rows}))
        else:
            for row in rows:
                tail = f"order {row['order']}" if "order" in row else f"unavailable: {row['error']}"
                print(f"{row['selector']:<28} {row.get('name', ''):<12} {tail}")
        return 0
    checks = [c.strip() for spec in args.check for c in spec.split(",") if c.strip()] or list(DEFAULT_CHECKS)
    cfg = RunConfig(args.group, checks, args.seed, args.budget, args.word, args.json, args.timing)
    try:
        if args.scan:
            document = scan(args.group or list(DEFAULT_CATALOG), cfg)
        else:
            if not args.group:
                print("error: give at least one --group (or use --scan / --list-catalog)", file=sys.stderr)
                return 2
            document = run(cfg)
    except SpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except GroupError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(dumps(document) if args.json else _render_text(document))
    return exit_code(document)


if __name__ == "__main__":
    sys.exit(main())
