"""Command-line driver: job configuration, corpus runner, report emission.

Exit codes: 0 success (all verdicts consistent/inconclusive), 1 data error,
2 a violated verdict, 3 an enumeration budget ran out, 64 usage error.
Reports are byte-identical across runs for a fixed configuration and seed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .chains import ChainRecord, SubgroupRecord, p_chain
from .constructions import (
    AmalgamSpec,
    HnnSpec,
    build_amalgam,
    build_hnn,
    dp_bounds_check,
    embedding_sanity,
    kurosh_stats,
)
from .coset import Limits, low_index_normal_subgroups, to_action
from .cost import greedy_graphing_audit, orbit_relation_cost
from .errors import GradientLabError, Indeterminate
from .gradient import (
    FormulaVerdict,
    GradientReport,
    Interval,
    example45,
    rg_absolute_upper,
    rg_sequence,
    verify_amalgam,
    verify_free_product,
    verify_hnn,
)
from .parsing import (
    format_presentation,
    parse_amalgam_file,
    parse_hnn_file,
    parse_presentation,
    parse_subgroup,
)
from .words import GroupPresentation

EXIT_OK = 0
EXIT_DATA_ERROR = 1
EXIT_VIOLATED = 2
EXIT_INDETERMINATE = 3
EXIT_USAGE = 64

DEPTH_CAP = 8
MAX_INDEX_CAP = 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(message)


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


@dataclass
class JobConfig:
    mode: str = "rg"
    prime: int | None = None
    depth: int = 4
    max_index: int = 8
    limits: Limits = Limits()
    seed: int = 0
    trials: int = 100
    fmt: str = "pretty"
    out: str | None = None
    unsafe: bool = False

    def validate(self) -> None:
        if self.mode == "rgp" and self.prime is None:
            raise UsageError("--mode rgp requires a prime via -p")
        if self.prime is not None and not _is_prime(self.prime):
            raise UsageError(f"-p expects a prime, got {self.prime}")
        if not self.unsafe:
            if self.depth > DEPTH_CAP:
                raise UsageError(f"--depth > {DEPTH_CAP} requires --unsafe-limits")
            if self.max_index > MAX_INDEX_CAP:
                raise UsageError(f"--max-index > {MAX_INDEX_CAP} requires --unsafe-limits")


def _frac(x: Fraction) -> str:
    return str(x)


def _interval_dict(iv: Interval | None) -> dict | None:
    if iv is None:
        return None
    return {"lo": _frac(iv.lo), "hi": _frac(iv.hi), "exact": iv.is_exact}


def _verdict_dict(v: FormulaVerdict) -> dict:
    return {
        "formula": v.formula,
        "lhs": _interval_dict(v.lhs),
        "rhs": _interval_dict(v.rhs),
        "status": v.status,
        "notes": list(v.notes),
    }


def _presentation_dict(p: GroupPresentation) -> dict:
    return {
        "label": p.label,
        "generators": list(p.alphabet),
        "relators": [str(r) for r in p.relators],
    }


def _report_dict(rep: GradientReport) -> dict:
    return {
        "group": rep.group_label,
        "mode": rep.mode,
        "prime": rep.prime,
        "chain": {"kind": rep.chain_kind, "stabilized": rep.chain_stabilized},
        "levels": [
            {
                "index": e.index,
                "d_lower": e.d_lower,
                "d_upper": e.d_upper,
                "d_p": e.d_p,
                "value": _interval_dict(e.value),
            }
            for e in rep.levels
        ],
        "running_inf": [_interval_dict(iv) for iv in rep.running_inf],
        "chain_inf": _interval_dict(rep.chain_estimate),
        "chain_inf_is_exact": rep.exact,
        "chain_inf_role": "exact value" if rep.exact else "upper bound for the true infimum",
        "hypotheses": list(rep.hypotheses),
        "verdicts": [_verdict_dict(v) for v in rep.verdicts],
        "notes": list(rep.notes),
    }


def _chain_dict(chain: ChainRecord) -> dict:
    levels = []
    for rec in chain.levels:
        ab = rec.abelian((chain.prime,) if chain.prime else ())
        levels.append(
            {
                "index": rec.index,
                "subgroup_words": [str(w) for w in rec.table.subgroup.words],
                "d_p": ab.d_p_by_prime.get(chain.prime) if chain.prime else None,
                "d_lower": ab.d_lower,
                "d_upper": ab.d_upper,
            }
        )
    return {
        "ambient": _presentation_dict(chain.ambient),
        "kind": chain.kind,
        "prime": chain.prime,
        "stabilized": chain.stabilized,
        "truncated_reason": chain.truncated_reason,
        "levels": levels,
    }


@dataclass
class Report:
    """One command's output: payload for JSON, rows for CSV, lines for pretty."""

    command: str
    payload: dict
    rows: list[dict]
    pretty: list[str]
    exit_code: int = EXIT_OK

    def render(self, fmt: str) -> str:
        if fmt == "json":
            doc = {"schema": 1, "command": self.command}
            doc.update(self.payload)
            return json.dumps(doc, indent=2, sort_keys=True) + "\n"
        if fmt == "csv":
            buf = io.StringIO()
            if self.rows:
                fields = list(self.rows[0].keys())
                writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
                writer.writeheader()
                for row in self.rows:
                    writer.writerow(row)
            return buf.getvalue()
        return "\n".join(self.pretty) + "\n"


def _verdict_exit(statuses: list[str]) -> int:
    if any(s == "violated" for s in statuses):
        return EXIT_VIOLATED
    if any(s == "indeterminate" for s in statuses):
        return EXIT_INDETERMINATE
    if any(s == "error" for s in statuses):
        return EXIT_DATA_ERROR
    return EXIT_OK


def _load_pres(path: str) -> GroupPresentation:
    text = Path(path).read_text(encoding="utf-8")
    return parse_presentation(text, label=Path(path).stem)


# ------------------------------------------------------------------ commands


def _cmd_parse(args, cfg: JobConfig) -> Report:
    if args.pres:
        pres = _load_pres(args.pres)
        payload = {"presentation": _presentation_dict(pres)}
        rows = [
            {"kind": "generator", "value": g} for g in pres.alphabet
        ] + [{"kind": "relator", "value": str(r)} for r in pres.relators]
        pretty = ["parsed presentation:", format_presentation(pres).rstrip()]
        return Report("parse", payload, rows, pretty)
    path = Path(args.spec)
    text = path.read_text(encoding="utf-8")
    if path.suffix == ".hnn":
        spec = parse_hnn_file(text, label=path.stem)
        built = build_hnn(spec)
        payload = {
            "kind": "hnn",
            "base": _presentation_dict(spec.base),
            "a_words": [str(w) for w in spec.a_words],
            "phi_words": [str(w) for w in spec.phi_words],
            "a_order": str(spec.a_finite_order),
            "a_amenable": spec.a_amenable,
            "presentation": _presentation_dict(built.presentation),
        }
    else:
        spec = parse_amalgam_file(text, label=path.stem)
        built = build_amalgam(spec)
        payload = {
            "kind": "amalgam",
            "left": _presentation_dict(spec.left),
            "right": _presentation_dict(spec.right),
            "a_words_left": [str(w) for w in spec.a_words_left],
            "a_words_right": [str(w) for w in spec.a_words_right],
            "a_order": str(spec.a_finite_order),
            "a_amenable": spec.a_amenable,
            "presentation": _presentation_dict(built.presentation),
        }
    pretty = [f"parsed {payload['kind']} construction:", str(built.presentation)]
    rows = [{"kind": payload["kind"], "presentation": str(built.presentation)}]
    return Report("parse", payload, rows, pretty)


def _cmd_subgroups(args, cfg: JobConfig) -> Report:
    pres = _load_pres(args.pres)
    result = low_index_normal_subgroups(pres, cfg.max_index, cfg.limits,
                                        index_cap=10**9 if cfg.unsafe else MAX_INDEX_CAP)
    if isinstance(result, Indeterminate):
        return Report(
            "subgroups",
            {"status": "indeterminate", "reason": result.reason},
            [{"status": "indeterminate", "reason": result.reason}],
            [f"indeterminate: {result.reason}"],
            EXIT_INDETERMINATE,
        )
    primes = (cfg.prime,) if cfg.prime else ()
    rows = []
    for t in result:
        rec = SubgroupRecord(t, normal=True, provenance="low-index")
        ab = rec.abelian(primes)
        row = {
            "index": t.index,
            "d_lower": ab.d_lower,
            "d_upper": ab.d_upper,
            "invariant_factors": " ".join(map(str, ab.invariant_factors)),
        }
        if cfg.prime:
            row[f"d_{cfg.prime}"] = ab.d_p_by_prime[cfg.prime]
        rows.append(row)
    payload = {"group": pres.label, "max_index": cfg.max_index, "subgroups": rows}
    pretty = [f"normal subgroups of {pres.label or pres} up to index {cfg.max_index}:"]
    for row in rows:
        pretty.append(
            f"  index {row['index']:>3}  d in [{row['d_lower']}, {row['d_upper']}]"
            f"  factors: {row['invariant_factors']}"
            + (f"  d_{cfg.prime}: {row[f'd_{cfg.prime}']}" if cfg.prime else "")
        )
    return Report("subgroups", payload, rows, pretty)


def _cmd_chain(args, cfg: JobConfig) -> Report:
    pres = _load_pres(args.pres)
    prime = cfg.prime or 2
    chain = p_chain(pres, prime, cfg.depth, cfg.limits, depth_cap=10**9 if cfg.unsafe else DEPTH_CAP)
    payload = {"chain": _chain_dict(chain)}
    rows = list(payload["chain"]["levels"])
    pretty = [f"mod-{prime} chain on {pres.label or pres} (depth {cfg.depth}):"]
    for lv in rows:
        pretty.append(
            f"  index {lv['index']:>6}  d_{prime} = {lv['d_p']}  d in [{lv['d_lower']}, {lv['d_upper']}]"
        )
    if chain.stabilized:
        pretty.append("  chain stabilised: deeper levels repeat the last one")
    if chain.truncated_reason:
        pretty.append(f"  truncated: {chain.truncated_reason}")
    return Report("chain", payload, rows, pretty)


def _gradient_pretty(rep: GradientReport, prime: int | None) -> list[str]:
    out = [f"{rep.mode} gradient along the chain for {rep.group_label}:"]
    for e in rep.levels:
        d_part = f"d_{prime} = {e.d_p}" if e.d_p is not None else f"d in [{e.d_lower}, {e.d_upper}]"
        out.append(f"  index {e.index:>6}  {d_part:<18} value {e.value}")
    role = "exact" if rep.exact else "upper bound for the true infimum"
    out.append(f"  chain infimum: {rep.chain_estimate} ({role})")
    for h in rep.hypotheses:
        out.append(f"  hypothesis: {h}")
    for n in rep.notes:
        out.append(f"  note: {n}")
    return out


def _cmd_gradient(args, cfg: JobConfig) -> Report:
    pres = _load_pres(args.pres)
    if cfg.mode == "rgp":
        chain = p_chain(pres, cfg.prime, cfg.depth, cfg.limits,
                        depth_cap=10**9 if cfg.unsafe else DEPTH_CAP)
        rep = rg_sequence(chain, "rgp")
        payload = {"report": _report_dict(rep)}
        rows = payload["report"]["levels"]
        return Report("gradient", payload, rows, _gradient_pretty(rep, cfg.prime))
    result = rg_absolute_upper(pres, cfg.max_index, "rg", limits=cfg.limits,
                               index_cap=10**9 if cfg.unsafe else MAX_INDEX_CAP)
    if isinstance(result, Indeterminate):
        return Report(
            "gradient",
            {"status": "indeterminate", "reason": result.reason},
            [{"status": "indeterminate", "reason": result.reason}],
            [f"indeterminate: {result.reason}"],
            EXIT_INDETERMINATE,
        )
    rows = [
        {
            "index": e.index,
            "d_lower": e.d_lower,
            "d_upper": e.d_upper,
            "value_lo": _frac(e.value.lo),
            "value_hi": _frac(e.value.hi),
        }
        for e in result.rows
    ]
    payload = {
        "group": pres.label,
        "max_index": cfg.max_index,
        "estimate": _interval_dict(result.interval),
        "exact": result.exact,
        "witness_index": result.witness.index if result.witness else None,
        "notes": list(result.notes),
        "rows": rows,
    }
    pretty = [f"absolute rank-gradient estimate for {pres.label or pres} (normal, index <= {cfg.max_index}):"]
    for row in rows:
        pretty.append(
            f"  index {row['index']:>3}  d in [{row['d_lower']}, {row['d_upper']}]"
            f"  value in [{row['value_lo']}, {row['value_hi']}]"
        )
    pretty.append(f"  estimate: {result.interval}  witness index {result.witness.index}")
    pretty.extend(f"  note: {n}" for n in result.notes)
    return Report("gradient", payload, rows, pretty)


def _spec_from_path(path_str: str):
    path = Path(path_str)
    text = path.read_text(encoding="utf-8")
    if path.suffix == ".hnn":
        return parse_hnn_file(text, label=path.stem)
    return parse_amalgam_file(text, label=path.stem)


def _cmd_verify(args, cfg: JobConfig) -> Report:
    which = args.what
    prime = cfg.prime or 2
    if which == "free-product":
        left = _load_pres(args.left)
        right = _load_pres(args.right)
        verdict = verify_free_product(
            left, right, cfg.mode, max_index=cfg.max_index, prime=cfg.prime,
            depth=cfg.depth, limits=cfg.limits,
        )
        payload = {"verdict": _verdict_dict(verdict)}
        rows = [_flatten_verdict(verdict)]
        pretty = _verdict_pretty(verdict)
        return Report("verify", payload, rows, pretty, _verdict_exit([verdict.status]))
    if which in ("amalgam", "hnn"):
        spec = _spec_from_path(args.spec)
        if which == "amalgam":
            if not isinstance(spec, AmalgamSpec):
                raise GradientLabError("expected an .amal spec file")
            verdict, rep = verify_amalgam(spec, cfg.mode, prime, cfg.depth, cfg.limits)
        else:
            if not isinstance(spec, HnnSpec):
                raise GradientLabError("expected an .hnn spec file")
            verdict, rep = verify_hnn(spec, cfg.mode, prime, cfg.depth, cfg.limits)
        payload = {"verdict": _verdict_dict(verdict), "report": _report_dict(rep)}
        rows = [_flatten_verdict(verdict)]
        pretty = _gradient_pretty(rep, rep.prime) + _verdict_pretty(verdict)
        return Report("verify", payload, rows, pretty, _verdict_exit([verdict.status]))
    # dp-bounds
    spec = _spec_from_path(args.spec)
    group = build_amalgam(spec) if isinstance(spec, AmalgamSpec) else build_hnn(spec)
    result = low_index_normal_subgroups(group.presentation, cfg.max_index, cfg.limits,
                                        index_cap=10**9 if cfg.unsafe else MAX_INDEX_CAP)
    if isinstance(result, Indeterminate):
        return Report(
            "verify",
            {"status": "indeterminate", "reason": result.reason},
            [{"status": "indeterminate", "reason": result.reason}],
            [f"indeterminate: {result.reason}"],
            EXIT_INDETERMINATE,
        )
    rows = []
    all_hold = True
    for t in result:
        rec = SubgroupRecord(t, normal=True, provenance="low-index")
        rep = dp_bounds_check(group, rec, prime)
        all_hold = all_hold and rep.holds
        rows.append(
            {
                "index": t.index,
                "whole": f"{rep.whole_lower} <= {rep.whole_value} <= {rep.whole_upper}",
                "whole_holds": rep.whole_holds,
                "subgroup": f"{rep.subgroup_lower} <= {rep.subgroup_value} <= {rep.subgroup_upper}",
                "subgroup_holds": rep.subgroup_holds,
            }
        )
    status = "consistent" if all_hold else "violated"
    payload = {"prime": prime, "rows": rows, "status": status}
    pretty = [f"mod-{prime} rank bounds for {group.presentation.label}:"]
    for row in rows:
        pretty.append(
            f"  index {row['index']:>3}  whole: {row['whole']}  subgroup: {row['subgroup']}"
        )
    pretty.append(f"overall: {status}")
    return Report("verify", payload, rows, pretty, _verdict_exit([status]))


def _flatten_verdict(v: FormulaVerdict) -> dict:
    return {
        "formula": v.formula,
        "lhs_lo": _frac(v.lhs.lo) if v.lhs else "",
        "lhs_hi": _frac(v.lhs.hi) if v.lhs else "",
        "rhs_lo": _frac(v.rhs.lo) if v.rhs else "",
        "rhs_hi": _frac(v.rhs.hi) if v.rhs else "",
        "status": v.status,
    }


def _verdict_pretty(v: FormulaVerdict) -> list[str]:
    out = [f"verdict [{v.formula}]: {v.status}"]
    if v.lhs is not None:
        out.append(f"  lhs (constructed group): {v.lhs}")
    if v.rhs is not None:
        out.append(f"  rhs (formula): {v.rhs}")
    out.extend(f"  note: {n}" for n in v.notes)
    return out


def _cmd_kurosh(args, cfg: JobConfig) -> Report:
    spec = _spec_from_path(args.spec)
    group = build_amalgam(spec) if isinstance(spec, AmalgamSpec) else build_hnn(spec)
    result = low_index_normal_subgroups(group.presentation, cfg.max_index, cfg.limits,
                                        index_cap=10**9 if cfg.unsafe else MAX_INDEX_CAP)
    if isinstance(result, Indeterminate):
        return Report(
            "kurosh",
            {"status": "indeterminate", "reason": result.reason},
            [{"status": "indeterminate", "reason": result.reason}],
            [f"indeterminate: {result.reason}"],
            EXIT_INDETERMINATE,
        )
    rows = []
    warnings: list[str] = []
    for t in result:
        rec = SubgroupRecord(t, normal=True, provenance="low-index")
        ks = kurosh_stats(group, rec)
        warnings.extend(embedding_sanity(group, rec))
        rows.append(
            {
                "index": t.index,
                "double_cosets_a": ks.double_cosets_a,
                "double_cosets_factors": " ".join(map(str, ks.double_cosets_factors)),
                "free_generators": ks.free_generator_count,
                "amalgamation_bound": ks.amalgamation_bound,
            }
        )
    payload = {
        "kind": group.kind,
        "group": group.presentation.label,
        "rows": rows,
        "warnings": sorted(set(warnings)),
    }
    pretty = [f"subgroup decomposition statistics for {group.presentation.label} ({group.kind}):"]
    for row in rows:
        pretty.append(
            f"  index {row['index']:>3}  |H\\G/A| = {row['double_cosets_a']}"
            f"  factors: {row['double_cosets_factors']}"
            f"  free generators: {row['free_generators']}"
            f"  amalgamation bound: {row['amalgamation_bound']}"
        )
    pretty.extend(f"  warning: {w}" for w in payload["warnings"])
    return Report("kurosh", payload, rows, pretty)


def _cmd_cost(args, cfg: JobConfig) -> Report:
    pres = _load_pres(args.pres)
    sub_text = Path(args.sub).read_text(encoding="utf-8")
    l_spec = parse_subgroup(sub_text, pres)
    result = low_index_normal_subgroups(pres, cfg.max_index, cfg.limits,
                                        index_cap=10**9 if cfg.unsafe else MAX_INDEX_CAP)
    if isinstance(result, Indeterminate):
        return Report(
            "cost",
            {"status": "indeterminate", "reason": result.reason},
            [{"status": "indeterminate", "reason": result.reason}],
            [f"indeterminate: {result.reason}"],
            EXIT_INDETERMINATE,
        )
    rows = []
    all_match = True
    for t in result:
        act = to_action(t)
        rep = orbit_relation_cost(act, l_spec)
        audit = greedy_graphing_audit(act, l_spec, trials=cfg.trials, seed=cfg.seed)
        all_match = all_match and rep.match and audit.all_at_least_min
        rows.append(
            {
                "index": t.index,
                "orbits": rep.orbit_count,
                "min_cost": _frac(rep.min_cost),
                "predicted": _frac(rep.predicted),
                "match": rep.match,
                "audit_ok": audit.all_at_least_min,
            }
        )
    status = "consistent" if all_match else "violated"
    payload = {
        "group": pres.label,
        "subgroup_words": [str(w) for w in l_spec.words],
        "rows": rows,
        "status": status,
        "note": "finite-quotient values only; no profinite limit is implied",
    }
    pretty = [f"restricted-cost identity on finite quotients of {pres.label or pres}:"]
    for row in rows:
        pretty.append(
            f"  index {row['index']:>3}  orbits {row['orbits']:>3}"
            f"  min_cost {row['min_cost']:>8}  predicted {row['predicted']:>8}"
            f"  match: {row['match']}  audit: {row['audit_ok']}"
        )
    pretty.append(f"overall: {status}")
    return Report("cost", payload, rows, pretty, _verdict_exit([status]))


def _cmd_example45(args, cfg: JobConfig) -> Report:
    res = example45(args.r)
    payload = {
        "r": res.r,
        "value": _frac(res.value),
        "terms": [_frac(t) for t in res.terms],
        "impossible": res.impossible,
        "note": res.note,
    }
    rows = [payload]
    pretty = [
        f"naive amalgam subtraction value at r = {res.r}: {res.value}",
        f"  terms: {' + '.join(_frac(t) for t in res.terms[:2])} - {_frac(-res.terms[2])}",
        f"  {res.note}",
    ]
    return Report("example45", payload, rows, pretty)


def _cmd_corpus(args, cfg: JobConfig) -> Report:
    directory = Path(args.dir)
    if not directory.is_dir():
        raise GradientLabError(f"not a directory: {directory}")
    prime = cfg.prime or 2
    rows = []
    statuses = []
    for path in sorted(directory.iterdir()):
        if path.suffix not in (".grp", ".amal", ".hnn"):
            continue
        row = {"file": path.name, "status": "", "detail": ""}
        try:
            if path.suffix == ".grp":
                pres = parse_presentation(path.read_text(encoding="utf-8"), label=path.stem)
                chain = p_chain(pres, prime, cfg.depth, cfg.limits)
                rep = rg_sequence(chain, "rgp")
                ok = rep.is_monotone_nonincreasing() and all(
                    v.lo >= -1 for v in rep.values
                )
                row["status"] = "consistent" if ok else "violated"
                row["detail"] = f"chain inf {rep.chain_estimate}"
                if chain.truncated_reason:
                    row["detail"] += f" (truncated: {chain.truncated_reason})"
            elif path.suffix == ".amal":
                spec = parse_amalgam_file(path.read_text(encoding="utf-8"), label=path.stem)
                verdict, _ = verify_amalgam(spec, cfg.mode if cfg.mode == "rgp" else "rg",
                                            prime, cfg.depth, cfg.limits)
                row["status"] = verdict.status
                row["detail"] = f"lhs {verdict.lhs} rhs {verdict.rhs}"
            else:
                spec = parse_hnn_file(path.read_text(encoding="utf-8"), label=path.stem)
                verdict, _ = verify_hnn(spec, cfg.mode if cfg.mode == "rgp" else "rg",
                                        prime, cfg.depth, cfg.limits)
                row["status"] = verdict.status
                row["detail"] = f"lhs {verdict.lhs} rhs {verdict.rhs}"
        except (GradientLabError, OSError) as exc:
            row["status"] = "error"
            row["detail"] = str(exc)
        rows.append(row)
        statuses.append(row["status"])
    passed = sum(1 for s in statuses if s in ("consistent", "inconclusive"))
    payload = {
        "directory": str(directory),
        "rows": rows,
        "total": len(rows),
        "passed": passed,
    }
    pretty = [f"corpus run over {directory} ({len(rows)} files):"]
    for row in rows:
        pretty.append(f"  {row['file']:<24} {row['status']:<13} {row['detail']}")
    pretty.append(f"passed {passed}/{len(rows)}")
    return Report("corpus", payload, rows, pretty, _verdict_exit(statuses))


# ------------------------------------------------------------------- driver


def build_parser() -> _Parser:
    parser = _Parser(prog="gradientlab", description=__doc__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--mode", choices=["rg", "rgp"], default="rg")
    common.add_argument("-p", "--prime", type=int, default=None)
    common.add_argument("--depth", type=int, default=4)
    common.add_argument("--max-index", type=int, default=8)
    common.add_argument("--max-cosets", type=int, default=None)
    common.add_argument("--max-steps", type=int, default=None)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--trials", type=int, default=100)
    common.add_argument("--out", default=None)
    common.add_argument("--format", choices=["json", "csv", "pretty"], default="pretty")
    common.add_argument("--unsafe-limits", action="store_true")

    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("parse", parents=[common])
    p.add_argument("--pres")
    p.add_argument("--spec")
    p = sub.add_parser("subgroups", parents=[common])
    p.add_argument("--pres", required=True)
    p = sub.add_parser("chain", parents=[common])
    p.add_argument("--pres", required=True)
    p = sub.add_parser("gradient", parents=[common])
    p.add_argument("--pres", required=True)
    p = sub.add_parser("verify", parents=[common])
    p.add_argument("what", choices=["free-product", "amalgam", "hnn", "dp-bounds"])
    p.add_argument("--left")
    p.add_argument("--right")
    p.add_argument("--spec")
    p = sub.add_parser("kurosh", parents=[common])
    p.add_argument("--spec", required=True)
    p = sub.add_parser("cost", parents=[common])
    p.add_argument("--pres", required=True)
    p.add_argument("--sub", required=True)
    p = sub.add_parser("example45", parents=[common])
    p.add_argument("--r", type=int, required=True)
    p = sub.add_parser("corpus", parents=[common])
    p.add_argument("dir")
    return parser


_COMMANDS = {
    "parse": _cmd_parse,
    "subgroups": _cmd_subgroups,
    "chain": _cmd_chain,
    "gradient": _cmd_gradient,
    "verify": _cmd_verify,
    "kurosh": _cmd_kurosh,
    "cost": _cmd_cost,
    "example45": _cmd_example45,
    "corpus": _cmd_corpus,
}


def run(argv: list[str]) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        limits_kwargs = {}
        if args.max_cosets is not None:
            limits_kwargs["max_cosets"] = args.max_cosets
        if args.max_steps is not None:
            limits_kwargs["max_steps"] = args.max_steps
        cfg = JobConfig(
            mode=args.mode,
            prime=args.prime,
            depth=args.depth,
            max_index=args.max_index,
            limits=Limits(**limits_kwargs),
            seed=args.seed,
            trials=args.trials,
            fmt=args.format,
            out=args.out,
            unsafe=args.unsafe_limits,
        )
        cfg.validate()
        if args.command == "parse" and not (args.pres or args.spec):
            raise UsageError("parse needs --pres or --spec")
        if args.command == "verify":
            if args.what == "free-product" and not (args.left and args.right):
                raise UsageError("verify free-product needs --left and --right")
            if args.what in ("amalgam", "hnn", "dp-bounds") and not args.spec:
                raise UsageError(f"verify {args.what} needs --spec")
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        report = _COMMANDS[args.command](args, cfg)
    except (GradientLabError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA_ERROR
    text = report.render(cfg.fmt)
    if cfg.out:
        Path(cfg.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return report.exit_code


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
