"""Command-line front end."""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

from .bulldoze import TruncationTooShallow, truncation_dot, uspo_countermodel
from .calculi import CALCULI, LABEL_TO_TAG, RULES, CalculusSpec
from .certify import certify_open_branch, countermodel
from .engine import DEFAULT_BUDGET, Decision, Verdict, decide, satisfy
from .loopcheck import dump_tsets, generation_graph
from .output import (countermodel_doc, countermodel_text, dumps, proof_doc,
                     proof_text)
from .semantics import FrameClass, OracleBudgetExceeded, oracle_countermodel
from .syntax import (At, Neg, ParseError, fresh_nominal, nominals, parse,
                     to_nnf, to_text)

EXIT_PROVABLE, EXIT_NOT_PROVABLE, EXIT_BUDGET, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3, 4
MAX_ORACLE_WORLDS = 5


class UsageError(Exception):
    pass


class CertificateFailure(Exception):
    pass


@dataclass
class RunConfig:
    calculus: CalculusSpec
    budget: int = DEFAULT_BUDGET
    seed: Optional[int] = None
    proof: bool = False
    countermodel: bool = False
    certificate: Optional[str] = None
    truncate: Optional[int] = None
    oracle: Optional[int] = None
    dump_loopcheck: bool = False
    dot: Optional[str] = None
    fmt: str = "text"
    nominals: tuple = ()
    satisfiable: bool = False
    unicode: bool = True


def parse_rules(toggles: str, base: CalculusSpec) -> CalculusSpec:
    add, remove, d = [], [], None
    for item in filter(None, (s.strip() for s in toggles.split(","))):
        sign, name = item[0], item[1:]
        if sign not in "+-" or not name:
            raise UsageError(f"bad rule toggle {item!r}; use +name or -name")
        if name.upper() == "D":
            d = sign == "+"
            continue
        tag = LABEL_TO_TAG.get(name, name.lower())
        if tag not in RULES:
            raise UsageError(f"unknown rule {name!r}; known: {', '.join(RULES)}")
        (add if sign == "+" else remove).append(tag)
    return base.with_rules(add, remove, d)


def _oracle_check(f, d: Decision, cfg: RunConfig, cm) -> dict:
    """Cross-check a verdict against brute-force model search."""
    k = cfg.oracle
    target = cfg.calculus.target_class
    if d.verdict is Verdict.PROVABLE:
        try:
            if target is FrameClass.USPO:
                found = uspo_countermodel(f, min(k, 3))
            else:
                found = oracle_countermodel(f, target, k)
        except OracleBudgetExceeded as exc:
            return {"checked": False, "reason": str(exc)}
        if found is not None:
            raise CertificateFailure(
                f"oracle found a {target.value} countermodel for a formula "
                "judged provable")
        return {"checked": True, "max_worlds": k, "countermodel": None}
    if d.verdict is Verdict.NOT_PROVABLE and cm is not None:
        if not cm.holds(f if cfg.satisfiable else to_nnf(Neg(f))):
            raise CertificateFailure("countermodel does not falsify the formula")
        return {"checked": True, "certificate": "verified"}
    return {"checked": False}


def run_one(f, cfg: RunConfig) -> tuple[int, dict, str]:
    """Decide ``f``; return (exit code, json document, text report)."""
    cal = cfg.calculus
    if cfg.satisfiable:
        root = At(fresh_nominal(nominals(f)), f)
        d = satisfy(root, cal, cfg.budget, cfg.seed)
    else:
        d = decide(f, cal, cfg.budget, cfg.seed)
    doc: dict = {"formula": to_text(f), "calculus": cal.name,
                 "verdict": d.verdict.value, "firings": d.firings}
    text: list[str] = []
    if cfg.satisfiable:
        label = {Verdict.PROVABLE: "unsatisfiable", Verdict.NOT_PROVABLE: "satisfiable",
                 Verdict.BUDGET: "budget exceeded"}[d.verdict]
        doc["verdict"] = label
        text.append(label)
    else:
        text.append(d.verdict.value)
    if cal.experimental:
        doc["experimental"] = True
        text.append("(experimental rule set: no correctness guarantee)")

    cm = None
    if d.verdict is Verdict.NOT_PROVABLE:
        report = certify_open_branch(d.branch)
        cm = countermodel(d.branch)
        if not cal.experimental and not report:
            raise CertificateFailure("; ".join(report.violations[:5]))
        doc["certified"] = report.passed
    if cfg.proof:
        doc["proof"] = proof_doc(d)
        text.append(proof_text(d.tableau, cfg.unicode).rstrip("\n"))
    if cm is not None and (cfg.countermodel or cfg.certificate or cfg.dot):
        cdoc = countermodel_doc(cm, f, cfg.truncate)
        if cfg.countermodel:
            doc["countermodel"] = cdoc
            where = "satisfied at" if cfg.satisfiable else "falsified at"
            text.append(countermodel_text(cm, cfg.truncate, where).rstrip("\n"))
        if cfg.certificate:
            with open(cfg.certificate, "w", encoding="utf-8") as fh:
                fh.write(dumps(cdoc))
        if cfg.dot:
            m = (cm.extracted.model if cm.bulldozed is None
                 else cm.bulldozed.truncate(cfg.truncate or 3))
            with open(cfg.dot, "w", encoding="utf-8") as fh:
                fh.write(truncation_dot(m, "countermodel"))
    if cfg.dump_loopcheck:
        b = d.branch or next(n.branch for n in d.tableau.leaves() if n.branch)
        dump = dump_tsets(b, unicode=cfg.unicode)
        doc["loopcheck"] = {"tsets": dump.splitlines(),
                            "generation": generation_graph(b).to_dot()}
        text.append(dump.rstrip("\n"))
        text.append(generation_graph(b).to_dot().rstrip("\n"))
    if cfg.oracle is not None:
        doc["oracle"] = _oracle_check(f, d, cfg, cm)
    code = {Verdict.PROVABLE: EXIT_PROVABLE, Verdict.NOT_PROVABLE: EXIT_NOT_PROVABLE,
            Verdict.BUDGET: EXIT_BUDGET}[d.verdict]
    return code, doc, "\n".join(text) + "\n"


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="hybridtab",
        description="Decide formulas of hybrid logic with @ by terminating "
                    "tableaux over all frames, strict partial orders, serial "
                    "strict partial orders or partial orders.")
    p.add_argument("formula", nargs="?", help="formula text (or use --file)")
    p.add_argument("--file", help="read the formula from a file")
    p.add_argument("--calculus", choices=sorted(CALCULI), default="k")
    p.add_argument("--proof", action="store_true", help="print the tableau")
    p.add_argument("--countermodel", action="store_true",
                   help="print the countermodel of an unprovable formula")
    p.add_argument("--certificate", metavar="PATH",
                   help="write the countermodel certificate as JSON")
    p.add_argument("--truncate", type=int, metavar="N",
                   help="include a truncation to N copies in countermodel output")
    p.add_argument("--dot", metavar="PATH",
                   help="write the (truncated) countermodel as a DOT graph")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET,
                   help="rule firings allowed per branch")
    p.add_argument("--seed", type=int, help="randomise rule order with this seed")
    p.add_argument("--oracle", type=int, metavar="K",
                   help="cross-check against model search up to K worlds")
    p.add_argument("--dump-loopcheck", action="store_true",
                   help="print signatures and the generation forest")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--nominals", default="",
                   help="comma separated names to read as nominals")
    p.add_argument("--ascii", action="store_true", help="ASCII-only text output")
    p.add_argument("--satisfiable", action="store_true",
                   help="run the tableau on the formula itself instead of its "
                        "negation (exit 0 then means unsatisfiable)")
    p.add_argument("--batch", metavar="FILE",
                   help="one formula per line; results as JSON lines")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for --batch")
    p.add_argument("--experimental", action="store_true",
                   help="allow --rules; results carry no guarantee")
    p.add_argument("--rules", default="",
                   help="with --experimental: +tag/-tag rule toggles, +D/-D "
                        "for the loop check restriction")
    return p


def make_config(args) -> RunConfig:
    if args.budget < 1:
        raise UsageError("--budget must be at least 1")
    if args.oracle is not None and not 1 <= args.oracle <= MAX_ORACLE_WORLDS:
        raise UsageError(f"--oracle must be between 1 and {MAX_ORACLE_WORLDS}")
    if args.truncate is not None and args.truncate < 2:
        raise UsageError("--truncate needs at least 2 copies")
    if args.jobs < 1:
        raise UsageError("--jobs must be at least 1")
    cal = CALCULI[args.calculus]
    if args.rules:
        if not args.experimental:
            raise UsageError("--rules requires --experimental")
        cal = parse_rules(args.rules, cal)
    noms = tuple(filter(None, (s.strip() for s in args.nominals.split(","))))
    return RunConfig(cal, args.budget, args.seed, args.proof, args.countermodel,
                     args.certificate, args.truncate, args.oracle,
                     args.dump_loopcheck, args.dot, args.format, noms,
                     args.satisfiable, not args.ascii)


def _batch_item(item):
    text, cfg = item
    try:
        f = parse(text, nominals=cfg.nominals)
        code, doc, _ = run_one(f, cfg)
        doc["exit"] = code
    except ParseError as exc:
        doc = {"formula": text, "error": f"parse error: {exc}", "exit": EXIT_USAGE}
    except CertificateFailure as exc:
        doc = {"formula": text, "error": f"certificate failure: {exc}",
               "exit": EXIT_INTERNAL}
    return doc


def run_batch(path: str, cfg: RunConfig, jobs: int, out) -> int:
    with open(path, encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh]
    items = [(ln, cfg) for ln in lines if ln and not ln.startswith("#")]
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            docs = list(pool.map(_batch_item, items, chunksize=4))
    else:
        docs = [_batch_item(it) for it in items]
    worst = 0
    for doc in docs:
        out.write(json.dumps(doc, ensure_ascii=False, sort_keys=True) + "\n")
        if doc["exit"] in (EXIT_USAGE, EXIT_INTERNAL):
            worst = max(worst, doc["exit"])
    return worst


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    out = sys.stdout
    try:
        cfg = make_config(args)
        if args.batch:
            return run_batch(args.batch, cfg, args.jobs, out)
        if args.file:
            with open(args.file, encoding="utf-8") as fh:
                text = fh.read().strip()
        elif args.formula is not None:
            text = args.formula
        else:
            raise UsageError("give a formula, --file or --batch")
        f = parse(text, nominals=cfg.nominals)
        code, doc, report = run_one(f, cfg)
    except (UsageError, OSError) as exc:
        print(f"hybridtab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"hybridtab: parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CertificateFailure, TruncationTooShallow) as exc:
        print(f"hybridtab: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    if cfg.fmt == "json":
        out.write(json.dumps(doc, indent=2, ensure_ascii=False) + "\n")
    else:
        out.write(report)
    return code


if __name__ == "__main__":
    sys.exit(main())
