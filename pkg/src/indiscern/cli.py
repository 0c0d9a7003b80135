"""Command-line front end.

Every verb prints a text report.  ``--json PATH`` also writes a structured
report; identical inputs and flags give byte-identical files.

Exit status: 0 on success (negative findings such as "not discerned within
budget" included), 1 when ``frege`` rejects the candidate or ``validate``
finds violations, 2 on input errors.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys

from . import __version__
from .automorphism import automorphism_group, rigidify
from .discernibility import classify_all, henkin_leibniz, leibniz_full, leibniz_separator, verify_hierarchy
from .errors import IndiscernError
from .logic import EnumerationBudget, evaluate, frege_congruence_check, hb_identity
from .quotient import CongruencePartition, classes_of, ef_game, quotient, truth_transfer_check
from .structfile import dumps, load
from .structures import Structure, validate

REPORT_FORMAT = "indiscern-report"
REPORT_VERSION = 1

VERBS = ("validate", "orbits", "group", "rigidify", "classify", "hierarchy", "hb", "frege", "quotient", "ef",
         "leibniz")


class InputError(Exception):
    pass


def digest(s: Structure) -> str:
    return hashlib.sha256(dumps(s).encode("utf-8")).hexdigest()


def _budget(args) -> EnumerationBudget:
    return EnumerationBudget(args.max_rank, args.max_nodes, args.max_formulas, args.atomic_only, args.allow_equality)


def _parse_blocks(text: str, n: int) -> CongruencePartition:
    # "0,3;1,4;2,5"; unlisted elements become singleton blocks
    blocks = []
    for part in text.split(";"):
        part = part.strip()
        if part:
            try:
                blocks.append([int(x) for x in part.split(",")])
            except ValueError:
                raise InputError(f"bad --blocks value {text!r}; expected e.g. 0,3;1,4;2,5") from None
    seen = {x for b in blocks for x in b}
    blocks += [[x] for x in range(n) if x not in seen]
    try:
        return CongruencePartition.from_blocks(n, blocks)
    except ValueError as exc:
        raise InputError(f"bad --blocks value: {exc}") from None


def _candidate_pairs(s: Structure, args):
    if args.blocks:
        return _parse_blocks(args.blocks, s.size).pairs()
    name = args.relation or s.signature.equality
    if name is None:
        raise InputError("no candidate relation: pass --relation NAME or --blocks, or declare an equality symbol")
    if not s.signature.has_relation(name) or s.signature.arity(name) != 2:
        raise InputError(f"{name!r} is not a binary relation of the structure")
    return s.relations[name]


# ---- verbs: each returns (text lines, payload, exit status) ----------------


def cmd_validate(s, args):
    report = validate(s)
    lines = [f"{s.name}: " + ("valid" if report.valid else "invalid")]
    lines += [f"  {m}" for m in report.messages()]
    return lines, {"valid": report.valid, "violations": report.messages()}, 0 if report.valid else 1


def cmd_orbits(s, args):
    group = automorphism_group(s)
    lines = [f"{s.name}: {len(group.orbits)} orbit(s)"]
    lines += ["  {" + ", ".join(str(x) for x in o) + "}" for o in group.orbits]
    return lines, {"orbits": [list(o) for o in group.orbits], "rigid": group.order == 1}, 0


def cmd_group(s, args):
    group = automorphism_group(s)
    lines = [f"{s.name}: automorphism group of order {group.order}",
             "  generators: " + (", ".join(g.cycle_notation() for g in group.generators) or "none"),
             "  orbits: " + " ".join("{" + ",".join(map(str, o)) + "}" for o in group.orbits)]
    return lines, group.as_dict(), 0


def cmd_rigidify(s, args):
    ext, added = rigidify(s, args.strategy)
    text = dumps(ext)
    lines = [text.rstrip("\n"), f"# added {len(added)} predicate(s): " + ", ".join(f"{p}={{{e}}}" for p, e in added)]
    return lines, {"strategy": args.strategy, "added": [[p, e] for p, e in added], "structure": text}, 0


def cmd_classify(s, args):
    budget = _budget(args)
    records = classify_all(s, budget)
    lines = [f"{s.name}: pair classification"]
    for c in records:
        line = f"  ({c.pair[0]},{c.pair[1]}) {c.verdict}"
        if c.witness is not None:
            line += f"  witness {c.witness}"
        if c.orbit_certificate is not None:
            line += f"  automorphism {c.orbit_certificate.cycle_notation()}"
        lines.append(line)
    return lines, {"budget": budget.as_dict(), "pairs": [c.as_dict() for c in records]}, 0


def cmd_hierarchy(s, args):
    report = verify_hierarchy(s, _budget(args))
    lines = [f"{s.name}: implication chain " + ("holds" if report.passed else "FAILS"),
             "  " + ", ".join(f"{k}={v}" for k, v in report.principles.items())]
    for it in report.items:
        lines.append(f"  ({it.key}) {it.claim}: {it.status}" + (f" [{it.detail}]" if it.detail else ""))
    lines.append("  singleton extension: every pair atomically absolutely discernible = "
                 f"{report.rigid_extension['all_atomic_absolute']}")
    return lines, report.as_dict(), 0


def cmd_hb(s, args):
    phi = hb_identity(s.signature)
    n = s.size
    pairs = sorted((a, b) for a in range(n) for b in range(n) if evaluate(s, phi, {"x": a, "y": b}))
    blocks = classes_of(n, pairs)
    diag = all(a == b for a, b in pairs)
    lines = [str(phi), "  relation classes: " + " ".join("{" + ",".join(map(str, b)) + "}" for b in blocks),
             "  equals the diagonal" if diag else "  not the diagonal"]
    return lines, {"formula": str(phi), "pairs": [list(p) for p in pairs], "classes": blocks,
                   "is_diagonal": diag}, 0


def cmd_frege(s, args):
    pairs = _candidate_pairs(s, args)
    report = frege_congruence_check(s, pairs, _budget(args))
    lines = [f"{s.name}: {report.verdict}",
             f"  formulas checked: {report.formulas_checked}" + (" (budget truncated)" if report.truncated else "")]
    if report.counterexample:
        cx = report.counterexample
        lines.append(f"  context {cx['context']} with {cx['distinguished']} := {cx['pair'][0]} -> {cx['pair'][1]}, "
                     f"{cx['parameter']} := {cx['parameter_value']}")
    return lines, report.as_dict(), 0 if report.passed else 1


def cmd_quotient(s, args):
    if args.blocks:
        part = _parse_blocks(args.blocks, s.size)
    elif s.signature.equality is not None:
        part = CongruencePartition.from_blocks(s.size, classes_of(s.size, s.relations[s.signature.equality]))
    else:
        raise InputError("no partition: pass --blocks or declare an equality symbol")
    qm = quotient(s, part)
    text = dumps(qm.target, qm.f)
    transfer = truth_transfer_check(qm, _budget(args))
    lines = [text.rstrip("\n"), "# truth transfer: " + ("pass" if transfer.passed else "FAIL")
             + f" ({transfer.formulas_checked} formulas)"]
    return lines, {"blocks": part.as_lists(), "map": list(qm.f), "structure": text,
                   "truth_transfer": transfer.as_dict()}, 0


def cmd_ef(pair, args):
    A, B = pair
    result = ef_game(A, B, args.rounds)
    if result.equivalent:
        lines = [f"equivalent at rank {args.rounds}"]
    else:
        lines = [f"separated within {args.rounds} round(s)"]
        for step in result.trace:
            other = "B" if step["spoiler"] == "A" else "A"
            line = (f"  round {step['round']}: Spoiler picks {step['pick']} in {step['spoiler']}, "
                    f"Duplicator answers {step['reply']} in {other}")
            if not step["partial_isomorphism"]:
                line += "; no longer a partial isomorphism"
            lines.append(line)
    return lines, result.as_dict(), 0


def _element(s, text):
    try:
        e = int(text)
    except ValueError:
        if s.names is not None and text in s.names:
            return s.names.index(text)
        raise InputError(f"unknown element {text!r}") from None
    if not 0 <= e < s.size:
        raise InputError(f"element {e} outside the domain 0..{s.size - 1}")
    return e


def cmd_leibniz(s, args):
    family = [p for p in (args.family or "").split(",") if p]
    for p in family:
        if not s.signature.has_relation(p):
            raise InputError(f"unknown predicate {p!r} in --family")
    if args.elements:
        if len(args.elements) != 2:
            raise InputError("leibniz takes either no elements or exactly two")
        pairs = [tuple(_element(s, t) for t in args.elements)]
    else:
        pairs = [(a, b) for a in range(s.size) for b in range(a + 1, s.size)]
    records, lines = [], [f"{s.name}: Leibniz equivalence" + (f" (family {','.join(family)})" if args.family else "")]
    for a, b in pairs:
        rec = {"pair": [a, b], "full": leibniz_full(s, a, b), "separator": leibniz_separator(s, a, b)}
        line = f"  ({a},{b}) full powerset: {'same sets' if rec['full'] else 'separated by ' + str(rec['separator'])}"
        if args.family is not None:
            rec["family"] = henkin_leibniz(s, family, a, b)
            line += f"; listed family: {'same sets' if rec['family'] else 'separated'}"
        records.append(rec)
        lines.append(line)
    return lines, {"family": family if args.family is not None else None, "pairs": records}, 0


HANDLERS = {
    "validate": cmd_validate, "orbits": cmd_orbits, "group": cmd_group, "rigidify": cmd_rigidify,
    "classify": cmd_classify, "hierarchy": cmd_hierarchy, "hb": cmd_hb, "frege": cmd_frege,
    "quotient": cmd_quotient, "ef": cmd_ef, "leibniz": cmd_leibniz,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", metavar="PATH", help="also write a structured report to PATH")
    budget = argparse.ArgumentParser(add_help=False)
    budget.add_argument("--max-rank", type=int, default=2, help="maximum quantifier rank (default 2)")
    budget.add_argument("--max-nodes", type=int, default=9, help="maximum formula size in AST nodes (default 9)")
    budget.add_argument("--max-formulas", type=int, default=50_000,
                        help="cap on distinct formulas built (default 50000)")
    budget.add_argument("--atomic-only", action="store_true", help="search literals only")
    budget.add_argument("--allow-equality", action="store_true", help="admit equality atoms")

    parser = argparse.ArgumentParser(prog="indiscern", description="Identity and indiscernibility in finite structures")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="verb", required=True, metavar="VERB")

    def add(verb, help_text, parents=(common,)):
        p = sub.add_parser(verb, help=help_text, parents=list(parents))
        return p

    add("validate", "check a structure file").add_argument("file")
    add("orbits", "orbits of the automorphism group").add_argument("file")
    add("group", "automorphism group: order, generators, orbits").add_argument("file")
    p = add("rigidify", "add singleton predicates until rigid")
    p.add_argument("file")
    p.add_argument("--strategy", choices=("full", "greedy"), default="full")
    add("classify", "classify every pair of elements", (common, budget)).add_argument("file")
    add("hierarchy", "check the discernibility implication chain", (common, budget)).add_argument("file")
    add("hb", "the defined-identity formula and the relation it defines").add_argument("file")
    p = add("frege", "check a candidate identity relation against the substitution schema", (common, budget))
    p.add_argument("file")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--relation", help="binary relation to test (default: the equality symbol)")
    g.add_argument("--blocks", help="partition to test, e.g. 0,3;1,4;2,5")
    p = add("quotient", "quotient by a congruence, with a truth-transfer check", (common, budget))
    p.add_argument("file")
    p.add_argument("--blocks", help="partition, e.g. 0,3;1,4;2,5 (default: classes of the equality symbol)")
    p = add("ef", "Ehrenfeucht-Fraisse game between two structures")
    p.add_argument("file")
    p.add_argument("file2")
    p.add_argument("--rounds", type=int, default=3)
    p = add("leibniz", "Leibniz equivalence over the full powerset or a listed family")
    p.add_argument("file")
    p.add_argument("elements", nargs="*", help="two elements (index or name); default all pairs")
    p.add_argument("--family", help="comma-separated unary predicates, e.g. P1,P2,P3")
    return parser


def _options(args) -> dict:
    skip = {"verb", "file", "file2", "json"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def run(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.verb == "ef":
            subject = (load(args.file), load(args.file2))
            digests = [digest(subject[0]), digest(subject[1])]
            inputs = [args.file, args.file2]
        else:
            subject = load(args.file)
            digests = digest(subject)
            inputs = [args.file]
        lines, payload, status = HANDLERS[args.verb](subject, args)
    except (OSError, InputError, IndiscernError, ValueError) as exc:
        print(f"indiscern: error: {exc}", file=sys.stderr)
        return 2
    for line in lines:
        print(line, file=stdout)
    if args.json:
        report = {
            "format": REPORT_FORMAT,
            "version": REPORT_VERSION,
            "tool_version": __version__,
            "command": {"verb": args.verb, "inputs": inputs, "options": _options(args)},
            "structure_digest": digests,
            "exit_status": status,
            "payload": payload,
        }
        try:
            with open(args.json, "w", encoding="utf-8") as fh:
                json.dump(report, fh, sort_keys=True, indent=2)
                fh.write("\n")
        except OSError as exc:
            print(f"indiscern: error: {exc}", file=sys.stderr)
            return 2
    return status


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
