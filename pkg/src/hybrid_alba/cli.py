"""Command-line front end: parse, classify, correspond, verify, corpus."""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

from . import fol
from . import syntax as s
from .engine import FULL, RESTRICTED, run_alba
from .generators import fragment_corpus
from .hybrid import tr_quasiset
from .oracle import check_correspondence
from .signed import FRAGMENTS, OrderType, classify

EXIT_OK, EXIT_USAGE, EXIT_FAILURE, EXIT_COUNTEREXAMPLE = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _emit(args, payload: dict, text: str) -> None:
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(text)


def _max_worlds(requested: int) -> int:
    cap = os.environ.get("ALBA_MAX_WORLDS")
    if cap:
        return min(requested, int(cap))
    return requested


def cmd_parse(args) -> int:
    f = s.parse(args.formula)
    text = s.to_text(f)
    props, noms = s.vars_and_nominals(f)
    _emit(args, {"formula": text, "variables": sorted(props), "nominals": sorted(noms),
                 "pure": s.is_pure(f), "base": s.is_base(f), "height": s.height(f)}, text)
    return EXIT_OK


def cmd_classify(args) -> int:
    c = classify(s.parse(args.formula))
    lines = [f"fragments: {', '.join(sorted(c.fragments)) or 'none'}"]
    for name in FRAGMENTS:
        cert = c.certificate(name)
        if cert:
            lines.append(f"  {name}: epsilon {cert.epsilon} omega {cert.omega}")
    for b in c.branches:
        d = b.to_dict()
        lines.append(f"  branch {d['leaf']}: at={d['at_part']} outer={d['outer']} inner={d['inner']}")
    _emit(args, c.to_dict(), "\n".join(lines))
    return EXIT_OK


def _run(args):
    mode = RESTRICTED if args.restricted else FULL
    cert = OrderType.parse(args.epsilon) if getattr(args, "epsilon", None) else "auto"
    return run_alba(s.parse(args.formula), cert, mode)


def cmd_correspond(args) -> int:
    out = _run(args)
    payload = out.to_dict()
    lines = [f"status: {out.status}"]
    if out.certificate:
        lines.append(f"certificate: epsilon {out.certificate.epsilon} omega {out.certificate.omega}")
    if out.diagnostic:
        lines.append(f"note: {out.diagnostic}")
    if out.success:
        lines.append("pure systems:")
        lines.extend(f"  {k}. {x}" for k, x in enumerate(out.pure_systems, 1))
        if args.emit_pure_hybrid:
            hybrid = s.to_text(tr_quasiset(out.pure_systems))
            payload["pure_hybrid"] = hybrid
            lines.append(f"hybrid: {hybrid}")
        lines.append(f"fo: {fol.fo_text(out.fo_sentence)}")
    if args.trace:
        with open(args.trace, "w", encoding="utf-8") as fh:
            json.dump(out.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK if out.success else EXIT_FAILURE


def cmd_verify(args) -> int:
    out = _run(args)
    if not out.success:
        _emit(args, {"status": "failure", "diagnostic": out.diagnostic},
              f"FAIL: algorithm did not succeed ({out.diagnostic})")
        return EXIT_FAILURE
    worlds = _max_worlds(args.max_worlds)
    report = check_correspondence(out, worlds)
    payload = {"status": "pass" if report.ok else "fail", "max_worlds": worlds, **report.to_dict()}
    if report.ok:
        text = f"PASS: {report.frames_checked} frames up to {worlds} worlds agree"
        if report.skipped:
            text += f" ({len(report.skipped)} skipped by the valuation budget)"
    else:
        text = (f"FAIL: counterexample frame {report.counterexample}: "
                f"modal validity {report.modal_valid}, first-order truth {report.fo_valid}")
    _emit(args, payload, text)
    return EXIT_OK if report.ok else EXIT_COUNTEREXAMPLE


def _corpus_item(job):
    text, mode, worlds = job
    out = run_alba(s.parse(text), mode=mode)
    result = {"formula": text, "success": out.success}
    if out.success and worlds > 0:
        report = check_correspondence(out, worlds)
        result.update(sound=report.ok, skipped=len(report.skipped), frames=report.frames_checked)
    return result


def cmd_corpus(args) -> int:
    mode = RESTRICTED if args.restricted else FULL
    worlds = _max_worlds(args.soundness_worlds)
    formulas = [s.to_text(f) for f in fragment_corpus(args.fragment, args.n, args.seed)]
    jobs = [(f, mode, worlds) for f in formulas]
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            results = list(pool.map(_corpus_item, jobs))
    else:
        results = [_corpus_item(j) for j in jobs]
    succeeded = sum(r["success"] for r in results)
    checked = [r for r in results if "sound" in r]
    unsound = [r["formula"] for r in checked if not r["sound"]]
    skipped = sum(r["skipped"] for r in checked)
    payload = {
        "fragment": args.fragment, "mode": mode, "n": args.n, "seed": args.seed,
        "success": succeeded, "soundness_checked": len(checked), "soundness_worlds": worlds,
        "discrepancies": unsound, "skipped_frames": skipped,
        "failures": [r["formula"] for r in results if not r["success"]],
    }
    text = [f"{args.fragment} ({mode}): {succeeded}/{args.n} success"]
    if worlds > 0:
        text.append(f"soundness up to {worlds} worlds: {len(checked) - len(unsound)}/{len(checked)} agree, "
                    f"{skipped} frames skipped")
    text.extend(f"  failed: {f}" for f in payload["failures"])
    text.extend(f"  discrepancy: {f}" for f in unsound)
    _emit(args, payload, "\n".join(text))
    if unsound:
        return EXIT_COUNTEREXAMPLE
    return EXIT_OK if succeeded == args.n else EXIT_FAILURE


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="hybrid-alba", description="Correspondence for hybrid modal formulas.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--json", action="store_true", help="machine-readable output")

    sp = sub.add_parser("parse", help="print the canonical form of a formula")
    sp.add_argument("formula")
    common(sp)
    sp.set_defaults(func=cmd_parse)

    sp = sub.add_parser("classify", help="fragment memberships and certificates")
    sp.add_argument("formula")
    common(sp)
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("correspond", help="compute pure systems and the first-order correspondent")
    sp.add_argument("formula")
    sp.add_argument("--restricted", action="store_true", help="skip inner decomposition")
    sp.add_argument("--epsilon", help="order-type such as p=1,q=d")
    sp.add_argument("--trace", metavar="FILE", help="write the derivation as JSON")
    sp.add_argument("--emit-pure-hybrid", action="store_true", help="also print the pure systems as one formula")
    common(sp)
    sp.set_defaults(func=cmd_correspond)

    sp = sub.add_parser("verify", help="check the correspondent against frame validity on small frames")
    sp.add_argument("formula")
    sp.add_argument("--max-worlds", type=int, default=3)
    sp.add_argument("--restricted", action="store_true")
    sp.add_argument("--epsilon")
    common(sp)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("corpus", help="generate a fragment corpus and report success and soundness")
    sp.add_argument("--fragment", choices=FRAGMENTS, default="extended-inductive")
    sp.add_argument("--n", type=int, default=200)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--restricted", action="store_true")
    sp.add_argument("--soundness-worlds", type=int, default=2, help="0 disables the frame check")
    sp.add_argument("--jobs", type=int, default=1)
    common(sp)
    sp.set_defaults(func=cmd_corpus)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except s.ParseError as err:
        print(f"parse error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
