"""Command-line entry point: ``quadtame <subcommand> [options]``.

Reports go to stdout (JSON with sorted keys, or CSV where a table makes
sense); diagnostics go to stderr.  Exit codes: 0 success, 2 bad input,
3 inconclusive (thm4 only).
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from fractions import Fraction

from . import complex as cx
from . import dynamics as dyn
from . import valuation as val
from .group import GroupInputError, word_evaluate, word_from_json
from .polys import DegreeCapExceeded, ParseError, degree_cap, get_degree_cap, parse
from .ring import QElem
from .scalars import QSqrt2

EXIT_OK, EXIT_INPUT, EXIT_INCONCLUSIVE = 0, 2, 3

SUBCOMMANDS = ("degree", "powers", "valuation", "resonance", "parachute", "thm417",
               "complex", "verify5", "thm4", "classify", "walk")


class CliInputError(ValueError):
    kind = "InputError"


def _jsonable(o):
    if isinstance(o, dict):
        return {str(k): _jsonable(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_jsonable(v) for v in o]
    if isinstance(o, (Fraction, QSqrt2)):
        return str(o)
    if isinstance(o, cx.Vertex):
        return str(o)
    return o


def _load(path, what):
    if not path:
        raise CliInputError(f"--{what} is required for this subcommand")
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as e:
        raise CliInputError(f"cannot read {path}: {e.strerror}") from None
    except json.JSONDecodeError as e:
        raise CliInputError(f"{path} is not valid JSON: {e}") from None


def _valuation(args):
    if not args.valuation:
        return val.MINUS_DEG
    return val.valuation_from_json(_load(args.valuation, "valuation"))


def _word(args):
    return word_from_json(_load(args.word, "word"))


def _pair(args):
    d = _load(args.word, "word")
    pair = d.get("pair") if isinstance(d, dict) else None
    if not isinstance(pair, list) or len(pair) != 2:
        raise CliInputError("pair file needs a two-element 'pair' list")
    return [QElem(parse(str(s))) for s in pair], d


def _elements(args):
    d = _load(args.word, "word")
    if isinstance(d, dict) and "elements" in d:
        return [(str(s), QElem(parse(str(s)))) for s in d["elements"]]
    F = word_evaluate(word_from_json(d))
    return [(f"f_{v}", c) for v, c in zip("xyzt", F.comps)]


# ---------------------------------------------------------------- subcommands

def cmd_degree(args):
    F = word_evaluate(_word(args))
    return {"degree": F.degree(), "epsilon": F.epsilon()}


def _sequence(args):
    if args.n < 1:
        raise CliInputError("--n must be positive")
    return dyn.degree_sequence(_word(args), args.n)


def cmd_powers(args):
    s = _sequence(args)
    if args.format == "csv":
        return ("table", ["n", "deg_forward", "deg_backward"], s.rows())
    return s.to_json()


def cmd_classify(args):
    s = _sequence(args)
    g = dyn.growth_classify(s)
    out = {"growth": g.to_json(), "sequence": s.to_json()}
    if g.kind == "exponential":
        b = dyn.check_theorem1_bound(s)
        out["lower_bound"] = {"C_fit": str(b["C_fit"]), "witness_n": b["witness_n"], "holds": b["holds"]}
    if args.format == "csv":
        return ("table", ["n", "deg_forward", "deg_backward"], s.rows())
    return out


def cmd_valuation(args):
    nu = _valuation(args)
    vals = [{"element": name, "nu": str(val.nu_eval(nu, f))} for name, f in _elements(args)]
    return {"valuation": nu.to_json(), "values": vals, "nu_xt": str(val.nu_of_xt(nu))}


def cmd_resonance(args):
    (f1, f2), _ = _pair(args)
    return val.resonance_classify(_valuation(args), f1, f2).to_json()


def cmd_parachute(args):
    (f1, f2), _ = _pair(args)
    return {"parachute": str(val.parachute(_valuation(args), f1, f2))}


def cmd_thm417(args):
    (f1, f2), d = _pair(args)
    if "R" not in d:
        raise CliInputError("thm417 needs a polynomial 'R' in x, y in the pair file")
    R = parse(str(d["R"]))
    if R.degree_in("z") > 0 or R.degree_in("t") > 0:
        raise CliInputError("R must be a polynomial in x and y")
    return val.theorem_417_report(_valuation(args), f1, f2, R).to_json()


def cmd_complex(args):
    g = cx.build_cnu_graph(cx.gallery_from_word(_word(args)), _valuation(args))
    if args.format == "dot":
        return ("text", g.to_dot())
    return g.to_json()


def cmd_verify5(args):
    gal = cx.gallery_from_word(_word(args))
    rep = cx.verify_section5(gal, _valuation(args))
    rep["relations"] = gal.relations
    return rep


def cmd_thm4(args):
    rep = dyn.check_theorem4(_word(args))
    code = EXIT_OK if rep["holds"] else EXIT_INCONCLUSIVE
    return ("json", rep, code)


def cmd_walk(args):
    d = _load(args.config, "config")
    if args.seed is not None:
        d = dict(d, seed=args.seed)
    if args.degree_cap is not None:
        d = dict(d, degree_cap=args.degree_cap)
    cfg = dyn.walk_config_from_json(d)
    rep = dyn.run_random_walk(cfg)
    if args.format == "csv":
        return ("table", ["step", "trial", "logdeg"], rep.csv_rows())
    return rep.to_json()


COMMANDS = {name: globals()["cmd_" + name] for name in SUBCOMMANDS}


# ---------------------------------------------------------------- plumbing

def build_parser():
    p = argparse.ArgumentParser(prog="quadtame", description="Tame automorphisms of the quadric xt - yz = 1.")
    sub = p.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--word", help="word, pair or element file (JSON)")
        s.add_argument("--valuation", help="valuation file (JSON); defaults to minus the degree")
        s.add_argument("--config", help="walk configuration (JSON)")
        s.add_argument("--n", type=int, default=10, help="number of iterates")
        s.add_argument("--seed", type=int, default=None, help="master seed for walks")
        s.add_argument("--degree-cap", type=int, default=None, dest="degree_cap")
        formats = ["json", "csv", "dot"] if name == "complex" else ["json", "csv"]
        s.add_argument("--format", choices=formats, default="json")
    return p


def _error(kind, msg):
    sys.stdout.write(json.dumps({"error": kind, "message": msg}, sort_keys=True) + "\n")
    sys.stderr.write(f"error: {kind}: {msg}\n")
    return EXIT_INPUT


def _emit(result, fmt):
    code = EXIT_OK
    if isinstance(result, tuple) and result[0] == "table":
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(result[1])
        w.writerows(result[2])
        return code
    if isinstance(result, tuple) and result[0] == "text":
        sys.stdout.write(result[1])
        return code
    if isinstance(result, tuple) and result[0] == "json":
        result, code = result[1], result[2]
    if fmt == "csv":
        raise CliInputError("this subcommand has no CSV output")
    sys.stdout.write(json.dumps(_jsonable(result), sort_keys=True) + "\n")
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.seed is not None and not 0 <= args.seed < 2 ** 64:
        return _error("InputError", "--seed must be an unsigned 64-bit integer")
    cap = args.degree_cap if args.degree_cap is not None else get_degree_cap()
    try:
        with degree_cap(cap):
            return _emit(COMMANDS[args.command](args), args.format)
    except DegreeCapExceeded as e:
        return _error("DegreeCapExceeded", str(e))
    except ParseError as e:
        return _error("ParseError", str(e))
    except val.HypothesisFails as e:
        return _error("HypothesisFails", str(e))
    except (GroupInputError, val.ValuationError, cx.ComplexError, dyn.DynamicsError, CliInputError) as e:
        return _error(getattr(e, "kind", type(e).__name__), str(e))
    except (KeyError, TypeError, ValueError) as e:
        return _error("InputError", f"malformed input: {e}")


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
