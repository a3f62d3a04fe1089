"""Command-line entry point.

Every subcommand builds a JSON report, embeds the run configuration and the
package version, and writes it to --out (stdout if absent). Exit status is
0 on success, 1 on a domain error (the report names the error) and 2 on a
usage error.
"""

import argparse
import json
import os
import re
import sys
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

import mpmath

from . import __version__
from .errors import AnticycError, NonSplitPrime, SchemaError, UsageError

DEFAULT_FORM = "level11.json"


@dataclass
class RunConfig:
    """Everything that determines a report."""

    command: str
    Mp: int = 20
    digits: int = 30
    D: int = 0
    bounds: dict = field(default_factory=dict)
    p: int = 0
    disc: int = 0
    paths: dict = field(default_factory=dict)
    s: int = 0
    n: int = 0
    m: int = 0
    c: int = 1
    threads: int = 1
    seed: int = 0

    def validate(self):
        for name in ("Mp", "digits", "threads"):
            if getattr(self, name) <= 0:
                raise UsageError("%s must be positive" % name, flag="--" + {"Mp": "prec"}.get(name, name))
        for k, v in self.bounds.items():
            if v <= 0:
                raise UsageError("bound %s must be positive" % k, flag="--" + k)
        if self.D < 0:
            raise UsageError("truncation must be positive", flag="--trunc")
        if self.s < 0 or self.n < 0 or self.m < 0 or self.c < 1:
            raise UsageError("s, n, m must be >= 0 and c >= 1", flag="--s/--n/--m/--c")

    def check_split(self):
        """p must split in the declared field."""
        from .quadfield import ImagQuadField, split_prime
        F = ImagQuadField(self.disc)
        if self.p == 2:
            if F.splitting(2) != "split":
                raise NonSplitPrime("2 does not split in Q(sqrt(%d))" % self.disc, p=2, d=self.disc)
            return F
        split_prime(F, self.p)
        return F

    def to_json(self):
        return asdict(self)


# ---------------------------------------------------------------- JSON helpers


def _num(x, digits=20):
    """Deterministic rendering of numbers for reports."""
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (mpmath.mpc, complex)):
        x = mpmath.mpc(x)
        return {"re": mpmath.nstr(x.real, digits), "im": mpmath.nstr(x.imag, digits)}
    if isinstance(x, (mpmath.mpf, float)):
        return mpmath.nstr(mpmath.mpf(x), digits)
    if hasattr(x, "to_complex"):
        return _num(x.to_complex(digits + 5), digits)
    return str(x)


def dumps(report):
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=True) + "\n"


def _turns(xs):
    return [str(Fraction(t)) for t in xs]


# ---------------------------------------------------------------- input files


def resolve_form_path(path):
    """A path on disk, or the name of a bundled data file."""
    if path is None:
        path = DEFAULT_FORM
    p = Path(path)
    if p.exists():
        return p
    from importlib import resources
    res = resources.files("anticyc.data").joinpath(p.name)
    if res.is_file():
        return Path(str(res))
    raise UsageError("form file not found: %s" % path, flag="--form")


def load_form(path, D=0):
    from .qexp import Eigenform, ingest_eigenform
    eig = ingest_eigenform(str(resolve_form_path(path)))
    if D and D < eig.truncation:
        eig = Eigenform(eig.base.truncate(D), newform_level=eig.N0)
    return eig


_KEY = re.compile(r"([{,\s])([A-Za-z_][A-Za-z0-9_]*)\s*:")


def parse_character_spec(text):
    """Parse ``chi = {field: -7, type: [2,0], finite: [[i, num, den], ...], modulus: {c: 1, p: 11, s: 1}}``.

    Plain JSON with the same keys is accepted as well.
    """
    body = text.strip()
    if "=" in body.split("{", 1)[0]:
        body = body.split("=", 1)[1].strip()
    body = _KEY.sub(lambda m: '%s"%s":' % (m.group(1), m.group(2)), body)
    try:
        data = json.loads(body)
    except json.JSONDecodeError as e:
        raise SchemaError("character spec is not parseable: %s" % e)
    for k in ("field", "finite", "modulus"):
        if k not in data:
            raise SchemaError("character spec misses %r" % k, field=k)
    mod = data["modulus"]
    for k in ("c", "p", "s"):
        if not isinstance(mod.get(k), int):
            raise SchemaError("modulus needs integer %r" % k, field="modulus")
    finite = data["finite"]
    if not all(isinstance(r, list) and len(r) == 3 and all(isinstance(x, int) for x in r) and r[2] > 0
               for r in finite):
        raise SchemaError("finite entries must be [gen_index, numerator, denominator]", field="finite")
    return {"field": int(data["field"]), "type": list(data.get("type", [2, 0])), "finite": finite,
            "c": mod["c"], "p": mod["p"], "s": mod["s"]}


def character_from_spec(spec):
    from .heckechar import FiniteClassCharacter
    from .quadfield import ImagQuadField, enumerate_class_group
    F = ImagQuadField(spec["field"])
    order = F.order(spec["c"] * spec["p"] ** spec["s"])
    G = enumerate_class_group(order)
    turns = [Fraction(0)] * len(G.generator_orders)
    for i, num, den in spec["finite"]:
        if not 0 <= i < len(turns):
            raise SchemaError("generator index %d out of range (%d generators)" % (i, len(turns)), field="finite")
        turns[i] = Fraction(num, den)
    for t, o in zip(turns, G.generator_orders):
        if (t * o).denominator != 1:
            raise SchemaError("turn %s is not of order dividing %d" % (t, o), field="finite")
    return FiniteClassCharacter(G, turns)


def _read_char(path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError:
        raise UsageError("character file not found: %s" % path, flag="--char")
    return character_from_spec(parse_character_spec(text))


# ---------------------------------------------------------------- subcommands


def cmd_classgroup(cfg, args):
    from .quadfield import ImagQuadField, class_number_formula, enumerate_class_group
    F = ImagQuadField(cfg.disc)
    cond = cfg.c * (cfg.p**cfg.n if cfg.p else 1)
    G = enumerate_class_group(F.order(cond), bound=cfg.bounds.get("enum", 10**6))
    out = {"size": G.size, "structure": list(G.generator_orders),
           "forms": [list(fm) for fm in G.representatives], "conductor": cond}
    if cfg.p:
        out["formula"] = class_number_formula(F, cfg.c, cfg.p, cfg.n)
        out["formula_agrees"] = out["formula"] == G.size
    return out


def _group_and_chars(cfg):
    from .heckechar import characters_of
    from .quadfield import ImagQuadField, enumerate_class_group
    F = ImagQuadField(cfg.disc)
    cond = cfg.c * (cfg.p**cfg.s if cfg.p else 1)
    G = enumerate_class_group(F.order(cond))
    return F, G, characters_of(G)


def cmd_chars(cfg, args):
    from .heckechar import gauss_sum, padic_avatar
    F, G, chars = _group_and_chars(cfg)
    rows = []
    for i, xi in enumerate(chars):
        rows.append({"index": i, "turns": _turns(xi.turns), "order": xi.order, "conductor": xi.conductor,
                     "primitive": xi.is_primitive()})
    return {"group_size": G.size, "structure": list(G.generator_orders), "characters": rows}


def cmd_hecke(cfg, args):
    from .heckechar import DirichletCharacter, build_lambda
    from .qexp import check_hecke_recursion, check_multiplicativity
    F = cfg.check_split() if cfg.p else None
    from .quadfield import ImagQuadField
    F = F or ImagQuadField(cfg.disc)
    eig = load_form(args.form, cfg.D)
    check_multiplicativity(eig.base)
    check_hecke_recursion(eig.base)
    psi = eig.psi if eig.psi is not None else DirichletCharacter.trivial(1)
    lam = build_lambda(F, eig.weight, psi)
    vals = []
    for q in range(2, 40):
        from .arith import isprime
        if not isprime(q):
            continue
        from .lvalues import primes_above
        for P in primes_above(F, q):
            vals.append({"prime": q, "norm": int(P.covolume()), "value": _num(lam.value_complex(P, cfg.digits))})
    return {"form": {"level": eig.level, "weight": eig.weight, "truncation": eig.truncation,
                     "multiplicativity": "ok", "hecke_recursion": "ok"},
            "lambda": {"type": list(lam.infinity_type), "modulus_norm": lam.conductor_norm(),
                       "solutions_found": lam.solutions_found, "values": vals}}


def cmd_measure_selftest(cfg, args):
    from .padic_measure import mahler_selftest
    count = cfg.bounds.get("count", 100)
    r = mahler_selftest(cfg.p, M=cfg.Mp, count=count, seed=cfg.seed)
    if not r["ok"]:
        from .errors import InternalMismatch
        raise InternalMismatch("measure self-test failed", failures=r["failures"])
    return r


def _selected_chars(cfg, args, G, chars):
    if args.char:
        return [(None, _read_char(args.char))]
    want = G.order.conductor
    return [(i, x) for i, x in enumerate(chars) if x.conductor == want]


def cmd_period_sum(cfg, args):
    from .heckechar import DirichletCharacter, build_lambda
    from .nearly_holo import PeriodCharacter, class_representatives, period_sum, period_summands
    F = cfg.check_split()
    eig = load_form(args.form, cfg.D or 400)
    lam = build_lambda(F, eig.weight, eig.psi or DirichletCharacter.trivial(1))
    _, G, chars = _group_and_chars(cfg)
    reps = class_representatives(G.order)
    rows = []
    for i, xi in _selected_chars(cfg, args, G, chars):
        chi = PeriodCharacter(lam, xi, cfg.m)
        P = period_sum(eig.base, cfg.m, chi, reps, level=eig.level, digits=cfg.digits)
        rows.append({"index": i, "turns": _turns(xi.turns), "period_sum": _num(P, cfg.digits)})
    return {"conductor": G.order.conductor, "class_number": G.size, "periods": rows}


def cmd_euler_check(cfg, args):
    from .heckechar import DirichletCharacter, build_lambda
    from .nearly_holo import PeriodCharacter, class_representatives, euler_depletion_check
    F = cfg.check_split()
    eig = load_form(args.form, cfg.D or 400)
    lam = build_lambda(F, eig.weight, eig.psi or DirichletCharacter.trivial(1))
    from .quadfield import enumerate_class_group
    from .heckechar import characters_of
    G = enumerate_class_group(F.order(cfg.c))
    reps = class_representatives(G.order)
    rows = []
    chars = [(None, _read_char(args.char))] if args.char else list(enumerate(characters_of(G)))
    for i, xi in chars:
        r = euler_depletion_check(eig, cfg.m, PeriodCharacter(lam, xi, cfg.m), reps, cfg.p, shift=0,
                                  digits=cfg.digits)
        rows.append({"index": i, "turns": _turns(xi.turns), "lhs": _num(r.lhs), "rhs": _num(r.rhs),
                     "factor": _num(r.factor), "rel_err": mpmath.nstr(r.rel_err, 5)})
    return {"exponent_shift": 0, "checks": rows}


def cmd_constants(cfg, args):
    from .arith import lcm
    from .heckechar import DirichletCharacter, build_lambda
    from .lvalues import constants_c, euler_E_half, euler_E_prime, nonsplit_part, partition_primes, \
        satake_complex, unitary_character
    F = cfg.check_split()
    eig = load_form(args.form, cfg.D or 400)
    N0 = eig.N0
    cond = nonsplit_part(F, N0) * cfg.p**cfg.s
    sets = partition_primes(F, N0, cond, cfg.p, cfg.s)
    out = {"sets": sets.to_json(), "N": lcm(N0, cfg.p**cfg.s)}
    lam = build_lambda(F, eig.weight, eig.psi or DirichletCharacter.trivial(1))
    _, G, chars = _group_and_chars(cfg)
    rows = []
    for i, xi in _selected_chars(cfg, args, G, chars):
        om = unitary_character(lam, xi, cfg.m)
        c = constants_c(sets, F, out["N"], cfg.s, eig.weight, cfg.m, chi_minus=om)
        sat = lambda l: satake_complex(eig, l)
        rows.append({"index": i, "turns": _turns(xi.turns), "c1": _num(c["c1"]), "c2": c["c2"], "v": str(c["v"]),
                     "G": _num(c["G"]), "c": _num(c["c"]), "E_half": _num(euler_E_half(om, sat, sets, F)),
                     "E_prime": _num(euler_E_prime(om, sat, sets, cfg.m, 1, eig.weight, F))})
    out["characters"] = rows
    return out


def cmd_interpolate(cfg, args):
    from .heckechar import DirichletCharacter, build_lambda
    from .lvalues import main_interpolation_report, nonsplit_part, partition_primes, ratio_summary
    F = cfg.check_split()
    eig = load_form(args.form, cfg.D)
    N0 = eig.N0
    partition_primes(F, N0, nonsplit_part(F, N0) * cfg.p**cfg.s, cfg.p, cfg.s)
    lam = build_lambda(F, eig.weight, eig.psi or DirichletCharacter.trivial(1))
    cfg.c = nonsplit_part(F, N0)
    _, G, chars = _group_and_chars(cfg)
    rows = []
    reports = []
    method = args.method
    for i, xi in _selected_chars(cfg, args, G, chars):
        r = main_interpolation_report(eig, lam, xi, cfg.m, cfg.p, method=method, digits=cfg.digits,
                                      threads=cfg.threads)
        row = r.to_json()
        row["index"] = i
        rows.append(row)
        reports.append((i, r))
    summary = ratio_summary(reports)
    return {"method": method, "L_value_flag": "NOT-RIGOROUS", "reports": rows, "summary": summary,
            "count": len(rows)}


COMMANDS = {
    "classgroup": cmd_classgroup,
    "chars": cmd_chars,
    "hecke": cmd_hecke,
    "measure-selftest": cmd_measure_selftest,
    "period-sum": cmd_period_sum,
    "euler-check": cmd_euler_check,
    "constants": cmd_constants,
    "interpolate": cmd_interpolate,
}


# ---------------------------------------------------------------- parsing


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        m = re.search(r"(--[a-z-]+)", message)
        raise UsageError(message, flag=m.group(1) if m else None)


def build_parser():
    ap = _Parser(prog="anticyc", description="Anticyclotomic p-adic L-function toolkit.")
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--field", "--disc", dest="disc", type=int, default=-7)
        sp.add_argument("--p", type=int, default=0)
        sp.add_argument("--s", type=int, default=0)
        sp.add_argument("--n", type=int, default=0)
        sp.add_argument("--m", type=int, default=0)
        sp.add_argument("--c", type=int, default=1)
        sp.add_argument("--prec", type=int, default=20 if name != "measure-selftest" else 8)
        sp.add_argument("--digits", type=int, default=30)
        sp.add_argument("--trunc", type=int, default=0)
        sp.add_argument("--count", type=int, default=100)
        sp.add_argument("--form", default=None)
        sp.add_argument("--char", default=None)
        sp.add_argument("--out", default=None)
        sp.add_argument("--threads", type=int, default=1)
        sp.add_argument("--method", choices=["smoothed", "truncation"], default="smoothed")
    return ap


def _config(args):
    try:
        seed = int(os.environ.get("ANTICYC_SEED", "0"))
    except ValueError:
        raise UsageError("ANTICYC_SEED must be an integer", flag="ANTICYC_SEED")
    bounds = {"count": args.count} if args.command == "measure-selftest" else {}
    paths = {k: v for k, v in (("form", args.form), ("char", args.char), ("out", args.out)) if v}
    return RunConfig(command=args.command, Mp=args.prec, digits=args.digits, D=args.trunc, bounds=bounds,
                     p=args.p, disc=args.disc, paths=paths, s=args.s, n=args.n, m=args.m, c=args.c,
                     threads=args.threads, seed=seed)


def _emit(report, out):
    text = dumps(report)
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _usage_line(e):
    flag = e.details.get("flag")
    return "usage error: %s%s\n" % (e, " (flag %s)" % flag if flag else "")


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    out = None
    try:
        args = build_parser().parse_args(argv)
        if args.command is None:
            raise UsageError("a subcommand is required: %s" % ", ".join(COMMANDS), flag=None)
        out = args.out
        cfg = _config(args)
        cfg.validate()
        if args.command in ("measure-selftest",) and cfg.p < 2:
            raise UsageError("--p is required", flag="--p")
        if args.command in ("period-sum", "euler-check", "constants", "interpolate") and not cfg.p:
            raise UsageError("--p is required", flag="--p")
    except UsageError as e:
        sys.stderr.write(_usage_line(e))
        _emit({"status": "usage-error", "error": e.to_dict(), "version": __version__}, None if out is None else out)
        return 2
    report = {"command": args.command, "config": cfg.to_json(), "version": __version__}
    try:
        if cfg.p and args.command != "measure-selftest":
            cfg.check_split()
        with mpmath.workdps(cfg.digits):
            report["result"] = COMMANDS[args.command](cfg, args)
        report["config"] = cfg.to_json()
        report["status"] = "ok"
        code = 0
    except UsageError as e:
        sys.stderr.write(_usage_line(e))
        report["status"] = "usage-error"
        report["error"] = e.to_dict()
        code = 2
    except AnticycError as e:
        report["status"] = "error"
        report["error"] = e.to_dict()
        code = 1
    _emit(report, out)
    return code


if __name__ == "__main__":
    sys.exit(main())
