"""Batch front end: read a JSON job, run one computation, print an exact report.

A job document looks like::

    {"ring": {"dim": 2, "vars": ["x", "y"]},
     "ideals": {"I": ["x^2", "y^3"]},
     "command": "ext-rees-mult",
     "args": {"ideals": ["I"]},
     "options": {"offset": 2, "validation": 2}}

Exact numbers are written as decimal strings.  Exit status is 0 on success
(and agreement), 2 when a verification disagrees, 1 on any error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Optional, Tuple

from ._parallel import WORKERS_ENV
from .errors import DuplicateIdealName, HypothesisViolated, ParseError, ReesMultError
from .formulas import (
    IDENTITY_KINDS,
    KIND_ALIASES,
    extended_rees_multiplicity_formula,
    identity_check,
    katz_verma_formula,
    oracle_extended_rees_multiplicity,
    oracle_katz_verma,
    oracle_rees_multiplicity,
    rees_multiplicity_formula,
    subset_decomposition_check,
)
from .hilbert import FitOptions, mixed_multiplicities
from .monomials import Monomial, MonomialIdeal, RingContext, colength, format_monomial, minimalize, parse_monomial

COMMANDS = ("colength", "mixed-mult", "rees-mult", "ext-rees-mult", "katz-verma", "identity-check", "remark-check")
MODES = ("formula", "oracle", "verify")
FORMATS = ("json", "table")
OPTION_KEYS = ("offset", "validation", "offset_cap", "box_margin", "box_cap", "workers", "format", "mode")


@dataclass
class JobSpec:
    dim: int
    var_names: Tuple[str, ...]
    ideals: Dict[str, Tuple[Monomial, ...]]
    command: Optional[str] = None
    args: dict = field(default_factory=dict)
    options: dict = field(default_factory=dict)

    @property
    def ctx(self) -> RingContext:
        return RingContext(self.dim, self.var_names)

    def ideal(self, name: str) -> MonomialIdeal:
        if name not in self.ideals:
            raise ParseError(f"unknown ideal name {name!r}")
        return minimalize(self.ctx, self.ideals[name])

    def fit_options(self, workers: int | None = None) -> FitOptions:
        opts = {k: self.options[k] for k in ("offset", "validation", "offset_cap", "box_margin", "box_cap")
                if k in self.options}
        return FitOptions(workers=workers, **opts)


class _Pairs(dict):
    """JSON object that remembers duplicated keys."""

    def __init__(self, pairs):
        super().__init__(pairs)
        seen = set()
        self.duplicates = [k for k, _ in pairs if k in seen or seen.add(k)]


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ParseError(message)


def _check_plain(obj, where: str) -> None:
    if isinstance(obj, _Pairs) and obj.duplicates:
        raise ParseError(f"duplicate key {obj.duplicates[0]!r} in {where}")


def parse_job(text: bytes | str) -> JobSpec:
    """Parse and validate a job document."""
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"job is not valid UTF-8: {exc}") from exc
    try:
        doc = json.loads(text, object_pairs_hook=_Pairs)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from exc
    _require(isinstance(doc, dict), "job must be a JSON object")
    _check_plain(doc, "job")
    unknown = set(doc) - {"ring", "ideals", "command", "args", "options"}
    _require(not unknown, f"unknown top-level keys {sorted(unknown)}")

    ring = doc.get("ring")
    _require(isinstance(ring, dict), "'ring' must be an object with 'dim' and 'vars'")
    _check_plain(ring, "ring")
    dim, names = ring.get("dim"), ring.get("vars")
    _require(isinstance(dim, int) and not isinstance(dim, bool) and dim >= 1, "'ring.dim' must be a positive integer")
    _require(isinstance(names, list) and all(isinstance(v, str) for v in names), "'ring.vars' must be a list of strings")
    _require(len(names) == dim, f"'ring.vars' has {len(names)} names but dim is {dim}")
    try:
        ctx = RingContext(dim, tuple(names))
    except ValueError as exc:
        raise ParseError(str(exc)) from exc

    raw = doc.get("ideals", {})
    _require(isinstance(raw, dict), "'ideals' must be an object")
    if isinstance(raw, _Pairs) and raw.duplicates:
        raise DuplicateIdealName(f"ideal {raw.duplicates[0]!r} is defined twice")
    ideals = {}
    for name, gens in raw.items():
        _require(isinstance(gens, list) and all(isinstance(g, str) for g in gens),
                 f"ideal {name!r} must be a list of monomial strings")
        ideals[name] = tuple(parse_monomial(ctx, g) for g in gens)

    command = doc.get("command")
    _require(command is None or command in COMMANDS, f"unknown command {command!r}")
    args = doc.get("args", {})
    _require(isinstance(args, dict), "'args' must be an object")
    _check_plain(args, "args")
    options = doc.get("options", {})
    _require(isinstance(options, dict), "'options' must be an object")
    _check_plain(options, "options")
    bad = set(options) - set(OPTION_KEYS)
    _require(not bad, f"unknown options {sorted(bad)}")
    for key in ("offset", "validation", "offset_cap", "box_margin", "box_cap", "workers"):
        if key in options:
            _require(isinstance(options[key], int) and not isinstance(options[key], bool),
                     f"option {key!r} must be an integer")
    _require(options.get("format", "json") in FORMATS, f"format must be one of {FORMATS}")
    _require(options.get("mode", "verify") in MODES, f"mode must be one of {MODES}")

    spec = JobSpec(dim, tuple(names), ideals, command, _plain(args), _plain(options))
    _check_references(spec)
    return spec


def _plain(obj):
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_plain(v) for v in obj]
    return obj


def _referenced(args: dict) -> list:
    names = []
    for key in ("ideals", "companions"):
        if key in args:
            _require(isinstance(args[key], list) and all(isinstance(n, str) for n in args[key]),
                     f"args.{key} must be a list of ideal names")
            names += args[key]
    for key in ("J", "I", "I1", "J1"):
        value = args.get(key)
        if value is not None:
            _require(isinstance(value, str), f"args.{key} must be an ideal name")
            names.append(value)
    return names


def _check_references(spec: JobSpec) -> None:
    for name in _referenced(spec.args):
        _require(name in spec.ideals, f"args refer to undefined ideal {name!r}")


def render_job(spec: JobSpec) -> str:
    """Inverse of :func:`parse_job`."""
    ctx = spec.ctx
    doc = {
        "ring": {"dim": spec.dim, "vars": list(spec.var_names)},
        "ideals": {name: [format_monomial(ctx, g) for g in gens] for name, gens in spec.ideals.items()},
    }
    if spec.command is not None:
        doc["command"] = spec.command
    if spec.args:
        doc["args"] = spec.args
    if spec.options:
        doc["options"] = spec.options
    return json.dumps(doc, indent=2) + "\n"


# -- running --------------------------------------------------------------------

def _exact(value) -> str:
    value = Fraction(value)
    return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


def _named_list(spec: JobSpec, key: str = "ideals") -> list:
    names = spec.args.get(key)
    if names is None:
        names = list(spec.ideals)
    if not names:
        raise HypothesisViolated("no ideals given")
    return names


def _formula_oracle(report_fn, oracle_fn, mode: str, inputs: tuple, options: FitOptions) -> dict:
    out = {}
    formula = None
    if mode in ("formula", "verify"):
        formula = report_fn(*inputs, options=options)
        out["formula"] = _exact(formula.formula_value)
        out["inputs"] = formula.inputs
        out["detail"] = {k: _exact(v) for k, v in formula.detail.items()}
    if mode in ("oracle", "verify"):
        out["oracle"] = _exact(oracle_fn(*inputs, options=options))
    if mode == "verify":
        out["agree"] = Fraction(out["oracle"]) == formula.formula_value
    return out


def run(spec: JobSpec, mode: str = "verify", workers: int | None = None) -> dict:
    """Execute ``spec.command`` and return the report as a JSON-ready dict."""
    if spec.command is None:
        raise ParseError("no command given")
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    options = spec.fit_options(workers)
    command = spec.command
    report: dict = {"command": command}

    if command == "colength":
        report["colength"] = {n: _exact(colength(spec.ideal(n))) for n in _named_list(spec)}
    elif command == "mixed-mult":
        names = _named_list(spec)
        table = mixed_multiplicities(*(spec.ideal(n) for n in names), options=options)
        report["ideals"] = names
        report["table"] = {",".join(map(str, q)): _exact(v) for q, v in table.items()}
    elif command in ("rees-mult", "ext-rees-mult"):
        names = _named_list(spec)
        ideals = tuple(spec.ideal(n) for n in names)
        if command == "rees-mult":
            fns = (rees_multiplicity_formula, oracle_rees_multiplicity)
        else:
            fns = (extended_rees_multiplicity_formula, oracle_extended_rees_multiplicity)
        report["mode"] = mode
        report.update(_formula_oracle(*fns, mode, ideals, options))
    elif command == "katz-verma":
        pair = (spec.ideal(spec.args.get("J", "J")), spec.ideal(spec.args.get("I", "I")))
        report["mode"] = mode
        report.update(_formula_oracle(katz_verma_formula, oracle_katz_verma, mode, pair, options))
    elif command == "identity-check":
        kind = spec.args.get("kind")
        if kind not in IDENTITY_KINDS and kind not in KIND_ALIASES:
            raise ParseError(f"identity-check needs args.kind, one of {IDENTITY_KINDS + tuple(KIND_ALIASES)}")
        companions = spec.args.get("companions")
        if companions is None:
            companions = [spec.args["I1"]] if "I1" in spec.args else []
        kw = {
            "companions": [spec.ideal(n) for n in companions],
            "j1": spec.ideal(spec.args["J1"]) if spec.args.get("J1") else None,
            "options": options,
        }
        if KIND_ALIASES.get(kind, kind) == "tower_first_step":
            kw["ideals"] = [spec.ideal(n) for n in _named_list(spec)]
        else:
            kw["j_ideal"] = spec.ideal(spec.args.get("J", "J"))
            kw["i_ideal"] = spec.ideal(spec.args.get("I", "I"))
        result = identity_check(kind, **kw)
        report.update(_identity_fields(result))
    elif command == "remark-check":
        ideals = [spec.ideal(n) for n in _named_list(spec)]
        result = subset_decomposition_check(*ideals, options=options)
        report.update(_identity_fields(result))
    return report


def _identity_fields(result) -> dict:
    return {
        "name": result.name,
        "inputs": result.inputs,
        "formula": _exact(result.formula_value),
        "oracle": _exact(result.oracle_value),
        "agree": result.agree,
        "detail": {k: _exact(v) for k, v in result.detail.items()},
    }


def render_report(report: dict, fmt: str = "json") -> str:
    if fmt == "json":
        return json.dumps(report, indent=2, sort_keys=True) + "\n"
    rows = []

    def flatten(prefix, value):
        if isinstance(value, dict):
            for k in sorted(value):
                flatten(f"{prefix}.{k}" if prefix else k, value[k])
        elif isinstance(value, list):
            rows.append((prefix, ", ".join(map(str, value))))
        elif isinstance(value, bool):
            rows.append((prefix, "yes" if value else "no"))
        else:
            rows.append((prefix, str(value)))

    flatten("", report)
    width = max(len(k) for k, _ in rows)
    return "".join(f"{k.ljust(width)}  {v}\n" for k, v in rows)


def exit_status(report: dict) -> int:
    return 2 if report.get("agree") is False else 0


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="reesmult", description=__doc__.split("\n\n")[0])
    p.add_argument("command", choices=COMMANDS + ("run",),
                   help="computation to run; 'run' takes the command from the job")
    p.add_argument("job", nargs="?", default="-", help="job file (default: stdin)")
    mode = p.add_mutually_exclusive_group()
    for m in MODES:
        mode.add_argument(f"--{m}", dest="mode", action="store_const", const=m)
    p.add_argument("--kind", help="identity kind for identity-check")
    p.add_argument("--format", choices=FORMATS)
    p.add_argument("--workers", type=int, help=f"worker processes (overrides {WORKERS_ENV})")
    return p


def _resolve_workers(cli: int | None, spec: JobSpec) -> int:
    if cli is not None:
        return cli
    env = os.environ.get(WORKERS_ENV, "").strip()
    if env:
        return int(env)
    return spec.options.get("workers", 1)


def main(argv=None) -> int:
    args = _parser().parse_intermixed_args(argv)
    fmt = args.format or "json"
    try:
        if args.job == "-":
            data = sys.stdin.buffer.read()
        else:
            with open(args.job, "rb") as fh:
                data = fh.read()
        spec = parse_job(data)
        fmt = args.format or spec.options.get("format", "json")
        if args.command != "run":
            if spec.command not in (None, args.command):
                raise ParseError(f"job is for {spec.command!r}, not {args.command!r}")
            spec.command = args.command
        if args.kind:
            spec.args["kind"] = args.kind
        mode = args.mode or spec.options.get("mode", "verify")
        report = run(spec, mode, _resolve_workers(args.workers, spec))
    except (ReesMultError, OSError, ValueError) as exc:
        code = exc.code if isinstance(exc, ReesMultError) else type(exc).__name__
        error = {"error": {"code": code, "message": str(exc)}}
        if fmt == "json":
            sys.stdout.write(json.dumps(error, indent=2, sort_keys=True) + "\n")
        else:
            sys.stderr.write(f"error: {code}: {exc}\n")
        return 1
    sys.stdout.write(render_report(report, fmt))
    return exit_status(report)


if __name__ == "__main__":
    sys.exit(main())
