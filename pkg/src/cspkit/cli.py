"""Command line driver.

Subcommands: compile (build a registry model and emit XCSP3 XML), solve
(exhaustive oracle enumeration), check (verify a candidate solution from a
JSON file), list (show the registry). Options keep single-dash long names,
with double-dash spellings accepted too.

Exit codes: 0 success, 1 usage error, 2 model or data error, 3 compile
error, 4 oracle bound exceeded.
"""

from __future__ import annotations

import json
import sys

from . import catalog
from .compiler import compile_instance, output_filename, uses_meta
from .dataio import data_suffix, export_data, parse_data_arg
from .errors import (
    BadFlag,
    CspkitError,
    NonGroundable,
    NotSlidable,
    SearchSpaceTooLarge,
    UnknownModel,
    UnknownVariant,
    WriteError,
)
from .oracle import check_solution, enumerate_solutions, normalize_assignment

USAGE = """\
usage: cspkit <command> [arguments]

commands:
  list                                   show every model and its variants
  compile <Model> [options]              emit the XCSP3 instance
  solve   <Model> [options] [-limit=N]   enumerate solutions by brute force
  check   <Model> [options] -solution=F  verify a JSON assignment

shared options:
  -data=...        instance data: number, [values], name=value pairs,
                   JSON or text files (see the data grammar)
  -variant=NAME    select a model variant

compile options:
  -display         print the XML instead of writing a file
  -o FILE          write to FILE instead of the default name
  -dataexport[=B]  also write the parsed data as JSON
  -recognizeSlides fold sliding constraint runs into slide elements
  -core-only       reformulate meta constraints down to XCSP3-core
"""

_FLAGS = {
    "compile": {"data": "value", "variant": "value", "display": "bare",
                "dataexport": "optional", "recognizeSlides": "bare",
                "core-only": "bare", "o": "value"},
    "solve": {"data": "value", "variant": "value", "limit": "value"},
    "check": {"data": "value", "variant": "value", "solution": "value"},
    "list": {},
}


def _parse_args(command: str, argv: list[str]):
    allowed = _FLAGS[command]
    positional: list[str] = []
    options: dict[str, object] = {}
    i = 0
    while i < len(argv):
        arg = argv[i]
        if arg.startswith("-") and arg not in ("-", "--"):
            body = arg[2:] if arg.startswith("--") else arg[1:]
            name, eq, value = body.partition("=")
            if name not in allowed:
                raise BadFlag(f"unknown option {arg!r} for {command!r};"
                              f" see usage with no arguments")
            kind = allowed[name]
            if kind == "bare":
                if eq:
                    raise BadFlag(f"option -{name} takes no value")
                options[name] = True
            elif kind == "optional":
                options[name] = value if eq else True
            else:
                if eq:
                    options[name] = value
                else:
                    i += 1
                    if i == len(argv):
                        raise BadFlag(f"option -{name} needs a value")
                    options[name] = argv[i]
        else:
            positional.append(arg)
        i += 1
    return positional, options


def _build(name: str, options: dict):
    entry = catalog.find(name)
    variant = options.get("variant")
    if variant is not None and variant not in entry.variants:
        known = ", ".join(sorted(entry.variants)) or "none"
        raise UnknownVariant(
            f"model {entry.name!r} has no variant {variant!r} (variants: {known})")
    spec = options.get("data")
    if spec is None:
        spec = entry.default_data
    data = parse_data_arg(spec)
    ctx = catalog.build(entry, data, variant)
    return entry, data, ctx


def _cmd_list() -> int:
    for entry in catalog.entries():
        variants = f"  variants: {', '.join(sorted(entry.variants))}" \
            if entry.variants else ""
        print(f"{entry.name}{variants}")
    return 0


def _cmd_compile(positional: list[str], options: dict) -> int:
    entry, data, ctx = _build(positional[0], options)
    core_only = bool(options.get("core-only"))
    recognize = bool(options.get("recognizeSlides"))
    ir, xml = compile_instance(ctx, core_only=core_only, recognize=recognize)
    if uses_meta(ir):
        print("warning: meta constraints keep the instance outside"
              " XCSP3-core; pass -core-only to reformulate them",
              file=sys.stderr)
    export = options.get("dataexport")
    if export:
        basename = export if isinstance(export, str) else None
        path = export_data(data, entry.name, basename)
        print(f"data written to {path}", file=sys.stderr)
    if options.get("display"):
        sys.stdout.write(xml)
        return 0
    target = options.get("o")
    if target is None:
        target = output_filename(entry.name, data_suffix(data),
                                 options.get("variant"))
    try:
        with open(target, "w", encoding="utf-8") as handle:
            handle.write(xml)
    except OSError as exc:
        raise WriteError(f"cannot write {target!r}: {exc}") from exc
    print(f"instance written to {target}", file=sys.stderr)
    return 0


def _cmd_solve(positional: list[str], options: dict) -> int:
    _entry, _data, ctx = _build(positional[0], options)
    limit = None
    if "limit" in options:
        try:
            limit = int(options["limit"])
        except ValueError:
            raise BadFlag(f"-limit needs an integer, got {options['limit']!r}")
        if limit <= 0:
            raise BadFlag("-limit must be positive")
    solutions = enumerate_solutions(ctx, limit=limit)
    for assignment in solutions:
        print(json.dumps(assignment))
    tail = "" if solutions.complete else " (bound hit, enumeration cut short)"
    print(f"{len(solutions)} solution(s){tail}")
    if solutions.optimum is not None:
        print(f"optimum {solutions.optimum}")
    return 0


def _cmd_check(positional: list[str], options: dict) -> int:
    if "solution" not in options:
        raise BadFlag("check needs -solution=<file.json>")
    _entry, _data, ctx = _build(positional[0], options)
    path = options["solution"]
    try:
        with open(path, encoding="utf-8") as handle:
            raw = json.load(handle)
    except OSError as exc:
        raise CspkitError(f"cannot read solution file {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise CspkitError(f"solution file {path!r} is not valid JSON: {exc}") from exc
    assignment = normalize_assignment(ctx, raw)
    report = check_solution(ctx, assignment)
    for position, kind, note in report.violated:
        where = f" ({note})" if note else ""
        print(f"violated: constraint {position} [{kind}]{where}")
    if report.objective is not None:
        print(f"objective {report.objective}")
    if report.satisfied:
        print("solution OK")
        return 0
    print(f"{len(report.violated)} constraint(s) violated")
    return 2


def main(argv: list[str] | None = None) -> int:
    args = list(sys.argv[1:] if argv is None else argv)
    if not args or args[0] in ("-h", "--help", "help"):
        sys.stdout.write(USAGE)
        return 0 if args else 1
    command = args[0]
    if command not in _FLAGS:
        print(f"unknown command {command!r}; expected compile, solve,"
              " check or list", file=sys.stderr)
        return 1

    try:
        positional, options = _parse_args(command, args[1:])
        if command == "list":
            if positional:
                raise BadFlag("list takes no arguments")
            return _cmd_list()
        if not positional:
            raise BadFlag(f"{command} needs a model name; try: cspkit list")
        if len(positional) > 1:
            raise BadFlag(f"unexpected arguments {positional[1:]!r}")
    except (BadFlag, UnknownModel, UnknownVariant) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    try:
        if command == "compile":
            return _cmd_compile(positional, options)
        if command == "solve":
            return _cmd_solve(positional, options)
        return _cmd_check(positional, options)
    except (BadFlag, UnknownModel, UnknownVariant) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SearchSpaceTooLarge as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except (NonGroundable, NotSlidable, WriteError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except CspkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
