"""Loading instance data, exporting it back, and small parsing helpers.

The -data argument grammar:

1. absent, "null" or "None"        -> None
2. one value, even bracketed       -> that scalar
3. two or more unnamed values      -> a tuple
4. two or more named values        -> a record
5. a JSON file with one root field -> that field's value
6. a JSON file with more fields    -> a record

Several JSON files merge in order, later files winning; named values may
follow files to override single fields, but never precede them. Square
and round brackets are interchangeable, as are shell escaped brackets.
Text files turn into a line cursor, with extra quoted items appended as
lines of their own.
"""

from __future__ import annotations

import json
import os
import re
from itertools import combinations as _combinations

from .errors import (
    Exhausted,
    FileNotFound,
    MalformedSpec,
    MultipleNumbers,
    NamedBeforeFile,
    NoNumber,
    NonAlphabetic,
    ParseError,
    RaggedGrid,
    WriteError,
)


class IntList(list):
    """A list whose leaves are all ints; usable as an element target.

    Subscripting with a variable (or an index expression) builds an array
    access stub the compiler turns into an element constraint, exactly
    like subscripting an array of variables."""

    def __getitem__(self, key):
        if isinstance(key, int):
            return list.__getitem__(self, key)
        if isinstance(key, slice):
            return IntList(list.__getitem__(self, key))
        from .model import IndexTarget, Node, Variable
        if isinstance(key, (Variable, Node)):
            if self and isinstance(list.__getitem__(self, 0), list):
                cells = tuple(tuple(row) for row in self)
            else:
                cells = tuple(self)
            return Node("idx", (IndexTarget(cells), key))
        if isinstance(key, tuple):
            part = self
            for pos, k in enumerate(key):
                rest = key[pos + 1:]
                if isinstance(k, slice):
                    sliced = list.__getitem__(part, k) if isinstance(part, list) else part[k]
                    if rest:
                        return IntList(IntList(row)[rest if len(rest) > 1 else rest[0]]
                                       for row in sliced)
                    return IntList(sliced)
                if isinstance(k, (Variable, Node)) or not isinstance(k, int):
                    picked = IntList(part)[k] if not isinstance(part, IntList) else part[k]
                    for extra in rest:
                        picked = picked[extra]
                    return picked
                part = list.__getitem__(part, k) if isinstance(part, list) else part[k]
            return part
        return list.__getitem__(self, key)


class Record:
    """An ordered bag of named fields, unpackable like a tuple and
    readable by attribute or by subscript."""

    def __init__(self, pairs, from_files: bool = False):
        self._fields: list[str] = []
        self._values: dict[str, object] = {}
        self._from_files = from_files
        for name, value in pairs:
            if name not in self._values:
                self._fields.append(name)
            self._values[name] = value

    @property
    def fields(self) -> tuple[str, ...]:
        return tuple(self._fields)

    def update(self, name: str, value) -> None:
        if name not in self._values:
            self._fields.append(name)
        self._values[name] = value

    def __getattr__(self, name: str):
        values = object.__getattribute__(self, "_values")
        if name in values:
            return values[name]
        raise AttributeError(name)

    def __getitem__(self, key):
        if isinstance(key, int):
            return self._values[self._fields[key]]
        return self._values[key]

    def __iter__(self):
        return iter(self._values[f] for f in self._fields)

    def __len__(self) -> int:
        return len(self._fields)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Record)
            and self._fields == other._fields
            and all(self._values[f] == other._values[f] for f in self._fields)
        )

    def __hash__(self):
        return hash(tuple(self._fields))

    def __repr__(self) -> str:
        inner = ", ".join(f"{f}={self._values[f]!r}" for f in self._fields)
        return f"Record({inner})"


class TextCursor:
    """A forward only reader over lines of text input."""

    def __init__(self, lines, sources: tuple[str, ...] = ()):
        self.lines = list(lines)
        self.sources = tuple(sources)
        self.position = 0

    def next_line(self) -> str:
        if self.position >= len(self.lines):
            raise Exhausted("no line left to read")
        line = self.lines[self.position]
        self.position += 1
        return line

    def number_in(self) -> int:
        """Read the next line, which must hold exactly one integer."""
        line = self.next_line()
        found = re.findall(r"-?\d+", line)
        if not found:
            raise NoNumber(f"no integer in line {self.position}: {line!r}")
        if len(found) > 1:
            raise MultipleNumbers(
                f"expected one integer in line {self.position}, found {len(found)}")
        return int(found[0])

    def numbers_in(self) -> list[int]:
        """Read the next line and give every integer on it."""
        return [int(tok) for tok in re.findall(r"-?\d+", self.next_line())]

    def remaining_lines(self, skip_current: bool = False) -> list[str]:
        """Every line from the current position on; consumes them all."""
        if skip_current and self.position < len(self.lines):
            self.position += 1
        rest = self.lines[self.position:]
        self.position = len(self.lines)
        return rest

    def __len__(self) -> int:
        return len(self.lines)

    def __repr__(self) -> str:
        return f"TextCursor({len(self.lines)} lines, at {self.position})"


# --------------------------------------------------------------------------
# json loading
# --------------------------------------------------------------------------

def _all_int_leaves(value) -> bool:
    if isinstance(value, bool):
        return False
    if isinstance(value, int):
        return True
    if isinstance(value, list):
        return len(value) > 0 and all(_all_int_leaves(v) for v in value)
    return False


def _as_int_list(value) -> IntList:
    return IntList(_as_int_list(v) if isinstance(v, list) else v for v in value)


def from_json_value(value):
    """Convert a parsed JSON value into data objects: objects become
    records, integer arrays become indexable lists, null becomes None."""
    if isinstance(value, dict):
        return Record([(k, from_json_value(v)) for k, v in value.items()],
                      from_files=True)
    if isinstance(value, list):
        if _all_int_leaves(value):
            return _as_int_list(value)
        return [from_json_value(v) for v in value]
    return value


def load_json_files(paths: list[str]):
    """Load and merge one or more JSON files, later files winning, then
    collapse a single rooted field to its bare value."""
    merged_fields: list[str] = []
    merged: dict[str, object] = {}
    for path in paths:
        if not os.path.exists(path):
            raise FileNotFound(f"data file {path!r} does not exist")
        try:
            with open(path, encoding="utf-8") as handle:
                root = json.load(handle)
        except (OSError, json.JSONDecodeError) as exc:
            raise ParseError(f"cannot parse {path!r}: {exc}") from exc
        if not isinstance(root, dict):
            raise ParseError(
                f"the root of {path!r} must be an object with named fields")
        for key, value in root.items():
            if key not in merged:
                merged_fields.append(key)
            merged[key] = value
    return merged_fields, merged


def _collapse(fields: list[str], values: dict[str, object]):
    if len(fields) == 1:
        return from_json_value(values[fields[0]])
    return Record([(f, from_json_value(values[f])) for f in fields],
                  from_files=True)


# --------------------------------------------------------------------------
# the -data argument
# --------------------------------------------------------------------------

def _split_items(body: str) -> list[tuple[str, bool]]:
    """Split on top level commas; quoted stretches keep their commas and
    spaces. Gives (text, was_quoted) pairs."""
    items: list[tuple[str, bool]] = []
    buff: list[str] = []
    quoted = False
    quote_char = ""
    saw_quote = False
    for ch in body:
        if quoted:
            if ch == quote_char:
                quoted = False
            else:
                buff.append(ch)
        elif ch in "\"'":
            quoted = True
            quote_char = ch
            saw_quote = True
        elif ch == ",":
            items.append(("".join(buff).strip(), saw_quote))
            buff = []
            saw_quote = False
        else:
            buff.append(ch)
    if quoted:
        raise MalformedSpec("unbalanced quote in -data argument")
    last = "".join(buff).strip()
    if last or saw_quote or items:
        items.append((last, saw_quote))
    return items


def _parse_value(text: str):
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        pass
    return text


def _strip_brackets(spec: str) -> str:
    spec = spec.strip()
    spec = spec.replace("\\[", "[").replace("\\]", "]")
    spec = spec.replace("\\(", "(").replace("\\)", ")")
    if spec[:1] in "[(" and spec[-1:] in ")]":
        return spec[1:-1]
    return spec


def parse_data_arg(spec: str | None):
    """Parse the value of -data following the grammar above."""
    if spec is None:
        return None
    body = _strip_brackets(spec)
    if body in ("", "null", "None"):
        return None
    items = _split_items(body)
    if not items:
        return None

    json_files = [t for t, _q in items if t.endswith(".json")]
    text_files = [t for t, _q in items if t.endswith(".txt")]
    if json_files and text_files:
        raise MalformedSpec("cannot mix JSON and text data files")

    if text_files:
        extras = [t for t, _q in items if not t.endswith(".txt")]
        return concat_text_inputs(text_files, extras)

    if json_files:
        file_set = set(json_files)
        seen_file = False
        overrides: list[tuple[str, object]] = []
        for text, was_quoted in items:
            if not was_quoted and text in file_set:
                if overrides:
                    raise MalformedSpec("data files must precede named overrides")
                seen_file = True
                continue
            name, eq, raw = text.partition("=")
            if not eq or not name:
                raise MalformedSpec(
                    f"unnamed value {text!r} cannot accompany data files")
            if not seen_file:
                raise NamedBeforeFile(
                    "named elementary values must be given after JSON files")
            overrides.append((name.strip(), _parse_value(raw.strip())))
        loaded_fields, loaded = load_json_files(json_files)
        for name, value in overrides:
            if name not in loaded:
                loaded_fields.append(name)
            loaded[name] = value
        return _collapse(loaded_fields, loaded)

    named = [(t, q) for t, q in items if "=" in t and not q]
    if named and len(named) != len(items):
        raise MalformedSpec("cannot mix named and unnamed values")
    if named:
        if len(named) == 1:
            raise MalformedSpec("a single named value needs a JSON file to override")
        pairs = []
        seen = set()
        for text, _q in named:
            name, _eq, raw = text.partition("=")
            name = name.strip()
            if not name or not _eq:
                raise MalformedSpec(f"bad named value {text!r}")
            if name in seen:
                raise MalformedSpec(f"field {name!r} given twice")
            seen.add(name)
            pairs.append((name, _parse_value(raw.strip())))
        return Record(pairs)

    parsed = [text if was_quoted else _parse_value(text)
              for text, was_quoted in items]
    if len(parsed) == 1:
        return parsed[0]
    return tuple(parsed)


# --------------------------------------------------------------------------
# text inputs
# --------------------------------------------------------------------------

def concat_text_inputs(files, extras=()) -> TextCursor:
    """All lines of the files, in order, then one line per extra item."""
    lines: list[str] = []
    for path in files:
        if not os.path.exists(path):
            raise FileNotFound(f"data file {path!r} does not exist")
        with open(path, encoding="utf-8") as handle:
            lines.extend(line.rstrip("\n") for line in handle)
    for extra in extras:
        lines.append(str(extra))
    stems = tuple(os.path.splitext(os.path.basename(p))[0] for p in files)
    return TextCursor(lines, sources=stems)


# --------------------------------------------------------------------------
# exporting
# --------------------------------------------------------------------------

def data_suffix(data) -> str:
    """The value part of generated file names: Queens + 4 -> "Queens-4"."""
    if data is None:
        return ""
    if isinstance(data, TextCursor):
        return "-".join(data.sources)
    if isinstance(data, Record):
        fields = sorted(data.fields) if data._from_files else list(data.fields)
        return "-".join(_value_token(data[f]) for f in fields)
    if isinstance(data, tuple):
        return "-".join(_value_token(v) for v in data)
    return _value_token(data)


def _value_token(value) -> str:
    if isinstance(value, (list, Record)):
        return "x".join(_value_token(v) for v in value)
    return str(value)


def _to_json_value(data):
    if isinstance(data, Record):
        return {f: _to_json_value(data[f]) for f in data.fields}
    if isinstance(data, (list, tuple)):
        return [_to_json_value(v) for v in data]
    return data


def export_data(data, model_name: str, basename: str | None = None,
                directory: str = ".") -> str:
    """Write the instance data to a JSON file and give back its path."""
    if basename is None:
        suffix = data_suffix(data)
        basename = f"{model_name}-{suffix}" if suffix else model_name
    path = os.path.join(directory, f"{basename}.json")
    if data is None:
        payload = {}
    else:
        payload = _to_json_value(data)
    try:
        with open(path, "w", encoding="utf-8") as handle:
            json.dump(payload, handle)
            handle.write("\n")
    except OSError as exc:
        raise WriteError(f"cannot write {path!r}: {exc}") from exc
    return path


# --------------------------------------------------------------------------
# toolkit
# --------------------------------------------------------------------------

def alphabet_positions(word: str) -> tuple[int, ...]:
    """Positions of the letters in the alphabet: "about" -> (0,1,14,20,19)."""
    out = []
    for ch in word:
        low = ch.lower()
        if not ("a" <= low <= "z"):
            raise NonAlphabetic(f"{ch!r} is not a letter")
        out.append(ord(low) - ord("a"))
    return tuple(out)


def different_values(*values) -> bool:
    """True when no two of the given host values are equal."""
    return len(set(values)) == len(values)


def combinations(pool, r: int):
    """itertools.combinations, with a bare int n standing for range(n)."""
    return _combinations(range(pool) if isinstance(pool, int) else pool, r)


def transpose(grid):
    """Columns of a grid of equal length rows."""
    rows = [list(row) for row in grid]
    if not rows:
        return []
    if any(len(row) != len(rows[0]) for row in rows):
        raise RaggedGrid("rows must share one length")
    return [list(col) for col in zip(*rows)]


def columns(grid):
    """Alias of transpose reading better against arrays of variables."""
    from .model import VarArray
    if isinstance(grid, VarArray):
        grid = grid.cells
    return transpose(grid)


def to_indexable(nested) -> IntList:
    """Deep copy generic nested lists into an indexable integer list."""
    if isinstance(nested, (list, tuple)):
        return IntList(to_indexable(v) for v in nested)
    if isinstance(nested, bool) or not isinstance(nested, int):
        raise ValueError(f"{nested!r} is not an int")
    return nested
