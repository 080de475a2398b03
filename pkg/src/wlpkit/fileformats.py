"""Line-oriented input files for ideals and skew-symmetric matrices.

Ideal files::

    # comment
    field GF(3)
    vars x y z
    gen x^2*y
    gen y^3

Instead of ``gen`` lines an ideal file may give ``dual <form>`` lines; the
ideal is then the annihilator of the dual forms (one form: Gorenstein, several
forms of one degree: level).

Matrix files use the same ``field``/``vars`` header followed by ``skew <n>`` and
``entry <i> <j> <polynomial>`` lines with 1-based i < j.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field as dc_field
from pathlib import Path

from .errors import ParseError
from .exactfield import QQ, FieldSpec, parse_field
from .gorenstein import SkewPolyMatrix, annihilator, level_decompose
from .gradedquot import GradedIdeal
from .multipoly import DEFAULT_NAMES, DualForm, parse_form, parse_polynomial


@dataclass
class ParsedInput:
    field: FieldSpec
    names: tuple
    sha256: str
    generators: list = dc_field(default_factory=list)
    duals: list = dc_field(default_factory=list)
    skew_size: int = None
    entries: dict = dc_field(default_factory=dict)

    def ideal(self) -> GradedIdeal:
        if self.skew_size is not None:
            raise ParseError("this file describes a matrix, not an ideal")
        if self.duals:
            if len(self.duals) == 1:
                return annihilator(self.duals[0])
            return level_decompose(self.duals)[0]
        if not self.generators:
            raise ParseError("no generators given")
        return GradedIdeal(self.generators, self.field, len(self.names))

    def matrix(self) -> SkewPolyMatrix:
        if self.skew_size is None:
            raise ParseError("this file has no 'skew' line")
        try:
            return SkewPolyMatrix.from_upper(self.skew_size, self.entries, self.field, len(self.names))
        except ValueError as exc:
            raise ParseError(str(exc)) from exc


def _dual_from_polynomial(f, line):
    """Read a homogeneous polynomial as a dual form in the divided-power monomial basis."""
    d = f.homogeneous_degree()
    if f.is_zero() or d is None:
        raise ParseError("dual form must be a nonzero homogeneous polynomial", line)
    return DualForm(f.field, f.nvars, d, {m: c for m, c in f.terms.items()})


def parse_text(text: str, field_override: FieldSpec = None) -> ParsedInput:
    digest = hashlib.sha256(text.encode("utf-8")).hexdigest()
    field = field_override
    names = None
    pending = []  # (keyword, payload, line, column) lines needing field and vars
    skew_size = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        stripped = line.strip()
        if not stripped:
            continue
        keyword, _, rest = stripped.partition(" ")
        rest = rest.strip()
        col = line.index(keyword) + len(keyword) + 2
        if keyword == "field":
            if not rest:
                raise ParseError("missing field name", lineno, col)
            try:
                parsed = parse_field(rest)
            except ParseError as exc:
                raise ParseError(str(exc), lineno, col) from exc
            if field_override is None:
                if field is not None:
                    raise ParseError("field declared twice", lineno, 1)
                field = parsed
        elif keyword == "vars":
            if names is not None:
                raise ParseError("vars declared twice", lineno, 1)
            names = tuple(rest.split())
            if not names:
                raise ParseError("vars needs at least one name", lineno, col)
            if len(set(names)) != len(names):
                raise ParseError("repeated variable name", lineno, col)
        elif keyword == "skew":
            if skew_size is not None:
                raise ParseError("skew declared twice", lineno, 1)
            try:
                skew_size = int(rest)
            except ValueError:
                raise ParseError(f"bad matrix size {rest!r}", lineno, col) from None
            if skew_size < 1:
                raise ParseError("matrix size must be positive", lineno, col)
        elif keyword in ("gen", "dual", "entry"):
            if not rest:
                raise ParseError(f"'{keyword}' needs a polynomial", lineno, col)
            pending.append((keyword, rest, lineno, col))
        else:
            raise ParseError(f"unknown keyword {keyword!r}", lineno, 1)

    field = field or QQ
    names = names or DEFAULT_NAMES
    out = ParsedInput(field, names, digest, skew_size=skew_size)
    for keyword, rest, lineno, col in pending:
        if keyword == "gen":
            out.generators.append(_shift_columns(parse_form, rest, field, names, lineno, col))
        elif keyword == "dual":
            f = _shift_columns(parse_polynomial, rest, field, names, lineno, col)
            out.duals.append(_dual_from_polynomial(f, lineno))
        else:
            if skew_size is None:
                raise ParseError("'entry' before 'skew'", lineno, 1)
            parts = rest.split(None, 2)
            if len(parts) < 3:
                raise ParseError("expected 'entry <i> <j> <polynomial>'", lineno, col)
            try:
                i, j = int(parts[0]), int(parts[1])
            except ValueError:
                raise ParseError("matrix indices must be integers", lineno, col) from None
            if not 1 <= i < j <= skew_size:
                raise ParseError(f"entry ({i},{j}) must satisfy 1 <= i < j <= {skew_size}", lineno, col)
            if (i, j) in out.entries:
                raise ParseError(f"entry ({i},{j}) given twice", lineno, col)
            offset = col + rest.index(parts[2])
            f = _shift_columns(parse_polynomial, parts[2], field, names, lineno, offset)
            if not f.is_zero() and f.homogeneous_degree() is None:
                raise ParseError(f"entry ({i},{j}) is not homogeneous", lineno, offset)
            out.entries[(i, j)] = f
    if out.generators and out.duals:
        raise ParseError("give either 'gen' or 'dual' lines, not both")
    if skew_size is not None and (out.generators or out.duals):
        raise ParseError("a matrix file cannot contain generators")
    return out


def _shift_columns(parser, text, field, names, lineno, col):
    """Run a polynomial parser and report columns relative to the whole line."""
    try:
        return parser(text, field, names, lineno)
    except ParseError as exc:
        if exc.column is None:
            raise
        raise type(exc)(exc.message, exc.line, exc.column + col - 1) from None


def read_input(path, field_override: FieldSpec = None) -> ParsedInput:
    text = Path(path).read_text(encoding="utf-8")
    return parse_text(text, field_override)


def parse_ideal_file(path, field_override: FieldSpec = None) -> GradedIdeal:
    return read_input(path, field_override).ideal()


def parse_matrix_file(path, field_override: FieldSpec = None) -> SkewPolyMatrix:
    return read_input(path, field_override).matrix()


def format_ideal(generators, field, names=DEFAULT_NAMES) -> str:
    lines = [f"field {field}", "vars " + " ".join(names)]
    lines += [f"gen {g.to_str(names)}" for g in generators]
    return "\n".join(lines) + "\n"


def format_matrix(M: SkewPolyMatrix, names=DEFAULT_NAMES) -> str:
    lines = [f"field {M.field}", "vars " + " ".join(names[: M.nvars]), f"skew {M.size}"]
    for (i, j), f in M.upper_entries().items():
        if not f.is_zero():
            lines.append(f"entry {i} {j} {f.to_str(names)}")
    return "\n".join(lines) + "\n"
