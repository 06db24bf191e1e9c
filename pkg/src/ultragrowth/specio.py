"""File formats and the weight-spec mini-language.

Everything the command line reads or writes lives here: sequence JSON,
matrix JSON, coefficient-family JSON, curve and conjugate-table TSV, and
the tiny weight-spec grammar (``t^a``, ``log1p``, ``logtrunc``,
``assoc:<file>``, ``gevrey:<s>``).  Loaders raise :class:`SpecError`
carrying source and position context so the front-end can map bad input
to its usage exit code with a useful diagnostic.

Serialization conventions: natural-log values throughout, ``+inf``
encoded as the string ``"inf"`` (strict JSON has no infinity literal),
floats written with shortest-roundtrip ``repr`` so identical inputs
produce byte-identical output.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .assocfn import WeightFn, associated, power, shifted_log, trunc_log
from .config import DEFAULT_CONFIG, RunConfig
from .conjugate import ConjugateTable
from .lambdanorms import (
    CoefficientFamily,
    explicit_coefficients,
    kronecker,
    weight_witness,
)
from .matrices import WeightMatrix
from .relations import RelationReport
from .seqcore import PROVENANCES, LogSequence, make_gevrey
from .verdicts import Status, Verdict

__all__ = [
    "SpecError",
    "parse_weight",
    "render_weight",
    "parse_sequence_arg",
    "sequence_to_dict",
    "sequence_from_dict",
    "load_sequence",
    "save_sequence",
    "matrix_to_dict",
    "matrix_from_dict",
    "load_matrix",
    "save_matrix",
    "family_to_dict",
    "family_from_dict",
    "load_family",
    "parse_family_arg",
    "save_curve",
    "load_curve",
    "conjugate_table_rows",
    "save_conjugate_table",
    "load_conjugate_table",
    "canonical_json",
    "tsv_text",
]


class SpecError(ValueError):
    """Malformed spec string or data file, with position context."""

    def __init__(self, message: str, *, source: str = "",
                 line: int | None = None, column: int | None = None):
        self.message = message
        self.source = source
        self.line = line
        self.column = column
        super().__init__(str(self))

    def __str__(self) -> str:
        where = self.source
        if self.line is not None:
            where += f":{self.line}"
            if self.column is not None:
                where += f":{self.column}"
        return f"{where}: {self.message}" if where else self.message


# ---------------------------------------------------------------------------
# weight-spec mini-language
# ---------------------------------------------------------------------------

WEIGHT_SPEC_FORMS = ("t^<a>", "log1p", "logtrunc", "assoc:<file>", "gevrey:<s>")


def parse_weight(spec: str, *, config: RunConfig = DEFAULT_CONFIG) -> WeightFn:
    """Parse one weight spec: t^a | log1p | logtrunc | assoc:<file> | gevrey:<s>."""
    spec = spec.strip()
    if spec == "log1p":
        return shifted_log()
    if spec == "logtrunc":
        return trunc_log()
    if spec.startswith("t^"):
        try:
            a = float(spec[2:])
        except ValueError:
            raise SpecError(f"bad exponent in {spec!r}", source="<weight>") from None
        if not (a > 0 and math.isfinite(a)):
            raise SpecError(f"exponent must be finite and > 0 in {spec!r}",
                            source="<weight>")
        return power(a, spec=spec)
    if spec.startswith("assoc:"):
        path = spec[len("assoc:"):]
        if not path:
            raise SpecError("assoc: needs a sequence file", source="<weight>")
        return associated(load_sequence(path), spec=spec)
    if spec.startswith("gevrey:"):
        s = _parse_gevrey_index(spec)
        return associated(make_gevrey(s, config.truncation), spec=spec)
    raise SpecError(
        f"unknown weight spec {spec!r}; forms: {', '.join(WEIGHT_SPEC_FORMS)}",
        source="<weight>")


def render_weight(w: WeightFn) -> str:
    """Spec string for a weight; inverse of :func:`parse_weight` on its image."""
    if w.spec:
        return w.spec
    raise SpecError(f"weight {w.name!r} has no spec form", source="<weight>")


def _parse_gevrey_index(spec: str) -> float:
    try:
        s = float(spec[len("gevrey:"):])
    except ValueError:
        raise SpecError(f"bad index in {spec!r}", source="<weight>") from None
    if not (s > 0 and math.isfinite(s)):
        raise SpecError(f"index must be finite and > 0 in {spec!r}",
                        source="<weight>")
    return s


def parse_sequence_arg(arg: str, *,
                       config: RunConfig = DEFAULT_CONFIG) -> LogSequence:
    """A sequence argument is either ``gevrey:<s>`` or a sequence JSON file."""
    arg = arg.strip()
    if arg.startswith("gevrey:"):
        return make_gevrey(_parse_gevrey_index(arg), config.truncation)
    return load_sequence(arg)


# ---------------------------------------------------------------------------
# sequence JSON
# ---------------------------------------------------------------------------


def _encode_value(x: float):
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        return "nan"
    return x


def _decode_log_value(x, where: str, source: str) -> float:
    if isinstance(x, str):
        if x == "inf":
            return math.inf
        raise SpecError(f'{where}: expected a number or "inf", got {x!r}',
                        source=source)
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise SpecError(f'{where}: expected a number or "inf", got {x!r}',
                        source=source)
    return float(x)


def sequence_to_dict(M: LogSequence) -> dict:
    doc = {
        "name": M.name,
        "kind": M.provenance,
        "log_values": [_encode_value(x) for x in M.logm],
    }
    if M.s is not None:
        doc["s"] = float(M.s)
    return doc


def sequence_from_dict(data: dict, *, source: str = "<sequence>") -> LogSequence:
    if not isinstance(data, dict):
        raise SpecError(f"expected a JSON object, got {type(data).__name__}",
                        source=source)
    if "log_values" not in data:
        raise SpecError('missing required key "log_values"', source=source)
    raw = data["log_values"]
    if not isinstance(raw, list):
        raise SpecError('"log_values" must be a list', source=source)
    vals = [_decode_log_value(x, f"log_values[{i}]", source)
            for i, x in enumerate(raw)]
    kind = data.get("kind", "explicit")
    if kind not in PROVENANCES:
        raise SpecError(f'unknown kind {kind!r}; one of {PROVENANCES}',
                        source=source)
    s = data.get("s")
    if s is not None and not isinstance(s, (int, float)):
        raise SpecError(f'"s" must be a number, got {s!r}', source=source)
    try:
        return LogSequence(np.array(vals, dtype=float),
                           name=str(data.get("name", "")), provenance=kind,
                           s=None if s is None else float(s))
    except ValueError as e:
        raise SpecError(str(e), source=source) from None


def _load_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as e:
        raise SpecError(e.strerror or str(e), source=path) from None
    except json.JSONDecodeError as e:
        raise SpecError(e.msg, source=path, line=e.lineno,
                        column=e.colno) from None


def load_sequence(path: str) -> LogSequence:
    return sequence_from_dict(_load_json(path), source=path)


def save_sequence(M: LogSequence, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(canonical_json(sequence_to_dict(M)) + "\n")


# ---------------------------------------------------------------------------
# matrix JSON: a map from level to sequence
# ---------------------------------------------------------------------------


def matrix_to_dict(W: WeightMatrix) -> dict:
    return {
        "name": W.name,
        "levels": {f"{lam:g}": sequence_to_dict(seq)
                   for lam, seq in W.entries.items()},
    }


def matrix_from_dict(data: dict, *, source: str = "<matrix>") -> WeightMatrix:
    if not isinstance(data, dict):
        raise SpecError(f"expected a JSON object, got {type(data).__name__}",
                        source=source)
    levels = data.get("levels")
    if not isinstance(levels, dict) or not levels:
        raise SpecError('missing or empty "levels" map', source=source)
    entries = {}
    for key, seq_doc in levels.items():
        try:
            lam = float(key)
        except ValueError:
            raise SpecError(f"level key {key!r} is not a number",
                            source=source) from None
        entries[lam] = sequence_from_dict(seq_doc,
                                          source=f"{source}:levels[{key}]")
    try:
        return WeightMatrix(entries, name=str(data.get("name", "")))
    except (TypeError, ValueError) as e:
        raise SpecError(str(e), source=source) from None


def load_matrix(path: str) -> WeightMatrix:
    return matrix_from_dict(_load_json(path), source=path)


def save_matrix(W: WeightMatrix, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(canonical_json(matrix_to_dict(W)) + "\n")


# ---------------------------------------------------------------------------
# coefficient-family JSON
# ---------------------------------------------------------------------------


def family_to_dict(c: CoefficientFamily) -> dict:
    doc: dict = {"kind": c.kind}
    if c.kind == "explicit":
        doc["values"] = [float(v) for v in c.values]
    elif c.kind == "kronecker":
        doc["i"] = int(c.index)
    else:
        doc["weight"] = render_weight(c.weight)
        if c.support is not None:
            doc["support"] = int(c.support)
    if c.name:
        doc["name"] = c.name
    return doc


def family_from_dict(data: dict, *, source: str = "<coefficients>",
                     config: RunConfig = DEFAULT_CONFIG) -> CoefficientFamily:
    if not isinstance(data, dict):
        raise SpecError(f"expected a JSON object, got {type(data).__name__}",
                        source=source)
    kind = data.get("kind")
    name = str(data.get("name", ""))
    try:
        if kind == "explicit":
            vals = data.get("values")
            if not isinstance(vals, list):
                raise SpecError('explicit family needs a "values" list',
                                source=source)
            return explicit_coefficients(vals, name=name)
        if kind == "kronecker":
            i = data.get("i")
            if not isinstance(i, int) or isinstance(i, bool):
                raise SpecError('kronecker family needs an integer "i"',
                                source=source)
            return kronecker(i)
        if kind == "weight-witness":
            w_spec = data.get("weight")
            if not isinstance(w_spec, str):
                raise SpecError('weight-witness family needs a "weight" spec',
                                source=source)
            w = parse_weight(w_spec, config=config)
            support = data.get("support")
            if support is not None and (isinstance(support, bool)
                                        or not isinstance(support, int)):
                raise SpecError('"support" must be an integer', source=source)
            return weight_witness(w, support=support)
    except SpecError:
        raise
    except (TypeError, ValueError) as e:
        raise SpecError(str(e), source=source) from None
    raise SpecError(f"unknown family kind {kind!r}", source=source)


def load_family(path: str, *,
                config: RunConfig = DEFAULT_CONFIG) -> CoefficientFamily:
    return family_from_dict(_load_json(path), source=path, config=config)


def parse_family_arg(arg: str, *,
                     config: RunConfig = DEFAULT_CONFIG) -> CoefficientFamily:
    """Coefficients: ``kronecker:<i>``, ``witness:<weight-spec>``, or a JSON file."""
    arg = arg.strip()
    if arg.startswith("kronecker:"):
        try:
            i = int(arg[len("kronecker:"):])
        except ValueError:
            raise SpecError(f"bad index in {arg!r}",
                            source="<coefficients>") from None
        try:
            return kronecker(i)
        except ValueError as e:
            raise SpecError(str(e), source="<coefficients>") from None
    if arg.startswith("witness:"):
        return weight_witness(parse_weight(arg[len("witness:"):], config=config))
    return load_family(arg, config=config)


# ---------------------------------------------------------------------------
# TSV: sampled curves and conjugate tables
# ---------------------------------------------------------------------------


def _fmt(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(x)


def tsv_text(rows, header: tuple | None = None) -> str:
    lines = []
    if header is not None:
        lines.append("\t".join(header))
    for row in rows:
        lines.append("\t".join(_fmt(x) for x in row))
    return "\n".join(lines) + "\n"


def save_curve(t, values, path: str) -> None:
    """Write rows ``t <tab> w(t)``; repr floats make the roundtrip lossless."""
    t = np.asarray(t, dtype=float)
    v = np.asarray(values, dtype=float)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(tsv_text(zip(t, v)))


def _parse_tsv_number(cell: str, path: str, lineno: int) -> float:
    if cell == "inf":
        return math.inf
    try:
        return float(cell)
    except ValueError:
        raise SpecError(f"not a number: {cell!r}", source=path,
                        line=lineno) from None


def _load_tsv_pairs(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as e:
        raise SpecError(e.strerror or str(e), source=path) from None
    xs, ys = [], []
    for lineno, line in enumerate(lines, start=1):
        if not line.strip() or line.startswith("#"):
            continue
        cells = line.split("\t")
        if len(cells) != 2:
            raise SpecError(f"expected 2 tab-separated columns, got {len(cells)}",
                            source=path, line=lineno)
        xs.append(_parse_tsv_number(cells[0].strip(), path, lineno))
        ys.append(_parse_tsv_number(cells[1].strip(), path, lineno))
    if not xs:
        raise SpecError("no data rows", source=path)
    return np.array(xs), np.array(ys)


def load_curve(path: str):
    """Read a ``t <tab> w(t)`` table back as two arrays."""
    return _load_tsv_pairs(path)


def conjugate_table_rows(table: ConjugateTable):
    return list(zip(table.s_grid, table.values))


def save_conjugate_table(table: ConjugateTable, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(tsv_text(conjugate_table_rows(table)))


def load_conjugate_table(path: str, *, source_name: str = "") -> ConjugateTable:
    s, v = _load_tsv_pairs(path)
    try:
        return ConjugateTable(source=source_name or path, s_grid=s, values=v)
    except ValueError as e:
        raise SpecError(str(e), source=path) from None


# ---------------------------------------------------------------------------
# canonical JSON
# ---------------------------------------------------------------------------


def _plain(obj):
    if isinstance(obj, (Verdict, RelationReport)):
        return _plain(obj.to_json())
    if isinstance(obj, Status):
        return obj.value
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _encode_value(obj)
    return obj


def canonical_json(doc) -> str:
    """Deterministic JSON: sorted keys, tight separators, repr floats.

    Non-finite floats become the strings "inf"/"-inf"/"nan" (strict JSON
    has no literal for them), matching the sequence file convention.
    """
    return json.dumps(_plain(doc), sort_keys=True, separators=(",", ":"),
                      allow_nan=False)
