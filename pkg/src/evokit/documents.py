"""Reading and writing algebra documents and reports.

An algebra document is a YAML (or JSON) mapping::

    dim: 3
    field: rational            # rational | gaussian_rational | complex_float
    matrix:
      - ["0", "1", "-3/2"]
      - [0, 0, 1]
      - [0, 0, 0]
    label: optional text

Rational entries are integers or "p/q" strings, Gaussian rationals are
strings like "1/2-3i", complex_float entries are [re, im] pairs. Errors
carry the line and column of the offending node.
"""
from __future__ import annotations

from typing import Any

import yaml

from .core import EvolutionAlgebra
from .scalars import ComplexFloatField, Field, ScalarParseError, field_by_name


class DocumentError(ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None, source: str = "<input>"):
        self.line, self.column, self.source = line, column, source
        where = f"{source}:{line}:{column}: " if line is not None else f"{source}: "
        super().__init__(where + message)


def _err(node, message, source):
    mark = getattr(node, "start_mark", None)
    if mark is None:
        return DocumentError(message, source=source)
    return DocumentError(message, mark.line + 1, mark.column + 1, source)


def _mapping(node, source) -> dict[str, Any]:
    if not isinstance(node, yaml.MappingNode):
        raise _err(node, "document must be a mapping", source)
    out = {}
    for k, v in node.value:
        if not isinstance(k, yaml.ScalarNode):
            raise _err(k, "keys must be plain names", source)
        if k.value in out:
            raise _err(k, f"duplicate key {k.value!r}", source)
        out[k.value] = v
    return out


def _scalar_entry(node, field: Field, source):
    try:
        if isinstance(field, ComplexFloatField):
            if not isinstance(node, yaml.SequenceNode) or len(node.value) != 2:
                raise _err(node, "complex_float entries are [re, im] pairs", source)
            parts = []
            for p in node.value:
                if not isinstance(p, yaml.ScalarNode):
                    raise _err(p, "expected a decimal number", source)
                try:
                    parts.append(float(p.value))
                except ValueError:
                    raise _err(p, f"malformed decimal {p.value!r}", source) from None
            return field.parse(parts)
        if not isinstance(node, yaml.ScalarNode):
            raise _err(node, f"{field.name} entries are scalar literals", source)
        return field.parse(node.value)
    except ScalarParseError as exc:
        raise _err(node, str(exc), source) from exc


def parse_algebra(text: str, source: str = "<input>", eps: float | None = None) -> EvolutionAlgebra:
    try:
        root = yaml.compose(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        if mark is not None:
            raise DocumentError(str(getattr(exc, "problem", exc)), mark.line + 1, mark.column + 1, source) from exc
        raise DocumentError(str(exc), source=source) from exc
    if root is None:
        raise DocumentError("empty document", source=source)
    doc = _mapping(root, source)
    for key in ("dim", "field", "matrix"):
        if key not in doc:
            raise _err(root, f"missing key {key!r}", source)
    # other keys are ignored, so report and normal-form documents parse too
    dnode = doc["dim"]
    if not isinstance(dnode, yaml.ScalarNode) or not dnode.value.isdigit() or int(dnode.value) < 1:
        raise _err(dnode, "dim must be a positive integer", source)
    n = int(dnode.value)
    fnode = doc["field"]
    try:
        field = field_by_name(fnode.value, eps) if isinstance(fnode, yaml.ScalarNode) else None
    except ValueError:
        field = None
    if field is None:
        raise _err(fnode, "field must be rational, gaussian_rational or complex_float", source)
    mnode = doc["matrix"]
    if not isinstance(mnode, yaml.SequenceNode):
        raise _err(mnode, "matrix must be a list of rows", source)
    if len(mnode.value) != n:
        raise _err(mnode, f"matrix has {len(mnode.value)} rows, dim is {n}", source)
    rows = []
    for rnode in mnode.value:
        if not isinstance(rnode, yaml.SequenceNode):
            raise _err(rnode, "each matrix row must be a list", source)
        if len(rnode.value) != n:
            raise _err(rnode, f"row has {len(rnode.value)} entries, dim is {n}", source)
        rows.append(tuple(_scalar_entry(e, field, source) for e in rnode.value))
    label = None
    if "label" in doc:
        lnode = doc["label"]
        if not isinstance(lnode, yaml.ScalarNode):
            raise _err(lnode, "label must be text", source)
        label = lnode.value
    return EvolutionAlgebra(tuple(rows), field, label)


def load_algebra(path: str, eps: float | None = None) -> EvolutionAlgebra:
    with open(path, encoding="utf-8") as fh:
        return parse_algebra(fh.read(), source=path, eps=eps)


# ---------------------------------------------------------------- output

class _Flow(list):
    """A list emitted in flow style ([a, b, c])."""


class _Dumper(yaml.SafeDumper):
    pass


def _flow_rep(dumper, data):
    return dumper.represent_sequence("tag:yaml.org,2002:seq", data, flow_style=True)


def _float_rep(dumper, data):
    if data != data:
        text = ".nan"
    elif data in (float("inf"), float("-inf")):
        text = ".inf" if data > 0 else "-.inf"
    else:
        text = format(data, ".17g")
        if "e" not in text and "." not in text:
            text += ".0"
    return dumper.represent_scalar("tag:yaml.org,2002:float", text)


_Dumper.add_representer(_Flow, _flow_rep)
_Dumper.add_representer(float, _float_rep)


def flow(seq) -> _Flow:
    return _Flow(seq)


def format_scalar(field: Field, x):
    """Literal for one entry: "p/q" strings, "a+bi" strings or [re, im] floats."""
    out = field.format(x)
    if isinstance(out, list):
        return _Flow(out)
    if field.name == "rational" and "/" not in out:
        return int(out)
    return out


def algebra_to_dict(alg: EvolutionAlgebra) -> dict:
    d = {
        "dim": alg.dim,
        "field": alg.field.name,
        "matrix": [_Flow(format_scalar(alg.field, a) for a in row) for row in alg.matrix],
    }
    if alg.label is not None:
        d["label"] = alg.label
    return d


def dump(data: Any) -> str:
    return yaml.dump(data, Dumper=_Dumper, sort_keys=False, default_flow_style=False, allow_unicode=True)


def dump_algebra(alg: EvolutionAlgebra) -> str:
    return dump(algebra_to_dict(alg))
