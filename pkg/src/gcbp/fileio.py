"""JSON instance and packing files with rationals kept as ``"p/q"`` strings."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Mapping

from .core import GcbpError, Instance, Packing, packing_cost

__all__ = [
    "ParseError",
    "InstanceFile",
    "INSTANCE_FORMAT",
    "PACKING_FORMAT",
    "parse_rational",
    "read_instance_file",
    "parse_instance_file",
    "write_instance_file",
    "instance_to_file",
    "packing_document",
    "write_packing_file",
    "read_packing_file",
    "dumps",
]

INSTANCE_FORMAT = "gcbp-instance"
PACKING_FORMAT = "gcbp-packing"
VERSION = 1


class ParseError(GcbpError, ValueError):
    pass


def parse_rational(text: Any, where: str) -> Fraction:
    if isinstance(text, bool) or not isinstance(text, (str, int)):
        raise ParseError(f"{where}: expected a rational string like \"3/10\", got {text!r}")
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"{where}: malformed rational {text!r}") from exc


@dataclass
class InstanceFile:
    sizes: list[Fraction]
    cost: list[Fraction]
    metadata: dict[str, Any] = field(default_factory=dict)

    def to_instance(self) -> Instance:
        from .core import validate_instance

        return validate_instance(self.sizes, self.cost)

    def to_dict(self) -> dict[str, Any]:
        return {
            "format": INSTANCE_FORMAT,
            "version": VERSION,
            "sizes": [str(s) for s in self.sizes],
            "cost": [str(c) for c in self.cost],
            "metadata": self.metadata,
        }

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any], source: str = "<instance>") -> "InstanceFile":
        if not isinstance(doc, Mapping):
            raise ParseError(f"{source}: top level must be a JSON object")
        if doc.get("format", INSTANCE_FORMAT) != INSTANCE_FORMAT:
            raise ParseError(f"{source}: unexpected format tag {doc.get('format')!r}")
        if doc.get("version", VERSION) != VERSION:
            raise ParseError(f"{source}: unsupported version {doc.get('version')!r}")
        for key in ("sizes", "cost"):
            if not isinstance(doc.get(key), list):
                raise ParseError(f"{source}: field {key!r} must be a list")
        sizes = [parse_rational(s, f"{source}: sizes[{k}]") for k, s in enumerate(doc["sizes"])]
        cost = [parse_rational(c, f"{source}: cost[{k}]") for k, c in enumerate(doc["cost"])]
        meta = doc.get("metadata") or {}
        if not isinstance(meta, Mapping):
            raise ParseError(f"{source}: metadata must be an object")
        return cls(sizes, cost, dict(meta))


def dumps(doc: Any) -> str:
    """Deterministic JSON text: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"


def _load_json(path: Path) -> Any:
    try:
        text = path.read_text()
    except OSError as exc:
        raise GcbpError(f"{path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc


def read_instance_file(path) -> InstanceFile:
    path = Path(path)
    return InstanceFile.from_dict(_load_json(path), str(path))


def parse_instance_file(path) -> Instance:
    path = Path(path)
    raw = read_instance_file(path)
    try:
        return raw.to_instance()
    except ValueError as exc:
        raise ParseError(f"{path}: {exc}") from exc


def instance_to_file(inst: Instance, metadata: Mapping[str, Any] | None = None) -> InstanceFile:
    """File form of ``inst`` with the cost table back in the caller's scale."""
    raw_cost = [inst.cost.raw(c) for c in inst.cost.table]
    return InstanceFile(list(inst.sizes), raw_cost, dict(metadata or {}))


def write_instance_file(path, data: InstanceFile | Instance) -> None:
    if isinstance(data, Instance):
        data = instance_to_file(data)
    Path(path).write_text(dumps(data.to_dict()))


def packing_document(
    inst: Instance,
    packing: Packing,
    certificate: Mapping[str, Any] | None = None,
    algorithm: str | None = None,
) -> dict[str, Any]:
    f = inst.cost
    total = packing_cost(inst, packing)
    doc: dict[str, Any] = {
        "format": PACKING_FORMAT,
        "version": VERSION,
        "bins": [
            {
                "items": list(b),
                "cardinality": len(b),
                "cost": str(f.table[len(b)]),
                "raw_cost": str(f.raw(f.table[len(b)])),
            }
            for b in packing.bins
        ],
        "num_bins": len(packing),
        "total_cost": str(total),
        "total_cost_raw": str(f.raw(total)),
    }
    if algorithm is not None:
        doc["algorithm"] = algorithm
    if certificate is not None:
        doc["certificate"] = dict(certificate)
    return doc


def write_packing_file(
    path,
    inst: Instance,
    packing: Packing,
    certificate: Mapping[str, Any] | None = None,
    algorithm: str | None = None,
) -> None:
    Path(path).write_text(dumps(packing_document(inst, packing, certificate, algorithm)))


def read_packing_file(path) -> Packing:
    path = Path(path)
    doc = _load_json(path)
    if not isinstance(doc, Mapping) or doc.get("format") != PACKING_FORMAT:
        raise ParseError(f"{path}: not a {PACKING_FORMAT} document")
    bins = []
    for k, b in enumerate(doc.get("bins", [])):
        items = b.get("items") if isinstance(b, Mapping) else None
        if not isinstance(items, list) or not all(
            isinstance(i, int) and not isinstance(i, bool) for i in items
        ):
            raise ParseError(f"{path}: bins[{k}].items must be a list of integer ids")
        bins.append(tuple(items))
    return Packing(tuple(bins))
