"""JSON documents for systems, generator sets and verdicts.

Document kinds (key ``kind``):

``fuchsian_linear``
    dimension, base_kind, base_point, poles [{z, terms [{order, matrix}]}],
    fourier [{k, matrix}].
``fuchsian_riccati``
    base_kind, base_point, poles [{z, terms [{order, a2, a1, a0}]}],
    fourier [{k, a2, a1, a0}].  A term may give a 2x2 ``matrix`` instead
    of the scalar coefficients.
``generators``
    space {kind, n}, matrices, optional labels.

Complex numbers are [re, im] pairs; matrices are row-major nested lists.
"""

from __future__ import annotations

import enum
import json
from typing import Optional, Union

import numpy as np

from .core import DEFAULT_TOL, GeneratorSet, ResidualReport, Space, ToleranceConfig, Verdict
from .jsonio import decode_complex, decode_matrix, encode_complex, encode_matrix
from .monodromy import (BaseKind, FourierTerm, FuchsianSystemSpec, LaurentTerm, MonodromyResult,
                        Pole, RiccatiSpec, RiccatiTerm, compute_monodromy, riccati_lift)
from .witness import witness_to_dict

Document = Union[FuchsianSystemSpec, RiccatiSpec, GeneratorSet]


def _require(d: dict, key: str):
    if key not in d:
        raise ValueError(f"missing key {key!r}")
    return d[key]


def _riccati_term(t: dict, index_key: str):
    index = int(_require(t, index_key))
    if "matrix" in t:
        return index, decode_matrix(t["matrix"])
    return index, RiccatiTerm(index, *(decode_complex(t.get(k, 0)) for k in ("a2", "a1", "a0")))


def _riccati_from_json(d: dict):
    """RiccatiSpec, or an already lifted FuchsianSystemSpec when any term
    is given as a 2x2 matrix."""
    base_kind = BaseKind(d.get("base_kind", "punctured_plane"))
    base_point = decode_complex(d.get("base_point", 0))
    poles = [(decode_complex(_require(p, "z")),
              [_riccati_term(t, "order") for t in p.get("terms", [])])
             for p in d.get("poles", [])]
    fourier = [_riccati_term(t, "k") for t in d.get("fourier", [])]

    def lifted(pair, cls):
        index, term = pair
        m = term if isinstance(term, np.ndarray) else term.lift()
        return cls(index, m)

    spec = FuchsianSystemSpec(
        2, base_kind, base_point,
        [Pole(z, [lifted(t, LaurentTerm) for t in terms]) for z, terms in poles],
        [lifted(t, FourierTerm) for t in fourier], projective=True)
    every = [t for _, terms in poles for t in terms] + fourier
    if all(isinstance(term, RiccatiTerm) for _, term in every):
        return RiccatiSpec(base_kind, base_point,
                           [(z, [term for _, term in terms]) for z, terms in poles],
                           [term for _, term in fourier])
    return spec


def _space_from_json(d: dict) -> Space:
    return Space(_require(d, "kind"), int(d.get("n", 1)))


def _generators_from_json(d: dict, tol: ToleranceConfig) -> GeneratorSet:
    space = _space_from_json(_require(d, "space"))
    mats = [decode_matrix(rows) for rows in _require(d, "matrices")]
    return GeneratorSet(space, mats, d.get("labels"), tol)


def document_from_json(d: dict, tol: ToleranceConfig = DEFAULT_TOL) -> Document:
    if not isinstance(d, dict):
        raise ValueError("document must be a JSON object")
    kind = _require(d, "kind")
    if kind == "generators":
        return _generators_from_json(d, tol)
    if kind == "fuchsian_riccati":
        return _riccati_from_json(d)
    if kind == "fuchsian_linear":
        n = int(_require(d, "dimension"))
        poles = [Pole(decode_complex(_require(p, "z")),
                      [LaurentTerm(int(_require(t, "order")), decode_matrix(_require(t, "matrix")))
                       for t in p.get("terms", [])])
                 for p in d.get("poles", [])]
        fourier = [FourierTerm(int(_require(t, "k")), decode_matrix(_require(t, "matrix")))
                   for t in d.get("fourier", [])]
        return FuchsianSystemSpec(n, d.get("base_kind", "punctured_plane"),
                                  decode_complex(d.get("base_point", 0)), poles, fourier)
    raise ValueError(f"unknown document kind {kind!r}")


def document_to_json(doc: Document) -> dict:
    if isinstance(doc, GeneratorSet):
        return generators_to_json(doc)
    if isinstance(doc, RiccatiSpec):
        def term(t, key):
            return {key: t.index, "a2": encode_complex(t.a2), "a1": encode_complex(t.a1),
                    "a0": encode_complex(t.a0)}
        return {"kind": "fuchsian_riccati", "base_kind": doc.base_kind.value,
                "base_point": encode_complex(doc.base_point),
                "poles": [{"z": encode_complex(z), "terms": [term(t, "order") for t in terms]}
                          for z, terms in doc.poles],
                "fourier": [term(t, "k") for t in doc.fourier_terms]}
    out = {"kind": "fuchsian_riccati" if doc.projective else "fuchsian_linear",
           "base_kind": doc.base_kind.value, "base_point": encode_complex(doc.base_point),
           "poles": [{"z": encode_complex(p.z),
                      "terms": [{"order": t.order, "matrix": encode_matrix(t.matrix)}
                                for t in p.terms]} for p in doc.poles],
           "fourier": [{"k": f.k, "matrix": encode_matrix(f.matrix)} for f in doc.fourier_terms]}
    if not doc.projective:
        out["dimension"] = doc.dimension
    return out


def resolve(doc: Document, tol: ToleranceConfig = DEFAULT_TOL
            ) -> tuple[GeneratorSet, Optional[MonodromyResult]]:
    """Generator set of a document, integrating monodromy when needed."""
    if isinstance(doc, GeneratorSet):
        return doc, None
    spec = riccati_lift(doc) if isinstance(doc, RiccatiSpec) else doc
    result = compute_monodromy(spec, tol)
    return result.generators, result


def generators_to_json(g: GeneratorSet, result: Optional[MonodromyResult] = None) -> dict:
    out = {"kind": "generators", "space": {"kind": g.space.kind.value, "n": g.space.n},
           "matrices": [encode_matrix(m) for m in g]}
    if g.labels is not None:
        out["labels"] = list(g.labels)
    if result is not None:
        out["loops"] = to_jsonable(result.loops)
        out["diagnostics"] = to_jsonable(result.diagnostics)
        out["warnings"] = list(result.warnings)
    return out


def to_jsonable(x):
    """Recursively convert numpy values, complex numbers and enums."""
    if isinstance(x, enum.Enum):
        return x.value
    if isinstance(x, dict):
        return {str(k): to_jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [to_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return to_jsonable(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(x)
    if isinstance(x, (complex, np.complexfloating)):
        return encode_complex(x)
    if x is None or isinstance(x, str):
        return x
    raise TypeError(f"cannot encode {type(x).__name__}")


def report_to_json(r: Optional[ResidualReport]):
    if r is None:
        return None
    return {"max_residual": float(r.max_residual), "samples": int(r.samples)}


def verdict_to_json(v: Verdict) -> dict:
    return {"relation": v.relation, "status": v.status.value, "category": v.category.value,
            "reason": v.reason,
            "witness": witness_to_dict(v.witness) if v.witness is not None else None,
            "residual_report": report_to_json(v.residual_report),
            "details": to_jsonable(v.details)}


def dumps(obj: dict) -> str:
    """Deterministic JSON text; floats use the shortest round-trip repr."""
    return json.dumps(obj)
