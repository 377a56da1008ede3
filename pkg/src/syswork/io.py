"""Model and lattice files.

Model files::

    {"type": "lie", "dim": 3, "c": [[1, 2, 3, "1"]],
     "metric": {"gram": [[1, 0, 0], [0, 1, 0], [0, 0, "t"]]},
     "params": {"t": "1"}}

    {"type": "simplicial", "simplices": [[0, 1, 2], ...]}

Structure constants ``[i, j, k, c]`` mean ``[e_i, e_j] = c e_k`` with
1-based indices.  Rationals may be written as ``"p/q"`` strings.  Gram
entries may name a parameter from ``params``; a ``--grid`` run overrides
it.  Optional keys: ``"pairing"`` (degree -> unimodular matrix),
``"covolume"`` and ``"name"``.

Lattice files::

    {"basis": [[1, 0], [0, 1]], "norm": {"kind": "quadratic", "gram": [[1, 0], [0, 1]]}}

with norm kinds ``quadratic``, ``euclidean``, ``l1``, ``linf`` and
``polyhedral`` (``facets`` or ``vertices``).
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Any, Mapping

from . import exact_linear as el
from .cohomology import CohomologyRing
from .dga import (CochainModel, LieStructure, SimplicialComplex, build_chevalley_eilenberg,
                  build_simplicial_cochains)
from .geometry import InvariantMetric
from .lattice import NormedLattice, NormOracle


class ModelLoadError(ValueError):
    pass


@dataclass
class LoadedModel:
    name: str
    doc: dict
    model: CochainModel
    lie: LieStructure | None = None
    pairings: dict[int, el.Matrix] = field(default_factory=dict)
    covolume: Fraction = Fraction(1)
    params: dict[str, Fraction] = field(default_factory=dict)

    def ring(self) -> CohomologyRing:
        return CohomologyRing(self.model, self.pairings or None)

    @property
    def has_metric(self) -> bool:
        return "metric" in self.doc

    def metric(self, overrides: Mapping[str, Any] | None = None) -> InvariantMetric:
        if not self.has_metric:
            if self.lie is None:
                raise ModelLoadError(f"{self.name}: simplicial models carry no invariant metric")
            return InvariantMetric.identity(self.lie.dim)
        params = dict(self.params)
        for k, v in (overrides or {}).items():
            params[k] = el.frac(v) if not isinstance(v, float) else Fraction(v)
        try:
            gram = [[_entry(x, params) for x in row] for row in self.doc["metric"]["gram"]]
            return InvariantMetric(el.as_matrix(gram))
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise ModelLoadError(f"{self.name}: bad metric: {exc}") from None


def _entry(x, params: Mapping[str, Fraction]) -> Fraction:
    if isinstance(x, str):
        s = x.strip()
        if s in params:
            return params[s]
        try:
            return Fraction(s)
        except ValueError:
            raise ValueError(f"unknown parameter or malformed rational {x!r}") from None
    if isinstance(x, bool):
        raise ValueError("booleans are not numbers")
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


def _resolve_path(ref: str) -> str:
    if os.path.exists(ref):
        return ref
    name = ref if ref.endswith(".json") else ref + ".json"
    res = resources.files("syswork") / "models" / name
    if res.is_file():
        return str(res)
    raise ModelLoadError(f"no such model file or bundled model: {ref}")


def bundled_models() -> list[str]:
    root = resources.files("syswork") / "models"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def read_json(ref: str) -> tuple[str, dict]:
    path = _resolve_path(ref)
    try:
        with open(path) as fh:
            return path, json.load(fh)
    except json.JSONDecodeError as exc:
        raise ModelLoadError(f"{path}: invalid JSON: {exc}") from None


def model_from_doc(doc: dict, name: str = "<model>") -> LoadedModel:
    kind = doc.get("type")
    try:
        if kind == "lie":
            n = int(doc["dim"])
            constants = {}
            for entry in doc.get("c", []):
                i, j, k, v = entry
                i, j, k = int(i) - 1, int(j) - 1, int(k) - 1
                if not (0 <= i < n and 0 <= j < n and 0 <= k < n) or i == j:
                    raise ModelLoadError(f"{name}: bad structure constant {entry}")
                v = _entry(v, {})
                if i > j:
                    i, j, v = j, i, -v
                constants[(i, j, k)] = constants.get((i, j, k), Fraction(0)) + v
            L = LieStructure(n, {key: v for key, v in constants.items() if v})
            model = build_chevalley_eilenberg(L)
        elif kind == "simplicial":
            K = SimplicialComplex.from_facets(doc["simplices"])
            L = None
            model = build_simplicial_cochains(K)
        else:
            raise ModelLoadError(f"{name}: model type must be 'lie' or 'simplicial', got {kind!r}")
        pairings = {int(k): el.as_matrix(P) for k, P in doc.get("pairing", {}).items()}
        params = {k: _entry(v, {}) for k, v in doc.get("params", {}).items()}
        return LoadedModel(doc.get("name", name), doc, model, L, pairings,
                           _entry(doc.get("covolume", 1), {}), params)
    except ModelLoadError:
        raise
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise ModelLoadError(f"{name}: {type(exc).__name__}: {exc}") from None


def load_model(ref: str) -> LoadedModel:
    path, doc = read_json(ref)
    name = doc.get("name") or os.path.splitext(os.path.basename(path))[0]
    return model_from_doc(doc, name)


def norm_from_doc(spec: dict, dim: int) -> NormOracle:
    kind = spec.get("kind", "euclidean")
    if kind == "euclidean":
        return NormOracle.euclidean(dim)
    if kind == "quadratic":
        return NormOracle.quadratic(el.as_matrix([[_entry(x, {}) for x in r] for r in spec["gram"]]))
    if kind == "l1":
        return NormOracle.l1(dim)
    if kind == "linf":
        return NormOracle.linf(dim)
    if kind == "polyhedral":
        if "facets" in spec:
            return NormOracle.polyhedral(facets=[[_entry(x, {}) for x in r] for r in spec["facets"]])
        return NormOracle.polyhedral(vertices=[[_entry(x, {}) for x in r] for r in spec["vertices"]])
    raise ModelLoadError(f"unknown norm kind {kind!r}")


def load_lattice(ref: str) -> NormedLattice:
    path, doc = read_json(ref)
    try:
        basis = el.as_matrix([[_entry(x, {}) for x in r] for r in doc["basis"]])
        return NormedLattice(basis, norm_from_doc(doc.get("norm", {}), len(basis)))
    except ModelLoadError:
        raise
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise ModelLoadError(f"{path}: {type(exc).__name__}: {exc}") from None


def fraction_str(x: Fraction) -> str:
    x = el.frac(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
