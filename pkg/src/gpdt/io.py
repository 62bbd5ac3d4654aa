"""JSON specifications for groupoids, graphs, algebra elements and kernel functions."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .algebra import AlgebraElement, KernelFunction
from .config import DEFAULT
from .graphs import (FiniteGraph, complete_graph, cycle_graph, path_graph,
                     random_regular_graph)
from .groupoid import (CoarseTruncation, FiniteGroupoid, HLSTruncation, build_coarse_truncation,
                       build_explicit, build_group, build_hls_truncation, build_pair,
                       build_transformation, disjoint_union, groupoid_from_group, label_str)
from .groups import cyclic_group, sl2_mod


class SpecError(ValueError):
    """Malformed specification (reported with exit code 2 by the CLI)."""


@dataclass
class Loaded:
    """A built groupoid plus the truncation data some commands need."""

    groupoid: FiniteGroupoid
    spec: dict
    hls: HLSTruncation | None = None
    coarse: CoarseTruncation | None = None


def read_json(path) -> dict:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as e:
        raise OSError(f"cannot read {p}: {e.strerror or e}") from e
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise SpecError(f"{p}: invalid JSON ({e.msg} at line {e.lineno})") from e


def parse_chain(chain, depth: int | None = None) -> list[int]:
    """A list of levels, or the shorthand ``"pow2"`` / ``"pow3"`` (needs ``depth``)."""
    if isinstance(chain, str):
        if chain.startswith("pow") and chain[3:].isdigit():
            if depth is None:
                raise SpecError(f"chain {chain!r} needs a depth")
            base = int(chain[3:])
            return [base ** n for n in range(1, int(depth) + 1)]
        try:
            return [int(x) for x in chain.split(",") if x.strip()]
        except ValueError:
            raise SpecError(f"cannot parse quotient chain {chain!r}") from None
    try:
        return [int(x) for x in chain]
    except (TypeError, ValueError):
        raise SpecError(f"cannot parse quotient chain {chain!r}") from None


def parse_graph(spec) -> FiniteGraph:
    if not isinstance(spec, dict):
        raise SpecError(f"graph spec must be an object, got {spec!r}")
    if "cycle" in spec:
        return cycle_graph(int(spec["cycle"]))
    if "complete" in spec:
        return complete_graph(int(spec["complete"]))
    if "path" in spec:
        return path_graph(int(spec["path"]))
    if "random_regular" in spec:
        return random_regular_graph(int(spec["random_regular"]), int(spec.get("degree", 3)),
                                    seed=int(spec.get("seed", DEFAULT.seed)))
    if "n" not in spec:
        raise SpecError("graph spec needs 'n' and 'edges'")
    return FiniteGraph.from_dict(spec)


def _group_from_spec(spec: dict, cap: int) -> FiniteGroupoid:
    names = spec.get("names")
    if "perm_generators" in spec:
        return build_group(spec["perm_generators"], cap=cap, names=names)
    if "matrix_generators" in spec:
        mg = spec["matrix_generators"]
        return build_group(mg["matrices"], modulus=int(mg["modulus"]), cap=cap, names=names)
    if "cyclic" in spec:
        return groupoid_from_group(cyclic_group(int(spec["cyclic"]), cap=cap))
    if "sl2" in spec:
        return groupoid_from_group(sl2_mod(int(spec["sl2"]), cap=cap))
    raise SpecError("group spec needs perm_generators, matrix_generators, cyclic or sl2")


def _action_table(group: FiniteGroupoid, spec: dict, points: int) -> np.ndarray:
    if "table" in spec:
        return np.asarray(spec["table"], dtype=np.int64)
    if spec.get("natural"):
        rows = group.group.rows
        if group.group.kind != "perm" or rows.shape[1] != points:
            raise SpecError("natural action needs a permutation group on the given points")
        return rows.copy()
    if spec.get("translation"):
        if group.group.kind != "cyclic":
            raise SpecError("translation action needs a cyclic group")
        m = group.group.modulus
        return (np.arange(m)[:, None] + np.arange(points)[None, :]) % points
    if "generator_images" in spec:
        # extend generator images along the Cayley graph; build_transformation
        # rejects the result if it is not an action
        imgs = {nm: np.asarray(v, dtype=np.int64) for nm, v in spec["generator_images"].items()}
        gens = group.group.generators
        table = group.group_table
        act = np.full((group.n_arrows, points), -1, dtype=np.int64)
        e = int(group.units[0])
        act[e] = np.arange(points)
        frontier = [e]
        while frontier:
            nxt = []
            for g in frontier:
                for nm, s in gens.items():
                    if nm not in imgs:
                        raise SpecError(f"no image given for generator {nm!r}")
                    h = int(table[s, g])
                    if act[h, 0] < 0:
                        act[h] = imgs[nm][act[g]]
                        nxt.append(h)
            frontier = nxt
        return act
    raise SpecError("action spec needs table, natural, translation or generator_images")


def build_from_spec(spec: dict, cap: int = DEFAULT.cap, base: Path | None = None) -> Loaded:
    if isinstance(spec, (str, Path)):
        path = Path(base or ".") / spec
        return build_from_spec(read_json(path), cap, path.parent)
    if not isinstance(spec, dict) or "type" not in spec:
        raise SpecError("groupoid spec must be an object with a 'type' field")
    kind = spec["type"]
    try:
        if kind == "pair":
            return Loaded(build_pair(int(spec["n"])), spec)
        if kind == "group":
            return Loaded(_group_from_spec(spec, cap), spec)
        if kind == "action":
            group = build_from_spec(spec["group"], cap, base).groupoid
            points = int(spec["points"])
            return Loaded(build_transformation(group, points, _action_table(group, spec, points)), spec)
        if kind == "hls":
            depth = spec.get("depth")
            kernels = parse_chain(spec["kernels"], depth)
            hls = build_hls_truncation(spec["parent"], kernels, depth, cap=cap)
            return Loaded(hls.groupoid, spec, hls=hls)
        if kind == "coarse":
            coarse = build_coarse_truncation([parse_graph(g) for g in spec["graphs"]])
            return Loaded(coarse.groupoid, spec, coarse=coarse)
        if kind == "disjoint_union":
            parts = [build_from_spec(p, cap, base).groupoid for p in spec["parts"]]
            return Loaded(disjoint_union(parts), spec)
        if kind == "explicit":
            return Loaded(build_explicit(spec["arrows"], spec["units"], spec["source"],
                                         spec["range"], spec["mul"], spec["inv"]), spec)
    except KeyError as e:
        raise SpecError(f"{kind} spec is missing field {e}") from None
    raise SpecError(f"unknown groupoid type {kind!r}")


def load_groupoid(path, cap: int = DEFAULT.cap) -> Loaded:
    path = Path(path)
    return build_from_spec(read_json(path), cap, path.parent)


# ---------------------------------------------------------------------------
# elements and kernels


def _groupoid_ref(data: dict, base: Path | None, cap: int, G: FiniteGroupoid | None):
    if G is not None:
        return G
    if "groupoid" not in data:
        raise SpecError("file needs a 'groupoid' reference")
    return build_from_spec(data["groupoid"], cap, base).groupoid


def _entries(rows, G, field: str):
    out = {}
    for row in rows:
        if not isinstance(row, (list, tuple)) or len(row) not in (2, 3):
            raise SpecError(f"{field} entries are [label, re] or [label, re, im], got {row!r}")
        lab = row[0]
        val = complex(float(row[1]), float(row[2]) if len(row) == 3 else 0.0)
        try:
            i = G.index(lab)
        except KeyError:
            raise SpecError(f"unknown arrow label {lab!r}") from None
        out[i] = out.get(i, 0) + val
    return out


def element_from_dict(data: dict, G: FiniteGroupoid | None = None, base=None,
                      cap: int = DEFAULT.cap) -> AlgebraElement:
    G = _groupoid_ref(data, base, cap, G)
    c = np.zeros(G.n_arrows, dtype=np.complex128)
    for i, v in _entries(data.get("coeffs", []), G, "coeffs").items():
        c[i] = v
    return AlgebraElement(G, c)


def element_to_dict(f: AlgebraElement, groupoid_spec=None) -> dict:
    G = f.groupoid
    rows = []
    for i in np.flatnonzero(f.coeffs != 0):
        v = complex(f.coeffs[i])
        rows.append([G.label_of(int(i)), v.real, v.imag])
    out = {"coeffs": rows}
    if groupoid_spec is not None:
        out = {"groupoid": groupoid_spec, **out}
    return out


def kernel_from_dict(data: dict, G: FiniteGroupoid | None = None, base=None,
                     cap: int = DEFAULT.cap) -> tuple[KernelFunction, str]:
    """Kernel function and its declared kind (``"positive"`` or ``"negative"``).

    Values come from ``"values"`` rows, optionally on top of ``"constant"``
    (default for unlisted arrows) or ``"unit_indicator": true``.
    """
    G = _groupoid_ref(data, base, cap, G)
    kind = data.get("kind", "positive")
    if kind not in ("positive", "negative"):
        raise SpecError(f"kernel kind must be 'positive' or 'negative', got {kind!r}")
    if data.get("unit_indicator"):
        v = G.is_unit.astype(np.complex128)
    elif "constant" in data:
        v = np.full(G.n_arrows, complex(data["constant"]))
    else:
        v = np.full(G.n_arrows, np.nan, dtype=np.complex128)
    for i, val in _entries(data.get("values", []), G, "values").items():
        v[i] = val
    if np.any(np.isnan(v)):
        missing = G.label_of(int(np.flatnonzero(np.isnan(v))[0]))
        raise SpecError(f"kernel function undefined at arrow {missing}")
    if not np.any(v.imag):
        v = v.real
    return KernelFunction(G, v), kind


def load_element(path, G=None, cap: int = DEFAULT.cap) -> AlgebraElement:
    path = Path(path)
    return element_from_dict(read_json(path), G, path.parent, cap)


def load_kernel(path, G=None, cap: int = DEFAULT.cap):
    path = Path(path)
    return kernel_from_dict(read_json(path), G, path.parent, cap)


def to_jsonable(obj):
    """Recursively convert numpy scalars/arrays and complex numbers for ``json.dumps``."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        if f != f or f in (float("inf"), float("-inf")):
            return None if f != f else ("inf" if f > 0 else "-inf")
        return f
    if isinstance(obj, (complex, np.complexfloating)):
        z = complex(obj)
        return [z.real, z.imag] if z.imag else z.real
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def arrow_labels(G: FiniteGroupoid) -> list[str]:
    return [label_str(l) for l in G.labels]
