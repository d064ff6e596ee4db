"""Shipped fixture complexes: tetrahedron, cubes T_1..T_5 and tori 3..6."""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources

from .complex import PolygonalComplex, build_cube, build_tetrahedron, build_torus, complex_from_dict

FIXTURE_SIZES: dict[str, tuple[int, ...]] = {
    "tetrahedron": (0,),
    "cube": (1, 2, 3, 4, 5),
    "torus": (3, 4, 5, 6),
}


def fixture_key(kind: str, n: int | None = None) -> str:
    if kind == "tetrahedron":
        return "tetrahedron"
    if kind not in FIXTURE_SIZES:
        raise KeyError(f"unknown fixture {kind!r}")
    if n is None:
        raise ValueError(f"fixture {kind!r} needs --n")
    return f"{kind}{n}"


def all_fixture_keys() -> list[str]:
    return [fixture_key(k, n if k != "tetrahedron" else None) for k, sizes in FIXTURE_SIZES.items() for n in sizes]


def build_fixture(kind: str, n: int | None = None) -> PolygonalComplex:
    """Build from scratch, without touching the shipped JSON."""
    if kind == "tetrahedron":
        return build_tetrahedron()
    if kind == "cube":
        return build_cube(n)
    if kind == "torus":
        return build_torus(n)
    raise KeyError(f"unknown fixture {kind!r}")


@lru_cache(maxsize=None)
def _load(key: str) -> PolygonalComplex:
    text = resources.files("homdepth").joinpath("data", f"{key}.json").read_text(encoding="utf-8")
    return complex_from_dict(json.loads(text))


def load_fixture(kind: str, n: int | None = None) -> PolygonalComplex:
    """Shipped fixture when available, otherwise built on the fly."""
    if kind != "tetrahedron" and n is not None and n not in FIXTURE_SIZES.get(kind, ()):
        return build_fixture(kind, n)
    return _load(fixture_key(kind, n))


def fixture_by_key(key: str) -> PolygonalComplex:
    return _load(key)
