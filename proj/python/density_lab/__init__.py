"""Exact-arithmetic density and pinned-distance experiments.

Constructions, families and reports are plain dicts in the same JSON schema
the command-line tool reads and writes.  Rationals are given as strings such
as "1/100".
"""

import json
from typing import Iterable, Optional

from . import _core
from ._core import DensityLabError, ParseError

__all__ = [
    "DensityLabError",
    "ParseError",
    "build_boxes",
    "build_annuli",
    "pinned_distance_set",
    "density_profile",
    "pinned_density_profile",
    "mc_volume",
    "mc_pinned_distances",
    "unit_ball_volume",
    "sphere_area",
    "sharpness_constant",
    "verify",
    "run_cli",
]


def _text(doc) -> str:
    return doc if isinstance(doc, str) else json.dumps(doc)


def _point(pin) -> str:
    return pin if isinstance(pin, str) else ",".join(str(c) for c in pin)


def _radii(radii: Optional[Iterable]) -> list:
    return [str(r) for r in radii] if radii is not None else []


def build_boxes(d: int = 2, count: int = 8, preset: str = "relaxed", epsilon: Optional[str] = None) -> dict:
    return json.loads(_core.build_boxes(d, count, preset, epsilon or ""))


def build_annuli(d: int = 2, count: int = 6, epsilon0: str = "1/100", start_index: int = 1) -> dict:
    return json.loads(_core.build_annuli(d, count, str(epsilon0), start_index))


def pinned_distance_set(doc, pin) -> dict:
    return json.loads(_core.pinned_distance_set(_text(doc), _point(pin)))


def density_profile(doc, radii: Optional[Iterable] = None) -> list:
    """Ratios |A ∩ B(0,R)| / R^d; the canonical schedule when radii is None."""
    return json.loads(_core.density_profile(_text(doc), _radii(radii)))


def pinned_density_profile(doc, pin, radii: Optional[Iterable] = None) -> list:
    return json.loads(_core.pinned_density_profile(_text(doc), _point(pin), _radii(radii)))


def mc_volume(doc, radius, samples: int = 100000, seed: int = 0) -> dict:
    estimate, low, high, hits, n = _core.mc_volume(_text(doc), str(radius), samples, seed)
    return {"estimate": estimate, "ci99": [low, high], "hits": hits, "samples": n}


def mc_pinned_distances(doc, pin, samples: int = 100000, seed: int = 0) -> list:
    return _core.mc_pinned_distances(_text(doc), _point(pin), samples, seed)


unit_ball_volume = _core.unit_ball_volume
sphere_area = _core.sphere_area


def sharpness_constant(d: int, epsilon0="1/100") -> float:
    return _core.sharpness_constant(d, str(epsilon0))


def run_cli(*args: str):
    """Runs the command-line tool in-process; returns (exit_code, stdout, stderr)."""
    return _core.run_cli([str(a) for a in args])


def verify(check: str, *args: str) -> dict:
    """Runs `verify <check> ...` and returns the report; raises on usage errors."""
    code, out, err = run_cli("verify", check, *args)
    if code == 3:
        raise DensityLabError(err.strip())
    return json.loads(out)
