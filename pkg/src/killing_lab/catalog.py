"""Named spaces used by the test matrix, built from small JSON-style specs.

A space spec is a dict with a ``family`` key and family parameters, e.g.
``{"family": "warped_flat", "fiber_dim": 3, "nu": 0.5}`` or
``{"family": "sasaki", "base": "S2xS2", "k": 6}``.  :data:`CATALOG` maps
short ids to specs; :func:`build_space` turns either into a :class:`Space`.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from . import geometry, sasaki, warped

CATALOG = {
    "R3": {"family": "euclidean", "n": 3},
    "S2": {"family": "round_sphere", "n": 2, "radius": 1.0},
    "S3": {"family": "round_sphere", "n": 3, "radius": 1.0},
    "S3-homogeneous": {"family": "su2", "radius": 1.0},
    "T3": {"family": "abelian", "n": 3},
    "H3-warped": {"family": "warped_flat", "fiber_dim": 2, "nu": 0.5},
    "warped-2-0.3": {"family": "warped_flat", "fiber_dim": 2, "nu": 0.3},
    "H4-warped": {"family": "warped_flat", "fiber_dim": 3, "nu": 0.5},
    "warped-3-0.3": {"family": "warped_flat", "fiber_dim": 3, "nu": 0.3},
    "S2(4)": {"family": "kaehler_base", "base": "S2", "k": 4},
    "S2(6)": {"family": "kaehler_base", "base": "S2", "k": 6},
    "S2xS2(6)": {"family": "kaehler_base", "base": "S2xS2", "k": 6},
    "CP2(6)": {"family": "kaehler_base", "base": "CP2", "k": 6},
    "hopf": {"family": "sasaki", "base": "S2", "k": 4},
    "M5": {"family": "sasaki", "base": "S2xS2", "k": 6},
    "M5-CP2": {"family": "sasaki", "base": "CP2", "k": 6},
}

FAMILIES = ("euclidean", "round_sphere", "su2", "abelian", "warped_flat", "kaehler_base", "sasaki")


@dataclass
class Space:
    """A built space with the facts the checks compare against."""

    id: str
    spec: dict
    backend: geometry.Backend = field(repr=False)
    sectional: float | None = None  # constant sectional curvature, if any
    einstein: float | None = None
    killing: complex | None = None  # Killing constant of the shipped spinor, if any
    warped: warped.WarpedProduct | None = field(default=None, repr=False)
    base: sasaki.KaehlerBase | None = field(default=None, repr=False)
    bundle: sasaki.SasakiBundle | None = field(default=None, repr=False)
    volume: float | None = None

    @property
    def dim(self) -> int:
        return self.backend.dim

    def describe(self) -> dict:
        out = {"id": self.id, "spec": self.spec, "dim": self.dim, "exact": bool(self.backend.exact)}
        for key in ("sectional", "einstein", "volume"):
            val = getattr(self, key)
            if val is not None:
                out[key] = float(val)
        if self.killing is not None:
            out["killing"] = [float(self.killing.real), float(self.killing.imag)]
        return out


def _need(spec, key, kind=float):
    if key not in spec:
        raise ValueError(f"space family {spec.get('family')!r} needs parameter {key!r}")
    return kind(spec[key])


def build_space(spec, space_id: str | None = None) -> Space:
    """Build a space from a catalog id or a family spec."""
    if isinstance(spec, str):
        if spec not in CATALOG:
            raise ValueError(f"unknown catalog space {spec!r}")
        return build_space(CATALOG[spec], spec)
    spec = dict(spec)
    fam = spec.get("family")
    sid = space_id or canonical_id(spec)
    if fam == "euclidean":
        n = _need(spec, "n", int)
        return Space(sid, spec, geometry.euclidean(n), sectional=0.0, einstein=0.0)
    if fam == "round_sphere":
        n = _need(spec, "n", int)
        r = float(spec.get("radius", 1.0))
        kap = 1.0 / r**2
        return Space(sid, spec, geometry.round_sphere(n, r), sectional=kap, einstein=kap * (n - 1))
    if fam == "su2":
        r = float(spec.get("radius", 1.0))
        b = geometry.su2(r)
        return Space(sid, spec, b, sectional=1 / r**2, einstein=2 / r**2, killing=complex(0.5 / r), volume=b.volume)
    if fam == "abelian":
        n = _need(spec, "n", int)
        return Space(sid, spec, geometry.abelian(n), sectional=0.0, einstein=0.0, killing=0j)
    if fam == "warped_flat":
        w = warped.build_warped(_need(spec, "fiber_dim", int), _need(spec, "nu"))
        return Space(
            sid, spec, w.chart, sectional=w.sectional_curvature, einstein=w.einstein_constant,
            killing=w.killing_constant().value, warped=w,
        )
    if fam == "kaehler_base":
        b = sasaki.build_base(_need(spec, "base", str), _need(spec, "k"))
        sec = b.k if b.dim == 2 else None
        return Space(sid, spec, b.chart, sectional=sec, einstein=b.k, base=b)
    if fam == "sasaki":
        b = sasaki.build_base(_need(spec, "base", str), _need(spec, "k"))
        bundle = sasaki.build_total(b)
        sec = 1.0 if b.dim == 2 and abs(b.k - 4.0) < 1e-12 else None
        return Space(sid, spec, bundle.total_chart, sectional=sec, einstein=bundle.einstein_constant, base=b, bundle=bundle)
    raise ValueError(f"unknown space family {fam!r}; known: {', '.join(FAMILIES)}")


def canonical_id(spec: dict) -> str:
    params = ",".join(f"{k}={spec[k]}" for k in sorted(spec) if k != "family")
    return f"{spec.get('family')}({params})"


def catalog_hash(catalog: dict | None = None) -> str:
    """sha256 of the canonical JSON form of the catalog."""
    cat = CATALOG if catalog is None else catalog
    blob = json.dumps(cat, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


def list_catalog() -> list:
    return [build_space(sid).describe() for sid in sorted(CATALOG)]


def sample_points(space: Space, rng, count: int) -> np.ndarray:
    return space.backend.sample_points(rng, count)
