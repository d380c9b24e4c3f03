"""Test-matrix runner and deterministic reports.

A suite config is JSON::

    {"name": "default",
     "defaults": {"samples": 4, "seed": 0},
     "entries": [{"id": "s3-killing", "space": "S3-homogeneous",
                  "operation": "killing_residual", "tolerance": 1e-12}, ...]}

``space`` is a catalog id, a family spec dict, or null for pure algebra.
Each entry gets its own random generator, Philox-4x64 keyed by the entry
seed (numpy's ``Philox(key=seed)``, counter starting at zero).  Draws happen
in a fixed order: sample points first (``count x dim`` uniforms mapped into
the chart box), then field coefficients, one field after another.

An entry passes when its residual is within tolerance and its finite
difference error estimate is too; an error estimate above the tolerance
makes the entry inconclusive whatever the residual.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources

import jsonschema
import numpy as np

from . import catalog as cat
from . import clifford, geometry, sasaki, spinorfield, tensorfield, warped
from .numdiff import fd_error_tracking

STATUSES = ("pass", "fail", "inconclusive")


# --- data types -----------------------------------------------------------------


@dataclass
class TestMatrixEntry:
    id: str
    space: object
    operation: str
    tolerance: float
    samples: int = 4
    seed: int = 0
    field_family: str | None = None
    expected: dict | None = None
    params: dict = field(default_factory=dict)

    __test__ = False  # not a pytest class

    def __post_init__(self):
        if not (isinstance(self.tolerance, (int, float)) and self.tolerance > 0):
            raise ValueError(f"entry {self.id!r}: tolerance must be positive, got {self.tolerance!r}")
        if self.operation not in OPERATIONS:
            raise ValueError(f"entry {self.id!r}: unknown operation {self.operation!r}")
        if int(self.samples) < 1:
            raise ValueError(f"entry {self.id!r}: samples must be positive")
        self.samples = int(self.samples)
        self.seed = int(self.seed)

    @property
    def space_id(self) -> str:
        if self.space is None:
            return "-"
        if isinstance(self.space, str):
            return self.space
        return cat.canonical_id(self.space)

    def rng(self) -> np.random.Generator:
        return make_rng(self.seed)

    def to_dict(self) -> dict:
        out = {
            "id": self.id,
            "space": self.space,
            "operation": self.operation,
            "tolerance": float(self.tolerance),
            "samples": self.samples,
            "seed": self.seed,
            "params": self.params,
        }
        if self.field_family is not None:
            out["field_family"] = self.field_family
        if self.expected is not None:
            out["expected"] = self.expected
        return out


@dataclass
class EntryResult:
    id: str
    space: str
    operation: str
    status: str
    residual: float
    tolerance: float
    fd_error: float
    wall_time: float = 0.0
    detail: dict = field(default_factory=dict)
    reason: str = ""

    def to_dict(self, timing: bool = False) -> dict:
        out = {
            "id": self.id,
            "space": self.space,
            "operation": self.operation,
            "status": self.status,
            "residual": self.residual,
            "tolerance": self.tolerance,
            "fd_error": self.fd_error,
            "detail": self.detail,
            "reason": self.reason,
        }
        if timing:
            out["wall_time"] = self.wall_time
        return out


@dataclass
class Report:
    suite: str
    entries: list
    catalog_hash: str
    config_hash: str

    @property
    def summary(self) -> dict:
        counts = {s: 0 for s in STATUSES}
        for e in self.entries:
            counts[e.status] += 1
        counts["total"] = len(self.entries)
        return counts

    @property
    def exit_code(self) -> int:
        s = self.summary
        return 0 if s["fail"] == 0 and s["inconclusive"] == 0 else 1

    def failed(self) -> list:
        return [e.id for e in self.entries if e.status == "fail"]

    def to_dict(self, timing: bool = False) -> dict:
        return {
            "suite": self.suite,
            "catalog_hash": self.catalog_hash,
            "config_hash": self.config_hash,
            "summary": self.summary,
            "entries": [e.to_dict(timing) for e in self.entries],
        }


@dataclass
class OpResult:
    residual: float
    fd_error: float = 0.0
    detail: dict = field(default_factory=dict)


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=int(seed)))


# --- helpers shared by operations ------------------------------------------------


def _points(space, entry, rng):
    if space.backend.exact:
        return np.zeros((1, space.dim))
    return space.backend.sample_points(rng, entry.samples)


def _mu(entry, space):
    val = entry.params.get("mu")
    if val is None:
        if space.killing is None:
            raise ValueError(f"space {space.id} has no Killing constant")
        return complex(space.killing)
    if isinstance(val, (list, tuple)):
        return complex(val[0], val[1])
    return complex(val)


def _spinor(space, entry):
    """The shipped Killing spinor of a space (unit length on S^3, type I on warped charts)."""
    if space.warped is not None:
        sign = float(entry.params.get("sign", 1.0))
        return warped.build_type1_spinor(space.warped, sign=sign).sigma
    if space.backend.exact and space.killing is not None:
        rep = clifford.build_rep(space.dim)
        basis = spinorfield.constant_killing_spinors(space.backend, rep, space.killing)
        if basis.shape[1] == 0:
            raise RuntimeError(f"no constant Killing spinors on {space.id}")
        s = basis[:, 0]
        return spinorfield.SpinorField(lambda x: s, rep, constant=True, label="constant_killing", backend=space.backend)
    raise ValueError(f"space {space.id} has no shipped Killing spinor")


def _field(family, space, rng, center=None, base=False):
    n = space.base.dim if base else space.dim
    if family == "metric":
        return tensorfield.metric_field(n)
    if family == "random_constant":
        return tensorfield.random_constant(rng, n)
    if family == "random_constant_traceless":
        return tensorfield.random_constant(rng, n, traceless=True)
    if family == "random_polynomial":
        return tensorfield.random_polynomial(rng, n, center=center)
    if family == "product_direction":
        if space.bundle is not None:
            return sasaki.product_direction(space.bundle)
        f = space.base.factors
        return tensorfield.product_unstable_direction(space.backend, f[0], f[1])
    raise ValueError(f"unknown field family {family!r}")


def _finite(x) -> float:
    x = float(x)
    return x if math.isfinite(x) else float("inf")


# --- operations -------------------------------------------------------------------


def op_clifford_relations(space, entry, rng):
    n_max = int(entry.params.get("n_max", 9))
    worst_rel = worst_sand = worst_unit = 0.0
    for n in range(1, n_max + 1):
        rep = clifford.build_rep(n)
        worst_rel = max(worst_rel, clifford.relation_residual(rep))
        worst_unit = max(worst_unit, clifford.unitarity_residual(rep))
        for i in range(n):
            s = rng.standard_normal(rep.spinor_dim) + 1j * rng.standard_normal(rep.spinor_dim)
            s /= np.linalg.norm(s)
            worst_sand = max(worst_sand, clifford.sandwich_identity_check(rep, s, i))
    return OpResult(max(worst_rel, worst_sand, worst_unit), 0.0, {"relations": worst_rel, "sandwich": worst_sand, "unitarity": worst_unit, "n_max": n_max})


def op_curvature_oracle(space, entry, rng):
    if space.sectional is None:
        raise ValueError(f"space {space.id} has no constant-curvature oracle")
    ref = geometry.constant_curvature_tensor(space.dim, space.sectional)
    worst = 0.0
    with fd_error_tracking() as est:
        for x in _points(space, entry, rng):
            worst = max(worst, float(np.abs(geometry.curvature(space.backend, None if space.backend.exact else x).riemann - ref).max()))
    return OpResult(worst, est.value, {"sectional": space.sectional})


def op_einstein_oracle(space, entry, rng):
    pts = _points(space, entry, rng)
    if space.backend.exact:
        ric = geometry.curvature(space.backend).ricci
        return OpResult(float(np.abs(ric - space.einstein * np.eye(space.dim)).max()), 0.0, {"einstein": space.einstein})
    res, err = geometry.verify_einstein(space.backend, pts, space.einstein)
    return OpResult(res, err, {"einstein": space.einstein})


def op_killing_scalar_curvature(space, entry, rng):
    mu = _mu(entry, space)
    n = space.dim
    expected = (4 * n * (n - 1) * mu**2).real
    worst = 0.0
    with fd_error_tracking() as est:
        for x in _points(space, entry, rng):
            scal = geometry.curvature(space.backend, None if space.backend.exact else x).scalar
            worst = max(worst, abs(scal - expected) / abs(expected))
    return OpResult(worst, est.value, {"expected_scalar": expected})


def op_killing_residual(space, entry, rng):
    sigma = _spinor(space, entry)
    pts = _points(space, entry, rng)
    res, err = spinorfield.killing_residual(space.backend, sigma, _mu(entry, space), pts)
    return OpResult(res, err, {"mu": [_mu(entry, space).real, _mu(entry, space).imag]})


def _require_warped(space):
    if space.warped is None:
        raise ValueError(f"space {space.id} is not a warped product")
    return space.warped


def op_type1_q_sigma(space, entry, rng):
    w = _require_warped(space)
    sigma = _spinor(space, entry)
    with fd_error_tracking() as est:
        q = warped.q_sigma(w, sigma, _points(space, entry, rng))
    return OpResult(max(abs(q.mean), q.spread), est.value, {"mean": q.mean, "spread": q.spread})


def op_type1_length(space, entry, rng):
    w = _require_warped(space)
    return OpResult(warped.length_residual(w, _spinor(space, entry), _points(space, entry, rng)))


def op_type1_t_action(space, entry, rng):
    w = _require_warped(space)
    return OpResult(warped.t_action_residual(w, _spinor(space, entry), _points(space, entry, rng)))


def op_type1_orthogonality(space, entry, rng):
    _require_warped(space)
    return OpResult(warped.orthogonality_check(_spinor(space, entry), _points(space, entry, rng)))


def op_bochner(space, entry, rng):
    sigma = _spinor(space, entry)
    mu = _mu(entry, space)
    family = entry.field_family or "random_constant"
    nfields = int(entry.params.get("fields", 1))
    relative = bool(entry.params.get("relative", not space.backend.exact))
    variant = entry.params.get("divergence_variant", "scalar")
    worst = 0.0
    with fd_error_tracking() as est:
        for x in _points(space, entry, rng):
            for _ in range(nfields):
                h = _field(family, space, rng, center=x)
                b = spinorfield.bochner_residual(space.backend, h, sigma, mu, x, variant)
                worst = max(worst, b.relative if relative else b.residual)
    return OpResult(worst, est.value, {"relative": relative, "field_family": family, "divergence_variant": variant})


def op_phi_pairing(space, entry, rng):
    sigma = _spinor(space, entry)
    nfields = int(entry.params.get("fields", 1))
    worst = 0.0
    for x in _points(space, entry, rng):
        s = sigma(x)
        for _ in range(nfields):
            h = tensorfield.random_symmetric(rng, space.dim)
            h2 = tensorfield.random_symmetric(rng, space.dim)
            worst = max(worst, spinorfield.re_inner_phi(h, h2, s, sigma.rep)[1])
    return OpResult(worst)


def op_t_action_norm(space, entry, rng):
    w = _require_warped(space)
    sigma = _spinor(space, entry)
    nfields = int(entry.params.get("fields", 1))
    worst = 0.0
    for x in _points(space, entry, rng):
        s = sigma(x)
        for _ in range(nfields):
            h = tensorfield.random_symmetric(rng, space.dim)
            worst = max(worst, spinorfield.t_action_norm(h, s, w.t_index, sigma.rep))
    return OpResult(worst)


def op_real_killing_identity(space, entry, rng):
    sigma = _spinor(space, entry)
    mu = _mu(entry, space)
    nfields = int(entry.params.get("fields", 1))
    family = entry.field_family or "random_constant_traceless"
    worst = worst_imag = 0.0
    for _ in range(nfields):
        h = _field(family, space, rng)
        r = spinorfield.real_killing_identity(space.backend, h, sigma, mu)
        worst = max(worst, r.residual)
        worst_imag = max(worst_imag, r.imag_mu_dirac_phi)
    return OpResult(max(worst, worst_imag), 0.0, {"identity": worst, "imaginary_part": worst_imag})


def op_spectral_gap(space, entry, rng):
    sigma = _spinor(space, entry)
    nfields = int(entry.params.get("fields", 1))
    family = entry.field_family or "random_constant_traceless"
    ens = [_field(family, space, rng) for _ in range(nfields)]
    rows = spinorfield.spectral_gap_report(space.backend, sigma, _mu(entry, space), ens)
    low = min(r[1] for r in rows)
    return OpResult(max(0.0, -low), 0.0, {"min_gap": low, "rows": [[r[0], r[1], r[2]] for r in rows]})


def op_homogeneous_integral(space, entry, rng):
    """Relative gap between homogeneous_integral(space, 1) and a Monte-Carlo volume of the unit 3-sphere."""
    draws = int(entry.params.get("draws", 400000))
    exact = homogeneous_integral(space, 1.0)
    mc = monte_carlo_s3_volume(rng, draws) * float(space.spec.get("radius", 1.0)) ** 3
    return OpResult(abs(exact - mc) / exact, 0.0, {"closed_form": exact, "monte_carlo": mc})


def op_cauchy_step(space, entry, rng):
    """Slack of the Cauchy-Schwarz step and the Leibniz rule for D(Phi / f)."""
    w = _require_warped(space)
    ts = warped.build_type1_spinor(w)
    worst_viol = worst_leib = 0.0
    with fd_error_tracking() as est:
        for x in _points(space, entry, rng):
            h = tensorfield.random_polynomial(rng, w.dim, center=x)
            psi = spinorfield.phi_field(h, ts.sigma)
            dphi = spinorfield.twisted_dirac(w.chart, psi, x, ts.rep)
            lhs, rhs = warped.cauchy_step(ts, dphi, psi(x))
            worst_viol = max(worst_viol, rhs - lhs)
            worst_leib = max(worst_leib, warped.leibniz_check(w, h, ts, x) / max(1.0, float(np.linalg.norm(dphi))))
    return OpResult(max(0.0, worst_viol, worst_leib), est.value, {"inequality_violation": worst_viol, "leibniz": worst_leib})


def _require_bundle(space):
    if space.bundle is None:
        raise ValueError(f"space {space.id} is not a circle bundle")
    return space.bundle


def _table_result(tab, relative=False, **extra):
    detail = tab.as_dict()
    detail.update(extra)
    return OpResult(tab.worst(relative), tab.fd_error, detail)


def op_base_invariants(space, entry, rng):
    if space.base is None:
        raise ValueError(f"space {space.id} has no Kaehler base")
    inv = sasaki.base_invariants(space.base, space.base.chart.sample_points(rng, entry.samples))
    res = max(inv.j_squared, inv.j_orthogonal, inv.d_omega, inv.dA_minus_2omega, inv.einstein)
    return OpResult(res, inv.fd_error, {
        "j_squared": inv.j_squared, "j_orthogonal": inv.j_orthogonal, "d_omega": inv.d_omega,
        "dA_minus_2omega": inv.dA_minus_2omega, "einstein": inv.einstein,
    })


def op_sasaki_axioms(space, entry, rng):
    b = _require_bundle(space)
    return _table_result(sasaki.axioms(b, _points(space, entry, rng)), relative=True)


def op_reeb_curvature(space, entry, rng):
    b = _require_bundle(space)
    return _table_result(sasaki.reeb_curvature_check(b, _points(space, entry, rng)))


def op_horizontal_lift(space, entry, rng):
    b = _require_bundle(space)
    pts = _points(space, entry, rng)
    return _table_result(sasaki.horizontal_lift_check(b, pts, rng))


def _base_fields(space, entry, rng, pts):
    family = entry.field_family or "random_polynomial"
    if family == "random_polynomial":
        return [(x, _field(family, space, rng, center=space.bundle.project(x), base=True)) for x in pts]
    h = _field(family, space, rng, base=True)
    return [(x, h) for x in pts]


def op_rough_laplacian_lift(space, entry, rng):
    b = _require_bundle(space)
    tab = sasaki.CheckTable()
    with fd_error_tracking() as est:
        for x, h in _base_fields(space, entry, rng, _points(space, entry, rng)):
            t = sasaki.rough_laplacian_lift_check(b, h, [x])
            for name, (r, s) in t.rows.items():
                tab.add(name, r, s)
    tab.fd_error = est.value
    return _table_result(tab, relative=True)


def op_curvature_lift(space, entry, rng):
    b = _require_bundle(space)
    tab = sasaki.CheckTable()
    with fd_error_tracking() as est:
        for x, h in _base_fields(space, entry, rng, _points(space, entry, rng)):
            t = sasaki.curvature_lift_check(b, h, [x])
            for name, (r, s) in t.rows.items():
                tab.add(name, r, s)
    tab.fd_error = est.value
    return _table_result(tab, relative=True)


def op_einstein_operator_lift(space, entry, rng):
    b = _require_bundle(space)
    tab = sasaki.CheckTable()
    values = []
    with fd_error_tracking() as est:
        for x, h in _base_fields(space, entry, rng, _points(space, entry, rng)):
            row = sasaki.einstein_operator_lift_values(b, h, x)
            values.append(row.lifted)
            tab.add("einstein_relation", row.residual, max(abs(row.lifted), abs(row.rhs)))
            tab.add("hJ_bound_violation", max(0.0, row.hjh - row.hh), row.hh)
    tab.fd_error = est.value
    return _table_result(tab, relative=True, lifted_min=min(values), lifted_max=max(values))


def op_lift_tt(space, entry, rng):
    b = _require_bundle(space)
    h = _field(entry.field_family or "product_direction", space, rng, base=True)
    pts = _points(space, entry, rng)
    rep = sasaki.lift_tt_report(b, h, pts)
    xi_div = max(abs(sasaki.xi_divergence(b, h, x)) for x in pts)
    res = max(rep.max_trace, rep.max_divergence, xi_div)
    return OpResult(res, rep.fd_error, {"max_trace": rep.max_trace, "max_divergence": rep.max_divergence, "xi_divergence": xi_div})


def op_instability_certificate(space, entry, rng):
    p1 = int(entry.params.get("p1", 1))
    p2 = int(entry.params.get("p2", 1))
    pts = None
    if space is not None and space.bundle is not None:
        pts = _points(space, entry, rng)
    cert = sasaki.instability_certificate(p1, p2, points=pts, rng=rng, samples=entry.samples)
    f = sasaki.certificate_formulas(p1, p2)
    res = 0.0
    if cert.verdict != "UNSTABLE":
        res = float("inf")
    exp = entry.expected or {}
    if "base_value" in exp:
        res = max(res, abs(cert.base_value - float(exp["base_value"])))
    if "lifted_value" in exp:
        res = max(res, abs(cert.lifted_value - float(exp["lifted_value"])))
    fd = 0.0
    if cert.numeric is not None:
        res = max(res, cert.numeric["lifted_max_rel_dev"], cert.numeric["h_norm2_max_dev"])
        fd = cert.numeric["fd_error"]
    detail = cert.as_dict()
    detail["formulas"] = f
    return OpResult(res, fd, detail)


OPERATIONS = {
    "clifford_relations": op_clifford_relations,
    "curvature_oracle": op_curvature_oracle,
    "einstein_oracle": op_einstein_oracle,
    "killing_scalar_curvature": op_killing_scalar_curvature,
    "killing_residual": op_killing_residual,
    "type1_q_sigma": op_type1_q_sigma,
    "type1_length": op_type1_length,
    "type1_t_action": op_type1_t_action,
    "type1_orthogonality": op_type1_orthogonality,
    "bochner": op_bochner,
    "phi_pairing": op_phi_pairing,
    "t_action_norm": op_t_action_norm,
    "real_killing_identity": op_real_killing_identity,
    "spectral_gap": op_spectral_gap,
    "homogeneous_integral": op_homogeneous_integral,
    "cauchy_step": op_cauchy_step,
    "base_invariants": op_base_invariants,
    "sasaki_axioms": op_sasaki_axioms,
    "reeb_curvature": op_reeb_curvature,
    "horizontal_lift": op_horizontal_lift,
    "rough_laplacian_lift": op_rough_laplacian_lift,
    "curvature_lift": op_curvature_lift,
    "einstein_operator_lift": op_einstein_operator_lift,
    "lift_tt": op_lift_tt,
    "instability_certificate": op_instability_certificate,
}


# --- homogeneous integrals -----------------------------------------------------------


def homogeneous_integral(space, value, constant: bool = True) -> float:
    """Integral of a constant integrand over a compact homogeneous space: value x volume."""
    backend = space.backend if isinstance(space, cat.Space) else space
    if not getattr(backend, "exact", False) or getattr(backend, "volume", None) is None:
        raise ValueError("homogeneous integrals need a compact homogeneous backend with known volume")
    if not constant:
        raise ValueError("only constant integrands reduce to value x volume")
    return float(value) * float(backend.volume)


def monte_carlo_s3_volume(rng, draws: int = 400000) -> float:
    """Volume of the unit 3-sphere as 4 x vol(B^4), vol(B^4) by hit-or-miss in [-1, 1]^4."""
    pts = rng.uniform(-1.0, 1.0, size=(draws, 4))
    frac = float(np.mean(np.einsum("ij,ij->i", pts, pts) <= 1.0))
    return 4.0 * 16.0 * frac


# --- running ---------------------------------------------------------------------


def _data_dir():
    return resources.files("killing_lab") / "data"


def _schema(name: str) -> dict:
    return json.loads((_data_dir() / name).read_text())


def config_schema() -> dict:
    return _schema("config.schema.json")


def report_schema() -> dict:
    return _schema("report.schema.json")


class ConfigError(ValueError):
    """The suite config does not parse or validate."""


def load_config(source) -> dict:
    """Config from a dict, a JSON file path, or a shipped suite name."""
    if isinstance(source, dict):
        cfg = source
    else:
        src = str(source)
        shipped = _data_dir() / "suites" / f"{src}.json"
        try:
            text = shipped.read_text() if shipped.is_file() else open(src).read()
        except OSError as exc:
            raise ConfigError(f"cannot read config {src!r}: {exc}") from exc
        try:
            cfg = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {src!r} is not valid JSON: {exc}") from exc
    try:
        jsonschema.validate(cfg, config_schema())
    except jsonschema.ValidationError as exc:
        raise ConfigError(f"config does not match the schema: {exc.message}") from exc
    return cfg


def shipped_suites() -> list:
    d = _data_dir() / "suites"
    return sorted(p.name[: -len(".json")] for p in d.iterdir() if p.name.endswith(".json"))


def entries_from_config(cfg: dict, tolerance: float | None = None, tolerance_scale: float | None = None) -> list:
    defaults = cfg.get("defaults", {})
    out = []
    seen = set()
    for raw in cfg.get("entries", []):
        merged = {**defaults, **raw}
        if merged["id"] in seen:
            raise ConfigError(f"duplicate entry id {merged['id']!r}")
        seen.add(merged["id"])
        tol = merged.get("tolerance")
        if tolerance is not None:
            tol = tolerance
        if tolerance_scale is not None and tol is not None:
            tol = tol * tolerance_scale
        try:
            out.append(
                TestMatrixEntry(
                    id=merged["id"],
                    space=merged.get("space"),
                    operation=merged["operation"],
                    tolerance=tol,
                    samples=merged.get("samples", 4),
                    seed=merged.get("seed", 0),
                    field_family=merged.get("field_family"),
                    expected=merged.get("expected"),
                    params=merged.get("params", {}),
                )
            )
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc
    return out


def run_entry(entry: TestMatrixEntry) -> EntryResult:
    start = time.perf_counter()
    rng = entry.rng()
    try:
        space = None if entry.space is None else cat.build_space(entry.space)
        res = OPERATIONS[entry.operation](space, entry, rng)
        residual, fd = _finite(res.residual), _finite(res.fd_error)
        if fd > entry.tolerance:
            status, reason = "inconclusive", "finite-difference error estimate exceeds the tolerance"
        elif residual <= entry.tolerance:
            status, reason = "pass", ""
        else:
            status, reason = "fail", "residual exceeds the tolerance"
        detail = res.detail
    except Exception as exc:  # an internal failure marks the entry, it does not abort the suite
        residual, fd, detail = float("inf"), 0.0, {}
        status, reason = "fail", f"{type(exc).__name__}: {exc}"
    return EntryResult(
        id=entry.id,
        space=entry.space_id,
        operation=entry.operation,
        status=status,
        residual=residual,
        tolerance=float(entry.tolerance),
        fd_error=fd,
        wall_time=time.perf_counter() - start,
        detail=_jsonable(detail),
        reason=reason,
    )


def run_suite(config, tolerance: float | None = None, tolerance_scale: float | None = None, workers: int = 1) -> Report:
    """Run every entry of a suite (dict, path or shipped name) and collect a sorted report."""
    cfg = load_config(config)
    entries = entries_from_config(cfg, tolerance, tolerance_scale)
    if workers > 1 and len(entries) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_entry, entries))
    else:
        results = [run_entry(e) for e in entries]
    results.sort(key=lambda r: (r.space, r.operation, r.id))
    blob = json.dumps(cfg, sort_keys=True, separators=(",", ":")).encode()
    return Report(cfg.get("name", "unnamed"), results, cat.catalog_hash(), hashlib.sha256(blob).hexdigest())


# --- emitting ----------------------------------------------------------------------


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def format_float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return format(x, ".17g")


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON with sorted keys and every float written with 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(obj[k], indent, _level + 1)}" for k in sorted(obj)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        return "[\n" + ",\n".join(pad + dumps(v, indent, _level + 1) for v in obj) + "\n" + end + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return format_float(obj)
    return json.dumps(obj)


CSV_COLUMNS = ("id", "space", "operation", "status", "residual", "tolerance", "fd_error", "reason")


def report_to_csv(report) -> str:
    data = report.to_dict() if isinstance(report, Report) else report
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for e in data["entries"]:
        w.writerow([format(e[c], ".17g") if isinstance(e[c], float) else e[c] for c in CSV_COLUMNS])
    return buf.getvalue()


def render_report(report, fmt: str = "json", timing: bool = False) -> str:
    data = report.to_dict(timing) if isinstance(report, Report) else report
    if fmt == "json":
        return dumps(data) + "\n"
    if fmt == "csv":
        return report_to_csv(data)
    raise ValueError(f"unknown report format {fmt!r}")


def emit_report(report, fmt: str = "json", path=None, timing: bool = False) -> str:
    """Render a report (json or csv); write it to path if given and return the text.

    Wall times are left out unless ``timing`` is set, so repeated runs give
    byte-identical files.
    """
    text = render_report(report, fmt, timing)
    if path is not None:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    return text


def validate_report(data: dict) -> None:
    jsonschema.validate(data, report_schema())
