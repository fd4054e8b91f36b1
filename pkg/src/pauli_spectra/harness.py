"""Desk-scale experiment drivers.

Orchestrates the other modules into reproducible scans: eigenvalue-counting
sweeps against the semiclassical envelopes (``weyl_scan``), certified
approximate-zero-mode sweeps (``azm_scan``), a greedy disc packing for
sign-changing fields, a randomized gauge-invariance regression, and CSV/JSON
table export.  Everything here is deterministic given its configuration.
"""

from __future__ import annotations

import csv
import dataclasses
import datetime
import hashlib
import json
import logging
import math
import time

import numpy as np
from scipy.ndimage import distance_transform_edt

from . import __version__
from .discretize import assemble_pauli, assemble_schrodinger, magnetic_length_spacing
from .eig import count_below, lowest_eigenpairs
from .fields import Domain, ScalarField2D, constant_field, flux
from .gauge import gauge_transform, line_integral_gauge, solve_scalar_potential, symmetric_gauge
from .landau import semiclassical_integral
from .zeromode import azm_count, circle_data, disc_rescale

logger = logging.getLogger(__name__)


class HarnessError(ValueError):
    """Bad scan configuration or a violated scan precondition."""


# --------------------------------------------------------------------------
# declarative field / domain specs (the JSON-config building blocks)


def field_from_spec(spec: dict) -> ScalarField2D:
    """Build a field from a JSON-style spec.

    kinds: {"kind": "constant", "b": 6.0}
           {"kind": "linear", "b0": 2.0, "bx": 2.0, "by": 0.0}
           {"kind": "radial_cos", "scale": 1.0}   (B = scale * r cos(theta))
    """
    if not isinstance(spec, dict) or "kind" not in spec:
        raise HarnessError("field spec must be a dict with a 'kind' key")
    kind = spec["kind"]
    if kind == "constant":
        return constant_field(float(spec["b"]))
    if kind == "linear":
        b0 = float(spec.get("b0", 0.0))
        bx = float(spec.get("bx", 0.0))
        by = float(spec.get("by", 0.0))
        return ScalarField2D(
            eval=lambda p: b0 + bx * p[..., 0] + by * p[..., 1],
            holder_alpha=1.0, holder_const=math.hypot(bx, by),
            name=f"{b0:g}+{bx:g}x1+{by:g}x2")
    if kind == "radial_cos":
        s = float(spec.get("scale", 1.0))
        return ScalarField2D(eval=lambda p: s * p[..., 0],
                             holder_alpha=1.0, holder_const=abs(s),
                             name=f"{s:g}*r*cos")
    raise HarnessError(f"unknown field kind {kind!r}")


def domain_from_spec(spec: dict) -> Domain:
    if not isinstance(spec, dict) or "kind" not in spec:
        raise HarnessError("domain spec must be a dict with a 'kind' key")
    kind = spec["kind"]
    if kind == "square":
        return Domain.square(tuple(spec.get("origin", (0.0, 0.0))),
                             float(spec.get("side", 1.0)))
    if kind == "disc":
        return Domain.disc(tuple(spec.get("center", (0.0, 0.0))),
                           float(spec.get("radius", 1.0)))
    raise HarnessError(f"unknown domain kind {kind!r}")


def _perimeter(dom: Domain) -> float:
    if dom.kind == "square":
        return 4.0 * dom.side
    if dom.kind == "disc":
        return 2.0 * math.pi * dom.radius
    return 4.0 * math.sqrt(dom.area)


_RULES = {"linear": ("Lambda",), "subexp": ("c", "C", "gamma"),
          "fixed": ("eps",)}


@dataclasses.dataclass(frozen=True)
class ScanConfig:
    """Everything a scan needs; every physical parameter lives here."""

    field: ScalarField2D
    domain: Domain
    t_grid: tuple[float, ...]
    lambda_rule: dict
    n: int = 256
    tol: float | None = None        # trend tolerance; None = perimeter policy
    seed: int = 0
    draws: int = 20
    zeromode: dict | None = None    # forwarded to azm_count's config
    spec: dict | None = dataclasses.field(default=None, compare=False)

    def __post_init__(self):
        ts = tuple(float(t) for t in self.t_grid)
        if not ts or any(t <= 0 for t in ts) or any(
                b <= a for a, b in zip(ts, ts[1:])):
            raise HarnessError("t_grid must be strictly increasing and positive")
        object.__setattr__(self, "t_grid", ts)
        rule = self.lambda_rule.get("rule")
        if rule not in _RULES:
            raise HarnessError(f"unknown lambda rule {rule!r}")
        missing = [k for k in _RULES[rule] if k not in self.lambda_rule]
        if missing:
            raise HarnessError(f"lambda rule {rule!r} missing {missing}")
        if rule == "subexp":
            g = self.lambda_rule["gamma"]
            if not 0.0 < g < 1.0:
                raise HarnessError("gamma must lie in (0, 1)")
            if self.lambda_rule["c"] <= 0 or self.lambda_rule["C"] <= 0:
                raise HarnessError("c and C must be positive")
        if rule == "fixed" and self.lambda_rule["eps"] <= 0:
            raise HarnessError("eps must be positive")
        if self.n < 8:
            raise HarnessError("n must be >= 8")
        if self.tol is not None and self.tol < 0:
            raise HarnessError("tol must be nonnegative")

    @classmethod
    def from_dict(cls, d: dict) -> "ScanConfig":
        known = {"field", "domain", "t_grid", "lambda_rule", "n", "tol",
                 "seed", "draws", "zeromode"}
        extra = set(d) - known
        if extra:
            raise HarnessError(f"unknown config keys: {sorted(extra)}")
        if "field" not in d or "domain" not in d:
            raise HarnessError("config needs 'field' and 'domain' specs")
        kw = {k: d[k] for k in ("n", "seed", "draws") if k in d}
        return cls(field=field_from_spec(d["field"]),
                   domain=domain_from_spec(d["domain"]),
                   t_grid=tuple(d.get("t_grid", (10.0,))),
                   lambda_rule=dict(d.get("lambda_rule",
                                          {"rule": "fixed", "eps": 1.0})),
                   tol=d.get("tol"), zeromode=d.get("zeromode"),
                   spec=d, **kw)

    def lam(self, t: float) -> float:
        r = self.lambda_rule
        if r["rule"] == "linear":
            return r["Lambda"] * t
        if r["rule"] == "subexp":
            return r["C"] * math.exp(-r["c"] * t ** r["gamma"])
        return r["eps"]

    def config_hash(self) -> str:
        src = self.spec if self.spec is not None else {
            "field": self.field.name, "domain": self.domain.kind,
            "t_grid": list(self.t_grid), "lambda_rule": self.lambda_rule,
            "n": self.n, "tol": self.tol, "seed": self.seed,
            "draws": self.draws, "zeromode": self.zeromode}
        blob = json.dumps(src, sort_keys=True, default=str).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


# --------------------------------------------------------------------------
# tables


@dataclasses.dataclass
class ScanTable:
    columns: tuple[str, ...]
    rows: list[dict]
    meta: dict = dataclasses.field(default_factory=dict, compare=False)

    def column(self, name: str) -> list:
        if name not in self.columns:
            raise HarnessError(f"no column {name!r}")
        return [row[name] for row in self.rows]


def _new_meta(cfg: ScanConfig, scan: str) -> dict:
    return {"scan": scan, "config_hash": cfg.config_hash(),
            "version": __version__,
            "created": datetime.datetime.now(datetime.timezone.utc)
            .isoformat(timespec="seconds"),
            "notes": []}


# --------------------------------------------------------------------------
# gauges


def _is_constant(B: ScalarField2D, dom: Domain) -> float | None:
    """The constant value if B is constant on the domain, else None."""
    x0, y0, x1, y1 = dom.bounding_box()
    g = np.linspace(0.0, 1.0, 17)
    pts = np.stack(np.meshgrid(x0 + g * (x1 - x0), y0 + g * (y1 - y0),
                               indexing="ij"), axis=-1).reshape(-1, 2)
    vals = np.asarray(B(pts), dtype=float)
    if vals.max() - vals.min() <= 1e-12 * max(1.0, np.abs(vals).max()):
        return float(vals.mean())
    return None


def _gauge_for(B: ScalarField2D, dom: Domain):
    b = _is_constant(B, dom)
    x0, y0, x1, y1 = dom.bounding_box()
    center = (0.5 * (x0 + x1), 0.5 * (y0 + y1))
    if b is not None:
        return symmetric_gauge(b, center=center)
    return line_integral_gauge(B, center=center)


def _b_sup(B: ScalarField2D, dom: Domain, n: int = 64) -> float:
    if B.sup_bound is not None:
        return float(B.sup_bound)
    x0, y0, x1, y1 = dom.bounding_box()
    g = np.linspace(0.0, 1.0, n)
    pts = np.stack(np.meshgrid(x0 + g * (x1 - x0), y0 + g * (y1 - y0),
                               indexing="ij"), axis=-1).reshape(-1, 2)
    pts = pts[dom.contains(pts)]
    return float(np.abs(B(pts)).max()) if len(pts) else 0.0


def _require_adequate(cfg: ScanConfig, t: float, b_sup: float) -> None:
    # enforced, not advisory: an under-resolved magnetic grid silently
    # flattens the Landau structure the scan is trying to see
    x0, y0, x1, y1 = cfg.domain.bounding_box()
    extent = max(x1 - x0, y1 - y0)
    h = extent / cfg.n
    h_star = magnetic_length_spacing(t, b_sup)
    if h > h_star:
        n_req = int(math.ceil(extent / h_star))
        raise HarnessError(
            f"grid under-resolves the magnetic length at t = {t:g}: "
            f"spacing {h:.4g} > {h_star:.4g}; need n >= {n_req}, have {cfg.n}")


# --------------------------------------------------------------------------
# scans


WEYL_COLUMNS = ("t", "lambda", "N", "N_over_t", "int_nu_minus",
                "int_nu_plus", "tol", "in_band")


def weyl_scan(cfg: ScanConfig) -> ScanTable:
    """Eigenvalue-count sweep N(lambda(t)) against the semiclassical band.

    Requires the linear rule lambda(t) = Lambda t.  Each row reports the
    Dirichlet Pauli count N at lambda(t) on the configured grid together
    with the pointwise Landau-density integrals; the trend check asks that
    N/t lies in [int nu^- - tol, int nu^+ + tol] at the largest t.  The
    per-t tolerance defaults to |boundary| sqrt(t b_inf) / (2 pi t), the
    boundary-layer share of the count at magnetic length resolution.
    """
    if cfg.lambda_rule.get("rule") != "linear":
        raise HarnessError("weyl_scan needs lambda_rule 'linear'")
    B, dom = cfg.field, cfg.domain
    b_sup = _b_sup(B, dom)
    _require_adequate(cfg, max(cfg.t_grid), b_sup)
    A = _gauge_for(B, dom)
    meta = _new_meta(cfg, "weyl")
    Lambda = float(cfg.lambda_rule["Lambda"])
    b_const = _is_constant(B, dom)
    # at lambda(t) = 0 the theorem degrades to the |flux| upper bound;
    # report it so the Lambda = 0 rule remains checkable
    absB = ScalarField2D(eval=lambda p: np.abs(B(p)), name=f"|{B.name}|")
    meta["flux_abs_bound"] = flux(absB, dom)
    nu_minus = semiclassical_integral(B, dom, Lambda, "lower")
    nu_plus = semiclassical_integral(B, dom, Lambda, "upper")
    perim = _perimeter(dom)

    rows = []
    for t in cfg.t_grid:
        lam = cfg.lam(t)
        if b_const is not None and b_const != 0.0 and lam >= 0.0:
            # distance to the nearest Landau threshold 2|b|m of the spin pair
            step = 2.0 * abs(b_const)
            d = abs(lam - step * round(lam / step))
            if d <= 1e-12 * max(1.0, lam):
                lam += 1e-9 * abs(b_const)
                note = (f"lambda({t:g}) sits on a Landau threshold; "
                        f"nudged by {1e-9 * abs(b_const):.3g}")
                logger.info(note)
                meta["notes"].append(note)
        op = assemble_pauli(dom, A, B, t, cfg.n)
        N = count_below(op, lam).count
        tol = cfg.tol if cfg.tol is not None else \
            perim * math.sqrt(t * b_sup) / (2.0 * math.pi * t)
        ratio = N / t
        rows.append({"t": t, "lambda": lam, "N": N, "N_over_t": ratio,
                     "int_nu_minus": nu_minus, "int_nu_plus": nu_plus,
                     "tol": tol,
                     "in_band": bool(nu_minus - tol <= ratio
                                     <= nu_plus + tol)})
    meta["trend_ok"] = bool(rows and rows[-1]["in_band"])
    return ScanTable(columns=WEYL_COLUMNS, rows=rows, meta=meta)


AZM_COLUMNS = ("t", "dim_certified", "t_flux", "ratio")


def azm_scan(cfg: ScanConfig) -> ScanTable:
    """Certified approximate-zero-mode dimensions along a t grid.

    Requires the subexponential rule and a sign-definite field on a disc
    domain.  The field is rescaled to the unit disc and normalized to unit
    flux; each row reports the certified dimension against the expected
    t * flux, with ratio = dim / (t * flux).  A sign-changing field is an
    error (split the region with greedy_disc_packing first); the zero
    field produces a trivial all-zero table.
    """
    if cfg.lambda_rule.get("rule") != "subexp":
        raise HarnessError("azm_scan needs lambda_rule 'subexp'")
    B, dom = cfg.field, cfg.domain
    if dom.kind != "disc":
        raise HarnessError("azm_scan runs on a disc domain")
    meta = _new_meta(cfg, "azm")
    rule = cfg.lambda_rule

    # sign pattern by sampling
    rng = np.random.default_rng(cfg.seed)
    pts = rng.uniform(-1.0, 1.0, size=(4096, 2))
    pts = pts[np.hypot(pts[:, 0], pts[:, 1]) < 1.0]
    R = float(dom.radius)
    cx, cy = dom.center
    vals = np.asarray(B(pts * R + np.array([cx, cy])), dtype=float)
    scale = np.abs(vals).max()
    if scale == 0.0:
        meta["notes"].append("zero field: trivial report")
        meta["trend_ok"] = True
        rows = [{"t": t, "dim_certified": 0, "t_flux": 0.0, "ratio": 0.0}
                for t in cfg.t_grid]
        return ScanTable(columns=AZM_COLUMNS, rows=rows, meta=meta)
    if vals.min() < -1e-12 * scale and vals.max() > 1e-12 * scale:
        raise HarnessError(
            "field changes sign on the disc: partition the region with "
            "greedy_disc_packing and scan each disc separately")
    sign = 1.0 if vals.max() > 0 else -1.0
    if sign < 0:
        # swapping the spin components turns -B into B with the same
        # spectrum, so scan the flipped field and say so
        meta["notes"].append("negative field: scanned -B (spin swap)")
    if R != 1.0 or (cx, cy) != (0.0, 0.0):
        _, note = disc_rescale(R, 1.0)
        meta["notes"].append(f"rescaled radius-{R:g} disc to the unit disc "
                             f"({note})")

    unit = ScalarField2D(
        eval=lambda p: sign * R * R * B(p * R + np.array([cx, cy])),
        name=f"unit-disc[{B.name}]")
    phi_total = flux(unit, Domain.disc((0.0, 0.0), 1.0))
    if phi_total <= 0.0:
        raise HarnessError("field is not flux-normalizable (flux <= 0)")
    normalized = ScalarField2D(eval=lambda p: unit(p) / phi_total,
                               name=f"normalized[{B.name}]")
    sol = solve_scalar_potential(normalized, positivity_required=True)
    zcfg = dict(cfg.zeromode or {})
    data = zcfg.pop("data", None) or circle_data(
        sol, N=zcfg.pop("N", 4096), N_basis=zcfg.pop("N_basis", 256))

    rows = []
    lam_list = []
    for t in cfg.t_grid:
        t_eff = t * phi_total
        rep = azm_count(sol, t_eff, rule["gamma"], rule["c"], rule["C"],
                        config={"data": data, **zcfg})
        lam_list.append(rep["lambda_t"])
        rows.append({"t": t, "dim_certified": rep["certified"],
                     "t_flux": t_eff, "ratio": rep["ratio"]})
    meta["lambda"] = lam_list
    meta["flux"] = phi_total
    ratios = [r["ratio"] for r in rows]
    meta["trend_ok"] = bool(all(b >= a - 1e-9
                                for a, b in zip(ratios, ratios[1:])))
    return ScanTable(columns=AZM_COLUMNS, rows=rows, meta=meta)


# --------------------------------------------------------------------------
# greedy disc packing


class DiscPack(list):
    """List of sign-pure disjoint discs with the covered-flux bookkeeping."""

    covered_fraction: float = 0.0
    total_flux: float = 0.0


def greedy_disc_packing(B: ScalarField2D, region: Domain, min_radius: float,
                        grid: int = 512, seed: int = 0) -> DiscPack:
    """Pack disjoint sign-pure discs into {B > 0} and {B < 0}.

    Greedy on a pixel grid: repeatedly take the largest disc the current
    mask admits (Euclidean distance transform), remove it, stop when no
    disc of radius >= min_radius fits.  Each disc is checked sign-pure by
    sampling.  Returns the discs as dicts {center, radius, sign, flux}
    with the covered |flux| fraction on the result.
    """
    if min_radius <= 0:
        raise HarnessError("min_radius must be positive")
    if grid < 32:
        raise HarnessError("grid must be >= 32")
    rng = np.random.default_rng(seed)
    x0, y0, x1, y1 = region.bounding_box()
    cell = max(x1 - x0, y1 - y0) / grid
    gx = np.arange(x0 + 0.5 * cell, x1, cell)
    gy = np.arange(y0 + 0.5 * cell, y1, cell)
    X, Y = np.meshgrid(gx, gy, indexing="ij")
    pts = np.stack([X, Y], axis=-1)
    inside = region.contains(pts.reshape(-1, 2)).reshape(X.shape)
    vals = np.zeros_like(X)
    vals[inside] = np.asarray(B(pts[inside]), dtype=float)
    scale = np.abs(vals).max()
    pack = DiscPack()
    total = float(np.abs(vals)[inside].sum()) * cell * cell / (2.0 * math.pi)
    pack.total_flux = total
    if scale == 0.0:
        return pack

    for sign in (1.0, -1.0):
        mask = inside & (sign * vals > 1e-12 * scale)
        while mask.any():
            edt = distance_transform_edt(np.pad(mask, 1))[1:-1, 1:-1] * cell
            r_pix = float(edt.max())
            radius = r_pix - cell          # one-cell safety margin
            if radius < min_radius:
                break
            i, j = np.unravel_index(int(edt.argmax()), edt.shape)
            center = (float(X[i, j]), float(Y[i, j]))
            # sign purity by sampling; shrink if a stray pixel disagrees
            for _ in range(8):
                u = rng.uniform(0.0, 1.0, 256)
                ang = rng.uniform(0.0, 2.0 * math.pi, 256)
                sample = np.stack([center[0] + radius * np.sqrt(u) * np.cos(ang),
                                   center[1] + radius * np.sqrt(u) * np.sin(ang)],
                                  axis=-1)
                if np.all(sign * np.asarray(B(sample), dtype=float) >= 0.0):
                    break
                radius *= 0.9
            if radius < min_radius:
                break
            d2 = (X - center[0]) ** 2 + (Y - center[1]) ** 2
            in_disc = d2 <= radius * radius
            phi = float(np.abs(vals)[in_disc & inside].sum()) * cell * cell \
                / (2.0 * math.pi)
            pack.append({"center": center, "radius": float(radius),
                         "sign": int(sign), "flux": phi})
            mask &= d2 > (radius + cell) ** 2
            if len(pack) > 4096:
                break

    pack.covered_fraction = (sum(d["flux"] for d in pack) / total
                             if total > 0 else 0.0)
    return pack


# --------------------------------------------------------------------------
# gauge-invariance regression


def _random_trig_psi(rng: np.random.Generator, amplitude: float = 0.2):
    """A random trigonometric polynomial and its exact gradient."""
    modes = [(m1, m2) for m1 in range(3) for m2 in range(3)
             if (m1, m2) != (0, 0)]
    amps = amplitude * rng.standard_normal(len(modes))
    phases = rng.uniform(0.0, 2.0 * math.pi, len(modes))
    k = 2.0 * math.pi * np.array(modes, dtype=float)

    def psi(p):
        p = np.asarray(p, dtype=float)
        arg = p[..., None, 0] * k[:, 0] + p[..., None, 1] * k[:, 1] + phases
        return (amps * np.cos(arg)).sum(axis=-1)

    def grad(p):
        p = np.asarray(p, dtype=float)
        arg = p[..., None, 0] * k[:, 0] + p[..., None, 1] * k[:, 1] + phases
        s = -amps * np.sin(arg)
        return np.stack([(s * k[:, 0]).sum(axis=-1),
                         (s * k[:, 1]).sum(axis=-1)], axis=-1)

    return psi, grad


def gauge_invariance_test(cfg: ScanConfig) -> dict:
    """Spectra of H_{tA} and H_{tA + grad psi} must coincide.

    For ``cfg.draws`` random trigonometric psi (t cycling through the
    grid), compares the lowest 10 eigenvalues (relative deviation) and
    three mid-gap inertia counts (integer equality).  Passes iff every
    deviation is <= 1e-9 and every count matches.
    """
    B, dom = cfg.field, cfg.domain
    A = _gauge_for(B, dom)
    rng = np.random.default_rng(cfg.seed)
    k_eigs = 10
    worst = 0.0
    mismatches = 0
    per_draw = []
    for j in range(cfg.draws):
        t = cfg.t_grid[j % len(cfg.t_grid)]
        psi, grad = _random_trig_psi(rng)
        A2 = gauge_transform(A, grad, psi=psi)
        H1 = assemble_schrodinger(dom, A, t, cfg.n)
        H2 = assemble_schrodinger(dom, A2, t, cfg.n)
        e1 = np.array([v for v, _ in lowest_eigenpairs(H1, k_eigs, tol=1e-10)])
        e2 = np.array([v for v, _ in lowest_eigenpairs(H2, k_eigs, tol=1e-10)])
        dev = float(np.max(np.abs(e1 - e2) / np.maximum(np.abs(e1), 1e-30)))
        worst = max(worst, dev)
        bad_counts = 0
        for idx in (2, 5, 8):
            lam = 0.5 * (e1[idx] + e1[idx + 1])
            c1 = count_below(H1, lam).count
            c2 = count_below(H2, lam).count
            bad_counts += c1 != c2
        mismatches += bad_counts
        per_draw.append({"t": t, "max_rel_dev": dev,
                         "count_mismatches": bad_counts})
    report = {"draws": cfg.draws, "max_rel_dev": worst,
              "count_mismatches": mismatches,
              "pass": bool(worst <= 1e-9 and mismatches == 0),
              "per_draw": per_draw}
    return report


# --------------------------------------------------------------------------
# export


def export(report, path, format: str = "csv") -> None:
    """Write a ScanTable (or any dict report) to ``path``.

    CSV: the table's columns, in order, one row per scan row (header-only
    when the table is empty).  JSON: {"meta": ..., "columns": ...,
    "rows": ...}; metadata carries the config hash, toolkit version and
    creation timestamp.  Dict reports only support JSON.
    """
    if format not in ("csv", "json"):
        raise HarnessError(f"unknown export format {format!r}")
    try:
        if isinstance(report, ScanTable):
            if format == "csv":
                with open(path, "w", newline="") as fh:
                    w = csv.DictWriter(fh, fieldnames=list(report.columns))
                    w.writeheader()
                    for row in report.rows:
                        w.writerow(row)
            else:
                doc = {"meta": report.meta, "columns": list(report.columns),
                       "rows": report.rows}
                with open(path, "w") as fh:
                    json.dump(doc, fh, indent=1, default=_json_default)
        else:
            if format == "csv":
                raise HarnessError("CSV export needs a tabular report")
            with open(path, "w") as fh:
                json.dump(report, fh, indent=1, default=_json_default)
    except OSError as exc:
        raise HarnessError(f"cannot write {path}: {exc}") from exc


def _json_default(obj):
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj)!r}")


def read_table(path, format: str | None = None) -> ScanTable:
    """Load a table written by :func:`export` (format inferred from suffix)."""
    path = str(path)
    if format is None:
        format = "json" if path.endswith(".json") else "csv"
    if format == "json":
        with open(path) as fh:
            doc = json.load(fh)
        return ScanTable(columns=tuple(doc["columns"]), rows=doc["rows"],
                         meta=doc.get("meta", {}))
    with open(path, newline="") as fh:
        rdr = csv.DictReader(fh)
        cols = tuple(rdr.fieldnames or ())
        rows = [dict(row) for row in rdr]
    return ScanTable(columns=cols, rows=rows, meta={})
