"""Square tilings of the field's continuity region and the localisation
machinery built on them: piecewise-constant field approximants, boundary
layers, subordinate smooth partitions of unity, and two-sided bracketing of
Dirichlet Pauli eigenvalue counts square by square.

Conventions.  A level-``k`` tiling uses axis-aligned open squares of side
2^-k whose corners sit on the lattice (2^-k Z)^2.  The union domain U_k is
the interior of the union of their closures, so edges shared by two squares
belong to U_k while the outer boundary does not.
"""
from __future__ import annotations

import json
import logging
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .discretize import assemble_pauli
from .eig import count_below
from .fields import (
    Domain,
    FieldError,
    QuadratureSpec,
    ScalarField2D,
    apriori_count_bound,
    constant_field,
    oscillation,
)
from .gauge import symmetric_gauge

__all__ = [
    "TilingError",
    "Tiling",
    "build_tiling",
    "k_schedule",
    "schedule_products",
    "boundary_layer",
    "partition_of_unity",
    "bracket_counts",
    "smooth_step",
    "smooth_step_slope",
    "STEP_SLOPE_BOUND",
]

log = logging.getLogger(__name__)


class TilingError(ValueError):
    pass


def smooth_step(x):
    """C^2 polynomial step: 0 for x<=0, x^3(10-15x+6x^2) on [0,1], 1 after."""
    x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
    return x ** 3 * (10.0 - 15.0 * x + 6.0 * x ** 2)


def smooth_step_slope(x):
    """Derivative of ``smooth_step``: 30 x^2 (1-x)^2 inside the rise."""
    x = np.asarray(x, dtype=float)
    inside = (x > 0.0) & (x < 1.0)
    xi = np.where(inside, x, 0.5)
    return np.where(inside, 30.0 * xi ** 2 * (1.0 - xi) ** 2, 0.0)


# sup |smooth_step'| on the unit rise, attained at x = 1/2
STEP_SLOPE_BOUND = 15.0 / 8.0


@dataclass(frozen=True)
class Tiling:
    """A finite collection of disjoint dyadic squares inside a region.

    Attributes
    ----------
    k : int
        Dyadic level; all squares have side 2**-k.
    squares : tuple
        Pairs (index j, origin (ox, oy)).
    U_k : Domain or None
        Interior of the union of square closures (None when empty).
    beta_k : float
        Oscillation bound of the field over U_k at separation 2**(-k-1/2).
    alpha_k : float
        Potential-approximation bound 2**(-k-3/2) * beta_k.
    field_values : tuple of float
        Field value at each square's centre.
    empty : bool
        True when no square fit (a warning was emitted).
    """

    k: int
    squares: tuple
    U_k: Domain | None
    beta_k: float
    alpha_k: float
    field_values: tuple
    empty: bool = False

    @property
    def side(self) -> float:
        return 2.0 ** (-self.k)

    def centers(self) -> np.ndarray:
        half = 0.5 * self.side
        return np.array([(ox + half, oy + half) for _, (ox, oy) in self.squares]
                        ).reshape(-1, 2)

    def as_dict(self) -> dict:
        return {
            "k": self.k,
            "origins": [list(o) for _, o in self.squares],
            "b_values": list(self.field_values),
            "beta_k": self.beta_k,
            "alpha_k": self.alpha_k,
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.as_dict(), **kw)

    def piecewise_field(self, name: str = "") -> ScalarField2D:
        """The piecewise-constant approximant: centre value on each square
        (half-open [0,s)^2 membership so shared edges count once), 0 outside."""
        if self.empty:
            return constant_field(0.0, name=name or "piecewise-empty")
        s = self.side
        keys = np.array([(int(round(ox / s)), int(round(oy / s)))
                         for _, (ox, oy) in self.squares], dtype=int)
        i0, j0 = keys[:, 0].min(), keys[:, 1].min()
        table = np.zeros((keys[:, 0].max() - i0 + 1, keys[:, 1].max() - j0 + 1))
        hit = np.zeros(table.shape, dtype=bool)
        for (ki, kj), b in zip(keys, self.field_values):
            table[ki - i0, kj - j0] = b
            hit[ki - i0, kj - j0] = True

        def _ev(pts):
            pts = np.asarray(pts, dtype=float)
            i = np.floor(pts[..., 0] / s).astype(int) - i0
            j = np.floor(pts[..., 1] / s).astype(int) - j0
            ok = (i >= 0) & (i < table.shape[0]) & (j >= 0) & (j < table.shape[1])
            ii, jj = np.where(ok, i, 0), np.where(ok, j, 0)
            return np.where(ok & hit[ii, jj], table[ii, jj], 0.0)

        return ScalarField2D(eval=_ev, name=name or "piecewise-constant")


def _closure_has_margin(dom: Domain, origins: np.ndarray, s: float,
                        delta: float) -> np.ndarray:
    """For each candidate square origin, does the closed square lie inside
    {x : closed delta-disc about x within the closed region}?

    Square and disc regions are handled exactly via corner tests (convexity).
    For unions the test is per member square (conservative across glued
    edges); grid masks take the cell-sampled membership of the corners.
    """
    corners = origins[:, None, :] + s * np.array(
        [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
    if dom.kind == "square":
        x0, y0 = dom.origin
        lo = np.array([x0 + delta, y0 + delta])
        hi = np.array([x0 + dom.side - delta, y0 + dom.side - delta])
        ok = (corners >= lo - 1e-12) & (corners <= hi + 1e-12)
        return ok.all(axis=(1, 2))
    if dom.kind == "disc":
        c = np.asarray(dom.center)
        r = np.linalg.norm(corners - c, axis=-1)
        return (r <= dom.radius - delta + 1e-12).all(axis=1)
    if dom.kind == "union_of_squares":
        ok = np.zeros(corners.shape[:2], dtype=bool)
        for ox, oy, side in dom.squares:
            lo = np.array([ox + delta, oy + delta])
            hi = np.array([ox + side - delta, oy + side - delta])
            ok |= ((corners >= lo - 1e-12) & (corners <= hi + 1e-12)).all(axis=-1)
        return ok.all(axis=1)
    if dom.kind == "grid_mask":
        if delta > 0.0:
            raise TilingError("inner margin not supported for grid_mask regions")
        inward = np.array([[1.0, 1.0], [-1.0, 1.0], [1.0, -1.0], [-1.0, -1.0]])
        probe = corners + 1e-9 * s * inward
        return dom.contains(probe).all(axis=1)
    raise TilingError(f"unsupported region kind {dom.kind!r}")


def build_tiling(B: ScalarField2D, region: Domain, k: int,
                 delta_inner: float = 0.0) -> Tiling:
    """All grid-aligned squares of side 2^-k whose closures keep an inner
    margin ``delta_inner`` from the region boundary, plus the derived
    oscillation data (beta_k at separation 2^(-k-1/2), alpha_k).

    An empty fit is not an error: it returns an empty tiling and warns.
    """
    if k < 1:
        raise TilingError("k must be >= 1")
    if delta_inner < 0.0:
        raise TilingError("delta_inner must be >= 0")
    s = 2.0 ** (-k)
    x0, y0, x1, y1 = region.bounding_box()
    i_lo, i_hi = math.floor(x0 / s) - 1, math.ceil(x1 / s) + 1
    j_lo, j_hi = math.floor(y0 / s) - 1, math.ceil(y1 / s) + 1
    ii, jj = np.meshgrid(np.arange(i_lo, i_hi), np.arange(j_lo, j_hi),
                         indexing="ij")
    origins = np.stack([ii.ravel() * s, jj.ravel() * s], axis=-1)
    keep = _closure_has_margin(region, origins, s, delta_inner)
    origins = origins[keep]

    if origins.shape[0] == 0:
        warnings.warn(f"no squares of side 2^-{k} fit inside the region "
                      f"with margin {delta_inner:g}")
        return Tiling(k=k, squares=(), U_k=None, beta_k=0.0, alpha_k=0.0,
                      field_values=(), empty=True)

    order = np.lexsort((origins[:, 1], origins[:, 0]))
    origins = origins[order]
    squares = tuple((j, (float(ox), float(oy)))
                    for j, (ox, oy) in enumerate(origins))
    U_k = Domain.union_of_squares([(ox, oy, s) for _, (ox, oy) in squares])
    beta_k = oscillation(B, U_k, s / math.sqrt(2.0))
    alpha_k = 2.0 ** (-k - 1.5) * beta_k
    centers = origins + 0.5 * s
    field_values = tuple(float(v) for v in np.atleast_1d(B(centers)))
    return Tiling(k=k, squares=squares, U_k=U_k, beta_k=float(beta_k),
                  alpha_k=float(alpha_k), field_values=field_values)


def _beta_fn(beta):
    if callable(beta):
        return beta
    return lambda k: beta[k]


def k_schedule(beta, t: float, k0: int) -> int:
    """The level schedule k(t) = min{k >= k0 : 4^k / beta(k) >= t}.

    ``beta`` maps levels to positive oscillation bounds and must be
    non-increasing (checked along the traversal).
    """
    if t <= 0.0:
        raise TilingError("t must be positive")
    bf = _beta_fn(beta)
    prev = None
    for k in range(k0, k0 + 201):
        b = float(bf(k))
        if b <= 0.0:
            raise TilingError(f"beta({k}) = {b:g} is not positive")
        if prev is not None and b > prev * (1.0 + 1e-12):
            raise TilingError(f"beta increases at k={k}: {prev:g} -> {b:g}")
        prev = b
        if 4.0 ** k / b >= t:
            return k
    raise TilingError("k_schedule did not terminate within 200 levels")


def schedule_products(beta, t: float, k0: int) -> dict:
    """k(t) together with the two products the schedule controls.

    Past the first threshold (t > 4^(k0+1)/beta(k0+1)) the schedule
    guarantees t*alpha_k^2 <= beta_k/8 and 4^k/t <= 4*beta_{k-1}; both
    sides of each inequality are reported for inspection.
    """
    bf = _beta_fn(beta)
    k = k_schedule(beta, t, k0)
    beta_k = float(bf(k))
    t_alpha_sq = t * 2.0 ** (-2 * k - 3) * beta_k ** 2
    inv_t_4k = 4.0 ** k / t
    out = {
        "k": k,
        "beta_k": beta_k,
        "t_alpha_sq": t_alpha_sq,
        "t_alpha_sq_bound": beta_k / 8.0,
        "inv_t_4k": inv_t_4k,
        "threshold_exceeded": t > 4.0 ** (k0 + 1) / float(bf(k0 + 1)),
    }
    out["inv_t_4k_bound"] = 4.0 * float(bf(k - 1)) if k > k0 else None
    return out


def boundary_layer(tiling: Tiling, delta: float,
                   region: Domain) -> tuple[Domain, float]:
    """Grid-mask approximation of the layer: the part of the region within
    2^-k*delta of some square boundary or outside the union altogether.

    Returns (layer domain, analytic measure bound |region \\ closure(U_k)|
    + 4*|region|*delta) and checks the sampled area against the bound.
    """
    if not 0.0 < delta < 1.0:
        raise TilingError("delta must lie in (0, 1)")
    s = tiling.side
    w = s * delta
    x0, y0, x1, y1 = region.bounding_box()
    span = max(x1 - x0, y1 - y0)
    n = int(min(max(math.ceil(4.0 * span / w), 128), 2048))
    cell = span / n
    nx = max(int(math.ceil((x1 - x0) / cell)), 1)
    ny = max(int(math.ceil((y1 - y0) / cell)), 1)
    xs = x0 + (np.arange(nx) + 0.5) * cell
    ys = y0 + (np.arange(ny) + 0.5) * cell
    X, Y = np.meshgrid(xs, ys, indexing="xy")
    pts = np.stack([X, Y], axis=-1)
    inside = region.contains(pts)
    deep = np.zeros(inside.shape, dtype=bool)
    for _, (ox, oy) in tiling.squares:
        deep |= ((X > ox + w) & (X < ox + s - w)
                 & (Y > oy + w) & (Y < oy + s - w))
    mask = inside & ~deep

    n_sq = len(tiling.squares)
    covered = n_sq * s * s
    bound = (region.area - covered) + 4.0 * region.area * delta
    measured = float(mask.sum()) * cell * cell
    # sampled cells straddling a boundary curve can overcount by about one
    # cell width times the total perimeter involved
    tol = 2.0 * cell * (4.0 * n_sq * s + 8.0 * max(span, 1.0))
    if measured > bound + tol:
        raise TilingError(
            f"boundary layer area {measured:g} exceeds analytic bound "
            f"{bound:g} by more than the grid tolerance {tol:g}")
    dom = Domain.grid_mask(mask, (x0, y0), cell)
    return dom, float(bound)


def partition_of_unity(tiling: Tiling, delta: float, grid: int):
    """Smooth partition subordinate to the squares plus a remainder.

    Per square a tensor product of 1-D steps rises over width 2^-k*delta
    just inside the boundary; chi_0 = sqrt(1 - sum chi_j^2).  Returns
    (chi_0, [chi_j...], measured_C3) where the chi are vectorized callables
    on (...,2) points and measured_C3 = sup(sum |grad chi|^2) * (2^-k
    delta)^2 over a grid x grid sample mesh.
    """
    if tiling.empty:
        raise TilingError("cannot build a partition over an empty tiling")
    if not 0.0 < delta < 1.0:
        raise TilingError("delta must lie in (0, 1)")
    s = tiling.side
    w = s * delta
    x0, y0, x1, y1 = tiling.U_k.bounding_box()
    cell = max(x1 - x0, y1 - y0) / grid
    if w / cell < 8.0 - 1e-12:
        raise TilingError(
            f"grid too coarse: layer width {w:g} spans {w / cell:.2f} cells, "
            "need >= 8")

    def _chi_factory(ox, oy):
        def chi(pts):
            pts = np.asarray(pts, dtype=float)
            u, v = pts[..., 0], pts[..., 1]
            return (smooth_step((u - ox) / w) * smooth_step((ox + s - u) / w)
                    * smooth_step((v - oy) / w) * smooth_step((oy + s - v) / w))
        return chi

    def _chi_grad_sq(ox, oy, u, v):
        fx = smooth_step((u - ox) / w) * smooth_step((ox + s - u) / w)
        fy = smooth_step((v - oy) / w) * smooth_step((oy + s - v) / w)
        dfx = (smooth_step_slope((u - ox) / w) * smooth_step((ox + s - u) / w)
               - smooth_step((u - ox) / w) * smooth_step_slope((ox + s - u) / w)
               ) / w
        dfy = (smooth_step_slope((v - oy) / w) * smooth_step((oy + s - v) / w)
               - smooth_step((v - oy) / w) * smooth_step_slope((oy + s - v) / w)
               ) / w
        val = fx * fy
        grad_sq = (dfx * fy) ** 2 + (fx * dfy) ** 2
        return val, grad_sq

    chis = [_chi_factory(ox, oy) for _, (ox, oy) in tiling.squares]

    def chi0(pts):
        pts = np.asarray(pts, dtype=float)
        total = np.zeros(pts.shape[:-1])
        for chi in chis:
            total += chi(pts) ** 2
        return np.sqrt(np.clip(1.0 - total, 0.0, None))

    # sample sup of sum |grad chi_j|^2 + |grad chi_0|^2: the squares are
    # disjoint so at most one chi_j is active at any point, and there
    # |grad chi_0|^2 = chi^2 |grad chi|^2 / (1 - chi^2)
    xs = np.linspace(x0, x1, grid + 1)
    ys = np.linspace(y0, y1, grid + 1)
    sup_total = 0.0
    for _, (ox, oy) in tiling.squares:
        iw = (xs >= ox - 1e-12) & (xs <= ox + s + 1e-12)
        jw = (ys >= oy - 1e-12) & (ys <= oy + s + 1e-12)
        U, V = np.meshgrid(xs[iw], ys[jw], indexing="ij")
        val, g2 = _chi_grad_sq(ox, oy, U, V)
        denom = np.clip(1.0 - val ** 2, 1e-300, None)
        total = g2 * (1.0 + val ** 2 / denom)
        sup_total = max(sup_total, float(total.max(initial=0.0)))
    measured_C3 = sup_total * w * w
    return chi0, chis, float(measured_C3)


def _window_count(op, lam: float):
    """(count at lam, saturated flag) where saturated means lam cleared the
    whole spectrum so the count is just the matrix dimension."""
    lo, hi = op.gershgorin_interval()
    if lam >= hi:
        return op.dimension, True
    return count_below(op, lam).count, False


def bracket_counts(B: ScalarField2D, A, region: Domain, k: int, delta: float,
                   epsilon: float, t: float, lam: float,
                   solver: dict | None = None) -> dict:
    """Two-sided bracketing of the Pauli count N_region(lam) by per-square
    constant-field counts at shifted levels, with a boundary-layer ceiling.

    Lower route: N >= sum_j N_square((1-eps)(lam - t^2 alpha_k^2 / eps)).
    Upper route: N <= layer term + sum_j N_square((1+eps)(lam + shift))
    where shift = t^2 alpha_k^2/eps + C3 4^k/delta^2 and the layer term is
    the integral a-priori ceiling over the boundary layer.  Both
    inequalities are asserted up to the count blur of two local eigenvalue
    spacings of the discretized operator; slacks and all intermediate
    levels appear in the returned report.
    """
    if not 0.0 < epsilon < 1.0:
        raise TilingError("epsilon must lie in (0, 1)")
    opts = dict(solver or {})
    n_full = int(opts.pop("n_full", 64))
    n_square = int(opts.pop("n_square", 32))
    C3 = opts.pop("C3", None)
    C1 = float(opts.pop("C1", 1.0))
    if opts:
        raise TilingError(f"unknown solver options: {sorted(opts)}")

    tiling = build_tiling(B, region, k, delta_inner=0.0)
    if tiling.empty:
        raise TilingError("bracketing needs at least one tiling square")
    if C3 is None:
        grid = max(int(math.ceil(16.0 * 2 ** k / delta)), 64)
        _, _, C3 = partition_of_unity(tiling, delta, grid)
    C3 = float(C3)

    P = assemble_pauli(region, A, B, t, n_full)
    n_at = count_below(P, lam).count

    shift_alpha = (t * tiling.alpha_k) ** 2 / epsilon
    c3_term = C3 * 4.0 ** k / delta ** 2
    lam_lower = (1.0 - epsilon) * (lam - shift_alpha)
    lam_upper = (1.0 + epsilon) * (lam + shift_alpha + c3_term)

    s = tiling.side
    lower_counts, upper_counts = [], []
    saturated = False
    for (_, (ox, oy)), b in zip(tiling.squares, tiling.field_values):
        sq = Domain.square((ox, oy), s)
        Aj = symmetric_gauge(b, center=(ox + 0.5 * s, oy + 0.5 * s))
        Pj = assemble_pauli(sq, Aj, constant_field(b), t, n_square)
        c_lo, _ = _window_count(Pj, lam_lower)
        c_hi, sat = _window_count(Pj, lam_upper)
        saturated = saturated or sat
        lower_counts.append(c_lo)
        upper_counts.append(c_hi)

    layer_dom, layer_measure = boundary_layer(tiling, delta, region)
    layer_level = lam + shift_alpha + c3_term
    if t > 0.0:
        layer_states = t * apriori_count_bound(B, layer_level / t, layer_dom,
                                               C1=C1,
                                               quad=QuadratureSpec(n=128))
    else:
        # no t-scaling to lean on at t=0: count the layer states directly
        Pl = assemble_pauli(layer_dom, A, B, 0.0, n_full)
        layer_states = float(count_below(Pl, layer_level).count)

    # count blur: how many full-operator eigenvalues sit within two local
    # mean spacings of lam
    d = 0.05 * max(abs(lam), 1.0)
    n_lo = count_below(P, lam - d).count
    n_hi = count_below(P, lam + d).count
    density = (n_hi - n_lo) / (2.0 * d)
    spacing = (1.0 / density) if density > 0 else d
    blur = count_below(P, lam + 2.0 * spacing).count \
        - count_below(P, lam - 2.0 * spacing).count

    lower_total = int(sum(lower_counts))
    upper_total = float(layer_states + sum(upper_counts))
    report = {
        "lambda": float(lam),
        "t": float(t),
        "epsilon": float(epsilon),
        "delta": float(delta),
        "k": k,
        "beta_k": tiling.beta_k,
        "alpha_k": tiling.alpha_k,
        "C3": C3,
        "n_squares": len(tiling.squares),
        "count_full": int(n_at),
        "lower": {
            "shifted_level": float(lam_lower),
            "square_counts": [int(c) for c in lower_counts],
            "total": lower_total,
            "slack": int(n_at) - lower_total,
        },
        "upper": {
            "shifted_level": float(lam_upper),
            "layer_level": float(layer_level),
            "layer_measure_bound": float(layer_measure),
            "layer_states_bound": float(layer_states),
            "square_counts": [int(c) for c in upper_counts],
            "total": upper_total,
            "slack": float(upper_total) - int(n_at),
        },
        "tolerance": {"spacing": float(spacing), "states": int(blur)},
        "saturated": bool(saturated),
    }
    if lower_total > n_at + blur:
        raise TilingError(
            f"lower bracket violated beyond tolerance: {lower_total} > "
            f"{n_at} + {blur}")
    if n_at > upper_total + blur:
        raise TilingError(
            f"upper bracket violated beyond tolerance: {n_at} > "
            f"{upper_total:g} + {blur}")
    return report
