"""Magnetic fields, planar domains, and integral diagnostics.

A magnetic field is any real-valued function of two variables, wrapped in
:class:`ScalarField2D` together with optional Hölder metadata.  Domains are
squares, discs, finite unions of squares, or rasterized masks.  On top of
these the module provides the flux functional, the Luxemburg (Orlicz) norm
for the N-function ``(t+1)log(t+1) - t``, an a-priori eigenvalue-count
ceiling built from that norm, and an oscillation estimator.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "ScalarField2D",
    "Domain",
    "QuadratureSpec",
    "FieldError",
    "flux",
    "luxemburg_norm",
    "apriori_count_bound",
    "oscillation",
    "constant_field",
]

log = logging.getLogger(__name__)


class FieldError(ValueError):
    """Raised for degenerate domains, non-finite samples, bracket failures."""


@dataclass(frozen=True)
class ScalarField2D:
    """A planar scalar field ``B(x1, x2)``.

    Parameters
    ----------
    eval : callable
        Vectorized evaluation: takes an ``(..., 2)`` array of points and
        returns field values of shape ``(...,)``.
    holder_alpha : float, optional
        Hölder exponent in ``(0, 1]``.
    holder_const : float, optional
        Seminorm bound: ``|B(x)-B(y)| <= holder_const * |x-y|**holder_alpha``.
    sup_bound : float, optional
        A known bound for ``sup |B|`` on the domain of interest.
    name : str
        Label used in reports.
    """

    eval: Callable[[np.ndarray], np.ndarray]
    holder_alpha: float | None = None
    holder_const: float | None = None
    sup_bound: float | None = None
    name: str = ""

    def __call__(self, pts: np.ndarray) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        vals = np.asarray(self.eval(pts), dtype=float)
        return vals

    def at(self, x1: float, x2: float) -> float:
        return float(self(np.array([x1, x2])))


def constant_field(b: float, name: str | None = None) -> ScalarField2D:
    """Field identically equal to ``b``."""
    bb = float(b)

    def _ev(pts: np.ndarray) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        return np.full(pts.shape[:-1], bb)

    return ScalarField2D(
        eval=_ev,
        holder_alpha=1.0,
        holder_const=0.0,
        sup_bound=abs(bb),
        name=name if name is not None else f"const({bb:g})",
    )


@dataclass(frozen=True)
class Domain:
    """A bounded planar region.

    ``kind`` is one of ``square``, ``disc``, ``union_of_squares``,
    ``grid_mask``.  Use the classmethod constructors; the raw constructor is
    not validated.
    """

    kind: str
    origin: tuple[float, float] | None = None
    side: float | None = None
    center: tuple[float, float] | None = None
    radius: float | None = None
    squares: tuple[tuple[float, float, float], ...] | None = None  # (ox, oy, side)
    resolution: tuple[int, int] | None = None
    mask: np.ndarray | None = field(default=None, compare=False)
    mask_origin: tuple[float, float] | None = None
    cell: float | None = None

    # -- constructors ------------------------------------------------------
    @classmethod
    def square(cls, origin: Sequence[float], side: float) -> "Domain":
        if side <= 0:
            raise FieldError("square side must be positive")
        return cls(kind="square", origin=(float(origin[0]), float(origin[1])),
                   side=float(side))

    @classmethod
    def disc(cls, center: Sequence[float], radius: float) -> "Domain":
        if radius <= 0:
            raise FieldError("disc radius must be positive")
        return cls(kind="disc", center=(float(center[0]), float(center[1])),
                   radius=float(radius))

    @classmethod
    def union_of_squares(cls, squares: Sequence[Sequence[float]]) -> "Domain":
        sq = tuple((float(a), float(b), float(s)) for a, b, s in squares)
        for _, _, s in sq:
            if s <= 0:
                raise FieldError("square side must be positive")
        return cls(kind="union_of_squares", squares=sq)

    @classmethod
    def grid_mask(cls, mask: np.ndarray, origin: Sequence[float],
                  cell: float) -> "Domain":
        mask = np.asarray(mask, dtype=bool)
        if mask.ndim != 2:
            raise FieldError("mask must be 2-D")
        return cls(kind="grid_mask", resolution=mask.shape, mask=mask,
                   mask_origin=(float(origin[0]), float(origin[1])),
                   cell=float(cell))

    # -- geometry ----------------------------------------------------------
    @property
    def area(self) -> float:
        if self.kind == "square":
            return self.side ** 2
        if self.kind == "disc":
            return math.pi * self.radius ** 2
        if self.kind == "union_of_squares":
            return sum(s * s for _, _, s in self.squares)
        if self.kind == "grid_mask":
            return float(self.mask.sum()) * self.cell ** 2
        raise FieldError(f"unknown domain kind {self.kind!r}")

    def bounding_box(self) -> tuple[float, float, float, float]:
        """(x0, y0, x1, y1) axis-aligned bounding box."""
        if self.kind == "square":
            x0, y0 = self.origin
            return x0, y0, x0 + self.side, y0 + self.side
        if self.kind == "disc":
            cx, cy = self.center
            r = self.radius
            return cx - r, cy - r, cx + r, cy + r
        if self.kind == "union_of_squares":
            if not self.squares:
                raise FieldError("empty union has no bounding box")
            xs0 = min(o[0] for o in self.squares)
            ys0 = min(o[1] for o in self.squares)
            xs1 = max(o[0] + o[2] for o in self.squares)
            ys1 = max(o[1] + o[2] for o in self.squares)
            return xs0, ys0, xs1, ys1
        if self.kind == "grid_mask":
            x0, y0 = self.mask_origin
            ny, nx = self.mask.shape
            return x0, y0, x0 + nx * self.cell, y0 + ny * self.cell
        raise FieldError(f"unknown domain kind {self.kind!r}")

    def contains(self, pts: np.ndarray) -> np.ndarray:
        """Boolean membership for an (..., 2) array of points (open region)."""
        pts = np.asarray(pts, dtype=float)
        x, y = pts[..., 0], pts[..., 1]
        if self.kind == "square":
            x0, y0 = self.origin
            s = self.side
            return (x > x0) & (x < x0 + s) & (y > y0) & (y < y0 + s)
        if self.kind == "disc":
            cx, cy = self.center
            return (x - cx) ** 2 + (y - cy) ** 2 < self.radius ** 2
        if self.kind == "union_of_squares":
            # Interior of the union of *closed* squares, so edge-adjacent
            # squares glue along their shared edge.  A point is interior when
            # it and eight epsilon-probes around it all lie in some closed
            # square (exact here because probe offsets are far below any
            # square coordinate scale).
            def in_closed(px, py):
                res = np.zeros(px.shape, dtype=bool)
                for ox, oy, s in self.squares:
                    res |= ((px >= ox) & (px <= ox + s)
                            & (py >= oy) & (py <= oy + s))
                return res

            eps = 1e-9 * max(s for _, _, s in self.squares)
            out = in_closed(x, y)
            for dx in (-eps, 0.0, eps):
                for dy in (-eps, 0.0, eps):
                    if dx == 0.0 and dy == 0.0:
                        continue
                    out &= in_closed(x + dx, y + dy)
            return out
        if self.kind == "grid_mask":
            x0, y0 = self.mask_origin
            j = np.floor((x - x0) / self.cell).astype(int)
            i = np.floor((y - y0) / self.cell).astype(int)
            ny, nx = self.mask.shape
            ok = (i >= 0) & (i < ny) & (j >= 0) & (j < nx)
            out = np.zeros(pts.shape[:-1], dtype=bool)
            out[ok] = self.mask[i[ok], j[ok]]
            return out
        raise FieldError(f"unknown domain kind {self.kind!r}")


@dataclass(frozen=True)
class QuadratureSpec:
    """Quadrature resolution.

    Squares use a tensor-product midpoint rule with ``n`` cells per axis.
    Discs use Gauss–Legendre in the radius (``n`` nodes, weighted by r) and
    the trapezoid rule in the angle (``n_theta`` nodes, default ``4 n``).
    """

    n: int = 256
    n_theta: int | None = None

    def __post_init__(self) -> None:
        if self.n < 2:
            raise FieldError("quadrature resolution must be >= 2 per axis")

    def nodes(self, dom: Domain) -> tuple[np.ndarray, np.ndarray]:
        """Return (points (N,2), weights (N,)) integrating dx over ``dom``."""
        if dom.kind == "square":
            return self._square_nodes(dom.origin, dom.side)
        if dom.kind == "union_of_squares":
            ps, ws = [], []
            for ox, oy, s in dom.squares:
                p, w = self._square_nodes((ox, oy), s)
                ps.append(p)
                ws.append(w)
            if not ps:
                raise FieldError("degenerate domain: empty union")
            return np.concatenate(ps), np.concatenate(ws)
        if dom.kind == "disc":
            nt = self.n_theta if self.n_theta is not None else 4 * self.n
            xg, wg = np.polynomial.legendre.leggauss(self.n)
            r = 0.5 * dom.radius * (xg + 1.0)
            wr = 0.5 * dom.radius * wg * r
            th = 2.0 * math.pi * np.arange(nt) / nt
            wt = 2.0 * math.pi / nt
            R, T = np.meshgrid(r, th, indexing="ij")
            pts = np.stack(
                [dom.center[0] + R * np.cos(T), dom.center[1] + R * np.sin(T)],
                axis=-1,
            ).reshape(-1, 2)
            w = (wr[:, None] * np.full(nt, wt)[None, :]).reshape(-1)
            return pts, w
        if dom.kind == "grid_mask":
            ii, jj = np.nonzero(dom.mask)
            if ii.size == 0:
                raise FieldError("degenerate domain: empty mask")
            x0, y0 = dom.mask_origin
            c = dom.cell
            pts = np.stack([x0 + (jj + 0.5) * c, y0 + (ii + 0.5) * c], axis=-1)
            return pts, np.full(pts.shape[0], c * c)
        raise FieldError(f"unknown domain kind {dom.kind!r}")

    def _square_nodes(self, origin, side):
        n = self.n
        h = side / n
        u = origin[0] + (np.arange(n) + 0.5) * h
        v = origin[1] + (np.arange(n) + 0.5) * h
        X, Y = np.meshgrid(u, v, indexing="ij")
        pts = np.stack([X, Y], axis=-1).reshape(-1, 2)
        return pts, np.full(n * n, h * h)


def _samples(B: ScalarField2D, dom: Domain, quad: QuadratureSpec):
    pts, w = quad.nodes(dom)
    vals = B(pts)
    bad = ~np.isfinite(vals)
    if bad.any():
        p = pts[np.argmax(bad)]
        raise FieldError(f"non-finite field sample at ({p[0]:g}, {p[1]:g})")
    return pts, w, vals


def flux(B: ScalarField2D, dom: Domain, quad: QuadratureSpec | None = None) -> float:
    """Magnetic flux ``(1/2pi) \\int_dom B dx`` by quadrature."""
    if quad is None:
        quad = QuadratureSpec()
    if dom.area <= 0:
        raise FieldError("degenerate domain (zero area)")
    _, w, vals = _samples(B, dom, quad)
    return float(np.dot(w, vals) / (2.0 * math.pi))


def _nfunction(t: np.ndarray) -> np.ndarray:
    # (t+1)log(t+1) - t, evaluated stably for small t via log1p.
    return (t + 1.0) * np.log1p(t) - t


_LUX_LO = 1e-12
_LUX_HI = 1e12
_LUX_MAXIT = 200


def luxemburg_norm(V: ScalarField2D, dom: Domain,
                   quad: QuadratureSpec | None = None) -> float:
    """Luxemburg norm of ``V`` for the N-function ``(t+1)log(t+1) - t``.

    Returns ``inf{k > 0 : \\int A(|V|/k) dx <= 1}`` by bisection on the
    bracket ``[1e-12, 1e12]`` to relative tolerance 1e-10.  The zero
    function has norm 0.
    """
    if quad is None:
        quad = QuadratureSpec()
    _, w, vals = _samples(V, dom, quad)
    a = np.abs(vals)
    if not a.any():
        return 0.0

    def excess(k: float) -> float:
        return float(np.dot(w, _nfunction(a / k))) - 1.0

    lo, hi = _LUX_LO, _LUX_HI
    f_lo, f_hi = excess(lo), excess(hi)
    if f_hi > 0.0 or f_lo < 0.0:
        raise FieldError(
            "luxemburg bisection bracket not found: "
            f"excess({lo:g})={f_lo:g}, excess({hi:g})={f_hi:g}"
        )
    for _ in range(_LUX_MAXIT):
        mid = math.sqrt(lo * hi)  # geometric: bracket spans 24 decades
        if excess(mid) > 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-10 * hi:
            break
    return hi


def apriori_count_bound(B: ScalarField2D, lam: float, dom: Domain,
                        C1: float = 1.0,
                        quad: QuadratureSpec | None = None) -> float:
    """Sanity ceiling ``2 C1 (||B||_A + |lam| ||1||_A)`` for counts below lam.

    ``||.||_A`` is the Luxemburg norm on ``dom``.  C1 is a configuration
    constant (default 1); results derived from this bound are relative to
    the configured value, not absolute.
    """
    if C1 <= 0:
        raise FieldError("C1 must be positive")
    nb = luxemburg_norm(B, dom, quad)
    none = luxemburg_norm(constant_field(1.0), dom, quad)
    return 2.0 * C1 * (nb + abs(lam) * none)


def oscillation(B: ScalarField2D, dom: Domain, r: float,
                samples: int = 4096, seed: int = 7) -> float:
    """Estimate ``sup { |B(x)-B(y)| : x, y in dom, |x-y| <= r }``.

    Uses the Hölder metadata ``holder_const * r**holder_alpha`` when both
    fields are present (a true upper bound).  Otherwise draws ``samples``
    point pairs at separations up to r (fixed seed) and returns the largest
    observed difference; the sample count is logged.
    """
    if r <= 0:
        raise FieldError("oscillation radius must be positive")
    if B.holder_const is not None and B.holder_alpha is not None:
        return float(B.holder_const * r ** B.holder_alpha)

    rng = np.random.default_rng(seed)
    x0, y0, x1, y1 = dom.bounding_box()
    best = 0.0
    got = 0
    # rejection-sample pairs inside the domain
    for _ in range(64):
        need = samples - got
        if need <= 0:
            break
        p = rng.uniform([x0, y0], [x1, y1], size=(4 * need, 2))
        p = p[dom.contains(p)][:2 * need]
        if p.shape[0] == 0:
            continue
        ang = rng.uniform(0.0, 2.0 * math.pi, size=p.shape[0])
        rad = r * np.sqrt(rng.uniform(0.0, 1.0, size=p.shape[0]))
        q = p + np.stack([rad * np.cos(ang), rad * np.sin(ang)], axis=-1)
        ok = dom.contains(q)
        p, q = p[ok], q[ok]
        if p.shape[0] == 0:
            continue
        d = np.abs(B(p) - B(q))
        if d.size:
            best = max(best, float(d.max()))
        got += p.shape[0]
    log.debug("oscillation: %d sampled pairs, r=%g -> %g", got, r, best)
    return best
