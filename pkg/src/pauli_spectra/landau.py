"""Landau counting densities and the constant-field square bracket.

For a constant field b the Pauli operator on the plane has spectrum
``{2|b| m : m >= 0}``, each level carrying spectral density ``|b|/2pi`` per
unit area and per sign of the angular quantum number.  The raw density

    nu(b, lambda) = (|b|/2pi) * #{ m in Z : 2|m b| <= lambda }

is defined off the thresholds ``lambda in 2|b| N_0`` and for ``b != 0``; the
``lower``/``upper`` variants are its semicontinuous envelopes, computed here
in closed form.  ``mu_cdv`` is the odd-multiple counting function entering
the absolute-constant square estimate, and ``const_square_bracket`` is that
two-sided estimate itself.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fields import Domain, FieldError, QuadratureSpec, ScalarField2D, _samples

__all__ = [
    "LandauDensityQuery",
    "LandauThresholdError",
    "nu",
    "nu_value",
    "mu_cdv",
    "semiclassical_integral",
    "const_square_bracket",
]

_TWO_PI = 2.0 * math.pi
_RTOL = 1e-12  # threshold detection tolerance (dyadic inputs compare exactly)


class LandauThresholdError(ValueError):
    pass


@dataclass(frozen=True)
class LandauDensityQuery:
    b: float
    lam: float
    variant: str = "raw"  # raw | lower | upper


def _threshold_index(b: float, lam: float) -> int | None:
    """Index k >= 0 with lam == 2 k |b|, within relative tolerance, else None."""
    ab = abs(b)
    if ab == 0.0 or lam < 0.0:
        return None
    q = lam / (2.0 * ab)
    k = round(q)
    if abs(q - k) <= _RTOL * max(1.0, abs(q)):
        return int(k)
    return None


def nu_value(b: float, lam: float, variant: str = "raw") -> float:
    """Landau density; see module docstring for the three variants."""
    if variant not in ("raw", "lower", "upper"):
        raise ValueError(f"unknown variant {variant!r}")
    if lam < 0.0:
        if variant == "raw" and b == 0.0:
            raise LandauThresholdError("raw variant undefined for b=0")
        return 0.0
    ab = abs(b)
    if ab == 0.0:
        if variant == "raw":
            raise LandauThresholdError("raw variant undefined for b=0")
        return max(lam, 0.0) / _TWO_PI
    k = _threshold_index(b, lam)
    if k is not None:
        if variant == "raw":
            raise LandauThresholdError(
                f"on Landau threshold: lambda = 2*{k}*|b|"
            )
        if variant == "lower":
            # strict inequality count: m = 0 survives only when lam > 0
            return (2 * k - 1) * ab / _TWO_PI if k >= 1 else 0.0
        return (2 * k + 1) * ab / _TWO_PI
    m = math.floor(lam / (2.0 * ab))
    return (2 * m + 1) * ab / _TWO_PI


def nu(q: LandauDensityQuery) -> float:
    return nu_value(q.b, q.lam, q.variant)


def mu_cdv(b_abs: float, lam: float) -> float:
    """(|b|/2pi) * #{ m >= 0 : (2m+1)|b| <= lam }, with the b=0 limit lam/4pi."""
    if b_abs < 0:
        raise ValueError("b_abs must be >= 0")
    if lam < 0.0:
        return 0.0
    if b_abs == 0.0:
        return lam / (4.0 * math.pi)
    # largest m with (2m+1) b <= lam  ->  m <= (lam/b - 1)/2
    top = (lam / b_abs - 1.0) / 2.0
    # snap to nearest integer when within tolerance of a threshold
    k = round(top)
    if abs(top - k) <= _RTOL * max(1.0, abs(top)):
        top = k
    m = math.floor(top)
    if m < 0:
        return 0.0
    return (m + 1) * b_abs / _TWO_PI


def semiclassical_integral(B: ScalarField2D, dom: Domain, Lambda: float,
                           variant: str = "upper",
                           quad: QuadratureSpec | None = None) -> float:
    """Quadrature of the pointwise Landau envelope: ``int nu^{-/+}(B(x), Lambda) dx``."""
    if variant not in ("lower", "upper"):
        raise ValueError("variant must be 'lower' or 'upper'")
    if quad is None:
        quad = QuadratureSpec()
    if Lambda < 0.0:
        return 0.0
    _, w, vals = _samples(B, dom, quad)
    dens = np.array([nu_value(v, Lambda, variant) for v in vals])
    return float(np.dot(w, dens))


def const_square_bracket(R: float, b: float, lam: float, rho: float,
                         C2: float = 1.0) -> tuple[float, float]:
    """Two-sided count estimate for a constant field on a side-R square.

    lower = R^2 (1-rho)^2 nu^+(b, lam - C2 R^-2 rho^-2), upper = R^2 nu^+(b, lam).
    C2 is configured (only existence of an absolute constant is known), so
    lower-bound conclusions are relative to the configured C2.
    """
    if R <= 0:
        raise ValueError("R must be positive")
    if not (0.0 < rho < 1.0):
        raise ValueError("rho must lie in (0, 1)")
    if C2 <= 0:
        raise ValueError("C2 must be positive")
    upper = R * R * nu_value(b, lam, "upper")
    shifted = lam - C2 / (R * R * rho * rho)
    lower = R * R * (1.0 - rho) ** 2 * nu_value(b, shifted, "upper")
    return lower, upper


# re-exported for callers that build quadratures around these densities
def nupm_bound(b: float, lam: float) -> float:
    """The coarse envelope bound ``(|b| + |lam|)/2pi`` (both variants obey it)."""
    return (abs(b) + abs(lam)) / _TWO_PI
