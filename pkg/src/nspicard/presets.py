"""Built-in forcing presets.

All presets produce three ScalarFields that vanish identically outside a
ball strictly inside the domain, so the compact-support requirement holds
exactly (not just to rounding).  The gaussian preset multiplies the
Gaussian profile by a smooth cutoff that reaches exact zero at the support
radius; the polynomial preset is C^3 at the seam, which is enough
smoothness for the lifted potentials (potential and heat lift each gain
two orders).
"""

from __future__ import annotations

import numpy as np

from .fields import ScalarField


def _radial(pts, center, radius):
    d = np.atleast_2d(pts) - np.asarray(center, dtype=float)
    return np.linalg.norm(d, axis=1) / radius


def smooth_cutoff(rho):
    """C-infinity bump equal to 1 at 0 and exactly 0 for rho >= 1."""
    out = np.zeros_like(rho)
    inside = rho < 1.0
    r2 = rho[inside] ** 2
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - r2))
    return out


def _check_support(domain, center, radius):
    center = np.asarray(center, dtype=float)
    for box in domain.boxes:
        lo, hi = np.asarray(box.lo), np.asarray(box.hi)
        if np.all(center - radius > lo) and np.all(center + radius < hi):
            return
    raise ValueError(
        f"support ball (center {tuple(center)}, radius {radius}) must lie "
        "strictly inside one domain box"
    )


def zero_forcing(domain, **_):
    zero = ScalarField(lambda t, pts: np.zeros(len(np.atleast_2d(pts))),
                       support=domain, name="zero")
    return (zero, zero, zero)


def gaussian_bump(domain, amplitude=0.1, center=None, radius=None,
                  width=None, direction=(1.0, 0.0, 0.0)):
    """Gaussian profile with a smooth exact-compact-support cutoff."""
    box = domain.boxes[0]
    if center is None:
        center = box.center
    if radius is None:
        radius = 0.4 * min(box.widths)
    if width is None:
        width = radius / 2.0
    _check_support(domain, center, radius)
    direction = np.asarray(direction, dtype=float)

    def component(j):
        def fn(t, pts):
            pts = np.atleast_2d(pts)
            rho = _radial(pts, center, radius)
            d2 = np.sum((pts - np.asarray(center)) ** 2, axis=1)
            return (amplitude * direction[j] * np.exp(-d2 / width**2)
                    * smooth_cutoff(rho))
        return ScalarField(fn, support=domain, name=f"gaussian-bump[{j}]")

    return tuple(component(j) for j in range(3))


def polynomial_bump(domain, amplitude=0.1, center=None, radius=None,
                    direction=(1.0, 0.0, 0.0), **_):
    """(1 - rho^2)^4 inside the support ball, zero outside."""
    box = domain.boxes[0]
    if center is None:
        center = box.center
    if radius is None:
        radius = 0.4 * min(box.widths)
    _check_support(domain, center, radius)
    direction = np.asarray(direction, dtype=float)

    def component(j):
        def fn(t, pts):
            rho = _radial(pts, center, radius)
            prof = np.where(rho < 1.0, (1.0 - rho**2) ** 4, 0.0)
            return amplitude * direction[j] * prof
        return ScalarField(fn, support=domain, name=f"polynomial-bump[{j}]")

    return tuple(component(j) for j in range(3))


PRESETS = {
    "zero": zero_forcing,
    "gaussian-bump": gaussian_bump,
    "polynomial-bump": polynomial_bump,
}


def make_forcing(preset, domain, **params):
    if preset not in PRESETS:
        raise ValueError(
            f"unknown forcing preset {preset!r}; available: "
            + ", ".join(sorted(PRESETS)))
    return PRESETS[preset](domain, **params)
