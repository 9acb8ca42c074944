"""Heat propagation of a source field and the related envelope integrals.

The propagated field of a source v is

    h2(t, x) = (1 / (2 sqrt(pi mu)))^3 *
               integral_0^t integral_R3 v(tau, y) / sqrt(t - tau)^3 *
               exp(-|x - y|^2 / (4 mu (t - tau))) dy dtau.

After the substitution ``y = x + 2 sqrt(mu (t - tau)) theta`` the spatial
integral carries the Gauss weight ``exp(-|theta|^2)`` and is evaluated with
tensor Gauss-Hermite quadrature; the time integral uses Gauss-Legendre on
[0, t].  Spatial derivatives are applied to the kernel analytically, which
turns into Hermite-polynomial factors:

    d^a h2 = pi^(-3/2) * integral_0^t (2 sqrt(mu s))^(-|a|) *
             integral H_a1(th1) H_a2(th2) H_a3(th3) v(tau, x + ...) e^(-|th|^2)

with s = t - tau and physicists' Hermite polynomials H_n.

Time derivatives are never taken by differentiating the quadrature; they go
through the source identity ``d h2 / dt = mu lap h2 + sign * v`` whose sign
is resolved empirically by :func:`heat_residual` (see the bounds report).
The resolved sign is +1: the propagated field gains the source, i.e.
``mu lap h2 - d h2/dt = -v``.
"""

from __future__ import annotations

import numpy as np
from numpy.polynomial.hermite import hermgauss, hermval
from numpy.polynomial.legendre import leggauss

from .fields import first_diff, laplacian, second_diff

#: empirically resolved sign of the source term in d h2/dt = mu lap h2 + sign*v
RESOLVED_SOURCE_SIGN = +1.0


def _hermite_factors(nodes, order):
    if order == 0:
        return np.ones_like(nodes)
    coeffs = np.zeros(order + 1)
    coeffs[order] = 1.0
    return hermval(nodes, coeffs)


class HeatPropagator:
    """Quadrature-based heat propagation with analytic kernel derivatives."""

    def __init__(self, mu, legendre_order=16, hermite_order=10):
        if mu <= 0:
            raise ValueError(f"viscosity must be positive, got {mu}")
        self.mu = float(mu)
        self.legendre_order = int(legendre_order)
        self.hermite_order = int(hermite_order)
        self._gl_nodes, self._gl_weights = leggauss(self.legendre_order)
        self._gh_nodes, self._gh_weights = hermgauss(self.hermite_order)

    # -- quadrature in s = t - tau ---------------------------------------
    def time_nodes(self, t):
        s = 0.5 * t * (self._gl_nodes + 1.0)
        w = 0.5 * t * self._gl_weights
        return s, w

    def check_request(self, deriv):
        """Validate a combined (time, space) derivative request."""
        dt, a = deriv[0], tuple(deriv[1:])
        order = sum(a)
        if dt not in (0, 1):
            raise ValueError(f"at most one time derivative, got {dt}")
        if dt == 0 and order > 4:
            raise ValueError(f"pure spatial order is capped at 4, got {a}")
        if dt == 1 and order > 3:
            raise ValueError(
                f"with a time derivative the spatial order is capped at 3, got {a}"
            )
        return dt, a

    # -- arbitrary evaluation points (closure sources) -------------------
    def propagate_points(self, v, t, points, deriv=(0, 0, 0)):
        """Spatial-derivative evaluation at arbitrary points.

        ``v`` is a callable ``v(tau, pts)``; ``deriv`` is the spatial
        multi-index (no time component here).
        """
        a = tuple(deriv)
        order = sum(a)
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if t <= 0.0:
            return np.zeros(len(points))
        th = self._gh_nodes
        tg = np.stack([g.ravel() for g in np.meshgrid(th, th, th,
                                                      indexing="ij")], axis=-1)
        wg = (self._gh_weights[:, None, None]
              * self._gh_weights[None, :, None]
              * self._gh_weights[None, None, :]).ravel()
        for axis in range(3):
            f = _hermite_factors(tg[:, axis], a[axis])
            wg = wg * f
        s_nodes, s_weights = self.time_nodes(t)
        out = np.zeros(len(points))
        for s, w in zip(s_nodes, s_weights):
            c = 2.0 * np.sqrt(self.mu * s)
            shifted = points[None, :, :] + c * tg[:, None, :]
            vals = v(t - s, shifted.reshape(-1, 3)).reshape(len(tg), -1)
            out += w * c ** (-order) * (wg @ vals)
        return out * np.pi ** -1.5


class GridHeatContext:
    """Separable heat propagation of grid-sampled sources onto the grid.

    For every Gauss-Legendre node the tensor Gauss-Hermite sum factorises
    into three one-dimensional smears; with multilinear interpolation and a
    rigid shift each smear is a small banded matrix applied along one axis.
    Matrices depend only on (time index, node, axis, order) and are cached.
    Samples falling outside the box pick up the zero extension.
    """

    def __init__(self, grid, mu, legendre_order=16, hermite_order=10):
        self.grid = grid
        self.prop = HeatPropagator(mu, legendre_order, hermite_order)
        self._smear_cache = {}

    def _smear_matrix(self, s, axis, order):
        key = (round(float(s), 15), axis, order)
        m = self._smear_cache.get(key)
        if m is not None:
            return m
        n = self.grid.shape[1 + axis]
        h = self.grid.dx[axis]
        c = 2.0 * np.sqrt(self.prop.mu * s)
        th = self.prop._gh_nodes
        w = self.prop._gh_weights * _hermite_factors(th, order)
        # fold the per-axis normalisation and kernel scale into the matrix
        w = w * np.pi ** -0.5 * c ** (-order)
        m = np.zeros((n, n))
        sig = c * th / h
        base = np.floor(sig).astype(int)
        frac = sig - base
        for wk, b, f in zip(w, base, frac):
            if -n < b < n:
                m += wk * (1.0 - f) * np.eye(n, n, k=b)
            if -n < b + 1 < n:
                m += wk * f * np.eye(n, n, k=b + 1)
        self._smear_cache[key] = m
        return m

    def derivatives_at_time(self, t, source_at, multi_indices):
        """Spatial-derivative fields of the propagated source at one time.

        Parameters
        ----------
        t : float
            Output time (must be a value, not an index, so forcing sources
            can be sampled at exact quadrature times).
        source_at : callable
            ``source_at(tau) -> (n1, n2, n3)`` spatial samples of v.
        multi_indices : iterable of spatial multi-indices

        Returns
        -------
        dict mapping each multi-index to an (n1, n2, n3) array
        """
        multi_indices = [tuple(a) for a in multi_indices]
        out = {a: np.zeros(self.grid.spatial_shape()) for a in multi_indices}
        if t <= 0.0:
            return out
        s_nodes, s_weights = self.prop.time_nodes(t)
        for s, w in zip(s_nodes, s_weights):
            vsl = source_at(t - s)
            cache1, cache2 = {}, {}
            for a in multi_indices:
                a1, a2, a3 = a
                if a1 not in cache1:
                    m1 = self._smear_matrix(s, 0, a1)
                    cache1[a1] = np.einsum("ai,ijk->ajk", m1, vsl)
                if (a1, a2) not in cache2:
                    m2 = self._smear_matrix(s, 1, a2)
                    cache2[(a1, a2)] = np.einsum("bj,ajk->abk", m2, cache1[a1])
                m3 = self._smear_matrix(s, 2, a3)
                out[a] += w * np.einsum("ck,abk->abc", m3, cache2[(a1, a2)])
        return out


def heat_propagate(v, mu, t, points, deriv=(0, 0, 0, 0), v_deriv=None,
                   legendre_order=16, hermite_order=10):
    """One-shot propagation with a combined (time, space) derivative request.

    ``deriv = (dt, a1, a2, a3)`` with ``dt <= 1``; pure spatial order is
    capped at 4, and at 3 when combined with the time derivative.  The time
    derivative is taken through the source identity
    ``d h2/dt = mu lap h2 + v`` (resolved sign), which needs the matching
    spatial derivative of the source: supply ``v_deriv`` (same signature as
    ``v``) when requesting a mixed derivative of positive spatial order.
    """
    prop = HeatPropagator(mu, legendre_order, hermite_order)
    dt, a = prop.check_request(deriv)
    if dt == 0:
        return prop.propagate_points(v, t, points, deriv=a)
    lap = np.zeros(len(np.atleast_2d(points)))
    for axis in range(3):
        aa = list(a)
        aa[axis] += 2
        lap += prop.propagate_points(v, t, points, deriv=tuple(aa))
    if sum(a) == 0:
        source = v(t, np.atleast_2d(points))
    else:
        if v_deriv is None:
            raise ValueError(
                "mixed time/space derivatives need the source derivative "
                "(v_deriv) for the source-identity route"
            )
        source = v_deriv(t, np.atleast_2d(points))
    return mu * lap + RESOLVED_SOURCE_SIGN * np.asarray(source, dtype=float)


def heat_residual(h2_values, v_values, mu, grid):
    """Finite-difference residual of the propagated field against its source.

    Computes ``r = mu lap h2 - d h2/dt`` on the grid and compares it with
    both source signs.  Returns a dict with the winning sign (the sign s in
    ``d h2/dt = mu lap h2 + s v`` with the smaller residual), the residual
    field for the winning sign (interior points), and both sup norms.
    """
    lap = laplacian(h2_values, grid.dx)
    dt_ = first_diff(h2_values, grid.dt, axis=0)
    core = mu * lap - dt_
    interior = (slice(1, -1),) * 4
    r_plus = (core + v_values)[interior]     # consistent with dh2/dt = mu lap + v
    r_minus = (core - v_values)[interior]    # the opposite convention
    sup_plus = float(np.max(np.abs(r_plus)))
    sup_minus = float(np.max(np.abs(r_minus)))
    if sup_plus <= sup_minus:
        sign, res = +1.0, r_plus
    else:
        sign, res = -1.0, r_minus
    return {
        "sign": sign,
        "residual": res,
        "sup": min(sup_plus, sup_minus),
        "sup_plus": sup_plus,
        "sup_minus": sup_minus,
    }


# ---------------------------------------------------------------------------
# Envelope integrals (phi family)
# ---------------------------------------------------------------------------

def phi_functions(t, tau1):
    """Closed-form values of the five Gaussian envelope integrals.

    phi1 = pi^(3/2) / (t - tau1), phi2 = (3/2) pi^(3/2) / (t - tau1), and
    phi3 = phi4 = phi5 = 0 (odd integrands).  The first two diverge as
    tau1 -> t; callers evaluate them on a truncated region and carry a
    divergence flag.
    """
    s = t - tau1
    if s <= 0:
        raise ValueError("need tau1 < t")
    return (np.pi ** 1.5 / s, 1.5 * np.pi ** 1.5 / s, 0.0, 0.0, 0.0)


def phi_quadrature(t, tau1, hermite_order=40):
    """The same five integrals by tensor Gauss-Hermite quadrature.

    Each integrand is ``(scale) * f(theta) * exp(-c |theta|^2)``; the
    substitution ``theta -> u / sqrt(c)`` reduces it to the unit Gauss
    weight.  Provides an independent check of the closed forms.
    """
    s = t - tau1
    if s <= 0:
        raise ValueError("need tau1 < t")
    nodes, weights = hermgauss(hermite_order)

    def moment(c, power):
        # integral theta^power exp(-c theta^2) dtheta, one dimension
        u = nodes / np.sqrt(c)
        return np.sum(weights * u ** power) / np.sqrt(c)

    # phi1: s^5 * integral exp(-s^4 |theta|^2)
    c = s ** 4
    phi1 = s ** 5 * moment(c, 0) ** 3
    # phi2: s^14 * integral |theta|^2 exp(-s^6 |theta|^2)
    c = s ** 6
    phi2 = s ** 14 * 3.0 * moment(c, 2) * moment(c, 0) ** 2
    # phi3..phi5: odd first moments against the Gauss weight
    c = s ** 4
    phi3 = np.sqrt(s) ** 15 * moment(c, 1) * moment(c, 0) ** 2
    return (phi1, phi2, phi3, phi3, phi3)
