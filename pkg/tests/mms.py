"""Manufactured smooth flow shared by the test suite.

The velocity is the curl of a trigonometric vector potential, so it is
divergence-free by construction; the pressure is an independent smooth
function; the matching forcing is computed symbolically from the momentum
balance.  Plugging the sampled fields into any discrete residual evaluator
must therefore show pure discretization error.
"""

import numpy as np
import sympy as sp

from nspicard.dictionary import PRODUCT_FACTORS, STATE_DIM, Z_DESCRIPTORS
from nspicard.fields import ScalarField
from nspicard.reconstruction import FlowFields

_T, _X1, _X2, _X3 = sp.symbols("t x1 x2 x3")
_VARS = (_T, _X1, _X2, _X3)


def _lam(expr):
    f = sp.lambdify(_VARS, expr, modules="numpy")

    def call(t, x1, x2, x3):
        t, x1, x2, x3 = np.broadcast_arrays(t, x1, x2, x3)
        return np.broadcast_to(f(t, x1, x2, x3), t.shape).astype(float)

    return call


class ManufacturedFlow:
    """Smooth exact flow (u, p) with symbolically matched forcing F."""

    def __init__(self, mu, tau, amplitude=0.3):
        self.mu = float(mu)
        self.tau = float(tau)
        g = sp.exp(-_T / 2)
        A = (sp.sin(_X2) * sp.sin(_X3),
             sp.sin(_X3) * sp.sin(_X1),
             sp.sin(_X1) * sp.sin(_X2))
        u = (amplitude * g * (sp.diff(A[2], _X2) - sp.diff(A[1], _X3)),
             amplitude * g * (sp.diff(A[0], _X3) - sp.diff(A[2], _X1)),
             amplitude * g * (sp.diff(A[1], _X1) - sp.diff(A[0], _X2)))
        p = amplitude * g * sp.cos(_X1) * sp.cos(2 * _X2) * sp.cos(_X3)

        F = []
        for j in range(3):
            adv = sum(u[k] * sp.diff(u[j], _VARS[1 + k]) for k in range(3))
            lap = sum(sp.diff(u[j], x, 2) for x in _VARS[1:])
            F.append(sp.diff(u[j], _T) + adv
                     + tau * sp.diff(p, _VARS[1 + j]) - mu * lap)

        self._exprs = {"u1": u[0], "u2": u[1], "u3": u[2], "p": p}
        self.u = tuple(_lam(e) for e in u)
        self.p = _lam(p)
        self.F = tuple(_lam(e) for e in F)
        self._state_fns = self._build_state_fns()

    def _slot_expr(self, slot):
        if slot <= 46:
            field, orders = Z_DESCRIPTORS[slot]
            return self._deriv(field, orders)
        left, (field, orders) = PRODUCT_FACTORS[slot]
        return self._exprs[left] * self._deriv(field, orders)

    def _deriv(self, field, orders):
        expr = self._exprs[field]
        for var, n in zip(_VARS, orders):
            if n:
                expr = sp.diff(expr, var, n)
        return expr

    def _build_state_fns(self):
        return [_lam(self._slot_expr(s)) for s in range(1, STATE_DIM + 1)]

    def state(self, t, x1, x2, x3):
        """Reduced 55-component state sampled at broadcastable arguments."""
        cols = [fn(t, x1, x2, x3) for fn in self._state_fns]
        return np.stack(cols, axis=-1)

    def state_on_grid(self, grid):
        T, X1, X2, X3 = np.meshgrid(grid.times, *grid.axes, indexing="ij")
        return self.state(T, X1, X2, X3)

    def flow_on_grid(self, grid):
        T, X1, X2, X3 = np.meshgrid(grid.times, *grid.axes, indexing="ij")
        return FlowFields(grid,
                          self.u[0](T, X1, X2, X3),
                          self.u[1](T, X1, X2, X3),
                          self.u[2](T, X1, X2, X3),
                          self.p(T, X1, X2, X3))

    def forcing_on_grid(self, grid):
        T, X1, X2, X3 = np.meshgrid(grid.times, *grid.axes, indexing="ij")
        return [f(T, X1, X2, X3) for f in self.F]

    def forcing_fields(self):
        """Unrestricted field closures usable by the residual evaluator."""
        def wrap(fn, name):
            def call(t, pts):
                pts = np.atleast_2d(pts)
                return fn(t, pts[:, 0], pts[:, 1], pts[:, 2])
            return ScalarField(call, support=None, name=name)
        return tuple(wrap(f, f"F{j + 1}") for j, f in enumerate(self.F))


def convergence_order(errors, spacings):
    """Least-squares slope of log error against log spacing."""
    e = np.asarray(errors, dtype=float)
    h = np.asarray(spacings, dtype=float)
    return float(np.polyfit(np.log(h), np.log(e), 1)[0])
