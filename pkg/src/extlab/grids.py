"""Composite Gauss-Legendre grids on [0, X].

Functions are stored by their samples at the quadrature nodes.  Each panel
carries a 16-point (by default) Gauss-Legendre rule, so inner products of
smooth integrands are exact to machine precision, and per-panel Legendre
interpolation provides differentiation, running integrals and off-node
evaluation without ever touching a finite-difference stencil.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import legendre as npleg


@lru_cache(maxsize=None)
def _reference_panel(order: int):
    """Nodes, weights and spectral matrices on the reference panel [-1, 1].

    Returns (nodes, weights, D, S) where D is the differentiation matrix of
    the degree order-1 interpolant and S[i, j] = integral of the j-th
    Lagrange basis polynomial from -1 to node i.
    """
    x, w = npleg.leggauss(order)

    # Barycentric weights for the Gauss nodes.
    diff = x[:, None] - x[None, :]
    np.fill_diagonal(diff, 1.0)
    b = 1.0 / np.prod(diff, axis=1)

    D = np.zeros((order, order))
    for i in range(order):
        for j in range(order):
            if i != j:
                D[i, j] = (b[j] / b[i]) / (x[i] - x[j])
    np.fill_diagonal(D, -D.sum(axis=1))

    # Lagrange basis in the Legendre basis: columns of C = V^{-1}.
    V = npleg.legvander(x, order - 1)
    C = np.linalg.inv(V)

    # Antiderivatives of Legendre polynomials vanishing at -1:
    # int P_k = (P_{k+1} - P_{k-1}) / (2k + 1) for k >= 1, int P_0 = P_1 + P_0.
    Vp = npleg.legvander(x, order)
    IP = np.zeros((order, order))
    IP[:, 0] = Vp[:, 1] + Vp[:, 0]
    for k in range(1, order):
        IP[:, k] = (Vp[:, k + 1] - Vp[:, k - 1]) / (2 * k + 1)
    S = IP @ C

    x.setflags(write=False)
    w.setflags(write=False)
    D.setflags(write=False)
    S.setflags(write=False)
    return x, w, D, S


@lru_cache(maxsize=None)
def _grid_data(x_max: float, n_panels: int, order: int):
    xr, wr, _, _ = _reference_panel(order)
    edges = np.linspace(0.0, x_max, n_panels + 1)
    h = x_max / n_panels
    nodes = (edges[:-1, None] + 0.5 * h * (xr[None, :] + 1.0)).ravel()
    weights = np.tile(0.5 * h * wr, n_panels)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    edges.setflags(write=False)
    return nodes, weights, edges


@dataclass(frozen=True)
class PanelGrid:
    """Composite Gauss-Legendre quadrature grid on [0, x_max]."""

    x_max: float
    n_panels: int = 64
    order: int = 16

    @property
    def nodes(self) -> np.ndarray:
        return _grid_data(self.x_max, self.n_panels, self.order)[0]

    @property
    def weights(self) -> np.ndarray:
        return _grid_data(self.x_max, self.n_panels, self.order)[1]

    @property
    def edges(self) -> np.ndarray:
        return _grid_data(self.x_max, self.n_panels, self.order)[2]

    @property
    def size(self) -> int:
        return self.n_panels * self.order

    @property
    def panel_width(self) -> float:
        return self.x_max / self.n_panels

    def sample(self, f) -> np.ndarray:
        return np.asarray(f(self.nodes), dtype=complex)

    def integrate(self, values) -> complex:
        return complex(np.dot(self.weights, values))

    def derivative(self, values) -> np.ndarray:
        _, _, D, _ = _reference_panel(self.order)
        v = np.asarray(values).reshape(self.n_panels, self.order)
        return (v @ D.T).ravel() * (2.0 / self.panel_width)

    def second_derivative(self, values) -> np.ndarray:
        return self.derivative(self.derivative(values))

    def antiderivative(self, values) -> np.ndarray:
        """Running integral from 0, evaluated at every node."""
        _, wr, _, S = _reference_panel(self.order)
        h2 = 0.5 * self.panel_width
        v = np.asarray(values, dtype=complex).reshape(self.n_panels, self.order)
        partial = (v @ S.T) * h2
        panel_totals = (v @ wr) * h2
        offsets = np.concatenate(([0.0], np.cumsum(panel_totals)[:-1]))
        return (partial + offsets[:, None]).ravel()

    def eval(self, values, x) -> np.ndarray:
        """Barycentric evaluation of the panel interpolant at points x."""
        xr, _, _, _ = _reference_panel(self.order)
        diff = xr[:, None] - xr[None, :]
        np.fill_diagonal(diff, 1.0)
        bary = 1.0 / np.prod(diff, axis=1)

        x = np.atleast_1d(np.asarray(x, dtype=float))
        v = np.asarray(values, dtype=complex).reshape(self.n_panels, self.order)
        out = np.empty(x.shape, dtype=complex)
        idx = np.clip(np.searchsorted(self.edges, x, side="right") - 1, 0, self.n_panels - 1)
        h2 = 0.5 * self.panel_width
        for i, (xi, p) in enumerate(zip(x, idx)):
            t = (xi - self.edges[p]) / h2 - 1.0
            d = t - xr
            hit = np.where(np.abs(d) < 1e-14)[0]
            if hit.size:
                out[i] = v[p, hit[0]]
            else:
                c = bary / d
                out[i] = np.dot(c, v[p]) / c.sum()
        return out if out.size > 1 else out[0]


def gauss_legendre_rule(a: float, b: float, n_panels: int = 8, order: int = 16):
    """Plain composite Gauss-Legendre nodes/weights on [a, b]."""
    xr, wr = npleg.leggauss(order)
    edges = np.linspace(a, b, n_panels + 1)
    h2 = 0.5 * (b - a) / n_panels
    nodes = (edges[:-1, None] + h2 * (xr[None, :] + 1.0)).ravel()
    weights = np.tile(h2 * wr, n_panels)
    return nodes, weights
