"""Vectors, inner products and finite-rank geometry shared by all models.

Three concrete representations of a Hilbert-space element coexist:

* ``GridVec``     : samples on a composite Gauss-Legendre grid (1D models),
* ``SpectralVec`` : coefficients against a declared orthonormal exponential
  family exp(i (theta + 2 pi m) x) on (0, 1), m in [-M, M],
* ``AtomVec``     : finite combinations of closed-form atoms on L^2(R^3).

``PairVec`` glues two compatible vectors into an element of H (+) H, the
ambient space for operator graphs.  All inner products are conjugate-linear
in the first slot and linear in the second.  Vectors are immutable after
construction and safe to share between threads.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateBasis, RepresentationMismatch
from .grids import PanelGrid
from .kernels3d import KERNEL, AtomDescriptor, atoms_inner


class GridVec:
    """Complex samples at the nodes of a PanelGrid."""

    __slots__ = ("grid", "values")

    def __init__(self, grid: PanelGrid, values):
        values = np.array(values, dtype=complex)
        if values.shape != (grid.size,):
            raise RepresentationMismatch(
                f"expected {grid.size} samples, got shape {values.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("grid samples must be finite")
        values.setflags(write=False)
        self.grid = grid
        self.values = values

    def _check(self, other):
        if not isinstance(other, GridVec) or other.grid != self.grid:
            raise RepresentationMismatch("grid vectors live on different grids")

    def __add__(self, other):
        self._check(other)
        return GridVec(self.grid, self.values + other.values)

    def __sub__(self, other):
        self._check(other)
        return GridVec(self.grid, self.values - other.values)

    def __mul__(self, c):
        return GridVec(self.grid, self.values * complex(c))

    __rmul__ = __mul__

    def __neg__(self):
        return self * (-1.0)

    def __repr__(self):
        return f"GridVec(n={self.values.size}, X={self.grid.x_max})"


@dataclass(frozen=True)
class ExponentialFamily:
    """Orthonormal family exp(i (theta + 2 pi m) x) on (0, 1), |m| <= M."""

    theta: float
    M: int

    @property
    def modes(self) -> np.ndarray:
        return np.arange(-self.M, self.M + 1)

    def synthesize(self, coeffs, x):
        x = np.asarray(x, dtype=float)
        lam = self.theta + 2.0 * np.pi * self.modes
        out = np.zeros(x.shape, dtype=complex)
        chunk = 512
        for i in range(0, lam.size, chunk):
            out += np.exp(1j * np.outer(x, lam[i:i + chunk])) @ coeffs[i:i + chunk]
        return out


class SpectralVec:
    __slots__ = ("family", "coeffs")

    def __init__(self, family: ExponentialFamily, coeffs):
        coeffs = np.array(coeffs, dtype=complex)
        if coeffs.shape != (2 * family.M + 1,):
            raise RepresentationMismatch(
                f"family has {2 * family.M + 1} modes, got {coeffs.shape}"
            )
        if not np.all(np.isfinite(coeffs)):
            raise ValueError("spectral coefficients must be finite")
        coeffs.setflags(write=False)
        self.family = family
        self.coeffs = coeffs

    def _check(self, other):
        if not isinstance(other, SpectralVec) or other.family != self.family:
            raise RepresentationMismatch("spectral vectors use different families")

    def __add__(self, other):
        self._check(other)
        return SpectralVec(self.family, self.coeffs + other.coeffs)

    def __sub__(self, other):
        self._check(other)
        return SpectralVec(self.family, self.coeffs - other.coeffs)

    def __mul__(self, c):
        return SpectralVec(self.family, self.coeffs * complex(c))

    __rmul__ = __mul__

    def __neg__(self):
        return self * (-1.0)

    def __repr__(self):
        return f"SpectralVec(theta={self.family.theta}, M={self.family.M})"


class AtomVec:
    """Finite atom combination; the list is deduplicated by descriptor."""

    __slots__ = ("atoms",)

    def __init__(self, atoms):
        merged: dict[AtomDescriptor, complex] = {}
        for w, desc in atoms:
            w = complex(w)
            if not np.isfinite(w.real) or not np.isfinite(w.imag):
                raise ValueError("atom weights must be finite")
            if desc in merged:
                merged[desc] += w
            else:
                merged[desc] = w
        self.atoms = tuple((w, d) for d, w in merged.items() if w != 0)

    def _check(self, other):
        if not isinstance(other, AtomVec):
            raise RepresentationMismatch("cannot combine atom vector with " + type(other).__name__)

    def __add__(self, other):
        self._check(other)
        return AtomVec(self.atoms + other.atoms)

    def __sub__(self, other):
        self._check(other)
        return AtomVec(self.atoms + tuple((-w, d) for w, d in other.atoms))

    def __mul__(self, c):
        return AtomVec(tuple((w * complex(c), d) for w, d in self.atoms))

    __rmul__ = __mul__

    def __neg__(self):
        return self * (-1.0)

    def __repr__(self):
        return f"AtomVec({len(self.atoms)} atoms)"


HVec = GridVec | SpectralVec | AtomVec


@dataclass(frozen=True)
class PairVec:
    """Element (first, second) of H (+) H; both components share a representation."""

    first: HVec
    second: HVec

    def __post_init__(self):
        if type(self.first) is not type(self.second):
            raise RepresentationMismatch("pair components use different representations")

    def __add__(self, other):
        return PairVec(self.first + other.first, self.second + other.second)

    def __sub__(self, other):
        return PairVec(self.first - other.first, self.second - other.second)

    def __mul__(self, c):
        return PairVec(self.first * c, self.second * c)

    __rmul__ = __mul__

    def __neg__(self):
        return self * (-1.0)


def inner(x: HVec, y: HVec) -> complex:
    """<x, y>, conjugate-linear in x and linear in y."""
    if isinstance(x, GridVec) and isinstance(y, GridVec):
        if x.grid != y.grid:
            raise RepresentationMismatch("grid vectors live on different grids")
        return complex(np.dot(x.grid.weights, np.conj(x.values) * y.values))
    if isinstance(x, SpectralVec) and isinstance(y, SpectralVec):
        x._check(y)
        return complex(np.vdot(x.coeffs, y.coeffs))
    if isinstance(x, AtomVec) and isinstance(y, AtomVec):
        return atoms_inner(x.atoms, y.atoms, KERNEL)
    raise RepresentationMismatch(
        f"no inner product between {type(x).__name__} and {type(y).__name__}"
    )


def graph_inner(x: PairVec, y: PairVec) -> complex:
    return inner(x.first, y.first) + inner(x.second, y.second)


def dot(x, y) -> complex:
    """Inner product dispatching on plain vectors versus pairs."""
    if isinstance(x, PairVec) and isinstance(y, PairVec):
        return graph_inner(x, y)
    return inner(x, y)


def norm(x) -> float:
    return float(np.sqrt(max(dot(x, x).real, 0.0)))


def w_map(x: PairVec) -> PairVec:
    """The unitary (phi, psi) -> (-psi, phi) on H (+) H; squares to -1."""
    return PairVec(-1.0 * x.second, x.first)


# ----------------------------------------------------------------------
# orthonormal systems
# ----------------------------------------------------------------------

def _leading_entries(v):
    """Deterministic scan order of a vector's coefficients for phase fixing."""
    if isinstance(v, PairVec):
        return np.concatenate([_leading_entries(v.first), _leading_entries(v.second)])
    if isinstance(v, GridVec):
        return v.values
    if isinstance(v, SpectralVec):
        return v.coeffs
    return np.array([w for w, _ in v.atoms], dtype=complex)


def phase_fix(v, tol: float = 1e-10):
    """Scale v by a phase so its first entry of modulus > tol is positive real."""
    entries = _leading_entries(v)
    idx = np.where(np.abs(entries) > tol)[0]
    if idx.size == 0:
        return v
    lead = entries[idx[0]]
    return v * (np.conj(lead) / abs(lead))


@dataclass(frozen=True)
class Onb:
    """Ordered orthonormal system together with its construction tolerance."""

    vectors: tuple
    tol: float = 1e-10

    def __len__(self):
        return len(self.vectors)

    def __iter__(self):
        return iter(self.vectors)

    def __getitem__(self, i):
        return self.vectors[i]

    def gram(self) -> np.ndarray:
        k = len(self.vectors)
        g = np.empty((k, k), dtype=complex)
        for i, vi in enumerate(self.vectors):
            for j, vj in enumerate(self.vectors):
                g[i, j] = dot(vi, vj)
        return g

    def max_gram_deviation(self) -> float:
        return float(np.max(np.abs(self.gram() - np.eye(len(self.vectors)))))


def gram_schmidt_with_coeffs(vectors, tol: float = 1e-10):
    """Orthonormalize with phase fixing; also return the mixing matrix.

    Returns (onb, R) with onb[j] = sum_i R[i, j] * vectors[i].  Two
    orthogonalization passes keep the Gram matrix at identity to roughly
    machine precision.  A vector whose orthogonal residual falls below
    tol (relative to its own norm) raises DegenerateBasis.
    """
    vectors = list(vectors)
    n = len(vectors)
    R = np.zeros((n, n), dtype=complex)
    out = []
    for j, v in enumerate(vectors):
        original = norm(v)
        coeff = np.zeros(n, dtype=complex)
        coeff[j] = 1.0
        for _ in range(2):
            for i, u in enumerate(out):
                c = dot(u, v)
                v = v - c * u
                coeff -= c * R[:, i]
        r = norm(v)
        if original == 0.0 or r < tol * max(original, 1.0):
            raise DegenerateBasis(j, r, tol)
        v = v * (1.0 / r)
        coeff /= r
        entries = _leading_entries(v)
        idx = np.where(np.abs(entries) > tol)[0]
        if idx.size:
            lead = entries[idx[0]]
            ph = np.conj(lead) / abs(lead)
            v = v * ph
            coeff *= ph
        out.append(v)
        R[:, len(out) - 1] = coeff
    return Onb(tuple(out), tol=tol), R


def gram_schmidt(vectors, tol: float = 1e-10) -> Onb:
    return gram_schmidt_with_coeffs(vectors, tol)[0]


def project_onto_span(basis: Onb, x):
    """Orthogonal projection of x onto the span of an orthonormal system."""
    if len(basis) == 0:
        raise ValueError("projection requires a nonempty basis")
    acc = None
    for b in basis:
        term = dot(b, x) * b
        acc = term if acc is None else acc + term
    return acc


def dist_to_span(basis: Onb, x) -> float:
    return norm(x - project_onto_span(basis, x))
