"""Turning angles, torsion angles, and k-edge local functionals.

Conventions
-----------
* The turning angle at a vertex is the unsigned angle in [0, pi] between
  the incoming and outgoing edge vectors; total curvature is their sum
  (n angles on a closed polygon, n-1 on an open chain).
* The torsion angle at an interior edge b with neighbors a, c is
  tau = pi - phi wrapped into (-pi, pi], where phi is the signed angle from
  the projection of a to the projection of c in the plane normal to b,
  oriented by b. Total torsion sums n cyclic angles on a closed polygon and
  the n-2 interior angles on an open chain.

Both angles are invariant under global rotations and positive scalings.
Degenerate inputs (near-zero edges or projections) raise instead of
returning silent zeros: they have probability zero under the sampled
measures, so an occurrence signals a caller bug.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, List

import numpy as np

from .errors import (DegenerateEdgeError, DegenerateTorsionError,
                     InvalidDimensionError, InvalidSizeError)
from .polygons import Polygon

_EDGE_TINY = 1e-14
_PROJ_TINY = 1e-12


@dataclass(frozen=True)
class LocalFunctional:
    """A bounded functional of k consecutive edges.

    ``eval`` maps a (k, dim) window array to a real with |value| <= bound_M;
    the bound is what enters the expectation-transfer inequalities.
    """

    k: int
    bound_M: float
    eval: Callable[[np.ndarray], float]
    name: str = "local_functional"


def turning_angle(u, v) -> float:
    """Unsigned angle in [0, pi] between two edge vectors."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu <= _EDGE_TINY or nv <= _EDGE_TINY:
        raise DegenerateEdgeError("turning angle of a near-zero edge")
    c = float(u @ v) / (nu * nv)
    return math.acos(min(1.0, max(-1.0, c)))


def torsion_angle(a, b, c) -> float:
    """Signed dihedral-style angle in (-pi, pi] at the middle edge b."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    if a.shape != (3,) or b.shape != (3,) or c.shape != (3,):
        raise InvalidDimensionError("torsion is defined for 3-vectors")
    nb = np.linalg.norm(b)
    if nb <= _EDGE_TINY:
        raise DegenerateEdgeError("torsion about a near-zero edge")
    bh = b / nb
    u = a - (a @ bh) * bh
    w = c - (c @ bh) * bh
    if np.linalg.norm(u) <= _PROJ_TINY or np.linalg.norm(w) <= _PROJ_TINY:
        raise DegenerateTorsionError("neighbor edge parallel to the torsion axis")
    phi = math.atan2(float(np.cross(bh, u) @ w), float(u @ w))
    tau = math.pi - phi
    if tau > math.pi:
        tau -= 2.0 * math.pi
    return tau


def _batch_turning(edges: np.ndarray, closed: bool):
    """Angles and validity mask for an edge batch of shape (C, n, dim).

    Returns (angles, ok) with angles of shape (C, n) for closed input and
    (C, n-1) for open input; ok flags rows whose edges are all nondegenerate.
    """
    norms = np.linalg.norm(edges, axis=-1)
    ok = np.all(norms > _EDGE_TINY, axis=-1)
    unit = edges / np.where(norms > _EDGE_TINY, norms, 1.0)[..., None]
    if closed:
        nxt = np.roll(unit, -1, axis=1)
        dots = np.einsum("cij,cij->ci", unit, nxt)
    else:
        dots = np.einsum("cij,cij->ci", unit[:, :-1], unit[:, 1:])
    return np.arccos(np.clip(dots, -1.0, 1.0)), ok


def _batch_torsion(edges: np.ndarray, closed: bool):
    """Torsions and validity mask for a spatial edge batch (C, n, 3).

    Window i is (e_i, e_{i+1}, e_{i+2}); closed input wraps cyclically for
    n windows, open input yields the n-2 interior windows.
    """
    if closed:
        a, b, c = edges, np.roll(edges, -1, axis=1), np.roll(edges, -2, axis=1)
    else:
        a, b, c = edges[:, :-2], edges[:, 1:-1], edges[:, 2:]
    nb = np.linalg.norm(b, axis=-1)
    ok = np.all(nb > _EDGE_TINY, axis=-1)
    bh = b / np.where(nb > _EDGE_TINY, nb, 1.0)[..., None]
    u = a - np.einsum("cij,cij->ci", a, bh)[..., None] * bh
    w = c - np.einsum("cij,cij->ci", c, bh)[..., None] * bh
    ok &= np.all(np.linalg.norm(u, axis=-1) > _PROJ_TINY, axis=-1)
    ok &= np.all(np.linalg.norm(w, axis=-1) > _PROJ_TINY, axis=-1)
    phi = np.arctan2(np.einsum("cij,cij->ci", np.cross(bh, u), w),
                     np.einsum("cij,cij->ci", u, w))
    tau = math.pi - phi
    tau = np.where(tau > math.pi, tau - 2.0 * math.pi, tau)
    return tau, ok


def turning_angles(p: Polygon) -> np.ndarray:
    """All turning angles of a polygon (n if closed, n-1 if open)."""
    angles, ok = _batch_turning(p.edges[None], p.closed)
    if not ok[0]:
        raise DegenerateEdgeError("polygon has a near-zero edge")
    return angles[0]


def torsion_angles(p: Polygon) -> np.ndarray:
    """All torsion angles of a spatial polygon (n if closed, n-2 if open)."""
    if p.dim != 3:
        raise InvalidDimensionError("torsion is defined for spatial polygons")
    if (p.n if p.closed else p.n - 2) < 1:
        raise InvalidSizeError("polygon too short for a torsion angle")
    taus, ok = _batch_torsion(p.edges[None], p.closed)
    if not ok[0]:
        raise DegenerateTorsionError("polygon has a degenerate torsion window")
    return taus[0]


def total_curvature(p: Polygon) -> float:
    """Sum of the turning angles."""
    return float(turning_angles(p).sum())


def total_torsion(p: Polygon) -> float:
    """Sum of the torsion angles."""
    return float(torsion_angles(p).sum())


def sliding_window_apply(p: Polygon, f: LocalFunctional) -> List[float]:
    """Evaluate f on every k-edge window (cyclic when the polygon is closed)."""
    k = f.k
    if not 1 <= k <= p.n:
        raise InvalidSizeError(f"window width {k} out of range for n={p.n}")
    edges = p.edges
    if p.closed:
        ext = np.concatenate([edges, edges[: k - 1]], axis=0) if k > 1 else edges
        return [float(f.eval(ext[i:i + k])) for i in range(p.n)]
    return [float(f.eval(edges[i:i + k])) for i in range(p.n - k + 1)]
