"""Geometric diagnostics: self-intersections, z-axis crossings, degeneracy.

The closed-form witnesses encode the two explicit interior self-intersection
families of the wide strip (half-width above 2) plus the edge identification
(0, v) ~ (2 pi, -v); the numerical finder confirms them by an all-pairs grid
scan refined with damped Gauss-Newton.
"""

import math
from dataclasses import dataclass

import numpy as np

from .catalog import moebius, spanning_surface
from .errors import ParameterError
from .geometry import DEGENERACY_EPS, cross3

__all__ = [
    "IntersectionWitness",
    "OrientabilityReport",
    "witness_distance",
    "closed_form_witness",
    "find_self_intersections",
    "z_axis_intersections",
    "orientability_probe",
    "Z_AXIS_SEEDS",
]

#: Seed grid (along u, along t) for the z-axis crossing search.
Z_AXIS_SEEDS = (48, 24)

_SEPARATION_FACTOR = 0.05
_MAX_CANDIDATES = 8000
_DEDUP_EPS = 1e-6


@dataclass(frozen=True)
class IntersectionWitness:
    """Pair of distinct parameter points with (numerically) equal image.

    ``image`` is the image of ``p1``; ``residual`` is |r(p1) - r(p2)|.
    """

    p1: np.ndarray
    p2: np.ndarray
    image: np.ndarray
    residual: float


def witness_distance(a, b):
    """Parameter-space distance between witnesses, insensitive to pair order."""

    def paired(p, q, r, s):
        return max(
            float(np.linalg.norm(p - q)),
            float(np.linalg.norm(r - s)),
        )

    return min(
        paired(a.p1, b.p1, a.p2, b.p2),
        paired(a.p1, b.p2, a.p2, b.p1),
    )


def closed_form_witness(delta, u, branch):
    """Closed-form self-intersection witness of the strip.

    ``branch`` selects the family: "-" pairs (u, -2 cos(u/2)/cos u) with
    (u + pi, -2 sin(u/2)/cos u), image (-1, -tan u, -tan u); "+" is the
    mirrored family with image (-1, tan u, tan u); both need delta > 2 and u
    small enough that the v values fit inside the strip. Branch "edge" reads
    the second argument as v and pairs (0, v) with (2 pi, -v), image
    (1 + v, 0, 0), valid for any delta > 0.
    """
    delta = float(delta)
    u = float(u)
    surface, _ = moebius(delta)

    if branch == "edge":
        v = u
        if abs(v) > delta:
            raise ParameterError(f"edge witness needs |v| <= delta, got v = {v:g}, delta = {delta:g}")
        p1 = np.array([0.0, v])
        p2 = np.array([2.0 * np.pi, -v])
    elif branch in ("+", "-"):
        if delta <= 2.0:
            raise ParameterError(
                f"interior witnesses exist only for half-width above 2, got delta = {delta:g}"
            )
        if not 0.0 < u < np.pi / 2.0:
            raise ParameterError(f"witness parameter u must lie in (0, pi/2), got {u:g}")
        c, s = math.cos(u / 2.0), math.sin(u / 2.0)
        cu = math.cos(u)
        if branch == "-":
            v1, v2 = -2.0 * c / cu, -2.0 * s / cu
            p1 = np.array([u, v1])
            p2 = np.array([u + np.pi, v2])
        else:
            v1, v2 = 2.0 * c / cu, 2.0 * s / cu
            p1 = np.array([2.0 * np.pi - u, v1])
            p2 = np.array([np.pi - u, v2])
        if max(abs(v1), abs(v2)) > delta:
            raise ParameterError(
                f"u = {u:g} is too large for half-width {delta:g}: |v| = {max(abs(v1), abs(v2)):g}"
            )
    else:
        raise ParameterError(f"branch must be '+', '-' or 'edge', got {branch!r}")

    im1 = surface.eval(p1[0], p1[1])
    im2 = surface.eval(p2[0], p2[1])
    residual = float(np.linalg.norm(im1 - im2))
    return IntersectionWitness(p1=p1, p2=p2, image=im1, residual=residual)


def _sample_grid(region, grid, include_boundary):
    a, b = region.outer_interval()
    if include_boundary:
        outer = np.linspace(a, b, grid)
        frac = np.linspace(0.0, 1.0, grid)
    else:
        outer = a + (b - a) * (np.arange(grid) + 0.5) / grid
        frac = (np.arange(grid) + 0.5) / grid
    lo, hi = region.inner_bounds(outer)
    inner = np.asarray(lo, dtype=float)[:, None] + (
        np.asarray(hi, dtype=float) - np.asarray(lo, dtype=float)
    )[:, None] * frac[None, :]
    outer2 = np.broadcast_to(outer[:, None], inner.shape)
    u, v = region.assemble_uv(outer2, inner)
    return np.stack([np.ravel(u), np.ravel(v)])


def _interior_mask(region, u, v, grid):
    """Points farther than half a grid cell from the region boundary."""
    a, b = region.outer_interval()
    outer, inner = (u, v) if region.assemble_uv(0.0, 1.0) == (0.0, 1.0) else (v, u)
    margin_outer = (b - a) / (2.0 * grid)
    lo, hi = region.inner_bounds(np.clip(outer, a, b))
    margin_inner = (np.asarray(hi, dtype=float) - np.asarray(lo, dtype=float)) / (2.0 * grid)
    return (
        (outer >= a + margin_outer)
        & (outer <= b - margin_outer)
        & (inner >= lo + margin_inner)
        & (inner <= hi - margin_inner)
    )


def _candidate_pairs(points, images, grid, eps_sep, capture):
    n = points.shape[1]
    cap2 = capture * capture
    sep2 = eps_sep * eps_sep
    rows, cols, dist2 = [], [], []
    block = 512
    for start in range(0, n, block):
        stop = min(start + block, n)
        d2 = ((images[:, start:stop, None] - images[:, None, :]) ** 2).sum(axis=0)
        p2 = ((points[:, start:stop, None] - points[:, None, :]) ** 2).sum(axis=0)
        upper = np.arange(start, stop)[:, None] < np.arange(n)[None, :]
        mask = (d2 <= cap2) & (p2 >= sep2) & upper
        i_loc, j_loc = np.nonzero(mask)
        rows.append(i_loc + start)
        cols.append(j_loc)
        dist2.append(d2[i_loc, j_loc])
    rows = np.concatenate(rows) if rows else np.empty(0, dtype=int)
    cols = np.concatenate(cols) if cols else np.empty(0, dtype=int)
    dist2 = np.concatenate(dist2) if dist2 else np.empty(0)
    if rows.size > _MAX_CANDIDATES:
        keep = np.argsort(dist2)[:_MAX_CANDIDATES]
        rows, cols = rows[keep], cols[keep]
    return rows, cols


def _refine_pairs(surface, region, pairs, eps_sep, tol, iterations=50):
    """Damped Gauss-Newton on |r(p1) - r(p2)|, all candidates in lockstep."""
    state = pairs.copy()
    lam = np.ones(state.shape[0])
    im1 = surface.eval(state[:, 0], state[:, 1])
    im2 = surface.eval(state[:, 2], state[:, 3])
    res = np.linalg.norm(im1 - im2, axis=0)
    for _ in range(iterations):
        ru1, rv1 = surface.partials_at(state[:, 0], state[:, 1])
        ru2, rv2 = surface.partials_at(state[:, 2], state[:, 3])
        jac = np.moveaxis(np.stack([ru1, rv1, -ru2, -rv2], axis=-1), 1, 0)
        step = -np.einsum("mij,jm->mi", np.linalg.pinv(jac), im1 - im2)
        trial = state + lam[:, None] * step
        cu1, cv1 = region.clamp(trial[:, 0], trial[:, 1])
        cu2, cv2 = region.clamp(trial[:, 2], trial[:, 3])
        trial = np.stack([cu1, cv1, cu2, cv2], axis=1)
        t1 = surface.eval(trial[:, 0], trial[:, 1])
        t2 = surface.eval(trial[:, 2], trial[:, 3])
        new_res = np.linalg.norm(t1 - t2, axis=0)
        accept = new_res <= res
        state = np.where(accept[:, None], trial, state)
        im1 = np.where(accept[None, :], t1, im1)
        im2 = np.where(accept[None, :], t2, im2)
        res = np.where(accept, new_res, res)
        lam = np.where(accept, np.minimum(1.0, 2.0 * lam), 0.5 * lam)
        if res.max() < 1e-14:
            break
    sep = np.hypot(state[:, 0] - state[:, 2], state[:, 1] - state[:, 3])
    good = (res <= tol) & (sep >= eps_sep)
    return state[good], res[good]


def find_self_intersections(surface, region, grid=64, tol=1e-6, include_boundary=True):
    """Scan a parameter grid for self-intersection witnesses.

    All grid pairs separated by at least 0.05 x diam(region) in parameter
    space and close in image space are refined by damped Gauss-Newton; refined
    pairs with residual at most ``tol`` are kept, deduplicated, and returned
    sorted by parameter coordinates. With ``include_boundary`` false the grid
    avoids the region boundary and witnesses touching it are dropped, so only
    strictly interior intersections are reported. An empty list is a valid
    result.
    """
    if grid < 8:
        raise ParameterError(f"scan grid must be at least 8, got {grid}")
    points = _sample_grid(region, grid, include_boundary)
    images = surface.eval(points[0], points[1])

    stacked = images.reshape(3, grid, grid)
    step_u = np.linalg.norm(np.diff(stacked, axis=1), axis=0).max()
    step_v = np.linalg.norm(np.diff(stacked, axis=2), axis=0).max()
    capture = 1.5 * max(step_u, step_v)
    eps_sep = _SEPARATION_FACTOR * region.diameter()

    rows, cols = _candidate_pairs(points, images, grid, eps_sep, capture)
    if rows.size == 0:
        return []
    pairs = np.concatenate([points[:, rows].T, points[:, cols].T], axis=1)
    refined, residuals = _refine_pairs(surface, region, pairs, eps_sep, tol)
    if refined.shape[0] == 0:
        return []

    if not include_boundary:
        ok = (
            _interior_mask(region, refined[:, 0], refined[:, 1], grid)
            & _interior_mask(region, refined[:, 2], refined[:, 3], grid)
        )
        refined, residuals = refined[ok], residuals[ok]
        if refined.shape[0] == 0:
            return []

    swap = (refined[:, 0] > refined[:, 2]) | (
        (refined[:, 0] == refined[:, 2]) & (refined[:, 1] > refined[:, 3])
    )
    refined[swap] = refined[swap][:, [2, 3, 0, 1]]

    order = np.lexsort((refined[:, 3], refined[:, 2], refined[:, 1], refined[:, 0]))
    refined, residuals = refined[order], residuals[order]

    kept_rows = []
    kept_res = []
    for row, res in zip(refined, residuals):
        if kept_rows:
            gap = np.abs(np.asarray(kept_rows) - row).max(axis=1).min()
            if gap < _DEDUP_EPS:
                continue
        kept_rows.append(row)
        kept_res.append(res)

    witnesses = []
    for row, res in zip(kept_rows, kept_res):
        p1 = np.array(row[:2])
        p2 = np.array(row[2:])
        witnesses.append(
            IntersectionWitness(
                p1=p1, p2=p2, image=surface.eval(p1[0], p1[1]), residual=float(res)
            )
        )
    return witnesses


def z_axis_intersections(delta, tol=1e-9):
    """Image points where the chord surface meets the z axis.

    Solves x(u, t) = y(u, t) = 0 over the chord-surface rectangle by damped
    Newton iteration seeded on a coarse grid, deduplicates the converged
    images with radius 1e-4, and returns them sorted by z.
    """
    delta = float(delta)
    if not 0.0 < delta < 1.0:
        raise ParameterError(
            f"z-axis crossing search requires 0 < delta < 1, got {delta:g}"
        )
    surface, region = spanning_surface(delta)

    nu, nt = Z_AXIS_SEEDS
    us = -np.pi + 2.0 * np.pi * (np.arange(nu) + 0.5) / nu
    ts = (np.arange(nt) + 0.5) / nt
    uu, tt = np.meshgrid(us, ts, indexing="ij")
    u = uu.ravel().copy()
    t = tt.ravel().copy()
    lam = np.ones(u.size)

    xyz = surface.eval(u, t)
    res = np.hypot(xyz[0], xyz[1])
    for _ in range(40):
        ru, rt = surface.partials_at(u, t)
        jac = np.moveaxis(np.stack([ru[:2], rt[:2]], axis=-1), 1, 0)
        fvec = xyz[:2]
        step = -np.einsum("mij,jm->mi", np.linalg.pinv(jac), fvec)
        nu_trial, nt_trial = region.clamp(u + lam * step[:, 0], t + lam * step[:, 1])
        trial_xyz = surface.eval(nu_trial, nt_trial)
        trial_res = np.hypot(trial_xyz[0], trial_xyz[1])
        accept = trial_res <= res
        u = np.where(accept, nu_trial, u)
        t = np.where(accept, nt_trial, t)
        xyz = np.where(accept[None, :], trial_xyz, xyz)
        res = np.where(accept, trial_res, res)
        lam = np.where(accept, np.minimum(1.0, 2.0 * lam), 0.5 * lam)
        if res.min() < 1e-15 and res[res <= tol].size and res.max() < np.inf:
            pass
    good = res <= tol
    hits = xyz[:, good]
    order = np.argsort(hits[2])
    hits = hits[:, order]

    points = []
    for k in range(hits.shape[1]):
        candidate = hits[:, k]
        if points and min(np.linalg.norm(candidate - q) for q in points) < 1e-4:
            continue
        points.append(candidate.copy())
    return points


@dataclass(frozen=True)
class OrientabilityReport:
    """Normal-degeneracy probe result over a sampled parameter grid."""

    degenerate_points: list
    min_interior_norm: float


def orientability_probe(surface, region, grid=64, include_edges=False):
    """Probe |r_u x r_v| on an interior grid; report degeneracies.

    A nonvanishing normal on the sampled chart is necessary for defining a
    unit normal field there; the probe does not decide global orientability.
    With ``include_edges`` the region boundary is sampled as well and any edge
    degeneracies join the report (the interior minimum is unaffected).
    """
    if grid < 8:
        raise ParameterError(f"probe grid must be at least 8, got {grid}")
    points = _sample_grid(region, grid, include_boundary=False)
    ru, rv = surface.partials_at(points[0], points[1])
    norms = np.linalg.norm(cross3(ru, rv), axis=0)
    degenerate = [points[:, k].copy() for k in np.nonzero(norms <= DEGENERACY_EPS)[0]]
    min_interior = float(norms.min())

    if include_edges:
        ts = np.linspace(0.0, 1.0, grid + 1)
        for seg in region.boundary_path().segments:
            pts = seg.point(ts)
            eru, erv = surface.partials_at(pts[0], pts[1])
            enorms = np.linalg.norm(cross3(eru, erv), axis=0)
            for k in np.nonzero(enorms <= DEGENERACY_EPS)[0]:
                degenerate.append(pts[:, k].copy())

    return OrientabilityReport(degenerate_points=degenerate, min_interior_norm=min_interior)
