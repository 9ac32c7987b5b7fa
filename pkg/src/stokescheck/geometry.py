"""Parameter-space regions, oriented boundary paths, and parametric surfaces.

Conventions used throughout the package:

* scalar maps and profile functions broadcast over numpy arrays;
* a point in parameter space is a pair ``(u, v)``, an image-space point is a
  triple ``(x, y, z)``;
* vector-valued evaluations stack components along the *leading* axis, so a
  surface map called on arrays of shape ``S`` returns shape ``(3,) + S``.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

#: |r_u x r_v| at or below this value counts as a degenerate normal.
DEGENERACY_EPS = 1e-9

#: Default half-width of the evaluable neighborhood around a surface's region.
DEFAULT_DOMAIN_PADDING = 1e-3

_FD_BASE_STEP = 1e-6
_CLOSURE_TOL = 1e-12

__all__ = [
    "DEGENERACY_EPS",
    "DEFAULT_DOMAIN_PADDING",
    "vec2",
    "vec3",
    "dot3",
    "cross3",
    "fd_step",
    "LineSegment",
    "CurveSegment",
    "BoundaryPath",
    "PlanarRegion",
    "Rectangle",
    "TypeIRegion",
    "TypeIIRegion",
    "ParamSurface",
    "NormalResult",
    "eval_surface",
    "partials",
    "boundary_path",
    "normal_field",
]


def vec2(u, v):
    """Build a finite parameter-space point as a float array of shape (2,)."""
    p = np.array([u, v], dtype=float)
    if not np.all(np.isfinite(p)):
        raise ValueError(f"parameter-space point has non-finite components: {p}")
    return p


def vec3(x, y, z):
    """Build a finite image-space point as a float array of shape (3,)."""
    p = np.array([x, y, z], dtype=float)
    if not np.all(np.isfinite(p)):
        raise ValueError(f"image-space point has non-finite components: {p}")
    return p


def dot3(a, b):
    """Dot product of stacked vectors (leading axis holds the components)."""
    return (np.asarray(a) * np.asarray(b)).sum(axis=0)


def cross3(a, b):
    """Cross product of stacked 3-vectors (leading axis holds the components)."""
    a = np.asarray(a)
    b = np.asarray(b)
    return np.stack(
        [
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ]
    )


def fd_step(*coords):
    """Central-difference step 1e-6 * max(1, |coordinates|), per point."""
    scale = np.maximum.reduce([np.abs(np.asarray(c, dtype=float)) for c in coords])
    return _FD_BASE_STEP * np.maximum(1.0, scale)


def _point2(p):
    p = np.asarray(p, dtype=float).reshape(-1)
    if p.shape != (2,):
        raise ValueError(f"expected a parameter-space point (u, v), got shape {p.shape}")
    if not np.all(np.isfinite(p)):
        raise ValueError(f"parameter-space point has non-finite components: {p}")
    return float(p[0]), float(p[1])


def _first_offending(ok, *coords):
    """Coordinates of the first point where the boolean mask is False."""
    bad = ~np.asarray(ok, dtype=bool)
    flat = int(np.argmax(bad))
    idx = np.unravel_index(flat, bad.shape) if bad.shape else ()
    return tuple(float(np.broadcast_to(np.asarray(c, dtype=float), bad.shape)[idx]) for c in coords)


class LineSegment:
    """Straight segment t in [0, 1] -> start + t * (end - start)."""

    def __init__(self, start, end):
        self.start = np.asarray(start, dtype=float).reshape(2)
        self.end = np.asarray(end, dtype=float).reshape(2)

    def point(self, t):
        t = np.asarray(t, dtype=float)
        head = self.start.reshape((2,) + (1,) * t.ndim)
        return head + np.multiply.outer(self.end - self.start, t)

    def velocity(self, t):
        t = np.asarray(t, dtype=float)
        d = (self.end - self.start).reshape((2,) + (1,) * t.ndim)
        return np.broadcast_to(d, (2,) + t.shape)


class CurveSegment:
    """Curve t in [0, 1] -> fn(t), with analytic or finite-difference velocity.

    ``fn`` must broadcast over arrays of t and return shape ``(2,) + t.shape``.
    """

    _H = 1e-7

    def __init__(self, fn, velocity=None):
        self._fn = fn
        self._velocity = velocity

    def point(self, t):
        t = np.asarray(t, dtype=float)
        return np.asarray(self._fn(t), dtype=float)

    def velocity(self, t):
        t = np.asarray(t, dtype=float)
        if self._velocity is not None:
            return np.asarray(self._velocity(t), dtype=float)
        lo = np.clip(t - self._H, 0.0, 1.0)
        hi = np.clip(t + self._H, 0.0, 1.0)
        return (self.point(hi) - self.point(lo)) / (hi - lo)


class BoundaryPath:
    """Closed, counterclockwise, piecewise-C1 path in parameter space.

    Construction validates the two path invariants: consecutive segments chain
    end-to-start (within ``closure_tol``) and the signed area
    (1/2) * closed-path integral of (u dv - v du) is positive, which pins the
    counterclockwise orientation.
    """

    def __init__(self, segments, closure_tol=_CLOSURE_TOL):
        segments = list(segments)
        if not segments:
            raise ValueError("a boundary path needs at least one segment")
        for here, there in zip(segments, segments[1:] + segments[:1]):
            gap = np.abs(here.point(1.0) - there.point(0.0)).max()
            if gap > closure_tol:
                raise ValueError(
                    f"boundary path is not closed: segment gap {gap:.3e} exceeds {closure_tol:.0e}"
                )
        self.segments = segments
        area = self.signed_area()
        if not area > 0.0:
            raise ValueError(
                f"boundary path must be counterclockwise (signed area {area:.3e} is not positive)"
            )

    def signed_area(self):
        """Signed area (1/2) * closed-path integral of (u dv - v du)."""
        nodes, weights = np.polynomial.legendre.leggauss(16)
        total = 0.0
        for seg in self.segments:
            for k in range(8):
                t = (k + (nodes + 1.0) / 2.0) / 8.0
                w = weights / 16.0
                p = seg.point(t)
                d = seg.velocity(t)
                total += 0.5 * float(w @ (p[0] * d[1] - p[1] * d[0]))
        return total

    def start_point(self):
        return self.segments[0].point(0.0)


class PlanarRegion:
    """Simple planar region; subclasses fix the bounding data.

    Subclasses provide the iterated-integration layout (an outer interval, the
    inner bounds per outer value, and the mapping back to (u, v) coordinates),
    plus membership tests and the positively oriented boundary path.
    """

    kind = "abstract"

    def boundary_path(self):
        raise NotImplementedError

    def contains(self, u, v, pad=0.0):
        raise NotImplementedError

    def outer_interval(self):
        raise NotImplementedError

    def inner_bounds(self, outer):
        raise NotImplementedError

    def assemble_uv(self, outer, inner):
        raise NotImplementedError

    def clamp(self, u, v):
        raise NotImplementedError

    def diameter(self):
        raise NotImplementedError


class Rectangle(PlanarRegion):
    """Axis-aligned rectangle [a, b] x [c, d]."""

    kind = "rectangle"

    def __init__(self, a, b, c, d):
        a, b, c, d = (float(t) for t in (a, b, c, d))
        if not all(math.isfinite(t) for t in (a, b, c, d)):
            raise ValueError("rectangle bounds must be finite")
        if not (a < b and c < d):
            raise ValueError(f"rectangle needs a < b and c < d, got [{a}, {b}] x [{c}, {d}]")
        self.a, self.b, self.c, self.d = a, b, c, d

    def __repr__(self):
        return f"Rectangle({self.a:g}, {self.b:g}, {self.c:g}, {self.d:g})"

    def boundary_path(self):
        a, b, c, d = self.a, self.b, self.c, self.d
        return BoundaryPath(
            [
                LineSegment((a, c), (b, c)),
                LineSegment((b, c), (b, d)),
                LineSegment((b, d), (a, d)),
                LineSegment((a, d), (a, c)),
            ]
        )

    def contains(self, u, v, pad=0.0):
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        return (
            (u >= self.a - pad)
            & (u <= self.b + pad)
            & (v >= self.c - pad)
            & (v <= self.d + pad)
        )

    def outer_interval(self):
        return self.a, self.b

    def inner_bounds(self, outer):
        outer = np.asarray(outer, dtype=float)
        return np.full_like(outer, self.c), np.full_like(outer, self.d)

    def assemble_uv(self, outer, inner):
        return outer, inner

    def clamp(self, u, v):
        return np.clip(u, self.a, self.b), np.clip(v, self.c, self.d)

    def diameter(self):
        return math.hypot(self.b - self.a, self.d - self.c)


class _ProfileRegion(PlanarRegion):
    """Shared machinery for the two profile-bounded region kinds."""

    _SAMPLES = 257

    def __init__(self, a, b, g1, g2):
        a, b = float(a), float(b)
        if not (math.isfinite(a) and math.isfinite(b) and a < b):
            raise ValueError(f"profile region needs finite a < b, got [{a}, {b}]")
        self.a, self.b = a, b
        self.g1, self.g2 = g1, g2
        ts = np.linspace(a, b, self._SAMPLES)
        lo = np.asarray(g1(ts), dtype=float)
        hi = np.asarray(g2(ts), dtype=float)
        if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
            raise ValueError("profile functions must be finite on [a, b]")
        if np.any(hi - lo < -1e-12):
            t_bad = float(ts[np.argmin(hi - lo)])
            raise ValueError(f"profile ordering g1 <= g2 violated near t = {t_bad:g}")
        if not np.mean(hi - lo) > 0.0:
            raise ValueError("profile region has zero area")
        self._lo_min = float(lo.min())
        self._hi_max = float(hi.max())

    def outer_interval(self):
        return self.a, self.b

    def inner_bounds(self, outer):
        outer = np.asarray(outer, dtype=float)
        return (
            np.asarray(self.g1(outer), dtype=float),
            np.asarray(self.g2(outer), dtype=float),
        )

    def diameter(self):
        return math.hypot(self.b - self.a, self._hi_max - self._lo_min)

    def _inside(self, outer, inner, pad):
        outer = np.asarray(outer, dtype=float)
        inner = np.asarray(inner, dtype=float)
        pinned = np.clip(outer, self.a, self.b)
        lo, hi = self.inner_bounds(pinned)
        return (
            (outer >= self.a - pad)
            & (outer <= self.b + pad)
            & (inner >= lo - pad)
            & (inner <= hi + pad)
        )

    def _clamp_axes(self, outer, inner):
        outer = np.clip(outer, self.a, self.b)
        lo, hi = self.inner_bounds(outer)
        return outer, np.clip(inner, lo, hi)


class TypeIRegion(_ProfileRegion):
    """Region {(u, v): a <= u <= b, g1(u) <= v <= g2(u)}."""

    kind = "type-I"

    def boundary_path(self):
        a, b, g1, g2 = self.a, self.b, self.g1, self.g2
        width = b - a

        def bottom(t):
            x = a + width * np.asarray(t, dtype=float)
            return np.stack([x, np.asarray(g1(x), dtype=float)])

        def top(t):
            x = b - width * np.asarray(t, dtype=float)
            return np.stack([x, np.asarray(g2(x), dtype=float)])

        g1a, g2a = float(g1(a)), float(g2(a))
        g1b, g2b = float(g1(b)), float(g2(b))
        return BoundaryPath(
            [
                CurveSegment(bottom),
                LineSegment((b, g1b), (b, g2b)),
                CurveSegment(top),
                LineSegment((a, g2a), (a, g1a)),
            ]
        )

    def contains(self, u, v, pad=0.0):
        return self._inside(u, v, pad)

    def assemble_uv(self, outer, inner):
        return outer, inner

    def clamp(self, u, v):
        return self._clamp_axes(u, v)


class TypeIIRegion(_ProfileRegion):
    """Region {(u, v): a <= v <= b, g1(v) <= u <= g2(v)}."""

    kind = "type-II"

    def boundary_path(self):
        a, b, g1, g2 = self.a, self.b, self.g1, self.g2
        height = b - a

        def right(t):
            y = a + height * np.asarray(t, dtype=float)
            return np.stack([np.asarray(g2(y), dtype=float), y])

        def left(t):
            y = b - height * np.asarray(t, dtype=float)
            return np.stack([np.asarray(g1(y), dtype=float), y])

        g1a, g2a = float(g1(a)), float(g2(a))
        g1b, g2b = float(g1(b)), float(g2(b))
        return BoundaryPath(
            [
                CurveSegment(right),
                LineSegment((g2b, b), (g1b, b)),
                CurveSegment(left),
                LineSegment((g1a, a), (g2a, a)),
            ]
        )

    def contains(self, u, v, pad=0.0):
        return self._inside(v, u, pad)

    def assemble_uv(self, outer, inner):
        return inner, outer

    def clamp(self, u, v):
        v, u = self._clamp_axes(v, u)
        return u, v


@dataclass(frozen=True)
class NormalResult:
    """Unit normal of a surface at a parameter point, or a degeneracy flag.

    ``unit`` is None exactly when |r_u x r_v| <= DEGENERACY_EPS; ``magnitude``
    always carries |r_u x r_v|.
    """

    unit: np.ndarray | None
    magnitude: float

    @property
    def degenerate(self):
        return self.unit is None


class ParamSurface:
    """Twice continuously differentiable map from a plane neighborhood to R^3.

    Parameters
    ----------
    fn : callable
        The map (u, v) -> (x, y, z). Must broadcast over arrays and return
        shape (3,) + broadcast shape.
    partials : pair of callables, optional
        Analytic first derivatives (r_u, r_v) with the same convention. When
        absent, central finite differences with a scale-aware step are used.
    domain : PlanarRegion, optional
        When given, evaluation is restricted to the domain inflated by
        ``domain_padding``; points outside raise DomainError.
    domain_padding : float
        Half-width of the open neighborhood on which ``fn`` is evaluable.
    """

    def __init__(self, fn, partials=None, domain=None,
                 domain_padding=DEFAULT_DOMAIN_PADDING, name="surface"):
        if not domain_padding > 0.0:
            raise ValueError("domain_padding must be positive")
        if partials is not None:
            r_u, r_v = partials
            partials = (r_u, r_v)
        self.fn = fn
        self.partials = partials
        self.domain = domain
        self.domain_padding = float(domain_padding)
        self.name = name

    def __repr__(self):
        return f"ParamSurface({self.name})"

    def _check_domain(self, u, v):
        if self.domain is None:
            return
        ok = self.domain.contains(u, v, pad=self.domain_padding)
        if not np.all(ok):
            pu, pv = _first_offending(ok, u, v)
            raise DomainError(
                f"{self.name}: evaluation outside the inflated domain at (u, v) = ({pu:.9g}, {pv:.9g})"
            )

    def eval(self, u, v):
        """Evaluate the map; broadcasts, returns shape (3,) + broadcast shape."""
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        self._check_domain(u, v)
        return np.asarray(self.fn(u, v), dtype=float)

    def partials_at(self, u, v):
        """First partial derivatives (r_u, r_v), analytic when available."""
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        if self.partials is not None:
            self._check_domain(u, v)
            r_u, r_v = self.partials
            return (
                np.asarray(r_u(u, v), dtype=float),
                np.asarray(r_v(u, v), dtype=float),
            )
        h = fd_step(u, v)
        ru = (self.eval(u + h, v) - self.eval(u - h, v)) / (2.0 * h)
        rv = (self.eval(u, v + h) - self.eval(u, v - h)) / (2.0 * h)
        return ru, rv

    def normal(self, u, v):
        """Unit normal r_u x r_v / |r_u x r_v| at a single point, or degenerate."""
        ru, rv = self.partials_at(u, v)
        c = cross3(ru, rv)
        mag = float(np.linalg.norm(c))
        if mag <= DEGENERACY_EPS:
            return NormalResult(None, mag)
        return NormalResult(c / mag, mag)


def eval_surface(surface, p):
    """Evaluate a surface map at a single parameter point; returns shape (3,)."""
    u, v = _point2(p)
    return surface.eval(u, v)


def partials(surface, p):
    """Partial derivatives (r_u, r_v) at a single parameter point."""
    u, v = _point2(p)
    return surface.partials_at(u, v)


def boundary_path(region):
    """Positively oriented boundary of a simple region."""
    return region.boundary_path()


def normal_field(surface, p):
    """Unit normal at a single parameter point, with degeneracy flagged."""
    u, v = _point2(p)
    return surface.normal(u, v)
