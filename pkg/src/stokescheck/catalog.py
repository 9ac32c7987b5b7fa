"""Named scenarios around the twisted strip, its boundary curve, and companions.

The strip of radius 1 and half-width delta is the image of the rectangle
[0, 2 pi] x [-delta, delta] under

    r(u, v) = ((1 + v cos(u/2)) cos u, (1 + v cos(u/2)) sin u, v sin(u/2)).

Its boundary is a single closed space curve traced by u -> r(u, delta) over
[0, 4 pi] (the trigonometric arguments are 4 pi periodic in u). The chord
surface spans that same boundary with an orientable sheet: over
[-pi, pi] x [0, 1] it linearly connects r(u, delta) to r(2 pi - u, delta).

Every scenario in the registry produces a VerificationReport; names are
stable identifiers consumed by the command-line front end.
"""

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ParameterError, StokesCheckError
from .geometry import ParamSurface, Rectangle, TypeIRegion, dot3
from .quadrature import DEFAULT_SPEC, IntegralResult, integrate_1d
from .stokes import (
    PullbackOneForm,
    VectorField2to3,
    VectorField3,
    VerificationReport,
    compose_field,
    verify_curl_form,
    verify_general,
    verify_green,
)

__all__ = [
    "DEFAULT_DELTA",
    "moebius",
    "singular_field",
    "SpaceCurve",
    "boundary_curve_B",
    "line_integral_over_B",
    "spanning_surface",
    "u_squared_field",
    "linear_field",
    "moebius_u2_value",
    "spanning_linear_value",
    "Scenario",
    "SCENARIOS",
    "scenario_names",
    "get_scenario",
    "run_scenario",
    "run_all",
]

#: Half-width used by the reference figure and by default scenario runs.
DEFAULT_DELTA = 0.3


def _strip_xyz(u, v):
    u, v = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
    c = np.cos(u / 2.0)
    rho = 1.0 + v * c
    return np.stack([rho * np.cos(u), rho * np.sin(u), v * np.sin(u / 2.0)])


def _strip_ru(u, v):
    u, v = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
    c = np.cos(u / 2.0)
    s = np.sin(u / 2.0)
    rho = 1.0 + v * c
    return np.stack(
        [
            -(v * s / 2.0) * np.cos(u) - rho * np.sin(u),
            -(v * s / 2.0) * np.sin(u) + rho * np.cos(u),
            v * c / 2.0,
        ]
    )


def _strip_rv(u, v):
    u, v = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
    c = np.cos(u / 2.0)
    return np.stack([c * np.cos(u), c * np.sin(u), np.sin(u / 2.0)])


def moebius(delta):
    """Twisted strip of half-width delta with its parameter rectangle.

    Returns the surface (with analytic partials) and the region
    [0, 2 pi] x [-delta, delta].
    """
    delta = float(delta)
    if not delta > 0.0:
        raise ParameterError(f"strip half-width must be positive, got {delta:g}")
    region = Rectangle(0.0, 2.0 * np.pi, -delta, delta)
    surface = ParamSurface(
        _strip_xyz,
        partials=(_strip_ru, _strip_rv),
        domain=region,
        name=f"moebius(delta={delta:g})",
    )
    return surface, region


def singular_field():
    """Unit-circulation field (-y, x, 0) / (x^2 + y^2), undefined on the z axis.

    Carries an analytic Jacobian and an identically zero analytic curl on its
    guard set x^2 + y^2 > 0.
    """

    def fn(x, y, z):
        x, y, z = np.broadcast_arrays(
            np.asarray(x, dtype=float), np.asarray(y, dtype=float), np.asarray(z, dtype=float)
        )
        rr = x * x + y * y
        return np.stack([-y / rr, x / rr, np.zeros_like(z)])

    def jac(x, y, z):
        x, y, z = np.broadcast_arrays(
            np.asarray(x, dtype=float), np.asarray(y, dtype=float), np.asarray(z, dtype=float)
        )
        rr = x * x + y * y
        rr2 = rr * rr
        zero = np.zeros_like(x)
        row0 = np.stack([2.0 * x * y / rr2, (y * y - x * x) / rr2, zero])
        row1 = np.stack([(y * y - x * x) / rr2, -2.0 * x * y / rr2, zero])
        row2 = np.stack([zero, zero, zero])
        return np.stack([row0, row1, row2])

    def crl(x, y, z):
        shape = np.broadcast(np.asarray(x), np.asarray(y), np.asarray(z)).shape
        return np.zeros((3,) + shape)

    def guard(x, y, z):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return (x * x + y * y) > 0.0

    return VectorField3(fn, jacobian=jac, curl_analytic=crl, guard=guard, name="axis-winding")


@dataclass(frozen=True)
class SpaceCurve:
    """Parametric space curve with analytic velocity over [u_start, u_end]."""

    point: Callable
    velocity: Callable
    u_start: float
    u_end: float


def _b_curve(delta):
    delta = float(delta)
    point = lambda u: _strip_xyz(u, delta)
    velocity = lambda u: _strip_ru(u, delta)
    return SpaceCurve(point=point, velocity=velocity, u_start=0.0, u_end=4.0 * np.pi)


def boundary_curve_B(delta):
    """Boundary curve of the strip, parameterized over [0, 4 pi].

    Requires 0 < delta < 1 so the curve stays clear of the z axis; the literal
    strip formula extends past u = 2 pi because its trigonometric arguments
    are 4 pi periodic.
    """
    delta = float(delta)
    if not 0.0 < delta < 1.0:
        raise ParameterError(
            f"boundary curve parameter must satisfy 0 < delta < 1, got {delta:g}"
        )
    return _b_curve(delta)


def line_integral_over_B(f, delta, spec=DEFAULT_SPEC):
    """Line integral of an image-space field along the strip boundary.

    Accepts any delta > 0 (the z-axis clearance only matters for fields whose
    guard excludes the axis; violations raise FieldDomainError).
    """
    delta = float(delta)
    if not delta > 0.0:
        raise ParameterError(f"strip half-width must be positive, got {delta:g}")
    curve = _b_curve(delta)

    def integrand(u):
        x, y, z = curve.point(u)
        return dot3(f.eval(x, y, z), curve.velocity(u))

    return integrate_1d(integrand, curve.u_start, curve.u_end, spec)


def spanning_surface(delta):
    """Orientable chord surface spanning the strip boundary.

    Over [-pi, pi] x [0, 1] the map linearly connects r(u, delta) with
    r(2 pi - u, delta); the chord collapses to a point at u = +/- pi.
    Returns the surface (with analytic partials) and its parameter rectangle.
    """
    delta = float(delta)
    if not delta > 0.0:
        raise ParameterError(f"strip half-width must be positive, got {delta:g}")

    def fn(u, t):
        u, t = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(t, dtype=float))
        return (1.0 - t) * _strip_xyz(u, delta) + t * _strip_xyz(2.0 * np.pi - u, delta)

    def fu(u, t):
        u, t = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(t, dtype=float))
        return (1.0 - t) * _strip_ru(u, delta) - t * _strip_ru(2.0 * np.pi - u, delta)

    def ft(u, t):
        u, t = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(t, dtype=float))
        return _strip_xyz(2.0 * np.pi - u, delta) - _strip_xyz(u, delta)

    region = Rectangle(-np.pi, np.pi, 0.0, 1.0)
    surface = ParamSurface(
        fn, partials=(fu, ft), domain=region, name=f"spanning(delta={delta:g})"
    )
    return surface, region


def u_squared_field():
    """Parameter-space field G(u, v) = (u^2, 0, 0) with analytic partials."""

    def fn(u, v):
        u, v = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
        zero = np.zeros_like(u)
        return np.stack([u * u, zero, zero])

    def g_u(u, v):
        u, v = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
        zero = np.zeros_like(u)
        return np.stack([2.0 * u, zero, zero])

    def g_v(u, v):
        shape = np.broadcast(np.asarray(u), np.asarray(v)).shape
        return np.zeros((3,) + shape)

    return VectorField2to3(fn, partials=(g_u, g_v), name="u-squared")


def linear_field(matrix):
    """Linear field F(x, y, z) = A (x, y, z)^T with analytic Jacobian and curl."""
    a = np.asarray(matrix, dtype=float)
    if a.shape != (3, 3):
        raise ParameterError(f"linear field needs a 3x3 matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ParameterError("linear field matrix must be finite")
    w = np.array([a[2, 1] - a[1, 2], a[0, 2] - a[2, 0], a[1, 0] - a[0, 1]])

    def fn(x, y, z):
        xyz = np.stack(
            np.broadcast_arrays(
                np.asarray(x, dtype=float), np.asarray(y, dtype=float), np.asarray(z, dtype=float)
            )
        )
        return np.einsum("ij,j...->i...", a, xyz)

    def jac(x, y, z):
        shape = np.broadcast(np.asarray(x), np.asarray(y), np.asarray(z)).shape
        return np.broadcast_to(a.reshape((3, 3) + (1,) * len(shape)), (3, 3) + shape)

    def crl(x, y, z):
        shape = np.broadcast(np.asarray(x), np.asarray(y), np.asarray(z)).shape
        return np.broadcast_to(w.reshape((3,) + (1,) * len(shape)), (3,) + shape)

    return VectorField3(fn, jacobian=jac, curl_analytic=crl, name="linear")


def moebius_u2_value(delta):
    """Closed form of both sides for G = (u^2, 0, 0) on the strip: -160 delta / 9.

    Oracle: the region integrand is 2 u cos(u/2) cos(u), independent of v;
    expanding cos(u/2) cos(u) into half-angle cosines and integrating
    u cos(k u) by parts over [0, 2 pi] gives -80/9, times the strip width
    2 delta.
    """
    return -160.0 * float(delta) / 9.0


def spanning_linear_value(matrix, delta):
    """Closed form of both sides for a linear field over the chord surface.

    Oracle: exact integrals of the chord-surface normal components over
    [-pi, pi] x [0, 1] are (0, -pi delta^2 / 2, pi (2 + delta^2)); dotting
    with the constant curl gives
    pi (2 + delta^2) (a21 - a12) - (pi delta^2 / 2) (a13 - a31).
    The same value falls out of the boundary side via projected signed areas
    of the doubly winding boundary curve.
    """
    a = np.asarray(matrix, dtype=float)
    d = float(delta)
    return float(
        np.pi * (2.0 + d * d) * (a[1, 0] - a[0, 1])
        - 0.5 * np.pi * d * d * (a[0, 2] - a[2, 0])
    )


# Fixed matrix for the named chord-surface scenario; entries keep both
# antisymmetric components of the closed form active.
SPANNING_MATRIX = np.array(
    [
        [0.0, 1.0, 2.0],
        [-1.0, 0.0, 0.0],
        [0.0, 0.0, 0.0],
    ]
)


@dataclass(frozen=True)
class Scenario:
    """Named, parameterized verification scenario.

    ``expected``, when present, maps delta to the closed-form value both sides
    should take; ``provenance`` says where that value comes from.
    ``fixed_delta`` pins scenarios that ignore the run-time delta. The
    ``runner`` produces the VerificationReport.
    """

    name: str
    tolerance: float
    provenance: str
    runner: Callable
    expected: Callable | None = None
    fixed_delta: float | None = None

    def run(self, delta=DEFAULT_DELTA, spec=None, tolerance=None):
        """Execute the scenario and return its report."""
        resolved = self.fixed_delta if self.fixed_delta is not None else float(delta)
        spec = DEFAULT_SPEC if spec is None else spec
        tol = self.tolerance if tolerance is None else float(tolerance)
        return self.runner(resolved, spec, tol)


def _expected_entry(expected, delta):
    return None if expected is None else float(expected(delta))


def _run_moebius_u2(delta, spec, tol):
    surface, region = moebius(delta)
    return verify_general(
        u_squared_field(),
        surface,
        region,
        spec,
        tol,
        name="moebius-general-u2",
        parameters={"delta": delta, "expected": moebius_u2_value(delta)},
    )


def _run_moebius_singular(delta, spec, tol):
    surface, region = moebius(delta)
    g = compose_field(singular_field(), surface)
    return verify_general(
        g,
        surface,
        region,
        spec,
        tol,
        name="moebius-pullback-singular",
        parameters={"delta": delta, "expected": 0.0},
    )


def _run_boundary_b(delta, spec, tol):
    if not 0.0 < delta < 1.0:
        raise ParameterError(
            f"boundary-B-4pi needs 0 < delta < 1 to keep the curve off the z axis, got {delta:g}"
        )
    params = {"delta": delta, "expected": 4.0 * np.pi}
    rhs = IntegralResult(4.0 * np.pi, 0.0, 1)
    try:
        lhs = line_integral_over_B(singular_field(), delta, spec)
    except StokesCheckError as exc:
        return VerificationReport(
            "boundary-B-4pi", None, None, float("inf"), tol, False, params, error=str(exc)
        )
    diff = abs(lhs.value - rhs.value)
    return VerificationReport("boundary-B-4pi", lhs, rhs, diff, tol, diff <= tol, params)


def _run_spanning_linear(delta, spec, tol):
    surface, region = spanning_surface(delta)
    return verify_curl_form(
        linear_field(SPANNING_MATRIX),
        surface,
        region,
        spec,
        tol,
        name="spanning-linear",
        parameters={
            "delta": delta,
            "expected": spanning_linear_value(SPANNING_MATRIX, delta),
            "matrix": SPANNING_MATRIX.tolist(),
        },
    )


def _run_spanning_zaxis(delta, spec, tol):
    from . import analysis

    points = analysis.z_axis_intersections(delta, tol=tol)
    target = delta / np.sqrt(2.0)
    params = {"delta": delta, "expected": 0.0, "points_found": len(points)}
    seeds = analysis.Z_AXIS_SEEDS[0] * analysis.Z_AXIS_SEEDS[1]
    rhs = IntegralResult(0.0, 0.0, 1)
    if len(points) != 2:
        return VerificationReport(
            "spanning-zaxis",
            None,
            rhs,
            float("inf"),
            tol,
            False,
            params,
            error=f"expected exactly two z-axis crossings, found {len(points)}",
        )
    ordered = sorted(points, key=lambda q: q[2])
    deviation = 0.0
    for point, sign in zip(ordered, (-1.0, 1.0)):
        offset = np.abs(point - np.array([0.0, 0.0, sign * target])).max()
        deviation = max(deviation, float(offset))
    lhs = IntegralResult(deviation, 0.0, seeds)
    return VerificationReport(
        "spanning-zaxis", lhs, rhs, deviation, tol, deviation <= tol, params
    )


def _run_self_intersect(delta, spec, tol):
    from . import analysis

    surface, region = moebius(delta)
    oracle = analysis.closed_form_witness(delta, 0.1, "-")
    found = analysis.find_self_intersections(surface, region, grid=64, tol=1e-6)
    params = {
        "delta": delta,
        "expected": 0.0,
        "witnesses_found": len(found),
        "oracle_residual": oracle.residual,
    }
    rhs = IntegralResult(0.0, 0.0, 1)
    if not found:
        return VerificationReport(
            "self-intersect-delta3",
            None,
            rhs,
            float("inf"),
            tol,
            False,
            params,
            error="no self-intersection witnesses recovered",
        )
    distance = min(analysis.witness_distance(w, oracle) for w in found)
    best = min(found, key=lambda w: analysis.witness_distance(w, oracle))
    params["recovered_residual"] = best.residual
    lhs = IntegralResult(distance, 0.0, 64 * 64)
    return VerificationReport(
        "self-intersect-delta3", lhs, rhs, distance, tol, distance <= tol, params
    )


def _square_form():
    return PullbackOneForm(
        P=lambda u, v: -0.5 * np.asarray(v, dtype=float),
        Q=lambda u, v: 0.5 * np.asarray(u, dtype=float),
        P_v=lambda u, v: np.full(np.broadcast(u, v).shape, -0.5),
        Q_u=lambda u, v: np.full(np.broadcast(u, v).shape, 0.5),
    )


def _run_green_square(delta, spec, tol):
    region = Rectangle(0.0, 1.0, 0.0, 1.0)
    return verify_green(
        _square_form(),
        region,
        spec,
        tol,
        name="green-square",
        parameters={"expected": 1.0},
    )


def _triangle_form():
    return PullbackOneForm(
        P=lambda u, v: np.zeros(np.broadcast(u, v).shape),
        Q=lambda u, v: np.asarray(u, dtype=float) + 0.0 * np.asarray(v, dtype=float),
        P_v=lambda u, v: np.zeros(np.broadcast(u, v).shape),
        Q_u=lambda u, v: np.ones(np.broadcast(u, v).shape),
    )


def _run_green_triangle(delta, spec, tol):
    region = TypeIRegion(
        0.0,
        1.0,
        lambda x: np.zeros_like(np.asarray(x, dtype=float)),
        lambda x: np.asarray(x, dtype=float),
    )
    return verify_green(
        _triangle_form(),
        region,
        spec,
        tol,
        name="green-triangle",
        parameters={"expected": 0.5},
    )


SCENARIOS = (
    Scenario(
        name="moebius-general-u2",
        tolerance=1e-8,
        provenance="closed form -160 delta / 9 by iterated antiderivatives of 2 u cos(u/2) cos(u)",
        runner=_run_moebius_u2,
        expected=moebius_u2_value,
    ),
    Scenario(
        name="moebius-pullback-singular",
        tolerance=1e-8,
        provenance="zero curl on the guard set makes both sides vanish; edge contributions cancel",
        runner=_run_moebius_singular,
        expected=lambda delta: 0.0,
    ),
    Scenario(
        name="boundary-B-4pi",
        tolerance=1e-8,
        provenance="the boundary curve winds twice around the z axis; circulation 2 x 2 pi",
        runner=_run_boundary_b,
        expected=lambda delta: 4.0 * np.pi,
    ),
    Scenario(
        name="spanning-linear",
        tolerance=1e-6,
        provenance="exact integrals of the chord-surface normal components; see spanning_linear_value",
        runner=_run_spanning_linear,
        expected=lambda delta: spanning_linear_value(SPANNING_MATRIX, delta),
    ),
    Scenario(
        name="spanning-zaxis",
        tolerance=1e-9,
        provenance="closed-form crossings (0, 0, +/- delta/sqrt(2)) at u = +/- pi/2, t = (1 + delta sqrt(2)/2)/2",
        runner=_run_spanning_zaxis,
        expected=lambda delta: 0.0,
    ),
    Scenario(
        name="self-intersect-delta3",
        tolerance=0.05,
        provenance="closed-form witness pair at u = 0.1 with image (-1, -tan u, -tan u)",
        runner=_run_self_intersect,
        expected=lambda delta: 0.0,
        fixed_delta=3.0,
    ),
    Scenario(
        name="green-square",
        tolerance=1e-10,
        provenance="area form (-v/2) du + (u/2) dv over the unit square has both sides 1",
        runner=_run_green_square,
        expected=lambda delta: 1.0,
    ),
    Scenario(
        name="green-triangle",
        tolerance=1e-8,
        provenance="Q = u over the triangle under y = x; both sides equal its area 1/2 (midpoint oracle)",
        runner=_run_green_triangle,
        expected=lambda delta: 0.5,
    ),
)

_SCENARIO_INDEX = {scenario.name: scenario for scenario in SCENARIOS}


def scenario_names():
    """Stable scenario identifiers in registry order."""
    return [scenario.name for scenario in SCENARIOS]


def get_scenario(name):
    """Look up a scenario by name; unknown names raise ParameterError."""
    try:
        return _SCENARIO_INDEX[name]
    except KeyError:
        known = ", ".join(scenario_names())
        raise ParameterError(f"unknown scenario {name!r}; known scenarios: {known}") from None


def run_scenario(name, delta=DEFAULT_DELTA, spec=None, tolerance=None):
    """Run one named scenario and return its report."""
    return get_scenario(name).run(delta=delta, spec=spec, tolerance=tolerance)


def run_all(delta=DEFAULT_DELTA, spec=None, tolerance=None):
    """Run every registered scenario in registry order."""
    return [s.run(delta=delta, spec=spec, tolerance=tolerance) for s in SCENARIOS]
