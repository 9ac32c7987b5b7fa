"""Green's theorem, the parametric Stokes identities, and side-by-side checks.

Two formulations are implemented over a surface map r and a simple region D:

* the general form: the closed-path integral of G . dr over the image of the
  boundary of D equals the region integral of G_u . r_v - G_v . r_u, for any
  C1 field G on parameter space;
* the curl form: with G = F o r for an image-space field F, the same path
  integral equals the region integral of (curl F) . (r_u x r_v).

Path integrals over image curves are always understood through the pullback
P = G . r_u, Q = G . r_v, so self-intersecting image curves need no special
treatment.
"""

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import FieldDomainError, StokesCheckError
from .geometry import cross3, dot3, fd_step, boundary_path
from .quadrature import DEFAULT_SPEC, IntegralResult, integrate_2d, integrate_path

__all__ = [
    "VectorField3",
    "VectorField2to3",
    "PullbackOneForm",
    "VerificationReport",
    "pullback",
    "compose_field",
    "curl",
    "greens_lhs",
    "greens_rhs",
    "stokes_general_lhs",
    "stokes_general_rhs",
    "stokes_curl_rhs",
    "integrand_identity_gap",
    "verify_general",
    "verify_curl_form",
    "verify_green",
]

#: Default verification tolerances: analytic derivative data vs FD fallback.
TOL_ANALYTIC = 1e-8
TOL_FINITE_DIFF = 1e-6


def _first_bad(ok, x, y, z):
    bad = ~np.asarray(ok, dtype=bool)
    flat = int(np.argmax(bad))
    idx = np.unravel_index(flat, bad.shape) if bad.shape else ()
    pick = lambda c: float(np.broadcast_to(np.asarray(c, dtype=float), bad.shape)[idx])
    return pick(x), pick(y), pick(z)


@dataclass(frozen=True)
class VectorField3:
    """Vector field on image space, F: R^3 -> R^3.

    ``fn(x, y, z)`` broadcasts and returns shape (3,) + broadcast shape.
    ``jacobian``, when given, returns the analytic derivative matrix with
    shape (3, 3) + broadcast shape (rows index the field component, columns
    the differentiation coordinate). ``curl_analytic`` returns the analytic
    curl. ``guard`` is a predicate marking where the field is defined;
    evaluating where it fails raises FieldDomainError.
    """

    fn: Callable
    jacobian: Callable | None = None
    curl_analytic: Callable | None = None
    guard: Callable | None = None
    name: str = "field"

    def check_guard(self, x, y, z):
        if self.guard is None:
            return
        ok = np.asarray(self.guard(x, y, z))
        if not np.all(ok):
            px, py, pz = _first_bad(ok, x, y, z)
            raise FieldDomainError(
                f"{self.name}: field undefined at (x, y, z) = ({px:.9g}, {py:.9g}, {pz:.9g})"
            )

    def eval(self, x, y, z):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        z = np.asarray(z, dtype=float)
        self.check_guard(x, y, z)
        return np.asarray(self.fn(x, y, z), dtype=float)

    def jacobian_at(self, x, y, z):
        """Derivative matrix, analytic when supplied, else central differences."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        z = np.asarray(z, dtype=float)
        if self.jacobian is not None:
            self.check_guard(x, y, z)
            return np.asarray(self.jacobian(x, y, z), dtype=float)
        h = fd_step(x, y, z)
        cols = [
            (self.eval(x + h, y, z) - self.eval(x - h, y, z)) / (2.0 * h),
            (self.eval(x, y + h, z) - self.eval(x, y - h, z)) / (2.0 * h),
            (self.eval(x, y, z + h) - self.eval(x, y, z - h)) / (2.0 * h),
        ]
        return np.stack(cols, axis=1)

    def curl_at(self, x, y, z):
        """Curl of the field, analytic when supplied, else via the FD Jacobian."""
        if self.curl_analytic is not None:
            x = np.asarray(x, dtype=float)
            y = np.asarray(y, dtype=float)
            z = np.asarray(z, dtype=float)
            self.check_guard(x, y, z)
            return np.asarray(self.curl_analytic(x, y, z), dtype=float)
        jac = self.jacobian_at(x, y, z)
        return np.stack(
            [
                jac[2, 1] - jac[1, 2],
                jac[0, 2] - jac[2, 0],
                jac[1, 0] - jac[0, 1],
            ]
        )


@dataclass(frozen=True)
class VectorField2to3:
    """Vector field on parameter space, G: R^2 -> R^3.

    ``partials``, when given, is the analytic pair (G_u, G_v); otherwise
    partials fall back to central differences through ``eval``.
    """

    fn: Callable
    partials: tuple | None = None
    name: str = "field"

    def eval(self, u, v):
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        return np.asarray(self.fn(u, v), dtype=float)

    def partials_at(self, u, v):
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        if self.partials is not None:
            g_u, g_v = self.partials
            return (
                np.asarray(g_u(u, v), dtype=float),
                np.asarray(g_v(u, v), dtype=float),
            )
        h = fd_step(u, v)
        gu = (self.eval(u + h, v) - self.eval(u - h, v)) / (2.0 * h)
        gv = (self.eval(u, v + h) - self.eval(u, v - h)) / (2.0 * h)
        return gu, gv

    @property
    def has_analytic_partials(self):
        return self.partials is not None


@dataclass(frozen=True)
class PullbackOneForm:
    """One-form P du + Q dv on parameter space.

    ``P_v`` and ``Q_u``, when given, are the analytic partials used by the
    region side of Green's theorem; otherwise central differences are used.
    """

    P: Callable
    Q: Callable
    P_v: Callable | None = None
    Q_u: Callable | None = None


@dataclass(frozen=True)
class VerificationReport:
    """Side-by-side comparison of one identity, with a pass/fail verdict.

    ``passed`` is exactly ``abs_diff <= tolerance``. When an underlying
    domain, guard, or evaluation error prevented computing a side, ``error``
    carries the message, the sides are None, and the report fails.
    """

    scenario_name: str
    lhs: IntegralResult | None
    rhs: IntegralResult | None
    abs_diff: float
    tolerance: float
    passed: bool
    parameters: dict = field(default_factory=dict)
    error: str | None = None


def pullback(g, surface):
    """Pull a parameter-space field back to the one-form (G . r_u, G . r_v)."""

    def p_component(u, v):
        ru, _ = surface.partials_at(u, v)
        return dot3(g.eval(u, v), ru)

    def q_component(u, v):
        _, rv = surface.partials_at(u, v)
        return dot3(g.eval(u, v), rv)

    return PullbackOneForm(P=p_component, Q=q_component)


def compose_field(f, surface):
    """Compose an image-space field with a surface map: G = F o r.

    Analytic partials are built by the chain rule when both the field Jacobian
    and the surface partials are analytic; otherwise the result falls back to
    finite differences. Guard violations surface as FieldDomainError naming
    the offending image point.
    """

    def fn(u, v):
        x, y, z = surface.eval(u, v)
        return f.eval(x, y, z)

    partials_pair = None
    if f.jacobian is not None and surface.partials is not None:

        def g_u(u, v):
            x, y, z = surface.eval(u, v)
            jac = f.jacobian_at(x, y, z)
            ru, _ = surface.partials_at(u, v)
            return np.einsum("ij...,j...->i...", jac, ru)

        def g_v(u, v):
            x, y, z = surface.eval(u, v)
            jac = f.jacobian_at(x, y, z)
            _, rv = surface.partials_at(u, v)
            return np.einsum("ij...,j...->i...", jac, rv)

        partials_pair = (g_u, g_v)

    return VectorField2to3(fn, partials=partials_pair, name=f"{f.name} o {surface.name}")


def curl(f, point):
    """Curl of an image-space field at a single point; returns shape (3,)."""
    p = np.asarray(point, dtype=float).reshape(-1)
    if p.shape != (3,):
        raise ValueError(f"expected an image-space point (x, y, z), got shape {p.shape}")
    return f.curl_at(p[0], p[1], p[2])


def greens_lhs(form, region, spec=DEFAULT_SPEC):
    """Boundary side of Green's theorem: closed-path integral of P du + Q dv."""
    return integrate_path(form, boundary_path(region), spec)


def greens_rhs(form, region, spec=DEFAULT_SPEC):
    """Region side of Green's theorem: integral of Q_u - P_v over the region."""
    if form.Q_u is not None:
        q_u = form.Q_u
    else:
        def q_u(u, v):
            h = fd_step(u, v)
            return (form.Q(u + h, v) - form.Q(u - h, v)) / (2.0 * h)
    if form.P_v is not None:
        p_v = form.P_v
    else:
        def p_v(u, v):
            h = fd_step(u, v)
            return (form.P(u, v + h) - form.P(u, v - h)) / (2.0 * h)

    return integrate_2d(lambda u, v: q_u(u, v) - p_v(u, v), region, spec)


def stokes_general_lhs(g, surface, region, spec=DEFAULT_SPEC):
    """Path side of the general form: pullback integral over the region boundary."""
    return integrate_path(pullback(g, surface), boundary_path(region), spec)


def stokes_general_rhs(g, surface, region, spec=DEFAULT_SPEC):
    """Region side of the general form: integral of G_u . r_v - G_v . r_u."""

    def integrand(u, v):
        gu, gv = g.partials_at(u, v)
        ru, rv = surface.partials_at(u, v)
        return dot3(gu, rv) - dot3(gv, ru)

    return integrate_2d(integrand, region, spec)


def stokes_curl_rhs(f, surface, region, spec=DEFAULT_SPEC):
    """Region side of the curl form: integral of (curl F) . (r_u x r_v)."""

    def integrand(u, v):
        x, y, z = surface.eval(u, v)
        w = f.curl_at(x, y, z)
        ru, rv = surface.partials_at(u, v)
        return dot3(w, cross3(ru, rv))

    return integrate_2d(integrand, region, spec)


def integrand_identity_gap(f, surface, p):
    """Pointwise gap between the two region integrands for G = F o r.

    Returns |(G_u . r_v - G_v . r_u) - (curl F) . (r_u x r_v)| at a single
    parameter point. Analytically the two quantities coincide; the gap
    measures only derivative-approximation error.
    """
    p = np.asarray(p, dtype=float).reshape(-1)
    if p.shape != (2,):
        raise ValueError(f"expected a parameter-space point (u, v), got shape {p.shape}")
    u, v = float(p[0]), float(p[1])
    g = compose_field(f, surface)
    gu, gv = g.partials_at(u, v)
    ru, rv = surface.partials_at(u, v)
    general = dot3(gu, rv) - dot3(gv, ru)
    x, y, z = surface.eval(u, v)
    curl_side = dot3(f.curl_at(x, y, z), cross3(ru, rv))
    return float(abs(general - curl_side))


def _report(name, lhs, rhs, tolerance, parameters):
    diff = abs(lhs.value - rhs.value)
    return VerificationReport(
        scenario_name=name,
        lhs=lhs,
        rhs=rhs,
        abs_diff=diff,
        tolerance=tolerance,
        passed=diff <= tolerance,
        parameters=dict(parameters or {}),
    )


def _failed_report(name, tolerance, parameters, exc):
    return VerificationReport(
        scenario_name=name,
        lhs=None,
        rhs=None,
        abs_diff=float("inf"),
        tolerance=tolerance,
        passed=False,
        parameters=dict(parameters or {}),
        error=str(exc),
    )


def verify_general(g, surface, region, spec=DEFAULT_SPEC, tolerance=None, *,
                   name="general-form", parameters=None):
    """Check the general form; underlying errors yield a failed report."""
    if tolerance is None:
        analytic = g.has_analytic_partials and surface.partials is not None
        tolerance = TOL_ANALYTIC if analytic else TOL_FINITE_DIFF
    try:
        lhs = stokes_general_lhs(g, surface, region, spec)
        rhs = stokes_general_rhs(g, surface, region, spec)
    except StokesCheckError as exc:
        return _failed_report(name, tolerance, parameters, exc)
    return _report(name, lhs, rhs, tolerance, parameters)


def verify_curl_form(f, surface, region, spec=DEFAULT_SPEC, tolerance=None, *,
                     name="curl-form", parameters=None):
    """Check the curl form with the path side understood through G = F o r."""
    if tolerance is None:
        analytic = (
            f.jacobian is not None
            and f.curl_analytic is not None
            and surface.partials is not None
        )
        tolerance = TOL_ANALYTIC if analytic else TOL_FINITE_DIFF
    try:
        g = compose_field(f, surface)
        lhs = stokes_general_lhs(g, surface, region, spec)
        rhs = stokes_curl_rhs(f, surface, region, spec)
    except StokesCheckError as exc:
        return _failed_report(name, tolerance, parameters, exc)
    return _report(name, lhs, rhs, tolerance, parameters)


def verify_green(form, region, spec=DEFAULT_SPEC, tolerance=None, *,
                 name="green", parameters=None):
    """Check Green's theorem for a one-form over a simple region."""
    if tolerance is None:
        analytic = form.P_v is not None and form.Q_u is not None
        tolerance = TOL_ANALYTIC if analytic else TOL_FINITE_DIFF
    try:
        lhs = greens_lhs(form, region, spec)
        rhs = greens_rhs(form, region, spec)
    except StokesCheckError as exc:
        return _failed_report(name, tolerance, parameters, exc)
    return _report(name, lhs, rhs, tolerance, parameters)
