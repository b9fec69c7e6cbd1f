"""Weierstrass-type function of ``(p')**2 = F_1(p)`` on a genus-1 curve.

Two complementary views of the same ODE:

* numeric: RK4 on the bounded oscillatory real branch between the two lowest
  real roots of ``F_1`` (pole-free for all real y), with energy monitoring;
* exact: curve points and y-jets in the quadratic extension with a formal
  ``w = sqrt(F_1(z0))``, which is all the Darboux identity checks need.

The sign of the derivative at an exact point is the abstract ``w``; callers
verify with both signs since the branch is not fixed by the curve alone.
"""

from dataclasses import dataclass

import numpy as np

from .curves import SpectralCurve
from .errors import AccuracyError, UnsupportedCurveError
from .scalars import Fraction, Jet, QuadExt, is_rational_square, rational

__all__ = [
    "BoundedBranch",
    "CurvePoint",
    "exact_curve_point",
    "exact_wp_jet",
    "wp_init_bounded",
    "wp_integrate",
    "wp_jet_numeric",
    "wp_trajectory",
]

ROOT_RESIDUAL_TOL = 1e-12
ENERGY_DRIFT_TOL = 1e-8


@dataclass(frozen=True)
class CurvePoint:
    """Exact point ``(z0, w)`` with ``w**2 = F_1(z0)`` in the extension field.

    ``branch_point`` flags ``F_1(z0) = 0`` (the extension degenerates: w*w = 0
    without w being a unit); ``square_disc`` flags a discriminant that happens
    to be a rational square, where the a=0-and-b=0 zero test is no longer a
    nonzero certificate.  Neither case is simplified away.
    """

    z0: Fraction
    w: QuadExt
    branch_point: bool
    square_disc: bool


def exact_curve_point(curve, z0, sign=1):
    """Adjoin ``w = sign * sqrt(F_1(z0))`` formally and return the point."""
    z0 = rational(z0)
    disc = curve.eval(z0)
    w = QuadExt(Fraction(0), Fraction(sign), disc)
    return CurvePoint(
        z0=z0,
        w=w,
        branch_point=(disc == 0),
        square_disc=is_rational_square(disc),
    )


def exact_wp_jet(curve, p, order=2, sign=1):
    """Exact y-jet of the Weierstrass-type function at value ``p``.

    Coefficients follow from differentiating the defining ODE:
    ``(p, w, F'(p)/2, F''(p) w / 2)`` with ``w**2 = F(p)``.  All derivatives
    are induced, so the jet satisfies the curve relation and its derivative
    identically in the extension.
    """
    if not 0 <= order <= 3:
        raise ValueError(f"jet order must be between 0 and 3, got {order}")
    p = rational(p)
    disc = curve.eval(p)

    def lift(x):
        return QuadExt(x, Fraction(0), disc)

    w = QuadExt(Fraction(0), Fraction(sign), disc)
    coeffs = [
        lift(p),
        w,
        lift(curve.eval_derivative(p, 1) / 2),
        QuadExt(Fraction(0), Fraction(sign) * curve.eval_derivative(p, 2) / 2, disc),
    ]
    return Jet(coeffs[: order + 1])


def wp_jet_numeric(curve, wp, wp_prime, order=3):
    """Float jet at a numeric trajectory point, derivatives from the ODE."""
    coeffs = [
        float(wp),
        float(wp_prime),
        float(curve.eval_derivative(wp, 1)) / 2.0,
        float(curve.eval_derivative(wp, 2)) * float(wp_prime) / 2.0,
    ]
    return Jet(coeffs[: order + 1])


@dataclass(frozen=True)
class BoundedBranch:
    """State of the bounded real branch: ``wp`` oscillates in [e3, e2]."""

    curve: SpectralCurve
    roots: tuple  # e1 > e2 > e3
    y: float
    wp: float
    wp_prime: float

    def energy(self):
        """Conserved quantity ``(wp')**2 - F_1(wp)`` (zero on the branch)."""
        return self.wp_prime**2 - float(self.curve.eval(self.wp))

    def jet(self, order=3):
        return wp_jet_numeric(self.curve, self.wp, self.wp_prime, order)


def _real_roots_sorted(curve):
    c0, c1, c2 = (float(c) for c in curve.coeffs)
    roots = np.roots([1.0, c2, c1, c0])
    if np.any(np.abs(roots.imag) > 1e-9):
        raise UnsupportedCurveError(
            "bounded branch needs three real roots; got complex roots"
        )
    real = np.sort(roots.real)
    if real[1] - real[0] < 1e-9 or real[2] - real[1] < 1e-9:
        raise UnsupportedCurveError(
            "bounded branch needs three distinct real roots; found a repeated root"
        )
    for r in real:
        if abs(float(curve.eval(float(r)))) > ROOT_RESIDUAL_TOL * max(
            1.0, abs(r) ** 3
        ):
            raise UnsupportedCurveError(f"root validation failed at z = {r}")
    return float(real[2]), float(real[1]), float(real[0])  # e1 > e2 > e3


def wp_init_bounded(curve):
    """Initialize the pole-free oscillatory branch at the lowest root.

    ``wp(0) = e3``, ``wp'(0) = 0``; the trajectory then stays inside
    ``[e3, e2]`` for all real y.  Curves without three distinct real roots
    are rejected, not silently approximated.
    """
    if curve.genus != 1:
        raise UnsupportedCurveError("bounded branch integration needs genus 1")
    e1, e2, e3 = _real_roots_sorted(curve)
    return BoundedBranch(curve=curve, roots=(e1, e2, e3), y=0.0, wp=e3, wp_prime=0.0)


def _ode_rhs(curve, state):
    wp, wp_prime = state
    return np.array(
        [wp_prime, float(curve.eval_derivative(wp, 1)) / 2.0], dtype=float
    )


def _rk4_step(curve, state, h):
    k1 = _ode_rhs(curve, state)
    k2 = _ode_rhs(curve, state + 0.5 * h * k1)
    k3 = _ode_rhs(curve, state + 0.5 * h * k2)
    k4 = _ode_rhs(curve, state + h * k3)
    return state + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def wp_integrate(state, y, h):
    """Integrate the branch from ``state.y`` to ``y``; returns the new state.

    Raises :class:`AccuracyError` if the energy drift exceeds the budget
    (the run is then untrustworthy, not merely imprecise).
    """
    if y < state.y:
        raise ValueError("target y must not be behind the current state")
    vec = np.array([state.wp, state.wp_prime], dtype=float)
    e0 = state.energy()
    remaining = y - state.y
    nsteps = int(remaining // h)
    for _ in range(nsteps):
        vec = _rk4_step(state.curve, vec, h)
    tail = remaining - nsteps * h
    if tail > 1e-15:
        vec = _rk4_step(state.curve, vec, tail)
    new = BoundedBranch(
        curve=state.curve,
        roots=state.roots,
        y=float(y),
        wp=float(vec[0]),
        wp_prime=float(vec[1]),
    )
    if abs(new.energy() - e0) > ENERGY_DRIFT_TOL:
        raise AccuracyError(
            f"energy drift {abs(new.energy() - e0):.3e} exceeds "
            f"{ENERGY_DRIFT_TOL:.0e} integrating to y = {y}"
        )
    return new


def wp_trajectory(state, y_max, h):
    """Step the branch to ``y_max`` recording every step.

    Returns arrays ``(y, wp, wp_prime, energy_drift)`` ready for CSV output.
    """
    steps = int(round(y_max / h))
    ys = np.empty(steps + 1)
    wps = np.empty(steps + 1)
    wpps = np.empty(steps + 1)
    vec = np.array([state.wp, state.wp_prime], dtype=float)
    e0 = state.energy()
    ys[0], wps[0], wpps[0] = state.y, vec[0], vec[1]
    for i in range(1, steps + 1):
        vec = _rk4_step(state.curve, vec, h)
        ys[i] = state.y + i * h
        wps[i] = vec[0]
        wpps[i] = vec[1]
    drift = wpps**2 - np.array([float(state.curve.eval(float(v))) for v in wps])
    return ys, wps, wpps, drift - e0
