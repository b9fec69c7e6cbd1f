"""Right-hand sides of the integrable lattice flows and their integrators.

The central object is the N-periodic chain gamma_n(x) driven by the discrete
Krichever-Novikov (dKN) lattice

    gamma_n' = F(gamma_n) (gamma_{n-1} - gamma_{n+1})
               / ((gamma_{n-1} - gamma_n)(gamma_n - gamma_{n+1})),

with F the genus-1 spectral-curve polynomial.  The same chain induces the
coupled (V, W) system via

    V_n = F(gamma_n) / ((gamma_n - gamma_{n-1})(gamma_n - gamma_{n+1})),
    W_n = -c2 - gamma_n - gamma_{n+1},

whose own evolution and second hierarchy flow are implemented here, together
with jet prolongation along the dKN flow and a classical RK4 integrator.

All right-hand sides are pure functions over immutable chains and are generic
in the scalar: exact rationals and jets verify identities, floats integrate.
"""

from dataclasses import dataclass

import numpy as np

from .curves import SpectralCurve
from .errors import AccuracyError, DegenerateConfigurationError
from .operators import DifferenceOperator
from .poly import poly_scale, poly_sub
from .scalars import Fraction, Jet, is_degenerate_pair

__all__ = [
    "FLOWS",
    "GammaChain",
    "GammaJetChain",
    "Trajectory",
    "VWChain",
    "chain_vw_rhs",
    "dkn_rhs",
    "flow2_rhs",
    "operator_time_derivative_fd",
    "prolong_gamma_jets",
    "q_flow_rhs",
    "reduced_flow2_gamma",
    "rk4_integrate",
    "vn_from_gamma",
    "vw_chain_from_gamma",
    "wn_from_gamma",
]


def _normalize_value(v):
    return Fraction(v) if isinstance(v, int) else v


@dataclass(frozen=True)
class GammaChain:
    """N-periodic site values gamma_0..gamma_{N-1} tied to a genus-1 curve."""

    values: tuple
    curve: SpectralCurve

    def __post_init__(self):
        object.__setattr__(
            self, "values", tuple(_normalize_value(v) for v in self.values)
        )
        if len(self.values) < 2:
            raise ValueError("chain period must be at least 2")

    @property
    def period(self):
        return len(self.values)

    def gamma(self, n):
        return self.values[n % self.period]

    def with_values(self, values):
        return GammaChain(tuple(values), self.curve)


@dataclass(frozen=True)
class GammaJetChain:
    """Chain whose sites carry jets (value and x-derivatives) of gamma_n."""

    jets: tuple
    curve: SpectralCurve

    @property
    def period(self):
        return len(self.jets)

    @property
    def order(self):
        return self.jets[0].order

    def gamma(self, n):
        return self.jets[n % self.period]

    def value_chain(self):
        return GammaChain(tuple(j.value() for j in self.jets), self.curve)


@dataclass(frozen=True)
class VWChain:
    """N-periodic (V, W) pair treated as independent dynamical variables."""

    v: tuple
    w: tuple

    def __post_init__(self):
        object.__setattr__(self, "v", tuple(_normalize_value(x) for x in self.v))
        object.__setattr__(self, "w", tuple(_normalize_value(x) for x in self.w))
        if len(self.v) != len(self.w):
            raise ValueError("V and W chains must have equal periods")
        if len(self.v) < 2:
            raise ValueError("chain period must be at least 2")

    @property
    def period(self):
        return len(self.v)

    def v_at(self, n):
        return self.v[n % self.period]

    def w_at(self, n):
        return self.w[n % self.period]


def _require_distinct(chain, a, b):
    if is_degenerate_pair(chain.gamma(a), chain.gamma(b)):
        pa, pb = a % chain.period, b % chain.period
        raise DegenerateConfigurationError(
            (a, b),
            f"gamma collision between sites {a} and {b} "
            f"(period-reduced {pa} and {pb})",
        )


def dkn_rhs(chain, n):
    """dKN right-hand side at site ``n``.

    Requires gamma_{n-1} != gamma_n and gamma_n != gamma_{n+1} (the
    denominator factors); the numerator may vanish freely.
    """
    _require_distinct(chain, n - 1, n)
    _require_distinct(chain, n, n + 1)
    gm, g0, gp = chain.gamma(n - 1), chain.gamma(n), chain.gamma(n + 1)
    return (chain.curve.eval(g0) * (gm - gp)) / ((gm - g0) * (g0 - gp))


def vn_from_gamma(chain, n):
    """Coupling ``V_n`` induced by the chain."""
    _require_distinct(chain, n - 1, n)
    _require_distinct(chain, n, n + 1)
    gm, g0, gp = chain.gamma(n - 1), chain.gamma(n), chain.gamma(n + 1)
    return chain.curve.eval(g0) / ((g0 - gm) * (g0 - gp))


def wn_from_gamma(chain, n):
    """Diagonal ``W_n = -c2 - gamma_n - gamma_{n+1}``."""
    c2 = chain.curve.coeffs[2]
    return -c2 - chain.gamma(n) - chain.gamma(n + 1)


def vw_chain_from_gamma(chain):
    """Materialize the (V, W) chain induced by a gamma chain."""
    return VWChain(
        tuple(vn_from_gamma(chain, n) for n in range(chain.period)),
        tuple(wn_from_gamma(chain, n) for n in range(chain.period)),
    )


def chain_vw_rhs(vw, n):
    """First flow of the coupled (V, W) system:

    dV_n = V_n (W_{n-1} - W_n + V_{n-1} - V_{n+1}),
    dW_n = (W_n - W_{n-1}) V_n + (W_{n+1} - W_n) V_{n+1}.
    """
    v, w = vw.v_at, vw.w_at
    dv = v(n) * (w(n - 1) - w(n) + v(n - 1) - v(n + 1))
    dw = (w(n) - w(n - 1)) * v(n) + (w(n + 1) - w(n)) * v(n + 1)
    return dv, dw


def flow2_rhs(vw, n):
    """Second hierarchy flow on (V, W) (the k = 2 symmetry)."""
    v, w = vw.v_at, vw.w_at
    dv = v(n) * (
        v(n - 2) * v(n - 1)
        + v(n - 1) * v(n)
        - v(n) * v(n + 1)
        - v(n + 1) * v(n + 2)
        + v(n - 1) ** 2
        - v(n + 1) ** 2
        + w(n - 1) ** 2
        - w(n) ** 2
        + 2 * (v(n - 1) + v(n)) * w(n - 1)
        - 2 * (v(n) + v(n + 1)) * w(n)
    )
    dw = (
        v(n - 1) * v(n) * (w(n - 2) - 2 * w(n - 1) + w(n))
        - v(n + 1) * v(n + 2) * (w(n) - 2 * w(n + 1) + w(n + 2))
        - v(n) * (w(n - 1) - w(n)) * (2 * v(n) + w(n - 1) + w(n))
        - v(n + 1) * (w(n) - w(n + 1)) * (2 * v(n + 1) + w(n) + w(n + 1))
    )
    return dv, dw


def reduced_flow2_gamma(chain, n):
    """Second hierarchy flow pushed down to the gamma chain.

    dgamma_n = V_n ( V_{n+1} (W_{n-1} - 2 W_n + W_{n+1})
                     - V_{n-1} (W_{n-2} - 2 W_{n-1} + W_n)
                     + (W_{n-1} - W_n)(2 V_n + W_{n-1} + W_n) )

    with V, W induced by the chain.
    """
    v = lambda k: vn_from_gamma(chain, k)
    w = lambda k: wn_from_gamma(chain, k)
    return v(n) * (
        v(n + 1) * (w(n - 1) - 2 * w(n) + w(n + 1))
        - v(n - 1) * (w(n - 2) - 2 * w(n - 1) + w(n))
        + (w(n - 1) - w(n)) * (2 * v(n) + w(n - 1) + w(n))
    )


def q_flow_rhs(q_prev, q_next, v_n):
    """Flow of the spectral polynomial: ``dQ_n = V_n (Q_{n+1} - Q_{n-1})``.

    ``q_prev`` and ``q_next`` are ascending coefficient sequences of the
    neighboring polynomials; the result is returned coefficient-wise.  Monic
    leading terms cancel, so the output degree drops below the input degree.
    """
    return poly_scale(poly_sub(tuple(q_next), tuple(q_prev)), v_n)


def prolong_gamma_jets(chain, order=2):
    """Taylor jets of every gamma_n along the dKN flow, to ``order`` <= 3.

    The k-th pass evaluates the right-hand side in jet arithmetic at the
    current order-(k-1) jets, which yields all derivatives through order k in
    one sweep (the derivative at a site only needs lower-order data at its
    neighbors, closed because every first derivative is given by the flow).
    """
    if not 1 <= order <= 3:
        raise ValueError(f"jet order must be between 1 and 3, got {order}")
    jets = [Jet((v,)) for v in chain.values]
    for _ in range(order):
        jet_chain = GammaChain(tuple(jets), chain.curve)
        rhs = [dkn_rhs(jet_chain, n) for n in range(chain.period)]
        jets = [
            Jet((chain.values[n],) + rhs[n].coeffs) for n in range(chain.period)
        ]
    return GammaJetChain(tuple(jets), chain.curve)


def operator_time_derivative_fd(op_of_t, t, dt):
    """Central finite-difference approximation of a coefficient derivative.

    ``op_of_t`` maps a time to a :class:`DifferenceOperator`; the result holds
    ``(coeff(t+dt) - coeff(t-dt)) / (2 dt)`` bandwise.  This is the only
    sanctioned way to feed approximate time derivatives into Lax residuals.
    """
    plus = op_of_t(t + dt)
    minus = op_of_t(t - dt)
    lo, hi = min(plus.lo, minus.lo), max(plus.hi, minus.hi)
    return DifferenceOperator(
        lo,
        hi,
        lambda j, n: (plus.band_coeff(j, n) - minus.band_coeff(j, n)) / (2 * dt),
    )


# ---------------------------------------------------------------------------
# RK4 integration of the periodic flows (numeric path)
# ---------------------------------------------------------------------------

def _gamma_vector_rhs(flow_fn, curve, period):
    def rhs(vec):
        chain = GammaChain(tuple(float(x) for x in vec), curve)
        return np.array(
            [float(flow_fn(chain, n)) for n in range(period)], dtype=float
        )

    return rhs


def _vw_vector_rhs(flow_fn, period):
    def rhs(vec):
        chain = VWChain(
            tuple(float(x) for x in vec[:period]),
            tuple(float(x) for x in vec[period:]),
        )
        out = np.empty(2 * period, dtype=float)
        for n in range(period):
            dv, dw = flow_fn(chain, n)
            out[n] = dv
            out[period + n] = dw
        return out

    return rhs


FLOWS = ("dkn", "vw", "flow2", "reduced_t2")


@dataclass(frozen=True)
class Trajectory:
    """RK4 output: recorded state vectors plus enough metadata to rebuild chains."""

    flow: str
    h: float
    states: np.ndarray  # shape (steps + 1, dim)
    kind: str  # "gamma" | "vw"
    period: int
    curve: SpectralCurve | None

    @property
    def steps(self):
        return self.states.shape[0] - 1

    def x_at(self, i):
        return i * self.h

    def chain_at(self, i):
        vec = self.states[i]
        if self.kind == "gamma":
            return GammaChain(tuple(float(v) for v in vec), self.curve)
        return VWChain(
            tuple(float(v) for v in vec[: self.period]),
            tuple(float(v) for v in vec[self.period:]),
        )


def rk4_integrate(state, flow, h, steps):
    """Classical 4th-order Runge-Kutta on a periodic chain.

    ``state`` is a :class:`GammaChain` (flows "dkn", "reduced_t2") or a
    :class:`VWChain` (flows "vw", "flow2").  Degeneracies hit mid-step are
    re-raised annotated with the step index; non-finite values abort.
    """
    if h <= 0:
        raise ValueError(f"step size must be positive, got {h}")
    if flow not in FLOWS:
        raise ValueError(f"unknown flow {flow!r}; expected one of {FLOWS}")

    if flow in ("dkn", "reduced_t2"):
        if not isinstance(state, GammaChain):
            raise TypeError(f"flow {flow!r} integrates a GammaChain")
        if state.curve.genus != 1:
            raise ValueError("gamma flows need a genus-1 curve")
        period = state.period
        fn = dkn_rhs if flow == "dkn" else reduced_flow2_gamma
        rhs = _gamma_vector_rhs(fn, state.curve, period)
        vec = np.array([float(v) for v in state.values], dtype=float)
        kind, curve = "gamma", state.curve
    else:
        if not isinstance(state, VWChain):
            raise TypeError(f"flow {flow!r} integrates a VWChain")
        period = state.period
        fn = chain_vw_rhs if flow == "vw" else flow2_rhs
        rhs = _vw_vector_rhs(fn, period)
        vec = np.array(
            [float(v) for v in state.v] + [float(v) for v in state.w], dtype=float
        )
        kind, curve = "vw", None

    out = np.empty((steps + 1, vec.size), dtype=float)
    out[0] = vec
    for i in range(steps):
        try:
            k1 = rhs(vec)
            k2 = rhs(vec + 0.5 * h * k1)
            k3 = rhs(vec + 0.5 * h * k2)
            k4 = rhs(vec + h * k3)
        except DegenerateConfigurationError as err:
            raise DegenerateConfigurationError(
                err.sites, f"at integration step {i}: {err}"
            ) from err
        vec = vec + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(vec)):
            raise AccuracyError(f"non-finite state at integration step {i + 1}")
        out[i + 1] = vec

    return Trajectory(flow, float(h), out, kind, period, curve)
