"""Spectral polynomial machinery and commutant searches.

A family of monic site-indexed polynomials Q_n(z) of degree g encodes the
joint spectrum of the fourth-order operator ``(T + V_n T^{-1})^2 + W_n``:
the quadratic combination

    Q_{n-1} Q_{n+1} V_n + Q_n Q_{n+2} V_{n+1}
        + Q_n Q_{n+1} (z - V_n - V_{n+1} - W_n)

is site-independent and equals the curve polynomial F_g(z); differencing two
neighboring copies and dividing by Q_{n+1} gives a linear four-site
recurrence on the Q's.  This module verifies the conserved value, evaluates
the recurrence residual, propagates Q along it, constructs the two explicit
operator families with polynomial ("sharp") and trigonometric ("flat")
potentials, and searches for operators commuting with a given one -- exactly
(polynomial coefficients, rational elimination) or numerically (windowed
least squares / SVD).
"""

from dataclasses import dataclass
from fractions import Fraction
from math import cos, sin

import numpy as np

from .errors import AnsatzError, DegreeError
from .operators import DifferenceOperator, build_l4
from .poly import (
    poly_add,
    poly_degree,
    poly_eval,
    poly_is_zero,
    poly_mul,
    poly_scale,
    poly_shift_arg,
    poly_sub,
)
from .rational_linalg import nullspace, rref

__all__ = [
    "CommutantAnsatz",
    "ExactCommutantResult",
    "OperatorFamilyParams",
    "PolynomialBandOperator",
    "QPolynomial",
    "WindowedCommutantResult",
    "commutant_solve_exact",
    "commutant_solve_windowed",
    "commutator_polynomial_bands",
    "compose_polynomial_bands",
    "exact_commutator_is_zero",
    "flat_operator",
    "propagate_q",
    "q_conserved_value",
    "q_recurrence_residual",
    "sharp_operator",
]


@dataclass(frozen=True)
class QPolynomial:
    """Monic degree-``genus`` polynomial ``z^g + a_{g-1} z^{g-1} + ... + a_0``."""

    genus: int
    alphas: tuple  # a_0 .. a_{g-1}

    def __post_init__(self):
        object.__setattr__(self, "alphas", tuple(self.alphas))
        if self.genus < 1:
            raise ValueError("genus must be positive")
        if len(self.alphas) != self.genus:
            raise ValueError(
                f"genus {self.genus} needs {self.genus} free coefficients, "
                f"got {len(self.alphas)}"
            )

    @classmethod
    def from_gamma(cls, gamma):
        """Genus-1 reduction ``Q = z - gamma``."""
        return cls(1, (-gamma,))

    def coeffs(self):
        """Ascending coefficients including the leading 1."""
        return self.alphas + (1,)

    def eval(self, z):
        return poly_eval(self.coeffs(), z)


def q_conserved_value(q_prev, q_n, q_next, q_next2, v_n, v_next, w_n, z):
    """The site-independent quadratic combination of neighboring Q's.

    For a valid spectral family this equals F_g(z) at every site (the
    conserved curve); for the genus-1 reduction that holds identically for
    any chain with distinct neighbors.
    """
    return (
        q_prev.eval(z) * q_next.eval(z) * v_n
        + q_n.eval(z) * q_next2.eval(z) * v_next
        + q_n.eval(z) * q_next.eval(z) * (z - v_n - v_next - w_n)
    )


def q_recurrence_residual(q_prev, q_n, q_next2, q_next3, v_n, v_next, v_next2, w_n, w_next):
    """Coefficients (ascending in z) of the linear four-site constraint

    ``Q_{n-1} V_n + Q_n (z - V_n - V_{n+1} - W_n)
      - Q_{n+2} (z - V_{n+1} - V_{n+2} - W_{n+1}) - Q_{n+3} V_{n+2}``.

    Zero for every valid family; the leading z-power cancels between the two
    monic middle terms.
    """
    t1 = poly_scale(q_prev.coeffs(), v_n)
    t2 = poly_mul(q_n.coeffs(), (-(v_n + v_next + w_n), 1))
    t3 = poly_mul(q_next2.coeffs(), (-(v_next + v_next2 + w_next), 1))
    t4 = poly_scale(q_next3.coeffs(), v_next2)
    return poly_sub(poly_add(t1, t2), poly_add(t3, t4))


def propagate_q(q_prev, q_n, q_next2, v_n, v_next, v_next2, w_n, w_next):
    """Solve the four-site recurrence for ``Q_{n+3}``.

    The unique candidate is checked for degree consistency: the z^(g+1)
    coefficient of the assembled numerator must cancel and the solved
    polynomial must come out monic; inconsistent seeds raise.
    """
    if v_next2 == 0:
        raise ZeroDivisionError("cannot propagate through a vanishing V_{n+2}")
    g = q_n.genus
    t1 = poly_scale(q_prev.coeffs(), v_n)
    t2 = poly_mul(q_n.coeffs(), (-(v_n + v_next + w_n), 1))
    t3 = poly_mul(q_next2.coeffs(), (-(v_next + v_next2 + w_next), 1))
    num = poly_sub(poly_add(t1, t2), t3)
    if len(num) > g + 1 and not all(c == 0 for c in num[g + 1 :]):
        raise DegreeError(
            "inconsistent seeds: leading powers do not cancel in the recurrence"
        )
    solved = tuple(c / v_next2 for c in num[: g + 1])
    if solved[g] != 1:
        raise DegreeError(
            f"propagated polynomial is not monic (leading coefficient {solved[g]})"
        )
    return QPolynomial(g, solved[:g])


# ---------------------------------------------------------------------------
# Explicit operator families
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OperatorFamilyParams:
    """Parameters of the explicit families.

    ``variant``: "sharp" (cubic polynomial potential, needs r3 != 0, exact)
    or "flat" (cosine potential, needs r1 != 0, numeric only -- cos(n) at
    integer n is transcendental, so there is no honest exact path for it).
    ``r`` lists r_0.. in ascending order (four entries for sharp, two for
    flat); ``genus`` scales the diagonal term.
    """

    variant: str
    r: tuple
    genus: int = 1

    def __post_init__(self):
        object.__setattr__(self, "r", tuple(self.r))
        if self.variant not in ("sharp", "flat"):
            raise AnsatzError(f"unknown family variant {self.variant!r}")
        if self.genus < 1:
            raise AnsatzError("genus must be positive")
        if self.variant == "sharp":
            if len(self.r) != 4:
                raise AnsatzError("sharp family needs r = (r0, r1, r2, r3)")
            if self.r[3] == 0:
                raise AnsatzError("sharp family requires r3 != 0")
        else:
            if len(self.r) != 2:
                raise AnsatzError("flat family needs r = (r0, r1)")
            if self.r[1] == 0:
                raise AnsatzError("flat family requires r1 != 0")


class PolynomialBandOperator:
    """Difference operator whose band coefficients are polynomials in n.

    Carries both the opaque provider form (for generic operator algebra) and
    the dense polynomial form (for the exact commutant solver).
    """

    def __init__(self, bands, operator=None):
        self.bands = {j: tuple(p) for j, p in bands.items() if not poly_is_zero(p)}
        if not self.bands:
            self.bands = {0: (Fraction(0),)}
        self.lo = min(self.bands)
        self.hi = max(self.bands)
        if operator is None:
            operator = DifferenceOperator(
                self.lo,
                self.hi,
                lambda j, n: poly_eval(self.bands.get(j, (Fraction(0),)), n),
            )
        self.operator = operator

    def coeff(self, j, n):
        return poly_eval(self.bands.get(j, (Fraction(0),)), n)

    def window(self, n0, n1):
        return self.operator.window(n0, n1)

    @classmethod
    def identity(cls):
        return cls({0: (Fraction(1),)})


def compose_polynomial_bands(a, b):
    """Band polynomials of the product of two polynomial-band operators."""
    out = {}
    for j, pj in a.items():
        for i, qi in b.items():
            term = poly_mul(pj, poly_shift_arg(qi, j))
            out[j + i] = poly_add(out.get(j + i, ()), term)
    return out


def commutator_polynomial_bands(a, b):
    ab = compose_polynomial_bands(a, b)
    ba = compose_polynomial_bands(b, a)
    keys = set(ab) | set(ba)
    return {k: poly_sub(ab.get(k, ()), ba.get(k, ())) for k in keys}


def sharp_operator(params):
    """``(T + p(n) T^{-1})^2 + g(g+1) r3 n`` with cubic ``p``; exact.

    The provider route goes through :func:`build_l4` (composition, not
    hard-coded bands); the polynomial route composes band polynomials.  The
    two agree on every window, which the tests pin down.
    """
    if params.variant != "sharp":
        raise AnsatzError("sharp_operator needs variant='sharp'")
    r = tuple(Fraction(x) for x in params.r)
    g = params.genus
    p = r  # ascending coefficients of the potential polynomial
    diag = (Fraction(0), Fraction(g * (g + 1)) * r[3])

    op = build_l4(
        lambda n: poly_eval(p, n),
        lambda n: poly_eval(diag, n),
    )
    factor = {1: (Fraction(1),), -1: p}
    bands = compose_polynomial_bands(factor, factor)
    bands[0] = poly_add(bands.get(0, ()), diag)
    return PolynomialBandOperator(bands, operator=op)


def flat_operator(params):
    """``(T + (r1 cos n + r0) T^{-1})^2 - 4 r1 sin(g/2) sin((g+1)/2) cos(n + 1/2)``.

    Numeric-only: coefficients are floats evaluated at integer sites.
    """
    if params.variant != "flat":
        raise AnsatzError("flat_operator needs variant='flat'")
    r0, r1 = (float(x) for x in params.r)
    g = params.genus
    amp = -4.0 * r1 * sin(g / 2.0) * sin((g + 1) / 2.0)
    return build_l4(
        lambda n: r1 * cos(n) + r0,
        lambda n: amp * cos(n + 0.5),
    )


# ---------------------------------------------------------------------------
# Commutant searches
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CommutantAnsatz:
    """Search space ``X = sum_{|j| <= band_m} x_j(n) T^j`` with polynomial
    coefficients ``x_j`` of degree <= ``degree``; unknown count is
    ``(2*band_m + 1) * (degree + 1)``."""

    band_m: int
    degree: int

    def __post_init__(self):
        if self.band_m < 0 or self.degree < 0:
            raise AnsatzError("ansatz needs band_m >= 0 and degree >= 0")

    @property
    def unknowns(self):
        return (2 * self.band_m + 1) * (self.degree + 1)


@dataclass(frozen=True)
class ExactCommutantResult:
    ansatz: CommutantAnsatz
    basis: tuple  # PolynomialBandOperator per nullspace vector
    dimension: int

    def spans(self, candidate_bands):
        """True if the candidate ``{band: coefficients}`` lies in the span
        of the found solutions (as band polynomials)."""
        m = self.ansatz.band_m
        d = self.ansatz.degree
        keys = [(j, e) for j in range(-m, m + 1) for e in range(d + 1)]

        def vec(bands):
            out = []
            for j, e in keys:
                p = bands.get(j, ())
                out.append(Fraction(p[e]) if e < len(p) else Fraction(0))
            return out

        cand = {j: tuple(Fraction(c) for c in p) for j, p in candidate_bands.items()}
        for j, p in cand.items():
            if abs(j) > m or poly_degree(p) > d:
                return False
        cols = [vec(sol.bands) for sol in self.basis]
        target = vec(cand)
        # candidate in span <=> appending it does not raise the rank
        base = [list(col) for col in zip(*cols)] if cols else []
        rank_before = len(rref(base)[1]) if base else 0
        extended = [row + [t] for row, t in zip(base, target)] if base else [
            [t] for t in target
        ]
        rank_after = len(rref(extended)[1]) if extended else 0
        return rank_after == rank_before


def commutant_solve_exact(l_op, ansatz):
    """Exact basis of ``{X in ansatz : [L, X] = 0 identically in n}``.

    ``l_op`` must carry polynomial band data (:class:`PolynomialBandOperator`
    or a plain ``{band: ascending coefficients}`` mapping).  Each band of the
    commutator is a polynomial in n; requiring every n-power of every band to
    vanish yields an exact linear system solved by rational elimination.
    """
    if isinstance(l_op, PolynomialBandOperator):
        l_bands = l_op.bands
    elif isinstance(l_op, dict):
        l_bands = {j: tuple(Fraction(c) for c in p) for j, p in l_op.items()}
    else:
        raise AnsatzError(
            "exact commutant solving needs polynomial band data "
            "(PolynomialBandOperator or {band: coefficients} mapping)"
        )
    if ansatz.unknowns == 0:
        raise AnsatzError("empty ansatz")

    unknowns = [
        (j, d)
        for j in range(-ansatz.band_m, ansatz.band_m + 1)
        for d in range(ansatz.degree + 1)
    ]
    columns = []
    row_keys = {}
    for j, d in unknowns:
        mono = (Fraction(0),) * d + (Fraction(1),)
        comm = commutator_polynomial_bands(l_bands, {j: mono})
        entries = {}
        for k, p in comm.items():
            for e, c in enumerate(p):
                if c != 0:
                    entries[(k, e)] = c
                    row_keys.setdefault((k, e), len(row_keys))
        columns.append(entries)

    matrix = [[Fraction(0)] * len(unknowns) for _ in range(len(row_keys))]
    for col, entries in enumerate(columns):
        for key, c in entries.items():
            matrix[row_keys[key]][col] = c

    basis_vectors = nullspace(matrix, ncols=len(unknowns))
    basis = []
    for vec in basis_vectors:
        bands = {}
        for (j, d), c in zip(unknowns, vec):
            if c != 0:
                cur = list(bands.get(j, ()))
                while len(cur) <= d:
                    cur.append(Fraction(0))
                cur[d] = c
                bands[j] = tuple(cur)
        basis.append(PolynomialBandOperator(bands if bands else {0: (Fraction(0),)}))
    return ExactCommutantResult(
        ansatz=ansatz, basis=tuple(basis), dimension=len(basis)
    )


def exact_commutator_is_zero(l_op, x_op):
    """Exact check that ``[L, X] = 0`` identically (polynomial band data)."""
    comm = commutator_polynomial_bands(l_op.bands, x_op.bands)
    return all(poly_is_zero(p) for p in comm.values())


@dataclass(frozen=True)
class WindowedCommutantResult:
    band_m: int
    n0: int
    n1: int
    nullity: int
    threshold: float
    singular_max: float
    singular_tail: tuple  # ascending, the smallest few
    gap: float
    representative: dict  # band -> list of coefficient values over the window
    residual: float

    def to_json_dict(self):
        return {
            "band_m": self.band_m,
            "window": [self.n0, self.n1],
            "nullity": self.nullity,
            "threshold": self.threshold,
            "singular_max": self.singular_max,
            "singular_tail": list(self.singular_tail),
            "gap": self.gap,
            "residual": self.residual,
            "representative": {
                str(j): [float(c) for c in col]
                for j, col in self.representative.items()
            },
        }


def commutant_solve_windowed(l_op, band_m, n0, n1, threshold_factor=1e-8):
    """Numeric analogue for operators without polynomial structure.

    Unknowns are free coefficient values ``x_j(n)`` on the window; equations
    are all commutator coefficients whose stencil stays inside the window
    (boundary unknowns are free, interior equations are complete).  The
    numerical nullity is counted at ``threshold_factor * sigma_max``; ``gap``
    is the ratio between the smallest kept and the largest discarded singular
    value (commutant candidates should be separated by many orders of
    magnitude from the generic spectrum).
    """
    sites = list(range(n0, n1 + 1))
    col_index = {}
    for j in range(-band_m, band_m + 1):
        for n in sites:
            col_index[(j, n)] = len(col_index)
    ncols = len(col_index)

    rows = []
    for k in range(l_op.lo - band_m, l_op.hi + band_m + 1):
        for n in sites:
            needed = [n]
            lx_terms = []
            for j in range(l_op.lo, l_op.hi + 1):
                i = k - j
                if -band_m <= i <= band_m:
                    needed.append(n + j)
                    lx_terms.append((j, i))
            if any(m < n0 or m > n1 for m in needed):
                continue
            row = np.zeros(ncols)
            hit = False
            for j, i in lx_terms:
                row[col_index[(i, n + j)]] += float(l_op.coeff(j, n))
                hit = True
            for j2 in range(-band_m, band_m + 1):
                i = k - j2
                if l_op.lo <= i <= l_op.hi:
                    row[col_index[(j2, n)]] -= float(l_op.coeff(i, n + j2))
                    hit = True
            if hit:
                rows.append(row)

    if len(rows) < ncols:
        raise AnsatzError(
            f"ill-posed window: {len(rows)} equations for {ncols} unknowns; "
            "widen the site range"
        )
    a = np.array(rows)
    u, s, vh = np.linalg.svd(a, full_matrices=True)
    smax = float(s[0])
    threshold = threshold_factor * smax
    rank = int(np.sum(s >= threshold))
    nullity = ncols - rank
    if 0 < rank < len(s):
        gap = float(s[rank - 1] / s[rank]) if s[rank] > 0 else float("inf")
    else:
        gap = float("inf")

    rep_vec = vh[-1]
    representative = {
        j: [float(rep_vec[col_index[(j, n)]]) for n in sites]
        for j in range(-band_m, band_m + 1)
    }
    residual = float(np.max(np.abs(a @ rep_vec))) if len(rows) else 0.0
    tail = tuple(float(x) for x in sorted(s)[: min(8, len(s))])
    return WindowedCommutantResult(
        band_m=band_m,
        n0=n0,
        n1=n1,
        nullity=nullity,
        threshold=float(threshold),
        singular_max=smax,
        singular_tail=tail,
        gap=gap,
        representative=representative,
        residual=residual,
    )
