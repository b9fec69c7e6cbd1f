"""Dense univariate polynomial helpers over any scalar field.

Coefficients are sequences in ascending power order.  No automatic trimming:
exact callers check degrees explicitly, numeric callers don't care.
"""

from math import comb

__all__ = [
    "poly_add",
    "poly_degree",
    "poly_eval",
    "poly_is_zero",
    "poly_mul",
    "poly_scale",
    "poly_shift_arg",
    "poly_sub",
]


def poly_add(p, q):
    n = max(len(p), len(q))
    return tuple(
        (p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)
    )


def poly_sub(p, q):
    n = max(len(p), len(q))
    return tuple(
        (p[i] if i < len(p) else 0) - (q[i] if i < len(q) else 0) for i in range(n)
    )


def poly_scale(p, c):
    return tuple(c * x for x in p)


def poly_mul(p, q):
    if not p or not q:
        return ()
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] = out[i + j] + a * b
    return tuple(out)


def poly_eval(p, x):
    if not p:
        return 0
    acc = p[-1]
    for c in reversed(p[:-1]):
        acc = acc * x + c
    return acc


def poly_shift_arg(p, j):
    """Coefficients of ``n -> p(n + j)`` via binomial expansion."""
    out = [0] * len(p)
    for i, c in enumerate(p):
        # c * (n + j)^i
        for k in range(i + 1):
            out[k] = out[k] + c * comb(i, k) * (j ** (i - k))
    return tuple(out)


def poly_is_zero(p):
    return all(c == 0 for c in p)


def poly_degree(p):
    for i in range(len(p) - 1, -1, -1):
        if not (p[i] == 0):
            return i
    return -1
