"""Closed-form real-root solvers for polynomials up to degree four.

The analytic bound computations reduce their algebraic cases to low-degree
polynomials in a single unknown (the velocity cap, for instance, to a
quadratic in the next setpoint). These helpers return all real roots in
closed form (quadratic formula, Cardano, Ferrari), with a bounded Newton
polish on the exact coefficients to absorb floating-point cancellation.

Coefficient convention: ``coeffs[k]`` multiplies ``x**k`` (lowest first).
"""

from __future__ import annotations

import math

_REL_EPS = 1e-12


def _polish(coeffs: list[float], x: float, iters: int = 3) -> float:
    # Newton steps on the original polynomial; keep the better iterate.
    best_x = x
    best_f = abs(_horner(coeffs, x))
    for _ in range(iters):
        f = _horner(coeffs, x)
        df = _horner_deriv(coeffs, x)
        if df == 0.0 or not math.isfinite(df):
            break
        x = x - f / df
        if not math.isfinite(x):
            break
        fx = abs(_horner(coeffs, x))
        if fx < best_f:
            best_f = fx
            best_x = x
    return best_x


def _horner(coeffs: list[float], x: float) -> float:
    acc = 0.0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _horner_deriv(coeffs: list[float], x: float) -> float:
    acc = 0.0
    for k in range(len(coeffs) - 1, 0, -1):
        acc = acc * x + k * coeffs[k]
    return acc


def solve_linear(b: float, a: float) -> list[float]:
    """Real roots of a*x + b = 0."""
    if a == 0.0:
        return []
    return [-b / a]


def solve_quadratic(c: float, b: float, a: float) -> list[float]:
    """Real roots of a*x^2 + b*x + c = 0, numerically stable form."""
    if a == 0.0:
        return solve_linear(c, b)
    disc = b * b - 4.0 * a * c
    if disc < 0.0:
        return []
    sq = math.sqrt(disc)
    # Avoid cancellation: compute the larger-magnitude root first.
    if b >= 0.0:
        q = -0.5 * (b + sq)
    else:
        q = -0.5 * (b - sq)
    roots = []
    if q != 0.0:
        roots.append(q / a)
        roots.append(c / q)
    else:
        roots.append(0.0)
        roots.append(-b / a)
    return roots


def solve_cubic(d: float, c: float, b: float, a: float) -> list[float]:
    """Real roots of a*x^3 + b*x^2 + c*x + d = 0."""
    if a == 0.0:
        return solve_quadratic(d, c, b)
    # Depressed form t^3 + p t + q with x = t - b/(3a).
    inv_a = 1.0 / a
    b1 = b * inv_a
    c1 = c * inv_a
    d1 = d * inv_a
    shift = b1 / 3.0
    p = c1 - b1 * b1 / 3.0
    q = 2.0 * b1 * b1 * b1 / 27.0 - b1 * c1 / 3.0 + d1
    roots: list[float] = []
    half_q = 0.5 * q
    disc = half_q * half_q + (p / 3.0) ** 3
    if disc > 0.0:
        sq = math.sqrt(disc)
        u = _cbrt(-half_q + sq)
        v = _cbrt(-half_q - sq)
        roots.append(u + v - shift)
    elif p == 0.0 and q == 0.0:
        roots.append(-shift)
    else:
        # Three real roots, trigonometric method.
        m = 2.0 * math.sqrt(-p / 3.0)
        arg = 3.0 * q / (p * m)
        arg = min(1.0, max(-1.0, arg))
        theta = math.acos(arg) / 3.0
        for k in range(3):
            roots.append(m * math.cos(theta - 2.0 * math.pi * k / 3.0) - shift)
    coeffs = [d, c, b, a]
    return [_polish(coeffs, r) for r in roots]


def solve_quartic(e: float, d: float, c: float, b: float, a: float) -> list[float]:
    """Real roots of a*x^4 + b*x^3 + c*x^2 + d*x + e = 0 (Ferrari)."""
    if a == 0.0:
        return solve_cubic(e, d, c, b)
    inv_a = 1.0 / a
    b1 = b * inv_a
    c1 = c * inv_a
    d1 = d * inv_a
    e1 = e * inv_a
    # Depressed form y^4 + p y^2 + q y + r with x = y - b1/4.
    shift = b1 / 4.0
    b2 = b1 * b1
    p = c1 - 3.0 * b2 / 8.0
    q = d1 - b1 * c1 / 2.0 + b2 * b1 / 8.0
    r = e1 - b1 * d1 / 4.0 + b2 * c1 / 16.0 - 3.0 * b2 * b2 / 256.0
    scale = max(1.0, abs(p), abs(q), abs(r))
    ys: list[float] = []
    if abs(q) <= 1e-14 * scale:
        # Biquadratic.
        for z in solve_quadratic(r, p, 1.0):
            if z >= 0.0:
                sz = math.sqrt(z)
                ys.append(sz)
                ys.append(-sz)
    else:
        # Resolvent cubic 8m^3 + 8p m^2 + (2p^2 - 8r) m - q^2 = 0.
        ms = solve_cubic(-q * q, 2.0 * p * p - 8.0 * r, 8.0 * p, 8.0)
        m = 0.0
        for cand in ms:
            if cand > m:
                m = cand
        if m <= 0.0:
            return []
        s2m = math.sqrt(2.0 * m)
        t = q / (4.0 * m)
        # (y^2 + p/2 + m)^2 = 2m (y - t)^2
        ys.extend(solve_quadratic(p / 2.0 + m + s2m * t, -s2m, 1.0))
        ys.extend(solve_quadratic(p / 2.0 + m - s2m * t, s2m, 1.0))
    coeffs = [e, d, c, b, a]
    return [_polish(coeffs, y - shift) for y in ys]


def real_roots(coeffs: list[float]) -> list[float]:
    """All real roots of sum(coeffs[k] * x**k), degree <= 4.

    Near-zero leading coefficients (relative to the largest coefficient)
    are dropped before dispatching, so structurally degenerate systems
    reduce to their true degree.
    """
    scale = max((abs(c) for c in coeffs), default=0.0)
    if scale == 0.0:
        return []
    cs = list(coeffs)
    while len(cs) > 1 and abs(cs[-1]) <= _REL_EPS * scale:
        cs.pop()
    deg = len(cs) - 1
    if deg <= 0:
        return []
    if deg == 1:
        return solve_linear(cs[0], cs[1])
    if deg == 2:
        return solve_quadratic(cs[0], cs[1], cs[2])
    if deg == 3:
        return solve_cubic(cs[0], cs[1], cs[2], cs[3])
    if deg == 4:
        return solve_quartic(cs[0], cs[1], cs[2], cs[3], cs[4])
    raise ValueError("degree > 4 not supported")


def _cbrt(x: float) -> float:
    if x >= 0.0:
        return x ** (1.0 / 3.0)
    return -((-x) ** (1.0 / 3.0))


def poly_mul(p: list[float], q: list[float]) -> list[float]:
    """Product of two coefficient lists (lowest-power first)."""
    out = [0.0] * (len(p) + len(q) - 1)
    for i, pi in enumerate(p):
        if pi == 0.0:
            continue
        for j, qj in enumerate(q):
            out[i + j] += pi * qj
    return out


def poly_add(p: list[float], q: list[float]) -> list[float]:
    n = max(len(p), len(q))
    out = [0.0] * n
    for i, pi in enumerate(p):
        out[i] += pi
    for j, qj in enumerate(q):
        out[j] += qj
    return out


def poly_scale(p: list[float], s: float) -> list[float]:
    return [c * s for c in p]
