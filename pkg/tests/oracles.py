"""Independent reference implementations used only by the tests.

Each oracle is written from the textbook definition with plain loops, so it
shares no code with the package.
"""

from __future__ import annotations

import math

import numpy as np

# value of the true coefficient function at s = 0, evaluated with 40-digit
# arithmetic (mpmath) and frozen
BETA_TRUE_AT_ZERO = -0.5344637353040434900009292008543780374002


def cox_de_boor(knots, order, x):
    """All B-spline basis values of ``order`` at ``x`` by the recursion.

    The last nonempty knot span is closed on the right so the right end of
    a clamped knot vector is covered.
    """
    t = list(map(float, knots))
    m = len(t) - order
    last = max(i for i in range(len(t) - 1) if t[i] < t[i + 1])

    def N(i, k):
        if k == 1:
            if t[i] <= x < t[i + 1] or (i == last and x == t[i + 1]):
                return 1.0
            return 0.0
        out = 0.0
        if t[i + k - 1] > t[i]:
            out += (x - t[i]) / (t[i + k - 1] - t[i]) * N(i, k - 1)
        if t[i + k] > t[i + 1]:
            out += (t[i + k] - x) / (t[i + k] - t[i + 1]) * N(i + 1, k - 1)
        return out

    return np.array([N(i, order) for i in range(m)])


def power_iteration_eigs(A, n_iter=20000, tol=1e-15, seed=0):
    """Eigenvalues of a symmetric PSD matrix by power iteration with deflation."""
    A = np.array(A, dtype=float)
    rng = np.random.default_rng(seed)
    vals = []
    for _ in range(A.shape[0]):
        v = rng.standard_normal(A.shape[0])
        v /= np.linalg.norm(v)
        lam = 0.0
        for _ in range(n_iter):
            u = A @ v
            nu = np.linalg.norm(u)
            if nu == 0:
                lam = 0.0
                break
            u /= nu
            new = float(u @ A @ u)
            if abs(new - lam) < tol * max(1.0, abs(new)) and np.linalg.norm(u - v) < 1e-12:
                lam, v = new, u
                break
            lam, v = new, u
        vals.append(lam)
        A = A - lam * np.outer(v, v)
    return np.sort(np.array(vals))[::-1]


def ppl_literal(theta, w, alpha, time, status, D, group):
    """Penalized partial log-likelihood summed term by term (Breslow ties)."""
    n = len(time)
    eta = [sum(D[i][k] * theta[k] for k in range(len(theta))) + (w[group[i]] if len(w) else 0.0)
           for i in range(n)]
    total = 0.0
    for i in range(n):
        if status[i] == 1:
            s = 0.0
            for j in range(n):
                if time[j] >= time[i]:
                    s += math.exp(eta[j])
            total += eta[i] - math.log(s)
    if len(w):
        total -= sum(x * x for x in w) / (2 * alpha)
    return total


def breslow_double_loop(time, status, eta):
    """(event times, cumulative hazard) by a double loop over subjects."""
    ev = sorted({t for t, d in zip(time, status) if d == 1})
    values, acc = [], 0.0
    for t in ev:
        d = sum(1 for ti, di in zip(time, status) if di == 1 and ti == t)
        s = sum(math.exp(e) for ti, e in zip(time, eta) if ti >= t)
        acc += d / s
        values.append(acc)
    return np.array(ev), np.array(values)


def concordance_pairs(time, status, risk):
    """Harrell's C by looping over ordered pairs."""
    num, den = 0.0, 0
    n = len(time)
    for i in range(n):
        if status[i] != 1:
            continue
        for j in range(n):
            if time[i] < time[j]:
                den += 1
                if risk[i] > risk[j]:
                    num += 1.0
                elif risk[i] == risk[j]:
                    num += 0.5
    return num / den


def golden_section_max(f, a, b, tol=1e-10):
    g = (math.sqrt(5) - 1) / 2
    c, d = b - g * (b - a), a + g * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - g * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + g * (b - a)
            fd = f(d)
    return (a + b) / 2


def dummy_code_by_hand(values, levels):
    """Indicator columns for every level but the first."""
    return np.array([[1.0 if v == lv else 0.0 for lv in levels[1:]] for v in values])
