"""Independent reference implementations used to pin expected test values.

Everything here is deliberately written from first principles (scalar loops,
exhaustive enumeration, closed forms typed out separately) so that agreement
with the package is evidence, not tautology.
"""
import itertools
import math

import numpy as np
from scipy.optimize import brentq, minimize_scalar


def sir_oracle(eps):
    return 1.0 - 2.0 * eps * eps / (1.0 + eps)


def shannon_threshold_oracle(rate):
    """Root of sir(eps) = rate, found numerically rather than in closed form."""
    return brentq(lambda e: sir_oracle(e) - rate, 1e-12, 1.0 - 1e-12, xtol=1e-15)


def bec_threshold_oracle(dl, dr):
    """BEC DE threshold as the minimum of x / g(x) with g the one-step gain.

    x' = eps * (1 - (1-x)^(dr-1))^(dl-1) stays below x for all x in (0,1]
    exactly when eps < min_x x / (1 - (1-x)^(dr-1))^(dl-1).
    """
    def ratio(x):
        return x / (1.0 - (1.0 - x) ** (dr - 1)) ** (dl - 1)

    grid = np.linspace(1e-9, 1.0, 200001)
    vals = np.array([ratio(x) for x in grid])
    k = int(np.argmin(vals))
    lo = grid[max(k - 1, 0)]
    hi = grid[min(k + 1, grid.size - 1)]
    res = minimize_scalar(ratio, bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-14})
    return float(res.fun)


def dec_threshold_scalar_oracle(dl, dr, tol_eps=1e-8):
    """Plain-python bisection on scalar forward DE for the dicode channel."""
    def decodes(eps):
        x = 1.0
        for _ in range(200000):
            y = 1.0 - (1.0 - x) ** (dr - 1)
            xn = (4.0 * eps * eps / (2.0 - (y ** dl) * (1.0 - eps)) ** 2) * y ** (dl - 1)
            if xn < 1e-10:
                return True
            if abs(xn - x) < 1e-13:
                return False
            x = xn
        return False

    lo, hi = 0.0, 1.0
    while hi - lo > tol_eps:
        mid = 0.5 * (lo + hi)
        if decodes(mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def lemma2_bound_oracle(dl, dr):
    s = math.sqrt(dr - 1)
    denom = s * (1.0 - (dl - 1) * math.exp(-s))
    return min(1.0, math.sqrt(1.0 / denom))


def design_rate_counting_oracle(dl, dr, L, w):
    """Design rate from expected counts of degree->=1 check nodes per position.

    Each of the 2L+1 variable positions spreads M*dl stubs uniformly over w
    check positions; position c is covered by m_c variable positions, so each
    of its M*dl sockets is occupied with probability m_c/w in the M->inf
    limit.  A check contributes a constraint iff any of its dr sockets is
    occupied.
    """
    n_v = 2 * L + 1
    constraints = 0.0
    for c in range(2 * L + w):
        m_c = min(c, 2 * L + w - 1 - c, w - 1, 2 * L) + 1
        rho = m_c / w
        constraints += 1.0 - (1.0 - rho) ** dr
    return 1.0 - (dl / dr) * constraints / n_v


def dicode_symbols_oracle(bits):
    """(n,) 0/1 payload -> (n+1,) symbols with known-zero start and flush."""
    ext = [0] + list(bits) + [0]
    m = [2 * b - 1 for b in ext]
    return np.array([(m[i + 1] - m[i]) // 2 for i in range(len(m) - 1)])


def brute_force_detector(symbols, erased, prior_known, prior_val):
    """Exhaustive per-bit extrinsic determinability for one short section.

    A payload bit k is extrinsically known iff every bit assignment consistent
    with the unerased symbols and the priors at positions other than k agrees
    on bit k.  O(2^n); keep n <= 12.
    """
    n = len(symbols) - 1
    known = np.zeros(n, bool)
    vals = np.zeros(n, np.int8)
    for k in range(n):
        survivors = []
        for cand in itertools.product((0, 1), repeat=n):
            ys = dicode_symbols_oracle(cand)
            if any((not erased[j]) and ys[j] != symbols[j] for j in range(n + 1)):
                continue
            if any(prior_known[j] and j != k and cand[j] != prior_val[j]
                   for j in range(n)):
                continue
            survivors.append(cand[k])
        if survivors and all(s == survivors[0] for s in survivors):
            known[k] = True
            vals[k] = survivors[0]
    return known, vals
