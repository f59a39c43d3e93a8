"""Pure NumPy backend for the hot kernels.

Drop-in twin of the compiled module ``_solve``: same signatures, same
bracketing and bisection decisions, so results agree to the last ulp in
practice. Selected automatically when the extension is unavailable or
when ``ORLICZ_PURE_PYTHON=1``.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "numpy"


def solve_separable(alphas, powers, vals, tau0_val, is_psi, max_iter=200):
    """Roots of ``sum_j alpha_j (v_j / lam)^p_j = 1`` for every column.

    ``vals`` has shape (m, N). Columns that sum to zero return 0 in the
    increasing case (callers guarantee strictly positive input in the
    decreasing case). The exactly-linear case (all powers 1) is
    accumulated directly so no root-finding noise enters difference
    quotients downstream.
    """
    alphas = np.asarray(alphas, dtype=float)
    powers = np.asarray(powers, dtype=float)
    vals = np.asarray(vals, dtype=float)
    m, n = vals.shape
    lam = np.zeros(n)
    sums = vals.sum(axis=0)
    active = np.ones(n, dtype=bool) if is_psi else sums > 0.0
    if not np.any(active):
        return lam

    if np.all(powers == 1.0):
        lam[active] = (alphas[:, None] * vals[:, active]).sum(axis=0)
        return lam

    sub = vals[:, active]
    a = alphas[:, None]
    p = powers[:, None]

    def g(lamv: np.ndarray) -> np.ndarray:
        with np.errstate(over="ignore", divide="ignore"):
            return np.sum(a * (sub / lamv[None, :]) ** p, axis=0)

    hi = sums[active] / tau0_val
    lo = hi.copy()
    # walk the lower end down until the residual sign flips
    need = np.ones(lo.shape[0], dtype=bool)
    for _ in range(max_iter):
        if not np.any(need):
            break
        lo[need] *= 0.5
        gv = g(lo)
        need &= (gv < 1.0) if not is_psi else (gv > 1.0)
    # the walk flips inside a factor-2 window, so the root lies in
    # [lo, 2*lo]; tightening hi keeps the bisection count bounded even
    # when the root sits many orders below the initial bracket
    hi = 2.0 * lo

    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        splittable = (mid > lo) & (mid < hi)
        if not np.any(splittable):
            break
        gm = g(mid)
        go_up = (gm >= 1.0) if not is_psi else (gm <= 1.0)
        lo = np.where(splittable & go_up, mid, lo)
        hi = np.where(splittable & ~go_up, mid, hi)

    lam[active] = 0.5 * (lo + hi)
    return lam


def legendre_envelope(xs, psi, ys, block=2048):
    """Brute-force discrete Legendre transform.

    For every row ``y`` of ``ys`` returns ``max_j (<y, x_j> - psi_j)``
    over all rows ``x_j`` of ``xs``, together with the argmax index
    (first winner on ties). Blocked matrix products keep memory flat.
    """
    xs = np.ascontiguousarray(xs, dtype=float)
    psi = np.ascontiguousarray(psi, dtype=float)
    ys = np.ascontiguousarray(ys, dtype=float)
    m = ys.shape[0]
    vals = np.empty(m)
    idx = np.empty(m, dtype=np.int64)
    for start in range(0, m, block):
        stop = min(start + block, m)
        scores = ys[start:stop] @ xs.T
        scores -= psi[None, :]
        k = np.argmax(scores, axis=1)
        rows = np.arange(stop - start)
        vals[start:stop] = scores[rows, k]
        idx[start:stop] = k
    return vals, idx
