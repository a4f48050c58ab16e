"""Interior-point warm start for the linear SVM dual.

Mehrotra predictor-corrector on

    min_a  1/2 |Z'a|^2 - sum(a)   s.t.  y'a = 0,  0 <= a <= ub

where Z = y * X has only d columns, so every Newton system (D + Z Z') is
solved through the d x d Woodbury capacitance matrix.
"""
import numpy as np


def _solver(Z, D):
    Dinv = 1.0 / D
    ZD = Z * Dinv[:, None]
    cap = np.eye(Z.shape[1]) + Z.T @ ZD
    cho = np.linalg.cholesky(cap)

    def solve(b):
        t = np.linalg.solve(cho.T, np.linalg.solve(cho, ZD.T @ b))
        return Dinv * b - ZD @ t

    return solve


def _max_step(x, dx):
    neg = dx < 0
    if not neg.any():
        return 1.0
    return min(1.0, float(np.min(-x[neg] / dx[neg])))


def ipm_dual(X, y, ub, max_iter=60, rtol=1e-10):
    """Approximately optimal, strictly interior dual point ``alpha``.

    Only used as a warm start: numerical trouble ends the iteration early,
    and the iterate with the smallest max(complementarity, dual residual)
    is returned.
    """
    n = X.shape[0]
    Z = X * y[:, None]
    # the upper slack is its own variable: ub - a cancels to 0 near the bound
    a = 0.5 * ub
    s = 0.5 * ub
    z = np.ones(n)
    v = np.ones(n)
    beta = 0.0
    scale = 1.0 + float(ub.max())
    best, best_merit = a, np.inf

    for _ in range(max_iter):
        w = Z.T @ a
        rd = Z @ w - 1.0 + beta * y - z + v
        rp = float(y @ a)
        mu = (a @ z + s @ v) / (2 * n)
        merit = max(mu, float(np.abs(rd).max()))
        if merit < best_merit:
            best, best_merit = a, merit
        if merit < rtol * scale:
            break

        try:
            solve = _solver(Z, z / a + v / s)
        except np.linalg.LinAlgError:
            break
        hy = solve(y)
        yhy = float(y @ hy)

        def direction(rc1, rc2):
            r = -rd + rc1 / a - rc2 / s
            hr = solve(r)
            db = (float(y @ hr) + rp) / yhy
            da = hr - db * hy
            dz = (rc1 - z * da) / a
            dv = (rc2 + v * da) / s
            return da, db, dz, dv

        with np.errstate(all="ignore"):
            # predictor
            da, db, dz, dv = direction(-a * z, -s * v)
            ap = min(_max_step(a, da), _max_step(s, -da))
            ad = min(_max_step(z, dz), _max_step(v, dv))
            mu_aff = ((a + ap * da) @ (z + ad * dz) + (s - ap * da) @ (v + ad * dv)) / (2 * n)
            sigma = (mu_aff / mu) ** 3

            # corrector
            da, db, dz, dv = direction(sigma * mu - a * z - da * dz, sigma * mu - s * v + da * dv)
            ap = 0.995 * min(_max_step(a, da), _max_step(s, -da))
            ad = 0.995 * min(_max_step(z, dz), _max_step(v, dv))
            na, ns = a + ap * da, s - ap * da
            nz, nv = z + ad * dz, v + ad * dv
        if not all(np.all(np.isfinite(t)) and np.all(t > 0) for t in (na, ns, nz, nv)):
            break
        a, s, z, v = na, ns, nz, nv
        beta += ad * db
    return np.clip(best, 0.0, ub)


def snap(alpha, y, ub, rel=1e-7):
    """Push near-bound entries onto their bounds and restore y'a = 0."""
    a = np.clip(alpha, 0.0, ub)
    a[a <= rel * ub] = 0.0
    a[a >= (1 - rel) * ub] = ub[a >= (1 - rel) * ub]
    r = float(y @ a)
    # move the residual onto whichever entries still have room, largest first
    for _ in range(3):
        if r == 0.0:
            break
        # r > 0: lower positives or raise negatives; r < 0: the reverse
        room = np.where((y > 0) == (r > 0), a, ub - a)
        order = np.argsort(-room, kind="stable")
        for t in order:
            if r == 0.0 or room[t] <= 0:
                break
            step = min(room[t], abs(r))
            if (y[t] > 0) == (r > 0):
                a[t] -= step
            else:
                a[t] += step
            r = float(y @ a)
    return a
