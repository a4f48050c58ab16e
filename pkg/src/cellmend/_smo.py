"""Linear-kernel SMO inner loop.

Solves the bias-carrying soft-margin dual

    min_a  1/2 a'Qa - sum(a)   s.t.  y'a = 0,  0 <= a_i <= ub_i

with Q_ij = y_i y_j <x_i, x_j>, using the second-order working set
selection, clipping and shrinking rules of LIBSVM (Fan, Chen & Lin 2005).
The linear kernel lets us carry w = sum a_i y_i x_i explicitly, so each
step costs O(n_active d), and unshrinking only needs G = y * (X w) - 1.
"""
import numpy as np
from numba import njit

TAU = 1e-12
INF = np.inf


@njit(cache=True)
def _in_up(yt, at, ut):
    return at < ut if yt > 0 else at > 0


@njit(cache=True)
def _in_low(yt, at, ut):
    return at > 0 if yt > 0 else at < ut


@njit(cache=True)
def _select(X, y, ub, alpha, G, sqn, act, n_act):
    """Working pair (i, j) and the maximal KKT violation over the active set."""
    d = X.shape[1]
    gmax = -INF
    i = -1
    for k in range(n_act):
        t = act[k]
        if _in_up(y[t], alpha[t], ub[t]):
            v = -y[t] * G[t]
            if v > gmax:
                gmax = v
                i = t
    if i < 0:
        return -1, -1, 0.0

    gmax2 = -INF
    obj_min = INF
    j = -1
    for k in range(n_act):
        t = act[k]
        if not _in_low(y[t], alpha[t], ub[t]):
            continue
        yg = y[t] * G[t]
        if yg > gmax2:
            gmax2 = yg
        grad_diff = gmax + yg
        if grad_diff > 0:
            kit = 0.0
            for c in range(d):
                kit += X[i, c] * X[t, c]
            quad = sqn[i] + sqn[t] - 2.0 * kit
            if quad <= 0:
                quad = TAU
            o = -(grad_diff * grad_diff) / quad
            if o < obj_min:
                obj_min = o
                j = t
    if gmax2 == -INF:
        return i, -1, 0.0
    return i, j, gmax + gmax2


@njit(cache=True)
def _refresh(X, y, alpha, w, G):
    """Recompute w and the full gradient from alpha."""
    n, d = X.shape
    for c in range(d):
        w[c] = 0.0
    for t in range(n):
        if alpha[t] != 0.0:
            s = alpha[t] * y[t]
            for c in range(d):
                w[c] += s * X[t, c]
    for t in range(n):
        acc = 0.0
        for c in range(d):
            acc += X[t, c] * w[c]
        G[t] = y[t] * acc - 1.0


@njit(cache=True)
def _shrink(y, ub, alpha, G, act, n_act):
    gmax1 = -INF
    gmax2 = -INF
    for k in range(n_act):
        t = act[k]
        yg = y[t] * G[t]
        if _in_up(y[t], alpha[t], ub[t]) and -yg > gmax1:
            gmax1 = -yg
        if _in_low(y[t], alpha[t], ub[t]) and yg > gmax2:
            gmax2 = yg
    k = 0
    while k < n_act:
        t = act[k]
        out = False
        if alpha[t] >= ub[t]:
            out = -G[t] > gmax1 if y[t] > 0 else -G[t] > gmax2
        elif alpha[t] <= 0:
            out = G[t] > gmax2 if y[t] > 0 else G[t] > gmax1
        if out:
            n_act -= 1
            act[k] = act[n_act]
            act[n_act] = t
        else:
            k += 1
    return n_act, gmax1 + gmax2


@njit(cache=True)
def _dual_obj(alpha, w):
    return 0.5 * np.dot(w, w) - alpha.sum()


@njit(cache=True)
def smo(X, y, ub, alpha0, tol, max_iter, check_every, shrinking):
    """Run from the feasible point ``alpha0``.

    Returns (alpha, w, iterations, kkt_violation, objective_history).
    """
    n, d = X.shape
    alpha = alpha0.copy()
    w = np.zeros(d)
    dw = np.zeros(d)
    G = np.empty(n)
    _refresh(X, y, alpha, w, G)
    sqn = np.empty(n)
    for t in range(n):
        sqn[t] = np.dot(X[t], X[t])
    act = np.arange(n)
    n_act = n

    hist = np.empty(max_iter // check_every + 4)
    nh = 0
    hist[nh] = _dual_obj(alpha, w)
    nh += 1

    shrink_every = min(n, 1000)
    counter = shrink_every
    unshrunk = False
    it = 0
    viol = INF
    while True:
        if shrinking:
            counter -= 1
            if counter == 0:
                counter = shrink_every
                n_act, v = _shrink(y, ub, alpha, G, act, n_act)
                if not unshrunk and v <= 10 * tol:
                    # close to the end: bring everything back once
                    unshrunk = True
                    _refresh(X, y, alpha, w, G)
                    n_act = n
                    n_act, v = _shrink(y, ub, alpha, G, act, n_act)

        i, j, viol = _select(X, y, ub, alpha, G, sqn, act, n_act)
        if i < 0 or j < 0 or viol <= tol:
            # incremental updates drift and shrunk variables may violate:
            # confirm on the full, freshly computed state
            _refresh(X, y, alpha, w, G)
            n_act = n
            i, j, viol = _select(X, y, ub, alpha, G, sqn, act, n_act)
            if i < 0 or j < 0 or viol <= tol:
                break
            counter = 1
        if it >= max_iter:
            break
        it += 1

        kij = 0.0
        for c in range(d):
            kij += X[i, c] * X[j, c]
        Ci = ub[i]
        Cj = ub[j]
        old_ai = alpha[i]
        old_aj = alpha[j]
        ai = old_ai
        aj = old_aj
        quad = sqn[i] + sqn[j] - 2.0 * kij
        if quad <= 0:
            quad = TAU
        if y[i] != y[j]:
            delta = (-G[i] - G[j]) / quad
            diff = ai - aj
            ai += delta
            aj += delta
            if diff > 0:
                if aj < 0:
                    aj = 0.0
                    ai = diff
            else:
                if ai < 0:
                    ai = 0.0
                    aj = -diff
            if diff > Ci - Cj:
                if ai > Ci:
                    ai = Ci
                    aj = Ci - diff
            else:
                if aj > Cj:
                    aj = Cj
                    ai = Cj + diff
        else:
            delta = (G[i] - G[j]) / quad
            s = ai + aj
            ai -= delta
            aj += delta
            if s > Ci:
                if ai > Ci:
                    ai = Ci
                    aj = s - Ci
            else:
                if aj < 0:
                    aj = 0.0
                    ai = s
            if s > Cj:
                if aj > Cj:
                    aj = Cj
                    ai = s - Cj
            else:
                if ai < 0:
                    ai = 0.0
                    aj = s
        alpha[i] = ai
        alpha[j] = aj

        dai = (ai - old_ai) * y[i]
        daj = (aj - old_aj) * y[j]
        for c in range(d):
            dw[c] = dai * X[i, c] + daj * X[j, c]
            w[c] += dw[c]
        for k in range(n_act):
            t = act[k]
            acc = 0.0
            for c in range(d):
                acc += X[t, c] * dw[c]
            G[t] += y[t] * acc

        if it % check_every == 0:
            hist[nh] = _dual_obj(alpha, w)
            nh += 1

    hist[nh] = _dual_obj(alpha, w)
    nh += 1
    return alpha, w, it, viol, hist[:nh].copy()
