"""Epsilon-insensitive support vector regression solved by SMO.

The dual is written over ``2n`` variables ``a = (alpha, alpha*)`` with signs
``z = (+1, ..., -1, ...)``::

    min  1/2 a^T Q a + p^T a,   Q_st = z_s z_t K(x_s, x_t)
    s.t. z^T a = 0,  0 <= a <= C,  p = (eps - y, eps + y)

Working pairs are chosen with second-order information (Fan, Chen and Lin,
JMLR 2005). The regression function is ``sum_i beta_i K(x_i, x) - rho``
with ``beta_i = alpha_i - alpha*_i``.
"""
from __future__ import annotations

import numpy as np
from numba import njit

TAU = 1e-12


class SvrNotConverged(RuntimeError):
    def __init__(self, iterations: int, violation: float):
        super().__init__(f"SMO stopped after {iterations} iterations with KKT violation {violation:.3g}")
        self.iterations = iterations
        self.violation = violation


def linear_kernel(A, B):
    return A @ B.T


def rbf_kernel(A, B, gamma):
    sq = (A * A).sum(1)[:, None] + (B * B).sum(1)[None, :] - 2 * A @ B.T
    return np.exp(-gamma * np.maximum(sq, 0.0))


class EpsilonSVR:
    def __init__(self, C: float = 1.0, epsilon: float = 0.1, kernel: str = "linear",
                 gamma: float | None = None, tol: float = 1e-3, max_iter: int = 2_000_000):
        if C <= 0 or epsilon < 0 or tol <= 0:
            raise ValueError("need C > 0, epsilon >= 0, tol > 0")
        if kernel not in ("linear", "rbf"):
            raise ValueError(f"unknown kernel {kernel!r}")
        self.C = C
        self.epsilon = epsilon
        self.kernel = kernel
        self.gamma = gamma
        self.tol = tol
        self.max_iter = max_iter

    def _k(self, A, B):
        if self.kernel == "linear":
            return linear_kernel(A, B)
        return rbf_kernel(A, B, self.gamma_)

    def fit(self, X, y):
        X = np.ascontiguousarray(X, dtype=float)
        y = np.asarray(y, dtype=float)
        n = X.shape[0]
        if n == 0 or y.shape != (n,):
            raise ValueError("need a non-empty X and matching y")
        self.gamma_ = self.gamma if self.gamma is not None else 1.0 / X.shape[1]
        C = self.C
        z = np.concatenate([np.ones(n), -np.ones(n)])
        p = np.concatenate([self.epsilon - y, self.epsilon + y])
        a = np.zeros(2 * n)
        G = p.copy()
        kdiag = np.einsum("ij,ij->i", X, X) if self.kernel == "linear" else np.ones(n)
        QD = np.concatenate([kdiag, kdiag])

        a, G, it, conv = _smo(X, self.kernel == "linear", self.gamma_, C, self.tol,
                              self.max_iter, a, G, QD, p)
        if not conv:
            self._store(X, a, G, z)
            raise SvrNotConverged(it, self._gap(a, G, z))
        # the incremental gradient drifts; confirm on one rebuilt from scratch
        G = self._full_gradient(X, a, p, z)
        while self._gap(a, G, z) >= self.tol:
            a, G, more, conv = _smo(X, self.kernel == "linear", self.gamma_, C, self.tol,
                                    self.max_iter - it, a, G, QD, p)
            it += more
            G = self._full_gradient(X, a, p, z)
            if not conv:
                self._store(X, a, G, z)
                raise SvrNotConverged(it, self._gap(a, G, z))

        self.n_iter_ = it
        self._store(X, a, G, z)
        return self

    def _full_gradient(self, X, a, p, z):
        n = X.shape[0]
        beta = a[:n] - a[n:]
        Kb = self._kernel_dot(X, X, beta)
        return p + z * np.concatenate([Kb, Kb])

    def _kernel_dot(self, A, B, coef, chunk=2048):
        if self.kernel == "linear":
            return A @ (B.T @ coef)
        out = np.empty(A.shape[0])
        for s in range(0, A.shape[0], chunk):
            out[s:s + chunk] = self._k(A[s:s + chunk], B) @ coef
        return out

    def _gap(self, a, G, z):
        C = self.C
        mzg = -z * G
        up = np.where(z > 0, a < C, a > 0)
        low = np.where(z > 0, a > 0, a < C)
        if not up.any() or not low.any():
            return 0.0
        return float(mzg[up].max() - mzg[low].min())

    def _store(self, X, a, G, z):
        n = X.shape[0]
        C = self.C
        beta = a[:n] - a[n:]
        zg = z * G
        upper = a >= C
        lower = a <= 0
        free = ~upper & ~lower
        if free.any():
            rho = float(zg[free].mean())
        else:
            ub_mask = (upper & (z < 0)) | (lower & (z > 0))
            lb_mask = (upper & (z > 0)) | (lower & (z < 0))
            ub = zg[ub_mask].min() if ub_mask.any() else np.inf
            lb = zg[lb_mask].max() if lb_mask.any() else -np.inf
            rho = float((ub + lb) / 2)
        sv = beta != 0
        self.alpha_ = a
        self.dual_coef_ = beta[sv]
        self.support_vectors_ = X[sv]
        self.support_ = np.nonzero(sv)[0]
        self.rho_ = rho
        self.intercept_ = -rho
        if self.kernel == "linear":
            self.coef_ = self.support_vectors_.T @ self.dual_coef_

    def decision_function(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if self.kernel == "linear":
            return X @ self.coef_ + self.intercept_
        if self.dual_coef_.size == 0:
            return np.full(X.shape[0], self.intercept_)
        return self._kernel_dot(X, self.support_vectors_, self.dual_coef_) + self.intercept_

    predict = decision_function

    def kkt_violation(self, X, y) -> float:
        """Maximal violating-pair gap recomputed from the stored dual point."""
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=float)
        n = X.shape[0]
        z = np.concatenate([np.ones(n), -np.ones(n)])
        p = np.concatenate([self.epsilon - y, self.epsilon + y])
        return self._gap(self.alpha_, self._full_gradient(X, self.alpha_, p, z), z)

    def to_dict(self) -> dict:
        d = {"C": self.C, "epsilon": self.epsilon, "kernel": self.kernel,
             "gamma": self.gamma_, "tol": self.tol, "max_iter": self.max_iter,
             "rho": self.rho_, "dual_coef": self.dual_coef_.tolist()}
        if self.kernel == "linear":
            d["coef"] = self.coef_.tolist()
        else:
            d["support_vectors"] = self.support_vectors_.tolist()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "EpsilonSVR":
        m = cls(d["C"], d["epsilon"], d["kernel"], d["gamma"], d["tol"], d["max_iter"])
        m.gamma_ = d["gamma"]
        m.rho_ = d["rho"]
        m.intercept_ = -m.rho_
        m.dual_coef_ = np.array(d["dual_coef"], dtype=float)
        if m.kernel == "linear":
            m.coef_ = np.array(d["coef"], dtype=float)
            m.support_vectors_ = np.empty((0, m.coef_.size))
        else:
            m.support_vectors_ = np.array(d["support_vectors"], dtype=float)
        return m


@njit(cache=True)
def _kval(X, s, t, linear, gamma):
    acc = 0.0
    if linear:
        for f in range(X.shape[1]):
            acc += X[s, f] * X[t, f]
        return acc
    for f in range(X.shape[1]):
        diff = X[s, f] - X[t, f]
        acc += diff * diff
    return np.exp(-gamma * acc)


@njit(cache=True)
def _rebuild(X, linear, gamma, a, p, G):
    n, d = X.shape
    beta = a[:n] - a[n:]
    if linear:
        w = np.zeros(d)
        for s in range(n):
            if beta[s] != 0.0:
                for f in range(d):
                    w[f] += beta[s] * X[s, f]
        for t in range(n):
            acc = 0.0
            for f in range(d):
                acc += X[t, f] * w[f]
            G[t] = p[t] + acc
            G[t + n] = p[t + n] - acc
    else:
        for t in range(n):
            acc = 0.0
            for s in range(n):
                if beta[s] != 0.0:
                    acc += beta[s] * _kval(X, s, t, linear, gamma)
            G[t] = p[t] + acc
            G[t + n] = p[t + n] - acc


@njit(cache=True)
def _in_up(t, n, a, C):
    return a[t] < C if t < n else a[t] > 0


@njit(cache=True)
def _in_low(t, n, a, C):
    return a[t] > 0 if t < n else a[t] < C


@njit(cache=True)
def _smo(X, linear, gamma, C, tol, max_iter, a, G, QD, p):
    """SMO iterations on (a, G) in place; returns (a, G, iterations, converged).

    Variables stuck at a bound are shrunk out of the working set as in
    LIBSVM; the full gradient is rebuilt before convergence is declared.
    """
    n = X.shape[0]
    l = 2 * n
    act = np.arange(l)
    na = l
    Ki = np.empty(l)
    Kj = np.empty(l)
    it = 0
    counter = min(l, 1000)
    unshrunk = False
    recheck = False
    while True:
        if not recheck:
            counter -= 1
        if counter == 0:
            counter = min(l, 1000)
            g1 = -np.inf
            g2 = -np.inf
            for k in range(na):
                t = act[k]
                zt = 1.0 if t < n else -1.0
                if _in_up(t, n, a, C) and -zt * G[t] > g1:
                    g1 = -zt * G[t]
                if _in_low(t, n, a, C) and zt * G[t] > g2:
                    g2 = zt * G[t]
            if not unshrunk and g1 + g2 <= 10 * tol:
                unshrunk = True
                _rebuild(X, linear, gamma, a, p, G)
                na = l
                for k in range(l):
                    act[k] = k
            k = 0
            while k < na:
                t = act[k]
                zt = 1.0 if t < n else -1.0
                drop = False
                if a[t] >= C:
                    drop = -G[t] > (g1 if zt > 0 else g2)
                elif a[t] <= 0:
                    drop = G[t] > (g2 if zt > 0 else g1)
                if drop:
                    na -= 1
                    act[k] = act[na]
                    act[na] = t
                else:
                    k += 1

        # working set selection, second order (WSS2)
        gmax = -np.inf
        gmin = np.inf
        i = -1
        for k in range(na):
            t = act[k]
            zt = 1.0 if t < n else -1.0
            mzg = -zt * G[t]
            if _in_up(t, n, a, C) and mzg > gmax:
                gmax = mzg
                i = t
            if _in_low(t, n, a, C) and mzg < gmin:
                gmin = mzg
        if i < 0 or gmax - gmin < tol:
            if na == l:
                return a, G, it, True
            _rebuild(X, linear, gamma, a, p, G)
            na = l
            for k in range(l):
                act[k] = k
            recheck = True
            continue
        if recheck:
            recheck = False
            counter = 1
        if it >= max_iter:
            return a, G, it, False
        si = i % n
        for k in range(na):
            t = act[k]
            Ki[t] = _kval(X, si, t % n, linear, gamma)
        j = -1
        best = np.inf
        for k in range(na):
            t = act[k]
            zt = 1.0 if t < n else -1.0
            if _in_low(t, n, a, C):
                gd = gmax + zt * G[t]
                if gd > 0:
                    q = QD[i] + QD[t] - 2.0 * Ki[t]
                    if q <= 0:
                        q = TAU
                    obj = -gd * gd / q
                    if obj < best:
                        best = obj
                        j = t
        if j < 0:
            if na == l:
                return a, G, it, True
            _rebuild(X, linear, gamma, a, p, G)
            na = l
            for k in range(l):
                act[k] = k
            recheck = True
            continue
        sj = j % n
        for k in range(na):
            t = act[k]
            Kj[t] = _kval(X, sj, t % n, linear, gamma)
        zi = 1.0 if i < n else -1.0
        zj = 1.0 if j < n else -1.0
        Kij = Ki[j]
        ai_old = a[i]
        aj_old = a[j]
        quad = QD[i] + QD[j] - 2.0 * Kij
        if quad <= 0:
            quad = TAU
        if zi != zj:
            delta = (-G[i] - G[j]) / quad
            diff = a[i] - a[j]
            a[i] += delta
            a[j] += delta
            if diff > 0:
                if a[j] < 0:
                    a[j] = 0.0
                    a[i] = diff
            elif a[i] < 0:
                a[i] = 0.0
                a[j] = -diff
            if diff > 0:
                if a[i] > C:
                    a[i] = C
                    a[j] = C - diff
            elif a[j] > C:
                a[j] = C
                a[i] = C + diff
        else:
            delta = (G[i] - G[j]) / quad
            s = a[i] + a[j]
            a[i] -= delta
            a[j] += delta
            if s > C:
                if a[i] > C:
                    a[i] = C
                    a[j] = s - C
            elif a[j] < 0:
                a[j] = 0.0
                a[i] = s
            if s > C:
                if a[j] > C:
                    a[j] = C
                    a[i] = s - C
            elif a[i] < 0:
                a[i] = 0.0
                a[j] = s
        ci = zi * (a[i] - ai_old)
        cj = zj * (a[j] - aj_old)
        for k in range(na):
            t = act[k]
            zt = 1.0 if t < n else -1.0
            G[t] += zt * (ci * Ki[t] + cj * Kj[t])
        it += 1
