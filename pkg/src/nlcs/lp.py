"""Primal-dual interior-point solver for standard-form linear programs.

Solves

    minimize    c'x
    subject to  A x = b,  x >= 0

with A of full row rank, using Mehrotra's predictor-corrector method: the
affine-scaling (predictor) direction sets the centering weight
sigma = (mu_aff/mu)^3 and a corrector step reuses the same factorization.

Numerical design, chosen for the badly column-scaled systems the l1 decoder
produces:

* the normal-equations system A diag(x/s) A' dy = r is solved through the
  triangular factor R of a QR factorization of diag(sqrt(x/s)) A', whose
  condition number is the square root of that of the normal matrix, with
  one pass of iterative refinement on top;
* convergence is declared on relative primal/dual residuals plus the
  complementarity measure x's / (1 + |c'x|), the standard gap proxy that
  stays meaningful when cancellation pollutes c'x - b'y;
* the best iterate (by the max of those three measures) is tracked, and a
  sharp merit blow-up (a Newton step computed beyond working precision)
  aborts the loop, returning the best iterate with status "max_iter".

The method is deterministic: pure dense numpy, no randomness.  Only the
feasible-and-bounded case matters for the callers in this package (the l1
decoder always produces such programs), so the statuses are just
"converged" and "max_iter".
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["LpResult", "solve_standard_form"]


@dataclass
class LpResult:
    x: np.ndarray
    y: np.ndarray
    s: np.ndarray
    status: str  # converged | max_iter
    iterations: int
    primal_objective: float


def _max_step(v: np.ndarray, dv: np.ndarray) -> float:
    neg = dv < 0
    if not neg.any():
        return 1.0
    return float(min(1.0, (-v[neg] / dv[neg]).min()))


def _cholesky_solver(M: np.ndarray):
    jitter = 0.0
    base = max(float(np.trace(M)) / M.shape[0], 1.0)
    for _ in range(10):
        try:
            L = np.linalg.cholesky(M if jitter == 0.0 else M + jitter * np.eye(M.shape[0]))
            return lambda r: np.linalg.solve(L.T, np.linalg.solve(L, r))
        except np.linalg.LinAlgError:
            jitter = max(jitter * 10.0, 1e-14 * base)
    raise np.linalg.LinAlgError("normal equations not positive definite even with jitter")


def solve_standard_form(A, b, c, *, feas_tol: float = 1e-8, opt_tol: float = 1e-8,
                        max_iter: int = 200) -> LpResult:
    A = np.asarray(A, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    c = np.asarray(c, dtype=np.float64)
    m, n = A.shape
    if m == 0:
        # no constraints: with c >= 0 the optimum is x = 0
        return LpResult(np.zeros(n), np.zeros(0), c.copy(), "converged", 0, 0.0)

    # Mehrotra's heuristic starting point
    solve0 = _cholesky_solver(A @ A.T)
    x = A.T @ solve0(b)
    y = solve0(A @ c)
    s = c - A.T @ y
    x = x + max(-1.5 * float(x.min()), 0.0)
    s = s + max(-1.5 * float(s.min()), 0.0)
    xs = float(x @ s)
    x = x + (0.5 * xs / max(float(s.sum()), 1e-12) if xs > 0 else 1.0)
    s = s + (0.5 * xs / max(float(x.sum()), 1e-12) if xs > 0 else 1.0)
    if x.min() <= 0:
        x = x + (1.0 - x.min())
    if s.min() <= 0:
        s = s + (1.0 - s.min())

    bn = 1.0 + float(np.linalg.norm(b))
    cn = 1.0 + float(np.linalg.norm(c))
    best = None  # (merit, x, y, s, iteration)
    it = 0
    for it in range(1, max_iter + 1):
        rp = b - A @ x
        rd = c - A.T @ y - s
        mu = float(x @ s) / n
        pr = float(np.linalg.norm(rp)) / bn
        dr = float(np.linalg.norm(rd)) / cn
        mu_rel = float(x @ s) / (1.0 + abs(float(c @ x)))
        merit = max(pr, dr, mu_rel)
        if best is None or merit < best[0]:
            best = (merit, x.copy(), y.copy(), s.copy(), it - 1)
        if pr <= feas_tol and dr <= feas_tol and mu_rel <= opt_tol:
            return LpResult(x, y, s, "converged", it - 1, float(c @ x))
        if merit > 1e6 * best[0]:
            break  # the last step was beyond working precision; keep the best iterate

        d = np.clip(x / s, 1e-300, 1e300)
        try:
            R = np.linalg.qr((A * np.sqrt(d)).T, mode="r")

            def nsolve(rhs):
                dy = np.linalg.solve(R, np.linalg.solve(R.T, rhs))
                resid = rhs - (A * d) @ (A.T @ dy)
                return dy + np.linalg.solve(R, np.linalg.solve(R.T, resid))

        except np.linalg.LinAlgError:
            nsolve = _cholesky_solver((A * d) @ A.T)

        def newton(rc):
            dy = nsolve(rp - A @ ((rc - x * rd) / s))
            ds_ = rd - A.T @ dy
            dx_ = (rc - x * ds_) / s
            return dx_, dy, ds_

        # predictor (affine scaling)
        dx_a, _, ds_a = newton(-x * s)
        ap = _max_step(x, dx_a)
        ad = _max_step(s, ds_a)
        mu_aff = float((x + ap * dx_a) @ (s + ad * ds_a)) / n
        sigma = (mu_aff / mu) ** 3 if mu > 0 else 0.0

        # corrector with centering
        dx_c, dy_c, ds_c = newton(-x * s - dx_a * ds_a + sigma * mu)
        eta = 0.9995
        ap = min(1.0, eta * _max_step(x, dx_c))
        ad = min(1.0, eta * _max_step(s, ds_c))
        x = x + ap * dx_c
        y = y + ad * dy_c
        s = s + ad * ds_c

    _, bx, by, bs, bit = best
    return LpResult(bx, by, bs, "max_iter", bit, float(c @ bx))
