"""Non-commutative Newton iteration for matrix roots of nc rational equations.

Truncating ``f(x + b) = f(x) + d_{x|b} f(x) + ...`` after the linear term
gives the step system ``g = f + d_{x|b} f``.  At an iterate ``X`` the step
``B`` solves ``g(X, B) = 0``, a generalized Sylvester equation linear in
``B``.  Two solvers are provided:

* probe: evaluate the linear part on the ``m**2`` unit matrices and solve the
  vectorized system by minimum-norm least squares;
* P/Q: find block transformations ``P(T)``, ``Q(U)`` that annihilate the
  upper-right block of ``P A(B, X) Q``; linear in ``(B, T, U)`` when the
  pattern avoids bilinear products.
"""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, field as dc_field
from typing import Mapping

import numpy as np

from . import field
from .als import Als, als_add, als_const, als_letter, als_mul
from .derivation import formal_derivative
from .errors import MaxIterExceeded, PatternBilinear, SingularIterate, SingularMatrix, SingularPencil, StepSingular
from .evaluation import als_eval, als_equal
from .minimize import minimize

log = logging.getLogger(__name__)

DEFAULT_TOL = 1e-12
DEFAULT_MAX_ITER = 50
DIVERGENCE_LEVEL = 1e6
DIVERGENCE_RUN = 3
STEP_RESIDUAL_RTOL = 1e-8
# absolute floor for the residual check once f(X) is at rounding level
STEP_RESIDUAL_ATOL = 1e-10


def build_step_system(f: Als, x: str, b: str) -> Als:
    """Minimal system for ``g = f + d_{x|b} f``."""
    if b in f.support():
        raise ValueError(f"direction letter {b!r} already occurs in f")
    return minimize(als_add(f.with_letters(list(f.letters) + ([b] if b not in f.letters else [])),
                            formal_derivative(f, x, b)))


# ---------------------------------------------------------------- problem and trace


@dataclass
class NewtonProblem:
    f: Als
    unknown: str
    X0: np.ndarray
    params: dict = dc_field(default_factory=dict)
    direction: str = "b"
    tol: float = DEFAULT_TOL
    max_iter: int = DEFAULT_MAX_ITER
    reference: np.ndarray | None = None
    commutator: str | None = None
    strict: bool = False

    def __post_init__(self):
        self.X0 = np.asarray(self.X0, dtype=float)
        self.params = {k: np.asarray(v, dtype=float) for k, v in self.params.items()}
        if self.reference is not None:
            self.reference = np.asarray(self.reference, dtype=float)
        if self.direction in self.f.support():
            raise ValueError(f"direction letter {self.direction!r} occurs in f")
        missing = [y for y in self.f.support() if y != self.unknown and y not in self.params]
        if missing:
            raise ValueError(f"no parameter matrices for letters {missing}")
        if self.commutator is not None and self.commutator not in self.params:
            raise ValueError(f"commutator letter {self.commutator!r} is not a parameter")


@dataclass
class TraceRow:
    k: int
    norm_B: float
    norm_err: float | None = None
    norm_comm: float | None = None


@dataclass
class NewtonTrace:
    rows: list = dc_field(default_factory=list)
    status: str = "running"

    def append(self, row: TraceRow):
        self.rows.append(row)

    def __len__(self):
        return len(self.rows)

    def __getitem__(self, k):
        return self.rows[k]

    @property
    def converged(self) -> bool:
        return self.status == "converged"

    def column(self, name: str) -> list:
        return [getattr(r, name) for r in self.rows]

    def to_csv(self) -> str:
        buf = io.StringIO()
        cols = ["k", "norm_B"]
        has_err = any(r.norm_err is not None for r in self.rows)
        has_comm = any(r.norm_comm is not None for r in self.rows)
        if has_err:
            cols.append("norm_err")
        if has_comm:
            cols.append("norm_commutator")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for r in self.rows:
            line = [r.k, _fmt(r.norm_B)]
            if has_err:
                line.append(_fmt(r.norm_err))
            if has_comm:
                line.append(_fmt(r.norm_comm))
            w.writerow(line)
        return buf.getvalue()


def _fmt(x) -> str:
    return "" if x is None else repr(float(x))


def _norms(X, problem_ref, comm_mat):
    err = None if problem_ref is None else float(np.linalg.norm(X - problem_ref))
    comm = None if comm_mat is None else float(np.linalg.norm(X @ comm_mat - comm_mat @ X))
    return err, comm


# ---------------------------------------------------------------- probe step


def _sigma(x, b, X, B, params):
    s = {k: np.asarray(v, dtype=float) for k, v in params.items()}
    s[x] = np.asarray(X, dtype=float)
    s[b] = np.asarray(B, dtype=float)
    return s


def _residual_ok(res: float, fnorm: float) -> bool:
    return res <= max(STEP_RESIDUAL_RTOL * fnorm, STEP_RESIDUAL_ATOL)


def step_operator(g: Als, x: str, b: str, X, params) -> tuple[np.ndarray, np.ndarray]:
    """``(L, f(X))``: the vectorized (column-major) linear part of ``g`` in ``b`` and its offset."""
    X = np.asarray(X, dtype=float)
    m = X.shape[0]
    zero = np.zeros((m, m))
    try:
        f0 = als_eval(g, _sigma(x, b, X, zero, params), exact=False)
        cols = []
        for j in range(m):
            for i in range(m):
                e = np.zeros((m, m))
                e[i, j] = 1.0
                cols.append((als_eval(g, _sigma(x, b, X, e, params), exact=False) - f0).reshape(-1, order="F"))
    except SingularPencil as exc:
        raise StepSingular(f"step system not evaluable at the iterate: {exc}") from exc
    return np.stack(cols, axis=1), f0


def newton_step_probe(g: Als, x: str, b: str, X, params) -> np.ndarray:
    """Newton step ``B`` with ``f(X) + L(B) = 0`` from ``m**2`` probes of ``g``."""
    L, f0 = step_operator(g, x, b, X, params)
    m = f0.shape[0]
    rhs = -f0.reshape(-1, order="F")
    vecB = field.lstsq_min_norm(L, rhs)
    res = float(np.linalg.norm(L @ vecB - rhs))
    if not _residual_ok(res, float(np.linalg.norm(f0))):
        raise StepSingular(f"step residual {res:.3e} exceeds tolerance (||f(X)|| = {np.linalg.norm(f0):.3e})")
    return vecB.reshape((m, m), order="F")


# ---------------------------------------------------------------- P/Q step


@dataclass(frozen=True)
class StepPattern:
    """Placement of unknown blocks in ``P`` (``t_blocks``) and ``Q`` (``u_blocks``).

    Block indices refer to the ALS dimension.  Rows ``< split`` form the top
    part, columns ``>= split`` the right part; ``P A Q`` must vanish on the
    top-right part.
    """

    split: int
    t_blocks: tuple
    u_blocks: tuple

    def check(self, g: Als, b: str):
        n = g.dim
        s = self.split
        if not 0 < s < n:
            raise PatternBilinear(f"split {s} outside 1..{n - 1}")
        for i, k in self.t_blocks:
            if not (i < s <= k < n):
                raise PatternBilinear(f"T block ({i},{k}) must sit in the top-right part of P")
        for l, j in self.u_blocks:
            if not (0 < l < s <= j < n):
                raise PatternBilinear(f"U block ({l},{j}) must sit in the top-right part of Q, off the first row")
        nz = _structural(g)
        bz = _structural_letter(g, b)
        for _, k in self.t_blocks:
            for l, _ in self.u_blocks:
                if nz[k, l]:
                    raise PatternBilinear(f"T*A[{k},{l}]*U is bilinear: A[{k},{l}] is not structurally zero")
        for i, k in self.t_blocks:
            if any(bz[k, j] for j in range(s, n)):
                raise PatternBilinear(f"T block ({i},{k}) multiplies entries depending on {b!r}")
        for l, j in self.u_blocks:
            if any(bz[i, l] for i in range(s)):
                raise PatternBilinear(f"U block ({l},{j}) multiplies entries depending on {b!r}")
        v = g.v
        if any(v[i] != 0 for i in range(s)) or any(v[k] != 0 for _, k in self.t_blocks):
            raise PatternBilinear("right-hand side must vanish on the top rows and the T columns")

    @property
    def unknowns_per_m2(self) -> int:
        return 1 + len(self.t_blocks) + len(self.u_blocks)


def _structural(g: Als) -> np.ndarray:
    return np.array([[any(c[i, j] != 0 for c in g.coeffs) for j in range(g.dim)] for i in range(g.dim)])


def _structural_letter(g: Als, b: str) -> np.ndarray:
    blk = g.block(b) if b in g.letters else field.zeros((g.dim, g.dim))
    return np.array([[blk[i, j] != 0 for j in range(g.dim)] for i in range(g.dim)])


def _blocks(g: Als, sigma: Mapping[str, np.ndarray], skip: str, m: int) -> np.ndarray:
    """``A`` evaluated with letter ``skip`` set to zero, as an ``n x n`` array of ``m x m`` blocks."""
    n = g.dim
    out = np.zeros((n, n, m, m))
    cf = field.float_array(g.coeffs)
    out += cf[0][:, :, None, None] * np.eye(m)
    for idx, y in enumerate(g.letters):
        if y == skip:
            continue
        out += cf[idx + 1][:, :, None, None] * np.asarray(sigma[y], dtype=float)
    return out


def newton_step_pq(g: Als, x: str, b: str, X, params, pattern: StepPattern) -> np.ndarray:
    """Newton step from the joint least-squares system in ``(vec B, vec T, vec U)``."""
    pattern.check(g, b)
    X = np.asarray(X, dtype=float)
    m = X.shape[0]
    n, s = g.dim, pattern.split
    sigma = _sigma(x, b, X, np.zeros((m, m)), params)
    A = _blocks(g, sigma, b, m)
    ab = field.float_array(g.block(b)) if b in g.letters else np.zeros((n, n))
    eye = np.eye(m)
    mm = m * m
    t_index = {blk: 1 + q for q, blk in enumerate(pattern.t_blocks)}
    u_index = {blk: 1 + len(pattern.t_blocks) + q for q, blk in enumerate(pattern.u_blocks)}
    nunk = pattern.unknowns_per_m2
    eqs = [(i, j) for i in range(s) for j in range(s, n)]
    M = np.zeros((len(eqs) * mm, nunk * mm))
    rhs = np.zeros(len(eqs) * mm)
    for e, (i, j) in enumerate(eqs):
        rows = slice(e * mm, (e + 1) * mm)
        rhs[rows] = -A[i, j].reshape(-1, order="F")
        M[rows, 0:mm] += ab[i, j] * np.eye(mm)
        for (ti, k), q in t_index.items():
            if ti == i:
                M[rows, q * mm:(q + 1) * mm] += np.kron(A[k, j].T, eye)
        for (l, uj), q in u_index.items():
            if uj == j:
                M[rows, q * mm:(q + 1) * mm] += np.kron(eye, A[i, l])
    sol = field.lstsq_min_norm(M, rhs)
    res = float(np.linalg.norm(M @ sol - rhs))
    if not _residual_ok(res, float(np.linalg.norm(rhs))):
        raise StepSingular(f"P/Q system residual {res:.3e} too large")
    return sol[:mm].reshape((m, m), order="F")


def cube_root_instance(x: str = "x", b: str = "b", z: str = "z") -> tuple[Als, StepPattern]:
    """Dimension-6 step system for ``x^3 - z`` with its P/Q pattern."""
    from .expr import als_from_matrix

    rows = [
        ["1", f"-{x}", ".", f"-{b}", ".", z],
        [".", "1", f"-{x}", ".", f"-{b}", "."],
        [".", ".", "1", ".", ".", f"-{b}-{x}"],
        [".", ".", ".", "1", f"-{x}", "."],
        [".", ".", ".", ".", "1", f"-{x}"],
        [".", ".", ".", ".", ".", "1"],
    ]
    g = als_from_matrix(rows, [0, 0, 0, 0, 0, 1], [x, b, z])
    pattern = StepPattern(
        split=3,
        t_blocks=tuple((i, k) for i in range(3) for k in (3, 4)),
        u_blocks=tuple((l, j) for l in (1, 2) for j in (3, 4, 5)),
    )
    return g, pattern


def _cube_root_param(f: Als, x: str):
    """Parameter letter ``z`` with ``f == x^3 - z``, if any."""
    for z in f.letters:
        if z == x:
            continue
        xa = als_letter(x, f.letters)
        ref = als_add(als_mul(als_mul(xa, xa), xa), als_const(-1, f.letters) * als_letter(z, f.letters))
        if als_equal(f, ref, seed=0):
            return z
    return None


# ---------------------------------------------------------------- solver


def newton_solve(problem: NewtonProblem, method: str = "probe", step_system: Als | None = None,
                 pattern: StepPattern | None = None):
    """Iterate ``X_{k+1} = X_k + B_k``; returns ``(X_final, trace)``.

    Stops when ``||B_k||_F < tol``; growth of ``||B_k||`` above 1e6 for three
    consecutive steps is reported as divergence.  Without convergence the
    trace is flagged ``max_iter`` (raised as ``MaxIterExceeded`` when
    ``problem.strict``).
    """
    x, b = problem.unknown, problem.direction
    if method == "probe":
        g = step_system if step_system is not None else build_step_system(problem.f, x, b)
        step = lambda X: newton_step_probe(g, x, b, X, problem.params)  # noqa: E731
    elif method == "pq":
        if step_system is None or pattern is None:
            z = _cube_root_param(problem.f, x)
            if z is None:
                raise ValueError("the pq method needs an explicit step system and pattern")
            step_system, pattern = cube_root_instance(x, b, z)
        g = step_system
        pattern.check(g, b)
        step = lambda X: newton_step_pq(g, x, b, X, problem.params, pattern)  # noqa: E731
    else:
        raise ValueError(f"unknown method {method!r}")
    comm = problem.params[problem.commutator] if problem.commutator else None
    trace = NewtonTrace()
    X = problem.X0.copy()
    growth = 0
    last = None
    for k in range(problem.max_iter):
        B = step(X)
        nb = float(np.linalg.norm(B))
        err, cn = _norms(X, problem.reference, comm)
        trace.append(TraceRow(k, nb, err, cn))
        X = X + B
        if nb < problem.tol:
            trace.status = "converged"
            return X, trace
        if not np.isfinite(nb):
            trace.status = "diverged"
            return X, trace
        growth = growth + 1 if (last is not None and nb > last and nb > DIVERGENCE_LEVEL) else 0
        last = nb
        if growth >= DIVERGENCE_RUN:
            log.warning("newton diverging at k=%d (||B|| = %.3e)", k, nb)
            trace.status = "diverged"
            return X, trace
    trace.status = "max_iter"
    if problem.strict:
        raise MaxIterExceeded(f"no convergence in {problem.max_iter} iterations", trace)
    return X, trace


# ---------------------------------------------------------------- baselines


def commutative_baseline(Z, X0, iters: int, reference=None) -> NewtonTrace:
    """``X_{k+1} = 2/3 X_k + 1/3 X_k^-2 Z``; row ``k`` holds ``||X_{k+1} - X_k||``, error and commutator of ``X_k``."""
    Z = np.asarray(Z, dtype=float)
    X = np.asarray(X0, dtype=float)
    ref = None if reference is None else np.asarray(reference, dtype=float)
    trace = NewtonTrace()
    for k in range(iters + 1):
        try:
            nxt = 2.0 / 3.0 * X + 1.0 / 3.0 * field.mat_solve(X, field.mat_solve(X, Z))
        except SingularMatrix as exc:
            raise SingularIterate(f"iterate X_{k} is singular") from exc
        err, cn = _norms(X, ref, Z)
        trace.append(TraceRow(k, float(np.linalg.norm(nxt - X)), err, cn))
        X = nxt
    trace.status = "max_iter"
    return trace


def scalar_newton(p, dp, x0: float, iters: int) -> list[float]:
    """Classic ``x - p(x)/p'(x)``; returns ``[x_0, ..., x_iters]``."""
    xs = [x0]
    for _ in range(iters):
        x = xs[-1]
        xs.append(x - p(x) / dp(x))
    return xs

