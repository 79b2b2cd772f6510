"""Evaluation of systems at tuples of square matrices, and probabilistic zero tests.

``pencil_eval`` forms ``A_0 (x) I + sum_l A_l (x) X_l``; ``als_eval`` returns
``(u (x) I) A(X)^-1 (v (x) I)``, the upper-left ``m x m`` block row of the
inverse applied to ``v (x) I``.

Zero testing draws integer matrices with entries in ``[-10, 10]`` and
evaluates over GF(p), p = 2**31 - 1.  A nonzero value mod p proves the
rational value nonzero, and the witness is then recomputed exactly.
"""

from __future__ import annotations

import enum
import logging
import secrets
from dataclasses import dataclass, field as dc_field
from typing import Mapping, Sequence

import numpy as np

from . import _kernels, field
from .als import Als, als_add, als_scale, unify
from .errors import DimensionMismatch, SingularMatrix, SingularPencil, UnassignedLetter

log = logging.getLogger(__name__)

PROBE_ENTRY_BOUND = 10
#: largest pencil (n*m) evaluated during probing
MAX_PROBE_PENCIL = 480


def _assignment_size(f: Als, sigma: Mapping[str, np.ndarray]) -> int:
    shapes = {np.asarray(a).shape for a in sigma.values()}
    if not shapes:
        raise DimensionMismatch("empty assignment")
    if len(shapes) > 1 or any(len(s) != 2 or s[0] != s[1] for s in shapes):
        raise DimensionMismatch(f"assignment matrices have shapes {sorted(shapes)}")
    return next(iter(shapes))[0]


def _stack(f: Als, sigma: Mapping[str, np.ndarray], exact: bool):
    m = _assignment_size(f, sigma)
    for x in f.support():
        if x not in sigma:
            raise UnassignedLetter(f"no matrix assigned to letter {x!r}")
    mats = [field.identity(m, exact)]
    for x in f.letters:
        mats.append(field.like(sigma[x], exact) if x in sigma else field.zeros((m, m), exact))
    return m, mats


def pencil_eval(f: Als, sigma: Mapping[str, np.ndarray], exact: bool | None = None) -> np.ndarray:
    """``A_0 (x) I_m + sum_l A_l (x) sigma(x_l)`` as an ``nm x nm`` matrix."""
    if exact is None:
        exact = all(field.is_exact(np.asarray(a)) for a in sigma.values())
    m, mats = _stack(f, sigma, exact)
    n = f.dim
    if exact:
        out = field.zeros((n * m, n * m))
        for c, s in zip(f.coeffs, mats):
            if any(x != 0 for x in c.flat):
                out = out + field.kron(c, s)
        return out
    return _kernels.assemble_pencil(field.float_array(f.coeffs), np.stack(mats))


def als_eval(f: Als, sigma: Mapping[str, np.ndarray], exact: bool | None = None) -> np.ndarray:
    """Value of ``f`` at ``sigma`` (exact for Fraction/int inputs, float otherwise)."""
    if exact is None:
        exact = all(field.is_exact(np.asarray(a)) for a in sigma.values())
    m = _assignment_size(f, sigma)
    if f.is_empty():
        return field.zeros((m, m), exact)
    big = pencil_eval(f, sigma, exact)
    rhs = field.kron(f.v.reshape(-1, 1) if exact else field.float_array(f.v).reshape(-1, 1),
                     field.identity(m, exact))
    try:
        y = field.mat_solve(big, rhs)
    except SingularMatrix as exc:
        raise SingularPencil(f"pencil singular at the given {m}x{m} assignment") from exc
    return y[:m]


# ---------------------------------------------------------------- probing


class Verdict(enum.Enum):
    PROBABLY_ZERO = "ProbablyZero"
    NONZERO = "NonZero"
    EQUAL = "Equal"
    NONEQUAL = "NonEqual"


@dataclass
class Witness:
    size: int
    assignment: dict
    value: np.ndarray

    def to_json(self) -> dict:
        def mat(a):
            return [[field.format_scalar(x) for x in row] for row in a]

        return {
            "size": self.size,
            "assignment": {k: mat(v) for k, v in self.assignment.items()},
            "value": mat(self.value),
        }


@dataclass
class ProbeResult:
    verdict: Verdict
    witness: Witness | None = None
    probes: int = 0
    skipped: int = 0
    seed: int | None = None
    certified: bool = False
    sizes: list = dc_field(default_factory=list)

    def __bool__(self):
        return self.verdict in (Verdict.PROBABLY_ZERO, Verdict.EQUAL)


def _residues(a: np.ndarray, p: int) -> np.ndarray:
    out = np.empty(a.shape, dtype=np.int64)
    flat = out.reshape(-1)
    for i, x in enumerate(a.reshape(-1)):
        q = field.to_fraction(x)
        den = q.denominator % p
        if den == 0:
            raise ZeroDivisionError("denominator divisible by the probing modulus")
        flat[i] = (q.numerator % p) * pow(den, p - 2, p) % p
    return out


def _modp_pencil(coeff_res: np.ndarray, mats: list[np.ndarray], p: int) -> np.ndarray:
    n = coeff_res.shape[1]
    m = mats[0].shape[0]
    out = np.zeros((n * m, n * m), dtype=np.int64)
    for c, s in zip(coeff_res, mats):
        if c.any() and s.any():
            out = (out + np.kron(c, s % p) % p) % p
    return out


def modp_value(f: Als, sigma_int: Mapping[str, np.ndarray], p: int = _kernels.MODULUS, _res=None):
    """Value of ``f`` mod p at an integer assignment; None if the pencil is singular mod p."""
    m = _assignment_size(f, sigma_int)
    res = _residues(f.coeffs, p) if _res is None else _res
    mats = [np.eye(m, dtype=np.int64)] + [
        np.asarray(sigma_int.get(x, np.zeros((m, m))), dtype=np.int64) for x in f.letters
    ]
    big = _modp_pencil(res, mats, p)
    rhs = np.kron(_residues(f.v, p).reshape(-1, 1), np.eye(m, dtype=np.int64)) % p
    ok, y = _kernels.modp_solve(big, rhs, p)
    return y[:m] if ok else None


def pencil_invertible_modp(f: Als, sigma_int, p: int = _kernels.MODULUS, _res=None) -> bool:
    m = _assignment_size(f, sigma_int)
    res = _residues(f.coeffs, p) if _res is None else _res
    mats = [np.eye(m, dtype=np.int64)] + [np.asarray(sigma_int[x], dtype=np.int64) for x in f.letters]
    ok, _ = _kernels.modp_solve(_modp_pencil(res, mats, p), np.zeros((f.dim * m, 0), dtype=np.int64), p)
    return ok


def random_assignment(letters: Sequence[str], m: int, rng: np.random.Generator, bound: int = PROBE_ENTRY_BOUND):
    return {x: rng.integers(-bound, bound + 1, size=(m, m)).astype(np.int64) for x in letters}


def default_sizes(dim: int) -> list[int]:
    top = max(1, min(dim, MAX_PROBE_PENCIL // max(dim, 1)))
    return list(range(1, top + 1))


def is_zero_probabilistic(f: Als, trials: int = 5, sizes: Sequence[int] | None = None,
                          seed: int | None = None) -> ProbeResult:
    """Random matrix probing.  ``NONZERO`` carries an exact witness; ``PROBABLY_ZERO`` is statistical."""
    if f.is_empty():
        return ProbeResult(Verdict.PROBABLY_ZERO, certified=True, seed=seed)
    if seed is None:
        seed = secrets.randbits(32)
    log.info("zero probe seed %d (dim %d)", seed, f.dim)
    rng = np.random.default_rng(seed)
    sizes = default_sizes(f.dim) if sizes is None else list(sizes)
    p = _kernels.MODULUS
    res = _residues(f.coeffs, p)
    probes = skipped = 0
    for m in sizes:
        for _ in range(trials):
            sigma = random_assignment(f.letters, m, rng)
            probes += 1
            val = modp_value(f, sigma, p, _res=res)
            if val is None:
                skipped += 1
                continue
            if val.any():
                exact_sigma = {k: field.exact_array(a) for k, a in sigma.items()}
                value = als_eval(f, exact_sigma, exact=True)
                return ProbeResult(Verdict.NONZERO, Witness(m, exact_sigma, value), probes, skipped, seed,
                                   certified=True, sizes=sizes)
    if skipped:
        log.info("zero probe skipped %d of %d singular draws", skipped, probes)
    return ProbeResult(Verdict.PROBABLY_ZERO, None, probes, skipped, seed, sizes=sizes)


def als_equal(f: Als, g: Als, trials: int = 5, sizes: Sequence[int] | None = None,
              seed: int | None = None) -> ProbeResult:
    """Compare two elements.

    With both ``A_0`` invertible the difference is reduced to its minimal
    dimension (exact decision); otherwise random matrix probing is used.
    """
    from .minimize import minimize

    f, g = unify(f, g)
    diff = als_add(f, als_scale(-1, g))
    if _series_case(f) and _series_case(g):
        reduced = minimize(diff)
        if reduced.is_empty():
            return ProbeResult(Verdict.EQUAL, certified=True)
        res = is_zero_probabilistic(reduced, trials=trials, sizes=sizes, seed=seed)
        res.verdict = Verdict.NONEQUAL
        res.certified = True
        return res
    res = is_zero_probabilistic(diff, trials=trials, sizes=sizes, seed=seed)
    res.verdict = Verdict.EQUAL if res.verdict is Verdict.PROBABLY_ZERO else Verdict.NONEQUAL
    return res


def _series_case(f: Als) -> bool:
    return f.is_empty() or field.is_invertible(f.A0)

