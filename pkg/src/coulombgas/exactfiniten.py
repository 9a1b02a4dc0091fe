"""Exact finite-N oracles in extended precision.

Everything here is a determinant of explicit moments, evaluated with big-float
LU at a configurable precision (default 256 bits), with the moment entries
themselves assembled in exact big-rational arithmetic first. These are the
ground-truth values the asymptotic modules are tested against.

The planar moments reduce to residues: with integer m = cN and real a,

    nu_k / (2 pi i) = [coefficient of z^(m+N-1-k)] (z-a)^m e^(-N a z),

a finite alternating sum that exact rationals evaluate without cancellation.
The partition function is N! times the Hankel determinant of radial moments,
which Eq.-level manipulation turns into the nu-determinant with a Gamma-product
prefactor; the combined constant was pinned against 2D quadrature at N = 1, 2
(see tests/fixtures/exact_logz_calibration.json) and is asserted forever.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import mpmath as mp

from .errors import DomainError, SingularHankel

MAX_MOMENT_INDEX = 120  # m + N cap; factorial growth beyond this is out of scope

Rational = Union[int, float, Fraction, str]


@dataclass(frozen=True)
class ExactContext:
    N: int
    m: int
    a: float
    precision_bits: int = 256

    def __post_init__(self):
        if self.N < 1 or self.m < 0:
            raise DomainError(f"need N >= 1 and m >= 0, got N={self.N}, m={self.m}")
        if self.m + self.N > MAX_MOMENT_INDEX:
            raise DomainError(
                f"m + N = {self.m + self.N} exceeds the supported cap {MAX_MOMENT_INDEX}")
        if self.precision_bits < 128:
            raise DomainError(f"precision_bits must be >= 128, got {self.precision_bits}")

    @property
    def c(self) -> Fraction:
        return Fraction(self.m, self.N)


@dataclass(frozen=True)
class MomentTable:
    nu: tuple  # mpf values of nu_k/(2 pi i), k = 0 .. 2N-2
    hankel_logdet: object  # mpf
    hankel_sign: int


def _moment_fraction(N: int, m: int, a: Fraction, k: int) -> Fraction:
    p = m + N - 1 - k
    if p < 0:
        return Fraction(0)
    total = Fraction(0)
    for j in range(0, min(m, p) + 1):
        total += (Fraction(math.comb(m, j)) * (-a) ** (m - j)
                  * (-N * a) ** (p - j) / math.factorial(p - j))
    return total


def _to_mpf(x: Fraction):
    return mp.mpf(x.numerator) / mp.mpf(x.denominator)


def contour_moment(ctx: ExactContext, k: int):
    """nu_k/(2 pi i) at the context precision; zero (with a warning) for k >= m+N."""
    if k < 0:
        raise DomainError(f"moment index must be nonnegative, got {k}")
    if k >= ctx.m + ctx.N:
        warnings.warn(f"moment index k={k} >= m+N={ctx.m + ctx.N}; residue is zero")
        return mp.mpf(0)
    with mp.workprec(ctx.precision_bits):
        return _to_mpf(_moment_fraction(ctx.N, ctx.m, Fraction(ctx.a), k))


def _lu_logdet(rows: list) -> tuple:
    """(log|det|, sign) by partial-pivot LU in place; raises on exact zero pivot."""
    n = len(rows)
    sign = 1
    logdet = mp.mpf(0)
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(rows[r][col]))
        if rows[piv][col] == 0:
            raise SingularHankel(f"zero pivot at column {col} of {n}x{n} determinant")
        if piv != col:
            rows[piv], rows[col] = rows[col], rows[piv]
            sign = -sign
        pval = rows[col][col]
        if pval < 0:
            sign = -sign
        logdet += mp.log(abs(pval))
        for r in range(col + 1, n):
            f = rows[r][col] / pval
            for cc in range(col + 1, n):
                rows[r][cc] -= f * rows[col][cc]
    return logdet, sign


def moment_table(ctx: ExactContext) -> MomentTable:
    with mp.workprec(ctx.precision_bits):
        af = Fraction(ctx.a)
        fr = [_moment_fraction(ctx.N, ctx.m, af, k) for k in range(2 * ctx.N - 1)]
        nu = tuple(_to_mpf(v) for v in fr)
        rows = [[nu[j + k] for k in range(ctx.N)] for j in range(ctx.N)]
        logdet, sign = _lu_logdet(rows)
        return MomentTable(nu=nu, hankel_logdet=logdet, hankel_sign=sign)


def exact_logZ(ctx: ExactContext):
    """log Z_N(a, m/N) as an mpf at the context precision."""
    with mp.workprec(ctx.precision_bits):
        table = moment_table(ctx)
        want = -1 if (ctx.N * (ctx.N - 1) // 2) % 2 else 1
        if table.hankel_sign != want:
            raise SingularHankel(
                f"Hankel determinant sign {table.hankel_sign} != (-1)^(N(N-1)/2) = {want}; "
                "precision exhausted or parameters degenerate")
        out = mp.log(mp.mpf(math.factorial(ctx.N))) + table.hankel_logdet
        logN = mp.log(mp.mpf(ctx.N))
        for k in range(ctx.N):
            out += mp.log(mp.mpf(math.factorial(ctx.m + k))) - (ctx.m + k + 1) * logN
        return out


def exact_op(ctx: ExactContext) -> tuple:
    """Monic degree-N orthogonal polynomial coefficients (c_0, ..., c_{N-1}, 1)."""
    with mp.workprec(ctx.precision_bits):
        af = Fraction(ctx.a)
        nu = [_to_mpf(_moment_fraction(ctx.N, ctx.m, af, k)) for k in range(2 * ctx.N)]
        A = mp.matrix(ctx.N, ctx.N)
        b = mp.matrix(ctx.N, 1)
        for i in range(ctx.N):
            for j in range(ctx.N):
                A[i, j] = nu[i + j]
            b[i] = -nu[i + ctx.N]
        try:
            sol = mp.lu_solve(A, b)
        except ZeroDivisionError as exc:
            raise SingularHankel("singular moment system for p_N") from exc
        return tuple(sol[i] for i in range(ctx.N)) + (mp.mpf(1),)


def exact_A11(ctx: ExactContext):
    """Subleading coefficient of p_N(z) = z^N + A11 z^(N-1) + ..."""
    return exact_op(ctx)[ctx.N - 1]


def eval_polynomial(coeffs: tuple, z) -> complex:
    acc = mp.mpmathify(0)
    for c in reversed(coeffs):
        acc = acc * z + c
    return acc


def lue_gap_probability(n: int, alpha_n: int, t: Rational, N_w: int,
                        precision_bits: int = 256):
    """P[smallest eigenvalue > t] for the n-point ensemble with weight x^alpha_n e^(-N_w x).

    Andreief reduction to a ratio of incomplete-gamma Hankel determinants; all
    entries are exact rationals (integer shape) scaled by a common e^(-N_w t).
    """
    if n < 1 or alpha_n < 0 or N_w < 1:
        raise DomainError(f"need n >= 1, alpha_n >= 0, N_w >= 1; got {n}, {alpha_n}, {N_w}")
    tf = t if isinstance(t, Fraction) else Fraction(t)
    if tf < 0:
        raise DomainError(f"gap probability needs t >= 0, got {t}")
    with mp.workprec(precision_bits):
        if tf == 0:
            return mp.mpf(1)
        T = N_w * tf
        s_max = 2 * n - 2 + alpha_n + 1
        # prefix sums of the truncated exponential: E[s] = sum_{i<s} T^i / i!
        prefix = [Fraction(0)] * (s_max + 1)
        term = Fraction(1)
        for i in range(s_max):
            prefix[i + 1] = prefix[i] + term
            term = term * T / (i + 1)
        rows_t = []
        rows_0 = []
        for j in range(n):
            rt, r0 = [], []
            for k in range(n):
                s = j + k + alpha_n + 1
                fact = Fraction(math.factorial(s - 1), N_w ** s)
                rt.append(_to_mpf(fact * prefix[s]))
                r0.append(_to_mpf(fact))
            rows_t.append(rt)
            rows_0.append(r0)
        logdet_t, sign_t = _lu_logdet(rows_t)
        logdet_0, sign_0 = _lu_logdet(rows_0)
        if sign_t <= 0 or sign_0 <= 0:
            raise SingularHankel("gap-probability Gram determinant lost positivity")
        return mp.e ** (-n * _to_mpf(T) + logdet_t - logdet_0)


def duality_residual(N: int, m: int, x: float, precision_bits: int = 256):
    """|LUE gap probability - rescaled partition-function ratio| at the point x."""
    if x < 0:
        raise DomainError(f"need x >= 0, got {x}")
    with mp.workprec(precision_bits):
        t = Fraction(x) ** 2
        lhs = lue_gap_probability(n=m, alpha_n=N, t=t, N_w=N,
                                  precision_bits=precision_bits)
        log_ratio = (exact_logZ(ExactContext(N, m, x, precision_bits))
                     - exact_logZ(ExactContext(N, m, 0.0, precision_bits)))
        rhs = mp.e ** (-m * N * _to_mpf(t) + log_ratio)
        return abs(lhs - rhs)


def log_zgin(N: int, precision_bits: int = 256):
    """log of the plain Ginibre partition function, exact big-integer route."""
    with mp.workprec(precision_bits):
        out = mp.log(mp.mpf(math.factorial(N)))
        for k in range(1, N):
            out += mp.log(mp.mpf(math.factorial(k)))
        out -= mp.mpf(N * (N + 1)) / 2 * mp.log(mp.mpf(N))
        return out


def exact_charpoly_moment(N: int, m: int, z_abs: float, precision_bits: int = 256):
    """E|det(G_N - z)|^(2m) = Z_N(|z|, m/N) / Z_N^Gin, evaluated exactly."""
    with mp.workprec(precision_bits):
        ctx = ExactContext(N, m, abs(z_abs), precision_bits)
        return mp.e ** (exact_logZ(ctx) - log_zgin(N, precision_bits))
