"""Real Dirichlet L-functions for the characters mod 3 and mod 4.

Evaluates zeta(s), zeta'(s) for real s >= 2 and L(s, chi), L'(s, chi) for
real s >= 1, where chi is the quadratic character mod 3 or mod 4.  The
workhorse is a direct series summed to a cutoff plus the Euler-Maclaurin
tail (integral term, half term, Bernoulli corrections), applied per residue
class so the pole contributions cancel exactly at s = 1:

    sum over the pole pieces chi(a) (dN+a)^(1-s) / (d(s-1))
        -> -(1/d) sum chi(a) log(dN+a)              at s = 1
    and for the s-derivative
        -> (1/(2d)) sum chi(a) log(dN+a)^2          at s = 1.

The logarithmic derivatives L'/L(1, chi) have a second, independent route
through the arithmetic-geometric mean:

    L'/L(1, chi4) = log(M(1, sqrt 2)^2 e^gamma / 2)
    L'/L(1, chi3) = log(2^(4/3) M(1+z, 1-z)^2 e^gamma / 3),  z = sin(pi/12)

and both routes are expected to agree to essentially full precision; the
test suite enforces this, together with the class number formula
L(1, chi) = -(pi / k^(3/2)) sum_{n<=k} n chi(n).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import mpmath as mp

from .hpreal import DEFAULT_PREC, HPReal, _agm_mpf

__all__ = [
    "DirichletCharacter",
    "CHI3",
    "CHI4",
    "zeta",
    "zeta_prime",
    "l_value",
    "l_prime",
    "l1_class_number",
    "logderiv_series",
    "logderiv_agm",
]


@dataclass(frozen=True)
class DirichletCharacter:
    """A real character given by its period-d value vector (index = n mod d)."""

    modulus: int
    values: Tuple[int, ...]

    def __post_init__(self):
        if len(self.values) != self.modulus:
            raise ValueError("value vector must have length equal to the modulus")

    def __call__(self, n: int) -> int:
        return self.values[n % self.modulus]

    @property
    def name(self) -> str:
        return f"chi{self.modulus}"


CHI3 = DirichletCharacter(3, (0, 1, -1))
CHI4 = DirichletCharacter(4, (0, 1, 0, -1))

_TRIVIAL = DirichletCharacter(1, (1,))


def _em_series(chi: DirichletCharacter, s, derivative: int, dps: int) -> mp.mpf:
    """sum_n chi(n) n^(-s) (derivative=0) or its s-derivative (derivative=1).

    Direct sum to d*N plus Euler-Maclaurin tails per residue class; the
    Bernoulli corrections are summed until they drop below the target and
    N is doubled if they would start growing first.
    """
    d = chi.modulus
    values = chi.values
    s = mp.mpf(s)
    at_one = s == 1
    target = mp.mpf(10) ** (-(dps + 8))
    N = max(24, dps + 8)
    while True:
        try:
            total = mp.mpf(0)
            M = d * N
            for n in range(1, M + 1):
                c = values[n % d]
                if c == 0:
                    continue
                t = mp.power(n, -s)
                if derivative:
                    t = -mp.log(n) * t
                total += c * t
            for a in range(1, d + 1):
                c = values[a % d]
                if c == 0:
                    continue
                m = d * N + a
                lm = mp.log(m)
                if at_one:
                    pole = -lm / d if not derivative else lm * lm / (2 * d)
                else:
                    m1s = mp.power(m, 1 - s)
                    if not derivative:
                        pole = m1s / (d * (s - 1))
                    else:
                        pole = m1s * (-lm * (s - 1) - 1) / (d * (s - 1) ** 2)
                ms = mp.power(m, -s)
                half = ms / 2 if not derivative else -lm * ms / 2
                total += c * (pole + half)
                # Bernoulli tail: B_{2j}/(2j)! * P_j(s) * d^(2j-1) * m^(-s-2j+1)
                # with P_j(s) = s(s+1)...(s+2j-2)
                P = s
                Psum = 1 / s
                mpow = mp.power(m, -s - 1)
                dpow = mp.mpf(d)
                prev = None
                j = 1
                while True:
                    coef = mp.bernoulli(2 * j) / mp.factorial(2 * j) * dpow
                    term = coef * (P if not derivative else P * (Psum - lm)) * mpow
                    total += c * term
                    at = abs(term)
                    if at < target:
                        break
                    if prev is not None and at > prev:
                        raise _EMRetry
                    prev = at
                    P *= (s + 2 * j - 1) * (s + 2 * j)
                    Psum += 1 / (s + 2 * j - 1) + 1 / (s + 2 * j)
                    mpow /= m * m
                    dpow *= d * d
                    j += 1
                    if j > 16 * dps:
                        raise _EMRetry
            return +total
        except _EMRetry:
            N *= 2
            if N > 10 ** 7:
                raise RuntimeError("Euler-Maclaurin failed to converge")


class _EMRetry(Exception):
    pass


def _check_s(s, minimum: float, what: str):
    if not (mp.mpf(s) >= minimum):
        raise ValueError(f"{what} requires s >= {minimum}, got {s}")


def zeta(s, prec: int = DEFAULT_PREC) -> HPReal:
    """Riemann zeta at real s >= 2 (s = 2 uses pi^2/6 exactly)."""
    _check_s(s, 2, "zeta")
    with mp.workdps(prec + 10):
        if mp.mpf(s) == 2:
            v = mp.pi ** 2 / 6
        else:
            v = _em_series(_TRIVIAL, s, 0, prec)
        return HPReal._raw(+v, prec)


def zeta_prime(s, prec: int = DEFAULT_PREC) -> HPReal:
    """zeta'(s) = -sum log n / n^s for real s >= 2."""
    _check_s(s, 2, "zeta_prime")
    with mp.workdps(prec + 10):
        return HPReal._raw(+_em_series(_TRIVIAL, s, 1, prec), prec)


def l1_class_number(chi: DirichletCharacter, prec: int = DEFAULT_PREC) -> HPReal:
    """L(1, chi) from the class number formula -(pi/k^(3/2)) sum n chi(n)."""
    k = chi.modulus
    with mp.workdps(prec + 10):
        acc = sum(n * chi(n) for n in range(1, k + 1))
        return HPReal._raw(-mp.pi / mp.power(k, mp.mpf(3) / 2) * acc, prec)


def l_value(chi: DirichletCharacter, s, prec: int = DEFAULT_PREC) -> HPReal:
    """L(s, chi) for real s >= 1; at s = 1 cross-checked against the class number formula."""
    _check_s(s, 1, "l_value")
    with mp.workdps(prec + 10):
        v = _em_series(chi, s, 0, prec)
        if mp.mpf(s) == 1:
            ref = l1_class_number(chi, prec).mpf
            if abs(v - ref) > mp.mpf(10) ** (-(prec - 2)) * abs(ref):
                raise ArithmeticError("L(1, chi) disagrees with the class number formula")
        return HPReal._raw(+v, prec)


def l_prime(chi: DirichletCharacter, s, prec: int = DEFAULT_PREC) -> HPReal:
    """L'(s, chi) = sum chi(n) (-log n) n^(-s) for real s >= 1."""
    _check_s(s, 1, "l_prime")
    with mp.workdps(prec + 10):
        return HPReal._raw(+_em_series(chi, s, 1, prec), prec)


def logderiv_series(chi: DirichletCharacter, prec: int = DEFAULT_PREC) -> HPReal:
    """L'/L(1, chi) through the series route."""
    with mp.workdps(prec + 10):
        v = _em_series(chi, 1, 1, prec) / _em_series(chi, 1, 0, prec)
        return HPReal._raw(+v, prec)


def logderiv_agm(chi: DirichletCharacter, prec: int = DEFAULT_PREC) -> HPReal:
    """L'/L(1, chi) through the AGM identities (independent of the series route)."""
    with mp.workdps(prec + 10):
        if chi.modulus == 4:
            m = _agm_mpf(mp.mpf(1), mp.sqrt(2))
            v = mp.log(m * m * mp.exp(mp.euler) / 2)
        elif chi.modulus == 3:
            z = (mp.sqrt(3) - 1) / mp.sqrt(8)
            m = _agm_mpf(1 + z, 1 - z)
            v = mp.log(mp.power(2, mp.mpf(4) / 3) * m * m * mp.exp(mp.euler) / 3)
        else:
            raise ValueError("AGM route is available for chi3 and chi4 only")
        return HPReal._raw(+v, prec)
