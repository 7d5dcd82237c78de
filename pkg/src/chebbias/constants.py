"""High-precision evaluation of the density constants.

The leading constants are taken through lacunary products.  Squaring the
partial Euler product over the non-residue class telescopes through

    P(s)^2 = L(2s, chi) / (zeta(2s) (1 - q^(-2s))) * P(2s),
    P(s) = prod_{p = -1 (d)} (1 - p^(-2s)),  q = 3 or 2,

so P(1) = prod_{n>=1} [ L(2^n, chi) / ((1 - q^(-2^n)) zeta(2^n)) ]^(1/2^(n+1))
converges doubly exponentially (zeta(2^n), L(2^n, chi) -> 1).  This gives

    C_3_1 = sqrt(2)/3^(5/4) * P_3(1)^(1/2)        C_3_2 = 2/(3 pi C_3_1)
    C_4_1 = 1/(2 sqrt 2)    * P_4(1)^(1/2)        C_4_3 = 1/(2 pi C_4_1)
    K     = 1/ sqrt 2       * P_4(1)^(-1/2)

Differentiating the same telescoping identity m times gives the prime sums

    sum_{p = a (d)} log p/(p^2-1) = sum_{p} log p/(p^(2^(m+1))-1)
        + (1/2) sum_{n=1}^m [ L'/L(2^n, chi) - zeta'/zeta(2^n)
                              - log q/(q^(2^n)-1) ],

whose remaining prime tail is evaluated explicitly over small primes.  The
constant terms of sum Lambda_f(n)/n - tau log x then come out in closed
form, e.g. 2 B_3_1 = -gamma - L'/L(1, chi3) - (log 3)/2 - 2 S(3,2), and the
second-order density constants are lambda2(f) = (1 - tau)(1 + B_f).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath as mp
import numpy as np

from .hpreal import DEFAULT_PREC, HPReal
from .lfunc import CHI3, CHI4, _TRIVIAL as _ONE, _em_series
from .multfun import B1, SemigroupSpec, series_for
from .sieve import SieveTables

__all__ = [
    "ConstantResult",
    "c_constant",
    "prime_sum",
    "b_constant",
    "second_order",
    "k2_series_partial",
    "constant_by_name",
    "CONSTANT_NAMES",
]


@dataclass(frozen=True)
class ConstantResult:
    name: str
    value: HPReal
    certified_digits: int
    method: str

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "value": self.value.to_str(),
            "digits": self.certified_digits,
            "method": self.method,
        }


def _certified(prec: int) -> int:
    # truncation targets sit 5+ digits below prec and rounding is tracked
    # pessimistically at 1 ulp per operation with >= 3 guard digits
    return prec - 5


def _lacunary_log(chi, q: int, dps: int) -> mp.mpf:
    """log prod_{n>=1} [L(2^n, chi)/((1 - q^(-2^n)) zeta(2^n))]^(1/2^(n+1))."""
    total = mp.mpf(0)
    stop = mp.mpf(10) ** (-(dps + 5))
    n = 1
    while True:
        s = 2 ** n
        L = _em_series(chi, s, 0, dps)
        Z = mp.pi ** 2 / 6 if s == 2 else _em_series(_ONE, s, 0, dps)
        f = mp.log(L / ((1 - mp.power(q, -s)) * Z)) / 2 ** (n + 1)
        total += f
        if abs(f) < stop:
            return total
        n += 1
        if n > 64:
            raise RuntimeError("lacunary product failed to converge")


@lru_cache(maxsize=None)
def _half_product_log(d: int, prec: int) -> mp.mpf:
    """log P_d(1)^(1/2) for d = 3 (chi3, q=3) or d = 4 (chi4, q=2)."""
    with mp.workdps(prec + 10):
        if d == 3:
            return _lacunary_log(CHI3, 3, prec)
        return _lacunary_log(CHI4, 2, prec)


@lru_cache(maxsize=None)
def _c_value(label: str, prec: int) -> mp.mpf:
    with mp.workdps(prec + 10):
        if label == "g_3_1":
            return mp.sqrt(2) / mp.power(3, mp.mpf(5) / 4) * mp.exp(_half_product_log(3, prec))
        if label == "g_4_1":
            return 1 / (2 * mp.sqrt(2)) * mp.exp(_half_product_log(4, prec))
        if label == "g_3_2":
            return 2 / (3 * mp.pi * _c_value("g_3_1", prec))
        if label == "g_4_3":
            return 1 / (2 * mp.pi * _c_value("g_4_1", prec))
        if label == "b1":
            return 1 / mp.sqrt(2) * mp.exp(-_half_product_log(4, prec))
        raise ValueError(f"no leading constant for spec {label}")


_C_NAME = {"g_3_1": "C_3_1", "g_3_2": "C_3_2", "g_4_1": "C_4_1", "g_4_3": "C_4_3", "b1": "K"}


def c_constant(spec: SemigroupSpec, prec: int = DEFAULT_PREC) -> ConstantResult:
    """Leading density constant: C_{d,a} for residue specs, K for b1."""
    label = spec.label
    if label not in _C_NAME:
        raise ValueError(f"no leading constant for spec {label}")
    method = "lacunary" if label in ("g_3_1", "g_4_1", "b1") else "closed_form"
    with mp.workdps(prec + 10):
        v = +_c_value(label, prec)
    return ConstantResult(_C_NAME[label], HPReal._raw(v, prec), _certified(prec), method)


def _small_class_primes(d: int, a: int, limit: int = 2000) -> list[int]:
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, int(limit ** 0.5) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return [int(p) for p in np.flatnonzero(flags) if p % d == a]


@lru_cache(maxsize=None)
def _prime_sum_value(d: int, a: int, prec: int) -> mp.mpf:
    chi, q = (CHI3, 3) if d == 3 else (CHI4, 2)
    with mp.workdps(prec + 10):
        small = _small_class_primes(d, a)
        p0 = small[0]
        m = 1
        while 2 ** (m + 1) * mp.log10(p0) < prec + 8:
            m += 1
        tot = mp.mpf(0)
        for n in range(1, m + 1):
            s = 2 ** n
            L = _em_series(chi, s, 0, prec)
            Lp = _em_series(chi, s, 1, prec)
            Z = mp.pi ** 2 / 6 if s == 2 else _em_series(_ONE, s, 0, prec)
            Zp = _em_series(_ONE, s, 1, prec)
            tot += (Lp / L - Zp / Z - mp.log(q) / (mp.power(q, s) - 1)) / 2
        # explicit prime tail at exponent 2^(m+1); primes beyond the small
        # list contribute less than 2000^(-2^(m+1)) in total
        e = 2 ** (m + 1)
        for p in small:
            t = mp.log(p) / (mp.power(p, e) - 1)
            tot += t
            if t < mp.mpf(10) ** (-(prec + 10)):
                break
        return +tot


def prime_sum(d: int, a: int, prec: int = DEFAULT_PREC) -> ConstantResult:
    """sum over primes p = a (mod d) of log p / (p^2 - 1)."""
    if (d, a) not in ((3, 2), (4, 3)):
        raise ValueError("prime_sum supports (d, a) in {(3,2), (4,3)}")
    v = _prime_sum_value(d, a, prec)
    return ConstantResult(
        f"prime_sum_{d}_{a}", HPReal._raw(v, prec), _certified(prec), "lacunary"
    )


@lru_cache(maxsize=None)
def _b_value(label: str, prec: int) -> mp.mpf:
    with mp.workdps(prec + 10):
        g = +mp.euler
        if label == "g_3_1":
            ld = _em_series(CHI3, 1, 1, prec) / _em_series(CHI3, 1, 0, prec)
            return (-g - ld - mp.log(3) / 2 - 2 * _prime_sum_value(3, 2, prec)) / 2
        if label == "g_3_2":
            return -g - mp.log(3) / 2 - _b_value("g_3_1", prec)
        if label == "g_4_1":
            ld = _em_series(CHI4, 1, 1, prec) / _em_series(CHI4, 1, 0, prec)
            return (-g - ld - mp.log(2) - 2 * _prime_sum_value(4, 3, prec)) / 2
        if label == "g_4_3":
            return -mp.log(2) - g - _b_value("g_4_1", prec)
        if label == "b1":
            ld = _em_series(CHI4, 1, 1, prec) / _em_series(CHI4, 1, 0, prec)
            return -g / 2 - ld / 2 + mp.log(2) / 2 + _prime_sum_value(4, 3, prec)
        raise ValueError(f"no B constant for spec {label}")


def b_constant(spec: SemigroupSpec, prec: int = DEFAULT_PREC) -> ConstantResult:
    """B_f, the constant term of sum_{n<=x} Lambda_f(n)/n - tau log x."""
    label = spec.label
    if label not in ("g_3_1", "g_3_2", "g_4_1", "g_4_3"):
        raise ValueError("b_constant supports the four residue specs")
    v = _b_value(label, prec)
    name = f"B_{spec.d}_{spec.a}"
    return ConstantResult(name, HPReal._raw(v, prec), _certified(prec), "closed_form")


def second_order(spec: SemigroupSpec, prec: int = DEFAULT_PREC) -> ConstantResult:
    """lambda2(f) = (1 - tau)(1 + B_f); K_2 for the two-squares spec."""
    if spec.tau != Fraction(1, 2):
        raise ValueError("second_order needs tau = 1/2")
    with mp.workdps(prec + 10):
        v = +((1 + _b_value(spec.label, prec)) / 2)
    name = "K2" if spec.label == "b1" else f"lambda2_{spec.d}_{spec.a}"
    return ConstantResult(name, HPReal._raw(v, prec), _certified(prec), "series")


def k2_series_partial(x, tables: SieveTables, prec: int = DEFAULT_PREC) -> HPReal:
    """(1/2)(1 + sum_{n<=x} Lambda_b1(n)/n - (1/2) log x), the partial K2 expression."""
    series = series_for(B1, tables)
    with mp.workdps(prec + 5):
        xi = int(mp.floor(x))
        ns, ps, mult = series.prime_powers
        k = int(np.searchsorted(ns, xi, side="right"))
        logs: dict[int, mp.mpf] = {}
        acc = mp.mpf(0)
        for i in range(k):
            p = int(ps[i])
            lp = logs.get(p)
            if lp is None:
                lp = mp.log(p)
                logs[p] = lp
            acc += int(mult[i]) * lp / int(ns[i])
        v = (1 + acc - mp.log(x) / 2) / 2
        return HPReal._raw(+v, prec)


# -- name-based lookup (CLI surface) -------------------------------------------

_SPEC_BY_SUFFIX = {
    "3_1": SemigroupSpec.residue_class(3, 1),
    "3_2": SemigroupSpec.residue_class(3, 2),
    "4_1": SemigroupSpec.residue_class(4, 1),
    "4_3": SemigroupSpec.residue_class(4, 3),
}

CONSTANT_NAMES = (
    ["C_3_1", "C_3_2", "C_4_1", "C_4_3", "K", "K2"]
    + [f"B_{s}" for s in _SPEC_BY_SUFFIX]
    + [f"lambda2_{s}" for s in _SPEC_BY_SUFFIX]
    + [f"prime_sum_{d}_{a}" for d, a in ((3, 2), (4, 3))]
    + ["Lderiv_chi3", "Lderiv_chi4", "gamma", "pi"]
)


def constant_by_name(name: str, prec: int = DEFAULT_PREC) -> ConstantResult:
    from . import hpreal
    from .lfunc import logderiv_series

    if name in ("C_3_1", "C_3_2", "C_4_1", "C_4_3"):
        return c_constant(_SPEC_BY_SUFFIX[name[2:]], prec)
    if name == "K":
        return c_constant(B1, prec)
    if name == "K2":
        return second_order(B1, prec)
    if name.startswith("B_"):
        return b_constant(_SPEC_BY_SUFFIX[name[2:]], prec)
    if name.startswith("lambda2_"):
        return second_order(_SPEC_BY_SUFFIX[name[8:]], prec)
    if name.startswith("prime_sum_"):
        d, a = name[10:].split("_")
        return prime_sum(int(d), int(a), prec)
    if name in ("Lderiv_chi3", "Lderiv_chi4"):
        chi = CHI3 if name.endswith("3") else CHI4
        return ConstantResult(name, logderiv_series(chi, prec), _certified(prec), "series")
    if name == "gamma":
        return ConstantResult("gamma", hpreal.const_gamma(prec), _certified(prec), "series")
    if name == "pi":
        return ConstantResult("pi", hpreal.const_pi(prec), _certified(prec), "series")
    raise ValueError(f"unknown constant {name!r}; known: {', '.join(CONSTANT_NAMES)}")
