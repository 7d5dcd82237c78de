"""Arbitrary-precision reals with an explicit significant-digit budget.

``HPReal`` wraps an mpmath floating-point value together with the number of
decimal digits the caller has asked to be reliable.  Every arithmetic
operation rounds to nearest at the working precision of its operands, so the
relative error of a single operation is below 10**(2 - prec) with several
digits to spare.  Values are immutable and safe to share between threads.

The module also hosts the classical constants and AGM machinery that the
rest of the package builds on: pi, Euler's gamma, the arithmetic-geometric
mean, and the Gamma values at 3/4 and 1/3 recovered from AGM identities
(M(1, sqrt 2) = sqrt(2/pi) * Gamma(3/4)^2 and the companion identity for
M(1+z, 1-z) with z = sin(pi/12) = (sqrt 3 - 1)/sqrt 8).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Union

import mpmath as mp

__all__ = [
    "HPReal",
    "AgmState",
    "DEFAULT_PREC",
    "const_pi",
    "const_gamma",
    "agm",
    "agm_sequence",
    "gamma_fraction",
    "sin_pi_over_12",
]

DEFAULT_PREC = 50

# extra decimal digits carried internally so that the last budgeted digit is
# never contaminated by the wrapper's own rounding
_GUARD = 5

Number = Union["HPReal", int, str, Fraction, float]


def _to_mpf(x: Number, dps: int) -> mp.mpf:
    if isinstance(x, HPReal):
        return x._v
    if isinstance(x, Fraction):
        return mp.mpf(x.numerator) / x.denominator
    if isinstance(x, (int, str)):
        return mp.mpf(x)
    if isinstance(x, float):
        return mp.mpf(x)
    raise TypeError(f"cannot convert {type(x).__name__} to HPReal")


class HPReal:
    """Immutable arbitrary-precision real with a tracked digit budget."""

    __slots__ = ("_v", "prec")

    def __init__(self, value: Number = 0, prec: int = DEFAULT_PREC):
        if prec < 1:
            raise ValueError("precision must be at least 1 digit")
        self.prec = int(prec)
        with mp.workdps(self.prec + _GUARD):
            self._v = _to_mpf(value, self.prec)

    @classmethod
    def _raw(cls, v: mp.mpf, prec: int) -> "HPReal":
        obj = object.__new__(cls)
        object.__setattr__(obj, "_v", v)
        object.__setattr__(obj, "prec", prec)
        return obj

    def __setattr__(self, name, value):
        if hasattr(self, name):
            raise AttributeError("HPReal is immutable")
        object.__setattr__(self, name, value)

    # -- conversions ------------------------------------------------------

    @property
    def mpf(self) -> mp.mpf:
        """The underlying mpmath value (read-only)."""
        return self._v

    def __float__(self) -> float:
        return float(self._v)

    def __int__(self) -> int:
        return int(self._v)

    def to_str(self, digits: int | None = None) -> str:
        """Decimal string with ``digits`` significant digits (round to nearest)."""
        digits = self.prec if digits is None else digits
        with mp.workdps(self.prec + _GUARD):
            return mp.nstr(self._v, digits, strip_zeros=False)

    def digits_prefix(self, digits: int) -> str:
        """Truncated (not rounded) decimal expansion with ``digits`` significant digits."""
        with mp.workdps(self.prec + _GUARD):
            s = mp.nstr(self._v, digits + 8, strip_zeros=False)
        neg = s.startswith("-")
        if neg:
            s = s[1:]
        mantissa, _, exp = s.partition("e")
        out = []
        count = 0
        seen_sig = False
        for ch in mantissa:
            if ch == ".":
                out.append(ch)
                continue
            if count >= digits:
                break
            out.append(ch)
            if ch != "0":
                seen_sig = True
            if seen_sig:
                count += 1
        res = "".join(out).rstrip(".")
        return ("-" if neg else "") + res + (("e" + exp) if exp else "")

    @classmethod
    def parse(cls, s: str, prec: int = DEFAULT_PREC) -> "HPReal":
        return cls(s, prec)

    def __repr__(self) -> str:
        return f"HPReal('{self.to_str()}', prec={self.prec})"

    # -- arithmetic --------------------------------------------------------

    def _binop(self, other: Number, op) -> "HPReal":
        prec = self.prec if not isinstance(other, HPReal) else min(self.prec, other.prec)
        with mp.workdps(prec + _GUARD):
            return HPReal._raw(op(self._v, _to_mpf(other, prec)), prec)

    def __add__(self, other: Number) -> "HPReal":
        return self._binop(other, lambda a, b: a + b)

    __radd__ = __add__

    def __sub__(self, other: Number) -> "HPReal":
        return self._binop(other, lambda a, b: a - b)

    def __rsub__(self, other: Number) -> "HPReal":
        return self._binop(other, lambda a, b: b - a)

    def __mul__(self, other: Number) -> "HPReal":
        return self._binop(other, lambda a, b: a * b)

    __rmul__ = __mul__

    def __truediv__(self, other: Number) -> "HPReal":
        return self._binop(other, lambda a, b: a / b)

    def __rtruediv__(self, other: Number) -> "HPReal":
        return self._binop(other, lambda a, b: b / a)

    def __pow__(self, other: Number) -> "HPReal":
        return self._binop(other, lambda a, b: mp.power(a, b))

    def __neg__(self) -> "HPReal":
        return HPReal._raw(-self._v, self.prec)

    def __abs__(self) -> "HPReal":
        return HPReal._raw(abs(self._v), self.prec)

    def sqrt(self) -> "HPReal":
        if self._v < 0:
            raise ValueError("sqrt of negative HPReal")
        with mp.workdps(self.prec + _GUARD):
            return HPReal._raw(mp.sqrt(self._v), self.prec)

    def exp(self) -> "HPReal":
        with mp.workdps(self.prec + _GUARD):
            return HPReal._raw(mp.exp(self._v), self.prec)

    def log(self) -> "HPReal":
        if self._v <= 0:
            raise ValueError("log of non-positive HPReal")
        with mp.workdps(self.prec + _GUARD):
            return HPReal._raw(mp.log(self._v), self.prec)

    # -- comparisons (by value) ---------------------------------------------

    def _cmp_v(self, other: Number) -> mp.mpf:
        with mp.workdps(self.prec + _GUARD):
            return _to_mpf(other, self.prec)

    def __eq__(self, other) -> bool:
        try:
            return self._v == self._cmp_v(other)
        except TypeError:
            return NotImplemented

    def __lt__(self, other) -> bool:
        return self._v < self._cmp_v(other)

    def __le__(self, other) -> bool:
        return self._v <= self._cmp_v(other)

    def __gt__(self, other) -> bool:
        return self._v > self._cmp_v(other)

    def __ge__(self, other) -> bool:
        return self._v >= self._cmp_v(other)

    def __hash__(self):
        return hash(self._v)

    def agrees_to(self, other: Number, digits: int) -> bool:
        """True when self and other share ``digits`` significant digits."""
        with mp.workdps(self.prec + _GUARD):
            o = _to_mpf(other, self.prec)
            if self._v == o:
                return True
            scale = max(abs(self._v), abs(o))
            if scale == 0:
                return True
            return abs(self._v - o) / scale <= mp.mpf(10) ** (1 - digits)


@dataclass(frozen=True)
class AgmState:
    """One step of the AGM iteration a <- (a+b)/2, b <- sqrt(ab)."""

    a: HPReal
    b: HPReal
    index: int


def const_pi(prec: int = DEFAULT_PREC) -> HPReal:
    """pi to ``prec`` significant digits."""
    if prec < 10:
        raise ValueError("precision below 10 digits is not supported")
    with mp.workdps(prec + _GUARD):
        return HPReal._raw(+mp.pi, prec)


def const_gamma(prec: int = DEFAULT_PREC) -> HPReal:
    """Euler's constant gamma to ``prec`` significant digits."""
    if prec < 10:
        raise ValueError("precision below 10 digits is not supported")
    with mp.workdps(prec + _GUARD):
        return HPReal._raw(+mp.euler, prec)


def agm_sequence(a: Number, b: Number, prec: int = DEFAULT_PREC) -> Iterator[AgmState]:
    """Yield successive AGM states until a and b agree to the full budget."""
    x = HPReal(a, prec)
    y = HPReal(b, prec)
    if not (x > 0 and y > 0):
        raise ValueError("AGM requires positive inputs")
    with mp.workdps(prec + _GUARD):
        av, bv = x._v, y._v
        eps = mp.mpf(10) ** (-(prec + 2))
        i = 0
        yield AgmState(HPReal._raw(av, prec), HPReal._raw(bv, prec), i)
        while abs(av - bv) > eps * max(abs(av), mp.mpf(1)):
            av, bv = (av + bv) / 2, mp.sqrt(av * bv)
            i += 1
            yield AgmState(HPReal._raw(av, prec), HPReal._raw(bv, prec), i)
            if i > 8 * prec:
                raise RuntimeError("AGM failed to converge")


def agm(a: Number, b: Number, prec: int = DEFAULT_PREC) -> HPReal:
    """Common limit of the Lagrange AGM iteration; quadratically convergent."""
    state = None
    for state in agm_sequence(a, b, prec):
        pass
    return (state.a + state.b) / 2


def _agm_mpf(a: mp.mpf, b: mp.mpf) -> mp.mpf:
    """AGM on raw mpf values at the ambient working precision."""
    eps = mp.eps * 8
    while abs(a - b) > eps * abs(a):
        a, b = (a + b) / 2, mp.sqrt(a * b)
    return (a + b) / 2


def sin_pi_over_12(prec: int = DEFAULT_PREC) -> HPReal:
    """sin(pi/12) in closed form, (sqrt 3 - 1)/sqrt 8."""
    with mp.workdps(prec + _GUARD):
        return HPReal._raw((mp.sqrt(3) - 1) / mp.sqrt(8), prec)


def gamma_fraction(which: str, prec: int = DEFAULT_PREC) -> HPReal:
    """Gamma(3/4) or Gamma(1/3), recovered by inverting an AGM identity.

    which: "3/4" inverts M(1, sqrt 2) = sqrt(2/pi) Gamma(3/4)^2;
           "1/3" inverts M(1+z, 1-z) = 2^(4/3) pi^2 / (3^(1/4) Gamma(1/3)^3)
           with z = sin(pi/12).
    """
    key = str(which)
    with mp.workdps(prec + _GUARD):
        if key == "3/4":
            m = _agm_mpf(mp.mpf(1), mp.sqrt(2))
            v = mp.sqrt(m) * mp.power(mp.pi / 2, mp.mpf(1) / 4)
        elif key == "1/3":
            z = (mp.sqrt(3) - 1) / mp.sqrt(8)
            m = _agm_mpf(1 + z, 1 - z)
            v = mp.cbrt(mp.power(2, mp.mpf(4) / 3) * mp.pi ** 2 / (mp.power(3, mp.mpf(1) / 4) * m))
        else:
            raise ValueError("which must be '3/4' or '1/3'")
        return HPReal._raw(v, prec)
