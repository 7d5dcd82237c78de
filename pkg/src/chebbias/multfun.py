"""Semigroup multiplicative functions and their summatory functions.

A ``SemigroupSpec`` names a multiplicative 0/1 function through its
prime-power generators:

* ``residue_class(d, a)``: integers all of whose prime divisors are
  = a (mod d); generators are the primes p = a (mod d), so the von
  Mangoldt analogue is log p on every power of such p.
* ``sum_of_two_squares``: generated by 2, the primes p = 1 (mod 4) and the
  squares of the primes p = 3 (mod 4); the weight is log p on powers of the
  first two kinds and 2 log p on even powers p^(2k) of the third kind
  (powers of the generator p^2), zero elsewhere.
* ``all_primes``: the trivial semigroup of every integer, whose weight is
  the classical von Mangoldt function.

``SummatorySeries`` binds a spec to sieve tables and evaluates the exact
step functions M_f, psi_f, mu_f and lambda_f, together with the convolution
identities linking them:

    f(n) log n   = sum_{q | n, q a prime power} Lambda_f(q) f(n/q)
    lambda_f(x)  = sum_{n<=x} f(n) psi_f(x/n)
    M_f(x)       = 1 + lambda_f(x)/log x + int_2^x lambda_f(t)/(t log^2 t) dt

where the last integral is evaluated exactly piecewise (the antiderivative
of 1/(t log^2 t) is -1/log t) and the leading 1 accounts for n = 1.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import mpmath as mp
import numpy as np

from .hpreal import DEFAULT_PREC, HPReal
from .sieve import SieveTables

__all__ = [
    "SemigroupSpec",
    "SummatorySeries",
    "G_3_1",
    "G_3_2",
    "G_4_1",
    "G_4_3",
    "B1",
    "ALL_PRIMES",
    "member",
    "lambda_f",
    "convolution_residual",
    "lambda_from_psi_residual",
    "m_from_lambda_residual",
    "export_grid",
]


@dataclass(frozen=True)
class SemigroupSpec:
    kind: str
    d: int | None = None
    a: int | None = None

    def __post_init__(self):
        if self.kind == "residue_class":
            if self.d is None or self.a is None:
                raise ValueError("residue_class needs d and a")
            if math.gcd(self.a, self.d) != 1:
                raise ValueError("residue_class needs gcd(a, d) = 1")
        elif self.kind in ("sum_of_two_squares", "all_primes"):
            if self.d is not None or self.a is not None:
                raise ValueError(f"{self.kind} takes no d, a")
        else:
            raise ValueError(f"unknown spec kind {self.kind!r}")

    @classmethod
    def residue_class(cls, d: int, a: int) -> "SemigroupSpec":
        return cls("residue_class", d, a)

    @classmethod
    def sum_of_two_squares(cls) -> "SemigroupSpec":
        return cls("sum_of_two_squares")

    @classmethod
    def all_primes(cls) -> "SemigroupSpec":
        return cls("all_primes")

    @property
    def tau(self) -> Fraction:
        if self.kind == "residue_class":
            phi = sum(1 for k in range(1, self.d) if math.gcd(k, self.d) == 1)
            return Fraction(1, phi)
        if self.kind == "sum_of_two_squares":
            return Fraction(1, 2)
        return Fraction(1, 1)

    @property
    def label(self) -> str:
        if self.kind == "residue_class":
            return f"g_{self.d}_{self.a}"
        return "b1" if self.kind == "sum_of_two_squares" else "all"


G_3_1 = SemigroupSpec.residue_class(3, 1)
G_3_2 = SemigroupSpec.residue_class(3, 2)
G_4_1 = SemigroupSpec.residue_class(4, 1)
G_4_3 = SemigroupSpec.residue_class(4, 3)
B1 = SemigroupSpec.sum_of_two_squares()
ALL_PRIMES = SemigroupSpec.all_primes()


def _trial_factorize(n: int) -> list[tuple[int, int]]:
    out = []
    for p in (2, 3):
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
    p = 5
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        p += 2 if p % 6 == 5 else 4
    if n > 1:
        out.append((n, 1))
    return out


def member(n: int, spec: SemigroupSpec) -> int:
    """f(n) for the spec's multiplicative 0/1 function (1 for n = 1)."""
    if n < 1:
        raise ValueError("member needs n >= 1")
    if n == 1 or spec.kind == "all_primes":
        return 1
    fac = _trial_factorize(n)
    if spec.kind == "residue_class":
        return int(all(p % spec.d == spec.a for p, _ in fac))
    return int(all(e % 2 == 0 for p, e in fac if p % 4 == 3))


def _lambda_weight(n: int, spec: SemigroupSpec) -> tuple[int, int] | None:
    """(multiplier, p) with Lambda_f(n) = multiplier * log p, or None if zero."""
    if n < 2:
        return None
    fac = _trial_factorize(n)
    if len(fac) != 1:
        return None
    p, r = fac[0]
    if spec.kind == "all_primes":
        return (1, p)
    if spec.kind == "residue_class":
        return (1, p) if p % spec.d == spec.a else None
    if p == 2 or p % 4 == 1:
        return (1, p)
    return (2, p) if r % 2 == 0 else None


def lambda_f(n: int, spec: SemigroupSpec, prec: int = DEFAULT_PREC) -> HPReal:
    """The generalized von Mangoldt weight Lambda_f(n)."""
    w = _lambda_weight(n, spec)
    if w is None:
        return HPReal(0, prec)
    mult, p = w
    return HPReal(p, prec).log() * mult


class SummatorySeries:
    """Exact tables of f(n) and Lambda_f(n) up to the sieve range."""

    def __init__(self, spec: SemigroupSpec, tables: SieveTables):
        self.spec = spec
        self.tables = tables
        self.x_max = tables.x_max
        self._flags: np.ndarray | None = None
        self._count_cum: np.ndarray | None = None
        self._pp: tuple[np.ndarray, np.ndarray, np.ndarray] | None = None

    # -- membership ---------------------------------------------------------

    @property
    def flags(self) -> np.ndarray:
        """Boolean membership array indexed by n (index 0 is False)."""
        if self._flags is None:
            key = ("flags", self.spec)
            if key not in self.tables.cache:
                self.tables.cache[key] = self._build_flags()
            self._flags = self.tables.cache[key]
        return self._flags

    def _build_flags(self) -> np.ndarray:
        x = self.x_max
        good = np.ones(x + 1, dtype=bool)
        good[0] = False
        if self.spec.kind == "all_primes":
            return good
        primes = self.tables.primes
        if self.spec.kind == "residue_class":
            d, a = self.spec.d, self.spec.a
            for p in primes:
                if p % d != a:
                    p = int(p)
                    good[p::p] = False
            return good
        # sum of two squares: strike n with odd multiplicity at some p = 3 (mod 4)
        parity = np.zeros(x + 1, dtype=bool)
        for p in primes[primes % 4 == 3]:
            p = int(p)
            pk = p
            while pk <= x:
                parity[pk::pk] ^= True
                pk *= p
            good[parity] = False
            parity[p::p] = False
        return good

    @property
    def count_cum(self) -> np.ndarray:
        if self._count_cum is None:
            key = ("count", self.spec)
            if key not in self.tables.cache:
                self.tables.cache[key] = np.cumsum(self.flags, dtype=np.int64)
            self._count_cum = self.tables.cache[key]
        return self._count_cum

    # -- generator prime powers ----------------------------------------------

    @property
    def prime_powers(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(positions p^r, bases p, weight multipliers) for Lambda_f, ascending."""
        if self._pp is None:
            key = ("pp", self.spec)
            if key not in self.tables.cache:
                self.tables.cache[key] = self._build_pp()
            self._pp = self.tables.cache[key]
        return self._pp

    def _build_pp(self):
        x = self.x_max
        rows: list[tuple[int, int, int]] = []
        if self.spec.kind == "residue_class":
            it = self.tables.primes_in_class(self.spec.d, self.spec.a)
            for p in it:
                p = int(p)
                pk = p
                while pk <= x:
                    rows.append((pk, p, 1))
                    pk *= p
        elif self.spec.kind == "all_primes":
            for p in self.tables.primes:
                p = int(p)
                pk = p
                while pk <= x:
                    rows.append((pk, p, 1))
                    pk *= p
        else:
            for p in self.tables.primes:
                p = int(p)
                if p == 2 or p % 4 == 1:
                    pk = p
                    while pk <= x:
                        rows.append((pk, p, 1))
                        pk *= p
                else:
                    step = p * p
                    pk = step
                    while pk <= x:
                        rows.append((pk, p, 2))
                        pk *= step
        rows.sort()
        ns = np.array([t[0] for t in rows], dtype=np.int64)
        ps = np.array([t[1] for t in rows], dtype=np.int64)
        mult = np.array([t[2] for t in rows], dtype=np.int64)
        return ns, ps, mult

    def _check(self, x) -> int:
        xi = math.floor(x)
        if not 1 <= xi <= self.x_max:
            raise ValueError(f"x={x} outside table range [1, {self.x_max}]")
        return xi

    # -- exact step functions -------------------------------------------------

    def m(self, x) -> int:
        """M_f(x): number of members <= x."""
        return int(self.count_cum[self._check(x)])

    def members_upto(self, x) -> np.ndarray:
        return np.flatnonzero(self.flags[: self._check(x) + 1])

    def psi_mpf(self, x) -> mp.mpf:
        """psi_f(x) = sum of Lambda_f weights, at the ambient mpmath precision."""
        xi = self._check(x)
        ns, ps, mult = self.prime_powers
        k = int(np.searchsorted(ns, xi, side="right"))
        logs: dict[int, mp.mpf] = {}
        acc = mp.mpf(0)
        for i in range(k):
            p = int(ps[i])
            lp = logs.get(p)
            if lp is None:
                lp = mp.log(p)
                logs[p] = lp
            acc += lp if mult[i] == 1 else 2 * lp
        return acc

    def psi(self, x, prec: int = DEFAULT_PREC) -> HPReal:
        with mp.workdps(prec + 5):
            return HPReal._raw(self.psi_mpf(x), prec)

    def mu_mpf(self, xs: Sequence[int]) -> list[mp.mpf]:
        """mu_f at several cutoffs in one ascending pass (ascending-n summation)."""
        cuts = sorted(self._check(x) for x in xs)
        members = np.flatnonzero(self.flags[: cuts[-1] + 1])
        out = {}
        acc = mp.mpf(0)
        j = 0
        for c in cuts:
            hi = int(np.searchsorted(members, c, side="right"))
            while j < hi:
                acc += mp.mpf(1) / int(members[j])
                j += 1
            out[c] = +acc
        return [out[self._check(x)] for x in xs]

    def mu(self, x, prec: int = DEFAULT_PREC) -> HPReal:
        with mp.workdps(prec + 5):
            return HPReal._raw(self.mu_mpf([x])[0], prec)

    def lam_mpf(self, xs: Sequence[int]) -> list[mp.mpf]:
        """lambda_f at several cutoffs in one ascending pass."""
        cuts = sorted(self._check(x) for x in xs)
        members = np.flatnonzero(self.flags[: cuts[-1] + 1])
        out = {}
        acc = mp.mpf(0)
        j = 0
        for c in cuts:
            hi = int(np.searchsorted(members, c, side="right"))
            while j < hi:
                acc += mp.log(int(members[j]))
                j += 1
            out[c] = +acc
        return [out[self._check(x)] for x in xs]

    def lam(self, x, prec: int = DEFAULT_PREC) -> HPReal:
        """lambda_f(x) = sum_{n<=x} f(n) log n."""
        with mp.workdps(prec + 5):
            return HPReal._raw(self.lam_mpf([x])[0], prec)

    # -- float fast paths (races and scans re-verify near-ties exactly) --------

    def lambda_terms_float(self, x_to: int) -> np.ndarray:
        t = np.zeros(x_to + 1)
        m = np.flatnonzero(self.flags[: x_to + 1])
        t[m] = np.log(m.astype(np.float64))
        return t

    def mu_terms_float(self, x_to: int) -> np.ndarray:
        t = np.zeros(x_to + 1)
        m = np.flatnonzero(self.flags[: x_to + 1])
        t[m] = 1.0 / m.astype(np.float64)
        return t

    def psi_terms_float(self, x_to: int) -> np.ndarray:
        t = np.zeros(x_to + 1)
        ns, ps, mult = self.prime_powers
        k = int(np.searchsorted(ns, x_to, side="right"))
        np.add.at(t, ns[:k], mult[:k] * np.log(ps[:k].astype(np.float64)))
        return t


def series_for(spec: SemigroupSpec, tables: SieveTables) -> SummatorySeries:
    key = ("series", spec)
    if key not in tables.cache:
        tables.cache[key] = SummatorySeries(spec, tables)
    return tables.cache[key]


# -- identity residuals -------------------------------------------------------


def _pp_divisor_weights(n: int, fac: list[tuple[int, int]], spec: SemigroupSpec):
    """Yield (multiplier, p, cofactor n/p^j) over prime-power divisors with weight."""
    for p, e in fac:
        q = 1
        for j in range(1, e + 1):
            q *= p
            w = _lambda_weight(q, spec)
            if w is not None:
                yield w[0], p, n // q


def convolution_residual(
    x_check: int, spec: SemigroupSpec, tables: SieveTables | None = None,
    prec: int = DEFAULT_PREC,
) -> HPReal:
    """max over n <= x_check of |f(n) log n - sum_{q|n} Lambda_f(q) f(n/q)|."""
    if x_check > 10 ** 5:
        raise ValueError("convolution check is limited to x_check <= 1e5")
    with mp.workdps(prec + 5):
        worst = mp.mpf(0)
        logs: dict[int, mp.mpf] = {}
        for n in range(1, x_check + 1):
            fac = tables.factorize(n) if tables is not None else _trial_factorize(n)
            lhs = member(n, spec) * mp.log(n) if n > 1 else mp.mpf(0)
            rhs = mp.mpf(0)
            for mult, p, cof in _pp_divisor_weights(n, fac, spec):
                if member(cof, spec):
                    lp = logs.get(p)
                    if lp is None:
                        lp = mp.log(p)
                        logs[p] = lp
                    rhs += mult * lp
            worst = max(worst, abs(lhs - rhs))
        return HPReal._raw(worst, prec)


def lambda_from_psi_residual(
    x_check: int, spec: SemigroupSpec, tables: SieveTables, prec: int = DEFAULT_PREC
) -> HPReal:
    """|lambda_f(x) - sum_{n<=x} f(n) psi_f(x/n)| at x = x_check."""
    series = series_for(spec, tables)
    with mp.workdps(prec + 5):
        lhs = series.lam_mpf([x_check])[0]
        # psi prefix over the prime powers once, then look up floor(x/n)
        ns, ps, mult = series.prime_powers
        k = int(np.searchsorted(ns, x_check, side="right"))
        prefix = [mp.mpf(0)]
        for i in range(k):
            prefix.append(prefix[-1] + mult[i] * mp.log(int(ps[i])))
        cut = ns[:k]
        rhs = mp.mpf(0)
        for n in series.members_upto(x_check):
            q = x_check // int(n)
            rhs += prefix[int(np.searchsorted(cut, q, side="right"))]
        return HPReal._raw(abs(lhs - rhs), prec)


def m_from_lambda_residual(
    x_check: int, spec: SemigroupSpec, tables: SieveTables, prec: int = DEFAULT_PREC
) -> HPReal:
    """|M_f(x) - (1 + lambda_f(x)/log x + int_2^x lambda_f(t)/(t log^2 t) dt)|.

    The integral is computed exactly piecewise between jump points of
    lambda_f using the antiderivative -1/log t.
    """
    if x_check < 2:
        raise ValueError("needs x >= 2")
    series = series_for(spec, tables)
    with mp.workdps(prec + 5):
        members = [int(n) for n in series.members_upto(x_check) if n >= 2]
        lam = mp.mpf(0)
        integral = mp.mpf(0)
        for i, n in enumerate(members):
            lam += mp.log(n)
            right = members[i + 1] if i + 1 < len(members) else None
            end = mp.mpf(x_check) if right is None or right > x_check else mp.mpf(right)
            integral += lam * (1 / mp.log(n) - 1 / mp.log(end))
        rhs = 1 + lam / mp.log(x_check) + integral
        return HPReal._raw(abs(series.m(x_check) - rhs), prec)


# -- grid export ----------------------------------------------------------------


def export_grid(
    series: SummatorySeries,
    xs: Iterable[int],
    fmt: str = "csv",
    out=None,
    prec: int = 30,
):
    """Write (x, M_f, psi_f, mu_f, lambda_f) rows as CSV or JSON.

    ``out`` is a writable file object or a path; returns the rows as a list
    of dicts (numbers rendered as decimal strings to preserve digits).
    """
    xs = sorted(set(int(x) for x in xs))
    with mp.workdps(prec + 5):
        mus = series.mu_mpf(xs)
        lams = series.lam_mpf(xs)
        rows = []
        for x, muv, lamv in zip(xs, mus, lams):
            rows.append(
                {
                    "x": x,
                    "m_f": series.m(x),
                    "psi_f": mp.nstr(series.psi_mpf(x), prec),
                    "mu_f": mp.nstr(muv, prec),
                    "lambda_f": mp.nstr(lamv, prec),
                }
            )
    if out is None:
        return rows
    close = False
    if isinstance(out, (str, bytes)) or hasattr(out, "__fspath__"):
        out = open(out, "w", newline="")
        close = True
    try:
        if fmt == "csv":
            w = csv.DictWriter(out, fieldnames=["x", "m_f", "psi_f", "mu_f", "lambda_f"])
            w.writeheader()
            w.writerows(rows)
        elif fmt == "json":
            json.dump({"spec": series.spec.label, "rows": rows}, out, indent=2)
        else:
            raise ValueError("format must be csv or json")
    finally:
        if close:
            out.close()
    return rows
