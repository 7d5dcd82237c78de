"""Exact integer-side tables: smallest prime factors, squarefree flags,
primes and prime powers split by residue class mod 3 and mod 4.

Construction is a segmented sieve; results are deterministic and
independent of the segment size.  All tables are immutable after build and
every query is read-only.  The sieve stays in exact integer arithmetic:
prime-power lists carry the base p, not log p, so logarithms can be taken
later at whatever precision the caller wants.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterator, NamedTuple

import numpy as np

__all__ = [
    "SieveTables",
    "PrimePower",
    "PrimePowerList",
    "SieveMemoryError",
    "build",
]

_FORMAT_MAGIC = "chebbias-sieve"
_FORMAT_VERSION = 1

# tables cost about 5 bytes per integer (uint32 spf + bool squarefree)
_DEFAULT_MAX_BYTES = 2 * 10 ** 9
_DEFAULT_SEGMENT = 1 << 24


class SieveMemoryError(MemoryError):
    pass


class PrimePower(NamedTuple):
    n: int          # the prime power p**r
    p: int
    r: int


@dataclass(frozen=True)
class PrimePowerList:
    """Ascending prime powers p**r <= x_max with p = a (mod d)."""

    d: int
    a: int
    x_max: int
    ns: np.ndarray
    ps: np.ndarray
    rs: np.ndarray

    def __len__(self) -> int:
        return len(self.ns)

    def __iter__(self) -> Iterator[PrimePower]:
        for n, p, r in zip(self.ns, self.ps, self.rs):
            yield PrimePower(int(n), int(p), int(r))

    def __getitem__(self, i) -> PrimePower:
        return PrimePower(int(self.ns[i]), int(self.ps[i]), int(self.rs[i]))


def _simple_primes(limit: int) -> np.ndarray:
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return np.flatnonzero(flags).astype(np.int64)


class SieveTables:
    """Immutable exact tables up to x_max."""

    def __init__(self, x_max: int, spf: np.ndarray, squarefree: np.ndarray):
        self.x_max = int(x_max)
        self.spf = spf
        self.squarefree = squarefree
        self._primes: np.ndarray | None = None
        self._class_primes: dict[tuple[int, int], np.ndarray] = {}
        # scratch cache used by higher layers (member flags etc.)
        self.cache: dict = {}

    # -- construction -----------------------------------------------------

    @classmethod
    def build(
        cls,
        x_max: int,
        segment_size: int | None = None,
        max_bytes: int = _DEFAULT_MAX_BYTES,
    ) -> "SieveTables":
        if not 2 <= x_max <= 10 ** 9:
            raise ValueError("x_max must be between 2 and 1e9")
        need = (x_max + 1) * 5
        if need > max_bytes:
            advisory = _DEFAULT_SEGMENT
            raise SieveMemoryError(
                f"tables for x_max={x_max} need about {need/1e9:.1f} GB; "
                f"raise max_bytes or query in segments of about {advisory} integers"
            )
        seg = segment_size or _DEFAULT_SEGMENT
        if seg < 2:
            raise ValueError("segment_size must be at least 2")

        spf = np.zeros(x_max + 1, dtype=np.uint32)
        sf = np.ones(x_max + 1, dtype=bool)
        sf[0] = False
        base = _simple_primes(math.isqrt(x_max))
        for lo in range(2, x_max + 1, seg):
            hi = min(lo + seg, x_max + 1)
            for p in base:
                p = int(p)
                start = max(p * p, ((lo + p - 1) // p) * p)
                if start < hi:
                    view = spf[start:hi:p]
                    view[view == 0] = p
                p2 = p * p
                start2 = ((lo + p2 - 1) // p2) * p2
                if start2 < hi:
                    sf[start2:hi:p2] = False
        rest = np.flatnonzero(spf[2:] == 0).astype(np.int64) + 2
        spf[rest] = rest
        spf.setflags(write=False)
        sf.setflags(write=False)
        return cls(x_max, spf, sf)

    # -- basic queries ------------------------------------------------------

    def _check_range(self, x) -> int:
        xi = math.floor(x)
        if xi > self.x_max or xi < 0:
            raise ValueError(f"x={x} outside sieve range [0, {self.x_max}]")
        return xi

    def smallest_prime_factor(self, n: int) -> int:
        self._check_range(n)
        if n < 2:
            raise ValueError("smallest prime factor needs n >= 2")
        return int(self.spf[n])

    def is_prime(self, n: int) -> bool:
        return 2 <= n <= self.x_max and int(self.spf[n]) == n

    def factorize(self, n: int) -> list[tuple[int, int]]:
        """Prime factorization [(p, e), ...] from the spf chain."""
        self._check_range(n)
        out: list[tuple[int, int]] = []
        while n > 1:
            p = int(self.spf[n])
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        return out

    @property
    def primes(self) -> np.ndarray:
        if self._primes is None:
            idx = np.arange(2, self.x_max + 1, dtype=np.uint32)
            self._primes = (np.flatnonzero(self.spf[2:] == idx) + 2).astype(np.int64)
        return self._primes

    def primes_in_class(self, d: int, a: int) -> np.ndarray:
        key = (d, a)
        if key not in self._class_primes:
            p = self.primes
            self._class_primes[key] = p[p % d == a]
        return self._class_primes[key]

    # -- counting functions ---------------------------------------------------

    def count_squarefree(self, x) -> int:
        """Q(x): number of squarefree integers <= x."""
        xi = self._check_range(x)
        return int(np.count_nonzero(self.squarefree[: xi + 1]))

    def count_squarefree_odd(self, x) -> int:
        """Q_odd(x): odd squarefree integers <= x."""
        xi = self._check_range(x)
        return int(np.count_nonzero(self.squarefree[1 : xi + 1 : 2]))

    def count_squarefree_coprime3(self, x) -> int:
        """Q_chi3(x): squarefree integers <= x coprime to 3."""
        xi = self._check_range(x)
        total = np.count_nonzero(self.squarefree[: xi + 1])
        div3 = np.count_nonzero(self.squarefree[: xi + 1 : 3])
        return int(total - div3)

    def pi_count(self, x, d: int | None = None, a: int | None = None) -> int:
        """pi(x) or pi(x; d, a): primes <= x (in the residue class a mod d)."""
        xi = self._check_range(x)
        arr = self.primes if d is None else self.primes_in_class(d, a)
        return int(np.searchsorted(arr, xi, side="right"))

    def prime_powers(self, d: int, a: int, x_max: int | None = None) -> PrimePowerList:
        """All prime powers p**r <= x_max with p = a (mod d), ascending."""
        limit = self.x_max if x_max is None else int(x_max)
        if limit > self.x_max:
            raise ValueError("requested range exceeds the sieve tables")
        if math.gcd(a, d) != 1:
            raise ValueError("need gcd(a, d) = 1")
        rows = []
        for p in self.primes_in_class(d, a):
            p = int(p)
            if p > limit:
                break
            pk, r = p, 1
            while pk <= limit:
                rows.append((pk, p, r))
                pk *= p
                r += 1
        rows.sort()
        ns = np.array([t[0] for t in rows], dtype=np.int64)
        ps = np.array([t[1] for t in rows], dtype=np.int64)
        rs = np.array([t[2] for t in rows], dtype=np.int32)
        return PrimePowerList(d, a, limit, ns, ps, rs)

    # -- persistence ----------------------------------------------------------

    def dump(self, path) -> None:
        """Versioned binary dump of the tables."""
        header = json.dumps(
            {"magic": _FORMAT_MAGIC, "version": _FORMAT_VERSION, "x_max": self.x_max}
        )
        np.savez_compressed(path, header=np.frombuffer(header.encode(), dtype=np.uint8),
                            spf=self.spf, squarefree=self.squarefree)

    @classmethod
    def load(cls, path) -> "SieveTables":
        with np.load(path) as data:
            header = json.loads(bytes(data["header"]).decode())
            if header.get("magic") != _FORMAT_MAGIC:
                raise ValueError("not a chebbias sieve dump")
            if header.get("version") != _FORMAT_VERSION:
                raise ValueError(f"unsupported dump version {header.get('version')}")
            spf = data["spf"]
            sf = data["squarefree"]
            x_max = int(header["x_max"])
        if len(spf) != x_max + 1 or len(sf) != x_max + 1:
            raise ValueError("corrupt sieve dump: array lengths disagree with header")
        spf.setflags(write=False)
        sf.setflags(write=False)
        return cls(x_max, spf, sf)


def build(x_max: int, segment_size: int | None = None) -> SieveTables:
    return SieveTables.build(x_max, segment_size=segment_size)
