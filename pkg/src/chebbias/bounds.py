"""Effective-bound machinery: discrete extremum scans, drift extrema,
sandwich estimates for mu_f, the GRH envelope, linear psi bounds, the
inequality-propagation certificate, and exact squarefree remainder scans.

The scan reduction: if F is non-decreasing and changes value only at the
integers x_1 < ... < x_n inside (y0, y1) and r is non-decreasing, then with
x_0 = y0 and x_{n+1} = y1,

    sup_{y0<=x<=y1} (F - r) = max_i  F(x_i) - r(x_i)
    inf_{y0<=x<=y1} (F - r) = min_i  F(x_i) - r(x_{i+1}).

Drift scans apply this to F(x) = sum_{n<=x} Lambda_f(n)/n with
r(x) = tau log x; the change points are the generator prime powers.  Since
on [y0, x_1) the drift equals -tau log x, the supremum over the closed
interval always admits the left endpoint as a candidate; both the
"include y0" and the "change points only" suprema are reported.

The sandwich: if C- <= drift(x) <= C+ for all x >= 1 then for
x > exp(C+), with L = log x,

  (C_f/tau) L^tau (1 - C+/L)^(tau+1) / (1 - C-/L)  <=  mu_f(x)
      <=  (C_f/tau) L^tau (1 - C-/L)^(tau+1) / (1 - C+/L).

The propagation certificate decides whether

  log^tau(x/r) (1 - C+/log(x/r))^(tau+1) / (1 - C-/log(x/r))
      >= c1 log^tau(x/s) (1 - C'-/log(x/s))^(tau+1) / (1 - C'+/log(x/s))

holds for all x >= x1 by the monotonicity of the rewritten form: the right
side is non-increasing in x, and the left side is non-decreasing when
log s + C'- <= C+ + log r (otherwise it decreases to 1, and the condition
that the right side is at most 1 certifies instead).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Literal, Sequence

import mpmath as mp
import numpy as np

from .hpreal import DEFAULT_PREC, HPReal
from .multfun import SemigroupSpec, SummatorySeries
from .sieve import SieveTables
from .verdict import BiasVerdict, Violation

__all__ = [
    "ScanResult",
    "SandwichBounds",
    "CertificateResult",
    "scan_extremum",
    "drift_scan",
    "mu_sandwich",
    "mu_sandwich_refined",
    "grh_envelope",
    "psi_linear_check",
    "propagation_certificate",
    "squarefree_remainder_scan",
    "SQUAREFREE_BOUNDS",
]


@dataclass(frozen=True)
class ScanResult:
    """Extrema of a step function minus a monotone ramp over [y0, y1].

    sup_value/sup_arg include the left endpoint y0 as a candidate;
    sup_cp_value/sup_cp_arg range over the change points only.
    """

    sup_value: HPReal
    sup_arg: float
    inf_value: HPReal
    inf_arg: float
    sup_cp_value: HPReal
    sup_cp_arg: float
    y0: float
    y1: float
    change_points: int
    conditional: str | None = None


def _better_max(best, cand):
    v, a = best
    cv, ca = cand
    if best[0] is None or cv > v or (cv == v and ca < a):
        return cand
    return best


def _better_min(best, cand):
    v, a = best
    cv, ca = cand
    if best[0] is None or cv < v or (cv == v and ca < a):
        return cand
    return best


def scan_extremum(
    step_values: Sequence[tuple[float, object]],
    r: Callable[[mp.mpf], mp.mpf],
    y0,
    y1,
    f0=0,
    prec: int = DEFAULT_PREC,
) -> ScanResult:
    """Exact sup/inf of F - r on [y0, y1] for a step function F.

    ``step_values`` lists (x_i, F(x_i)) at the points where F changes, in
    strictly increasing order inside (y0, y1]; ``f0`` is F(y0).  ``r`` is
    evaluated under the working precision and must be non-decreasing.
    """
    xs = [x for x, _ in step_values]
    if any(b <= a for a, b in zip(xs, xs[1:])):
        raise ValueError("change points must be strictly increasing")
    if xs and (xs[0] <= y0 or xs[-1] > y1):
        raise ValueError("change points must lie in (y0, y1]")
    with mp.workdps(prec + 5):
        fs = [mp.mpf(str(v)) if not isinstance(v, (mp.mpf, int)) else mp.mpf(v)
              for _, v in step_values]
        f0 = mp.mpf(str(f0)) if not isinstance(f0, (mp.mpf, int)) else mp.mpf(f0)
        sup = (None, None)
        sup_cp = (None, None)
        inf = (None, None)
        sup = _better_max(sup, (f0 - r(mp.mpf(y0)), y0))
        nxt = xs[0] if xs else y1
        inf = _better_min(inf, (f0 - r(mp.mpf(nxt)), y0))
        for i, (x, fv) in enumerate(zip(xs, fs)):
            v = fv - r(mp.mpf(x))
            sup = _better_max(sup, (v, x))
            sup_cp = _better_max(sup_cp, (v, x))
            nxt = xs[i + 1] if i + 1 < len(xs) else y1
            inf = _better_min(inf, (fv - r(mp.mpf(nxt)), x))
        if sup_cp[0] is None:
            sup_cp = sup
        return ScanResult(
            sup_value=HPReal._raw(sup[0], prec), sup_arg=sup[1],
            inf_value=HPReal._raw(inf[0], prec), inf_arg=inf[1],
            sup_cp_value=HPReal._raw(sup_cp[0], prec), sup_cp_arg=sup_cp[1],
            y0=y0, y1=y1, change_points=len(xs),
        )


def drift_scan(
    series: SummatorySeries,
    x_max: int | None = None,
    prec: int = 30,
    conditional: str | None = None,
) -> ScanResult:
    """Extrema of sum_{n<=x} Lambda_f(n)/n - tau log x over [1, x_max].

    One exact high-precision sweep over the generator prime powers; the
    values at the sup/inf arguments carry the full working precision.
    """
    x_max = series.x_max if x_max is None else int(x_max)
    if x_max > series.x_max:
        raise ValueError("x_max exceeds the sieve range")
    ns, ps, mult = series.prime_powers
    k = int(np.searchsorted(ns, x_max, side="right"))
    tau = series.spec.tau
    with mp.workdps(prec + 5):
        tau_v = mp.mpf(tau.numerator) / tau.denominator
        logs: dict[int, mp.mpf] = {}

        def logof(v: int) -> mp.mpf:
            lv = logs.get(v)
            if lv is None:
                lv = mp.log(v)
                logs[v] = lv
            return lv

        H = mp.mpf(0)
        sup = (mp.mpf(0), 1)            # y0 = 1 contributes F(1) - tau log 1 = 0
        sup_cp = (None, None)
        inf = (None, None)
        prev_x = 1
        for i in range(k):
            n = int(ns[i])
            p = int(ps[i])
            lp = logof(p)
            # log n = r log p with n = p^r, reusing the cached base logarithm
            r_exp = 1
            q = n
            while q != p:
                q //= p
                r_exp += 1
            rn = tau_v * (lp * r_exp)
            inf = _better_min(inf, (H - rn, prev_x))
            H += int(mult[i]) * lp / n
            v = H - rn
            sup = _better_max(sup, (v, n))
            sup_cp = _better_max(sup_cp, (v, n))
            prev_x = n
        inf = _better_min(inf, (H - tau_v * mp.log(x_max), prev_x))
        if sup_cp[0] is None:
            sup_cp = sup
        return ScanResult(
            sup_value=HPReal._raw(sup[0], prec), sup_arg=sup[1],
            inf_value=HPReal._raw(inf[0], prec), inf_arg=inf[1],
            sup_cp_value=HPReal._raw(sup_cp[0], prec), sup_cp_arg=sup_cp[1],
            y0=1, y1=x_max, change_points=k, conditional=conditional,
        )


# -- sandwich bounds ------------------------------------------------------------


@dataclass(frozen=True)
class SandwichBounds:
    """Drift bounds C- <= drift <= C+ plus the leading constant C_f."""

    spec: SemigroupSpec
    tau: Fraction
    c_minus: HPReal
    c_plus: HPReal
    c_f: HPReal
    provenance: str = ""

    def __post_init__(self):
        if self.c_minus > self.c_plus:
            raise ValueError("need C- <= C+")

    @property
    def x0(self) -> float:
        return float(self.c_plus.exp())


def _sandwich_mpf(tau, cf, cm, cp, L):
    lo = cf / tau * mp.power(L, tau) * mp.power(1 - cp / L, tau + 1) / (1 - cm / L)
    hi = cf / tau * mp.power(L, tau) * mp.power(1 - cm / L, tau + 1) / (1 - cp / L)
    return lo, hi


def mu_sandwich(bounds: SandwichBounds, x, prec: int = DEFAULT_PREC) -> tuple[HPReal, HPReal]:
    """Two-sided estimate for mu_f(x), valid for x > exp(C+)."""
    with mp.workdps(prec + 5):
        tau = mp.mpf(bounds.tau.numerator) / bounds.tau.denominator
        cm, cp, cf = bounds.c_minus.mpf, bounds.c_plus.mpf, bounds.c_f.mpf
        xv = mp.mpf(x)
        if not xv > mp.exp(cp):
            raise ValueError(f"sandwich needs x > exp(C+) = {mp.nstr(mp.exp(cp), 8)}")
        lo, hi = _sandwich_mpf(tau, cf, cm, cp, mp.log(xv))
        return HPReal._raw(lo, prec), HPReal._raw(hi, prec)


@dataclass(frozen=True)
class RefinedSandwich:
    lower: HPReal
    upper: HPReal
    d_plus: HPReal
    iterations: int


def mu_sandwich_refined(
    bounds: SandwichBounds,
    improved_tail: tuple[object, int],
    x,
    prec: int = DEFAULT_PREC,
    tol: float = 1e-6,
) -> RefinedSandwich:
    """One-sided refinement when drift(y) <= C'+ is known for y >= n0.

    Splitting sum f(n)/n (B_f + E_f(x/n)) at n = x/n0 bounds the inner term
    by C+ mu_f(x) - (C+ - C'+) mu_f(x/n0), so D+ = C+ - (C+ - C'+) rho with
    rho a certified lower bound for mu_f(x/n0)/mu_f(x).  Each improved D+
    tightens rho; iterate to a fixed point.
    """
    cp_prime, n0 = improved_tail
    if n0 < 1:
        raise ValueError("n0 must be at least 1")
    with mp.workdps(prec + 5):
        tau = mp.mpf(bounds.tau.numerator) / bounds.tau.denominator
        cm, cp, cf = bounds.c_minus.mpf, bounds.c_plus.mpf, bounds.c_f.mpf
        cpp = mp.mpf(str(cp_prime)) if not isinstance(cp_prime, HPReal) else cp_prime.mpf
        if cpp > cp:
            raise ValueError("C'+ must improve on C+")
        xv = mp.mpf(x)
        if n0 == 1:
            d_plus = cpp
            iters = 0
        else:
            if not xv / n0 > mp.exp(cp):
                raise ValueError("need x/n0 > exp(C+) for the split to apply")
            d_plus = cp
            iters = 0
            while True:
                lo_small, _ = _sandwich_mpf(tau, cf, cm, d_plus, mp.log(xv / n0))
                _, hi_big = _sandwich_mpf(tau, cf, cm, d_plus, mp.log(xv))
                rho = lo_small / hi_big
                new = cp - (cp - cpp) * rho
                iters += 1
                if abs(new - d_plus) < tol or iters > 200:
                    d_plus = new
                    break
                d_plus = new
        lo, hi = _sandwich_mpf(tau, cf, cm, d_plus, mp.log(xv))
        return RefinedSandwich(
            HPReal._raw(lo, prec), HPReal._raw(hi, prec), HPReal._raw(d_plus, prec), iters
        )


def grh_envelope(x, d: int = 4, prec: int = 20) -> HPReal:
    """(11/(32 pi sqrt x)) (3 log^2 x + 8 log x + 16), for x >= 224, d <= 432."""
    if d > 432:
        raise ValueError("envelope constant is stated for moduli d <= 432")
    if not x >= 224:
        raise ValueError("envelope is valid for x >= 224")
    with mp.workdps(prec + 5):
        xv = mp.mpf(x)
        L = mp.log(xv)
        v = 11 / (32 * mp.pi * mp.sqrt(xv)) * (3 * L ** 2 + 8 * L + 16)
        return HPReal._raw(v, prec)


# -- linear psi bounds ------------------------------------------------------------


def psi_linear_check(
    series: SummatorySeries,
    slope,
    direction: Literal["<=", ">="],
    x_from: int,
    x_to: int,
    prec: int = 30,
) -> BiasVerdict:
    """Exact verification of psi_f(x) <=/>= slope * x over real x in [x_from, x_to].

    psi_f is a right-continuous step function jumping at generator prime
    powers, so for "<=" the binding points are the change points (and the
    left endpoint), and for ">=" each step must clear the line at the right
    end of its segment.  Comparisons run in float with a safety margin and
    near-ties are re-decided at working precision.
    """
    if direction not in ("<=", ">="):
        raise ValueError("direction must be '<=' or '>='")
    if not 0 <= x_from <= x_to <= series.x_max:
        raise ValueError("bad range")
    ns, ps, mult = series.prime_powers
    k = int(np.searchsorted(ns, x_to, side="right"))
    xs = ns[:k]
    w = mult[:k] * np.log(ps[:k].astype(np.float64))
    psi = np.cumsum(w) if k else np.zeros(0)
    slope_f = float(slope)
    margin = max(1e-9, 4 * k * 2.3e-16 * (float(psi[-1]) if k else 1.0))

    def psi_exact(i: int) -> mp.mpf:
        acc = mp.mpf(0)
        for j in range(i + 1):
            acc += int(mult[j]) * mp.log(int(ps[j]))
        return acc

    viols: list[tuple[int, str, str]] = []
    with mp.workdps(prec + 5):
        slope_mp = mp.mpf(str(slope))
        # walk the constant segments of psi_f intersected with [x_from, x_to]
        for i in range(-1, k):
            base_f = float(psi[i]) if i >= 0 else 0.0
            seg_lo = int(xs[i]) if i >= 0 else 0
            seg_hi = int(xs[i + 1]) if i + 1 < k else x_to + 1   # psi constant on [seg_lo, seg_hi)
            lo = max(seg_lo, x_from)
            if lo > x_to or lo >= seg_hi:
                continue
            if direction == "<=":
                # increasing line: the segment is tightest at its left end
                if base_f - slope_f * lo <= -margin:
                    continue
                base = psi_exact(i)
                if base <= slope_mp * lo:
                    continue
                witness = lo
            else:
                # tightest approaching the right end (attained when capped at x_to)
                bind = min(seg_hi, x_to)
                if base_f - slope_f * bind >= margin:
                    continue
                base = psi_exact(i)
                if base >= slope_mp * bind:
                    continue
                # smallest integer in the segment where the line already wins
                witness = max(lo, int(math.floor(base_f / slope_f)) + 1)
                while witness <= bind and base >= slope_mp * witness:
                    witness += 1
                witness = min(witness, bind)
            viols.append(
                (witness, mp.nstr(base, 12), mp.nstr(slope_mp * witness, 12))
            )
    label = f"psi_{series.spec.label}"
    line = f"{slope}*x"
    if not viols:
        return BiasVerdict(
            metric=f"psi_linear{direction}", left=label, right=line,
            x_from=x_from, x_to=x_to, holds=True,
        )
    viols.sort()
    fx = viols[0]
    lx = viols[-1]
    return BiasVerdict(
        metric=f"psi_linear{direction}", left=label, right=line,
        x_from=x_from, x_to=x_to, holds=False,
        first_violation=Violation(x=fx[0], left=fx[1], right=fx[2]),
        last_violation=Violation(x=lx[0], left=lx[1], right=lx[2]),
    )


# -- propagation certificate -------------------------------------------------------


@dataclass(frozen=True)
class CertificateResult:
    status: Literal["certified_for_all_x_ge_x1", "not_certified"]
    branch: Literal["monotone_lhs", "rhs_below_one", "none"]
    x0: float
    x1: float
    lhs_at_x1: HPReal
    rhs_at_x1: HPReal

    @property
    def certified(self) -> bool:
        return self.status == "certified_for_all_x_ge_x1"

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "branch": self.branch,
            "x0": self.x0,
            "x1": self.x1,
            "lhs_at_x1": self.lhs_at_x1.to_str(20),
            "rhs_at_x1": self.rhs_at_x1.to_str(20),
        }


def propagation_certificate(
    tau,
    r,
    s,
    c1,
    c_minus,
    c_plus,
    cp_minus,
    cp_plus,
    x1,
    prec: int = DEFAULT_PREC,
) -> CertificateResult:
    """Certify lower-sandwich(x/r) >= c1 * upper-sandwich(x/s) for all x >= x1."""
    with mp.workdps(prec + 5):
        conv = lambda v: v.mpf if isinstance(v, HPReal) else (
            mp.mpf(v.numerator) / v.denominator if isinstance(v, Fraction) else mp.mpf(str(v))
        )
        tau_v, r_v, s_v, c1_v = conv(tau), conv(r), conv(s), conv(c1)
        cm, cp, cpm, cpp = conv(c_minus), conv(c_plus), conv(cp_minus), conv(cp_plus)
        x0 = max(mp.exp(cpp) * s_v, mp.exp(cp) * r_v)
        x1_v = mp.mpf(str(x1))
        if not x1_v > x0:
            raise ValueError(f"need x1 > x0 = {mp.nstr(x0, 8)}")
        Lr = mp.log(x1_v / r_v)
        Ls = mp.log(x1_v / s_v)
        lhs = mp.power(Lr, tau_v) * mp.power(1 - cp / Lr, tau_v + 1) / (1 - cm / Lr)
        rhs = c1_v * mp.power(Ls, tau_v) * mp.power(1 - cpm / Ls, tau_v + 1) / (1 - cpp / Ls)
        out = lambda st, br: CertificateResult(
            status=st, branch=br, x0=float(x0), x1=float(x1_v),
            lhs_at_x1=HPReal._raw(lhs, prec), rhs_at_x1=HPReal._raw(rhs, prec),
        )
        if mp.log(s_v) + cpm <= cp + mp.log(r_v):
            # left side of the rewritten inequality is non-decreasing in x
            # while the right side is non-increasing: truth at x1 propagates
            return out("certified_for_all_x_ge_x1" if lhs >= rhs else "not_certified",
                       "monotone_lhs")
        rewritten_rhs = mp.power(
            c1_v * (1 + (cpp - cpm) / (Ls - cpp)) / (1 + (cm - cp) / (Lr - cm)),
            1 / tau_v,
        )
        if rewritten_rhs <= 1:
            return out("certified_for_all_x_ge_x1", "rhs_below_one")
        return out("not_certified", "none")


# -- squarefree remainder scans ------------------------------------------------------

# named presets: (bound callable on float array, default x_from)
SQUAREFREE_BOUNDS = {
    "sqrt": (lambda x: np.sqrt(x), 1),
    "cohen_dress": (lambda x: 0.1333 * np.sqrt(x), 1664),
    "half_sqrt_plus_1": (lambda x: 0.5 * np.sqrt(x) + 1.0, 0),
    "q3_crude": (lambda x: 0.3154 * np.sqrt(x) + 17.2, 0),
    "qodd_sharp": (lambda x: (2 / np.pi ** 2 + 0.25) * np.sqrt(x) + 0.25 * x ** 0.25 + 2.0, 0),
}

_VARIANTS = {
    "Q": (6, 1),        # main term 6x/pi^2
    "Q_odd": (4, 1),    # 4x/pi^2
    "Q_chi3": (9, 2),   # 9x/(2 pi^2)
}


def squarefree_remainder_scan(
    tables: SieveTables,
    variant: Literal["Q", "Q_odd", "Q_chi3"],
    bound,
    x_max: int,
    x_from: int | None = None,
    prec: int = 30,
) -> BiasVerdict:
    """Exact verification of |count(x) - main term| <= bound(x) for every integer x.

    ``bound`` is a preset name from SQUAREFREE_BOUNDS or a callable acting on
    a float array.  Near-boundary points are re-decided at working precision
    (the remainder is a transcendental combination, so ties cannot occur).
    """
    if variant not in _VARIANTS:
        raise ValueError("variant must be Q, Q_odd or Q_chi3")
    if isinstance(bound, str):
        fn, default_from = SQUAREFREE_BOUNDS[bound]
        bound_name = bound
    else:
        fn, default_from = bound, 0
        bound_name = getattr(bound, "__name__", "bound")
    x_from = default_from if x_from is None else x_from
    if x_max > tables.x_max:
        raise ValueError("x_max exceeds the sieve range")
    sf = tables.squarefree[: x_max + 1]
    if variant == "Q":
        flags = sf
    elif variant == "Q_odd":
        flags = sf.copy()
        flags[0::2] = False
    else:
        flags = sf.copy()
        flags[0::3] = False
    counts = np.cumsum(flags, dtype=np.int64)
    num, den = _VARIANTS[variant]
    x = np.arange(0, x_max + 1, dtype=np.float64)
    resid = np.abs(counts - num * x / (den * np.pi ** 2))
    slack = fn(x) - resid
    lo = max(x_from, 0)
    margin = 1e-6
    suspect = np.flatnonzero(slack[lo:] < margin) + lo

    viols: list[int] = []
    if len(suspect):
        with mp.workdps(prec + 5):
            main = mp.mpf(num) / (den * mp.pi ** 2)
            for xi in suspect:
                xi = int(xi)
                resid_x = abs(int(counts[xi]) - main * xi)
                bound_x = mp.mpf(str(float(fn(np.float64(xi)))))
                if resid_x > bound_x:
                    viols.append(xi)
    name = f"|{variant}(x) - main|"
    if not viols:
        return BiasVerdict(
            metric="squarefree_remainder", left=name, right=bound_name,
            x_from=lo, x_to=x_max, holds=True,
        )
    viols.sort()
    return BiasVerdict(
        metric="squarefree_remainder", left=name, right=bound_name,
        x_from=lo, x_to=x_max, holds=False,
        first_violation=Violation(x=viols[0], left=name, right=bound_name),
        last_violation=Violation(x=viols[-1], left=name, right=bound_name),
    )
