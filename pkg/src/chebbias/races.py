"""Exact race comparisons and the end-to-end bias certification pipeline.

``race`` compares two step-function metrics pointwise at every integer of a
range, which is exhaustive because all supported metrics change value only
at integers.  Integer-valued metrics (prime counts, member counts) are
compared in exact integer arithmetic.  Real-valued metrics (psi, lambda,
mu) run a float64 prefix scan with a rigorous rounding margin; every point
that lands inside the margin is re-decided at working precision, and exact
rational/integer comparison settles the (structurally rare) ties, so the
verdict is exact.

``theorem2_pipeline`` assembles, per bias pair, the desk-scale certificate:
an exact lambda-inequality scan up to x_max, linear psi bounds, the
sandwich-propagation certificate covering all x >= x_max, and the final
count inequality through the exact step integral

    N_L(x) - N_R(x) = delta(x)/log x + int_2^x delta(t)/(t log^2 t) dt,
    delta = lambda_L - lambda_R.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Literal

import mpmath as mp
import numpy as np

from . import bounds as bounds_mod
from .constants import c_constant
from .hpreal import HPReal
from .multfun import SemigroupSpec, SummatorySeries, series_for
from .sieve import SieveTables
from .verdict import BiasVerdict, Violation

__all__ = [
    "race",
    "transfer_check",
    "corollary2_check",
    "theorem2_pipeline",
    "TransferReport",
    "Corollary2Report",
    "PipelineReport",
    "THEOREM6_DRIFT",
    "PAIR_CONFIGS",
]

_METRICS = ("pi", "theta_pp", "psi", "N", "lambda", "mu")


def _as_spec(s) -> SemigroupSpec:
    if isinstance(s, SemigroupSpec):
        return s
    if isinstance(s, tuple) and len(s) == 2:
        return SemigroupSpec.residue_class(*s)
    raise TypeError(f"cannot interpret {s!r} as a semigroup spec")


# -- event streams per metric ---------------------------------------------------


def _int_positions(tables: SieveTables, metric: str, spec: SemigroupSpec, x_to: int):
    if metric == "pi":
        if spec.kind != "residue_class":
            raise ValueError("pi races need residue-class specs")
        arr = tables.primes_in_class(spec.d, spec.a)
        return arr[arr <= x_to]
    series = series_for(spec, tables)
    return series.members_upto(x_to)


def _real_events(tables, metric, spec, x_to):
    """(positions, float terms, exact descriptors) for one side of a real race."""
    series = series_for(spec, tables)
    if metric in ("psi", "theta_pp"):
        if metric == "theta_pp" and spec.kind != "residue_class":
            raise ValueError("theta_pp races need residue-class specs")
        ns, ps, mult = series.prime_powers
        k = int(np.searchsorted(ns, x_to, side="right"))
        m = mult[:k] if metric == "psi" else np.ones(k, dtype=np.int64)
        terms = m * np.log(ps[:k].astype(np.float64))
        desc = [("log", int(p), int(mm)) for p, mm in zip(ps[:k], m)]
        return ns[:k], terms, desc
    members = series.members_upto(x_to)
    members = members[members >= 1]
    if metric == "lambda":
        terms = np.log(members.astype(np.float64))
        desc = [("logn", int(n)) for n in members]
    else:
        terms = 1.0 / members.astype(np.float64)
        desc = [("inv", int(n)) for n in members]
    return members, terms, desc


def _event_mpf(ev) -> mp.mpf:
    if ev[0] == "log":
        return ev[2] * mp.log(ev[1])
    if ev[0] == "logn":
        return mp.log(ev[1])
    return mp.mpf(1) / ev[1]


def _exact_sign(events_l, events_r, metric) -> int:
    """Exact sign of sum(events_l) - sum(events_r) by integer/rational arithmetic."""
    if metric == "mu":
        if len(events_l) + len(events_r) > 20000:
            raise RuntimeError("mu tie too large for exact rational comparison")
        s = sum(Fraction(1, ev[1]) for ev in events_l) - sum(
            Fraction(1, ev[1]) for ev in events_r
        )
        return (s > 0) - (s < 0)
    prod_l = prod_r = 1
    for ev in events_l:
        prod_l *= ev[1] ** (ev[2] if ev[0] == "log" else 1)
    for ev in events_r:
        prod_r *= ev[1] ** (ev[2] if ev[0] == "log" else 1)
    return (prod_l > prod_r) - (prod_l < prod_r)


def race(
    tables: SieveTables,
    metric: Literal["pi", "theta_pp", "psi", "N", "lambda", "mu"],
    spec_l,
    spec_r,
    x_from: int = 1,
    x_to: int | None = None,
    prec: int = 40,
) -> BiasVerdict:
    """Exact verdict for metric_L(x) >= metric_R(x) at every integer x in range."""
    if metric not in _METRICS:
        raise ValueError(f"metric must be one of {_METRICS}")
    spec_l = _as_spec(spec_l)
    spec_r = _as_spec(spec_r)
    x_to = tables.x_max if x_to is None else int(x_to)
    if not 1 <= x_from <= x_to <= tables.x_max:
        raise ValueError("bad range")
    lname = f"{metric}[{spec_l.label}]"
    rname = f"{metric}[{spec_r.label}]"

    if metric in ("pi", "N"):
        jumps = np.zeros(x_to + 1, dtype=np.int64)
        pl = _int_positions(tables, metric, spec_l, x_to)
        pr = _int_positions(tables, metric, spec_r, x_to)
        np.add.at(jumps, pl, 1)
        np.subtract.at(jumps, pr, 1)
        diff = np.cumsum(jumps)
        bad = np.flatnonzero(diff[x_from:] < 0)
        if len(bad) == 0:
            return BiasVerdict(metric, lname, rname, x_from, x_to, True)
        x = int(bad[0]) + x_from
        lv = int(np.searchsorted(pl, x, side="right"))
        rv = int(np.searchsorted(pr, x, side="right"))
        return BiasVerdict(
            metric, lname, rname, x_from, x_to, False,
            first_violation=Violation(x=x, left=str(lv), right=str(rv)),
        )

    pos_l, t_l, d_l = _real_events(tables, metric, spec_l, x_to)
    pos_r, t_r, d_r = _real_events(tables, metric, spec_r, x_to)
    terms = np.zeros(x_to + 1)
    np.add.at(terms, pos_l, t_l)
    np.subtract.at(terms, pos_r, t_r)
    diff = np.cumsum(terms)
    m = len(t_l) + len(t_r)
    margin = 2.3e-16 * (m * float(np.abs(diff).max(initial=0.0)) + float(t_l.sum() + t_r.sum())) * 4 + 1e-30
    suspects = np.flatnonzero(diff[x_from:] < margin) + x_from
    if len(suspects) == 0:
        return BiasVerdict(metric, lname, rname, x_from, x_to, True)

    # one exact ascending sweep capturing the suspect prefix values
    events = sorted(
        [(int(p), +1, d) for p, d in zip(pos_l, d_l)]
        + [(int(p), -1, d) for p, d in zip(pos_r, d_r)]
    )
    suspect_set = sorted(int(s) for s in suspects)
    first_viol = None
    with mp.workdps(prec + 10):
        tiny = mp.mpf(10) ** (-(prec - 5))
        acc = mp.mpf(0)
        j = 0
        for x in suspect_set:
            while j < len(events) and events[j][0] <= x:
                _, sgn, ev = events[j]
                acc += sgn * _event_mpf(ev)
                j += 1
            val = acc
            if val < -tiny:
                sign = -1
            elif val > tiny:
                sign = 1
            else:
                sign = _exact_sign(
                    [e[2] for e in events[:j] if e[1] > 0],
                    [e[2] for e in events[:j] if e[1] < 0],
                    metric,
                )
            if sign < 0:
                lv = sum(_event_mpf(e[2]) for e in events[:j] if e[1] > 0)
                rv = lv - val
                first_viol = Violation(x=x, left=mp.nstr(lv, 16), right=mp.nstr(rv, 16))
                break
    if first_viol is None:
        return BiasVerdict(metric, lname, rname, x_from, x_to, True)
    return BiasVerdict(metric, lname, rname, x_from, x_to, False, first_violation=first_viol)


# -- race-transfer checks ---------------------------------------------------------


@dataclass(frozen=True)
class TransferReport:
    """Corollary-style transfer: pi domination implies N and mu domination."""

    d: int
    a: int
    b: int
    x0: int
    pi_hypothesis: BiasVerdict
    n_conclusion: BiasVerdict | None
    mu_conclusion: BiasVerdict | None

    @property
    def status(self) -> str:
        if not self.pi_hypothesis.holds:
            return "hypothesis_failed"
        if self.n_conclusion.holds and self.mu_conclusion.holds:
            return "hypotheses_and_conclusions_hold"
        return "conclusion_failed"

    def to_json(self) -> dict:
        return {
            "d": self.d, "a": self.a, "b": self.b, "x0": self.x0,
            "status": self.status,
            "pi_hypothesis": self.pi_hypothesis.to_json(),
            "n_conclusion": self.n_conclusion.to_json() if self.n_conclusion else None,
            "mu_conclusion": self.mu_conclusion.to_json() if self.mu_conclusion else None,
        }


def transfer_check(tables: SieveTables, d: int, a: int, b: int, x0: int) -> TransferReport:
    """Validate: pi(x;d,a) >= pi(x;d,b) on [1,x0] forces N and mu domination there."""
    sa = SemigroupSpec.residue_class(d, a)
    sb = SemigroupSpec.residue_class(d, b)
    pi_hyp = race(tables, "pi", sa, sb, 1, x0)
    if not pi_hyp.holds:
        return TransferReport(d, a, b, x0, pi_hyp, None, None)
    n_con = race(tables, "N", sa, sb, 1, x0)
    mu_con = race(tables, "mu", sa, sb, 1, x0)
    return TransferReport(d, a, b, x0, pi_hyp, n_con, mu_con)


@dataclass(frozen=True)
class Corollary2Report:
    """pi and prime-power-log domination on [1, x0], then the lambda conclusion."""

    d: int
    a: int
    b: int
    x0: int
    pi_hypothesis: BiasVerdict
    psi_hypothesis: BiasVerdict
    lambda_conclusion: BiasVerdict

    @property
    def status(self) -> str:
        if self.pi_hypothesis.holds and self.psi_hypothesis.holds:
            return (
                "hypotheses_and_conclusion_hold"
                if self.lambda_conclusion.holds
                else "conclusion_failed"
            )
        return "hypothesis_failed"

    def to_json(self) -> dict:
        return {
            "d": self.d, "a": self.a, "b": self.b, "x0": self.x0,
            "status": self.status,
            "pi_hypothesis": self.pi_hypothesis.to_json(),
            "psi_hypothesis": self.psi_hypothesis.to_json(),
            "lambda_conclusion": self.lambda_conclusion.to_json(),
        }


def corollary2_check(tables: SieveTables, d: int, a: int, b: int, x0: int) -> Corollary2Report:
    sa = SemigroupSpec.residue_class(d, a)
    sb = SemigroupSpec.residue_class(d, b)
    return Corollary2Report(
        d, a, b, x0,
        pi_hypothesis=race(tables, "pi", sa, sb, 1, x0),
        psi_hypothesis=race(tables, "theta_pp", sa, sb, 1, x0),
        lambda_conclusion=race(tables, "lambda", sa, sb, 1, x0),
    )


# -- the main-theorem pipeline ------------------------------------------------------

# drift constants C-(f), C+(f) with cited (desk-rescannable) validity
THEOREM6_DRIFT = {
    "g_4_1": ("-1.202", "0"),
    "g_4_3": ("log3/3-log7/2", "0"),
    "g_3_1": ("-1.4", "0"),
    "g_3_2": ("-log2/2", "0.2764"),
}


def _drift_value(expr: str, dps: int) -> mp.mpf:
    with mp.workdps(dps):
        if expr == "log3/3-log7/2":
            return mp.log(3) / 3 - mp.log(7) / 2
        if expr == "-log2/2":
            return -mp.log(2) / 2
        return mp.mpf(expr)


# per pair: linear psi facts (slope, native validity start, sandwich shift)
# for the dominating side L and the dominated side R, plus the exact-scan
# threshold for the lambda inequality
PAIR_CONFIGS = {
    ((3, 2), (3, 1)): {
        "left": ("0.335", 5, 7), "right": ("0.50456", 7), "lambda_from": 1,
        "default_x_max": 10 ** 6,
    },
    ((4, 3), (3, 1)): {
        "left": ("0.4594", 59, 59), "right": ("0.50456", 5), "lambda_from": 1,
        "default_x_max": 10 ** 6,
    },
    ((3, 2), (4, 1)): {
        "left": ("0.335", 5, 5), "right": ("0.50456", 5), "lambda_from": 1,
        "default_x_max": 10 ** 6,
    },
    ((4, 3), (4, 1)): {
        "left": ("0.48508", 127, 127), "right": ("0.50456", 5), "lambda_from": 7,
        "default_x_max": 1_100_000,
    },
}


@dataclass(frozen=True)
class PipelineReport:
    pair: tuple[tuple[int, int], tuple[int, int]]
    x_max: int
    lambda_from: int
    lambda_verdict: BiasVerdict
    psi_fact_left: BiasVerdict
    psi_fact_right: BiasVerdict
    certificate: bounds_mod.CertificateResult
    n_verdict: BiasVerdict
    integral_identity_max_residual: HPReal
    integral_floor: HPReal | None
    constants_provenance: dict

    @property
    def status(self) -> str:
        ok = (
            self.lambda_verdict.holds
            and self.psi_fact_left.holds
            and self.psi_fact_right.holds
            and self.certificate.certified
            and self.n_verdict.holds
        )
        return "certified-at-desk-scale" if ok else "incomplete"

    def to_json(self) -> dict:
        (dl, al), (dr, ar) = self.pair
        return {
            "pair": f"{dl},{al}:{dr},{ar}",
            "x_max": self.x_max,
            "status": self.status,
            "lambda_inequality": self.lambda_verdict.to_json(),
            "lambda_from": self.lambda_from,
            "psi_linear_bounds": [
                self.psi_fact_left.to_json(),
                self.psi_fact_right.to_json(),
            ],
            "propagation_certificate": self.certificate.to_json(),
            "n_inequality": self.n_verdict.to_json(),
            "integral_identity_max_residual": self.integral_identity_max_residual.to_str(6),
            "integral_floor": self.integral_floor.to_str(20) if self.integral_floor else None,
            "constants_provenance": self.constants_provenance,
        }


def _normalize_pair(pair):
    if isinstance(pair, str):
        l, r = pair.split(":")
        pair = (tuple(int(v) for v in l.split(",")), tuple(int(v) for v in r.split(",")))
    pair = (tuple(pair[0]), tuple(pair[1]))
    if pair not in PAIR_CONFIGS:
        known = ", ".join(f"{a}:{b}" for a, b in PAIR_CONFIGS)
        raise ValueError(f"unsupported pair {pair}; known pairs: {known}")
    return pair


def _delta_integral_residual(tables, spec_l, spec_r, x, dps) -> mp.mpf:
    """|N_L(x)-N_R(x) - delta(x)/log x - int_2^x delta/(t log^2 t) dt| exactly."""
    sl = series_for(spec_l, tables)
    sr = series_for(spec_r, tables)
    events = sorted(
        [(int(n), +1) for n in sl.members_upto(x) if n >= 2]
        + [(int(n), -1) for n in sr.members_upto(x) if n >= 2]
    )
    delta = mp.mpf(0)
    integral = mp.mpf(0)
    i = 0
    while i < len(events):
        n = events[i][0]
        while i < len(events) and events[i][0] == n:
            delta += events[i][1] * mp.log(n)
            i += 1
        nxt = events[i][0] if i < len(events) else None
        end = mp.mpf(x) if nxt is None or nxt > x else mp.mpf(nxt)
        integral += delta * (1 / mp.log(n) - 1 / mp.log(end))
    lhs = sl.m(x) - sr.m(x)
    return abs(lhs - (delta / mp.log(x) + integral))


def theorem2_pipeline(
    tables: SieveTables,
    pair,
    x_max: int | None = None,
    prec: int = 40,
    constants_source: Literal["theorem6", "scan"] = "theorem6",
) -> PipelineReport:
    """Full desk-scale certificate for one bias pair.

    Combines (1) the exact lambda-inequality scan on [threshold, x_max],
    (2) the linear psi bounds it leans on, (3) the sandwich-propagation
    certificate covering every x >= x_max, and (4) the exact count
    inequality plus the step-integral identity behind it.
    """
    pair = _normalize_pair(pair)
    cfg = PAIR_CONFIGS[pair]
    (dl, al), (dr, ar) = pair
    spec_l = SemigroupSpec.residue_class(dl, al)
    spec_r = SemigroupSpec.residue_class(dr, ar)
    x_max = cfg["default_x_max"] if x_max is None else int(x_max)
    if x_max > tables.x_max:
        raise ValueError("x_max exceeds the sieve range")
    slope_l, valid_from_l, shift_r = cfg["left"]
    slope_r, shift_s = cfg["right"]
    lam_from = cfg["lambda_from"]

    series_l = series_for(spec_l, tables)
    series_r = series_for(spec_r, tables)

    lambda_verdict = race(tables, "lambda", spec_l, spec_r, lam_from, x_max, prec=prec)
    psi_left = bounds_mod.psi_linear_check(series_l, slope_l, ">=", valid_from_l, x_max)
    psi_right = bounds_mod.psi_linear_check(series_r, slope_r, "<=", 0, x_max)

    with mp.workdps(prec + 5):
        if constants_source == "theorem6":
            cl = tuple(_drift_value(e, prec + 5) for e in THEOREM6_DRIFT[spec_l.label])
            cr = tuple(_drift_value(e, prec + 5) for e in THEOREM6_DRIFT[spec_r.label])
            prov = {
                spec_l.label: f"theorem6 drift bounds {THEOREM6_DRIFT[spec_l.label]} (cited validity: all x >= 1)",
                spec_r.label: f"theorem6 drift bounds {THEOREM6_DRIFT[spec_r.label]} (cited validity: all x >= 1)",
            }
        else:
            scan_l = bounds_mod.drift_scan(series_l, x_max, prec=prec)
            scan_r = bounds_mod.drift_scan(series_r, x_max, prec=prec)
            cl = (scan_l.inf_value.mpf, scan_l.sup_value.mpf)
            cr = (scan_r.inf_value.mpf, scan_r.sup_value.mpf)
            prov = {
                spec_l.label: f"drift_scan[1,{x_max}] (scanned-range validity only)",
                spec_r.label: f"drift_scan[1,{x_max}] (scanned-range validity only)",
            }
        cf_l = c_constant(spec_l, prec).value.mpf
        cf_r = c_constant(spec_r, prec).value.mpf
        c1 = mp.mpf(slope_r) * cf_r / (mp.mpf(slope_l) * cf_l)
        certificate = bounds_mod.propagation_certificate(
            Fraction(1, 2), shift_r, shift_s, c1, cl[0], cl[1], cr[0], cr[1], x_max,
            prec=prec,
        )
        prov["c1"] = (
            f"{slope_r}*C_{dr}_{ar}/({slope_l}*C_{dl}_{al}) = {mp.nstr(c1, 12)}"
        )

        n_verdict = race(tables, "N", spec_l, spec_r, 1, x_max, prec=prec)

        worst = mp.mpf(0)
        for x in (100, 1000, 10000, min(100000, x_max)):
            worst = max(worst, _delta_integral_residual(tables, spec_l, spec_r, x, prec))
        floor = None
        if pair == ((4, 3), (4, 1)):
            # int_2^7 delta/(t log^2 t) dt in closed form: the only jumps are
            # lambda_L at 3 and lambda_R at 5
            floor_v = (mp.log(5) - mp.log(3)) / mp.log(7)
            floor = HPReal._raw(floor_v, prec)

        return PipelineReport(
            pair=pair,
            x_max=x_max,
            lambda_from=lam_from,
            lambda_verdict=lambda_verdict,
            psi_fact_left=psi_left,
            psi_fact_right=psi_right,
            certificate=certificate,
            n_verdict=n_verdict,
            integral_identity_max_residual=HPReal._raw(worst, prec),
            integral_floor=floor,
            constants_provenance=prov,
        )
