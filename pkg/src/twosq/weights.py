"""Exact-rational squared-divisor-sum sieve weights and their experiments.

The weight on n is w_n = (sum over d | prod_i L_i(n) of lambda_d)^2 when
n = v0 (mod W), else 0; the support of lambda is squarefree d < R composed
of primes = 3 (mod 4), coprime to W*p0.  With nu(p) the number of roots of
the form product in [1, p),

  lambda_d = mu(d) (prod_{p|d} p/nu(p)) sum_{r: d|r} prod_{p|r} nu(p)/(p - nu(p)),

the two quadratic forms

  Q_nu     = sum_{d,e} lambda_d lambda_e prod_{p|de} nu(p)/p
  Q_nu-1   = sum_{d,e} lambda_d lambda_e prod_{p|de} (nu(p)-1)/(p-1)

diagonalize exactly to

  Q_nu     = sum_r prod_{p|r} nu(p)/(p - nu(p)),
  Q_nu-1   = sum_r (ystar_r)^2 prod_{p|r} (nu(p)-1)/(p - nu(p)),

with ystar_r = r * sum_{s: r|s} 1/phi(s) on the part of the support where
nu(p) > 1 for all p | r, and 0 elsewhere.  Everything is computed in exact
rational arithmetic; the identities are verified by computing both routes.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping

import numpy as np
from scipy.integrate import quad

from .admissible import AdmissibleSystem
from .arith import nu as nu_of, p3_squarefree_factored
from .errors import DomainError, ResourceError
from .primes import sieve_primes
from .sieve import INT64_MAX, SegmentTable, sieve_segment

# Direct double sums are O(|support|^2); refuse beyond this many pairs.
MAX_SUPPORT_PAIRS = 4_000_000

# Largest single membership table a weighted experiment may allocate.
MAX_VALUE_SPAN = 1 << 26


@dataclass(frozen=True)
class WeightSystem:
    """Divisor-sum weights for one admissible system at support cutoff R.

    support lists the admissible squarefree d < R with their prime tuples;
    y_r is identically 1 on the support.  Q_nu and Q_nu_minus1 hold the
    diagonal-route values of the two quadratic forms (the direct double sums
    are recomputed by quadratic_forms for verification).
    """

    system: AdmissibleSystem
    R: int
    support: tuple[int, ...]
    support_factors: Mapping[int, tuple[int, ...]] = field(repr=False)
    nu_table: Mapping[int, int] = field(repr=False)
    lam: Mapping[int, Fraction] = field(repr=False)
    ystar: Mapping[int, Fraction] = field(repr=False)
    Q_nu: Fraction
    Q_nu_minus1: Fraction

    @property
    def lambda_max(self) -> Fraction:
        return max(abs(v) for v in self.lam.values())

    def y(self, r: int) -> int:
        return 1 if r in self.support_factors else 0

    def to_json_dict(self) -> dict:
        return {
            "R": self.R,
            "support": list(self.support),
            "lambda": {str(d): str(self.lam[d]) for d in self.support},
            "Q_nu": str(self.Q_nu),
            "Q_nu_minus1": str(self.Q_nu_minus1),
        }


def build_weights(system: AdmissibleSystem, R: int) -> WeightSystem:
    """Exact lambda_d, ystar_r and diagonal quadratic forms for cutoff R.

    A prime with nu(p) = 0 (every root of the form product at n = 0, as for
    {n+3} at p = 3) is dropped from the support: lambda vanishes on every
    multiple of such p, so no weight changes, and dropping it keeps the
    closed-form ystar route equal to its defining route.
    """
    if R < 1:
        raise DomainError(f"build_weights: R must be >= 1, got {R}")
    supp = p3_squarefree_factored(R, system.W * system.p0)

    nu_table: dict[int, int] = dict(system.nu_table)
    for _, facs in supp:
        for p in facs:
            if p not in nu_table:
                nu_table[p] = nu_of(p, system.forms)
    for p, v in nu_table.items():
        if v >= p:
            raise DomainError(f"build_weights: nu({p}) = {v} >= {p}; system not usable at this prime")
    dead = [p for p, v in nu_table.items() if v == 0]
    if dead:
        supp = [(r, facs) for r, facs in supp if all(p not in dead for p in facs)]
    support = tuple(r for r, _ in supp)
    factors = {r: facs for r, facs in supp}

    # prod_{p|r} nu(p)/(p - nu(p)) per support element
    gfac: dict[int, Fraction] = {}
    for r, facs in supp:
        acc = Fraction(1)
        for p in facs:
            acc *= Fraction(nu_table[p], p - nu_table[p])
        gfac[r] = acc

    lam: dict[int, Fraction] = {}
    for d, facs in supp:
        tail = sum((gfac[r] for r in support if r % d == 0), Fraction(0))
        mu_d = -1 if len(facs) % 2 else 1
        lead = Fraction(1)
        for p in facs:
            lead *= Fraction(p, nu_table[p])
        lam[d] = mu_d * lead * tail

    ystar: dict[int, Fraction] = {}
    for r, facs in supp:
        if all(nu_table[p] > 1 for p in facs):
            tot = Fraction(0)
            for s, sfacs in supp:
                if s % r == 0:
                    phi_s = 1
                    for p in sfacs:
                        phi_s *= p - 1
                    tot += Fraction(1, phi_s)
            ystar[r] = r * tot
        else:
            ystar[r] = Fraction(0)

    q_nu = sum((gfac[r] for r in support), Fraction(0))
    q_nu1 = Fraction(0)
    for r, facs in supp:
        if ystar[r]:
            acc = ystar[r] * ystar[r]
            for p in facs:
                acc *= Fraction(nu_table[p] - 1, p - nu_table[p])
            q_nu1 += acc

    return WeightSystem(
        system=system,
        R=R,
        support=support,
        support_factors=factors,
        nu_table=nu_table,
        lam=lam,
        ystar=ystar,
        Q_nu=q_nu,
        Q_nu_minus1=q_nu1,
    )


def ystar_from_lambda(ws: WeightSystem, r: int) -> Fraction:
    """The slow defining route for ystar: mu(r) (prod (p-nu)/(nu-1)) times
    sum over support multiples d of r of lambda_d prod_{p|d} (nu-1)/(p-1).

    Only defined when nu(p) > 1 for all p | r; used to cross-check the
    closed form r * sum_{s: r|s} 1/phi(s)."""
    facs = ws.support_factors[r]
    if any(ws.nu_table[p] <= 1 for p in facs):
        raise DomainError(f"ystar_from_lambda: nu(p) <= 1 for some p | {r}")
    mu_r = -1 if len(facs) % 2 else 1
    lead = Fraction(1)
    for p in facs:
        lead *= Fraction(p - ws.nu_table[p], ws.nu_table[p] - 1)
    tot = Fraction(0)
    for d, dfacs in ws.support_factors.items():
        if d % r == 0:
            term = ws.lam[d]
            for p in dfacs:
                term *= Fraction(ws.nu_table[p] - 1, p - 1)
            tot += term
    return mu_r * lead * tot


@dataclass(frozen=True)
class QuadFormReport:
    """Direct double sums over (d, e) next to their diagonal-route values."""

    Q_nu: Fraction
    Q_nu_minus1: Fraction
    diag_nu: Fraction
    diag_nu_minus1: Fraction
    lambda_max: Fraction

    @property
    def identities_hold(self) -> bool:
        return self.Q_nu == self.diag_nu and self.Q_nu_minus1 == self.diag_nu_minus1


def quadratic_forms(ws: WeightSystem) -> QuadFormReport:
    """Both quadratic forms by the direct O(|support|^2) double sum."""
    support = ws.support
    if len(support) ** 2 > MAX_SUPPORT_PAIRS:
        raise ResourceError(
            f"quadratic_forms: |support|^2 = {len(support) ** 2} exceeds {MAX_SUPPORT_PAIRS}; reduce R"
        )
    factors = ws.support_factors
    nu_t = ws.nu_table
    lam = ws.lam
    q_nu = Fraction(0)
    q_nu1 = Fraction(0)
    items = [(d, set(factors[d]), lam[d]) for d in support]
    for d, dfacs, lam_d in items:
        if not lam_d:
            continue
        for e, efacs, lam_e in items:
            if not lam_e:
                continue
            le = lam_d * lam_e
            t_nu = le
            t_nu1 = le
            for p in dfacs | efacs:
                t_nu *= Fraction(nu_t[p], p)
                t_nu1 *= Fraction(nu_t[p] - 1, p - 1)
            q_nu += t_nu
            q_nu1 += t_nu1
    return QuadFormReport(
        Q_nu=q_nu,
        Q_nu_minus1=q_nu1,
        diag_nu=ws.Q_nu,
        diag_nu_minus1=ws.Q_nu_minus1,
        lambda_max=ws.lambda_max,
    )


def weight_w(ws: WeightSystem, n: int) -> Fraction:
    """Pointwise weight w_n, exactly.

    Divisibility of the form product by a support element d is decided by a
    gcd chain against the individual form values (the product itself is
    never factorized)."""
    if n < 1:
        raise DomainError(f"weight_w: n must be >= 1, got {n}")
    sysm = ws.system
    if n % sysm.W != sysm.v0 % sysm.W:
        return Fraction(0)
    values = [form(n) for form in sysm.forms]
    total = Fraction(0)
    for d in ws.support:
        rem = d
        for v in values:
            rem //= math.gcd(rem, v)
            if rem == 1:
                break
        if rem == 1:
            total += ws.lam[d]
    return total * total


# ---------------------------------------------------------------------------
# Weighted scan over a range: exact integer accumulation.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WeightedScanReport:
    """Sums and averages from one weighted scan over (X_lo, X_hi].

    hits(n) counts the forms whose value at n is a sum of two squares.  The
    averages are None (and empty_class is set) when the congruence class or
    the weight mass is empty.
    """

    X_lo: int
    X_hi: int
    R: int
    k: int
    W: int
    v0: int
    class_size: int
    sum_w: Fraction
    sum_hits_w: Fraction
    weighted_avg: Fraction | None
    class_unweighted_avg: Fraction | None
    overall_unweighted_avg: Fraction
    empty_class: bool

    def to_json_dict(self) -> dict:
        return {
            "X_lo": self.X_lo,
            "X_hi": self.X_hi,
            "R": self.R,
            "k": self.k,
            "W": self.W,
            "v0": self.v0,
            "class_size": self.class_size,
            "sum_w": str(self.sum_w),
            "sum_hits_w": str(self.sum_hits_w),
            "weighted_avg": None if self.weighted_avg is None else str(self.weighted_avg),
            "class_unweighted_avg": None
            if self.class_unweighted_avg is None
            else str(self.class_unweighted_avg),
            "overall_unweighted_avg": str(self.overall_unweighted_avg),
            "weighted_avg_float": None if self.weighted_avg is None else float(self.weighted_avg),
            "class_unweighted_avg_float": None
            if self.class_unweighted_avg is None
            else float(self.class_unweighted_avg),
            "overall_unweighted_avg_float": float(self.overall_unweighted_avg),
            "empty_class": self.empty_class,
        }


def _scaled_lambdas(ws: WeightSystem) -> tuple[dict[int, int], int]:
    """lambda_d * D as integers, D = lcm of the lambda denominators."""
    denom = 1
    for v in ws.lam.values():
        denom = denom * v.denominator // math.gcd(denom, v.denominator)
    return {d: int(v * denom) for d, v in ws.lam.items()}, denom


def _root_residues(ws: WeightSystem) -> dict[int, np.ndarray]:
    """For each support prime p: all n (mod p) with p | prod_i L_i(n)."""
    out: dict[int, np.ndarray] = {}
    forms = ws.system.forms
    primes = sorted({p for facs in ws.support_factors.values() for p in facs})
    for p in primes:
        n = np.arange(p, dtype=np.int64)
        prod = np.ones(p, dtype=np.int64)
        for form in forms:
            prod = (prod * ((form.a * n + form.b) % p)) % p
        out[p] = np.flatnonzero(prod == 0).astype(np.int64)
    return out


def _membership_tables(system: AdmissibleSystem, X_lo: int, X_hi: int) -> list[SegmentTable]:
    """One membership table per form covering its value range on (X_lo, X_hi]."""
    tables = []
    for form in system.forms:
        lo, hi = form(X_lo + 1), form(X_hi)
        if hi > INT64_MAX:
            raise DomainError(f"weighted experiment: form value {hi} exceeds 2^63")
        if hi - lo + 1 > MAX_VALUE_SPAN:
            raise ResourceError(f"weighted experiment: value span {hi - lo + 1} exceeds budget")
        tables.append(sieve_segment(lo, hi))
    return tables


def _divisor_sum_totals(
    ns: np.ndarray,
    roots: dict[int, np.ndarray],
    lam_scaled: dict[int, int],
    R: int,
) -> list[int]:
    """sum of scaled lambda_d over support d dividing the form product, per n."""
    lam1 = lam_scaled[1]
    totals = [lam1] * len(ns)
    if not roots:
        return totals
    hit_idx: list[np.ndarray] = []
    hit_p: list[int] = []
    for p, rs in roots.items():
        rem = ns % p
        for r in rs:
            idx = np.flatnonzero(rem == r)
            if idx.size:
                hit_idx.append(idx)
                hit_p.append(p)
    if not hit_idx:
        return totals
    order = np.concatenate(hit_idx)
    prime_of = np.concatenate([np.full(ix.size, p, dtype=np.int64) for ix, p in zip(hit_idx, hit_p)])
    srt = np.argsort(order, kind="stable")
    order = order[srt]
    prime_of = prime_of[srt]
    start = 0
    m = len(order)
    while start < m:
        end = start
        i = int(order[start])
        while end < m and order[end] == i:
            end += 1
        ps = sorted(int(p) for p in prime_of[start:end])
        # subset products of the hit primes, pruned at R
        acc = lam1
        stack = [(1, 0)]
        while stack:
            prod, j0 = stack.pop()
            for j in range(j0, len(ps)):
                nxt = prod * ps[j]
                if nxt >= R:
                    break
                acc += lam_scaled[nxt]
                stack.append((nxt, j + 1))
        totals[i] = acc
        start = end
    return totals


def weighted_experiment(
    ws: WeightSystem,
    X_lo: int,
    X_hi: int,
    threads: int = 1,
) -> WeightedScanReport:
    """Weighted and unweighted membership-hit averages over (X_lo, X_hi].

    Computes sum w_n, sum hits(n) w_n over the class n = v0 (mod W), the
    weighted average of hits, the unweighted average over the same class,
    and the unweighted average over all n in range.  All sums are exact
    (scaled-integer lambda arithmetic), so results do not depend on the
    number of worker threads.
    """
    if X_hi <= X_lo:
        raise DomainError(f"weighted_experiment: need X_hi > X_lo, got ({X_lo}, {X_hi}]")
    sysm = ws.system
    W, v0, k = sysm.W, sysm.v0, sysm.k

    tables = _membership_tables(sysm, X_lo, X_hi)

    # Unweighted average over every n in range: one progression count per form.
    total_hits_all = 0
    for form, table in zip(sysm.forms, tables):
        # table.lo = form(X_lo + 1), so the form's image is every a-th bit
        total_hits_all += int(np.count_nonzero(table.bits[:: form.a]))
    overall_avg = Fraction(total_hits_all, X_hi - X_lo)

    first_n = X_lo + 1 + ((v0 - (X_lo + 1)) % W)
    ns = np.arange(first_n, X_hi + 1, W, dtype=np.int64)
    if ns.size == 0:
        return WeightedScanReport(
            X_lo=X_lo, X_hi=X_hi, R=ws.R, k=k, W=W, v0=v0,
            class_size=0,
            sum_w=Fraction(0), sum_hits_w=Fraction(0),
            weighted_avg=None, class_unweighted_avg=None,
            overall_unweighted_avg=overall_avg, empty_class=True,
        )

    hits = np.zeros(ns.size, dtype=np.int64)
    for form, table in zip(sysm.forms, tables):
        vals = form.a * ns + form.b
        hits += table.bits[vals - table.lo]

    lam_scaled, denom = _scaled_lambdas(ws)
    roots = _root_residues(ws)

    def chunk_sums(lo_i: int, hi_i: int) -> tuple[int, int]:
        totals = _divisor_sum_totals(ns[lo_i:hi_i], roots, lam_scaled, ws.R)
        s_w = 0
        s_hw = 0
        for t, hcount in zip(totals, hits[lo_i:hi_i].tolist()):
            w = t * t
            s_w += w
            s_hw += hcount * w
        return s_w, s_hw

    if threads <= 1 or ns.size < 4096:
        parts = [chunk_sums(0, ns.size)]
    else:
        bounds = np.linspace(0, ns.size, threads * 2 + 1, dtype=int)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda ab: chunk_sums(*ab), zip(bounds[:-1], bounds[1:])))
    sum_w_scaled = sum(p[0] for p in parts)
    sum_hw_scaled = sum(p[1] for p in parts)

    d2 = denom * denom
    sum_w = Fraction(sum_w_scaled, d2)
    sum_hits_w = Fraction(sum_hw_scaled, d2)
    empty = sum_w_scaled == 0
    return WeightedScanReport(
        X_lo=X_lo, X_hi=X_hi, R=ws.R, k=k, W=W, v0=v0,
        class_size=int(ns.size),
        sum_w=sum_w,
        sum_hits_w=sum_hits_w,
        weighted_avg=None if empty else Fraction(sum_hw_scaled, sum_w_scaled),
        class_unweighted_avg=Fraction(int(hits.sum()), int(ns.size)),
        overall_unweighted_avg=overall_avg,
        empty_class=empty,
    )


@dataclass(frozen=True)
class WeightMassReport:
    """Measured weight mass vs (X/W) * Q_nu with the explicit per-pair bound."""

    X: int
    measured: Fraction
    main_term: Fraction
    bound: Fraction

    @property
    def within_bound(self) -> bool:
        return abs(self.measured - self.main_term) <= self.bound


def check_weight_mass(ws: WeightSystem, X: int, threads: int = 1) -> WeightMassReport:
    """Compare sum of w_n over (X, 2X] in the class against (X/W) Q_nu.

    The discrepancy bound is sum_{d,e} |lambda_d lambda_e| prod_{p|de} nu(p):
    one unit per (d, e, residue class) triple, since each residue class
    mod W[d,e] contributes X/(W[d,e]) + theta with |theta| < 1.
    """
    report = weighted_experiment(ws, X, 2 * X, threads=threads)
    main = Fraction(X, ws.system.W) * ws.Q_nu
    items = [(set(ws.support_factors[d]), abs(ws.lam[d])) for d in ws.support]
    bound = Fraction(0)
    for dfacs, ad in items:
        if not ad:
            continue
        for efacs, ae in items:
            if not ae:
                continue
            term = ad * ae
            for p in dfacs | efacs:
                term *= ws.nu_table[p]
            bound += term
    return WeightMassReport(X=X, measured=report.sum_w, main_term=main, bound=bound)


# ---------------------------------------------------------------------------
# Dimension-kappa summation check.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SummationReport:
    """Left side (exact enumeration) vs right side (asymptotic main term)."""

    kappa: float
    R: int
    lhs: float
    rhs: float
    singular_series: float
    gamma_factor: float
    integral: float

    @property
    def rel_error(self) -> float:
        return abs(self.lhs - self.rhs) / self.rhs if self.rhs else math.inf


def gamma_p3_indicator(p: int) -> float:
    """Density 1 on primes = 3 (mod 4), 0 elsewhere (dimension 1/2)."""
    return 1.0 if p % 4 == 3 else 0.0


def verify_sieve_summation(
    kappa: float,
    gamma_spec: Callable[[int], float],
    R: int,
    f: Callable[[float], float] | None = None,
    A: float = 2.0,
) -> SummationReport:
    """Compare sum_{r<R} mu^2(r) (prod_{p|r} gamma/(p-gamma)) f(ln r/ln R)
    against S_gamma (ln R)^kappa / Gamma(kappa) * int_0^1 f(t) t^(kappa-1) dt,
    where S_gamma = prod_{p<R} (1 - gamma(p)/p)^(-1) (1 - 1/p)^kappa.

    The left side is an exact enumeration over the squarefree support; the
    right side is the asymptotic main term.  gamma must satisfy
    0 <= gamma(p) <= min(A*kappa, (1 - 1/A) p).
    """
    if R < 2:
        raise DomainError(f"verify_sieve_summation: R must be >= 2, got {R}")
    if kappa <= 0:
        raise DomainError(f"verify_sieve_summation: kappa must be > 0, got {kappa}")
    if A <= 1:
        raise DomainError(f"verify_sieve_summation: A must be > 1, got {A}")
    if f is None:
        f = lambda t: 1.0

    primes = [int(p) for p in sieve_primes(R - 1)]
    gam: dict[int, float] = {}
    for p in primes:
        gp = float(gamma_spec(p))
        if not 0.0 <= gp <= min(A * kappa, (1.0 - 1.0 / A) * p):
            raise DomainError(
                f"verify_sieve_summation: gamma({p}) = {gp} outside [0, min(A*kappa, (1-1/A)p)]"
            )
        gam[p] = gp
    active = [p for p in primes if gam[p] > 0.0]
    ratios = {p: gam[p] / (p - gam[p]) for p in active}

    log_R = math.log(R)
    terms: list[float] = [f(0.0)]  # r = 1
    stack: list[tuple[int, float, int]] = [(1, 1.0, 0)]
    while stack:
        prod, weight, j0 = stack.pop()
        for j in range(j0, len(active)):
            p = active[j]
            nxt = prod * p
            if nxt >= R:
                break
            wt = weight * ratios[p]
            terms.append(wt * f(math.log(nxt) / log_R))
            stack.append((nxt, wt, j + 1))
    lhs = math.fsum(terms)

    log_parts = [
        -math.log1p(-gam[p] / p) + kappa * math.log1p(-1.0 / p) for p in primes
    ]
    s_gamma = math.exp(math.fsum(log_parts))

    # int_0^1 f(t) t^(kappa-1) dt with the endpoint singularity removed by
    # t = v^2  (integrable for kappa > 0; smooth for kappa >= 1/2).
    integral, _ = quad(lambda v: 2.0 * f(v * v) * v ** (2.0 * kappa - 1.0), 0.0, 1.0, limit=200)
    gamma_factor = math.gamma(kappa)
    rhs = s_gamma * log_R**kappa / gamma_factor * integral
    return SummationReport(
        kappa=kappa,
        R=R,
        lhs=lhs,
        rhs=rhs,
        singular_series=s_gamma,
        gamma_factor=gamma_factor,
        integral=integral,
    )
