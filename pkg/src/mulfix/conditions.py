"""Contraction condition checks and constant estimation.

All inequalities are evaluated in the log domain.  Writing L(u, v) for the
log distance, the pairwise conditions are

    C1   L(Tx, Ty) <= xi * L(x, y),                    xi in [0, 1)
    C2   L(Tx, Ty) <= eta * (L(x, Tx) + L(y, Ty)),     eta in [0, 1/2)
    C3   L(Tx, Ty) <= lam * (L(x, Ty) + L(y, Tx)),     lam in [0, 1/2)
    SI / SII / SIII   the same shapes with exponents 1, 1/2, 1/2 and a
                      strict inequality
    PHI  L(Tu, Tv) <= (L(u, Tu) + L(v, Tv)) / 2 - log_phi(...)

Each check returns ``(satisfied, slack)`` where slack is the log-domain
margin right-hand-side minus left-hand-side; margins within the comparison
tolerance of zero are reported as zero so that satisfied records never
carry a negative slack.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import DegeneratePairError, DomainError, MulfixError
from .metrics import DEFAULT_LOG_TOL, Point, as_point

logger = logging.getLogger(__name__)

CONDITION_IDS = ("C1", "C2", "C3", "SI", "SII", "SIII", "PHI")

PHI_KINDS = ("power_product", "psi_sqrt", "example317", "custom_table")
PSI_KINDS = ("identity", "sqrt", "square")


@dataclass(frozen=True)
class ZamfirescuConstants:
    """The constant triple (xi, eta, lambda) with its derived delta."""

    xi: float = 0.0
    eta: float = 0.0
    lam: float = 0.0

    def __post_init__(self):
        if not (0 <= self.xi < 1):
            raise DomainError(f"xi must be in [0, 1), got {self.xi}")
        if not (0 <= self.eta < 0.5):
            raise DomainError(f"eta must be in [0, 1/2), got {self.eta}")
        if not (0 <= self.lam < 0.5):
            raise DomainError(f"lambda must be in [0, 1/2), got {self.lam}")

    @property
    def delta(self) -> float:
        return max(self.xi, self.eta / (1 - self.eta), self.lam / (1 - self.lam))

    def to_json_dict(self) -> dict:
        return {"xi": self.xi, "eta": self.eta, "lambda": self.lam,
                "delta": self.delta}

    @classmethod
    def from_json_dict(cls, data: dict) -> "ZamfirescuConstants":
        return cls(xi=data.get("xi", 0.0), eta=data.get("eta", 0.0),
                   lam=data.get("lambda", 0.0))


def delta_of(constants: ZamfirescuConstants) -> float:
    """Effective geometric ratio max{xi, eta/(1-eta), lambda/(1-lambda)}."""
    return constants.delta


@dataclass(frozen=True)
class PhiSpec:
    """A comparison function phi: [1, inf)^2 -> [1, inf) in log form.

    ``log_phi`` takes the *log* distances (ls, lt) >= 0 and returns
    log phi(exp(ls), exp(lt)).  Kinds:

    power_product(q)   phi(x, y) = (x * y) ** ((1 - q) / 2), q in [0, 1)
    psi_sqrt(psi)      phi(x, y) = psi(x * y) ** (1/2) for a named psi with
                       psi(1) = 1 only at 1 (identity, sqrt, square)
    example317         phi(x, y) = (x * y) ** 1e-5, the comparison function
                       bundled with the inverse-square-root fixture
    custom_table       phi(x, y) = x**alpha * y**beta with alpha, beta > 0

    The defining property phi(x, y) = 1 iff x = y = 1 is certified on a
    boundary sample at construction.
    """

    kind: str
    q: float | None = None
    psi: str | None = None
    alpha: float | None = None
    beta: float | None = None

    def __post_init__(self):
        if self.kind not in PHI_KINDS:
            raise DomainError(f"unknown phi kind {self.kind!r}")
        if self.kind == "power_product":
            if self.q is None or not (0 <= self.q < 1):
                raise DomainError(f"power_product needs q in [0, 1), got {self.q}")
        if self.kind == "psi_sqrt":
            if self.psi not in PSI_KINDS:
                raise DomainError(f"unknown psi kind {self.psi!r}")
        if self.kind == "custom_table":
            if self.alpha is None or self.beta is None:
                raise DomainError("custom_table needs alpha and beta")
            if self.alpha <= 0 or self.beta <= 0:
                raise DomainError("custom_table exponents must be positive")
        self._certify_unit_property()

    def _certify_unit_property(self):
        # phi == 1 exactly at (1, 1); sample the boundary rays.
        if self.log_phi(0.0, 0.0) != 0.0:
            raise DomainError(f"{self.kind}: phi(1, 1) != 1")
        for w in (1e-6, 0.5, 3.0):
            if self.log_phi(w, 0.0) <= 0.0 or self.log_phi(0.0, w) <= 0.0:
                raise DomainError(f"{self.kind}: phi must exceed 1 off (1, 1)")

    def log_phi(self, ls: float, lt: float) -> float:
        """log phi evaluated on log-distance arguments ls, lt >= 0."""
        if ls < 0 or lt < 0:
            raise DomainError("phi arguments must be distances >= 1")
        if self.kind == "power_product":
            return 0.5 * (1 - self.q) * (ls + lt)
        if self.kind == "psi_sqrt":
            u = ls + lt
            if self.psi == "identity":
                return 0.5 * u
            if self.psi == "sqrt":
                return 0.25 * u
            return u  # square
        if self.kind == "example317":
            return 1e-5 * (ls + lt)
        return self.alpha * ls + self.beta * lt

    def to_json_dict(self) -> dict:
        out: dict = {"kind": self.kind}
        for name in ("q", "psi", "alpha", "beta"):
            v = getattr(self, name)
            if v is not None:
                out[name] = v
        return out

    @classmethod
    def from_json_dict(cls, data: dict) -> "PhiSpec":
        if not isinstance(data, dict) or "kind" not in data:
            raise DomainError("phi JSON needs a 'kind' field")
        return cls(data["kind"], q=data.get("q"), psi=data.get("psi"),
                   alpha=data.get("alpha"), beta=data.get("beta"))


def _clip_slack(slack: float, tol: float) -> tuple[bool, float]:
    satisfied = slack >= -tol
    if satisfied and slack < 0:
        slack = 0.0
    return satisfied, slack


def _images(T, x: Point, y: Point) -> tuple[Point, Point]:
    return as_point(T(x)), as_point(T(y))


def _require_distinct(x: Point, y: Point) -> None:
    if x == y:
        raise DegeneratePairError(f"pair must be distinct, got {x} twice")


def check_c1(metric, T, x, y, xi: float, tol: float = DEFAULT_LOG_TOL):
    """Banach-type test L(Tx, Ty) <= xi * L(x, y) for a distinct pair."""
    px, py = as_point(x), as_point(y)
    _require_distinct(px, py)
    if not (0 <= xi < 1):
        raise DomainError(f"xi must be in [0, 1), got {xi}")
    tx, ty = _images(T, px, py)
    lhs = metric.log_distance(tx, ty)
    rhs = xi * metric.log_distance(px, py)
    return _clip_slack(rhs - lhs, tol)


def check_c2(metric, T, x, y, eta: float, tol: float = DEFAULT_LOG_TOL):
    """Kannan-type test L(Tx, Ty) <= eta * (L(x, Tx) + L(y, Ty))."""
    px, py = as_point(x), as_point(y)
    _require_distinct(px, py)
    if not (0 <= eta < 0.5):
        raise DomainError(f"eta must be in [0, 1/2), got {eta}")
    tx, ty = _images(T, px, py)
    lhs = metric.log_distance(tx, ty)
    rhs = eta * (metric.log_distance(px, tx) + metric.log_distance(py, ty))
    return _clip_slack(rhs - lhs, tol)


def check_c3(metric, T, x, y, lam: float, tol: float = DEFAULT_LOG_TOL):
    """Chatterjea-type test L(Tx, Ty) <= lam * (L(x, Ty) + L(y, Tx))."""
    px, py = as_point(x), as_point(y)
    _require_distinct(px, py)
    if not (0 <= lam < 0.5):
        raise DomainError(f"lambda must be in [0, 1/2), got {lam}")
    tx, ty = _images(T, px, py)
    lhs = metric.log_distance(tx, ty)
    rhs = lam * (metric.log_distance(px, ty) + metric.log_distance(py, tx))
    return _clip_slack(rhs - lhs, tol)


def check_strict(metric, T, x, y, which: str, strict_margin: float = 0.0):
    """Strict variants SI, SII, SIII with fixed exponents 1, 1/2, 1/2.

    Strictness is certified as slack > strict_margin; the default margin 0
    means a plain strict inequality in float arithmetic.
    """
    px, py = as_point(x), as_point(y)
    _require_distinct(px, py)
    tx, ty = _images(T, px, py)
    lhs = metric.log_distance(tx, ty)
    if which == "SI":
        rhs = metric.log_distance(px, py)
    elif which == "SII":
        rhs = 0.5 * (metric.log_distance(px, tx) + metric.log_distance(py, ty))
    elif which == "SIII":
        rhs = 0.5 * (metric.log_distance(px, ty) + metric.log_distance(py, tx))
    else:
        raise DomainError(f"unknown strict condition {which!r}")
    slack = rhs - lhs
    return slack > strict_margin, slack


def check_phi(metric, T, phi: PhiSpec, u, v, tol: float = DEFAULT_LOG_TOL):
    """Weak-contraction test against a comparison function phi.

    Unlike the pairwise conditions this one is stated for every pair,
    including u = v: L(Tu, Tv) <= (L(u, Tu) + L(v, Tv)) / 2 - log phi.
    """
    pu, pv = as_point(u), as_point(v)
    tu, tv = _images(T, pu, pv)
    lhs = metric.log_distance(tu, tv)
    ls = metric.log_distance(pu, tu)
    lt = metric.log_distance(pv, tv)
    rhs = 0.5 * (ls + lt) - phi.log_phi(ls, lt)
    return _clip_slack(rhs - lhs, tol)


@dataclass(frozen=True)
class ConstantEstimates:
    """Tightest per-condition ratios observed over a sample.

    A hat of ``inf`` marks a condition that cannot hold at any admissible
    constant (a pair with zero denominator but positive numerator).
    """

    xi_hat: float
    eta_hat: float
    lambda_hat: float
    pairs_used: int
    pairs_skipped: int

    @property
    def c1_feasible(self) -> bool:
        return self.xi_hat < 1

    @property
    def c2_feasible(self) -> bool:
        return self.eta_hat < 0.5

    @property
    def c3_feasible(self) -> bool:
        return self.lambda_hat < 0.5

    def constants(self) -> ZamfirescuConstants:
        """The estimates as a validated constant triple (if feasible)."""
        return ZamfirescuConstants(xi=self.xi_hat, eta=self.eta_hat,
                                   lam=self.lambda_hat)

    def to_json_dict(self) -> dict:
        def safe(v):
            return v if math.isfinite(v) else None
        return {
            "xi": safe(self.xi_hat),
            "eta": safe(self.eta_hat),
            "lambda": safe(self.lambda_hat),
            "feasible": {"C1": self.c1_feasible, "C2": self.c2_feasible,
                         "C3": self.c3_feasible},
            "pairs_used": self.pairs_used,
            "pairs_skipped": self.pairs_skipped,
        }


def estimate_constants(metric, T, sample: Sequence) -> ConstantEstimates:
    """Supremum of the condition ratios over all distinct sample pairs.

    Pairs whose points coincide, whose images cannot be evaluated, or whose
    distance collapses to 1 despite distinct coordinates (a floating-point
    artifact for a valid metric) are skipped, counted, and logged.
    """
    points = [as_point(p) for p in sample]
    images: list[Point | None] = []
    for p in points:
        try:
            images.append(as_point(T(p)))
        except (MulfixError, ArithmeticError, ValueError):
            logger.warning("map evaluation failed at %s; point excluded", p)
            images.append(None)
    xi_hat = eta_hat = lambda_hat = 0.0
    used = skipped = 0
    for i, j in itertools.combinations(range(len(points)), 2):
        x, y = points[i], points[j]
        tx, ty = images[i], images[j]
        if x == y or tx is None or ty is None:
            skipped += 1
            continue
        try:
            num = metric.log_distance(tx, ty)
            den1 = metric.log_distance(x, y)
            den2 = metric.log_distance(x, tx) + metric.log_distance(y, ty)
            den3 = metric.log_distance(x, ty) + metric.log_distance(y, tx)
        except DomainError:
            skipped += 1
            continue
        if den1 == 0:
            skipped += 1
            logger.warning("distinct pair %s / %s collapsed to distance 1; skipped", x, y)
            continue
        used += 1
        xi_hat = max(xi_hat, num / den1)
        if den2 == 0:
            if num > 0:
                eta_hat = math.inf
        else:
            eta_hat = max(eta_hat, num / den2)
        if den3 == 0:
            if num > 0:
                lambda_hat = math.inf
        else:
            lambda_hat = max(lambda_hat, num / den3)
    if used == 0:
        raise DegeneratePairError("no usable distinct pair in the sample")
    return ConstantEstimates(xi_hat=xi_hat, eta_hat=eta_hat,
                             lambda_hat=lambda_hat,
                             pairs_used=used, pairs_skipped=skipped)


@dataclass(frozen=True)
class PairCheck:
    """One condition evaluated on one sampled pair."""

    i: int
    j: int
    condition: str
    satisfied: bool | None
    slack: float | None
    error: str | None = None

    def to_json_dict(self) -> dict:
        out: dict = {"pair": [self.i, self.j], "condition": self.condition,
                     "satisfied": self.satisfied, "slack": self.slack}
        if self.error is not None:
            out["error"] = self.error
        return out


@dataclass(frozen=True)
class ConditionReport:
    """Per-pair condition records plus aggregate verdicts.

    ``verdicts`` holds one entry per certification route (t2 for the
    constant-triple disjunction, t23 for the strict variants, th3 for the
    phi test) and an ``overall`` summary string.
    """

    records: tuple[PairCheck, ...]
    constants_used: Optional[ZamfirescuConstants]
    estimates: ConstantEstimates
    verdicts: dict
    seed: int | None
    n_points: int
    n_pairs: int
    skipped_pairs: int

    @property
    def overall(self) -> str:
        return self.verdicts["overall"]

    def condition_ok(self, condition: str) -> bool:
        """True when every evaluated pair satisfies the given condition."""
        recs = [r for r in self.records if r.condition == condition]
        return bool(recs) and all(r.satisfied for r in recs)

    def violations(self, condition: str) -> list[PairCheck]:
        return [r for r in self.records
                if r.condition == condition and r.satisfied is False]

    def to_json_dict(self) -> dict:
        constants: dict = (
            self.constants_used.to_json_dict() if self.constants_used
            else {"xi": None, "eta": None, "lambda": None, "delta": None}
        )
        constants["estimates"] = self.estimates.to_json_dict()
        return {
            "pairs": [r.to_json_dict() for r in self.records],
            "constants": constants,
            "verdicts": self.verdicts,
            "seed": self.seed,
        }


def _effective_constants(
    given: Optional[ZamfirescuConstants], est: ConstantEstimates
) -> tuple[float | None, float | None, float | None, Optional[ZamfirescuConstants]]:
    """Constants to test at: the declared triple, or feasible estimates."""
    if given is not None:
        return given.xi, given.eta, given.lam, given
    xi = est.xi_hat if est.c1_feasible else None
    eta = est.eta_hat if est.c2_feasible else None
    lam = est.lambda_hat if est.c3_feasible else None
    triple = None
    if xi is not None and eta is not None and lam is not None:
        triple = ZamfirescuConstants(xi=xi, eta=eta, lam=lam)
    return xi, eta, lam, triple


def classify(
    metric,
    T,
    sample: Sequence,
    constants: Optional[ZamfirescuConstants] = None,
    phi: Optional[PhiSpec] = None,
    *,
    tol: float = DEFAULT_LOG_TOL,
    strict_margin: float = 0.0,
    seed: int | None = None,
) -> ConditionReport:
    """Evaluate every condition on every distinct pair of the sample.

    When ``constants`` is omitted the tightest estimated constants are used
    where feasible; a condition with no admissible constant is marked
    unsatisfied on every pair.  Results are deterministic in the sample
    order, and the aggregate verdicts are invariant under permutations of
    the sample.
    """
    points = [as_point(p) for p in sample]
    est = estimate_constants(metric, T, points)
    xi, eta, lam, triple = _effective_constants(constants, est)

    records: list[PairCheck] = []
    pair_any_c = []
    pair_any_s = []
    pair_phi_ok = []
    cond_all_ok = {c: True for c in CONDITION_IDS}
    n_pairs = 0
    skipped = 0
    had_error = False

    for i, j in itertools.combinations(range(len(points)), 2):
        x, y = points[i], points[j]
        if x == y:
            skipped += 1
            continue
        n_pairs += 1
        try:
            c_results = {}
            for cid, const, checker in (
                ("C1", xi, check_c1), ("C2", eta, check_c2), ("C3", lam, check_c3),
            ):
                if const is None:
                    c_results[cid] = (False, None)
                else:
                    c_results[cid] = checker(metric, T, x, y, const, tol)
            for cid in ("SI", "SII", "SIII"):
                c_results[cid] = check_strict(metric, T, x, y, cid, strict_margin)
            if phi is not None:
                c_results["PHI"] = check_phi(metric, T, phi, x, y, tol)
        except (MulfixError, ZeroDivisionError, OverflowError) as exc:
            had_error = True
            records.append(PairCheck(i, j, "*", None, None, error=str(exc)))
            continue

        for cid, (ok, slack) in c_results.items():
            records.append(PairCheck(i, j, cid, ok, slack))
            if not ok:
                cond_all_ok[cid] = False
        pair_any_c.append(any(c_results[c][0] for c in ("C1", "C2", "C3")))
        pair_any_s.append(any(c_results[c][0] for c in ("SI", "SII", "SIII")))
        if phi is not None:
            pair_phi_ok.append(c_results["PHI"][0])

    if n_pairs == 0:
        raise DegeneratePairError("classification needs at least 2 distinct points")

    t2_ok = bool(pair_any_c) and all(pair_any_c) and not had_error
    t23_ok = bool(pair_any_s) and all(pair_any_s) and not had_error
    th3_ok = phi is not None and bool(pair_phi_ok) and all(pair_phi_ok) and not had_error
    via_t2 = [c for c in ("C1", "C2", "C3") if cond_all_ok[c]] if t2_ok else []
    via_t23 = [c for c in ("SI", "SII", "SIII") if cond_all_ok[c]] if t23_ok else []

    if t2_ok:
        overall = "t2 applicable" + (
            f" via {' and '.join(via_t2)}" if via_t2 else " (mixed conditions)"
        )
    elif t23_ok:
        overall = "t23 applicable" + (
            f" via {' and '.join(via_t23)}" if via_t23 else " (mixed conditions)"
        )
    elif th3_ok:
        overall = "th3 applicable"
    else:
        overall = "none"

    verdicts = {
        "t2": {"applicable": t2_ok, "via": via_t2},
        "t23": {"applicable": t23_ok, "via": via_t23},
        "th3": {"applicable": th3_ok, "checked": phi is not None},
        "overall": overall,
    }
    return ConditionReport(
        records=tuple(records),
        constants_used=triple if constants is None else constants,
        estimates=est,
        verdicts=verdicts,
        seed=seed,
        n_points=len(points),
        n_pairs=n_pairs,
        skipped_pairs=skipped,
    )
