"""Linear inequality systems over named variables.

Every inequality is of the form sum(coeff * var) <= rhs with exact rational
coefficients and a float right-hand side. Strict inequalities from the
achievability analysis are represented closed throughout; regions are their
closures. The LP layer is scipy's HiGHS; only the 1e-7 tolerance contract is
normative, not the method.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Iterable, Mapping

import numpy as np
from scipy.optimize import linprog

from .errors import GuardError, InputError

REDUNDANCY_TOL = 1e-7
MEMBER_TOL = 1e-9
FME_ROW_CAP = 100_000
DEFAULT_BOX = (0.0, 64.0)
RATE_VARS = ("R1", "R2", "R3", "R4", "R5")


@dataclass
class LinearInequality:
    """sum_v coeffs[v] * v <= rhs. Only nonzero coefficients are stored;
    an empty coefficient map is a vacuous (or contradictory) row, which can
    appear as a projection byproduct."""

    coeffs: dict
    rhs: float

    def __post_init__(self):
        clean = {}
        for var, c in self.coeffs.items():
            c = Fraction(c)
            if c != 0:
                clean[var] = c
        self.coeffs = clean
        self.rhs = float(self.rhs)

    def canonical(self) -> "LinearInequality":
        """Scale by the positive rational making the coefficients a primitive
        integer vector (sense preserved)."""
        if not self.coeffs:
            return LinearInequality({}, self.rhs)
        denom_lcm = 1
        for c in self.coeffs.values():
            denom_lcm = denom_lcm * c.denominator // gcd(denom_lcm, c.denominator)
        nums = [abs(int(c * denom_lcm)) for c in self.coeffs.values()]
        g = 0
        for v in nums:
            g = gcd(g, v)
        scale = Fraction(denom_lcm, g)
        coeffs = {v: c * scale for v, c in self.coeffs.items()}
        return LinearInequality(coeffs, self.rhs * float(scale))

    def key(self) -> tuple:
        return tuple(sorted((v, c) for v, c in self.coeffs.items()))

    def evaluate(self, assignment: Mapping[str, float]) -> float:
        return float(sum(float(c) * assignment[v] for v, c in self.coeffs.items()))

    def is_vacuous(self) -> bool:
        return not self.coeffs

    def __str__(self):
        if not self.coeffs:
            return f"0 <= {self.rhs:g}"
        terms = " + ".join(f"{c}*{v}" if c != 1 else v for v, c in sorted(self.coeffs.items()))
        return f"{terms} <= {self.rhs:g}"


@dataclass
class LinearSystem:
    """A conjunction of inequalities over a declared variable set."""

    variables: tuple
    inequalities: list = field(default_factory=list)

    def __post_init__(self):
        self.variables = tuple(self.variables)
        declared = set(self.variables)
        for ineq in self.inequalities:
            undeclared = set(ineq.coeffs) - declared
            if undeclared:
                raise InputError(f"inequality uses undeclared variables {sorted(undeclared)}")

    def copy(self) -> "LinearSystem":
        return LinearSystem(self.variables,
                            [LinearInequality(dict(i.coeffs), i.rhs) for i in self.inequalities])


def _dedup(rows: Iterable[LinearInequality], merge_dominated: bool = False) -> list:
    """Canonicalize rows and drop duplicates. By default only exact
    duplicates (same coefficients and rhs) collapse; with merge_dominated,
    rows sharing a coefficient vector keep the tightest rhs."""
    best = {}
    order = []
    for row in rows:
        row = row.canonical()
        k = row.key() if merge_dominated else (row.key(), row.rhs)
        if k in best:
            if row.rhs < best[k].rhs:
                best[k] = row
        else:
            best[k] = row
            order.append(k)
    return [best[k] for k in order]


def fme_eliminate(sys: LinearSystem, var: str) -> LinearSystem:
    """Project out one variable by pairing rows of opposite sign on it.

    Coefficient arithmetic is exact rational; the rhs combination is float.
    Aborts if the step would exceed FME_ROW_CAP rows.
    """
    if var not in sys.variables:
        raise InputError(f"variable {var!r} not declared")
    zero, pos, neg = [], [], []
    for row in sys.inequalities:
        c = row.coeffs.get(var, Fraction(0))
        if c > 0:
            pos.append(row)
        elif c < 0:
            neg.append(row)
        else:
            zero.append(row)
    projected = len(zero) + len(pos) * len(neg)
    if projected > FME_ROW_CAP:
        raise GuardError(
            f"eliminating {var!r} would create {projected} inequalities (cap {FME_ROW_CAP})")
    out = list(zero)
    for p in pos:
        cp = p.coeffs[var]
        for q in neg:
            cq = q.coeffs[var]
            alpha = -cq  # > 0, multiplies p
            beta = cp    # > 0, multiplies q
            coeffs = {}
            for v, c in p.coeffs.items():
                coeffs[v] = coeffs.get(v, Fraction(0)) + alpha * c
            for v, c in q.coeffs.items():
                coeffs[v] = coeffs.get(v, Fraction(0)) + beta * c
            coeffs.pop(var, None)  # exact cancellation by construction
            rhs = float(alpha) * p.rhs + float(beta) * q.rhs
            out.append(LinearInequality(coeffs, rhs))
    remaining = tuple(v for v in sys.variables if v != var)
    return LinearSystem(remaining, _dedup(out))


def _box_bounds(sys: LinearSystem, box) -> list:
    if box is None:
        box = DEFAULT_BOX
    if isinstance(box, dict):
        return [tuple(box[v]) for v in sys.variables]
    lo, hi = box
    return [(float(lo), float(hi))] * len(sys.variables)


def maximize(sys: LinearSystem, objective: Mapping[str, float], box=None):
    """Maximize sum(objective[v] * v) subject to the system within the box.

    Returns (status, value, point) with status one of "optimal" or
    "infeasible". The box bounds every variable, so unbounded cannot occur.
    """
    var_index = {v: i for i, v in enumerate(sys.variables)}
    n = len(sys.variables)
    rows = [r for r in sys.inequalities if not r.is_vacuous()]
    for r in sys.inequalities:
        if r.is_vacuous() and r.rhs < -MEMBER_TOL:
            return "infeasible", None, None
    a_ub = np.zeros((len(rows), n))
    b_ub = np.zeros(len(rows))
    for i, r in enumerate(rows):
        for v, c in r.coeffs.items():
            a_ub[i, var_index[v]] = float(c)
        b_ub[i] = r.rhs
    c = np.zeros(n)
    for v, w in objective.items():
        c[var_index[v]] = -float(w)
    res = linprog(c, A_ub=a_ub if len(rows) else None, b_ub=b_ub if len(rows) else None,
                  bounds=_box_bounds(sys, box), method="highs")
    if res.status == 2:
        return "infeasible", None, None
    if not res.success:
        raise GuardError(f"LP solver failed: {res.message}")
    return "optimal", float(-res.fun), np.asarray(res.x)


def is_feasible(sys: LinearSystem, box=None) -> bool:
    status, _, _ = maximize(sys, {}, box)
    return status == "optimal"


def _empty_system(variables) -> LinearSystem:
    """Canonical representation of an empty region: sum of all variables
    <= -1, which no point in the nonnegative box satisfies."""
    row = LinearInequality({v: Fraction(1) for v in variables}, -1.0)
    return LinearSystem(tuple(variables), [row])


def remove_redundant(sys: LinearSystem, box=None) -> LinearSystem:
    """Drop every inequality whose left side cannot exceed rhs + 1e-7 over
    the remaining system within the box. An infeasible input is reported as
    the canonical empty region."""
    rows = []
    for r in sys.inequalities:
        r = r.canonical()
        if r.is_vacuous():
            if r.rhs < -MEMBER_TOL:
                return _empty_system(sys.variables)
            continue  # vacuously true
        rows.append(r)
    rows = _dedup(rows, merge_dominated=True)
    work = LinearSystem(sys.variables, rows)
    if not is_feasible(work, box):
        return _empty_system(sys.variables)
    kept = list(rows)
    i = 0
    while i < len(kept):
        candidate = kept[i]
        rest = kept[:i] + kept[i + 1:]
        status, value, _ = maximize(LinearSystem(sys.variables, rest),
                                    {v: float(c) for v, c in candidate.coeffs.items()}, box)
        if status == "optimal" and value <= candidate.rhs + REDUNDANCY_TOL:
            kept.pop(i)
        else:
            i += 1
    return LinearSystem(sys.variables, kept)


def fix_variables(sys: LinearSystem, assignment: Mapping[str, float]) -> LinearSystem:
    """Substitute fixed values for some variables, folding them into the rhs."""
    for v in assignment:
        if v not in sys.variables:
            raise InputError(f"variable {v!r} not declared")
    remaining = tuple(v for v in sys.variables if v not in assignment)
    out = []
    for r in sys.inequalities:
        coeffs = {v: c for v, c in r.coeffs.items() if v not in assignment}
        shift = sum(float(c) * float(assignment[v])
                    for v, c in r.coeffs.items() if v in assignment)
        out.append(LinearInequality(coeffs, r.rhs - shift))
    return LinearSystem(remaining, _dedup(out, merge_dominated=True))


@dataclass
class RateRegion:
    """A polyhedral rate region over (R1..R5) with implicit nonnegativity.

    The nonnegativity constraints are not stored; every LP and membership
    query uses a box with lower bound 0, which encodes them.
    """

    system: LinearSystem
    provenance: dict | None = None

    def __post_init__(self):
        if tuple(self.system.variables) != RATE_VARS:
            # reorder/extend onto the canonical rate variables
            extra = set(self.system.variables) - set(RATE_VARS)
            if extra:
                raise InputError(f"rate region may only use {RATE_VARS}, got {extra}")
            self.system = LinearSystem(RATE_VARS, self.system.inequalities)

    def to_jsonable(self) -> dict:
        out = {
            "variables": list(RATE_VARS),
            "inequalities": [
                {"coeffs": {v: str(c) for v, c in sorted(ineq.coeffs.items())},
                 "rhs": ineq.rhs}
                for ineq in self.system.inequalities
            ],
        }
        if self.provenance is not None:
            out["provenance"] = self.provenance
        return out

    @classmethod
    def from_jsonable(cls, data: dict) -> "RateRegion":
        try:
            ineqs = [LinearInequality({v: Fraction(c) for v, c in item["coeffs"].items()},
                                      float(item["rhs"]))
                     for item in data["inequalities"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"bad region data: {exc}") from exc
        return cls(LinearSystem(RATE_VARS, ineqs), data.get("provenance"))


def contains(region: RateRegion, point) -> bool:
    """Closure membership: every inequality satisfied within 1e-9 slack."""
    values = {v: float(x) for v, x in zip(RATE_VARS, point)}
    if len(values) != 5:
        raise InputError("rate points have five entries")
    for x in values.values():
        if x < -MEMBER_TOL:
            return False
    for ineq in region.system.inequalities:
        if ineq.evaluate(values) > ineq.rhs + MEMBER_TOL:
            return False
    return True


def region_subset(a: RateRegion, b: RateRegion, box=None) -> bool:
    """True iff a is contained in b (within the box, 1e-7 LP tolerance)."""
    fa = is_feasible(a.system, box)
    fb = is_feasible(b.system, box)
    if not fa:
        return True
    if not fb:
        return False
    for ineq in b.system.inequalities:
        if ineq.is_vacuous():
            continue
        status, value, _ = maximize(a.system,
                                    {v: float(c) for v, c in ineq.coeffs.items()}, box)
        if status != "optimal" or value > ineq.rhs + REDUNDANCY_TOL:
            return False
    return True


def regions_equal(a: RateRegion, b: RateRegion, box=None) -> bool:
    """Mutual containment via LP. Two empty regions are equal."""
    fa = is_feasible(a.system, box)
    fb = is_feasible(b.system, box)
    if fa != fb:
        return False
    if not fa:
        return True
    return region_subset(a, b, box) and region_subset(b, a, box)
