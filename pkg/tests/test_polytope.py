from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bcsi.errors import GuardError, InputError
from bcsi.polytope import (LinearInequality, LinearSystem, RATE_VARS, RateRegion,
                           contains, fix_variables, fme_eliminate, is_feasible,
                           maximize, regions_equal, region_subset,
                           remove_redundant)
from oracles import lift_exists_interval


def ineq(coeffs, rhs):
    return LinearInequality({k: Fraction(v) for k, v in coeffs.items()}, rhs)


class TestFme:
    def test_hand_projection(self):
        sys = LinearSystem(("x", "y"), [
            ineq({"y": 1}, 2.0),
            ineq({"y": -1}, 0.0),
            ineq({"x": 1, "y": 1}, 5.0),
            ineq({"x": 1, "y": -1}, 1.0),
        ])
        out = fme_eliminate(sys, "y")
        assert out.variables == ("x",)
        rendered = sorted(str(i) for i in out.inequalities)
        assert rendered == ["0 <= 2", "x <= 3", "x <= 5"]

    def test_unused_variable_is_just_dropped(self):
        sys = LinearSystem(("x", "y"), [ineq({"x": 1}, 1.0)])
        out = fme_eliminate(sys, "y")
        assert out.variables == ("x",)
        assert len(out.inequalities) == 1

    def test_undeclared_variable_rejected(self):
        sys = LinearSystem(("x",), [ineq({"x": 1}, 1.0)])
        with pytest.raises(InputError):
            fme_eliminate(sys, "z")

    def test_explosion_guard(self):
        # 400 positive rows x 400 negative rows > 100000
        rows = []
        for k in range(400):
            rows.append(ineq({"x": 1, "y": 1}, float(k)))
            rows.append(ineq({"x": 1, "y": -1}, float(k)))
        # make coefficient vectors distinct so dedup keeps them
        rows = [LinearInequality({"x": Fraction(i + 1), "y": r.coeffs["y"]}, r.rhs)
                for i, r in enumerate(rows)]
        sys = LinearSystem(("x", "y"), rows)
        with pytest.raises(GuardError):
            fme_eliminate(sys, "y")

    def test_rational_coefficients_stay_exact(self):
        sys = LinearSystem(("x", "y"), [
            ineq({"x": Fraction(1, 3), "y": 1}, 1.0),
            ineq({"x": Fraction(1, 6), "y": -1}, 0.0),
        ])
        out = fme_eliminate(sys, "y")
        (row,) = out.inequalities
        assert row.coeffs["x"] == Fraction(1)  # canonical primitive integers


@st.composite
def random_system(draw):
    n_vars = draw(st.integers(2, 4))
    n_rows = draw(st.integers(2, 8))
    names = tuple(f"v{i}" for i in range(n_vars))
    rows = []
    for _ in range(n_rows):
        coeffs = [draw(st.integers(-3, 3)) for _ in range(n_vars)]
        if not any(coeffs):
            coeffs[0] = 1
        rhs = draw(st.integers(-4, 8))
        rows.append(LinearInequality(
            {names[i]: Fraction(coeffs[i]) for i in range(n_vars)}, float(rhs)))
    return LinearSystem(names, rows)


class TestFmeSoundness:
    @given(random_system(), st.integers(0, 3))
    @settings(max_examples=60, deadline=None)
    def test_projection_matches_interval_oracle(self, sys, var_pick):
        var = sys.variables[var_pick % len(sys.variables)]
        projected = fme_eliminate(sys, var)
        keep = [v for v in sys.variables if v != var]
        var_idx = sys.variables.index(var)
        rows = [([float(r.coeffs.get(v, 0)) for v in sys.variables], r.rhs)
                for r in sys.inequalities]
        rng = np.random.default_rng(0)
        for _ in range(25):
            point = {v: float(rng.integers(-4, 5)) for v in keep}
            in_proj = all(
                sum(float(c) * point[v] for v, c in r.coeffs.items()) <= r.rhs + 1e-9
                for r in projected.inequalities if not r.is_vacuous()) and all(
                r.rhs >= -1e-9 for r in projected.inequalities if r.is_vacuous())
            lifted = [0.0] * len(sys.variables)
            for v, x in point.items():
                lifted[sys.variables.index(v)] = x
            liftable = lift_exists_interval(rows, var_idx, lifted)
            assert in_proj == liftable


class TestRemoveRedundant:
    def test_dominated_row_dropped(self):
        sys = LinearSystem(("x",), [ineq({"x": 1}, 5.0), ineq({"x": 1}, 3.0)])
        out = remove_redundant(sys, (0.0, 64.0))
        assert [str(i) for i in out.inequalities] == ["x <= 3"]

    def test_vacuous_true_dropped(self):
        sys = LinearSystem(("x",), [LinearInequality({}, 2.0), ineq({"x": 1}, 3.0)])
        out = remove_redundant(sys, (0.0, 64.0))
        assert [str(i) for i in out.inequalities] == ["x <= 3"]

    def test_infeasible_reported_as_empty_region(self):
        sys = LinearSystem(("x",), [ineq({"x": 1}, -2.0)])
        out = remove_redundant(sys, (0.0, 64.0))
        assert not is_feasible(out, (0.0, 64.0))

    def test_membership_preserved_on_samples(self, rng):
        rows = [
            ineq({"x": 1, "y": 1}, 4.0),
            ineq({"x": 2, "y": 1}, 6.0),
            ineq({"x": 1}, 3.0),
            ineq({"x": 1, "y": 2}, 8.0),   # redundant against the first two
            ineq({"y": 1}, 5.0),
        ]
        sys = LinearSystem(("x", "y"), rows)
        out = remove_redundant(sys, (0.0, 64.0))
        assert len(out.inequalities) < len(rows)
        pts = rng.random((1000, 2)) * 8.0
        for x, y in pts:
            before = all(r.evaluate({"x": x, "y": y}) <= r.rhs + 1e-9 for r in rows)
            after = all(r.evaluate({"x": x, "y": y}) <= r.rhs + 1e-9
                        for r in out.inequalities)
            assert before == after


def rate_region(rows):
    return RateRegion(LinearSystem(RATE_VARS, rows))


class TestRegions:
    def region(self):
        return rate_region([
            ineq({"R1": 1, "R2": 1, "R4": 1}, 1.0),
            ineq({"R1": 1, "R3": 1, "R5": 1}, 1.2),
            ineq({"R1": 2, "R2": 1, "R3": 1, "R4": 1, "R5": 1}, 2.0),
        ])

    def test_origin_inside(self):
        assert contains(self.region(), (0, 0, 0, 0, 0))

    def test_violation_outside(self):
        assert not contains(self.region(), (1.1, 0, 0, 0, 0))

    def test_facet_point_inside_closure(self):
        assert contains(self.region(), (1.0, 0.0, 0.0, 0.0, 0.0))

    def test_negative_entry_outside(self):
        assert not contains(self.region(), (-0.5, 0, 0, 0, 0))

    def test_equal_to_itself(self):
        r = self.region()
        assert regions_equal(r, r)

    def test_redundant_row_does_not_change_region(self):
        r = self.region()
        extra = rate_region(list(r.system.inequalities) +
                            [ineq({"R1": 1}, 5.0)])
        assert regions_equal(r, extra)

    def test_strict_subset_detected(self):
        r = self.region()
        smaller = rate_region([ineq({"R1": 1, "R2": 1, "R4": 1}, 0.5)] +
                              list(r.system.inequalities)[1:])
        assert region_subset(smaller, r)
        assert not region_subset(r, smaller)
        assert not regions_equal(r, smaller)

    def test_two_empty_regions_equal(self):
        empty1 = rate_region([ineq({"R1": 1}, -1.0)])
        empty2 = rate_region([ineq({"R2": 1, "R3": 1}, -0.5)])
        assert regions_equal(empty1, empty2)
        assert region_subset(empty1, empty2)

    def test_equality_is_symmetric_on_random_regions(self, rng):
        for _ in range(6):
            rows_a = [ineq({v: int(c) for v, c in zip(RATE_VARS, coeffs) if c},
                           float(rhs))
                      for coeffs, rhs in zip(rng.integers(0, 3, size=(3, 5)),
                                             rng.random(3) * 2)
                      if any(coeffs)]
            rows_b = [ineq({v: int(c) for v, c in zip(RATE_VARS, coeffs) if c},
                           float(rhs))
                      for coeffs, rhs in zip(rng.integers(0, 3, size=(3, 5)),
                                             rng.random(3) * 2)
                      if any(coeffs)]
            if not rows_a or not rows_b:
                continue
            a, b = rate_region(rows_a), rate_region(rows_b)
            assert regions_equal(a, b) == regions_equal(b, a)
            assert regions_equal(a, a) and regions_equal(b, b)

    def test_json_roundtrip(self):
        r = self.region()
        data = r.to_jsonable()
        back = RateRegion.from_jsonable(data)
        assert regions_equal(r, back)
        assert data["inequalities"][0]["coeffs"]["R1"] == "1"


class TestFixVariables:
    def test_substitution_folds_into_rhs(self):
        sys = LinearSystem(("x", "y"), [ineq({"x": 1, "y": 2}, 5.0)])
        out = fix_variables(sys, {"y": 1.5})
        (row,) = out.inequalities
        assert row.coeffs == {"x": Fraction(1)}
        assert row.rhs == pytest.approx(2.0)
        assert out.variables == ("x",)

    def test_duplicates_merge(self):
        sys = LinearSystem(("x", "y"), [
            ineq({"x": 1, "y": 1}, 3.0),
            ineq({"x": 1, "y": 2}, 4.0),
        ])
        out = fix_variables(sys, {"y": 0.0})
        assert len(out.inequalities) == 1
        assert out.inequalities[0].rhs == pytest.approx(3.0)


class TestMaximize:
    def test_simple_lp(self):
        sys = LinearSystem(("x", "y"), [ineq({"x": 1, "y": 1}, 2.0)])
        status, value, point = maximize(sys, {"x": 1.0}, (0.0, 64.0))
        assert status == "optimal"
        assert value == pytest.approx(2.0, abs=1e-9)

    def test_infeasible_detected(self):
        sys = LinearSystem(("x",), [ineq({"x": 1}, -1.0)])
        status, _, _ = maximize(sys, {"x": 1.0}, (0.0, 64.0))
        assert status == "infeasible"
