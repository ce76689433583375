import logging
import math

import pytest

from efp.core import validate_instance
from efp.formulations import ALL_KINDS, FormulationKind, build, constraint_violations
from efp.generators import generate, preset
from efp.solver import (
    LpSolution,
    compare_relaxations,
    find_strict_instance,
    primal_heuristic,
    solve_lp,
    solve_mip,
)



def _instances(count, size=5, base_seed=0):
    models = ("characteristics", "neighborhood", "popularity")
    out = []
    for k in range(count):
        model = models[k % 3]
        n = 8 if model == "popularity" else size
        out.append(generate(model, preset(model, n), base_seed + k))
    return out


def test_relaxation_bounds_integral_optimum(fig1):
    sol = solve_lp(build(fig1, FormulationKind.U))
    assert sol.status == "optimal"
    assert sol.objective >= 21 - 1e-6


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_worked_instance_solves_to_21(fig1, kind):
    result = solve_mip(build(fig1, kind), fig1)
    assert result.status == "optimal"
    assert result.incumbent_value == pytest.approx(21.0, abs=1e-6)
    assert result.bound >= result.incumbent_value - 1e-6
    assert result.gap <= 1e-6


def test_single_pair_sells_at_valuation():
    inst = validate_instance(1, 1, [(0, 0, 5.0)])
    result = solve_mip(build(inst, FormulationKind.L), inst)
    assert result.status == "optimal"
    assert result.incumbent_value == pytest.approx(5.0)
    assert result.incumbent.pricing.prices[0] == pytest.approx(5.0)


def test_formulations_agree_on_generated_instances():
    for inst in _instances(6):
        values = []
        for kind in ALL_KINDS:
            result = solve_mip(build(inst, kind), inst, time_limit=120)
            assert result.status == "optimal"
            values.append(result.incumbent_value)
        assert max(values) - min(values) <= 1e-6


def test_primal_heuristic_reads_prices(fig1):
    lp = LpSolution("optimal", 21.0, {"p_1": 6.0, "p_2": 6.0, "p_3": 3.0}, 0)
    assert primal_heuristic(fig1, lp).profit == 21.0
    zero = LpSolution("optimal", 0.0, {"p_1": 0.0, "p_2": 0.0, "p_3": 0.0}, 0)
    assert primal_heuristic(fig1, zero).profit == 0.0


def test_root_heuristic_never_exceeds_optimum():
    for inst in _instances(4, size=5, base_seed=3):
        model = build(inst, FormulationKind.U)
        root = solve_lp(model)
        heuristic = primal_heuristic(inst, root).profit
        optimum = solve_mip(model, inst).incumbent_value
        assert heuristic <= optimum + 1e-9


def test_node_limit_reports_honest_bound():
    inst = _instances(1, size=8, base_seed=11)[0]
    model = build(inst, FormulationKind.STM)
    full = solve_mip(model, inst, time_limit=180)
    assert full.status == "optimal"
    limited = solve_mip(model, inst, node_limit=1)
    assert limited.nodes <= 3  # root and at most one branching step
    assert limited.bound >= full.incumbent_value - 1e-6
    assert limited.incumbent_value <= full.incumbent_value + 1e-9
    if limited.gap > 1e-6:
        assert limited.status == "feasible"


def test_time_limit_reports_feasible():
    inst = generate("popularity", preset("popularity", 20), 1)
    result = solve_mip(build(inst, FormulationKind.STM), inst, time_limit=0.001)
    assert result.status == "feasible"
    assert result.gap > 0
    assert result.bound >= result.incumbent_value - 1e-6


def test_dfs_fallback_matches_best_bound(fig1):
    model = build(fig1, FormulationKind.U)
    normal = solve_mip(model, fig1)
    dfs = solve_mip(model, fig1, dfs_threshold=1)
    assert dfs.status == "optimal"
    assert dfs.incumbent_value == pytest.approx(normal.incumbent_value, abs=1e-9)


def test_relaxation_ordering_holds():
    for inst in _instances(9, size=5, base_seed=21):
        report = compare_relaxations(inst)
        assert not report.failed
        assert not report.violations, report


def test_relaxation_report_on_worked_instance(fig1):
    report = compare_relaxations(fig1, include_mip=True)
    assert report.ok()
    v = report.values
    assert v["I"] <= v["STM"] + 1e-6
    assert v["I"] <= v["L"] + 1e-6 and v["L"] <= v["P"] + 1e-6 and v["P"] <= v["U"] + 1e-6
    # this instance is a full separation witness: the strengthened envy rows
    # beat the per-candidate ones, dropping the price caps costs nothing,
    # and the aggregated forms are strictly looser step by step
    assert v["I"] < v["STM"] - 1e-6
    assert abs(v["I"] - v["L"]) <= 1e-6
    assert v["L"] < v["P"] - 1e-6
    assert v["P"] < v["U"] - 1e-6
    assert report.mip_optimum == pytest.approx(21.0, abs=1e-6)


def test_single_edge_relaxations_coincide():
    inst = validate_instance(1, 1, [(0, 0, 5.0)])
    report = compare_relaxations(inst)
    assert report.ok()
    spread = max(report.values.values()) - min(report.values.values())
    if spread > 1e-6:  # not asserted, only surfaced: equality is conjectured
        logging.getLogger("efp.tests").info(
            "single-edge relaxations differ by %.3g", spread
        )
    assert report.values["U"] == pytest.approx(5.0, abs=1e-6)


def _lp_point(inst, kind):
    sol = solve_lp(build(inst, kind))
    assert sol.status == "optimal"
    return sol


def test_strengthened_points_satisfy_original_rows():
    for inst in _instances(5, size=5, base_seed=31):
        point = _lp_point(inst, FormulationKind.I)
        stm = build(inst, FormulationKind.STM)
        assert not constraint_violations(stm, point.values, tol=1e-6)


def test_paid_price_aggregation_into_profit_variables():
    for inst in _instances(5, size=5, base_seed=41):
        point = _lp_point(inst, FormulationKind.L)
        mapped = dict(point.values)
        for b in range(inst.num_bidders):
            mapped[f"z_{b + 1}"] = sum(
                point.values[f"ph_{i + 1}_{b + 1}"] for i in range(inst.num_items)
            )
        target = build(inst, FormulationKind.P)
        assert not constraint_violations(target, mapped, tol=1e-6)
        objective = sum(mapped[f"z_{b + 1}"] for b in range(inst.num_bidders))
        assert abs(objective - point.objective) <= 1e-6


def test_profit_points_map_to_utility_form():
    for inst in _instances(5, size=5, base_seed=51):
        point = _lp_point(inst, FormulationKind.P)
        mapped = dict(point.values)
        for b in range(inst.num_bidders):
            value_sum = sum(
                inst.value(i, b) * point.values[f"x_{i + 1}_{b + 1}"]
                for i in range(inst.num_items)
            )
            mapped[f"u_{b + 1}"] = value_sum - point.values[f"z_{b + 1}"]
        target = build(inst, FormulationKind.U)
        assert not constraint_violations(target, mapped, tol=1e-6)
        objective = sum(
            inst.value(i, b) * point.values[f"x_{i + 1}_{b + 1}"]
            for i in range(inst.num_items)
            for b in range(inst.num_bidders)
        ) - sum(mapped[f"u_{b + 1}"] for b in range(inst.num_bidders))
        assert abs(objective - point.objective) <= 1e-6


def test_find_strict_instances():
    hit = find_strict_instance("i-stm", budget=50)
    assert hit is not None
    _, _, report = hit
    assert report.values["I"] < report.values["STM"] - 1e-6

    hit = find_strict_instance("l-p-u", budget=50)
    assert hit is not None
    _, _, report = hit
    assert report.values["L"] < report.values["P"] - 1e-6
    assert report.values["P"] < report.values["U"] - 1e-6

    with pytest.raises(ValueError):
        find_strict_instance("nonsense")


def test_uncapped_prices_reach_the_same_optimum(fig1):
    model = build(fig1, FormulationKind.U, price_bound=False)
    result = solve_mip(model, fig1)
    assert result.status == "optimal"
    assert result.incumbent_value == pytest.approx(21.0, abs=1e-6)
    report = compare_relaxations(fig1, price_bound=False)
    assert report.ok()
    # dropping the cap can only loosen each relaxation
    capped = compare_relaxations(fig1)
    for kind in ("STM", "I", "L", "P", "U"):
        assert report.values[kind] >= capped.values[kind] - 1e-6


def test_infeasible_lp_reported():
    # conflicting binary fixings: model manually made infeasible via bounds
    inst = validate_instance(1, 2, [(0, 0, 2.0), (0, 1, 3.0)])
    model = build(inst, FormulationKind.U)
    from efp.formulations import Constraint, MipModel

    forced = MipModel(
        model.variables,
        model.objective,
        model.constraints
        + (
            Constraint("force_a", {"x_1_1": 1.0}, ">=", 1.0),
            Constraint("force_b", {"x_1_1": 1.0}, "<=", 0.0),
        ),
    )
    assert solve_lp(forced).status == "infeasible"
    result = solve_mip(forced, inst)
    assert result.status == "infeasible"
    assert result.incumbent is None
    assert math.isnan(result.incumbent_value)
