#include "oracles.hpp"

#include "seasonal/errors.hpp"
#include "seasonal/esom.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace seasonal;

namespace
{

bool any_rule(const std::vector<Violation>& v, const std::string& rule)
{
    return std::any_of(v.begin(), v.end(), [&](const Violation& x) { return x.rule == rule; });
}

} // namespace

TEST(FoldFixedCosts, SpreadsOverPmax)
{
    auto c = oracle::single_bus_case({oracle::unit("A", 0, 60, 120, 0, {{60, 20}}),
                                      oracle::unit("B", 0, 50, 0, 0, {{50, 7}}),
                                      oracle::unit("C", 0, 100, 200, 0, {{40, 10}, {60, 30}})});
    auto f = fold_fixed_costs(c);
    EXPECT_NEAR(f.units[0].blocks[0].marginal_cost, 22, 1e-12);
    EXPECT_EQ(f.units[1].blocks, c.units[1].blocks);
    EXPECT_NEAR(f.units[2].blocks[0].marginal_cost, 12, 1e-12);
    EXPECT_NEAR(f.units[2].blocks[1].marginal_cost, 32, 1e-12);
    EXPECT_EQ(c.units[0].blocks[0].marginal_cost, 20) << "input left untouched";
}

TEST(BuildEsom, BundledMonthIsPureLp)
{
    NetworkCase c = load_case(SEASONAL_DATA_DIR "/rts24.case");
    DemandSeries d = conform_to_case(load_demand(SEASONAL_DATA_DIR "/demand_observed.csv", &c), c);
    auto built = build_esom(c, d.month({1}), {});
    std::size_t blocks = 0;
    for(const auto& u : c.units)
        blocks += u.blocks.size();
    EXPECT_EQ(built.model.variable_count(), blocks * 720);
    EXPECT_EQ(built.model.binary_count(), 0u);
    EXPECT_FALSE(built.model.is_mip());
}

TEST(SolveEsom, FlatDemandHandCosts)
{
    auto c = oracle::single_bus_case({oracle::unit("G", 10, 100, 5, 50, {{100, 20}})});
    auto d = oracle::flat_series(std::vector<double>(10, 50));
    auto s = solve_esom(c, d);
    for(int t = 0; t < 10; ++t)
        EXPECT_NEAR(s.g(0, t), 50, 1e-9);
    EXPECT_NEAR(s.cost_variable_true, 10000, 1e-6);
    EXPECT_NEAR(s.cost_fixed_expost, 50, 1e-9);
    EXPECT_NEAR(s.cost_total_reported, 10050, 1e-6);
    EXPECT_NEAR(s.lp_objective, 10 * 50 * 20.05, 1e-6);
    EXPECT_TRUE(audit_dispatch(c, d, s).empty());
}

TEST(SolveEsom, ZeroDemandCostsNothing)
{
    auto c = oracle::single_bus_case({oracle::unit("G", 10, 100, 5, 50, {{100, 20}})});
    auto s = solve_esom(c, oracle::flat_series(std::vector<double>(5, 0.0)));
    EXPECT_NEAR(s.cost_total_reported, 0, 1e-9);
    EXPECT_NEAR(s.cost_fixed_expost, 0, 1e-12);
}

TEST(SolveEsom, MeritOrderMatchesHandLp)
{
    // folded prices: A 10 + 100/100 = 11, B 12 + 0 = 12
    auto a = oracle::unit("A", 50, 100, 100, 1000, {{100, 10}});
    auto b = oracle::unit("B", 0, 100, 0, 0, {{100, 12}}, "gas");
    auto c = oracle::single_bus_case({a, b});
    auto d = oracle::flat_series({30, 150});
    auto s = solve_esom(c, d);
    EXPECT_NEAR(s.g(0, 0), 30, 1e-9) << "no p_min in the dispatch model";
    EXPECT_NEAR(s.g(1, 0), 0, 1e-9);
    EXPECT_NEAR(s.g(0, 1), 100, 1e-9);
    EXPECT_NEAR(s.g(1, 1), 50, 1e-9);
    EXPECT_NEAR(s.cost_variable_true, 30 * 10 + 100 * 10 + 50 * 12, 1e-6);
    EXPECT_NEAR(s.cost_fixed_expost, 2 * 100, 1e-9);

    EsomConfig plain;
    plain.fold_fixed_costs = false;
    auto p = solve_esom(c, d, plain);
    EXPECT_NEAR(p.lp_objective, p.cost_variable_true, 1e-6);
}

TEST(SolveEsom, RampsBindFromSecondHour)
{
    auto g = oracle::unit("CHEAP", 0, 100, 0, 0, {{100, 10}});
    g.ramp_up = g.ramp_down = 20;
    auto c = oracle::single_bus_case({g, oracle::unit("DEAR", 0, 200, 0, 0, {{200, 50}}, "gas")});
    auto d = oracle::flat_series({20, 100, 100, 100});
    auto s = solve_esom(c, d);
    EXPECT_NEAR(s.g(0, 0), 20, 1e-9);
    for(int t = 1; t < 4; ++t)
        EXPECT_LE(std::abs(s.g(0, t) - s.g(0, t - 1)), 20 + 1e-9);
    EXPECT_NEAR(s.g(0, 3), 80, 1e-9) << "cheap unit climbs 20 MW per hour";
    EXPECT_NEAR(s.g(1, 1), 60, 1e-9);
    auto v = audit_dispatch(c, d, s);
    EXPECT_TRUE(v.empty());
}

TEST(SolveEsom, EnergyBudgetAndBalanceHold)
{
    auto h = oracle::unit("HYD", 0, 100, 0, 0, {{100, 1}}, "hydro");
    h.energy_budget = 300;
    auto c = oracle::single_bus_case({h, oracle::unit("TH", 0, 200, 10, 0, {{200, 30}})});
    std::vector<double> mw = {80, 120, 150, 90, 60};
    auto d = oracle::flat_series(mw);
    auto s = solve_esom(c, d);
    double hydro = 0;
    for(int t = 0; t < 5; ++t)
    {
        hydro += s.g(0, t);
        EXPECT_NEAR(s.g(0, t) + s.g(1, t), mw[t], 1e-6);
    }
    EXPECT_NEAR(hydro, 300, 1e-6);
    EXPECT_TRUE(audit_dispatch(c, d, s).empty());
}

TEST(SolveEsom, ZeroFixedCostsReportLpObjective)
{
    auto c = oracle::single_bus_case({oracle::unit("A", 0, 100, 0, 0, {{60, 10}, {40, 14}}),
                                      oracle::unit("B", 0, 100, 0, 0, {{100, 12}}, "gas")});
    auto d = oracle::flat_series({70, 130, 180});
    auto s = solve_esom(c, d);
    EXPECT_NEAR(s.lp_objective, s.cost_total_reported, 1e-6);
    EXPECT_EQ(s.cost_fixed_expost, 0.0);
}

TEST(SolveEsom, CapacityShortfallIsInfeasible)
{
    auto c = oracle::single_bus_case({oracle::unit("G", 0, 100, 0, 0, {{100, 10}})});
    try
    {
        solve_esom(c, oracle::flat_series({50, 101}));
        FAIL() << "expected InfeasibleError";
    }
    catch(const InfeasibleError& e)
    {
        EXPECT_EQ(e.hour(), 1);
    }
}

TEST(AuditDispatch, FlagsBrokenInvariants)
{
    auto g = oracle::unit("G", 0, 100, 5, 0, {{100, 20}});
    g.ramp_up = 10;
    auto c = oracle::single_bus_case({g});
    auto d = oracle::flat_series({50, 50});
    auto s = solve_esom(c, d);
    auto bad = s;
    bad.g(0, 1) = 61;
    auto v = audit_dispatch(c, d, bad);
    EXPECT_TRUE(any_rule(v, "ramp_up"));
    EXPECT_TRUE(any_rule(v, "balance"));
    bad = s;
    bad.cost_total_reported += 5;
    EXPECT_FALSE(audit_dispatch(c, d, bad).empty());
}

TEST(DispatchArchive, RoundTrip)
{
    auto c = oracle::single_bus_case({oracle::unit("A", 0, 100, 3, 0, {{60, 10}, {40, 14}}),
                                      oracle::unit("B", 0, 100, 0, 0, {{100, 12}}, "gas")});
    auto d = oracle::flat_series({70, 130, 180});
    auto s = solve_esom(c, d);
    auto back = parse_dispatch_archive(emit_dispatch_archive(c, s), c);
    EXPECT_EQ(back.hours, s.hours);
    EXPECT_EQ(back.g, s.g);
    EXPECT_EQ(back.cost_total_reported, s.cost_total_reported);
    EXPECT_EQ(back.cost_fixed_expost, s.cost_fixed_expost);
    EXPECT_TRUE(audit_dispatch(c, d, back).empty());
}
