#include "oracles.hpp"

#include "seasonal/errors.hpp"
#include "seasonal/rolling_horizon.hpp"

#include <gtest/gtest.h>

#include <numeric>

using namespace seasonal;

namespace
{

UcmConfig exact()
{
    UcmConfig cfg;
    cfg.solver.mip_gap = 0.0;
    return cfg;
}

/// Three units with long minimum times, so that a 36-hour window with a
/// 24-hour step cannot see the whole day-two peak.
NetworkCase three_unit_case()
{
    auto base = oracle::unit("BASE", 40, 120, 20, 900, {{60, 12}, {60, 15}});
    base.min_up = 8;
    base.min_down = 8;
    base.ramp_up = base.ramp_down = 50;
    auto mid = oracle::unit("MID", 20, 80, 40, 400, {{80, 25}});
    mid.min_up = 4;
    mid.min_down = 4;
    auto peak = oracle::unit("PEAK", 0, 60, 10, 50, {{60, 60}}, "gas");
    return oracle::single_bus_case({base, mid, peak});
}

DemandSeries two_day_demand()
{
    std::vector<double> mw(48);
    for(int t = 0; t < 48; ++t)
    {
        const int h = t % 24;
        const double shape = h < 6 ? 0.55 : h < 9 ? 0.8 : h < 18 ? 1.0 : h < 21 ? 0.9 : 0.65;
        mw[t] = std::round((t < 24 ? 150 : 200) * shape);
    }
    return oracle::flat_series(mw);
}

} // namespace

TEST(PlanWindows, DefaultMonthHasFourWindows)
{
    auto plan = plan_windows(720);
    ASSERT_EQ(plan.size(), 4u);
    const int starts[] = {0, 168, 336, 504};
    const int lengths[] = {216, 216, 216, 216};
    const int kept[] = {168, 168, 168, 216};
    int covered = 0;
    for(int k = 0; k < 4; ++k)
    {
        EXPECT_EQ(plan[k].start_hour, starts[k]);
        EXPECT_EQ(plan[k].length_hours, lengths[k]);
        EXPECT_EQ(plan[k].retained_hours, kept[k]);
        covered += plan[k].retained_hours;
    }
    EXPECT_EQ(covered, 720);
    EXPECT_EQ(plan.back().start_hour + plan.back().length_hours, 720);
}

TEST(PlanWindows, OtherMonthLengthsRejected)
{
    EXPECT_THROW(plan_windows(744), ValidationError);
    EXPECT_THROW(plan_windows(0), ValidationError);
}

TEST(PlanWindows, GeneralSchemeTruncatesLastWindow)
{
    auto plan = plan_windows(48, {36, 24});
    ASSERT_EQ(plan.size(), 2u);
    EXPECT_EQ(plan[0], (WindowPlan{0, 36, 24}));
    EXPECT_EQ(plan[1], (WindowPlan{24, 24, 24}));

    auto odd = plan_windows(100, {30, 20});
    int covered = 0;
    for(const auto& w : odd)
        covered += w.retained_hours;
    EXPECT_EQ(covered, 100);
    EXPECT_EQ(odd.back().start_hour + odd.back().length_hours, 100);
}

TEST(WindowBudget, ProRataToWindowLength)
{
    EXPECT_NEAR(allocate_window_budget(3000, {0, 216, 168}, 720), 900, 1e-12);
    EXPECT_EQ(allocate_window_budget(0, {0, 216, 168}, 720), 0);
    EXPECT_NEAR(allocate_window_budget(500, {504, 216, 216}, 216), 500, 1e-12);
    EXPECT_THROW(allocate_window_budget(-1, {0, 216, 168}, 720), ValidationError);
}

TEST(ExtractInitialConditions, CountsRunsAcrossWindowStart)
{
    auto c = oracle::single_bus_case({oracle::unit("A", 10, 100, 0, 0, {{100, 1}}),
                                      oracle::unit("B", 10, 100, 0, 0, {{100, 1}}),
                                      oracle::unit("C", 10, 100, 0, 0, {{100, 1}})});
    CommitmentSolution s;
    s.hours = 216;
    s.g = Grid<double>(3, 216);
    s.u = s.v = s.w = Grid<std::uint8_t>(3, 216);
    for(int t = 0; t < 216; ++t)
    {
        s.u(0, t) = 1; // on throughout
        s.g(0, t) = 55;
        s.u(1, t) = t < 166 ? 1 : 0; // off for the last two retained hours
        s.u(2, t) = 0;               // off throughout, was off before
    }
    InitialConditions init{{0, false, 0, 3}, {50, true, 10, 0}, {0, false, 0, 5}};
    auto out = extract_initial_conditions(s, 168, init);
    EXPECT_TRUE(out[0].on);
    EXPECT_EQ(out[0].ut0, 168);
    EXPECT_DOUBLE_EQ(out[0].g0, 55);
    EXPECT_FALSE(out[1].on);
    EXPECT_EQ(out[1].dt0, 2);
    EXPECT_EQ(out[1].g0, 0.0);
    EXPECT_FALSE(out[2].on);
    EXPECT_EQ(out[2].dt0, 173);

    EXPECT_EQ(extract_initial_conditions(s, 0, init), init);
    EXPECT_THROW(extract_initial_conditions(s, 217, init), ValidationError);
}

TEST(SolveMonth, AlwaysOnUnitStitchesToMonolithic)
{
    auto c = oracle::single_bus_case({oracle::unit("G", 10, 200, 7, 300, {{100, 20}, {100, 25}})});
    std::vector<double> mw(48);
    for(int t = 0; t < 48; ++t)
        mw[t] = 60 + 80 * ((t % 24) >= 8 && (t % 24) < 20);
    auto d = oracle::flat_series(mw);
    auto stitched = solve_month(c, d, cold_start(c), exact(), {36, 24});
    auto mono = solve_ucm(c, d, 48, cold_start(c), exact());
    EXPECT_NEAR(stitched.solution.cost_total, mono.cost_total, 1e-6);
    EXPECT_EQ(stitched.windows.size(), 2u);
    EXPECT_TRUE(audit_solution(c, d, stitched.solution, cold_start(c)).empty());
}

TEST(SolveMonth, StitchedNeverBeatsMonolithic)
{
    auto c = three_unit_case();
    auto d = two_day_demand();
    auto stitched = solve_month(c, d, cold_start(c), exact(), {36, 24});
    auto mono = solve_ucm(c, d, 48, cold_start(c), exact());
    EXPECT_GE(stitched.solution.cost_total, mono.cost_total - 1e-6);
    EXPECT_TRUE(audit_solution(c, d, stitched.solution, cold_start(c)).empty());
    EXPECT_NEAR(stitched.solution.cost_total,
                stitched.solution.cost_fixed + stitched.solution.cost_startup + stitched.solution.cost_variable,
                1e-6);
}

TEST(SolveMonth, FinalStateMatchesLastHour)
{
    auto c = three_unit_case();
    auto d = two_day_demand();
    auto m = solve_month(c, d, cold_start(c), {}, {36, 24});
    for(std::size_t i = 0; i < c.units.size(); ++i)
    {
        EXPECT_EQ(m.final_state[i].on, m.solution.u(i, 47) == 1);
        if(m.final_state[i].on)
            EXPECT_DOUBLE_EQ(m.final_state[i].g0, m.solution.g(i, 47));
    }
}

TEST(SolveMonth, HydroStaysWithinMonthlyBudget)
{
    auto hydro = oracle::unit("HYD", 0, 100, 0, 0, {{100, 0.5}}, "hydro");
    hydro.energy_budget = 1500;
    auto thermal = oracle::unit("TH", 0, 200, 5, 0, {{200, 30}});
    auto c = oracle::single_bus_case({hydro, thermal});
    auto d = oracle::flat_series(std::vector<double>(48, 120));
    auto m = solve_month(c, d, cold_start(c), exact(), {36, 24});
    double hydro_mwh = 0;
    for(int t = 0; t < 48; ++t)
        hydro_mwh += m.solution.g(0, t);
    EXPECT_LE(hydro_mwh, 1500 + 1e-6);
    EXPECT_GT(hydro_mwh, 1000) << "cheap energy should mostly be used";
}

TEST(SolveMonth, InfeasibleWindowIsNamed)
{
    auto c = oracle::single_bus_case({oracle::unit("G", 0, 100, 0, 0, {{100, 1}})});
    std::vector<double> mw(48, 50);
    mw[30] = 150;
    try
    {
        solve_month(c, oracle::flat_series(mw), cold_start(c), {}, {36, 24});
        FAIL() << "expected InfeasibleError";
    }
    catch(const InfeasibleError& e)
    {
        EXPECT_NE(std::string(e.what()).find("window"), std::string::npos);
        EXPECT_EQ(e.hour(), 30);
    }
}

TEST(WindowStatsTable, HeaderAndRows)
{
    std::string text = emit_window_stats({{0, 0, 12.5, 0.001, 1.25}, {1, 168, 10, 0, 0.5}});
    EXPECT_EQ(text.substr(0, text.find('\n')), "window,start_hour,objective,gap,wall_seconds");
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 3);
}
