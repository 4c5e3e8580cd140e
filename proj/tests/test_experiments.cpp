#include "oracles.hpp"

#include "seasonal/errors.hpp"
#include "seasonal/experiments.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace seasonal;

namespace
{

MonthlyMetrics metrics(int month, double cost, double nuclear, double hydro, double coal, double gas)
{
    MonthlyMetrics m;
    m.month = month;
    m.total_cost = cost;
    m.generation = {nuclear, hydro, coal, gas};
    return m;
}

const ComparisonRow& row(const std::vector<ComparisonRow>& rows, const std::string& metric)
{
    for(const auto& r : rows)
        if(r.metric == metric)
            return r;
    throw std::runtime_error("missing metric " + metric);
}

/// Two thermal units and a small hydro unit on one bus.
NetworkCase tiny_case()
{
    auto coal = oracle::unit("COAL", 30, 120, 50, 500, {{80, 18}, {40, 22}});
    coal.min_up = coal.min_down = 6;
    auto gas = oracle::unit("GAS", 10, 80, 20, 100, {{80, 40}}, "gas");
    auto hydro = oracle::unit("HYD", 0, 40, 0, 0, {{40, 1}}, "hydro");
    hydro.energy_budget = 6000;
    return oracle::single_bus_case({coal, gas, hydro});
}

DemandSeries daily_cycle(int months, double amplitude, unsigned seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0, 4);
    std::vector<double> mw(static_cast<std::size_t>(months) * hours_per_month);
    for(std::size_t t = 0; t < mw.size(); ++t)
    {
        const int h = static_cast<int>(t % 24);
        mw[t] = 110 + amplitude * ((h >= 8 && h < 20) ? 1.0 : -1.0) + noise(rng);
    }
    return oracle::flat_series(mw);
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST(Compare, PercentDifferenceAgainstBase)
{
    auto a = metrics(3, 102, 0, 99, 0, 0);
    auto b = metrics(3, 100, 0, 100, 0, 0);
    auto base = metrics(3, 102, 0, 100, 0, 0);
    auto rows = compare(a, b, base, "c1a");
    ASSERT_EQ(rows.size(), 5u);
    EXPECT_NEAR(*row(rows, "total_cost").pct_diff, 2.0 / 102 * 100, 1e-12);
    EXPECT_NEAR(*row(rows, "hydro").pct_diff, -1.0, 1e-12);
    EXPECT_FALSE(row(rows, "nuclear").pct_diff) << "base zero";
    EXPECT_EQ(rows[0].comparison, "c1a");
    EXPECT_EQ(rows[0].month, 3);
}

TEST(Compare, IdenticalOperandsGiveZero)
{
    auto a = metrics(1, 500, 10, 20, 30, 40);
    for(const auto& r : compare(a, a, a))
        EXPECT_EQ(*r.pct_diff, 0.0);
}

TEST(Compare, AntisymmetricAndScaleInvariant)
{
    auto a = metrics(2, 130, 11, 22, 33, 44);
    auto b = metrics(2, 120, 10, 25, 30, 50);
    auto base = metrics(2, 125, 12, 20, 31, 45);
    auto ab = compare(a, b, base);
    auto ba = compare(b, a, base);
    auto scale = [](MonthlyMetrics m, double k) {
        m.total_cost *= k;
        for(auto& g : m.generation)
            g *= k;
        return m;
    };
    auto scaled = compare(scale(a, 7), scale(b, 7), scale(base, 7));
    for(std::size_t k = 0; k < ab.size(); ++k)
    {
        EXPECT_NEAR(*ab[k].pct_diff, -*ba[k].pct_diff, 1e-12);
        EXPECT_NEAR(*ab[k].pct_diff, *scaled[k].pct_diff, 1e-12);
    }
}

TEST(Compare, MonthMismatchRejected)
{
    EXPECT_THROW(compare(metrics(1, 1, 1, 1, 1, 1), metrics(2, 1, 1, 1, 1, 1), metrics(1, 1, 1, 1, 1, 1)),
                 ValidationError);
}

TEST(ComparisonCsv, NaForUndefinedPercent)
{
    auto rows = compare(metrics(1, 10, 0, 0, 0, 0), metrics(1, 9, 0, 0, 0, 0), metrics(1, 10, 0, 0, 0, 0), "c3");
    std::string csv = emit_comparison_csv(rows);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "month,metric,value_a,value_b,base,pct_diff");
    EXPECT_NE(csv.find(",NA\n"), std::string::npos);
    EXPECT_NE(csv.find("1,total_cost,10.000000,9.000000,10.000000,10.000000\n"), std::string::npos);
}

TEST(Scenarios, LabelsAndComparisonTable)
{
    EXPECT_EQ(all_scenarios[0].label(), "UCM-PF");
    EXPECT_EQ(all_scenarios[3].label(), "ESOM-PFML");
    EXPECT_EQ(std::size(all_comparisons), 5u);
    EXPECT_EQ(all_comparisons[4].b.label(), "ESOM-PFML");
}

TEST(Scenarios, FlatDemandMakesForecastsAgree)
{
    auto c = tiny_case();
    auto flat = oracle::flat_series(std::vector<double>(hours_per_month, 100));
    auto pf = run_scenario(c, flat, flat, {ModelKind::esom, ForecastKind::pf}, {1});
    auto pfml = run_scenario(c, flat, flat, {ModelKind::esom, ForecastKind::pfml}, {1});
    EXPECT_NEAR(pf.total_cost, pfml.total_cost, 1e-6 * pf.total_cost);
    for(Fuel f : all_fuels)
        EXPECT_NEAR(pf.gen(f), pfml.gen(f), 1e-6);
    EXPECT_NEAR(pf.demand_mwh, 72000, 1e-6);
}

TEST(Scenarios, MetricsAccountForDemand)
{
    auto c = tiny_case();
    auto obs = daily_cycle(1, 30, 3);
    auto m = run_scenario(c, obs, obs, {ModelKind::ucm, ForecastKind::pf}, {1});
    double gen = 0;
    for(Fuel f : all_fuels)
        gen += m.gen(f);
    EXPECT_NEAR(gen, m.demand_mwh, 1e-4);
    EXPECT_NEAR(m.total_cost, m.cost_fixed + m.cost_startup + m.cost_variable, 1e-6);
    EXPECT_EQ(m.windows.size(), 4u);
    EXPECT_LE(m.gen(Fuel::hydro), 6000 + 1e-6);
}

TEST(Study, SmallStudyWritesEveryTable)
{
    auto c = tiny_case();
    auto obs = daily_cycle(2, 30, 5);
    auto hist = daily_cycle(2, 25, 6);
    auto report = run_study(c, obs, hist, {{1}, {2}});
    EXPECT_TRUE(report.failures.empty());
    ASSERT_EQ(report.metrics.size(), 8u);
    EXPECT_EQ(report.metrics[1].scenario.label(), "UCM-PFML");
    ASSERT_EQ(report.comparisons.size(), 5u);
    for(const auto& table : report.comparisons)
        EXPECT_EQ(table.size(), 2u * 5);
    ASSERT_NE(report.find({ModelKind::esom, ForecastKind::pf}, 2), nullptr);
    EXPECT_EQ(report.rows("c1a", "total_cost").size(), 2u);

    auto dir = std::filesystem::temp_directory_path() / "seasonal_study_test";
    std::filesystem::remove_all(dir);
    write_study(report, dir);
    for(const char* f : {"metrics.csv", "c1a.csv", "c1b.csv", "c2a.csv", "c2b.csv", "c3.csv", "runtime.csv"})
        EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
    EXPECT_FALSE(std::filesystem::exists(dir / "failures.csv"));
    EXPECT_TRUE(std::filesystem::exists(dir / "windows" / "UCM-PF_m01.csv"));
    EXPECT_EQ(slurp(dir / "c2a.csv"), emit_comparison_csv(report.comparisons[2]));
    std::filesystem::remove_all(dir);
}

TEST(Study, FailuresAreRecordedNotThrown)
{
    auto c = tiny_case();
    auto obs = daily_cycle(1, 30, 5);
    for(int t = 0; t < hours_per_month; ++t)
        obs.at(0, t) += t == 400 ? 500 : 0;
    auto report = run_study(c, obs, obs, {{1}});
    EXPECT_FALSE(report.failures.empty());
    for(const auto& f : report.failures)
        EXPECT_EQ(f.kind, "infeasible");
    for(const auto& table : report.comparisons)
        EXPECT_TRUE(table.empty());
}
