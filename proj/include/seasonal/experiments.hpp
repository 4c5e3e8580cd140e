#ifndef SEASONAL_EXPERIMENTS_HPP
#define SEASONAL_EXPERIMENTS_HPP

#include "seasonal/demand.hpp"
#include "seasonal/esom.hpp"
#include "seasonal/rolling_horizon.hpp"
#include "seasonal/ucm.hpp"

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace seasonal
{

enum class ModelKind
{
    ucm,
    esom
};

enum class ForecastKind
{
    pf,
    pfml
};

struct ScenarioId
{
    ModelKind model = ModelKind::ucm;
    ForecastKind forecast = ForecastKind::pf;

    std::string label() const; // "UCM-PF", "ESOM-PFML", ...
    friend auto operator<=>(const ScenarioId&, const ScenarioId&) = default;
};

inline constexpr ScenarioId all_scenarios[] = {
    {ModelKind::ucm, ForecastKind::pf},
    {ModelKind::ucm, ForecastKind::pfml},
    {ModelKind::esom, ForecastKind::pf},
    {ModelKind::esom, ForecastKind::pfml},
};

struct StudyConfig
{
    UcmConfig ucm;
    EsomConfig esom;
    WindowScheme windows;
    std::vector<MonthIndex> climatology_months; // empty: every whole month of the history
    bool chain_months = false; // carry UCM end-of-month state into the next month
    int jobs = 1;              // concurrent scenario-month solves
};

struct MonthlyMetrics
{
    int month = 0;
    ScenarioId scenario;
    double total_cost = 0.0;
    double cost_fixed = 0.0;
    double cost_startup = 0.0;
    double cost_variable = 0.0;
    std::array<double, 4> generation{}; // MWh, indexed by Fuel
    double demand_mwh = 0.0;
    double wall_seconds = 0.0;
    std::vector<WindowStats> windows; // UCM only

    double gen(Fuel f) const { return generation[static_cast<std::size_t>(f)]; }
};

/// Everything one scenario-month solve produced.
struct ScenarioRun
{
    MonthlyMetrics metrics;
    DemandSeries demand; // the forecast the model saw
    InitialConditions init;
    std::optional<MonthlySolution> ucm;
    std::optional<DispatchSolution> esom;
};

/// Builds the scenario's demand for `month`. PFML needs `climatology`.
DemandSeries scenario_demand(const DemandSeries& observed, ForecastKind forecast, MonthIndex month,
                             const ClimatologyProfile* climatology);

/// Solves one scenario for one month. `init` defaults to the case's initial
/// conditions. Failures are rethrown with the scenario and month prefixed.
ScenarioRun solve_scenario(const NetworkCase& c, const DemandSeries& observed, const ClimatologyProfile& climatology,
                           ScenarioId scenario, MonthIndex month, const StudyConfig& config,
                           const std::optional<InitialConditions>& init = std::nullopt);

MonthlyMetrics run_scenario(const NetworkCase& c, const DemandSeries& observed, const DemandSeries& history,
                            ScenarioId scenario, MonthIndex month, const StudyConfig& config = {});

struct ComparisonRow
{
    std::string comparison; // c1a, c1b, c2a, c2b, c3
    int month = 0;
    std::string metric; // total_cost, nuclear, hydro, coal, gas
    double value_a = 0.0;
    double value_b = 0.0;
    double base = 0.0;
    std::optional<double> pct_diff; // empty when base is zero
};

/// One row per metric with pct_diff = (a - b) / base * 100. Throws
/// ValidationError when the months differ.
std::vector<ComparisonRow> compare(const MonthlyMetrics& a, const MonthlyMetrics& b, const MonthlyMetrics& base,
                                   std::string_view comparison = {});

struct ComparisonSpec
{
    std::string_view id;
    ScenarioId a;
    ScenarioId b;
};

inline constexpr ComparisonSpec all_comparisons[] = {
    {"c1a", {ModelKind::ucm, ForecastKind::pf}, {ModelKind::esom, ForecastKind::pf}},
    {"c1b", {ModelKind::ucm, ForecastKind::pfml}, {ModelKind::esom, ForecastKind::pfml}},
    {"c2a", {ModelKind::ucm, ForecastKind::pf}, {ModelKind::ucm, ForecastKind::pfml}},
    {"c2b", {ModelKind::esom, ForecastKind::pf}, {ModelKind::esom, ForecastKind::pfml}},
    {"c3", {ModelKind::ucm, ForecastKind::pf}, {ModelKind::esom, ForecastKind::pfml}},
};

struct StudyFailure
{
    ScenarioId scenario;
    int month = 0;
    std::string kind; // validation, infeasible, solver
    std::string message;
};

struct StudyReport
{
    std::vector<MonthlyMetrics> metrics; // month-major, scenarios in all_scenarios order
    std::vector<std::vector<ComparisonRow>> comparisons; // parallel to all_comparisons
    std::vector<StudyFailure> failures;
    double wall_seconds = 0.0;

    const MonthlyMetrics* find(ScenarioId s, int month) const;
    std::vector<ComparisonRow> rows(std::string_view comparison, std::string_view metric) const;
};

/// Runs the four scenarios over `months` and assembles the comparisons.
/// Failed scenario-months are recorded, not thrown; comparisons skip months
/// missing any operand.
StudyReport run_study(const NetworkCase& c, const DemandSeries& observed, const DemandSeries& history,
                      const std::vector<MonthIndex>& months, const StudyConfig& config = {});

std::string emit_metrics_csv(const std::vector<MonthlyMetrics>& metrics);
std::string emit_comparison_csv(const std::vector<ComparisonRow>& rows);
std::string emit_runtime_csv(const std::vector<MonthlyMetrics>& metrics);
std::string emit_failures_csv(const std::vector<StudyFailure>& failures);

/// metrics.csv, c1a.csv ... c3.csv, runtime.csv, per-month window stats
/// under windows/, and failures.csv when anything failed.
void write_study(const StudyReport& report, const std::filesystem::path& out_dir);

} // namespace seasonal
#endif // SEASONAL_EXPERIMENTS_HPP
