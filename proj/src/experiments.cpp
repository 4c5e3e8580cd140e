#include "seasonal/experiments.hpp"

#include "seasonal/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <map>
#include <thread>

namespace seasonal
{

std::string ScenarioId::label() const
{
    return std::string(model == ModelKind::ucm ? "UCM" : "ESOM") + (forecast == ForecastKind::pf ? "-PF" : "-PFML");
}

DemandSeries scenario_demand(const DemandSeries& observed, ForecastKind forecast, MonthIndex month,
                             const ClimatologyProfile* climatology)
{
    if(forecast == ForecastKind::pf)
        return perfect_forecast(observed, month);
    if(!climatology)
        throw ValidationError("PFML forecast needs a climatology profile");
    return pfml_forecast(observed, *climatology, month);
}

namespace
{

double elapsed_since(std::chrono::steady_clock::time_point start)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

template<typename Values>
void add_generation(const NetworkCase& c, const Values& g, MonthlyMetrics& m)
{
    for(std::size_t i = 0; i < c.units.size(); ++i)
    {
        double sum = 0;
        for(std::size_t t = 0; t < g.cols(); ++t)
            sum += g(i, t);
        m.generation[static_cast<std::size_t>(c.units[i].fuel_kind())] += sum;
    }
}

} // namespace

ScenarioRun solve_scenario(const NetworkCase& c, const DemandSeries& observed, const ClimatologyProfile& climatology,
                           ScenarioId scenario, MonthIndex month, const StudyConfig& config,
                           const std::optional<InitialConditions>& init)
{
    const std::string tag = fmt::format("{} month {}", scenario.label(), month.ordinal);
    try
    {
        ScenarioRun run;
        run.demand = scenario_demand(observed, scenario.forecast, month, &climatology);
        run.init = init ? *init : default_initial_conditions(c);
        MonthlyMetrics& m = run.metrics;
        m.month = month.ordinal;
        m.scenario = scenario;
        m.demand_mwh = run.demand.total();

        const auto start = std::chrono::steady_clock::now();
        if(scenario.model == ModelKind::ucm)
        {
            run.ucm = solve_month(c, run.demand, run.init, config.ucm, config.windows);
            m.wall_seconds = elapsed_since(start);
            const auto& s = run.ucm->solution;
            m.cost_fixed = s.cost_fixed;
            m.cost_startup = s.cost_startup;
            m.cost_variable = s.cost_variable;
            m.total_cost = s.cost_total;
            m.windows = run.ucm->windows;
            add_generation(c, s.g, m);
        }
        else
        {
            run.esom = solve_esom(c, run.demand, config.esom);
            m.wall_seconds = elapsed_since(start);
            const auto& s = *run.esom;
            m.cost_fixed = s.cost_fixed_expost;
            m.cost_variable = s.cost_variable_true;
            m.total_cost = s.cost_total_reported;
            add_generation(c, s.g, m);
        }
        return run;
    }
    catch(const InfeasibleError& e)
    {
        throw InfeasibleError(tag + ": " + e.what(), e.hour());
    }
    catch(const ParseError& e)
    {
        throw ValidationError(tag + ": " + e.what());
    }
    catch(const ValidationError& e)
    {
        throw ValidationError(tag + ": " + e.what());
    }
    catch(const SolverError& e)
    {
        throw SolverError(tag + ": " + e.what());
    }
}

MonthlyMetrics run_scenario(const NetworkCase& c, const DemandSeries& observed, const DemandSeries& history,
                            ScenarioId scenario, MonthIndex month, const StudyConfig& config)
{
    ClimatologyProfile climatology;
    if(scenario.forecast == ForecastKind::pfml)
        climatology = build_climatology(history, config.climatology_months);
    return solve_scenario(c, observed, climatology, scenario, month, config).metrics;
}

std::vector<ComparisonRow> compare(const MonthlyMetrics& a, const MonthlyMetrics& b, const MonthlyMetrics& base,
                                   std::string_view comparison)
{
    if(a.month != b.month || a.month != base.month)
        throw ValidationError(fmt::format("cannot compare months {}, {} against base month {}", a.month, b.month,
                                          base.month));
    std::vector<ComparisonRow> out;
    auto row = [&](std::string metric, double va, double vb, double vbase) {
        ComparisonRow r{std::string(comparison), a.month, std::move(metric), va, vb, vbase, std::nullopt};
        if(vbase != 0)
            r.pct_diff = (va - vb) / vbase * 100.0;
        out.push_back(std::move(r));
    };
    row("total_cost", a.total_cost, b.total_cost, base.total_cost);
    for(Fuel f : all_fuels)
        row(std::string(to_string(f)), a.gen(f), b.gen(f), base.gen(f));
    return out;
}

const MonthlyMetrics* StudyReport::find(ScenarioId s, int month) const
{
    for(const auto& m : metrics)
        if(m.scenario == s && m.month == month)
            return &m;
    return nullptr;
}

std::vector<ComparisonRow> StudyReport::rows(std::string_view comparison, std::string_view metric) const
{
    std::vector<ComparisonRow> out;
    for(const auto& table : comparisons)
        for(const auto& r : table)
            if(r.comparison == comparison && r.metric == metric)
                out.push_back(r);
    return out;
}

namespace
{

struct Job
{
    ScenarioId scenario;
    std::vector<MonthIndex> months; // more than one only when chaining
};

struct JobResult
{
    std::vector<MonthlyMetrics> metrics;
    std::vector<StudyFailure> failures;
};

StudyFailure classify(ScenarioId s, int month, const std::exception& e)
{
    std::string kind = "solver";
    if(dynamic_cast<const InfeasibleError*>(&e))
        kind = "infeasible";
    else if(dynamic_cast<const ValidationError*>(&e) || dynamic_cast<const ParseError*>(&e))
        kind = "validation";
    return {s, month, kind, e.what()};
}

} // namespace

StudyReport run_study(const NetworkCase& c, const DemandSeries& observed, const DemandSeries& history,
                      const std::vector<MonthIndex>& months, const StudyConfig& config)
{
    const auto start = std::chrono::steady_clock::now();
    if(config.jobs < 1)
        throw ValidationError("jobs must be at least 1");
    for(MonthIndex m : months)
        if(m.ordinal < 1 || m.ordinal > observed.month_count())
            throw ValidationError(fmt::format("month {} outside observed demand ({} months)", m.ordinal,
                                              observed.month_count()));
    const ClimatologyProfile climatology = build_climatology(history, config.climatology_months);

    std::vector<Job> jobs;
    for(ScenarioId s : all_scenarios)
    {
        if(config.chain_months && s.model == ModelKind::ucm)
            jobs.push_back({s, months});
        else
            for(MonthIndex m : months)
                jobs.push_back({s, {m}});
    }

    std::vector<JobResult> results(jobs.size());
    auto work = [&](const Job& job, JobResult& out) {
        std::optional<InitialConditions> state;
        for(MonthIndex m : job.months)
        {
            try
            {
                ScenarioRun run = solve_scenario(c, observed, climatology, job.scenario, m, config, state);
                if(config.chain_months && run.ucm)
                    state = run.ucm->final_state;
                out.metrics.push_back(std::move(run.metrics));
            }
            catch(const std::exception& e)
            {
                out.failures.push_back(classify(job.scenario, m.ordinal, e));
                state.reset();
            }
        }
    };

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for(std::size_t k = next++; k < jobs.size(); k = next++)
            work(jobs[k], results[k]);
    };
    const auto n_threads = std::min<std::size_t>(static_cast<std::size_t>(config.jobs), jobs.size());
    if(n_threads <= 1)
        worker();
    else
    {
        std::vector<std::jthread> pool;
        for(std::size_t k = 0; k < n_threads; ++k)
            pool.emplace_back(worker);
    }

    StudyReport report;
    for(auto& r : results)
    {
        report.metrics.insert(report.metrics.end(), r.metrics.begin(), r.metrics.end());
        report.failures.insert(report.failures.end(), r.failures.begin(), r.failures.end());
    }
    auto scenario_rank = [](ScenarioId s) {
        return static_cast<int>(std::find(std::begin(all_scenarios), std::end(all_scenarios), s) -
                                std::begin(all_scenarios));
    };
    std::stable_sort(report.metrics.begin(), report.metrics.end(), [&](const auto& x, const auto& y) {
        return std::pair(x.month, scenario_rank(x.scenario)) < std::pair(y.month, scenario_rank(y.scenario));
    });
    std::stable_sort(report.failures.begin(), report.failures.end(), [&](const auto& x, const auto& y) {
        return std::pair(x.month, scenario_rank(x.scenario)) < std::pair(y.month, scenario_rank(y.scenario));
    });

    const ScenarioId base_id{ModelKind::ucm, ForecastKind::pf};
    for(const auto& spec : all_comparisons)
    {
        std::vector<ComparisonRow> table;
        for(MonthIndex m : months)
        {
            const auto* a = report.find(spec.a, m.ordinal);
            const auto* b = report.find(spec.b, m.ordinal);
            const auto* base = report.find(base_id, m.ordinal);
            if(!a || !b || !base)
                continue;
            auto rows = compare(*a, *b, *base, spec.id);
            table.insert(table.end(), rows.begin(), rows.end());
        }
        report.comparisons.push_back(std::move(table));
    }
    report.wall_seconds = elapsed_since(start);
    return report;
}

std::string emit_metrics_csv(const std::vector<MonthlyMetrics>& metrics)
{
    std::string out = "month,scenario,total_cost,cost_fixed,cost_startup,cost_variable,gen_nuclear_mwh,"
                      "gen_hydro_mwh,gen_coal_mwh,gen_gas_mwh,wall_seconds\n";
    for(const auto& m : metrics)
        out += fmt::format("{},{},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.3f}\n", m.month,
                           m.scenario.label(), m.total_cost, m.cost_fixed, m.cost_startup, m.cost_variable,
                           m.gen(Fuel::nuclear), m.gen(Fuel::hydro), m.gen(Fuel::coal), m.gen(Fuel::gas),
                           m.wall_seconds);
    return out;
}

std::string emit_comparison_csv(const std::vector<ComparisonRow>& rows)
{
    std::string out = "month,metric,value_a,value_b,base,pct_diff\n";
    for(const auto& r : rows)
        out += fmt::format("{},{},{:.6f},{:.6f},{:.6f},{}\n", r.month, r.metric, r.value_a, r.value_b, r.base,
                           r.pct_diff ? fmt::format("{:.6f}", *r.pct_diff) : std::string("NA"));
    return out;
}

std::string emit_runtime_csv(const std::vector<MonthlyMetrics>& metrics)
{
    std::map<ModelKind, std::pair<double, int>> acc;
    for(const auto& m : metrics)
    {
        acc[m.scenario.model].first += m.wall_seconds;
        acc[m.scenario.model].second += 1;
    }
    std::string out = "model,mean_wall_seconds,total_wall_seconds\n";
    for(auto [kind, name] : {std::pair{ModelKind::ucm, "UCM"}, std::pair{ModelKind::esom, "ESOM"}})
    {
        auto it = acc.find(kind);
        if(it == acc.end())
            continue;
        out += fmt::format("{},{:.3f},{:.3f}\n", name, it->second.first / it->second.second, it->second.first);
    }
    return out;
}

std::string emit_failures_csv(const std::vector<StudyFailure>& failures)
{
    std::string out = "scenario,month,kind,message\n";
    for(const auto& f : failures)
    {
        std::string msg = f.message;
        std::replace(msg.begin(), msg.end(), '\n', ' ');
        std::replace(msg.begin(), msg.end(), ',', ';');
        out += fmt::format("{},{},{},{}\n", f.scenario.label(), f.month, f.kind, msg);
    }
    return out;
}

namespace
{

void write_text(const std::filesystem::path& p, const std::string& text)
{
    std::ofstream out(p, std::ios::binary);
    if(!out)
        throw ValidationError("cannot write " + p.string());
    out << text;
}

} // namespace

void write_study(const StudyReport& report, const std::filesystem::path& out_dir)
{
    std::filesystem::create_directories(out_dir);
    write_text(out_dir / "metrics.csv", emit_metrics_csv(report.metrics));
    for(std::size_t k = 0; k < report.comparisons.size(); ++k)
        write_text(out_dir / fmt::format("{}.csv", all_comparisons[k].id), emit_comparison_csv(report.comparisons[k]));
    write_text(out_dir / "runtime.csv", emit_runtime_csv(report.metrics));
    bool any_windows = false;
    for(const auto& m : report.metrics)
        if(!m.windows.empty())
        {
            if(!any_windows)
                std::filesystem::create_directories(out_dir / "windows");
            any_windows = true;
            write_text(out_dir / "windows" / fmt::format("{}_m{:02}.csv", m.scenario.label(), m.month),
                       emit_window_stats(m.windows));
        }
    const auto manifest = out_dir / "failures.csv";
    if(!report.failures.empty())
        write_text(manifest, emit_failures_csv(report.failures));
    else
        std::filesystem::remove(manifest);
}

} // namespace seasonal
