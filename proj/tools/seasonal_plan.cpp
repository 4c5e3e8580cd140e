// Command-line front end: run, study, audit, forecast.

#include "seasonal/errors.hpp"
#include "seasonal/experiments.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace seasonal;

namespace
{

enum Exit
{
    ok = 0,
    validation = 2,
    infeasible = 3,
    solver = 4
};

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if(!in)
        throw ValidationError("cannot open " + path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_file(const fs::path& path, const std::string& text)
{
    if(path.has_parent_path())
        fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if(!out)
        throw ValidationError("cannot write " + path.string());
    out << text;
}

NetworkCase read_case(const std::string& path)
{
    NetworkCase c = load_case(path);
    auto bad = validate_case(c);
    if(!bad.empty())
    {
        for(const auto& v : bad)
            std::cerr << describe(v) << "\n";
        throw ValidationError(fmt::format("case {} has {} invariant violations", path, bad.size()));
    }
    return c;
}

DemandSeries read_demand(const std::string& path, const NetworkCase* c)
{
    DemandSeries d = load_demand(path, c);
    return c ? conform_to_case(d, *c) : d;
}

/// "1..12", "3", or "1,4,7".
std::vector<MonthIndex> parse_months(const std::string& text)
{
    std::vector<MonthIndex> out;
    auto dots = text.find("..");
    try
    {
        if(dots != std::string::npos)
        {
            int a = std::stoi(text.substr(0, dots));
            int b = std::stoi(text.substr(dots + 2));
            if(a > b)
                throw ValidationError("empty month range " + text);
            for(int m = a; m <= b; ++m)
                out.push_back({m});
        }
        else
        {
            std::stringstream s(text);
            std::string item;
            while(std::getline(s, item, ','))
                out.push_back({std::stoi(item)});
        }
    }
    catch(const std::logic_error&)
    {
        throw ValidationError("cannot read month list '" + text + "'");
    }
    for(MonthIndex m : out)
        if(m.ordinal < 1)
            throw ValidationError(fmt::format("month {} must be 1 or later", m.ordinal));
    return out;
}

struct SolverFlags
{
    double mip_gap = 1e-3;
    int threads = 1;
    int jobs = 1;
    bool chain_months = false;
    bool include_network = false;
    double reserve = 0.0;
    bool verbose = false;

    void attach(CLI::App* app, bool with_jobs)
    {
        app->add_option("--mip-gap", mip_gap, "Relative MIP gap for commitment solves")
            ->check(CLI::Range(0.0, 1.0));
        app->add_option("--threads", threads, "Solver threads (1 keeps runs reproducible)")
            ->check(CLI::PositiveNumber);
        if(with_jobs)
            app->add_option("--jobs", jobs, "Scenario-months solved concurrently")->check(CLI::PositiveNumber);
        app->add_flag("--chain-months", chain_months, "Carry commitment state across months");
        app->add_flag("--include-network", include_network, "DC network constraints in the dispatch LP");
        app->add_option("--reserve", reserve, "Spinning reserve as a fraction of demand")
            ->check(CLI::Range(0.0, 0.5));
        app->add_flag("--verbose", verbose, "Solver log to the console");
    }

    StudyConfig config() const
    {
        StudyConfig cfg;
        cfg.ucm.solver.mip_gap = mip_gap;
        cfg.ucm.solver.threads = threads;
        cfg.ucm.solver.verbose = verbose;
        if(reserve > 0)
            cfg.ucm.reserve_fraction = reserve;
        cfg.esom.solver = cfg.ucm.solver;
        cfg.esom.include_network = include_network;
        cfg.chain_months = chain_months;
        cfg.jobs = jobs;
        return cfg;
    }
};

int cmd_run(const std::string& case_path, const std::string& demand_path, const std::string& history_path,
            const std::string& model, const std::string& forecast, int month, const std::string& out,
            const SolverFlags& flags)
{
    NetworkCase c = read_case(case_path);
    DemandSeries observed = read_demand(demand_path, &c);
    DemandSeries history = read_demand(history_path, &c);
    StudyConfig cfg = flags.config();
    ScenarioId id{model == "ucm" ? ModelKind::ucm : ModelKind::esom,
                  forecast == "pf" ? ForecastKind::pf : ForecastKind::pfml};
    ClimatologyProfile clim = build_climatology(history, cfg.climatology_months);

    std::optional<InitialConditions> init;
    if(flags.chain_months && id.model == ModelKind::ucm)
        for(int m = 1; m < month; ++m)
        {
            ScenarioRun prior = solve_scenario(c, observed, clim, id, {m}, cfg, init);
            init = prior.ucm->final_state;
            std::cerr << fmt::format("chained month {} ({:.1f} s)\n", m, prior.metrics.wall_seconds);
        }
    ScenarioRun run = solve_scenario(c, observed, clim, id, {month}, cfg, init);
    const auto& m = run.metrics;
    std::cout << fmt::format("{} month {}: total_cost {:.2f} (fixed {:.2f}, startup {:.2f}, variable {:.2f}), "
                             "{:.2f} s\n",
                             id.label(), month, m.total_cost, m.cost_fixed, m.cost_startup, m.cost_variable,
                             m.wall_seconds);
    for(Fuel f : all_fuels)
        std::cout << fmt::format("  {:<8} {:.3f} MWh\n", to_string(f), m.gen(f));

    if(!out.empty())
    {
        fs::path dir(out);
        write_file(dir / "metrics.csv", emit_metrics_csv({m}));
        write_file(dir / "demand.csv", emit_demand(run.demand));
        if(run.ucm)
        {
            write_file(dir / "solution.csv", emit_commitment_archive(c, run.ucm->solution, run.init, 0));
            write_file(dir / "windows.csv", emit_window_stats(run.ucm->windows));
        }
        else
            write_file(dir / "solution.csv", emit_dispatch_archive(c, *run.esom));
        std::cout << "wrote " << dir.string() << "\n";
    }
    return ok;
}

int cmd_study(const std::string& case_path, const std::string& demand_path, const std::string& history_path,
              const std::string& months, const std::string& out, const SolverFlags& flags)
{
    NetworkCase c = read_case(case_path);
    DemandSeries observed = read_demand(demand_path, &c);
    DemandSeries history = read_demand(history_path, &c);
    StudyReport report = run_study(c, observed, history, parse_months(months), flags.config());
    write_study(report, out);
    std::cout << emit_runtime_csv(report.metrics);
    std::cout << fmt::format("{} scenario-months solved, {} failed, {:.1f} s; results in {}\n",
                             report.metrics.size(), report.failures.size(), report.wall_seconds, out);
    if(report.failures.empty())
        return ok;
    for(const auto& f : report.failures)
        std::cerr << f.scenario.label() << " month " << f.month << ": " << f.message << "\n";
    bool any_infeasible = false;
    for(const auto& f : report.failures)
        any_infeasible = any_infeasible || f.kind == "infeasible";
    return any_infeasible ? infeasible : solver;
}

int cmd_audit(const std::string& case_path, const std::string& demand_path, const std::string& solution_path)
{
    NetworkCase c = read_case(case_path);
    DemandSeries demand = read_demand(demand_path, &c);
    std::string text = read_file(solution_path);

    std::vector<Violation> found;
    if(text.find("[dispatch]") != std::string::npos)
    {
        DispatchSolution s = parse_dispatch_archive(text, c);
        found = audit_dispatch(c, demand.hours() > s.hours ? demand.slice(0, s.hours) : demand, s);
    }
    else
    {
        CommitmentArchive a = parse_commitment_archive(text, c);
        int first = demand.hours() >= a.first_hour + a.solution.hours ? a.first_hour : 0;
        UcmConfig cfg;
        cfg.include_network = a.solution.flow.rows() > 0;
        found = audit_solution(c, demand.slice(first, a.solution.hours), a.solution, a.init, cfg);
    }
    for(const auto& v : found)
        std::cout << describe(v) << "\n";
    std::cout << fmt::format("{} violations\n", found.size());
    return found.empty() ? ok : validation;
}

int cmd_forecast(const std::string& history_path, const std::string& demand_path, const std::string& case_path,
                 int month, const std::string& mode, const std::string& out)
{
    std::optional<NetworkCase> c;
    if(!case_path.empty())
        c = read_case(case_path);
    const NetworkCase* cp = c ? &*c : nullptr;
    DemandSeries observed = read_demand(demand_path, cp);
    DemandSeries forecast;
    if(mode == "pf")
        forecast = scenario_demand(observed, ForecastKind::pf, {month}, nullptr);
    else
    {
        DemandSeries history = read_demand(history_path, cp);
        ClimatologyProfile clim = build_climatology(history);
        forecast = scenario_demand(observed, ForecastKind::pfml, {month}, &clim);
    }
    write_file(out, emit_demand(forecast));
    std::cout << fmt::format("month {} {} forecast: {:.3f} MWh over {} hours -> {}\n", month, mode,
                             forecast.total(), forecast.hours(), out);
    return ok;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Seasonal generation planning: unit commitment and dispatch studies"};
    app.require_subcommand(1);

    std::string case_path, demand_path, history_path, solution_path, out, model = "ucm", forecast = "pf",
                months = "1..12", mode = "pfml";
    int month = 1;
    SolverFlags flags;

    auto* run = app.add_subcommand("run", "Solve one scenario for one month");
    run->add_option("--case", case_path)->required()->check(CLI::ExistingFile);
    run->add_option("--demand", demand_path)->required()->check(CLI::ExistingFile);
    run->add_option("--history", history_path)->required()->check(CLI::ExistingFile);
    run->add_option("--model", model)->check(CLI::IsMember({"ucm", "esom"}));
    run->add_option("--forecast", forecast)->check(CLI::IsMember({"pf", "pfml"}));
    run->add_option("--month", month)->required()->check(CLI::PositiveNumber);
    run->add_option("--out", out, "Directory for the solution archive and tables");
    flags.attach(run, false);

    auto* study = app.add_subcommand("study", "Four scenarios over several months with comparisons");
    study->add_option("--case", case_path)->required()->check(CLI::ExistingFile);
    study->add_option("--demand", demand_path)->required()->check(CLI::ExistingFile);
    study->add_option("--history", history_path)->required()->check(CLI::ExistingFile);
    study->add_option("--months", months, "e.g. 1..12 or 1,4,7");
    study->add_option("--out", out)->required();
    flags.attach(study, true);

    auto* audit = app.add_subcommand("audit", "Check a solution archive against every model constraint");
    audit->add_option("--case", case_path)->required()->check(CLI::ExistingFile);
    audit->add_option("--demand", demand_path)->required()->check(CLI::ExistingFile);
    audit->add_option("--solution", solution_path)->required()->check(CLI::ExistingFile);

    auto* fc = app.add_subcommand("forecast", "Write the demand a scenario would see");
    fc->add_option("--history", history_path)->check(CLI::ExistingFile);
    fc->add_option("--demand", demand_path)->required()->check(CLI::ExistingFile);
    fc->add_option("--case", case_path, "Needed when demand files carry system totals only")
        ->check(CLI::ExistingFile);
    fc->add_option("--month", month)->required()->check(CLI::PositiveNumber);
    fc->add_option("--mode", mode)->check(CLI::IsMember({"pf", "pfml"}));
    fc->add_option("--out", out)->required();

    try
    {
        app.parse(argc, argv);
    }
    catch(const CLI::ParseError& e)
    {
        int code = app.exit(e);
        return code == 0 ? ok : validation;
    }

    try
    {
        if(*run)
            return cmd_run(case_path, demand_path, history_path, model, forecast, month, out, flags);
        if(*study)
            return cmd_study(case_path, demand_path, history_path, months, out, flags);
        if(*audit)
            return cmd_audit(case_path, demand_path, solution_path);
        if(*fc)
        {
            if(mode == "pfml" && history_path.empty())
                throw ValidationError("--history is required for --mode pfml");
            return cmd_forecast(history_path, demand_path, case_path, month, mode, out);
        }
    }
    catch(const ParseError& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return validation;
    }
    catch(const ValidationError& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return validation;
    }
    catch(const InfeasibleError& e)
    {
        std::cerr << "infeasible: " << e.what() << "\n";
        return infeasible;
    }
    catch(const SolverError& e)
    {
        std::cerr << "solver error: " << e.what() << "\n";
        return solver;
    }
    catch(const std::exception& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return solver;
    }
    return ok;
}
