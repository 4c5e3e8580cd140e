#include "seasonal/esom.hpp"

#include "seasonal/errors.hpp"
#include "seasonal/ucm.hpp"
#include "text_util.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace seasonal
{

NetworkCase fold_fixed_costs(const NetworkCase& c)
{
    NetworkCase out = c;
    for(auto& u : out.units)
    {
        if(!(u.p_max > 0))
            throw ValidationError("unit " + u.id + ": cannot fold fixed cost with p_max <= 0");
        const double adder = u.fixed_cost / u.p_max;
        for(auto& b : u.blocks)
            b.marginal_cost += adder;
    }
    return out;
}

EsomModel build_esom(const NetworkCase& c, const DemandSeries& demand, const EsomConfig& config)
{
    if(!(config.on_epsilon > 0))
        throw ValidationError("on_epsilon must be positive");
    if(demand.hours() < 1)
        throw ValidationError("dispatch horizon must span at least one hour");
    for(BusId b : demand.buses())
        if(!c.bus_position(b))
            throw ValidationError(fmt::format("demand references bus {} absent from case", b.index));

    const NetworkCase priced = config.fold_fixed_costs ? fold_fixed_costs(c) : c;
    const std::size_t n_units = c.units.size();
    const auto T = static_cast<std::size_t>(demand.hours());
    const bool network = config.include_network && !c.lines.empty();

    EsomModel out;
    Model& m = out.model;
    EsomIndex& ix = out.index;
    ix.hours = demand.hours();
    ix.blocks.resize(n_units);

    auto output_terms = [&](std::size_t i, std::size_t t, double sign) {
        std::vector<Term> terms;
        for(std::size_t k = 0; k < ix.blocks[i].rows(); ++k)
            terms.push_back({ix.blocks[i](k, t), sign});
        return terms;
    };

    for(std::size_t i = 0; i < n_units; ++i)
    {
        const auto& blocks = priced.units[i].blocks;
        ix.blocks[i] = Grid<VariableHandle>(blocks.size(), T);
        for(std::size_t t = 0; t < T; ++t)
            for(std::size_t k = 0; k < blocks.size(); ++k)
                ix.blocks[i](k, t) = m.add_continuous(0.0, blocks[k].size_mw, blocks[k].marginal_cost);
    }

    for(std::size_t i = 0; i < n_units; ++i)
    {
        const auto& unit = c.units[i];
        if(config.include_ramps)
            for(std::size_t t = 1; t < T; ++t)
            {
                auto up = output_terms(i, t, 1.0);
                auto prev = output_terms(i, t - 1, -1.0);
                up.insert(up.end(), prev.begin(), prev.end());
                if(unit.ramp_up < unit.p_max)
                    m.add_constraint(up, Sense::less_equal, unit.ramp_up);
                if(unit.ramp_down < unit.p_max)
                    m.add_constraint(std::move(up), Sense::greater_equal, -unit.ramp_down);
            }
        if(unit.energy_budget)
        {
            std::vector<Term> row;
            for(std::size_t t = 0; t < T; ++t)
            {
                auto terms = output_terms(i, t, 1.0);
                row.insert(row.end(), terms.begin(), terms.end());
            }
            m.add_constraint(std::move(row), Sense::less_equal, *unit.energy_budget);
        }
    }

    const std::size_t n_buses = c.buses.size();
    if(network)
    {
        ix.angle = Grid<VariableHandle>(n_buses, T);
        ix.flow = Grid<VariableHandle>(c.lines.size(), T);
        for(std::size_t b = 0; b < n_buses; ++b)
            if(c.buses[b] != c.reference_bus)
                for(std::size_t t = 0; t < T; ++t)
                    ix.angle(b, t) = m.add_continuous(-std::numbers::pi, std::numbers::pi);
        for(std::size_t l = 0; l < c.lines.size(); ++l)
        {
            const auto& line = c.lines[l];
            auto from = *c.bus_position(line.from_bus);
            auto to = *c.bus_position(line.to_bus);
            const double coef = c.base_mva * line.susceptance;
            for(std::size_t t = 0; t < T; ++t)
            {
                ix.flow(l, t) = m.add_continuous(-line.capacity, line.capacity);
                std::vector<Term> row{{ix.flow(l, t), 1.0}};
                if(ix.angle(from, t).valid())
                    row.push_back({ix.angle(from, t), -coef});
                if(ix.angle(to, t).valid())
                    row.push_back({ix.angle(to, t), coef});
                m.add_constraint(std::move(row), Sense::equal, 0.0);
            }
        }
    }

    for(std::size_t t = 0; t < T; ++t)
    {
        const int hour = static_cast<int>(t);
        if(network)
        {
            std::vector<std::vector<Term>> rows(n_buses);
            for(std::size_t i = 0; i < n_units; ++i)
            {
                auto terms = output_terms(i, t, 1.0);
                auto& row = rows[*c.bus_position(c.units[i].bus)];
                row.insert(row.end(), terms.begin(), terms.end());
            }
            for(std::size_t l = 0; l < c.lines.size(); ++l)
            {
                rows[*c.bus_position(c.lines[l].from_bus)].push_back({ix.flow(l, t), -1.0});
                rows[*c.bus_position(c.lines[l].to_bus)].push_back({ix.flow(l, t), 1.0});
            }
            for(std::size_t b = 0; b < n_buses; ++b)
            {
                const double load = demand.at(c.buses[b], hour);
                if(rows[b].empty())
                {
                    if(load > 0)
                        throw InfeasibleError(fmt::format("bus {} has demand but no supply path",
                                                          c.buses[b].index),
                                              hour);
                    continue;
                }
                m.add_constraint(std::move(rows[b]), Sense::equal, load);
            }
        }
        else
        {
            std::vector<Term> row;
            for(std::size_t i = 0; i < n_units; ++i)
            {
                auto terms = output_terms(i, t, 1.0);
                row.insert(row.end(), terms.begin(), terms.end());
            }
            if(row.empty())
            {
                if(demand.system_total(hour) > 0)
                    throw InfeasibleError("demand with no generating units", hour);
                continue;
            }
            m.add_constraint(std::move(row), Sense::equal, demand.system_total(hour));
        }
    }
    return out;
}

void expost_costs(const NetworkCase& c, DispatchSolution& s, double on_epsilon)
{
    s.cost_variable_true = s.cost_fixed_expost = 0;
    for(std::size_t i = 0; i < c.units.size(); ++i)
    {
        int operating = 0;
        for(std::size_t t = 0; t < static_cast<std::size_t>(s.hours); ++t)
        {
            s.cost_variable_true += block_cost(c.units[i], s.g(i, t));
            if(s.g(i, t) > on_epsilon)
                ++operating;
        }
        s.cost_fixed_expost += c.units[i].fixed_cost * operating;
    }
    s.cost_total_reported = s.cost_variable_true + s.cost_fixed_expost;
}

DispatchSolution solve_esom(const NetworkCase& c, const DemandSeries& demand, const EsomConfig& config)
{
    const double capacity = c.total_capacity();
    for(int t = 0; t < demand.hours(); ++t)
        if(demand.system_total(t) > capacity + 1e-9)
            throw InfeasibleError(fmt::format("demand {:.3f} MW at hour {} exceeds total capacity {:.3f} MW",
                                              demand.system_total(t), t, capacity),
                                  t);

    EsomModel built = build_esom(c, demand, config);
    if(built.model.is_mip())
        throw SolverError("dispatch model unexpectedly contains integer variables");
    SolveResult r = solve(built.model, config.solver);
    if(r.status == SolveStatus::infeasible)
        throw InfeasibleError("dispatch model infeasible (ramp or energy limits cannot follow demand)");
    if(r.status == SolveStatus::unbounded)
        throw SolverError("dispatch model unbounded");

    const auto& ix = built.index;
    const auto T = static_cast<std::size_t>(ix.hours);
    DispatchSolution s;
    s.hours = ix.hours;
    s.g = Grid<double>(c.units.size(), T);
    for(std::size_t i = 0; i < c.units.size(); ++i)
        for(std::size_t t = 0; t < T; ++t)
        {
            double g = 0;
            for(std::size_t k = 0; k < ix.blocks[i].rows(); ++k)
                g += r.value(ix.blocks[i](k, t));
            s.g(i, t) = g;
        }
    if(!ix.flow.empty())
    {
        s.flow = Grid<double>(ix.flow.rows(), T);
        for(std::size_t l = 0; l < ix.flow.rows(); ++l)
            for(std::size_t t = 0; t < T; ++t)
                s.flow(l, t) = r.value(ix.flow(l, t));
    }
    s.lp_objective = r.objective;
    s.wall_seconds = r.wall_seconds;
    expost_costs(c, s, config.on_epsilon);
    return s;
}

std::vector<Violation> audit_dispatch(const NetworkCase& c, const DemandSeries& demand,
                                      const DispatchSolution& s, const EsomConfig& config, double tolerance)
{
    std::vector<Violation> out;
    if(s.g.rows() != c.units.size() || static_cast<int>(s.g.cols()) != s.hours || s.hours > demand.hours())
    {
        out.push_back({"solution", "shape", -1, 0.0, "dispatch does not match case units or demand horizon"});
        return out;
    }
    const auto T = static_cast<std::size_t>(s.hours);
    for(std::size_t i = 0; i < c.units.size(); ++i)
    {
        const auto& u = c.units[i];
        const std::string e = "unit " + u.id;
        double energy = 0;
        for(std::size_t t = 0; t < T; ++t)
        {
            const int h = static_cast<int>(t);
            const double g = s.g(i, t);
            energy += g;
            if(g < -tolerance)
                out.push_back({e, "g>=0", h, -g, ""});
            if(g > u.p_max + tolerance)
                out.push_back({e, "p_max", h, g - u.p_max, ""});
            if(config.include_ramps && t > 0)
            {
                const double step = g - s.g(i, t - 1);
                if(step > u.ramp_up + tolerance)
                    out.push_back({e, "ramp_up", h, step - u.ramp_up, ""});
                if(-step > u.ramp_down + tolerance)
                    out.push_back({e, "ramp_down", h, -step - u.ramp_down, ""});
            }
        }
        if(u.energy_budget && energy > *u.energy_budget + tolerance)
            out.push_back({e, "energy_budget", -1, energy - *u.energy_budget, ""});
    }
    for(std::size_t t = 0; t < T; ++t)
    {
        const int h = static_cast<int>(t);
        double supply = 0;
        for(std::size_t i = 0; i < c.units.size(); ++i)
            supply += s.g(i, t);
        const double gap = std::abs(supply - demand.system_total(h));
        if(gap > tolerance)
            out.push_back({"system", "balance", h, gap,
                           fmt::format("supply {} vs demand {}", supply, demand.system_total(h))});
    }
    DispatchSolution check = s;
    expost_costs(c, check, config.on_epsilon);
    const double scale = std::max(1.0, std::abs(check.cost_total_reported));
    if(std::abs(s.cost_total_reported - (s.cost_variable_true + s.cost_fixed_expost)) > 1e-6 * scale)
        out.push_back({"costs", "cost_decomposition", -1,
                       s.cost_total_reported - (s.cost_variable_true + s.cost_fixed_expost), ""});
    if(std::abs(check.cost_total_reported - s.cost_total_reported) > 1e-6 * scale)
        out.push_back({"costs", "cost_recomputation", -1, check.cost_total_reported - s.cost_total_reported,
                       fmt::format("recomputed {} vs reported {}", check.cost_total_reported,
                                   s.cost_total_reported)});
    return out;
}

std::string emit_dispatch_archive(const NetworkCase& c, const DispatchSolution& s)
{
    std::string out = fmt::format("[meta]\nhours,{}\n\n[dispatch]\nunit,hour,g_mw\n", s.hours);
    for(std::size_t i = 0; i < s.g.rows(); ++i)
        for(std::size_t t = 0; t < s.g.cols(); ++t)
            out += fmt::format("{},{},{}\n", c.units[i].id, t, s.g(i, t));
    out += "\n[costs]\nlp_objective,cost_variable_true,cost_fixed_expost,cost_total_reported\n";
    out += fmt::format("{},{},{},{}\n", s.lp_objective, s.cost_variable_true, s.cost_fixed_expost,
                       s.cost_total_reported);
    return out;
}

DispatchSolution parse_dispatch_archive(std::string_view text, const NetworkCase& c)
{
    using detail::parse_double;
    using detail::parse_int;
    using detail::split;
    using detail::trim;

    DispatchSolution s;
    std::string section;
    bool expect_header = false;
    std::istringstream in{std::string(text)};
    std::string raw;
    int line = 0;
    while(std::getline(in, raw))
    {
        ++line;
        std::string_view body = trim(raw);
        if(body.empty() || body.front() == '#')
            continue;
        if(body.front() == '[')
        {
            section = std::string(trim(body.substr(1, body.size() - 2)));
            expect_header = section != "meta";
            if(section == "dispatch")
            {
                if(s.hours < 1)
                    throw ParseError("archive [meta] must declare hours before [dispatch]", line);
                s.g = Grid<double>(c.units.size(), static_cast<std::size_t>(s.hours));
            }
            continue;
        }
        auto f = split(body, ',');
        if(expect_header)
        {
            std::string_view want;
            if(section == "dispatch")
                want = "unit,hour,g_mw";
            else if(section == "costs")
                want = "lp_objective,cost_variable_true,cost_fixed_expost,cost_total_reported";
            else
                throw ParseError(fmt::format("line {}: unknown archive section [{}]", line, section), line);
            if(body != want)
                throw ParseError(fmt::format("line {}: expected header '{}'", line, want), line);
            expect_header = false;
            continue;
        }
        if(section == "meta")
        {
            if(f.size() != 2)
                throw ParseError(fmt::format("line {}: meta record needs key,value", line), line);
            if(f[0] == "hours")
                s.hours = parse_int(f[1], line, "hours");
        }
        else if(section == "dispatch")
        {
            if(f.size() != 3)
                throw ParseError(fmt::format("line {}: dispatch record needs 3 fields", line), line);
            auto i = c.unit_position(f[0]);
            if(!i)
                throw ParseError(fmt::format("line {}: unknown unit '{}'", line, f[0]), line, "unit");
            int h = parse_int(f[1], line, "hour");
            if(h < 0 || h >= s.hours)
                throw ParseError(fmt::format("line {}: hour {} outside archive horizon", line, h), line, "hour");
            s.g(*i, static_cast<std::size_t>(h)) = parse_double(f[2], line, "g_mw");
        }
        else if(section == "costs")
        {
            if(f.size() != 4)
                throw ParseError(fmt::format("line {}: cost record needs 4 fields", line), line);
            s.lp_objective = parse_double(f[0], line, "lp_objective");
            s.cost_variable_true = parse_double(f[1], line, "cost_variable_true");
            s.cost_fixed_expost = parse_double(f[2], line, "cost_fixed_expost");
            s.cost_total_reported = parse_double(f[3], line, "cost_total_reported");
        }
        else
            throw ParseError(fmt::format("line {}: record outside a known section", line), line);
    }
    if(s.g.empty())
        throw ParseError("archive has no [dispatch] section", line);
    return s;
}

} // namespace seasonal
