#include "seasonal/ucm.hpp"

#include "seasonal/errors.hpp"
#include "seasonal/network.hpp"
#include "text_util.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

namespace seasonal
{

double startup_ramp(const GeneratorUnit& u)
{
    return std::max(u.p_min, u.ramp_up);
}

double shutdown_ramp(const GeneratorUnit& u)
{
    return std::max(u.p_min, u.ramp_down);
}

double block_cost(const GeneratorUnit& u, double mw)
{
    double cost = 0;
    double left = std::max(mw, 0.0);
    for(const auto& b : u.blocks)
    {
        double take = std::min(left, b.size_mw);
        cost += take * b.marginal_cost;
        left -= take;
        if(left <= 0)
            break;
    }
    if(left > 0 && !u.blocks.empty())
        cost += left * u.blocks.back().marginal_cost;
    return cost;
}

std::vector<Violation> check_initial_conditions(const NetworkCase& c, const InitialConditions& init)
{
    std::vector<Violation> out;
    if(init.size() != c.units.size())
    {
        out.push_back({"initial", "size", -1, 0.0,
                       fmt::format("{} states for {} units", init.size(), c.units.size())});
        return out;
    }
    for(std::size_t i = 0; i < init.size(); ++i)
    {
        const auto& s = init[i];
        const auto& u = c.units[i];
        std::string e = "unit " + u.id;
        if(s.ut0 < 0 || s.dt0 < 0)
            out.push_back({e, "initial_counts>=0", -1, 0.0, ""});
        if(s.on && (s.g0 < u.p_min - 1e-6 || s.g0 > u.p_max + 1e-6 || s.dt0 != 0))
            out.push_back({e, "initial_on_state", -1, 0.0,
                           fmt::format("on with g0 {} (p_min {}, p_max {}), dt0 {}", s.g0, u.p_min,
                                       u.p_max, s.dt0)});
        if(!s.on && (std::abs(s.g0) > 1e-6 || s.ut0 != 0))
            out.push_back({e, "initial_off_state", -1, 0.0,
                           fmt::format("off with g0 {}, ut0 {}", s.g0, s.ut0)});
    }
    return out;
}

namespace
{

bool network_mode(const NetworkCase& c, const UcmConfig& config)
{
    return config.include_network && !c.lines.empty();
}

/// Hours at the start of the horizon whose status is pinned by the
/// remaining minimum up/down time in `s`.
int pinned_hours(const GeneratorUnit& u, const UnitState& s)
{
    if(s.on)
        return std::max(0, u.min_up - s.ut0);
    return std::max(0, u.min_down - s.dt0);
}

double flow_coefficient(const NetworkCase& c, const TransmissionLine& l)
{
    return c.base_mva * l.susceptance;
}

void check_window(const NetworkCase& c, const DemandSeries& demand, int hours,
                  const InitialConditions& init, const UcmConfig& config)
{
    if(hours < 1)
        throw ValidationError("commitment window must span at least one hour");
    if(hours > demand.hours())
        throw ValidationError(fmt::format("window of {} hours exceeds demand horizon of {} hours", hours,
                                          demand.hours()));
    for(BusId b : demand.buses())
        if(!c.bus_position(b))
            throw ValidationError(fmt::format("demand references bus {} absent from case", b.index));
    auto bad = check_initial_conditions(c, init);
    if(!bad.empty())
        throw ValidationError("initial conditions inconsistent with case: " + describe(bad.front()));
    if(config.reserve_fraction && (*config.reserve_fraction < 0 || *config.reserve_fraction > 0.5))
        throw ValidationError("reserve_fraction must lie in [0, 0.5]");
    if(config.shed_penalty)
    {
        double top = 0;
        for(const auto& u : c.units)
            for(const auto& b : u.blocks)
                top = std::max(top, b.marginal_cost);
        if(!(*config.shed_penalty > top))
            throw ValidationError(fmt::format("shed_penalty {} must exceed the largest block cost {}",
                                              *config.shed_penalty, top));
    }
    for(const auto& [id, cap] : config.window_energy_caps)
        if(!c.unit_position(id))
            throw ValidationError("energy cap for unknown unit '" + id + "'");
}

} // namespace

namespace
{

/// Line limits written through PTDF rows for selected (line, hour) pairs
/// instead of explicit angle and flow variables.
struct LineLimitSet
{
    const DcNetwork* network = nullptr;
    std::set<std::pair<std::size_t, std::size_t>> active; // (line, hour)
};

UcmModel assemble_ucm(const NetworkCase& c, const DemandSeries& demand, int hours, const InitialConditions& init,
                      const UcmConfig& config, const LineLimitSet* limits)
{
    check_window(c, demand, hours, init, config);
    const std::size_t n_units = c.units.size();
    const std::size_t T = static_cast<std::size_t>(hours);
    const bool network = network_mode(c, config);
    const bool explicit_network = network && !limits;

    UcmModel out;
    Model& m = out.model;
    UcmIndex& ix = out.index;
    ix.hours = hours;
    ix.u = ix.v = ix.w = ix.g = Grid<VariableHandle>(n_units, T);
    ix.blocks.resize(n_units);

    for(std::size_t i = 0; i < n_units; ++i)
    {
        const auto& unit = c.units[i];
        const auto& s0 = init[i];
        const int pinned = pinned_hours(unit, s0);
        ix.blocks[i] = Grid<VariableHandle>(unit.blocks.size(), T);
        for(std::size_t t = 0; t < T; ++t)
        {
            ix.u(i, t) = m.add_binary(unit.fixed_cost);
            ix.v(i, t) = m.add_binary(unit.startup_cost);
            ix.w(i, t) = m.add_binary(0.0);
            ix.g(i, t) = m.add_continuous(0.0, unit.p_max);
            if(static_cast<int>(t) < pinned)
            {
                double fixed = s0.on ? 1.0 : 0.0;
                m.set_bounds(ix.u(i, t), fixed, fixed);
            }
            std::vector<Term> sum{{ix.g(i, t), 1.0}};
            for(std::size_t k = 0; k < unit.blocks.size(); ++k)
            {
                ix.blocks[i](k, t) = m.add_continuous(0.0, unit.blocks[k].size_mw,
                                                      unit.blocks[k].marginal_cost);
                sum.push_back({ix.blocks[i](k, t), -1.0});
            }
            m.add_constraint(std::move(sum), Sense::equal, 0.0);
        }
    }

    for(std::size_t i = 0; i < n_units; ++i)
    {
        const auto& unit = c.units[i];
        const auto& s0 = init[i];
        const double su = startup_ramp(unit);
        const double sd = shutdown_ramp(unit);
        const double u_prev0 = s0.on ? 1.0 : 0.0;
        for(std::size_t t = 0; t < T; ++t)
        {
            auto u = ix.u(i, t), v = ix.v(i, t), w = ix.w(i, t), g = ix.g(i, t);
            m.add_constraint({{g, 1.0}, {u, -unit.p_min}}, Sense::greater_equal, 0.0);
            m.add_constraint({{g, 1.0}, {u, -unit.p_max}}, Sense::less_equal, 0.0);
            m.add_constraint({{v, 1.0}, {w, 1.0}}, Sense::less_equal, 1.0);
            if(t == 0)
            {
                m.add_constraint({{u, 1.0}, {v, -1.0}, {w, 1.0}}, Sense::equal, u_prev0);
                m.add_constraint({{g, 1.0}, {v, -su}}, Sense::less_equal, s0.g0 + unit.ramp_up * u_prev0);
                m.add_constraint({{g, -1.0}, {u, -unit.ramp_down}, {w, -sd}}, Sense::less_equal, -s0.g0);
            }
            else
            {
                auto u_prev = ix.u(i, t - 1), g_prev = ix.g(i, t - 1);
                m.add_constraint({{u, 1.0}, {u_prev, -1.0}, {v, -1.0}, {w, 1.0}}, Sense::equal, 0.0);
                m.add_constraint({{g, 1.0}, {g_prev, -1.0}, {u_prev, -unit.ramp_up}, {v, -su}},
                                 Sense::less_equal, 0.0);
                m.add_constraint({{g_prev, 1.0}, {g, -1.0}, {u, -unit.ramp_down}, {w, -sd}},
                                 Sense::less_equal, 0.0);
            }
            if(unit.min_up > 1)
            {
                std::vector<Term> row{{u, -1.0}};
                std::size_t first = t + 1 >= static_cast<std::size_t>(unit.min_up) ? t + 1 - unit.min_up : 0;
                for(std::size_t tau = first; tau <= t; ++tau)
                    row.push_back({ix.v(i, tau), 1.0});
                m.add_constraint(std::move(row), Sense::less_equal, 0.0);
            }
            if(unit.min_down > 1)
            {
                std::vector<Term> row{{u, 1.0}};
                std::size_t first =
                    t + 1 >= static_cast<std::size_t>(unit.min_down) ? t + 1 - unit.min_down : 0;
                for(std::size_t tau = first; tau <= t; ++tau)
                    row.push_back({ix.w(i, tau), 1.0});
                m.add_constraint(std::move(row), Sense::less_equal, 1.0);
            }
        }
        if(auto it = config.window_energy_caps.find(unit.id); it != config.window_energy_caps.end())
        {
            std::vector<Term> row;
            for(std::size_t t = 0; t < T; ++t)
                row.push_back({ix.g(i, t), 1.0});
            m.add_constraint(std::move(row), Sense::less_equal, it->second);
        }
    }

    const std::size_t n_buses = c.buses.size();
    if(explicit_network)
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
            const double coef = flow_coefficient(c, line);
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

    const std::size_t balance_rows = network ? n_buses : 1;
    if(config.shed_penalty)
    {
        ix.shed = Grid<VariableHandle>(balance_rows, T);
        for(std::size_t b = 0; b < balance_rows; ++b)
            for(std::size_t t = 0; t < T; ++t)
                ix.shed(b, t) = m.add_continuous(0.0, infinity, *config.shed_penalty);
    }

    for(std::size_t t = 0; t < T; ++t)
    {
        const int hour = static_cast<int>(t);
        if(explicit_network)
        {
            std::vector<std::vector<Term>> rows(n_buses);
            for(std::size_t i = 0; i < n_units; ++i)
                rows[*c.bus_position(c.units[i].bus)].push_back({ix.g(i, t), 1.0});
            for(std::size_t l = 0; l < c.lines.size(); ++l)
            {
                rows[*c.bus_position(c.lines[l].from_bus)].push_back({ix.flow(l, t), -1.0});
                rows[*c.bus_position(c.lines[l].to_bus)].push_back({ix.flow(l, t), 1.0});
            }
            for(std::size_t b = 0; b < n_buses; ++b)
            {
                if(!ix.shed.empty())
                    rows[b].push_back({ix.shed(b, t), 1.0});
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
                row.push_back({ix.g(i, t), 1.0});
            for(std::size_t b = 0; b < ix.shed.rows(); ++b)
                row.push_back({ix.shed(b, t), 1.0});
            m.add_constraint(std::move(row), Sense::equal, demand.system_total(hour));
        }
        if(config.reserve_fraction && *config.reserve_fraction > 0)
        {
            std::vector<Term> row;
            for(std::size_t i = 0; i < n_units; ++i)
            {
                row.push_back({ix.u(i, t), c.units[i].p_max});
                row.push_back({ix.g(i, t), -1.0});
            }
            m.add_constraint(std::move(row), Sense::greater_equal,
                             *config.reserve_fraction * demand.system_total(hour));
        }
    }

    if(limits)
    {
        const auto& ptdf = limits->network->ptdf();
        for(auto [l, t] : limits->active)
        {
            if(t >= T)
                continue;
            const int hour = static_cast<int>(t);
            std::vector<Term> row;
            for(std::size_t i = 0; i < n_units; ++i)
            {
                double k = ptdf(l, *c.bus_position(c.units[i].bus));
                if(std::abs(k) > 1e-12)
                    row.push_back({ix.g(i, t), k});
            }
            double load_flow = 0;
            for(std::size_t b = 0; b < n_buses; ++b)
            {
                load_flow += ptdf(l, b) * demand.at(c.buses[b], hour);
                if(!ix.shed.empty() && std::abs(ptdf(l, b)) > 1e-12)
                    row.push_back({ix.shed(b, t), ptdf(l, b)});
            }
            if(row.empty())
                continue;
            const double cap = c.lines[l].capacity;
            m.add_constraint(row, Sense::less_equal, cap + load_flow);
            m.add_constraint(std::move(row), Sense::greater_equal, -cap + load_flow);
        }
    }
    return out;
}

} // namespace

UcmModel build_ucm(const NetworkCase& c, const DemandSeries& demand, int hours,
                   const InitialConditions& init, const UcmConfig& config)
{
    return assemble_ucm(c, demand, hours, init, config, nullptr);
}

void recompute_costs(const NetworkCase& c, CommitmentSolution& s)
{
    s.cost_fixed = s.cost_startup = s.cost_variable = 0;
    for(std::size_t i = 0; i < c.units.size(); ++i)
        for(std::size_t t = 0; t < static_cast<std::size_t>(s.hours); ++t)
        {
            s.cost_fixed += c.units[i].fixed_cost * s.u(i, t);
            s.cost_startup += c.units[i].startup_cost * s.v(i, t);
            s.cost_variable += block_cost(c.units[i], s.g(i, t));
        }
    s.cost_total = s.cost_fixed + s.cost_startup + s.cost_variable;
}

namespace
{

/// First hour whose demand cannot be met even with every unit at p_max.
std::optional<int> capacity_shortfall_hour(const NetworkCase& c, const DemandSeries& demand, int hours)
{
    const double capacity = c.total_capacity();
    for(int t = 0; t < hours; ++t)
        if(demand.system_total(t) > capacity + 1e-9)
            return t;
    return std::nullopt;
}

/// Solves the relaxation with shedding enabled and returns the first hour
/// that sheds load, if any.
std::optional<int> diagnose_infeasible_hour(const NetworkCase& c, const DemandSeries& demand, int hours,
                                            const InitialConditions& init, UcmConfig config)
{
    double top = 0;
    for(const auto& u : c.units)
        for(const auto& b : u.blocks)
            top = std::max(top, b.marginal_cost);
    config.shed_penalty = 1e3 * (top + 1.0);
    UcmModel built = build_ucm(c, demand, hours, init, config);
    SolveResult r;
    try
    {
        r = solve(relax_integrality(built.model), config.solver);
    }
    catch(const SolverError&)
    {
        return std::nullopt;
    }
    if(!r.has_solution())
        return std::nullopt;
    for(std::size_t t = 0; t < static_cast<std::size_t>(hours); ++t)
        for(std::size_t b = 0; b < built.index.shed.rows(); ++b)
            if(r.value(built.index.shed(b, t)) > 1e-6)
                return static_cast<int>(t);
    return std::nullopt;
}

} // namespace

namespace
{

CommitmentSolution extract_solution(const NetworkCase& c, const UcmIndex& ix, const SolveResult& r)
{
    const std::size_t T = static_cast<std::size_t>(ix.hours);
    CommitmentSolution s;
    s.hours = ix.hours;
    s.g = Grid<double>(c.units.size(), T);
    s.u = s.v = s.w = Grid<std::uint8_t>(c.units.size(), T);
    for(std::size_t i = 0; i < c.units.size(); ++i)
        for(std::size_t t = 0; t < T; ++t)
        {
            s.u(i, t) = static_cast<std::uint8_t>(std::lround(r.value(ix.u(i, t))));
            s.v(i, t) = static_cast<std::uint8_t>(std::lround(r.value(ix.v(i, t))));
            s.w(i, t) = static_cast<std::uint8_t>(std::lround(r.value(ix.w(i, t))));
            s.g(i, t) = r.value(ix.g(i, t));
        }
    if(!ix.flow.empty())
    {
        s.flow = Grid<double>(ix.flow.rows(), T);
        s.angle = Grid<double>(ix.angle.rows(), T, 0.0);
        for(std::size_t l = 0; l < ix.flow.rows(); ++l)
            for(std::size_t t = 0; t < T; ++t)
                s.flow(l, t) = r.value(ix.flow(l, t));
        for(std::size_t b = 0; b < ix.angle.rows(); ++b)
            for(std::size_t t = 0; t < T; ++t)
                if(ix.angle(b, t).valid())
                    s.angle(b, t) = r.value(ix.angle(b, t));
    }
    if(!ix.shed.empty())
    {
        s.shed = Grid<double>(ix.shed.rows(), T);
        for(std::size_t b = 0; b < ix.shed.rows(); ++b)
            for(std::size_t t = 0; t < T; ++t)
                s.shed(b, t) = r.value(ix.shed(b, t));
    }
    s.objective = r.objective;
    s.mip_gap = r.mip_gap;
    return s;
}

/// Fills flows and angles from the nodal injections of `s` and returns the
/// (line, hour) pairs loaded beyond capacity.
std::vector<std::pair<std::size_t, std::size_t>> derive_flows(const NetworkCase& c, const DcNetwork& net,
                                                              const DemandSeries& demand, CommitmentSolution& s)
{
    const std::size_t n_buses = c.buses.size();
    const auto T = static_cast<std::size_t>(s.hours);
    s.flow = Grid<double>(c.lines.size(), T);
    s.angle = Grid<double>(n_buses, T, 0.0);
    std::vector<std::pair<std::size_t, std::size_t>> overloaded;
    std::vector<double> injection(n_buses);
    for(std::size_t t = 0; t < T; ++t)
    {
        const int hour = static_cast<int>(t);
        for(std::size_t b = 0; b < n_buses; ++b)
            injection[b] = -demand.at(c.buses[b], hour) + (s.shed.empty() ? 0.0 : s.shed(b, t));
        for(std::size_t i = 0; i < c.units.size(); ++i)
            injection[*c.bus_position(c.units[i].bus)] += s.g(i, t);
        auto theta = net.angles(injection);
        auto flow = net.flows(injection);
        for(std::size_t b = 0; b < n_buses; ++b)
            s.angle(b, t) = theta[b];
        for(std::size_t l = 0; l < flow.size(); ++l)
        {
            s.flow(l, t) = flow[l];
            if(std::abs(flow[l]) > c.lines[l].capacity + 1e-7)
                overloaded.emplace_back(l, t);
        }
    }
    return overloaded;
}

} // namespace

CommitmentSolution solve_ucm(const NetworkCase& c, const DemandSeries& demand, int hours,
                             const InitialConditions& init, const UcmConfig& config)
{
    if(!config.shed_penalty)
        if(auto hour = capacity_shortfall_hour(c, demand, std::min(hours, demand.hours())))
            throw InfeasibleError(fmt::format("demand {:.3f} MW at hour {} exceeds total capacity {:.3f} MW",
                                              demand.system_total(*hour), *hour, c.total_capacity()),
                                  *hour);

    const bool lazy = network_mode(c, config) && config.lazy_line_limits;
    std::optional<DcNetwork> net;
    LineLimitSet limits;
    if(lazy)
    {
        net.emplace(c);
        limits.network = &*net;
    }

    double wall = 0;
    while(true)
    {
        UcmModel built = assemble_ucm(c, demand, hours, init, config, lazy ? &limits : nullptr);
        SolveResult r = solve(built.model, config.solver);
        wall += r.wall_seconds;
        if(r.status == SolveStatus::infeasible)
        {
            std::optional<int> hour;
            if(!config.shed_penalty)
                hour = diagnose_infeasible_hour(c, demand, hours, init, config);
            throw InfeasibleError(hour ? fmt::format("commitment model infeasible; load cannot be served at hour {}",
                                                     *hour)
                                       : std::string("commitment model infeasible"),
                                  hour.value_or(-1));
        }
        if(r.status == SolveStatus::unbounded)
            throw SolverError("commitment model unbounded");

        CommitmentSolution s = extract_solution(c, built.index, r);
        if(lazy)
        {
            auto overloaded = derive_flows(c, *net, demand, s);
            if(!overloaded.empty())
            {
                std::size_t before = limits.active.size();
                limits.active.insert(overloaded.begin(), overloaded.end());
                if(limits.active.size() == before)
                    throw SolverError("line limits already enforced are still violated");
                continue;
            }
        }
        s.wall_seconds = wall;
        recompute_costs(c, s);
        return s;
    }
}

std::vector<Violation> audit_solution(const NetworkCase& c, const DemandSeries& demand,
                                      const CommitmentSolution& s, const InitialConditions& init,
                                      const UcmConfig& config, double tolerance)
{
    std::vector<Violation> out;
    auto flag = [&out](std::string entity, std::string rule, int hour, double amount,
                       std::string message = {}) {
        out.push_back({std::move(entity), std::move(rule), hour, amount, std::move(message)});
    };

    const std::size_t n_units = c.units.size();
    const std::size_t T = static_cast<std::size_t>(s.hours);
    if(s.g.rows() != n_units || s.g.cols() != T || s.u.rows() != n_units || s.u.cols() != T ||
       s.v.cols() != T || s.w.cols() != T || demand.hours() < s.hours)
    {
        flag("solution", "dimensions", -1, 0.0, "solution does not match case units or demand horizon");
        return out;
    }
    for(const auto& v : check_initial_conditions(c, init))
        out.push_back(v);
    if(!out.empty())
        return out;

    for(std::size_t i = 0; i < n_units; ++i)
    {
        const auto& unit = c.units[i];
        const auto& s0 = init[i];
        const std::string e = "unit " + unit.id;
        const double su = startup_ramp(unit);
        const double sd = shutdown_ramp(unit);
        const int pinned = pinned_hours(unit, s0);
        double energy = 0;
        for(std::size_t t = 0; t < T; ++t)
        {
            const int h = static_cast<int>(t);
            const int u = s.u(i, t), v = s.v(i, t), w = s.w(i, t);
            const double g = s.g(i, t);
            energy += g;
            const int u_prev = t == 0 ? (s0.on ? 1 : 0) : s.u(i, t - 1);
            const double g_prev = t == 0 ? s0.g0 : s.g(i, t - 1);
            if(u > 1 || v > 1 || w > 1)
                flag(e, "binary", h, 0.0, "status outside {0,1}");
            if(u - u_prev != v - w)
                flag(e, "state_transition", h, 0.0,
                     fmt::format("u {} -> {} with v {} w {}", u_prev, u, v, w));
            if(v + w > 1)
                flag(e, "start_and_stop", h, 0.0);
            if(g < unit.p_min * u - tolerance)
                flag(e, "p_min", h, unit.p_min * u - g);
            if(g > unit.p_max * u + tolerance)
                flag(e, "p_max", h, g - unit.p_max * u);
            if(g - g_prev > unit.ramp_up * u_prev + su * v + tolerance)
                flag(e, "ramp_up", h, g - g_prev - unit.ramp_up * u_prev - su * v);
            if(g_prev - g > unit.ramp_down * u + sd * w + tolerance)
                flag(e, "ramp_down", h, g_prev - g - unit.ramp_down * u - sd * w);
            if(h < pinned && u != (s0.on ? 1 : 0))
                flag(e, s0.on ? "min_up_carryover" : "min_down_carryover", h, 0.0);
            int starts = 0, stops = 0;
            for(std::size_t tau = t + 1 >= static_cast<std::size_t>(unit.min_up) ? t + 1 - unit.min_up : 0;
                tau <= t; ++tau)
                starts += s.v(i, tau);
            for(std::size_t tau = t + 1 >= static_cast<std::size_t>(unit.min_down) ? t + 1 - unit.min_down : 0;
                tau <= t; ++tau)
                stops += s.w(i, tau);
            if(starts > u)
                flag(e, "min_up", h, 0.0);
            if(stops > 1 - u)
                flag(e, "min_down", h, 0.0);
        }
        if(auto it = config.window_energy_caps.find(unit.id); it != config.window_energy_caps.end())
            if(energy > it->second + tolerance)
                flag(e, "energy_cap", -1, energy - it->second);
    }

    const bool network = !c.lines.empty() && s.flow.rows() == c.lines.size() && s.flow.cols() == T;
    const bool has_angles = network && s.angle.rows() == c.buses.size() && s.angle.cols() == T;
    const bool has_shed = !s.shed.empty() && s.shed.cols() == T;
    for(std::size_t t = 0; t < T; ++t)
    {
        const int h = static_cast<int>(t);
        if(network)
        {
            std::vector<double> net(c.buses.size(), 0.0);
            for(std::size_t i = 0; i < n_units; ++i)
                net[*c.bus_position(c.units[i].bus)] += s.g(i, t);
            for(std::size_t l = 0; l < c.lines.size(); ++l)
            {
                const auto& line = c.lines[l];
                const double f = s.flow(l, t);
                const auto from = *c.bus_position(line.from_bus);
                const auto to = *c.bus_position(line.to_bus);
                net[from] -= f;
                net[to] += f;
                if(std::abs(f) > line.capacity + tolerance)
                    flag("line " + line.id, "flow_limit", h, std::abs(f) - line.capacity);
                if(has_angles)
                {
                    const double dc = flow_coefficient(c, line) * (s.angle(from, t) - s.angle(to, t));
                    if(std::abs(dc - f) > tolerance)
                        flag("line " + line.id, "dc_flow", h, std::abs(dc - f));
                }
            }
            if(has_angles)
            {
                auto ref = *c.bus_position(c.reference_bus);
                if(std::abs(s.angle(ref, t)) > 1e-12)
                    flag(fmt::format("bus {}", c.reference_bus.index), "reference_angle", h,
                         s.angle(ref, t));
            }
            for(std::size_t b = 0; b < c.buses.size(); ++b)
            {
                double served = net[b] + (has_shed && s.shed.rows() == c.buses.size() ? s.shed(b, t) : 0.0);
                double gap = served - demand.at(c.buses[b], h);
                if(std::abs(gap) > tolerance)
                    flag(fmt::format("bus {}", c.buses[b].index), "nodal_balance", h, gap);
            }
        }
        else
        {
            double supply = has_shed ? s.shed(0, t) : 0.0;
            for(std::size_t i = 0; i < n_units; ++i)
                supply += s.g(i, t);
            double gap = supply - demand.system_total(h);
            if(std::abs(gap) > tolerance)
                flag("system", "balance", h, gap);
        }
        if(config.reserve_fraction && *config.reserve_fraction > 0)
        {
            double headroom = 0;
            for(std::size_t i = 0; i < n_units; ++i)
                headroom += c.units[i].p_max * s.u(i, t) - s.g(i, t);
            double need = *config.reserve_fraction * demand.system_total(h);
            if(headroom < need - tolerance)
                flag("system", "spinning_reserve", h, need - headroom);
        }
    }

    CommitmentSolution check = s;
    recompute_costs(c, check);
    const double scale = std::max(1.0, std::abs(check.cost_total));
    if(std::abs(s.cost_total - (s.cost_fixed + s.cost_startup + s.cost_variable)) > 1e-6 * scale)
        flag("solution", "cost_decomposition", -1, s.cost_total - (s.cost_fixed + s.cost_startup + s.cost_variable));
    if(std::abs(check.cost_total - s.cost_total) > 1e-6 * scale)
        flag("solution", "cost_recomputation", -1, s.cost_total - check.cost_total,
             fmt::format("reported {:.6f}, recomputed {:.6f}", s.cost_total, check.cost_total));
    return out;
}

std::string emit_commitment_archive(const NetworkCase& c, const CommitmentSolution& s,
                                    const InitialConditions& init, int first_hour)
{
    std::string out;
    out += "[meta]\n";
    out += fmt::format("first_hour,{}\nhours,{}\n", first_hour, s.hours);
    out += "\n[initial]\nunit,g0,u0,ut0,dt0\n";
    for(std::size_t i = 0; i < init.size() && i < c.units.size(); ++i)
        out += fmt::format("{},{},{},{},{}\n", c.units[i].id, init[i].g0, init[i].on ? 1 : 0, init[i].ut0,
                           init[i].dt0);
    out += "\n[commitment]\nunit,hour,u,v,w,g_mw\n";
    for(std::size_t i = 0; i < s.g.rows(); ++i)
        for(std::size_t t = 0; t < s.g.cols(); ++t)
            out += fmt::format("{},{},{},{},{},{}\n", c.units[i].id, t, s.u(i, t), s.v(i, t), s.w(i, t),
                               s.g(i, t));
    if(!s.flow.empty())
    {
        out += "\n[flows]\nline,hour,flow_mw\n";
        for(std::size_t l = 0; l < s.flow.rows(); ++l)
            for(std::size_t t = 0; t < s.flow.cols(); ++t)
                out += fmt::format("{},{},{}\n", c.lines[l].id, t, s.flow(l, t));
    }
    if(!s.angle.empty())
    {
        out += "\n[angles]\nbus,hour,angle_rad\n";
        for(std::size_t b = 0; b < s.angle.rows(); ++b)
            for(std::size_t t = 0; t < s.angle.cols(); ++t)
                out += fmt::format("{},{},{}\n", c.buses[b].index, t, s.angle(b, t));
    }
    if(!s.shed.empty())
    {
        out += "\n[shed]\nbus,hour,shed_mw\n";
        for(std::size_t b = 0; b < s.shed.rows(); ++b)
            for(std::size_t t = 0; t < s.shed.cols(); ++t)
                out += fmt::format("{},{},{}\n", s.shed.rows() == c.buses.size() ? c.buses[b].index : 0, t,
                                   s.shed(b, t));
    }
    out += "\n[costs]\ncost_fixed,cost_startup,cost_variable,cost_total\n";
    out += fmt::format("{},{},{},{}\n", s.cost_fixed, s.cost_startup, s.cost_variable, s.cost_total);
    return out;
}

CommitmentArchive parse_commitment_archive(std::string_view text, const NetworkCase& c)
{
    using detail::parse_double;
    using detail::parse_int;
    using detail::split;
    using detail::trim;

    CommitmentArchive a;
    a.init = cold_start(c);
    std::string section;
    bool expect_header = false;
    int hours = -1;
    std::istringstream in{std::string(text)};
    std::string raw;
    int line = 0;
    bool sized = false;
    CommitmentSolution& s = a.solution;

    auto ensure_sized = [&]() {
        if(sized)
            return;
        if(hours < 1)
            throw ParseError("archive [meta] must declare hours before data sections", line);
        const auto T = static_cast<std::size_t>(hours);
        s.hours = hours;
        s.g = Grid<double>(c.units.size(), T);
        s.u = s.v = s.w = Grid<std::uint8_t>(c.units.size(), T);
        sized = true;
    };
    auto hour_of = [&](std::string_view f) {
        int h = parse_int(f, line, "hour");
        if(h < 0 || h >= hours)
            throw ParseError(fmt::format("line {}: hour {} outside archive horizon", line, h), line, "hour");
        return static_cast<std::size_t>(h);
    };
    auto unit_of = [&](std::string_view f) {
        auto pos = c.unit_position(f);
        if(!pos)
            throw ParseError(fmt::format("line {}: unknown unit '{}'", line, f), line, "unit");
        return *pos;
    };
    auto bus_of = [&](std::string_view f) {
        auto pos = c.bus_position({parse_int(f, line, "bus")});
        if(!pos)
            throw ParseError(fmt::format("line {}: unknown bus '{}'", line, f), line, "bus");
        return *pos;
    };

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
            if(section == "flows")
            {
                ensure_sized();
                s.flow = Grid<double>(c.lines.size(), static_cast<std::size_t>(hours));
            }
            else if(section == "angles")
            {
                ensure_sized();
                s.angle = Grid<double>(c.buses.size(), static_cast<std::size_t>(hours));
                a.has_angles = true;
            }
            else if(section == "shed")
                ensure_sized();
            continue;
        }
        auto f = split(body, ',');
        if(expect_header)
        {
            static const std::map<std::string, std::string> headers = {
                {"initial", "unit,g0,u0,ut0,dt0"},       {"commitment", "unit,hour,u,v,w,g_mw"},
                {"flows", "line,hour,flow_mw"},           {"angles", "bus,hour,angle_rad"},
                {"shed", "bus,hour,shed_mw"},
                {"costs", "cost_fixed,cost_startup,cost_variable,cost_total"}};
            auto it = headers.find(section);
            if(it == headers.end())
                throw ParseError(fmt::format("line {}: unknown archive section [{}]", line, section), line);
            if(body != it->second)
                throw ParseError(fmt::format("line {}: expected header '{}'", line, it->second), line);
            expect_header = false;
            continue;
        }
        if(section == "meta")
        {
            if(f.size() != 2)
                throw ParseError(fmt::format("line {}: meta record needs key,value", line), line);
            if(f[0] == "first_hour")
                a.first_hour = parse_int(f[1], line, "first_hour");
            else if(f[0] == "hours")
                hours = parse_int(f[1], line, "hours");
        }
        else if(section == "initial")
        {
            if(f.size() != 5)
                throw ParseError(fmt::format("line {}: initial record needs 5 fields", line), line);
            auto i = unit_of(f[0]);
            a.init[i] = {parse_double(f[1], line, "g0"), parse_int(f[2], line, "u0") == 1,
                         parse_int(f[3], line, "ut0"), parse_int(f[4], line, "dt0")};
        }
        else if(section == "commitment")
        {
            ensure_sized();
            if(f.size() != 6)
                throw ParseError(fmt::format("line {}: commitment record needs 6 fields", line), line);
            auto i = unit_of(f[0]);
            auto t = hour_of(f[1]);
            s.u(i, t) = static_cast<std::uint8_t>(parse_int(f[2], line, "u"));
            s.v(i, t) = static_cast<std::uint8_t>(parse_int(f[3], line, "v"));
            s.w(i, t) = static_cast<std::uint8_t>(parse_int(f[4], line, "w"));
            s.g(i, t) = parse_double(f[5], line, "g_mw");
        }
        else if(section == "flows")
        {
            if(f.size() != 3)
                throw ParseError(fmt::format("line {}: flow record needs 3 fields", line), line);
            std::size_t l = c.lines.size();
            for(std::size_t k = 0; k < c.lines.size(); ++k)
                if(c.lines[k].id == f[0])
                    l = k;
            if(l == c.lines.size())
                throw ParseError(fmt::format("line {}: unknown line '{}'", line, f[0]), line, "line");
            s.flow(l, hour_of(f[1])) = parse_double(f[2], line, "flow_mw");
        }
        else if(section == "angles")
        {
            if(f.size() != 3)
                throw ParseError(fmt::format("line {}: angle record needs 3 fields", line), line);
            auto b = bus_of(f[0]);
            s.angle(b, hour_of(f[1])) = parse_double(f[2], line, "angle_rad");
        }
        else if(section == "shed")
        {
            if(f.size() != 3)
                throw ParseError(fmt::format("line {}: shed record needs 3 fields", line), line);
            // bus 0 marks a system-level (copper plate) slack
            const bool system = f[0] == "0";
            if(s.shed.empty())
                s.shed = Grid<double>(system ? 1 : c.buses.size(), static_cast<std::size_t>(hours));
            std::size_t b = system ? 0 : bus_of(f[0]);
            s.shed(b, hour_of(f[1])) = parse_double(f[2], line, "shed_mw");
        }
        else if(section == "costs")
        {
            if(f.size() != 4)
                throw ParseError(fmt::format("line {}: cost record needs 4 fields", line), line);
            s.cost_fixed = parse_double(f[0], line, "cost_fixed");
            s.cost_startup = parse_double(f[1], line, "cost_startup");
            s.cost_variable = parse_double(f[2], line, "cost_variable");
            s.cost_total = parse_double(f[3], line, "cost_total");
        }
        else
            throw ParseError(fmt::format("line {}: record outside a known section", line), line);
    }
    ensure_sized();
    return a;
}

} // namespace seasonal
