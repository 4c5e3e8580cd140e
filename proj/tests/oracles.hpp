// Reference computations used by the tests. None of these go through the
// commitment model builder.
#ifndef SEASONAL_TESTS_ORACLES_HPP
#define SEASONAL_TESTS_ORACLES_HPP

#include "seasonal/demand.hpp"
#include "seasonal/solver.hpp"
#include "seasonal/system_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace oracle
{

using namespace seasonal;

/// One-bus case holding `units`; demand share 1 at bus 1.
inline NetworkCase single_bus_case(std::vector<GeneratorUnit> units)
{
    NetworkCase c;
    c.name = "toy";
    c.buses = {BusId{1}};
    c.reference_bus = BusId{1};
    c.demand_share[BusId{1}] = 1.0;
    for(auto& u : units)
        u.bus = BusId{1};
    c.units = std::move(units);
    return c;
}

inline DemandSeries flat_series(const std::vector<double>& mw)
{
    DemandSeries d({BusId{1}}, static_cast<int>(mw.size()));
    for(std::size_t t = 0; t < mw.size(); ++t)
        d.at(0, static_cast<int>(t)) = mw[t];
    return d;
}

inline GeneratorUnit unit(std::string id, double p_min, double p_max, double fc, double su,
                          std::vector<CostBlock> blocks, std::string fuel = "coal")
{
    GeneratorUnit u;
    u.id = std::move(id);
    u.bus = BusId{1};
    u.fuel = std::move(fuel);
    u.p_min = p_min;
    u.p_max = p_max;
    u.ramp_up = p_max;
    u.ramp_down = p_max;
    u.fixed_cost = fc;
    u.startup_cost = su;
    u.blocks = std::move(blocks);
    return u;
}

/// Whether the on/off pattern `on` (unit-major, hours inner) honours the
/// minimum up and down times, counting the history in `init`.
inline bool pattern_respects_min_times(const NetworkCase& c, const InitialConditions& init,
                                       const std::vector<std::vector<int>>& on)
{
    for(std::size_t i = 0; i < c.units.size(); ++i)
    {
        const auto& u = c.units[i];
        const int T = static_cast<int>(on[i].size());
        // run lengths: the state at hour t must persist as long as the run that
        // produced it is shorter than the minimum
        int prev = init[i].on ? 1 : 0;
        int run = init[i].on ? init[i].ut0 : init[i].dt0;
        for(int t = 0; t < T; ++t)
        {
            if(on[i][t] != prev)
            {
                const int need = prev ? u.min_up : u.min_down;
                if(run < need)
                    return false;
                run = 0;
            }
            prev = on[i][t];
            ++run;
        }
    }
    return true;
}

/// Minimum dispatch cost (blocks only) with commitments fixed, solved as a
/// plain LP over block variables. nullopt when infeasible.
inline std::optional<double> dispatch_cost(const NetworkCase& c, const DemandSeries& d,
                                           const InitialConditions& init,
                                           const std::vector<std::vector<int>>& on)
{
    Model m;
    const std::size_t n = c.units.size();
    const int T = static_cast<int>(on.front().size());
    std::vector<std::vector<std::vector<Term>>> out(n, std::vector<std::vector<Term>>(T));
    for(std::size_t i = 0; i < n; ++i)
        for(int t = 0; t < T; ++t)
            for(const auto& b : c.units[i].blocks)
                out[i][t].push_back({m.add_continuous(0.0, on[i][t] ? b.size_mw : 0.0, b.marginal_cost), 1.0});
    auto scaled = [](std::vector<Term> terms, double k) {
        for(auto& term : terms)
            term.coefficient *= k;
        return terms;
    };
    auto concat = [](std::vector<Term> a, const std::vector<Term>& b) {
        a.insert(a.end(), b.begin(), b.end());
        return a;
    };
    for(int t = 0; t < T; ++t)
    {
        std::vector<Term> balance;
        for(std::size_t i = 0; i < n; ++i)
            balance = concat(balance, out[i][t]);
        m.add_constraint(balance, Sense::equal, d.system_total(t));
    }
    for(std::size_t i = 0; i < n; ++i)
    {
        const auto& u = c.units[i];
        const double su = std::max(u.p_min, u.ramp_up);
        const double sd = std::max(u.p_min, u.ramp_down);
        for(int t = 0; t < T; ++t)
        {
            if(on[i][t])
                m.add_constraint(out[i][t], Sense::greater_equal, u.p_min);
            const int was_on = t == 0 ? (init[i].on ? 1 : 0) : on[i][t - 1];
            const bool start = on[i][t] && !was_on;
            const bool stop = !on[i][t] && was_on;
            // up: g_t - g_{t-1} <= RU * u_{t-1} + SU * v_t
            const double up_room = (was_on ? u.ramp_up : 0.0) + (start ? su : 0.0);
            // down: g_{t-1} - g_t <= RD * u_t + SD * w_t
            const double down_room = (on[i][t] ? u.ramp_down : 0.0) + (stop ? sd : 0.0);
            if(t == 0)
            {
                m.add_constraint(out[i][t], Sense::less_equal, up_room + init[i].g0);
                m.add_constraint(out[i][t], Sense::greater_equal, init[i].g0 - down_room);
            }
            else
            {
                m.add_constraint(concat(out[i][t], scaled(out[i][t - 1], -1.0)), Sense::less_equal, up_room);
                m.add_constraint(concat(out[i][t - 1], scaled(out[i][t], -1.0)), Sense::less_equal, down_room);
            }
        }
        if(u.energy_budget)
        {
            std::vector<Term> all;
            for(int t = 0; t < T; ++t)
                all = concat(all, out[i][t]);
            m.add_constraint(all, Sense::less_equal, *u.energy_budget);
        }
    }
    SolveOptions opt;
    auto r = solve(m, opt);
    if(r.status != SolveStatus::optimal)
        return std::nullopt;
    return r.objective;
}

struct Enumeration
{
    std::optional<double> best; // nullopt when no pattern is feasible
    int feasible_patterns = 0;
};

/// Exhaustive search over every commitment pattern of a copper-plate case.
inline Enumeration enumerate_commitments(const NetworkCase& c, const DemandSeries& d, int hours,
                                         const InitialConditions& init)
{
    const std::size_t n = c.units.size();
    const std::size_t bits = n * static_cast<std::size_t>(hours);
    Enumeration e;
    for(unsigned long mask = 0; mask < (1ul << bits); ++mask)
    {
        std::vector<std::vector<int>> on(n, std::vector<int>(hours));
        for(std::size_t i = 0; i < n; ++i)
            for(int t = 0; t < hours; ++t)
                on[i][t] = static_cast<int>((mask >> (i * hours + t)) & 1ul);
        if(!pattern_respects_min_times(c, init, on))
            continue;
        auto lp = dispatch_cost(c, d, init, on);
        if(!lp)
            continue;
        ++e.feasible_patterns;
        double cost = *lp;
        for(std::size_t i = 0; i < n; ++i)
            for(int t = 0; t < hours; ++t)
            {
                const int was_on = t == 0 ? (init[i].on ? 1 : 0) : on[i][t - 1];
                cost += c.units[i].fixed_cost * on[i][t];
                if(on[i][t] && !was_on)
                    cost += c.units[i].startup_cost;
            }
        if(!e.best || cost < *e.best)
            e.best = cost;
    }
    return e;
}

struct RandomInstance
{
    NetworkCase c;
    DemandSeries demand;
    InitialConditions init;
};

/// Small random copper-plate commitment instance: `units` units, `hours`
/// hours, one or two blocks per unit, random minimum times and history.
inline RandomInstance random_instance(std::mt19937_64& rng, int units, int hours)
{
    auto uni = [&](double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); };
    auto pick = [&](int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng); };

    std::vector<GeneratorUnit> fleet;
    double capacity = 0;
    for(int i = 0; i < units; ++i)
    {
        const double p_max = std::round(uni(40, 120));
        const double p_min = std::round(uni(0.1, 0.5) * p_max);
        std::vector<CostBlock> blocks;
        const double c0 = std::round(uni(10, 40) * 10) / 10;
        if(pick(0, 1) == 0)
            blocks = {{p_max, c0}};
        else
        {
            const double first = std::round(p_max * uni(0.3, 0.7));
            blocks = {{first, c0}, {p_max - first, c0 + std::round(uni(1, 15))}};
        }
        auto u = unit("U" + std::to_string(i + 1), p_min, p_max, std::round(uni(0, 300)), std::round(uni(0, 800)),
                      blocks);
        u.ramp_up = std::round(uni(0.3, 1.0) * p_max);
        u.ramp_down = std::round(uni(0.3, 1.0) * p_max);
        u.min_up = pick(1, 3);
        u.min_down = pick(1, 3);
        capacity += p_max;
        fleet.push_back(u);
    }
    RandomInstance inst;
    inst.c = single_bus_case(std::move(fleet));
    inst.init.resize(units);
    for(int i = 0; i < units; ++i)
    {
        const auto& u = inst.c.units[i];
        if(pick(0, 1) == 1)
            inst.init[i] = {std::round(uni(u.p_min, u.p_max)), true, pick(1, 4), 0};
        else
            inst.init[i] = {0.0, false, 0, pick(1, 4)};
    }
    std::vector<double> mw(hours);
    for(auto& x : mw)
        x = std::round(uni(0.1, 0.9) * capacity);
    inst.demand = flat_series(mw);
    return inst;
}

/// Minimum of c.x over a 2-variable polytope {x : a_k . x (<=|>=|=) b_k},
/// found by intersecting every pair of constraint lines. nullopt when no
/// vertex is feasible.
struct HalfPlane
{
    double a0, a1;
    Sense sense;
    double b;
};

inline std::optional<std::pair<double, std::array<double, 2>>> enumerate_vertices(double c0, double c1,
                                                                                   const std::vector<HalfPlane>& rows)
{
    std::optional<std::pair<double, std::array<double, 2>>> best;
    auto feasible = [&](double x, double y) {
        for(const auto& r : rows)
        {
            const double lhs = r.a0 * x + r.a1 * y;
            if(r.sense == Sense::less_equal && lhs > r.b + 1e-9)
                return false;
            if(r.sense == Sense::greater_equal && lhs < r.b - 1e-9)
                return false;
            if(r.sense == Sense::equal && std::abs(lhs - r.b) > 1e-9)
                return false;
        }
        return true;
    };
    for(std::size_t p = 0; p < rows.size(); ++p)
        for(std::size_t q = p + 1; q < rows.size(); ++q)
        {
            const double det = rows[p].a0 * rows[q].a1 - rows[p].a1 * rows[q].a0;
            if(std::abs(det) < 1e-12)
                continue;
            const double x = (rows[p].b * rows[q].a1 - rows[p].a1 * rows[q].b) / det;
            const double y = (rows[p].a0 * rows[q].b - rows[p].b * rows[q].a0) / det;
            if(!feasible(x, y))
                continue;
            const double obj = c0 * x + c1 * y;
            if(!best || obj < best->first)
                best = {obj, {x, y}};
        }
    return best;
}

} // namespace oracle
#endif // SEASONAL_TESTS_ORACLES_HPP
