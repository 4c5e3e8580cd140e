#include "seasonal/rolling_horizon.hpp"

#include "seasonal/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <map>

namespace seasonal
{

std::vector<WindowPlan> plan_windows(int month_hours)
{
    if(month_hours != hours_per_month)
        throw ValidationError(fmt::format("unsupported month length {} (expected {})", month_hours,
                                          hours_per_month));
    return plan_windows(month_hours, WindowScheme{});
}

std::vector<WindowPlan> plan_windows(int month_hours, const WindowScheme& scheme)
{
    if(month_hours < 1)
        throw ValidationError("month must span at least one hour");
    if(scheme.retained_hours < 1 || scheme.retained_hours > scheme.length_hours)
        throw ValidationError(fmt::format("window scheme keeps {} of {} hours", scheme.retained_hours,
                                          scheme.length_hours));
    std::vector<WindowPlan> plan;
    for(int start = 0;; start += scheme.retained_hours)
    {
        if(start + scheme.length_hours >= month_hours)
        {
            int length = month_hours - start;
            plan.push_back({start, length, length});
            return plan;
        }
        plan.push_back({start, scheme.length_hours, scheme.retained_hours});
    }
}

InitialConditions extract_initial_conditions(const CommitmentSolution& solution, int at_hour,
                                             const InitialConditions& window_init)
{
    if(at_hour < 0 || at_hour > solution.hours)
        throw ValidationError(fmt::format("boundary hour {} outside solved window of {} hours", at_hour,
                                          solution.hours));
    if(window_init.size() != solution.u.rows())
        throw ValidationError("initial conditions do not match the solution's units");
    if(at_hour == 0)
        return window_init;

    InitialConditions out(window_init.size());
    const auto last = static_cast<std::size_t>(at_hour - 1);
    for(std::size_t i = 0; i < out.size(); ++i)
    {
        const bool on = solution.u(i, last) == 1;
        int run = 0;
        std::size_t t = last + 1;
        while(t > 0 && (solution.u(i, t - 1) == 1) == on)
        {
            ++run;
            --t;
        }
        if(t == 0 && window_init[i].on == on)
            run += on ? window_init[i].ut0 : window_init[i].dt0;
        out[i].on = on;
        out[i].g0 = on ? solution.g(i, last) : 0.0;
        out[i].ut0 = on ? run : 0;
        out[i].dt0 = on ? 0 : run;
    }
    return out;
}

double allocate_window_budget(double remaining_budget, const WindowPlan& window, int hours_left_in_month)
{
    if(remaining_budget < 0)
        throw ValidationError("remaining budget must be non-negative");
    if(hours_left_in_month <= 0)
        return remaining_budget;
    return std::min(remaining_budget,
                    remaining_budget * static_cast<double>(window.length_hours) / hours_left_in_month);
}

UcmConfig with_monthly_budgets(const NetworkCase& c, UcmConfig config)
{
    for(const auto& u : c.units)
        if(u.energy_budget)
            config.window_energy_caps[u.id] = *u.energy_budget;
    return config;
}

MonthlySolution solve_month(const NetworkCase& c, const DemandSeries& demand, const InitialConditions& init0,
                            const UcmConfig& config, const WindowScheme& scheme)
{
    const auto start_clock = std::chrono::steady_clock::now();
    const int month_hours = demand.hours();
    const auto plan = plan_windows(month_hours, scheme);
    const std::size_t n_units = c.units.size();
    const auto M = static_cast<std::size_t>(month_hours);

    std::map<std::string, double> remaining;
    for(const auto& u : c.units)
        if(u.energy_budget)
            remaining[u.id] = *u.energy_budget;

    MonthlySolution out;
    CommitmentSolution& st = out.solution;
    st.hours = month_hours;
    st.g = Grid<double>(n_units, M);
    st.u = st.v = st.w = Grid<std::uint8_t>(n_units, M);

    InitialConditions init = init0;
    for(std::size_t k = 0; k < plan.size(); ++k)
    {
        const auto& win = plan[k];
        UcmConfig cfg = config;
        for(const auto& [id, left] : remaining)
            cfg.window_energy_caps[id] = allocate_window_budget(left, win, month_hours - win.start_hour);

        CommitmentSolution part;
        try
        {
            part = solve_ucm(c, demand.slice(win.start_hour, win.length_hours), win.length_hours, init, cfg);
        }
        catch(const InfeasibleError& e)
        {
            int hour = e.hour() >= 0 ? win.start_hour + e.hour() : -1;
            throw InfeasibleError(fmt::format("window {} (start hour {}): {}", k + 1, win.start_hour, e.what()),
                                  hour);
        }

        const auto first = static_cast<std::size_t>(win.start_hour);
        const auto keep = static_cast<std::size_t>(win.retained_hours);
        st.g.paste_columns(first, part.g, keep);
        st.u.paste_columns(first, part.u, keep);
        st.v.paste_columns(first, part.v, keep);
        st.w.paste_columns(first, part.w, keep);
        if(!part.flow.empty())
        {
            if(st.flow.empty())
            {
                st.flow = Grid<double>(part.flow.rows(), M);
                st.angle = Grid<double>(part.angle.rows(), M);
            }
            st.flow.paste_columns(first, part.flow, keep);
            st.angle.paste_columns(first, part.angle, keep);
        }
        if(!part.shed.empty())
        {
            if(st.shed.empty())
                st.shed = Grid<double>(part.shed.rows(), M);
            st.shed.paste_columns(first, part.shed, keep);
        }

        for(auto& [id, left] : remaining)
        {
            const auto i = *c.unit_position(id);
            double used = 0;
            for(std::size_t t = 0; t < keep; ++t)
                used += part.g(i, t);
            left = std::max(0.0, left - used);
        }

        out.windows.push_back({static_cast<int>(k + 1), win.start_hour, part.objective, part.mip_gap,
                               part.wall_seconds});
        init = extract_initial_conditions(part, win.retained_hours, init);
    }
    out.final_state = init;
    recompute_costs(c, st);
    st.objective = st.cost_total;
    for(const auto& w : out.windows)
        st.mip_gap = std::max(st.mip_gap, w.gap);
    out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_clock).count();
    st.wall_seconds = out.wall_seconds;
    return out;
}

std::string emit_window_stats(const std::vector<WindowStats>& stats)
{
    std::string out = "window,start_hour,objective,gap,wall_seconds\n";
    for(const auto& w : stats)
        out += fmt::format("{},{},{:.6f},{:.6g},{:.3f}\n", w.window, w.start_hour, w.objective, w.gap,
                           w.wall_seconds);
    return out;
}

} // namespace seasonal
