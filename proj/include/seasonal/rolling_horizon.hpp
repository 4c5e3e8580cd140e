#ifndef SEASONAL_ROLLING_HORIZON_HPP
#define SEASONAL_ROLLING_HORIZON_HPP

#include "seasonal/ucm.hpp"

#include <vector>

namespace seasonal
{

struct WindowPlan
{
    int start_hour = 0;     // offset within the month
    int length_hours = 0;   // solve horizon
    int retained_hours = 0; // prefix kept in the stitched solution

    friend bool operator==(const WindowPlan&, const WindowPlan&) = default;
};

/// Window length and retained step. The default is nine-day solves that
/// keep their first seven days.
struct WindowScheme
{
    int length_hours = 216;
    int retained_hours = 168;
};

/// Four windows covering a 720-hour month; the last one keeps its whole
/// horizon. Throws ValidationError for any other month length.
std::vector<WindowPlan> plan_windows(int month_hours);

/// Windows start every `retained_hours`; the first window that reaches the
/// end of the month is truncated to it and retained entirely.
std::vector<WindowPlan> plan_windows(int month_hours, const WindowScheme& scheme);

/// Unit states at the end of hour `at_hour - 1` of `solution`, with on/off
/// run lengths counted back through `window_init`.
InitialConditions extract_initial_conditions(const CommitmentSolution& solution, int at_hour,
                                             const InitialConditions& window_init);

/// Energy cap for a window: the remaining budget pro rata to window length.
double allocate_window_budget(double remaining_budget, const WindowPlan& window, int hours_left_in_month);

struct WindowStats
{
    int window = 0;
    int start_hour = 0;
    double objective = 0.0;
    double gap = 0.0;
    double wall_seconds = 0.0;
};

struct MonthlySolution
{
    CommitmentSolution solution; // stitched over the month
    std::vector<WindowStats> windows;
    InitialConditions final_state; // state after the last hour, for chaining months
    double wall_seconds = 0.0;
};

/// Solves the windows in order, seeding each from its predecessor's state
/// at the retained boundary, and stitches the retained segments. Window
/// failures are rethrown as InfeasibleError naming the window.
MonthlySolution solve_month(const NetworkCase& c, const DemandSeries& demand, const InitialConditions& init0,
                            const UcmConfig& config, const WindowScheme& scheme = {});

/// Energy caps equal to each unit's full monthly budget, merged over `config`.
UcmConfig with_monthly_budgets(const NetworkCase& c, UcmConfig config);

/// Table with header `window,start_hour,objective,gap,wall_seconds`.
std::string emit_window_stats(const std::vector<WindowStats>& stats);

} // namespace seasonal
#endif // SEASONAL_ROLLING_HORIZON_HPP
