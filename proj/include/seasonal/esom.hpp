#ifndef SEASONAL_ESOM_HPP
#define SEASONAL_ESOM_HPP

#include "seasonal/demand.hpp"
#include "seasonal/grid.hpp"
#include "seasonal/solver.hpp"
#include "seasonal/system_model.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace seasonal
{

struct EsomConfig
{
    SolveOptions solver;
    bool fold_fixed_costs = true;
    bool include_network = false; // copper plate unless set
    bool include_ramps = true;
    double on_epsilon = 1e-6; // MW above which a unit counts as operating
};

/// Copy of `c` whose block costs carry each unit's fixed cost spread over
/// its full output: c_ik + FC_i / p_max_i.
NetworkCase fold_fixed_costs(const NetworkCase& c);

struct EsomIndex
{
    int hours = 0;
    std::vector<Grid<VariableHandle>> blocks; // per unit: block x hour
    Grid<VariableHandle> flow;                // line x hour (network mode only)
    Grid<VariableHandle> angle;               // bus x hour, invalid at the reference bus
};

struct EsomModel
{
    Model model;
    EsomIndex index;
};

struct DispatchSolution
{
    int hours = 0;
    Grid<double> g;      // unit x hour, MW
    Grid<double> flow;   // line x hour, network mode only
    double cost_variable_true = 0.0;
    double cost_fixed_expost = 0.0;
    double cost_total_reported = 0.0;
    double lp_objective = 0.0; // folded objective, diagnostics only
    double wall_seconds = 0.0;
};

/// Monolithic dispatch LP over every hour of `demand`: block variables only,
/// no p_min and no binaries.
EsomModel build_esom(const NetworkCase& c, const DemandSeries& demand, const EsomConfig& config);

/// Throws InfeasibleError or SolverError.
DispatchSolution solve_esom(const NetworkCase& c, const DemandSeries& demand, const EsomConfig& config = {});

/// Re-prices `s.g` at the case's own block costs and counts operating hours
/// for the fixed-cost term.
void expost_costs(const NetworkCase& c, DispatchSolution& s, double on_epsilon);

/// Bounds, ramps (hour 0 free), balance, budgets and cost bookkeeping.
std::vector<Violation> audit_dispatch(const NetworkCase& c, const DemandSeries& demand,
                                      const DispatchSolution& s, const EsomConfig& config = {},
                                      double tolerance = 1e-6);

/// Sections [dispatch] `unit,hour,g_mw` and [costs]
/// `lp_objective,cost_variable_true,cost_fixed_expost,cost_total_reported`.
std::string emit_dispatch_archive(const NetworkCase& c, const DispatchSolution& s);
DispatchSolution parse_dispatch_archive(std::string_view text, const NetworkCase& c);

} // namespace seasonal
#endif // SEASONAL_ESOM_HPP
