#ifndef SEASONAL_UCM_HPP
#define SEASONAL_UCM_HPP

#include "seasonal/demand.hpp"
#include "seasonal/grid.hpp"
#include "seasonal/solver.hpp"
#include "seasonal/system_model.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace seasonal
{

struct UcmConfig
{
    SolveOptions solver;                     // mip_gap lives here
    std::optional<double> reserve_fraction;  // of hourly system demand, in [0, 0.5]
    std::optional<double> shed_penalty;      // currency/MWh; disabled when empty
    std::map<std::string, double> window_energy_caps; // unit id -> MWh over the horizon
    bool include_network = true;
    // Solve copper plate first and add PTDF line limits only where flows
    // exceed capacity; flows and angles are then derived from injections.
    bool lazy_line_limits = true;
};

/// Ramp allowance on the hour a unit starts (resp. stops).
double startup_ramp(const GeneratorUnit& u);
double shutdown_ramp(const GeneratorUnit& u);

/// Where each decision lives in the built model.
struct UcmIndex
{
    int hours = 0;
    Grid<VariableHandle> u, v, w, g;                   // unit x hour
    std::vector<Grid<VariableHandle>> blocks;          // per unit: block x hour
    Grid<VariableHandle> flow;                         // line x hour (empty without network)
    Grid<VariableHandle> angle;                        // bus x hour, invalid handle at the reference bus
    Grid<VariableHandle> shed;                         // bus x hour (empty unless shedding enabled)
};

struct UcmModel
{
    Model model;
    UcmIndex index;
};

struct CommitmentSolution
{
    int hours = 0;
    Grid<double> g;             // unit x hour, MW
    Grid<std::uint8_t> u, v, w; // unit x hour
    Grid<double> flow;          // line x hour, MW
    Grid<double> angle;         // bus x hour, rad
    Grid<double> shed;          // bus x hour, MW
    double cost_fixed = 0.0;
    double cost_startup = 0.0;
    double cost_variable = 0.0;
    double cost_total = 0.0;
    double objective = 0.0; // as reported by the solver, diagnostics only
    double mip_gap = 0.0;
    double wall_seconds = 0.0;
};

/// Assembles the commitment MILP over hours [0, hours) of `demand`.
/// Throws ValidationError when the window exceeds the demand or `init`
/// does not match the case.
UcmModel build_ucm(const NetworkCase& c, const DemandSeries& demand, int hours,
                   const InitialConditions& init, const UcmConfig& config);

/// Solves the commitment MILP. Costs are recomputed from the primal values.
/// Throws InfeasibleError (with the first hour that cannot be served when it
/// can be identified) or SolverError.
CommitmentSolution solve_ucm(const NetworkCase& c, const DemandSeries& demand, int hours,
                             const InitialConditions& init, const UcmConfig& config);

/// Cheapest cost of producing `mw` from `u`'s blocks (filled in merit order).
double block_cost(const GeneratorUnit& u, double mw);

/// Recomputes the three cost components of `s` from g, u and v.
void recompute_costs(const NetworkCase& c, CommitmentSolution& s);

/// Checks every constraint family of the commitment model, including the
/// transition out of `init`. Empty iff all hold within `tolerance` (MW).
std::vector<Violation> audit_solution(const NetworkCase& c, const DemandSeries& demand,
                                      const CommitmentSolution& s, const InitialConditions& init,
                                      const UcmConfig& config = {}, double tolerance = 1e-6);

/// Checks that `init` is consistent with the case units.
std::vector<Violation> check_initial_conditions(const NetworkCase& c, const InitialConditions& init);

/// Solution archive: [meta], [initial], [commitment], [flows], [angles], [costs].
std::string emit_commitment_archive(const NetworkCase& c, const CommitmentSolution& s,
                                    const InitialConditions& init, int first_hour = 0);

struct CommitmentArchive
{
    CommitmentSolution solution;
    InitialConditions init;
    int first_hour = 0;
    bool has_angles = false;
};

CommitmentArchive parse_commitment_archive(std::string_view text, const NetworkCase& c);

} // namespace seasonal
#endif // SEASONAL_UCM_HPP
