#ifndef SEASONAL_SYSTEM_MODEL_HPP
#define SEASONAL_SYSTEM_MODEL_HPP

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace seasonal
{

struct BusId
{
    int index = 0; // 1-based

    friend auto operator<=>(const BusId&, const BusId&) = default;
};

enum class Fuel
{
    nuclear,
    hydro,
    coal,
    gas
};

inline constexpr Fuel all_fuels[] = {Fuel::nuclear, Fuel::hydro, Fuel::coal, Fuel::gas};

std::string_view to_string(Fuel fuel);
std::optional<Fuel> parse_fuel(std::string_view label);

struct CostBlock
{
    double size_mw = 0.0;
    double marginal_cost = 0.0; // currency / MWh

    friend bool operator==(const CostBlock&, const CostBlock&) = default;
};

struct GeneratorUnit
{
    std::string id;
    BusId bus;
    std::string fuel; // kept as text so validation can report unknown labels
    double p_min = 0.0;
    double p_max = 0.0;
    double ramp_up = 0.0;   // MW/h
    double ramp_down = 0.0; // MW/h
    int min_up = 1;         // h
    int min_down = 1;       // h
    double startup_cost = 0.0;
    double fixed_cost = 0.0; // currency per online hour
    std::vector<CostBlock> blocks;
    std::optional<double> energy_budget; // MWh per month

    Fuel fuel_kind() const; // throws ValidationError for unknown labels

    friend bool operator==(const GeneratorUnit&, const GeneratorUnit&) = default;
};

struct TransmissionLine
{
    std::string id;
    BusId from_bus;
    BusId to_bus;
    double susceptance = 0.0; // per unit on the case MVA base
    double capacity = 0.0;    // MW

    friend bool operator==(const TransmissionLine&, const TransmissionLine&) = default;
};

/// State of one unit at the end of the hour preceding a solve horizon.
struct UnitState
{
    double g0 = 0.0;
    bool on = false;
    int ut0 = 0; // consecutive hours online
    int dt0 = 0; // consecutive hours offline

    friend bool operator==(const UnitState&, const UnitState&) = default;
};

/// One entry per unit, in case unit order.
using InitialConditions = std::vector<UnitState>;

struct NetworkCase
{
    std::string name;
    double base_mva = 100.0;
    std::vector<BusId> buses;
    std::vector<TransmissionLine> lines;
    std::vector<GeneratorUnit> units;
    BusId reference_bus;
    std::map<BusId, double> demand_share;
    std::map<std::string, UnitState> initial; // `[initial]` overrides, keyed by unit id

    std::optional<std::size_t> bus_position(BusId bus) const;
    std::optional<std::size_t> unit_position(std::string_view id) const;
    double total_capacity() const;

    friend bool operator==(const NetworkCase&, const NetworkCase&) = default;
};

/// A broken invariant, reported as data.
struct Violation
{
    std::string entity; // e.g. "unit G01", "line L3", "case"
    std::string rule;   // short invariant tag, e.g. "p_min<=p_max", "ramp_up"
    int hour = -1;
    double amount = 0.0; // magnitude of the breach where meaningful
    std::string message;
};

std::string describe(const Violation& v);

/// Parses the sectioned case-file text. Throws ParseError on malformed
/// records, dangling bus references and duplicate ids.
NetworkCase parse_case(std::string_view text);
NetworkCase load_case(const std::string& path);

/// Writes `c` in the case-file format; parse_case(emit_case(c)) == c.
std::string emit_case(const NetworkCase& c);

/// Returns every broken invariant; empty iff the case is consistent.
std::vector<Violation> validate_case(const NetworkCase& c);

/// All units off and free to start; `[initial]` overrides applied on top.
InitialConditions default_initial_conditions(const NetworkCase& c);

/// All units off and free to start, ignoring case overrides.
InitialConditions cold_start(const NetworkCase& c);

} // namespace seasonal
#endif // SEASONAL_SYSTEM_MODEL_HPP
