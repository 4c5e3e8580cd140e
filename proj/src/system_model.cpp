#include "seasonal/system_model.hpp"

#include "seasonal/errors.hpp"
#include "text_util.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

namespace seasonal
{

std::string_view to_string(Fuel fuel)
{
    switch(fuel)
    {
    case Fuel::nuclear: return "nuclear";
    case Fuel::hydro: return "hydro";
    case Fuel::coal: return "coal";
    case Fuel::gas: return "gas";
    }
    return "unknown";
}

std::optional<Fuel> parse_fuel(std::string_view label)
{
    for(Fuel f : all_fuels)
        if(label == to_string(f))
            return f;
    return std::nullopt;
}

Fuel GeneratorUnit::fuel_kind() const
{
    if(auto f = parse_fuel(fuel))
        return *f;
    throw ValidationError(fmt::format("unit {}: unknown fuel label '{}'", id, fuel));
}

std::optional<std::size_t> NetworkCase::bus_position(BusId bus) const
{
    auto it = std::find(buses.begin(), buses.end(), bus);
    if(it == buses.end())
        return std::nullopt;
    return static_cast<std::size_t>(it - buses.begin());
}

std::optional<std::size_t> NetworkCase::unit_position(std::string_view id) const
{
    for(std::size_t i = 0; i < units.size(); ++i)
        if(units[i].id == id)
            return i;
    return std::nullopt;
}

double NetworkCase::total_capacity() const
{
    return std::accumulate(units.begin(), units.end(), 0.0,
                           [](double acc, const GeneratorUnit& u) { return acc + u.p_max; });
}

std::string describe(const Violation& v)
{
    std::string out = v.entity + ": " + v.rule;
    if(v.hour >= 0)
        out += fmt::format(" at hour {}", v.hour);
    if(v.amount != 0.0)
        out += fmt::format(" (by {:.6g})", v.amount);
    if(!v.message.empty())
        out += " - " + v.message;
    return out;
}

namespace
{

using detail::parse_double;
using detail::parse_int;
using detail::split;
using detail::trim;

enum class Section
{
    none,
    meta,
    buses,
    lines,
    generators,
    shares,
    initial
};

Section section_from(std::string_view name, int line)
{
    if(name == "meta") return Section::meta;
    if(name == "buses") return Section::buses;
    if(name == "lines") return Section::lines;
    if(name == "generators") return Section::generators;
    if(name == "shares") return Section::shares;
    if(name == "initial") return Section::initial;
    throw ParseError(fmt::format("line {}: unknown section [{}]", line, name), line);
}

void expect_fields(const std::vector<std::string_view>& f, std::size_t lo, std::size_t hi,
                   std::string_view what, int line)
{
    if(f.size() < lo || f.size() > hi)
        throw ParseError(fmt::format("line {}: {} record needs {} fields, got {}", line, what,
                                     lo == hi ? fmt::format("{}", lo) : fmt::format("{}-{}", lo, hi),
                                     f.size()),
                         line);
}

std::vector<CostBlock> parse_blocks(std::string_view text, int line)
{
    std::vector<CostBlock> blocks;
    for(auto part : split(text, ';'))
    {
        auto kv = split(part, ':');
        if(kv.size() != 2)
            throw ParseError(fmt::format("line {}: block '{}' is not size:cost", line, part), line,
                             "blocks");
        blocks.push_back({parse_double(kv[0], line, "block size"),
                          parse_double(kv[1], line, "block cost")});
    }
    return blocks;
}

struct PendingShare
{
    BusId bus;
    double fraction;
    int line;
};

} // namespace

NetworkCase parse_case(std::string_view text)
{
    NetworkCase c;
    Section section = Section::none;
    std::optional<int> reference;
    int reference_line = 0;
    std::vector<PendingShare> shares;
    std::vector<std::pair<std::string, int>> initial_lines;
    std::vector<int> line_of_line, line_of_unit;

    std::istringstream in{std::string(text)};
    std::string raw;
    int line = 0;
    while(std::getline(in, raw))
    {
        ++line;
        std::string_view body = raw;
        if(auto hash = body.find('#'); hash != std::string_view::npos)
            body = body.substr(0, hash);
        body = trim(body);
        if(body.empty())
            continue;
        if(body.front() == '[')
        {
            if(body.back() != ']')
                throw ParseError(fmt::format("line {}: unterminated section header", line), line);
            section = section_from(trim(body.substr(1, body.size() - 2)), line);
            continue;
        }
        auto f = split(body, ',');
        switch(section)
        {
        case Section::none:
            throw ParseError(fmt::format("line {}: record outside any section", line), line);
        case Section::meta:
        {
            expect_fields(f, 2, 2, "meta", line);
            if(f[0] == "name")
                c.name = std::string(f[1]);
            else if(f[0] == "reference_bus")
            {
                reference = parse_int(f[1], line, "reference_bus");
                reference_line = line;
            }
            else if(f[0] == "base_mva")
                c.base_mva = parse_double(f[1], line, "base_mva");
            else
                throw ParseError(fmt::format("line {}: unknown meta key '{}'", line, f[0]), line,
                                 std::string(f[0]));
            break;
        }
        case Section::buses:
        {
            expect_fields(f, 1, 1, "bus", line);
            BusId b{parse_int(f[0], line, "index")};
            if(c.bus_position(b))
                throw ParseError(fmt::format("line {}: duplicate bus {}", line, b.index), line,
                                 "index");
            c.buses.push_back(b);
            break;
        }
        case Section::lines:
        {
            expect_fields(f, 5, 5, "line", line);
            TransmissionLine l;
            l.id = std::string(f[0]);
            l.from_bus = {parse_int(f[1], line, "from_bus")};
            l.to_bus = {parse_int(f[2], line, "to_bus")};
            l.susceptance = parse_double(f[3], line, "susceptance");
            l.capacity = parse_double(f[4], line, "capacity");
            for(const auto& other : c.lines)
                if(other.id == l.id)
                    throw ParseError(fmt::format("line {}: duplicate line id '{}'", line, l.id),
                                     line, "id");
            c.lines.push_back(std::move(l));
            line_of_line.push_back(line);
            break;
        }
        case Section::generators:
        {
            expect_fields(f, 12, 13, "generator", line);
            GeneratorUnit u;
            u.id = std::string(f[0]);
            u.bus = {parse_int(f[1], line, "bus")};
            u.fuel = std::string(f[2]);
            u.p_min = parse_double(f[3], line, "p_min");
            u.p_max = parse_double(f[4], line, "p_max");
            u.ramp_up = parse_double(f[5], line, "ramp_up");
            u.ramp_down = parse_double(f[6], line, "ramp_down");
            u.min_up = parse_int(f[7], line, "min_up");
            u.min_down = parse_int(f[8], line, "min_down");
            u.startup_cost = parse_double(f[9], line, "startup_cost");
            u.fixed_cost = parse_double(f[10], line, "fixed_cost");
            u.blocks = parse_blocks(f[11], line);
            if(f.size() == 13 && !f[12].empty() && f[12] != "-")
                u.energy_budget = parse_double(f[12], line, "energy_budget");
            if(c.unit_position(u.id))
                throw ParseError(fmt::format("line {}: duplicate generator id '{}'", line, u.id),
                                 line, "id");
            c.units.push_back(std::move(u));
            line_of_unit.push_back(line);
            break;
        }
        case Section::shares:
        {
            expect_fields(f, 2, 2, "share", line);
            shares.push_back({{parse_int(f[0], line, "bus")}, parse_double(f[1], line, "fraction"),
                              line});
            break;
        }
        case Section::initial:
        {
            expect_fields(f, 5, 5, "initial", line);
            UnitState s;
            std::string id(f[0]);
            s.g0 = parse_double(f[1], line, "g0");
            int u0 = parse_int(f[2], line, "u0");
            if(u0 != 0 && u0 != 1)
                throw ParseError(fmt::format("line {}: u0 must be 0 or 1", line), line, "u0");
            s.on = u0 == 1;
            s.ut0 = parse_int(f[3], line, "ut0");
            s.dt0 = parse_int(f[4], line, "dt0");
            if(c.initial.contains(id))
                throw ParseError(fmt::format("line {}: duplicate initial state for '{}'", line, id),
                                 line, "unit");
            c.initial.emplace(id, s);
            initial_lines.emplace_back(id, line);
            break;
        }
        }
    }

    auto require_bus = [&](BusId b, int at, const char* field) {
        if(!c.bus_position(b))
            throw ParseError(fmt::format("line {}: {} references unknown bus {}", at, field, b.index),
                             at, field);
    };
    for(std::size_t i = 0; i < c.lines.size(); ++i)
    {
        require_bus(c.lines[i].from_bus, line_of_line[i], "from_bus");
        require_bus(c.lines[i].to_bus, line_of_line[i], "to_bus");
    }
    for(std::size_t i = 0; i < c.units.size(); ++i)
        require_bus(c.units[i].bus, line_of_unit[i], "bus");
    for(const auto& s : shares)
    {
        require_bus(s.bus, s.line, "share bus");
        if(c.demand_share.contains(s.bus))
            throw ParseError(fmt::format("line {}: duplicate share for bus {}", s.line, s.bus.index),
                             s.line, "bus");
        c.demand_share[s.bus] = s.fraction;
    }
    for(const auto& [id, at] : initial_lines)
        if(!c.unit_position(id))
            throw ParseError(fmt::format("line {}: initial state for unknown unit '{}'", at, id), at,
                             "unit");
    if(c.buses.empty())
        throw ParseError("case has no [buses] records");
    if(reference)
    {
        c.reference_bus = {*reference};
        require_bus(c.reference_bus, reference_line, "reference_bus");
    }
    else
        c.reference_bus = c.buses.front();
    return c;
}

NetworkCase load_case(const std::string& path)
{
    std::ifstream in(path);
    if(!in)
        throw ParseError("cannot open case file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_case(buf.str());
}

std::string emit_case(const NetworkCase& c)
{
    std::string out;
    auto line = [&out](const std::string& s) {
        out += s;
        out += '\n';
    };
    line("[meta]");
    if(!c.name.empty())
        line(fmt::format("name,{}", c.name));
    line(fmt::format("reference_bus,{}", c.reference_bus.index));
    line(fmt::format("base_mva,{}", c.base_mva));
    line("");
    line("[buses]");
    line("# index");
    for(BusId b : c.buses)
        line(fmt::format("{}", b.index));
    line("");
    line("[lines]");
    line("# id,from_bus,to_bus,susceptance,capacity");
    for(const auto& l : c.lines)
        line(fmt::format("{},{},{},{},{}", l.id, l.from_bus.index, l.to_bus.index, l.susceptance,
                         l.capacity));
    line("");
    line("[generators]");
    line("# id,bus,fuel,p_min,p_max,ramp_up,ramp_down,min_up,min_down,startup_cost,fixed_cost,"
         "blocks,energy_budget");
    for(const auto& u : c.units)
    {
        std::string blocks;
        for(std::size_t k = 0; k < u.blocks.size(); ++k)
            blocks += fmt::format("{}{}:{}", k ? ";" : "", u.blocks[k].size_mw,
                                  u.blocks[k].marginal_cost);
        line(fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{}", u.id, u.bus.index, u.fuel,
                         u.p_min, u.p_max, u.ramp_up, u.ramp_down, u.min_up, u.min_down,
                         u.startup_cost, u.fixed_cost, blocks,
                         u.energy_budget ? fmt::format("{}", *u.energy_budget) : std::string("-")));
    }
    line("");
    line("[shares]");
    line("# bus,fraction");
    for(const auto& [bus, share] : c.demand_share)
        line(fmt::format("{},{}", bus.index, share));
    if(!c.initial.empty())
    {
        line("");
        line("[initial]");
        line("# unit,g0,u0,ut0,dt0");
        for(const auto& [id, s] : c.initial)
            line(fmt::format("{},{},{},{},{}", id, s.g0, s.on ? 1 : 0, s.ut0, s.dt0));
    }
    return out;
}

namespace
{

bool connected(const NetworkCase& c)
{
    if(c.buses.empty())
        return true;
    std::vector<std::vector<std::size_t>> adj(c.buses.size());
    for(const auto& l : c.lines)
    {
        auto a = c.bus_position(l.from_bus);
        auto b = c.bus_position(l.to_bus);
        if(!a || !b)
            continue;
        adj[*a].push_back(*b);
        adj[*b].push_back(*a);
    }
    std::vector<bool> seen(c.buses.size(), false);
    std::vector<std::size_t> stack{0};
    seen[0] = true;
    std::size_t count = 1;
    while(!stack.empty())
    {
        auto n = stack.back();
        stack.pop_back();
        for(auto m : adj[n])
            if(!seen[m])
            {
                seen[m] = true;
                ++count;
                stack.push_back(m);
            }
    }
    return count == c.buses.size();
}

} // namespace

std::vector<Violation> validate_case(const NetworkCase& c)
{
    std::vector<Violation> out;
    auto flag = [&out](std::string entity, std::string rule, std::string message, double amount = 0) {
        out.push_back({std::move(entity), std::move(rule), -1, amount, std::move(message)});
    };

    if(c.buses.empty())
        flag("case", "buses", "no buses");
    std::set<int> seen_buses;
    for(BusId b : c.buses)
        if(!seen_buses.insert(b.index).second)
            flag(fmt::format("bus {}", b.index), "unique", "duplicate bus id");
    if(!c.bus_position(c.reference_bus))
        flag("case", "reference_bus", fmt::format("bus {} not in case", c.reference_bus.index));
    if(c.base_mva <= 0)
        flag("case", "base_mva>0", "");

    for(const auto& l : c.lines)
    {
        std::string e = "line " + l.id;
        if(l.from_bus == l.to_bus)
            flag(e, "from_bus!=to_bus", "line is a self loop");
        if(!c.bus_position(l.from_bus) || !c.bus_position(l.to_bus))
            flag(e, "bus_reference", "endpoint bus not in case");
        if(!(l.susceptance > 0))
            flag(e, "susceptance>0", "", l.susceptance);
        if(!(l.capacity > 0))
            flag(e, "capacity>0", "", l.capacity);
    }

    for(const auto& u : c.units)
    {
        std::string e = "unit " + u.id;
        if(!c.bus_position(u.bus))
            flag(e, "bus_reference", fmt::format("bus {} not in case", u.bus.index));
        if(!parse_fuel(u.fuel))
            flag(e, "fuel", fmt::format("unknown fuel label '{}'", u.fuel));
        if(u.p_min < 0)
            flag(e, "p_min>=0", "", u.p_min);
        if(u.p_min > u.p_max)
            flag(e, "p_min<=p_max", fmt::format("p_min {} exceeds p_max {}", u.p_min, u.p_max),
                 u.p_min - u.p_max);
        if(!(u.ramp_up > 0))
            flag(e, "ramp_up>0", "");
        if(!(u.ramp_down > 0))
            flag(e, "ramp_down>0", "");
        if(u.min_up < 1)
            flag(e, "min_up>=1", "");
        if(u.min_down < 1)
            flag(e, "min_down>=1", "");
        if(u.startup_cost < 0 || u.fixed_cost < 0)
            flag(e, "costs>=0", "");
        if(u.blocks.empty())
            flag(e, "blocks", "no cost blocks");
        double width = 0;
        for(std::size_t k = 0; k < u.blocks.size(); ++k)
        {
            const auto& b = u.blocks[k];
            width += b.size_mw;
            if(!(b.size_mw > 0))
                flag(e, "block_size>0", fmt::format("block {}", k + 1));
            if(b.marginal_cost < 0)
                flag(e, "costs>=0", fmt::format("block {}", k + 1));
            if(k > 0 && b.marginal_cost < u.blocks[k - 1].marginal_cost)
                flag(e, "block_convexity", fmt::format("block {} cheaper than block {}", k + 1, k));
        }
        if(std::abs(width - u.p_max) > 1e-6 * std::max(1.0, u.p_max))
            flag(e, "sum(blocks)=p_max", fmt::format("blocks span {} MW, p_max {}", width, u.p_max),
                 width - u.p_max);
        if(u.energy_budget)
        {
            if(*u.energy_budget < 0)
                flag(e, "energy_budget>=0", "");
            if(*u.energy_budget > u.p_max * 720.0 + 1e-9)
                flag(e, "energy_budget<=p_max*720", "", *u.energy_budget - u.p_max * 720.0);
        }
    }

    double share_sum = 0;
    for(const auto& [bus, share] : c.demand_share)
    {
        if(!c.bus_position(bus))
            flag(fmt::format("bus {}", bus.index), "share_bus", "share for unknown bus");
        if(share < 0)
            flag(fmt::format("bus {}", bus.index), "share>=0", "", share);
        share_sum += share;
    }
    if(!c.demand_share.empty() && std::abs(share_sum - 1.0) > 1e-9)
        flag("case", "sum(shares)=1", fmt::format("shares sum to {:.12g}", share_sum),
             share_sum - 1.0);

    if(!connected(c))
        flag("case", "connected", "network graph is disconnected");

    for(const auto& [id, s] : c.initial)
    {
        std::string e = "unit " + id;
        auto pos = c.unit_position(id);
        if(!pos)
        {
            flag(e, "initial_reference", "initial state for unknown unit");
            continue;
        }
        const auto& u = c.units[*pos];
        if(s.ut0 < 0 || s.dt0 < 0)
            flag(e, "initial_counts>=0", "");
        if(s.on && (s.g0 < u.p_min - 1e-9 || s.g0 > u.p_max + 1e-9 || s.dt0 != 0))
            flag(e, "initial_on_state", "on requires p_min<=g0<=p_max and dt0=0");
        if(!s.on && (s.g0 != 0.0 || s.ut0 != 0))
            flag(e, "initial_off_state", "off requires g0=0 and ut0=0");
    }
    return out;
}

InitialConditions cold_start(const NetworkCase& c)
{
    InitialConditions init(c.units.size());
    for(std::size_t i = 0; i < c.units.size(); ++i)
        init[i] = {0.0, false, 0, c.units[i].min_down};
    return init;
}

InitialConditions default_initial_conditions(const NetworkCase& c)
{
    auto init = cold_start(c);
    for(const auto& [id, s] : c.initial)
        if(auto pos = c.unit_position(id))
            init[*pos] = s;
    return init;
}

} // namespace seasonal
