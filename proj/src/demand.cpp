#include "seasonal/demand.hpp"

#include "seasonal/errors.hpp"
#include "text_util.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

namespace seasonal
{

DemandSeries::DemandSeries(std::vector<BusId> buses, int hours)
    : buses_(std::move(buses)), values_(buses_.size(), static_cast<std::size_t>(std::max(hours, 0)), 0.0)
{}

std::optional<std::size_t> DemandSeries::bus_position(BusId bus) const
{
    auto it = std::find(buses_.begin(), buses_.end(), bus);
    if(it == buses_.end())
        return std::nullopt;
    return static_cast<std::size_t>(it - buses_.begin());
}

double DemandSeries::at(BusId bus, int hour) const
{
    auto pos = bus_position(bus);
    return pos ? at(*pos, hour) : 0.0;
}

double DemandSeries::system_total(int hour) const
{
    double s = 0;
    for(std::size_t b = 0; b < buses_.size(); ++b)
        s += at(b, hour);
    return s;
}

double DemandSeries::bus_total(std::size_t bus_pos) const
{
    auto row = values_.row(bus_pos);
    return std::accumulate(row.begin(), row.end(), 0.0);
}

double DemandSeries::total() const
{
    double s = 0;
    for(std::size_t b = 0; b < buses_.size(); ++b)
        s += bus_total(b);
    return s;
}

double DemandSeries::peak_system() const
{
    double peak = 0;
    for(int t = 0; t < hours(); ++t)
        peak = std::max(peak, system_total(t));
    return peak;
}

DemandSeries DemandSeries::slice(int start, int count) const
{
    if(start < 0 || count < 0 || start + count > hours())
        throw ValidationError(fmt::format("demand slice [{}, {}) outside horizon of {} hours", start,
                                          start + count, hours()));
    DemandSeries out;
    out.buses_ = buses_;
    out.values_ = values_.columns(static_cast<std::size_t>(start), static_cast<std::size_t>(count));
    return out;
}

DemandSeries DemandSeries::month(MonthIndex m) const
{
    if(m.ordinal < 1 || m.first_hour() + hours_per_month > hours())
        throw ValidationError(fmt::format("month {} outside demand range of {} hours", m.ordinal,
                                          hours()));
    return slice(m.first_hour(), hours_per_month);
}

DemandSeries DemandSeries::scaled(double factor) const
{
    DemandSeries out = *this;
    for(std::size_t b = 0; b < buses_.size(); ++b)
        for(int t = 0; t < hours(); ++t)
            out.at(b, t) *= factor;
    return out;
}

DemandSeries allocate_by_share(const NetworkCase& c, const std::vector<double>& system_total)
{
    if(c.demand_share.empty())
        throw ValidationError("case has no [shares]; system-total demand cannot be allocated to buses");
    DemandSeries d(c.buses, static_cast<int>(system_total.size()));
    for(std::size_t b = 0; b < c.buses.size(); ++b)
    {
        auto it = c.demand_share.find(c.buses[b]);
        double share = it == c.demand_share.end() ? 0.0 : it->second;
        for(std::size_t t = 0; t < system_total.size(); ++t)
            d.at(b, static_cast<int>(t)) = share * system_total[t];
    }
    return d;
}

DemandSeries conform_to_case(const DemandSeries& d, const NetworkCase& c)
{
    for(BusId b : d.buses())
        if(!c.bus_position(b))
            throw ValidationError(fmt::format("demand references bus {} absent from case", b.index));
    if(d.buses() == c.buses)
        return d;
    DemandSeries out(c.buses, d.hours());
    for(std::size_t b = 0; b < c.buses.size(); ++b)
        if(auto src = d.bus_position(c.buses[b]))
            for(int t = 0; t < d.hours(); ++t)
                out.at(b, t) = d.at(*src, t);
    return out;
}

DemandSeries parse_demand(std::string_view text, const NetworkCase* c)
{
    using detail::parse_double;
    using detail::parse_int;
    using detail::split;
    using detail::trim;

    std::istringstream in{std::string(text)};
    std::string raw;
    int line = 0;
    bool header_seen = false;
    bool per_bus = true;
    std::map<int, std::map<int, double>> by_bus; // bus -> hour -> MW
    std::map<int, double> system;                 // hour -> MW
    int max_hour = -1;

    while(std::getline(in, raw))
    {
        ++line;
        std::string_view body = raw;
        if(auto hash = body.find('#'); hash != std::string_view::npos)
            body = body.substr(0, hash);
        body = trim(body);
        if(body.empty())
            continue;
        auto f = split(body, ',');
        if(!header_seen)
        {
            if(f.size() == 3 && f[0] == "hour" && f[1] == "bus" && f[2] == "demand_mw")
                per_bus = true;
            else if(f.size() == 2 && f[0] == "hour" && f[1] == "demand_mw")
            {
                per_bus = false;
                if(c == nullptr || c->demand_share.empty())
                    throw ParseError("system-total demand table needs a case with [shares]", line);
            }
            else
                throw ParseError(fmt::format("line {}: expected header 'hour,bus,demand_mw' or "
                                             "'hour,demand_mw'", line),
                                 line);
            header_seen = true;
            continue;
        }
        if(f.size() != (per_bus ? 3u : 2u))
            throw ParseError(fmt::format("line {}: expected {} fields", line, per_bus ? 3 : 2), line);
        int hour = parse_int(f[0], line, "hour");
        if(hour < 0)
            throw ParseError(fmt::format("line {}: negative hour", line), line, "hour");
        double mw = parse_double(f.back(), line, "demand_mw");
        if(mw < 0)
            throw ParseError(fmt::format("line {}: negative demand", line), line, "demand_mw");
        max_hour = std::max(max_hour, hour);
        if(per_bus)
        {
            int bus = parse_int(f[1], line, "bus");
            if(!by_bus[bus].emplace(hour, mw).second)
                throw ParseError(fmt::format("line {}: duplicate row for hour {} bus {}", line, hour, bus),
                                 line);
        }
        else if(!system.emplace(hour, mw).second)
            throw ParseError(fmt::format("line {}: duplicate row for hour {}", line, hour), line);
    }
    if(!header_seen)
        throw ParseError("demand table is empty");

    const int hours = max_hour + 1;
    if(!per_bus)
    {
        if(static_cast<int>(system.size()) != hours)
            throw ParseError(fmt::format("demand table misses {} of {} hours",
                                         hours - static_cast<int>(system.size()), hours));
        std::vector<double> total(static_cast<std::size_t>(hours));
        for(const auto& [h, mw] : system)
            total[static_cast<std::size_t>(h)] = mw;
        return allocate_by_share(*c, total);
    }

    std::vector<BusId> buses;
    for(const auto& [bus, rows] : by_bus)
    {
        if(static_cast<int>(rows.size()) != hours)
            throw ParseError(fmt::format("bus {} misses {} of {} hours", bus,
                                         hours - static_cast<int>(rows.size()), hours));
        buses.push_back({bus});
    }
    DemandSeries d(buses, hours);
    std::size_t b = 0;
    for(const auto& [bus, rows] : by_bus)
    {
        for(const auto& [h, mw] : rows)
            d.at(b, h) = mw;
        ++b;
    }
    return c ? conform_to_case(d, *c) : d;
}

DemandSeries load_demand(const std::string& path, const NetworkCase* c)
{
    std::ifstream in(path);
    if(!in)
        throw ParseError("cannot open demand file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_demand(buf.str(), c);
}

std::string emit_demand(const DemandSeries& d, int first_hour)
{
    std::string out = "hour,bus,demand_mw\n";
    for(int t = 0; t < d.hours(); ++t)
        for(std::size_t b = 0; b < d.bus_count(); ++b)
            out += fmt::format("{},{},{}\n", first_hour + t, d.buses()[b].index, d.at(b, t));
    return out;
}

DemandSeries perfect_forecast(const DemandSeries& observed, MonthIndex month)
{
    return observed.month(month);
}

std::array<double, hours_per_day> hourly_fractions(const DemandSeries& history)
{
    if(history.hours() == 0 || history.hours() % hours_per_day != 0)
        throw ValidationError(fmt::format("history of {} hours is not a whole number of days",
                                          history.hours()));
    std::array<double, hours_per_day> sums{};
    for(int t = 0; t < history.hours(); ++t)
        sums[static_cast<std::size_t>(t % hours_per_day)] += history.system_total(t);
    double total = std::accumulate(sums.begin(), sums.end(), 0.0);
    if(!(total > 0))
        throw ValidationError("history has zero total demand");
    for(auto& s : sums)
        s /= total;
    return sums;
}

std::array<double, days_per_month> daily_fractions(const DemandSeries& history,
                                                   const std::vector<MonthIndex>& months)
{
    if(months.empty())
        throw ValidationError("daily fractions need at least one month");
    std::array<double, days_per_month> mean{};
    for(MonthIndex m : months)
    {
        DemandSeries block = history.month(m);
        std::array<double, days_per_month> day{};
        for(int t = 0; t < hours_per_month; ++t)
            day[static_cast<std::size_t>(t / hours_per_day)] += block.system_total(t);
        double total = std::accumulate(day.begin(), day.end(), 0.0);
        if(!(total > 0))
            throw ValidationError(fmt::format("month {} has zero total demand", m.ordinal));
        for(std::size_t k = 0; k < day.size(); ++k)
            mean[k] += day[k] / total;
    }
    for(auto& v : mean)
        v /= static_cast<double>(months.size());
    return mean;
}

ClimatologyProfile build_climatology(const DemandSeries& history, std::vector<MonthIndex> months)
{
    if(months.empty())
        for(int m = 1; m <= history.month_count(); ++m)
            months.push_back({m});
    if(months.empty())
        throw ValidationError("history shorter than one month");

    // Hourly shape over the same reference months.
    DemandSeries reference(history.buses(), static_cast<int>(months.size()) * hours_per_month);
    for(std::size_t k = 0; k < months.size(); ++k)
    {
        DemandSeries block = history.month(months[k]);
        for(std::size_t b = 0; b < block.bus_count(); ++b)
            for(int t = 0; t < hours_per_month; ++t)
                reference.at(b, static_cast<int>(k) * hours_per_month + t) = block.at(b, t);
    }
    return {hourly_fractions(reference), daily_fractions(history, months)};
}

DemandSeries pfml_forecast(const DemandSeries& observed, const ClimatologyProfile& climatology,
                           MonthIndex month)
{
    auto check = [](auto const& fractions, const char* what) {
        double sum = 0;
        for(double f : fractions)
        {
            if(f < 0)
                throw ValidationError(fmt::format("negative {} fraction", what));
            sum += f;
        }
        if(std::abs(sum - 1.0) > 1e-12)
            throw ValidationError(fmt::format("{} fractions sum to {:.15g}, not 1", what, sum));
    };
    check(climatology.hourly_fractions, "hourly");
    check(climatology.daily_fractions, "daily");

    DemandSeries block = observed.month(month);
    DemandSeries out(block.buses(), hours_per_month);
    for(std::size_t b = 0; b < block.bus_count(); ++b)
    {
        const double monthly = block.bus_total(b);
        for(int t = 0; t < hours_per_month; ++t)
            out.at(b, t) = climatology.hourly_fractions[static_cast<std::size_t>(t % hours_per_day)] *
                           climatology.daily_fractions[static_cast<std::size_t>(t / hours_per_day)] *
                           monthly;
    }
    return out;
}

} // namespace seasonal
