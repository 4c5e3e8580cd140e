#ifndef SEASONAL_DEMAND_HPP
#define SEASONAL_DEMAND_HPP

#include "seasonal/grid.hpp"
#include "seasonal/system_model.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace seasonal
{

inline constexpr int hours_per_day = 24;
inline constexpr int days_per_month = 30;
inline constexpr int hours_per_month = hours_per_day * days_per_month;

/// 1-based month ordinal; month m spans hours [(m-1)*720, m*720) of a history.
struct MonthIndex
{
    int ordinal = 1;

    int first_hour() const noexcept { return (ordinal - 1) * hours_per_month; }
    friend auto operator<=>(const MonthIndex&, const MonthIndex&) = default;
};

/// Hourly demand (MW) per bus over a horizon starting at hour 0.
class DemandSeries
{
  public:
    DemandSeries() = default;
    DemandSeries(std::vector<BusId> buses, int hours);

    int hours() const noexcept { return static_cast<int>(values_.cols()); }
    const std::vector<BusId>& buses() const noexcept { return buses_; }
    std::size_t bus_count() const noexcept { return buses_.size(); }
    std::optional<std::size_t> bus_position(BusId bus) const;

    double& at(std::size_t bus_pos, int hour) { return values_(bus_pos, static_cast<std::size_t>(hour)); }
    double at(std::size_t bus_pos, int hour) const { return values_(bus_pos, static_cast<std::size_t>(hour)); }
    /// Zero for buses not carried by the series.
    double at(BusId bus, int hour) const;

    std::span<const double> bus_series(std::size_t bus_pos) const { return values_.row(bus_pos); }
    double system_total(int hour) const;
    double bus_total(std::size_t bus_pos) const;
    double total() const;
    double peak_system() const;

    /// Hours [start, start + hours).
    DemandSeries slice(int start, int hours) const;
    /// The 720-hour block of `month`; throws ValidationError when out of range.
    DemandSeries month(MonthIndex m) const;
    int month_count() const noexcept { return hours() / hours_per_month; }

    /// Every value scaled by `factor`.
    DemandSeries scaled(double factor) const;

    friend bool operator==(const DemandSeries&, const DemandSeries&) = default;

  private:
    std::vector<BusId> buses_;
    Grid<double> values_;
};

/// Distributes a system-total hourly series over buses by the case shares.
DemandSeries allocate_by_share(const NetworkCase& c, const std::vector<double>& system_total);

/// Reindexes `d` onto the case bus order, adding zero rows for buses the
/// series does not carry. Throws ValidationError for buses unknown to the case.
DemandSeries conform_to_case(const DemandSeries& d, const NetworkCase& c);

/// Reads `hour,bus,demand_mw` or, when `c` supplies shares, `hour,demand_mw`.
DemandSeries parse_demand(std::string_view text, const NetworkCase* c = nullptr);
DemandSeries load_demand(const std::string& path, const NetworkCase* c = nullptr);
/// Writes the per-bus `hour,bus,demand_mw` table; hours offset by `first_hour`.
std::string emit_demand(const DemandSeries& d, int first_hour = 0);

struct ClimatologyProfile
{
    std::array<double, hours_per_day> hourly_fractions{};
    std::array<double, days_per_month> daily_fractions{};
};

/// Observed demand for the month, unchanged.
DemandSeries perfect_forecast(const DemandSeries& observed, MonthIndex month);

/// Share of total system demand falling in each hour of the day.
std::array<double, hours_per_day> hourly_fractions(const DemandSeries& history);

/// Share of monthly system demand on each day, averaged over `months`.
std::array<double, days_per_month> daily_fractions(const DemandSeries& history,
                                                   const std::vector<MonthIndex>& months);

/// Hourly and daily fractions over the given reference months of `history`
/// (all whole months when `months` is empty).
ClimatologyProfile build_climatology(const DemandSeries& history,
                                     std::vector<MonthIndex> months = {});

/// Per-bus monthly totals of `observed` spread over the month by the
/// climatological hour-of-day and day-of-month fractions.
DemandSeries pfml_forecast(const DemandSeries& observed, const ClimatologyProfile& climatology,
                           MonthIndex month);

} // namespace seasonal
#endif // SEASONAL_DEMAND_HPP
