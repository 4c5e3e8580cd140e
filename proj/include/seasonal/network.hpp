#ifndef SEASONAL_NETWORK_HPP
#define SEASONAL_NETWORK_HPP

#include "seasonal/grid.hpp"
#include "seasonal/system_model.hpp"

#include <vector>

namespace seasonal
{

/// DC power-flow sensitivities of a case. Injections are MW per bus in case
/// bus order and must sum to zero; the reference bus absorbs any residue.
class DcNetwork
{
  public:
    explicit DcNetwork(const NetworkCase& c);

    /// line x bus: MW of flow on each line per MW injected at each bus.
    const Grid<double>& ptdf() const noexcept { return ptdf_; }

    std::vector<double> angles(const std::vector<double>& injections) const; // rad, reference = 0
    std::vector<double> flows(const std::vector<double>& injections) const;  // MW, from -> to

  private:
    struct Branch
    {
        std::size_t from, to;
        double coefficient; // base_mva * susceptance
    };
    double base_mva_;
    std::vector<Branch> branches_;
    std::vector<std::size_t> non_ref_; // case bus positions other than the reference
    Grid<double> b_inverse_;           // bus x bus, per unit, zero row/column at the reference
    Grid<double> ptdf_;
};

} // namespace seasonal
#endif // SEASONAL_NETWORK_HPP
