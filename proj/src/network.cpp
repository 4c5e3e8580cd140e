#include "seasonal/network.hpp"

#include "seasonal/errors.hpp"

#include <Eigen/Dense>

namespace seasonal
{

DcNetwork::DcNetwork(const NetworkCase& c) : base_mva_(c.base_mva)
{
    const std::size_t n = c.buses.size();
    auto ref = c.bus_position(c.reference_bus);
    if(!ref)
        throw ValidationError("reference bus is not part of the case");
    std::vector<long> reduced(n, -1);
    for(std::size_t b = 0; b < n; ++b)
        if(b != *ref)
        {
            reduced[b] = static_cast<long>(non_ref_.size());
            non_ref_.push_back(b);
        }

    const auto m = static_cast<Eigen::Index>(non_ref_.size());
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(m, m);
    for(const auto& l : c.lines)
    {
        Branch br{*c.bus_position(l.from_bus), *c.bus_position(l.to_bus), c.base_mva * l.susceptance};
        branches_.push_back(br);
        long f = reduced[br.from], t = reduced[br.to];
        if(f >= 0)
            B(f, f) += l.susceptance;
        if(t >= 0)
            B(t, t) += l.susceptance;
        if(f >= 0 && t >= 0)
        {
            B(f, t) -= l.susceptance;
            B(t, f) -= l.susceptance;
        }
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(B);
    if(m > 0 && !lu.isInvertible())
        throw ValidationError("network susceptance matrix is singular (disconnected buses?)");
    Eigen::MatrixXd inv = m > 0 ? Eigen::MatrixXd(lu.inverse()) : Eigen::MatrixXd(0, 0);

    b_inverse_ = Grid<double>(n, n, 0.0);
    for(Eigen::Index i = 0; i < m; ++i)
        for(Eigen::Index j = 0; j < m; ++j)
            b_inverse_(non_ref_[i], non_ref_[j]) = inv(i, j);

    // flow_l = coefficient_l * (theta_from - theta_to), theta = Binv * P / base
    ptdf_ = Grid<double>(branches_.size(), n, 0.0);
    for(std::size_t l = 0; l < branches_.size(); ++l)
    {
        const auto& br = branches_[l];
        for(std::size_t b = 0; b < n; ++b)
            ptdf_(l, b) = br.coefficient * (b_inverse_(br.from, b) - b_inverse_(br.to, b)) / base_mva_;
    }
}

std::vector<double> DcNetwork::angles(const std::vector<double>& injections) const
{
    const std::size_t n = b_inverse_.rows();
    if(injections.size() != n)
        throw ValidationError("injection vector does not match the bus count");
    std::vector<double> theta(n, 0.0);
    for(std::size_t i : non_ref_)
    {
        double sum = 0;
        for(std::size_t j : non_ref_)
            sum += b_inverse_(i, j) * injections[j];
        theta[i] = sum / base_mva_;
    }
    return theta;
}

std::vector<double> DcNetwork::flows(const std::vector<double>& injections) const
{
    auto theta = angles(injections);
    std::vector<double> out(branches_.size());
    for(std::size_t l = 0; l < branches_.size(); ++l)
        out[l] = branches_[l].coefficient * (theta[branches_[l].from] - theta[branches_[l].to]);
    return out;
}

} // namespace seasonal
