#include "seasonal/solver.hpp"

#include "seasonal/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace seasonal
{

VariableHandle Model::add_variable(VarKind kind, double lower, double upper, double cost)
{
    if(kind == VarKind::binary)
    {
        lower = std::max(lower, 0.0);
        upper = std::min(upper, 1.0);
    }
    if(std::isnan(lower) || std::isnan(upper) || !std::isfinite(cost))
        throw std::invalid_argument("variable bounds and cost must be numbers");
    variables_.push_back({kind, lower, upper});
    costs_.push_back(cost);
    return {variables_.size() - 1};
}

void Model::check_handle(VariableHandle v) const
{
    if(!v.valid() || v.index >= variables_.size())
        throw std::invalid_argument(fmt::format("variable handle {} not declared in model", v.index));
}

void Model::add_constraint(LinearConstraint row)
{
    if(row.terms.empty())
        throw std::invalid_argument("constraint without terms");
    for(const auto& t : row.terms)
    {
        check_handle(t.var);
        if(!std::isfinite(t.coefficient))
            throw std::invalid_argument("non-finite constraint coefficient");
    }
    if(!std::isfinite(row.rhs))
        throw std::invalid_argument("non-finite constraint right-hand side");
    constraints_.push_back(std::move(row));
}

void Model::set_cost(VariableHandle v, double cost)
{
    check_handle(v);
    costs_[v.index] = cost;
}

void Model::set_bounds(VariableHandle v, double lower, double upper)
{
    check_handle(v);
    variables_[v.index].lower = lower;
    variables_[v.index].upper = upper;
}

std::size_t Model::binary_count() const noexcept
{
    return static_cast<std::size_t>(std::count_if(variables_.begin(), variables_.end(), [](const Variable& v) {
        return v.kind == VarKind::binary;
    }));
}

double Model::objective_value(const std::vector<double>& values) const
{
    double obj = offset_;
    for(std::size_t j = 0; j < costs_.size(); ++j)
        obj += costs_[j] * values.at(j);
    return obj;
}

std::string_view to_string(SolveStatus s)
{
    switch(s)
    {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::unbounded: return "unbounded";
    case SolveStatus::gap_limit: return "gap-limit";
    }
    return "unknown";
}

double Residuals::max() const noexcept
{
    return std::max({bound, row, integrality});
}

Residuals compute_residuals(const Model& model, const std::vector<double>& values)
{
    Residuals r;
    const auto& vars = model.variables();
    if(values.size() != vars.size())
        throw SolverError(fmt::format("solution has {} values for {} variables", values.size(),
                                      vars.size()));
    for(std::size_t j = 0; j < vars.size(); ++j)
    {
        double x = values[j];
        r.bound = std::max({r.bound, vars[j].lower - x, x - vars[j].upper});
        if(vars[j].kind == VarKind::binary)
            r.integrality = std::max(r.integrality, std::abs(x - std::round(x)));
    }
    const auto& rows = model.constraints();
    for(std::size_t i = 0; i < rows.size(); ++i)
    {
        double lhs = 0;
        for(const auto& t : rows[i].terms)
            lhs += t.coefficient * values[t.var.index];
        double viol = 0;
        switch(rows[i].sense)
        {
        case Sense::less_equal: viol = lhs - rows[i].rhs; break;
        case Sense::greater_equal: viol = rows[i].rhs - lhs; break;
        case Sense::equal: viol = std::abs(lhs - rows[i].rhs); break;
        }
        if(viol > r.row)
        {
            r.row = viol;
            r.worst_row = i;
        }
    }
    return r;
}

Model relax_integrality(const Model& model)
{
    Model out;
    const auto& vars = model.variables();
    for(std::size_t j = 0; j < vars.size(); ++j)
        out.add_variable(VarKind::continuous, vars[j].lower, vars[j].upper, model.costs()[j]);
    for(const auto& row : model.constraints())
        out.add_constraint(row);
    out.set_objective_offset(model.objective_offset());
    return out;
}

Model fix_integers(const Model& model, const std::vector<double>& values)
{
    Model out = relax_integrality(model);
    const auto& vars = model.variables();
    for(std::size_t j = 0; j < vars.size(); ++j)
        if(vars[j].kind == VarKind::binary)
        {
            double v = std::round(values.at(j));
            out.set_bounds({j}, v, v);
        }
    return out;
}

SolveResult solve(const Model& model, const SolveOptions& options)
{
    if(model.variable_count() == 0)
        throw SolverError("cannot solve an empty model");
    auto backend = make_backend(options.backend);
    const auto start = std::chrono::steady_clock::now();
    SolveResult result = backend->solve(model, options);

    if(result.has_solution() && model.is_mip())
    {
        Model fixed = fix_integers(model, result.values);
        SolveOptions lp_options = options;
        SolveResult polished = backend->solve(fixed, lp_options);
        if(polished.status == SolveStatus::optimal)
        {
            result.values = std::move(polished.values);
            for(std::size_t j = 0; j < model.variable_count(); ++j)
                if(model.variables()[j].kind == VarKind::binary)
                    result.values[j] = std::round(result.values[j]);
            result.objective = model.objective_value(result.values);
        }
    }
    result.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    if(result.has_solution() &&
       (result.status == SolveStatus::optimal || result.status == SolveStatus::gap_limit))
    {
        Residuals r = compute_residuals(model, result.values);
        if(r.max() > feasibility_tolerance)
            throw SolverError(fmt::format("{} returned a point failing the residual check: bound {:.3g}, "
                                          "row {:.3g} (row {}), integrality {:.3g}",
                                          backend->name(), r.bound, r.row, r.worst_row, r.integrality));
    }
    return result;
}

} // namespace seasonal
