#include "seasonal/errors.hpp"
#include "seasonal/solver.hpp"

#include <Highs.h>
#include <fmt/format.h>

#include <limits>

namespace seasonal
{
namespace
{

class HighsBackend final : public SolverBackend
{
  public:
    std::string_view name() const override { return "highs"; }

    SolveResult solve(const Model& model, const SolveOptions& options) override
    {
        HighsModel hm;
        HighsLp& lp = hm.lp_;
        const auto& vars = model.variables();
        const auto& rows = model.constraints();
        lp.num_col_ = static_cast<HighsInt>(vars.size());
        lp.num_row_ = static_cast<HighsInt>(rows.size());
        lp.sense_ = ObjSense::kMinimize;
        lp.offset_ = model.objective_offset();
        lp.col_cost_ = model.costs();
        lp.col_lower_.resize(vars.size());
        lp.col_upper_.resize(vars.size());
        bool mip = false;
        lp.integrality_.assign(vars.size(), HighsVarType::kContinuous);
        for(std::size_t j = 0; j < vars.size(); ++j)
        {
            lp.col_lower_[j] = vars[j].lower;
            lp.col_upper_[j] = vars[j].upper;
            if(vars[j].kind == VarKind::binary)
            {
                lp.integrality_[j] = HighsVarType::kInteger;
                mip = true;
            }
        }
        if(!mip)
            lp.integrality_.clear();

        const double inf = kHighsInf;
        lp.row_lower_.resize(rows.size());
        lp.row_upper_.resize(rows.size());
        std::vector<HighsInt> count(vars.size() + 1, 0);
        for(std::size_t i = 0; i < rows.size(); ++i)
        {
            const auto& r = rows[i];
            lp.row_lower_[i] = r.sense == Sense::less_equal ? -inf : r.rhs;
            lp.row_upper_[i] = r.sense == Sense::greater_equal ? inf : r.rhs;
            for(const auto& t : r.terms)
                ++count[t.var.index + 1];
        }
        // Column-wise assembly; duplicate (row, column) terms are merged.
        auto& a = lp.a_matrix_;
        a.format_ = MatrixFormat::kColwise;
        a.num_col_ = lp.num_col_;
        a.num_row_ = lp.num_row_;
        a.start_.assign(vars.size() + 1, 0);
        for(std::size_t j = 0; j < vars.size(); ++j)
            a.start_[j + 1] = a.start_[j] + count[j + 1];
        std::vector<HighsInt> fill(a.start_.begin(), a.start_.end() - 1);
        a.index_.assign(static_cast<std::size_t>(a.start_.back()), 0);
        a.value_.assign(static_cast<std::size_t>(a.start_.back()), 0.0);
        std::vector<HighsInt> last_row(vars.size(), -1);
        std::vector<HighsInt> last_pos(vars.size(), -1);
        for(std::size_t i = 0; i < rows.size(); ++i)
            for(const auto& t : rows[i].terms)
            {
                auto j = t.var.index;
                if(last_row[j] == static_cast<HighsInt>(i))
                {
                    a.value_[static_cast<std::size_t>(last_pos[j])] += t.coefficient;
                    continue;
                }
                auto pos = fill[j]++;
                a.index_[static_cast<std::size_t>(pos)] = static_cast<HighsInt>(i);
                a.value_[static_cast<std::size_t>(pos)] = t.coefficient;
                last_row[j] = static_cast<HighsInt>(i);
                last_pos[j] = pos;
            }
        compact(a, fill);

        Highs highs;
        highs.setOptionValue("output_flag", options.verbose);
        highs.setOptionValue("log_to_console", options.verbose);
        highs.setOptionValue("threads", static_cast<HighsInt>(std::max(options.threads, 1)));
        highs.setOptionValue("mip_rel_gap", options.mip_gap);
        highs.setOptionValue("primal_feasibility_tolerance", 1e-8);
        highs.setOptionValue("mip_feasibility_tolerance", 1e-7);
        if(options.time_limit)
            highs.setOptionValue("time_limit", *options.time_limit);

        if(highs.passModel(std::move(hm)) == HighsStatus::kError)
            throw SolverError("highs rejected the model");
        if(highs.run() == HighsStatus::kError)
            throw SolverError("highs failed to run");

        HighsModelStatus status = highs.getModelStatus();
        if(status == HighsModelStatus::kUnboundedOrInfeasible)
        {
            highs.setOptionValue("presolve", "off");
            highs.clearSolver();
            if(highs.run() == HighsStatus::kError)
                throw SolverError("highs failed to run without presolve");
            status = highs.getModelStatus();
        }

        SolveResult result;
        const HighsInfo& info = highs.getInfo();
        const bool has_point = info.primal_solution_status == kSolutionStatusFeasible;
        switch(status)
        {
        case HighsModelStatus::kOptimal:
            result.status = SolveStatus::optimal;
            break;
        case HighsModelStatus::kInfeasible:
            result.status = SolveStatus::infeasible;
            return result;
        case HighsModelStatus::kUnbounded:
        case HighsModelStatus::kUnboundedOrInfeasible:
            result.status = status == HighsModelStatus::kUnbounded ? SolveStatus::unbounded
                                                                   : SolveStatus::infeasible;
            return result;
        case HighsModelStatus::kTimeLimit:
        case HighsModelStatus::kIterationLimit:
        case HighsModelStatus::kSolutionLimit:
        case HighsModelStatus::kInterrupt:
            if(!has_point)
                throw SolverError(fmt::format("highs stopped ({}) without an incumbent",
                                              highs.modelStatusToString(status)));
            result.status = SolveStatus::gap_limit;
            break;
        default:
            throw SolverError(fmt::format("highs returned status '{}'", highs.modelStatusToString(status)));
        }
        result.values = highs.getSolution().col_value;
        result.objective = info.objective_function_value;
        if(mip)
        {
            result.mip_gap = info.mip_gap;
            result.best_bound = info.mip_dual_bound;
        }
        else
            result.best_bound = result.objective;
        return result;
    }

  private:
    // Removes the holes left by merged duplicate terms.
    static void compact(HighsSparseMatrix& a, const std::vector<HighsInt>& fill)
    {
        HighsInt out = 0;
        for(std::size_t j = 0; j + 1 < a.start_.size(); ++j)
        {
            HighsInt begin = a.start_[j];
            a.start_[j] = out;
            for(HighsInt p = begin; p < fill[j]; ++p, ++out)
            {
                a.index_[static_cast<std::size_t>(out)] = a.index_[static_cast<std::size_t>(p)];
                a.value_[static_cast<std::size_t>(out)] = a.value_[static_cast<std::size_t>(p)];
            }
        }
        a.start_.back() = out;
        a.index_.resize(static_cast<std::size_t>(out));
        a.value_.resize(static_cast<std::size_t>(out));
    }
};

} // namespace

std::unique_ptr<SolverBackend> make_backend(std::string_view key)
{
    if(key == "highs")
        return std::make_unique<HighsBackend>();
    throw SolverError(fmt::format("solver backend '{}' is not available (have: highs)", key));
}

std::vector<std::string> available_backends()
{
    return {"highs"};
}

} // namespace seasonal
