#ifndef SEASONAL_SOLVER_HPP
#define SEASONAL_SOLVER_HPP

#include <cstddef>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace seasonal
{

enum class VarKind
{
    continuous,
    binary
};

struct VariableHandle
{
    std::size_t index = static_cast<std::size_t>(-1);

    bool valid() const noexcept { return index != static_cast<std::size_t>(-1); }
    friend bool operator==(const VariableHandle&, const VariableHandle&) = default;
};

struct Variable
{
    VarKind kind = VarKind::continuous;
    double lower = 0.0;
    double upper = 0.0;
};

enum class Sense
{
    less_equal,
    equal,
    greater_equal
};

struct Term
{
    VariableHandle var;
    double coefficient = 0.0;
};

struct LinearConstraint
{
    std::vector<Term> terms;
    Sense sense = Sense::less_equal;
    double rhs = 0.0;
};

/// Minimization model: variables, linear rows and a linear objective.
/// Single owner while being built.
class Model
{
  public:
    VariableHandle add_variable(VarKind kind, double lower, double upper, double cost = 0.0);
    VariableHandle add_binary(double cost = 0.0) { return add_variable(VarKind::binary, 0.0, 1.0, cost); }
    VariableHandle add_continuous(double lower, double upper, double cost = 0.0)
    {
        return add_variable(VarKind::continuous, lower, upper, cost);
    }

    /// Throws std::invalid_argument on empty rows, foreign handles or
    /// non-finite coefficients.
    void add_constraint(LinearConstraint row);
    void add_constraint(std::vector<Term> terms, Sense sense, double rhs)
    {
        add_constraint(LinearConstraint{std::move(terms), sense, rhs});
    }

    void set_cost(VariableHandle v, double cost);
    void set_bounds(VariableHandle v, double lower, double upper);
    void set_objective_offset(double offset) { offset_ = offset; }

    const std::vector<Variable>& variables() const noexcept { return variables_; }
    const std::vector<LinearConstraint>& constraints() const noexcept { return constraints_; }
    const std::vector<double>& costs() const noexcept { return costs_; }
    double objective_offset() const noexcept { return offset_; }

    std::size_t variable_count() const noexcept { return variables_.size(); }
    std::size_t binary_count() const noexcept;
    std::size_t constraint_count() const noexcept { return constraints_.size(); }
    bool is_mip() const noexcept { return binary_count() > 0; }

    double objective_value(const std::vector<double>& values) const;

  private:
    void check_handle(VariableHandle v) const;

    std::vector<Variable> variables_;
    std::vector<double> costs_;
    std::vector<LinearConstraint> constraints_;
    double offset_ = 0.0;
};

enum class SolveStatus
{
    optimal,
    infeasible,
    unbounded,
    gap_limit
};

std::string_view to_string(SolveStatus s);

struct SolveOptions
{
    std::string backend = "highs";
    double mip_gap = 1e-3; // relative
    std::optional<double> time_limit; // seconds
    int threads = 1;
    bool verbose = false;
};

struct SolveResult
{
    SolveStatus status = SolveStatus::infeasible;
    double objective = 0.0;
    std::vector<double> values; // empty unless a primal point is available
    double mip_gap = 0.0;
    double best_bound = 0.0;
    double wall_seconds = 0.0;

    double value(VariableHandle v) const { return values.at(v.index); }
    bool has_solution() const noexcept { return !values.empty(); }
};

/// Largest bound and row violations of `values` against `model`.
struct Residuals
{
    double bound = 0.0;
    double row = 0.0;
    double integrality = 0.0;
    std::size_t worst_row = 0;

    double max() const noexcept;
};

Residuals compute_residuals(const Model& model, const std::vector<double>& values);

/// A solver able to handle continuous + binary variables, linear rows and a
/// relative gap stop.
class SolverBackend
{
  public:
    virtual ~SolverBackend() = default;
    virtual std::string_view name() const = 0;
    virtual SolveResult solve(const Model& model, const SolveOptions& options) = 0;
};

/// Looks up a backend by configuration key. Throws SolverError if unknown.
std::unique_ptr<SolverBackend> make_backend(std::string_view key);
std::vector<std::string> available_backends();

/// Solves `model` with the configured backend. MILP incumbents are polished
/// by re-solving the LP with binaries fixed at their rounded values. Optimal
/// and gap-limit points are residual-checked here (<= 1e-6) independently of
/// the backend; a failed check throws SolverError.
SolveResult solve(const Model& model, const SolveOptions& options = {});

/// Same rows and bounds with every binary made continuous on [0, 1].
Model relax_integrality(const Model& model);

/// Copy with each binary fixed to round(values[binary]).
Model fix_integers(const Model& model, const std::vector<double>& values);

inline constexpr double feasibility_tolerance = 1e-6;
inline constexpr double infinity = std::numeric_limits<double>::infinity();

} // namespace seasonal
#endif // SEASONAL_SOLVER_HPP
