#ifndef SEASONAL_ERRORS_HPP
#define SEASONAL_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace seasonal
{

/// Malformed input text. `line` is 1-based, 0 when unknown.
class ParseError : public std::runtime_error
{
  public:
    ParseError(const std::string& what, int line = 0, std::string field = {})
        : std::runtime_error(what), line_(line), field_(std::move(field))
    {}
    int line() const noexcept { return line_; }
    const std::string& field() const noexcept { return field_; }

  private:
    int line_;
    std::string field_;
};

/// Inputs are well formed but violate a precondition or invariant.
class ValidationError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

/// The optimization model has no feasible point. `hour` is the first
/// offending hour relative to the solved horizon, -1 if not identified.
class InfeasibleError : public std::runtime_error
{
  public:
    explicit InfeasibleError(const std::string& what, int hour = -1)
        : std::runtime_error(what), hour_(hour)
    {}
    int hour() const noexcept { return hour_; }

  private:
    int hour_;
};

/// Backend missing, unexpected solver status, or a failed residual check.
class SolverError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

} // namespace seasonal
#endif // SEASONAL_ERRORS_HPP
