#ifndef CIRCLE_ERRORS_HH
#define CIRCLE_ERRORS_HH

#include <stdexcept>
#include <string>

namespace circle {

// Raised when a computation would exceed its evaluation budget; the message
// carries the offending count so callers can report it.
struct BudgetError : std::runtime_error {
  uint64_t needed, allowed;
  BudgetError(uint64_t needed_, uint64_t allowed_)
      : std::runtime_error("budget exceeded: need " + std::to_string(needed_) +
                           " evaluations, allowed " + std::to_string(allowed_)),
        needed(needed_), allowed(allowed_) {}
};

// Parse failure in the monomial form grammar; position is a byte offset.
struct ParseError : std::runtime_error {
  size_t pos;
  ParseError(const std::string &what_, size_t pos_)
      : std::runtime_error(what_ + " (at offset " + std::to_string(pos_) + ")"),
        pos(pos_) {}
};

// A requested schedule or parameter window is empty; names the violated
// constraint so the failure is actionable.
struct InfeasibleError : std::runtime_error {
  explicit InfeasibleError(const std::string &constraint)
      : std::runtime_error("infeasible: " + constraint) {}
};

// Dimension or shape mismatch between caller-supplied objects.
struct ShapeError : std::runtime_error {
  explicit ShapeError(const std::string &what_) : std::runtime_error(what_) {}
};

// Saturation data was requested for a matrix whose columns do not have full
// rank; kept distinct from ShapeError so callers can branch on it.
struct RankDeficientError : std::runtime_error {
  explicit RankDeficientError(const std::string &what_) : std::runtime_error(what_) {}
};

// A floating-point total that must be an integer (or vanish) strayed too far;
// raised instead of rounding silently.
struct PrecisionError : std::runtime_error {
  double deviation;
  PrecisionError(const std::string &what_, double deviation_)
      : std::runtime_error(what_ + " (deviation " + std::to_string(deviation_) + ")"),
        deviation(deviation_) {}
};

}  // namespace circle

#endif
