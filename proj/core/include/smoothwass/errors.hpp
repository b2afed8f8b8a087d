#ifndef SMOOTHWASS_ERRORS_HPP_
#define SMOOTHWASS_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace smoothwass {

// Invalid inputs: bad specs, mismatched dimensions, out-of-range parameters.
// The CLI maps this class to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failures: a solver did not converge, an iteration limit was hit.
class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

// Raised when a statistic is requested in a regime where its defining
// formula is invalid (e.g. a plug-in variance at distance zero).
class DegenerateNullError : public std::runtime_error {
 public:
  explicit DegenerateNullError(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace smoothwass

#endif  // SMOOTHWASS_ERRORS_HPP_
