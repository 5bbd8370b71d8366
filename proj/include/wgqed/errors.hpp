#pragma once

#include <stdexcept>
#include <string>

namespace wgqed {

struct InvalidParameterError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct IntegrationFailure : std::runtime_error {
  double last_good_time_ns;
  IntegrationFailure(const std::string &msg, double t)
      : std::runtime_error(msg), last_good_time_ns(t) {}
};

struct NonUniqueSteadyStateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NormalizationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ModelInconsistencyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct OutOfModelRangeError : std::domain_error {
  using std::domain_error::domain_error;
};

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

struct FitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IngestionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

} // namespace wgqed
