#pragma once

#include <stdexcept>
#include <string>

namespace pqec {

struct invalid_channel_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct invalid_weights_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct invalid_parameter_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct resource_limit_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct infeasible_budget_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct numeric_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace pqec
