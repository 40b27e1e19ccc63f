#pragma once

#include <nlohmann/json.hpp>

#include <cstddef>

namespace olb {

/// Function value plus a subgradient supported on one coordinate axis:
/// the subgradient is slope·e_axis. Axes are 1-based.
template <class Scalar>
struct FirstOrderAnswer {
  Scalar value{};
  std::size_t axis = 1;
  Scalar slope{};

  friend bool operator==(const FirstOrderAnswer&, const FirstOrderAnswer&) = default;
};

}  // namespace olb
