#pragma once

#include <functional>

#include "boldg/mesh.hpp"

namespace boldg {

using ScalarFunction = std::function<double(double)>;

/// Standard L2 projection P: per cell, (Pg - g, y) = 0 for all y in P^k,
/// evaluated with the space's volume quadrature.
Field l2_project(const ScalarFunction& g, const SpacePtr& space);

/// Right-endpoint projection P^-: per cell, (P^-g - g, y) = 0 for y in P^{k-1}
/// and (P^-g)(x_{i+1/2}^-) = g(x_{i+1/2}).
Field radau_project(const ScalarFunction& g, const SpacePtr& space);

}  // namespace boldg
