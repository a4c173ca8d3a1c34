#pragma once

#include <vector>

#include "costru/types.hpp"

namespace costru {

/// Squared distance from `point` to conv(`others`), by accelerated projected gradient
/// on the weight simplex. Stops as soon as a Frank-Wolfe lower bound exceeds 1e-9, so
/// for exterior points the result is an upper bound that is >= 1e-9, not the distance.
double squared_distance_to_hull(const Vector& point, const std::vector<Vector>& others);

/// True iff `candidate` is not a convex combination of `others`
/// (squared hull distance >= 1e-9).
bool is_exposed_vertex(const SolutionVector& candidate, const std::vector<SolutionVector>& others);

/// Euclidean projection onto the probability simplex.
Vector project_to_simplex(const Vector& v);

}  // namespace costru
