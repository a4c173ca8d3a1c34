#include "costru/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

namespace costru {

namespace {

constexpr double kMembershipTolerance = 1e-9;

void check_dimensions(const Vector& point, const std::vector<Vector>& others) {
    for (const auto& o : others)
        if (o.size() != point.size()) throw InputError("hull check: dimension mismatch");
}

// residual = point - sum_j lambda_j others_j
Vector residual(const Vector& point, const std::vector<Vector>& others, const Vector& lambda) {
    Vector r = point;
    for (std::size_t j = 0; j < others.size(); ++j)
        if (lambda[j] != 0.0)
            for (std::size_t k = 0; k < r.size(); ++k) r[k] -= lambda[j] * others[j][k];
    return r;
}

}  // namespace

Vector project_to_simplex(const Vector& v) {
    Vector u = v;
    std::sort(u.begin(), u.end(), std::greater<>());
    double cumulative = 0.0;
    double tau = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        cumulative += u[k];
        const double candidate = (cumulative - 1.0) / static_cast<double>(k + 1);
        if (u[k] - candidate > 0.0) tau = candidate;
    }
    Vector out(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) out[k] = std::max(v[k] - tau, 0.0);
    return out;
}

// Accelerated projected gradient on f(lambda) = ||point - V lambda||^2.
// Stops as soon as membership is decided: f below tolerance (member), or the
// Frank-Wolfe lower bound f - gap above tolerance (not a member).
double squared_distance_to_hull(const Vector& point, const std::vector<Vector>& others) {
    check_dimensions(point, others);
    const std::size_t n = others.size();
    if (n == 0) throw InputError("hull check: empty vertex set");

    double lipschitz = 0.0;
    for (const auto& o : others) lipschitz += dot(o, o);
    lipschitz = 2.0 * std::max(lipschitz, 1e-12);
    const double step = 1.0 / lipschitz;

    Vector lambda(n, 1.0 / static_cast<double>(n));
    Vector momentum = lambda;
    double t = 1.0;
    double best = std::numeric_limits<double>::infinity();

    for (int iter = 0; iter < 200000; ++iter) {
        const Vector r = residual(point, others, lambda);
        const double f = dot(r, r);
        best = std::min(best, f);
        if (f < kMembershipTolerance * 1e-3) return f;

        // gradient_j = -2 <others_j | r>; Frank-Wolfe gap = <grad | lambda - e_min>
        double grad_dot_lambda = 0.0;
        double grad_min = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < n; ++j) {
            const double g = -2.0 * dot(others[j], r);
            grad_dot_lambda += g * lambda[j];
            grad_min = std::min(grad_min, g);
        }
        const double lower_bound = f - (grad_dot_lambda - grad_min);
        if (lower_bound > kMembershipTolerance) return best;

        const Vector rm = residual(point, others, momentum);
        Vector next(n);
        for (std::size_t j = 0; j < n; ++j) next[j] = momentum[j] + step * 2.0 * dot(others[j], rm);
        next = project_to_simplex(next);

        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        for (std::size_t j = 0; j < n; ++j)
            momentum[j] = next[j] + ((t - 1.0) / t_next) * (next[j] - lambda[j]);
        lambda = std::move(next);
        t = t_next;
    }
    return best;
}

bool is_exposed_vertex(const SolutionVector& candidate, const std::vector<SolutionVector>& others) {
    check_dimensions(candidate, others);
    if (others.empty()) return true;
    return squared_distance_to_hull(candidate, others) >= kMembershipTolerance;
}

}  // namespace costru
