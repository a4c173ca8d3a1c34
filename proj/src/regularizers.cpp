#include "costru/regularizers.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>

#include "costru/geometry.hpp"

namespace costru {

void RegularizerKind::validate() const {
    if (tag == RegTag::SparsePerturbation) {
        if (!(epsilon > 0.0)) throw InputError("perturbation epsilon must be > 0");
        if (nb_samples < 1) throw InputError("perturbation nb_samples must be >= 1");
    }
}

std::string to_string(RegTag tag) {
    switch (tag) {
        case RegTag::Negentropy: return "negentropy";
        case RegTag::SquaredL2: return "l2";
        case RegTag::SparsePerturbation: return "perturbation";
    }
    return "negentropy";
}

RegTag reg_tag_from_string(const std::string& name) {
    if (name == "negentropy") return RegTag::Negentropy;
    if (name == "l2") return RegTag::SquaredL2;
    if (name == "perturbation") return RegTag::SparsePerturbation;
    throw InputError("unknown regularizer: " + name);
}

void validate_distribution(const DistributionVector& q) {
    if (q.empty()) throw InputError("empty distribution");
    double total = 0.0;
    for (double v : q) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw InputError("distribution entry negative or not finite");
        total += v;
    }
    if (std::abs(total - 1.0) > 1e-12 * std::max<double>(1.0, static_cast<double>(q.size())))
        throw InputError("distribution does not sum to 1");
}

DistributionVector softmax_distribution(const Vector& s) {
    if (s.empty()) throw InputError("softmax of empty vector");
    const double top = *std::max_element(s.begin(), s.end());
    DistributionVector q(s.size());
    double total = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        q[i] = std::exp(s[i] - top);
        total += q[i];
    }
    for (double& v : q) v /= total;
    return q;
}

double logsumexp_conjugate(const Vector& s) {
    if (s.empty()) throw InputError("log-sum-exp of empty vector");
    const double top = *std::max_element(s.begin(), s.end());
    double total = 0.0;
    for (double v : s) total += std::exp(v - top);
    return top + std::log(total);
}

double entropy_term(const Vector& q) {
    double total = 0.0;
    for (double v : q)
        if (v > 0.0) total += v * std::log(v);
    return total;
}

double negentropy_value(const DistributionVector& q) {
    validate_distribution(q);
    return entropy_term(q);
}

double omega_value(const DistributionVector& q, RegTag tag) {
    switch (tag) {
        case RegTag::Negentropy: return entropy_term(q);
        case RegTag::SquaredL2: return 0.5 * dot(q, q);
        case RegTag::SparsePerturbation: break;
    }
    throw InputError("omega_value needs an exact regularizer");
}

double omega_conjugate(const Vector& s, RegTag tag) {
    switch (tag) {
        case RegTag::Negentropy: return logsumexp_conjugate(s);
        case RegTag::SquaredL2: {
            const Vector p = project_to_simplex(s);
            return dot(s, p) - 0.5 * dot(p, p);
        }
        case RegTag::SparsePerturbation: break;
    }
    throw InputError("omega_conjugate needs an exact regularizer");
}

DistributionVector conjugate_gradient(const Vector& s, RegTag tag) {
    switch (tag) {
        case RegTag::Negentropy: return softmax_distribution(s);
        case RegTag::SquaredL2: return project_to_simplex(s);
        case RegTag::SparsePerturbation: break;
    }
    throw InputError("conjugate_gradient needs an exact regularizer");
}

LossAndGradient fy_loss_exact(const Vector& s, const DistributionVector& target_q, RegTag tag) {
    if (s.size() != target_q.size()) throw InputError("fy_loss_exact: dimension mismatch");
    validate_distribution(target_q);
    LossAndGradient out;
    out.value = omega_conjugate(s, tag) + omega_value(target_q, tag) - dot(s, target_q);
    out.value = std::max(out.value, 0.0);
    out.gradient = conjugate_gradient(s, tag);
    for (std::size_t i = 0; i < s.size(); ++i) out.gradient[i] -= target_q[i];
    return out;
}

// ---- perturbation ----

Matrix draw_normals(RngStream& rng, std::size_t m, std::size_t d) {
    Matrix z(m, d);
    for (double& v : z.data) v = rng.normal();
    return z;
}

namespace {

struct SampleBuffer {
    Matrix solutions;  // m x d
    Vector values;     // per-sample objective, only filled when requested
};

void check_args(const ScoreDirection& theta, std::size_t d, double eps, int m) {
    if (theta.size() != d) throw InputError("score dimension does not match oracle dimension");
    if (!(eps > 0.0)) throw InputError("epsilon must be > 0");
    if (m < 1) throw InputError("nb_samples must be >= 1");
}

// Solves one perturbed problem per draw. `solve` maps a perturbed score to a solution.
template <bool Parallel, typename Solve>
SampleBuffer solve_samples(const ScoreDirection& theta, double eps, const Matrix& z, bool want_values,
                           Solve&& solve) {
    const std::size_t m = z.rows;
    const std::size_t d = z.cols;
    SampleBuffer buf{Matrix(m, d), Vector(want_values ? m : 0)};
    const long long count = static_cast<long long>(m);

    auto body = [&](long long j) {
        Vector perturbed(d);
        for (std::size_t k = 0; k < d; ++k) perturbed[k] = theta[k] + eps * z(j, k);
        const SolutionVector y = solve(perturbed);
        std::copy(y.begin(), y.end(), buf.solutions.data.begin() + j * static_cast<long long>(d));
        if (want_values) buf.values[j] = dot(perturbed, y);
    };

    if constexpr (Parallel) {
        // Exceptions cannot cross the parallel region; rethrow the lowest-index one.
        long long failed_at = count;
        std::exception_ptr failure;
#pragma omp parallel for schedule(static)
        for (long long j = 0; j < count; ++j) {
            try {
                body(j);
            } catch (...) {
#pragma omp critical(costru_sample_failure)
                if (j < failed_at) {
                    failed_at = j;
                    failure = std::current_exception();
                }
            }
        }
        if (failure) std::rethrow_exception(failure);
    } else {
        for (long long j = 0; j < count; ++j) body(j);
    }
    return buf;
}

Vector column_mean(const Matrix& a) {
    Vector mean(a.cols, 0.0);
    for (std::size_t j = 0; j < a.rows; ++j)
        for (std::size_t k = 0; k < a.cols; ++k) mean[k] += a(j, k);
    for (double& v : mean) v /= static_cast<double>(a.rows);
    return mean;
}

double mean_of(const Vector& v) {
    double total = 0.0;
    for (double x : v) total += x;
    return total / static_cast<double>(v.size());
}

template <bool Parallel>
double max_value_impl(const LinearOracle& oracle, const ScoreDirection& theta, double eps, int m,
                      RngStream& rng) {
    check_args(theta, oracle.dimension(), eps, m);
    const Matrix z = draw_normals(rng, static_cast<std::size_t>(m), theta.size());
    auto buf = solve_samples<Parallel>(theta, eps, z, true,
                                       [&](const Vector& p) { return oracle.argmax_linear(p); });
    return mean_of(buf.values);
}

template <bool Parallel>
MomentVector moment_impl(const LinearOracle& oracle, const ScoreDirection& theta, double eps, int m,
                         RngStream& rng) {
    check_args(theta, oracle.dimension(), eps, m);
    const Matrix z = draw_normals(rng, static_cast<std::size_t>(m), theta.size());
    auto buf = solve_samples<Parallel>(theta, eps, z, false,
                                       [&](const Vector& p) { return oracle.argmax_linear(p); });
    return column_mean(buf.solutions);
}

template <bool Parallel>
LossAndGradient fy_impl(const LinearOracle& oracle, const ScoreDirection& theta, const MomentVector& target,
                        double eps, int m, RngStream& rng) {
    check_args(theta, oracle.dimension(), eps, m);
    if (target.size() != theta.size()) throw InputError("target moment dimension mismatch");
    const Matrix z = draw_normals(rng, static_cast<std::size_t>(m), theta.size());
    auto buf = solve_samples<Parallel>(theta, eps, z, true,
                                       [&](const Vector& p) { return oracle.argmax_linear(p); });
    LossAndGradient out;
    out.value = mean_of(buf.values) - dot(theta, target);
    out.gradient = column_mean(buf.solutions);
    for (std::size_t k = 0; k < target.size(); ++k) out.gradient[k] -= target[k];
    return out;
}

template <bool Parallel>
MomentVector decomposition_impl(const LinearOracle& oracle, const ScoreDirection& theta, const Scenario& scenario,
                                double kappa, double eps, int m, RngStream& rng) {
    check_args(theta, oracle.dimension(), eps, m);
    if (!(kappa > 0.0)) throw InputError("kappa must be > 0");
    const Matrix z = draw_normals(rng, static_cast<std::size_t>(m), theta.size());
    auto buf = solve_samples<Parallel>(theta, eps, z, false, [&](const Vector& p) {
        return oracle.argmin_shifted(p, kappa, scenario);
    });
    return column_mean(buf.solutions);
}

}  // namespace

double perturbed_max_value(const LinearOracle& oracle, const ScoreDirection& theta, double eps, int m,
                           RngStream& rng) {
    return max_value_impl<true>(oracle, theta, eps, m, rng);
}

MomentVector perturbed_maximizer_moment(const LinearOracle& oracle, const ScoreDirection& theta, double eps,
                                        int m, RngStream& rng) {
    return moment_impl<true>(oracle, theta, eps, m, rng);
}

LossAndGradient perturbed_fy_gradient(const LinearOracle& oracle, const ScoreDirection& theta,
                                      const MomentVector& target_mu, double eps, int m, RngStream& rng) {
    return fy_impl<true>(oracle, theta, target_mu, eps, m, rng);
}

MomentVector perturbed_decomposition_target(const LinearOracle& oracle, const ScoreDirection& theta,
                                            const Scenario& scenario, double kappa, double eps, int m,
                                            RngStream& rng) {
    return decomposition_impl<true>(oracle, theta, scenario, kappa, eps, m, rng);
}

namespace serial {

double perturbed_max_value(const LinearOracle& oracle, const ScoreDirection& theta, double eps, int m,
                           RngStream& rng) {
    return max_value_impl<false>(oracle, theta, eps, m, rng);
}

MomentVector perturbed_maximizer_moment(const LinearOracle& oracle, const ScoreDirection& theta, double eps,
                                        int m, RngStream& rng) {
    return moment_impl<false>(oracle, theta, eps, m, rng);
}

LossAndGradient perturbed_fy_gradient(const LinearOracle& oracle, const ScoreDirection& theta,
                                      const MomentVector& target_mu, double eps, int m, RngStream& rng) {
    return fy_impl<false>(oracle, theta, target_mu, eps, m, rng);
}

MomentVector perturbed_decomposition_target(const LinearOracle& oracle, const ScoreDirection& theta,
                                            const Scenario& scenario, double kappa, double eps, int m,
                                            RngStream& rng) {
    return decomposition_impl<false>(oracle, theta, scenario, kappa, eps, m, rng);
}

}  // namespace serial

}  // namespace costru
