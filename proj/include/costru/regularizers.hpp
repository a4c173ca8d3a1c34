#pragma once

#include <string>

#include "costru/oracle.hpp"
#include "costru/rng.hpp"
#include "costru/types.hpp"

namespace costru {

enum class RegTag { Negentropy, SquaredL2, SparsePerturbation };

struct RegularizerKind {
    RegTag tag = RegTag::Negentropy;
    double epsilon = 1.0;  // SparsePerturbation only
    int nb_samples = 1;    // SparsePerturbation only

    static RegularizerKind negentropy() { return {RegTag::Negentropy, 1.0, 1}; }
    static RegularizerKind squared_l2() { return {RegTag::SquaredL2, 1.0, 1}; }
    static RegularizerKind perturbation(double eps, int m) { return {RegTag::SparsePerturbation, eps, m}; }

    void validate() const;
    bool exact() const { return tag != RegTag::SparsePerturbation; }
};

std::string to_string(RegTag tag);
RegTag reg_tag_from_string(const std::string& name);

/// Throws InputError unless entries are >= 0 and sum to 1 within 1e-12 (scaled by size).
void validate_distribution(const DistributionVector& q);

// ---- Exact regularizers on an explicit simplex ----

DistributionVector softmax_distribution(const Vector& s);
double logsumexp_conjugate(const Vector& s);
double negentropy_value(const DistributionVector& q);

/// Sum of q log q over the positive orthant (no simplex check), 0 log 0 = 0.
double entropy_term(const Vector& q);

/// Omega on the simplex: negentropy or 1/2 ||q||^2.
double omega_value(const DistributionVector& q, RegTag tag);
/// Omega*: log-sum-exp or <s|p> - 1/2 ||p||^2 with p the simplex projection of s.
double omega_conjugate(const Vector& s, RegTag tag);
/// grad Omega*: softmax or Euclidean projection onto the simplex.
DistributionVector conjugate_gradient(const Vector& s, RegTag tag);

struct LossAndGradient {
    double value = 0.0;
    Vector gradient;
};

/// Omega*(s) + Omega(q) - <s|q> with gradient grad Omega*(s) - q.
LossAndGradient fy_loss_exact(const Vector& s, const DistributionVector& target_q, RegTag tag);

// ---- Sparse perturbation, Monte-Carlo through a linear oracle ----
//
// Draws are generated serially from the stream (m rows of d normals) before any
// oracle call, and reductions run in sample order, so the parallel kernels are
// bit-identical to the serial references regardless of worker count.

Matrix draw_normals(RngStream& rng, std::size_t m, std::size_t d);

double perturbed_max_value(const LinearOracle& oracle, const ScoreDirection& theta, double eps, int m,
                           RngStream& rng);

MomentVector perturbed_maximizer_moment(const LinearOracle& oracle, const ScoreDirection& theta, double eps,
                                        int m, RngStream& rng);

/// F_eps(theta) - <theta|mu> (Omega(mu) dropped) and its gradient, on one shared draw set.
LossAndGradient perturbed_fy_gradient(const LinearOracle& oracle, const ScoreDirection& theta,
                                      const MomentVector& target_mu, double eps, int m, RngStream& rng);

MomentVector perturbed_decomposition_target(const LinearOracle& oracle, const ScoreDirection& theta,
                                            const Scenario& scenario, double kappa, double eps, int m,
                                            RngStream& rng);

/// Same contracts, single-threaded. Kept as the reference for the parallel kernels.
namespace serial {
double perturbed_max_value(const LinearOracle& oracle, const ScoreDirection& theta, double eps, int m,
                           RngStream& rng);
MomentVector perturbed_maximizer_moment(const LinearOracle& oracle, const ScoreDirection& theta, double eps,
                                        int m, RngStream& rng);
LossAndGradient perturbed_fy_gradient(const LinearOracle& oracle, const ScoreDirection& theta,
                                      const MomentVector& target_mu, double eps, int m, RngStream& rng);
MomentVector perturbed_decomposition_target(const LinearOracle& oracle, const ScoreDirection& theta,
                                            const Scenario& scenario, double kappa, double eps, int m,
                                            RngStream& rng);
}  // namespace serial

}  // namespace costru
