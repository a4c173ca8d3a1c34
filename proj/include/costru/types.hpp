#pragma once

#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace costru {

using Vector = std::vector<double>;
using SolutionVector = Vector;
using ScoreDirection = Vector;
using MomentVector = Vector;
using DistributionVector = Vector;

/// Malformed arguments: dimension mismatches, invalid distributions, bad configs.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A combinatorial subproblem has no feasible solution (e.g. disconnected graph).
class InfeasibleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// File could not be read or written.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A distribution left the interior of the simplex where log/softmax maps are required.
class BoundaryError : public std::runtime_error {
public:
    BoundaryError(const std::string& what, std::size_t vertex)
        : std::runtime_error(what), vertex_(vertex) {}
    std::size_t vertex() const noexcept { return vertex_; }

private:
    std::size_t vertex_;
};

/// Dense row-major matrix. Rows index solution coordinates, columns features.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    Vector data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
    const double* row(std::size_t i) const { return data.data() + i * cols; }
};

/// Deterministic part of an instance: features per solution coordinate plus
/// problem-specific attributes (first-stage costs for the spanning-tree problem).
struct Context {
    int id = 0;
    Matrix features;
    Vector attributes;
};

/// One (context, noise) pair. Contexts are shared between scenarios of one instance.
struct Scenario {
    std::shared_ptr<const Context> context;
    Vector noise;

    int context_id() const { return context->id; }
    const Matrix& features() const { return context->features; }
    std::size_t dimension() const { return context->features.rows; }
};

enum class Split { Train, Val, Test };

std::string to_string(Split split);
Split split_from_string(const std::string& name);

struct Dataset {
    std::vector<Scenario> scenarios;
    Split split = Split::Train;

    std::size_t size() const { return scenarios.size(); }
    bool empty() const { return scenarios.empty(); }
    /// Throws InputError unless nonempty with a common feature width.
    void validate() const;
    /// Scenario indices grouped by context, contexts in order of first appearance.
    std::vector<std::vector<std::size_t>> group_by_context() const;
};

double dot(const Vector& a, const Vector& b);

}  // namespace costru
