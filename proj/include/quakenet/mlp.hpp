#pragma once

// One-hidden-layer feedforward network trained by per-pattern error back
// propagation.
//
//   hidden   p_j = f( sum_i v_ji z_i )
//   output   o_k = f( sum_j w_kj p_j )
//
// with the bipolar sigmoid f(u) = (1 - e^-u) / (1 + e^-u), whose derivative
// is 0.5 (1 - f^2). For one pair the error is E = 1/2 sum_k (d_k - o_k)^2 and
//
//   dO_k = 0.5 (d_k - o_k)(1 - o_k^2)
//   dP_j = 0.5 (1 - p_j^2) sum_k dO_k w_kj
//   v_ji += beta dP_j z_i,   w_kj += beta dO_k p_j
//
// No bias terms; callers that want one append a constant input.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "quakenet/normalization.hpp"

namespace quakenet {

/// Dense row-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Bipolar sigmoid, kept strictly inside (-1, 1) even where tanh rounds to 1.
double bipolar_sigmoid(double u) noexcept;

class MlpNetwork {
public:
    /// Zero-initialised I-J-K network. Throws DomainError for a zero size.
    MlpNetwork(std::size_t inputs, std::size_t hidden, std::size_t outputs);

    /// Builds from explicit weights: hidden_weights is J x I, output_weights K x J.
    MlpNetwork(Matrix hidden_weights, Matrix output_weights);

    /// Uniform weights in [-init_range, init_range] from a seeded generator.
    static MlpNetwork random(std::size_t inputs, std::size_t hidden, std::size_t outputs,
                             std::uint64_t seed, double init_range);

    std::size_t inputs() const noexcept { return v_.cols(); }
    std::size_t hidden() const noexcept { return v_.rows(); }
    std::size_t outputs() const noexcept { return w_.rows(); }

    /// v: J x I, v(j, i) connects input i to hidden node j.
    const Matrix& hidden_weights() const noexcept { return v_; }
    Matrix& hidden_weights() noexcept { return v_; }
    /// w: K x J, w(k, j) connects hidden node j to output k.
    const Matrix& output_weights() const noexcept { return w_; }
    Matrix& output_weights() noexcept { return w_; }

    bool operator==(const MlpNetwork&) const = default;

private:
    Matrix v_;
    Matrix w_;
};

struct Activations {
    std::vector<double> hidden;  // p, length J
    std::vector<double> output;  // o, length K
};

struct TrainingPair {
    std::vector<double> z;  // length I
    std::vector<double> d;  // length K
};

struct TrainerConfig {
    double beta = 0.05;
    std::size_t max_epochs = 10000;
    double error_goal = 0.0;
    std::uint64_t seed = 1;
    double init_range = 0.5;

    /// Throws DomainError for beta <= 0, init_range <= 0, max_epochs == 0 or
    /// a negative error goal.
    void validate() const;
};

struct TrainReport {
    std::size_t epochs_run = 0;
    double final_cumulative_error = 0.0;
    std::vector<double> error_trace;  // one cumulative error per epoch
};

struct TrainResult {
    MlpNetwork net;
    TrainReport report;
};

Activations forward(const MlpNetwork& net, std::span<const double> z);

/// E = 1/2 sum_k (d_k - o_k)^2.
double pair_error(std::span<const double> o, std::span<const double> d);

std::vector<double> output_deltas(std::span<const double> o, std::span<const double> d);

std::vector<double> hidden_deltas(std::span<const double> p, std::span<const double> output_delta,
                                  const Matrix& output_weights);

MlpNetwork apply_updates(MlpNetwork net, std::span<const double> z, std::span<const double> p,
                         std::span<const double> output_delta,
                         std::span<const double> hidden_delta, double beta);

/// Sequential (per-pattern) training in the given pair order. The epoch
/// error is the sum over pairs of E, each taken before that pair's update.
/// Stops after max_epochs or once an epoch error is <= error_goal.
TrainResult train(MlpNetwork net, std::span<const TrainingPair> pairs, const TrainerConfig& cfg);

/// Gradient of E with respect to every weight, in the layout of the
/// network's matrices (v first, then w).
struct WeightGradient {
    Matrix hidden;
    Matrix output;
};

/// dE/dw from the delta rules: -dP_j z_i and -dO_k p_j.
WeightGradient analytic_gradient(const MlpNetwork& net, const TrainingPair& pair);

/// Central differences (E(w + eps) - E(w - eps)) / 2 eps, one weight at a time.
WeightGradient numeric_gradient(const MlpNetwork& net, const TrainingPair& pair, double epsilon);

/// max over weights of |a - b| / max(|a|, |b|); a weight whose two values
/// are both below 1e-12 in magnitude contributes 0.
double max_relative_deviation(const WeightGradient& a, const WeightGradient& b);

/// numeric vs analytic gradient. Throws DomainError unless epsilon > 0.
double gradient_check(const MlpNetwork& net, const TrainingPair& pair, double epsilon);

/// A network plus what is needed to apply it to raw data.
struct StoredModel {
    MlpNetwork net;
    Normalization normalization;
    InputLayout layout;

    bool operator==(const StoredModel&) const = default;
};

/// Text format:
///   MLP v1 I J K
///   J lines of I weights (rows of v)
///   K lines of J weights (rows of w)
///   norm <input_offset> <input_scale> <target_offset> <target_scale> <window> <bias>
/// Numbers use 17 significant digits so load(save(m)) == m bit for bit.
/// The trailing window/bias fields are optional on load (default 1 and 0).
void save_weights(const StoredModel& model, std::ostream& out);
StoredModel load_weights(std::istream& in);

void save_weights_file(const StoredModel& model, const std::string& path);
StoredModel load_weights_file(const std::string& path);

}  // namespace quakenet
