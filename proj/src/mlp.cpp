#include "quakenet/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include "quakenet/errors.hpp"
#include "quakenet/numfmt.hpp"

namespace quakenet {

namespace {

constexpr double kBelowOne = 1.0 - std::numeric_limits<double>::epsilon() / 2;

void require(bool ok, const std::string& what) {
    if (!ok) throw InputError(what);
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

double bipolar_sigmoid(double u) noexcept {
    // (1 - e^-u) / (1 + e^-u) == tanh(u / 2)
    return std::clamp(std::tanh(0.5 * u), -kBelowOne, kBelowOne);
}

MlpNetwork::MlpNetwork(std::size_t inputs, std::size_t hidden, std::size_t outputs)
    : v_(hidden, inputs), w_(outputs, hidden) {
    if (inputs == 0 || hidden == 0 || outputs == 0)
        throw DomainError("network layer sizes must be at least 1");
}

MlpNetwork::MlpNetwork(Matrix hidden_weights, Matrix output_weights)
    : v_(std::move(hidden_weights)), w_(std::move(output_weights)) {
    if (v_.rows() == 0 || v_.cols() == 0 || w_.rows() == 0)
        throw DomainError("network layer sizes must be at least 1");
    require(w_.cols() == v_.rows(), "output weight matrix has " + std::to_string(w_.cols()) +
                                        " columns, expected " + std::to_string(v_.rows()));
    for (double x : v_.data()) require(std::isfinite(x), "non-finite hidden weight");
    for (double x : w_.data()) require(std::isfinite(x), "non-finite output weight");
}

MlpNetwork MlpNetwork::random(std::size_t inputs, std::size_t hidden, std::size_t outputs,
                              std::uint64_t seed, double init_range) {
    if (!(init_range > 0.0)) throw DomainError("init_range must be positive");
    MlpNetwork net(inputs, hidden, outputs);
    std::mt19937_64 rng(seed);
    // 53 random mantissa bits; std::uniform_real_distribution is not
    // specified bit-for-bit across standard libraries.
    auto draw = [&] {
        const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        return init_range * (2.0 * unit - 1.0);
    };
    for (double& x : net.v_.data()) x = draw();
    for (double& x : net.w_.data()) x = draw();
    return net;
}

void TrainerConfig::validate() const {
    if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("beta must be positive");
    if (!(init_range > 0.0) || !std::isfinite(init_range))
        throw DomainError("init_range must be positive");
    if (max_epochs == 0) throw DomainError("max_epochs must be at least 1");
    if (!(error_goal >= 0.0)) throw DomainError("error_goal must be non-negative");
}

Activations forward(const MlpNetwork& net, std::span<const double> z) {
    require(z.size() == net.inputs(), "input has " + std::to_string(z.size()) +
                                          " components, network expects " +
                                          std::to_string(net.inputs()));
    Activations a;
    a.hidden.resize(net.hidden());
    a.output.resize(net.outputs());
    for (std::size_t j = 0; j < net.hidden(); ++j)
        a.hidden[j] = bipolar_sigmoid(dot(net.hidden_weights().row(j), z));
    for (std::size_t k = 0; k < net.outputs(); ++k)
        a.output[k] = bipolar_sigmoid(dot(net.output_weights().row(k), a.hidden));
    return a;
}

double pair_error(std::span<const double> o, std::span<const double> d) {
    require(o.size() == d.size(), "output and target lengths differ");
    double e = 0.0;
    for (std::size_t k = 0; k < o.size(); ++k) {
        const double r = d[k] - o[k];
        e += r * r;
    }
    return 0.5 * e;
}

std::vector<double> output_deltas(std::span<const double> o, std::span<const double> d) {
    require(o.size() == d.size(), "output and target lengths differ");
    std::vector<double> delta(o.size());
    for (std::size_t k = 0; k < o.size(); ++k)
        delta[k] = 0.5 * (d[k] - o[k]) * (1.0 - o[k] * o[k]);
    return delta;
}

std::vector<double> hidden_deltas(std::span<const double> p, std::span<const double> output_delta,
                                  const Matrix& output_weights) {
    require(output_weights.rows() == output_delta.size() && output_weights.cols() == p.size(),
            "hidden delta dimensions are inconsistent");
    std::vector<double> delta(p.size());
    for (std::size_t j = 0; j < p.size(); ++j) {
        double back = 0.0;
        for (std::size_t k = 0; k < output_delta.size(); ++k)
            back += output_delta[k] * output_weights(k, j);
        delta[j] = 0.5 * (1.0 - p[j] * p[j]) * back;
    }
    return delta;
}

MlpNetwork apply_updates(MlpNetwork net, std::span<const double> z, std::span<const double> p,
                         std::span<const double> output_delta,
                         std::span<const double> hidden_delta, double beta) {
    require(z.size() == net.inputs() && p.size() == net.hidden() &&
                output_delta.size() == net.outputs() && hidden_delta.size() == net.hidden(),
            "update dimensions are inconsistent with the network");
    Matrix& v = net.hidden_weights();
    for (std::size_t j = 0; j < net.hidden(); ++j)
        for (std::size_t i = 0; i < net.inputs(); ++i) v(j, i) += beta * hidden_delta[j] * z[i];
    Matrix& w = net.output_weights();
    for (std::size_t k = 0; k < net.outputs(); ++k)
        for (std::size_t j = 0; j < net.hidden(); ++j) w(k, j) += beta * output_delta[k] * p[j];
    return net;
}

TrainResult train(MlpNetwork net, std::span<const TrainingPair> pairs, const TrainerConfig& cfg) {
    cfg.validate();
    if (pairs.empty()) throw InputError("training set is empty");
    for (std::size_t r = 0; r < pairs.size(); ++r) {
        const auto& pair = pairs[r];
        require(pair.z.size() == net.inputs() && pair.d.size() == net.outputs(),
                "training pair " + std::to_string(r) + " does not match the network shape");
        for (double x : pair.z) require(std::isfinite(x), "non-finite training input");
        for (double x : pair.d)
            require(std::isfinite(x) && std::abs(x) < 1.0,
                    "training target outside (-1, 1) at pair " + std::to_string(r));
    }

    TrainReport report;
    for (std::size_t epoch = 0; epoch < cfg.max_epochs; ++epoch) {
        double epoch_error = 0.0;
        for (const auto& pair : pairs) {
            const Activations act = forward(net, pair.z);
            epoch_error += pair_error(act.output, pair.d);
            const auto d_out = output_deltas(act.output, pair.d);
            const auto d_hid = hidden_deltas(act.hidden, d_out, net.output_weights());
            net = apply_updates(std::move(net), pair.z, act.hidden, d_out, d_hid, cfg.beta);
        }
        report.error_trace.push_back(epoch_error);
        report.epochs_run = epoch + 1;
        report.final_cumulative_error = epoch_error;
        if (epoch_error <= cfg.error_goal) break;
    }
    return {std::move(net), std::move(report)};
}

WeightGradient analytic_gradient(const MlpNetwork& net, const TrainingPair& pair) {
    const Activations act = forward(net, pair.z);
    const auto d_out = output_deltas(act.output, pair.d);
    const auto d_hid = hidden_deltas(act.hidden, d_out, net.output_weights());

    WeightGradient g{Matrix(net.hidden(), net.inputs()), Matrix(net.outputs(), net.hidden())};
    for (std::size_t j = 0; j < net.hidden(); ++j)
        for (std::size_t i = 0; i < net.inputs(); ++i) g.hidden(j, i) = -d_hid[j] * pair.z[i];
    for (std::size_t k = 0; k < net.outputs(); ++k)
        for (std::size_t j = 0; j < net.hidden(); ++j) g.output(k, j) = -d_out[k] * act.hidden[j];
    return g;
}

WeightGradient numeric_gradient(const MlpNetwork& net, const TrainingPair& pair, double epsilon) {
    if (!(epsilon > 0.0)) throw DomainError("epsilon must be positive");
    MlpNetwork probe = net;
    auto error_at = [&] { return pair_error(forward(probe, pair.z).output, pair.d); };
    auto central = [&](double& weight) {
        const double saved = weight;
        weight = saved + epsilon;
        const double up = error_at();
        weight = saved - epsilon;
        const double down = error_at();
        weight = saved;
        return (up - down) / (2.0 * epsilon);
    };

    WeightGradient g{Matrix(net.hidden(), net.inputs()), Matrix(net.outputs(), net.hidden())};
    for (std::size_t j = 0; j < net.hidden(); ++j)
        for (std::size_t i = 0; i < net.inputs(); ++i)
            g.hidden(j, i) = central(probe.hidden_weights()(j, i));
    for (std::size_t k = 0; k < net.outputs(); ++k)
        for (std::size_t j = 0; j < net.hidden(); ++j)
            g.output(k, j) = central(probe.output_weights()(k, j));
    return g;
}

double max_relative_deviation(const WeightGradient& a, const WeightGradient& b) {
    require(a.hidden.rows() == b.hidden.rows() && a.hidden.cols() == b.hidden.cols() &&
                a.output.rows() == b.output.rows() && a.output.cols() == b.output.cols(),
            "gradient shapes differ");
    double worst = 0.0;
    auto scan = [&](std::span<const double> xs, std::span<const double> ys) {
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const double mag = std::max(std::abs(xs[i]), std::abs(ys[i]));
            if (mag < 1e-12) continue;
            worst = std::max(worst, std::abs(xs[i] - ys[i]) / mag);
        }
    };
    scan(a.hidden.data(), b.hidden.data());
    scan(a.output.data(), b.output.data());
    return worst;
}

double gradient_check(const MlpNetwork& net, const TrainingPair& pair, double epsilon) {
    if (!(epsilon > 0.0)) throw DomainError("epsilon must be positive");
    return max_relative_deviation(numeric_gradient(net, pair, epsilon),
                                  analytic_gradient(net, pair));
}

// ---------------------------------------------------------------------------
// Persistence

void save_weights(const StoredModel& model, std::ostream& out) {
    const MlpNetwork& net = model.net;
    out << "MLP v1 " << net.inputs() << ' ' << net.hidden() << ' ' << net.outputs() << '\n';
    auto write_rows = [&](const Matrix& m) {
        for (std::size_t r = 0; r < m.rows(); ++r) {
            for (std::size_t c = 0; c < m.cols(); ++c) {
                if (c) out << ' ';
                out << format_number(m(r, c));
            }
            out << '\n';
        }
    };
    write_rows(net.hidden_weights());
    write_rows(net.output_weights());
    const Normalization& n = model.normalization;
    out << "norm " << format_number(n.input_offset) << ' ' << format_number(n.input_scale) << ' '
        << format_number(n.target_offset) << ' ' << format_number(n.target_scale) << ' '
        << model.layout.window << ' ' << (model.layout.bias ? 1 : 0) << '\n';
}

namespace {

std::vector<std::string> split_ws(const std::string& line) {
    std::istringstream ss(line);
    std::vector<std::string> out;
    std::string tok;
    while (ss >> tok) out.push_back(tok);
    return out;
}

std::size_t parse_size(const std::string& tok, std::size_t line) {
    double v = 0.0;
    if (!parse_number(tok, v) || v < 1.0 || v != std::floor(v) || v > 1e9)
        throw ParseError(line, "expected a positive integer, got '" + tok + "'");
    return static_cast<std::size_t>(v);
}

}  // namespace

StoredModel load_weights(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    auto next_line = [&](const char* what) -> std::vector<std::string> {
        if (!std::getline(in, line))
            throw FormatError("weights file ended early: missing " + std::string(what) +
                              " after line " + std::to_string(line_no));
        ++line_no;
        return split_ws(line);
    };

    auto header = next_line("header");
    if (header.size() != 5 || header[0] != "MLP" || header[1] != "v1")
        throw FormatError("line 1: expected header 'MLP v1 I J K'");
    const std::size_t in_size = parse_size(header[2], line_no);
    const std::size_t hid_size = parse_size(header[3], line_no);
    const std::size_t out_size = parse_size(header[4], line_no);

    auto read_matrix = [&](std::size_t rows, std::size_t cols, const char* name) {
        Matrix m(rows, cols);
        for (std::size_t r = 0; r < rows; ++r) {
            auto toks = next_line(name);
            if (!toks.empty() && toks[0] == "norm")
                throw FormatError("line " + std::to_string(line_no) + ": " + name +
                                  " has fewer rows than declared (" + std::to_string(rows) + ")");
            if (toks.size() != cols)
                throw FormatError("line " + std::to_string(line_no) + ": " + name + " row has " +
                                  std::to_string(toks.size()) + " values, declared " +
                                  std::to_string(cols));
            for (std::size_t c = 0; c < cols; ++c) {
                if (!parse_number(toks[c], m(r, c)))
                    throw ParseError(line_no, "invalid number '" + toks[c] + "'");
            }
        }
        return m;
    };
    Matrix v = read_matrix(hid_size, in_size, "hidden weights");
    Matrix w = read_matrix(out_size, hid_size, "output weights");

    auto norm = next_line("normalization line");
    if (norm.empty() || norm[0] != "norm")
        throw FormatError("line " + std::to_string(line_no) +
                          ": expected 'norm' line, weight rows exceed the declared sizes");
    if (norm.size() != 5 && norm.size() != 7)
        throw FormatError("line " + std::to_string(line_no) +
                          ": normalization line needs 4 or 6 values");
    StoredModel model{MlpNetwork(std::move(v), std::move(w)), Normalization{}, InputLayout{}};
    double* fields[] = {&model.normalization.input_offset, &model.normalization.input_scale,
                        &model.normalization.target_offset, &model.normalization.target_scale};
    for (std::size_t i = 0; i < 4; ++i) {
        if (!parse_number(norm[i + 1], *fields[i]))
            throw ParseError(line_no, "invalid number '" + norm[i + 1] + "'");
    }
    if (!(model.normalization.input_scale > 0.0) || !(model.normalization.target_scale > 0.0))
        throw FormatError("line " + std::to_string(line_no) + ": normalization scales must be positive");
    if (norm.size() == 7) {
        model.layout.window = parse_size(norm[5], line_no);
        if (norm[6] != "0" && norm[6] != "1")
            throw ParseError(line_no, "bias flag must be 0 or 1");
        model.layout.bias = norm[6] == "1";
    }

    while (std::getline(in, line)) {
        ++line_no;
        if (!trim(line).empty())
            throw FormatError("line " + std::to_string(line_no) + ": unexpected trailing content");
    }
    return model;
}

void save_weights_file(const StoredModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot open '" + path + "' for writing");
    save_weights(model, out);
    if (!out) throw InputError("failed writing '" + path + "'");
}

StoredModel load_weights_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open weights file '" + path + "'");
    return load_weights(in);
}

}  // namespace quakenet
