#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "quakenet/errors.hpp"
#include "quakenet/mlp.hpp"

using namespace quakenet;

namespace {

Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    Matrix m(rows.size(), rows.begin()->size());
    std::size_t r = 0;
    for (const auto& row : rows) {
        std::size_t c = 0;
        for (double x : row) m(r, c++) = x;
        ++r;
    }
    return m;
}

// Forward pass from the definitions, independent of the library.
struct Ref {
    std::vector<double> net_hidden, p, net_out, o;
};

Ref ref_forward(const Matrix& v, const Matrix& w, const std::vector<double>& z) {
    Ref r;
    for (std::size_t j = 0; j < v.rows(); ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < v.cols(); ++i) s += v(j, i) * z[i];
        r.net_hidden.push_back(s);
        r.p.push_back(oracle::bipolar(s));
    }
    for (std::size_t k = 0; k < w.rows(); ++k) {
        double s = 0.0;
        for (std::size_t j = 0; j < w.cols(); ++j) s += w(k, j) * r.p[j];
        r.net_out.push_back(s);
        r.o.push_back(oracle::bipolar(s));
    }
    return r;
}

double ref_error(const std::vector<double>& o, const std::vector<double>& d) {
    double e = 0.0;
    for (std::size_t k = 0; k < o.size(); ++k) e += 0.5 * (d[k] - o[k]) * (d[k] - o[k]);
    return e;
}

std::vector<double> uniform(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> out(n);
    for (double& x : out) x = u(rng);
    return out;
}

MlpNetwork random_net(std::mt19937_64& rng, std::size_t i, std::size_t j, std::size_t k) {
    Matrix v(j, i), w(k, j);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (double& x : v.data()) x = u(rng);
    for (double& x : w.data()) x = u(rng);
    return MlpNetwork(v, w);
}

}  // namespace

TEST_SUITE("mlp") {

TEST_CASE("bipolar sigmoid") {
    for (double u : {-30.0, -2.0, -0.1, 0.0, 0.3, 1.0, 5.0, 20.0})
        CHECK(bipolar_sigmoid(u) == doctest::Approx(oracle::bipolar(u)).epsilon(1e-14));
    CHECK(bipolar_sigmoid(0.0) == 0.0);
    CHECK(bipolar_sigmoid(1e6) < 1.0);
    CHECK(bipolar_sigmoid(-1e6) > -1.0);
}

TEST_CASE("construction") {
    CHECK_THROWS_AS(MlpNetwork(0, 1, 1), DomainError);
    CHECK_THROWS_AS(MlpNetwork(1, 0, 1), DomainError);
    CHECK_THROWS_AS(MlpNetwork(Matrix(2, 3), Matrix(1, 4)), InputError);
    const MlpNetwork net(3, 4, 2);
    CHECK(net.inputs() == 3);
    CHECK(net.hidden() == 4);
    CHECK(net.outputs() == 2);
    const auto a = MlpNetwork::random(3, 4, 2, 7, 0.5);
    CHECK(a == MlpNetwork::random(3, 4, 2, 7, 0.5));
    CHECK_FALSE(a == MlpNetwork::random(3, 4, 2, 8, 0.5));
    for (double x : a.hidden_weights().data()) CHECK(std::abs(x) <= 0.5);
}

TEST_CASE("forward examples") {
    const MlpNetwork zero(3, 4, 2);
    const std::vector<double> z{0.3, -0.7, 0.9};
    const auto a = forward(zero, z);
    for (double p : a.hidden) CHECK(p == 0.0);
    for (double o : a.output) CHECK(o == 0.0);

    const MlpNetwork one(from_rows({{1.0}}), from_rows({{1.0}}));
    CHECK(forward(one, std::vector<double>{0.0}).output[0] == 0.0);

    const auto b = forward(one, std::vector<double>{2.0});
    CHECK(b.hidden[0] == doctest::Approx(0.7615941559557649).epsilon(1e-15));
    CHECK(b.output[0] == doctest::Approx(0.3633994843890525).epsilon(1e-15));
    CHECK(b.output[0] == doctest::Approx(oracle::bipolar(oracle::bipolar(2.0))).epsilon(1e-14));

    CHECK_THROWS_AS(forward(one, std::vector<double>{1.0, 2.0}), InputError);
}

TEST_CASE("forward matches the reference and stays inside (-1, 1)") {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 50; ++t) {
        const auto net = random_net(rng, 3, 6, 2);
        const auto z = uniform(rng, 3, -5.0, 5.0);
        const auto a = forward(net, z);
        const auto r = ref_forward(net.hidden_weights(), net.output_weights(), z);
        for (std::size_t k = 0; k < 2; ++k) {
            CHECK(a.output[k] == doctest::Approx(r.o[k]).epsilon(1e-13));
            CHECK(std::abs(a.output[k]) < 1.0);
        }
    }
    const MlpNetwork big(from_rows({{1e4}}), from_rows({{1e4}}));
    CHECK(std::abs(forward(big, std::vector<double>{1.0}).output[0]) < 1.0);
}

TEST_CASE("pair error") {
    const std::vector<double> o{0.1}, d{0.5};
    CHECK(pair_error(o, o) == 0.0);
    CHECK(pair_error(o, d) == doctest::Approx(0.08).epsilon(1e-14));
    const std::vector<double> zero{0.0, 0.0}, target{0.9, -0.9};
    CHECK(pair_error(zero, target) == doctest::Approx(0.81).epsilon(1e-14));
    CHECK_THROWS_AS(pair_error(o, target), InputError);
}

TEST_CASE("output deltas") {
    const std::vector<double> o{0.0}, d{0.5};
    CHECK(output_deltas(o, d)[0] == 0.25);
    CHECK(output_deltas(d, d)[0] == 0.0);
    CHECK_THROWS_AS(output_deltas(o, std::vector<double>{0.1, 0.2}), InputError);
}

TEST_CASE("output deltas equal -dE/dnet_k by central differences") {
    std::mt19937_64 rng(31);
    const double h = 1e-6;
    for (int t = 0; t < 30; ++t) {
        const auto net = random_net(rng, 2, 4, 3);
        const auto z = uniform(rng, 2, -1.0, 1.0);
        const auto d = uniform(rng, 3, -0.9, 0.9);
        const auto r = ref_forward(net.hidden_weights(), net.output_weights(), z);
        const auto delta = output_deltas(forward(net, z).output, d);
        for (std::size_t k = 0; k < 3; ++k) {
            auto up = r.o, down = r.o;
            up[k] = oracle::bipolar(r.net_out[k] + h);
            down[k] = oracle::bipolar(r.net_out[k] - h);
            const double grad = (ref_error(up, d) - ref_error(down, d)) / (2 * h);
            CHECK(std::abs(delta[k] + grad) < 1e-6);
        }
    }
}

TEST_CASE("hidden deltas") {
    const Matrix w = from_rows({{0.4, -0.2}});
    const std::vector<double> p{0.3, -0.5};
    for (double x : hidden_deltas(p, std::vector<double>{0.0}, w)) CHECK(x == 0.0);
    const std::vector<double> saturated{1.0, -1.0};
    for (double x : hidden_deltas(saturated, std::vector<double>{0.7}, w)) CHECK(x == 0.0);
    CHECK_THROWS_AS(hidden_deltas(p, std::vector<double>{0.1, 0.2}, w), InputError);

    std::mt19937_64 rng(41);
    const double h = 1e-6;
    for (int t = 0; t < 30; ++t) {
        const auto net = random_net(rng, 2, 4, 3);
        const auto z = uniform(rng, 2, -1.0, 1.0);
        const auto d = uniform(rng, 3, -0.9, 0.9);
        const auto a = forward(net, z);
        const auto dp = hidden_deltas(a.hidden, output_deltas(a.output, d), net.output_weights());
        const auto r = ref_forward(net.hidden_weights(), net.output_weights(), z);
        for (std::size_t j = 0; j < 4; ++j) {
            auto error_at = [&](double shift) {
                auto p = r.p;
                p[j] = oracle::bipolar(r.net_hidden[j] + shift);
                std::vector<double> o;
                for (std::size_t k = 0; k < 3; ++k) {
                    double s = 0.0;
                    for (std::size_t jj = 0; jj < 4; ++jj) s += net.output_weights()(k, jj) * p[jj];
                    o.push_back(oracle::bipolar(s));
                }
                return ref_error(o, d);
            };
            const double grad = (error_at(h) - error_at(-h)) / (2 * h);
            CHECK(std::abs(dp[j] + grad) < 1e-6);
        }
    }
}

TEST_CASE("apply updates") {
    std::mt19937_64 rng(3);
    const auto net = random_net(rng, 2, 3, 1);
    const std::vector<double> z{0.4, -0.6}, d{0.7};
    const auto a = forward(net, z);
    const std::vector<double> zero_o(1, 0.0), zero_p(3, 0.0);
    CHECK(apply_updates(net, z, a.hidden, zero_o, zero_p, 0.5) == net);

    const auto dO = output_deltas(a.output, d);
    const auto dP = hidden_deltas(a.hidden, dO, net.output_weights());
    CHECK(apply_updates(net, z, a.hidden, dO, dP, 0.0) == net);

    const double beta = 0.3;
    const auto next = apply_updates(net, z, a.hidden, dO, dP, beta);
    for (std::size_t j = 0; j < 3; ++j) {
        for (std::size_t i = 0; i < 2; ++i)
            CHECK(next.hidden_weights()(j, i) ==
                  doctest::Approx(net.hidden_weights()(j, i) + beta * dP[j] * z[i]).epsilon(1e-15));
        CHECK(next.output_weights()(0, j) ==
              doctest::Approx(net.output_weights()(0, j) + beta * dO[0] * a.hidden[j]).epsilon(1e-15));
    }
}

TEST_CASE("a small step does not increase the pair error") {
    std::mt19937_64 rng(13);
    for (int t = 0; t < 100; ++t) {
        const auto net = random_net(rng, 1, 1, 1);
        const auto z = uniform(rng, 1, -1.0, 1.0);
        const auto d = uniform(rng, 1, -0.9, 0.9);
        const auto a = forward(net, z);
        const double before = pair_error(a.output, d);
        const auto dO = output_deltas(a.output, d);
        const auto dP = hidden_deltas(a.hidden, dO, net.output_weights());
        const auto after_net = apply_updates(net, z, a.hidden, dO, dP, 1e-3);
        CHECK(pair_error(forward(after_net, z).output, d) <= before + 1e-12);
        if (before > 1e-6) {
            const auto stepped = apply_updates(net, z, a.hidden, dO, dP, 0.1);
            CHECK(pair_error(forward(stepped, z).output, d) < before);
        }
    }
}

TEST_CASE("trainer configuration validation") {
    TrainerConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.beta = 0.0;
    CHECK_THROWS_AS(cfg.validate(), DomainError);
    cfg = {};
    cfg.init_range = 0.0;
    CHECK_THROWS_AS(cfg.validate(), DomainError);
    cfg = {};
    cfg.max_epochs = 0;
    CHECK_THROWS_AS(cfg.validate(), DomainError);
    cfg = {};
    cfg.error_goal = -1.0;
    CHECK_THROWS_AS(cfg.validate(), DomainError);
}

TEST_CASE("train stopping rules") {
    const auto net = MlpNetwork::random(1, 3, 1, 2, 0.5);
    const std::vector<TrainingPair> pairs{{{0.5}, {0.2}}, {{-0.5}, {-0.2}}};
    TrainerConfig cfg;
    cfg.error_goal = 1e300;
    const auto r = train(net, pairs, cfg);
    CHECK(r.report.epochs_run <= 1);
    CHECK(r.report.error_trace.size() == r.report.epochs_run);

    cfg = {};
    cfg.max_epochs = 7;
    const auto seven = train(net, pairs, cfg);
    CHECK(seven.report.epochs_run == 7);
    CHECK(seven.report.error_trace.size() == 7);
    CHECK(seven.report.final_cumulative_error == seven.report.error_trace.back());
    for (double e : seven.report.error_trace) CHECK(e >= 0.0);

    CHECK_THROWS_AS(train(net, std::vector<TrainingPair>{}, cfg), InputError);
    const std::vector<TrainingPair> wrong{{{0.5, 0.1}, {0.2}}};
    CHECK_THROWS_AS(train(net, wrong, cfg), InputError);
}

TEST_CASE("zero-error fixed point") {
    const auto net = MlpNetwork::random(2, 4, 1, 9, 0.5);
    std::vector<TrainingPair> pairs;
    for (double x : {-0.5, 0.1, 0.8}) {
        const std::vector<double> z{x, 1.0 - x};
        pairs.push_back({z, forward(net, z).output});
    }
    TrainerConfig cfg;
    cfg.max_epochs = 5;
    const auto r = train(net, pairs, cfg);
    CHECK(r.net == net);
    CHECK(r.report.final_cumulative_error == 0.0);
    CHECK(r.report.epochs_run == 1);
}

TEST_CASE("training is deterministic") {
    std::vector<TrainingPair> pairs;
    for (int i = 0; i < 10; ++i) pairs.push_back({{-1.0 + 0.2 * i}, {0.5 * std::sin(-1.0 + 0.2 * i)}});
    TrainerConfig cfg;
    cfg.max_epochs = 200;
    const auto a = train(MlpNetwork::random(1, 5, 1, 4, 0.5), pairs, cfg);
    const auto b = train(MlpNetwork::random(1, 5, 1, 4, 0.5), pairs, cfg);
    CHECK(a.net == b.net);
    CHECK(a.report.error_trace == b.report.error_trace);
}

TEST_CASE("1-10-1 network learns 0.8 sin(z)") {
    std::vector<TrainingPair> pairs;
    for (int i = 0; i < 50; ++i) {
        const double z = -1.0 + 2.0 * i / 49.0;
        pairs.push_back({{z}, {0.8 * std::sin(z)}});
    }
    TrainerConfig cfg;
    cfg.beta = 0.05;
    cfg.max_epochs = 10000;
    cfg.error_goal = 1e-3;
    const auto r = train(MlpNetwork::random(1, 10, 1, cfg.seed, cfg.init_range), pairs, cfg);
    CHECK(r.report.final_cumulative_error < 1e-2);
    CHECK(r.report.epochs_run <= 10000);
}

TEST_CASE("gradient check") {
    SUBCASE("zero network at the origin reports 0") {
        const TrainingPair pair{{0.0, 0.0}, {0.0}};
        CHECK(gradient_check(MlpNetwork(2, 3, 1), pair, 1e-5) == 0.0);
    }
    SUBCASE("random networks agree with the delta rules") {
        std::mt19937_64 rng(99);
        for (int t = 0; t < 20; ++t) {
            const auto net = random_net(rng, 3, 5, 2);
            const TrainingPair pair{uniform(rng, 3, -1.0, 1.0), uniform(rng, 2, -0.9, 0.9)};
            CHECK(gradient_check(net, pair, 1e-5) < 1e-5);
        }
    }
    SUBCASE("a sign error is detected") {
        std::mt19937_64 rng(7);
        const auto net = random_net(rng, 2, 3, 1);
        const TrainingPair pair{{0.4, -0.3}, {0.8}};
        auto wrong = analytic_gradient(net, pair);
        for (double& g : wrong.output.data()) g = -g;
        for (double& g : wrong.hidden.data()) g = -g;
        const auto numeric = numeric_gradient(net, pair, 1e-5);
        CHECK(max_relative_deviation(wrong, numeric) == doctest::Approx(2.0).epsilon(1e-4));
    }
    CHECK_THROWS_AS(gradient_check(MlpNetwork(1, 1, 1), TrainingPair{{0.1}, {0.1}}, 0.0), DomainError);
}

TEST_CASE("weights round trip bit for bit") {
    StoredModel model{MlpNetwork::random(3, 7, 2, 11, 0.5), {}, {3, false}};
    model.normalization = {0.1, 0.123456789012345678, -1e-7, 3.0e-5, false};
    std::stringstream buf;
    save_weights(model, buf);
    const auto loaded = load_weights(buf);
    CHECK(loaded == model);
    CHECK(loaded.layout.window == 3);
}

TEST_CASE("hand-written weights file") {
    std::istringstream in("MLP v1 1 1 1\n0.5\n-0.25\nnorm 0 1 0 1\n");
    const auto m = load_weights(in);
    CHECK(m.net.hidden_weights()(0, 0) == 0.5);
    CHECK(m.net.output_weights()(0, 0) == -0.25);
    CHECK(m.layout == InputLayout{});
}

TEST_CASE("malformed weights files") {
    auto load = [](const std::string& text) {
        std::istringstream in(text);
        return load_weights(in);
    };
    // Declared J = 2 but one v row.
    CHECK_THROWS_AS(load("MLP v1 1 2 1\n0.5\n-0.25 0.1\nnorm 0 1 0 1\n"), FormatError);
    CHECK_THROWS_AS(load("MLP v1 2 1 1\n0.5\n-0.25\nnorm 0 1 0 1\n"), FormatError);
    CHECK_THROWS_AS(load("NET 1 1 1\n0.5\n-0.25\nnorm 0 1 0 1\n"), FormatError);
    CHECK_THROWS_AS(load("MLP v1 1 1 1\n0.5\n-0.25\n"), FormatError);
    CHECK_THROWS_AS(load("MLP v1 1 1 1\n0.5\n-0.25\nnorm 0 1 0 1\nextra\n"), FormatError);
    try {
        load("MLP v1 1 1 1\n0.5\nabc\nnorm 0 1 0 1\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }
    CHECK_THROWS_AS(load_weights_file("/nonexistent/dir/w.txt"), InputError);
}

}  // TEST_SUITE
