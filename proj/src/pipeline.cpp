#include "quakenet/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "quakenet/errors.hpp"

namespace quakenet {

namespace {

struct AffineFit {
    double offset = 0.0;
    double scale = 1.0;
    bool degenerate = false;
};

AffineFit fit_range(std::span<const double> xs) {
    if (xs.empty()) return {0.0, 1.0, true};
    const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
    const double half = 0.5 * (*hi - *lo);
    const double mid = 0.5 * (*hi + *lo);
    if (!(half > 0.0)) return {mid, 1.0, true};
    return {mid, half, false};
}

double rms(std::span<const double> xs) {
    if (xs.empty()) return 0.0;
    double s = 0.0;
    for (double x : xs) s += x * x;
    return std::sqrt(s / static_cast<double>(xs.size()));
}

double max_abs(std::span<const double> xs) {
    double m = 0.0;
    for (double x : xs) m = std::max(m, std::abs(x));
    return m;
}

double ratio_or_zero(double num, double den) {
    if (den > 0.0) return num / den;
    return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}

void check_model_shape(const StoredModel& model, std::size_t expected_inputs) {
    if (model.net.inputs() != expected_inputs || model.net.outputs() != 1)
        throw FormatError("network dimension mismatch: weights are " +
                          std::to_string(model.net.inputs()) + "-" +
                          std::to_string(model.net.hidden()) + "-" +
                          std::to_string(model.net.outputs()) + ", this mode needs " +
                          std::to_string(expected_inputs) + " input(s) and 1 output");
}

std::size_t resolve_train_points(const ExperimentSpec& spec, std::size_t available) {
    std::size_t n = spec.train_points;
    if (n == 0)
        n = static_cast<std::size_t>(std::llround(spec.train_fraction * static_cast<double>(available)));
    if (n < 1 || n > available)
        throw InputError("training point count " + std::to_string(n) + " outside 1.." +
                         std::to_string(available));
    return n;
}

}  // namespace

Normalization Normalization::from_extrema(std::span<const double> inputs,
                                          std::span<const double> targets) {
    const AffineFit in = fit_range(inputs);
    const AffineFit out = fit_range(targets);
    Normalization n;
    n.input_offset = in.offset;
    n.input_scale = in.scale;
    n.target_offset = out.offset;
    n.target_scale = out.scale;
    n.degenerate = in.degenerate || out.degenerate;
    return n;
}

ResponseHistory desired_response(const GroundMotionRecord& record, const SystemSpec& spec) {
    if (!spec.damped()) return respond_undamped(record, spec.omega);
    return respond_damped(record, spec.system());
}

std::vector<std::vector<double>> encode_inputs(std::span<const double> raw,
                                               const Normalization& norm,
                                               const InputLayout& layout) {
    if (layout.window < 1) throw DomainError("input window must be at least 1");
    std::vector<std::vector<double>> out(raw.size());
    for (std::size_t n = 0; n < raw.size(); ++n) {
        auto& z = out[n];
        z.reserve(layout.input_size());
        for (std::size_t lag = 0; lag < layout.window; ++lag)
            z.push_back(norm.normalize_input(lag <= n ? raw[n - lag] : 0.0));
        if (layout.bias) z.push_back(1.0);
    }
    return out;
}

TrainingSet build_accel_response_set(const GroundMotionRecord& record, const SystemSpec& spec,
                                     InputLayout layout, std::size_t fit_points) {
    const ResponseHistory response = desired_response(record, spec);
    const std::size_t n = record.size();
    const std::size_t fit = fit_points == 0 ? n : fit_points;
    if (fit > n)
        throw InputError("cannot fit normalization on " + std::to_string(fit) + " of " +
                         std::to_string(n) + " samples");

    TrainingSet set;
    set.layout = layout;
    set.normalization = Normalization::from_extrema(record.samples().first(fit),
                                                    response.values().first(fit));
    auto inputs = encode_inputs(record.samples(), set.normalization, layout);
    set.pairs.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        set.pairs.push_back(
            {std::move(inputs[i]), {set.normalization.normalize_target(response.values()[i])}});
    return set;
}

TrainingSet build_spectrum_set(const GroundMotionRecord& record, std::span<const double> periods,
                               const DampingSpec& damping, KernelFrequency kernel,
                               std::size_t fit_points, unsigned threads) {
    const ResponseSpectrum spectrum = response_spectrum(record, periods, damping, kernel, threads);
    const std::size_t n = periods.size();
    const std::size_t fit = fit_points == 0 ? n : fit_points;
    if (fit > n)
        throw InputError("cannot fit normalization on " + std::to_string(fit) + " of " +
                         std::to_string(n) + " periods");

    TrainingSet set;
    set.normalization = Normalization::from_extrema(periods.first(fit),
                                                    std::span<const double>(spectrum.peaks).first(fit));
    set.pairs.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        set.pairs.push_back({{set.normalization.normalize_input(periods[i])},
                             {set.normalization.normalize_target(spectrum.peaks[i])}});
    return set;
}

TrainingSet truncate_for_training(const TrainingSet& set, std::size_t n_points) {
    if (n_points < 1 || n_points > set.size())
        throw InputError("truncation to " + std::to_string(n_points) + " pairs outside 1.." +
                         std::to_string(set.size()));
    TrainingSet out;
    out.normalization = set.normalization;
    out.layout = set.layout;
    out.pairs.assign(set.pairs.begin(), set.pairs.begin() + static_cast<std::ptrdiff_t>(n_points));
    return out;
}

void ExperimentSpec::validate() const {
    trainer.validate();
    if (hidden < 1 || hidden > 256) throw DomainError("hidden size must be within 1..256");
    if (layout.window < 1) throw DomainError("input window must be at least 1");
    if (mode == ExperimentMode::period_to_peak && layout.input_size() != 1)
        throw DomainError("period_to_peak networks take the period as their only input");
    if (!(train_fraction > 0.0) || train_fraction > 1.0)
        throw DomainError("train_fraction must be in (0, 1]");
    if (factors.empty()) throw DomainError("at least one intensity factor is required");
    for (double f : factors)
        if (!(f > 0.0) || !std::isfinite(f)) throw DomainError("intensity factors must be positive");
    if (eval_period_step < 0.0) throw DomainError("eval_period_step must be non-negative");
    if (mode == ExperimentMode::accel_to_response) {
        (void)system.system();
        if (train_points > record.size())
            throw InputError("train_points exceeds the record length");
    } else {
        const auto periods = period_sweep(sweep.first, sweep.last, sweep.step);
        (void)SdofSystem::from_period(periods.back(), system.damping, system.kernel);
        (void)SdofSystem::from_period(periods.front(), system.damping, system.kernel);
        if (train_points > periods.size())
            throw InputError("train_points exceeds the number of periods");
    }
}

Comparison compare(double factor, std::vector<double> axis, std::vector<double> desired,
                   std::vector<double> predicted) {
    if (desired.size() != predicted.size() || axis.size() != desired.size())
        throw InputError("comparison series lengths differ");
    Comparison c;
    c.factor = factor;
    c.desired_peak = max_abs(desired);
    c.predicted_peak = max_abs(predicted);
    std::vector<double> diff(desired.size());
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = predicted[i] - desired[i];
    c.rms_error = rms(diff);
    c.relative_rms = ratio_or_zero(c.rms_error, rms(desired));
    c.peak_relative_error = ratio_or_zero(std::abs(c.predicted_peak - c.desired_peak), c.desired_peak);
    c.axis = std::move(axis);
    c.desired = std::move(desired);
    c.predicted = std::move(predicted);
    return c;
}

std::vector<double> predict_series(const StoredModel& model, const GroundMotionRecord& record) {
    check_model_shape(model, model.layout.input_size());
    const auto inputs = encode_inputs(record.samples(), model.normalization, model.layout);
    std::vector<double> out;
    out.reserve(inputs.size());
    for (const auto& z : inputs)
        out.push_back(model.normalization.denormalize_target(forward(model.net, z).output[0]));
    return out;
}

std::vector<double> predict_periods(const StoredModel& model, std::span<const double> periods) {
    check_model_shape(model, 1);
    std::vector<double> out;
    out.reserve(periods.size());
    for (double period : periods) {
        const double z = model.normalization.normalize_input(period);
        out.push_back(model.normalization.denormalize_target(
            forward(model.net, std::span<const double>(&z, 1)).output[0]));
    }
    return out;
}

Comparison evaluate_accel(const StoredModel& model, const GroundMotionRecord& record,
                          const SystemSpec& spec, double factor) {
    const GroundMotionRecord scaled = scale_record(record, factor);
    const ResponseHistory desired = desired_response(scaled, spec);
    std::vector<double> predicted = predict_series(model, scaled);
    std::vector<double> times(record.size());
    for (std::size_t i = 0; i < times.size(); ++i) times[i] = static_cast<double>(i) * record.dt();
    return compare(factor, std::move(times),
                   std::vector<double>(desired.values().begin(), desired.values().end()),
                   std::move(predicted));
}

Comparison evaluate_spectrum(const StoredModel& model, const GroundMotionRecord& record,
                             std::span<const double> periods, const SystemSpec& spec,
                             double factor, unsigned threads) {
    const GroundMotionRecord scaled = scale_record(record, factor);
    ResponseSpectrum desired = response_spectrum(scaled, periods, spec.damping, spec.kernel, threads);
    std::vector<double> predicted = predict_periods(model, periods);
    return compare(factor, std::move(desired.periods), std::move(desired.peaks),
                   std::move(predicted));
}

std::vector<Comparison> evaluate_experiment(const ExperimentSpec& spec, const StoredModel& model) {
    GroundMotionRecord base = spec.eval_record.value_or(spec.record);
    if (spec.eval_record && spec.eval_match_peak && base.peak() > 0.0)
        base = scale_record(base, spec.record.peak() / base.peak());

    std::vector<Comparison> out;
    out.reserve(spec.factors.size());
    if (spec.mode == ExperimentMode::accel_to_response) {
        for (double factor : spec.factors)
            out.push_back(evaluate_accel(model, base, spec.system, factor));
    } else {
        const double step = spec.eval_period_step > 0.0 ? spec.eval_period_step : spec.sweep.step;
        const auto periods = period_sweep(spec.sweep.first, spec.sweep.last, step);
        for (double factor : spec.factors)
            out.push_back(evaluate_spectrum(model, base, periods, spec.system, factor, spec.threads));
    }
    return out;
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
    spec.validate();

    TrainingSet full;
    std::vector<double> axis;
    std::vector<double> raw_targets;
    std::size_t n_train = 0;
    if (spec.mode == ExperimentMode::accel_to_response) {
        n_train = resolve_train_points(spec, spec.record.size());
        full = build_accel_response_set(spec.record, spec.system, spec.layout, n_train);
        const ResponseHistory response = desired_response(spec.record, spec.system);
        raw_targets.assign(response.values().begin(), response.values().end());
        for (std::size_t i = 0; i < spec.record.size(); ++i)
            axis.push_back(static_cast<double>(i) * spec.record.dt());
    } else {
        axis = period_sweep(spec.sweep.first, spec.sweep.last, spec.sweep.step);
        n_train = resolve_train_points(spec, axis.size());
        full = build_spectrum_set(spec.record, axis, spec.system.damping, spec.system.kernel,
                                  n_train, spec.threads);
        for (const auto& pair : full.pairs)
            raw_targets.push_back(full.normalization.denormalize_target(pair.d[0]));
    }

    const TrainingSet training = truncate_for_training(full, n_train);
    const MlpNetwork init = MlpNetwork::random(training.pairs[0].z.size(), spec.hidden, 1,
                                               spec.trainer.seed, spec.trainer.init_range);
    TrainResult trained = train(init, training.pairs, spec.trainer);
    StoredModel model{std::move(trained.net), training.normalization, spec.layout};

    std::vector<double> fit_pred;
    fit_pred.reserve(training.size());
    for (const auto& pair : training.pairs)
        fit_pred.push_back(
            training.normalization.denormalize_target(forward(model.net, pair.z).output[0]));
    axis.resize(training.size());
    raw_targets.resize(training.size());
    Comparison fit = compare(1.0, std::move(axis), std::move(raw_targets), std::move(fit_pred));

    std::vector<Comparison> evaluations = evaluate_experiment(spec, model);
    return ExperimentResult{std::move(model), std::move(trained.report), n_train, std::move(fit),
                            std::move(evaluations)};
}

}  // namespace quakenet
