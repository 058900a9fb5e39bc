#pragma once

// Dataset construction and the train / scale / predict experiments.

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "quakenet/mlp.hpp"
#include "quakenet/normalization.hpp"
#include "quakenet/sdof.hpp"

namespace quakenet {

struct TrainingSet {
    std::vector<TrainingPair> pairs;
    Normalization normalization;
    InputLayout layout;

    std::size_t size() const noexcept { return pairs.size(); }
};

/// Structural model used to produce desired responses.
struct SystemSpec {
    double omega = 1.0;
    DampingSpec damping;
    KernelFrequency kernel = KernelFrequency::literal;

    SdofSystem system() const { return SdofSystem::with_damping(omega, damping, kernel); }
    bool damped() const noexcept { return damping.kind != DampingSpec::Kind::none; }
};

/// Desired response: respond_undamped when the spec has no damping,
/// respond_damped otherwise.
ResponseHistory desired_response(const GroundMotionRecord& record, const SystemSpec& spec);

/// Network inputs for every sample: newest sample first, earlier samples
/// before t = 0 treated as zero acceleration.
std::vector<std::vector<double>> encode_inputs(std::span<const double> raw,
                                               const Normalization& norm,
                                               const InputLayout& layout);

/// One pair per time step, z from the acceleration and d from the response
/// at the same step. The normalization is fitted to the first fit_points
/// samples (all of them when 0).
TrainingSet build_accel_response_set(const GroundMotionRecord& record, const SystemSpec& spec,
                                     InputLayout layout = {}, std::size_t fit_points = 0);

/// One pair per period: z = normalized T, d = normalized peak response.
/// fit_points works as in build_accel_response_set.
TrainingSet build_spectrum_set(const GroundMotionRecord& record, std::span<const double> periods,
                               const DampingSpec& damping,
                               KernelFrequency kernel = KernelFrequency::literal,
                               std::size_t fit_points = 0, unsigned threads = 1);

/// First n_points pairs in order; the normalization is carried over as is.
TrainingSet truncate_for_training(const TrainingSet& set, std::size_t n_points);

enum class ExperimentMode { accel_to_response, period_to_peak };

struct PeriodSweep {
    double first = 0.5;
    double last = 10.0;
    double step = 0.02;
};

struct ExperimentSpec {
    explicit ExperimentSpec(GroundMotionRecord training_record)
        : record(std::move(training_record)) {}

    ExperimentMode mode = ExperimentMode::accel_to_response;
    GroundMotionRecord record;
    /// Record used for evaluation; the training record when empty.
    std::optional<GroundMotionRecord> eval_record;
    /// Rescale the evaluation record to the training record's peak
    /// acceleration before applying the factors.
    bool eval_match_peak = false;

    SystemSpec system;
    PeriodSweep sweep;
    /// Step of the evaluation sweep in period mode (the training step when 0).
    double eval_period_step = 0.0;

    /// Number of leading pairs used for training; 0 means train_fraction.
    std::size_t train_points = 0;
    double train_fraction = 1.0;

    std::vector<double> factors{1.0};
    std::size_t hidden = 10;
    InputLayout layout;
    TrainerConfig trainer;
    unsigned threads = 1;

    /// Throws DomainError/InputError for out-of-range settings.
    void validate() const;
};

/// Prediction vs desired along one axis (time or period).
struct Comparison {
    double factor = 1.0;
    std::vector<double> axis;
    std::vector<double> desired;
    std::vector<double> predicted;
    double desired_peak = 0.0;
    double predicted_peak = 0.0;
    double rms_error = 0.0;
    double relative_rms = 0.0;
    double peak_relative_error = 0.0;
};

Comparison compare(double factor, std::vector<double> axis, std::vector<double> desired,
                   std::vector<double> predicted);

struct ExperimentResult {
    StoredModel model;
    TrainReport report;
    std::size_t train_points = 0;
    /// Fit on the training pairs, denormalized.
    Comparison training_fit;
    /// One entry per factor, in spec order.
    std::vector<Comparison> evaluations;
};

/// Applies a stored model to a record: one output per time step.
std::vector<double> predict_series(const StoredModel& model, const GroundMotionRecord& record);

/// Applies a stored model to periods (period_to_peak networks).
std::vector<double> predict_periods(const StoredModel& model, std::span<const double> periods);

/// Prediction vs desired for a model on a record scaled by factor.
Comparison evaluate_accel(const StoredModel& model, const GroundMotionRecord& record,
                          const SystemSpec& spec, double factor);

Comparison evaluate_spectrum(const StoredModel& model, const GroundMotionRecord& record,
                             std::span<const double> periods, const SystemSpec& spec,
                             double factor, unsigned threads = 1);

/// Trains on the leading subset and evaluates every factor.
ExperimentResult run_experiment(const ExperimentSpec& spec);

/// Evaluation half of run_experiment for an already trained model.
std::vector<Comparison> evaluate_experiment(const ExperimentSpec& spec, const StoredModel& model);

}  // namespace quakenet
