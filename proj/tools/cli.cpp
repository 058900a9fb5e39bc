#include "cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>

#include "quakenet/config.hpp"
#include "quakenet/errors.hpp"
#include "quakenet/mlp.hpp"
#include "quakenet/numfmt.hpp"
#include "quakenet/pipeline.hpp"
#include "quakenet/record_io.hpp"
#include "quakenet/sdof.hpp"

namespace quakenet::cli {

namespace {

struct SystemOptions {
    double omega = 0.0;
    double damping = 0.0;
    std::string damping_kind = "none";
    std::string kernel = "literal";

    void add_to(CLI::App& app, bool require_omega) {
        auto* opt = app.add_option("--omega", omega, "Natural frequency parameter w (rad/s)");
        if (require_omega) opt->required();
        app.add_option("--damping", damping, "Damping value, read per --damping-kind");
        app.add_option("--damping-kind", damping_kind, "none | rate (xi*w, 1/s) | ratio (xi)")
            ->capture_default_str();
        app.add_option("--damped-frequency", kernel, "literal | corrected")->capture_default_str();
    }

    DampingSpec damping_spec() const {
        const auto kind = parse_damping_kind(damping_kind);
        if (kind == DampingSpec::Kind::none && damping != 0.0)
            throw UsageError("--damping needs --damping-kind rate or ratio");
        return DampingSpec{kind, damping};
    }

    SystemSpec spec() const { return SystemSpec{omega, damping_spec(), parse_kernel_frequency(kernel)}; }
};

struct SweepOptions {
    PeriodSweep sweep;

    void add_to(CLI::App& app) {
        app.add_option("--period-min", sweep.first, "First period (s)")->capture_default_str();
        app.add_option("--period-max", sweep.last, "Last period (s)")->capture_default_str();
        app.add_option("--period-step", sweep.step, "Period step (s)")->capture_default_str();
    }

    std::vector<double> periods() const { return period_sweep(sweep.first, sweep.last, sweep.step); }
};

/// Writes to the file when a path is given, to out otherwise.
void emit(const std::string& path, std::ostream& out,
          const std::function<void(std::ostream&)>& writer) {
    if (path.empty() || path == "-") {
        writer(out);
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw InputError("cannot open '" + path + "' for writing");
    writer(file);
    if (!file) throw InputError("failed writing '" + path + "'");
}

/// Flag beats QUAKE_SEED, which beats the config file.
std::optional<std::uint64_t> seed_override(const std::optional<std::uint64_t>& flag) {
    if (flag) return flag;
    if (const char* env = std::getenv("QUAKE_SEED"); env && *env) {
        double v = 0.0;
        if (!parse_number(env, v) || v < 0.0 || v != std::floor(v) || v > 9.0e15)
            throw UsageError("QUAKE_SEED must be a non-negative integer");
        return static_cast<std::uint64_t>(v);
    }
    return std::nullopt;
}

std::string factor_suffix(double factor) {
    // Shortest round-trip form: 0.8 -> "0p8".
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, factor);
    std::string s(buf, res.ptr);
    for (char& c : s)
        if (c == '.') c = 'p';
    return s;
}

void write_comparison(std::ostream& os, const Comparison& c, const char* axis_name) {
    write_csv(os, {axis_name, "desired", "predicted"}, {c.axis, c.desired, c.predicted});
}

void write_peak_table(std::ostream& os, const std::vector<Comparison>& rows) {
    std::vector<std::vector<double>> cols(8);
    for (const auto& c : rows) {
        cols[0].push_back(c.factor);
        cols[1].push_back(c.desired_peak);
        cols[2].push_back(c.predicted_peak);
        cols[3].push_back(round_significant(c.desired_peak, 5));
        cols[4].push_back(round_significant(c.predicted_peak, 5));
        cols[5].push_back(c.rms_error);
        cols[6].push_back(c.relative_rms);
        cols[7].push_back(c.peak_relative_error);
    }
    write_csv(os,
              {"factor", "desired_peak", "predicted_peak", "desired_peak_5sf", "predicted_peak_5sf",
               "rms_error", "relative_rms", "peak_relative_error"},
              cols);
}

void write_report(std::ostream& os, const TrainReport& report) {
    std::vector<double> epochs(report.error_trace.size());
    for (std::size_t i = 0; i < epochs.size(); ++i) epochs[i] = static_cast<double>(i + 1);
    write_csv(os, {"epoch", "error"}, {epochs, report.error_trace});
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Earthquake response of single-storey structures and a neural surrogate for it",
                 "quakenet"};
    app.require_subcommand(1);

    // respond
    auto* respond = app.add_subcommand("respond", "Response history of a record (CSV t,desired)");
    std::string respond_record, respond_out, respond_solver = "direct";
    double respond_factor = 1.0;
    SystemOptions respond_sys;
    respond->add_option("--record", respond_record, "Ground-motion file")->required();
    respond_sys.add_to(*respond, true);
    respond->add_option("--factor", respond_factor, "Intensity factor")->capture_default_str();
    respond->add_option("--solver", respond_solver, "direct | incremental")->capture_default_str();
    respond->add_option("-o,--output", respond_out, "Output CSV (stdout when omitted)");

    // spectrum
    auto* spectrum = app.add_subcommand("spectrum", "Peak response per period (CSV period,peak)");
    std::string spectrum_record, spectrum_out;
    double spectrum_factor = 1.0;
    unsigned spectrum_threads = 1;
    SystemOptions spectrum_sys;
    spectrum_sys.damping = 0.05;
    spectrum_sys.damping_kind = "ratio";
    SweepOptions spectrum_sweep;
    spectrum->add_option("--record", spectrum_record, "Ground-motion file")->required();
    spectrum->add_option("--damping", spectrum_sys.damping, "Damping value")->capture_default_str();
    spectrum->add_option("--damping-kind", spectrum_sys.damping_kind, "none | rate | ratio")
        ->capture_default_str();
    spectrum->add_option("--damped-frequency", spectrum_sys.kernel, "literal | corrected")
        ->capture_default_str();
    spectrum_sweep.add_to(*spectrum);
    spectrum->add_option("--factor", spectrum_factor, "Intensity factor")->capture_default_str();
    spectrum->add_option("--threads", spectrum_threads, "Worker threads")->capture_default_str();
    spectrum->add_option("-o,--output", spectrum_out, "Output CSV (stdout when omitted)");

    // train
    auto* train_cmd = app.add_subcommand("train", "Train a surrogate from an experiment config");
    std::string train_config, train_weights, train_report;
    std::optional<std::uint64_t> train_seed;
    train_cmd->add_option("--config", train_config, "Experiment config (key=value)")->required();
    train_cmd->add_option("--weights", train_weights, "Weights file to write")->required();
    train_cmd->add_option("--report", train_report, "Training report CSV (epoch,error)");
    train_cmd->add_option("--seed", train_seed, "Seed (overrides QUAKE_SEED and the config)");

    // predict
    auto* predict = app.add_subcommand("predict", "Apply stored weights to a record");
    std::string predict_weights, predict_record, predict_out, predict_mode = "accel_to_response";
    double predict_factor = 1.0;
    SystemOptions predict_sys;
    SweepOptions predict_sweep;
    predict->add_option("--weights", predict_weights, "Weights file")->required();
    predict->add_option("--record", predict_record, "Ground-motion file")->required();
    predict->add_option("--mode", predict_mode, "accel_to_response | period_to_peak")
        ->capture_default_str();
    predict_sys.add_to(*predict, false);
    predict_sweep.add_to(*predict);
    predict->add_option("--factor", predict_factor, "Intensity factor")->capture_default_str();
    predict->add_option("-o,--output", predict_out, "Output CSV (stdout when omitted)");

    // eval
    auto* eval = app.add_subcommand("eval", "Peak table and RMS metrics for every factor");
    std::string eval_config, eval_weights, eval_out, eval_curves, eval_weights_out;
    std::optional<std::uint64_t> eval_seed;
    eval->add_option("--config", eval_config, "Experiment config (key=value)")->required();
    eval->add_option("--weights", eval_weights, "Use these weights instead of training");
    eval->add_option("--weights-out", eval_weights_out, "Write the trained weights here");
    eval->add_option("--curves", eval_curves,
                     "Prefix for per-factor desired/predicted CSVs (<prefix>_<factor>.csv)");
    eval->add_option("--seed", eval_seed, "Seed (overrides QUAKE_SEED and the config)");
    eval->add_option("-o,--output", eval_out, "Peak table CSV (stdout when omitted)");

    // gen
    auto* gen = app.add_subcommand("gen", "Write a synthetic ground-motion record");
    SyntheticParams gen_params;
    std::string gen_kind = "sine", gen_out, gen_format = "dt";
    std::optional<std::uint64_t> gen_seed;
    gen->add_option("--kind", gen_kind, "sine | sweep | noise")->capture_default_str();
    gen->add_option("--peak", gen_params.peak, "Peak |acceleration| (m/s^2)")->capture_default_str();
    gen->add_option("--duration", gen_params.duration, "Duration (s)")->capture_default_str();
    gen->add_option("--dt", gen_params.dt, "Time step (s)")->capture_default_str();
    gen->add_option("--frequency", gen_params.frequency, "Sine frequency / sweep start (Hz)")
        ->capture_default_str();
    gen->add_option("--frequency-end", gen_params.frequency_end, "Sweep end frequency (Hz)")
        ->capture_default_str();
    gen->add_option("--corner", gen_params.corner, "Noise low-pass corner (Hz)")->capture_default_str();
    gen->add_option("--seed", gen_seed, "Noise seed (overrides QUAKE_SEED)");
    gen->add_option("--format", gen_format, "dt | csv")->capture_default_str();
    gen->add_option("-o,--output", gen_out, "Output file (stdout when omitted)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }

    try {
        if (respond->parsed()) {
            const auto record = scale_record(parse_record_file(respond_record), respond_factor);
            const SystemSpec spec = respond_sys.spec();
            ResponseHistory history = [&] {
                if (respond_solver == "direct") return desired_response(record, spec);
                if (respond_solver == "incremental")
                    return respond_damped_incremental(record, spec.system());
                throw UsageError("unknown solver '" + respond_solver + "' (direct, incremental)");
            }();
            std::vector<double> times(history.size());
            for (std::size_t i = 0; i < times.size(); ++i)
                times[i] = static_cast<double>(i) * history.dt();
            emit(respond_out, out, [&](std::ostream& os) {
                write_csv(os, {"t", "desired"},
                          {times, std::vector<double>(history.values().begin(), history.values().end())});
            });
        } else if (spectrum->parsed()) {
            const auto record = scale_record(parse_record_file(spectrum_record), spectrum_factor);
            const auto damping = spectrum_sys.damping_spec();
            const auto result =
                response_spectrum(record, spectrum_sweep.periods(), damping,
                                  parse_kernel_frequency(spectrum_sys.kernel), spectrum_threads);
            emit(spectrum_out, out, [&](std::ostream& os) {
                write_csv(os, {"period", "peak"}, {result.periods, result.peaks});
            });
        } else if (train_cmd->parsed()) {
            const ExperimentSpec spec = load_experiment_config(train_config, seed_override(train_seed));
            const ExperimentResult result = run_experiment(spec);
            save_weights_file(result.model, train_weights);
            if (!train_report.empty())
                emit(train_report, out, [&](std::ostream& os) { write_report(os, result.report); });
            err << "trained " << result.train_points << " pairs, " << result.report.epochs_run
                << " epochs, final error " << format_number(result.report.final_cumulative_error)
                << ", relative RMS " << format_number(result.training_fit.relative_rms) << '\n';
        } else if (predict->parsed()) {
            const StoredModel model = load_weights_file(predict_weights);
            const auto record = parse_record_file(predict_record);
            const ExperimentMode mode = parse_experiment_mode(predict_mode);
            if (mode == ExperimentMode::accel_to_response) {
                if (!(predict_sys.omega > 0.0))
                    throw DomainError("--omega must be positive for accel_to_response");
                const auto c = evaluate_accel(model, record, predict_sys.spec(), predict_factor);
                emit(predict_out, out, [&](std::ostream& os) { write_comparison(os, c, "t"); });
            } else {
                SystemSpec spec = predict_sys.spec();
                const auto c = evaluate_spectrum(model, record, predict_sweep.periods(), spec,
                                                 predict_factor);
                emit(predict_out, out, [&](std::ostream& os) { write_comparison(os, c, "period"); });
            }
        } else if (eval->parsed()) {
            const ExperimentSpec spec = load_experiment_config(eval_config, seed_override(eval_seed));
            std::vector<Comparison> rows;
            if (!eval_weights.empty()) {
                const StoredModel model = load_weights_file(eval_weights);
                rows = evaluate_experiment(spec, model);
            } else {
                ExperimentResult result = run_experiment(spec);
                if (!eval_weights_out.empty()) save_weights_file(result.model, eval_weights_out);
                rows = std::move(result.evaluations);
            }
            emit(eval_out, out, [&](std::ostream& os) { write_peak_table(os, rows); });
            if (!eval_curves.empty()) {
                const char* axis = spec.mode == ExperimentMode::accel_to_response ? "t" : "period";
                for (const auto& c : rows)
                    emit(eval_curves + "_" + factor_suffix(c.factor) + ".csv", out,
                         [&](std::ostream& os) { write_comparison(os, c, axis); });
            }
        } else if (gen->parsed()) {
            gen_params.kind = parse_synthetic_kind(gen_kind);
            if (auto seed = seed_override(gen_seed)) gen_params.seed = *seed;
            RecordLayout layout = RecordLayout::dt_header;
            if (gen_format == "csv") layout = RecordLayout::csv;
            else if (gen_format != "dt") throw UsageError("unknown format '" + gen_format + "' (dt, csv)");
            const auto record = generate_synthetic(gen_params);
            emit(gen_out, out, [&](std::ostream& os) { write_record(record, os, layout); });
        }
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const InputError& e) {
        err << "data error: " << e.what() << '\n';
        return kData;
    } catch (const DomainError& e) {
        err << "domain error: " << e.what() << '\n';
        return kDomain;
    } catch (const std::exception& e) {
        err << "data error: " << e.what() << '\n';
        return kData;
    }
    return kOk;
}

}  // namespace quakenet::cli
