#include <pybind11/pybind11.h>
#include <pybind11/operators.h>
#include <pybind11/stl.h>

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "quakenet/config.hpp"
#include "quakenet/errors.hpp"
#include "quakenet/mlp.hpp"
#include "quakenet/pipeline.hpp"
#include "quakenet/record_io.hpp"
#include "quakenet/sdof.hpp"

#define STRINGIFY(x) #x
#define MACRO_STRINGIFY(x) STRINGIFY(x)

namespace py = pybind11;
using namespace quakenet;

namespace {

std::vector<double> to_vector(std::span<const double> s) { return {s.begin(), s.end()}; }

std::vector<std::vector<double>> matrix_rows(const Matrix& m) {
    std::vector<std::vector<double>> rows;
    for (std::size_t r = 0; r < m.rows(); ++r) rows.push_back(to_vector(m.row(r)));
    return rows;
}

Matrix matrix_from_rows(const std::vector<std::vector<double>>& rows) {
    const std::size_t cols = rows.empty() ? 0 : rows.front().size();
    Matrix m(rows.size(), cols);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != cols) throw InputError("ragged weight rows");
        for (std::size_t c = 0; c < cols; ++c) m(r, c) = rows[r][c];
    }
    return m;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "SDOF earthquake response, response spectra and a back-propagation surrogate";

    auto base = py::register_exception<Error>(m, "QuakenetError", PyExc_RuntimeError);
    py::register_exception<UsageError>(m, "UsageError", base.ptr());
    py::register_exception<InputError>(m, "InputError", base.ptr());
    py::register_exception<DomainError>(m, "DomainError", base.ptr());

    py::class_<GroundMotionRecord>(m, "GroundMotionRecord")
        .def(py::init<double, std::vector<double>, std::string>(), py::arg("dt"),
             py::arg("samples"), py::arg("label") = "")
        .def_property_readonly("dt", &GroundMotionRecord::dt)
        .def_property_readonly("samples",
                               [](const GroundMotionRecord& r) { return to_vector(r.samples()); })
        .def_property_readonly("label", &GroundMotionRecord::label)
        .def_property_readonly("peak", &GroundMotionRecord::peak)
        .def("__len__", &GroundMotionRecord::size);

    py::enum_<KernelFrequency>(m, "KernelFrequency")
        .value("literal", KernelFrequency::literal)
        .value("corrected", KernelFrequency::corrected);

    py::enum_<DampingSpec::Kind>(m, "DampingKind")
        .value("none", DampingSpec::Kind::none)
        .value("rate", DampingSpec::Kind::rate)
        .value("ratio", DampingSpec::Kind::ratio);

    py::class_<DampingSpec>(m, "DampingSpec")
        .def(py::init<>())
        .def(py::init([](DampingSpec::Kind k, double v) { return DampingSpec{k, v}; }),
             py::arg("kind"), py::arg("value"))
        .def_static("rate", &DampingSpec::rate)
        .def_static("ratio", &DampingSpec::ratio)
        .def_readwrite("kind", &DampingSpec::kind)
        .def_readwrite("value", &DampingSpec::value);

    py::class_<SdofSystem>(m, "SdofSystem")
        .def(py::init<double, double, KernelFrequency>(), py::arg("omega"),
             py::arg("damping_rate") = 0.0, py::arg("kernel") = KernelFrequency::literal)
        .def_static("from_period", &SdofSystem::from_period, py::arg("period"), py::arg("damping"),
                    py::arg("kernel") = KernelFrequency::literal)
        .def_property_readonly("omega", &SdofSystem::omega)
        .def_property_readonly("damping_rate", &SdofSystem::damping_rate)
        .def_property_readonly("period", &SdofSystem::period);

    py::class_<ResponseHistory>(m, "ResponseHistory")
        .def_property_readonly("dt", &ResponseHistory::dt)
        .def_property_readonly("values", [](const ResponseHistory& h) { return to_vector(h.values()); })
        .def_property_readonly("peak", &ResponseHistory::peak);

    py::class_<ResponseSpectrum>(m, "ResponseSpectrum")
        .def_readonly("periods", &ResponseSpectrum::periods)
        .def_readonly("peaks", &ResponseSpectrum::peaks);

    m.def("respond_undamped", &respond_undamped, py::arg("record"), py::arg("omega"));
    m.def("respond_damped", &respond_damped, py::arg("record"), py::arg("system"));
    m.def("respond_damped_incremental", &respond_damped_incremental, py::arg("record"),
          py::arg("system"));
    m.def(
        "response_spectrum",
        [](const GroundMotionRecord& record, const std::vector<double>& periods,
           const DampingSpec& damping, KernelFrequency kernel, unsigned threads) {
            return response_spectrum(record, periods, damping, kernel, threads);
        },
        py::arg("record"), py::arg("periods"), py::arg("damping"),
        py::arg("kernel") = KernelFrequency::literal, py::arg("threads") = 1);
    m.def("period_sweep", &period_sweep, py::arg("first"), py::arg("last"), py::arg("step"));
    m.def("scale_record", &scale_record, py::arg("record"), py::arg("factor"));

    py::enum_<SyntheticKind>(m, "SyntheticKind")
        .value("sine", SyntheticKind::sine)
        .value("sweep", SyntheticKind::sweep)
        .value("noise", SyntheticKind::noise);

    m.def(
        "generate_synthetic",
        [](SyntheticKind kind, double peak, double duration, double dt, double frequency,
           double frequency_end, double corner, std::uint64_t seed) {
            return generate_synthetic(
                SyntheticParams{kind, duration, dt, peak, frequency, frequency_end, corner, seed});
        },
        py::arg("kind"), py::arg("peak"), py::arg("duration") = 14.92, py::arg("dt") = 0.02,
        py::arg("frequency") = 1.0, py::arg("frequency_end") = 5.0, py::arg("corner") = 5.0,
        py::arg("seed") = 1);
    m.def(
        "parse_record",
        [](const std::string& path) { return parse_record_file(path); }, py::arg("path"));

    m.def("bipolar_sigmoid", &bipolar_sigmoid);

    py::class_<MlpNetwork>(m, "MlpNetwork")
        .def(py::init<std::size_t, std::size_t, std::size_t>(), py::arg("inputs"),
             py::arg("hidden"), py::arg("outputs"))
        .def(py::init([](const std::vector<std::vector<double>>& v,
                         const std::vector<std::vector<double>>& w) {
                 return MlpNetwork(matrix_from_rows(v), matrix_from_rows(w));
             }),
             py::arg("hidden_weights"), py::arg("output_weights"))
        .def_static("random", &MlpNetwork::random, py::arg("inputs"), py::arg("hidden"),
                    py::arg("outputs"), py::arg("seed"), py::arg("init_range") = 0.5)
        .def_property_readonly("inputs", &MlpNetwork::inputs)
        .def_property_readonly("hidden", &MlpNetwork::hidden)
        .def_property_readonly("outputs", &MlpNetwork::outputs)
        .def_property_readonly("hidden_weights",
                               [](const MlpNetwork& n) { return matrix_rows(n.hidden_weights()); })
        .def_property_readonly("output_weights",
                               [](const MlpNetwork& n) { return matrix_rows(n.output_weights()); })
        .def(py::self == py::self);

    m.def(
        "forward",
        [](const MlpNetwork& net, const std::vector<double>& z) {
            auto a = forward(net, z);
            return py::make_tuple(a.hidden, a.output);
        },
        py::arg("net"), py::arg("z"), "Returns (hidden activations, outputs).");
    m.def(
        "pair_error",
        [](const std::vector<double>& o, const std::vector<double>& d) { return pair_error(o, d); },
        py::arg("o"), py::arg("d"));
    m.def(
        "gradient_check",
        [](const MlpNetwork& net, const std::vector<double>& z, const std::vector<double>& d,
           double epsilon) { return gradient_check(net, TrainingPair{z, d}, epsilon); },
        py::arg("net"), py::arg("z"), py::arg("d"), py::arg("epsilon") = 1e-5);

    py::class_<TrainerConfig>(m, "TrainerConfig")
        .def(py::init<>())
        .def_readwrite("beta", &TrainerConfig::beta)
        .def_readwrite("max_epochs", &TrainerConfig::max_epochs)
        .def_readwrite("error_goal", &TrainerConfig::error_goal)
        .def_readwrite("seed", &TrainerConfig::seed)
        .def_readwrite("init_range", &TrainerConfig::init_range);

    py::class_<TrainReport>(m, "TrainReport")
        .def_readonly("epochs_run", &TrainReport::epochs_run)
        .def_readonly("final_cumulative_error", &TrainReport::final_cumulative_error)
        .def_readonly("error_trace", &TrainReport::error_trace);

    m.def(
        "train",
        [](MlpNetwork net, const std::vector<std::pair<std::vector<double>, std::vector<double>>>& pairs,
           const TrainerConfig& cfg) {
            std::vector<TrainingPair> set;
            set.reserve(pairs.size());
            for (const auto& [z, d] : pairs) set.push_back({z, d});
            auto result = train(std::move(net), set, cfg);
            return py::make_tuple(std::move(result.net), std::move(result.report));
        },
        py::arg("net"), py::arg("pairs"), py::arg("config"),
        "pairs is a list of (z, d) tuples; returns (trained network, report).");

    py::class_<Normalization>(m, "Normalization")
        .def(py::init<>())
        .def_readwrite("input_offset", &Normalization::input_offset)
        .def_readwrite("input_scale", &Normalization::input_scale)
        .def_readwrite("target_offset", &Normalization::target_offset)
        .def_readwrite("target_scale", &Normalization::target_scale)
        .def("normalize_target", &Normalization::normalize_target)
        .def("denormalize_target", &Normalization::denormalize_target);

    py::class_<StoredModel>(m, "StoredModel")
        .def_readonly("net", &StoredModel::net)
        .def_readonly("normalization", &StoredModel::normalization);

    m.def(
        "save_weights",
        [](const StoredModel& model, const std::string& path) { save_weights_file(model, path); },
        py::arg("model"), py::arg("path"));
    m.def("load_weights", &load_weights_file, py::arg("path"));

    py::enum_<ExperimentMode>(m, "ExperimentMode")
        .value("accel_to_response", ExperimentMode::accel_to_response)
        .value("period_to_peak", ExperimentMode::period_to_peak);

    py::class_<Comparison>(m, "Comparison")
        .def_readonly("factor", &Comparison::factor)
        .def_readonly("axis", &Comparison::axis)
        .def_readonly("desired", &Comparison::desired)
        .def_readonly("predicted", &Comparison::predicted)
        .def_readonly("desired_peak", &Comparison::desired_peak)
        .def_readonly("predicted_peak", &Comparison::predicted_peak)
        .def_readonly("rms_error", &Comparison::rms_error)
        .def_readonly("relative_rms", &Comparison::relative_rms)
        .def_readonly("peak_relative_error", &Comparison::peak_relative_error);

    py::class_<ExperimentSpec>(m, "ExperimentSpec")
        .def_readonly("mode", &ExperimentSpec::mode)
        .def_readonly("factors", &ExperimentSpec::factors)
        .def_readonly("hidden", &ExperimentSpec::hidden);

    py::class_<ExperimentResult>(m, "ExperimentResult")
        .def_readonly("model", &ExperimentResult::model)
        .def_readonly("report", &ExperimentResult::report)
        .def_readonly("train_points", &ExperimentResult::train_points)
        .def_readonly("training_fit", &ExperimentResult::training_fit)
        .def_readonly("evaluations", &ExperimentResult::evaluations);

    m.def(
        "load_experiment_config",
        [](const std::string& path, std::optional<std::uint64_t> seed) {
            return load_experiment_config(path, seed);
        },
        py::arg("path"), py::arg("seed") = py::none());
    m.def("run_experiment", &run_experiment, py::arg("spec"));

#ifdef VERSION_INFO
    m.attr("__version__") = MACRO_STRINGIFY(VERSION_INFO);
#else
    m.attr("__version__") = "dev";
#endif
}
