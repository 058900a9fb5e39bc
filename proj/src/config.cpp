#include "quakenet/config.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>

#include "quakenet/errors.hpp"
#include "quakenet/numfmt.hpp"
#include "quakenet/record_io.hpp"

namespace quakenet {

namespace {

struct Entry {
    std::string value;
    std::size_t line;
};

[[noreturn]] void bad_value(const std::string& key, const Entry& e, const std::string& why) {
    throw UsageError("config line " + std::to_string(e.line) + ": " + key + "=" + e.value + ": " +
                     why);
}

double as_number(const std::string& key, const Entry& e) {
    double v = 0.0;
    if (!parse_number(e.value, v)) bad_value(key, e, "not a number");
    return v;
}

std::uint64_t as_count(const std::string& key, const Entry& e) {
    const double v = as_number(key, e);
    if (v < 0.0 || v != std::floor(v) || v > 9.0e15) bad_value(key, e, "not a non-negative integer");
    return static_cast<std::uint64_t>(v);
}

bool as_bool(const std::string& key, const Entry& e) {
    if (e.value == "true" || e.value == "1") return true;
    if (e.value == "false" || e.value == "0") return false;
    bad_value(key, e, "expected true or false");
}

}  // namespace

const std::vector<std::string>& experiment_config_keys() {
    static const std::vector<std::string> keys = {
        "mode",          "record",         "eval_record",     "eval_match_peak",
        "omega",         "damping",        "damping_kind",    "damped_frequency",
        "period_min",    "period_max",     "period_step",     "eval_period_step",
        "train_points",  "train_fraction", "factors",         "hidden",
        "beta",          "max_epochs",     "error_goal",      "seed",
        "init_range",    "window",         "bias",            "threads",
    };
    return keys;
}

DampingSpec::Kind parse_damping_kind(const std::string& name) {
    if (name == "none") return DampingSpec::Kind::none;
    if (name == "rate") return DampingSpec::Kind::rate;
    if (name == "ratio") return DampingSpec::Kind::ratio;
    throw UsageError("unknown damping kind '" + name + "' (none, rate, ratio)");
}

KernelFrequency parse_kernel_frequency(const std::string& name) {
    if (name == "literal") return KernelFrequency::literal;
    if (name == "corrected") return KernelFrequency::corrected;
    throw UsageError("unknown damped frequency '" + name + "' (literal, corrected)");
}

ExperimentMode parse_experiment_mode(const std::string& name) {
    if (name == "accel_to_response") return ExperimentMode::accel_to_response;
    if (name == "period_to_peak") return ExperimentMode::period_to_peak;
    throw UsageError("unknown mode '" + name + "' (accel_to_response, period_to_peak)");
}

std::vector<double> parse_number_list(const std::string& text) {
    std::vector<double> out;
    std::string_view rest = text;
    while (true) {
        const auto comma = rest.find(',');
        const auto token = trim(rest.substr(0, comma));
        double v = 0.0;
        if (!parse_number(token, v)) throw UsageError("invalid number '" + std::string(token) + "' in list");
        out.push_back(v);
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
    }
    return out;
}

ExperimentSpec parse_experiment_config(std::istream& in, const std::string& base_dir,
                                       std::optional<std::uint64_t> seed_override) {
    const auto& known = experiment_config_keys();
    std::map<std::string, Entry> entries;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view text = line;
        if (const auto hash = text.find('#'); hash != std::string_view::npos) text = text.substr(0, hash);
        text = trim(text);
        if (text.empty()) continue;
        const auto eq = text.find('=');
        if (eq == std::string_view::npos)
            throw UsageError("config line " + std::to_string(line_no) + ": expected key=value");
        std::string key(trim(text.substr(0, eq)));
        std::string value(trim(text.substr(eq + 1)));
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw UsageError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        if (entries.contains(key))
            throw UsageError("config line " + std::to_string(line_no) + ": repeated key '" + key + "'");
        entries[key] = Entry{std::move(value), line_no};
    }
    if (!entries.contains("record")) throw UsageError("config is missing 'record'");

    auto resolve = [&](const std::string& p) {
        std::filesystem::path path(p);
        if (path.is_relative() && !base_dir.empty()) path = std::filesystem::path(base_dir) / path;
        return path.string();
    };
    auto has = [&](const char* key) { return entries.contains(key); };
    auto num = [&](const char* key) { return as_number(key, entries.at(key)); };
    auto count = [&](const char* key) { return as_count(key, entries.at(key)); };

    ExperimentSpec spec(parse_record_file(resolve(entries.at("record").value)));
    if (has("mode")) spec.mode = parse_experiment_mode(entries.at("mode").value);
    if (has("damping_kind"))
        spec.system.damping.kind = parse_damping_kind(entries.at("damping_kind").value);
    if (has("damped_frequency"))
        spec.system.kernel = parse_kernel_frequency(entries.at("damped_frequency").value);
    if (has("factors")) spec.factors = parse_number_list(entries.at("factors").value);

    if (has("eval_record")) spec.eval_record = parse_record_file(resolve(entries.at("eval_record").value));
    if (has("eval_match_peak")) spec.eval_match_peak = as_bool("eval_match_peak", entries.at("eval_match_peak"));
    if (has("omega")) spec.system.omega = num("omega");
    if (has("damping")) {
        spec.system.damping.value = num("damping");
        if (spec.system.damping.kind == DampingSpec::Kind::none && spec.system.damping.value != 0.0)
            throw UsageError("config: damping needs damping_kind=rate or damping_kind=ratio");
    } else if (spec.system.damping.kind != DampingSpec::Kind::none) {
        throw UsageError("config: damping_kind given without damping");
    }
    if (has("period_min")) spec.sweep.first = num("period_min");
    if (has("period_max")) spec.sweep.last = num("period_max");
    if (has("period_step")) spec.sweep.step = num("period_step");
    if (has("eval_period_step")) spec.eval_period_step = num("eval_period_step");
    if (has("train_points")) spec.train_points = count("train_points");
    if (has("train_fraction")) spec.train_fraction = num("train_fraction");
    if (has("hidden")) spec.hidden = count("hidden");
    if (has("beta")) spec.trainer.beta = num("beta");
    if (has("max_epochs")) spec.trainer.max_epochs = count("max_epochs");
    if (has("error_goal")) spec.trainer.error_goal = num("error_goal");
    if (has("seed")) spec.trainer.seed = count("seed");
    if (has("init_range")) spec.trainer.init_range = num("init_range");
    if (has("window")) spec.layout.window = count("window");
    if (has("bias")) spec.layout.bias = as_bool("bias", entries.at("bias"));
    if (has("threads")) spec.threads = static_cast<unsigned>(std::min<std::uint64_t>(count("threads"), 256));
    if (seed_override) spec.trainer.seed = *seed_override;

    spec.validate();
    return spec;
}

ExperimentSpec load_experiment_config(const std::string& path,
                                      std::optional<std::uint64_t> seed_override) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open config file '" + path + "'");
    const auto dir = std::filesystem::path(path).parent_path().string();
    return parse_experiment_config(in, dir, seed_override);
}

}  // namespace quakenet
