#include "quakenet/record_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>

#include "quakenet/errors.hpp"
#include "quakenet/numfmt.hpp"

namespace quakenet {

namespace {

std::vector<std::string_view> split_fields(std::string_view line, bool allow_space) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (pos <= line.size()) {
        std::size_t end = line.find_first_of(allow_space ? ", \t" : ",", pos);
        if (end == std::string_view::npos) end = line.size();
        auto field = trim(line.substr(pos, end - pos));
        if (!field.empty() || !allow_space) out.push_back(field);
        pos = end + 1;
    }
    return out;
}

bool is_skippable(std::string_view line) {
    line = trim(line);
    return line.empty() || line.front() == '#';
}

double number_at(std::string_view token, std::size_t line_no) {
    double v = 0.0;
    if (!parse_number(token, v))
        throw ParseError(line_no, "non-numeric token '" + std::string(token) + "'");
    return v;
}

}  // namespace

GroundMotionRecord parse_record(std::istream& in, std::string label) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!is_skippable(line)) break;
    }
    if (in.fail() && line_no == 0) throw ParseError(1, "empty record file");
    if (is_skippable(line)) throw ParseError(line_no, "record file has no data");

    const std::string_view first = trim(line);
    if (first.starts_with("dt=")) {
        const double dt = number_at(trim(first.substr(3)), line_no);
        if (!(dt > 0.0)) throw ParseError(line_no, "dt must be positive");
        std::vector<double> samples;
        while (std::getline(in, line)) {
            ++line_no;
            if (is_skippable(line)) continue;
            for (auto tok : split_fields(line, true)) samples.push_back(number_at(tok, line_no));
        }
        return GroundMotionRecord(dt, std::move(samples), std::move(label));
    }

    const auto header = split_fields(first, false);
    if (header.size() != 2 || header[0] != "t")
        throw ParseError(line_no, "expected 'dt=<seconds>' or a 't,accel' CSV header");

    std::vector<double> times;
    std::vector<double> samples;
    double dt = 0.0;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_skippable(line)) continue;
        const auto fields = split_fields(line, false);
        if (fields.size() != 2)
            throw ParseError(line_no, "expected 2 fields, got " + std::to_string(fields.size()));
        const double t = number_at(fields[0], line_no);
        samples.push_back(number_at(fields[1], line_no));
        if (times.size() == 1) {
            dt = t - times[0];
            if (!(dt > 0.0)) throw FormatError("line " + std::to_string(line_no) +
                                               ": time column must increase");
        } else if (times.size() > 1) {
            const double step = t - times.back();
            if (std::abs(step - dt) > 1e-9 * dt)
                throw FormatError("line " + std::to_string(line_no) + " (row " +
                                  std::to_string(times.size() + 1) +
                                  "): non-uniform time spacing " + format_number(step) +
                                  " vs " + format_number(dt));
        }
        times.push_back(t);
    }
    if (times.size() < 2) throw InputError("record needs at least 2 samples");
    return GroundMotionRecord(dt, std::move(samples), std::move(label));
}

GroundMotionRecord parse_record_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open record file '" + path + "'");
    return parse_record(in, path);
}

void write_record(const GroundMotionRecord& record, std::ostream& out, RecordLayout layout) {
    if (!record.label().empty()) out << "# " << record.label() << '\n';
    const auto samples = record.samples();
    if (layout == RecordLayout::dt_header) {
        out << "dt=" << format_number(record.dt()) << '\n';
        for (double s : samples) out << format_number(s) << '\n';
        return;
    }
    out << "t,accel\n";
    for (std::size_t i = 0; i < samples.size(); ++i)
        out << format_number(static_cast<double>(i) * record.dt()) << ',' << format_number(samples[i])
            << '\n';
}

void write_record_file(const GroundMotionRecord& record, const std::string& path,
                       RecordLayout layout) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot open '" + path + "' for writing");
    write_record(record, out, layout);
}

SyntheticKind parse_synthetic_kind(const std::string& name) {
    if (name == "sine") return SyntheticKind::sine;
    if (name == "sweep") return SyntheticKind::sweep;
    if (name == "noise") return SyntheticKind::noise;
    throw UsageError("unknown synthetic kind '" + name + "' (sine, sweep, noise)");
}

GroundMotionRecord generate_synthetic(const SyntheticParams& p) {
    if (!(p.duration > 0.0) || !(p.dt > 0.0) || !(p.peak > 0.0) || !std::isfinite(p.peak))
        throw DomainError("synthetic record needs duration > 0, dt > 0 and peak > 0");
    if (!(p.frequency > 0.0) || !(p.frequency_end > 0.0) || !(p.corner > 0.0))
        throw DomainError("synthetic frequencies must be positive");
    const auto count = static_cast<std::size_t>(std::llround(p.duration / p.dt)) + 1;
    if (count < 2) throw DomainError("synthetic record would have fewer than 2 samples");

    constexpr double two_pi = 2.0 * std::numbers::pi;
    std::vector<double> a(count);
    std::string label;
    switch (p.kind) {
        case SyntheticKind::sine:
            label = "synthetic-sine";
            for (std::size_t i = 0; i < count; ++i)
                a[i] = std::sin(two_pi * p.frequency * static_cast<double>(i) * p.dt);
            break;
        case SyntheticKind::sweep: {
            label = "synthetic-sweep";
            const double rate = (p.frequency_end - p.frequency) / p.duration;
            for (std::size_t i = 0; i < count; ++i) {
                const double t = static_cast<double>(i) * p.dt;
                a[i] = std::sin(two_pi * (p.frequency * t + 0.5 * rate * t * t));
            }
            break;
        }
        case SyntheticKind::noise: {
            label = "synthetic-noise";
            std::mt19937_64 rng(p.seed);
            auto unit = [&] { return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53; };
            const double alpha = 1.0 - std::exp(-two_pi * p.corner * p.dt);
            const double tp = p.duration / 4.0;
            double filtered = 0.0;
            for (std::size_t i = 0; i < count; ++i) {
                // Box-Muller, cosine branch only.
                const double u1 = unit();
                const double u2 = unit();
                const double g = std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
                filtered += alpha * (g - filtered);
                const double t = static_cast<double>(i) * p.dt;
                a[i] = filtered * (t / tp) * std::exp(1.0 - t / tp);
            }
            break;
        }
    }
    double biggest = 0.0;
    for (double x : a) biggest = std::max(biggest, std::abs(x));
    if (!(biggest > 0.0)) throw DomainError("synthetic record is identically zero");
    const double gain = p.peak / biggest;
    for (double& x : a) x *= gain;
    return GroundMotionRecord(p.dt, std::move(a), std::move(label));
}

const std::vector<double>& CsvTable::column(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw InputError("CSV has no column '" + name + "'");
    return columns[static_cast<std::size_t>(it - header.begin())];
}

void write_csv(std::ostream& out, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns) {
    if (header.size() != columns.size()) throw InputError("CSV header/column count mismatch");
    for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
    out << '\n';
    const std::size_t rows = columns.empty() ? 0 : columns.front().size();
    for (const auto& col : columns)
        if (col.size() != rows) throw InputError("CSV columns differ in length");
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < columns.size(); ++c)
            out << (c ? "," : "") << format_number(columns[c][r]);
        out << '\n';
    }
}

CsvTable read_csv(std::istream& in) {
    CsvTable table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_skippable(line)) continue;
        const auto fields = split_fields(line, false);
        if (table.header.empty()) {
            for (auto f : fields) table.header.emplace_back(f);
            table.columns.resize(fields.size());
            continue;
        }
        if (fields.size() != table.header.size())
            throw ParseError(line_no, "expected " + std::to_string(table.header.size()) +
                                          " fields, got " + std::to_string(fields.size()));
        for (std::size_t c = 0; c < fields.size(); ++c)
            table.columns[c].push_back(number_at(fields[c], line_no));
    }
    if (table.header.empty()) throw ParseError(line_no == 0 ? 1 : line_no, "empty CSV");
    return table;
}

}  // namespace quakenet
