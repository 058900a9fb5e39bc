#pragma once

// Ground-motion files, synthetic records and CSV tables.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "quakenet/sdof.hpp"

namespace quakenet {

/// Accepts two layouts, '#' starting a comment line in both:
///
///   dt=0.02            t,accel
///   0.0                0.00,0.0
///   0.1                0.02,0.1
///   ...                ...
///
/// In the first, a data line may also hold several comma or space separated
/// values. In the CSV layout the first column must be named t; dt comes from
/// the first two rows and every later interval must match it within 1e-9
/// relative.
GroundMotionRecord parse_record(std::istream& in, std::string label = {});
GroundMotionRecord parse_record_file(const std::string& path);

enum class RecordLayout { dt_header, csv };

void write_record(const GroundMotionRecord& record, std::ostream& out,
                  RecordLayout layout = RecordLayout::dt_header);
void write_record_file(const GroundMotionRecord& record, const std::string& path,
                       RecordLayout layout = RecordLayout::dt_header);

enum class SyntheticKind { sine, sweep, noise };

SyntheticKind parse_synthetic_kind(const std::string& name);

struct SyntheticParams {
    SyntheticKind kind = SyntheticKind::sine;
    double duration = 14.92;  // s
    double dt = 0.02;         // s
    double peak = 0.16885;    // m/s^2, max |a| of the result
    double frequency = 1.0;   // Hz; sine frequency or sweep start
    double frequency_end = 5.0;  // Hz; sweep end
    double corner = 5.0;      // Hz; noise low-pass corner
    std::uint64_t seed = 1;
};

/// round(duration / dt) + 1 samples starting at t = 0, scaled so the
/// largest magnitude equals peak.
///   sine:  sin(2 pi f t)
///   sweep: linear chirp from frequency to frequency_end over the duration
///   noise: seeded Gaussian noise through a one-pole low-pass, shaped by the
///          envelope (t/tp) exp(1 - t/tp) with tp = duration / 4
GroundMotionRecord generate_synthetic(const SyntheticParams& params);

/// Header names plus one vector per column.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> columns;

    std::size_t rows() const noexcept { return columns.empty() ? 0 : columns.front().size(); }
    /// Throws InputError when the column is absent.
    const std::vector<double>& column(const std::string& name) const;
};

/// Comma separated, LF line endings, 17 significant digits.
void write_csv(std::ostream& out, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns);

CsvTable read_csv(std::istream& in);

}  // namespace quakenet
