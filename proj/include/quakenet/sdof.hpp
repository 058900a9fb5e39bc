#pragma once

// Single-degree-of-freedom response to base excitation.
//
// The response of  x'' + 2(xi w) x' + w^2 x = -a_g(t)  is evaluated through
// the convolution
//
//     x(t) = -(1/w) * integral_0^t a_g(tau) exp(-c (t - tau)) sin(w (t - tau)) dtau
//
// with c = xi*w the damping rate. c = 0 gives the undamped solution. The
// quadrature is the trapezoidal rule on the record's own sampling grid.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace quakenet {

/// Uniformly sampled ground acceleration (m/s^2).
class GroundMotionRecord {
public:
    /// Throws InputError unless dt > 0, at least two samples and all finite.
    GroundMotionRecord(double dt, std::vector<double> samples, std::string label = {});

    double dt() const noexcept { return dt_; }
    std::span<const double> samples() const noexcept { return samples_; }
    std::size_t size() const noexcept { return samples_.size(); }
    const std::string& label() const noexcept { return label_; }

    double duration() const noexcept { return dt_ * static_cast<double>(samples_.size() - 1); }
    double peak() const noexcept;

    bool operator==(const GroundMotionRecord&) const = default;

private:
    double dt_;
    std::vector<double> samples_;
    std::string label_;
};

/// Frequency used inside the sine of the damped kernel.
enum class KernelFrequency {
    literal,    ///< sin(w s), prefactor 1/w
    corrected,  ///< sin(w_d s) with w_d = w sqrt(1 - xi^2), prefactor 1/w_d
};

/// How a damping value is to be read. Never inferred from magnitude.
struct DampingSpec {
    enum class Kind {
        none,   ///< undamped
        rate,   ///< value is xi*w in 1/s
        ratio,  ///< value is the dimensionless xi; rate = xi * w
    };

    Kind kind = Kind::none;
    double value = 0.0;

    static DampingSpec none() { return {}; }
    static DampingSpec rate(double c) { return {Kind::rate, c}; }
    static DampingSpec ratio(double xi) { return {Kind::ratio, xi}; }

    /// Damping rate xi*w for a structure of natural frequency omega.
    double rate_for(double omega) const;
};

/// Structural parameters. Period follows the T = 1/w convention.
class SdofSystem {
public:
    /// Throws DomainError for omega <= 0, a negative rate, or a corrected
    /// kernel with xi >= 1.
    explicit SdofSystem(double omega, double damping_rate = 0.0,
                        KernelFrequency kernel = KernelFrequency::literal);

    static SdofSystem with_damping(double omega, const DampingSpec& damping,
                                   KernelFrequency kernel = KernelFrequency::literal);
    static SdofSystem from_period(double period, const DampingSpec& damping,
                                  KernelFrequency kernel = KernelFrequency::literal);

    double omega() const noexcept { return omega_; }
    double damping_rate() const noexcept { return damping_rate_; }
    double damping_ratio() const noexcept { return damping_rate_ / omega_; }
    double period() const noexcept { return 1.0 / omega_; }
    KernelFrequency kernel() const noexcept { return kernel_; }

    /// Frequency inside the kernel's sine (w, or w_d for the corrected kernel).
    double kernel_frequency() const noexcept;

private:
    double omega_;
    double damping_rate_;
    KernelFrequency kernel_;
};

/// Response time series; peak is recomputed from values.
class ResponseHistory {
public:
    ResponseHistory(double dt, std::vector<double> values);

    double dt() const noexcept { return dt_; }
    std::span<const double> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    double peak() const noexcept { return peak_; }

private:
    double dt_;
    std::vector<double> values_;
    double peak_;
};

struct ResponseSpectrum {
    std::vector<double> periods;
    std::vector<double> peaks;
    DampingSpec damping;
};

ResponseHistory respond_undamped(const GroundMotionRecord& record, double omega);

/// Direct O(n^2) trapezoidal quadrature of the convolution.
ResponseHistory respond_damped(const GroundMotionRecord& record, const SdofSystem& system);

/// Same quadrature evaluated in O(n) through the recurrence
/// S_n = exp((-c + i w) dt) S_{n-1} + a_n,  x_n = -(dt/w) Im S_n.
ResponseHistory respond_damped_incremental(const GroundMotionRecord& record,
                                           const SdofSystem& system);

/// Peak |response| per period with w = 1/T. Periods must be strictly
/// increasing and positive. threads > 1 evaluates periods concurrently; the
/// result is identical to the serial one.
ResponseSpectrum response_spectrum(const GroundMotionRecord& record,
                                   std::span<const double> periods,
                                   const DampingSpec& damping,
                                   KernelFrequency kernel = KernelFrequency::literal,
                                   unsigned threads = 1);

/// Evenly spaced periods first, first+step, ... up to last inclusive.
/// Each value is computed as first + i*step so rounding does not accumulate.
std::vector<double> period_sweep(double first, double last, double step);

/// Multiplies every sample by factor; the label gets an "@<factor>" suffix.
GroundMotionRecord scale_record(const GroundMotionRecord& record, double factor);

}  // namespace quakenet
