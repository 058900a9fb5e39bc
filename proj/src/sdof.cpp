#include "quakenet/sdof.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <thread>

#include "quakenet/errors.hpp"
#include "quakenet/numfmt.hpp"

namespace quakenet {

namespace {

double max_abs(std::span<const double> xs) {
    double m = 0.0;
    for (double x : xs) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

GroundMotionRecord::GroundMotionRecord(double dt, std::vector<double> samples, std::string label)
    : dt_(dt), samples_(std::move(samples)), label_(std::move(label)) {
    if (!(dt_ > 0.0) || !std::isfinite(dt_))
        throw InputError("record time step must be positive and finite");
    if (samples_.size() < 2)
        throw InputError("record needs at least 2 samples, got " + std::to_string(samples_.size()));
    for (std::size_t i = 0; i < samples_.size(); ++i) {
        if (!std::isfinite(samples_[i]))
            throw InputError("record sample " + std::to_string(i) + " is not finite");
    }
}

double GroundMotionRecord::peak() const noexcept { return max_abs(samples_); }

double DampingSpec::rate_for(double omega) const {
    switch (kind) {
        case Kind::none: return 0.0;
        case Kind::rate: return value;
        case Kind::ratio: return value * omega;
    }
    return 0.0;
}

SdofSystem::SdofSystem(double omega, double damping_rate, KernelFrequency kernel)
    : omega_(omega), damping_rate_(damping_rate), kernel_(kernel) {
    if (!(omega_ > 0.0) || !std::isfinite(omega_))
        throw DomainError("natural frequency must be positive, got " + format_number(omega_));
    if (!(damping_rate_ >= 0.0) || !std::isfinite(damping_rate_))
        throw DomainError("damping rate must be non-negative, got " + format_number(damping_rate_));
    if (kernel_ == KernelFrequency::corrected && damping_ratio() >= 1.0)
        throw DomainError("corrected kernel needs damping ratio < 1, got " +
                          format_number(damping_ratio()));
}

SdofSystem SdofSystem::with_damping(double omega, const DampingSpec& damping,
                                    KernelFrequency kernel) {
    if (!(omega > 0.0) || !std::isfinite(omega))
        throw DomainError("natural frequency must be positive, got " + format_number(omega));
    return SdofSystem(omega, damping.rate_for(omega), kernel);
}

SdofSystem SdofSystem::from_period(double period, const DampingSpec& damping,
                                   KernelFrequency kernel) {
    if (!(period > 0.0) || !std::isfinite(period))
        throw DomainError("period must be positive, got " + format_number(period));
    return with_damping(1.0 / period, damping, kernel);
}

double SdofSystem::kernel_frequency() const noexcept {
    if (kernel_ == KernelFrequency::literal) return omega_;
    const double xi = damping_ratio();
    return omega_ * std::sqrt(1.0 - xi * xi);
}

ResponseHistory::ResponseHistory(double dt, std::vector<double> values)
    : dt_(dt), values_(std::move(values)), peak_(max_abs(values_)) {}

namespace {

// Trapezoidal convolution with a precomputed kernel h_k = e^{-c k dt} sin(w k dt).
// h_0 = 0, so the end-point term a_n h_0 drops out.
std::vector<double> convolve_direct(std::span<const double> a, double dt, double freq,
                                    double rate) {
    const std::size_t n = a.size();
    std::vector<double> h(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double s = static_cast<double>(k) * dt;
        h[k] = std::exp(-rate * s) * std::sin(freq * s);
    }
    const double scale = -dt / freq;
    std::vector<double> x(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) {
        double acc = 0.5 * a[0] * h[i];
        for (std::size_t m = 1; m < i; ++m) acc += a[m] * h[i - m];
        x[i] = scale * acc;
    }
    return x;
}

}  // namespace

ResponseHistory respond_undamped(const GroundMotionRecord& record, double omega) {
    return respond_damped(record, SdofSystem(omega, 0.0));
}

ResponseHistory respond_damped(const GroundMotionRecord& record, const SdofSystem& system) {
    return ResponseHistory(record.dt(),
                           convolve_direct(record.samples(), record.dt(),
                                           system.kernel_frequency(), system.damping_rate()));
}

ResponseHistory respond_damped_incremental(const GroundMotionRecord& record,
                                           const SdofSystem& system) {
    const auto a = record.samples();
    const double dt = record.dt();
    const double freq = system.kernel_frequency();
    const std::complex<double> step =
        std::exp(std::complex<double>(-system.damping_rate() * dt, freq * dt));
    const double scale = -dt / freq;

    std::vector<double> x(a.size(), 0.0);
    std::complex<double> sum = 0.5 * a[0];
    for (std::size_t i = 1; i < a.size(); ++i) {
        sum = step * sum + a[i];
        x[i] = scale * sum.imag();
    }
    return ResponseHistory(dt, std::move(x));
}

ResponseSpectrum response_spectrum(const GroundMotionRecord& record,
                                   std::span<const double> periods,
                                   const DampingSpec& damping, KernelFrequency kernel,
                                   unsigned threads) {
    for (std::size_t i = 0; i < periods.size(); ++i) {
        if (!(periods[i] > 0.0) || !std::isfinite(periods[i]))
            throw DomainError("period must be positive, got " + format_number(periods[i]));
        if (i > 0 && !(periods[i] > periods[i - 1]))
            throw DomainError("periods must be strictly increasing (entry " +
                              std::to_string(i) + ")");
    }
    // Validate every system up front so worker threads never throw.
    std::vector<SdofSystem> systems;
    systems.reserve(periods.size());
    for (double period : periods) systems.push_back(SdofSystem::from_period(period, damping, kernel));

    ResponseSpectrum out{std::vector<double>(periods.begin(), periods.end()),
                         std::vector<double>(periods.size(), 0.0), damping};

    auto work = [&](std::size_t begin, std::size_t stride) {
        for (std::size_t i = begin; i < systems.size(); i += stride)
            out.peaks[i] = respond_damped(record, systems[i]).peak();
    };
    const std::size_t workers = std::min<std::size_t>(std::max(threads, 1U), systems.size());
    if (workers <= 1) {
        work(0, 1);
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w, workers);
    }
    return out;
}

std::vector<double> period_sweep(double first, double last, double step) {
    if (!(first > 0.0) || !(step > 0.0) || !(last >= first) || !std::isfinite(last))
        throw DomainError("period sweep needs 0 < first <= last and step > 0");
    const auto count = static_cast<std::size_t>(std::floor((last - first) / step + 1e-9)) + 1;
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) out[i] = first + static_cast<double>(i) * step;
    return out;
}

GroundMotionRecord scale_record(const GroundMotionRecord& record, double factor) {
    if (!std::isfinite(factor)) throw DomainError("scale factor must be finite");
    std::vector<double> scaled(record.samples().begin(), record.samples().end());
    for (double& s : scaled) s *= factor;
    std::string label = record.label();
    if (factor != 1.0) label += "@" + format_number(factor);
    return GroundMotionRecord(record.dt(), std::move(scaled), std::move(label));
}

}  // namespace quakenet
