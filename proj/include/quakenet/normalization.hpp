#pragma once

#include <cstddef>
#include <span>

namespace quakenet {

/// Affine maps x -> (x - offset) / scale * 0.9 for inputs and targets.
/// Built from extrema, so the fitted data lands in [-0.9, 0.9] and the
/// bipolar sigmoid keeps some headroom.
struct Normalization {
    static constexpr double kHalfRange = 0.9;

    double input_offset = 0.0;
    double input_scale = 1.0;
    double target_offset = 0.0;
    double target_scale = 1.0;

    /// Set when one of the series was constant and its scale fell back to 1.
    bool degenerate = false;

    static Normalization from_extrema(std::span<const double> inputs,
                                      std::span<const double> targets);

    double normalize_input(double x) const noexcept {
        return (x - input_offset) / input_scale * kHalfRange;
    }
    double denormalize_input(double y) const noexcept {
        return y / kHalfRange * input_scale + input_offset;
    }
    double normalize_target(double x) const noexcept {
        return (x - target_offset) / target_scale * kHalfRange;
    }
    double denormalize_target(double y) const noexcept {
        return y / kHalfRange * target_scale + target_offset;
    }

    /// Compares the four parameters; the degenerate flag is advisory.
    bool operator==(const Normalization& o) const noexcept {
        return input_offset == o.input_offset && input_scale == o.input_scale &&
               target_offset == o.target_offset && target_scale == o.target_scale;
    }
};

/// How raw samples become a network input vector: the current value and
/// window-1 previous ones (newest first), optionally followed by a constant 1.
struct InputLayout {
    std::size_t window = 1;
    bool bias = false;

    std::size_t input_size() const noexcept { return window + (bias ? 1 : 0); }

    bool operator==(const InputLayout&) const = default;
};

}  // namespace quakenet
