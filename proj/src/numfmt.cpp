#include "quakenet/numfmt.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <system_error>

namespace quakenet {

std::string format_number(double value) {
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value,
                                   std::chars_format::general, 17);
    if (ec != std::errc{}) return "nan";
    return std::string(buf.data(), end);
}

double round_significant(double value, int digits) {
    if (value == 0.0 || !std::isfinite(value)) return value;
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value,
                                   std::chars_format::scientific, digits - 1);
    double rounded = value;
    std::from_chars(buf.data(), end, rounded);
    return rounded;
}

bool parse_number(std::string_view token, double& out) {
    token = trim(token);
    if (!token.empty() && token.front() == '+') token.remove_prefix(1);
    if (token.empty()) return false;
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || ptr != token.data() + token.size() || !std::isfinite(value))
        return false;
    out = value;
    return true;
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

}  // namespace quakenet
