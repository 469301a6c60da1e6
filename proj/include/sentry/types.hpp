#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace sentry {

using FeatureVector = std::vector<double>;

/// Binary decision shared by every detector and by ground truth.
enum class Verdict : std::uint8_t { Normal = 0, Intrusive = 1 };

constexpr std::string_view to_string(Verdict v) {
    return v == Verdict::Intrusive ? "Intrusive" : "Normal";
}

} // namespace sentry
