#include "texstat/signal.hpp"

#include "texstat/error.hpp"

#include <cmath>
#include <string>

namespace texstat {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::invalid_spec: return "InvalidSpec";
    case ErrorCode::too_few_bins: return "TooFewBins";
    case ErrorCode::length_mismatch: return "LengthMismatch";
    case ErrorCode::config_mismatch: return "ConfigMismatch";
    case ErrorCode::non_finite_input: return "NonFiniteInput";
    case ErrorCode::params_too_long: return "ParamsTooLong";
    case ErrorCode::shape_mismatch: return "ShapeMismatch";
    case ErrorCode::dim_mismatch: return "DimMismatch";
    case ErrorCode::degenerate_covariance: return "DegenerateCovariance";
    case ErrorCode::invalid_fraction: return "InvalidFraction";
    case ErrorCode::invalid_config: return "InvalidConfig";
    case ErrorCode::unsupported_format: return "UnsupportedFormat";
    case ErrorCode::corrupt_file: return "CorruptFile";
    case ErrorCode::not_found: return "NotFound";
    case ErrorCode::io_error: return "IoError";
    }
    return "Unknown";
}

void require_finite(std::span<const double> x, const char* what) {
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i])) {
            throw Error(ErrorCode::non_finite_input,
                        std::string(what) + " has a non-finite sample at index " + std::to_string(i));
        }
    }
}

std::vector<double> circular_shift(std::span<const double> x, std::size_t shift) {
    const std::size_t n = x.size();
    std::vector<double> out(n);
    if (n == 0) return out;
    shift %= n;
    for (std::size_t t = 0; t < n; ++t) out[(t + shift) % n] = x[t];
    return out;
}

double rms(std::span<const double> x) {
    if (x.empty()) return 0.0;
    double acc = 0.0;
    for (double v : x) acc += v * v;
    return std::sqrt(acc / static_cast<double>(x.size()));
}

}  // namespace texstat
