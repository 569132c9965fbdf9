#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace texstat {

/// Mono audio with its sample rate. Samples are nominally in [-1, 1].
struct Signal {
    std::vector<double> samples;
    double sample_rate = 44100.0;

    Signal() = default;
    Signal(std::vector<double> s, double sr) : samples(std::move(s)), sample_rate(sr) {}

    std::size_t size() const noexcept { return samples.size(); }
    bool empty() const noexcept { return samples.empty(); }
    std::span<const double> view() const noexcept { return samples; }
};

/// Throws NonFiniteInput if any sample is NaN or infinite.
void require_finite(std::span<const double> x, const char* what);

/// Circular shift: out[t] = x[(t - shift) mod n].
std::vector<double> circular_shift(std::span<const double> x, std::size_t shift);

double rms(std::span<const double> x);

}  // namespace texstat
