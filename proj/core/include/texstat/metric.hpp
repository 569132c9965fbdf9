#pragma once

#include "texstat/signal.hpp"
#include "texstat/statistics.hpp"

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace texstat {

using BlockWeights = std::array<double, 5>;

struct MetricConfig {
    StatsConfig stats;
    BlockWeights beta{1.0, 1.0, 1.0, 1.0, 1.0};

    /// Throws InvalidConfig on negative or all-zero beta, or an invalid stats config.
    void validate() const;

    bool operator==(const MetricConfig&) const = default;
};

/// Sum over blocks of beta_i * mean squared difference. Throws
/// ConfigMismatch when the two sets were computed under different configs.
double texstat_from_stats(const SummaryStats& a, const SummaryStats& b, const BlockWeights& beta);

/// TexStat distance between two frames.
double texstat_loss(const Signal& x, const Signal& y, const MetricConfig& cfg);

/// Reusable evaluator: builds the filterbanks once.
class TexStatMetric {
public:
    explicit TexStatMetric(MetricConfig cfg);

    const MetricConfig& config() const noexcept { return cfg_; }
    const StatsAnalyzer& analyzer() const noexcept { return analyzer_; }

    SummaryStats stats(std::span<const double> x) const { return analyzer_(x); }
    double operator()(std::span<const double> x, std::span<const double> y) const;

private:
    MetricConfig cfg_;
    StatsAnalyzer analyzer_;
};

inline constexpr double kMssEpsilon = 1e-7;

/// FFT sizes of the default multi-scale spectrogram comparison.
std::vector<std::size_t> default_mss_sizes();

/// Multi-scale spectrogram loss: for each FFT size, Hann window, hop = size/4,
/// mean |(|X| - |Y|)| + mean |log(|X| + eps) - log(|Y| + eps)|, summed over sizes.
/// Signals shorter than a window are zero-padded to one frame.
double mss_loss(std::span<const double> x, std::span<const double> y,
                std::span<const std::size_t> fft_sizes);
double mss_loss(std::span<const double> x, std::span<const double> y);

double mse_loss(std::span<const double> x, std::span<const double> y);
double mae_loss(std::span<const double> x, std::span<const double> y);

}  // namespace texstat
