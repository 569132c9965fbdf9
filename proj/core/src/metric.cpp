#include "texstat/metric.hpp"

#include "texstat/error.hpp"
#include "texstat/fft.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace texstat {

void MetricConfig::validate() const {
    stats.validate();
    bool nonzero = false;
    for (double b : beta) {
        if (!(b >= 0.0) || !std::isfinite(b)) {
            throw Error(ErrorCode::invalid_config, "beta entries must be finite and non-negative");
        }
        nonzero = nonzero || b > 0.0;
    }
    if (!nonzero) throw Error(ErrorCode::invalid_config, "beta must not be all zero");
}

double texstat_from_stats(const SummaryStats& a, const SummaryStats& b, const BlockWeights& beta) {
    if (a.config_hash != b.config_hash) {
        throw Error(ErrorCode::config_mismatch,
                    "statistics come from different configs (" + a.config_hash + " vs " + b.config_hash + ")");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < 5; ++i) {
        const auto& u = a.block(i);
        const auto& v = b.block(i);
        if (u.size() != v.size()) {
            throw Error(ErrorCode::config_mismatch, "block s" + std::to_string(i + 1) + " differs in length");
        }
        if (u.empty() || beta[i] == 0.0) continue;
        double acc = 0.0;
        for (std::size_t k = 0; k < u.size(); ++k) {
            const double d = u[k] - v[k];
            acc += d * d;
        }
        total += beta[i] * (acc / static_cast<double>(u.size()));
    }
    return total;
}

TexStatMetric::TexStatMetric(MetricConfig cfg) : cfg_(std::move(cfg)), analyzer_(cfg_.stats) {
    cfg_.validate();
}

double TexStatMetric::operator()(std::span<const double> x, std::span<const double> y) const {
    return texstat_from_stats(analyzer_(x), analyzer_(y), cfg_.beta);
}

double texstat_loss(const Signal& x, const Signal& y, const MetricConfig& cfg) {
    for (const Signal* s : {&x, &y}) {
        if (s->sample_rate != cfg.stats.cochlear.sample_rate) {
            throw Error(ErrorCode::config_mismatch, "signal sample rate differs from config");
        }
    }
    return TexStatMetric(cfg)(x.view(), y.view());
}

std::vector<std::size_t> default_mss_sizes() { return {64, 128, 256, 512, 1024, 2048}; }

namespace {

void require_same_length(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw Error(ErrorCode::length_mismatch,
                    "signals differ in length: " + std::to_string(x.size()) + " vs " + std::to_string(y.size()));
    }
}

// Magnitude spectrogram, frames concatenated.
std::vector<double> magnitudes(std::span<const double> x, std::size_t size, std::span<const double> window) {
    const std::size_t hop = std::max<std::size_t>(size / 4, 1);
    std::vector<double> padded;
    if (x.size() < size) {
        padded.assign(x.begin(), x.end());
        padded.resize(size, 0.0);
        x = padded;
    }
    const std::size_t frames = (x.size() - size) / hop + 1;
    std::vector<double> out;
    out.reserve(frames * fft::half_size(size));
    std::vector<double> buf(size);
    for (std::size_t f = 0; f < frames; ++f) {
        const std::size_t start = f * hop;
        for (std::size_t i = 0; i < size; ++i) buf[i] = x[start + i] * window[i];
        for (const auto& c : fft::rfft(buf)) out.push_back(std::abs(c));
    }
    return out;
}

}  // namespace

double mss_loss(std::span<const double> x, std::span<const double> y, std::span<const std::size_t> fft_sizes) {
    require_same_length(x, y);
    if (x.empty()) return 0.0;
    double total = 0.0;
    for (std::size_t size : fft_sizes) {
        if (size < 2) throw Error(ErrorCode::invalid_config, "MSS FFT sizes must be at least 2");
        std::vector<double> window(size);
        for (std::size_t i = 0; i < size; ++i) {
            window[i] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                              static_cast<double>(size)));
        }
        const auto mx = magnitudes(x, size, window);
        const auto my = magnitudes(y, size, window);
        double lin = 0.0;
        double lg = 0.0;
        for (std::size_t i = 0; i < mx.size(); ++i) {
            lin += std::abs(mx[i] - my[i]);
            lg += std::abs(std::log(mx[i] + kMssEpsilon) - std::log(my[i] + kMssEpsilon));
        }
        const double count = static_cast<double>(mx.size());
        total += lin / count + lg / count;
    }
    return total;
}

double mss_loss(std::span<const double> x, std::span<const double> y) {
    const auto sizes = default_mss_sizes();
    return mss_loss(x, y, sizes);
}

double mse_loss(std::span<const double> x, std::span<const double> y) {
    require_same_length(x, y);
    if (x.empty()) return 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) acc += (x[i] - y[i]) * (x[i] - y[i]);
    return acc / static_cast<double>(x.size());
}

double mae_loss(std::span<const double> x, std::span<const double> y) {
    require_same_length(x, y);
    if (x.empty()) return 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) acc += std::abs(x[i] - y[i]);
    return acc / static_cast<double>(x.size());
}

}  // namespace texstat
