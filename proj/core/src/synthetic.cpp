#include "texstat/synthetic.hpp"

#include "texstat/error.hpp"
#include "texstat/fft.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <string>

namespace texstat::synthetic {

namespace {

constexpr double kTargetRms = 0.1;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform() { return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }
    double normal() {
        return std::sqrt(-2.0 * std::log(uniform())) * std::cos(kTwoPi * uniform());
    }
    double exponential(double mean) { return -mean * std::log(uniform()); }

private:
    std::mt19937_64 gen_;
};

std::vector<double> white(std::size_t n, Rng& rng) {
    std::vector<double> out(n);
    for (auto& v : out) v = rng.normal();
    return out;
}

std::vector<double> shape(std::vector<double> x, double sample_rate, const std::function<double(double)>& gain) {
    const std::size_t n = x.size();
    auto spec = fft::rfft(x);
    for (std::size_t k = 0; k < spec.size(); ++k) {
        spec[k] *= gain(static_cast<double>(k) * sample_rate / static_cast<double>(n));
    }
    return fft::irfft(spec, n);
}

void normalize(std::vector<double>& x) {
    const double r = rms(x);
    if (r <= 0.0) return;
    for (auto& v : x) v *= kTargetRms / r;
}

// Event onsets of a Poisson process with the given rate.
std::vector<std::size_t> onsets(std::size_t n, double sample_rate, double rate, Rng& rng) {
    std::vector<std::size_t> out;
    double t = rng.exponential(1.0 / rate);
    while (t * sample_rate < static_cast<double>(n)) {
        out.push_back(static_cast<std::size_t>(t * sample_rate));
        t += rng.exponential(1.0 / rate);
    }
    return out;
}

std::vector<double> am_noise(std::size_t n, double sr, Rng& rng) {
    const double fc = rng.log_uniform(250.0, 4000.0);
    const double half_width = rng.uniform(0.5, 1.5);  // octaves
    const double tilt = rng.uniform(0.5, 1.5);
    auto x = shape(white(n, rng), sr, [&](double f) {
        if (f < 20.0) return 0.0;
        const double oct = std::log2(f / fc) / half_width;
        return std::exp(-0.5 * oct * oct) + 0.03 * std::pow(1000.0 / std::max(f, 50.0), tilt);
    });
    const double rate = rng.uniform(3.0, 16.0);
    const double depth = rng.uniform(0.4, 0.9);
    const double phase = rng.uniform(0.0, kTwoPi);
    for (std::size_t t = 0; t < n; ++t) {
        x[t] *= 1.0 + depth * std::sin(kTwoPi * rate * static_cast<double>(t) / sr + phase);
    }
    return x;
}

std::vector<double> rain(std::size_t n, double sr, Rng& rng) {
    std::vector<double> drops(n, 0.0);
    for (std::size_t start : onsets(n, sr, 400.0, rng)) {
        const double tau = rng.uniform(0.0005, 0.002) * sr;
        const double amp = std::exp(0.6 * rng.normal());
        const auto len = static_cast<std::size_t>(6.0 * tau);
        for (std::size_t i = 0; i < len && start + i < n; ++i) {
            drops[start + i] += amp * std::exp(-static_cast<double>(i) / tau) * rng.normal();
        }
    }
    auto hiss = white(n, rng);
    for (std::size_t t = 0; t < n; ++t) drops[t] += 0.3 * hiss[t];
    return shape(std::move(drops), sr, [](double f) {
        if (f < 20.0) return 0.0;
        const double r = f / 1500.0;
        return r * r / (1.0 + r * r);
    });
}

std::vector<double> wind(std::size_t n, double sr, Rng& rng) {
    const double corner = rng.uniform(250.0, 600.0);
    const double peak = rng.uniform(500.0, 1000.0);
    auto x = shape(white(n, rng), sr, [&](double f) {
        if (f < 20.0) return 0.0;
        const double q = (f - peak) / (0.15 * peak);
        return 1.0 / (1.0 + (f / corner) * (f / corner)) + 0.5 * std::exp(-0.5 * q * q);
    });
    auto gust = shape(white(n, rng), sr, [](double f) { return f < 1.0 ? 1.0 : 0.0; });
    const double gr = rms(gust);
    for (std::size_t t = 0; t < n; ++t) x[t] *= std::exp(1.2 * gust[t] / std::max(gr, 1e-12));
    return x;
}

std::vector<double> water(std::size_t n, double sr, Rng& rng) {
    std::vector<double> x(n, 0.0);
    for (std::size_t start : onsets(n, sr, 150.0, rng)) {
        const double f0 = rng.log_uniform(400.0, 2500.0);
        const double dur = rng.uniform(0.01, 0.04) * sr;
        const double tau = dur / 4.0;
        const double amp = std::exp(0.5 * rng.normal());
        const double rise = rng.uniform(0.1, 0.5);
        double phase = rng.uniform(0.0, kTwoPi);
        const auto len = static_cast<std::size_t>(dur);
        for (std::size_t i = 0; i < len && start + i < n; ++i) {
            const double u = static_cast<double>(i) / dur;
            phase += kTwoPi * f0 * (1.0 + rise * u) / sr;
            const double attack = std::min(1.0, static_cast<double>(i) / (0.001 * sr));
            x[start + i] += amp * attack * std::exp(-static_cast<double>(i) / tau) * std::sin(phase);
        }
    }
    auto bed = shape(white(n, rng), sr, [](double f) { return f < 20.0 ? 0.0 : 1.0 / (1.0 + f / 300.0); });
    const double xr = rms(x);
    const double br = rms(bed);
    for (std::size_t t = 0; t < n; ++t) x[t] += 0.25 * xr * bed[t] / std::max(br, 1e-12);
    return x;
}

std::vector<double> crackle(std::size_t n, double sr, Rng& rng) {
    std::vector<double> x(n, 0.0);
    for (std::size_t start : onsets(n, sr, 25.0, rng)) {
        const double amp = std::pow(rng.uniform(), -1.0 / 1.5);  // Pareto tail
        const double tau = rng.uniform(0.0002, 0.001) * sr;
        const auto len = static_cast<std::size_t>(5.0 * tau) + 1;
        for (std::size_t i = 0; i < len && start + i < n; ++i) {
            x[start + i] += amp * std::exp(-static_cast<double>(i) / tau) * rng.normal();
        }
    }
    x = shape(std::move(x), sr, [](double f) { return f < 100.0 ? 0.0 : 1.0; });
    auto rumble = shape(white(n, rng), sr, [](double f) { return f < 20.0 ? 0.0 : 1.0 / (1.0 + std::pow(f / 150.0, 2)); });
    const double xr = rms(x);
    const double rr = rms(rumble);
    for (std::size_t t = 0; t < n; ++t) x[t] += 0.4 * xr * rumble[t] / std::max(rr, 1e-12);
    return x;
}

}  // namespace

std::string_view name(Texture t) noexcept {
    switch (t) {
    case Texture::am_noise: return "am_noise";
    case Texture::rain: return "rain";
    case Texture::wind: return "wind";
    case Texture::water: return "water";
    case Texture::crackle: return "crackle";
    }
    return "unknown";
}

Texture texture_from_name(std::string_view n) {
    for (Texture t : kAllTextures) {
        if (name(t) == n) return t;
    }
    throw Error(ErrorCode::invalid_config, "unknown texture '" + std::string(n) + "'");
}

Signal make_texture(Texture kind, std::size_t length, double sample_rate, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> x;
    switch (kind) {
    case Texture::am_noise: x = am_noise(length, sample_rate, rng); break;
    case Texture::rain: x = rain(length, sample_rate, rng); break;
    case Texture::wind: x = wind(length, sample_rate, rng); break;
    case Texture::water: x = water(length, sample_rate, rng); break;
    case Texture::crackle: x = crackle(length, sample_rate, rng); break;
    }
    normalize(x);
    return {std::move(x), sample_rate};
}

std::vector<Signal> am_noise_corpus(std::size_t count, std::size_t length, double sample_rate, std::uint64_t seed) {
    std::vector<Signal> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(make_texture(Texture::am_noise, length, sample_rate, seed + i));
    return out;
}

std::vector<Signal> mixed_corpus(std::size_t per_kind, std::size_t length, double sample_rate, std::uint64_t seed) {
    std::vector<Signal> out;
    std::uint64_t s = seed;
    for (Texture t : kAllTextures) {
        for (std::size_t i = 0; i < per_kind; ++i) out.push_back(make_texture(t, length, sample_rate, s++));
    }
    return out;
}

}  // namespace texstat::synthetic
