#include "texstat/statistics.hpp"

#include "json_internal.hpp"
#include "texstat/error.hpp"
#include "texstat/fft.hpp"
#include "texstat/hash.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace texstat {

// Calibrated on the bundled synthetic corpus with `texstat calibrate`.
// Output of `texstat calibrate` (40 synthetic frames of 65536 samples,
// default banks), rounded to four significant digits.
std::vector<double> StatsConfig::default_alpha() { return {1.0, 0.007165, 0.02343, 0.0006698}; }

namespace {

std::size_t pairs(std::size_t k) { return k * (k - 1) / 2; }

void invalid(const std::string& what) { throw Error(ErrorCode::invalid_config, what); }

}  // namespace

std::array<std::size_t, 5> StatsConfig::block_sizes() const noexcept {
    const std::size_t nf = n_cochlear();
    const std::size_t ng = n_modulation();
    return {n_moments * nf, pairs(nf), ng * nf, nf * pairs(ng), ng * pairs(nf)};
}

std::size_t StatsConfig::statistic_count() const noexcept {
    const auto b = block_sizes();
    return std::accumulate(b.begin(), b.end(), std::size_t{0});
}

void StatsConfig::validate() const {
    try {
        cochlear.validate();
        modulation.validate();
    } catch (const Error& e) {
        invalid(e.what());
    }
    if (cochlear.kind != FilterbankKind::erb) invalid("cochlear filterbank must be of kind erb");
    if (modulation.kind != FilterbankKind::log) invalid("modulation filterbank must be of kind log");
    if (cochlear.sample_rate != modulation.sample_rate) {
        invalid("cochlear and modulation filterbanks must declare the same sample rate");
    }
    if (n_moments < 2) invalid("n_moments must be at least 2");
    if (alpha.size() != n_moments) {
        invalid("alpha has " + std::to_string(alpha.size()) + " entries, expected " + std::to_string(n_moments));
    }
    for (double a : alpha) {
        if (!(a > 0.0) || !std::isfinite(a)) invalid("alpha entries must be positive and finite");
    }
    if (frame_length < 64) invalid("frame_length must be at least 64");
    if (envelope_decimation < 1) invalid("envelope_decimation must be at least 1");
    if (frame_length % envelope_decimation != 0 || frame_length / envelope_decimation < 64) {
        invalid("frame_length must be a multiple of envelope_decimation with at least 64 decimated samples");
    }
    if (modulation.f_hi > modulation.sample_rate / (2.0 * static_cast<double>(envelope_decimation))) {
        invalid("modulation f_hi exceeds the decimated envelope Nyquist frequency");
    }
    if (statistic_count() >= frame_length) {
        invalid("configuration yields " + std::to_string(statistic_count()) +
                " statistics for a frame of " + std::to_string(frame_length) + " samples");
    }
}

std::string StatsConfig::hash() const {
    return Fnv1a().update(detail::to_json_value(*this).dump()).hex();
}

const std::vector<double>& SummaryStats::block(std::size_t i) const {
    switch (i) {
    case 0: return s1;
    case 1: return s2;
    case 2: return s3;
    case 3: return s4;
    case 4: return s5;
    }
    throw std::out_of_range("statistics block index " + std::to_string(i));
}

std::vector<double>& SummaryStats::block(std::size_t i) {
    return const_cast<std::vector<double>&>(std::as_const(*this).block(i));
}

namespace {

// Analytic signal from a real signal's half spectrum: interior positive bins
// doubled, DC and Nyquist kept, negative frequencies zero.
std::vector<fft::complex> analytic_from_half(std::span<const fft::complex> half, std::size_t n) {
    std::vector<fft::complex> full(n, fft::complex{});
    if (n == 0) return full;
    full[0] = half[0];
    const std::size_t interior_end = (n % 2 == 0) ? n / 2 : (n + 1) / 2;
    for (std::size_t k = 1; k < interior_end; ++k) full[k] = 2.0 * half[k];
    if (n % 2 == 0) full[n / 2] = half[n / 2];
    return fft::inverse(full);
}

std::vector<double> magnitude(const std::vector<fft::complex>& z) {
    std::vector<double> out(z.size());
    std::transform(z.begin(), z.end(), out.begin(), [](const fft::complex& v) { return std::abs(v); });
    return out;
}

struct Moments2 {
    double mean;
    double variance;
};

Moments2 mean_variance(std::span<const double> x) {
    const double n = static_cast<double>(x.size());
    double mu = 0.0;
    for (double v : x) mu += v;
    mu /= n;
    double var = 0.0;
    for (double v : x) var += (v - mu) * (v - mu);
    return {mu, var / n};
}

// Centred and scaled so that dot(z_a, z_b) is the Pearson correlation; an
// all-zero vector marks a degenerate (near-constant) input.
std::vector<double> standardized(std::span<const double> x) {
    const auto [mu, var] = mean_variance(x);
    std::vector<double> z(x.size(), 0.0);
    if (var < kStatEpsilon) return z;
    const double scale = 1.0 / std::sqrt(var * static_cast<double>(x.size()));
    for (std::size_t i = 0; i < x.size(); ++i) z[i] = (x[i] - mu) * scale;
    return z;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

void append_vech(std::vector<double>& out, const std::vector<const std::vector<double>*>& zs) {
    for (std::size_t i = 0; i < zs.size(); ++i) {
        for (std::size_t j = i + 1; j < zs.size(); ++j) {
            out.push_back(std::clamp(dot(*zs[i], *zs[j]), -1.0, 1.0));
        }
    }
}

}  // namespace

std::vector<double> analytic_envelope(std::span<const double> band) {
    if (band.size() < 2) throw Error(ErrorCode::length_mismatch, "analytic envelope needs at least 2 samples");
    return magnitude(analytic_from_half(fft::rfft(band), band.size()));
}

std::vector<double> normalized_moments(std::span<const double> x, std::size_t n_moments) {
    if (n_moments < 2) throw Error(ErrorCode::invalid_config, "need at least 2 moments");
    if (x.empty()) throw Error(ErrorCode::length_mismatch, "moments of an empty signal");
    const double n = static_cast<double>(x.size());
    const auto [mu, var] = mean_variance(x);
    const double sigma = std::sqrt(var);

    std::vector<double> out(n_moments);
    out[0] = mu;
    out[1] = var / std::max(mu * mu, kStatEpsilon);
    for (std::size_t l = 3; l <= n_moments; ++l) {
        double acc = 0.0;
        for (double v : x) {
            double d = v - mu;
            double p = d;
            for (std::size_t e = 1; e < l; ++e) p *= d;
            acc += p;
        }
        const double denom = std::max(std::pow(sigma, static_cast<double>(l)), kStatEpsilon);
        out[l - 1] = (acc / n) / denom;
    }
    return out;
}

std::vector<double> pearson_corr_vech(std::span<const std::vector<double>> vectors) {
    if (vectors.size() < 2) throw Error(ErrorCode::length_mismatch, "correlation needs at least 2 vectors");
    const std::size_t len = vectors[0].size();
    if (len < 2) throw Error(ErrorCode::length_mismatch, "correlation needs vectors of length >= 2");
    for (const auto& v : vectors) {
        if (v.size() != len) throw Error(ErrorCode::length_mismatch, "correlation vectors differ in length");
    }
    std::vector<std::vector<double>> zs;
    zs.reserve(vectors.size());
    for (const auto& v : vectors) zs.push_back(standardized(v));
    std::vector<const std::vector<double>*> ptrs;
    for (const auto& z : zs) ptrs.push_back(&z);
    std::vector<double> out;
    out.reserve(pairs(vectors.size()));
    append_vech(out, ptrs);
    return out;
}

StatsAnalyzer::StatsAnalyzer(StatsConfig config) : config_(std::move(config)) {
    config_.validate();
    cochlear_ = make_filterbank(config_.cochlear, config_.frame_length);
    FilterbankSpec mod = config_.modulation;
    mod.sample_rate /= static_cast<double>(config_.envelope_decimation);
    modulation_ = make_filterbank(mod, config_.frame_length / config_.envelope_decimation);
    hash_ = config_.hash();
}

SummaryStats StatsAnalyzer::operator()(std::span<const double> x) const {
    const std::size_t n = config_.frame_length;
    if (x.size() != n) {
        throw Error(ErrorCode::config_mismatch, "frame has " + std::to_string(x.size()) +
                                                    " samples, config expects " + std::to_string(n));
    }
    require_finite(x, "input frame");

    const std::size_t nf = config_.n_cochlear();
    const std::size_t ng = config_.n_modulation();
    const std::size_t n_mom = config_.n_moments;
    const std::size_t dec = config_.envelope_decimation;
    const std::size_t nd = n / dec;

    SummaryStats out;
    out.config_hash = hash_;

    const auto spectra = cochlear_.filter_spectrum(fft::rfft(x));
    std::vector<std::vector<double>> env(nf);
    for (std::size_t j = 0; j < nf; ++j) env[j] = magnitude(analytic_from_half(spectra[j], n));

    // s1
    const double level = config_.normalize_mean_by_rms ? std::max(rms(x), kStatEpsilon) : 1.0;
    out.s1.assign(n_mom * nf, 0.0);
    for (std::size_t j = 0; j < nf; ++j) {
        auto m = normalized_moments(env[j], n_mom);
        m[0] /= level;
        for (std::size_t l = 0; l < n_mom; ++l) out.s1[l * nf + j] = config_.alpha[l] * m[l];
    }

    // s2
    out.s2 = pearson_corr_vech(env);

    // Modulation bands, stored standardized: m[j * ng + k].
    out.s3.assign(ng * nf, 0.0);
    std::vector<std::vector<double>> mod(nf * ng);
    for (std::size_t j = 0; j < nf; ++j) {
        auto half = fft::rfft(env[j]);
        std::vector<double> env_used;
        if (dec > 1) {
            half.resize(fft::half_size(nd));
            for (auto& v : half) v /= static_cast<double>(dec);
            env_used = fft::irfft(half, nd);
            half = fft::rfft(env_used);
        }
        const double env_sd = std::sqrt(mean_variance(dec > 1 ? std::span<const double>(env_used)
                                                              : std::span<const double>(env[j]))
                                            .variance);
        const auto bands = modulation_.filter_spectrum(half);
        for (std::size_t k = 0; k < ng; ++k) {
            auto band = fft::irfft(bands[k], nd);
            const double sd = std::sqrt(mean_variance(band).variance);
            out.s3[j * ng + k] = sd / std::max(env_sd, kStatEpsilon);
            mod[j * ng + k] = standardized(band);
        }
        env[j].clear();
        env[j].shrink_to_fit();
    }

    // s4: per cochlear band, correlations across modulation bands.
    out.s4.reserve(nf * pairs(ng));
    std::vector<const std::vector<double>*> group;
    for (std::size_t j = 0; j < nf; ++j) {
        group.clear();
        for (std::size_t k = 0; k < ng; ++k) group.push_back(&mod[j * ng + k]);
        append_vech(out.s4, group);
    }

    // s5: per modulation band, correlations across cochlear bands.
    out.s5.reserve(ng * pairs(nf));
    for (std::size_t k = 0; k < ng; ++k) {
        group.clear();
        for (std::size_t j = 0; j < nf; ++j) group.push_back(&mod[j * ng + k]);
        append_vech(out.s5, group);
    }
    return out;
}

SummaryStats summary_statistics(const Signal& x, const StatsConfig& cfg) {
    if (x.sample_rate != cfg.cochlear.sample_rate) {
        throw Error(ErrorCode::config_mismatch, "signal sample rate " + std::to_string(x.sample_rate) +
                                                    " differs from config " +
                                                    std::to_string(cfg.cochlear.sample_rate));
    }
    return StatsAnalyzer(cfg)(x.view());
}

bool BlockMask::any() const noexcept {
    return std::any_of(enabled.begin(), enabled.end(), [](bool b) { return b; });
}

std::size_t BlockMask::dimension(const StatsConfig& cfg) const noexcept {
    const auto sizes = cfg.block_sizes();
    std::size_t d = 0;
    for (std::size_t i = 0; i < 5; ++i) d += enabled[i] ? sizes[i] : 0;
    return d;
}

std::string BlockMask::to_string() const {
    std::string s;
    for (std::size_t i = 0; i < 5; ++i) {
        if (!enabled[i]) continue;
        if (!s.empty()) s += ',';
        s += 's';
        s += static_cast<char>('1' + i);
    }
    return s;
}

BlockMask BlockMask::parse(const std::string& text) {
    BlockMask mask{{false, false, false, false, false}};
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item.erase(std::remove_if(item.begin(), item.end(), [](unsigned char c) { return std::isspace(c); }),
                   item.end());
        if (item.size() != 2 || (item[0] != 's' && item[0] != 'S') || item[1] < '1' || item[1] > '5') {
            throw Error(ErrorCode::invalid_config, "unknown statistics block '" + item + "'");
        }
        mask.enabled[static_cast<std::size_t>(item[1] - '1')] = true;
    }
    if (!mask.any()) throw Error(ErrorCode::invalid_config, "block mask selects nothing");
    return mask;
}

std::string to_json(const SummaryStats& stats, const StatsConfig& cfg) {
    detail::json j;
    j["version"] = 1;
    j["config"] = detail::to_json_value(cfg);
    j["config_hash"] = stats.config_hash;
    j["s1"] = stats.s1;
    j["s2"] = stats.s2;
    j["s3"] = stats.s3;
    j["s4"] = stats.s4;
    j["s5"] = stats.s5;
    return j.dump(2);
}

}  // namespace texstat
