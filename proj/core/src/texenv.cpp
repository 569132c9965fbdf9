#include "texstat/texenv.hpp"

#include "json_internal.hpp"
#include "texstat/error.hpp"
#include "texstat/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace texstat {

namespace {

constexpr double kSeedEpsilon = 1e-6;

void require_params_fit(std::size_t n_params, std::size_t n) {
    if (n_params == 0 || 2 * n_params - 1 > n) {
        throw Error(ErrorCode::params_too_long, std::to_string(n_params) +
                                                    " envelope parameters do not fit a length-" +
                                                    std::to_string(n) + " signal (need 1 <= 2K-1 <= N)");
    }
}

// Unit-envelope carrier for one band: the instantaneous frequency of the
// filtered noise, clamped to the band support (and below Nyquist), low-passed,
// recentred on the peak of the band response and integrated back into a phase.
constexpr int kPolishPasses = 2;
constexpr double kSweepCutoff = 0.05;
constexpr double kNyquistGuard = 0.98;

std::vector<double> flat_carrier(const std::vector<fft::complex>& half, std::span<const double> response,
                                 std::size_t n) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    std::size_t k_lo = response.size();
    std::size_t k_hi = 0;
    std::size_t k_peak = 0;
    for (std::size_t k = 0; k < response.size(); ++k) {
        if (response[k] > 0.0) {
            k_lo = std::min(k_lo, k);
            k_hi = k;
        }
        if (response[k] > response[k_peak]) k_peak = k;
    }
    const double w_lo = two_pi * static_cast<double>(k_lo) / static_cast<double>(n);
    const double w_hi = std::max(w_lo, std::min(two_pi * static_cast<double>(k_hi) / static_cast<double>(n),
                                                 kNyquistGuard * std::numbers::pi));

    std::vector<fft::complex> full(n, fft::complex{});
    for (std::size_t k = 0; k < half.size(); ++k) {
        const bool self_conjugate = k == 0 || (n % 2 == 0 && k == n / 2);
        full[k] = self_conjugate ? half[k] : 2.0 * half[k];
    }
    const auto z = fft::inverse(full);

    std::vector<double> inst(n);
    for (std::size_t t = 0; t < n; ++t) {
        double d = std::arg(z[(t + 1) % n] * std::conj(z[t]));
        if (d < 0.0) d += two_pi;
        inst[t] = std::clamp(d, w_lo, w_hi);
    }
    auto spectrum = fft::rfft(inst);
    const double cutoff = kSweepCutoff * std::min(w_lo, w_hi - w_lo) / two_pi * static_cast<double>(n);
    for (std::size_t k = 0; k < spectrum.size(); ++k) {
        if (static_cast<double>(k) > cutoff) spectrum[k] = 0.0;
    }
    inst = fft::irfft(spectrum, n);

    const double w_peak = std::clamp(two_pi * static_cast<double>(k_peak) / static_cast<double>(n), w_lo, w_hi);
    const double shift = w_peak - std::real(spectrum[0]) / static_cast<double>(n);
    double total = 0.0;
    for (auto& d : inst) {
        d = std::clamp(d + shift, w_lo, w_hi);
        total += d;
    }
    // Whole number of cycles, so the carrier wraps without a click.
    const double drift = (two_pi * std::round(total / two_pi) - total) / static_cast<double>(n);

    std::vector<double> out(n);
    double phase = std::arg(z[0]);
    for (std::size_t t = 0; t < n; ++t) {
        out[t] = std::cos(phase);
        phase += inst[t] + drift;
    }
    return out;
}

}  // namespace

void TexEnvParams::validate() const {
    if (per_band.empty()) throw Error(ErrorCode::shape_mismatch, "parameters have no bands");
    const std::size_t k = per_band.front().size();
    for (const auto& p : per_band) {
        if (p.size() != k) throw Error(ErrorCode::shape_mismatch, "bands carry different parameter counts");
    }
    require_params_fit(k, target_length);
}

std::vector<double> gaussian_noise(std::size_t length, std::uint64_t rng_seed) {
    std::mt19937_64 gen(rng_seed);
    auto uniform = [&gen] { return (static_cast<double>(gen() >> 11) + 0.5) * 0x1.0p-53; };
    std::vector<double> out(length);
    for (std::size_t i = 0; i < length; i += 2) {
        const double r = std::sqrt(-2.0 * std::log(uniform()));
        const double theta = 2.0 * std::numbers::pi * uniform();
        out[i] = r * std::cos(theta);
        if (i + 1 < length) out[i + 1] = r * std::sin(theta);
    }
    return out;
}

Seed generate_seed(const Filterbank& fb, std::size_t length, std::uint64_t rng_seed) {
    if (length != fb.transform_length()) {
        throw Error(ErrorCode::length_mismatch, "seed length " + std::to_string(length) +
                                                    " differs from filterbank transform length " +
                                                    std::to_string(fb.transform_length()));
    }
    const auto noise = gaussian_noise(length, rng_seed);
    const auto spectra = fb.filter_spectrum(fft::rfft(noise));

    Seed seed;
    seed.fb_hash = fb.hash();
    seed.rng_seed = rng_seed;
    seed.sample_rate = fb.spec().sample_rate;
    seed.bands.reserve(spectra.size());
    for (std::size_t j = 0; j < spectra.size(); ++j) {
        auto band = flat_carrier(spectra[j], fb.response(j), length);
        for (int pass = 0; pass < kPolishPasses; ++pass) {
            const auto env = analytic_envelope(band);
            for (std::size_t t = 0; t < length; ++t) band[t] /= std::max(env[t], kSeedEpsilon);
        }
        seed.bands.push_back(std::move(band));
    }
    return seed;
}

std::vector<double> envelope_from_params(std::span<const std::complex<double>> p, std::size_t n,
                                         double* imag_residual) {
    require_params_fit(p.size(), n);
    std::vector<fft::complex> spectrum(n, fft::complex{});
    spectrum[0] = p[0];
    for (std::size_t k = 1; k < p.size(); ++k) {
        spectrum[k] = p[k];
        spectrum[n - k] = std::conj(p[k]);
    }
    const auto z = fft::inverse(spectrum);
    std::vector<double> out(n);
    double max_re = 0.0;
    double max_im = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        out[t] = z[t].real();
        max_re = std::max(max_re, std::abs(z[t].real()));
        max_im = std::max(max_im, std::abs(z[t].imag()));
    }
    if (imag_residual) *imag_residual = max_im / std::max(max_re, 1e-300);
    return out;
}

Signal texenv_synthesize(const TexEnvParams& params, const Seed& seed, bool nonnegative_envelopes) {
    params.validate();
    if (params.per_band.size() != seed.size()) {
        throw Error(ErrorCode::shape_mismatch, std::to_string(params.per_band.size()) +
                                                   " parameter bands for a seed with " +
                                                   std::to_string(seed.size()) + " bands");
    }
    if (params.target_length != seed.length()) {
        throw Error(ErrorCode::shape_mismatch, "target length " + std::to_string(params.target_length) +
                                                   " differs from seed length " + std::to_string(seed.length()));
    }
    const std::size_t n = params.target_length;
    Signal y(std::vector<double>(n, 0.0), seed.sample_rate);
    for (std::size_t j = 0; j < seed.size(); ++j) {
        auto a = envelope_from_params(params.per_band[j], n);
        if (nonnegative_envelopes) {
            for (auto& v : a) v = std::max(v, 0.0);
        }
        const auto& s = seed.bands[j];
        for (std::size_t t = 0; t < n; ++t) y.samples[t] += s[t] * a[t];
    }
    return y;
}

TexEnvParams extract_params(const Signal& x, const Filterbank& fb, std::size_t n_params) {
    const std::size_t n = x.size();
    if (n != fb.transform_length()) {
        throw Error(ErrorCode::length_mismatch, "signal has " + std::to_string(n) +
                                                    " samples, filterbank expects " +
                                                    std::to_string(fb.transform_length()));
    }
    require_params_fit(n_params, n);
    require_finite(x.view(), "input signal");

    const auto bands = apply_filterbank(fb, x);
    TexEnvParams params;
    params.target_length = n;
    params.per_band.reserve(bands.size());
    for (const auto& band : bands.bands) {
        const auto spectrum = fft::rfft(analytic_envelope(band));
        std::vector<std::complex<double>> p(spectrum.begin(),
                                            spectrum.begin() + static_cast<std::ptrdiff_t>(n_params));
        p[0] = {p[0].real(), 0.0};
        params.per_band.push_back(std::move(p));
    }
    return params;
}

std::pair<Signal, ResynthesisReport> resynthesize(const Signal& x, const MetricConfig& cfg, std::size_t n_params,
                                                  std::uint64_t rng_seed, bool nonnegative_envelopes) {
    cfg.validate();
    if (x.sample_rate != cfg.stats.cochlear.sample_rate) {
        throw Error(ErrorCode::config_mismatch, "signal sample rate differs from config");
    }
    const TexStatMetric metric(cfg);
    const auto& fb = metric.analyzer().cochlear();
    if (x.size() != fb.transform_length()) {
        throw Error(ErrorCode::config_mismatch, "signal has " + std::to_string(x.size()) +
                                                    " samples, config frame length is " +
                                                    std::to_string(fb.transform_length()));
    }
    const auto params = extract_params(x, fb, n_params);
    const auto seed = generate_seed(fb, x.size(), rng_seed);
    Signal y = texenv_synthesize(params, seed, nonnegative_envelopes);

    ResynthesisReport report;
    report.texstat = metric(x.view(), y.view());
    report.mss = mss_loss(x.view(), y.view());
    report.n_params = n_params;
    report.rng_seed = rng_seed;
    report.config_hash = metric.analyzer().config_hash();
    report.fb_hash = fb.hash();
    return {std::move(y), report};
}

std::string to_json(const TexEnvParams& params) {
    detail::json j;
    j["version"] = 1;
    j["n_params"] = params.n_params();
    j["length"] = params.target_length;
    detail::json bands = detail::json::array();
    for (const auto& band : params.per_band) {
        detail::json b = detail::json::array();
        for (const auto& v : band) b.push_back({v.real(), v.imag()});
        bands.push_back(std::move(b));
    }
    j["bands"] = std::move(bands);
    return j.dump();
}

TexEnvParams params_from_json(const std::string& text) {
    try {
        const auto j = detail::json::parse(text);
        if (j.at("version").get<int>() != 1) {
            throw Error(ErrorCode::invalid_config, "unsupported parameter file version");
        }
        TexEnvParams params;
        params.target_length = j.at("length").get<std::size_t>();
        for (const auto& b : j.at("bands")) {
            std::vector<std::complex<double>> band;
            for (const auto& v : b) band.emplace_back(v.at(0).get<double>(), v.at(1).get<double>());
            params.per_band.push_back(std::move(band));
        }
        if (params.n_params() != j.at("n_params").get<std::size_t>()) {
            throw Error(ErrorCode::shape_mismatch, "n_params disagrees with the band arrays");
        }
        params.validate();
        return params;
    } catch (const detail::json::exception& e) {
        throw Error(ErrorCode::invalid_config, std::string("malformed parameter JSON: ") + e.what());
    }
}

}  // namespace texstat
