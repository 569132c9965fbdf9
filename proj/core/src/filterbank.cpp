#include "texstat/filterbank.hpp"

#include "texstat/error.hpp"
#include "texstat/hash.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace texstat {

void FilterbankSpec::validate() const {
    if (n_filters < 1) throw Error(ErrorCode::invalid_spec, "filterbank needs at least one filter");
    if (!(sample_rate > 0.0) || !std::isfinite(sample_rate)) {
        throw Error(ErrorCode::invalid_spec, "sample rate must be positive");
    }
    if (!(f_lo > 0.0) || !(f_lo < f_hi) || !(f_hi <= sample_rate / 2.0)) {
        throw Error(ErrorCode::invalid_spec,
                    "need 0 < f_lo < f_hi <= sample_rate/2, got f_lo=" + std::to_string(f_lo) +
                        " f_hi=" + std::to_string(f_hi) + " sr=" + std::to_string(sample_rate));
    }
}

FilterbankSpec FilterbankSpec::cochlear_default(double sample_rate) {
    return {FilterbankKind::erb, 16, sample_rate, 20.0, sample_rate / 2.0};
}

FilterbankSpec FilterbankSpec::modulation_default(double sample_rate) {
    return {FilterbankKind::log, 6, sample_rate, 0.5, 100.0};
}

double erb_rate(double hz) { return 21.4 * std::log10(1.0 + 0.00437 * hz); }

double erb_rate_to_hz(double erbs) { return (std::pow(10.0, erbs / 21.4) - 1.0) / 0.00437; }

namespace {

double warp(FilterbankKind kind, double hz) {
    return kind == FilterbankKind::erb ? erb_rate(hz) : std::log(hz);
}

double unwarp(FilterbankKind kind, double w) {
    return kind == FilterbankKind::erb ? erb_rate_to_hz(w) : std::exp(w);
}

}  // namespace

double Filterbank::bin_frequency(std::size_t bin) const noexcept {
    return static_cast<double>(bin) * spec_.sample_rate / static_cast<double>(length_);
}

Filterbank make_filterbank(const FilterbankSpec& spec, std::size_t transform_length) {
    spec.validate();
    if (transform_length < 64) {
        throw Error(ErrorCode::invalid_spec,
                    "transform length must be at least 64, got " + std::to_string(transform_length));
    }

    Filterbank fb;
    fb.spec_ = spec;
    fb.length_ = transform_length;

    const std::size_t n_bands = spec.n_filters;
    const std::size_t n_bins = fft::half_size(transform_length);
    const double w_lo = warp(spec.kind, spec.f_lo);
    const double w_hi = warp(spec.kind, spec.f_hi);
    const double step = n_bands > 1 ? (w_hi - w_lo) / static_cast<double>(n_bands - 1) : 0.0;

    fb.centers_.resize(n_bands);
    for (std::size_t j = 0; j < n_bands; ++j) {
        fb.centers_[j] = unwarp(spec.kind, w_lo + step * static_cast<double>(j));
    }
    // Pin the end points so rounding in the warp round trip cannot move them.
    fb.centers_.front() = spec.f_lo;
    if (n_bands > 1) fb.centers_.back() = spec.f_hi;

    fb.responses_.assign(n_bands, std::vector<double>(n_bins, 0.0));
    for (std::size_t k = 0; k < n_bins; ++k) {
        const double f = fb.bin_frequency(k);
        if (f < spec.f_lo || f > spec.f_hi) continue;
        if (n_bands == 1) {
            fb.responses_[0][k] = 1.0;
            continue;
        }
        double u = (warp(spec.kind, f) - w_lo) / step;
        u = std::clamp(u, 0.0, static_cast<double>(n_bands - 1));
        auto j = static_cast<std::size_t>(std::floor(u));
        if (j >= n_bands - 1) j = n_bands - 2;
        const double phase = std::numbers::pi / 2.0 * (u - static_cast<double>(j));
        const double c = std::cos(phase);
        const double s = std::sin(phase);
        fb.responses_[j][k] = c * c;
        fb.responses_[j + 1][k] = s * s;
    }

    for (std::size_t j = 0; j < n_bands; ++j) {
        bool any = false;
        for (double r : fb.responses_[j]) {
            if (r > 0.0) {
                any = true;
                break;
            }
        }
        if (!any) {
            throw Error(ErrorCode::too_few_bins,
                        "band " + std::to_string(j) + " (centre " + std::to_string(fb.centers_[j]) +
                            " Hz) has no bin on a length-" + std::to_string(transform_length) + " grid");
        }
    }

    Fnv1a h;
    h.update(spec.kind == FilterbankKind::erb ? "erb" : "log")
        .update(static_cast<std::uint64_t>(spec.n_filters))
        .update(spec.sample_rate)
        .update(spec.f_lo)
        .update(spec.f_hi)
        .update(static_cast<std::uint64_t>(transform_length));
    fb.hash_ = h.hex();
    return fb;
}

std::vector<std::vector<fft::complex>> Filterbank::filter_spectrum(std::span<const fft::complex> half) const {
    if (half.size() != n_bins()) {
        throw Error(ErrorCode::length_mismatch, "spectrum has " + std::to_string(half.size()) +
                                                    " bins, bank expects " + std::to_string(n_bins()));
    }
    std::vector<std::vector<fft::complex>> out(size(), std::vector<fft::complex>(half.size()));
    for (std::size_t j = 0; j < size(); ++j) {
        const auto& r = responses_[j];
        auto& o = out[j];
        for (std::size_t k = 0; k < half.size(); ++k) o[k] = half[k] * r[k];
    }
    return out;
}

Subbands apply_filterbank(const Filterbank& fb, std::span<const double> x, double sample_rate) {
    if (x.size() != fb.transform_length()) {
        throw Error(ErrorCode::length_mismatch, "signal has " + std::to_string(x.size()) +
                                                    " samples, filterbank expects " +
                                                    std::to_string(fb.transform_length()));
    }
    const auto spectra = fb.filter_spectrum(fft::rfft(x));
    Subbands out;
    out.sample_rate = sample_rate;
    out.bands.reserve(spectra.size());
    for (const auto& s : spectra) out.bands.push_back(fft::irfft(s, x.size()));
    return out;
}

Subbands apply_filterbank(const Filterbank& fb, const Signal& x) {
    return apply_filterbank(fb, x.view(), x.sample_rate);
}

}  // namespace texstat
