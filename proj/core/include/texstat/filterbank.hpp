#pragma once

#include "texstat/fft.hpp"
#include "texstat/signal.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace texstat {

enum class FilterbankKind { erb, log };

/// Band layout of a cochlear (ERB-spaced) or modulation (log-spaced) bank.
struct FilterbankSpec {
    FilterbankKind kind = FilterbankKind::erb;
    std::size_t n_filters = 16;
    double sample_rate = 44100.0;
    double f_lo = 20.0;
    double f_hi = 22050.0;

    /// Throws InvalidSpec unless 0 < f_lo < f_hi <= sample_rate/2 and n_filters >= 1.
    void validate() const;

    static FilterbankSpec cochlear_default(double sample_rate = 44100.0);
    static FilterbankSpec modulation_default(double sample_rate = 44100.0);

    bool operator==(const FilterbankSpec&) const = default;
};

/// ERB-rate (Glasberg & Moore): 21.4 * log10(1 + 0.00437 f).
double erb_rate(double hz);
double erb_rate_to_hz(double erbs);

/// Real band decomposition of a signal; every band has the input's length.
struct Subbands {
    std::vector<std::vector<double>> bands;
    double sample_rate = 0.0;

    std::size_t size() const noexcept { return bands.size(); }
};

/// Frequency-domain bank of raised-cosine amplitude responses.
///
/// Band centres are uniform on the warped axis (ERB-rate or log frequency)
/// with the first centre at f_lo and the last at f_hi. Band j is
/// cos^2(pi/2 * (u - j)) for |u - j| < 1, where u is the warped frequency in
/// units of the centre spacing, so neighbours cross at 0.5 and the responses
/// sum to exactly one on [f_lo, f_hi]. Outside that range every response is
/// zero. Filtering multiplies the half spectrum, which is zero-phase.
class Filterbank {
public:
    const FilterbankSpec& spec() const noexcept { return spec_; }
    std::size_t transform_length() const noexcept { return length_; }
    std::size_t n_bins() const noexcept { return fft::half_size(length_); }
    std::size_t size() const noexcept { return responses_.size(); }

    std::span<const double> response(std::size_t band) const { return responses_.at(band); }
    const std::vector<double>& center_freqs() const noexcept { return centers_; }
    double bin_frequency(std::size_t bin) const noexcept;

    /// Identifier of (spec, transform length).
    const std::string& hash() const noexcept { return hash_; }

    /// Band-filter a half spectrum; returns one half spectrum per band.
    std::vector<std::vector<fft::complex>> filter_spectrum(std::span<const fft::complex> half) const;

    friend Filterbank make_filterbank(const FilterbankSpec& spec, std::size_t transform_length);

private:
    FilterbankSpec spec_;
    std::size_t length_ = 0;
    std::vector<std::vector<double>> responses_;
    std::vector<double> centers_;
    std::string hash_;
};

/// Build a bank on the positive-frequency grid of a length-`transform_length`
/// transform. Throws InvalidSpec for a bad spec or a length below 64 and
/// TooFewBins when some band would contain no grid bin.
Filterbank make_filterbank(const FilterbankSpec& spec, std::size_t transform_length);

/// Zero-phase filtering of x through every band. Throws LengthMismatch unless
/// x has exactly the bank's transform length.
Subbands apply_filterbank(const Filterbank& fb, const Signal& x);
Subbands apply_filterbank(const Filterbank& fb, std::span<const double> x, double sample_rate);

}  // namespace texstat
