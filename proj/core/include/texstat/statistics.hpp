#pragma once

#include "texstat/filterbank.hpp"
#include "texstat/signal.hpp"

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace texstat {

/// Floor applied to every denominator in the statistics.
inline constexpr double kStatEpsilon = 1e-12;

struct StatsConfig {
    FilterbankSpec cochlear = FilterbankSpec::cochlear_default();
    FilterbankSpec modulation = FilterbankSpec::modulation_default();
    std::size_t n_moments = 4;
    std::vector<double> alpha = default_alpha();
    std::size_t frame_length = 65536;
    /// Envelopes are band-limited and decimated by this factor before
    /// modulation filtering. 1 keeps the full audio rate.
    std::size_t envelope_decimation = 1;
    /// Divide the envelope means (the M_1 block) by the frame RMS so the
    /// block is level-independent.
    bool normalize_mean_by_rms = true;

    /// Calibrated weights for (M_1, M_2, M_3, M_4); see `texstat calibrate`.
    static std::vector<double> default_alpha();

    /// Throws InvalidConfig on any violated invariant, including more
    /// statistics than samples in a frame.
    void validate() const;

    std::size_t n_cochlear() const noexcept { return cochlear.n_filters; }
    std::size_t n_modulation() const noexcept { return modulation.n_filters; }

    /// Expected lengths of s1..s5.
    std::array<std::size_t, 5> block_sizes() const noexcept;
    std::size_t statistic_count() const noexcept;

    /// Stable identifier covering every field above.
    std::string hash() const;

    bool operator==(const StatsConfig&) const = default;
};

/// The five statistics vectors of one frame.
struct SummaryStats {
    std::vector<double> s1;  ///< weighted envelope moments, moment-major
    std::vector<double> s2;  ///< envelope correlations
    std::vector<double> s3;  ///< modulation-band energy ratios, cochlear-major
    std::vector<double> s4;  ///< modulation-band correlations within each envelope
    std::vector<double> s5;  ///< cross-envelope correlations within each modulation band
    std::string config_hash;

    const std::vector<double>& block(std::size_t i) const;
    std::vector<double>& block(std::size_t i);

    bool operator==(const SummaryStats&) const = default;
};

/// |x + iH(x)| with the analytic signal built in the transform domain.
std::vector<double> analytic_envelope(std::span<const double> band);

/// (M_1, ..., M_L): mean, variance over squared mean, then standardized
/// central moments. Population normalization; denominators floored at
/// kStatEpsilon.
std::vector<double> normalized_moments(std::span<const double> x, std::size_t n_moments);

/// Off-diagonal upper triangle of the Pearson correlation matrix, ordered
/// (0,1), (0,2), ..., (k-2,k-1). Pairs involving a vector whose variance is
/// below kStatEpsilon are 0.
std::vector<double> pearson_corr_vech(std::span<const std::vector<double>> vectors);

/// Precomputes both filterbanks for one StatsConfig and evaluates frames.
/// Immutable after construction; safe to share across threads.
class StatsAnalyzer {
public:
    explicit StatsAnalyzer(StatsConfig config);

    const StatsConfig& config() const noexcept { return config_; }
    const Filterbank& cochlear() const noexcept { return cochlear_; }
    const Filterbank& modulation() const noexcept { return modulation_; }
    const std::string& config_hash() const noexcept { return hash_; }

    /// Throws ConfigMismatch on a wrong frame length and NonFiniteInput on
    /// NaN/Inf samples.
    SummaryStats operator()(std::span<const double> x) const;
    SummaryStats operator()(const Signal& x) const { return (*this)(x.view()); }

private:
    StatsConfig config_;
    Filterbank cochlear_;
    Filterbank modulation_;
    std::string hash_;
};

SummaryStats summary_statistics(const Signal& x, const StatsConfig& cfg);

/// Selection of statistics blocks, e.g. for corpus embeddings.
struct BlockMask {
    std::array<bool, 5> enabled{true, false, true, false, false};

    static BlockMask all() { return {{true, true, true, true, true}}; }
    bool any() const noexcept;
    std::size_t dimension(const StatsConfig& cfg) const noexcept;
    /// "s1,s3" style listing; parse() accepts the same form.
    std::string to_string() const;
    static BlockMask parse(const std::string& text);

    bool operator==(const BlockMask&) const = default;
};

std::string to_json(const SummaryStats& stats, const StatsConfig& cfg);

}  // namespace texstat
