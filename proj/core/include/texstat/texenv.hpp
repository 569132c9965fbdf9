#pragma once

#include "texstat/fft.hpp"
#include "texstat/filterbank.hpp"
#include "texstat/metric.hpp"
#include "texstat/signal.hpp"

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace texstat {

/// Filtered white noise with every band's envelope normalized to one.
///
/// The noise is drawn from std::mt19937_64 seeded with `rng_seed`; each
/// 64-bit draw becomes a uniform double in (0, 1) via its top 53 bits and
/// pairs of uniforms become standard normals via Box-Muller (cosine branch
/// then sine branch). Both steps are fully specified, so a seed reproduces
/// the same noise on every platform.
struct Seed {
    std::vector<std::vector<double>> bands;
    std::string fb_hash;
    std::uint64_t rng_seed = 0;
    double sample_rate = 44100.0;

    std::size_t length() const noexcept { return bands.empty() ? 0 : bands.front().size(); }
    std::size_t size() const noexcept { return bands.size(); }
};

/// Per-band complex envelope parameters p_j (N_P each) for a length-N output.
struct TexEnvParams {
    std::vector<std::vector<std::complex<double>>> per_band;
    std::size_t target_length = 0;

    std::size_t n_params() const noexcept { return per_band.empty() ? 0 : per_band.front().size(); }
    /// Throws ShapeMismatch for ragged bands, ParamsTooLong when 2*N_P - 1 > N.
    void validate() const;
};

/// Standard normal white noise, deterministic in `rng_seed`.
std::vector<double> gaussian_noise(std::size_t length, std::uint64_t rng_seed);

Seed generate_seed(const Filterbank& fb, std::size_t length, std::uint64_t rng_seed);

/// Real part of IDFT([p_0..p_{K-1}, 0 x (n-2K+1), conj(p_{K-1})..conj(p_1)]) with
/// 1/n normalization. If `imag_residual` is given it receives
/// max|Im| / max(max|Re|, tiny) of the inverse before the real part is taken.
std::vector<double> envelope_from_params(std::span<const std::complex<double>> p, std::size_t n,
                                         double* imag_residual = nullptr);

/// y = sum_j seed_j * a_j. With `nonnegative_envelopes` each a_j is clamped at 0.
Signal texenv_synthesize(const TexEnvParams& params, const Seed& seed, bool nonnegative_envelopes = false);

/// First `n_params` DFT bins of every band's analytic envelope, with the DC
/// bin forced real.
TexEnvParams extract_params(const Signal& x, const Filterbank& fb, std::size_t n_params);

struct ResynthesisReport {
    double texstat = 0.0;
    double mss = 0.0;
    std::size_t n_params = 0;
    std::uint64_t rng_seed = 0;
    std::string config_hash;
    std::string fb_hash;
};

/// extract_params -> generate_seed -> texenv_synthesize on the cochlear bank
/// of `cfg`, then both losses between input and output.
std::pair<Signal, ResynthesisReport> resynthesize(const Signal& x, const MetricConfig& cfg, std::size_t n_params,
                                                  std::uint64_t rng_seed, bool nonnegative_envelopes = false);

std::string to_json(const TexEnvParams& params);
TexEnvParams params_from_json(const std::string& text);

}  // namespace texstat
