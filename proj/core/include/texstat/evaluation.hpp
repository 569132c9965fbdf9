#pragma once

#include "texstat/metric.hpp"
#include "texstat/signal.hpp"
#include "texstat/statistics.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace texstat {

/// One row of selected summary statistics per frame, row-major.
struct EmbeddingMatrix {
    std::size_t rows = 0;
    std::size_t dim = 0;
    std::vector<double> values;
    std::string config_hash;
    BlockMask mask;

    std::span<const double> row(std::size_t i) const { return {values.data() + i * dim, dim}; }
};

/// Throws ConfigMismatch when a frame does not match cfg.frame_length.
EmbeddingMatrix embed_corpus(std::span<const Signal> frames, const StatsConfig& cfg, BlockMask mask = {},
                             bool parallel = true);

/// Frechet distance between Gaussians fitted to the rows of a and b
/// (population covariance). Covariances get a ridge of 1e-6 * tr/dim when
/// rows < dim + 1 or the matrix is near-singular. Throws DimMismatch or
/// DegenerateCovariance.
double frechet_distance(const EmbeddingMatrix& a, const EmbeddingMatrix& b);

struct MeanSd {
    double mean = 0.0;
    double sd = 0.0;
};

MeanSd mean_sd(std::span<const double> values);

/// Loss statistics for time-shifted and noise-added copies of each frame.
struct RobustnessReport {
    std::vector<double> shift_fracs;
    std::vector<double> noise_fracs;
    std::vector<MeanSd> texstat_shift;
    std::vector<MeanSd> mss_shift;
    std::vector<MeanSd> texstat_noise;
    std::vector<MeanSd> mss_noise;
    std::size_t n_frames = 0;
    std::string config_hash;

    std::string to_json() const;
    std::string to_text() const;
};

/// Circular shift by round(frac * N) and addition of uniform white noise
/// whose peak is frac times the frame's peak. Fractions must lie in [0, 1);
/// anything else throws InvalidFraction. The noise of frame i at level l is
/// drawn from noise_seed + 1000 * i + l.
RobustnessReport robustness_experiment(std::span<const Signal> frames, std::span<const double> shift_fracs,
                                       std::span<const double> noise_fracs, const MetricConfig& cfg,
                                       std::uint64_t noise_seed = 0, bool parallel = true);

struct BenchmarkRow {
    std::string loss;
    MeanSd batch_ms;
    double per_signal_ms = 0.0;
    std::size_t working_set_bytes = 0;
};

/// Forward-pass timing of TexStat, MSS, MSE and MAE over a batch of random
/// signal pairs. Informational only.
struct BenchmarkReport {
    std::size_t batch = 0;
    std::size_t length = 0;
    std::size_t repeats = 0;
    bool parallel = false;
    std::vector<BenchmarkRow> rows;
    std::string config_hash;

    const BenchmarkRow& row(const std::string& loss) const;
    std::string to_json() const;
    std::string to_text() const;
};

/// Throws InvalidConfig when repeats < 3.
BenchmarkReport benchmark(std::size_t batch, std::size_t length, const MetricConfig& cfg, std::size_t repeats,
                          bool parallel = false, std::uint64_t rng_seed = 0);

/// Moment weights giving every weighted moment block of S1 the spread of the
/// first block over `frames`: alpha_l = sd(M_1) / sd(M_l), sd taken over all
/// frames and cochlear bands. cfg.alpha is ignored.
std::vector<double> calibrate_alpha(std::span<const Signal> frames, const StatsConfig& cfg);

}  // namespace texstat
