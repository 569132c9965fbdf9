#include "texstat/evaluation.hpp"

#include "json_internal.hpp"
#include "texstat/error.hpp"
#include "texstat/parallel.hpp"
#include "texstat/texenv.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>

namespace texstat {

EmbeddingMatrix embed_corpus(std::span<const Signal> frames, const StatsConfig& cfg, BlockMask mask,
                             bool parallel) {
    if (!mask.any()) throw Error(ErrorCode::invalid_config, "block mask selects nothing");
    const StatsAnalyzer analyzer(cfg);
    for (std::size_t i = 0; i < frames.size(); ++i) {
        if (frames[i].size() != cfg.frame_length || frames[i].sample_rate != cfg.cochlear.sample_rate) {
            throw Error(ErrorCode::config_mismatch, "frame " + std::to_string(i) + " has " +
                                                        std::to_string(frames[i].size()) + " samples at " +
                                                        std::to_string(frames[i].sample_rate) +
                                                        " Hz, config expects " + std::to_string(cfg.frame_length));
        }
    }

    EmbeddingMatrix out;
    out.rows = frames.size();
    out.dim = mask.dimension(cfg);
    out.values.assign(out.rows * out.dim, 0.0);
    out.config_hash = analyzer.config_hash();
    out.mask = mask;

    parallel_for(
        frames.size(),
        [&](std::size_t i) {
            const auto stats = analyzer(frames[i].view());
            double* dst = out.values.data() + i * out.dim;
            for (std::size_t b = 0; b < 5; ++b) {
                if (!mask.enabled[b]) continue;
                const auto& block = stats.block(b);
                dst = std::copy(block.begin(), block.end(), dst);
            }
        },
        parallel);
    return out;
}

namespace {

struct GaussianFit {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
};

GaussianFit fit_gaussian(const EmbeddingMatrix& m) {
    if (m.rows < 2) {
        throw Error(ErrorCode::degenerate_covariance, "need at least 2 rows, got " + std::to_string(m.rows));
    }
    for (double v : m.values) {
        if (!std::isfinite(v)) throw Error(ErrorCode::degenerate_covariance, "embedding has non-finite values");
    }
    const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> data(
        m.values.data(), static_cast<Eigen::Index>(m.rows), static_cast<Eigen::Index>(m.dim));
    GaussianFit fit;
    fit.mean = data.colwise().mean().transpose();
    const Eigen::MatrixXd centered = data.rowwise() - fit.mean.transpose();
    fit.cov = (centered.transpose() * centered) / static_cast<double>(m.rows);

    const double dim = static_cast<double>(m.dim);
    const double ridge = 1e-6 * fit.cov.trace() / dim;
    bool shrink = m.rows < m.dim + 1;
    if (!shrink) {
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(fit.cov, Eigen::EigenvaluesOnly);
        const double scale = std::max(fit.cov.trace() / dim, 1e-300);
        shrink = es.eigenvalues().minCoeff() < 1e-12 * scale;
    }
    if (shrink) fit.cov.diagonal().array() += ridge;
    return fit;
}

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m) {
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()));
    if (es.info() != Eigen::Success) throw Error(ErrorCode::degenerate_covariance, "eigendecomposition failed");
    const Eigen::VectorXd roots = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * roots.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

double frechet_distance(const EmbeddingMatrix& a, const EmbeddingMatrix& b) {
    if (a.dim != b.dim || a.dim == 0) {
        throw Error(ErrorCode::dim_mismatch,
                    "embedding dimensions " + std::to_string(a.dim) + " and " + std::to_string(b.dim));
    }
    if (a.config_hash != b.config_hash || !(a.mask == b.mask)) {
        throw Error(ErrorCode::config_mismatch, "embeddings come from different configs or block masks");
    }
    const auto fa = fit_gaussian(a);
    const auto fb = fit_gaussian(b);

    // tr((Sa Sb)^1/2) is the sum of the singular values of Sa^1/2 Sb^1/2; taking
    // them directly avoids square-rooting the roundoff of tiny eigenvalues.
    const Eigen::MatrixXd cross = psd_sqrt(fa.cov) * psd_sqrt(fb.cov);
    const Eigen::BDCSVD<Eigen::MatrixXd> svd(cross);
    if (svd.info() != Eigen::Success) throw Error(ErrorCode::degenerate_covariance, "singular value decomposition failed");
    const double trace_sqrt = svd.singularValues().sum();
    const double d = (fa.mean - fb.mean).squaredNorm() + fa.cov.trace() + fb.cov.trace() - 2.0 * trace_sqrt;
    return std::max(d, 0.0);
}

MeanSd mean_sd(std::span<const double> values) {
    MeanSd out;
    if (values.empty()) return out;
    const double n = static_cast<double>(values.size());
    for (double v : values) out.mean += v;
    out.mean /= n;
    double var = 0.0;
    for (double v : values) var += (v - out.mean) * (v - out.mean);
    out.sd = std::sqrt(var / n);
    return out;
}

namespace {

void check_fractions(std::span<const double> fracs, const char* what) {
    for (double f : fracs) {
        if (!(f >= 0.0 && f < 1.0)) {
            throw Error(ErrorCode::invalid_fraction, std::string(what) + " fraction " + std::to_string(f) +
                                                         " is outside [0, 1)");
        }
    }
}

std::vector<double> uniform_noise(std::size_t n, double peak, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::vector<double> out(n);
    for (auto& v : out) {
        const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
        v = peak * (2.0 * u - 1.0);
    }
    return out;
}

std::string fmt_cell(const MeanSd& c) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4g ± %.2g", c.mean, c.sd);
    return buf;
}

detail::json cells_json(const std::vector<double>& fracs, const std::vector<MeanSd>& cells) {
    detail::json arr = detail::json::array();
    for (std::size_t i = 0; i < fracs.size(); ++i) {
        arr.push_back({{"level", fracs[i]}, {"mean", cells[i].mean}, {"sd", cells[i].sd}});
    }
    return arr;
}

}  // namespace

RobustnessReport robustness_experiment(std::span<const Signal> frames, std::span<const double> shift_fracs,
                                       std::span<const double> noise_fracs, const MetricConfig& cfg,
                                       std::uint64_t noise_seed, bool parallel) {
    check_fractions(shift_fracs, "shift");
    check_fractions(noise_fracs, "noise");
    const TexStatMetric metric(cfg);

    const std::size_t n_frames = frames.size();
    const std::size_t ns = shift_fracs.size();
    const std::size_t nn = noise_fracs.size();
    std::vector<double> ts(n_frames * ns), ms(n_frames * ns), tn(n_frames * nn), mn(n_frames * nn);

    parallel_for(
        n_frames,
        [&](std::size_t i) {
            const auto& x = frames[i];
            const std::size_t n = x.size();
            const auto base = metric.stats(x.view());
            for (std::size_t l = 0; l < ns; ++l) {
                const auto shift = static_cast<std::size_t>(std::llround(shift_fracs[l] * static_cast<double>(n)));
                const auto y = circular_shift(x.view(), shift);
                ts[i * ns + l] = texstat_from_stats(base, metric.stats(y), cfg.beta);
                ms[i * ns + l] = mss_loss(x.view(), y);
            }
            double peak = 0.0;
            for (double v : x.samples) peak = std::max(peak, std::abs(v));
            for (std::size_t l = 0; l < nn; ++l) {
                auto y = uniform_noise(n, noise_fracs[l] * peak, noise_seed + 1000 * i + l);
                for (std::size_t t = 0; t < n; ++t) y[t] += x.samples[t];
                tn[i * nn + l] = texstat_from_stats(base, metric.stats(y), cfg.beta);
                mn[i * nn + l] = mss_loss(x.view(), y);
            }
        },
        parallel);

    auto column = [n_frames](const std::vector<double>& v, std::size_t width, std::size_t l) {
        std::vector<double> col(n_frames);
        for (std::size_t i = 0; i < n_frames; ++i) col[i] = v[i * width + l];
        return mean_sd(col);
    };

    RobustnessReport r;
    r.shift_fracs.assign(shift_fracs.begin(), shift_fracs.end());
    r.noise_fracs.assign(noise_fracs.begin(), noise_fracs.end());
    r.n_frames = n_frames;
    r.config_hash = metric.analyzer().config_hash();
    for (std::size_t l = 0; l < ns; ++l) {
        r.texstat_shift.push_back(column(ts, ns, l));
        r.mss_shift.push_back(column(ms, ns, l));
    }
    for (std::size_t l = 0; l < nn; ++l) {
        r.texstat_noise.push_back(column(tn, nn, l));
        r.mss_noise.push_back(column(mn, nn, l));
    }
    return r;
}

std::string RobustnessReport::to_json() const {
    detail::json j;
    j["version"] = 1;
    j["kind"] = "robustness";
    j["config_hash"] = config_hash;
    j["n_frames"] = n_frames;
    j["time_shift"] = {{"texstat", cells_json(shift_fracs, texstat_shift)},
                       {"mss", cells_json(shift_fracs, mss_shift)}};
    j["noise_add"] = {{"texstat", cells_json(noise_fracs, texstat_noise)},
                      {"mss", cells_json(noise_fracs, mss_noise)}};
    return j.dump(2);
}

std::string RobustnessReport::to_text() const {
    std::ostringstream os;
    char buf[256];
    os << "Loss measurements (mean ± sd) over " << n_frames << " frames, config " << config_hash << "\n";
    auto row = [&](const char* name, const std::vector<double>& fracs, const std::vector<MeanSd>& t,
                   const std::vector<MeanSd>& m) {
        std::snprintf(buf, sizeof buf, "%-12s", name);
        os << buf;
        for (std::size_t i = 0; i < fracs.size(); ++i) {
            std::snprintf(buf, sizeof buf, "  TexStat %3.0f%%: %-22s", 100.0 * fracs[i], fmt_cell(t[i]).c_str());
            os << buf;
        }
        for (std::size_t i = 0; i < fracs.size(); ++i) {
            std::snprintf(buf, sizeof buf, "  MSS %3.0f%%: %-22s", 100.0 * fracs[i], fmt_cell(m[i]).c_str());
            os << buf;
        }
        os << "\n";
    };
    row("Time-Shift", shift_fracs, texstat_shift, mss_shift);
    row("Noise-Add", noise_fracs, texstat_noise, mss_noise);
    return os.str();
}

const BenchmarkRow& BenchmarkReport::row(const std::string& loss) const {
    for (const auto& r : rows) {
        if (r.loss == loss) return r;
    }
    throw std::out_of_range("no benchmark row " + loss);
}

BenchmarkReport benchmark(std::size_t batch, std::size_t length, const MetricConfig& cfg, std::size_t repeats,
                          bool parallel, std::uint64_t rng_seed) {
    if (repeats < 3) throw Error(ErrorCode::invalid_config, "benchmark needs at least 3 repeats");
    if (batch < 1) throw Error(ErrorCode::invalid_config, "benchmark batch must be at least 1");
    MetricConfig local = cfg;
    local.stats.frame_length = length;
    const TexStatMetric metric(local);

    std::vector<std::vector<double>> xs(batch), ys(batch);
    for (std::size_t i = 0; i < batch; ++i) {
        xs[i] = gaussian_noise(length, rng_seed + 2 * i);
        ys[i] = gaussian_noise(length, rng_seed + 2 * i + 1);
        for (auto& v : xs[i]) v *= 0.1;
        for (auto& v : ys[i]) v *= 0.1;
    }

    const std::size_t nf = local.stats.n_cochlear();
    const std::size_t ng = local.stats.n_modulation();
    const std::size_t half = length / 2 + 1;
    // Live buffers of one frame at the peak of each computation.
    const std::size_t texstat_bytes =
        sizeof(double) * (2 * half * nf + length * nf + length * nf * ng + 2 * length);
    const std::size_t mss_window = default_mss_sizes().back();
    const std::size_t mss_bytes =
        sizeof(double) * 2 * ((length - std::min(length, mss_window)) / (mss_window / 4) + 1) * (mss_window / 2 + 1);

    struct Loss {
        const char* name;
        std::function<double(std::size_t)> eval;
        std::size_t bytes;
    };
    const std::vector<Loss> losses = {
        {"TexStat", [&](std::size_t i) { return metric(xs[i], ys[i]); }, texstat_bytes},
        {"MSS", [&](std::size_t i) { return mss_loss(xs[i], ys[i]); }, mss_bytes},
        {"MSE", [&](std::size_t i) { return mse_loss(xs[i], ys[i]); }, 0},
        {"MAE", [&](std::size_t i) { return mae_loss(xs[i], ys[i]); }, 0},
    };

    BenchmarkReport report;
    report.batch = batch;
    report.length = length;
    report.repeats = repeats;
    report.parallel = parallel;
    report.config_hash = metric.analyzer().config_hash();
    std::vector<double> sink(batch);
    for (const auto& loss : losses) {
        std::vector<double> times;
        for (std::size_t r = 0; r < repeats; ++r) {
            const auto start = std::chrono::steady_clock::now();
            parallel_for(batch, [&](std::size_t i) { sink[i] = loss.eval(i); }, parallel);
            const auto stop = std::chrono::steady_clock::now();
            times.push_back(std::chrono::duration<double, std::milli>(stop - start).count());
        }
        BenchmarkRow row;
        row.loss = loss.name;
        row.batch_ms = mean_sd(times);
        row.per_signal_ms = row.batch_ms.mean / static_cast<double>(batch);
        row.working_set_bytes = loss.bytes;
        report.rows.push_back(row);
    }
    return report;
}

std::string BenchmarkReport::to_json() const {
    detail::json j;
    j["version"] = 1;
    j["kind"] = "benchmark";
    j["note"] = "forward pass only; no gradient timing";
    j["config_hash"] = config_hash;
    j["batch"] = batch;
    j["length"] = length;
    j["repeats"] = repeats;
    j["parallel"] = parallel;
    detail::json arr = detail::json::array();
    for (const auto& r : rows) {
        arr.push_back({{"loss", r.loss},
                       {"forward_ms_mean", r.batch_ms.mean},
                       {"forward_ms_sd", r.batch_ms.sd},
                       {"per_signal_ms", r.per_signal_ms},
                       {"working_set_bytes", r.working_set_bytes}});
    }
    j["rows"] = std::move(arr);
    return j.dump(2);
}

std::string BenchmarkReport::to_text() const {
    std::ostringstream os;
    char buf[256];
    os << "Forward pass over batches of " << batch << " signals of " << length << " samples, " << repeats
       << " repeats" << (parallel ? ", parallel" : "") << " (no backward pass)\n";
    std::snprintf(buf, sizeof buf, "%-8s  %-24s  %-14s  %s\n", "Loss", "Forward time (ms)", "Per signal", "Working set (MB)");
    os << buf;
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%-8s  %-24s  %-14.4g  %.2f\n", r.loss.c_str(), fmt_cell(r.batch_ms).c_str(),
                      r.per_signal_ms, static_cast<double>(r.working_set_bytes) / (1024.0 * 1024.0));
        os << buf;
    }
    return os.str();
}

std::vector<double> calibrate_alpha(std::span<const Signal> frames, const StatsConfig& cfg) {
    if (frames.empty()) throw Error(ErrorCode::invalid_config, "calibration needs at least one frame");
    StatsConfig unit = cfg;
    unit.alpha.assign(cfg.n_moments, 1.0);
    const StatsAnalyzer analyzer(unit);
    const std::size_t nf = unit.n_cochlear();
    const std::size_t nm = unit.n_moments;

    std::vector<std::vector<double>> per_moment(nm);
    for (const auto& f : frames) {
        if (f.size() != unit.frame_length) {
            throw Error(ErrorCode::config_mismatch, "calibration frame length differs from config");
        }
        const auto stats = analyzer(f.view());
        for (std::size_t l = 0; l < nm; ++l) {
            for (std::size_t j = 0; j < nf; ++j) per_moment[l].push_back(stats.s1[l * nf + j]);
        }
    }
    const double ref = mean_sd(per_moment[0]).sd;
    std::vector<double> alpha(nm, 1.0);
    if (!(ref > 0.0)) return alpha;
    for (std::size_t l = 1; l < nm; ++l) {
        const double sd = mean_sd(per_moment[l]).sd;
        alpha[l] = sd > 0.0 ? ref / sd : 1.0;
    }
    return alpha;
}

}  // namespace texstat
