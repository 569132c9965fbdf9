#include <texstat/error.hpp>
#include <texstat/evaluation.hpp>
#include <texstat/synthetic.hpp>

#include <gtest/gtest.h>

#include "test_support.hpp"

namespace texstat {
namespace {

void expect_code(auto&& fn, ErrorCode code) {
    try {
        fn();
        ADD_FAILURE() << "expected " << to_string(code);
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), code) << e.what();
    }
}

EmbeddingMatrix gaussian_cloud(std::size_t rows, const std::vector<double>& mean, const std::vector<double>& sd,
                               std::uint64_t seed) {
    EmbeddingMatrix m;
    m.rows = rows;
    m.dim = mean.size();
    m.config_hash = "synthetic";
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> g;
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t d = 0; d < m.dim; ++d) m.values.push_back(mean[d] + sd[d] * g(gen));
    }
    return m;
}

StatsConfig small_stats() {
    StatsConfig cfg;
    cfg.cochlear = {FilterbankKind::erb, 8, 8000.0, 20.0, 4000.0};
    cfg.modulation = {FilterbankKind::log, 4, 8000.0, 0.5, 100.0};
    cfg.frame_length = 16384;
    return cfg;
}

TEST(Frechet, IdenticalCloudsGiveZero) {
    const auto a = gaussian_cloud(500, {0, 1, 2}, {1, 2, 0.5}, 1);
    EXPECT_LT(frechet_distance(a, a), 1e-8);
}

TEST(Frechet, OneDimensionalClosedForm) {
    const auto a = gaussian_cloud(100000, {0}, {1}, 2);
    const auto b = gaussian_cloud(100000, {1}, {1}, 3);
    EXPECT_NEAR(frechet_distance(a, b), 1.0, 0.02);
    const auto c = gaussian_cloud(100000, {0}, {2}, 4);
    // (mu1 - mu2)^2 + (sigma1 - sigma2)^2
    EXPECT_NEAR(frechet_distance(a, c), 1.0, 0.03);
}

TEST(Frechet, TwoDimensionalClosedForm) {
    const auto a = gaussian_cloud(100000, {0, 0}, {1, 1}, 5);
    const auto b = gaussian_cloud(100000, {1, 0}, {1, 1}, 6);
    EXPECT_NEAR(frechet_distance(a, b), 1.0, 0.02);
}

TEST(Frechet, DiagonalCovariancesMatchClosedForm) {
    const std::vector<double> ma{0.5, -1, 2}, mb{0, 0, 2.5}, sa{1, 0.5, 2}, sb{0.7, 1.5, 2};
    const auto a = gaussian_cloud(200000, ma, sa, 7);
    const auto b = gaussian_cloud(200000, mb, sb, 8);
    double expected = 0.0;
    for (std::size_t d = 0; d < 3; ++d) expected += (ma[d] - mb[d]) * (ma[d] - mb[d]) + (sa[d] - sb[d]) * (sa[d] - sb[d]);
    EXPECT_NEAR(frechet_distance(a, b), expected, 0.05);
}

TEST(Frechet, SymmetricAndNonnegative) {
    for (std::uint64_t s = 0; s < 5; ++s) {
        const auto a = gaussian_cloud(50, {0, 1, 2, 3}, {1, 1, 2, 0.1}, 10 + s);
        const auto b = gaussian_cloud(30, {0.1, 1, 2.2, 3}, {1.2, 0.8, 2, 0.3}, 20 + s);
        const double ab = frechet_distance(a, b);
        EXPECT_GE(ab, 0.0);
        EXPECT_NEAR(ab, frechet_distance(b, a), 1e-8);
    }
}

TEST(Frechet, FewRowsUseShrinkage) {
    // Fewer rows than dimensions: the ridge keeps the distance defined.
    const auto a = gaussian_cloud(4, std::vector<double>(10, 0.0), std::vector<double>(10, 1.0), 30);
    const auto b = gaussian_cloud(4, std::vector<double>(10, 1.0), std::vector<double>(10, 1.0), 31);
    const double d = frechet_distance(a, b);
    EXPECT_TRUE(std::isfinite(d));
    EXPECT_GT(d, 0.0);
}

TEST(Frechet, Errors) {
    const auto a = gaussian_cloud(10, {0, 0}, {1, 1}, 1);
    const auto b = gaussian_cloud(10, {0, 0, 0}, {1, 1, 1}, 2);
    expect_code([&] { frechet_distance(a, b); }, ErrorCode::dim_mismatch);
    auto c = a;
    c.config_hash = "other";
    expect_code([&] { frechet_distance(a, c); }, ErrorCode::config_mismatch);
    const auto single = gaussian_cloud(1, {0, 0}, {1, 1}, 3);
    expect_code([&] { frechet_distance(single, a); }, ErrorCode::degenerate_covariance);
    auto nan = a;
    nan.values[3] = std::numeric_limits<double>::quiet_NaN();
    expect_code([&] { frechet_distance(nan, a); }, ErrorCode::degenerate_covariance);
}

TEST(MeanSd, PopulationFormula) {
    const std::vector<double> v{1, 2, 3, 4};
    const auto m = mean_sd(v);
    EXPECT_DOUBLE_EQ(m.mean, 2.5);
    EXPECT_DOUBLE_EQ(m.sd, std::sqrt(1.25));
    EXPECT_EQ(mean_sd(std::vector<double>{}).sd, 0.0);
}

TEST(EmbedCorpus, IdenticalFramesGiveIdenticalRows) {
    const auto cfg = small_stats();
    const Signal x(testing::randn(cfg.frame_length, 1, 0.1), 8000.0);
    const std::vector<Signal> frames(10, x);
    const auto m = embed_corpus(frames, cfg);
    ASSERT_EQ(m.rows, 10u);
    EXPECT_EQ(m.dim, BlockMask{}.dimension(cfg));
    for (std::size_t i = 1; i < m.rows; ++i) {
        const auto r0 = m.row(0);
        const auto ri = m.row(i);
        EXPECT_TRUE(std::equal(r0.begin(), r0.end(), ri.begin()));
    }
}

TEST(EmbedCorpus, MaskSelectsBlocks) {
    StatsConfig cfg;
    cfg.frame_length = 44100;
    const std::vector<Signal> frames{Signal(testing::randn(44100, 2, 0.1), 44100.0)};
    const auto m = embed_corpus(frames, cfg, BlockMask::parse("s1"));
    EXPECT_EQ(m.dim, 64u);
    const auto stats = summary_statistics(frames[0], cfg);
    EXPECT_TRUE(std::equal(stats.s1.begin(), stats.s1.end(), m.row(0).begin()));
}

TEST(EmbedCorpus, DeterministicAcrossParallelism) {
    const auto cfg = small_stats();
    std::vector<Signal> frames;
    for (std::uint64_t s = 0; s < 6; ++s) frames.emplace_back(testing::randn(cfg.frame_length, s, 0.1), 8000.0);
    const auto a = embed_corpus(frames, cfg, BlockMask::all(), true);
    const auto b = embed_corpus(frames, cfg, BlockMask::all(), false);
    const auto c = embed_corpus(frames, cfg, BlockMask::all(), true);
    EXPECT_EQ(a.values, b.values);
    EXPECT_EQ(a.values, c.values);
}

TEST(EmbedCorpus, Errors) {
    const auto cfg = small_stats();
    const std::vector<Signal> frames{Signal(std::vector<double>(100), 8000.0)};
    expect_code([&] { embed_corpus(frames, cfg); }, ErrorCode::config_mismatch);
    expect_code([&] { embed_corpus({}, cfg, BlockMask{{false, false, false, false, false}}); },
                ErrorCode::invalid_config);
}

TEST(EmbedCorpus, TextureClassesSeparate) {
    StatsConfig cfg;
    cfg.frame_length = 44100;
    const auto corpus = synthetic::mixed_corpus(4, 44100, 44100.0, 3);  // kind-major: 4 of each
    std::vector<Signal> a(corpus.begin() + 4, corpus.begin() + 8);    // rain
    std::vector<Signal> b(corpus.begin() + 12, corpus.begin() + 16);  // water
    const auto ea = embed_corpus(a, cfg);
    const auto eb = embed_corpus(b, cfg);
    auto centroid = [](const EmbeddingMatrix& m) {
        std::vector<double> c(m.dim, 0.0);
        for (std::size_t i = 0; i < m.rows; ++i) {
            for (std::size_t d = 0; d < m.dim; ++d) c[d] += m.row(i)[d] / m.rows;
        }
        return c;
    };
    auto dist = [](std::span<const double> x, std::span<const double> y) {
        double acc = 0.0;
        for (std::size_t d = 0; d < x.size(); ++d) acc += (x[d] - y[d]) * (x[d] - y[d]);
        return std::sqrt(acc);
    };
    const auto ca = centroid(ea);
    const auto cb = centroid(eb);
    double within = 0.0;
    for (std::size_t i = 0; i < 4; ++i) within += (dist(ea.row(i), ca) + dist(eb.row(i), cb)) / 8.0;
    EXPECT_GT(dist(ca, cb), within);
}

TEST(Robustness, ZeroLevelsGiveZeroLoss) {
    MetricConfig cfg;
    cfg.stats = small_stats();
    const std::vector<Signal> frames{Signal(testing::randn(cfg.stats.frame_length, 4, 0.1), 8000.0)};
    const std::vector<double> zero{0.0};
    const auto r = robustness_experiment(frames, zero, zero, cfg, 0, false);
    EXPECT_EQ(r.texstat_shift[0].mean, 0.0);
    EXPECT_EQ(r.mss_shift[0].mean, 0.0);
    EXPECT_EQ(r.texstat_noise[0].mean, 0.0);
    EXPECT_EQ(r.mss_noise[0].mean, 0.0);
}

TEST(Robustness, InvalidFractions) {
    MetricConfig cfg;
    cfg.stats = small_stats();
    const std::vector<Signal> frames;
    const std::vector<double> ok{0.1};
    for (double bad : {1.0, -0.1, 1.5, std::numeric_limits<double>::quiet_NaN()}) {
        const std::vector<double> b{bad};
        expect_code([&] { robustness_experiment(frames, b, ok, cfg); }, ErrorCode::invalid_fraction);
        expect_code([&] { robustness_experiment(frames, ok, b, cfg); }, ErrorCode::invalid_fraction);
    }
}

TEST(Robustness, NoiseMonotoneAndReportsSerialize) {
    MetricConfig cfg;
    cfg.stats = small_stats();
    const auto frames = synthetic::am_noise_corpus(3, cfg.stats.frame_length, 8000.0, 11);
    const std::vector<double> shifts{0.1, 0.5};
    const std::vector<double> noise{0.1, 0.3, 0.5};
    const auto r = robustness_experiment(frames, shifts, noise, cfg, 0, true);
    EXPECT_EQ(r.n_frames, 3u);
    EXPECT_LE(r.texstat_noise[0].mean, r.texstat_noise[1].mean);
    EXPECT_LE(r.texstat_noise[1].mean, r.texstat_noise[2].mean);
    EXPECT_LE(r.mss_noise[0].mean, r.mss_noise[2].mean);
    for (const auto& cells : {r.texstat_shift, r.mss_shift, r.texstat_noise, r.mss_noise}) {
        for (const auto& c : cells) {
            EXPECT_GE(c.mean, 0.0);
            EXPECT_GE(c.sd, 0.0);
        }
    }
    const auto again = robustness_experiment(frames, shifts, noise, cfg, 0, false);
    EXPECT_EQ(again.texstat_noise[2].mean, r.texstat_noise[2].mean);
    const auto text = r.to_text();
    EXPECT_NE(text.find("Time-Shift"), std::string::npos);
    EXPECT_NE(text.find("Noise-Add"), std::string::npos);
    EXPECT_NE(r.to_json().find("\"noise_add\""), std::string::npos);
}

TEST(Benchmark, RowsAndValidation) {
    MetricConfig cfg;
    cfg.stats = small_stats();
    expect_code([&] { benchmark(2, 16384, cfg, 2); }, ErrorCode::invalid_config);
    const auto r = benchmark(2, 16384, cfg, 3);
    ASSERT_EQ(r.rows.size(), 4u);
    for (const char* name : {"TexStat", "MSS", "MSE", "MAE"}) {
        const auto& row = r.row(name);
        EXPECT_GE(row.batch_ms.mean, 0.0);
        EXPECT_NEAR(row.per_signal_ms, row.batch_ms.mean / 2.0, 1e-12);
    }
    EXPECT_GT(r.row("TexStat").batch_ms.mean, r.row("MSE").batch_ms.mean);
    EXPECT_GT(r.row("TexStat").working_set_bytes, r.row("MSS").working_set_bytes);
    EXPECT_NE(r.to_text().find("TexStat"), std::string::npos);
    EXPECT_NE(r.to_json().find("\"rows\""), std::string::npos);
    EXPECT_THROW(r.row("L1"), std::out_of_range);
}

TEST(Benchmark, PerSignalTimeScalesLinearly) {
    MetricConfig cfg;
    cfg.stats = small_stats();
    const auto one = benchmark(1, 16384, cfg, 5);
    const auto many = benchmark(8, 16384, cfg, 3);
    const double a = one.row("TexStat").per_signal_ms;
    const double b = many.row("TexStat").per_signal_ms;
    EXPECT_LT(std::max(a, b) / std::min(a, b), 2.0);
}

TEST(CalibrateAlpha, EqualizesMomentBlockSpread) {
    auto cfg = small_stats();
    const auto frames = synthetic::mixed_corpus(2, cfg.frame_length, 8000.0, 17);
    const auto alpha = calibrate_alpha(frames, cfg);
    ASSERT_EQ(alpha.size(), cfg.n_moments);
    EXPECT_EQ(alpha[0], 1.0);
    cfg.alpha = alpha;
    const StatsAnalyzer analyzer(cfg);
    std::vector<std::vector<double>> blocks(cfg.n_moments);
    for (const auto& f : frames) {
        const auto s = analyzer(f);
        for (std::size_t l = 0; l < cfg.n_moments; ++l) {
            for (std::size_t j = 0; j < cfg.n_cochlear(); ++j) blocks[l].push_back(s.s1[l * cfg.n_cochlear() + j]);
        }
    }
    const double ref = mean_sd(blocks[0]).sd;
    for (std::size_t l = 1; l < blocks.size(); ++l) EXPECT_NEAR(mean_sd(blocks[l]).sd / ref, 1.0, 1e-9);
}

TEST(CalibrateAlpha, Errors) {
    const auto cfg = small_stats();
    expect_code([&] { calibrate_alpha({}, cfg); }, ErrorCode::invalid_config);
    const std::vector<Signal> wrong{Signal(std::vector<double>(10), 8000.0)};
    expect_code([&] { calibrate_alpha(wrong, cfg); }, ErrorCode::config_mismatch);
}

}  // namespace
}  // namespace texstat
