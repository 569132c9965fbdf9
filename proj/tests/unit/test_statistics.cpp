#include <texstat/error.hpp>
#include <texstat/statistics.hpp>

#include <gtest/gtest.h>

#include "test_support.hpp"

#include <algorithm>
#include <limits>

namespace texstat {
namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> cosine(double freq, double amp, std::size_t n, double sr = 44100.0) {
    std::vector<double> x(n);
    for (std::size_t t = 0; t < n; ++t) x[t] = amp * std::cos(2.0 * kPi * freq * static_cast<double>(t) / sr);
    return x;
}

double sd_of(const std::vector<double>& x) {
    const double mu = testing::mean_of(x);
    double acc = 0.0;
    for (double v : x) acc += (v - mu) * (v - mu);
    return std::sqrt(acc / static_cast<double>(x.size()));
}

// A smaller configuration that still exercises both banks.
StatsConfig small_config(std::size_t nf = 8, std::size_t ng = 4, std::size_t L = 4) {
    StatsConfig cfg;
    cfg.cochlear = {FilterbankKind::erb, nf, 8000.0, 20.0, 4000.0};
    cfg.modulation = {FilterbankKind::log, ng, 8000.0, 0.5, 100.0};
    cfg.n_moments = L;
    cfg.alpha.assign(L, 1.0);
    cfg.frame_length = 16384;
    return cfg;
}

Signal noise_signal(std::size_t n, std::uint64_t seed, double sr, double scale = 0.1) {
    return {testing::randn(n, seed, scale), sr};
}

void expect_code(auto&& fn, ErrorCode code) {
    try {
        fn();
        ADD_FAILURE() << "expected " << to_string(code);
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), code) << e.what();
    }
}

TEST(AnalyticEnvelope, CosineHasUnitEnvelope) {
    const std::size_t n = 65536;
    const double f = 1486.0 * 44100.0 / n;
    const auto env = analytic_envelope(cosine(f, 1.0, n));
    ASSERT_EQ(env.size(), n);
    for (std::size_t t = 0; t < n; ++t) ASSERT_NEAR(env[t], 1.0, 1e-9) << t;
}

TEST(AnalyticEnvelope, ScalesLinearly) {
    const std::size_t n = 65536;
    const auto env = analytic_envelope(cosine(1486.0 * 44100.0 / n, 0.5, n));
    for (std::size_t t = 0; t < n; ++t) ASSERT_NEAR(env[t], 0.5, 1e-9) << t;
}

TEST(AnalyticEnvelope, ZeroSignal) {
    for (double v : analytic_envelope(std::vector<double>(256, 0.0))) EXPECT_EQ(v, 0.0);
}

TEST(AnalyticEnvelope, MatchesDirectDftOracle) {
    for (std::size_t n : {64u, 255u, 256u}) {
        const auto x = testing::randn(n, n + 1);
        const auto fast = analytic_envelope(x);
        const auto slow = testing::naive_envelope(x);
        for (std::size_t t = 0; t < n; ++t) EXPECT_NEAR(fast[t], slow[t], 1e-10);
    }
}

TEST(AnalyticEnvelope, RejectsTooShort) {
    expect_code([] { analytic_envelope(std::vector<double>{1.0}); }, ErrorCode::length_mismatch);
}

TEST(NormalizedMoments, HandComputedExample) {
    const auto m = normalized_moments(std::vector<double>{1.0, 2.0, 3.0}, 4);
    ASSERT_EQ(m.size(), 4u);
    EXPECT_NEAR(m[0], 2.0, 1e-15);
    EXPECT_NEAR(m[1], 1.0 / 6.0, 1e-15);
    EXPECT_NEAR(m[2], 0.0, 1e-15);
    EXPECT_NEAR(m[3], 1.5, 1e-12);
}

TEST(NormalizedMoments, ConstantInput) {
    for (double c : {0.25, 1.0, 7.0}) {
        const auto m = normalized_moments(std::vector<double>(10, c), 4);
        EXPECT_DOUBLE_EQ(m[0], c);
        EXPECT_EQ(m[1], 0.0);
        EXPECT_EQ(m[2], 0.0);
        EXPECT_EQ(m[3], 0.0);
    }
}

TEST(NormalizedMoments, SilenceIsFinite) {
    const auto m = normalized_moments(std::vector<double>(16, 0.0), 5);
    for (double v : m) {
        EXPECT_TRUE(std::isfinite(v));
        EXPECT_EQ(v, 0.0);
    }
}

TEST(NormalizedMoments, RayleighEnvelopeOfNarrowbandNoise) {
    const std::size_t n = 1 << 20;
    const auto noise = testing::randn(n, 77);
    // Narrowband noise by brick-wall masking the direct half spectrum: keep 3-4 kHz.
    std::vector<testing::cplx> half(n / 2 + 1);
    {
        const auto full = fft::rfft(noise);
        for (std::size_t k = 0; k < half.size(); ++k) {
            const double f = static_cast<double>(k) * 44100.0 / n;
            if (f >= 3000.0 && f <= 4000.0) half[k] = full[k];
        }
    }
    const auto band = fft::irfft(half, n);
    const auto m = normalized_moments(analytic_envelope(band), 2);
    EXPECT_NEAR(m[1], (4.0 - kPi) / kPi, 0.01);
}

TEST(NormalizedMoments, MatchesDirectSummationOracle) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        auto x = testing::randn(1000, seed);
        for (auto& v : x) v = std::abs(v) + 0.1 * static_cast<double>(seed % 5);
        const auto fast = normalized_moments(x, 6);
        const auto slow = testing::oracle_moments(x, 6);
        for (std::size_t l = 0; l < 6; ++l) {
            EXPECT_NEAR(fast[l], slow[l], 1e-9 * std::max(1.0, std::abs(slow[l]))) << "seed " << seed << " l " << l;
        }
    }
}

TEST(NormalizedMoments, Preconditions) {
    expect_code([] { normalized_moments(std::vector<double>{1.0, 2.0}, 1); }, ErrorCode::invalid_config);
    expect_code([] { normalized_moments(std::vector<double>{}, 4); }, ErrorCode::length_mismatch);
}

TEST(PearsonVech, HandComputedExample) {
    const std::vector<std::vector<double>> v{{1, 2, 3}, {2, 4, 6}, {3, 2, 1}};
    const auto c = pearson_corr_vech(v);
    ASSERT_EQ(c.size(), 3u);
    EXPECT_NEAR(c[0], 1.0, 1e-15);
    EXPECT_NEAR(c[1], -1.0, 1e-15);
    EXPECT_NEAR(c[2], -1.0, 1e-15);
}

TEST(PearsonVech, IdenticalVectors) {
    const auto x = testing::randn(50, 3);
    const std::vector<std::vector<double>> v(5, x);
    const auto c = pearson_corr_vech(v);
    ASSERT_EQ(c.size(), 10u);
    for (double r : c) EXPECT_NEAR(r, 1.0, 1e-12);
}

TEST(PearsonVech, ConstantVectorGivesZero) {
    const std::vector<std::vector<double>> v{{1, 2, 4}, {5, 5, 5}, {0, 1, 0}};
    const auto c = pearson_corr_vech(v);
    EXPECT_EQ(c[0], 0.0);
    EXPECT_EQ(c[2], 0.0);
    EXPECT_NE(c[1], 0.0);
}

TEST(PearsonVech, OrderAndOracle) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        std::vector<std::vector<double>> v;
        const std::size_t k = 2 + seed % 5;
        for (std::size_t i = 0; i < k; ++i) v.push_back(testing::randn(1000, 1000 * seed + i));
        // Correlate some pairs on purpose.
        for (std::size_t t = 0; t < 1000; ++t) v[1][t] += 0.5 * v[0][t];
        const auto fast = pearson_corr_vech(v);
        ASSERT_EQ(fast.size(), k * (k - 1) / 2);
        std::size_t idx = 0;
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = i + 1; j < k; ++j) {
                const double r = testing::oracle_pearson(v[i], v[j]);
                EXPECT_NEAR(fast[idx], r, 1e-9 * std::max(1.0, std::abs(r)));
                ++idx;
            }
        }
    }
}

TEST(PearsonVech, Errors) {
    const std::vector<std::vector<double>> ragged{{1, 2, 3}, {1, 2}};
    expect_code([&] { pearson_corr_vech(ragged); }, ErrorCode::length_mismatch);
}

TEST(StatsConfig, Validation) {
    auto cfg = small_config();
    EXPECT_NO_THROW(cfg.validate());
    auto bad = cfg;
    bad.n_moments = 1;
    bad.alpha = {1.0};
    expect_code([&] { bad.validate(); }, ErrorCode::invalid_config);
    bad = cfg;
    bad.alpha.pop_back();
    expect_code([&] { bad.validate(); }, ErrorCode::invalid_config);
    bad = cfg;
    bad.alpha[2] = 0.0;
    expect_code([&] { bad.validate(); }, ErrorCode::invalid_config);
    bad = cfg;
    bad.frame_length = 64;
    expect_code([&] { bad.validate(); }, ErrorCode::invalid_config);
    bad = cfg;
    bad.envelope_decimation = 0;
    expect_code([&] { bad.validate(); }, ErrorCode::invalid_config);
}

TEST(StatsConfig, StatisticCountGuard) {
    StatsConfig cfg;
    // 16 bands, 6 modulation bands, 4 moments: 64 + 120 + 96 + 240 + 720.
    EXPECT_EQ(cfg.statistic_count(), 1240u);
    cfg.frame_length = 1024;
    expect_code([&] { cfg.validate(); }, ErrorCode::invalid_config);
}

TEST(StatsConfig, HashTracksEveryField) {
    const StatsConfig base;
    auto other = base;
    EXPECT_EQ(base.hash(), other.hash());
    other.alpha[1] *= 2.0;
    EXPECT_NE(base.hash(), other.hash());
    other = base;
    other.normalize_mean_by_rms = false;
    EXPECT_NE(base.hash(), other.hash());
    other = base;
    other.modulation.n_filters = 5;
    EXPECT_NE(base.hash(), other.hash());
}

TEST(SummaryStatistics, DimensionLaw) {
    for (std::size_t nf : {4u, 8u, 16u}) {
        for (std::size_t ng : {4u, 6u}) {
            for (std::size_t L : {2u, 3u, 4u}) {
                const auto cfg = small_config(nf, ng, L);
                const auto s = summary_statistics(noise_signal(cfg.frame_length, nf * ng * L, 8000.0), cfg);
                EXPECT_EQ(s.s1.size(), L * nf);
                EXPECT_EQ(s.s2.size(), nf * (nf - 1) / 2);
                EXPECT_EQ(s.s3.size(), ng * nf);
                EXPECT_EQ(s.s4.size(), nf * ng * (ng - 1) / 2);
                EXPECT_EQ(s.s5.size(), ng * nf * (nf - 1) / 2);
                const auto sizes = cfg.block_sizes();
                for (std::size_t b = 0; b < 5; ++b) EXPECT_EQ(s.block(b).size(), sizes[b]);
            }
        }
    }
}

TEST(SummaryStatistics, RangesHold) {
    const auto cfg = small_config();
    for (std::uint64_t seed : {1u, 2u}) {
        auto x = noise_signal(cfg.frame_length, seed, 8000.0);
        for (std::size_t t = 0; t < x.size(); ++t) x.samples[t] *= 1.0 + 0.8 * std::sin(2.0 * kPi * 3.0 * t / 8000.0);
        const auto s = summary_statistics(x, cfg);
        for (std::size_t b = 0; b < 5; ++b) {
            for (double v : s.block(b)) EXPECT_TRUE(std::isfinite(v));
        }
        for (const auto* block : {&s.s2, &s.s4, &s.s5}) {
            for (double v : *block) {
                EXPECT_GE(v, -1.0);
                EXPECT_LE(v, 1.0);
            }
        }
        for (double v : s.s3) EXPECT_GE(v, 0.0);
    }
}

TEST(SummaryStatistics, WhiteNoiseDecorrelatesDistantBands) {
    StatsConfig cfg;
    const std::size_t nf = cfg.n_cochlear();
    std::vector<double> mean_s2(nf * (nf - 1) / 2, 0.0);
    const int draws = 4;
    const StatsAnalyzer analyzer(cfg);
    for (int d = 0; d < draws; ++d) {
        const auto s = analyzer(noise_signal(cfg.frame_length, 900 + d, 44100.0));
        for (std::size_t i = 0; i < mean_s2.size(); ++i) mean_s2[i] += s.s2[i] / draws;
    }
    std::size_t idx = 0;
    for (std::size_t i = 0; i < nf; ++i) {
        for (std::size_t j = i + 1; j < nf; ++j, ++idx) {
            if (j == i + 1) continue;
            EXPECT_NEAR(mean_s2[idx], 0.0, 0.1) << "bands " << i << "," << j;
        }
    }
}

TEST(SummaryStatistics, ScaleInvarianceWithRmsNormalizedMean) {
    const auto cfg = small_config();
    const auto x = noise_signal(cfg.frame_length, 31, 8000.0);
    Signal y = x;
    for (auto& v : y.samples) v *= 3.7;
    const auto a = summary_statistics(x, cfg);
    const auto b = summary_statistics(y, cfg);
    for (std::size_t blk = 0; blk < 5; ++blk) {
        EXPECT_LT(testing::max_rel_diff(a.block(blk), b.block(blk)), 1e-9) << "block " << blk;
    }
}

TEST(SummaryStatistics, MeanBlockScalesWithoutNormalization) {
    auto cfg = small_config();
    cfg.normalize_mean_by_rms = false;
    const auto x = noise_signal(cfg.frame_length, 32, 8000.0);
    const double c = 2.5;
    Signal y = x;
    for (auto& v : y.samples) v *= c;
    const auto a = summary_statistics(x, cfg);
    const auto b = summary_statistics(y, cfg);
    const std::size_t nf = cfg.n_cochlear();
    for (std::size_t j = 0; j < nf; ++j) EXPECT_NEAR(b.s1[j], c * a.s1[j], 1e-9 * std::abs(c * a.s1[j]));
    const std::vector<double> rest_a(a.s1.begin() + nf, a.s1.end());
    const std::vector<double> rest_b(b.s1.begin() + nf, b.s1.end());
    EXPECT_LT(testing::max_rel_diff(rest_a, rest_b), 1e-9);
    for (std::size_t blk = 1; blk < 5; ++blk) EXPECT_LT(testing::max_rel_diff(a.block(blk), b.block(blk)), 1e-9);
}

TEST(SummaryStatistics, AlphaWeightsMomentBlocks) {
    auto cfg = small_config();
    const auto x = noise_signal(cfg.frame_length, 33, 8000.0);
    const auto unit = summary_statistics(x, cfg);
    cfg.alpha = {2.0, 3.0, 5.0, 7.0};
    const auto weighted = summary_statistics(x, cfg);
    const std::size_t nf = cfg.n_cochlear();
    for (std::size_t l = 0; l < 4; ++l) {
        for (std::size_t j = 0; j < nf; ++j) {
            EXPECT_NEAR(weighted.s1[l * nf + j], cfg.alpha[l] * unit.s1[l * nf + j], 1e-12 * std::abs(weighted.s1[l * nf + j]) + 1e-15);
        }
    }
}

TEST(SummaryStatistics, MatchesOracleComposition) {
    // Rebuild S1, S2 and S3 from the public building blocks.
    auto cfg = small_config(6, 4, 3);
    cfg.normalize_mean_by_rms = false;
    const auto x = noise_signal(cfg.frame_length, 34, 8000.0);
    const auto s = summary_statistics(x, cfg);
    const auto fb = make_filterbank(cfg.cochlear, cfg.frame_length);
    const auto bands = apply_filterbank(fb, x);
    std::vector<std::vector<double>> env;
    for (const auto& b : bands.bands) env.push_back(analytic_envelope(b));
    for (std::size_t j = 0; j < env.size(); ++j) {
        const auto m = testing::oracle_moments(env[j], 3);
        for (std::size_t l = 0; l < 3; ++l) EXPECT_NEAR(s.s1[l * 6 + j], m[l], 1e-9 * std::max(1.0, std::abs(m[l])));
    }
    std::size_t idx = 0;
    for (std::size_t i = 0; i < env.size(); ++i) {
        for (std::size_t j = i + 1; j < env.size(); ++j) EXPECT_NEAR(s.s2[idx++], testing::oracle_pearson(env[i], env[j]), 1e-9);
    }
    const auto mod = make_filterbank(cfg.modulation, cfg.frame_length);
    for (std::size_t j = 0; j < env.size(); ++j) {
        const auto m = apply_filterbank(mod, env[j], 8000.0);
        const double sd_e = sd_of(env[j]);
        for (std::size_t k = 0; k < m.size(); ++k) {
            EXPECT_NEAR(s.s3[j * 4 + k], sd_of(m.bands[k]) / sd_e, 1e-9);
        }
    }
}

TEST(SummaryStatistics, Deterministic) {
    const auto cfg = small_config();
    const auto x = noise_signal(cfg.frame_length, 35, 8000.0);
    EXPECT_EQ(summary_statistics(x, cfg), summary_statistics(x, cfg));
    const StatsAnalyzer analyzer(cfg);
    EXPECT_EQ(analyzer(x), summary_statistics(x, cfg));
}

TEST(SummaryStatistics, Errors) {
    const auto cfg = small_config();
    expect_code([&] { summary_statistics(noise_signal(1000, 1, 8000.0), cfg); }, ErrorCode::config_mismatch);
    auto x = noise_signal(cfg.frame_length, 2, 8000.0);
    x.samples[100] = std::numeric_limits<double>::quiet_NaN();
    expect_code([&] { summary_statistics(x, cfg); }, ErrorCode::non_finite_input);
    x.samples[100] = std::numeric_limits<double>::infinity();
    expect_code([&] { summary_statistics(x, cfg); }, ErrorCode::non_finite_input);
    expect_code([&] { summary_statistics(noise_signal(cfg.frame_length, 3, 44100.0), cfg); },
                ErrorCode::config_mismatch);
}

TEST(SummaryStatistics, SilenceIsFinite) {
    const auto cfg = small_config();
    const auto s = summary_statistics(Signal(std::vector<double>(cfg.frame_length, 0.0), 8000.0), cfg);
    for (std::size_t b = 0; b < 5; ++b) {
        for (double v : s.block(b)) EXPECT_EQ(v, 0.0);
    }
}

TEST(SummaryStatistics, EnvelopeDecimationKeepsShape) {
    auto cfg = small_config();
    const auto x = noise_signal(cfg.frame_length, 36, 8000.0);
    const auto full = summary_statistics(x, cfg);
    cfg.envelope_decimation = 4;
    const auto dec = summary_statistics(x, cfg);
    EXPECT_NE(full.config_hash, dec.config_hash);
    for (std::size_t b = 0; b < 5; ++b) ASSERT_EQ(full.block(b).size(), dec.block(b).size());
    // The cochlear part does not depend on the modulation rate.
    EXPECT_EQ(full.s1, dec.s1);
    EXPECT_EQ(full.s2, dec.s2);
    for (std::size_t i = 0; i < full.s3.size(); ++i) EXPECT_NEAR(dec.s3[i], full.s3[i], 0.05 + 0.1 * full.s3[i]);
}

TEST(BlockMask, ParseAndDimension) {
    const StatsConfig cfg;
    const BlockMask def;
    EXPECT_EQ(def.to_string(), "s1,s3");
    EXPECT_EQ(def.dimension(cfg), 64u + 96u);
    EXPECT_EQ(BlockMask::parse("s1").dimension(cfg), 64u);
    EXPECT_EQ(BlockMask::parse("s1,s2,s3,s4,s5"), BlockMask::all());
    EXPECT_EQ(BlockMask::parse(def.to_string()), def);
    expect_code([] { BlockMask::parse("s6"); }, ErrorCode::invalid_config);
    EXPECT_FALSE((BlockMask{{false, false, false, false, false}}.any()));
}

TEST(SummaryStatistics, JsonLayout) {
    const auto cfg = small_config();
    const auto s = summary_statistics(noise_signal(cfg.frame_length, 37, 8000.0), cfg);
    const auto text = to_json(s, cfg);
    for (const char* key : {"\"version\"", "\"config\"", "\"config_hash\"", "\"s1\"", "\"s2\"", "\"s3\"", "\"s4\"", "\"s5\""}) {
        EXPECT_NE(text.find(key), std::string::npos) << key;
    }
}

}  // namespace
}  // namespace texstat
