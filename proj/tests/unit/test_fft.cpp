#include <texstat/fft.hpp>

#include <gtest/gtest.h>

#include "test_support.hpp"

namespace texstat {
namespace {

using testing::cplx;

TEST(Fft, RealForwardMatchesDirectDft) {
    for (std::size_t n : {64u, 65u, 100u}) {
        const auto x = testing::randn(n, n);
        const auto fast = fft::rfft(x);
        const auto slow = testing::naive_dft(testing::to_complex(x));
        ASSERT_EQ(fast.size(), n / 2 + 1);
        for (std::size_t k = 0; k < fast.size(); ++k) {
            EXPECT_NEAR(fast[k].real(), slow[k].real(), 1e-9);
            EXPECT_NEAR(fast[k].imag(), slow[k].imag(), 1e-9);
        }
    }
}

TEST(Fft, InverseRealRoundTrip) {
    for (std::size_t n : {64u, 99u, 4096u}) {
        const auto x = testing::randn(n, 3 * n);
        const auto back = fft::irfft(fft::rfft(x), n);
        ASSERT_EQ(back.size(), n);
        for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(back[i], x[i], 1e-12);
    }
}

TEST(Fft, ComplexTransformsAreInverse) {
    const auto re = testing::randn(128, 1);
    const auto im = testing::randn(128, 2);
    std::vector<cplx> x(128);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = {re[i], im[i]};
    const auto fwd = fft::forward(x);
    const auto slow = testing::naive_dft(x);
    for (std::size_t k = 0; k < x.size(); ++k) EXPECT_LT(std::abs(fwd[k] - slow[k]), 1e-9);
    const auto back = fft::inverse(fwd);
    for (std::size_t i = 0; i < x.size(); ++i) EXPECT_LT(std::abs(back[i] - x[i]), 1e-12);
}

TEST(Fft, EmptyInputs) {
    EXPECT_TRUE(fft::rfft(std::vector<double>{}).empty());
    EXPECT_TRUE(fft::irfft(std::vector<cplx>{}, 0).empty());
    EXPECT_TRUE(fft::forward(std::vector<cplx>{}).empty());
}

}  // namespace
}  // namespace texstat
