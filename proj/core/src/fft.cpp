#include "texstat/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <utility>

namespace texstat::fft {
namespace {

enum class Kind { r2c, c2r, fwd, inv };

struct FftwFree {
    void operator()(void* p) const noexcept { fftw_free(p); }
};

template <typename T>
using aligned_ptr = std::unique_ptr<T[], FftwFree>;

template <typename T>
aligned_ptr<T> aligned(std::size_t count) {
    return aligned_ptr<T>(static_cast<T*>(fftw_malloc(sizeof(T) * std::max<std::size_t>(count, 1))));
}

// FFTW planning is not thread-safe; execution with new-array functions is.
fftw_plan plan_for(Kind kind, std::size_t n) {
    static std::mutex mutex;
    static std::map<std::pair<int, std::size_t>, fftw_plan> plans;

    std::lock_guard lock(mutex);
    const auto key = std::make_pair(static_cast<int>(kind), n);
    if (auto it = plans.find(key); it != plans.end()) return it->second;

    const int len = static_cast<int>(n);
    const std::size_t h = half_size(n);
    auto rbuf = aligned<double>(n);
    auto cbuf = aligned<fftw_complex>(n);
    auto cbuf2 = aligned<fftw_complex>(std::max(n, h));
    fftw_plan plan = nullptr;
    switch (kind) {
    case Kind::r2c:
        plan = fftw_plan_dft_r2c_1d(len, rbuf.get(), cbuf2.get(), FFTW_ESTIMATE);
        break;
    case Kind::c2r:
        plan = fftw_plan_dft_c2r_1d(len, cbuf2.get(), rbuf.get(), FFTW_ESTIMATE);
        break;
    case Kind::fwd:
        plan = fftw_plan_dft_1d(len, cbuf.get(), cbuf2.get(), FFTW_FORWARD, FFTW_ESTIMATE);
        break;
    case Kind::inv:
        plan = fftw_plan_dft_1d(len, cbuf.get(), cbuf2.get(), FFTW_BACKWARD, FFTW_ESTIMATE);
        break;
    }
    plans.emplace(key, plan);
    return plan;
}

std::vector<complex> complex_transform(std::span<const complex> x, Kind kind) {
    const std::size_t n = x.size();
    std::vector<complex> out(n);
    if (n == 0) return out;
    auto in = aligned<fftw_complex>(n);
    auto res = aligned<fftw_complex>(n);
    std::memcpy(in.get(), x.data(), n * sizeof(fftw_complex));
    fftw_execute_dft(plan_for(kind, n), in.get(), res.get());
    std::memcpy(static_cast<void*>(out.data()), res.get(), n * sizeof(fftw_complex));
    return out;
}

}  // namespace

std::vector<complex> rfft(std::span<const double> x) {
    const std::size_t n = x.size();
    if (n == 0) return {};
    const std::size_t h = half_size(n);
    auto in = aligned<double>(n);
    auto res = aligned<fftw_complex>(h);
    std::copy(x.begin(), x.end(), in.get());
    fftw_execute_dft_r2c(plan_for(Kind::r2c, n), in.get(), res.get());
    std::vector<complex> out(h);
    std::memcpy(static_cast<void*>(out.data()), res.get(), h * sizeof(fftw_complex));
    return out;
}

std::vector<double> irfft(std::span<const complex> half, std::size_t n) {
    std::vector<double> out(n);
    if (n == 0) return out;
    const std::size_t h = half_size(n);
    auto in = aligned<fftw_complex>(h);
    auto res = aligned<double>(n);
    std::fill_n(reinterpret_cast<double*>(in.get()), 2 * h, 0.0);
    std::memcpy(in.get(), half.data(), std::min(h, half.size()) * sizeof(fftw_complex));
    fftw_execute_dft_c2r(plan_for(Kind::c2r, n), in.get(), res.get());
    const double scale = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = res[i] * scale;
    return out;
}

std::vector<complex> forward(std::span<const complex> x) {
    return complex_transform(x, Kind::fwd);
}

std::vector<complex> inverse(std::span<const complex> x) {
    auto out = complex_transform(x, Kind::inv);
    const double scale = out.empty() ? 1.0 : 1.0 / static_cast<double>(out.size());
    for (auto& v : out) v *= scale;
    return out;
}

}  // namespace texstat::fft
