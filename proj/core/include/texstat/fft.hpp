#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

// Thin wrapper over FFTW. Plans are cached per (length, kind) behind a mutex;
// execution uses per-call buffers so concurrent callers never share scratch.
namespace texstat::fft {

using complex = std::complex<double>;

/// Forward real transform, unnormalized. Returns n/2 + 1 bins.
std::vector<complex> rfft(std::span<const double> x);

/// Inverse of rfft for a length-n signal, normalized by 1/n.
std::vector<double> irfft(std::span<const complex> half, std::size_t n);

/// Forward complex transform, unnormalized.
std::vector<complex> forward(std::span<const complex> x);

/// Inverse complex transform, normalized by 1/n.
std::vector<complex> inverse(std::span<const complex> x);

inline std::size_t half_size(std::size_t n) noexcept { return n / 2 + 1; }

}  // namespace texstat::fft
