#pragma once

#include "texstat/signal.hpp"

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

// Procedural stationary textures used as a desk-scale corpus for
// calibration, tests and demos. Every generator is deterministic in its seed
// and returns a signal normalized to RMS 0.1.
namespace texstat::synthetic {

enum class Texture {
    am_noise,  ///< spectrally shaped noise under a sinusoidal amplitude modulation
    rain,      ///< dense high-passed noise droplets over a hiss bed
    wind,      ///< low-passed noise with slow, deep gusting
    water,     ///< rising-pitch bubbles over a low noise bed
    crackle,   ///< sparse heavy-tailed clicks over a rumble
};

std::string_view name(Texture t) noexcept;
Texture texture_from_name(std::string_view name);
inline constexpr Texture kAllTextures[] = {Texture::am_noise, Texture::rain, Texture::wind, Texture::water,
                                           Texture::crackle};

Signal make_texture(Texture kind, std::size_t length, double sample_rate, std::uint64_t seed);

/// `count` AM-modulated filtered-noise textures with randomized spectra and
/// modulation rates.
std::vector<Signal> am_noise_corpus(std::size_t count, std::size_t length, double sample_rate, std::uint64_t seed);

/// `per_kind` draws of every texture kind, kind-major.
std::vector<Signal> mixed_corpus(std::size_t per_kind, std::size_t length, double sample_rate, std::uint64_t seed);

}  // namespace texstat::synthetic
