#pragma once

#include "texstat/signal.hpp"

#include <cstddef>
#include <filesystem>
#include <vector>

namespace texstat {

enum class WavEncoding { pcm16, float32 };

/// Decodes RIFF/WAVE with 16-bit PCM, 24-bit PCM or 32-bit float samples
/// (plain or WAVE_FORMAT_EXTENSIBLE). Integers are scaled by 1/32768 and
/// 1/8388608; multichannel audio is averaged to mono. No resampling.
///
/// Throws NotFound, CorruptFile or UnsupportedFormat.
Signal read_wav(const std::filesystem::path& path);

/// pcm16 clamps to [-1, 1 - 2^-15] and rounds to nearest. Throws IoError.
void write_wav(const std::filesystem::path& path, const Signal& x, WavEncoding encoding = WavEncoding::float32);

/// Frames of `frame` samples starting at 0, hop, 2*hop, ...; a trailing
/// partial frame is dropped.
std::vector<Signal> segment(const Signal& x, std::size_t frame, std::size_t hop);

/// Every *.wav file directly inside `dir`, sorted by name.
std::vector<std::filesystem::path> list_wav_files(const std::filesystem::path& dir);

}  // namespace texstat
