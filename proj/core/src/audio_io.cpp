#include "texstat/audio_io.hpp"

#include "texstat/error.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

namespace texstat {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t le16(const unsigned char* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t le32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void put16(std::string& out, std::uint16_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>(v >> 8));
}

void put32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

[[noreturn]] void corrupt(const std::filesystem::path& path, const std::string& why) {
    throw Error(ErrorCode::corrupt_file, path.string() + ": " + why);
}

}  // namespace

Signal read_wav(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::not_found, path.string() + ": cannot open");
    const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
        std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
        corrupt(path, "not a RIFF/WAVE file");
    }

    std::uint16_t format = 0;
    std::uint16_t channels = 0;
    std::uint32_t sample_rate = 0;
    std::uint16_t bits = 0;
    bool have_fmt = false;
    const unsigned char* data = nullptr;
    std::size_t data_size = 0;

    std::size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const unsigned char* chunk = bytes.data() + pos;
        const std::uint32_t size = le32(chunk + 4);
        const std::size_t body = pos + 8;
        const std::size_t available = bytes.size() - body;
        if (std::memcmp(chunk, "fmt ", 4) == 0) {
            if (size < 16 || size > available) corrupt(path, "truncated fmt chunk");
            const unsigned char* f = bytes.data() + body;
            format = le16(f);
            channels = le16(f + 2);
            sample_rate = le32(f + 4);
            bits = le16(f + 14);
            if (format == kFormatExtensible) {
                if (size < 40) corrupt(path, "truncated extensible fmt chunk");
                format = le16(f + 24);
            }
            have_fmt = true;
        } else if (std::memcmp(chunk, "data", 4) == 0) {
            data = bytes.data() + body;
            // Some writers leave the size as 0xFFFFFFFF for streamed files.
            data_size = std::min<std::size_t>(size, available);
            break;
        }
        pos = body + size + (size & 1U);
    }
    if (!have_fmt) corrupt(path, "missing fmt chunk");
    if (!data) corrupt(path, "missing data chunk");
    if (channels == 0 || sample_rate == 0) corrupt(path, "zero channels or sample rate");

    const bool pcm16 = format == kFormatPcm && bits == 16;
    const bool pcm24 = format == kFormatPcm && bits == 24;
    const bool f32 = format == kFormatFloat && bits == 32;
    if (!pcm16 && !pcm24 && !f32) {
        throw Error(ErrorCode::unsupported_format, path.string() + ": format tag " + std::to_string(format) +
                                                       " with " + std::to_string(bits) + " bits");
    }

    const std::size_t width = bits / 8;
    const std::size_t frame_bytes = width * channels;
    const std::size_t frames = data_size / frame_bytes;
    Signal out(std::vector<double>(frames, 0.0), static_cast<double>(sample_rate));
    for (std::size_t i = 0; i < frames; ++i) {
        double acc = 0.0;
        for (std::size_t c = 0; c < channels; ++c) {
            const unsigned char* p = data + i * frame_bytes + c * width;
            if (pcm16) {
                acc += static_cast<std::int16_t>(le16(p)) / 32768.0;
            } else if (pcm24) {
                std::int32_t v = static_cast<std::int32_t>(p[0] | (p[1] << 8) | (p[2] << 16));
                if (v & 0x800000) v -= 0x1000000;
                acc += v / 8388608.0;
            } else {
                acc += static_cast<double>(std::bit_cast<float>(le32(p)));
            }
        }
        out.samples[i] = channels == 1 ? acc : acc / static_cast<double>(channels);
    }
    return out;
}

void write_wav(const std::filesystem::path& path, const Signal& x, WavEncoding encoding) {
    const bool pcm = encoding == WavEncoding::pcm16;
    const std::uint16_t bits = pcm ? 16 : 32;
    const std::uint16_t block_align = bits / 8;
    const auto rate = static_cast<std::uint32_t>(std::lround(x.sample_rate));
    const std::uint32_t data_bytes = static_cast<std::uint32_t>(x.size() * block_align);

    std::string out;
    out.reserve(44 + data_bytes);
    out += "RIFF";
    put32(out, 36 + data_bytes);
    out += "WAVEfmt ";
    put32(out, 16);
    put16(out, pcm ? kFormatPcm : kFormatFloat);
    put16(out, 1);
    put32(out, rate);
    put32(out, rate * block_align);
    put16(out, block_align);
    put16(out, bits);
    out += "data";
    put32(out, data_bytes);
    for (double v : x.samples) {
        if (pcm) {
            const double clamped = std::clamp(v, -1.0, 1.0 - 0x1.0p-15);
            put16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(std::lround(clamped * 32768.0))));
        } else {
            put32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
        }
    }

    std::ofstream file(path, std::ios::binary);
    if (!file) throw Error(ErrorCode::io_error, path.string() + ": cannot open for writing");
    file.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!file) throw Error(ErrorCode::io_error, path.string() + ": write failed");
}

std::vector<Signal> segment(const Signal& x, std::size_t frame, std::size_t hop) {
    std::vector<Signal> out;
    if (frame == 0 || hop == 0) return out;
    for (std::size_t start = 0; start + frame <= x.size(); start += hop) {
        out.emplace_back(std::vector<double>(x.samples.begin() + static_cast<std::ptrdiff_t>(start),
                                             x.samples.begin() + static_cast<std::ptrdiff_t>(start + frame)),
                         x.sample_rate);
    }
    return out;
}

std::vector<std::filesystem::path> list_wav_files(const std::filesystem::path& dir) {
    std::error_code ec;
    if (!std::filesystem::is_directory(dir, ec)) {
        throw Error(ErrorCode::not_found, dir.string() + ": not a directory");
    }
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        auto ext = entry.path().extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
        if (ext == ".wav") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    return files;
}

}  // namespace texstat
