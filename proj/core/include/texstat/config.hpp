#pragma once

#include "texstat/metric.hpp"
#include "texstat/statistics.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>

namespace texstat {

/// Everything a CLI run depends on. Serializes to one JSON document with a
/// "version" field; config/default.json holds the shipped defaults.
struct GlobalConfig {
    static constexpr int kVersion = 1;

    StatsConfig stats;
    BlockWeights beta{1.0, 1.0, 1.0, 1.0, 1.0};
    BlockMask fad_mask;
    std::size_t n_params = 256;
    std::uint64_t rng_seed = 0;
    double sample_rate = 44100.0;
    bool nonnegative_envelopes = false;

    MetricConfig metric() const { return {stats, beta}; }

    /// Throws InvalidConfig.
    void validate() const;

    std::string hash() const;
    std::string to_json() const;

    /// Missing keys take their default values. Throws InvalidConfig.
    static GlobalConfig from_json(const std::string& text);
    static GlobalConfig load(const std::filesystem::path& path);

    /// Same config with the analysis frame length replaced.
    GlobalConfig with_frame(std::size_t frame_length) const;

    bool operator==(const GlobalConfig&) const = default;
};

std::string to_json(const FilterbankSpec& spec);
FilterbankSpec filterbank_spec_from_json(const std::string& text);

}  // namespace texstat
