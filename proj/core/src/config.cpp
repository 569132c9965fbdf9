#include "texstat/config.hpp"

#include "json_internal.hpp"
#include "texstat/error.hpp"
#include "texstat/hash.hpp"

#include <fstream>
#include <sstream>

namespace texstat {

namespace detail {

json to_json_value(const FilterbankSpec& spec) {
    return {{"kind", spec.kind == FilterbankKind::erb ? "erb" : "log"},
            {"n_filters", spec.n_filters},
            {"sample_rate", spec.sample_rate},
            {"f_lo", spec.f_lo},
            {"f_hi", spec.f_hi}};
}

FilterbankSpec filterbank_spec_from_json(const json& j, const FilterbankSpec& defaults) {
    FilterbankSpec spec = defaults;
    if (j.contains("kind")) {
        const auto kind = j.at("kind").get<std::string>();
        if (kind == "erb") {
            spec.kind = FilterbankKind::erb;
        } else if (kind == "log") {
            spec.kind = FilterbankKind::log;
        } else {
            throw Error(ErrorCode::invalid_config, "unknown filterbank kind '" + kind + "'");
        }
    }
    spec.n_filters = j.value("n_filters", spec.n_filters);
    spec.sample_rate = j.value("sample_rate", spec.sample_rate);
    spec.f_lo = j.value("f_lo", spec.f_lo);
    spec.f_hi = j.value("f_hi", spec.kind == FilterbankKind::erb && !j.contains("f_hi") ? spec.sample_rate / 2.0
                                                                                          : spec.f_hi);
    return spec;
}

FilterbankSpec filterbank_spec_from_json(const json& j) {
    return filterbank_spec_from_json(j, FilterbankSpec::cochlear_default());
}

json to_json_value(const StatsConfig& cfg) {
    return {{"cochlear", to_json_value(cfg.cochlear)},
            {"modulation", to_json_value(cfg.modulation)},
            {"n_moments", cfg.n_moments},
            {"alpha", cfg.alpha},
            {"frame_length", cfg.frame_length},
            {"envelope_decimation", cfg.envelope_decimation},
            {"normalize_mean_by_rms", cfg.normalize_mean_by_rms}};
}

namespace {

std::vector<double> default_alpha_for(std::size_t n_moments) {
    auto alpha = StatsConfig::default_alpha();
    alpha.resize(n_moments, alpha.back());
    return alpha;
}

StatsConfig stats_config_from_json(const json& j, double sample_rate) {
    StatsConfig cfg;
    cfg.cochlear = FilterbankSpec::cochlear_default(sample_rate);
    cfg.modulation = FilterbankSpec::modulation_default(sample_rate);
    if (j.contains("cochlear")) cfg.cochlear = filterbank_spec_from_json(j.at("cochlear"), cfg.cochlear);
    if (j.contains("modulation")) cfg.modulation = filterbank_spec_from_json(j.at("modulation"), cfg.modulation);
    cfg.n_moments = j.value("n_moments", cfg.n_moments);
    cfg.alpha = j.contains("alpha") ? j.at("alpha").get<std::vector<double>>() : default_alpha_for(cfg.n_moments);
    cfg.frame_length = j.value("frame_length", cfg.frame_length);
    cfg.envelope_decimation = j.value("envelope_decimation", cfg.envelope_decimation);
    cfg.normalize_mean_by_rms = j.value("normalize_mean_by_rms", cfg.normalize_mean_by_rms);
    return cfg;
}

}  // namespace

StatsConfig stats_config_from_json(const json& j) { return stats_config_from_json(j, 44100.0); }

json to_json_value(const BlockMask& mask) {
    json arr = json::array();
    for (std::size_t i = 0; i < 5; ++i) {
        if (mask.enabled[i]) arr.push_back("s" + std::to_string(i + 1));
    }
    return arr;
}

BlockMask block_mask_from_json(const json& j) {
    std::string joined;
    for (const auto& item : j) {
        if (!joined.empty()) joined += ',';
        joined += item.get<std::string>();
    }
    return BlockMask::parse(joined);
}

json to_json_value(const GlobalConfig& cfg) {
    return {{"version", GlobalConfig::kVersion},
            {"sample_rate", cfg.sample_rate},
            {"stats", to_json_value(cfg.stats)},
            {"beta", cfg.beta},
            {"fad_mask", to_json_value(cfg.fad_mask)},
            {"n_params", cfg.n_params},
            {"rng_seed", cfg.rng_seed},
            {"nonnegative_envelopes", cfg.nonnegative_envelopes}};
}

GlobalConfig global_config_from_json(const json& j) {
    GlobalConfig cfg;
    if (j.value("version", GlobalConfig::kVersion) != GlobalConfig::kVersion) {
        throw Error(ErrorCode::invalid_config, "unsupported config version");
    }
    cfg.sample_rate = j.value("sample_rate", cfg.sample_rate);
    cfg.stats = stats_config_from_json(j.contains("stats") ? j.at("stats") : json::object(), cfg.sample_rate);
    if (j.contains("beta")) {
        const auto beta = j.at("beta").get<std::vector<double>>();
        if (beta.size() != 5) throw Error(ErrorCode::invalid_config, "beta must have 5 entries");
        std::copy(beta.begin(), beta.end(), cfg.beta.begin());
    }
    if (j.contains("fad_mask")) cfg.fad_mask = block_mask_from_json(j.at("fad_mask"));
    cfg.n_params = j.value("n_params", cfg.n_params);
    cfg.rng_seed = j.value("rng_seed", cfg.rng_seed);
    cfg.nonnegative_envelopes = j.value("nonnegative_envelopes", cfg.nonnegative_envelopes);
    return cfg;
}

}  // namespace detail

void GlobalConfig::validate() const {
    if (!(sample_rate > 0.0)) throw Error(ErrorCode::invalid_config, "sample_rate must be positive");
    if (stats.cochlear.sample_rate != sample_rate) {
        throw Error(ErrorCode::invalid_config, "filterbank sample rates must equal the config sample_rate");
    }
    metric().validate();
    if (!fad_mask.any()) throw Error(ErrorCode::invalid_config, "fad_mask selects nothing");
    if (n_params < 1) throw Error(ErrorCode::invalid_config, "n_params must be at least 1");
}

std::string GlobalConfig::hash() const { return Fnv1a().update(detail::to_json_value(*this).dump()).hex(); }

std::string GlobalConfig::to_json() const { return detail::to_json_value(*this).dump(2); }

GlobalConfig GlobalConfig::from_json(const std::string& text) {
    try {
        auto cfg = detail::global_config_from_json(detail::json::parse(text));
        cfg.validate();
        return cfg;
    } catch (const detail::json::exception& e) {
        throw Error(ErrorCode::invalid_config, std::string("malformed config JSON: ") + e.what());
    }
}

GlobalConfig GlobalConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::not_found, path.string() + ": cannot open config");
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return from_json(ss.str());
    } catch (const Error& e) {
        throw Error(e.code(), path.string() + ": " + e.what());
    }
}

GlobalConfig GlobalConfig::with_frame(std::size_t frame_length) const {
    GlobalConfig out = *this;
    out.stats.frame_length = frame_length;
    return out;
}

std::string to_json(const FilterbankSpec& spec) { return detail::to_json_value(spec).dump(2); }

FilterbankSpec filterbank_spec_from_json(const std::string& text) {
    try {
        return detail::filterbank_spec_from_json(detail::json::parse(text));
    } catch (const detail::json::exception& e) {
        throw Error(ErrorCode::invalid_config, std::string("malformed filterbank JSON: ") + e.what());
    }
}

}  // namespace texstat
