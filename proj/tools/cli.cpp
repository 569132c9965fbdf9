#include "cli.hpp"

#include <texstat/audio_io.hpp>
#include <texstat/config.hpp>
#include <texstat/error.hpp>
#include <texstat/evaluation.hpp>
#include <texstat/hash.hpp>
#include <texstat/parallel.hpp>
#include <texstat/synthetic.hpp>
#include <texstat/texenv.hpp>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace texstat::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string config_path;
    bool json = false;
    bool serial = false;
};

GlobalConfig load_config(const Options& opt) {
    return opt.config_path.empty() ? GlobalConfig{} : GlobalConfig::load(opt.config_path);
}

Signal load_audio(const fs::path& path, const GlobalConfig& cfg) {
    auto x = read_wav(path);
    if (x.sample_rate != cfg.sample_rate) {
        throw Error(ErrorCode::config_mismatch, path.string() + ": sample rate " +
                                                    std::to_string(static_cast<long>(x.sample_rate)) +
                                                    " Hz, analysis requires " +
                                                    std::to_string(static_cast<long>(cfg.sample_rate)) +
                                                    " Hz (resample the file first)");
    }
    require_finite(x.view(), path.string().c_str());
    return x;
}

std::vector<double> parse_fractions(const std::string& text, const char* what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            const double v = std::stod(item, &used);
            if (used != item.size()) throw std::invalid_argument(item);
            out.push_back(v);
        } catch (const std::exception&) {
            throw UsageError(std::string("--") + what + ": cannot parse '" + item + "' as a number");
        }
    }
    if (out.empty()) throw UsageError(std::string("--") + what + ": empty list");
    return out;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream f(path);
    if (!f) throw Error(ErrorCode::io_error, path.string() + ": cannot open for writing");
    f << text << '\n';
    if (!f) throw Error(ErrorCode::io_error, path.string() + ": write failed");
}

// Frames of every wav file in dir, file order then time order.
std::vector<Signal> load_corpus(const fs::path& dir, const GlobalConfig& cfg, std::size_t frame, std::size_t hop,
                                bool parallel) {
    const auto files = list_wav_files(dir);
    if (files.empty()) throw Error(ErrorCode::not_found, dir.string() + ": no .wav files");
    std::vector<std::vector<Signal>> per_file(files.size());
    parallel_for(
        files.size(), [&](std::size_t i) { per_file[i] = segment(load_audio(files[i], cfg), frame, hop); }, parallel);
    std::vector<Signal> frames;
    for (auto& f : per_file) {
        for (auto& s : f) frames.push_back(std::move(s));
    }
    if (frames.empty()) {
        throw Error(ErrorCode::corrupt_file, dir.string() + ": every file is shorter than the " +
                                                 std::to_string(frame) + "-sample frame");
    }
    return frames;
}

int cmd_analyze(const Options& opt, const std::string& input, const std::string& out_path, std::size_t frame,
                std::ostream& out) {
    const auto base = load_config(opt);
    auto x = load_audio(input, base);
    const std::size_t n = frame == 0 ? x.size() : frame;
    if (x.size() < n) {
        throw Error(ErrorCode::length_mismatch, input + ": " + std::to_string(x.size()) +
                                                    " samples, shorter than the " + std::to_string(n) +
                                                    "-sample frame");
    }
    x.samples.resize(n);
    const auto cfg = base.with_frame(n);
    const StatsAnalyzer analyzer(cfg.stats);
    const auto stats = analyzer(x);
    const auto text = to_json(stats, cfg.stats);
    if (!out_path.empty()) write_text_file(out_path, text);
    if (opt.json || out_path.empty()) {
        out << text << '\n';
    } else {
        out << "wrote " << out_path << " (" << cfg.stats.statistic_count() << " statistics, config "
            << stats.config_hash << ")\n";
    }
    return kExitOk;
}

int cmd_compare(const Options& opt, const std::string& a_path, const std::string& b_path, std::ostream& out) {
    const auto base = load_config(opt);
    auto a = load_audio(a_path, base);
    auto b = load_audio(b_path, base);
    const std::size_t n = std::min(a.size(), b.size());
    a.samples.resize(n);
    b.samples.resize(n);
    const auto cfg = base.with_frame(n);
    const TexStatMetric metric(cfg.metric());
    const double ts = metric(a.view(), b.view());
    const double mss = mss_loss(a.view(), b.view());
    if (opt.json) {
        json j{{"version", 1},        {"kind", "compare"}, {"config_hash", metric.analyzer().config_hash()},
               {"frame_length", n},   {"texstat", ts},     {"mss", mss}};
        out << j.dump(2) << '\n';
    } else {
        out << "frame   " << n << " samples\n";
        out << "texstat " << fmt(ts) << '\n';
        out << "mss     " << fmt(mss) << '\n';
    }
    return kExitOk;
}

int cmd_resynth(const Options& opt, const std::string& in_path, const std::string& out_path,
                std::optional<std::size_t> n_params, std::optional<std::uint64_t> seed, const std::string& encoding,
                std::ostream& out) {
    const auto base = load_config(opt);
    const auto x = load_audio(in_path, base);
    const auto cfg = base.with_frame(x.size());
    const std::size_t k = n_params.value_or(cfg.n_params);
    const std::uint64_t s = seed.value_or(cfg.rng_seed);
    auto [y, report] = resynthesize(x, cfg.metric(), k, s, cfg.nonnegative_envelopes);
    write_wav(out_path, y, encoding == "pcm16" ? WavEncoding::pcm16 : WavEncoding::float32);
    if (opt.json) {
        json j{{"version", 1},
               {"kind", "resynthesis"},
               {"config_hash", report.config_hash},
               {"fb_hash", report.fb_hash},
               {"n_params", report.n_params},
               {"rng_seed", report.rng_seed},
               {"length", y.size()},
               {"texstat", report.texstat},
               {"mss", report.mss},
               {"output", out_path}};
        out << j.dump(2) << '\n';
    } else {
        out << "wrote   " << out_path << " (" << y.size() << " samples, n_params " << k << ", seed " << s << ")\n";
        out << "texstat " << fmt(report.texstat) << '\n';
        out << "mss     " << fmt(report.mss) << '\n';
    }
    return kExitOk;
}

int cmd_fad(const Options& opt, const std::string& dir_a, const std::string& dir_b, std::size_t frame, std::size_t hop,
            std::ostream& out) {
    const auto base = load_config(opt);
    const std::size_t n = frame == 0 ? base.stats.frame_length : frame;
    const std::size_t h = hop == 0 ? n : hop;
    const auto cfg = base.with_frame(n);
    const bool parallel = !opt.serial;
    const auto a = embed_corpus(load_corpus(dir_a, cfg, n, h, parallel), cfg.stats, cfg.fad_mask, parallel);
    const auto b = embed_corpus(load_corpus(dir_b, cfg, n, h, parallel), cfg.stats, cfg.fad_mask, parallel);
    const double d = frechet_distance(a, b);
    if (opt.json) {
        json j{{"version", 1},         {"kind", "fad"},        {"config_hash", a.config_hash},
               {"mask", a.mask.to_string()}, {"dim", a.dim},   {"frame_length", n},
               {"hop", h},             {"rows_a", a.rows},     {"rows_b", b.rows},
               {"fad", d}};
        out << j.dump(2) << '\n';
    } else {
        out << "frames  " << a.rows << " vs " << b.rows << " (frame " << n << ", hop " << h << ")\n";
        out << "blocks  " << a.mask.to_string() << " (dim " << a.dim << ")\n";
        out << "fad     " << fmt(d) << '\n';
    }
    return kExitOk;
}

int cmd_robustness(const Options& opt, const std::string& dir, const std::string& shifts, const std::string& noise,
                   std::size_t frame, std::ostream& out) {
    const auto shift_fracs = parse_fractions(shifts, "shifts");
    const auto noise_fracs = parse_fractions(noise, "noise");
    const auto base = load_config(opt);
    const std::size_t n = frame == 0 ? static_cast<std::size_t>(base.sample_rate) : frame;
    const auto cfg = base.with_frame(n);
    const auto frames = load_corpus(dir, cfg, n, n, !opt.serial);
    const auto report = robustness_experiment(frames, shift_fracs, noise_fracs, cfg.metric(), cfg.rng_seed, !opt.serial);
    out << (opt.json ? report.to_json() : report.to_text()) << (opt.json ? "\n" : "");
    return kExitOk;
}

int cmd_bench(const Options& opt, std::size_t batch, std::size_t length, std::size_t repeats, bool parallel,
              std::ostream& out) {
    const auto cfg = load_config(opt);
    const auto report = benchmark(batch, length, cfg.metric(), repeats, parallel, cfg.rng_seed);
    out << (opt.json ? report.to_json() : report.to_text()) << (opt.json ? "\n" : "");
    return kExitOk;
}

int cmd_seed_gen(const Options& opt, const std::string& out_path, const std::string& fb_config, std::uint64_t seed,
                 std::size_t length, std::ostream& out) {
    FilterbankSpec spec;
    std::size_t n = length;
    {
        std::ifstream in(fb_config);
        if (!in) throw Error(ErrorCode::not_found, fb_config + ": cannot open filterbank config");
        std::stringstream ss;
        ss << in.rdbuf();
        const auto j = json::parse(ss.str(), nullptr, false);
        if (j.is_discarded()) throw Error(ErrorCode::invalid_config, fb_config + ": malformed JSON");
        if (j.contains("stats") || j.contains("version")) {
            const auto cfg = GlobalConfig::from_json(ss.str());
            spec = cfg.stats.cochlear;
            if (n == 0) n = cfg.stats.frame_length;
        } else {
            spec = filterbank_spec_from_json(ss.str());
        }
    }
    if (n == 0) n = GlobalConfig{}.stats.frame_length;
    const auto fb = make_filterbank(spec, n);
    const auto s = generate_seed(fb, n, seed);

    json checksums = json::array();
    for (const auto& band : s.bands) checksums.push_back(Fnv1a().update(std::span<const double>(band)).hex());
    json j{{"version", 1},
           {"kind", "seed"},
           {"generator", "mt19937_64, 53-bit uniforms, Box-Muller"},
           {"rng_seed", seed},
           {"length", n},
           {"sample_rate", spec.sample_rate},
           {"fb_hash", s.fb_hash},
           {"filterbank", json::parse(to_json(spec))},
           {"band_checksums", checksums}};
    write_text_file(out_path, j.dump(2));
    if (opt.json) {
        out << j.dump(2) << '\n';
    } else {
        out << "wrote " << out_path << " (" << s.size() << " bands x " << n << " samples, fb " << s.fb_hash << ")\n";
    }
    return kExitOk;
}

int cmd_calibrate(const Options& opt, const std::string& dir, std::size_t per_kind, std::size_t frame,
                  std::ostream& out) {
    const auto base = load_config(opt);
    const std::size_t n = frame == 0 ? base.stats.frame_length : frame;
    const auto cfg = base.with_frame(n);
    std::vector<Signal> frames;
    std::string source;
    if (dir.empty()) {
        frames = synthetic::mixed_corpus(per_kind, n, cfg.sample_rate, cfg.rng_seed + 7919);
        source = "synthetic x" + std::to_string(per_kind);
    } else {
        frames = load_corpus(dir, cfg, n, n, !opt.serial);
        source = dir;
    }
    const auto alpha = calibrate_alpha(frames, cfg.stats);
    if (opt.json) {
        json j{{"version", 1}, {"kind", "alpha_calibration"}, {"source", source}, {"frames", frames.size()},
               {"alpha", alpha}};
        out << j.dump(2) << '\n';
    } else {
        out << "frames " << frames.size() << " from " << source << "\nalpha ";
        for (std::size_t i = 0; i < alpha.size(); ++i) out << (i ? ", " : "") << fmt(alpha[i]);
        out << '\n';
    }
    return kExitOk;
}

int cmd_synth_corpus(const Options& opt, const std::string& dir, const std::string& kind, std::size_t count,
                     std::size_t length, std::uint64_t seed, std::ostream& out) {
    const auto cfg = load_config(opt);
    fs::create_directories(dir);
    std::vector<synthetic::Texture> kinds;
    if (kind == "all") {
        kinds.assign(std::begin(synthetic::kAllTextures), std::end(synthetic::kAllTextures));
    } else {
        kinds.push_back(synthetic::texture_from_name(kind));
    }
    std::size_t written = 0;
    std::uint64_t s = seed;
    for (auto t : kinds) {
        for (std::size_t i = 0; i < count; ++i) {
            char name[96];
            std::snprintf(name, sizeof name, "%s_%03zu.wav", std::string(synthetic::name(t)).c_str(), i);
            write_wav(fs::path(dir) / name, synthetic::make_texture(t, length, cfg.sample_rate, s++));
            ++written;
        }
    }
    out << "wrote " << written << " files to " << dir << '\n';
    return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Sound-texture statistics: analysis, comparison, resynthesis and evaluation", "texstat"};
    app.require_subcommand(1);
    Options opt;
    app.add_option("--config", opt.config_path, "JSON config (defaults apply to missing keys)");
    app.add_flag("--json", opt.json, "Emit reports as JSON");
    app.add_flag("--serial", opt.serial, "Disable parallel processing of corpora");

    std::string in_a, in_b, out_path, encoding = "float32", shifts = "0.1,0.3,0.5", noise = "0.1,0.3,0.5", fb_config,
                                      kind = "all", dir;
    std::size_t frame = 0, hop = 0, batch = 32, length = 65536, repeats = 10, count = 4, per_kind = 8;
    std::optional<std::size_t> n_params;
    std::optional<std::uint64_t> seed;
    std::uint64_t seed_value = 0;
    bool parallel = false;

    auto* analyze = app.add_subcommand("analyze", "Summary statistics of a file as JSON");
    analyze->add_option("input", in_a, "Input WAV")->required();
    analyze->add_option("--out", out_path, "Write the statistics JSON here");
    analyze->add_option("--frame", frame, "Analyze the first N samples (default: whole file)");

    auto* compare = app.add_subcommand("compare", "TexStat and MSS losses between two files");
    compare->add_option("a", in_a, "First WAV")->required();
    compare->add_option("b", in_b, "Second WAV")->required();

    auto* resynth = app.add_subcommand("resynth", "Envelope-parameter resynthesis with the TexEnv synthesizer");
    resynth->add_option("input", in_a, "Input WAV")->required();
    resynth->add_option("output", out_path, "Output WAV")->required();
    resynth->add_option("--n-params", n_params, "Envelope parameters per band");
    resynth->add_option("--seed", seed, "Seed noise generator seed");
    resynth->add_option("--encoding", encoding, "Output encoding")->check(CLI::IsMember({"float32", "pcm16"}));

    auto* fad = app.add_subcommand("fad", "Frechet distance between two corpora of summary statistics");
    fad->add_option("dir_a", in_a, "First corpus directory")->required();
    fad->add_option("dir_b", in_b, "Second corpus directory")->required();
    fad->add_option("--frame", frame, "Frame length in samples (default: config frame_length)");
    fad->add_option("--hop", hop, "Hop in samples (default: frame)");

    auto* robust = app.add_subcommand("robustness", "Loss response to time shifts and added noise");
    robust->add_option("dir", in_a, "Corpus directory")->required();
    robust->add_option("--shifts", shifts, "Comma-separated shift fractions");
    robust->add_option("--noise", noise, "Comma-separated noise peak fractions");
    robust->add_option("--frame", frame, "Frame length in samples (default: one second)");

    auto* bench = app.add_subcommand("bench", "Forward-pass timing of TexStat, MSS, MSE and MAE");
    bench->add_option("--batch", batch, "Signals per batch")->check(CLI::PositiveNumber);
    bench->add_option("--length", length, "Samples per signal")->check(CLI::Range(std::size_t{64}, std::size_t{1} << 24));
    bench->add_option("--repeats", repeats, "Timed repetitions (>= 3)")->check(CLI::Range(std::size_t{3}, std::size_t{100000}));
    bench->add_flag("--parallel", parallel, "Evaluate the batch on all cores");

    auto* seed_gen = app.add_subcommand("seed-gen", "Generate a seed and record its provenance");
    seed_gen->add_option("output", out_path, "Provenance JSON to write")->required();
    seed_gen->add_option("--fb-config", fb_config, "Filterbank spec or full config JSON")->required();
    seed_gen->add_option("--seed", seed_value, "Noise generator seed")->required();
    seed_gen->add_option("--length", length, "Seed length (default: config frame_length)");

    auto* calibrate = app.add_subcommand("calibrate", "Calibrate the moment weights alpha on a corpus");
    calibrate->add_option("--dir", dir, "Corpus directory (default: bundled synthetic textures)");
    calibrate->add_option("--per-kind", per_kind, "Synthetic textures per kind")->check(CLI::PositiveNumber);
    calibrate->add_option("--frame", frame, "Frame length (default: config frame_length)");

    auto* synth = app.add_subcommand("synth-corpus", "Write procedural texture WAV files");
    synth->add_option("dir", dir, "Output directory")->required();
    synth->add_option("--kind", kind, "Texture kind or 'all'");
    synth->add_option("--count", count, "Files per kind")->check(CLI::PositiveNumber);
    synth->add_option("--length", length, "Samples per file");
    synth->add_option("--seed", seed_value, "First generator seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitUsage;
    }

    const bool length_given = seed_gen->count("--length") > 0;
    try {
        if (*analyze) return cmd_analyze(opt, in_a, out_path, frame, out);
        if (*compare) return cmd_compare(opt, in_a, in_b, out);
        if (*resynth) return cmd_resynth(opt, in_a, out_path, n_params, seed, encoding, out);
        if (*fad) return cmd_fad(opt, in_a, in_b, frame, hop, out);
        if (*robust) return cmd_robustness(opt, in_a, shifts, noise, frame, out);
        if (*bench) return cmd_bench(opt, batch, length, repeats, parallel, out);
        if (*seed_gen) return cmd_seed_gen(opt, out_path, fb_config, seed_value, length_given ? length : 0, out);
        if (*calibrate) return cmd_calibrate(opt, dir, per_kind, frame, out);
        if (*synth) return cmd_synth_corpus(opt, dir, kind, count, length, seed_value, out);
    } catch (const UsageError& e) {
        err << "texstat: " << e.what() << '\n';
        return kExitUsage;
    } catch (const Error& e) {
        err << "texstat: " << e.what() << '\n';
        return e.code() == ErrorCode::invalid_fraction ? kExitUsage : kExitData;
    } catch (const std::exception& e) {
        err << "texstat: " << e.what() << '\n';
        return kExitData;
    }
    return kExitUsage;
}

}  // namespace texstat::cli
