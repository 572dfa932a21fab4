// pipeline.cpp
#include "mcse/pipeline.hpp"

#include <filesystem>
#include <iostream>
#include <sstream>

#include "mcse/binkernel.hpp"
#include "mcse/io.hpp"
#include "mcse/masknet.hpp"
#include "mcse/metrics.hpp"
#include "mcse/training.hpp"
#include "mcse/wav_io.hpp"

namespace fs = std::filesystem;

namespace mcse {

PsdMode psd_mode_from_name(const std::string& name) {
    if (name == "block") return PsdMode::block;
    if (name == "recursive") return PsdMode::recursive;
    if (name == "oja") return PsdMode::oja;
    throw ConfigError("unknown psd mode: " + name);
}

BeamformerKind beamformer_from_name(const std::string& name) {
    if (name == "mvdr") return BeamformerKind::mvdr;
    if (name == "gev-ban") return BeamformerKind::gev_ban;
    if (name == "gev-pan") return BeamformerKind::gev_pan;
    throw ConfigError("unknown beamformer: " + name);
}

std::string beamformer_name(BeamformerKind kind) {
    switch (kind) {
        case BeamformerKind::mvdr: return "mvdr";
        case BeamformerKind::gev_ban: return "gev-ban";
        case BeamformerKind::gev_pan: return "gev-pan";
    }
    return "mvdr";
}

ComplexSpectrogram enhance(const ComplexSpectrogram& z, const MaskTriple& masks,
                           BeamformerKind kind, PsdMode psd_mode, std::size_t window_frames) {
    if (masks.bins != z.bins() || masks.frames != z.frames())
        throw std::invalid_argument("mask shape does not match spectrogram");
    const std::size_t bins = z.bins();
    const std::size_t num_frames = z.frames();
    const std::vector<double> speech = masks.class_plane(0);
    const std::vector<double> noise = masks.class_plane(1);

    ComplexSpectrogram y(1, bins, num_frames, z.config());

    if (psd_mode == PsdMode::block) {
        const std::size_t window = window_frames == 0 ? num_frames : window_frames;
        BeamformerWeights weights;
        weights.kind = kind;
        weights.w.resize(bins);
        weights.postfilter_gain.assign(bins, 1.0);
        for (std::size_t k = 0; k < bins; ++k) {
            CMatrix phi_ss = psd_block_bin(z, k, speech, num_frames / 2, window);
            CMatrix phi_nn = psd_block_bin(z, k, noise, num_frames / 2, window);
            if (kind == BeamformerKind::mvdr) {
                weights.w[k] = mvdr_weights(phi_nn, steering_vector(phi_ss));
            } else {
                weights.w[k] = gev_weights(phi_ss, phi_nn).w;
                weights.postfilter_gain[k] = kind == BeamformerKind::gev_ban
                                                 ? postfilter_ban(weights.w[k], phi_nn)
                                                 : postfilter_pan(weights.w[k], z, k);
            }
        }
        return filter_and_sum(weights, z);
    }

    // recursive estimation, weights refreshed every frame
    const std::size_t window = window_frames == 0 ? 32 : window_frames;
    const std::size_t init_frame = std::min<std::size_t>(window / 2, num_frames - 1);
    for (std::size_t k = 0; k < bins; ++k) {
        CMatrix phi_ss = psd_block_bin(z, k, speech, init_frame, window);
        CMatrix phi_nn = psd_block_bin(z, k, noise, init_frame, window);
        OjaState gev_state = OjaState::init(steering_vector(diag_load(phi_ss, 1e-3)));
        OjaState ev_state = gev_state;

        std::vector<CVector> w_per_frame(num_frames);
        for (std::size_t t = 0; t < num_frames; ++t) {
            CVector zv = z.bin(k, t);
            phi_ss = psd_recursive(phi_ss, zv, speech[k * num_frames + t]);
            phi_nn = psd_recursive(phi_nn, zv, noise[k * num_frames + t]);
            CVector w;
            if (psd_mode == PsdMode::oja) {
                if (kind == BeamformerKind::mvdr)
                    w = mvdr_weights(phi_nn, oja_step_ev(ev_state, phi_ss));
                else
                    w = oja_step(gev_state, phi_ss, diag_load(phi_nn, kDiagLoadDelta));
            } else {
                if (kind == BeamformerKind::mvdr)
                    w = mvdr_weights(phi_nn, steering_vector(phi_ss));
                else
                    w = gev_weights(phi_ss, phi_nn).w;
            }
            w_per_frame[t] = w;
            double gain = 1.0;
            if (kind == BeamformerKind::gev_ban) gain = postfilter_ban(w, phi_nn);
            y.at(0, k, t) = gain * vdot(w, zv);
        }
        if (kind == BeamformerKind::gev_pan) {
            // power-average gain over the utterance with the applied weights
            double mean_in = 0.0, mean_out = 0.0;
            for (std::size_t t = 0; t < num_frames; ++t) {
                CVector zv = z.bin(k, t);
                double n = norm2(zv);
                mean_in += n * n;
                mean_out += std::norm(vdot(w_per_frame[t], zv));
            }
            double gain = mean_out > 0.0
                              ? std::sqrt(mean_in / (static_cast<double>(z.channels()) * mean_out))
                              : 1.0;
            for (std::size_t t = 0; t < num_frames; ++t) y.at(0, k, t) *= gain;
        }
    }
    return y;
}

namespace {

StftConfig stft_from_config(const Config& cfg) {
    StftConfig stft_cfg;
    stft_cfg.fft_size = static_cast<std::size_t>(cfg.get_int("fft_size", 1024));
    stft_cfg.hop = static_cast<std::size_t>(cfg.get_int("hop", stft_cfg.fft_size / 4));
    stft_cfg.sample_rate = cfg.get_double("sample_rate", 16000.0);
    try {
        stft_cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return stft_cfg;
}

void write_manifest(const std::string& dir, const std::string& command, const Config& cfg,
                    const std::vector<std::string>& outputs) {
    std::ostringstream out;
    out << "command=" << command << "\n";
    out << "version=1\n";
    out << "seed=" << cfg.get_seed("seed", 1) << "\n";
    char hash[32];
    std::snprintf(hash, sizeof(hash), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(cfg.canonical())));
    out << "config_hash=" << hash << "\n";
    for (const std::string& f : outputs) out << "output=" << f << "\n";
    write_text_file(dir + "/manifest.txt", out.str());
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

MaskTriple masks_for_enhance(const Config& cfg, const ComplexSpectrogram& z,
                             const std::string& source) {
    if (source == "oracle") return load_mask(cfg.require_str("masks"));
    if (source == "uniform") return MaskTriple::uniform(z.bins(), z.frames());
    if (source == "net") {
        MaskNetParams params = load_weights(cfg.require_str("weights"));
        std::string requested = cfg.get_str("precision", params.precision.name());
        if (precision_from_name(requested).kind != params.precision.kind)
            throw ConfigError("precision mismatch: weight file is " + params.precision.name() +
                              ", requested " + requested);
        return mask_net_forward(params, extract_features(z));
    }
    throw ConfigError("unknown mask source: " + source);
}

}  // namespace

int cmd_simulate(const Config& cfg) {
    ScenarioConfig sc;
    sc.id = static_cast<int>(cfg.get_int("scenario", 2));
    if (sc.id < 1 || sc.id > 5) throw ConfigError("invalid scenario id");
    sc.seed = cfg.get_seed("seed", 1);
    sc.duration = cfg.get_double("duration", 4.0);
    sc.stft = stft_from_config(cfg);
    sc.room.dimensions = {cfg.get_double("room_x", 6.0), cfg.get_double("room_y", 5.0),
                          cfg.get_double("room_z", 2.5)};
    sc.room.reflection_coefficient = cfg.get_double("beta", 0.85);
    sc.room.max_image_order = static_cast<int>(cfg.get_int("order", 3));
    sc.num_mics = static_cast<std::size_t>(cfg.get_int("mics", 6));
    sc.array_diameter = cfg.get_double("array_diameter", 0.086);
    sc.noise_gain = cfg.get_double("noise_gain", 1.0);

    const std::string out_dir = cfg.get_str("out_dir", "dataset");
    fs::create_directories(out_dir);

    ScenarioData data = build_scenario(sc);
    write_wav(out_dir + "/mixture.wav", data.mixture_time, sc.stft.sample_rate);
    write_wav(out_dir + "/clean.wav", istft(data.clean), sc.stft.sample_rate);
    write_wav(out_dir + "/interference.wav", istft(data.interference), sc.stft.sample_rate);
    save_mask(out_dir + "/masks.mbmk", data.masks);
    write_manifest(out_dir, "simulate", cfg,
                   {"mixture.wav", "clean.wav", "interference.wav", "masks.mbmk"});
    std::cout << "simulated scenario " << sc.id << " -> " << out_dir << "\n";
    return 0;
}

int cmd_enhance(const Config& cfg) {
    StftConfig stft_cfg = stft_from_config(cfg);
    WavData wav = read_wav(cfg.require_str("input"));
    stft_cfg.sample_rate = wav.sample_rate;
    ComplexSpectrogram z = stft(wav.channels, stft_cfg);

    const std::string source = cfg.get_str("mask_source", "oracle");
    MaskTriple masks = masks_for_enhance(cfg, z, source);
    if (masks.bins != z.bins() || masks.frames != z.frames())
        throw ConfigError("mask file shape does not match the input");

    BeamformerKind kind = beamformer_from_name(cfg.get_str("beamformer", "gev-ban"));
    PsdMode mode = psd_mode_from_name(cfg.get_str("psd", "block"));
    std::size_t window = static_cast<std::size_t>(cfg.get_int("L", 0));

    ComplexSpectrogram y = enhance(z, masks, kind, mode, window);
    const std::string out_path = cfg.get_str("out", "enhanced.wav");
    write_wav(out_path, istft(y), stft_cfg.sample_rate);

    std::string csv = eval_csv_header();
    if (cfg.has("masks")) {
        MaskTriple oracle = load_mask(cfg.require_str("masks"));
        EvalReport report;
        report.scenario = cfg.get_str("scenario", "-");
        report.beamformer = beamformer_name(kind);
        report.precision = cfg.get_str("precision", "f32");
        report.psd_mode = cfg.get_str("psd", "block");
        report.snr = delta_snr(y, z, oracle);
        report.masks = mask_scores(masks, oracle);
        csv += eval_csv_row(report);
        std::cout << "delta_snr_db=" << report.snr.delta_snr_db << "\n";
    }
    const std::string report_path = cfg.get_str("report", "");
    if (!report_path.empty()) write_text_file(report_path, csv);

    fs::path out_parent = fs::path(out_path).parent_path();
    write_manifest(out_parent.empty() ? "." : out_parent.string(), "enhance", cfg,
                   {fs::path(out_path).filename().string()});
    return 0;
}

int cmd_train(const Config& cfg) {
    StftConfig stft_cfg = stft_from_config(cfg);
    auto load_set = [&](const std::string& key) {
        std::vector<Utterance> set;
        for (const std::string& dir : split_list(cfg.get_str(key, ""))) {
            WavData wav = read_wav(dir + "/mixture.wav");
            StftConfig sc = stft_cfg;
            sc.sample_rate = wav.sample_rate;
            Utterance utt;
            utt.features = extract_features(stft(wav.channels, sc));
            utt.target = load_mask(dir + "/masks.mbmk");
            if (utt.target.bins != utt.features.bins || utt.target.frames != utt.features.frames)
                throw ConfigError("mask/feature shape mismatch in " + dir);
            set.push_back(std::move(utt));
        }
        return set;
    };

    Dataset data;
    data.train = load_set("train_dirs");
    data.validation = load_set("val_dirs");
    if (data.train.empty()) throw ConfigError("train_dirs is empty");

    TrainConfig tc;
    tc.epochs = static_cast<std::size_t>(cfg.get_int("epochs", 200));
    tc.validation_period = static_cast<std::size_t>(cfg.get_int("validation_period", 20));
    tc.patience = static_cast<int>(cfg.get_int("patience", 3));
    tc.learn_rate = cfg.get_double("learn_rate", 1e-3);
    tc.precision = precision_from_name(cfg.get_str("precision", "f32"));
    tc.seed = cfg.get_seed("seed", 1);

    TrainResult result = train(tc, data);
    const std::string weights_path = cfg.get_str("weights_out", "weights.mbnw");
    save_weights(weights_path, result.best_view);
    const std::string curve_path = cfg.get_str("curve_out", "loss_curve.csv");
    write_text_file(curve_path, loss_curve_csv(result.curve));

    fs::path out_parent = fs::path(weights_path).parent_path();
    write_manifest(out_parent.empty() ? "." : out_parent.string(), "train", cfg,
                   {fs::path(weights_path).filename().string(),
                    fs::path(curve_path).filename().string()});
    std::cout << "best validation loss " << result.best_val << " at epoch " << result.best_epoch
              << "\n";
    return 0;
}

int cmd_bench(const Config& cfg) {
    std::vector<std::size_t> sizes;
    for (const std::string& s : split_list(cfg.get_str("sizes", "256,512,1024")))
        sizes.push_back(static_cast<std::size_t>(std::stoull(s)));
    int reps = static_cast<int>(cfg.get_int("reps", 5));
    if (reps <= 0) throw ConfigError("reps must be positive");

    std::vector<BenchRow> rows = bench_matmul(sizes, reps, cfg.get_seed("seed", 1));
    std::string csv = bench_csv(rows);
    std::cout << csv;
    const std::string out = cfg.get_str("out", "");
    if (!out.empty()) {
        write_text_file(out, csv);
        fs::path parent = fs::path(out).parent_path();
        write_manifest(parent.empty() ? "." : parent.string(), "bench", cfg,
                       {fs::path(out).filename().string()});
    }
    return 0;
}

int cmd_report(const Config& cfg) {
    std::size_t mics = static_cast<std::size_t>(cfg.get_int("mics", 6));
    std::size_t bins = static_cast<std::size_t>(cfg.get_int("bins", 513));
    std::size_t frames = static_cast<std::size_t>(cfg.get_int("frames", 500));
    std::string table = complexity_table(complexity_report(mics, bins, frames));
    std::cout << table;
    const std::string out = cfg.get_str("out", "");
    if (!out.empty()) write_text_file(out, table);
    return 0;
}

int cmd_evaluate(const Config& cfg) {
    StftConfig stft_cfg = stft_from_config(cfg);
    WavData enhanced = read_wav(cfg.require_str("enhanced"));
    WavData mixture = read_wav(cfg.require_str("input"));
    stft_cfg.sample_rate = mixture.sample_rate;
    ComplexSpectrogram y = stft(enhanced.channels, stft_cfg);
    ComplexSpectrogram z = stft(mixture.channels, stft_cfg);
    MaskTriple oracle = load_mask(cfg.require_str("masks"));

    std::size_t frames = std::min(y.frames(), z.frames());
    if (oracle.frames != frames || y.channels() != 1)
        throw ConfigError("evaluate inputs do not line up");

    EvalReport report;
    report.scenario = cfg.get_str("scenario", "-");
    report.beamformer = cfg.get_str("beamformer", "-");
    report.precision = cfg.get_str("precision", "-");
    report.psd_mode = cfg.get_str("psd", "-");
    report.snr = delta_snr(y, z, oracle);
    std::string csv = eval_csv_header() + eval_csv_row(report);
    std::cout << csv;
    const std::string out = cfg.get_str("out", "");
    if (!out.empty()) write_text_file(out, csv);
    return 0;
}

}  // namespace mcse
