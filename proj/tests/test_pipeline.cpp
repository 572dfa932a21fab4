// test_pipeline.cpp — CLI end-to-end checks: exit codes, determinism,
// manifest hashing and the enhance path.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "mcse/io.hpp"
#include "mcse/masknet.hpp"
#include "mcse/rng.hpp"

namespace fs = std::filesystem;
using namespace mcse;

namespace {

int run(const std::string& args) {
    std::string cmd = std::string(MCSE_BIN) + " " + args + " > /dev/null 2>&1";
    int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string run_capture(const std::string& args, const std::string& log) {
    std::string cmd = std::string(MCSE_BIN) + " " + args + " > " + log + " 2>&1";
    if (std::system(cmd.c_str()) == -1) return "";
    return read_text_file(log);
}

fs::path work_dir() {
    fs::path dir = fs::temp_directory_path() / "mcse_cli_test";
    fs::create_directories(dir);
    return dir;
}

std::string desk_sim_args(const fs::path& out, int scenario, int seed) {
    return "simulate --seed " + std::to_string(seed) + " --set scenario=" +
           std::to_string(scenario) + " out_dir=" + out.string() +
           " fft_size=256 mics=3 duration=0.7 order=1";
}

}  // namespace

TEST_CASE("report prints the reference totals") {
    fs::path dir = work_dir();
    std::string out = run_capture("report", (dir / "report.log").string());
    CHECK(out.find("590976") != std::string::npos);
    CHECK(out.find("6156") != std::string::npos);
    CHECK(out.find("526338") != std::string::npos);
    CHECK(out.find("8421408") != std::string::npos);
    CHECK(out.find("1579014") != std::string::npos);
    CHECK(out.find("11123892") != std::string::npos);
    CHECK(out.find("5562") != std::string::npos);
    CHECK(out.find("18.1") != std::string::npos);
    CHECK(out.find("73") != std::string::npos);
}

TEST_CASE("invalid scenario id exits with code 2") {
    fs::path dir = work_dir();
    CHECK(run(desk_sim_args(dir / "bad", 9, 1)) == 2);
}

TEST_CASE("simulate is deterministic and emits a manifest") {
    fs::path dir = work_dir();
    fs::remove_all(dir / "a");
    fs::remove_all(dir / "b");
    REQUIRE(run(desk_sim_args(dir / "a", 2, 7)) == 0);
    REQUIRE(run(desk_sim_args(dir / "b", 2, 7).append(" # same seed")) == 0);

    std::string wav_a = read_text_file((dir / "a" / "mixture.wav").string());
    std::string wav_b = read_text_file((dir / "b" / "mixture.wav").string());
    CHECK(wav_a == wav_b);

    std::string manifest = read_text_file((dir / "a" / "manifest.txt").string());
    CHECK(manifest.find("command=simulate") != std::string::npos);
    CHECK(manifest.find("config_hash=") != std::string::npos);
    CHECK(manifest.find("seed=7") != std::string::npos);

    // same config -> same manifest hash line
    std::string manifest_b = read_text_file((dir / "b" / "manifest.txt").string());
    auto hash_line = [](const std::string& m) {
        std::size_t pos = m.find("config_hash=");
        return m.substr(pos, m.find('\n', pos) - pos);
    };
    // out_dir differs, so hash differs; but rerunning into the same dir matches
    REQUIRE(run(desk_sim_args(dir / "a", 2, 7)) == 0);
    std::string manifest_a2 = read_text_file((dir / "a" / "manifest.txt").string());
    CHECK(hash_line(manifest) == hash_line(manifest_a2));
    (void)manifest_b;
}

TEST_CASE("enhance with oracle masks runs and is byte deterministic") {
    fs::path dir = work_dir();
    fs::path sim = dir / "sim";
    fs::remove_all(sim);
    REQUIRE(run(desk_sim_args(sim, 2, 5)) == 0);

    std::string common = "enhance --beamformer gev-ban --psd block --set input=" +
                         (sim / "mixture.wav").string() + " masks=" +
                         (sim / "masks.mbmk").string() + " fft_size=256";
    std::string out1 = (dir / "enh1.wav").string();
    std::string out2 = (dir / "enh2.wav").string();
    REQUIRE(run(common + " out=" + out1) == 0);
    REQUIRE(run(common + " out=" + out2) == 0);
    CHECK(read_text_file(out1) == read_text_file(out2));
}

TEST_CASE("precision mismatch between flag and weight file exits 2") {
    fs::path dir = work_dir();
    fs::path sim = dir / "sim_net";
    fs::remove_all(sim);
    REQUIRE(run(desk_sim_args(sim, 2, 6)) == 0);

    MaskNetParams net = MaskNetParams::sized(129, 3, PrecisionSpec{Precision::f32});
    Rng rng(1);
    net.init_random(rng);
    std::string weights = (dir / "f32.mbnw").string();
    save_weights(weights, net);

    std::string args = "enhance --precision bin1 --set mask_source=net input=" +
                       (sim / "mixture.wav").string() + " weights=" + weights +
                       " fft_size=256 out=" + (dir / "x.wav").string();
    CHECK(run(args) == 2);
}

TEST_CASE("bench rejects zero reps and writes monotone sizes") {
    fs::path dir = work_dir();
    CHECK(run("bench --set reps=0 sizes=64") == 2);
    std::string csv = run_capture("bench --set sizes=64,96 reps=1", (dir / "bench.log").string());
    std::size_t p64 = csv.find("\n64,");
    std::size_t p96 = csv.find("\n96,");
    CHECK(p64 != std::string::npos);
    CHECK(p96 != std::string::npos);
    CHECK(p64 < p96);
}

TEST_CASE("train command writes a checkpoint and loss curve") {
    fs::path dir = work_dir();
    fs::path a = dir / "train_a";
    fs::path b = dir / "train_b";
    fs::remove_all(a);
    fs::remove_all(b);
    REQUIRE(run(desk_sim_args(a, 2, 11)) == 0);
    REQUIRE(run(desk_sim_args(b, 2, 12)) == 0);

    std::string weights = (dir / "toy.mbnw").string();
    std::string curve = (dir / "toy_curve.csv").string();
    std::string args = "train --seed 4 --precision f32 --set train_dirs=" + a.string() +
                       " val_dirs=" + b.string() + " epochs=2 validation_period=1 fft_size=256" +
                       " weights_out=" + weights + " curve_out=" + curve;
    REQUIRE(run(args) == 0);
    CHECK(fs::exists(weights));
    MaskNetParams loaded = load_weights(weights);
    CHECK(loaded.bins == 129);  // fft 256 -> 129 bins
    CHECK(loaded.mics == 3);
    std::string curve_text = read_text_file(curve);
    CHECK(curve_text.find("epoch,train_loss,val_loss") == 0);
}
