// test_io.cpp — WAV, weight-file, mask-file and config round trips.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>

#include "mcse/config.hpp"
#include "mcse/io.hpp"
#include "mcse/rng.hpp"
#include "mcse/wav_io.hpp"

using namespace mcse;

namespace {

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("wav round trip") {
    Rng rng(1);
    MultiSignal x(3, Signal(500));
    for (Signal& ch : x)
        for (double& v : ch) v = rng.uniform(-0.9, 0.9);

    std::string path = temp_path("mcse_test.wav");
    write_wav(path, x, 16000.0);
    WavData wav = read_wav(path);
    CHECK(wav.sample_rate == 16000.0);
    REQUIRE(wav.channels.size() == 3);
    for (std::size_t m = 0; m < 3; ++m) {
        REQUIRE(wav.channels[m].size() == 500);
        for (std::size_t i = 0; i < 500; ++i)
            CHECK(wav.channels[m][i] == doctest::Approx(x[m][i]).epsilon(1.0 / 32768.0));
    }

    // a second write-read is the identity on the already-quantized samples
    write_wav(path, wav.channels, 16000.0);
    WavData again = read_wav(path);
    CHECK(again.channels == wav.channels);
    std::remove(path.c_str());

    CHECK_THROWS(read_wav(temp_path("does_not_exist.wav")));
}

TEST_CASE("mask file round trip") {
    Rng rng(2);
    MaskTriple mask(5, 7);
    for (std::size_t k = 0; k < 5; ++k)
        for (std::size_t t = 0; t < 7; ++t) {
            double a = rng.uniform(), b = rng.uniform() * (1.0 - a);
            mask.at(k, t, 0) = a;
            mask.at(k, t, 1) = b;
            mask.at(k, t, 2) = 1.0 - a - b;
        }
    std::string path = temp_path("mcse_test.mbmk");
    save_mask(path, mask);
    MaskTriple back = load_mask(path);
    CHECK(back.bins == 5);
    CHECK(back.frames == 7);
    for (std::size_t i = 0; i < mask.values.size(); ++i)
        CHECK(back.values[i] == doctest::Approx(mask.values[i]).epsilon(1e-7));
    std::remove(path.c_str());
}

TEST_CASE("weight file round trip at every precision") {
    for (Precision prec : {Precision::f32, Precision::q2_6, Precision::q2_2, Precision::bin1}) {
        MaskNetParams shadow = MaskNetParams::sized(3, 2, PrecisionSpec{prec});
        Rng rng(17);
        shadow.init_random(rng);
        MaskNetParams view = quantize_view(shadow);

        std::string path = temp_path("mcse_test.mbnw");
        save_weights(path, view);
        CHECK(peek_weight_precision(path).kind == prec);

        MaskNetParams loaded = load_weights(path);
        CHECK(loaded.bins == 3);
        CHECK(loaded.mics == 2);
        CHECK(loaded.precision.kind == prec);

        std::vector<ParamRef> a = param_refs(view), b = param_refs(loaded);
        REQUIRE(a.size() == b.size());
        for (std::size_t r = 0; r < a.size(); ++r) {
            REQUIRE(a[r].size == b[r].size);
            for (std::size_t j = 0; j < a[r].size; ++j) {
                if (a[r].precision.kind == Precision::f32)
                    CHECK(b[r].data[j] ==
                          doctest::Approx(a[r].data[j]).epsilon(1e-6));  // f32 storage
                else
                    CHECK(b[r].data[j] == a[r].data[j]);  // codes are exact
            }
        }
        std::remove(path.c_str());
    }
}

TEST_CASE("weight file rejects junk") {
    std::string path = temp_path("mcse_junk.bin");
    write_text_file(path, "not a weight file at all");
    CHECK_THROWS(load_weights(path));
    std::remove(path.c_str());
}

TEST_CASE("config parsing") {
    Config cfg = Config::parse("# comment\nscenario = 3\n\nbeta=0.85\nname = desk run\n");
    CHECK(cfg.get_int("scenario", 0) == 3);
    CHECK(cfg.get_double("beta", 0.0) == 0.85);
    CHECK(cfg.get_str("name", "") == "desk run");
    CHECK(cfg.get_int("missing", 42) == 42);
    CHECK_THROWS_AS(cfg.require_str("absent"), ConfigError);
    CHECK_THROWS_AS(Config::parse("no equals sign"), ConfigError);

    // canonical form is sorted and stable
    Config cfg2 = Config::parse("beta=0.85\nname = desk run\nscenario = 3\n");
    CHECK(cfg.canonical() == cfg2.canonical());
    CHECK(fnv1a64(cfg.canonical()) == fnv1a64(cfg2.canonical()));
}
