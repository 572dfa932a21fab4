// test_masknet.cpp — feature extraction, LSTM cell variants, full forward
// pass and the complexity report.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "mcse/masknet.hpp"
#include "mcse/rng.hpp"
#include "toy_task.hpp"

using namespace mcse;

namespace {

MaskNetParams tame_random_net(std::size_t bins, std::size_t mics, Precision prec,
                              std::uint64_t seed) {
    MaskNetParams p = MaskNetParams::sized(bins, mics, PrecisionSpec{prec});
    Rng rng(seed);
    p.init_random(rng);
    return p;
}

FeatureSeq random_features(std::size_t frames, std::size_t bins, std::size_t mics,
                           std::uint64_t seed) {
    FeatureSeq f(frames, bins, mics);
    Rng rng(seed);
    for (double& v : f.x) v = rng.uniform(-1.0, 1.0);
    return f;
}

}  // namespace

TEST_CASE("feature extraction") {
    StftConfig cfg{64, 16, 16000.0};

    // identical signal on all mics: Zbar = 1/sqrt(M), purely real
    ComplexSpectrogram z(4, 1, 1, cfg);
    for (std::size_t m = 0; m < 4; ++m) z.at(m, 0, 0) = cplx(0.3, 0.7);
    FeatureSeq f = extract_features(z);
    for (std::size_t m = 0; m < 4; ++m) {
        CHECK(f.at(0, 0, m) == doctest::Approx(0.5));       // 1/sqrt(4)
        CHECK(f.at(0, 0, 4 + m) == doctest::Approx(0.0));   // imag vanishes
    }

    // zero frame stays zero through the epsilon guard
    ComplexSpectrogram zero(2, 1, 1, cfg);
    FeatureSeq fz = extract_features(zero);
    for (std::size_t j = 0; j < 4; ++j) CHECK(fz.at(0, 0, j) == 0.0);

    // M = 2 hand case: Z = [1+i, 2], ||Z|| = sqrt(6), phase of ch1 = pi/4
    ComplexSpectrogram z2(2, 1, 1, cfg);
    z2.at(0, 0, 0) = cplx(1.0, 1.0);
    z2.at(1, 0, 0) = cplx(2.0, 0.0);
    FeatureSeq f2 = extract_features(z2);
    double s6 = std::sqrt(6.0);
    CHECK(f2.at(0, 0, 0) == doctest::Approx(std::sqrt(2.0) / s6));
    CHECK(f2.at(0, 0, 2) == doctest::Approx(0.0).epsilon(1e-12));
    cplx expected = 2.0 / s6 * std::exp(cplx(0.0, -std::numbers::pi / 4.0));
    CHECK(f2.at(0, 0, 1) == doctest::Approx(expected.real()));
    CHECK(f2.at(0, 0, 3) == doctest::Approx(expected.imag()));
}

TEST_CASE("bin1 cell tie-break example") {
    // zero input, state and biases: sigma_b(0) = 1, tanh_b(0) = +1
    LstmCellParams p = LstmCellParams::sized(2, 3);
    LstmState state = LstmState::zero(3);
    double x[2] = {0.0, 0.0};
    lstm_cell_step(p, PrecisionSpec{Precision::bin1}, x, state);
    for (std::size_t j = 0; j < 3; ++j) {
        CHECK(state.c[j] == 1.0);  // c = c_prev + 1
        CHECK(state.h[j] == 1.0);  // h = sign(c)
    }
    lstm_cell_step(p, PrecisionSpec{Precision::bin1}, x, state);
    for (std::size_t j = 0; j < 3; ++j) CHECK(state.c[j] == 2.0);
}

TEST_CASE("f32 zero-weight cell") {
    LstmCellParams p = LstmCellParams::sized(2, 2);
    LstmState state = LstmState::zero(2);
    state.c = {1.0, -2.0};
    double x[2] = {0.4, -0.9};
    lstm_cell_step(p, PrecisionSpec{Precision::f32}, x, state);
    for (std::size_t j = 0; j < 2; ++j) {
        double c_expect = 0.5 * (j == 0 ? 1.0 : -2.0);  // f = 0.5, i*g = 0
        CHECK(state.c[j] == doctest::Approx(c_expect));
        CHECK(state.h[j] == doctest::Approx(0.5 * std::tanh(c_expect)));
    }

    double bad[2] = {std::nan(""), 0.0};
    CHECK_THROWS(lstm_cell_step(p, PrecisionSpec{Precision::f32}, bad, state));
}

TEST_CASE("bin1 cell matches a literal evaluation of the binary equations") {
    Rng rng(77);
    LstmCellParams p = LstmCellParams::sized(3, 4);
    for (Mat* m : {&p.w_xi, &p.w_xf, &p.w_xo, &p.w_xc, &p.w_hi, &p.w_hf, &p.w_ho, &p.w_hc})
        for (double& v : m->a) v = rng.uniform() < 0.5 ? -1.0 : 1.0;
    for (Vec* b : {&p.b_i, &p.b_f, &p.b_o, &p.b_c})
        for (double& v : *b) v = rng.uniform() < 0.5 ? -1.0 : 1.0;
    p.scale = {0.3, 0.7, 0.2, 0.5};

    LstmState state = LstmState::zero(4);
    Vec h_ref(4, 0.0), c_ref(4, 0.0);
    for (int step = 0; step < 100; ++step) {
        double x[3];
        for (double& v : x) v = rng.uniform(-1.0, 1.0);

        // reference: the cell equations written out directly
        auto gate = [&](const Mat& wx, const Mat& wh, const Vec& b, double s, bool is_tanh) {
            Vec out(4);
            for (std::size_t j = 0; j < 4; ++j) {
                double acc = 0.0;
                for (std::size_t i = 0; i < 3; ++i) acc += wx(j, i) * x[i];
                double rec = 0.0;
                for (std::size_t i = 0; i < 4; ++i) rec += wh(j, i) * h_ref[i];
                double pre = acc + rec * s + b[j];
                out[j] = is_tanh ? (pre < 0.0 ? -1.0 : 1.0) : (pre >= 0.0 ? 1.0 : 0.0);
            }
            return out;
        };
        Vec gi = gate(p.w_xi, p.w_hi, p.b_i, p.scale[0], false);
        Vec gf = gate(p.w_xf, p.w_hf, p.b_f, p.scale[1], false);
        Vec go = gate(p.w_xo, p.w_ho, p.b_o, p.scale[2], false);
        Vec gc = gate(p.w_xc, p.w_hc, p.b_c, p.scale[3], true);
        for (std::size_t j = 0; j < 4; ++j) {
            c_ref[j] = std::clamp(gf[j] * c_ref[j] + gi[j] * gc[j], -8.0, 8.0);
            h_ref[j] = go[j] * (c_ref[j] < 0.0 ? -1.0 : 1.0);
        }

        lstm_cell_step(p, PrecisionSpec{Precision::bin1}, x, state);
        for (std::size_t j = 0; j < 4; ++j) {
            REQUIRE(state.c[j] == c_ref[j]);
            REQUIRE(state.h[j] == h_ref[j]);
        }
    }
}

TEST_CASE("forward pass: softmax normalization and shape in every mode") {
    for (Precision prec :
         {Precision::f32, Precision::q2_6, Precision::q2_2, Precision::bin1}) {
        MaskNetParams net = tame_random_net(4, 2, prec, 42);
        MaskNetParams view = quantize_view(net);
        FeatureSeq f = random_features(7, 4, 2, 43);
        MaskTriple mask = mask_net_forward(view, f);
        CHECK(mask.bins == 4);
        CHECK(mask.frames == 7);
        for (std::size_t k = 0; k < 4; ++k)
            for (std::size_t t = 0; t < 7; ++t) {
                double sum = 0.0;
                for (std::size_t i = 0; i < 3; ++i) {
                    double v = mask.at(k, t, i);
                    CHECK(v > 0.0);
                    CHECK(v < 1.0);
                    sum += v;
                }
                CHECK(std::abs(sum - 1.0) < 1e-6);
            }
    }
}

TEST_CASE("forward pass is deterministic") {
    MaskNetParams net = tame_random_net(3, 2, Precision::f32, 11);
    FeatureSeq f = random_features(5, 3, 2, 12);
    MaskTriple a = mask_net_forward(net, f);
    MaskTriple b = mask_net_forward(net, f);
    CHECK(a.values == b.values);
}

TEST_CASE("bidirectional symmetry of layer 1") {
    MaskNetParams net = tame_random_net(3, 2, Precision::f32, 21);
    const std::size_t frames = 6;
    FeatureSeq f = random_features(frames, 3, 2, 22);

    ForwardCache cache;
    mask_net_forward_cached(net, f, cache, true);

    // reversed input with swapped forward/backward parameter blocks
    MaskNetParams swapped = net;
    std::swap(swapped.l1_fwd, swapped.l1_bwd);
    FeatureSeq rev(frames, 3, 2);
    for (std::size_t t = 0; t < frames; ++t)
        for (std::size_t k = 0; k < 3; ++k)
            for (std::size_t j = 0; j < 4; ++j) rev.at(t, k, j) = f.at(frames - 1 - t, k, j);
    ForwardCache rcache;
    mask_net_forward_cached(swapped, rev, rcache, true);

    for (std::size_t k = 0; k < 3; ++k)
        for (std::size_t t = 0; t < frames; ++t)
            for (std::size_t d = 0; d < 2; ++d) {
                // forward h of the original equals backward h of the swapped
                // net at the mirrored frame
                CHECK(cache.l1_fwd[k].h(t, d) ==
                      doctest::Approx(rcache.l1_bwd[k].h(frames - 1 - t, d)).epsilon(1e-12));
                CHECK(cache.l1_bwd[k].h(t, d) ==
                      doctest::Approx(rcache.l1_fwd[k].h(frames - 1 - t, d)).epsilon(1e-12));
            }
}

TEST_CASE("fixed-point closure: stored intermediates are representable") {
    MaskNetParams net = tame_random_net(3, 2, Precision::q2_6, 31);
    MaskNetParams view = quantize_view(net);
    FeatureSeq f = random_features(6, 3, 2, 32);
    ForwardCache cache;
    mask_net_forward_cached(view, f, cache, true);

    PrecisionSpec spec{Precision::q2_6};
    auto representable = [&](double v) { return quantize_fixed(v, spec) == v; };
    for (const PipelineCache* pc : {&cache.p1, &cache.p2, &cache.p3, &cache.p4})
        for (double v : pc->out.a) CHECK(representable(v));
    for (const CellCache* cc : {&cache.l4_fwd, &cache.l4_bwd}) {
        for (double v : cc->h.a) CHECK(representable(v));
        for (double v : cc->c.a) CHECK(representable(v));
        for (double v : cc->gi.a) CHECK(representable(v));
    }
}

TEST_CASE("f32 vs q2.6 forward on the same weights is a small perturbation") {
    // quantization acts as a perturbation, not a rewrite
    Rng rng(55);
    Utterance utt = toy::make_utterance(4, 30, rng);
    MaskNetParams net = tame_random_net(4, 2, Precision::f32, 56);
    MaskTriple f32_mask = mask_net_forward(net, utt.features);

    MaskNetParams q = net;
    q.precision = PrecisionSpec{Precision::q2_6};
    MaskTriple q_mask = mask_net_forward(quantize_view(q), utt.features);

    double mean_abs = 0.0;
    for (std::size_t i = 0; i < f32_mask.values.size(); ++i)
        mean_abs += std::abs(f32_mask.values[i] - q_mask.values[i]);
    mean_abs /= static_cast<double>(f32_mask.values.size());
    CHECK(mean_abs < 0.1);
}

TEST_CASE("serialized parameter bytes shrink with precision") {
    // count payload bytes exactly as the weight file writes them
    auto payload_bytes = [](MaskNetParams& p) {
        std::size_t bytes = 0;
        for (const ParamRef& ref : param_refs(p)) {
            switch (ref.precision.kind) {
                case Precision::f32: bytes += 4 * ref.size; break;
                case Precision::q2_6: bytes += ref.size; break;
                case Precision::q2_2: bytes += (ref.size + 1) / 2; break;
                case Precision::bin1: bytes += (ref.size + 7) / 8; break;
            }
        }
        return bytes;
    };
    MaskNetParams f32 = MaskNetParams::sized(8, 2, PrecisionSpec{Precision::f32});
    MaskNetParams q6 = MaskNetParams::sized(8, 2, PrecisionSpec{Precision::q2_6});
    MaskNetParams q2 = MaskNetParams::sized(8, 2, PrecisionSpec{Precision::q2_2});
    MaskNetParams b1 = MaskNetParams::sized(8, 2, PrecisionSpec{Precision::bin1});
    std::size_t nf = payload_bytes(f32), n6 = payload_bytes(q6), n2 = payload_bytes(q2),
                nb = payload_bytes(b1);
    CHECK(nb <= n2);
    CHECK(n2 <= n6);
    CHECK(n6 <= nf);
}

TEST_CASE("complexity report reproduces the reference table") {
    ComplexityReport r = complexity_report(6, 513, 500);
    REQUIRE(r.mask_layers.size() == 5);
    CHECK(r.mask_layers[0].weights == 590976);
    CHECK(r.mask_layers[1].weights == 6156);
    CHECK(r.mask_layers[2].weights == 526338);
    CHECK(r.mask_layers[3].weights == 8421408);
    CHECK(r.mask_layers[4].weights == 1579014);
    CHECK(r.total_weights == 11123892);
    CHECK(r.mask_layers[0].mac_e6 == 295.0);
    CHECK(r.mask_layers[1].mac_e6 == 3.0);
    CHECK(r.mask_layers[2].mac_e6 == 263.0);
    CHECK(r.mask_layers[3].mac_e6 == 4211.0);
    CHECK(r.mask_layers[4].mac_e6 == 790.0);
    CHECK(r.total_mac_e6 == 5562.0);
    CHECK(r.static_total_e6 == doctest::Approx(18.1));
    CHECK(r.dynamic_total_e6 == doctest::Approx(73.0));

    // trivial formula evaluation
    ComplexityReport tiny = complexity_report(1, 1, 1);
    CHECK(tiny.mask_layers[0].weights == 32);
}
