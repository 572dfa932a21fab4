// test_training.cpp — loss, BPTT gradients vs finite differences, STE
// behaviour, ADAM and the training loop.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "mcse/training.hpp"
#include "toy_task.hpp"

using namespace mcse;

namespace {

Utterance tiny_utterance(std::size_t bins, std::size_t mics, std::size_t frames,
                         std::uint64_t seed) {
    Rng rng(seed);
    Utterance utt;
    utt.features = FeatureSeq(frames, bins, mics);
    for (double& v : utt.features.x) v = rng.uniform(-1.0, 1.0);
    utt.target = MaskTriple(bins, frames);
    for (std::size_t k = 0; k < bins; ++k)
        for (std::size_t t = 0; t < frames; ++t)
            utt.target.at(k, t, rng.integer(3)) = 1.0;
    return utt;
}

}  // namespace

TEST_CASE("cross entropy") {
    // p_est == p_opt nearly one-hot -> loss ~ 0
    MaskTriple hot(2, 2);
    for (std::size_t k = 0; k < 2; ++k)
        for (std::size_t t = 0; t < 2; ++t) hot.at(k, t, 0) = 1.0;
    CHECK(cross_entropy(hot, hot) == doctest::Approx(0.0).epsilon(1e-9));

    // uniform prediction vs one-hot target -> ln 3
    MaskTriple uniform = MaskTriple::uniform(2, 2);
    CHECK(cross_entropy(uniform, hot) == doctest::Approx(std::log(3.0)).epsilon(1e-9));

    // random case against an independent scalar loop
    Rng rng(3);
    MaskTriple est(3, 4), opt(3, 4);
    for (std::size_t k = 0; k < 3; ++k)
        for (std::size_t t = 0; t < 4; ++t) {
            double a = rng.uniform(0.05, 1.0), b = rng.uniform(0.05, 1.0),
                   c = rng.uniform(0.05, 1.0);
            double s = a + b + c;
            est.at(k, t, 0) = a / s;
            est.at(k, t, 1) = b / s;
            est.at(k, t, 2) = c / s;
            opt.at(k, t, rng.integer(3)) = 1.0;
        }
    double reference = 0.0;
    for (std::size_t k = 0; k < 3; ++k)
        for (std::size_t t = 0; t < 4; ++t)
            for (std::size_t i = 0; i < 3; ++i)
                reference -= opt.at(k, t, i) * std::log(est.at(k, t, i) + 1e-12);
    reference /= 12.0;
    CHECK(cross_entropy(est, opt) == doctest::Approx(reference).epsilon(1e-10));

    MaskTriple wrong(2, 3);
    CHECK_THROWS(cross_entropy(wrong, hot));
}

TEST_CASE("f32 gradients match central finite differences on the tiny net") {
    // K = 2, M = 1, T = 3
    Utterance utt = tiny_utterance(2, 1, 3, 91);
    MaskNetParams shadow = MaskNetParams::sized(2, 1, PrecisionSpec{Precision::f32});
    Rng rng(92);
    shadow.init_random(rng);

    double loss = 0.0;
    MaskNetParams grads = compute_gradients(shadow, utt.features, utt.target, &loss);
    CHECK(loss > 0.0);

    std::vector<ParamRef> srefs = param_refs(shadow);
    std::vector<ParamRef> grefs = param_refs(grads);
    double max_rel = 0.0;
    const double h = 1e-5;
    for (std::size_t r = 0; r < srefs.size(); ++r) {
        for (std::size_t j = 0; j < srefs[r].size; ++j) {
            double saved = srefs[r].data[j];
            srefs[r].data[j] = saved + h;
            double lp = compute_loss(quantize_view(shadow), utt.features, utt.target, true);
            srefs[r].data[j] = saved - h;
            double lm = compute_loss(quantize_view(shadow), utt.features, utt.target, true);
            srefs[r].data[j] = saved;
            double fd = (lp - lm) / (2.0 * h);
            double an = grefs[r].data[j];
            double rel = std::abs(an - fd) / std::max({std::abs(an), std::abs(fd), 1e-7});
            max_rel = std::max(max_rel, rel);
        }
    }
    CHECK(max_rel < 1e-4);
}

TEST_CASE("gradients vanish at the optimum") {
    Utterance utt = tiny_utterance(2, 1, 4, 17);
    MaskNetParams shadow = MaskNetParams::sized(2, 1, PrecisionSpec{Precision::f32});
    Rng rng(18);
    shadow.init_random(rng);

    // make the target equal the prediction itself
    ForwardCache cache;
    MaskTriple est = mask_net_forward_cached(shadow, utt.features, cache, true);
    MaskNetParams grads = mask_net_backward(shadow, cache, est);
    for (std::size_t i = 0; i < 3; ++i) {
        for (double g : grads.heads[i].w.a) CHECK(std::abs(g) < 1e-8);
        for (double g : grads.heads[i].b) CHECK(std::abs(g) < 1e-8);
    }
}

TEST_CASE("bin1 STE zeroes saturated shadow weights") {
    Utterance utt = tiny_utterance(2, 1, 3, 33);
    MaskNetParams shadow = MaskNetParams::sized(2, 1, PrecisionSpec{Precision::bin1});
    Rng rng(34);
    shadow.init_random(rng);
    shadow.l1_fwd[0].w_xi(0, 0) = 5.0;   // deep in saturation
    shadow.l1_fwd[0].w_xi(0, 1) = -5.0;

    MaskNetParams grads = compute_gradients(shadow, utt.features, utt.target);
    CHECK(grads.l1_fwd[0].w_xi(0, 0) == 0.0);
    CHECK(grads.l1_fwd[0].w_xi(0, 1) == 0.0);
}

TEST_CASE("fixed-point STE zeroes saturated shadow weights") {
    Utterance utt = tiny_utterance(2, 1, 3, 35);
    MaskNetParams shadow = MaskNetParams::sized(2, 1, PrecisionSpec{Precision::q2_6});
    Rng rng(36);
    shadow.init_random(rng);
    shadow.l3.w(0, 0) = 2.5;  // beyond the q2.6 clamp
    MaskNetParams grads = compute_gradients(shadow, utt.features, utt.target);
    CHECK(grads.l3.w(0, 0) == 0.0);
}

TEST_CASE("adam") {
    MaskNetParams shadow = MaskNetParams::sized(2, 1, PrecisionSpec{Precision::f32});
    Rng rng(40);
    shadow.init_random(rng);
    MaskNetParams view = quantize_view(shadow);
    AdamState adam = AdamState::init(shadow, 1e-3);

    // zero gradient leaves the parameters unchanged
    MaskNetParams zero = zeros_like(shadow);
    std::vector<double> before;
    for (const ParamRef& r : param_refs(shadow))
        before.insert(before.end(), r.data, r.data + r.size);
    adam_step(adam, shadow, zero, view);
    std::vector<double> after;
    for (const ParamRef& r : param_refs(shadow))
        after.insert(after.end(), r.data, r.data + r.size);
    CHECK(before == after);

    // constant gradient: the update magnitude converges to the learn rate
    MaskNetParams constant = zeros_like(shadow);
    std::vector<ParamRef> crefs = param_refs(constant);
    for (ParamRef& r : crefs)
        for (std::size_t j = 0; j < r.size; ++j) r.data[j] = 0.37;
    double probe_before = shadow.l3.w(0, 0);
    for (int it = 0; it < 200; ++it) {
        probe_before = shadow.l3.w(0, 0);
        adam_step(adam, shadow, constant, view);
    }
    double step_size = std::abs(shadow.l3.w(0, 0) - probe_before);
    CHECK(step_size == doctest::Approx(1e-3).epsilon(0.01));
}

TEST_CASE("quantized view tracks the shadow after every step") {
    MaskNetParams shadow = MaskNetParams::sized(2, 1, PrecisionSpec{Precision::q2_2});
    Rng rng(44);
    shadow.init_random(rng);
    MaskNetParams view = quantize_view(shadow);
    AdamState adam = AdamState::init(shadow, 5e-3);
    Utterance utt = tiny_utterance(2, 1, 3, 45);

    for (int it = 0; it < 5; ++it) {
        MaskNetParams grads = compute_gradients(shadow, utt.features, utt.target);
        adam_step(adam, shadow, grads, view);
        MaskNetParams expect = quantize_view(shadow);
        std::vector<ParamRef> vr = param_refs(view), er = param_refs(expect);
        for (std::size_t r = 0; r < vr.size(); ++r)
            for (std::size_t j = 0; j < vr[r].size; ++j)
                REQUIRE(vr[r].data[j] == er[r].data[j]);
    }
}

TEST_CASE("toy task: f32 training halves the loss") {
    Dataset data = toy::make_dataset(4, 50, 8, 2, 7);
    TrainConfig cfg;
    cfg.epochs = 120;
    cfg.validation_period = 20;
    cfg.patience = 10;
    cfg.learn_rate = 1e-3;
    cfg.precision = PrecisionSpec{Precision::f32};
    cfg.seed = 1;

    TrainResult result = train(cfg, data);
    REQUIRE(!result.curve.empty());
    double first = result.curve.front().train_loss;
    double last = result.curve.back().train_loss;
    CHECK(last < 0.5 * first);
    CHECK(result.best_val < std::log(3.0));  // beats the uninformed prediction
}

TEST_CASE("patience 0 stops at the first non-improving evaluation") {
    // one train utterance and zero learn rate: weights and running statistics
    // are stationary, so the validation loss repeats exactly
    Dataset data = toy::make_dataset(3, 20, 1, 1, 8);
    TrainConfig cfg;
    cfg.epochs = 50;
    cfg.validation_period = 10;
    cfg.patience = 0;
    cfg.learn_rate = 0.0;
    cfg.precision = PrecisionSpec{Precision::f32};
    cfg.seed = 2;

    TrainResult result = train(cfg, data);
    // eval at 10 sets the best; eval at 20 fails to improve and stops
    CHECK(result.curve.size() == 20);
}

TEST_CASE("fixed seed reproduces the loss curve") {
    Dataset data = toy::make_dataset(3, 20, 2, 1, 9);
    TrainConfig cfg;
    cfg.epochs = 15;
    cfg.validation_period = 5;
    cfg.learn_rate = 2e-3;
    cfg.precision = PrecisionSpec{Precision::f32};
    cfg.seed = 3;

    TrainResult a = train(cfg, data);
    TrainResult b = train(cfg, data);
    REQUIRE(a.curve.size() == b.curve.size());
    for (std::size_t i = 0; i < a.curve.size(); ++i) {
        CHECK(a.curve[i].train_loss == b.curve[i].train_loss);
        CHECK(a.curve[i].val_loss == b.curve[i].val_loss);
    }
    std::string csv = loss_curve_csv(a.curve);
    CHECK(csv.find("epoch,train_loss,val_loss") == 0);
}

TEST_CASE("empty dataset is rejected") {
    TrainConfig cfg;
    CHECK_THROWS(train(cfg, Dataset{}));
}
