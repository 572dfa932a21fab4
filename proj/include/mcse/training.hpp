// training.hpp — quantization-aware training of the mask network:
// full backpropagation through time, straight-through estimators for the
// quantizers, ADAM, and early stopping on a validation set.
//
// The trainer keeps a full-precision shadow copy of every parameter; the
// forward pass only ever sees the quantized view. Gradients are computed
// with respect to the quantized weights and passed through to the shadow
// copy, gated where the quantizer saturated (hard-tanh window for sign,
// clamp window for fixed point).
#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "mcse/masknet.hpp"

namespace mcse {

// -(1/(K*T)) * sum p_opt * log(p_est + 1e-12)
double cross_entropy(const MaskTriple& p_est, const MaskTriple& p_opt);

struct AdamState {
    double learn_rate = 1e-3;
    double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    long long step = 0;
    std::vector<Vec> m, v;  // aligned with param_refs order

    static AdamState init(MaskNetParams& shadow, double learn_rate);
};

MaskNetParams zeros_like(const MaskNetParams& p);

// Gradients w.r.t. the quantized view parameters; the forward must have been
// run with batch statistics.
MaskNetParams mask_net_backward(const MaskNetParams& view, const ForwardCache& cache,
                                const MaskTriple& target);

// Zeroes view-gradients where the shadow value saturates its quantizer.
void ste_gate(MaskNetParams& shadow, MaskNetParams& grads);

// loss under a given parameter set (used by the finite-difference oracle)
double compute_loss(const MaskNetParams& view, const FeatureSeq& x, const MaskTriple& y,
                    bool batch_stats);

// quantize-view forward + backward + STE gating in one call
MaskNetParams compute_gradients(const MaskNetParams& shadow, const FeatureSeq& x,
                                const MaskTriple& y, double* loss_out = nullptr);

// ADAM update on the shadow parameters, then view <- quantize_view(shadow).
void adam_step(AdamState& state, MaskNetParams& shadow, MaskNetParams& grads, MaskNetParams& view);

struct Utterance {
    FeatureSeq features;
    MaskTriple target;
};

struct Dataset {
    std::vector<Utterance> train, validation;
};

struct TrainConfig {
    std::size_t epochs = 200;
    std::size_t validation_period = 20;  // epochs between validation passes
    int patience = 3;                    // consecutive non-improving evaluations
    double learn_rate = 1e-3;
    PrecisionSpec precision;
    std::uint64_t seed = 1;
};

struct LossPoint {
    std::size_t epoch = 0;
    double train_loss = 0.0;
    double val_loss = 0.0;
    bool has_val = false;
};

struct TrainResult {
    MaskNetParams best_shadow, best_view;  // minimum observed validation loss
    std::vector<LossPoint> curve;
    double best_val = std::numeric_limits<double>::infinity();
    std::size_t best_epoch = 0;
};

TrainResult train(const TrainConfig& cfg, const Dataset& data);

// mean inference-mode cross-entropy over a set
double evaluate(const MaskNetParams& view, const std::vector<Utterance>& set);

std::string loss_curve_csv(const std::vector<LossPoint>& curve);

}  // namespace mcse
