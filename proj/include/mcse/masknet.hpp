// masknet.hpp — forward pass of the mask-estimation network at
// f32 / Q2.6 / Q2.2 / bin1 precision, plus the complexity report.
//
// Architecture: per-bin bidirectional LSTM (input 2M, hidden M per
// direction) -> per-bin per-direction dense M->1 giving a 2K intermediate ->
// dense 2K->K -> full-band bidirectional LSTM (hidden K per direction) ->
// three dense heads 2K->K -> full-precision softmax across heads.
// Every non-head layer is followed by tanh and batch norm; the fixed-point
// modes re-quantize the result to the format. bin1 keeps binary weights and
// binary cell nonlinearities while tanh/BN between layers stay real.
#pragma once

#include <array>
#include <string>
#include <vector>

#include "mcse/quant.hpp"
#include "mcse/rng.hpp"
#include "mcse/room_sim.hpp"
#include "mcse/stft.hpp"

namespace mcse {

// Row-major real matrix used for parameters and activations.
struct Mat {
    std::size_t rows = 0, cols = 0;
    std::vector<double> a;

    Mat() = default;
    Mat(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}
    double& operator()(std::size_t r, std::size_t c) { return a[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return a[r * cols + c]; }
    double* row(std::size_t r) { return a.data() + r * cols; }
    const double* row(std::size_t r) const { return a.data() + r * cols; }
};
using Vec = std::vector<double>;

struct LstmCellParams {
    std::size_t input_size = 0, hidden_size = 0;
    Mat w_xi, w_xf, w_xo, w_xc;  // hidden x input
    Mat w_hi, w_hf, w_ho, w_hc;  // hidden x hidden
    Vec b_i, b_f, b_o, b_c;
    // per-gate recurrent scales {s_hi, s_hf, s_ho, s_hc}; used in bin1 mode
    std::array<double, 4> scale{1.0, 1.0, 1.0, 1.0};

    static LstmCellParams sized(std::size_t input, std::size_t hidden);
};

struct LstmState {
    Vec h, c;
    static LstmState zero(std::size_t hidden) { return {Vec(hidden, 0.0), Vec(hidden, 0.0)}; }
};

struct BatchNorm {
    Vec gamma, beta;
    Vec running_mean, running_var;
    long long updates = 0;  // first update copies batch stats, later ones EMA
    static BatchNorm sized(std::size_t n);
};

struct Dense {
    Mat w;
    Vec b;
    static Dense sized(std::size_t rows, std::size_t cols);
};

struct MaskNetParams {
    std::size_t bins = 0;  // K
    std::size_t mics = 0;  // M
    PrecisionSpec precision;

    std::vector<LstmCellParams> l1_fwd, l1_bwd;  // K cells each, input 2M, hidden M
    Mat l2_w_fwd, l2_w_bwd;                      // K x M
    Vec l2_b_fwd, l2_b_bwd;                      // K
    Dense l3;                                    // K x 2K
    LstmCellParams l4_fwd, l4_bwd;               // input K, hidden K
    std::array<Dense, 3> heads;                  // K x 2K
    BatchNorm bn1, bn2, bn3, bn4;                // 2MK, 2K, K, 2K features

    static MaskNetParams sized(std::size_t bins, std::size_t mics, PrecisionSpec prec);
    void init_random(Rng& rng);
};

// Enumeration of every trainable tensor (weights, biases, batch-norm
// gamma/beta, and in bin1 mode the recurrent scales). Names are stable and
// double as the serialization keys.
struct ParamRef {
    std::string name;
    double* data = nullptr;
    std::size_t size = 0;
    PrecisionSpec precision;         // storage precision of this tensor
    std::vector<std::size_t> shape;  // for serialization
};
std::vector<ParamRef> param_refs(MaskNetParams& p);
// batch-norm running statistics (stored with checkpoints, not trained)
std::vector<ParamRef> stat_refs(MaskNetParams& p);

// quantized view: every tensor passed through its storage precision
MaskNetParams quantize_view(const MaskNetParams& shadow);

// Whitened, phase-normalized features x(t,k) = [Re Zbar, Im Zbar], 2M reals
// per bin; Zbar = Z/max(||Z||, 1e-12) * exp(-i arg Z_1).
struct FeatureSeq {
    std::size_t frames = 0, bins = 0, mics = 0;
    std::vector<double> x;  // ((t*bins + k)*2*mics + j)

    FeatureSeq() = default;
    FeatureSeq(std::size_t t, std::size_t k, std::size_t m)
        : frames(t), bins(k), mics(m), x(t * k * 2 * m, 0.0) {}
    double& at(std::size_t t, std::size_t k, std::size_t j) {
        return x[(t * bins + k) * 2 * mics + j];
    }
    double at(std::size_t t, std::size_t k, std::size_t j) const {
        return x[(t * bins + k) * 2 * mics + j];
    }
};

FeatureSeq extract_features(const ComplexSpectrogram& z);

// One LSTM step on a raw input pointer; state is updated in place and h is
// returned through it. Exposed for the cell-level tests.
void lstm_cell_step(const LstmCellParams& p, const PrecisionSpec& prec, const double* x,
                    LstmState& state);

// Full forward pass at the params' precision using stored batch-norm
// statistics. Softmax across the three heads is always full precision.
MaskTriple mask_net_forward(const MaskNetParams& params, const FeatureSeq& features);

// ---- forward with cached intermediates (training and inspection) ----

struct CellCache {
    Mat x;                           // cell input sequence (T x input_size)
    Mat in_i, in_f, in_o, in_c;      // W_x x (raw accumulation)
    Mat rec_i, rec_f, rec_o, rec_c;  // W_h h (raw, before scale)
    Mat pre_i, pre_f, pre_o, pre_c;  // summed pre-activations before any clip
    Mat gi, gf, go, gc;              // gate outputs as used
    Mat c_raw, c, tanh_c, h;
};

struct PipelineCache {  // tanh -> batch norm -> precision clip
    Mat input, act, xhat, bn, out;
    Vec mean, var, inv_std;  // statistics actually used
};

struct ForwardCache {
    std::vector<CellCache> l1_fwd, l1_bwd;  // K cells
    PipelineCache p1, p2, p3, p4;
    Mat u;       // T x 2K  layer-2 concat (raw)
    Mat u_mm;    // T x 2K  layer-2 matvec before bias (fixed-point clip gate)
    Mat v;       // T x K   layer-3 output (raw)
    Mat v_mm;    // T x K
    CellCache l4_fwd, l4_bwd;
    std::array<Mat, 3> z;  // head outputs T x K
    Mat p_est;             // T x 3K softmax probabilities (k*3 + i)
};

// batch_stats selects per-utterance batch-norm statistics (the training
// forward); otherwise the stored running statistics are used.
MaskTriple mask_net_forward_cached(const MaskNetParams& params, const FeatureSeq& features,
                                   ForwardCache& cache, bool batch_stats);

// Folds the batch statistics recorded in `cache` into the running averages.
void update_running_stats(MaskNetParams& params, const ForwardCache& cache,
                          double momentum = 0.99);

// ---- complexity report (symbolic table evaluation) ----

struct ComplexityRow {
    std::string layer, shape;
    long long weights = 0;
    double mac_e6 = 0.0;  // rounded as printed: one decimal below 1e6, integer above
};

struct ComplexityReport {
    std::vector<ComplexityRow> mask_layers;
    long long total_weights = 0;
    double total_mac_e6 = 0.0;  // sum of the rounded per-layer entries
    double static_eq10_e6 = 0.0, static_eq9_e6 = 0.0, static_total_e6 = 0.0;
    double dynamic_eq10_e6 = 0.0, dynamic_eq9_e6 = 0.0, dynamic_total_e6 = 0.0;
};

ComplexityReport complexity_report(std::size_t mics, std::size_t bins, std::size_t frames);
std::string complexity_table(const ComplexityReport& report);

}  // namespace mcse
