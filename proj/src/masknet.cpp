// masknet.cpp
#include "mcse/masknet.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mcse {

namespace {

constexpr double kBnEps = 1e-5;
constexpr double kCellClip = 8.0;

// Precision clip applied between layers: fixed-point formats re-quantize
// after batch norm; f32 and bin1 pass through (binary activations live
// inside the cell nonlinearities, the inter-layer tanh/BN stay real).
double clip_mode(double x, const PrecisionSpec& p) {
    switch (p.kind) {
        case Precision::f32:
        case Precision::bin1: return x;
        case Precision::q2_6:
        case Precision::q2_2: return quantize_fixed(x, p);
    }
    return x;
}

double clip_fixed_only(double x, const PrecisionSpec& p) {
    return p.fixed_point() ? quantize_fixed(x, p) : x;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void matvec_into(const Mat& w, const double* x, double* y) {
    for (std::size_t r = 0; r < w.rows; ++r) {
        double acc = 0.0;
        const double* row = w.row(r);
        for (std::size_t c = 0; c < w.cols; ++c) acc += row[c] * x[c];
        y[r] = acc;
    }
}

}  // namespace

LstmCellParams LstmCellParams::sized(std::size_t input, std::size_t hidden) {
    LstmCellParams p;
    p.input_size = input;
    p.hidden_size = hidden;
    for (Mat* m : {&p.w_xi, &p.w_xf, &p.w_xo, &p.w_xc}) *m = Mat(hidden, input);
    for (Mat* m : {&p.w_hi, &p.w_hf, &p.w_ho, &p.w_hc}) *m = Mat(hidden, hidden);
    for (Vec* v : {&p.b_i, &p.b_f, &p.b_o, &p.b_c}) v->assign(hidden, 0.0);
    return p;
}

BatchNorm BatchNorm::sized(std::size_t n) {
    BatchNorm bn;
    bn.gamma.assign(n, 1.0);
    bn.beta.assign(n, 0.0);
    bn.running_mean.assign(n, 0.0);
    bn.running_var.assign(n, 1.0);
    return bn;
}

Dense Dense::sized(std::size_t rows, std::size_t cols) {
    Dense d;
    d.w = Mat(rows, cols);
    d.b.assign(rows, 0.0);
    return d;
}

MaskNetParams MaskNetParams::sized(std::size_t bins, std::size_t mics, PrecisionSpec prec) {
    MaskNetParams p;
    p.bins = bins;
    p.mics = mics;
    p.precision = prec;
    p.l1_fwd.assign(bins, LstmCellParams::sized(2 * mics, mics));
    p.l1_bwd.assign(bins, LstmCellParams::sized(2 * mics, mics));
    p.l2_w_fwd = Mat(bins, mics);
    p.l2_w_bwd = Mat(bins, mics);
    p.l2_b_fwd.assign(bins, 0.0);
    p.l2_b_bwd.assign(bins, 0.0);
    p.l3 = Dense::sized(bins, 2 * bins);
    p.l4_fwd = LstmCellParams::sized(bins, bins);
    p.l4_bwd = LstmCellParams::sized(bins, bins);
    for (Dense& h : p.heads) h = Dense::sized(bins, 2 * bins);
    p.bn1 = BatchNorm::sized(bins * 2 * mics);
    p.bn2 = BatchNorm::sized(2 * bins);
    p.bn3 = BatchNorm::sized(bins);
    p.bn4 = BatchNorm::sized(2 * bins);
    return p;
}

void MaskNetParams::init_random(Rng& rng) {
    auto fill = [&rng](Mat& m, double r) {
        for (double& v : m.a) v = rng.uniform(-r, r);
    };
    auto cell = [&](LstmCellParams& c) {
        double rx = std::min(0.9, 1.0 / std::sqrt(static_cast<double>(c.input_size)));
        double rh = std::min(0.9, 1.0 / std::sqrt(static_cast<double>(c.hidden_size)));
        for (Mat* m : {&c.w_xi, &c.w_xf, &c.w_xo, &c.w_xc}) fill(*m, rx);
        for (Mat* m : {&c.w_hi, &c.w_hf, &c.w_ho, &c.w_hc}) fill(*m, rh);
        c.scale = {0.25, 0.25, 0.25, 0.25};
    };
    for (LstmCellParams& c : l1_fwd) cell(c);
    for (LstmCellParams& c : l1_bwd) cell(c);
    double r2 = std::min(0.9, 1.0 / std::sqrt(static_cast<double>(mics)));
    fill(l2_w_fwd, r2);
    fill(l2_w_bwd, r2);
    double r3 = 1.0 / std::sqrt(static_cast<double>(2 * bins));
    fill(l3.w, r3);
    cell(l4_fwd);
    cell(l4_bwd);
    for (Dense& h : heads) fill(h.w, r3);
}

std::vector<ParamRef> param_refs(MaskNetParams& p) {
    std::vector<ParamRef> refs;
    const PrecisionSpec wp = p.precision;
    const PrecisionSpec f32{Precision::f32};
    auto add_mat = [&refs](const std::string& name, Mat& m, PrecisionSpec prec) {
        refs.push_back({name, m.a.data(), m.a.size(), prec, {m.rows, m.cols}});
    };
    auto add_vec = [&refs](const std::string& name, Vec& v, PrecisionSpec prec) {
        refs.push_back({name, v.data(), v.size(), prec, {v.size()}});
    };
    auto add_cell = [&](const std::string& prefix, LstmCellParams& c) {
        add_mat(prefix + ".wxi", c.w_xi, wp);
        add_mat(prefix + ".wxf", c.w_xf, wp);
        add_mat(prefix + ".wxo", c.w_xo, wp);
        add_mat(prefix + ".wxc", c.w_xc, wp);
        add_mat(prefix + ".whi", c.w_hi, wp);
        add_mat(prefix + ".whf", c.w_hf, wp);
        add_mat(prefix + ".who", c.w_ho, wp);
        add_mat(prefix + ".whc", c.w_hc, wp);
        add_vec(prefix + ".bi", c.b_i, wp);
        add_vec(prefix + ".bf", c.b_f, wp);
        add_vec(prefix + ".bo", c.b_o, wp);
        add_vec(prefix + ".bc", c.b_c, wp);
        if (p.precision.kind == Precision::bin1)
            refs.push_back({prefix + ".s", c.scale.data(), 4, f32, {4}});
    };
    char buf[32];
    for (std::size_t k = 0; k < p.bins; ++k) {
        std::snprintf(buf, sizeof(buf), "l1.f%03zu", k);
        add_cell(buf, p.l1_fwd[k]);
    }
    for (std::size_t k = 0; k < p.bins; ++k) {
        std::snprintf(buf, sizeof(buf), "l1.b%03zu", k);
        add_cell(buf, p.l1_bwd[k]);
    }
    add_mat("l2.wf", p.l2_w_fwd, wp);
    add_mat("l2.wb", p.l2_w_bwd, wp);
    add_vec("l2.bf", p.l2_b_fwd, wp);
    add_vec("l2.bb", p.l2_b_bwd, wp);
    add_mat("l3.w", p.l3.w, wp);
    add_vec("l3.b", p.l3.b, wp);
    add_cell("l4.f", p.l4_fwd);
    add_cell("l4.b", p.l4_bwd);
    for (std::size_t i = 0; i < 3; ++i) {
        std::snprintf(buf, sizeof(buf), "head%zu", i);
        add_mat(std::string(buf) + ".w", p.heads[i].w, wp);
        add_vec(std::string(buf) + ".b", p.heads[i].b, wp);
    }
    BatchNorm* bns[4] = {&p.bn1, &p.bn2, &p.bn3, &p.bn4};
    for (int i = 0; i < 4; ++i) {
        std::string prefix = "bn" + std::to_string(i + 1);
        add_vec(prefix + ".gamma", bns[i]->gamma, f32);
        add_vec(prefix + ".beta", bns[i]->beta, f32);
    }
    return refs;
}

std::vector<ParamRef> stat_refs(MaskNetParams& p) {
    std::vector<ParamRef> refs;
    const PrecisionSpec f32{Precision::f32};
    BatchNorm* bns[4] = {&p.bn1, &p.bn2, &p.bn3, &p.bn4};
    for (int i = 0; i < 4; ++i) {
        std::string prefix = "bn" + std::to_string(i + 1);
        refs.push_back({prefix + ".mean", bns[i]->running_mean.data(),
                        bns[i]->running_mean.size(), f32, {bns[i]->running_mean.size()}});
        refs.push_back({prefix + ".var", bns[i]->running_var.data(), bns[i]->running_var.size(),
                        f32, {bns[i]->running_var.size()}});
    }
    return refs;
}

MaskNetParams quantize_view(const MaskNetParams& shadow) {
    MaskNetParams view = shadow;
    for (ParamRef& ref : param_refs(view)) {
        if (ref.precision.kind == Precision::f32) continue;
        for (std::size_t i = 0; i < ref.size; ++i)
            ref.data[i] = quantize_value(ref.data[i], ref.precision);
    }
    return view;
}

FeatureSeq extract_features(const ComplexSpectrogram& z) {
    const std::size_t num_mics = z.channels();
    FeatureSeq f(z.frames(), z.bins(), num_mics);
    for (std::size_t t = 0; t < z.frames(); ++t) {
        for (std::size_t k = 0; k < z.bins(); ++k) {
            CVector zv = z.bin(k, t);
            double n = std::max(norm2(zv), 1e-12);
            cplx ref = zv[0];
            cplx rot = std::abs(ref) > 0.0 ? std::conj(ref) / std::abs(ref) : cplx(1.0, 0.0);
            for (std::size_t m = 0; m < num_mics; ++m) {
                cplx zbar = zv[m] / n * rot;
                f.at(t, k, m) = zbar.real();
                f.at(t, k, num_mics + m) = zbar.imag();
            }
        }
    }
    return f;
}

namespace {

// One direction of an LSTM over a full sequence, recording every
// intermediate the backward pass needs. Rows of the cache are indexed by the
// actual frame; the backward direction recurs from t+1.
void run_cell(const LstmCellParams& p, const PrecisionSpec& mode, const Mat& x, bool reverse,
              CellCache& cache) {
    const std::size_t num_frames = x.rows;
    const std::size_t h = p.hidden_size;
    const bool fixed = mode.fixed_point();
    const bool bin = mode.kind == Precision::bin1;

    cache.x = x;
    for (Mat* m : {&cache.in_i, &cache.in_f, &cache.in_o, &cache.in_c, &cache.rec_i, &cache.rec_f,
                   &cache.rec_o, &cache.rec_c, &cache.pre_i, &cache.pre_f, &cache.pre_o,
                   &cache.pre_c, &cache.gi, &cache.gf, &cache.go, &cache.gc, &cache.c_raw,
                   &cache.c, &cache.tanh_c, &cache.h})
        *m = Mat(num_frames, h);

    Vec h_prev(h, 0.0), c_prev(h, 0.0);
    for (std::size_t step = 0; step < num_frames; ++step) {
        const std::size_t t = reverse ? num_frames - 1 - step : step;
        const double* xt = x.row(t);

        const Mat* wx[4] = {&p.w_xi, &p.w_xf, &p.w_xo, &p.w_xc};
        const Mat* wh[4] = {&p.w_hi, &p.w_hf, &p.w_ho, &p.w_hc};
        const Vec* b[4] = {&p.b_i, &p.b_f, &p.b_o, &p.b_c};
        Mat* in_cache[4] = {&cache.in_i, &cache.in_f, &cache.in_o, &cache.in_c};
        Mat* rec_cache[4] = {&cache.rec_i, &cache.rec_f, &cache.rec_o, &cache.rec_c};
        Mat* pre_cache[4] = {&cache.pre_i, &cache.pre_f, &cache.pre_o, &cache.pre_c};
        Mat* gate_cache[4] = {&cache.gi, &cache.gf, &cache.go, &cache.gc};

        for (int g = 0; g < 4; ++g) {
            double* in_row = in_cache[g]->row(t);
            double* rec_row = rec_cache[g]->row(t);
            double* pre_row = pre_cache[g]->row(t);
            double* gate_row = gate_cache[g]->row(t);
            matvec_into(*wx[g], xt, in_row);
            matvec_into(*wh[g], h_prev.data(), rec_row);
            for (std::size_t j = 0; j < h; ++j) {
                double in_use = fixed ? clip_fixed_only(in_row[j], mode) : in_row[j];
                double rec_use = rec_row[j];
                if (bin) rec_use *= p.scale[g];
                else if (fixed) rec_use = clip_fixed_only(rec_use, mode);
                double pre = in_use + rec_use + (*b[g])[j];
                pre_row[j] = pre;
                double pre_use = fixed ? clip_fixed_only(pre, mode) : pre;
                double out;
                if (g < 3) {
                    out = bin ? (pre_use >= 0.0 ? 1.0 : 0.0) : sigmoid(pre_use);
                } else {
                    out = bin ? binarize(pre_use) : std::tanh(pre_use);
                }
                if (fixed) out = clip_fixed_only(out, mode);
                gate_row[j] = out;
            }
        }

        for (std::size_t j = 0; j < h; ++j) {
            double c_raw = cache.gf(t, j) * c_prev[j] + cache.gi(t, j) * cache.gc(t, j);
            cache.c_raw(t, j) = c_raw;
            double c = std::clamp(c_raw, -kCellClip, kCellClip);
            if (fixed) c = clip_fixed_only(c, mode);
            cache.c(t, j) = c;
            double tc = bin ? binarize(c) : std::tanh(c);
            if (fixed) tc = clip_fixed_only(tc, mode);
            cache.tanh_c(t, j) = tc;
            double hv = cache.go(t, j) * tc;
            if (fixed) hv = clip_fixed_only(hv, mode);
            cache.h(t, j) = hv;
            h_prev[j] = hv;
            c_prev[j] = c;
        }
    }
}

void run_pipeline(Mat input, const BatchNorm& bn, const PrecisionSpec& mode, bool batch_stats,
                  PipelineCache& cache) {
    const std::size_t num_frames = input.rows;
    const std::size_t features = input.cols;
    cache.input = std::move(input);
    cache.act = Mat(num_frames, features);
    for (std::size_t i = 0; i < cache.input.a.size(); ++i)
        cache.act.a[i] = std::tanh(cache.input.a[i]);

    cache.mean.assign(features, 0.0);
    cache.var.assign(features, 0.0);
    if (batch_stats) {
        for (std::size_t t = 0; t < num_frames; ++t)
            for (std::size_t f = 0; f < features; ++f) cache.mean[f] += cache.act(t, f);
        for (double& m : cache.mean) m /= static_cast<double>(num_frames);
        for (std::size_t t = 0; t < num_frames; ++t)
            for (std::size_t f = 0; f < features; ++f) {
                double d = cache.act(t, f) - cache.mean[f];
                cache.var[f] += d * d;
            }
        for (double& v : cache.var) v /= static_cast<double>(num_frames);
    } else {
        cache.mean = bn.running_mean;
        cache.var = bn.running_var;
    }
    cache.inv_std.resize(features);
    for (std::size_t f = 0; f < features; ++f)
        cache.inv_std[f] = 1.0 / std::sqrt(cache.var[f] + kBnEps);

    cache.xhat = Mat(num_frames, features);
    cache.bn = Mat(num_frames, features);
    cache.out = Mat(num_frames, features);
    for (std::size_t t = 0; t < num_frames; ++t)
        for (std::size_t f = 0; f < features; ++f) {
            double xh = (cache.act(t, f) - cache.mean[f]) * cache.inv_std[f];
            cache.xhat(t, f) = xh;
            double y = bn.gamma[f] * xh + bn.beta[f];
            cache.bn(t, f) = y;
            cache.out(t, f) = clip_mode(y, mode);
        }
}

}  // namespace

void lstm_cell_step(const LstmCellParams& p, const PrecisionSpec& prec, const double* x,
                    LstmState& state) {
    for (double v : state.h)
        if (std::isnan(v)) throw std::invalid_argument("NaN state");
    for (std::size_t i = 0; i < p.input_size; ++i)
        if (std::isnan(x[i])) throw std::invalid_argument("NaN input");

    const bool fixed = prec.fixed_point();
    const bool bin = prec.kind == Precision::bin1;
    const Mat* wx[4] = {&p.w_xi, &p.w_xf, &p.w_xo, &p.w_xc};
    const Mat* wh[4] = {&p.w_hi, &p.w_hf, &p.w_ho, &p.w_hc};
    const Vec* b[4] = {&p.b_i, &p.b_f, &p.b_o, &p.b_c};
    Vec gates[4];
    for (int g = 0; g < 4; ++g) {
        Vec in(p.hidden_size), rec(p.hidden_size);
        matvec_into(*wx[g], x, in.data());
        matvec_into(*wh[g], state.h.data(), rec.data());
        gates[g].resize(p.hidden_size);
        for (std::size_t j = 0; j < p.hidden_size; ++j) {
            double in_use = fixed ? clip_fixed_only(in[j], prec) : in[j];
            double rec_use = rec[j];
            if (bin) rec_use *= p.scale[g];
            else if (fixed) rec_use = clip_fixed_only(rec_use, prec);
            double pre = in_use + rec_use + (*b[g])[j];
            if (fixed) pre = clip_fixed_only(pre, prec);
            double out;
            if (g < 3) out = bin ? (pre >= 0.0 ? 1.0 : 0.0) : sigmoid(pre);
            else out = bin ? binarize(pre) : std::tanh(pre);
            if (fixed) out = clip_fixed_only(out, prec);
            gates[g][j] = out;
        }
    }
    for (std::size_t j = 0; j < p.hidden_size; ++j) {
        double c_raw = gates[1][j] * state.c[j] + gates[0][j] * gates[3][j];
        double c = std::clamp(c_raw, -kCellClip, kCellClip);
        if (fixed) c = clip_fixed_only(c, prec);
        double tc = bin ? binarize(c) : std::tanh(c);
        if (fixed) tc = clip_fixed_only(tc, prec);
        double hv = gates[2][j] * tc;
        if (fixed) hv = clip_fixed_only(hv, prec);
        state.c[j] = c;
        state.h[j] = hv;
    }
}

MaskTriple mask_net_forward_cached(const MaskNetParams& params, const FeatureSeq& features,
                                   ForwardCache& cache, bool batch_stats) {
    if (features.bins != params.bins || features.mics != params.mics)
        throw std::invalid_argument("feature shape does not match network");
    const std::size_t num_frames = features.frames;
    const std::size_t bins = params.bins;
    const std::size_t mics = params.mics;
    const PrecisionSpec mode = params.precision;
    const bool fixed = mode.fixed_point();

    // layer 1: per-bin bidirectional cells
    cache.l1_fwd.resize(bins);
    cache.l1_bwd.resize(bins);
    Mat a1(num_frames, bins * 2 * mics);
    for (std::size_t k = 0; k < bins; ++k) {
        Mat xk(num_frames, 2 * mics);
        for (std::size_t t = 0; t < num_frames; ++t)
            for (std::size_t j = 0; j < 2 * mics; ++j) xk(t, j) = features.at(t, k, j);
        run_cell(params.l1_fwd[k], mode, xk, false, cache.l1_fwd[k]);
        run_cell(params.l1_bwd[k], mode, xk, true, cache.l1_bwd[k]);
        for (std::size_t t = 0; t < num_frames; ++t)
            for (std::size_t d = 0; d < mics; ++d) {
                a1(t, k * 2 * mics + d) = cache.l1_fwd[k].h(t, d);
                a1(t, k * 2 * mics + mics + d) = cache.l1_bwd[k].h(t, d);
            }
    }
    run_pipeline(std::move(a1), params.bn1, mode, batch_stats, cache.p1);

    // layer 2: per-bin per-direction dense M -> 1, concatenated to 2K
    cache.u = Mat(num_frames, 2 * bins);
    cache.u_mm = Mat(num_frames, 2 * bins);
    for (std::size_t t = 0; t < num_frames; ++t) {
        for (std::size_t k = 0; k < bins; ++k) {
            double df = 0.0, db = 0.0;
            for (std::size_t d = 0; d < mics; ++d) {
                df += params.l2_w_fwd(k, d) * cache.p1.out(t, k * 2 * mics + d);
                db += params.l2_w_bwd(k, d) * cache.p1.out(t, k * 2 * mics + mics + d);
            }
            cache.u_mm(t, k) = df;
            cache.u_mm(t, bins + k) = db;
            if (fixed) {
                df = clip_fixed_only(df, mode);
                db = clip_fixed_only(db, mode);
            }
            cache.u(t, k) = df + params.l2_b_fwd[k];
            cache.u(t, bins + k) = db + params.l2_b_bwd[k];
        }
    }
    Mat u_in = cache.u;
    if (fixed)
        for (double& v : u_in.a) v = clip_fixed_only(v, mode);
    run_pipeline(std::move(u_in), params.bn2, mode, batch_stats, cache.p2);

    // layer 3: dense 2K -> K
    cache.v = Mat(num_frames, bins);
    cache.v_mm = Mat(num_frames, bins);
    for (std::size_t t = 0; t < num_frames; ++t) {
        matvec_into(params.l3.w, cache.p2.out.row(t), cache.v_mm.row(t));
        for (std::size_t k = 0; k < bins; ++k) {
            double mm = cache.v_mm(t, k);
            if (fixed) mm = clip_fixed_only(mm, mode);
            cache.v(t, k) = mm + params.l3.b[k];
        }
    }
    Mat v_in = cache.v;
    if (fixed)
        for (double& v : v_in.a) v = clip_fixed_only(v, mode);
    run_pipeline(std::move(v_in), params.bn3, mode, batch_stats, cache.p3);

    // layer 4: full-band bidirectional LSTM
    run_cell(params.l4_fwd, mode, cache.p3.out, false, cache.l4_fwd);
    run_cell(params.l4_bwd, mode, cache.p3.out, true, cache.l4_bwd);
    Mat a4(num_frames, 2 * bins);
    for (std::size_t t = 0; t < num_frames; ++t)
        for (std::size_t k = 0; k < bins; ++k) {
            a4(t, k) = cache.l4_fwd.h(t, k);
            a4(t, bins + k) = cache.l4_bwd.h(t, k);
        }
    run_pipeline(std::move(a4), params.bn4, mode, batch_stats, cache.p4);

    // heads: quantized weights, high-precision accumulation, softmax in full
    // precision
    for (std::size_t i = 0; i < 3; ++i) {
        cache.z[i] = Mat(num_frames, bins);
        for (std::size_t t = 0; t < num_frames; ++t) {
            matvec_into(params.heads[i].w, cache.p4.out.row(t), cache.z[i].row(t));
            for (std::size_t k = 0; k < bins; ++k) cache.z[i](t, k) += params.heads[i].b[k];
        }
    }
    cache.p_est = Mat(num_frames, bins * 3);
    MaskTriple mask(bins, num_frames);
    for (std::size_t t = 0; t < num_frames; ++t) {
        for (std::size_t k = 0; k < bins; ++k) {
            double z0 = cache.z[0](t, k), z1 = cache.z[1](t, k), z2 = cache.z[2](t, k);
            double zmax = std::max({z0, z1, z2});
            double e0 = std::exp(z0 - zmax), e1 = std::exp(z1 - zmax), e2 = std::exp(z2 - zmax);
            double sum = e0 + e1 + e2;
            double p0 = e0 / sum, p1 = e1 / sum, p2 = e2 / sum;
            cache.p_est(t, k * 3 + 0) = p0;
            cache.p_est(t, k * 3 + 1) = p1;
            cache.p_est(t, k * 3 + 2) = p2;
            mask.at(k, t, 0) = p0;
            mask.at(k, t, 1) = p1;
            mask.at(k, t, 2) = p2;
        }
    }
    return mask;
}

void update_running_stats(MaskNetParams& params, const ForwardCache& cache, double momentum) {
    BatchNorm* bns[4] = {&params.bn1, &params.bn2, &params.bn3, &params.bn4};
    const PipelineCache* pcs[4] = {&cache.p1, &cache.p2, &cache.p3, &cache.p4};
    for (int i = 0; i < 4; ++i) {
        BatchNorm& bn = *bns[i];
        const PipelineCache& pc = *pcs[i];
        if (bn.updates == 0) {
            bn.running_mean = pc.mean;
            bn.running_var = pc.var;
        } else {
            for (std::size_t f = 0; f < bn.running_mean.size(); ++f) {
                bn.running_mean[f] = momentum * bn.running_mean[f] + (1.0 - momentum) * pc.mean[f];
                bn.running_var[f] = momentum * bn.running_var[f] + (1.0 - momentum) * pc.var[f];
            }
        }
        ++bn.updates;
    }
}

MaskTriple mask_net_forward(const MaskNetParams& params, const FeatureSeq& features) {
    ForwardCache cache;
    return mask_net_forward_cached(params, features, cache, false);
}

namespace {

double round_mac_e6(double mac) {
    double e6 = mac / 1e6;
    return e6 < 1.0 ? std::round(e6 * 10.0) / 10.0 : std::round(e6);
}

std::string format_e6(double v) {
    std::ostringstream out;
    out << v;
    return out.str();
}

}  // namespace

ComplexityReport complexity_report(std::size_t mics, std::size_t bins, std::size_t frames) {
    if (mics == 0 || bins == 0 || frames == 0)
        throw std::invalid_argument("dimensions must be positive");
    const double m = static_cast<double>(mics);
    const double k = static_cast<double>(bins);
    const double t = static_cast<double>(frames);

    ComplexityReport r;
    auto add = [&](const std::string& layer, const std::string& shape, double weights) {
        ComplexityRow row;
        row.layer = layer;
        row.shape = shape;
        row.weights = static_cast<long long>(weights);
        row.mac_e6 = round_mac_e6(weights * t);
        r.mask_layers.push_back(row);
        r.total_weights += row.weights;
        r.total_mac_e6 += row.mac_e6;
    };
    add("BLSTM", "16*K*2M*M", 16.0 * k * 2.0 * m * m);
    add("Dense", "K*M*2", k * m * 2.0);
    add("Dense", "2K*K", 2.0 * k * k);
    add("BLSTM", "16*K*2K", 16.0 * k * 2.0 * k);
    add("Dense", "3*2K*K", 3.0 * 2.0 * k * k);

    r.static_eq10_e6 = round_mac_e6(t * 2.0 * k * m * m);
    r.static_eq9_e6 = round_mac_e6(k * m * m * m);
    r.static_total_e6 = r.static_eq10_e6 + r.static_eq9_e6;
    r.dynamic_eq10_e6 = r.static_eq10_e6;
    r.dynamic_eq9_e6 = round_mac_e6(t * k * m * m * m);
    r.dynamic_total_e6 = r.dynamic_eq10_e6 + r.dynamic_eq9_e6;
    return r;
}

std::string complexity_table(const ComplexityReport& r) {
    std::ostringstream out;
    out << "layer,shape,weights,mac_e6\n";
    for (const ComplexityRow& row : r.mask_layers)
        out << row.layer << "," << row.shape << "," << row.weights << ","
            << format_e6(row.mac_e6) << "\n";
    out << "total,," << r.total_weights << "," << format_e6(r.total_mac_e6) << "\n";
    out << "beamformer,mode,term,mac_e6\n";
    out << "beamformer,static,eq10," << format_e6(r.static_eq10_e6) << "\n";
    out << "beamformer,static,eq9," << format_e6(r.static_eq9_e6) << "\n";
    out << "beamformer,static,total," << format_e6(r.static_total_e6) << "\n";
    out << "beamformer,dynamic,eq10," << format_e6(r.dynamic_eq10_e6) << "\n";
    out << "beamformer,dynamic,eq9," << format_e6(r.dynamic_eq9_e6) << "\n";
    out << "beamformer,dynamic,total," << format_e6(r.dynamic_total_e6) << "\n";
    return out.str();
}

}  // namespace mcse
