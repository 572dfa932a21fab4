// training.cpp
#include "mcse/training.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mcse {

namespace {

constexpr double kCeGuard = 1e-12;
constexpr double kCellClip = 8.0;

bool fixed_in_range(double x, const PrecisionSpec& spec) {
    double scaled = x / spec.step();
    double rounded = scaled >= 0.0 ? std::floor(scaled + 0.5) : std::ceil(scaled - 0.5);
    return rounded >= spec.code_min() && rounded <= spec.code_max();
}

// STE gate through the inter-layer precision clip evaluated at the pre-clip
// value: clamp window for fixed point, identity for f32 and bin1 (their
// inter-layer values are not clipped).
double clip_gate(double pre_clip_value, const PrecisionSpec& spec) {
    switch (spec.kind) {
        case Precision::f32:
        case Precision::bin1: return 1.0;
        case Precision::q2_6:
        case Precision::q2_2: return fixed_in_range(pre_clip_value, spec) ? 1.0 : 0.0;
    }
    return 1.0;
}

}  // namespace

double cross_entropy(const MaskTriple& p_est, const MaskTriple& p_opt) {
    if (p_est.bins != p_opt.bins || p_est.frames != p_opt.frames)
        throw std::invalid_argument("mask shape mismatch");
    double loss = 0.0;
    for (std::size_t i = 0; i < p_est.values.size(); ++i)
        loss -= p_opt.values[i] * std::log(p_est.values[i] + kCeGuard);
    return loss / static_cast<double>(p_est.bins * p_est.frames);
}

AdamState AdamState::init(MaskNetParams& shadow, double learn_rate) {
    AdamState s;
    s.learn_rate = learn_rate;
    for (const ParamRef& ref : param_refs(shadow)) {
        s.m.emplace_back(ref.size, 0.0);
        s.v.emplace_back(ref.size, 0.0);
    }
    return s;
}

MaskNetParams zeros_like(const MaskNetParams& p) {
    MaskNetParams z = MaskNetParams::sized(p.bins, p.mics, p.precision);
    for (ParamRef& ref : param_refs(z)) std::fill(ref.data, ref.data + ref.size, 0.0);
    // gamma defaults to 1 in sized(); gradients must start at zero
    std::fill(z.bn1.gamma.begin(), z.bn1.gamma.end(), 0.0);
    std::fill(z.bn2.gamma.begin(), z.bn2.gamma.end(), 0.0);
    std::fill(z.bn3.gamma.begin(), z.bn3.gamma.end(), 0.0);
    std::fill(z.bn4.gamma.begin(), z.bn4.gamma.end(), 0.0);
    auto clear_cell = [](LstmCellParams& c) { c.scale = {0.0, 0.0, 0.0, 0.0}; };
    for (LstmCellParams& c : z.l1_fwd) clear_cell(c);
    for (LstmCellParams& c : z.l1_bwd) clear_cell(c);
    clear_cell(z.l4_fwd);
    clear_cell(z.l4_bwd);
    return z;
}

namespace {

// backward through one tanh -> batch-norm -> clip pipeline; returns the
// gradient w.r.t. the pipeline input and accumulates gamma/beta gradients
Mat pipeline_backward(const Mat& dout, const PipelineCache& pc, const BatchNorm& bn,
                      Vec& dgamma, Vec& dbeta, const PrecisionSpec& mode) {
    const std::size_t num_frames = pc.input.rows;
    const std::size_t features = pc.input.cols;
    const double n = static_cast<double>(num_frames);

    Mat dbn(num_frames, features);
    for (std::size_t t = 0; t < num_frames; ++t)
        for (std::size_t f = 0; f < features; ++f)
            dbn(t, f) = dout(t, f) * clip_gate(pc.bn(t, f), mode);

    Vec sum_dxhat(features, 0.0), sum_dxhat_xhat(features, 0.0);
    for (std::size_t t = 0; t < num_frames; ++t)
        for (std::size_t f = 0; f < features; ++f) {
            double d = dbn(t, f);
            dgamma[f] += d * pc.xhat(t, f);
            dbeta[f] += d;
            double dxh = d * bn.gamma[f];
            sum_dxhat[f] += dxh;
            sum_dxhat_xhat[f] += dxh * pc.xhat(t, f);
        }

    // batch statistics backward (population variance over the utterance)
    Mat din(num_frames, features);
    for (std::size_t t = 0; t < num_frames; ++t)
        for (std::size_t f = 0; f < features; ++f) {
            double dxh = dbn(t, f) * bn.gamma[f];
            double dact = pc.inv_std[f] *
                          (dxh - sum_dxhat[f] / n - pc.xhat(t, f) * sum_dxhat_xhat[f] / n);
            double act = pc.act(t, f);
            din(t, f) = dact * (1.0 - act * act);
        }
    return din;
}

// backward through one LSTM direction; accumulates parameter gradients into
// `g` and input gradients into `dx`
void cell_backward(const LstmCellParams& p, const CellCache& cc, const Mat& dh_ext, bool reverse,
                   const PrecisionSpec& mode, LstmCellParams& g, Mat& dx) {
    const std::size_t num_frames = cc.h.rows;
    const std::size_t h = p.hidden_size;
    const bool fixed = mode.fixed_point();
    const bool bin = mode.kind == Precision::bin1;

    Vec dh_rec(h, 0.0), dc_rec(h, 0.0);
    Vec dh(h), dc(h), dpre(h);
    const Mat* wx[4] = {&p.w_xi, &p.w_xf, &p.w_xo, &p.w_xc};
    const Mat* wh[4] = {&p.w_hi, &p.w_hf, &p.w_ho, &p.w_hc};
    Mat* gwx[4] = {&g.w_xi, &g.w_xf, &g.w_xo, &g.w_xc};
    Mat* gwh[4] = {&g.w_hi, &g.w_hf, &g.w_ho, &g.w_hc};
    Vec* gb[4] = {&g.b_i, &g.b_f, &g.b_o, &g.b_c};
    const Mat* pre[4] = {&cc.pre_i, &cc.pre_f, &cc.pre_o, &cc.pre_c};
    const Mat* in_raw[4] = {&cc.in_i, &cc.in_f, &cc.in_o, &cc.in_c};
    const Mat* rec_raw[4] = {&cc.rec_i, &cc.rec_f, &cc.rec_o, &cc.rec_c};
    const Mat* gate[4] = {&cc.gi, &cc.gf, &cc.go, &cc.gc};

    for (std::size_t step = 0; step < num_frames; ++step) {
        // reverse of the processing order
        const std::size_t t = reverse ? step : num_frames - 1 - step;
        const bool has_prev = reverse ? (t + 1 < num_frames) : (t > 0);
        const std::size_t t_prev = reverse ? t + 1 : t - 1;

        for (std::size_t j = 0; j < h; ++j) {
            dh[j] = dh_ext(t, j) + dh_rec[j];
            dc[j] = dc_rec[j];
            dh_rec[j] = 0.0;
            dc_rec[j] = 0.0;
        }

        // h = o * tanh_c (fixed-point re-quantization passes via STE)
        Vec dgate_o(h), dtc(h);
        for (std::size_t j = 0; j < h; ++j) {
            dgate_o[j] = dh[j] * cc.tanh_c(t, j);
            dtc[j] = dh[j] * cc.go(t, j);
        }
        for (std::size_t j = 0; j < h; ++j) {
            if (bin)
                dc[j] += dtc[j] * (std::abs(cc.c(t, j)) <= 1.0 ? 1.0 : 0.0);
            else {
                double tc = cc.tanh_c(t, j);
                dc[j] += dtc[j] * (1.0 - tc * tc);
            }
            // cell clip: fixed saturation bound is tighter than +/-8
            double craw = cc.c_raw(t, j);
            double gate_c = fixed ? (fixed_in_range(craw, mode) ? 1.0 : 0.0)
                                  : (std::abs(craw) < kCellClip ? 1.0 : 0.0);
            dc[j] *= gate_c;
        }

        Vec dgate_i(h), dgate_f(h), dgate_g(h);
        for (std::size_t j = 0; j < h; ++j) {
            double c_prev = has_prev ? cc.c(t_prev, j) : 0.0;
            dgate_f[j] = dc[j] * c_prev;
            dgate_i[j] = dc[j] * cc.gc(t, j);
            dgate_g[j] = dc[j] * cc.gi(t, j);
            dc_rec[j] = dc[j] * cc.gf(t, j);
        }

        const Vec* dgates[4] = {&dgate_i, &dgate_f, &dgate_o, &dgate_g};
        for (int gi = 0; gi < 4; ++gi) {
            for (std::size_t j = 0; j < h; ++j) {
                double dg = (*dgates[gi])[j];
                double pre_v = (*pre[gi])(t, j);
                if (bin) {
                    dpre[j] = dg * (std::abs(pre_v) <= 1.0 ? 1.0 : 0.0);
                } else if (gi < 3) {
                    double s = (*gate[gi])(t, j);
                    dpre[j] = dg * s * (1.0 - s);
                } else {
                    double tv = (*gate[gi])(t, j);
                    dpre[j] = dg * (1.0 - tv * tv);
                }
                if (fixed && !fixed_in_range(pre_v, mode)) dpre[j] = 0.0;
            }

            for (std::size_t j = 0; j < h; ++j) {
                double d = dpre[j];
                if (d == 0.0) continue;
                (*gb[gi])[j] += d;
                double din = d, drec = d;
                if (fixed) {
                    if (!fixed_in_range((*in_raw[gi])(t, j), mode)) din = 0.0;
                    if (!fixed_in_range((*rec_raw[gi])(t, j), mode)) drec = 0.0;
                } else if (bin) {
                    g.scale[gi] += d * (*rec_raw[gi])(t, j);
                    drec = d * p.scale[gi];
                }
                // input path
                if (din != 0.0) {
                    const double* xt = cc.x.row(t);
                    double* gw = gwx[gi]->row(j);
                    for (std::size_t i = 0; i < p.input_size; ++i) gw[i] += din * xt[i];
                    const double* wrow = wx[gi]->row(j);
                    double* dxt = dx.row(t);
                    for (std::size_t i = 0; i < p.input_size; ++i) dxt[i] += din * wrow[i];
                }
                // recurrent path
                if (drec != 0.0 && has_prev) {
                    const double* hp = cc.h.row(t_prev);
                    double* gw = gwh[gi]->row(j);
                    for (std::size_t i = 0; i < h; ++i) gw[i] += drec * hp[i];
                    const double* wrow = wh[gi]->row(j);
                    for (std::size_t i = 0; i < h; ++i) dh_rec[i] += drec * wrow[i];
                }
            }
        }
    }
}

}  // namespace

MaskNetParams mask_net_backward(const MaskNetParams& view, const ForwardCache& cache,
                                const MaskTriple& target) {
    const std::size_t num_frames = cache.p_est.rows;
    const std::size_t bins = view.bins;
    const std::size_t mics = view.mics;
    const PrecisionSpec mode = view.precision;
    const bool fixed = mode.fixed_point();
    const double scale = 1.0 / static_cast<double>(bins * num_frames);

    MaskNetParams grads = zeros_like(view);

    // softmax + cross-entropy
    std::array<Mat, 3> dz;
    for (Mat& m : dz) m = Mat(num_frames, bins);
    for (std::size_t t = 0; t < num_frames; ++t)
        for (std::size_t k = 0; k < bins; ++k) {
            double s = 0.0;
            for (std::size_t i = 0; i < 3; ++i) {
                double pi = cache.p_est(t, k * 3 + i);
                s += target.at(k, t, i) * pi / (pi + kCeGuard);
            }
            for (std::size_t i = 0; i < 3; ++i) {
                double pi = cache.p_est(t, k * 3 + i);
                dz[i](t, k) = scale * (pi * s - target.at(k, t, i) * pi / (pi + kCeGuard));
            }
        }

    // heads
    Mat dp4(num_frames, 2 * bins);
    for (std::size_t i = 0; i < 3; ++i) {
        const Mat& w = view.heads[i].w;
        for (std::size_t t = 0; t < num_frames; ++t) {
            const double* p4row = cache.p4.out.row(t);
            for (std::size_t k = 0; k < bins; ++k) {
                double d = dz[i](t, k);
                if (d == 0.0) continue;
                grads.heads[i].b[k] += d;
                double* gw = grads.heads[i].w.row(k);
                const double* wrow = w.row(k);
                double* dp = dp4.row(t);
                for (std::size_t j = 0; j < 2 * bins; ++j) {
                    gw[j] += d * p4row[j];
                    dp[j] += d * wrow[j];
                }
            }
        }
    }

    // pipeline 4 and layer 4
    Mat da4 = pipeline_backward(dp4, cache.p4, view.bn4, grads.bn4.gamma, grads.bn4.beta, mode);
    Mat dh4f(num_frames, bins), dh4b(num_frames, bins);
    for (std::size_t t = 0; t < num_frames; ++t)
        for (std::size_t k = 0; k < bins; ++k) {
            dh4f(t, k) = da4(t, k);
            dh4b(t, k) = da4(t, bins + k);
        }
    Mat dp3(num_frames, bins);
    cell_backward(view.l4_fwd, cache.l4_fwd, dh4f, false, mode, grads.l4_fwd, dp3);
    cell_backward(view.l4_bwd, cache.l4_bwd, dh4b, true, mode, grads.l4_bwd, dp3);

    // pipeline 3 and layer 3
    Mat dv = pipeline_backward(dp3, cache.p3, view.bn3, grads.bn3.gamma, grads.bn3.beta, mode);
    Mat dp2(num_frames, 2 * bins);
    for (std::size_t t = 0; t < num_frames; ++t) {
        const double* p2row = cache.p2.out.row(t);
        for (std::size_t k = 0; k < bins; ++k) {
            double d = dv(t, k);
            if (fixed) d *= clip_gate(cache.v(t, k), mode);  // clip before tanh
            if (d == 0.0) continue;
            grads.l3.b[k] += d;
            double dmm = d;
            if (fixed && !fixed_in_range(cache.v_mm(t, k), mode)) dmm = 0.0;
            if (dmm == 0.0) continue;
            double* gw = grads.l3.w.row(k);
            const double* wrow = view.l3.w.row(k);
            double* dp = dp2.row(t);
            for (std::size_t j = 0; j < 2 * bins; ++j) {
                gw[j] += dmm * p2row[j];
                dp[j] += dmm * wrow[j];
            }
        }
    }

    // pipeline 2 and layer 2
    Mat du = pipeline_backward(dp2, cache.p2, view.bn2, grads.bn2.gamma, grads.bn2.beta, mode);
    Mat dp1(num_frames, bins * 2 * mics);
    for (std::size_t t = 0; t < num_frames; ++t) {
        for (std::size_t k = 0; k < bins; ++k) {
            double df = du(t, k);
            double db = du(t, bins + k);
            if (fixed) {
                df *= clip_gate(cache.u(t, k), mode);
                db *= clip_gate(cache.u(t, bins + k), mode);
            }
            if (df != 0.0) {
                grads.l2_b_fwd[k] += df;
                double dmm = fixed && !fixed_in_range(cache.u_mm(t, k), mode) ? 0.0 : df;
                for (std::size_t d = 0; d < mics && dmm != 0.0; ++d) {
                    grads.l2_w_fwd(k, d) += dmm * cache.p1.out(t, k * 2 * mics + d);
                    dp1(t, k * 2 * mics + d) += dmm * view.l2_w_fwd(k, d);
                }
            }
            if (db != 0.0) {
                grads.l2_b_bwd[k] += db;
                double dmm = fixed && !fixed_in_range(cache.u_mm(t, bins + k), mode) ? 0.0 : db;
                for (std::size_t d = 0; d < mics && dmm != 0.0; ++d) {
                    grads.l2_w_bwd(k, d) += dmm * cache.p1.out(t, k * 2 * mics + mics + d);
                    dp1(t, k * 2 * mics + mics + d) += dmm * view.l2_w_bwd(k, d);
                }
            }
        }
    }

    // pipeline 1 and layer 1
    Mat da1 = pipeline_backward(dp1, cache.p1, view.bn1, grads.bn1.gamma, grads.bn1.beta, mode);
    for (std::size_t k = 0; k < bins; ++k) {
        Mat dhf(num_frames, mics), dhb(num_frames, mics);
        for (std::size_t t = 0; t < num_frames; ++t)
            for (std::size_t d = 0; d < mics; ++d) {
                dhf(t, d) = da1(t, k * 2 * mics + d);
                dhb(t, d) = da1(t, k * 2 * mics + mics + d);
            }
        Mat dx(num_frames, 2 * mics);  // feature gradients, unused
        cell_backward(view.l1_fwd[k], cache.l1_fwd[k], dhf, false, mode, grads.l1_fwd[k], dx);
        cell_backward(view.l1_bwd[k], cache.l1_bwd[k], dhb, true, mode, grads.l1_bwd[k], dx);
    }
    return grads;
}

void ste_gate(MaskNetParams& shadow, MaskNetParams& grads) {
    std::vector<ParamRef> srefs = param_refs(shadow);
    std::vector<ParamRef> grefs = param_refs(grads);
    for (std::size_t i = 0; i < srefs.size(); ++i) {
        const PrecisionSpec& prec = srefs[i].precision;
        if (prec.kind == Precision::f32) continue;
        for (std::size_t j = 0; j < srefs[i].size; ++j) {
            double w = srefs[i].data[j];
            bool pass = prec.kind == Precision::bin1 ? std::abs(w) <= 1.0
                                                     : fixed_in_range(w, prec);
            if (!pass) grefs[i].data[j] = 0.0;
        }
    }
}

double compute_loss(const MaskNetParams& view, const FeatureSeq& x, const MaskTriple& y,
                    bool batch_stats) {
    ForwardCache cache;
    MaskTriple est = mask_net_forward_cached(view, x, cache, batch_stats);
    return cross_entropy(est, y);
}

MaskNetParams compute_gradients(const MaskNetParams& shadow, const FeatureSeq& x,
                                const MaskTriple& y, double* loss_out) {
    MaskNetParams view = quantize_view(shadow);
    ForwardCache cache;
    MaskTriple est = mask_net_forward_cached(view, x, cache, true);
    if (loss_out) *loss_out = cross_entropy(est, y);
    MaskNetParams grads = mask_net_backward(view, cache, y);
    MaskNetParams shadow_copy = shadow;
    ste_gate(shadow_copy, grads);
    return grads;
}

void adam_step(AdamState& state, MaskNetParams& shadow, MaskNetParams& grads,
               MaskNetParams& view) {
    std::vector<ParamRef> srefs = param_refs(shadow);
    std::vector<ParamRef> grefs = param_refs(grads);
    if (state.m.size() != srefs.size()) throw std::invalid_argument("adam state shape mismatch");
    ++state.step;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
    for (std::size_t i = 0; i < srefs.size(); ++i) {
        for (std::size_t j = 0; j < srefs[i].size; ++j) {
            double g = grefs[i].data[j];
            double& m = state.m[i][j];
            double& v = state.v[i][j];
            m = state.beta1 * m + (1.0 - state.beta1) * g;
            v = state.beta2 * v + (1.0 - state.beta2) * g * g;
            double mhat = m / bc1;
            double vhat = v / bc2;
            srefs[i].data[j] -= state.learn_rate * mhat / (std::sqrt(vhat) + state.eps);
        }
    }
    view = quantize_view(shadow);
}

double evaluate(const MaskNetParams& view, const std::vector<Utterance>& set) {
    if (set.empty()) throw std::invalid_argument("empty evaluation set");
    double sum = 0.0;
    for (const Utterance& utt : set)
        sum += cross_entropy(mask_net_forward(view, utt.features), utt.target);
    return sum / static_cast<double>(set.size());
}

TrainResult train(const TrainConfig& cfg, const Dataset& data) {
    if (data.train.empty()) throw std::invalid_argument("empty dataset");
    if (cfg.validation_period == 0) throw std::invalid_argument("validation period must be > 0");

    const std::size_t bins = data.train[0].features.bins;
    const std::size_t mics = data.train[0].features.mics;
    MaskNetParams shadow = MaskNetParams::sized(bins, mics, cfg.precision);
    Rng rng(cfg.seed);
    shadow.init_random(rng);
    MaskNetParams view = quantize_view(shadow);
    AdamState adam = AdamState::init(shadow, cfg.learn_rate);

    TrainResult result;
    result.best_shadow = shadow;
    result.best_view = view;
    int bad_evals = 0;
    const int stop_after = std::max(cfg.patience, 1);

    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        double train_loss = 0.0;
        for (const Utterance& utt : data.train) {
            ForwardCache cache;
            MaskTriple est = mask_net_forward_cached(view, utt.features, cache, true);
            train_loss += cross_entropy(est, utt.target);
            MaskNetParams grads = mask_net_backward(view, cache, utt.target);
            ste_gate(shadow, grads);
            update_running_stats(shadow, cache);
            adam_step(adam, shadow, grads, view);
        }
        train_loss /= static_cast<double>(data.train.size());

        LossPoint point;
        point.epoch = epoch;
        point.train_loss = train_loss;
        if (epoch % cfg.validation_period == 0 && !data.validation.empty()) {
            point.val_loss = evaluate(view, data.validation);
            point.has_val = true;
            // improvements below rounding noise do not reset the patience
            if (point.val_loss < result.best_val - 1e-12) {
                result.best_val = point.val_loss;
                result.best_epoch = epoch;
                result.best_shadow = shadow;
                result.best_view = view;
                bad_evals = 0;
            } else {
                ++bad_evals;
            }
        }
        result.curve.push_back(point);
        if (point.has_val && bad_evals >= stop_after) break;
    }
    if (result.best_epoch == 0) {  // never evaluated: keep the final state
        result.best_shadow = shadow;
        result.best_view = view;
    }
    return result;
}

std::string loss_curve_csv(const std::vector<LossPoint>& curve) {
    std::ostringstream out;
    out << "epoch,train_loss,val_loss\n";
    for (const LossPoint& p : curve) {
        out << p.epoch << "," << p.train_loss << ",";
        if (p.has_val) out << p.val_loss;
        out << "\n";
    }
    return out.str();
}

}  // namespace mcse
