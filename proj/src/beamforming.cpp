// beamforming.cpp
#include "mcse/beamforming.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mcse {

CMatrix psd_block_bin(const ComplexSpectrogram& z, std::size_t k, const std::vector<double>& mask,
                      std::size_t t, std::size_t window_frames) {
    if (window_frames == 0) throw std::invalid_argument("window length must be >= 1");
    if (mask.size() != z.bins() * z.frames()) throw std::invalid_argument("mask shape mismatch");
    const std::size_t num_frames = z.frames();
    const long long half = static_cast<long long>(window_frames) / 2;
    const long long lo = std::max<long long>(0, static_cast<long long>(t) - half);
    const long long hi = std::min<long long>(static_cast<long long>(num_frames),
                                             static_cast<long long>(t) - half +
                                                 static_cast<long long>(window_frames));

    CMatrix phi(z.channels(), z.channels());
    for (long long l = lo; l < hi; ++l) {
        double m = mask[k * num_frames + static_cast<std::size_t>(l)];
        if (m == 0.0) continue;
        CVector zv = z.bin(k, static_cast<std::size_t>(l));
        for (std::size_t i = 0; i < zv.size(); ++i)
            for (std::size_t j = 0; j < zv.size(); ++j)
                phi(i, j) += zv[i] * std::conj(zv[j]) * m;
    }
    phi *= 1.0 / static_cast<double>(window_frames);
    return phi;
}

std::vector<CMatrix> psd_block(const ComplexSpectrogram& z, const std::vector<double>& mask,
                               std::size_t t, std::size_t window_frames) {
    std::vector<CMatrix> out;
    out.reserve(z.bins());
    for (std::size_t k = 0; k < z.bins(); ++k)
        out.push_back(psd_block_bin(z, k, mask, t, window_frames));
    return out;
}

CMatrix psd_recursive(const CMatrix& phi_prev, const CVector& z_t, double p_t) {
    if (p_t < 0.0 || p_t > 1.0) throw std::invalid_argument("mask value outside [0,1]");
    if (phi_prev.rows() != z_t.size()) throw std::invalid_argument("psd shape mismatch");
    CMatrix phi = phi_prev;
    phi *= (1.0 - p_t);
    for (std::size_t i = 0; i < z_t.size(); ++i)
        for (std::size_t j = 0; j < z_t.size(); ++j)
            phi(i, j) += z_t[i] * std::conj(z_t[j]) * p_t;
    return phi;
}

namespace {

// rotate so that the first component with non-negligible magnitude is real
// positive; keeps eigenvector phases reproducible
CVector fix_phase(CVector v) {
    double scale = norm2(v);
    for (const cplx& c : v) {
        if (std::abs(c) > 1e-9 * scale) {
            cplx rot = std::conj(c) / std::abs(c);
            for (cplx& x : v) x *= rot;
            break;
        }
    }
    return v;
}

}  // namespace

CVector steering_vector(const CMatrix& phi_ss) {
    if (phi_ss.frobenius() == 0.0) throw std::runtime_error("degenerate PSD");
    Evd evd = jacobi_evd(phi_ss);
    const std::size_t n = phi_ss.rows();
    CVector v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = evd.vectors(i, n - 1);
    return fix_phase(normalized(v));
}

CVector mvdr_weights(const CMatrix& phi_nn, const CVector& v_s) {
    CMatrix loaded = diag_load(phi_nn, kDiagLoadDelta);
    CMatrix l;
    try {
        l = cholesky(loaded);
    } catch (const std::runtime_error&) {
        throw std::runtime_error("singular noise PSD");
    }
    CVector num = solve_cholesky(l, v_s);
    cplx denom = vdot(v_s, num);
    if (std::abs(denom) == 0.0) throw std::runtime_error("singular noise PSD");
    CVector w(num.size());
    for (std::size_t i = 0; i < num.size(); ++i) w[i] = num[i] / std::real(denom);
    return w;
}

GevResult gev_weights(const CMatrix& phi_ss, const CMatrix& phi_nn) {
    CMatrix loaded = diag_load(phi_nn, kDiagLoadDelta);
    Gevd g;
    try {
        g = gevd(phi_ss, loaded);
    } catch (const std::runtime_error&) {
        throw std::runtime_error("singular noise PSD");
    }
    const std::size_t n = phi_ss.rows();
    GevResult out;
    out.w.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.w[i] = g.vectors(i, n - 1);
    out.w = fix_phase(normalized(out.w));
    double num = std::real(vdot(out.w, matvec(phi_ss, out.w)));
    double den = std::real(vdot(out.w, matvec(loaded, out.w)));
    out.xi = num / den;
    return out;
}

OjaState OjaState::init(const CVector& w0, double alpha) {
    OjaState s;
    s.w_unnorm = w0;
    s.w = normalized(w0);
    s.alpha = alpha;
    return s;
}

CVector oja_step(OjaState& state, const CMatrix& phi_ss, const CMatrix& phi_nn) {
    double tr = std::real(phi_ss.trace()) + std::real(phi_nn.trace());
    if (tr <= 0.0 || state.alpha == 0.0) return state.w;
    const double a = state.alpha / tr;

    CVector damp = matvec(phi_nn, state.w_unnorm);
    CVector drive = matvec(phi_ss, state.w);
    for (std::size_t i = 0; i < state.w_unnorm.size(); ++i)
        state.w_unnorm[i] += -a * damp[i] + a * drive[i];

    double n = norm2(state.w_unnorm);
    if (n < 1e-150) {
        state.w_unnorm = state.w;  // renormalization guard
        ++state.underflow_resets;
        return state.w;
    }
    state.w = state.w_unnorm;
    for (cplx& v : state.w) v /= n;
    return state.w;
}

CVector oja_step_ev(OjaState& state, const CMatrix& phi_ss) {
    double tr = std::real(phi_ss.trace());
    if (tr <= 0.0 || state.alpha == 0.0) return state.w;
    const double a = state.alpha / tr;

    CVector drive = matvec(phi_ss, state.w);
    for (std::size_t i = 0; i < state.w_unnorm.size(); ++i)
        state.w_unnorm[i] += a * (drive[i] - state.w_unnorm[i]);

    double n = norm2(state.w_unnorm);
    if (n < 1e-150) {
        state.w_unnorm = state.w;
        ++state.underflow_resets;
        return state.w;
    }
    state.w = state.w_unnorm;
    for (cplx& v : state.w) v /= n;
    return state.w;
}

double postfilter_ban(const CVector& w, const CMatrix& phi_nn) {
    const double m = static_cast<double>(w.size());
    CVector pw = matvec(phi_nn, w);
    double num = std::sqrt(std::real(vdot(pw, pw)) / m);  // w^H Phi Phi w / M
    double den = std::real(vdot(w, pw));
    if (den <= 0.0) throw std::runtime_error("noise PSD not positive along w");
    return num / den;
}

double postfilter_pan(const CVector& w, const ComplexSpectrogram& z, std::size_t k) {
    if (k >= z.bins()) throw std::invalid_argument("bin index out of range");
    const double m = static_cast<double>(z.channels());
    double mean_in = 0.0, mean_out = 0.0;
    for (std::size_t t = 0; t < z.frames(); ++t) {
        CVector zv = z.bin(k, t);
        double n = norm2(zv);
        mean_in += n * n;
        mean_out += std::norm(vdot(w, zv));
    }
    if (mean_out == 0.0) throw std::runtime_error("beamformer output has no energy at bin");
    return std::sqrt(mean_in / (m * mean_out));
}

ComplexSpectrogram filter_and_sum(const BeamformerWeights& weights, const ComplexSpectrogram& z) {
    if (weights.w.size() != z.bins()) throw std::invalid_argument("weights per-bin count mismatch");
    ComplexSpectrogram y(1, z.bins(), z.frames(), z.config());
    for (std::size_t k = 0; k < z.bins(); ++k) {
        double gain =
            weights.postfilter_gain.empty() ? 1.0 : weights.postfilter_gain[k];
        for (std::size_t t = 0; t < z.frames(); ++t)
            y.at(0, k, t) = gain * vdot(weights.w[k], z.bin(k, t));
    }
    return y;
}

}  // namespace mcse
