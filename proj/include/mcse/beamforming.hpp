// beamforming.hpp — mask-driven spatial statistics, MVDR/GEV weights,
// recursive Oja tracking and the BAN/PAN postfilters.
#pragma once

#include <cstddef>
#include <vector>

#include "mcse/linalg.hpp"
#include "mcse/stft.hpp"

namespace mcse {

// Diagonal loading applied before every inversion of a noise PSD:
// phi + kDiagLoadDelta * tr(phi)/M * I. Masked estimates can be rank
// deficient; the GEV/MVDR solvers below always operate on the loaded matrix.
inline constexpr double kDiagLoadDelta = 1e-6;

struct PsdPair {
    std::vector<CMatrix> phi_ss;  // per bin, M x M Hermitian
    std::vector<CMatrix> phi_nn;
    std::size_t last_frame = 0;
};

enum class BeamformerKind { mvdr, gev_ban, gev_pan };

struct BeamformerWeights {
    std::vector<CVector> w;             // per bin
    std::vector<double> postfilter_gain;  // per bin, 1.0 when unused
    BeamformerKind kind = BeamformerKind::mvdr;
};

// Block PSD estimate at frame t over a length-L window [t-L/2, t+L/2)
// clipped to [0, T): (1/L) sum_l Z(k,l) Z^H(k,l) mask(k,l).
// `mask` is a K x T plane (frames contiguous per bin).
CMatrix psd_block_bin(const ComplexSpectrogram& z, std::size_t k, const std::vector<double>& mask,
                      std::size_t t, std::size_t window_frames);
std::vector<CMatrix> psd_block(const ComplexSpectrogram& z, const std::vector<double>& mask,
                               std::size_t t, std::size_t window_frames);

// phi <- phi_prev * (1 - p) + z z^H * p
CMatrix psd_recursive(const CMatrix& phi_prev, const CVector& z_t, double p_t);

// Dominant eigenvector of a Hermitian PSD matrix, unit norm, phase fixed so
// the first component of non-negligible magnitude is real positive.
CVector steering_vector(const CMatrix& phi_ss);

// W = Phi_NN^{-1} v / (v^H Phi_NN^{-1} v) with diagonal loading applied first.
CVector mvdr_weights(const CMatrix& phi_nn, const CVector& v_s);

// Dominant generalized eigenvector of (Phi_SS, loaded Phi_NN), unit norm,
// and its SNR Rayleigh quotient (equal to the dominant eigenvalue).
struct GevResult {
    CVector w;
    double xi = 0.0;
};
GevResult gev_weights(const CMatrix& phi_ss, const CMatrix& phi_nn);

// Recursive eigenvector tracking state. `alpha` is a base rate; each step
// uses alpha / tr(inputs) so the update is scale free.
struct OjaState {
    CVector w_unnorm;  // W'
    CVector w;         // last normalized weight
    double alpha = 0.1;
    int underflow_resets = 0;

    static OjaState init(const CVector& w0, double alpha = 0.1);
};

// W' <- W' - a Phi_NN W' + a Phi_SS W, then W = W'/||W'||; returns W.
CVector oja_step(OjaState& state, const CMatrix& phi_ss, const CMatrix& phi_nn);

// Steering-vector tracking for MVDR: W' <- W' + a (Phi_SS W - W').
CVector oja_step_ev(OjaState& state, const CMatrix& phi_ss);

// Blind analytic normalization: sqrt(W^H Phi Phi W / M) / (W^H Phi W).
double postfilter_ban(const CVector& w, const CMatrix& phi_nn);

// Power-average normalization over the utterance at bin k:
// sqrt(mean_t ||Z(k,t)||^2 / (M * mean_t |W^H Z(k,t)|^2)).
double postfilter_pan(const CVector& w, const ComplexSpectrogram& z, std::size_t k);

// Y(k,t) = gain(k) * W^H(k) Z(k,t)
ComplexSpectrogram filter_and_sum(const BeamformerWeights& weights, const ComplexSpectrogram& z);

}  // namespace mcse
