// metrics.hpp — SNR-improvement and mask-quality scores.
#pragma once

#include <string>

#include "mcse/room_sim.hpp"
#include "mcse/stft.hpp"

namespace mcse {

struct DeltaSnrResult {
    double delta_snr_db = 0.0;
    bool capped = false;  // a ratio hit the +/-100 dB guard
};

// 10 log10 of the masked energy ratio at the beamformer output minus the
// same ratio at the noisy inputs, using the one-hot ground-truth masks.
// Throws "degenerate mask coverage" when either class has no support.
DeltaSnrResult delta_snr(const ComplexSpectrogram& y, const ComplexSpectrogram& z,
                         const MaskTriple& p_opt);

struct MaskScores {
    double cross_entropy = 0.0;
    double accuracy = 0.0;  // argmax agreement, ties broken toward lowest index
};

MaskScores mask_scores(const MaskTriple& p_est, const MaskTriple& p_opt);

struct EvalReport {
    std::string scenario, beamformer, precision, psd_mode;
    DeltaSnrResult snr;
    MaskScores masks;
};

std::string eval_csv_header();
std::string eval_csv_row(const EvalReport& report);

}  // namespace mcse
