// metrics.cpp
#include "mcse/metrics.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mcse {

namespace {

constexpr double kCapDb = 100.0;

// 10 log10(num/den) with a +/-100 dB guard
double ratio_db(double num, double den, bool& capped) {
    if (num <= 0.0 && den <= 0.0) throw std::runtime_error("degenerate mask coverage");
    if (den <= 0.0) {
        capped = true;
        return kCapDb;
    }
    if (num <= 0.0) {
        capped = true;
        return -kCapDb;
    }
    double db = 10.0 * std::log10(num / den);
    if (db > kCapDb) {
        capped = true;
        return kCapDb;
    }
    if (db < -kCapDb) {
        capped = true;
        return -kCapDb;
    }
    return db;
}

}  // namespace

DeltaSnrResult delta_snr(const ComplexSpectrogram& y, const ComplexSpectrogram& z,
                         const MaskTriple& p_opt) {
    if (y.channels() != 1) throw std::invalid_argument("beamformer output must be single channel");
    if (y.bins() != z.bins() || y.frames() != z.frames())
        throw std::invalid_argument("spectrogram shape mismatch");
    if (p_opt.bins != z.bins() || p_opt.frames != z.frames())
        throw std::invalid_argument("mask shape mismatch");

    double mask_support[2] = {0.0, 0.0};
    double out_energy[2] = {0.0, 0.0};
    double in_energy[2] = {0.0, 0.0};
    for (std::size_t k = 0; k < z.bins(); ++k)
        for (std::size_t t = 0; t < z.frames(); ++t) {
            for (int cls = 0; cls < 2; ++cls) {
                double m = p_opt.at(k, t, static_cast<std::size_t>(cls));
                if (m == 0.0) continue;
                mask_support[cls] += m;
                out_energy[cls] += std::norm(y.at(0, k, t)) * m * m;
                double zn = norm2(z.bin(k, t));
                in_energy[cls] += zn * zn * m * m;
            }
        }
    if (mask_support[0] == 0.0 || mask_support[1] == 0.0)
        throw std::runtime_error("degenerate mask coverage");

    DeltaSnrResult result;
    double out_db = ratio_db(out_energy[0], out_energy[1], result.capped);
    double in_db = ratio_db(in_energy[0], in_energy[1], result.capped);
    result.delta_snr_db = out_db - in_db;
    return result;
}

MaskScores mask_scores(const MaskTriple& p_est, const MaskTriple& p_opt) {
    if (p_est.bins != p_opt.bins || p_est.frames != p_opt.frames)
        throw std::invalid_argument("mask shape mismatch");
    MaskScores scores;
    double ce = 0.0;
    std::size_t hits = 0;
    for (std::size_t k = 0; k < p_est.bins; ++k)
        for (std::size_t t = 0; t < p_est.frames; ++t) {
            std::size_t am_est = 0, am_opt = 0;
            double best_est = p_est.at(k, t, 0), best_opt = p_opt.at(k, t, 0);
            for (std::size_t i = 0; i < 3; ++i) {
                double e = p_est.at(k, t, i);
                double o = p_opt.at(k, t, i);
                ce -= o * std::log(e + 1e-12);
                if (e > best_est) {
                    best_est = e;
                    am_est = i;
                }
                if (o > best_opt) {
                    best_opt = o;
                    am_opt = i;
                }
            }
            if (am_est == am_opt) ++hits;
        }
    const double n = static_cast<double>(p_est.bins * p_est.frames);
    scores.cross_entropy = ce / n;
    scores.accuracy = static_cast<double>(hits) / n;
    return scores;
}

std::string eval_csv_header() {
    return "scenario,beamformer,precision,psd_mode,delta_snr_db,capped,mask_cross_entropy,mask_accuracy\n";
}

std::string eval_csv_row(const EvalReport& r) {
    std::ostringstream out;
    out << r.scenario << "," << r.beamformer << "," << r.precision << "," << r.psd_mode << ","
        << r.snr.delta_snr_db << "," << (r.snr.capped ? 1 : 0) << "," << r.masks.cross_entropy
        << "," << r.masks.accuracy << "\n";
    return out.str();
}

}  // namespace mcse
