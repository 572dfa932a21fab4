// room_sim.hpp — shoebox image-source simulation, moving-source rendering,
// isotropic noise synthesis, ground-truth masks and the five test scenarios.
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mcse/rng.hpp"
#include "mcse/stft.hpp"

namespace mcse {

using Point = std::array<double, 3>;

struct RoomSpec {
    Point dimensions{6.0, 5.0, 2.5};
    double reflection_coefficient = 0.85;  // beta, same for all six walls
    int max_image_order = 3;
    double speed_of_sound = 343.0;

    void validate() const;
    bool contains(const Point& p) const;  // strictly inside
};

struct ArrayGeometry {
    std::vector<Point> mic_positions;
    Point center{0.0, 0.0, 0.0};

    // uniform circular array in the horizontal plane
    static ArrayGeometry circular(std::size_t num_mics, double diameter, const Point& center);
    std::size_t size() const { return mic_positions.size(); }
    void validate() const;
};

struct SourceTrajectory {
    enum class Kind { static_jitter, moving };
    struct Waypoint {
        double time = 0.0;
        Point position{0.0, 0.0, 0.0};
    };
    Kind kind = Kind::static_jitter;
    std::vector<Waypoint> waypoints;  // strictly increasing times

    static SourceTrajectory fixed(const Point& p);
    Point position_at(double t) const;  // linear interpolation, clamped ends
    double end_time() const { return waypoints.empty() ? 0.0 : waypoints.back().time; }
    void validate() const;
};

// K x T x 3 per-bin class probabilities (speech, interference, weak).
struct MaskTriple {
    std::size_t bins = 0, frames = 0;
    std::vector<double> values;  // (k*frames + t)*3 + i

    MaskTriple() = default;
    MaskTriple(std::size_t k, std::size_t t) : bins(k), frames(t), values(k * t * 3, 0.0) {}
    static MaskTriple uniform(std::size_t k, std::size_t t);

    double& at(std::size_t k, std::size_t t, std::size_t i) {
        return values[(k * frames + t) * 3 + i];
    }
    double at(std::size_t k, std::size_t t, std::size_t i) const {
        return values[(k * frames + t) * 3 + i];
    }
    // one class as a K x T plane (row-major, frames contiguous)
    std::vector<double> class_plane(std::size_t i) const;
    void validate() const;  // entries in [0,1], rows sum to 1 within 1e-6
};

// Image-source impulse responses, one per microphone. Taps are placed at
// delay d/c with amplitude beta^reflections / (4 pi d); fractional delays use
// a 64-tap Hann-windowed sinc.
std::vector<Signal> simulate_rir(const RoomSpec& room, const Point& source,
                                 const ArrayGeometry& array, double sample_rate);

// Convolves `mono` with position-dependent RIRs. The signal is cut into
// 32 ms segments (new RIR per segment) joined by linear crossfades one STFT
// hop long; the segment windows form a partition of unity, so a static
// source reduces exactly to a single convolution.
MultiSignal render_source(const Signal& mono, const SourceTrajectory& traj, const RoomSpec& room,
                          const ArrayGeometry& array, double sample_rate,
                          double segment_seconds = 0.032, std::size_t crossfade_samples = 256);

// Spherically isotropic coherence Gamma_ij = sinc(2 pi f_k d_ij / c).
CMatrix spatial_coherence(const ArrayGeometry& array, std::size_t k, const StftConfig& cfg,
                          double speed_of_sound = 343.0);

// Spatializes a mono spectrogram into an M-channel diffuse field:
// X(k,t) = E(k) Lambda(k)^{1/2} exp(i phi(k,t)) * X_mono(k,t) with i.i.d.
// uniform phases redrawn per bin. Negative coherence eigenvalues are clipped
// to zero.
ComplexSpectrogram gen_isotropic_noise(const ComplexSpectrogram& mono_spec,
                                       const ArrayGeometry& array, Rng& rng,
                                       double speed_of_sound = 343.0);

// One-hot ground-truth masks from the clean and interference spectrograms.
// epsilon is a per-bin energy floor; entries must be >= 0.
MaskTriple ground_truth_masks(const ComplexSpectrogram& clean, const ComplexSpectrogram& interference,
                              const std::vector<double>& epsilon);

// -40 dB below the per-bin peak of either component.
std::vector<double> default_epsilon(const ComplexSpectrogram& clean,
                                    const ComplexSpectrogram& interference);

struct ScenarioConfig {
    int id = 2;  // 1..5
    std::uint64_t seed = 1;
    double duration = 4.0;  // seconds
    StftConfig stft{1024, 256, 16000.0};
    RoomSpec room;
    std::size_t num_mics = 6;
    double array_diameter = 0.086;
    Point array_center{3.0, 2.5, 1.2};
    double noise_gain = 1.0;  // interference RMS relative to the desired source
};

struct ScenarioData {
    ComplexSpectrogram mixture, clean, interference;
    MaskTriple masks;
    MultiSignal mixture_time;  // istft of the mixture
    std::vector<SourceTrajectory> trajectories;  // desired first, then speech interferers
};

// Composes the scenario table: 1 R-I, 2 S1-I, 3 S1-S2+I, 4 D1-I, 5 D1-D2+I.
// Sources are mixed at equal RMS at the reference microphone; the mixture is
// the exact spectral sum of the components.
ScenarioData build_scenario(const ScenarioConfig& cfg);

// Deterministic synthetic program material used by the scenarios.
Signal synth_speech(std::size_t num_samples, double sample_rate, Rng& rng);
Signal synth_noise(std::size_t num_samples, Rng& rng);

}  // namespace mcse
