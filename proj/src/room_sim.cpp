// room_sim.cpp
#include "mcse/room_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mcse {

namespace {

constexpr double kPi = std::numbers::pi;

double dist(const Point& a, const Point& b) {
    double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }

double rms(const Signal& x) {
    if (x.empty()) return 0.0;
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s / static_cast<double>(x.size()));
}

}  // namespace

void RoomSpec::validate() const {
    for (double d : dimensions)
        if (d <= 0.0) throw std::invalid_argument("room dimensions must be positive");
    if (reflection_coefficient < 0.0 || reflection_coefficient >= 1.0)
        throw std::invalid_argument("reflection coefficient must be in [0, 1)");
    if (max_image_order < 0) throw std::invalid_argument("image order must be >= 0");
    if (speed_of_sound <= 0.0) throw std::invalid_argument("speed of sound must be positive");
}

bool RoomSpec::contains(const Point& p) const {
    for (int i = 0; i < 3; ++i)
        if (p[i] <= 0.0 || p[i] >= dimensions[i]) return false;
    return true;
}

ArrayGeometry ArrayGeometry::circular(std::size_t num_mics, double diameter, const Point& center) {
    ArrayGeometry g;
    g.center = center;
    double r = diameter / 2.0;
    for (std::size_t m = 0; m < num_mics; ++m) {
        double angle = 2.0 * kPi * static_cast<double>(m) / static_cast<double>(num_mics);
        g.mic_positions.push_back(
            {center[0] + r * std::cos(angle), center[1] + r * std::sin(angle), center[2]});
    }
    g.validate();
    return g;
}

void ArrayGeometry::validate() const {
    if (mic_positions.empty()) throw std::invalid_argument("array needs at least one microphone");
    for (std::size_t i = 0; i < mic_positions.size(); ++i)
        for (std::size_t j = i + 1; j < mic_positions.size(); ++j)
            if (dist(mic_positions[i], mic_positions[j]) == 0.0)
                throw std::invalid_argument("duplicate microphone positions");
}

SourceTrajectory SourceTrajectory::fixed(const Point& p) {
    SourceTrajectory t;
    t.kind = Kind::static_jitter;
    t.waypoints.push_back({0.0, p});
    return t;
}

void SourceTrajectory::validate() const {
    if (waypoints.empty()) throw std::invalid_argument("trajectory has no waypoints");
    for (std::size_t i = 1; i < waypoints.size(); ++i)
        if (waypoints[i].time <= waypoints[i - 1].time)
            throw std::invalid_argument("trajectory times must be strictly increasing");
}

Point SourceTrajectory::position_at(double t) const {
    validate();
    if (t <= waypoints.front().time) return waypoints.front().position;
    if (t >= waypoints.back().time) return waypoints.back().position;
    for (std::size_t i = 1; i < waypoints.size(); ++i) {
        if (t <= waypoints[i].time) {
            const Waypoint& a = waypoints[i - 1];
            const Waypoint& b = waypoints[i];
            double u = (t - a.time) / (b.time - a.time);
            return {a.position[0] + u * (b.position[0] - a.position[0]),
                    a.position[1] + u * (b.position[1] - a.position[1]),
                    a.position[2] + u * (b.position[2] - a.position[2])};
        }
    }
    return waypoints.back().position;
}

MaskTriple MaskTriple::uniform(std::size_t k, std::size_t t) {
    MaskTriple m(k, t);
    std::fill(m.values.begin(), m.values.end(), 1.0 / 3.0);
    return m;
}

std::vector<double> MaskTriple::class_plane(std::size_t i) const {
    std::vector<double> plane(bins * frames);
    for (std::size_t k = 0; k < bins; ++k)
        for (std::size_t t = 0; t < frames; ++t) plane[k * frames + t] = at(k, t, i);
    return plane;
}

void MaskTriple::validate() const {
    for (std::size_t k = 0; k < bins; ++k)
        for (std::size_t t = 0; t < frames; ++t) {
            double sum = 0.0;
            for (std::size_t i = 0; i < 3; ++i) {
                double v = at(k, t, i);
                if (v < 0.0 || v > 1.0) throw std::runtime_error("mask entry outside [0,1]");
                sum += v;
            }
            if (std::abs(sum - 1.0) > 1e-6) throw std::runtime_error("mask classes do not sum to 1");
        }
}

std::vector<Signal> simulate_rir(const RoomSpec& room, const Point& source,
                                 const ArrayGeometry& array, double sample_rate) {
    room.validate();
    array.validate();
    if (!room.contains(source)) throw std::invalid_argument("source outside room");
    for (const Point& mic : array.mic_positions)
        if (!room.contains(mic)) throw std::invalid_argument("microphone outside room");

    const int order = room.max_image_order;
    const double beta = room.reflection_coefficient;
    const double c = room.speed_of_sound;

    // per-axis image coordinates: (1-2q)*s + 2mL carries |2m - q| reflections
    struct AxisImage {
        double coord;
        int reflections;
    };
    std::array<std::vector<AxisImage>, 3> axis_images;
    const int mr = order / 2 + 1;
    for (int axis = 0; axis < 3; ++axis) {
        for (int m = -mr; m <= mr; ++m) {
            for (int q = 0; q <= 1; ++q) {
                int refl = std::abs(2 * m - q);
                if (refl > order) continue;
                axis_images[axis].push_back(
                    {(1 - 2 * q) * source[axis] + 2.0 * m * room.dimensions[axis], refl});
            }
        }
    }

    struct Tap {
        double delay_samples;
        double amplitude;
    };
    std::vector<std::vector<Tap>> taps(array.size());
    double max_delay = 0.0;
    for (const AxisImage& ix : axis_images[0]) {
        for (const AxisImage& iy : axis_images[1]) {
            for (const AxisImage& iz : axis_images[2]) {
                int total = ix.reflections + iy.reflections + iz.reflections;
                if (total > order) continue;
                if (beta == 0.0 && total > 0) continue;
                double gain = std::pow(beta, total);
                Point img{ix.coord, iy.coord, iz.coord};
                for (std::size_t m = 0; m < array.size(); ++m) {
                    double d = std::max(dist(img, array.mic_positions[m]), 1e-6);
                    double delay = d / c * sample_rate;
                    taps[m].push_back({delay, gain / (4.0 * kPi * d)});
                    max_delay = std::max(max_delay, delay);
                }
            }
        }
    }

    const int half = 32;  // 64-tap Hann-windowed sinc
    const std::size_t len = static_cast<std::size_t>(std::ceil(max_delay)) + half + 2;
    std::vector<Signal> rir(array.size(), Signal(len, 0.0));
    for (std::size_t m = 0; m < array.size(); ++m) {
        for (const Tap& tap : taps[m]) {
            int j0 = static_cast<int>(std::floor(tap.delay_samples)) - half + 1;
            for (int j = j0; j < j0 + 2 * half; ++j) {
                if (j < 0) continue;
                double t_rel = static_cast<double>(j) - tap.delay_samples;
                if (std::abs(t_rel) > half) continue;
                double window = 0.5 * (1.0 + std::cos(kPi * t_rel / half));
                rir[m][static_cast<std::size_t>(j)] += tap.amplitude * sinc(kPi * t_rel) * window;
            }
        }
    }
    return rir;
}

namespace {

void convolve_add(const Signal& x, std::size_t x_offset, std::size_t x_len, const Signal& h,
                  Signal& out) {
    for (std::size_t n = 0; n < x_len; ++n) {
        double xv = x[x_offset + n];
        if (xv == 0.0) continue;
        double* dst = out.data() + x_offset + n;
        for (std::size_t j = 0; j < h.size(); ++j) dst[j] += xv * h[j];
    }
}

}  // namespace

MultiSignal render_source(const Signal& mono, const SourceTrajectory& traj, const RoomSpec& room,
                          const ArrayGeometry& array, double sample_rate, double segment_seconds,
                          std::size_t crossfade_samples) {
    traj.validate();
    const std::size_t len = mono.size();
    const double duration = static_cast<double>(len) / sample_rate;
    if (traj.waypoints.size() > 1 && traj.end_time() < duration)
        throw std::invalid_argument("trajectory shorter than signal");

    const std::size_t seg = std::max<std::size_t>(1, static_cast<std::size_t>(
                                                         std::llround(segment_seconds * sample_rate)));
    const std::size_t ramp = std::min(crossfade_samples, seg);
    const std::size_t num_segments = len == 0 ? 0 : (len + seg - 1) / seg;

    // group segments that share a position (static sources become one block)
    std::vector<Point> positions(num_segments);
    for (std::size_t i = 0; i < num_segments; ++i) {
        double t_center = (static_cast<double>(i) + 0.5) * static_cast<double>(seg) / sample_rate;
        positions[i] = traj.position_at(std::min(t_center, duration));
    }

    std::size_t rir_len = 0;
    std::vector<std::vector<Signal>> rirs;
    std::vector<std::size_t> rir_index(num_segments, 0);
    for (std::size_t i = 0; i < num_segments; ++i) {
        if (i > 0 && positions[i] == positions[i - 1]) {
            rir_index[i] = rir_index[i - 1];
            continue;
        }
        rirs.push_back(simulate_rir(room, positions[i], array, sample_rate));
        rir_index[i] = rirs.size() - 1;
        rir_len = std::max(rir_len, rirs.back()[0].size());
    }

    const std::size_t out_len = len + rir_len;
    MultiSignal out(array.size(), Signal(out_len, 0.0));
    if (num_segments == 0) return out;

    if (rirs.size() == 1) {
        for (std::size_t m = 0; m < array.size(); ++m)
            convolve_add(mono, 0, len, rirs[0][m], out[m]);
        return out;
    }

    // trapezoidal partition-of-unity windows with `ramp`-long linear joins
    Signal windowed;
    for (std::size_t i = 0; i < num_segments; ++i) {
        const double left = static_cast<double>(i * seg);
        const double right = static_cast<double>(std::min((i + 1) * seg, len));
        const double half_ramp = static_cast<double>(ramp) / 2.0;
        std::size_t lo = i == 0 ? 0
                                : static_cast<std::size_t>(std::max(0.0, std::ceil(left - half_ramp)));
        std::size_t hi = std::min<std::size_t>(
            len, i + 1 == num_segments ? len
                                       : static_cast<std::size_t>(std::ceil(right + half_ramp)));
        if (lo >= hi) continue;
        windowed.assign(hi - lo, 0.0);
        for (std::size_t n = lo; n < hi; ++n) {
            double w = 1.0;
            double fn = static_cast<double>(n);
            if (i > 0 && fn < left + half_ramp) w *= (fn - (left - half_ramp)) / static_cast<double>(ramp);
            if (i + 1 < num_segments && fn >= right - half_ramp)
                w *= ((right + half_ramp) - fn) / static_cast<double>(ramp);
            windowed[n - lo] = mono[n] * std::clamp(w, 0.0, 1.0);
        }
        const std::vector<Signal>& rir = rirs[rir_index[i]];
        for (std::size_t m = 0; m < array.size(); ++m) {
            for (std::size_t n = 0; n < windowed.size(); ++n) {
                double xv = windowed[n];
                if (xv == 0.0) continue;
                double* dst = out[m].data() + lo + n;
                for (std::size_t j = 0; j < rir[m].size(); ++j) dst[j] += xv * rir[m][j];
            }
        }
    }
    return out;
}

CMatrix spatial_coherence(const ArrayGeometry& array, std::size_t k, const StftConfig& cfg,
                          double speed_of_sound) {
    if (k >= cfg.num_bins()) throw std::invalid_argument("bin index out of range");
    const std::size_t m = array.size();
    const double f = cfg.bin_frequency(k);
    CMatrix gamma(m, m);
    for (std::size_t i = 0; i < m; ++i) {
        gamma(i, i) = 1.0;
        for (std::size_t j = i + 1; j < m; ++j) {
            double d = dist(array.mic_positions[i], array.mic_positions[j]);
            double v = sinc(2.0 * kPi * f * d / speed_of_sound);
            gamma(i, j) = v;
            gamma(j, i) = v;
        }
    }
    return gamma;
}

ComplexSpectrogram gen_isotropic_noise(const ComplexSpectrogram& mono_spec,
                                       const ArrayGeometry& array, Rng& rng,
                                       double speed_of_sound) {
    if (mono_spec.channels() != 1)
        throw std::invalid_argument("isotropic generator expects a mono spectrogram");
    const std::size_t num_mics = array.size();
    const std::size_t bins = mono_spec.bins();
    const std::size_t frames = mono_spec.frames();

    ComplexSpectrogram out(num_mics, bins, frames, mono_spec.config());
    CVector phased(num_mics), mixed(num_mics);
    for (std::size_t k = 0; k < bins; ++k) {
        CMatrix gamma = spatial_coherence(array, k, mono_spec.config(), speed_of_sound);
        Evd evd = jacobi_evd(gamma);
        CMatrix shaper(num_mics, num_mics);  // E * Lambda^{1/2}
        for (std::size_t i = 0; i < num_mics; ++i)
            for (std::size_t j = 0; j < num_mics; ++j)
                shaper(i, j) = evd.vectors(i, j) * std::sqrt(std::max(evd.eigenvalues[j], 0.0));

        for (std::size_t t = 0; t < frames; ++t) {
            for (std::size_t m = 0; m < num_mics; ++m) {
                double phi = rng.phase();
                phased[m] = cplx(std::cos(phi), std::sin(phi));
            }
            mixed = matvec(shaper, phased);
            cplx x = mono_spec.at(0, k, t);
            for (std::size_t m = 0; m < num_mics; ++m) out.at(m, k, t) = mixed[m] * x;
        }
    }
    return out;
}

MaskTriple ground_truth_masks(const ComplexSpectrogram& clean,
                              const ComplexSpectrogram& interference,
                              const std::vector<double>& epsilon) {
    if (clean.bins() != interference.bins() || clean.frames() != interference.frames() ||
        clean.channels() != interference.channels())
        throw std::invalid_argument("spectrogram shape mismatch");
    if (epsilon.size() != clean.bins()) throw std::invalid_argument("epsilon size mismatch");
    for (double e : epsilon)
        if (e < 0.0) throw std::invalid_argument("epsilon must be >= 0");

    MaskTriple masks(clean.bins(), clean.frames());
    for (std::size_t k = 0; k < clean.bins(); ++k) {
        for (std::size_t t = 0; t < clean.frames(); ++t) {
            double s = norm2(clean.bin(k, t));
            double n = norm2(interference.bin(k, t));
            double p1 = s > std::max(n, epsilon[k]) ? 1.0 : 0.0;
            double p2 = n > std::max(s, epsilon[k]) ? 1.0 : 0.0;
            masks.at(k, t, 0) = p1;
            masks.at(k, t, 1) = p2;
            masks.at(k, t, 2) = 1.0 - p1 - p2;
        }
    }
    return masks;
}

std::vector<double> default_epsilon(const ComplexSpectrogram& clean,
                                    const ComplexSpectrogram& interference) {
    std::vector<double> eps(clean.bins(), 0.0);
    for (std::size_t k = 0; k < clean.bins(); ++k) {
        double peak = 0.0;
        for (std::size_t t = 0; t < clean.frames(); ++t)
            peak = std::max({peak, norm2(clean.bin(k, t)), norm2(interference.bin(k, t))});
        eps[k] = 0.01 * peak;
    }
    return eps;
}

Signal synth_speech(std::size_t num_samples, double sample_rate, Rng& rng) {
    Signal x(num_samples, 0.0);
    std::size_t n = 0;
    double lp = 0.0;
    while (n < num_samples) {
        double seg_dur = rng.uniform(0.12, 0.30);
        std::size_t seg_len = std::min<std::size_t>(
            num_samples - n, static_cast<std::size_t>(seg_dur * sample_rate));
        double mode = rng.uniform();
        if (mode < 0.70) {
            // voiced: drifting pitch, formant-shaped harmonics, breath noise
            double f0 = rng.uniform(95.0, 215.0);
            double drift = rng.uniform(-30.0, 30.0) / seg_dur;
            int num_harm = static_cast<int>(3800.0 / (f0 + std::abs(drift) * seg_dur));
            std::vector<double> amp(num_harm), pha(num_harm);
            for (int h = 0; h < num_harm; ++h) {
                double fh = (h + 1) * f0;
                amp[h] = (1.0 / (h + 1)) *
                         (1.0 + 1.5 * std::exp(-std::pow((fh - 550.0) / 350.0, 2)) +
                          1.0 * std::exp(-std::pow((fh - 1600.0) / 500.0, 2)));
                pha[h] = rng.uniform(0.0, 2.0 * kPi);
            }
            double ph = 0.0;
            for (std::size_t i = 0; i < seg_len; ++i) {
                double tt = static_cast<double>(i) / sample_rate;
                ph += 2.0 * kPi * (f0 + drift * tt) / sample_rate;
                double env = std::sin(kPi * static_cast<double>(i) / static_cast<double>(seg_len));
                double v = 0.0;
                for (int h = 0; h < num_harm; ++h) v += amp[h] * std::sin((h + 1) * ph + pha[h]);
                lp = 0.95 * lp + 0.05 * rng.normal();
                x[n + i] = env * (0.25 * v + 0.4 * lp + 0.02 * rng.normal());
            }
        } else if (mode < 0.88) {
            // unvoiced: shaped noise burst
            double hp = 0.0;
            for (std::size_t i = 0; i < seg_len; ++i) {
                double env = std::sin(kPi * static_cast<double>(i) / static_cast<double>(seg_len));
                double w = rng.normal();
                hp = 0.6 * hp + w;
                x[n + i] = 0.25 * env * (w - 0.5 * hp);
            }
        } else {
            // pause
            for (std::size_t i = 0; i < seg_len; ++i) x[n + i] = 0.002 * rng.normal();
        }
        n += seg_len;
    }
    double r = rms(x);
    if (r > 0.0)
        for (double& v : x) v *= 0.1 / r;
    return x;
}

Signal synth_noise(std::size_t num_samples, Rng& rng) {
    // low-frequency-heavy ambience with a white floor
    Signal x(num_samples, 0.0);
    double lp = 0.0;
    for (std::size_t i = 0; i < num_samples; ++i) {
        double w = rng.normal();
        lp = 0.92 * lp + 0.08 * w;
        x[i] = 0.5 * w + 4.0 * lp;
    }
    double r = rms(x);
    if (r > 0.0)
        for (double& v : x) v *= 0.1 / r;
    return x;
}

namespace {

SourceTrajectory random_walk_trajectory(Rng& rng, double x_lo, double x_hi, double y_lo,
                                        double y_hi, double z, double duration, double speed) {
    SourceTrajectory traj;
    traj.kind = SourceTrajectory::Kind::moving;
    Point p{rng.uniform(x_lo, x_hi), rng.uniform(y_lo, y_hi), z};
    double heading = rng.uniform(0.0, 2.0 * kPi);
    const double step_dt = 0.5;
    double t = 0.0;
    traj.waypoints.push_back({t, p});
    while (t < duration) {
        t += step_dt;
        double dx = speed * step_dt * std::cos(heading);
        double dy = speed * step_dt * std::sin(heading);
        double nx = p[0] + dx, ny = p[1] + dy;
        if (nx < x_lo || nx > x_hi) {
            heading = kPi - heading;
            nx = std::clamp(nx, x_lo, x_hi);
        }
        if (ny < y_lo || ny > y_hi) {
            heading = -heading;
            ny = std::clamp(ny, y_lo, y_hi);
        }
        heading += rng.uniform(-0.3, 0.3);
        p = {nx, ny, z};
        traj.waypoints.push_back({t, p});
    }
    return traj;
}

Point jittered(Rng& rng, const Point& base) {
    // per-utterance head movement within a 20 cm cube
    return {base[0] + rng.uniform(-0.1, 0.1), base[1] + rng.uniform(-0.1, 0.1),
            base[2] + rng.uniform(-0.1, 0.1)};
}

void scale_signal(MultiSignal& x, double factor) {
    for (Signal& ch : x)
        for (double& v : ch) v *= factor;
}

void trim(MultiSignal& x, std::size_t len) {
    for (Signal& ch : x) ch.resize(len);
}

}  // namespace

ScenarioData build_scenario(const ScenarioConfig& cfg) {
    if (cfg.id < 1 || cfg.id > 5) throw std::invalid_argument("unknown scenario id");
    cfg.stft.validate();
    cfg.room.validate();

    const double fs = cfg.stft.sample_rate;
    const std::size_t num_samples = static_cast<std::size_t>(cfg.duration * fs);
    if (num_samples < cfg.stft.fft_size) throw std::invalid_argument("scenario duration too short");

    Rng rng(cfg.seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(cfg.id));
    ArrayGeometry array = ArrayGeometry::circular(cfg.num_mics, cfg.array_diameter, cfg.array_center);

    const Point dims = cfg.room.dimensions;
    const Point s1_base{0.28 * dims[0], 0.30 * dims[1], 1.5};
    const Point s2_base{0.73 * dims[0], 0.72 * dims[1], 1.5};
    const double cx = cfg.array_center[0], cy = cfg.array_center[1];
    const double margin = 0.4;
    auto clamp_x = [&](double v) { return std::clamp(v, margin, dims[0] - margin); };
    auto clamp_y = [&](double v) { return std::clamp(v, margin, dims[1] - margin); };

    // desired trajectory first, then speech interferers
    std::vector<SourceTrajectory> trajectories;
    switch (cfg.id) {
        case 1: {
            Point p{rng.uniform(margin, dims[0] - margin), rng.uniform(margin, dims[1] - margin),
                    rng.uniform(1.2, 1.8)};
            trajectories.push_back(SourceTrajectory::fixed(jittered(rng, p)));
            break;
        }
        case 2:
            trajectories.push_back(SourceTrajectory::fixed(jittered(rng, s1_base)));
            break;
        case 3:
            trajectories.push_back(SourceTrajectory::fixed(jittered(rng, s1_base)));
            trajectories.push_back(SourceTrajectory::fixed(jittered(rng, s2_base)));
            break;
        case 4:
            trajectories.push_back(random_walk_trajectory(rng, clamp_x(cx - 2.5), clamp_x(cx - 0.5),
                                                          clamp_y(cy - 2.0), clamp_y(cy + 2.0), 1.5,
                                                          cfg.duration, 0.5));
            break;
        case 5:
            trajectories.push_back(random_walk_trajectory(rng, clamp_x(cx - 2.5), clamp_x(cx - 0.5),
                                                          clamp_y(cy - 2.0), clamp_y(cy + 2.0), 1.5,
                                                          cfg.duration, 0.5));
            trajectories.push_back(random_walk_trajectory(rng, clamp_x(cx + 0.5), clamp_x(cx + 2.5),
                                                          clamp_y(cy - 2.0), clamp_y(cy + 2.0), 1.5,
                                                          cfg.duration, 0.5));
            break;
        default: break;
    }

    const double target_rms = 0.05;
    const std::size_t hop = cfg.stft.hop;

    auto render_speech = [&](const SourceTrajectory& traj, double level) {
        Signal mono = synth_speech(num_samples, fs, rng);
        MultiSignal x = render_source(mono, traj, cfg.room, array, fs, 0.032, hop);
        trim(x, num_samples);
        double r = rms(x[0]);
        if (r > 0.0) scale_signal(x, level / r);
        return x;
    };

    MultiSignal desired_time = render_speech(trajectories[0], target_rms);
    ComplexSpectrogram clean = stft(desired_time, cfg.stft);

    ComplexSpectrogram interference(array.size(), clean.bins(), clean.frames(), cfg.stft);
    for (std::size_t s = 1; s < trajectories.size(); ++s) {
        MultiSignal xi = render_speech(trajectories[s], target_rms * cfg.noise_gain);
        ComplexSpectrogram spec = stft(xi, cfg.stft);
        for (std::size_t i = 0; i < spec.raw().size(); ++i) interference.raw()[i] += spec.raw()[i];
    }

    if (cfg.noise_gain > 0.0) {
        Signal noise_mono = synth_noise(num_samples, rng);
        ComplexSpectrogram mono_spec = stft({noise_mono}, cfg.stft);
        ComplexSpectrogram iso =
            gen_isotropic_noise(mono_spec, array, rng, cfg.room.speed_of_sound);
        MultiSignal iso_time = istft(iso);
        double r = rms(iso_time[0]);
        if (r > 0.0) {
            double g = target_rms * cfg.noise_gain / r;
            for (cplx& v : iso.raw()) v *= g;
        }
        for (std::size_t i = 0; i < iso.raw().size(); ++i) interference.raw()[i] += iso.raw()[i];
    }

    ScenarioData data;
    data.clean = clean;
    data.interference = interference;
    data.mixture = ComplexSpectrogram(array.size(), clean.bins(), clean.frames(), cfg.stft);
    for (std::size_t i = 0; i < clean.raw().size(); ++i)
        data.mixture.raw()[i] = clean.raw()[i] + interference.raw()[i];
    data.masks = ground_truth_masks(clean, interference, default_epsilon(clean, interference));
    data.mixture_time = istft(data.mixture);
    data.trajectories = std::move(trajectories);
    return data;
}

}  // namespace mcse
