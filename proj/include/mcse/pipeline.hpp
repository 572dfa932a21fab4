// pipeline.hpp — command implementations behind the CLI: simulate, train,
// enhance, bench, report, evaluate. Each command is deterministic under a
// fixed seed and writes a manifest with the config hash.
#pragma once

#include <cstddef>
#include <string>

#include "mcse/beamforming.hpp"
#include "mcse/config.hpp"
#include "mcse/room_sim.hpp"

namespace mcse {

enum class PsdMode { block, recursive, oja };

PsdMode psd_mode_from_name(const std::string& name);
BeamformerKind beamformer_from_name(const std::string& name);
std::string beamformer_name(BeamformerKind kind);

// Mask-driven enhancement of a multi-channel spectrogram. window_frames = 0
// uses the whole utterance for the block estimate; otherwise the paper's
// L-frame window (default 32).
ComplexSpectrogram enhance(const ComplexSpectrogram& z, const MaskTriple& masks,
                           BeamformerKind kind, PsdMode psd_mode, std::size_t window_frames);

int cmd_simulate(const Config& cfg);
int cmd_train(const Config& cfg);
int cmd_enhance(const Config& cfg);
int cmd_bench(const Config& cfg);
int cmd_report(const Config& cfg);
int cmd_evaluate(const Config& cfg);

}  // namespace mcse
