// io.hpp — binary file formats shared across the pipeline.
//
// Weight file ("MBNW"): version u16, record count u16, then per record:
// name length u8 + UTF-8 name, precision tag u8 (0 f32, 1 q2.6, 2 q2.2,
// 3 bin1), rank u8, dims u32 LE, payload. Payloads: f32 LE; one int8 code
// per q2.6 value; one nibble per q2.2 value packed low-first; bin1 packed
// LSB-first (+1 -> 1) into bytes with pad bits set to 1.
//
// Mask file ("MBMK"): u32 K, u32 T, then K*T*3 f32 LE, class index fastest.
#pragma once

#include <cstdint>
#include <string>

#include "mcse/masknet.hpp"
#include "mcse/room_sim.hpp"

namespace mcse {

void save_weights(const std::string& path, const MaskNetParams& params);
MaskNetParams load_weights(const std::string& path);

// precision tag recorded in an existing weight file without loading it all
PrecisionSpec peek_weight_precision(const std::string& path);

void save_mask(const std::string& path, const MaskTriple& mask);
MaskTriple load_mask(const std::string& path);

// FNV-1a 64-bit, used for config hashes in run manifests
std::uint64_t fnv1a64(const std::string& data);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace mcse
