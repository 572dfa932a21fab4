// io.cpp
#include "mcse/io.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace mcse {

namespace {

void put_u16(std::ostream& out, std::uint16_t v) {
    char b[2] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff)};
    out.write(b, 2);
}

void put_u32(std::ostream& out, std::uint32_t v) {
    char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                 static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
    out.write(b, 4);
}

void put_f32(std::ostream& out, float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    put_u32(out, bits);
}

std::uint16_t get_u16(std::istream& in) {
    unsigned char b[2];
    in.read(reinterpret_cast<char*>(b), 2);
    return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
}

std::uint32_t get_u32(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

float get_f32(std::istream& in) {
    std::uint32_t bits = get_u32(in);
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
}

void write_record(std::ostream& out, const ParamRef& ref) {
    if (ref.name.size() > 255) throw std::invalid_argument("tensor name too long");
    out.put(static_cast<char>(ref.name.size()));
    out.write(ref.name.data(), static_cast<std::streamsize>(ref.name.size()));
    out.put(static_cast<char>(static_cast<std::uint8_t>(ref.precision.kind)));
    out.put(static_cast<char>(ref.shape.size()));
    for (std::size_t d : ref.shape) put_u32(out, static_cast<std::uint32_t>(d));

    switch (ref.precision.kind) {
        case Precision::f32:
            for (std::size_t i = 0; i < ref.size; ++i)
                put_f32(out, static_cast<float>(ref.data[i]));
            break;
        case Precision::q2_6:
            for (std::size_t i = 0; i < ref.size; ++i)
                out.put(static_cast<char>(fixed_code(ref.data[i], ref.precision)));
            break;
        case Precision::q2_2:
            for (std::size_t i = 0; i < ref.size; i += 2) {
                int lo = fixed_code(ref.data[i], ref.precision) & 0xF;
                int hi = i + 1 < ref.size ? fixed_code(ref.data[i + 1], ref.precision) & 0xF : 0;
                out.put(static_cast<char>(lo | (hi << 4)));
            }
            break;
        case Precision::bin1: {
            // tight packing: pad bits are +1, LSB first
            std::size_t num_bytes = (ref.size + 7) / 8;
            for (std::size_t b = 0; b < num_bytes; ++b) {
                unsigned byte = 0xFF;
                for (std::size_t j = 0; j < 8; ++j) {
                    std::size_t idx = b * 8 + j;
                    if (idx < ref.size && ref.data[idx] < 0.0) byte &= ~(1u << j);
                }
                out.put(static_cast<char>(byte));
            }
            break;
        }
    }
}

void read_record_payload(std::istream& in, PrecisionSpec prec, double* data, std::size_t size) {
    switch (prec.kind) {
        case Precision::f32:
            for (std::size_t i = 0; i < size; ++i) data[i] = get_f32(in);
            break;
        case Precision::q2_6:
            for (std::size_t i = 0; i < size; ++i)
                data[i] = static_cast<double>(static_cast<std::int8_t>(in.get())) * prec.step();
            break;
        case Precision::q2_2:
            for (std::size_t i = 0; i < size; i += 2) {
                unsigned byte = static_cast<unsigned>(in.get());
                int lo = static_cast<int>(byte & 0xF);
                if (lo >= 8) lo -= 16;
                data[i] = lo * prec.step();
                if (i + 1 < size) {
                    int hi = static_cast<int>((byte >> 4) & 0xF);
                    if (hi >= 8) hi -= 16;
                    data[i + 1] = hi * prec.step();
                }
            }
            break;
        case Precision::bin1: {
            std::size_t num_bytes = (size + 7) / 8;
            for (std::size_t b = 0; b < num_bytes; ++b) {
                unsigned byte = static_cast<unsigned>(in.get());
                for (std::size_t j = 0; j < 8 && b * 8 + j < size; ++j)
                    data[b * 8 + j] = (byte >> j) & 1 ? 1.0 : -1.0;
            }
            break;
        }
    }
}

struct RecordHeader {
    std::string name;
    PrecisionSpec precision;
    std::vector<std::size_t> shape;
    std::size_t size = 1;
};

RecordHeader read_record_header(std::istream& in) {
    RecordHeader h;
    int name_len = in.get();
    if (name_len < 0) throw std::runtime_error("truncated weight file");
    h.name.resize(static_cast<std::size_t>(name_len));
    in.read(h.name.data(), name_len);
    int tag = in.get();
    if (tag < 0 || tag > 3) throw std::runtime_error("bad precision tag");
    h.precision.kind = static_cast<Precision>(tag);
    int rank = in.get();
    for (int i = 0; i < rank; ++i) h.shape.push_back(get_u32(in));
    for (std::size_t d : h.shape) h.size *= d;
    return h;
}

}  // namespace

void save_weights(const std::string& path, const MaskNetParams& params) {
    MaskNetParams copy = params;  // ref enumeration needs mutable access
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write weight file: " + path);

    std::vector<ParamRef> refs = param_refs(copy);
    std::vector<ParamRef> stats = stat_refs(copy);

    out.write("MBNW", 4);
    put_u16(out, 1);  // version
    put_u16(out, static_cast<std::uint16_t>(1 + refs.size() + stats.size()));

    // architecture record first: [K, M, precision tag]
    double meta[3] = {static_cast<double>(params.bins), static_cast<double>(params.mics),
                      static_cast<double>(static_cast<int>(params.precision.kind))};
    ParamRef meta_ref{"meta", meta, 3, PrecisionSpec{Precision::f32}, {3}};
    write_record(out, meta_ref);
    for (const ParamRef& r : refs) write_record(out, r);
    for (const ParamRef& r : stats) write_record(out, r);
}

MaskNetParams load_weights(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open weight file: " + path);
    char magic[4];
    in.read(magic, 4);
    if (std::strncmp(magic, "MBNW", 4) != 0) throw std::runtime_error("not a weight file: " + path);
    std::uint16_t version = get_u16(in);
    if (version != 1) throw std::runtime_error("unsupported weight file version");
    std::uint16_t count = get_u16(in);
    if (count == 0) throw std::runtime_error("empty weight file");

    RecordHeader meta = read_record_header(in);
    if (meta.name != "meta" || meta.size != 3) throw std::runtime_error("missing meta record");
    double meta_vals[3];
    read_record_payload(in, meta.precision, meta_vals, 3);
    std::size_t bins = static_cast<std::size_t>(meta_vals[0]);
    std::size_t mics = static_cast<std::size_t>(meta_vals[1]);
    PrecisionSpec prec{static_cast<Precision>(static_cast<int>(meta_vals[2]))};

    MaskNetParams params = MaskNetParams::sized(bins, mics, prec);
    std::map<std::string, ParamRef> index;
    for (const ParamRef& r : param_refs(params)) index[r.name] = r;
    for (const ParamRef& r : stat_refs(params)) index[r.name] = r;

    for (std::uint16_t i = 1; i < count; ++i) {
        RecordHeader h = read_record_header(in);
        auto it = index.find(h.name);
        if (it == index.end()) throw std::runtime_error("unknown tensor in weight file: " + h.name);
        if (h.size != it->second.size)
            throw std::runtime_error("tensor size mismatch: " + h.name);
        read_record_payload(in, h.precision, it->second.data, h.size);
    }
    if (!in) throw std::runtime_error("truncated weight file: " + path);
    params.bn1.updates = params.bn2.updates = params.bn3.updates = params.bn4.updates = 1;
    return params;
}

PrecisionSpec peek_weight_precision(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open weight file: " + path);
    char magic[4];
    in.read(magic, 4);
    if (std::strncmp(magic, "MBNW", 4) != 0) throw std::runtime_error("not a weight file: " + path);
    get_u16(in);
    get_u16(in);
    RecordHeader meta = read_record_header(in);
    if (meta.name != "meta" || meta.size != 3) throw std::runtime_error("missing meta record");
    double meta_vals[3];
    read_record_payload(in, meta.precision, meta_vals, 3);
    return PrecisionSpec{static_cast<Precision>(static_cast<int>(meta_vals[2]))};
}

void save_mask(const std::string& path, const MaskTriple& mask) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write mask file: " + path);
    out.write("MBMK", 4);
    put_u32(out, static_cast<std::uint32_t>(mask.bins));
    put_u32(out, static_cast<std::uint32_t>(mask.frames));
    for (double v : mask.values) put_f32(out, static_cast<float>(v));
}

MaskTriple load_mask(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open mask file: " + path);
    char magic[4];
    in.read(magic, 4);
    if (std::strncmp(magic, "MBMK", 4) != 0) throw std::runtime_error("not a mask file: " + path);
    std::uint32_t bins = get_u32(in);
    std::uint32_t frames = get_u32(in);
    MaskTriple mask(bins, frames);
    for (double& v : mask.values) v = get_f32(in);
    if (!in) throw std::runtime_error("truncated mask file: " + path);
    return mask;
}

std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace mcse
