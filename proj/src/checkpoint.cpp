#include "playroom/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace playroom {

namespace {

constexpr char kMagic[8] = {'P', 'R', 'C', 'H', 'K', 'P', 'T', '1'};

template <typename T>
void write_le(std::ofstream& os, T v) {
    // this codebase targets little-endian hosts only
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_le(std::ifstream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw std::runtime_error("checkpoint: truncated file");
    return v;
}

}  // namespace

void save_checkpoint(const ParamSet& params, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("checkpoint: cannot open " + path + " for writing");
    os.write(kMagic, sizeof(kMagic));
    write_le<uint64_t>(os, params.spec.hash());
    write_le<uint32_t>(os, static_cast<uint32_t>(params.params.size()));
    for (const auto& p : params.params) {
        write_le<uint32_t>(os, static_cast<uint32_t>(p.name.size()));
        os.write(p.name.data(), static_cast<std::streamsize>(p.name.size()));
        write_le<uint32_t>(os, static_cast<uint32_t>(p.value.shape.size()));
        for (int d : p.value.shape) write_le<uint32_t>(os, static_cast<uint32_t>(d));
    }
    for (const auto& p : params.params)
        for (double v : p.value.data) write_le<float>(os, static_cast<float>(v));
    if (!os) throw std::runtime_error("checkpoint: write failed for " + path);
}

uint64_t checkpoint_spec_hash(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("checkpoint: cannot open " + path);
    char magic[8];
    is.read(magic, sizeof(magic));
    if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw std::runtime_error("checkpoint: bad magic in " + path);
    return read_le<uint64_t>(is);
}

ParamSet load_checkpoint(const std::string& path, const NetworkSpec& expected_spec) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("checkpoint: cannot open " + path);
    char magic[8];
    is.read(magic, sizeof(magic));
    if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw std::runtime_error("checkpoint: bad magic in " + path);
    uint64_t hash = read_le<uint64_t>(is);
    if (hash != expected_spec.hash())
        throw std::runtime_error("checkpoint: spec hash mismatch in " + path);

    ParamSet params = make_params(expected_spec, 0);
    uint32_t count = read_le<uint32_t>(is);
    if (count != params.params.size())
        throw std::runtime_error("checkpoint: parameter count mismatch in " + path);
    for (auto& p : params.params) {
        uint32_t name_len = read_le<uint32_t>(is);
        std::string name(name_len, '\0');
        is.read(name.data(), name_len);
        if (!is || name != p.name) throw std::runtime_error("checkpoint: parameter order mismatch");
        uint32_t rank = read_le<uint32_t>(is);
        if (rank != p.value.shape.size()) throw std::runtime_error("checkpoint: rank mismatch");
        for (int d : p.value.shape)
            if (read_le<uint32_t>(is) != static_cast<uint32_t>(d))
                throw std::runtime_error("checkpoint: shape mismatch");
    }
    for (auto& p : params.params)
        for (double& v : p.value.data) v = static_cast<double>(read_le<float>(is));
    return params;
}

}  // namespace playroom
