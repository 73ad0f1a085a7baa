#include "girnet/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

namespace girnet {

namespace {

constexpr char kMagic[7] = {'G', 'I', 'R', 'N', 'E', 'T', '1'};

template <typename T>
void write_raw(std::ofstream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_raw(std::ifstream& in, const std::string& path) {
    T v{};
    if (!in.read(reinterpret_cast<char*>(&v), sizeof(T)))
        throw CheckpointError("truncated checkpoint: " + path);
    return v;
}

} // namespace

void save_checkpoint(const ParamStore& store, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write checkpoint: " + path);

    out.write(kMagic, sizeof(kMagic));
    write_raw<std::uint64_t>(out, store.size());
    for (const auto& [name, node] : store) {
        write_raw<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
        out.write(name.data(), static_cast<std::streamsize>(name.size()));
        const auto& shape = node->value.shape();
        write_raw<std::uint32_t>(out, static_cast<std::uint32_t>(shape.size()));
        for (Index d : shape) write_raw<std::uint64_t>(out, static_cast<std::uint64_t>(d));
        out.write(reinterpret_cast<const char*>(node->value.data()),
                  static_cast<std::streamsize>(node->value.size() * sizeof(double)));
    }
    if (!out) throw IoError("write failure on checkpoint: " + path);
}

void load_checkpoint(ParamStore& store, const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read checkpoint: " + path);

    char magic[sizeof(kMagic)];
    if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw CheckpointError("bad checkpoint header: " + path);

    const auto count = read_raw<std::uint64_t>(in, path);
    if (count != store.size())
        throw CheckpointError("checkpoint has " + std::to_string(count) + " parameters, model has " +
                              std::to_string(store.size()));

    for (std::uint64_t e = 0; e < count; ++e) {
        const auto name_len = read_raw<std::uint32_t>(in, path);
        std::string name(name_len, '\0');
        if (!in.read(name.data(), name_len)) throw CheckpointError("truncated checkpoint: " + path);

        const auto rank = read_raw<std::uint32_t>(in, path);
        std::vector<Index> shape(rank);
        for (auto& d : shape) d = static_cast<Index>(read_raw<std::uint64_t>(in, path));

        Node* node = store.find(name);
        if (!node) throw CheckpointError("checkpoint parameter not in model: " + name);
        if (node->value.shape() != shape) {
            Tensor probe(shape);
            throw CheckpointError("shape mismatch for " + name + ": checkpoint " +
                                  probe.shape_str() + ", model " + node->value.shape_str());
        }
        if (!in.read(reinterpret_cast<char*>(node->value.data()),
                     static_cast<std::streamsize>(node->value.size() * sizeof(double))))
            throw CheckpointError("truncated checkpoint: " + path);
    }
}

} // namespace girnet
