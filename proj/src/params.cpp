#include "girnet/params.hpp"

#include <cmath>

namespace girnet {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    // splitmix64 finalizer over the xored pair
    std::uint64_t z = seed ^ (stream + 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

InitScheme init_scheme_from_string(const std::string& name) {
    if (name == "scaled-uniform") return InitScheme::ScaledUniform;
    if (name == "zeros") return InitScheme::Zeros;
    if (name == "ones") return InitScheme::Ones;
    throw ConfigError("unknown init scheme: " + name);
}

Tensor init_param(const std::vector<Index>& shape, InitScheme scheme, Rng& rng) {
    switch (scheme) {
        case InitScheme::Zeros: return Tensor::zeros(shape);
        case InitScheme::Ones: return Tensor::ones(shape);
        case InitScheme::ScaledUniform: break;
    }
    Index fan_in = 0, fan_out = 0;
    if (shape.size() == 1) {
        fan_in = fan_out = shape[0];
    } else if (shape.size() == 2) {
        fan_out = shape[0];
        fan_in = shape[1];
    } else {
        throw DimensionError("scaled-uniform init expects rank 1 or 2");
    }
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    Tensor t(shape);
    for (Index i = 0; i < t.size(); ++i) t[i] = rng.uniform(-bound, bound);
    return t;
}

Node& ParamStore::create(const std::string& path, const std::vector<Index>& shape,
                         InitScheme scheme) {
    return create(path, init_param(shape, scheme, rng_));
}

Node& ParamStore::create(const std::string& path, Tensor init) {
    auto [it, inserted] = entries_.emplace(path, std::make_unique<Node>(std::move(init)));
    if (!inserted) throw ContractError("parameter path already exists: " + path);
    return *it->second;
}

Node& ParamStore::at(const std::string& path) {
    auto it = entries_.find(path);
    if (it == entries_.end()) throw ContractError("no parameter at path: " + path);
    return *it->second;
}

const Node& ParamStore::at(const std::string& path) const {
    auto it = entries_.find(path);
    if (it == entries_.end()) throw ContractError("no parameter at path: " + path);
    return *it->second;
}

Node* ParamStore::find(const std::string& path) {
    auto it = entries_.find(path);
    return it == entries_.end() ? nullptr : it->second.get();
}

void ParamStore::zero_grads() {
    for (auto& [path, node] : entries_) node->zero_grad();
}

Index ParamStore::total_entries() const {
    Index n = 0;
    for (const auto& [path, node] : entries_) n += node->value.size();
    return n;
}

} // namespace girnet
