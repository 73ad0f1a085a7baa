#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <random>
#include <string>

#include "girnet/autodiff.hpp"

namespace girnet {

/// Deterministic random source. All draws are derived from the raw mt19937_64
/// stream with fixed arithmetic, so a seed pins the byte-exact result.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [lo, hi] inclusive.
    int uniform_int(int lo, int hi) {
        return lo + static_cast<int>(uniform() * static_cast<double>(hi - lo + 1));
    }

    bool bernoulli(double p) { return uniform() < p; }

private:
    std::mt19937_64 engine_;
};

/// Mixes a seed with stream identifiers (epoch index, task index, ...) so
/// derived generators are independent but reproducible.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

enum class InitScheme { ScaledUniform, Zeros, Ones };

InitScheme init_scheme_from_string(const std::string& name);

/// scaled-uniform draws from U(-b, b) with b = sqrt(6 / (fan_in + fan_out)).
/// For a 2-d shape [r, c], fan_out = r and fan_in = c; for a 1-d shape [k]
/// both fans are k.
Tensor init_param(const std::vector<Index>& shape, InitScheme scheme, Rng& rng);

/// Named parameter leaves, iterated in lexicographic path order. Owns the
/// nodes; graphs reference them via Graph::use.
class ParamStore {
public:
    explicit ParamStore(std::uint64_t seed) : seed_(seed), rng_(seed) {}

    Node& create(const std::string& path, const std::vector<Index>& shape, InitScheme scheme);
    Node& create(const std::string& path, Tensor init);

    Node& at(const std::string& path);
    const Node& at(const std::string& path) const;
    Node* find(const std::string& path);
    bool contains(const std::string& path) const { return entries_.count(path) > 0; }

    void zero_grads();

    std::size_t size() const { return entries_.size(); }
    Index total_entries() const;

    std::uint64_t seed() const { return seed_; }
    Rng& rng() { return rng_; }

    auto begin() { return entries_.begin(); }
    auto end() { return entries_.end(); }
    auto begin() const { return entries_.begin(); }
    auto end() const { return entries_.end(); }

private:
    std::map<std::string, std::unique_ptr<Node>> entries_;
    std::uint64_t seed_;
    Rng rng_;
};

} // namespace girnet
