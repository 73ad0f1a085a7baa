#pragma once

#include <functional>
#include <string>

#include "girnet/ops.hpp"
#include "girnet/params.hpp"

namespace girnet {

/// Builds a scalar loss over the store's parameters inside the given graph.
/// Must be deterministic given the store contents.
using LossBuilder = std::function<Var(Graph&, ParamStore&)>;

struct GradCheckReport {
    double max_rel_error = 0.0;
    std::string worst_path;
    Index worst_entry = -1;
    double worst_analytic = 0.0;
    double worst_numeric = 0.0;
};

/// Compares reverse-mode gradients against central finite differences
/// (f(θ+ε) - f(θ-ε)) / 2ε for every parameter entry. Relative error is
/// |a - n| / max(|a|, |n|, denominator_floor). The default floor of 1e-8
/// means entries below the finite-difference noise floor (about 1e-11
/// absolute at ε = 1e-5 in double precision) report noise rather than
/// gradient error; callers checking configurations with many near-zero
/// gradients can raise the floor to 1e-6.
GradCheckReport grad_check(const LossBuilder& f, ParamStore& store, double epsilon,
                           double denominator_floor = 1e-8);

} // namespace girnet
