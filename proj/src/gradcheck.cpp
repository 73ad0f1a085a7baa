#include "girnet/gradcheck.hpp"

#include <cmath>

namespace girnet {

namespace {

double eval_value(const LossBuilder& f, ParamStore& store) {
    Graph g;
    Var loss = f(g, store);
    if (loss.value().size() != 1)
        throw ContractError("grad_check: loss must be scalar, got " + loss.value().shape_str());
    return loss.value()[0];
}

} // namespace

GradCheckReport grad_check(const LossBuilder& f, ParamStore& store, double epsilon,
                           double denominator_floor) {
    if (epsilon <= 0.0) throw ContractError("grad_check: epsilon must be positive");

    store.zero_grads();
    std::map<std::string, Tensor> analytic;
    {
        Graph g;
        Var loss = f(g, store);
        if (loss.value().size() != 1)
            throw ContractError("grad_check: loss must be scalar, got " +
                                loss.value().shape_str());
        backward(loss);
        for (auto& [path, node] : store) analytic.emplace(path, node->grad);
    }
    store.zero_grads();

    GradCheckReport report;
    for (auto& [path, node] : store) {
        const Tensor& grads = analytic.at(path);
        for (Index i = 0; i < node->value.size(); ++i) {
            const double saved = node->value[i];
            node->value[i] = saved + epsilon;
            const double up = eval_value(f, store);
            node->value[i] = saved - epsilon;
            const double down = eval_value(f, store);
            node->value[i] = saved;

            const double numeric = (up - down) / (2.0 * epsilon);
            const double a = grads[i];
            const double rel = std::fabs(a - numeric) /
                               std::max({std::fabs(a), std::fabs(numeric), denominator_floor});
            if (rel > report.max_rel_error) {
                report.max_rel_error = rel;
                report.worst_path = path;
                report.worst_entry = i;
                report.worst_analytic = a;
                report.worst_numeric = numeric;
            }
        }
    }
    return report;
}

} // namespace girnet
