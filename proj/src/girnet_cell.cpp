#include "girnet/girnet_cell.hpp"

namespace girnet {

namespace {

constexpr double kSimplexSlack = 1e-9;

void check_simplex(const Tensor& g) {
    const Index m = g.rows();
    for (Index c = 0; c < g.cols(); ++c) {
        double sum = 0.0;
        for (Index j = 0; j < m; ++j) {
            const double v = g.rank() == 1 ? g[j] : g.at(j, c);
            if (v < -kSimplexSlack || v > 1.0 + kSimplexSlack)
                throw ContractError("gate value " + std::to_string(v) + " outside [0, 1]");
            sum += v;
        }
        if (sum > 1.0 + kSimplexSlack)
            throw ContractError("gate values sum to " + std::to_string(sum) + " > 1");
    }
}

Var softmax_head(const GateHeadParams& params, Var features) {
    const Index m = params.num_experts();
    Var u = add_col_broadcast(matmul(params.W, features), params.b);
    return slice_rows(softmax_columns(u), 0, m);
}

} // namespace

GateHeadWeights init_gate_head_weights(Index feature_dim, Index num_experts, Rng& rng) {
    if (num_experts < 1) throw ConfigError("gate head needs at least one expert");
    GateHeadWeights w;
    w.W = init_param({num_experts + 1, feature_dim}, InitScheme::ScaledUniform, rng);
    w.b = Tensor({num_experts + 1});
    return w;
}

Var gate_head(const GateHeadParams& params, Var x_t, Var h_prim_prev) {
    return softmax_head(params, concat_rows(x_t, h_prim_prev));
}

Var gate_head(const GateHeadParams& params, Var x_t, Var h_fwd_prev, Var h_bwd_next) {
    return softmax_head(params, concat_rows(concat_rows(x_t, h_fwd_prev), h_bwd_next));
}

GateTrace make_gate_trace(const Tensor& g) {
    if (g.rank() != 2) throw DimensionError("gate trace expects [n x m] values");
    GateTrace trace;
    trace.g = g;
    trace.skip = Tensor({g.rows()});
    for (Index t = 0; t < g.rows(); ++t) trace.skip[t] = 1.0 - g.mat().row(t).sum();
    return trace;
}

CompositeStep composite_step(std::span<const LstmParams> aux_cells, Var x_t,
                             const StreamState& comp_prev, Var g_t) {
    const Index m = static_cast<Index>(aux_cells.size());
    if (m < 1) throw ContractError("composite_step: no auxiliary cells");
    if (g_t.value().rows() != m)
        throw DimensionError("composite_step: " + std::to_string(m) + " cells but gates " +
                             g_t.value().shape_str());
    check_simplex(g_t.value());

    CompositeStep out;
    out.primaux.reserve(m);
    for (Index j = 0; j < m; ++j) out.primaux.push_back(lstm_step(aux_cells[j], x_t, comp_prev));

    Graph& g = *g_t.graph();
    const Index batch = g_t.value().cols();
    Var ones = g.leaf(Tensor::ones({batch}));
    Var skip = sub(ones, col_sum(g_t));

    Var h = colwise_scale(out.primaux[0].h, slice_rows(g_t, 0, 1));
    Var c = colwise_scale(out.primaux[0].c, slice_rows(g_t, 0, 1));
    for (Index j = 1; j < m; ++j) {
        h = h + colwise_scale(out.primaux[j].h, slice_rows(g_t, j, 1));
        c = c + colwise_scale(out.primaux[j].c, slice_rows(g_t, j, 1));
    }
    out.comp = {h + colwise_scale(comp_prev.h, skip), c + colwise_scale(comp_prev.c, skip)};
    return out;
}

GirnetStepOutputs run_girnet_steps(Graph& g, const GirnetCellParams& params,
                                   std::span<const Var> x, std::span<const Var> keep,
                                   std::span<const Var> drop, const GirnetRunOptions& opts) {
    if (x.empty()) throw ContractError("run_girnet_steps: empty sequence");
    const bool masked = !keep.empty();
    if (masked && (keep.size() != x.size() || drop.size() != x.size()))
        throw DimensionError("run_girnet_steps: mask length does not match sequence");
    if (opts.forced_gates && opts.forced_gates->size() != x.size())
        throw DimensionError("run_girnet_steps: forced gate count does not match sequence");

    const Index n = static_cast<Index>(x.size());
    const Index batch = x[0].value().cols();
    const Index d = params.aux_cells.empty() ? 0 : params.aux_cells[0].output_dim();
    for (const auto& cell : params.aux_cells)
        if (cell.output_dim() != d)
            throw DimensionError("run_girnet_steps: auxiliary cells must share hidden size");

    // Backward gating pre-pass: bwd_before[t] is the backward state that has
    // consumed positions t+1..n, i.e. the h_bwd_{t+1} the gate head reads.
    std::vector<Var> bwd_before(n), bwd_after(n);
    if (params.gating_bwd) {
        StreamState state = zero_state(g, params.gating_bwd->output_dim(), batch);
        for (Index t = n - 1; t >= 0; --t) {
            bwd_before[t] = state.h;
            state = masked ? lstm_step_masked(*params.gating_bwd, x[t], state, keep[t], drop[t])
                           : lstm_step(*params.gating_bwd, x[t], state);
            bwd_after[t] = state.h;
        }
    }

    GirnetStepOutputs out;
    out.h_prim.reserve(n);
    out.h_comp.reserve(n);
    out.c_comp.reserve(n);
    out.g.reserve(n);

    StreamState prim = zero_state(g, params.gating.output_dim(), batch);
    StreamState comp = zero_state(g, d, batch);
    for (Index t = 0; t < n; ++t) {
        Var g_t;
        if (opts.forced_gates) {
            check_simplex((*opts.forced_gates)[t]);
            g_t = g.leaf((*opts.forced_gates)[t]);
        } else {
            g_t = params.gating_bwd ? gate_head(params.gate_head, x[t], prim.h, bwd_before[t])
                                    : gate_head(params.gate_head, x[t], prim.h);
        }
        if (masked) g_t = colwise_scale(g_t, keep[t]);

        CompositeStep step = composite_step(params.aux_cells, x[t], comp, g_t);
        comp = step.comp;

        prim = masked ? lstm_step_masked(params.gating, x[t], prim, keep[t], drop[t])
                      : lstm_step(params.gating, x[t], prim);

        out.h_prim.push_back(params.gating_bwd ? concat_rows(prim.h, bwd_after[t]) : prim.h);
        out.h_comp.push_back(comp.h);
        out.c_comp.push_back(comp.c);
        out.g.push_back(g_t);
    }
    return out;
}

GirnetCellParams bind_cell_weights(Graph& g, const GirnetCellWeights& weights) {
    GirnetCellParams params{{g.leaf(weights.gating.W), g.leaf(weights.gating.b)},
                            std::nullopt,
                            {g.leaf(weights.gate_head.W), g.leaf(weights.gate_head.b)},
                            {}};
    if (weights.gating_bwd)
        params.gating_bwd = LstmParams{g.leaf(weights.gating_bwd->W), g.leaf(weights.gating_bwd->b)};
    for (const auto& cell : weights.aux_cells)
        params.aux_cells.push_back({g.leaf(cell.W), g.leaf(cell.b)});
    return params;
}

GirnetSequenceOutput run_girnet_sequence(const GirnetCellWeights& weights, const Tensor& x,
                                         const Tensor* forced_gates) {
    if (x.rank() != 2) throw DimensionError("run_girnet_sequence: x must be [n x d_emb]");
    const Index n = x.rows();
    const Index m = weights.num_experts();

    Graph g;
    GirnetCellParams params = bind_cell_weights(g, weights);
    std::vector<Var> steps = sequence_columns(g, x);

    std::vector<Tensor> forced;
    GirnetRunOptions opts;
    if (forced_gates) {
        if (forced_gates->rows() != n || forced_gates->cols() != m)
            throw DimensionError("run_girnet_sequence: forced gates " + forced_gates->shape_str() +
                                 " for n=" + std::to_string(n) + ", m=" + std::to_string(m));
        for (Index t = 0; t < n; ++t) {
            Tensor g_t({m});
            g_t.flat() = forced_gates->mat().row(t).transpose().array();
            forced.push_back(std::move(g_t));
        }
        opts.forced_gates = &forced;
    }

    GirnetStepOutputs steps_out = run_girnet_steps(g, params, steps, {}, {}, opts);

    GirnetSequenceOutput out;
    const Index d_prim = steps_out.h_prim[0].value().rows();
    const Index d = steps_out.h_comp[0].value().rows();
    out.h_prim = Tensor({n, d_prim});
    out.h_comp = Tensor({n, d});
    out.c_comp = Tensor({n, d});
    Tensor gates({n, m});
    for (Index t = 0; t < n; ++t) {
        out.h_prim.mat().row(t) =
            Eigen::VectorXd::Map(steps_out.h_prim[t].value().data(), d_prim).transpose();
        out.h_comp.mat().row(t) = Eigen::VectorXd::Map(steps_out.h_comp[t].value().data(), d).transpose();
        out.c_comp.mat().row(t) = Eigen::VectorXd::Map(steps_out.c_comp[t].value().data(), d).transpose();
        gates.mat().row(t) = Eigen::VectorXd::Map(steps_out.g[t].value().data(), m).transpose();
    }
    out.trace = make_gate_trace(gates);
    return out;
}

} // namespace girnet
