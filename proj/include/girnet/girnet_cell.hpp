#pragma once

#include <optional>
#include <span>
#include <vector>

#include "girnet/lstm.hpp"

namespace girnet {

/// Gate head: (m+1) logits over [x_t; gating state], softmax, last value
/// discarded. The residual 1 - sum(g) is the skip weight.
struct GateHeadWeights {
    Tensor W;
    Tensor b;

    Index num_experts() const { return W.rows() - 1; }
};

struct GateHeadParams {
    Var W;
    Var b;

    Index num_experts() const { return W.value().rows() - 1; }
};

GateHeadWeights init_gate_head_weights(Index feature_dim, Index num_experts, Rng& rng);

/// g_t in [0,1]^m with sum(g_t) <= 1, one column per batch entry.
Var gate_head(const GateHeadParams& params, Var x_t, Var h_prim_prev);

/// Bidirectional variant: consumes [x_t; h_fwd_prev; h_bwd_next].
Var gate_head(const GateHeadParams& params, Var x_t, Var h_fwd_prev, Var h_bwd_next);

/// Per-position gate values for one sequence plus the implied skip weight.
struct GateTrace {
    Tensor g;    // [n x m]
    Tensor skip; // [n], skip[t] = 1 - sum_j g[t,j]
};

GateTrace make_gate_trace(const Tensor& g);

struct CompositeStep {
    StreamState comp;
    std::vector<StreamState> primaux;
};

/// One interleaving step: every auxiliary cell advances from the previous
/// composite state, then the new composite state is the gate-weighted sum of
/// the expert states plus (1 - sum g) of the previous composite state.
/// Gate values must satisfy the simplex precondition.
CompositeStep composite_step(std::span<const LstmParams> aux_cells, Var x_t,
                             const StreamState& comp_prev, Var g_t);

struct GirnetCellWeights {
    LstmWeights gating;
    std::optional<LstmWeights> gating_bwd; // set for bidirectional gating
    GateHeadWeights gate_head;
    std::vector<LstmWeights> aux_cells;

    Index num_experts() const { return static_cast<Index>(aux_cells.size()); }
};

struct GirnetCellParams {
    LstmParams gating;
    std::optional<LstmParams> gating_bwd;
    GateHeadParams gate_head;
    std::vector<LstmParams> aux_cells;

    Index num_experts() const { return static_cast<Index>(aux_cells.size()); }
};

struct GirnetRunOptions {
    /// When set, one [m x B] tensor per position replaces the gate head
    /// output (entries validated against the simplex precondition).
    const std::vector<Tensor>* forced_gates = nullptr;
};

/// Graph-level outputs, one Var per position.
struct GirnetStepOutputs {
    std::vector<Var> h_prim; // gating features ([d' x B], or [2d' x B] bidirectional)
    std::vector<Var> h_comp;
    std::vector<Var> c_comp;
    std::vector<Var> g; // [m x B]
};

/// Runs the gating stream, gate head and composite interleaving over a
/// batched sequence. Masked positions (keep == 0) force g_t = 0 so every
/// stream passes through unchanged.
GirnetStepOutputs run_girnet_steps(Graph& g, const GirnetCellParams& params,
                                   std::span<const Var> x, std::span<const Var> keep,
                                   std::span<const Var> drop, const GirnetRunOptions& opts = {});

/// Value-level results for a single sequence.
struct GirnetSequenceOutput {
    Tensor h_prim; // [n x d'] (or [n x 2d'])
    Tensor h_comp; // [n x d]
    Tensor c_comp; // [n x d]
    GateTrace trace;
};

/// Runs one pre-embedded sequence x [n x d_emb] from zero initial states.
GirnetSequenceOutput run_girnet_sequence(const GirnetCellWeights& weights, const Tensor& x,
                                         const Tensor* forced_gates = nullptr);

/// Binds value-level cell weights into a graph as constant leaves.
GirnetCellParams bind_cell_weights(Graph& g, const GirnetCellWeights& weights);

} // namespace girnet
