#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "girnet/ops.hpp"
#include "girnet/params.hpp"

namespace girnet {

// The fused weight W[(4d)x(d_in+d)] maps [x; h_prev] to the four gate blocks
// in the fixed order (c~, o, i, f); b has 4d entries in the same layout.

/// Value-level cell parameters.
struct LstmWeights {
    Tensor W;
    Tensor b;

    Index output_dim() const { return W.rows() / 4; }
    Index input_dim() const { return W.cols() - output_dim(); }
};

/// Graph-bound cell parameters.
struct LstmParams {
    Var W;
    Var b;

    Index output_dim() const { return W.value().rows() / 4; }
};

/// One recurrent stream's (h, c) pair; columns are batch entries.
struct StreamState {
    Var h;
    Var c;
};

/// Scaled-uniform fused weight, zero bias except the forget block at 1.
LstmWeights init_lstm_weights(Index d_in, Index d_out, Rng& rng);

/// Zero initial state with `d` rows and one column per batch entry.
StreamState zero_state(Graph& g, Index d, Index batch);

/// One LSTM transition: c_t = c~ (*) i + c_prev (*) f, h_t = o (*) tanh(c_t).
StreamState lstm_step(const LstmParams& params, Var x, const StreamState& prev);

/// As lstm_step, but columns with keep == 0 pass the previous state through
/// unchanged. keep/drop must be exact {0,1} complements.
StreamState lstm_step_masked(const LstmParams& params, Var x, const StreamState& prev, Var keep,
                             Var drop);

/// Value-level single step (test/oracle convenience).
std::pair<Tensor, Tensor> lstm_step(const LstmWeights& w, const Tensor& x, const Tensor& h_prev,
                                    const Tensor& c_prev);

/// Batched runner. x holds one Var per position ([d_in x B]); keep/drop may
/// be empty (no masking). With `reverse`, iteration runs from the last
/// position but outputs stay in original position order.
std::vector<StreamState> run_lstm_steps(Graph& g, const LstmParams& params, std::span<const Var> x,
                                        std::span<const Var> keep, std::span<const Var> drop,
                                        bool reverse = false);

/// Hidden-state sequence [n x d] for one unbatched sequence x [n x d_in],
/// from a zero initial state.
Tensor run_lstm_sequence(const LstmWeights& w, const Tensor& x, bool reverse = false);

/// Forward and reverse outputs concatenated per position: [n x 2d].
Tensor run_bilstm_sequence(const LstmWeights& fwd, const LstmWeights& bwd, const Tensor& x);

/// Graph-level helper: rows of x as one Var per position (each [d x 1]).
std::vector<Var> sequence_columns(Graph& g, const Tensor& x);

} // namespace girnet
