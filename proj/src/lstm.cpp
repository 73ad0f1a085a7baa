#include "girnet/lstm.hpp"

namespace girnet {

LstmWeights init_lstm_weights(Index d_in, Index d_out, Rng& rng) {
    if (d_in <= 0 || d_out <= 0) throw ConfigError("lstm dimensions must be positive");
    LstmWeights w;
    w.W = init_param({4 * d_out, d_in + d_out}, InitScheme::ScaledUniform, rng);
    w.b = Tensor({4 * d_out});
    for (Index i = 3 * d_out; i < 4 * d_out; ++i) w.b[i] = 1.0; // forget block
    return w;
}

StreamState zero_state(Graph& g, Index d, Index batch) {
    // Always one column per batch entry; rank-1 per-position inputs combine
    // with single-column states transparently.
    Tensor z({d, batch});
    Var h = g.leaf(z);
    Var c = g.leaf(std::move(z));
    return {h, c};
}

StreamState lstm_step(const LstmParams& params, Var x, const StreamState& prev) {
    const Index d = params.output_dim();
    if (x.value().rows() + d != params.W.value().cols())
        throw DimensionError("lstm_step: input " + x.value().shape_str() + " with weight " +
                             params.W.value().shape_str());
    Var z = add_col_broadcast(matmul(params.W, concat_rows(x, prev.h)), params.b);
    Var c_tilde = girnet::tanh(slice_rows(z, 0, d));
    Var o = sigmoid(slice_rows(z, d, d));
    Var i = sigmoid(slice_rows(z, 2 * d, d));
    Var f = sigmoid(slice_rows(z, 3 * d, d));
    Var c = mul(c_tilde, i) + mul(prev.c, f);
    Var h = mul(o, girnet::tanh(c));
    return {h, c};
}

StreamState lstm_step_masked(const LstmParams& params, Var x, const StreamState& prev, Var keep,
                             Var drop) {
    StreamState next = lstm_step(params, x, prev);
    return {colwise_scale(next.h, keep) + colwise_scale(prev.h, drop),
            colwise_scale(next.c, keep) + colwise_scale(prev.c, drop)};
}

std::pair<Tensor, Tensor> lstm_step(const LstmWeights& w, const Tensor& x, const Tensor& h_prev,
                                    const Tensor& c_prev) {
    Graph g;
    LstmParams params{g.leaf(w.W), g.leaf(w.b)};
    StreamState out = lstm_step(params, g.leaf(x), {g.leaf(h_prev), g.leaf(c_prev)});
    return {out.h.value(), out.c.value()};
}

std::vector<StreamState> run_lstm_steps(Graph& g, const LstmParams& params, std::span<const Var> x,
                                        std::span<const Var> keep, std::span<const Var> drop,
                                        bool reverse) {
    if (x.empty()) throw ContractError("run_lstm_steps: empty sequence");
    const bool masked = !keep.empty();
    if (masked && (keep.size() != x.size() || drop.size() != x.size()))
        throw DimensionError("run_lstm_steps: mask length does not match sequence");

    const Index n = static_cast<Index>(x.size());
    const Index batch = x[0].value().cols();
    std::vector<StreamState> out(n);
    StreamState state = zero_state(g, params.output_dim(), batch);
    for (Index step = 0; step < n; ++step) {
        const Index t = reverse ? n - 1 - step : step;
        state = masked ? lstm_step_masked(params, x[t], state, keep[t], drop[t])
                       : lstm_step(params, x[t], state);
        out[t] = state;
    }
    return out;
}

std::vector<Var> sequence_columns(Graph& g, const Tensor& x) {
    std::vector<Var> cols;
    cols.reserve(x.rows());
    for (Index t = 0; t < x.rows(); ++t) {
        Tensor xt({x.cols()});
        xt.flat() = x.mat().row(t).transpose().array();
        cols.push_back(g.leaf(std::move(xt)));
    }
    return cols;
}

Tensor run_lstm_sequence(const LstmWeights& w, const Tensor& x, bool reverse) {
    if (x.rank() != 2) throw DimensionError("run_lstm_sequence: x must be [n x d_in]");
    Graph g;
    LstmParams params{g.leaf(w.W), g.leaf(w.b)};
    std::vector<Var> steps = sequence_columns(g, x);
    std::vector<StreamState> states = run_lstm_steps(g, params, steps, {}, {}, reverse);
    Tensor out({x.rows(), w.output_dim()});
    for (Index t = 0; t < x.rows(); ++t)
        out.mat().row(t) = Eigen::VectorXd::Map(states[t].h.value().data(), w.output_dim())
                               .transpose();
    return out;
}

Tensor run_bilstm_sequence(const LstmWeights& fwd, const LstmWeights& bwd, const Tensor& x) {
    Tensor f = run_lstm_sequence(fwd, x, false);
    Tensor b = run_lstm_sequence(bwd, x, true);
    Tensor out({x.rows(), f.cols() + b.cols()});
    out.mat().leftCols(f.cols()) = f.mat();
    out.mat().rightCols(b.cols()) = b.mat();
    return out;
}

} // namespace girnet
