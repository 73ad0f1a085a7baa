#pragma once

#include <vector>

#include "girnet/autodiff.hpp"

namespace girnet {

// Differentiable operations over Var. Shapes follow tensor.hpp conventions:
// rank-1 tensors act as columns, so every op below works unchanged for a
// single sequence (B = 1 column) and for a batch of columns.

Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b); // elementwise
Var scale(Var a, double c);

Var matmul(Var a, Var b);

/// M[p×B] + broadcast of bias[p] over columns.
Var add_col_broadcast(Var m, Var bias);

Var sigmoid(Var x);
Var tanh(Var x);

/// Column-wise stable softmax (rank-1 input treated as one column).
Var softmax_columns(Var x);

/// Stack a on top of b: [p×B] ++ [q×B] -> [(p+q)×B]. Rank-1 inputs give a
/// rank-1 result.
Var concat_rows(Var a, Var b);

/// Rows [r0, r0+len) of x. Gradient scatters back into place.
Var slice_rows(Var x, Index r0, Index len);

/// Scales column b of x by s[b]; s has one entry per column of x.
Var colwise_scale(Var x, Var s);

/// Column sums: [p×B] -> [B] (rank-1 input -> scalar-like [1]).
Var col_sum(Var x);

/// Sum of all entries -> shape [1].
Var sum_all(Var x);

/// Rows of table[V×d] gathered per id: out[:,b] = table[ids[b],:]^T, [d×B].
Var gather_rows(Var table, const std::vector<int>& ids);

/// Sum over columns b of w[b] * cross_entropy(logits[:,b], labels[b]) with a
/// stable log-sum-exp; returns shape [1]. Gradient per column is
/// w[b]*(softmax - onehot).
Var masked_ce_sum(Var logits, const std::vector<int>& labels, const std::vector<double>& weights);

/// Elementwise min(x, 1-x) (activity regularizer kernel).
Var min_fence(Var x);

inline Var operator+(Var a, Var b) { return add(a, b); }
inline Var operator-(Var a, Var b) { return sub(a, b); }
inline Var operator*(Var a, Var b) { return mul(a, b); }
inline Var operator*(double c, Var a) { return scale(a, c); }

} // namespace girnet
