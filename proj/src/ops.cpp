#include "girnet/ops.hpp"

#include <cmath>

namespace girnet {

namespace {

Graph& graph_of(Var a, Var b = {}) {
    Graph* g = a.graph() ? a.graph() : b.graph();
    if (!g) throw ContractError("op applied to detached Var");
    return *g;
}

Var make(Graph& g, Tensor value, OpTag tag, std::vector<Node::Edge> edges) {
    Node* n = g.emplace(std::move(value), tag);
    n->parents = std::move(edges);
    return {n, &g};
}

} // namespace

Var add(Var a, Var b) {
    check_same_shape(a.value(), b.value(), "add");
    Graph& g = graph_of(a, b);
    Tensor out(a.value().shape());
    out.flat() = a.value().flat() + b.value().flat();
    auto pass = [](const Tensor& og) { return og; };
    return make(g, std::move(out), OpTag::Add, {{a.node(), pass}, {b.node(), pass}});
}

Var sub(Var a, Var b) {
    check_same_shape(a.value(), b.value(), "sub");
    Graph& g = graph_of(a, b);
    Tensor out(a.value().shape());
    out.flat() = a.value().flat() - b.value().flat();
    return make(g, std::move(out), OpTag::Sub,
                {{a.node(), [](const Tensor& og) { return og; }},
                 {b.node(), [](const Tensor& og) { return scale(og, -1.0); }}});
}

Var mul(Var a, Var b) {
    check_same_shape(a.value(), b.value(), "mul");
    Graph& g = graph_of(a, b);
    Tensor out(a.value().shape());
    out.flat() = a.value().flat() * b.value().flat();
    return make(g, std::move(out), OpTag::Mul,
                {{a.node(), [bn = b.node()](const Tensor& og) { return hadamard(og, bn->value); }},
                 {b.node(), [an = a.node()](const Tensor& og) { return hadamard(og, an->value); }}});
}

Var scale(Var a, double c) {
    Graph& g = graph_of(a);
    Tensor out(a.value().shape());
    out.flat() = a.value().flat() * c;
    return make(g, std::move(out), OpTag::Scale,
                {{a.node(), [c](const Tensor& og) { return scale(og, c); }}});
}

Var matmul(Var a, Var b) {
    Graph& g = graph_of(a, b);
    Tensor out = matmul(a.value(), b.value());
    auto da = [an = a.node(), bn = b.node()](const Tensor& og) {
        Tensor d({an->value.rows(), an->value.cols()});
        d.mat().noalias() = og.mat() * bn->value.mat().transpose();
        return d;
    };
    auto db = [an = a.node(), bn = b.node()](const Tensor& og) {
        Tensor d(bn->value.shape());
        d.mat().noalias() = an->value.mat().transpose() * og.mat();
        return d;
    };
    return make(g, std::move(out), OpTag::Matmul, {{a.node(), da}, {b.node(), db}});
}

Var add_col_broadcast(Var m, Var bias) {
    if (bias.value().rank() != 1 || bias.value().size() != m.value().rows())
        throw DimensionError("add_col_broadcast: bias " + bias.value().shape_str() +
                             " does not match " + m.value().shape_str());
    Graph& g = graph_of(m, bias);
    Tensor out(m.value().shape());
    out.mat() = m.value().mat().colwise() + Eigen::VectorXd::Map(bias.value().data(), bias.value().size());
    auto dbias = [](const Tensor& og) {
        Tensor d({og.rows()});
        d.mat() = og.mat().rowwise().sum();
        return d;
    };
    return make(g, std::move(out), OpTag::AddColBroadcast,
                {{m.node(), [](const Tensor& og) { return og; }}, {bias.node(), dbias}});
}

Var sigmoid(Var x) {
    Graph& g = graph_of(x);
    Var y = make(g, sigmoid(x.value()), OpTag::Sigmoid, {});
    y.node()->parents.push_back({x.node(), [yn = y.node()](const Tensor& og) {
                                     Tensor d(og.shape());
                                     d.flat() = og.flat() * yn->value.flat() * (1.0 - yn->value.flat());
                                     return d;
                                 }});
    return y;
}

Var tanh(Var x) {
    Graph& g = graph_of(x);
    Var y = make(g, tanh(x.value()), OpTag::Tanh, {});
    y.node()->parents.push_back({x.node(), [yn = y.node()](const Tensor& og) {
                                     Tensor d(og.shape());
                                     d.flat() = og.flat() * (1.0 - yn->value.flat().square());
                                     return d;
                                 }});
    return y;
}

Var softmax_columns(Var x) {
    Graph& g = graph_of(x);
    Var y = make(g, softmax_columns(x.value()), OpTag::SoftmaxCols, {});
    y.node()->parents.push_back({x.node(), [yn = y.node()](const Tensor& og) {
                                     Tensor d(og.shape());
                                     auto p = yn->value.mat();
                                     auto go = og.mat();
                                     auto dm = d.mat();
                                     for (Index c = 0; c < p.cols(); ++c) {
                                         const double dot = p.col(c).dot(go.col(c));
                                         dm.col(c) = p.col(c).array() * (go.col(c).array() - dot);
                                     }
                                     return d;
                                 }});
    return y;
}

Var concat_rows(Var a, Var b) {
    const Tensor& av = a.value();
    const Tensor& bv = b.value();
    if (av.cols() != bv.cols())
        throw DimensionError("concat_rows: column counts differ, " + av.shape_str() + " vs " +
                             bv.shape_str());
    Graph& g = graph_of(a, b);
    const bool vec = av.rank() == 1 && bv.rank() == 1;
    Tensor out = vec ? Tensor({av.rows() + bv.rows()}) : Tensor({av.rows() + bv.rows(), av.cols()});
    out.mat().topRows(av.rows()) = av.mat();
    out.mat().bottomRows(bv.rows()) = bv.mat();
    const Index ar = av.rows();
    auto da = [an = a.node(), ar](const Tensor& og) {
        Tensor d(an->value.shape());
        d.mat() = og.mat().topRows(ar);
        return d;
    };
    auto db = [bn = b.node(), ar](const Tensor& og) {
        Tensor d(bn->value.shape());
        d.mat() = og.mat().bottomRows(og.rows() - ar);
        return d;
    };
    return make(g, std::move(out), OpTag::ConcatRows, {{a.node(), da}, {b.node(), db}});
}

Var slice_rows(Var x, Index r0, Index len) {
    const Tensor& xv = x.value();
    if (r0 < 0 || len <= 0 || r0 + len > xv.rows())
        throw DimensionError("slice_rows: rows [" + std::to_string(r0) + ", " +
                             std::to_string(r0 + len) + ") out of " + xv.shape_str());
    Graph& g = graph_of(x);
    Tensor out = xv.rank() == 1 ? Tensor({len}) : Tensor({len, xv.cols()});
    out.mat() = xv.mat().middleRows(r0, len);
    auto dx = [xn = x.node(), r0, len](const Tensor& og) {
        Tensor d(xn->value.shape());
        d.mat().middleRows(r0, len) = og.mat();
        return d;
    };
    return make(g, std::move(out), OpTag::SliceRows, {{x.node(), dx}});
}

Var colwise_scale(Var x, Var s) {
    const Tensor& xv = x.value();
    const Tensor& sv = s.value();
    if (sv.size() != xv.cols())
        throw DimensionError("colwise_scale: " + std::to_string(sv.size()) + " scales for " +
                             xv.shape_str());
    Graph& g = graph_of(x, s);
    Tensor out(xv.shape());
    out.mat() = xv.mat() * Eigen::VectorXd::Map(sv.data(), sv.size()).asDiagonal();
    auto dx = [sn = s.node()](const Tensor& og) {
        Tensor d(og.shape());
        d.mat() = og.mat() * Eigen::VectorXd::Map(sn->value.data(), sn->value.size()).asDiagonal();
        return d;
    };
    auto ds = [xn = x.node(), sn = s.node()](const Tensor& og) {
        Tensor d(sn->value.shape());
        for (Index c = 0; c < og.cols(); ++c) d[c] = og.mat().col(c).dot(xn->value.mat().col(c));
        return d;
    };
    return make(g, std::move(out), OpTag::ColwiseScale, {{x.node(), dx}, {s.node(), ds}});
}

Var col_sum(Var x) {
    Graph& g = graph_of(x);
    Tensor out({x.value().cols()});
    out.mat() = x.value().mat().colwise().sum().transpose();
    auto dx = [xn = x.node()](const Tensor& og) {
        Tensor d(xn->value.shape());
        d.mat() = Eigen::VectorXd::Ones(xn->value.rows()) *
                  Eigen::VectorXd::Map(og.data(), og.size()).transpose();
        return d;
    };
    return make(g, std::move(out), OpTag::ColSum, {{x.node(), dx}});
}

Var sum_all(Var x) {
    Graph& g = graph_of(x);
    Tensor out = Tensor::scalar(x.value().flat().sum());
    auto dx = [xn = x.node()](const Tensor& og) {
        return Tensor::full(xn->value.shape(), og[0]);
    };
    return make(g, std::move(out), OpTag::SumAll, {{x.node(), dx}});
}

Var gather_rows(Var table, const std::vector<int>& ids) {
    const Tensor& tv = table.value();
    if (tv.rank() != 2) throw DimensionError("gather_rows: table must be 2-d");
    for (int id : ids)
        if (id < 0 || id >= tv.rows())
            throw DataError("gather_rows: id " + std::to_string(id) + " out of table " +
                            tv.shape_str());
    Graph& g = graph_of(table);
    const Index b = static_cast<Index>(ids.size());
    Tensor out({tv.cols(), b});
    for (Index c = 0; c < b; ++c) out.mat().col(c) = tv.mat().row(ids[c]).transpose();
    auto dt = [tn = table.node(), ids](const Tensor& og) {
        Tensor d(tn->value.shape());
        for (Index c = 0; c < static_cast<Index>(ids.size()); ++c)
            d.mat().row(ids[c]) += og.mat().col(c).transpose();
        return d;
    };
    return make(g, std::move(out), OpTag::GatherRows, {{table.node(), dt}});
}

Var masked_ce_sum(Var logits, const std::vector<int>& labels, const std::vector<double>& weights) {
    const Tensor& lv = logits.value();
    const Index b = lv.cols();
    const Index classes = lv.rows();
    if (static_cast<Index>(labels.size()) != b || static_cast<Index>(weights.size()) != b)
        throw DimensionError("masked_ce_sum: " + std::to_string(labels.size()) + " labels / " +
                             std::to_string(weights.size()) + " weights for " + lv.shape_str());
    for (Index c = 0; c < b; ++c)
        if (weights[c] != 0.0 && (labels[c] < 0 || labels[c] >= classes))
            throw DataError("masked_ce_sum: label " + std::to_string(labels[c]) +
                            " out of range for " + std::to_string(classes) + " classes");

    Graph& g = graph_of(logits);
    double total = 0.0;
    Tensor probs = softmax_columns(lv);
    for (Index c = 0; c < b; ++c) {
        if (weights[c] == 0.0) continue;
        const double m = lv.mat().col(c).maxCoeff();
        const double lse = m + std::log((lv.mat().col(c).array() - m).exp().sum());
        total += weights[c] * (lse - lv.at(labels[c], c));
    }
    auto dl = [ln = logits.node(), labels, weights, probs](const Tensor& og) {
        Tensor d(ln->value.shape());
        for (Index c = 0; c < d.cols(); ++c) {
            if (weights[c] == 0.0) continue;
            d.mat().col(c) = og[0] * weights[c] * probs.mat().col(c);
            d.at(labels[c], c) -= og[0] * weights[c];
        }
        return d;
    };
    return make(g, Tensor::scalar(total), OpTag::MaskedCeSum, {{logits.node(), dl}});
}

Var min_fence(Var x) {
    Graph& g = graph_of(x);
    Tensor out(x.value().shape());
    out.flat() = x.value().flat().min(1.0 - x.value().flat());
    auto dx = [xn = x.node()](const Tensor& og) {
        Tensor d(og.shape());
        d.flat() = og.flat() * (xn->value.flat() <= 0.5).cast<double>() * 2.0 - og.flat();
        return d;
    };
    return make(g, std::move(out), OpTag::MinFence, {{x.node(), dx}});
}

} // namespace girnet
