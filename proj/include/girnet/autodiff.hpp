#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <utility>
#include <vector>

#include "girnet/tensor.hpp"

namespace girnet {

/// Debugging tag recording which operation produced a node.
enum class OpTag : std::uint8_t {
    Leaf,
    Add,
    Sub,
    Mul,
    Scale,
    Matmul,
    AddColBroadcast,
    Sigmoid,
    Tanh,
    SoftmaxCols,
    ConcatRows,
    SliceRows,
    ColwiseScale,
    ColSum,
    SumAll,
    GatherRows,
    MaskedCeSum,
    MinFence,
};

const char* op_tag_name(OpTag tag);

/// One vertex of the differentiation graph. `grad` always has the shape of
/// `value` and starts at zero. Each parent edge carries a closure mapping the
/// node's output gradient to that parent's gradient contribution.
struct Node {
    using Vjp = std::function<Tensor(const Tensor& out_grad)>;
    struct Edge {
        Node* parent;
        Vjp vjp;
    };

    Tensor value;
    Tensor grad;
    std::vector<Edge> parents;
    OpTag tag = OpTag::Leaf;
    std::uint64_t visit_stamp = 0;

    Node() = default;
    explicit Node(Tensor v, OpTag t = OpTag::Leaf)
        : value(std::move(v)), grad(value.shape()), tag(t) {}

    void zero_grad() { grad.set_zero(); }
};

class Graph;

/// Non-owning handle to a node inside (or referenced by) a graph.
class Var {
public:
    Var() = default;
    Var(Node* node, Graph* graph) : node_(node), graph_(graph) {}

    Node* node() const { return node_; }
    Graph* graph() const { return graph_; }
    const Tensor& value() const { return node_->value; }
    const Tensor& grad() const { return node_->grad; }
    explicit operator bool() const { return node_ != nullptr; }

private:
    Node* node_ = nullptr;
    Graph* graph_ = nullptr;
};

/// Define-by-run arena. Nodes are created in topological order, so the
/// reverse creation order is a valid reverse-topological sweep for backward.
/// One graph per training step; parameters live outside as persistent leaves.
class Graph {
public:
    Graph() = default;
    Graph(const Graph&) = delete;
    Graph& operator=(const Graph&) = delete;

    /// New leaf owned by this graph (inputs, constants).
    Var leaf(Tensor value) {
        nodes_.emplace_back(std::move(value), OpTag::Leaf);
        return {&nodes_.back(), this};
    }

    /// View of a persistent node (a stored parameter) inside this graph.
    Var use(Node& external) { return {&external, this}; }

    Node* emplace(Tensor value, OpTag tag) {
        nodes_.emplace_back(std::move(value), tag);
        return &nodes_.back();
    }

    std::size_t size() const { return nodes_.size(); }

    std::deque<Node>& nodes() { return nodes_; }

private:
    std::deque<Node> nodes_;
};

/// Reverse-mode sweep from a scalar root. Accumulates d(root)/d(node) into
/// every node reachable through parent edges; untouched elsewhere.
void backward(Var root);

} // namespace girnet
