#include "girnet/autodiff.hpp"

namespace girnet {

const char* op_tag_name(OpTag tag) {
    switch (tag) {
        case OpTag::Leaf: return "leaf";
        case OpTag::Add: return "add";
        case OpTag::Sub: return "sub";
        case OpTag::Mul: return "mul";
        case OpTag::Scale: return "scale";
        case OpTag::Matmul: return "matmul";
        case OpTag::AddColBroadcast: return "add_col_broadcast";
        case OpTag::Sigmoid: return "sigmoid";
        case OpTag::Tanh: return "tanh";
        case OpTag::SoftmaxCols: return "softmax_columns";
        case OpTag::ConcatRows: return "concat_rows";
        case OpTag::SliceRows: return "slice_rows";
        case OpTag::ColwiseScale: return "colwise_scale";
        case OpTag::ColSum: return "col_sum";
        case OpTag::SumAll: return "sum_all";
        case OpTag::GatherRows: return "gather_rows";
        case OpTag::MaskedCeSum: return "masked_ce_sum";
        case OpTag::MinFence: return "min_fence";
    }
    return "?";
}

void backward(Var root) {
    if (!root || !root.graph()) throw ContractError("backward: empty root");
    if (root.value().size() != 1)
        throw ContractError("backward: root must be scalar, got shape " +
                            root.value().shape_str());

    // Stamps are monotonically increasing across all graphs, so persistent
    // parameter nodes never carry a stale mark.
    static std::uint64_t stamp_counter = 0;
    const std::uint64_t stamp = ++stamp_counter;

    std::vector<Node*> stack{root.node()};
    root.node()->visit_stamp = stamp;
    while (!stack.empty()) {
        Node* n = stack.back();
        stack.pop_back();
        for (auto& e : n->parents) {
            if (e.parent->visit_stamp != stamp) {
                e.parent->visit_stamp = stamp;
                stack.push_back(e.parent);
            }
        }
    }

    root.node()->grad.flat() = 1.0;

    auto& nodes = root.graph()->nodes();
    for (auto it = nodes.rbegin(); it != nodes.rend(); ++it) {
        Node& n = *it;
        if (n.visit_stamp != stamp) continue;
        for (auto& e : n.parents) {
            Tensor contribution = e.vjp(n.grad);
            if (!contribution.same_shape(e.parent->value))
                throw ContractError(std::string("backward: vjp of ") + op_tag_name(n.tag) +
                                    " produced shape " + contribution.shape_str() +
                                    " for parent of shape " + e.parent->value.shape_str());
            e.parent->grad.flat() += contribution.flat();
        }
    }
}

} // namespace girnet
