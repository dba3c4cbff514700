#include "shifts/tensor.hpp"

#include <algorithm>
#include <unordered_set>

namespace shifts {

namespace {
thread_local bool g_grad_enabled = true;
}

NoGradGuard::NoGradGuard() : prev_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = prev_; }
bool NoGradGuard::grad_enabled() { return g_grad_enabled; }

int64_t numel(const Shape& s) {
    int64_t n = 1;
    for (int d : s) n *= d;
    return n;
}

static void check_shape(const Shape& s) {
    for (int d : s) {
        if (d <= 0) throw ValueError("tensor shape must have positive dims, got " + shape_str(s));
    }
}

Tensor::Tensor(Shape shape, float fill) {
    check_shape(shape);
    node_ = std::make_shared<detail::Node>();
    node_->value = Eigen::ArrayXf::Constant(numel(shape), fill);
    node_->shape = std::move(shape);
}

Tensor::Tensor(Shape shape, std::vector<float> values) {
    check_shape(shape);
    if (numel(shape) != static_cast<int64_t>(values.size())) {
        throw ValueError("tensor data length " + std::to_string(values.size()) +
                         " does not match shape " + shape_str(shape));
    }
    node_ = std::make_shared<detail::Node>();
    node_->value = Eigen::Map<const Eigen::ArrayXf>(values.data(), static_cast<int64_t>(values.size()));
    node_->shape = std::move(shape);
}

Tensor Tensor::scalar(float v) { return Tensor(Shape{1}, std::vector<float>{v}); }

const Shape& Tensor::shape() const {
    if (!node_) throw ValueError("operation on undefined tensor");
    return node_->shape;
}

int Tensor::dim(int axis) const {
    const Shape& s = shape();
    if (axis < 0 || axis >= static_cast<int>(s.size()))
        throw ValueError("axis " + std::to_string(axis) + " out of range for shape " + shape_str(s));
    return s[axis];
}

int64_t Tensor::size() const { return node_ ? node_->value.size() : 0; }

float* Tensor::data() {
    if (!node_) throw ValueError("operation on undefined tensor");
    return node_->value.data();
}

const float* Tensor::data() const {
    if (!node_) throw ValueError("operation on undefined tensor");
    return node_->value.data();
}

float Tensor::item() const {
    if (size() != 1) throw ValueError("item() requires a scalar tensor, got shape " + shape_str(shape()));
    return node_->value[0];
}

float Tensor::at(std::initializer_list<int> idx) const {
    const Shape& s = shape();
    if (idx.size() != s.size())
        throw ValueError("index rank does not match tensor rank " + shape_str(s));
    int64_t off = 0;
    int ax = 0;
    for (int i : idx) {
        if (i < 0 || i >= s[ax]) throw ValueError("index out of range for shape " + shape_str(s));
        off = off * s[ax] + i;
        ++ax;
    }
    return node_->value[off];
}

bool Tensor::requires_grad() const { return node_ && node_->requires_grad; }

Tensor& Tensor::set_requires_grad(bool v) {
    if (!node_) throw ValueError("operation on undefined tensor");
    if (v && node_->backward_fn)
        throw ValueError("requires_grad can only be toggled on leaf tensors");
    node_->requires_grad = v;
    return *this;
}

bool Tensor::has_grad() const { return node_ && node_->grad.size() == node_->value.size(); }

const float* Tensor::grad_data() const {
    if (!has_grad()) throw ValueError("tensor has no gradient buffer");
    return node_->grad.data();
}

Tensor Tensor::grad() const {
    if (!has_grad()) throw ValueError("tensor has no gradient buffer");
    Tensor out(shape());
    Eigen::Map<Eigen::ArrayXf>(out.data(), size()) = node_->grad;
    return out;
}

void Tensor::zero_grad() {
    if (node_ && node_->grad.size()) node_->grad.setZero();
}

void Tensor::clear_grad() {
    if (node_) node_->grad.resize(0);
}

Tensor Tensor::detach() const {
    if (!node_) return Tensor();
    Tensor out;
    auto n = std::make_shared<detail::Node>();
    n->shape = node_->shape;
    n->value = node_->value;
    return from_node(std::move(n));
}

Tensor Tensor::clone() const { return detach(); }

void Tensor::copy_values_from(const Tensor& src) {
    if (!node_ || !src.node_) throw ValueError("operation on undefined tensor");
    if (node_->shape != src.node_->shape)
        throw ValueError("copy_values_from: shape mismatch " + shape_str(node_->shape) + " vs " +
                         shape_str(src.node_->shape));
    node_->value = src.node_->value;
}

Tensor Tensor::from_node(std::shared_ptr<detail::Node> n) {
    Tensor t;
    t.node_ = std::move(n);
    return t;
}

void backward(const Tensor& loss) {
    if (!loss.defined()) throw ValueError("backward: undefined loss tensor");
    if (loss.size() != 1)
        throw ValueError("backward: loss must be a scalar, got shape " + shape_str(loss.shape()));
    if (!loss.requires_grad())
        throw ValueError("backward: loss is not connected to any differentiable input");

    // Post-order over the requires_grad subgraph.
    std::vector<detail::Node*> topo;
    std::unordered_set<detail::Node*> seen;
    struct Frame {
        detail::Node* n;
        size_t next_parent;
    };
    std::vector<Frame> stack;
    stack.push_back({loss.node().get(), 0});
    seen.insert(loss.node().get());
    while (!stack.empty()) {
        Frame& f = stack.back();
        if (f.next_parent < f.n->parents.size()) {
            detail::Node* p = f.n->parents[f.next_parent++].get();
            if (p->requires_grad && !seen.count(p)) {
                seen.insert(p);
                stack.push_back({p, 0});
            }
        } else {
            topo.push_back(f.n);
            stack.pop_back();
        }
    }

    // Interior gradients are per-call scratch; leaf gradients accumulate
    // across calls until cleared.
    for (detail::Node* n : topo) {
        if (n->backward_fn) {
            n->ensure_grad();
            n->grad.setZero();
        }
    }
    detail::Node* root = loss.node().get();
    root->ensure_grad();
    root->grad[0] += 1.0f;

    for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
        if ((*it)->backward_fn) (*it)->backward_fn(**it);
    }
}

}  // namespace shifts
