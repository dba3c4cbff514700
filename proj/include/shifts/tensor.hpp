#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <memory>
#include <vector>

#include "shifts/error.hpp"

namespace shifts {

using Shape = std::vector<int>;

int64_t numel(const Shape& s);

namespace detail {

/// One node of the computation graph. Holds the forward value, a lazily
/// allocated gradient buffer, and a closure that scatters this node's
/// gradient into its parents. The graph is a shared_ptr DAG rooted at the
/// tensors the caller still holds; dropping the loss tensor frees the tape.
struct Node {
    Shape shape;
    Eigen::ArrayXf value;
    Eigen::ArrayXf grad;  // size 0 until backward touches this node
    bool requires_grad = false;
    std::vector<std::shared_ptr<Node>> parents;
    std::function<void(Node&)> backward_fn;

    void ensure_grad() {
        if (grad.size() != value.size()) grad = Eigen::ArrayXf::Zero(value.size());
    }
};

}  // namespace detail

/// Tape recording is on by default; inference paths disable it with
/// NoGradGuard so forwards allocate no graph.
class NoGradGuard {
public:
    NoGradGuard();
    ~NoGradGuard();
    NoGradGuard(const NoGradGuard&) = delete;
    NoGradGuard& operator=(const NoGradGuard&) = delete;
    static bool grad_enabled();

private:
    bool prev_;
};

/// Dense row-major float32 tensor with optional reverse-mode gradient
/// participation. Cheap to copy: a copy shares the underlying node.
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(Shape shape, float fill = 0.0f);
    Tensor(Shape shape, std::vector<float> values);

    static Tensor scalar(float v);
    static Tensor zeros(Shape shape) { return Tensor(std::move(shape), 0.0f); }
    static Tensor ones(Shape shape) { return Tensor(std::move(shape), 1.0f); }
    static Tensor full(Shape shape, float v) { return Tensor(std::move(shape), v); }

    bool defined() const { return node_ != nullptr; }
    const Shape& shape() const;
    int rank() const { return static_cast<int>(shape().size()); }
    int dim(int axis) const;
    int64_t size() const;

    float* data();
    const float* data() const;
    float item() const;
    float at(std::initializer_list<int> idx) const;

    bool requires_grad() const;
    Tensor& set_requires_grad(bool v);

    bool has_grad() const;
    const float* grad_data() const;
    Tensor grad() const;  ///< copy of the gradient as a plain tensor
    void zero_grad();     ///< zero the buffer if present
    void clear_grad();    ///< drop the buffer entirely

    /// Same values, no tape history, no requires_grad.
    Tensor detach() const;
    /// Deep copy of the values (no tape history); keeps requires_grad off.
    Tensor clone() const;

    /// Copy raw values from another tensor of identical shape (no tape).
    void copy_values_from(const Tensor& src);

    std::shared_ptr<detail::Node> node() const { return node_; }
    static Tensor from_node(std::shared_ptr<detail::Node> n);

private:
    std::shared_ptr<detail::Node> node_;
};

/// Accumulate gradients of every requires_grad tensor reachable from `loss`.
/// `loss` must be a tape-connected scalar. Repeated calls accumulate.
void backward(const Tensor& loss);

// ---- elementwise -----------------------------------------------------------
// Binary ops accept `b` equal-shaped, scalar, or broadcastable to a's shape
// (numpy-style with b right-aligned; result always has a's shape).
Tensor add(const Tensor& a, const Tensor& b);
Tensor add(const Tensor& a, float b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, float b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, float b);
Tensor divide(const Tensor& a, const Tensor& b);
Tensor divide(const Tensor& a, float b);
inline Tensor scale(const Tensor& a, float c) { return mul(a, c); }
Tensor relu(const Tensor& a);
Tensor exp(const Tensor& a);
Tensor log(const Tensor& a);
Tensor sqrt(const Tensor& a);
/// Elementwise product that treats `mask` as a constant: backward sends no
/// gradient to the mask operand or through masked-out positions.
Tensor mask_multiply(const Tensor& a, const Tensor& mask);

// ---- structure -------------------------------------------------------------
Tensor matmul(const Tensor& a, const Tensor& b);
Tensor softmax(const Tensor& a, int axis);
Tensor sum(const Tensor& a);
Tensor sum(const Tensor& a, int axis, bool keepdim = false);
Tensor mean(const Tensor& a);
Tensor mean(const Tensor& a, int axis, bool keepdim = false);
Tensor mse(const Tensor& pred, const Tensor& target);
Tensor reshape(const Tensor& a, Shape new_shape);
Tensor permute(const Tensor& a, const std::vector<int>& axes);
Tensor concat(const Tensor& a, const Tensor& b, int axis);
Tensor narrow(const Tensor& a, int axis, int start, int len);

}  // namespace shifts
