#include <cmath>
#include <utility>

#include "shifts/tensor.hpp"

namespace shifts {

using detail::Node;
using NodePtr = std::shared_ptr<Node>;

namespace {

bool recording(const Tensor& a) { return NoGradGuard::grad_enabled() && a.requires_grad(); }
bool recording(const Tensor& a, const Tensor& b) {
    return NoGradGuard::grad_enabled() && (a.requires_grad() || b.requires_grad());
}

Tensor make_result(Shape shape, Eigen::ArrayXf value, bool record,
                   std::vector<NodePtr> parents, std::function<void(Node&)> bw) {
    auto n = std::make_shared<Node>();
    n->shape = std::move(shape);
    n->value = std::move(value);
    if (record) {
        n->requires_grad = true;
        n->parents = std::move(parents);
        n->backward_fn = std::move(bw);
    }
    return Tensor::from_node(std::move(n));
}

// Broadcast of b onto a's shape, numpy-style with b right-aligned. Result
// always takes a's shape; every b dim must equal a's or be 1.
struct BcastPlan {
    enum class Kind { same, scalar, strided } kind;
    std::vector<int64_t> dims;      // a's dims
    std::vector<int64_t> b_stride;  // stride into b per a axis (0 where broadcast)
};

BcastPlan plan_bcast(const Shape& a, const Shape& b, const char* op) {
    BcastPlan p;
    if (a == b) {
        p.kind = BcastPlan::Kind::same;
        return p;
    }
    if (numel(b) == 1) {
        p.kind = BcastPlan::Kind::scalar;
        return p;
    }
    const int ra = static_cast<int>(a.size());
    const int rb = static_cast<int>(b.size());
    if (rb > ra)
        throw ValueError(std::string(op) + ": shape mismatch " + shape_str(a) + " vs " + shape_str(b));
    std::vector<int64_t> b_dim(ra, 1);
    for (int i = 0; i < rb; ++i) b_dim[ra - rb + i] = b[i];
    p.kind = BcastPlan::Kind::strided;
    p.dims.resize(ra);
    p.b_stride.resize(ra);
    int64_t stride = 1;
    for (int i = ra - 1; i >= 0; --i) {
        p.dims[i] = a[i];
        if (b_dim[i] == a[i]) {
            p.b_stride[i] = stride;
            stride *= b_dim[i];
        } else if (b_dim[i] == 1) {
            p.b_stride[i] = 0;
        } else {
            throw ValueError(std::string(op) + ": shape mismatch " + shape_str(a) + " vs " +
                             shape_str(b));
        }
    }
    return p;
}

// Calls f(ia, ib) for every element of a with the matching b offset.
template <class F>
void for_each_bcast(const BcastPlan& p, int64_t n, F&& f) {
    const int rank = static_cast<int>(p.dims.size());
    std::vector<int64_t> cnt(rank, 0);
    int64_t ib = 0;
    for (int64_t ia = 0; ia < n; ++ia) {
        f(ia, ib);
        for (int ax = rank - 1; ax >= 0; --ax) {
            if (++cnt[ax] < p.dims[ax]) {
                ib += p.b_stride[ax];
                break;
            }
            cnt[ax] = 0;
            ib -= p.b_stride[ax] * (p.dims[ax] - 1);
        }
    }
}

// Generic broadcasting binary op. DfA/DfB map (a, b, go) -> gradient
// contribution for the respective operand.
template <class F, class DfA, class DfB>
Tensor binary_op(const Tensor& a, const Tensor& b, const char* name, F f, DfA dfda, DfB dfdb,
                 bool grad_to_b = true) {
    const BcastPlan plan = plan_bcast(a.shape(), b.shape(), name);
    const int64_t n = a.size();
    Eigen::ArrayXf out(n);
    const float* av = a.data();
    const float* bv = b.data();
    switch (plan.kind) {
        case BcastPlan::Kind::same:
            for (int64_t i = 0; i < n; ++i) out[i] = f(av[i], bv[i]);
            break;
        case BcastPlan::Kind::scalar: {
            const float s = bv[0];
            for (int64_t i = 0; i < n; ++i) out[i] = f(av[i], s);
            break;
        }
        case BcastPlan::Kind::strided:
            for_each_bcast(plan, n, [&](int64_t ia, int64_t ib) { out[ia] = f(av[ia], bv[ib]); });
            break;
    }

    const bool rec = recording(a, b);
    NodePtr pa = a.node(), pb = b.node();
    auto bw = [pa, pb, plan, n, dfda, dfdb, grad_to_b](Node& self) {
        const float* av = pa->value.data();
        const float* bv = pb->value.data();
        const float* go = self.grad.data();
        const bool wa = pa->requires_grad;
        const bool wb = grad_to_b && pb->requires_grad;
        if (wa) pa->ensure_grad();
        if (wb) pb->ensure_grad();
        float* ga = wa ? pa->grad.data() : nullptr;
        float* gb = wb ? pb->grad.data() : nullptr;
        switch (plan.kind) {
            case BcastPlan::Kind::same:
                for (int64_t i = 0; i < n; ++i) {
                    if (wa) ga[i] += dfda(av[i], bv[i], go[i]);
                    if (wb) gb[i] += dfdb(av[i], bv[i], go[i]);
                }
                break;
            case BcastPlan::Kind::scalar: {
                const float s = bv[0];
                double acc = 0.0;
                for (int64_t i = 0; i < n; ++i) {
                    if (wa) ga[i] += dfda(av[i], s, go[i]);
                    if (wb) acc += dfdb(av[i], s, go[i]);
                }
                if (wb) gb[0] += static_cast<float>(acc);
                break;
            }
            case BcastPlan::Kind::strided:
                for_each_bcast(plan, n, [&](int64_t ia, int64_t ib) {
                    if (wa) ga[ia] += dfda(av[ia], bv[ib], go[ia]);
                    if (wb) gb[ib] += dfdb(av[ia], bv[ib], go[ia]);
                });
                break;
        }
    };
    return make_result(a.shape(), std::move(out), rec, {pa, pb}, std::move(bw));
}

// Unary op, optionally with a baked-in constant.
template <class F, class Df>
Tensor unary_op(const Tensor& a, F f, Df dfda) {
    const int64_t n = a.size();
    Eigen::ArrayXf out(n);
    const float* av = a.data();
    for (int64_t i = 0; i < n; ++i) out[i] = f(av[i]);
    NodePtr pa = a.node();
    auto bw = [pa, n, dfda](Node& self) {
        if (!pa->requires_grad) return;
        pa->ensure_grad();
        const float* av = pa->value.data();
        const float* ov = self.value.data();
        const float* go = self.grad.data();
        float* ga = pa->grad.data();
        for (int64_t i = 0; i < n; ++i) ga[i] += dfda(av[i], ov[i], go[i]);
    };
    return make_result(a.shape(), std::move(out), recording(a), {pa}, std::move(bw));
}

void check_same_shape(const Tensor& a, const Tensor& b, const char* op) {
    if (a.shape() != b.shape())
        throw ValueError(std::string(op) + ": shape mismatch " + shape_str(a.shape()) + " vs " +
                         shape_str(b.shape()));
}

// Lane decomposition for axis ops: index = (o * lane + l) * inner + i.
struct Lanes {
    int64_t outer, lane, inner;
};

Lanes lanes_for(const Shape& s, int axis, const char* op) {
    if (axis < 0 || axis >= static_cast<int>(s.size()))
        throw ValueError(std::string(op) + ": axis " + std::to_string(axis) +
                         " out of range for shape " + shape_str(s));
    Lanes l{1, s[axis], 1};
    for (int i = 0; i < axis; ++i) l.outer *= s[i];
    for (int i = axis + 1; i < static_cast<int>(s.size()); ++i) l.inner *= s[i];
    return l;
}

}  // namespace

// ---- elementwise -----------------------------------------------------------

Tensor add(const Tensor& a, const Tensor& b) {
    return binary_op(
        a, b, "add", [](float x, float y) { return x + y; },
        [](float, float, float go) { return go; }, [](float, float, float go) { return go; });
}

Tensor sub(const Tensor& a, const Tensor& b) {
    return binary_op(
        a, b, "sub", [](float x, float y) { return x - y; },
        [](float, float, float go) { return go; }, [](float, float, float go) { return -go; });
}

Tensor mul(const Tensor& a, const Tensor& b) {
    return binary_op(
        a, b, "mul", [](float x, float y) { return x * y; },
        [](float, float y, float go) { return go * y; },
        [](float x, float, float go) { return go * x; });
}

Tensor divide(const Tensor& a, const Tensor& b) {
    const float* bv = b.data();
    for (int64_t i = 0; i < b.size(); ++i) {
        if (bv[i] == 0.0f) throw ValueError("divide: divisor contains zero entries");
    }
    return binary_op(
        a, b, "divide", [](float x, float y) { return x / y; },
        [](float, float y, float go) { return go / y; },
        [](float x, float y, float go) { return -go * x / (y * y); });
}

Tensor add(const Tensor& a, float b) {
    return unary_op(a, [b](float x) { return x + b; }, [](float, float, float go) { return go; });
}

Tensor sub(const Tensor& a, float b) { return add(a, -b); }

Tensor mul(const Tensor& a, float b) {
    return unary_op(a, [b](float x) { return x * b; },
                    [b](float, float, float go) { return go * b; });
}

Tensor divide(const Tensor& a, float b) {
    if (b == 0.0f) throw ValueError("divide: divisor is zero");
    return mul(a, 1.0f / b);
}

Tensor relu(const Tensor& a) {
    return unary_op(a, [](float x) { return x > 0.0f ? x : 0.0f; },
                    [](float x, float, float go) { return x > 0.0f ? go : 0.0f; });
}

Tensor exp(const Tensor& a) {
    return unary_op(a, [](float x) { return std::exp(x); },
                    [](float, float out, float go) { return go * out; });
}

Tensor log(const Tensor& a) {
    const float* av = a.data();
    for (int64_t i = 0; i < a.size(); ++i) {
        if (!(av[i] > 0.0f)) throw ValueError("log: input contains non-positive entries");
    }
    return unary_op(a, [](float x) { return std::log(x); },
                    [](float x, float, float go) { return go / x; });
}

Tensor sqrt(const Tensor& a) {
    const float* av = a.data();
    for (int64_t i = 0; i < a.size(); ++i) {
        if (av[i] < 0.0f) throw ValueError("sqrt: input contains negative entries");
    }
    return unary_op(a, [](float x) { return std::sqrt(x); },
                    [](float, float out, float go) { return out > 0.0f ? go / (2.0f * out) : 0.0f; });
}

Tensor mask_multiply(const Tensor& a, const Tensor& mask) {
    return binary_op(
        a, mask, "mask_multiply", [](float x, float m) { return x * m; },
        [](float, float m, float go) { return go * m; },
        [](float, float, float) { return 0.0f; },
        /*grad_to_b=*/false);
}

// ---- structure -------------------------------------------------------------

Tensor matmul(const Tensor& a, const Tensor& b) {
    if (a.rank() != 2 || b.rank() != 2 || a.dim(1) != b.dim(0))
        throw ValueError("matmul: incompatible shapes " + shape_str(a.shape()) + " x " +
                         shape_str(b.shape()));
    const int m = a.dim(0), k = a.dim(1), n = b.dim(1);
    using RowMat = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    using CMap = Eigen::Map<const RowMat>;
    Eigen::ArrayXf out(static_cast<int64_t>(m) * n);
    Eigen::Map<RowMat>(out.data(), m, n) = CMap(a.data(), m, k) * CMap(b.data(), k, n);

    NodePtr pa = a.node(), pb = b.node();
    auto bw = [pa, pb, m, k, n](Node& self) {
        CMap go(self.grad.data(), m, n);
        if (pa->requires_grad) {
            pa->ensure_grad();
            Eigen::Map<RowMat>(pa->grad.data(), m, k) += go * CMap(pb->value.data(), k, n).transpose();
        }
        if (pb->requires_grad) {
            pb->ensure_grad();
            Eigen::Map<RowMat>(pb->grad.data(), k, n) += CMap(pa->value.data(), m, k).transpose() * go;
        }
    };
    return make_result({m, n}, std::move(out), recording(a, b), {pa, pb}, std::move(bw));
}

Tensor softmax(const Tensor& a, int axis) {
    const Lanes ln = lanes_for(a.shape(), axis, "softmax");
    const int64_t n = a.size();
    Eigen::ArrayXf out(n);
    const float* av = a.data();
    for (int64_t o = 0; o < ln.outer; ++o) {
        for (int64_t i = 0; i < ln.inner; ++i) {
            const int64_t base = o * ln.lane * ln.inner + i;
            float mx = av[base];
            for (int64_t l = 1; l < ln.lane; ++l)
                mx = std::max(mx, av[base + l * ln.inner]);
            double s = 0.0;
            for (int64_t l = 0; l < ln.lane; ++l) {
                const float e = std::exp(av[base + l * ln.inner] - mx);
                out[base + l * ln.inner] = e;
                s += e;
            }
            const float inv = static_cast<float>(1.0 / s);
            for (int64_t l = 0; l < ln.lane; ++l) out[base + l * ln.inner] *= inv;
        }
    }
    NodePtr pa = a.node();
    auto bw = [pa, ln](Node& self) {
        if (!pa->requires_grad) return;
        pa->ensure_grad();
        const float* ov = self.value.data();
        const float* go = self.grad.data();
        float* ga = pa->grad.data();
        for (int64_t o = 0; o < ln.outer; ++o) {
            for (int64_t i = 0; i < ln.inner; ++i) {
                const int64_t base = o * ln.lane * ln.inner + i;
                double dot = 0.0;
                for (int64_t l = 0; l < ln.lane; ++l) {
                    const int64_t at = base + l * ln.inner;
                    dot += static_cast<double>(go[at]) * ov[at];
                }
                for (int64_t l = 0; l < ln.lane; ++l) {
                    const int64_t at = base + l * ln.inner;
                    ga[at] += ov[at] * (go[at] - static_cast<float>(dot));
                }
            }
        }
    };
    return make_result(a.shape(), std::move(out), recording(a), {pa}, std::move(bw));
}

namespace {

Tensor reduce_all(const Tensor& a, bool take_mean) {
    const int64_t n = a.size();
    const float* av = a.data();
    double acc = 0.0;
    for (int64_t i = 0; i < n; ++i) acc += av[i];
    if (take_mean) acc /= static_cast<double>(n);
    Eigen::ArrayXf out(1);
    out[0] = static_cast<float>(acc);
    NodePtr pa = a.node();
    const float w = take_mean ? 1.0f / static_cast<float>(n) : 1.0f;
    auto bw = [pa, n, w](Node& self) {
        if (!pa->requires_grad) return;
        pa->ensure_grad();
        const float g = self.grad[0] * w;
        pa->grad += g;
    };
    return make_result({1}, std::move(out), recording(a), {pa}, std::move(bw));
}

Tensor reduce_axis(const Tensor& a, int axis, bool keepdim, bool take_mean, const char* name) {
    const Lanes ln = lanes_for(a.shape(), axis, name);
    Shape out_shape;
    const Shape& s = a.shape();
    for (int i = 0; i < static_cast<int>(s.size()); ++i) {
        if (i == axis) {
            if (keepdim) out_shape.push_back(1);
        } else {
            out_shape.push_back(s[i]);
        }
    }
    if (out_shape.empty()) out_shape.push_back(1);
    Eigen::ArrayXf out(ln.outer * ln.inner);
    const float* av = a.data();
    for (int64_t o = 0; o < ln.outer; ++o) {
        for (int64_t i = 0; i < ln.inner; ++i) {
            const int64_t base = o * ln.lane * ln.inner + i;
            double acc = 0.0;
            for (int64_t l = 0; l < ln.lane; ++l) acc += av[base + l * ln.inner];
            if (take_mean) acc /= static_cast<double>(ln.lane);
            out[o * ln.inner + i] = static_cast<float>(acc);
        }
    }
    NodePtr pa = a.node();
    const float w = take_mean ? 1.0f / static_cast<float>(ln.lane) : 1.0f;
    auto bw = [pa, ln, w](Node& self) {
        if (!pa->requires_grad) return;
        pa->ensure_grad();
        const float* go = self.grad.data();
        float* ga = pa->grad.data();
        for (int64_t o = 0; o < ln.outer; ++o) {
            for (int64_t i = 0; i < ln.inner; ++i) {
                const float g = go[o * ln.inner + i] * w;
                const int64_t base = o * ln.lane * ln.inner + i;
                for (int64_t l = 0; l < ln.lane; ++l) ga[base + l * ln.inner] += g;
            }
        }
    };
    return make_result(std::move(out_shape), std::move(out), recording(a), {pa}, std::move(bw));
}

}  // namespace

Tensor sum(const Tensor& a) { return reduce_all(a, false); }
Tensor sum(const Tensor& a, int axis, bool keepdim) { return reduce_axis(a, axis, keepdim, false, "sum"); }
Tensor mean(const Tensor& a) { return reduce_all(a, true); }
Tensor mean(const Tensor& a, int axis, bool keepdim) { return reduce_axis(a, axis, keepdim, true, "mean"); }

Tensor mse(const Tensor& pred, const Tensor& target) {
    check_same_shape(pred, target, "mse");
    const int64_t n = pred.size();
    const float* pv = pred.data();
    const float* tv = target.data();
    double acc = 0.0;
    for (int64_t i = 0; i < n; ++i) {
        const double d = static_cast<double>(pv[i]) - tv[i];
        acc += d * d;
    }
    Eigen::ArrayXf out(1);
    out[0] = static_cast<float>(acc / static_cast<double>(n));
    NodePtr pp = pred.node(), pt = target.node();
    auto bw = [pp, pt, n](Node& self) {
        const float g = self.grad[0] * 2.0f / static_cast<float>(n);
        const float* pv = pp->value.data();
        const float* tv = pt->value.data();
        if (pp->requires_grad) {
            pp->ensure_grad();
            float* gp = pp->grad.data();
            for (int64_t i = 0; i < n; ++i) gp[i] += g * (pv[i] - tv[i]);
        }
        if (pt->requires_grad) {
            pt->ensure_grad();
            float* gt = pt->grad.data();
            for (int64_t i = 0; i < n; ++i) gt[i] -= g * (pv[i] - tv[i]);
        }
    };
    return make_result({1}, std::move(out), recording(pred, target), {pp, pt}, std::move(bw));
}

Tensor reshape(const Tensor& a, Shape new_shape) {
    if (numel(new_shape) != a.size())
        throw ValueError("reshape: cannot view " + shape_str(a.shape()) + " as " +
                         shape_str(new_shape));
    Eigen::ArrayXf out = a.node()->value;
    NodePtr pa = a.node();
    auto bw = [pa](Node& self) {
        if (!pa->requires_grad) return;
        pa->ensure_grad();
        pa->grad += self.grad;
    };
    return make_result(std::move(new_shape), std::move(out), recording(a), {pa}, std::move(bw));
}

namespace {

// Raw permutation: dst[perm-order index] = src[original index].
void permute_raw(const float* src, float* dst, const Shape& in_shape, const std::vector<int>& axes) {
    const int rank = static_cast<int>(in_shape.size());
    std::vector<int64_t> in_stride(rank, 1);
    for (int i = rank - 2; i >= 0; --i) in_stride[i] = in_stride[i + 1] * in_shape[i + 1];
    std::vector<int64_t> out_dims(rank), src_stride(rank);
    for (int i = 0; i < rank; ++i) {
        out_dims[i] = in_shape[axes[i]];
        src_stride[i] = in_stride[axes[i]];
    }
    std::vector<int64_t> cnt(rank, 0);
    int64_t is = 0;
    const int64_t n = numel(in_shape);
    for (int64_t io = 0; io < n; ++io) {
        dst[io] = src[is];
        for (int ax = rank - 1; ax >= 0; --ax) {
            if (++cnt[ax] < out_dims[ax]) {
                is += src_stride[ax];
                break;
            }
            cnt[ax] = 0;
            is -= src_stride[ax] * (out_dims[ax] - 1);
        }
    }
}

}  // namespace

Tensor permute(const Tensor& a, const std::vector<int>& axes) {
    const Shape& s = a.shape();
    const int rank = static_cast<int>(s.size());
    if (static_cast<int>(axes.size()) != rank)
        throw ValueError("permute: axes rank mismatch for shape " + shape_str(s));
    std::vector<bool> used(rank, false);
    for (int ax : axes) {
        if (ax < 0 || ax >= rank || used[ax]) throw ValueError("permute: invalid axis list");
        used[ax] = true;
    }
    Shape out_shape(rank);
    for (int i = 0; i < rank; ++i) out_shape[i] = s[axes[i]];
    Eigen::ArrayXf out(a.size());
    permute_raw(a.data(), out.data(), s, axes);

    std::vector<int> inv(rank);
    for (int i = 0; i < rank; ++i) inv[axes[i]] = i;
    NodePtr pa = a.node();
    Shape fwd_out_shape = out_shape;
    auto bw = [pa, inv, fwd_out_shape](Node& self) {
        if (!pa->requires_grad) return;
        pa->ensure_grad();
        Eigen::ArrayXf tmp(self.grad.size());
        permute_raw(self.grad.data(), tmp.data(), fwd_out_shape, inv);
        pa->grad += tmp;
    };
    return make_result(std::move(out_shape), std::move(out), recording(a), {pa}, std::move(bw));
}

Tensor concat(const Tensor& a, const Tensor& b, int axis) {
    const Shape& sa = a.shape();
    const Shape& sb = b.shape();
    if (sa.size() != sb.size())
        throw ValueError("concat: rank mismatch " + shape_str(sa) + " vs " + shape_str(sb));
    const int rank = static_cast<int>(sa.size());
    if (axis < 0 || axis >= rank)
        throw ValueError("concat: axis " + std::to_string(axis) + " out of range");
    for (int i = 0; i < rank; ++i) {
        if (i != axis && sa[i] != sb[i])
            throw ValueError("concat: shape mismatch " + shape_str(sa) + " vs " + shape_str(sb));
    }
    Shape out_shape = sa;
    out_shape[axis] = sa[axis] + sb[axis];
    int64_t outer = 1, inner = 1;
    for (int i = 0; i < axis; ++i) outer *= sa[i];
    for (int i = axis + 1; i < rank; ++i) inner *= sa[i];
    const int64_t blk_a = sa[axis] * inner;
    const int64_t blk_b = sb[axis] * inner;
    Eigen::ArrayXf out(a.size() + b.size());
    const float* av = a.data();
    const float* bv = b.data();
    for (int64_t o = 0; o < outer; ++o) {
        std::copy(av + o * blk_a, av + (o + 1) * blk_a, out.data() + o * (blk_a + blk_b));
        std::copy(bv + o * blk_b, bv + (o + 1) * blk_b, out.data() + o * (blk_a + blk_b) + blk_a);
    }
    NodePtr pa = a.node(), pb = b.node();
    auto bw = [pa, pb, outer, blk_a, blk_b](Node& self) {
        const float* go = self.grad.data();
        if (pa->requires_grad) {
            pa->ensure_grad();
            float* ga = pa->grad.data();
            for (int64_t o = 0; o < outer; ++o)
                for (int64_t i = 0; i < blk_a; ++i) ga[o * blk_a + i] += go[o * (blk_a + blk_b) + i];
        }
        if (pb->requires_grad) {
            pb->ensure_grad();
            float* gb = pb->grad.data();
            for (int64_t o = 0; o < outer; ++o)
                for (int64_t i = 0; i < blk_b; ++i)
                    gb[o * blk_b + i] += go[o * (blk_a + blk_b) + blk_a + i];
        }
    };
    return make_result(std::move(out_shape), std::move(out), recording(a, b), {pa, pb}, std::move(bw));
}

Tensor narrow(const Tensor& a, int axis, int start, int len) {
    const Shape& s = a.shape();
    const int rank = static_cast<int>(s.size());
    if (axis < 0 || axis >= rank)
        throw ValueError("narrow: axis " + std::to_string(axis) + " out of range");
    if (start < 0 || len <= 0 || start + len > s[axis])
        throw ValueError("narrow: range [" + std::to_string(start) + ", " +
                         std::to_string(start + len) + ") out of bounds for shape " + shape_str(s));
    Shape out_shape = s;
    out_shape[axis] = len;
    int64_t outer = 1, inner = 1;
    for (int i = 0; i < axis; ++i) outer *= s[i];
    for (int i = axis + 1; i < rank; ++i) inner *= s[i];
    const int64_t in_blk = s[axis] * inner;
    const int64_t out_blk = static_cast<int64_t>(len) * inner;
    Eigen::ArrayXf out(outer * out_blk);
    const float* av = a.data();
    for (int64_t o = 0; o < outer; ++o)
        std::copy(av + o * in_blk + start * inner, av + o * in_blk + (start + len) * inner,
                  out.data() + o * out_blk);
    NodePtr pa = a.node();
    auto bw = [pa, outer, inner, in_blk, out_blk, start](Node& self) {
        if (!pa->requires_grad) return;
        pa->ensure_grad();
        const float* go = self.grad.data();
        float* ga = pa->grad.data();
        for (int64_t o = 0; o < outer; ++o)
            for (int64_t i = 0; i < out_blk; ++i)
                ga[o * in_blk + start * inner + i] += go[o * out_blk + i];
    };
    return make_result(std::move(out_shape), std::move(out), recording(a), {pa}, std::move(bw));
}

}  // namespace shifts
