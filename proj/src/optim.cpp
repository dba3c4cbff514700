#include "shifts/optim.hpp"

#include <cmath>

namespace shifts {

Parameter::Parameter(std::string n, Tensor t) : name(std::move(n)), tensor(std::move(t)) {
    tensor.set_requires_grad(true);
    adam_m = Eigen::ArrayXd::Zero(tensor.size());
    adam_v = Eigen::ArrayXd::Zero(tensor.size());
}

Parameter& ParamSet::add(std::string name, Tensor t) {
    if (contains(name)) throw ValueError("parameter name already registered: " + name);
    items_.emplace_back(std::move(name), std::move(t));
    return items_.back();
}

Parameter& ParamSet::at(const std::string& name) {
    for (auto& p : items_)
        if (p.name == name) return p;
    throw ValueError("unknown parameter: " + name);
}

const Parameter& ParamSet::at(const std::string& name) const {
    for (const auto& p : items_)
        if (p.name == name) return p;
    throw ValueError("unknown parameter: " + name);
}

bool ParamSet::contains(const std::string& name) const {
    for (const auto& p : items_)
        if (p.name == name) return true;
    return false;
}

std::vector<Tensor> ParamSet::snapshot_values() const {
    std::vector<Tensor> out;
    out.reserve(items_.size());
    for (const auto& p : items_) out.push_back(p.tensor.clone());
    return out;
}

void ParamSet::restore_values(const std::vector<Tensor>& values) {
    if (values.size() != items_.size())
        throw ValueError("restore_values: snapshot size mismatch");
    for (size_t i = 0; i < items_.size(); ++i) items_[i].tensor.copy_values_from(values[i]);
}

void adam_step(const std::vector<Parameter*>& params, const AdamConfig& cfg) {
    std::string missing;
    for (const Parameter* p : params) {
        if (!p->tensor.has_grad()) missing += missing.empty() ? p->name : ", " + p->name;
    }
    if (!missing.empty()) throw ValueError("adam_step: parameters without gradients: " + missing);

    for (Parameter* p : params) {
        p->step_count += 1;
        const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(p->step_count));
        const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(p->step_count));
        const float* g = p->tensor.grad_data();
        float* w = p->tensor.data();
        const int64_t n = p->tensor.size();
        for (int64_t i = 0; i < n; ++i) {
            const double gi = g[i];
            p->adam_m[i] = cfg.beta1 * p->adam_m[i] + (1.0 - cfg.beta1) * gi;
            p->adam_v[i] = cfg.beta2 * p->adam_v[i] + (1.0 - cfg.beta2) * gi * gi;
            const double m_hat = p->adam_m[i] / bc1;
            const double v_hat = p->adam_v[i] / bc2;
            w[i] = static_cast<float>(w[i] - cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.eps));
        }
        p->tensor.clear_grad();
    }
}

}  // namespace shifts
