#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "shifts/tensor.hpp"

namespace shifts {

/// A named trainable tensor plus its Adam moment buffers. Moments are kept
/// in float64 and excluded from checkpoints.
struct Parameter {
    std::string name;
    Tensor tensor;
    Eigen::ArrayXd adam_m, adam_v;
    int64_t step_count = 0;

    Parameter() = default;
    Parameter(std::string n, Tensor t);
};

/// Ordered parameter registry; insertion order defines checkpoint order.
class ParamSet {
public:
    Parameter& add(std::string name, Tensor t);
    Parameter& at(const std::string& name);
    const Parameter& at(const std::string& name) const;
    bool contains(const std::string& name) const;

    size_t size() const { return items_.size(); }
    auto begin() { return items_.begin(); }
    auto end() { return items_.end(); }
    auto begin() const { return items_.begin(); }
    auto end() const { return items_.end(); }

    std::vector<Tensor> snapshot_values() const;
    void restore_values(const std::vector<Tensor>& values);

private:
    std::vector<Parameter> items_;
};

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// Standard Adam with bias correction, applied in place; gradients are
/// cleared afterwards. Throws if any listed parameter is missing its grad.
void adam_step(const std::vector<Parameter*>& params, const AdamConfig& cfg);

}  // namespace shifts
