#pragma once

#include "shifts/tensor.hpp"

namespace shifts {

/// Per-window per-channel lookback statistics captured by normalize and
/// reused by denormalize. Both tensors are [B, 1, C] constants; horizon
/// values never enter them.
struct RevinState {
    Tensor mu;
    Tensor sigma;
};

inline constexpr float kRevinEps = 1e-5f;

/// Reversible instance normalization over the window's time axis:
/// out = gamma * (window - mu) / sigma + beta, with mu and sigma computed
/// per window per channel over the L axis (population std, eps-guarded).
/// Pass gamma = beta = nullptr for the plain, non-learnable variant.
Tensor revin_normalize(const Tensor& window, RevinState& state_out, const Tensor* gamma,
                       const Tensor* beta);

/// Exact inverse of the normalize affine chain using stored lookback
/// statistics: out = ((in - beta) / gamma) * sigma + mu. Gradients flow
/// through gamma, beta, and the input.
Tensor revin_denormalize(const Tensor& window, const RevinState& state, const Tensor* gamma,
                         const Tensor* beta);

}  // namespace shifts
