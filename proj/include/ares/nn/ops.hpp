#pragma once

#include "ares/nn/tensor.hpp"

// Forward kernels on plain tensors. The differentiable versions in
// autodiff.hpp call into these.
namespace ares::nn {

// [m, k] x [k, n] -> [m, n]
Tensor matmul(const Tensor& a, const Tensor& b);
// [m, k] x [n, k]^T -> [m, n]
Tensor matmul_nt(const Tensor& a, const Tensor& b);
// [k, m]^T x [k, n] -> [m, n]
Tensor matmul_tn(const Tensor& a, const Tensor& b);

// output[t] = input[t] . weight + bias
Tensor linear_forward(const Tensor& input, const Tensor& weight, const Tensor& bias);

// Exact GELU: x * Phi(x).
double gelu(double x);
double gelu_derivative(double x);
Tensor gelu(const Tensor& x);

double relu(double x);
Tensor relu(const Tensor& x);

// Row-wise normalization over the last axis followed by gain and shift.
Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& shift, double eps);

// Row-wise softmax. Entries equal to -inf are treated as masked and map to
// exactly 0. A row with every entry masked violates the contract.
Tensor softmax_rows(const Tensor& x);

double mse_loss(double pred, double target);

void require_rank(const Tensor& t, std::size_t rank, const char* what);

}  // namespace ares::nn
