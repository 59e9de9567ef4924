#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "varconstrain/jet.hpp"

namespace varconstrain {

enum class NetKind { kFF, kLSTM };

/// Architecture descriptor: `width` is the layer size m, `depth` the number of
/// hidden layers (FF) or LSTM blocks, `in_dim`/`out_dim` the input/output sizes.
struct NetworkSpec {
  NetKind kind = NetKind::kFF;
  int width = 1;
  int depth = 1;
  int in_dim = 1;
  int out_dim = 1;

  void validate() const;
  /// "FF(50,3,2,1)" / "LSTM(50,3,1,1)".
  std::string to_string() const;
  static NetworkSpec parse(std::string_view text);

  friend bool operator==(const NetworkSpec&, const NetworkSpec&) = default;
};

using ParamVector = std::vector<double>;

struct Network {
  NetworkSpec spec;
  ParamVector params;
};

/// Number of trainable scalars.
///
/// FF counts every weight and bias of the hidden layers plus the output map:
/// m*d_I + m^2(L-1) + L*m + d_O*m + d_O.
/// LSTM: 4m[d_I(L+1) + m(L-1) + 1] + d_O(m+1). The four gate biases are shared
/// by all blocks.
std::size_t param_count(const NetworkSpec& spec);

/// Glorot-uniform weights, zero biases. Deterministic in (spec, seed).
Network init(const NetworkSpec& spec, std::uint64_t seed);

/// Offsets of the tensors inside the canonical flat parameter order.
///
/// FF:   W0 (m x d_I), b0, W1 (m x m), b1, ..., W (d_O x m), b.
/// LSTM: block 1: W_f, U_f, b_f, W_g, U_g, b_g, W_r, U_r, b_r, W_s, U_s, b_s
///       (U of block 1 is m x d_I); blocks 2..L: W_f, U_f, W_g, U_g, W_r, U_r,
///       W_s, U_s (U is m x m); then W (d_O x m), b.
/// All matrices are row-major.
struct ParamLayout {
  struct Dense {
    std::size_t weight = 0;  // rows x cols
    std::size_t bias = 0;
    int rows = 0;
    int cols = 0;
  };
  struct Gate {
    std::size_t w = 0;  // m x d_I
    std::size_t u = 0;  // m x u_cols
    std::size_t b = 0;  // m
    int u_cols = 0;
  };
  std::vector<Dense> hidden;            // FF hidden layers
  std::vector<std::array<Gate, 4>> blocks;  // LSTM blocks, gates f, g, r, s
  Dense output;
  std::size_t total = 0;
};

ParamLayout param_layout(const NetworkSpec& spec);

/// Forward pass bound to one parameter vector. Construction validates the
/// parameter count once; calls then only check the input.
template <class T>
class Evaluator {
 public:
  Evaluator(const NetworkSpec& spec, std::span<const T> params);
  std::vector<Jet<T>> operator()(std::span<const Jet<T>> x) const;
  const NetworkSpec& spec() const { return spec_; }

 private:
  NetworkSpec spec_;
  ParamLayout layout_;
  std::span<const T> params_;
  Tape* fused_ = nullptr;
};

extern template class Evaluator<double>;
extern template class Evaluator<Var>;

/// Feed-forward network: L tanh layers then h -> W h + b.
template <class T>
std::vector<Jet<T>> ff_forward(const NetworkSpec& spec, std::span<const T> params,
                               std::span<const Jet<T>> x);

/// LSTM-style network: every block re-reads x; c_0 = 0, h_0 = 0 (length d_I).
template <class T>
std::vector<Jet<T>> lstm_forward(const NetworkSpec& spec, std::span<const T> params,
                                 std::span<const Jet<T>> x);

template <class T>
std::vector<Jet<T>> forward(const NetworkSpec& spec, std::span<const T> params,
                            std::span<const Jet<T>> x) {
  return spec.kind == NetKind::kFF ? ff_forward<T>(spec, params, x)
                                   : lstm_forward<T>(spec, params, x);
}

/// Plain evaluation at a point.
std::vector<double> evaluate(const Network& net, std::span<const double> x);

extern template std::vector<Jet<double>> ff_forward(const NetworkSpec&, std::span<const double>,
                                                    std::span<const Jet<double>>);
extern template std::vector<Jet<Var>> ff_forward(const NetworkSpec&, std::span<const Var>,
                                                 std::span<const Jet<Var>>);
extern template std::vector<Jet<double>> lstm_forward(const NetworkSpec&,
                                                      std::span<const double>,
                                                      std::span<const Jet<double>>);
extern template std::vector<Jet<Var>> lstm_forward(const NetworkSpec&, std::span<const Var>,
                                                   std::span<const Jet<Var>>);

}  // namespace varconstrain
