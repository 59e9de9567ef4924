#include "varconstrain/nets.hpp"

#include <charconv>
#include <cmath>
#include <random>
#include <type_traits>

namespace varconstrain {

void NetworkSpec::validate() const {
  if (width < 1 || depth < 1 || in_dim < 1 || out_dim < 1) {
    throw UsageError("network spec: m, L, d_I, d_O must all be >= 1 (got " + to_string() + ")");
  }
}

std::string NetworkSpec::to_string() const {
  return std::string(kind == NetKind::kFF ? "FF(" : "LSTM(") + std::to_string(width) + "," +
         std::to_string(depth) + "," + std::to_string(in_dim) + "," + std::to_string(out_dim) +
         ")";
}

NetworkSpec NetworkSpec::parse(std::string_view text) {
  NetworkSpec spec;
  std::string_view rest;
  if (text.starts_with("FF(")) {
    spec.kind = NetKind::kFF;
    rest = text.substr(3);
  } else if (text.starts_with("LSTM(")) {
    spec.kind = NetKind::kLSTM;
    rest = text.substr(5);
  } else {
    throw UsageError("network spec: expected FF(...) or LSTM(...), got '" + std::string(text) +
                     "'");
  }
  int fields[4];
  for (int i = 0; i < 4; ++i) {
    const char* begin = rest.data();
    const char* end = rest.data() + rest.size();
    auto [ptr, ec] = std::from_chars(begin, end, fields[i]);
    const char expected = i < 3 ? ',' : ')';
    if (ec != std::errc() || ptr == end || *ptr != expected) {
      throw UsageError("network spec: malformed '" + std::string(text) + "'");
    }
    rest = rest.substr(static_cast<std::size_t>(ptr - begin) + 1);
  }
  if (!rest.empty()) throw UsageError("network spec: trailing text in '" + std::string(text) + "'");
  spec.width = fields[0];
  spec.depth = fields[1];
  spec.in_dim = fields[2];
  spec.out_dim = fields[3];
  spec.validate();
  return spec;
}

ParamLayout param_layout(const NetworkSpec& spec) {
  spec.validate();
  const int m = spec.width;
  ParamLayout layout;
  std::size_t at = 0;
  auto take = [&at](std::size_t n) {
    const std::size_t start = at;
    at += n;
    return start;
  };
  if (spec.kind == NetKind::kFF) {
    int cols = spec.in_dim;
    for (int l = 0; l < spec.depth; ++l) {
      ParamLayout::Dense d;
      d.rows = m;
      d.cols = cols;
      d.weight = take(static_cast<std::size_t>(m) * cols);
      d.bias = take(m);
      layout.hidden.push_back(d);
      cols = m;
    }
  } else {
    std::array<ParamLayout::Gate, 4> first{};
    for (auto& gate : first) {
      gate.u_cols = spec.in_dim;
      gate.w = take(static_cast<std::size_t>(m) * spec.in_dim);
      gate.u = take(static_cast<std::size_t>(m) * spec.in_dim);
      gate.b = take(m);
    }
    layout.blocks.push_back(first);
    for (int i = 1; i < spec.depth; ++i) {
      std::array<ParamLayout::Gate, 4> block{};
      for (int k = 0; k < 4; ++k) {
        block[k].u_cols = m;
        block[k].w = take(static_cast<std::size_t>(m) * spec.in_dim);
        block[k].u = take(static_cast<std::size_t>(m) * m);
        block[k].b = first[k].b;
      }
      layout.blocks.push_back(block);
    }
  }
  layout.output.rows = spec.out_dim;
  layout.output.cols = m;
  layout.output.weight = take(static_cast<std::size_t>(spec.out_dim) * m);
  layout.output.bias = take(spec.out_dim);
  layout.total = at;
  return layout;
}

std::size_t param_count(const NetworkSpec& spec) {
  spec.validate();
  const std::size_t m = spec.width;
  const std::size_t L = spec.depth;
  const std::size_t di = spec.in_dim;
  const std::size_t d_o = spec.out_dim;
  if (spec.kind == NetKind::kFF) return m * di + m * m * (L - 1) + L * m + d_o * m + d_o;
  return 4 * m * (di * (L + 1) + m * (L - 1) + 1) + d_o * (m + 1);
}

Network init(const NetworkSpec& spec, std::uint64_t seed) {
  const ParamLayout layout = param_layout(spec);
  Network net{spec, ParamVector(layout.total, 0.0)};
  std::mt19937_64 rng(seed);
  auto glorot = [&](std::size_t offset, int rows, int cols) {
    const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
    std::uniform_real_distribution<double> dist(-limit, limit);
    const std::size_t n = static_cast<std::size_t>(rows) * cols;
    for (std::size_t i = 0; i < n; ++i) net.params[offset + i] = dist(rng);
  };
  for (const auto& d : layout.hidden) glorot(d.weight, d.rows, d.cols);
  for (const auto& block : layout.blocks) {
    for (const auto& gate : block) {
      glorot(gate.w, spec.width, spec.in_dim);
      glorot(gate.u, spec.width, gate.u_cols);
    }
  }
  glorot(layout.output.weight, layout.output.rows, layout.output.cols);
  return net;
}

namespace {

// Coefficient index: -1 value, 0..2 gradient, 3.. packed Hessian.
template <class T>
inline const T& coefficient(const Jet<T>& j, int c) {
  if (c < 0) return j.v;
  if (c < Jet<T>::kMaxDim) return j.g[c];
  return j.h[c - Jet<T>::kMaxDim];
}

template <class T>
inline T& coefficient(Jet<T>& j, int c) {
  if (c < 0) return j.v;
  if (c < Jet<T>::kMaxDim) return j.g[c];
  return j.h[c - Jet<T>::kMaxDim];
}

// Coefficient slots that are live for a jet of the given shape.
inline std::vector<int> live_coefficients(int dim, int order) {
  std::vector<int> out{-1};
  if (order >= 1)
    for (int i = 0; i < dim; ++i) out.push_back(i);
  if (order >= 2)
    for (int i = 0; i < dim; ++i)
      for (int j = i; j < dim; ++j) out.push_back(Jet<double>::kMaxDim + Jet<double>::packed(i, j));
  return out;
}

struct Term {
  std::size_t matrix;  // offset of a row-major matrix
  int cols;
};

// Tape holding every parameter as consecutive leaf nodes, or nullptr. Only then
// can a layer be recorded as fused matrix-vector nodes.
Tape* fusable_tape(std::span<const double>) { return nullptr; }

Tape* fusable_tape(std::span<const Var> params) {
  if (params.empty() || params[0].is_constant()) return nullptr;
  Tape* tape = params[0].tape();
  const std::uint32_t base = params[0].index();
  for (std::size_t j = 0; j < params.size(); ++j) {
    if (params[j].tape() != tape || params[j].index() != base + j) return nullptr;
  }
  return tape;
}

using Terms = std::initializer_list<std::pair<Term, std::span<const Jet<Var>>>>;

// Fused form of `dense` below; one tape record per live coefficient.
std::vector<Jet<Var>> dense_fused(Tape& tape, std::span<const Var> p, int rows, std::size_t bias,
                                  Terms terms, const std::vector<int>& slots, int dim, int order) {
  std::vector<Jet<Var>> out(rows);
  for (auto& o : out) {
    o.dim = dim;
    o.order = order;
  }
  std::vector<Tape::DenseInput> inputs;
  for (int c : slots) {
    inputs.clear();
    for (const auto& [term, in] : terms) {
      for (int k = 0; k < term.cols; ++k) {
        const Var& x = coefficient(in[k], c);
        if (x.is_constant() && x.value() == 0.0) continue;
        if (!x.is_constant() && x.tape() != &tape) {
          throw UsageError("forward: input and parameters live on different tapes");
        }
        inputs.push_back({p[term.matrix + k].index(), static_cast<std::uint32_t>(term.cols),
                          x.is_constant() ? Tape::kNone : x.index(), x.value()});
      }
    }
    if (inputs.empty() && c >= 0) continue;  // stays constant 0
    const std::uint32_t b = c < 0 ? p[bias].index() : Tape::kNone;
    const std::uint32_t first = tape.dense(rows, b, inputs);
    for (int i = 0; i < rows; ++i) coefficient(out[i], c) = tape.node_var(first + i);
  }
  return out;
}

// out_i = sum over terms (M_i . in) + b_i, for each live coefficient (bias only on the value).
template <class T>
std::vector<Jet<T>> dense(std::span<const T> p, int rows, std::size_t bias,
                          std::initializer_list<std::pair<Term, std::span<const Jet<T>>>> terms,
                          const std::vector<int>& slots, int dim, int order, Tape* fused) {
  if constexpr (std::is_same_v<T, Var>) {
    if (fused != nullptr) return dense_fused(*fused, p, rows, bias, terms, slots, dim, order);
  }
  std::vector<Jet<T>> out(rows);
  for (int i = 0; i < rows; ++i) {
    Jet<T>& o = out[i];
    o.dim = dim;
    o.order = order;
    for (int c : slots) {
      Sop<T> s;
      for (const auto& [term, in] : terms) {
        const T* row = p.data() + term.matrix + static_cast<std::size_t>(i) * term.cols;
        for (int k = 0; k < term.cols; ++k) s.add(row[k], coefficient(in[k], c));
      }
      if (c < 0) s.add(p[bias + i]);
      coefficient(o, c) = s.finish();
    }
  }
  return out;
}

template <class T>
std::vector<Jet<T>> ff_pass(const ParamLayout& layout, std::span<const T> params,
                            std::span<const Jet<T>> x, Tape* fused) {
  const int dim = x[0].dim;
  const int order = x[0].order;
  const std::vector<int> slots = live_coefficients(dim, order);
  std::vector<Jet<T>> h(x.begin(), x.end());
  for (const auto& layer : layout.hidden) {
    std::span<const Jet<T>> in(h);
    std::vector<Jet<T>> z =
        dense<T>(params, layer.rows, layer.bias, {{Term{layer.weight, layer.cols}, in}}, slots,
                 dim, order, fused);
    for (auto& zi : z) zi = tanh(zi);
    h = std::move(z);
  }
  std::span<const Jet<T>> last(h);
  return dense<T>(params, layout.output.rows, layout.output.bias,
                  {{Term{layout.output.weight, layout.output.cols}, last}}, slots, dim, order,
                  fused);
}

template <class T>
std::vector<Jet<T>> lstm_pass(const NetworkSpec& spec, const ParamLayout& layout,
                              std::span<const T> params, std::span<const Jet<T>> x, Tape* fused) {
  const int m = spec.width;
  const int dim = x[0].dim;
  const int order = x[0].order;
  const std::vector<int> slots = live_coefficients(dim, order);
  const Jet<T> zero = constant_jet<T>(T(0.0), dim, order);

  std::vector<Jet<T>> c(m, zero);
  std::vector<Jet<T>> h(spec.in_dim, zero);
  for (const auto& block : layout.blocks) {
    std::array<std::vector<Jet<T>>, 4> gates;
    for (int k = 0; k < 4; ++k) {
      const auto& gate = block[k];
      std::span<const Jet<T>> hs(h);
      gates[k] = dense<T>(params, m, gate.b,
                          {{Term{gate.w, spec.in_dim}, x}, {Term{gate.u, gate.u_cols}, hs}}, slots,
                          dim, order, fused);
      for (auto& z : gates[k]) z = tanh(z);
    }
    const auto& [f, g, r, s] = gates;
    std::vector<Jet<T>> next_h(m);
    for (int i = 0; i < m; ++i) {
      c[i] = mul_add(f[i], c[i], g[i], s[i]);
      next_h[i] = r[i] * tanh(c[i]);
    }
    h = std::move(next_h);
  }
  std::span<const Jet<T>> last(h);
  return dense<T>(params, layout.output.rows, layout.output.bias,
                  {{Term{layout.output.weight, layout.output.cols}, last}}, slots, dim, order,
                  fused);
}

}  // namespace

template <class T>
Evaluator<T>::Evaluator(const NetworkSpec& spec, std::span<const T> params)
    : spec_(spec), layout_(param_layout(spec)), params_(params) {
  if (params.size() != layout_.total) {
    throw UsageError("forward: parameter vector has " + std::to_string(params.size()) +
                     " entries, " + spec.to_string() + " needs " + std::to_string(layout_.total));
  }
  fused_ = fusable_tape(params);
}

template <class T>
std::vector<Jet<T>> Evaluator<T>::operator()(std::span<const Jet<T>> x) const {
  if (static_cast<int>(x.size()) != spec_.in_dim) {
    throw UsageError("forward: input has dimension " + std::to_string(x.size()) + ", " +
                     spec_.to_string() + " expects " + std::to_string(spec_.in_dim));
  }
  for (const auto& xi : x) jet_detail::check_compatible(xi, x[0]);
  return spec_.kind == NetKind::kFF ? ff_pass<T>(layout_, params_, x, fused_)
                                    : lstm_pass<T>(spec_, layout_, params_, x, fused_);
}

template class Evaluator<double>;
template class Evaluator<Var>;

template <class T>
std::vector<Jet<T>> ff_forward(const NetworkSpec& spec, std::span<const T> params,
                               std::span<const Jet<T>> x) {
  if (spec.kind != NetKind::kFF) throw UsageError("ff_forward: spec is not FF");
  return Evaluator<T>(spec, params)(x);
}

template <class T>
std::vector<Jet<T>> lstm_forward(const NetworkSpec& spec, std::span<const T> params,
                                 std::span<const Jet<T>> x) {
  if (spec.kind != NetKind::kLSTM) throw UsageError("lstm_forward: spec is not LSTM");
  return Evaluator<T>(spec, params)(x);
}

template std::vector<Jet<double>> ff_forward(const NetworkSpec&, std::span<const double>,
                                             std::span<const Jet<double>>);
template std::vector<Jet<Var>> ff_forward(const NetworkSpec&, std::span<const Var>,
                                          std::span<const Jet<Var>>);
template std::vector<Jet<double>> lstm_forward(const NetworkSpec&, std::span<const double>,
                                               std::span<const Jet<double>>);
template std::vector<Jet<Var>> lstm_forward(const NetworkSpec&, std::span<const Var>,
                                            std::span<const Jet<Var>>);

std::vector<double> evaluate(const Network& net, std::span<const double> x) {
  std::vector<Jet<double>> in;
  in.reserve(x.size());
  for (double xi : x) in.push_back(constant_jet<double>(xi, 1, 0));
  const auto out = forward<double>(net.spec, net.params, in);
  std::vector<double> values;
  values.reserve(out.size());
  for (const auto& o : out) values.push_back(o.v);
  return values;
}

}  // namespace varconstrain
