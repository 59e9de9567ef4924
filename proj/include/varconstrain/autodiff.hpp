#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "varconstrain/errors.hpp"

namespace varconstrain {

class Tape;

// Node kinds recorded on the tape. Every node stores its parents and the local
// partial derivative with respect to each parent.
enum class Op : std::uint8_t {
  kLeaf,
  // aux + sum of terms; a term is either coef * parent (linear) or parent_a * parent_b (pair).
  kSop,
  kTanh,
  kSqrt,
  kRecip,
  kSin,
  kCos,
  // One row of a fused matrix-vector product; see Tape::dense.
  kDense,
};

/// A real scalar that is either a constant (no tape node) or a
/// handle to a node on exactly one tape.
class Var {
 public:
  Var() = default;
  // Constants convert implicitly so generic numeric code can mix doubles in.
  Var(double constant) : value_(constant) {}  // NOLINT(google-explicit-constructor)

  double value() const { return value_; }
  bool is_constant() const { return tape_ == nullptr; }
  Tape* tape() const { return tape_; }
  std::uint32_t index() const { return index_; }

 private:
  friend class Tape;
  Var(Tape* tape, std::uint32_t index, double value)
      : tape_(tape), index_(index), value_(value) {}

  Tape* tape_ = nullptr;
  std::uint32_t index_ = 0;
  double value_ = 0.0;
};

/// Append-only reverse-mode tape. Nodes are stored in topological order by
/// construction; parents and partials live in flat arrays indexed by a per-node offset.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  /// New independent leaf.
  Var variable(double value);

  std::size_t size() const { return values_.size(); }
  std::size_t entry_count() const { return parents_.size(); }
  Op op(std::uint32_t node) const { return ops_[node]; }
  double value(std::uint32_t node) const { return values_[node]; }

  /// Drops every node but keeps allocated capacity. Outstanding Vars become dangling.
  void clear();

  /// Fills `adjoint` (resized to size()) with d output / d node for every node.
  void backward(const Var& output, std::vector<double>& adjoint) const;

  /// Recomputes every non-leaf value from the leaves using the recorded structure.
  std::vector<double> replay() const;

  // Low-level node construction used by the arithmetic in this header.
  void open_node();
  void add_linear(std::uint32_t parent, double coef);
  void add_pair(std::uint32_t a, double a_value, std::uint32_t b, double b_value);
  std::size_t open_term_count() const { return parents_.size() - offsets_.back(); }
  std::uint32_t open_first_parent() const;
  double open_first_partial() const;
  void cancel_node();
  Var close_node(Op op, double value, double aux);
  Var unary(Op op, const Var& x, double value, double partial);
  Var node_var(std::uint32_t node) { return Var(this, node, values_[node]); }

  static constexpr std::uint32_t kNone = 0xffffffffu;

  /// One input column of a fused product. Row i reads the weight node
  /// `weight + i * stride` and multiplies it by `value`; `parent` is the input's
  /// node or kNone for a constant.
  struct DenseInput {
    std::uint32_t weight;
    std::uint32_t stride;
    std::uint32_t parent;
    double value;
  };

  /// Appends `rows` nodes, node i = sum_e w(e, i) * e.value (+ bias node value
  /// `bias + i` unless bias is kNone). Weight and bias nodes must already exist.
  /// Returns the index of the first new node.
  std::uint32_t dense(int rows, std::uint32_t bias, std::span<const DenseInput> inputs);

 private:
  static constexpr std::uint32_t kPairHead = 0x80000000u;
  static constexpr std::uint32_t kIndexMask = 0x7fffffffu;

  void check_closed() const;

  std::vector<double> values_;
  std::vector<double> aux_;
  std::vector<Op> ops_;
  std::vector<std::uint32_t> offsets_{0};
  std::vector<std::uint32_t> parents_;
  std::vector<double> partials_;
  bool open_ = false;

  struct DenseRecord {
    std::uint32_t first;
    std::uint32_t rows;
    std::uint32_t bias;
    std::uint32_t begin;  // range in dense_inputs_
    std::uint32_t end;
  };
  std::vector<DenseRecord> dense_records_;
  std::vector<DenseInput> dense_inputs_;
};

/// Records `var(tape, value)`.
inline Var var(Tape& tape, double value) { return tape.variable(value); }

/// Reverse-mode partials of `output` with respect to each entry of `wrt`.
/// Throws UsageError if any argument lives on a different tape.
std::vector<double> backward(const Tape& tape, const Var& output, std::span<const Var> wrt);

/// Accumulates `sum_k a_k * b_k + sum_j c_j * x_j + const` into a single tape node.
/// No other node may be created on the same tape between the first add and finish().
template <class T>
class Sop;

template <>
class Sop<double> {
 public:
  void add(double x) { sum_ += x; }
  void add(double a, double b) { sum_ += a * b; }
  void add_scaled(double coef, double x) { sum_ += coef * x; }
  double finish() const { return sum_; }

 private:
  double sum_ = 0.0;
};

template <>
class Sop<Var> {
 public:
  Sop() = default;
  Sop(const Sop&) = delete;
  Sop& operator=(const Sop&) = delete;
  ~Sop() {
    if (tape_ != nullptr) tape_->cancel_node();
  }

  void add(const Var& x) { add_scaled(1.0, x); }

  void add_scaled(double coef, const Var& x) {
    if (x.is_constant()) {
      aux_ += coef * x.value();
      return;
    }
    if (coef == 0.0) return;
    attach(x.tape());
    tape_->add_linear(x.index(), coef);
    sum_ += coef * x.value();
  }

  void add(const Var& a, const Var& b) {
    const bool ca = a.is_constant();
    const bool cb = b.is_constant();
    if (ca && cb) {
      aux_ += a.value() * b.value();
    } else if (ca) {
      add_scaled(a.value(), b);
    } else if (cb) {
      add_scaled(b.value(), a);
    } else {
      attach(a.tape());
      if (b.tape() != tape_) throw UsageError("Sop: operands live on different tapes");
      tape_->add_pair(a.index(), a.value(), b.index(), b.value());
      sum_ += a.value() * b.value();
    }
  }

  Var finish();

 private:
  void attach(Tape* tape) {
    if (tape_ == nullptr) {
      tape_ = tape;
      tape_->open_node();
    } else if (tape != tape_) {
      throw UsageError("Sop: operands live on different tapes");
    }
  }

  Tape* tape_ = nullptr;
  double sum_ = 0.0;
  double aux_ = 0.0;
};

Var operator+(const Var& a, const Var& b);
Var operator-(const Var& a, const Var& b);
Var operator*(const Var& a, const Var& b);
Var operator/(const Var& a, const Var& b);
Var operator-(const Var& a);
inline Var& operator+=(Var& a, const Var& b) { return a = a + b; }
inline Var& operator-=(Var& a, const Var& b) { return a = a - b; }
inline Var& operator*=(Var& a, const Var& b) { return a = a * b; }

Var tanh(const Var& x);
Var sqrt(const Var& x);
Var sin(const Var& x);
Var cos(const Var& x);
Var recip(const Var& x);
Var square(const Var& x);
/// sqrt whose derivative is evaluated as 1 / (2 sqrt(x + guard)); value is exactly sqrt(x).
Var guarded_sqrt(const Var& x, double guard);

inline double square(double x) { return x * x; }
inline double recip(double x) {
  if (x == 0.0) throw SingularityError("reciprocal of zero");
  return 1.0 / x;
}
inline double guarded_sqrt(double x, double /*guard*/) { return std::sqrt(x); }

inline double value_of(double x) { return x; }
inline double value_of(const Var& x) { return x.value(); }

/// Sum of weights[i] * terms[i] as one node (weights are constants).
template <class T>
T weighted_sum(std::span<const double> weights, std::span<const T> terms) {
  Sop<T> sop;
  for (std::size_t i = 0; i < terms.size(); ++i) sop.add_scaled(weights[i], terms[i]);
  return sop.finish();
}

/// A scalar map of its parameters, recorded on the given tape.
using ScalarMap = std::function<Var(Tape&, std::span<const Var>)>;

/// Largest |reverse-mode partial - central difference| / (|central difference| + 1e-8)
/// over the coordinates of `point`. Five-point stencil; steps around 1e-3 suit O(1) inputs.
double check_gradient(const ScalarMap& f, std::span<const double> point, double step);

}  // namespace varconstrain
