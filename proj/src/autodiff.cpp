#include "varconstrain/autodiff.hpp"

#include <cmath>
#include <stdexcept>

namespace varconstrain {

void Tape::check_closed() const {
  if (open_) throw std::logic_error("tape: node created while a Sop node is open");
}

Var Tape::variable(double value) {
  check_closed();
  values_.push_back(value);
  aux_.push_back(0.0);
  ops_.push_back(Op::kLeaf);
  offsets_.push_back(static_cast<std::uint32_t>(parents_.size()));
  return Var(this, static_cast<std::uint32_t>(values_.size() - 1), value);
}

void Tape::clear() {
  values_.clear();
  aux_.clear();
  ops_.clear();
  offsets_.assign(1, 0);
  parents_.clear();
  partials_.clear();
  dense_records_.clear();
  dense_inputs_.clear();
  open_ = false;
}

void Tape::open_node() {
  check_closed();
  open_ = true;
}

void Tape::add_linear(std::uint32_t parent, double coef) {
  parents_.push_back(parent);
  partials_.push_back(coef);
}

void Tape::add_pair(std::uint32_t a, double a_value, std::uint32_t b, double b_value) {
  parents_.push_back(a | kPairHead);
  partials_.push_back(b_value);
  parents_.push_back(b);
  partials_.push_back(a_value);
}

std::uint32_t Tape::open_first_parent() const { return parents_[offsets_.back()] & kIndexMask; }

double Tape::open_first_partial() const { return partials_[offsets_.back()]; }

void Tape::cancel_node() {
  parents_.resize(offsets_.back());
  partials_.resize(offsets_.back());
  open_ = false;
}

Var Tape::close_node(Op op, double value, double aux) {
  open_ = false;
  values_.push_back(value);
  aux_.push_back(aux);
  ops_.push_back(op);
  offsets_.push_back(static_cast<std::uint32_t>(parents_.size()));
  return Var(this, static_cast<std::uint32_t>(values_.size() - 1), value);
}

Var Tape::unary(Op op, const Var& x, double value, double partial) {
  check_closed();
  parents_.push_back(x.index());
  partials_.push_back(partial);
  return close_node(op, value, 0.0);
}

std::uint32_t Tape::dense(int rows, std::uint32_t bias, std::span<const DenseInput> inputs) {
  check_closed();
  if (rows < 1) throw UsageError("dense: rows must be >= 1");
  const auto first = static_cast<std::uint32_t>(values_.size());
  const auto rec = static_cast<std::uint32_t>(dense_records_.size());
  const auto begin = static_cast<std::uint32_t>(dense_inputs_.size());
  for (const auto& in : inputs) {
    const std::uint64_t last = in.weight + static_cast<std::uint64_t>(rows - 1) * in.stride;
    if (last >= first || (in.parent != kNone && in.parent >= first)) {
      throw UsageError("dense: weight or input node does not precede the product");
    }
  }
  if (bias != kNone && bias + static_cast<std::uint64_t>(rows) > first) {
    throw UsageError("dense: bias nodes do not precede the product");
  }
  dense_inputs_.insert(dense_inputs_.end(), inputs.begin(), inputs.end());
  dense_records_.push_back({first, static_cast<std::uint32_t>(rows), bias, begin,
                            static_cast<std::uint32_t>(dense_inputs_.size())});
  const auto entries = static_cast<std::uint32_t>(parents_.size());
  for (int i = 0; i < rows; ++i) {
    double sum = 0.0;
    for (const auto& in : inputs) sum += values_[in.weight + i * in.stride] * in.value;
    if (bias != kNone) sum += values_[bias + i];
    values_.push_back(sum);
    aux_.push_back(static_cast<double>(rec));
    ops_.push_back(Op::kDense);
    offsets_.push_back(entries);
  }
  return first;
}

void Tape::backward(const Var& output, std::vector<double>& adjoint) const {
  adjoint.assign(values_.size(), 0.0);
  if (output.is_constant()) return;
  if (output.tape() != this || output.index() >= values_.size()) {
    throw UsageError("backward: output is not on this tape");
  }
  adjoint[output.index()] = 1.0;
  const std::uint32_t* parents = parents_.data();
  const double* partials = partials_.data();
  double* adj = adjoint.data();
  for (std::int64_t node = output.index(); node >= 0; --node) {
    if (ops_[node] == Op::kDense) {
      // The record's rows are consumed together; jump to its first node.
      const DenseRecord& r = dense_records_[static_cast<std::size_t>(aux_[node])];
      const std::uint32_t last = static_cast<std::uint32_t>(node);
      for (std::uint32_t row = r.first; row <= last; ++row) {
        const double a = adj[row];
        if (a == 0.0) continue;
        const std::uint32_t i = row - r.first;
        if (r.bias != kNone) adj[r.bias + i] += a;
        for (std::uint32_t e = r.begin; e < r.end; ++e) {
          const DenseInput& in = dense_inputs_[e];
          const std::uint32_t w = in.weight + i * in.stride;
          adj[w] += a * in.value;
          if (in.parent != kNone) adj[in.parent] += a * values_[w];
        }
      }
      node = r.first;
      continue;
    }
    const double a = adj[node];
    if (a == 0.0) continue;
    const std::uint32_t end = offsets_[node + 1];
    for (std::uint32_t e = offsets_[node]; e < end; ++e) {
      adj[parents[e] & kIndexMask] += partials[e] * a;
    }
  }
}

std::vector<double> Tape::replay() const {
  std::vector<double> v(values_.size());
  for (std::size_t node = 0; node < values_.size(); ++node) {
    const std::uint32_t begin = offsets_[node];
    const std::uint32_t end = offsets_[node + 1];
    switch (ops_[node]) {
      case Op::kLeaf:
        v[node] = values_[node];
        break;
      case Op::kSop: {
        double sum = 0.0;
        for (std::uint32_t e = begin; e < end; ++e) {
          if (parents_[e] & kPairHead) {
            sum += v[parents_[e] & kIndexMask] * v[parents_[e + 1]];
            ++e;
          } else {
            sum += partials_[e] * v[parents_[e]];
          }
        }
        v[node] = aux_[node] + sum;
        break;
      }
      case Op::kTanh:
        v[node] = std::tanh(v[parents_[begin]]);
        break;
      case Op::kSqrt:
        v[node] = std::sqrt(v[parents_[begin]]);
        break;
      case Op::kRecip:
        v[node] = 1.0 / v[parents_[begin]];
        break;
      case Op::kSin:
        v[node] = std::sin(v[parents_[begin]]);
        break;
      case Op::kCos:
        v[node] = std::cos(v[parents_[begin]]);
        break;
      case Op::kDense: {
        const DenseRecord& r = dense_records_[static_cast<std::size_t>(aux_[node])];
        const std::uint32_t i = static_cast<std::uint32_t>(node) - r.first;
        double sum = 0.0;
        for (std::uint32_t e = r.begin; e < r.end; ++e) {
          const DenseInput& in = dense_inputs_[e];
          const double x = in.parent == kNone ? in.value : v[in.parent];
          sum += v[in.weight + i * in.stride] * x;
        }
        if (r.bias != kNone) sum += v[r.bias + i];
        v[node] = sum;
        break;
      }
    }
  }
  return v;
}

std::vector<double> backward(const Tape& tape, const Var& output, std::span<const Var> wrt) {
  for (const Var& w : wrt) {
    if (!w.is_constant() && w.tape() != &tape) {
      throw UsageError("backward: wrt variable is not on this tape");
    }
  }
  std::vector<double> adjoint;
  tape.backward(output, adjoint);
  std::vector<double> out(wrt.size(), 0.0);
  for (std::size_t i = 0; i < wrt.size(); ++i) {
    if (!wrt[i].is_constant()) out[i] = adjoint[wrt[i].index()];
  }
  return out;
}

Var Sop<Var>::finish() {
  if (tape_ == nullptr) return Var(aux_);
  Tape* tape = tape_;
  tape_ = nullptr;
  if (aux_ == 0.0 && tape->open_term_count() == 1 && tape->open_first_partial() == 1.0) {
    const std::uint32_t parent = tape->open_first_parent();
    tape->cancel_node();
    return tape->node_var(parent);
  }
  return tape->close_node(Op::kSop, aux_ + sum_, aux_);
}

Var operator+(const Var& a, const Var& b) {
  if (a.is_constant() && b.is_constant()) return Var(a.value() + b.value());
  Sop<Var> sop;
  sop.add(a);
  sop.add(b);
  return sop.finish();
}

Var operator-(const Var& a, const Var& b) {
  if (a.is_constant() && b.is_constant()) return Var(a.value() - b.value());
  Sop<Var> sop;
  sop.add(a);
  sop.add_scaled(-1.0, b);
  return sop.finish();
}

Var operator*(const Var& a, const Var& b) {
  if (a.is_constant() && b.is_constant()) return Var(a.value() * b.value());
  Sop<Var> sop;
  sop.add(a, b);
  return sop.finish();
}

Var operator-(const Var& a) {
  if (a.is_constant()) return Var(-a.value());
  Sop<Var> sop;
  sop.add_scaled(-1.0, a);
  return sop.finish();
}

Var recip(const Var& x) {
  if (x.value() == 0.0) throw SingularityError("division by a value of 0");
  const double r = 1.0 / x.value();
  if (x.is_constant()) return Var(r);
  return x.tape()->unary(Op::kRecip, x, r, -r * r);
}

Var operator/(const Var& a, const Var& b) {
  if (b.is_constant()) {
    if (b.value() == 0.0) throw SingularityError("division by a value of 0");
    if (a.is_constant()) return Var(a.value() / b.value());
  }
  return a * recip(b);
}

Var square(const Var& x) { return x * x; }

Var tanh(const Var& x) {
  const double t = std::tanh(x.value());
  if (x.is_constant()) return Var(t);
  return x.tape()->unary(Op::kTanh, x, t, 1.0 - t * t);
}

Var sqrt(const Var& x) {
  if (x.value() < 0.0) throw DomainError("sqrt of negative value");
  const double s = std::sqrt(x.value());
  if (x.is_constant()) return Var(s);
  if (s == 0.0) throw SingularityError("sqrt derivative at 0");
  return x.tape()->unary(Op::kSqrt, x, s, 0.5 / s);
}

Var guarded_sqrt(const Var& x, double guard) {
  if (x.value() < 0.0) throw DomainError("sqrt of negative value");
  const double s = std::sqrt(x.value());
  if (x.is_constant()) return Var(s);
  return x.tape()->unary(Op::kSqrt, x, s, 0.5 / std::sqrt(x.value() + guard));
}

Var sin(const Var& x) {
  const double s = std::sin(x.value());
  if (x.is_constant()) return Var(s);
  return x.tape()->unary(Op::kSin, x, s, std::cos(x.value()));
}

Var cos(const Var& x) {
  const double c = std::cos(x.value());
  if (x.is_constant()) return Var(c);
  return x.tape()->unary(Op::kCos, x, c, -std::sin(x.value()));
}

double check_gradient(const ScalarMap& f, std::span<const double> point, double step) {
  std::vector<double> analytic;
  {
    Tape tape;
    std::vector<Var> vars;
    vars.reserve(point.size());
    for (double p : point) vars.push_back(tape.variable(p));
    const Var out = f(tape, vars);
    analytic = backward(tape, out, vars);
  }
  auto evaluate = [&](std::span<const double> x) {
    Tape tape;
    std::vector<Var> vars;
    vars.reserve(x.size());
    for (double p : x) vars.push_back(tape.variable(p));
    return f(tape, vars).value();
  };
  std::vector<double> x(point.begin(), point.end());
  auto at = [&](std::size_t i, double offset) {
    const double saved = x[i];
    x[i] = saved + offset;
    const double y = evaluate(x);
    x[i] = saved;
    return y;
  };
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    // fourth-order central stencil
    const double d1 = at(i, step) - at(i, -step);
    const double d2 = at(i, 2 * step) - at(i, -2 * step);
    const double fd = (8.0 * d1 - d2) / (12.0 * step);
    const double dev = std::abs(analytic[i] - fd) / (std::abs(fd) + 1e-8);
    if (dev > worst) worst = dev;
  }
  return worst;
}

}  // namespace varconstrain
