#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "grfkit/multi_index.hpp"

namespace grfkit {

/// A real sequence supported on the cube {0..order}^dim, stored dense in
/// lexicographic row-major order.  Values are finite by construction;
/// indices outside the cube are implicitly zero.
class TruncatedSeq {
 public:
  TruncatedSeq(int dim, int order)
      : dim_(dim), order_(order), values_(cube_size(dim, order), 0.0) {
    if (order < 0) throw std::invalid_argument("TruncatedSeq: order must be >= 0");
  }

  TruncatedSeq(int dim, int order, std::vector<double> values)
      : dim_(dim), order_(order), values_(std::move(values)) {
    if (order < 0) throw std::invalid_argument("TruncatedSeq: order must be >= 0");
    if (values_.size() != cube_size(dim, order))
      throw std::invalid_argument("TruncatedSeq: values size does not match (order+1)^dim");
    for (double v : values_)
      if (!std::isfinite(v)) throw std::invalid_argument("TruncatedSeq: values must be finite");
  }

  /// Basis sequence e_n: 1 at n, 0 elsewhere.
  static TruncatedSeq unit(int dim, int order, const MultiIndex& n) {
    TruncatedSeq s(dim, order);
    if (n.dim() != dim) throw std::invalid_argument("TruncatedSeq::unit: dim mismatch");
    s.values_[n.to_flat(order)] = 1.0;
    return s;
  }

  int dim() const { return dim_; }
  int order() const { return order_; }
  std::size_t size() const { return values_.size(); }

  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  double operator[](std::size_t flat) const { return values_[flat]; }
  double& operator[](std::size_t flat) { return values_[flat]; }

  double at(const MultiIndex& n) const {
    if (n.dim() != dim_) throw std::invalid_argument("TruncatedSeq::at: dim mismatch");
    if (!n.in_cube(order_)) return 0.0;  // zero-extension
    return values_[n.to_flat(order_)];
  }

  friend bool operator==(const TruncatedSeq& a, const TruncatedSeq& b) {
    return a.dim_ == b.dim_ && a.order_ == b.order_ && a.values_ == b.values_;
  }

 private:
  int dim_;
  int order_;
  std::vector<double> values_;
};

/// Re-truncate to a (usually larger) cube; entries outside the new cube drop.
inline TruncatedSeq embed(const TruncatedSeq& a, int order) {
  TruncatedSeq out(a.dim(), order);
  const int shared = std::min(order, a.order());
  MultiIndex n = MultiIndex::zero(a.dim());
  do {
    out[n.to_flat(order)] = a[n.to_flat(a.order())];
  } while (n.next_in_cube(shared));
  return out;
}

inline TruncatedSeq scale(const TruncatedSeq& a, double c) {
  if (!std::isfinite(c)) throw std::invalid_argument("scale: factor must be finite");
  std::vector<double> v(a.values().begin(), a.values().end());
  for (double& x : v) x *= c;
  return TruncatedSeq(a.dim(), a.order(), std::move(v));
}

/// a - b with zero-extension; result lives on the larger cube.
inline TruncatedSeq subtract(const TruncatedSeq& a, const TruncatedSeq& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("subtract: dim mismatch");
  const int order = std::max(a.order(), b.order());
  TruncatedSeq out(a.dim(), order);
  MultiIndex n = MultiIndex::zero(a.dim());
  do {
    out[n.to_flat(order)] = a.at(n) - b.at(n);
  } while (n.next_in_cube(order));
  return out;
}

inline TruncatedSeq add(const TruncatedSeq& a, const TruncatedSeq& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("add: dim mismatch");
  const int order = std::max(a.order(), b.order());
  TruncatedSeq out(a.dim(), order);
  MultiIndex n = MultiIndex::zero(a.dim());
  do {
    out[n.to_flat(order)] = a.at(n) + b.at(n);
  } while (n.next_in_cube(order));
  return out;
}

}  // namespace grfkit
