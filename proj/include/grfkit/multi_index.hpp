#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>

#include "grfkit/errors.hpp"

namespace grfkit {

inline constexpr int kMaxDim = 3;

/// Multi-index n = (n_1, ..., n_d) with non-negative components, d <= 3.
/// Flat layout over the cube {0..order}^d is lexicographic row-major:
/// axis 0 is the most significant digit.
class MultiIndex {
 public:
  MultiIndex() : dim_(1) {}

  explicit MultiIndex(std::span<const int> components) {
    if (components.empty()) throw std::invalid_argument("MultiIndex: dim must be >= 1");
    if (components.size() > kMaxDim)
      throw CapacityError("MultiIndex: dim > " + std::to_string(kMaxDim));
    dim_ = static_cast<int>(components.size());
    for (int i = 0; i < dim_; ++i) {
      if (components[i] < 0)
        throw std::invalid_argument("MultiIndex: components must be non-negative");
      n_[i] = components[i];
    }
  }

  MultiIndex(std::initializer_list<int> components)
      : MultiIndex(std::span<const int>(components.begin(), components.size())) {}

  static MultiIndex zero(int dim) {
    if (dim < 1) throw std::invalid_argument("MultiIndex: dim must be >= 1");
    if (dim > kMaxDim) throw CapacityError("MultiIndex: dim > " + std::to_string(kMaxDim));
    MultiIndex m;
    m.dim_ = dim;
    return m;
  }

  /// Inverse of to_flat on the cube {0..order}^dim.
  static MultiIndex from_flat(std::size_t flat, int dim, int order) {
    MultiIndex m = zero(dim);
    const std::size_t base = static_cast<std::size_t>(order) + 1;
    for (int i = dim - 1; i >= 0; --i) {
      m.n_[i] = static_cast<int>(flat % base);
      flat /= base;
    }
    if (flat != 0) throw std::invalid_argument("MultiIndex::from_flat: index out of cube");
    return m;
  }

  int dim() const { return dim_; }
  int operator[](int axis) const { return n_[axis]; }

  std::span<const int> components() const { return {n_.data(), static_cast<std::size_t>(dim_)}; }

  bool in_cube(int order) const {
    for (int i = 0; i < dim_; ++i)
      if (n_[i] > order) return false;
    return true;
  }

  std::size_t to_flat(int order) const {
    if (!in_cube(order)) throw std::invalid_argument("MultiIndex::to_flat: index out of cube");
    const std::size_t base = static_cast<std::size_t>(order) + 1;
    std::size_t flat = 0;
    for (int i = 0; i < dim_; ++i) flat = flat * base + static_cast<std::size_t>(n_[i]);
    return flat;
  }

  /// sum_i log(1 + n_i); the log of the polynomial weight at exponent 1.
  double log_weight() const {
    double s = 0.0;
    for (int i = 0; i < dim_; ++i) s += std::log1p(static_cast<double>(n_[i]));
    return s;
  }

  /// Advance to the lexicographic successor inside {0..order}^dim.
  /// Returns false (and resets to zero) after the last index.
  bool next_in_cube(int order) {
    for (int i = dim_ - 1; i >= 0; --i) {
      if (n_[i] < order) {
        ++n_[i];
        return true;
      }
      n_[i] = 0;
    }
    return false;
  }

  std::string str() const {
    std::string s = "(";
    for (int i = 0; i < dim_; ++i) {
      if (i) s += ",";
      s += std::to_string(n_[i]);
    }
    return s + ")";
  }

  friend bool operator==(const MultiIndex& a, const MultiIndex& b) {
    if (a.dim_ != b.dim_) return false;
    for (int i = 0; i < a.dim_; ++i)
      if (a.n_[i] != b.n_[i]) return false;
    return true;
  }

 private:
  int dim_;
  std::array<int, kMaxDim> n_{0, 0, 0};
};

/// Number of lattice points in {0..order}^dim.
inline std::size_t cube_size(int dim, int order) {
  if (dim < 1) throw std::invalid_argument("cube_size: dim must be >= 1");
  if (dim > kMaxDim) throw CapacityError("cube_size: dim > " + std::to_string(kMaxDim));
  if (order < 0) throw std::invalid_argument("cube_size: order must be >= 0");
  std::size_t n = 1;
  for (int i = 0; i < dim; ++i) n *= static_cast<std::size_t>(order) + 1;
  return n;
}

}  // namespace grfkit
