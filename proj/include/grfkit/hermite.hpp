#pragma once

#include <functional>
#include <span>
#include <vector>

#include "grfkit/truncated_seq.hpp"

namespace grfkit::hermite {

/// Largest quadrature order built by default; the scaled-recurrence values
/// stay inside double range up to roughly this point.
inline constexpr int kDefaultOrderCap = 512;

/// h_n(x): the L2-orthonormal Hermite function, via the stable normalized
/// recurrence h_{k+1} = x sqrt(2/(k+1)) h_k - sqrt(k/(k+1)) h_{k-1},
/// seeded by h_0(x) = pi^{-1/4} exp(-x^2/2).
double hermite_eval(int n, double x);

/// h_n(x) * exp(x^2/2): same recurrence with the Gaussian factor removed
/// analytically (seed pi^{-1/4}), so large |x| never underflows.
double hermite_eval_scaled(int n, double x);

/// All of h_0(x)..h_max_n(x) in one recurrence pass.
std::vector<double> hermite_all(int max_n, double x);
std::vector<double> hermite_all_scaled(int max_n, double x);

/// Tensor-product Hermite function: prod_i h_{n_i}(x_i).
double hermite_eval_multi(const MultiIndex& n, std::span<const double> x);

/// Gauss-Hermite rule for weight e^{-x^2} on the line: integrates
/// polynomials of degree <= 2*order-1 exactly.
class QuadratureRule {
 public:
  QuadratureRule(std::vector<double> nodes, std::vector<double> log_weights);

  int order() const { return static_cast<int>(nodes_.size()); }
  std::span<const double> nodes() const { return nodes_; }
  /// w_k for weight e^{-x^2}; underflows to 0 in double past order ~390,
  /// which is why the log form below is the primary representation.
  std::span<const double> weights() const { return weights_; }
  double log_weight(int k) const { return log_weights_[static_cast<std::size_t>(k)]; }
  /// w_k e^{x_k^2}: the weight for integrating plain dx integrands.
  double total_weight(int k) const { return total_weights_[static_cast<std::size_t>(k)]; }
  /// w_k e^{x_k^2/2}: pairs with one scaled Hermite factor.
  double half_weight(int k) const { return half_weights_[static_cast<std::size_t>(k)]; }

 private:
  std::vector<double> nodes_;
  std::vector<double> log_weights_;
  std::vector<double> weights_;
  std::vector<double> total_weights_;
  std::vector<double> half_weights_;
};

/// Build the rule by the symmetric-tridiagonal (Golub-Welsch) eigenvalue
/// method; weights are recovered in log space from the scaled recurrence.
QuadratureRule gauss_hermite_rule(int order, int cap = kDefaultOrderCap);

/// Coefficients a_n = <f, h_n> for all n in the cube {0..order}^dim,
/// computed on the tensor grid of `rule`.  Requires rule.order() >= order+1
/// (anything less would alias mode `order` onto lower modes).  `threads`
/// parallelizes over modes; each mode sums the full grid in a fixed order,
/// so results are bitwise-identical for any thread count.
TruncatedSeq hermite_transform(const std::function<double(std::span<const double>)>& f,
                               int dim, int order, const QuadratureRule& rule,
                               int threads = 1);

/// Partial sum sum_n a_n h_n(x).
double hermite_reconstruct(const TruncatedSeq& a, std::span<const double> x);

/// Integral of g over R^dim on the rule's tensor grid: exact whenever
/// g(x) e^{|x|^2} is a polynomial of per-axis degree <= 2*order-1.
double integrate(const std::function<double(std::span<const double>)>& g, int dim,
                 const QuadratureRule& rule);

}  // namespace grfkit::hermite
