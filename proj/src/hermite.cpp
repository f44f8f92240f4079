#include "grfkit/hermite.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include "grfkit/detail/util.hpp"
#include "grfkit/errors.hpp"

namespace grfkit::hermite {

namespace {

constexpr double kPiQuarterInv = 0.75112554446494248286;  // pi^(-1/4)

void require_mode(int n) {
  if (n < 0) throw std::invalid_argument("hermite: mode index must be >= 0");
}

void require_finite(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("hermite: point must be finite");
}

/// Shared recurrence core; seed chooses plain vs scaled family.
double recurrence(int n, double x, double seed) {
  double prev = seed;
  if (n == 0) return prev;
  double cur = x * std::sqrt(2.0) * seed;
  for (int k = 1; k < n; ++k) {
    const double dk = static_cast<double>(k);
    const double next =
        x * std::sqrt(2.0 / (dk + 1.0)) * cur - std::sqrt(dk / (dk + 1.0)) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

std::vector<double> recurrence_all(int max_n, double x, double seed) {
  std::vector<double> h(static_cast<std::size_t>(max_n) + 1);
  h[0] = seed;
  if (max_n == 0) return h;
  h[1] = x * std::sqrt(2.0) * seed;
  for (int k = 1; k < max_n; ++k) {
    const double dk = static_cast<double>(k);
    h[static_cast<std::size_t>(k) + 1] =
        x * std::sqrt(2.0 / (dk + 1.0)) * h[static_cast<std::size_t>(k)] -
        std::sqrt(dk / (dk + 1.0)) * h[static_cast<std::size_t>(k) - 1];
  }
  return h;
}

}  // namespace

double hermite_eval(int n, double x) {
  require_mode(n);
  require_finite(x);
  return recurrence(n, x, kPiQuarterInv * std::exp(-0.5 * x * x));
}

double hermite_eval_scaled(int n, double x) {
  require_mode(n);
  require_finite(x);
  return recurrence(n, x, kPiQuarterInv);
}

std::vector<double> hermite_all(int max_n, double x) {
  require_mode(max_n);
  require_finite(x);
  return recurrence_all(max_n, x, kPiQuarterInv * std::exp(-0.5 * x * x));
}

std::vector<double> hermite_all_scaled(int max_n, double x) {
  require_mode(max_n);
  require_finite(x);
  return recurrence_all(max_n, x, kPiQuarterInv);
}

double hermite_eval_multi(const MultiIndex& n, std::span<const double> x) {
  if (static_cast<std::size_t>(n.dim()) != x.size())
    throw std::invalid_argument("hermite_eval_multi: dim mismatch");
  double prod = 1.0;
  for (int i = 0; i < n.dim(); ++i) prod *= hermite_eval(n[i], x[static_cast<std::size_t>(i)]);
  return prod;
}

QuadratureRule::QuadratureRule(std::vector<double> nodes, std::vector<double> log_weights)
    : nodes_(std::move(nodes)), log_weights_(std::move(log_weights)) {
  if (nodes_.empty() || nodes_.size() != log_weights_.size())
    throw std::invalid_argument("QuadratureRule: nodes/weights size mismatch");
  weights_.resize(nodes_.size());
  total_weights_.resize(nodes_.size());
  half_weights_.resize(nodes_.size());
  for (std::size_t k = 0; k < nodes_.size(); ++k) {
    const double x2 = nodes_[k] * nodes_[k];
    weights_[k] = std::exp(log_weights_[k]);
    total_weights_[k] = std::exp(log_weights_[k] + x2);
    half_weights_[k] = std::exp(log_weights_[k] + 0.5 * x2);
  }
}

QuadratureRule gauss_hermite_rule(int order, int cap) {
  if (order < 1) throw std::invalid_argument("gauss_hermite_rule: order must be >= 1");
  if (order > cap)
    throw CapacityError("gauss_hermite_rule: order " + std::to_string(order) +
                        " exceeds cap " + std::to_string(cap));
  if (order == 1) {
    // Single node at 0, weight sqrt(pi): log(sqrt(pi)) = 0.5 log(pi).
    return QuadratureRule({0.0}, {0.5 * std::log(M_PI)});
  }

  // Jacobi matrix of the orthonormal Hermite family: zero diagonal,
  // off-diagonal beta_k = sqrt(k/2).  Its eigenvalues are the nodes.
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(order);
  Eigen::VectorXd sub(order - 1);
  for (int k = 1; k < order; ++k)
    sub[k - 1] = std::sqrt(0.5 * static_cast<double>(k));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("gauss_hermite_rule: eigenvalue iteration failed");

  std::vector<double> nodes(static_cast<std::size_t>(order));
  for (int k = 0; k < order; ++k) nodes[static_cast<std::size_t>(k)] = solver.eigenvalues()[k];
  // Enforce the exact +/- symmetry the matrix has analytically.
  for (int k = 0; k < order / 2; ++k) {
    const double t =
        0.5 * (nodes[static_cast<std::size_t>(k)] - nodes[static_cast<std::size_t>(order - 1 - k)]);
    nodes[static_cast<std::size_t>(k)] = t;
    nodes[static_cast<std::size_t>(order - 1 - k)] = -t;
  }
  if (order % 2 == 1) nodes[static_cast<std::size_t>(order / 2)] = 0.0;

  // w_k = 1 / (order * htilde_{order-1}(x_k)^2), kept as a log because the
  // plain weight underflows near the edge nodes of large rules.
  std::vector<double> log_w(static_cast<std::size_t>(order));
  for (int k = 0; k < order; ++k) {
    const double ht = hermite_eval_scaled(order - 1, nodes[static_cast<std::size_t>(k)]);
    log_w[static_cast<std::size_t>(k)] =
        -(std::log(static_cast<double>(order)) + 2.0 * std::log(std::fabs(ht)));
  }
  return QuadratureRule(std::move(nodes), std::move(log_w));
}

TruncatedSeq hermite_transform(const std::function<double(std::span<const double>)>& f,
                               int dim, int order, const QuadratureRule& rule,
                               int threads) {
  if (order < 0) throw std::invalid_argument("hermite_transform: order must be >= 0");
  if (rule.order() < order + 1)
    throw AliasingError("hermite_transform: quadrature order " +
                        std::to_string(rule.order()) + " < truncation order + 1 = " +
                        std::to_string(order + 1) + "; raise the rule order");
  const std::size_t modes = cube_size(dim, order);
  const int R = rule.order();
  const std::size_t grid = [&] {
    std::size_t g = 1;
    for (int i = 0; i < dim; ++i) g *= static_cast<std::size_t>(R);
    return g;
  }();

  // Per-axis kernel K[n][k] = half_weight_k * htilde_n(x_k); the two half
  // Gaussian factors of (w_k e^{x^2}) h_n(x) f(x) are split between the
  // kernel and the (already Schwartz-decaying) f samples.
  std::vector<std::vector<double>> kernel(static_cast<std::size_t>(order) + 1,
                                          std::vector<double>(static_cast<std::size_t>(R)));
  for (int k = 0; k < R; ++k) {
    const std::vector<double> ht = hermite_all_scaled(order, rule.nodes()[static_cast<std::size_t>(k)]);
    for (int n = 0; n <= order; ++n)
      kernel[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)] =
          rule.half_weight(k) * ht[static_cast<std::size_t>(n)];
  }

  // Sample f once per tensor-grid node, lexicographic order.
  std::vector<double> samples(grid);
  {
    std::array<int, kMaxDim> g{0, 0, 0};
    std::array<double, kMaxDim> x{0.0, 0.0, 0.0};
    for (int i = 0; i < dim; ++i) x[static_cast<std::size_t>(i)] = rule.nodes()[0];
    for (std::size_t flat = 0;; ++flat) {
      samples[flat] = f(std::span<const double>(x.data(), static_cast<std::size_t>(dim)));
      if (!std::isfinite(samples[flat]))
        throw std::invalid_argument("hermite_transform: f returned a non-finite value");
      int axis = dim - 1;
      while (axis >= 0 && g[static_cast<std::size_t>(axis)] == R - 1) {
        g[static_cast<std::size_t>(axis)] = 0;
        x[static_cast<std::size_t>(axis)] = rule.nodes()[0];
        --axis;
      }
      if (axis < 0) break;
      ++g[static_cast<std::size_t>(axis)];
      x[static_cast<std::size_t>(axis)] =
          rule.nodes()[static_cast<std::size_t>(g[static_cast<std::size_t>(axis)])];
    }
  }

  // One independent grid sum per mode (fixed lexicographic order inside),
  // so the result does not depend on how modes are distributed over threads.
  TruncatedSeq out(dim, order);
  auto worker = [&](std::size_t mode_begin, std::size_t mode_end) {
    for (std::size_t mode = mode_begin; mode < mode_end; ++mode) {
      const MultiIndex n = MultiIndex::from_flat(mode, dim, order);
      std::array<const double*, kMaxDim> rows{};
      for (int i = 0; i < dim; ++i)
        rows[static_cast<std::size_t>(i)] = kernel[static_cast<std::size_t>(n[i])].data();
      std::array<int, kMaxDim> g{0, 0, 0};
      double acc = 0.0;
      for (std::size_t flat = 0;; ++flat) {
        double w = rows[0][g[0]];
        for (int i = 1; i < dim; ++i) w *= rows[static_cast<std::size_t>(i)][g[static_cast<std::size_t>(i)]];
        acc += w * samples[flat];
        int axis = dim - 1;
        while (axis >= 0 && g[static_cast<std::size_t>(axis)] == R - 1) {
          g[static_cast<std::size_t>(axis)] = 0;
          --axis;
        }
        if (axis < 0) break;
        ++g[static_cast<std::size_t>(axis)];
      }
      out[mode] = acc;
    }
  };
  detail::parallel_for(modes, threads, worker);
  return out;
}

double hermite_reconstruct(const TruncatedSeq& a, std::span<const double> x) {
  if (static_cast<std::size_t>(a.dim()) != x.size())
    throw std::invalid_argument("hermite_reconstruct: dim mismatch");
  // Per-axis value tables h_0..h_m at the axis coordinate.
  std::array<std::vector<double>, kMaxDim> table;
  for (int i = 0; i < a.dim(); ++i)
    table[static_cast<std::size_t>(i)] = hermite_all(a.order(), x[static_cast<std::size_t>(i)]);
  double s = 0.0;
  MultiIndex n = MultiIndex::zero(a.dim());
  std::size_t flat = 0;
  do {
    double h = 1.0;
    for (int i = 0; i < a.dim(); ++i)
      h *= table[static_cast<std::size_t>(i)][static_cast<std::size_t>(n[i])];
    s += a[flat] * h;
    ++flat;
  } while (n.next_in_cube(a.order()));
  return s;
}

double integrate(const std::function<double(std::span<const double>)>& g, int dim,
                 const QuadratureRule& rule) {
  if (dim < 1) throw std::invalid_argument("integrate: dim must be >= 1");
  if (dim > kMaxDim) throw CapacityError("integrate: dim > " + std::to_string(kMaxDim));
  const int R = rule.order();
  std::array<int, kMaxDim> idx{0, 0, 0};
  std::array<double, kMaxDim> x{0.0, 0.0, 0.0};
  for (int i = 0; i < dim; ++i) x[static_cast<std::size_t>(i)] = rule.nodes()[0];
  double s = 0.0;
  for (;;) {
    double w = 1.0;
    for (int i = 0; i < dim; ++i) w *= rule.total_weight(idx[static_cast<std::size_t>(i)]);
    s += w * g(std::span<const double>(x.data(), static_cast<std::size_t>(dim)));
    int axis = dim - 1;
    while (axis >= 0 && idx[static_cast<std::size_t>(axis)] == R - 1) {
      idx[static_cast<std::size_t>(axis)] = 0;
      x[static_cast<std::size_t>(axis)] = rule.nodes()[0];
      --axis;
    }
    if (axis < 0) break;
    ++idx[static_cast<std::size_t>(axis)];
    x[static_cast<std::size_t>(axis)] =
        rule.nodes()[static_cast<std::size_t>(idx[static_cast<std::size_t>(axis)])];
  }
  return s;
}

}  // namespace grfkit::hermite
