#include "grfkit/seqspace.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace grfkit::seq {

namespace {

void require_norm_exponent(int p) {
  if (p < -kMaxNormExponent || p > kMaxNormExponent)
    throw CapacityError("norm exponent |p| > " + std::to_string(kMaxNormExponent));
}

/// log((1+n)^1) = sum_i log(1+n_i) for every flat index of the cube, in
/// lexicographic order.
std::vector<double> log_weights(int dim, int order) {
  std::vector<double> axis(static_cast<std::size_t>(order) + 1);
  for (int j = 0; j <= order; ++j) axis[static_cast<std::size_t>(j)] = std::log1p(j);
  std::vector<double> out;
  out.reserve(cube_size(dim, order));
  MultiIndex n = MultiIndex::zero(dim);
  do {
    double lw = 0.0;
    for (int i = 0; i < dim; ++i) lw += axis[static_cast<std::size_t>(n[i])];
    out.push_back(lw);
  } while (n.next_in_cube(order));
  return out;
}

/// (1+n)^p by exact integer powers (products stay exact while < 2^53),
/// used where bit-faithful comparisons against hand values matter.
double int_weight(const MultiIndex& n, int p) {
  double w = 1.0;
  for (int i = 0; i < n.dim(); ++i) {
    double base = 1.0 + static_cast<double>(n[i]);
    for (int k = 0; k < p; ++k) w *= base;
  }
  return w;
}

}  // namespace

double pairing(const TruncatedSeq& b, const TruncatedSeq& a) {
  if (b.dim() != a.dim()) throw std::invalid_argument("pairing: dim mismatch");
  if (b.order() == a.order()) {
    const auto bv = b.values();
    const auto av = a.values();
    double s = 0.0;
    for (std::size_t i = 0; i < bv.size(); ++i) s += bv[i] * av[i];
    return s;
  }
  // Unequal orders: the shorter sequence is zero beyond its cube, so only
  // the shared cube contributes.
  const int shared = std::min(b.order(), a.order());
  MultiIndex n = MultiIndex::zero(b.dim());
  double s = 0.0;
  do {
    s += b[n.to_flat(b.order())] * a[n.to_flat(a.order())];
  } while (n.next_in_cube(shared));
  return s;
}

double norm_p(const TruncatedSeq& a, int p) {
  require_norm_exponent(p);
  const auto values = a.values();
  const std::vector<double> lw = log_weights(a.dim(), a.order());
  const double dp = static_cast<double>(p);

  // Factor out the largest log term so the sum of squares can neither
  // overflow nor flush to zero, whatever the weights do.
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] == 0.0) continue;
    top = std::max(top, dp * lw[i] + std::log(std::fabs(values[i])));
  }
  if (top == -std::numeric_limits<double>::infinity()) return 0.0;

  double s = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] == 0.0) continue;
    const double lt = dp * lw[i] + std::log(std::fabs(values[i]));
    s += std::exp(2.0 * (lt - top));
  }
  return std::exp(top) * std::sqrt(s);
}

double dual_norm(const TruncatedSeq& b, int p) {
  if (p < 0) throw std::invalid_argument("dual_norm: p must be non-negative");
  require_norm_exponent(p);
  return norm_p(b, -p);
}

std::optional<TruncatedSeq> dual_maximizer(const TruncatedSeq& b, int p) {
  if (p < 0) throw std::invalid_argument("dual_maximizer: p must be non-negative");
  require_norm_exponent(p);
  const double nb = norm_p(b, -p);
  if (nb == 0.0) return std::nullopt;  // zero functional: no maximizer
  const std::vector<double> lw = log_weights(b.dim(), b.order());
  const auto bv = b.values();
  std::vector<double> out(bv.size());
  for (std::size_t i = 0; i < bv.size(); ++i)
    out[i] = std::exp(-2.0 * p * lw[i]) * bv[i] / nb;
  return TruncatedSeq(b.dim(), b.order(), std::move(out));
}

double zeta_const(int s) {
  if (s < 2) throw std::invalid_argument("zeta_const: series diverges for s < 2");
  constexpr std::int64_t kTerms = 1000000;
  // Smallest terms first with Kahan compensation keeps the partial sum
  // accurate to well under 1e-15.
  double sum = 0.0, comp = 0.0;
  for (std::int64_t k = kTerms; k >= 1; --k) {
    const double term = std::pow(static_cast<double>(k), -static_cast<double>(s));
    const double y = term - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  // Integral tail: sum_{k>N} k^-s ~ N^(1-s)/(s-1), off by under 1e-12 here.
  const double tail =
      std::pow(static_cast<double>(kTerms), 1.0 - static_cast<double>(s)) /
      (static_cast<double>(s) - 1.0);
  return sum + tail;
}

EnvelopeCheck check_envelope(const TruncatedSeq& b, const GrowthEnvelope& env) {
  if (env.p < 0) throw std::invalid_argument("check_envelope: envelope p must be >= 0");
  if (!(env.c >= 0.0) || !std::isfinite(env.c))
    throw std::invalid_argument("check_envelope: envelope c must be finite and >= 0");
  EnvelopeCheck result;
  result.prefix_only = true;  // only the stored cube is inspected
  result.holds = true;
  MultiIndex n = MultiIndex::zero(b.dim());
  do {
    if (std::fabs(b.at(n)) > env.c * int_weight(n, env.p)) {
      result.holds = false;
      break;
    }
  } while (n.next_in_cube(b.order()));
  return result;
}

double envelope_norm_bound(const GrowthEnvelope& env, int dim) {
  if (env.p < 0) throw std::invalid_argument("envelope_norm_bound: envelope p must be >= 0");
  if (!(env.c >= 0.0) || !std::isfinite(env.c))
    throw std::invalid_argument("envelope_norm_bound: envelope c must be finite and >= 0");
  if (dim < 1) throw std::invalid_argument("envelope_norm_bound: dim must be >= 1");
  if (dim > kMaxDim)
    throw CapacityError("envelope_norm_bound: dim > " + std::to_string(kMaxDim));
  // ||b||_{-p-1}^2 <= c^2 sum_n (1+n)^{-2} = c^2 zeta(2)^d (product over axes).
  return env.c * std::pow(zeta_const(2), 0.5 * static_cast<double>(dim));
}

}  // namespace grfkit::seq
