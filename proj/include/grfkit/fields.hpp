#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <variant>
#include <vector>

#include "grfkit/rng.hpp"
#include "grfkit/truncated_seq.hpp"

namespace grfkit::fields {

/// Per-mode variance profiles for Gaussian coefficient laws.
struct WhiteProfile {};  // sigma_n^2 = 1
struct PowerDecayProfile {
  int q = 1;  // sigma_n^2 = (1+n)^(-2q)
};
struct TableProfile {
  std::vector<double> variances;  // explicit, lex order, >= 0
};
using VarianceProfile = std::variant<WhiteProfile, PowerDecayProfile, TableProfile>;

/// A Gaussian generalized random field given by independent coefficients
/// b_n ~ N(0, sigma_n^2) on the cube {0..order}^dim.
class FieldSpec {
 public:
  FieldSpec(int dim, int order, VarianceProfile profile);

  static FieldSpec white(int dim, int order) { return {dim, order, WhiteProfile{}}; }
  static FieldSpec power_decay(int dim, int order, int q) {
    return {dim, order, PowerDecayProfile{q}};
  }
  static FieldSpec table(int dim, int order, std::vector<double> variances) {
    return {dim, order, TableProfile{std::move(variances)}};
  }

  int dim() const { return dim_; }
  int order() const { return order_; }
  const VarianceProfile& profile() const { return profile_; }

  double variance(std::size_t flat) const {
    return sigmas_[flat] * sigmas_[flat];
  }
  double sigma(std::size_t flat) const { return sigmas_[flat]; }
  std::span<const double> sigmas() const { return sigmas_; }
  std::size_t size() const { return sigmas_.size(); }

  /// Same profile with every variance multiplied by factor^2.
  FieldSpec scaled(double factor) const;

 private:
  int dim_;
  int order_;
  VarianceProfile profile_;
  std::vector<double> sigmas_;  // per-mode standard deviations, lex order
};

/// Per-mode quantile hook: maps (mode, uniform u in (0,1)) to a coefficient
/// draw.  Lets non-Gaussian coefficient laws reuse the sampler plumbing and
/// its counter-alignment guarantees.
using InverseCdf = std::function<double(const MultiIndex&, double)>;

/// One field realization: coefficient n uses draw index flat(n) of the
/// stream, so samples are reproducible mode-by-mode.
TruncatedSeq sample_field(const FieldSpec& spec, const RandomStream& stream);

/// Generic version of sample_field with a caller-supplied coefficient law.
TruncatedSeq sample_field_icdf(int dim, int order, const InverseCdf& icdf,
                               const RandomStream& stream);

/// count independent realizations; draw j uses stream_id = stream.stream_id + j.
/// Parallelizes over realizations; output is identical for any thread count.
std::vector<TruncatedSeq> sample_batch(const FieldSpec& spec, const RandomStream& stream,
                                       int count, int threads = 1);

/// The observable <X, a>: alias for the sequence pairing.
double field_pairing(const TruncatedSeq& b, const TruncatedSeq& a);

/// L(a) = exp(-1/2 sum_n sigma_n^2 a_n^2): the exact characteristic
/// functional of the spec.  Real (centered Gaussian); returned as complex
/// for interface uniformity with empirical estimates.
std::complex<double> gaussian_charfun_exact(const FieldSpec& spec, const TruncatedSeq& a);

}  // namespace grfkit::fields
