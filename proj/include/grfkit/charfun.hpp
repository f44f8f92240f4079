#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "grfkit/fields.hpp"
#include "grfkit/truncated_seq.hpp"

namespace grfkit::charfun {

/// A characteristic functional as a black box; must be pure.
using CharFunctional = std::function<std::complex<double>(const TruncatedSeq&)>;

/// Monte-Carlo estimate of a characteristic functional on a finite bank of
/// test points.
struct CharFunEstimate {
  std::vector<TruncatedSeq> bank;
  std::vector<std::complex<double>> values;  // (1/N) sum_j e^{i<b_j, a_k>}
  /// Componentwise standard error: sqrt((var(cos) + var(sin)) / N) with the
  /// population convention, which makes it identically <= 1/sqrt(N).
  std::vector<double> std_errors;
  std::size_t sample_count = 0;
};

/// Estimate L(a) = E e^{i<X,a>} at every bank point.  Deterministic for a
/// fixed sample order regardless of `threads`.
CharFunEstimate empirical_charfun(std::span<const TruncatedSeq> samples,
                                  std::span<const TruncatedSeq> bank, int threads = 1);

/// The same estimator as a reusable callable over arbitrary points (owns a
/// copy of the samples), e.g. for feeding gram_psd_check.
CharFunctional make_empirical_charfun(std::vector<TruncatedSeq> samples, int threads = 1);

struct GramCheck {
  bool pass = false;
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
};

/// Positive-definiteness probe: G_ij = L(p_i - p_j), Hermitized as
/// (G + G*)/2; pass iff the minimum eigenvalue >= -tol * max(1, max
/// eigenvalue).  At most 64 pairwise-distinct points.
GramCheck gram_psd_check(const CharFunctional& charfun,
                         std::span<const TruncatedSeq> points, double tol = 1e-8);

/// The Gaussian spec with per-mode variance sigma^2 (1+n)^(-2q) on
/// {0..order}^dim — the reference measure of the tail-bound check below.
fields::FieldSpec nu_gaussian_spec(int order, double sigma, int q, int dim = 1);

/// One draw a ~ nu: independent a_n ~ N(0, sigma^2 (1+n)^(-2q)).
TruncatedSeq nu_gaussian_sample(int order, double sigma, int q, const RandomStream& stream,
                                int dim = 1);

struct MinlosRow {
  double sigma = 0.0;
  double lhs = 0.0;         // mean of 1 - exp(-sigma^2/2 ||b||_{-q}^2)
  double lhs_stderr = 0.0;  // sample standard deviation / sqrt(N)
  double rhs = 0.0;         // eps + c sigma^2 zeta(2(q-p))^dim
  bool pass = false;        // violation means lhs - 3 stderr > rhs
};

struct MinlosReport {
  int p = 0;
  int q = 0;
  int dim = 1;
  double eps = 0.0;
  double c = 0.0;
  double zeta_value = 0.0;  // zeta(2(q-p))
  std::size_t sample_count = 0;
  std::vector<MinlosRow> rows;
  bool all_pass = false;
  /// The (eps, c, p) hypothesis is supplied, not proved; stated here so
  /// every serialized report carries the caveat.
  std::string hypothesis_note;
};

/// Tail-bound verifier: for each sigma, compare the Monte-Carlo estimate of
/// E[1 - exp(-sigma^2/2 ||b||_{-q}^2)] against eps + c sigma^2 zeta(2(q-p))^dim.
/// The caller vouches for the hypothesis 1 - Re L(a) <= eps + c ||a||_p^2
/// (see continuity_probe).
MinlosReport minlos_tail_check(std::span<const TruncatedSeq> samples, int p, int q,
                               std::span<const double> sigma_grid, double eps, double c,
                               int threads = 1);

struct ProbeResult {
  int p = 0;
  double delta = 0.0;
  /// Largest observed 1 - Re L over the accepted sphere.
  double worst_deficit = 0.0;
  /// Always true: finitely many directions were tested, which is evidence,
  /// not proof, of continuity at 0.
  bool sampled_only = true;
};

/// Search for the weakest ball on which the functional stays eps-close to 1:
/// smallest p among p_candidates, then the largest delta in delta_grid, such
/// that max over probe_count random directions (scaled onto the sphere
/// ||a||_p = delta (1 - 1e-6)) of 1 - Re charfun(a) is <= eps_target.
/// Directions live on {0..order}^dim.
std::optional<ProbeResult> continuity_probe(const CharFunctional& charfun,
                                            std::span<const int> p_candidates,
                                            std::span<const double> delta_grid,
                                            double eps_target, int probe_count,
                                            const RandomStream& stream, int dim, int order);

/// The constant c for which a verified ball (p, delta) yields the hypothesis
/// 1 - Re L(a) <= eps + c ||a||_p^2: outside the ball use
/// 1 - Re L <= 2 <= (2/delta^2) ||a||_p^2.
double tail_hypothesis_constant(double delta);

}  // namespace grfkit::charfun
