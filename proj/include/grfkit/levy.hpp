#pragma once

#include <complex>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "grfkit/charfun.hpp"
#include "grfkit/fields.hpp"
#include "grfkit/truncated_seq.hpp"

namespace grfkit::levy {

/// Finite stand-in for "all test functions": the probes at which empirical
/// characteristic functionals are compared.
struct TestFunctionBank {
  std::vector<TruncatedSeq> points;
  std::vector<std::string> labels;
};

/// Default bank: every basis mode of {0..2}^dim (clipped to the cube),
/// `dense_count` random dense vectors with (1+n)^(-2) envelope decay, and 0.
TestFunctionBank default_bank(int dim, int order, const RandomStream& stream,
                              int dense_count = 3);

struct KsResult {
  double statistic = 0.0;  // D_N = sup |empirical CDF - reference CDF|
  double critical = 0.0;   // K_alpha / sqrt(N), asymptotic Kolmogorov law
  bool pass = false;
  std::size_t sample_count = 0;
};

/// Solve 2 sum_{k>=1} (-1)^(k-1) exp(-2 k^2 x^2) = alpha for the asymptotic
/// critical point K_alpha (e.g. K_0.01 ~ 1.628, K_0.05 ~ 1.358).
double kolmogorov_critical(double alpha);

/// One-sample Kolmogorov-Smirnov test at level alpha; asymptotic critical
/// value, so N >= 100 is required.
KsResult ks_pairing_test(std::span<const double> samples,
                         const std::function<double(double)>& reference_cdf, double alpha);

struct TightnessRow {
  double kappa = 0.0;
  double fraction = 0.0;   // share of samples with ||b||_{-p-1} <= kappa
  double std_error = 0.0;  // binomial
};

/// Concentration on dual-norm balls {||b||_{-p-1} <= kappa}: the computable
/// face of tightness.
std::vector<TightnessRow> tightness_probe(std::span<const TruncatedSeq> samples, int p,
                                          std::span<const double> kappa_grid,
                                          int threads = 1);

/// Q(b) = sum_{k>=k0} <b, directions[k]>^2 over the stored directions.
double q_functional(const TruncatedSeq& b, std::span<const TruncatedSeq> directions,
                    std::size_t k0);

/// U(b) = exp(-Q(b)); positive-definite with U(0) = 1 and values in (0, 1].
double u_functional(const TruncatedSeq& b, std::span<const TruncatedSeq> directions,
                    std::size_t k0);

/// sup over x >= 0 of (1 - cos x) / (1 - exp(-x^2)); the constant that
/// converts charfun deficits into U deficits.  Attained near x ~ 3.14094.
double bridging_constant();

/// Default direction family a_k = 2^(-k) e_(k mod cube size): summable fast
/// enough that the dropped tail of Q is controlled by default_q_tail_bound.
std::vector<TruncatedSeq> default_q_directions(int dim, int order, std::size_t count);

/// Geometric bound on the Q tail dropped by truncating the default
/// directions at `count`: sum_{k>=count} 4^-k max_n b_n^2 = 4^-count (4/3) max b^2.
double default_q_tail_bound(const TruncatedSeq& b, std::size_t count);

struct GapRow {
  std::size_t step = 0;       // position in the estimate sequence
  std::string label;          // bank point
  double gap = 0.0;           // |estimate - limit|
  double std_error = 0.0;
  double allowance = 0.0;     // declared deterministic truncation gap
};

struct PointVerdict {
  std::string label;
  bool final_gap_ok = false;  // last gap <= 3 stderr + allowance
  bool monotone_ok = false;   // gaps non-increasing up to 2 stderr noise
};

struct GapTable {
  std::vector<GapRow> rows;
  std::vector<PointVerdict> verdicts;
  bool consistent = false;  // all points pass both checks
};

/// Compare a sequence of empirical estimates (shared bank) against a limit
/// functional.  allowances, when given, declare per-point deterministic
/// gaps (e.g. from truncation) that do not count against convergence; one
/// value per bank point, applied at the final step.
GapTable pointwise_convergence_test(std::span<const charfun::CharFunEstimate> estimates,
                                    const charfun::CharFunctional& limit,
                                    std::span<const double> allowances = {});

struct KsCell {
  std::size_t step = 0;
  std::string label;
  KsResult result;
  bool degenerate = false;  // limit variance 0 at this point: no test
};

struct TightCell {
  std::size_t step = 0;
  TightnessRow row;
};

struct SelfCell {
  std::string label;
  double last_diff = 0.0;   // |estimate_last - estimate_prev|
  double threshold = 0.0;   // 3 (se_last + se_prev) + allowance drift
  bool within = false;
};

struct EquivalenceOptions {
  int p = 0;                          // tightness ball family exponent
  std::vector<double> kappa_grid = {1.0, 2.0, 5.0};
  double alpha = 0.01;                // KS level
  double tight_threshold = 0.9;       // minimum acceptable ball mass
  int threads = 1;
  /// "auto": allowances from the exact Gaussian charfun gap between the
  /// last sequence element and the limit.  "none": zeros.
  std::string truncation_allowance = "auto";
};

struct ConvergenceReport {
  std::vector<std::string> labels;
  GapTable gaps;
  std::vector<KsCell> ks_cells;
  std::vector<TightCell> tight_cells;
  std::vector<SelfCell> self_cells;
  bool charfun_converged = false;    // gaps.consistent
  bool pairing_converged = false;    // all final-step KS tests pass
  bool tightness_pass = false;       // min fraction at largest kappa >= threshold
  bool self_convergent = false;      // last two estimates agree within noise
  bool hypothesis_violated = false;  // self-consistent limit, but mass escapes
  std::vector<std::string> flags;
  std::size_t sample_count = 0;
};

/// Side-by-side convergence diagnostics for a sequence of Gaussian specs
/// against a declared limit: pointwise charfun gaps, per-pairing KS tests,
/// and ball-mass tightness.  When the sequence stabilizes pointwise but the
/// mass keeps escaping every ball, the limit functional cannot be continuous
/// at 0 and the report says so explicitly.
ConvergenceReport equivalence_experiment(std::span<const fields::FieldSpec> sequence,
                                         const fields::FieldSpec& limit,
                                         const TestFunctionBank& bank, int sample_count,
                                         const RandomStream& stream,
                                         const EquivalenceOptions& options = {});

}  // namespace grfkit::levy
