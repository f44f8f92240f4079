#pragma once

#include <optional>

#include "grfkit/truncated_seq.hpp"

namespace grfkit::seq {

/// Largest admissible norm exponent |p|; beyond this the polynomial weights
/// (1+n)^(2p) are no longer trustworthy in double at desk-scale orders.
inline constexpr int kMaxNormExponent = 16;

/// Euclidean pairing <b, a> = sum_n b_n a_n over the shared cube, summed in
/// lexicographic order.
double pairing(const TruncatedSeq& b, const TruncatedSeq& a);

/// Weighted l2 norm: ||a||_p = sqrt(sum_n (1+n)^(2p) a_n^2), where
/// (1+n)^q = prod_i (1+n_i)^q.  p may be negative; |p| <= kMaxNormExponent.
/// Computed in log space (max-factored), so extreme weights neither overflow
/// nor flush to zero.
double norm_p(const TruncatedSeq& a, int p);

/// Operator norm of a -> <b, a> over the unit ball of ||.||_p; equals
/// ||b||_{-p}.  Requires 0 <= p <= kMaxNormExponent.
double dual_norm(const TruncatedSeq& b, int p);

/// The unit-||.||_p-ball element attaining dual_norm(b, p):
/// a_n = (1+n)^(-2p) b_n / ||b||_{-p}.  Empty when b = 0.
std::optional<TruncatedSeq> dual_maximizer(const TruncatedSeq& b, int p);

/// zeta(s) for integer s >= 2: partial sum to 10^6 terms (summed smallest
/// first, compensated) plus the integral tail N^(1-s)/(s-1); absolute error
/// below 1e-12.
double zeta_const(int s);

/// Polynomial growth envelope |b_n| <= c (1+n)^p with c >= 0, p >= 0.
struct GrowthEnvelope {
  int p = 0;
  double c = 0.0;
};

struct EnvelopeCheck {
  bool holds = false;
  /// The check only sees the stored cube; the envelope may fail beyond it.
  bool prefix_only = true;
};

/// Verify |b_n| <= c (1+n)^p on the cube of b.
EnvelopeCheck check_envelope(const TruncatedSeq& b, const GrowthEnvelope& env);

/// Norm bound implied by an envelope: any b within it (at every order, not
/// just a stored prefix) satisfies ||b||_{-p-1} <= c * zeta(2)^(dim/2).
double envelope_norm_bound(const GrowthEnvelope& env, int dim);

}  // namespace grfkit::seq
