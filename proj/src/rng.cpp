#include "grfkit/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace grfkit::rng {

namespace {

struct HiLo {
  std::uint64_t hi, lo;
};

inline HiLo mulhilo(std::uint64_t a, std::uint64_t b) {
  const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
  return {static_cast<std::uint64_t>(p >> 64), static_cast<std::uint64_t>(p)};
}

constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ULL;
constexpr std::uint64_t kMul1 = 0xCA5A826395121157ULL;
constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;  // golden-ratio increment
constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;  // sqrt(3)-1 increment

}  // namespace

std::array<std::uint64_t, 4> philox4x64(std::array<std::uint64_t, 4> counter,
                                        std::array<std::uint64_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    const HiLo p0 = mulhilo(kMul0, counter[0]);
    const HiLo p1 = mulhilo(kMul1, counter[2]);
    counter = {p1.hi ^ counter[1] ^ key[0], p1.lo, p0.hi ^ counter[3] ^ key[1], p0.lo};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return counter;
}

namespace {

// Rational approximation of the normal quantile (relative error ~1e-9),
// refined below to near machine precision.
double icdf_estimate(double u) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  if (u < p_low) {
    const double q = std::sqrt(-2.0 * std::log(u));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = u - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

constexpr double kInvSqrt2Pi = 0.3989422804014326779;
constexpr double kInvSqrt2 = 0.7071067811865475244;

// Quantile restricted to (0, 0.5]; the low tail keeps erfc cancellation-free.
double icdf_half(double u) {
  double x = icdf_estimate(u);
  // Halley refinement: e = Phi(x) - u, Phi via erfc (accurate for x <= 0).
  const double e = 0.5 * std::erfc(-x * kInvSqrt2) - u;
  const double pdf = kInvSqrt2Pi * std::exp(-0.5 * x * x);
  const double t = e / pdf;
  x -= t / (1.0 + 0.5 * x * t);
  return x;
}

}  // namespace

double normal_icdf(double u) {
  if (!(u > 0.0 && u < 1.0))
    throw std::invalid_argument("normal_icdf: argument must lie in (0,1)");
  // 1-u is exact for u in [0.5, 1), so the reflection costs no precision.
  if (u > 0.5) return -icdf_half(1.0 - u);
  return icdf_half(u);
}

}  // namespace grfkit::rng
