#include "grfkit/fields.hpp"

#include <cmath>
#include <stdexcept>

#include "grfkit/detail/util.hpp"
#include "grfkit/seqspace.hpp"

namespace grfkit::fields {

FieldSpec::FieldSpec(int dim, int order, VarianceProfile profile)
    : dim_(dim), order_(order), profile_(std::move(profile)) {
  if (order < 0) throw std::invalid_argument("FieldSpec: order must be >= 0");
  const std::size_t size = cube_size(dim, order);
  sigmas_.resize(size);
  if (std::holds_alternative<WhiteProfile>(profile_)) {
    for (auto& s : sigmas_) s = 1.0;
  } else if (const auto* pd = std::get_if<PowerDecayProfile>(&profile_)) {
    if (pd->q < 0) throw std::invalid_argument("FieldSpec: power_decay q must be >= 0");
    if (pd->q > seq::kMaxNormExponent)
      throw CapacityError("FieldSpec: power_decay q > 16");
    MultiIndex n = MultiIndex::zero(dim);
    std::size_t flat = 0;
    do {
      // sigma_n = (1+n)^-q, so variance is (1+n)^(-2q)
      sigmas_[flat++] = std::exp(-static_cast<double>(pd->q) * n.log_weight());
    } while (n.next_in_cube(order));
  } else {
    const auto& table = std::get<TableProfile>(profile_).variances;
    if (table.size() != size)
      throw std::invalid_argument("FieldSpec: table length must equal (order+1)^dim");
    for (std::size_t i = 0; i < size; ++i) {
      if (!(table[i] >= 0.0) || !std::isfinite(table[i]))
        throw std::invalid_argument("FieldSpec: variances must be finite and >= 0");
      sigmas_[i] = std::sqrt(table[i]);
    }
  }
}

FieldSpec FieldSpec::scaled(double factor) const {
  if (!std::isfinite(factor) || factor < 0.0)
    throw std::invalid_argument("FieldSpec::scaled: factor must be finite and >= 0");
  std::vector<double> variances(sigmas_.size());
  for (std::size_t i = 0; i < sigmas_.size(); ++i)
    variances[i] = factor * factor * sigmas_[i] * sigmas_[i];
  return FieldSpec(dim_, order_, TableProfile{std::move(variances)});
}

TruncatedSeq sample_field(const FieldSpec& spec, const RandomStream& stream) {
  const CounterRng rng(stream);
  TruncatedSeq out(spec.dim(), spec.order());
  for (std::size_t flat = 0; flat < spec.size(); ++flat) {
    const double s = spec.sigma(flat);
    // 0 * normal would be fine, but skip the quantile for exact zeros so
    // degenerate modes cost nothing.
    out[flat] = s == 0.0 ? 0.0 : s * rng.normal(flat);
  }
  return out;
}

TruncatedSeq sample_field_icdf(int dim, int order, const InverseCdf& icdf,
                               const RandomStream& stream) {
  if (!icdf) throw std::invalid_argument("sample_field_icdf: missing inverse CDF");
  const CounterRng rng(stream);
  TruncatedSeq out(dim, order);
  MultiIndex n = MultiIndex::zero(dim);
  std::size_t flat = 0;
  do {
    const double v = icdf(n, rng.uniform01(flat));
    if (!std::isfinite(v))
      throw std::invalid_argument("sample_field_icdf: inverse CDF returned non-finite value");
    out[flat++] = v;
  } while (n.next_in_cube(order));
  return out;
}

std::vector<TruncatedSeq> sample_batch(const FieldSpec& spec, const RandomStream& stream,
                                       int count, int threads) {
  if (count < 0) throw std::invalid_argument("sample_batch: count must be >= 0");
  std::vector<TruncatedSeq> out(static_cast<std::size_t>(count),
                                TruncatedSeq(spec.dim(), spec.order()));
  detail::parallel_for(static_cast<std::size_t>(count), threads,
                       [&](std::size_t begin, std::size_t end) {
                         for (std::size_t j = begin; j < end; ++j)
                           out[j] = sample_field(
                               spec, {stream.seed, stream.stream_id + j});
                       });
  return out;
}

double field_pairing(const TruncatedSeq& b, const TruncatedSeq& a) {
  return seq::pairing(b, a);
}

std::complex<double> gaussian_charfun_exact(const FieldSpec& spec, const TruncatedSeq& a) {
  if (spec.dim() != a.dim())
    throw std::invalid_argument("gaussian_charfun_exact: dim mismatch");
  double s = 0.0;
  if (spec.order() == a.order()) {
    for (std::size_t i = 0; i < spec.size(); ++i) s += spec.variance(i) * a[i] * a[i];
  } else {
    // Modes outside either cube contribute nothing (zero variance or zero
    // coefficient), so only the shared cube matters.
    const int shared = std::min(spec.order(), a.order());
    MultiIndex n = MultiIndex::zero(spec.dim());
    do {
      const double an = a[n.to_flat(a.order())];
      s += spec.variance(n.to_flat(spec.order())) * an * an;
    } while (n.next_in_cube(shared));
  }
  return {std::exp(-0.5 * s), 0.0};
}

}  // namespace grfkit::fields
