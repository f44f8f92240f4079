#include "grfkit/charfun.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

#include "grfkit/detail/util.hpp"
#include "grfkit/seqspace.hpp"

namespace grfkit::charfun {

CharFunEstimate empirical_charfun(std::span<const TruncatedSeq> samples,
                                  std::span<const TruncatedSeq> bank, int threads) {
  if (samples.empty()) throw std::invalid_argument("empirical_charfun: no samples");
  const std::size_t n = samples.size();
  const double dn = static_cast<double>(n);
  for (const auto& a : bank)
    if (a.dim() != samples[0].dim())
      throw std::invalid_argument("empirical_charfun: bank/sample dim mismatch");
  for (const auto& b : samples)
    if (b.dim() != samples[0].dim() || b.order() != samples[0].order())
      throw std::invalid_argument("empirical_charfun: inconsistent sample shapes");

  CharFunEstimate est;
  est.bank.assign(bank.begin(), bank.end());
  est.sample_count = n;
  est.values.reserve(bank.size());
  est.std_errors.reserve(bank.size());

  std::vector<double> cosv(n), sinv(n);
  for (const auto& a : bank) {
    detail::parallel_for(n, threads, [&](std::size_t begin, std::size_t end) {
      for (std::size_t j = begin; j < end; ++j) {
        const double x = seq::pairing(samples[j], a);
        cosv[j] = std::cos(x);
        sinv[j] = std::sin(x);
      }
    });
    const double re = detail::pairwise_sum(cosv) / dn;
    const double im = detail::pairwise_sum(sinv) / dn;
    // Population variances of the components collapse to 1 - |value|^2
    // (cos^2 + sin^2 = 1), so the standard error is bounded by 1/sqrt(N).
    const double mod2 = re * re + im * im;
    if (mod2 > 1.0 + 1e-12)
      throw std::logic_error("empirical_charfun: estimate escaped the unit disk");
    est.values.emplace_back(re, im);
    est.std_errors.push_back(std::sqrt(std::max(0.0, 1.0 - mod2) / dn));
  }
  return est;
}

CharFunctional make_empirical_charfun(std::vector<TruncatedSeq> samples, int threads) {
  if (samples.empty()) throw std::invalid_argument("make_empirical_charfun: no samples");
  auto shared = std::make_shared<const std::vector<TruncatedSeq>>(std::move(samples));
  return [shared, threads](const TruncatedSeq& a) {
    const auto est = empirical_charfun(*shared, std::span<const TruncatedSeq>(&a, 1), threads);
    return est.values[0];
  };
}

GramCheck gram_psd_check(const CharFunctional& charfun,
                         std::span<const TruncatedSeq> points, double tol) {
  if (!charfun) throw std::invalid_argument("gram_psd_check: missing functional");
  if (points.empty()) throw std::invalid_argument("gram_psd_check: no points");
  if (points.size() > 64) throw CapacityError("gram_psd_check: more than 64 points");
  if (!(tol >= 0.0)) throw std::invalid_argument("gram_psd_check: tol must be >= 0");
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j)
      if (points[i] == points[j])
        throw std::invalid_argument("gram_psd_check: points " + std::to_string(i) +
                                    " and " + std::to_string(j) + " coincide");

  const int n = static_cast<int>(points.size());
  Eigen::MatrixXcd g(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const std::complex<double> v = charfun(
          subtract(points[static_cast<std::size_t>(i)], points[static_cast<std::size_t>(j)]));
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw std::runtime_error("gram_psd_check: non-finite value at point pair (" +
                                 std::to_string(i) + ", " + std::to_string(j) + ")");
      g(i, j) = v;
    }
  }
  const Eigen::MatrixXcd herm = 0.5 * (g + g.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(herm, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("gram_psd_check: eigenvalue iteration failed");

  GramCheck out;
  out.min_eigenvalue = solver.eigenvalues()(0);
  out.max_eigenvalue = solver.eigenvalues()(n - 1);
  out.pass = out.min_eigenvalue >= -tol * std::max(1.0, out.max_eigenvalue);
  return out;
}

fields::FieldSpec nu_gaussian_spec(int order, double sigma, int q, int dim) {
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw std::invalid_argument("nu_gaussian_spec: sigma must be positive and finite");
  return fields::FieldSpec::power_decay(dim, order, q).scaled(sigma);
}

TruncatedSeq nu_gaussian_sample(int order, double sigma, int q, const RandomStream& stream,
                                int dim) {
  return fields::sample_field(nu_gaussian_spec(order, sigma, q, dim), stream);
}

MinlosReport minlos_tail_check(std::span<const TruncatedSeq> samples, int p, int q,
                               std::span<const double> sigma_grid, double eps, double c,
                               int threads) {
  if (samples.empty()) throw std::invalid_argument("minlos_tail_check: no samples");
  if (q <= p)
    throw std::invalid_argument(
        "minlos_tail_check: requires q > p, otherwise zeta(2(q-p)) diverges");
  if (q > seq::kMaxNormExponent)
    throw CapacityError("minlos_tail_check: q > 16");
  if (!(eps >= 0.0) || !(c >= 0.0))
    throw std::invalid_argument("minlos_tail_check: eps and c must be >= 0");
  const int dim = samples[0].dim();
  const std::size_t n = samples.size();

  // ||b_j||_{-q}^2 once per sample; every sigma row reuses them.
  std::vector<double> norm2(n);
  detail::parallel_for(n, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t j = begin; j < end; ++j) {
      const double v = seq::norm_p(samples[j], -q);
      norm2[j] = v * v;
    }
  });

  MinlosReport report;
  report.p = p;
  report.q = q;
  report.dim = dim;
  report.eps = eps;
  report.c = c;
  report.zeta_value = seq::zeta_const(2 * (q - p));
  report.sample_count = n;
  report.hypothesis_note =
      "hypothesis (eps, c, p) supplied by caller from sampled evidence, not proof";

  const double rhs_base = c * std::pow(report.zeta_value, static_cast<double>(dim));
  std::vector<double> vals(n);
  report.all_pass = true;
  for (const double sigma : sigma_grid) {
    if (!(sigma > 0.0) || !std::isfinite(sigma))
      throw std::invalid_argument("minlos_tail_check: sigma values must be positive");
    detail::parallel_for(n, threads, [&](std::size_t begin, std::size_t end) {
      for (std::size_t j = begin; j < end; ++j)
        vals[j] = -std::expm1(-0.5 * sigma * sigma * norm2[j]);
    });
    MinlosRow row;
    row.sigma = sigma;
    row.lhs = detail::mean(vals);
    row.lhs_stderr =
        n >= 2 ? std::sqrt(detail::sample_variance(vals) / static_cast<double>(n)) : 0.0;
    row.rhs = eps + rhs_base * sigma * sigma;
    row.pass = !(row.lhs - 3.0 * row.lhs_stderr > row.rhs);
    report.all_pass = report.all_pass && row.pass;
    report.rows.push_back(row);
  }
  return report;
}

std::optional<ProbeResult> continuity_probe(const CharFunctional& charfun,
                                            std::span<const int> p_candidates,
                                            std::span<const double> delta_grid,
                                            double eps_target, int probe_count,
                                            const RandomStream& stream, int dim, int order) {
  if (!charfun) throw std::invalid_argument("continuity_probe: missing functional");
  if (probe_count < 1)
    throw std::invalid_argument("continuity_probe: probe_count must be >= 1");
  if (p_candidates.empty() || delta_grid.empty())
    throw std::invalid_argument("continuity_probe: empty candidate grid");
  for (double d : delta_grid)
    if (!(d > 0.0) || !std::isfinite(d))
      throw std::invalid_argument("continuity_probe: deltas must be positive");

  // Fixed Gaussian probe directions, reused across all (p, delta) cells so
  // the search is monotone in delta for each p.
  const std::size_t size = cube_size(dim, order);
  const CounterRng rng(stream);
  std::vector<TruncatedSeq> directions;
  directions.reserve(static_cast<std::size_t>(probe_count));
  for (int i = 0; i < probe_count; ++i) {
    TruncatedSeq u(dim, order);
    for (std::size_t f = 0; f < size; ++f)
      u[f] = rng.normal(static_cast<std::uint64_t>(i) * size + f);
    directions.push_back(std::move(u));
  }

  std::vector<int> ps(p_candidates.begin(), p_candidates.end());
  std::sort(ps.begin(), ps.end());
  std::vector<double> deltas(delta_grid.begin(), delta_grid.end());
  std::sort(deltas.begin(), deltas.end(), std::greater<>());

  for (const int p : ps) {
    for (const double delta : deltas) {
      double worst = 0.0;
      bool ok = true;
      for (const auto& u : directions) {
        const double np = seq::norm_p(u, p);
        if (np == 0.0) continue;
        // Just inside the sphere, matching the open-ball statement.
        const TruncatedSeq a = scale(u, delta * (1.0 - 1e-6) / np);
        const double deficit = 1.0 - charfun(a).real();
        worst = std::max(worst, deficit);
        if (deficit > eps_target) {
          ok = false;
          break;
        }
      }
      if (ok) {
        ProbeResult r;
        r.p = p;
        r.delta = delta;
        r.worst_deficit = worst;
        r.sampled_only = true;
        return r;
      }
    }
  }
  return std::nullopt;
}

double tail_hypothesis_constant(double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta))
    throw std::invalid_argument("tail_hypothesis_constant: delta must be positive");
  // |L| <= 1 gives 1 - Re L <= 2; for ||a||_p >= delta that is at most
  // (2/delta^2) ||a||_p^2, which joins the in-ball bound eps.
  return 2.0 / (delta * delta);
}

}  // namespace grfkit::charfun
