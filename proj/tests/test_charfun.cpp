#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "grfkit/charfun.hpp"
#include "grfkit/errors.hpp"
#include "grfkit/seqspace.hpp"
#include "oracles.hpp"

using grfkit::CapacityError;
using grfkit::MultiIndex;
using grfkit::RandomStream;
using grfkit::TruncatedSeq;
namespace charfun = grfkit::charfun;
namespace fields = grfkit::fields;
namespace seq = grfkit::seq;

TEST_SUITE("charfun") {

TEST_CASE("the empirical estimate is the average phase factor") {
  const std::vector<TruncatedSeq> samples = {TruncatedSeq(1, 1, {1.0, 0.0}),
                                             TruncatedSeq(1, 1, {0.0, 1.0}),
                                             TruncatedSeq(1, 1, {-1.0, 2.0})};
  const std::vector<TruncatedSeq> bank = {
      TruncatedSeq::unit(1, 1, MultiIndex({0})),
      TruncatedSeq::unit(1, 1, MultiIndex({1})),
      TruncatedSeq(1, 1, {0.5, -0.3})};
  const auto est = charfun::empirical_charfun(samples, bank);
  REQUIRE(est.values.size() == 3);
  REQUIRE(est.std_errors.size() == 3);
  CHECK(est.sample_count == 3);

  for (std::size_t k = 0; k < bank.size(); ++k) {
    std::complex<double> expect(0.0, 0.0);
    for (const auto& s : samples) {
      const double t = seq::pairing(s, bank[k]);
      expect += std::complex<double>(std::cos(t), std::sin(t));
    }
    expect /= 3.0;
    CHECK(std::abs(est.values[k] - expect) < 1e-15);
    const double se = std::sqrt(std::max(0.0, 1.0 - std::norm(expect)) / 3.0);
    CHECK(est.std_errors[k] == doctest::Approx(se).epsilon(1e-12));
  }
}

TEST_CASE("estimates stay inside the unit disc with stderr below 1/sqrt(n)") {
  const auto spec = fields::FieldSpec::white(1, 5);
  const auto batch = fields::sample_batch(spec, {17, 0}, 2000, 2);
  std::vector<TruncatedSeq> bank;
  for (int n = 0; n <= 5; ++n)
    bank.push_back(TruncatedSeq::unit(1, 5, MultiIndex({n})));
  const auto est = charfun::empirical_charfun(batch, bank);
  for (std::size_t k = 0; k < bank.size(); ++k) {
    CHECK(std::abs(est.values[k]) <= 1.0 + 1e-12);
    CHECK(est.std_errors[k] <= 1.0 / std::sqrt(2000.0) + 1e-15);
    CHECK(est.std_errors[k] >= 0.0);
  }
}

TEST_CASE("empirical estimation validates its inputs") {
  const std::vector<TruncatedSeq> empty;
  const std::vector<TruncatedSeq> bank = {TruncatedSeq(1, 1)};
  CHECK_THROWS_AS(charfun::empirical_charfun(empty, bank), std::invalid_argument);
  const std::vector<TruncatedSeq> samples = {TruncatedSeq(1, 1)};
  const std::vector<TruncatedSeq> bad_bank = {TruncatedSeq(2, 1)};
  CHECK_THROWS_AS(charfun::empirical_charfun(samples, bad_bank), std::invalid_argument);
}

TEST_CASE("estimation is thread-invariant and the closure form agrees") {
  const auto spec = fields::FieldSpec::power_decay(1, 6, 1);
  const auto batch = fields::sample_batch(spec, {55, 0}, 5000, 1);
  std::vector<TruncatedSeq> bank = {TruncatedSeq(1, 6, {0.5, 1, 0, -2, 0.25, 0, 1}),
                                    TruncatedSeq::unit(1, 6, MultiIndex({2}))};
  const auto est1 = charfun::empirical_charfun(batch, bank, 1);
  const auto est4 = charfun::empirical_charfun(batch, bank, 4);
  for (std::size_t k = 0; k < bank.size(); ++k) {
    CHECK(est1.values[k] == est4.values[k]);
    CHECK(est1.std_errors[k] == est4.std_errors[k]);
  }
  const auto fn = charfun::make_empirical_charfun(batch, 4);
  for (std::size_t k = 0; k < bank.size(); ++k)
    CHECK(fn(bank[k]) == est1.values[k]);
}

TEST_CASE("gram matrices of genuine characteristic functionals are psd") {
  const auto spec = fields::FieldSpec::power_decay(1, 5, 1);
  const auto exact = [&spec](const TruncatedSeq& a) {
    return fields::gaussian_charfun_exact(spec, a);
  };
  std::vector<TruncatedSeq> points;
  const grfkit::CounterRng rng({8, 8});
  for (int i = 0; i < 12; ++i) {
    TruncatedSeq p(1, 5);
    for (std::size_t f = 0; f < p.size(); ++f)
      p[f] = 2.0 * rng.normal(static_cast<std::uint64_t>(i) * p.size() + f);
    points.push_back(std::move(p));
  }
  const auto exact_check = charfun::gram_psd_check(exact, points, 1e-10);
  CHECK(exact_check.pass);
  CHECK(exact_check.max_eigenvalue > 0.0);

  const auto batch = fields::sample_batch(spec, {8, 1000}, 4000, 4);
  const auto empirical = charfun::make_empirical_charfun(batch, 4);
  CHECK(charfun::gram_psd_check(empirical, points, 1e-8).pass);
}

TEST_CASE("gram check flags a non positive-definite functional") {
  const charfun::CharFunctional bogus = [](const TruncatedSeq& a) {
    double s = 0.0;
    for (double v : a.values()) s += v * v;
    return std::complex<double>(s == 0.0 ? 1.0 : -0.5, 0.0);
  };
  std::vector<TruncatedSeq> points;
  for (int n = 0; n <= 3; ++n)
    points.push_back(TruncatedSeq::unit(1, 3, MultiIndex({n})));
  const auto check = charfun::gram_psd_check(bogus, points, 1e-8);
  CHECK_FALSE(check.pass);
  CHECK(check.min_eigenvalue < -1e-8);
}

TEST_CASE("gram check rejects malformed inputs") {
  const charfun::CharFunctional one = [](const TruncatedSeq&) {
    return std::complex<double>(1.0, 0.0);
  };
  std::vector<TruncatedSeq> dup = {TruncatedSeq(1, 1, {1.0, 0.0}),
                                   TruncatedSeq(1, 1, {1.0, 0.0})};
  CHECK_THROWS_AS(charfun::gram_psd_check(one, dup, 1e-8), std::invalid_argument);

  std::vector<TruncatedSeq> many;
  for (int i = 0; i < 65; ++i) {
    TruncatedSeq p(1, 64);
    p[static_cast<std::size_t>(i)] = 1.0;
    many.push_back(std::move(p));
  }
  CHECK_THROWS_AS(charfun::gram_psd_check(one, many, 1e-8), CapacityError);

  std::vector<TruncatedSeq> two = {TruncatedSeq(1, 1, {1.0, 0.0}),
                                   TruncatedSeq(1, 1, {0.0, 1.0})};
  CHECK_THROWS_AS(charfun::gram_psd_check(one, two, -1.0), std::invalid_argument);
  const charfun::CharFunctional broken = [](const TruncatedSeq& a) {
    return std::complex<double>(a.values()[0] == 0.0 ? 1.0 : std::nan(""), 0.0);
  };
  CHECK_THROWS_AS(charfun::gram_psd_check(broken, two, 1e-8), std::runtime_error);
}

TEST_CASE("the reference gaussian family has the advertised variances") {
  const auto spec = charfun::nu_gaussian_spec(3, 0.7, 2);
  CHECK(spec.dim() == 1);
  CHECK(spec.order() == 3);
  CHECK(spec.variance(0) == doctest::Approx(0.49).epsilon(1e-14));
  CHECK(spec.variance(3) == doctest::Approx(0.49 / 256.0).epsilon(1e-13));
  const auto draw = charfun::nu_gaussian_sample(3, 0.7, 2, {21, 4});
  CHECK(draw == fields::sample_field(spec, {21, 4}));
  CHECK_THROWS_AS(charfun::nu_gaussian_spec(3, -1.0, 2), std::invalid_argument);
}

TEST_CASE("the tail-bound check passes a white field against its oracle") {
  const auto spec = fields::FieldSpec::white(1, 16);
  const auto batch = fields::sample_batch(spec, {314, 0}, 4000, 4);
  const std::vector<double> sigmas = {0.5, 1.0};
  const auto report = charfun::minlos_tail_check(batch, 0, 1, sigmas, 0.0, 0.5, 4);
  REQUIRE(report.rows.size() == 2);
  CHECK(report.all_pass);
  CHECK(report.zeta_value == doctest::Approx(seq::zeta_const(2)).epsilon(1e-14));
  CHECK_FALSE(report.hypothesis_note.empty());
  for (std::size_t r = 0; r < sigmas.size(); ++r) {
    const auto& row = report.rows[r];
    CHECK(row.pass);
    CHECK(row.rhs == doctest::Approx(0.5 * sigmas[r] * sigmas[r] *
                                     seq::zeta_const(2)).epsilon(1e-13));
    // Monte-Carlo value against the closed-form truncated product.
    const double exact = oracles::minlos_truncated_lhs(16, sigmas[r], 1);
    CHECK(std::fabs(row.lhs - exact) < 4.0 * row.lhs_stderr);
    CHECK(row.lhs_stderr > 0.0);
  }

  // The same data violates an absurdly small constant, and says so.
  const auto broken = charfun::minlos_tail_check(batch, 0, 1, sigmas, 0.0, 1e-9, 4);
  CHECK_FALSE(broken.all_pass);
  CHECK_FALSE(broken.rows[1].pass);
}

TEST_CASE("tail-bound preconditions") {
  const auto batch = fields::sample_batch(fields::FieldSpec::white(1, 3), {1, 0}, 10, 1);
  const std::vector<double> sigmas = {1.0};
  bool threw = false;
  try {
    charfun::minlos_tail_check(batch, 1, 1, sigmas, 0.0, 0.5);
  } catch (const std::invalid_argument& e) {
    threw = true;
    CHECK(std::string(e.what()).find("diverges") != std::string::npos);
  }
  CHECK(threw);
  CHECK_THROWS_AS(charfun::minlos_tail_check(batch, 0, 17, sigmas, 0.0, 0.5),
                  CapacityError);
  const std::vector<double> bad = {-1.0};
  CHECK_THROWS_AS(charfun::minlos_tail_check(batch, 0, 1, bad, 0.0, 0.5),
                  std::invalid_argument);
}

TEST_CASE("tail-bound estimates are thread-invariant") {
  const auto batch = fields::sample_batch(fields::FieldSpec::white(1, 8), {27, 0}, 3000, 2);
  const std::vector<double> sigmas = {0.25, 1.0};
  const auto r1 = charfun::minlos_tail_check(batch, 0, 1, sigmas, 0.0, 0.5, 1);
  const auto r4 = charfun::minlos_tail_check(batch, 0, 1, sigmas, 0.0, 0.5, 4);
  for (std::size_t i = 0; i < r1.rows.size(); ++i) {
    CHECK(r1.rows[i].lhs == r4.rows[i].lhs);
    CHECK(r1.rows[i].lhs_stderr == r4.rows[i].lhs_stderr);
  }
}

TEST_CASE("the continuity probe finds the weakest admissible ball") {
  const auto spec = fields::FieldSpec::white(1, 8);
  const charfun::CharFunctional exact = [&spec](const TruncatedSeq& a) {
    return fields::gaussian_charfun_exact(spec, a);
  };
  const std::vector<int> ps = {0, 1, 2};
  const std::vector<double> deltas = {1.0, 0.5, 0.1};
  const auto found =
      charfun::continuity_probe(exact, ps, deltas, 0.2, 16, {60, 1}, 1, 8);
  REQUIRE(found.has_value());
  // For p=0 the white deficit depends only on the radius: delta=1 gives
  // 1-e^{-1/2} ~ 0.39 > 0.2, delta=0.5 gives ~0.118 <= 0.2.
  CHECK(found->p == 0);
  CHECK(found->delta == 0.5);
  const double shrunk = 0.5 * (1.0 - 1e-6);
  CHECK(found->worst_deficit ==
        doctest::Approx(1.0 - std::exp(-0.5 * shrunk * shrunk)).epsilon(1e-9));
  CHECK(found->sampled_only);

  const auto nothing =
      charfun::continuity_probe(exact, ps, deltas, 1e-9, 16, {60, 1}, 1, 8);
  CHECK_FALSE(nothing.has_value());

  const auto again =
      charfun::continuity_probe(exact, ps, deltas, 0.2, 16, {60, 1}, 1, 8);
  CHECK(again->worst_deficit == found->worst_deficit);  // deterministic

  CHECK(charfun::tail_hypothesis_constant(0.5) == 8.0);
  CHECK_THROWS_AS(charfun::tail_hypothesis_constant(0.0), std::invalid_argument);
}

}  // TEST_SUITE
