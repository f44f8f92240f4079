// pybind11 surface over the C++ core: sequences, Hermite transforms, norms,
// Gaussian fields, characteristic-functional diagnostics, convergence harness.
#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <complex>
#include <optional>
#include <vector>

#include "grfkit/charfun.hpp"
#include "grfkit/fields.hpp"
#include "grfkit/hermite.hpp"
#include "grfkit/levy.hpp"
#include "grfkit/rng.hpp"
#include "grfkit/seqspace.hpp"
#include "grfkit/truncated_seq.hpp"

namespace py = pybind11;
using grfkit::CounterRng;
using grfkit::MultiIndex;
using grfkit::RandomStream;
using grfkit::TruncatedSeq;
namespace charfun = grfkit::charfun;
namespace fields = grfkit::fields;
namespace hermite = grfkit::hermite;
namespace levy = grfkit::levy;
namespace seq = grfkit::seq;

namespace {

MultiIndex make_index(const std::vector<int>& components) {
  return MultiIndex(std::span<const int>(components.data(), components.size()));
}

std::vector<double> to_vector(std::span<const double> s) { return {s.begin(), s.end()}; }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Hermite-spectral toolkit for generalized random fields";

  py::register_exception<grfkit::CapacityError>(m, "CapacityError", PyExc_RuntimeError);
  py::register_exception<grfkit::AliasingError>(m, "AliasingError", PyExc_ValueError);

  py::class_<TruncatedSeq>(m, "TruncatedSeq")
      .def(py::init<int, int>(), py::arg("dim"), py::arg("order"))
      .def(py::init<int, int, std::vector<double>>(), py::arg("dim"), py::arg("order"),
           py::arg("values"))
      .def_static(
          "unit",
          [](int dim, int order, const std::vector<int>& n) {
            return TruncatedSeq::unit(dim, order, make_index(n));
          },
          py::arg("dim"), py::arg("order"), py::arg("n"))
      .def_property_readonly("dim", &TruncatedSeq::dim)
      .def_property_readonly("order", &TruncatedSeq::order)
      .def("__len__", &TruncatedSeq::size)
      .def("values", [](const TruncatedSeq& s) { return to_vector(s.values()); })
      .def(
          "at",
          [](const TruncatedSeq& s, const std::vector<int>& n) {
            return s.at(make_index(n));
          },
          py::arg("n"))
      .def("__getitem__",
           [](const TruncatedSeq& s, std::size_t flat) {
             if (flat >= s.size()) throw py::index_error();
             return s[flat];
           })
      .def("__setitem__",
           [](TruncatedSeq& s, std::size_t flat, double v) {
             if (flat >= s.size()) throw py::index_error();
             s[flat] = v;
           })
      .def("__eq__", [](const TruncatedSeq& a, const TruncatedSeq& b) { return a == b; })
      .def("__repr__", [](const TruncatedSeq& s) {
        return "TruncatedSeq(dim=" + std::to_string(s.dim()) +
               ", order=" + std::to_string(s.order()) + ")";
      });

  m.def("embed", &grfkit::embed, py::arg("a"), py::arg("order"));
  m.def("scale", &grfkit::scale, py::arg("a"), py::arg("factor"));
  m.def("add", &grfkit::add, py::arg("a"), py::arg("b"));
  m.def("subtract", &grfkit::subtract, py::arg("a"), py::arg("b"));

  // Hermite evaluation, quadrature, transforms.
  m.def("hermite_eval", &hermite::hermite_eval, py::arg("n"), py::arg("x"));
  m.def("hermite_eval_scaled", &hermite::hermite_eval_scaled, py::arg("n"), py::arg("x"));
  m.def("hermite_all", &hermite::hermite_all, py::arg("max_n"), py::arg("x"));
  m.def(
      "hermite_eval_multi",
      [](const std::vector<int>& n, const std::vector<double>& x) {
        return hermite::hermite_eval_multi(make_index(n), x);
      },
      py::arg("n"), py::arg("x"));

  py::class_<hermite::QuadratureRule>(m, "QuadratureRule")
      .def_property_readonly("order", &hermite::QuadratureRule::order)
      .def("nodes", [](const hermite::QuadratureRule& r) { return to_vector(r.nodes()); })
      .def("weights",
           [](const hermite::QuadratureRule& r) { return to_vector(r.weights()); })
      .def("log_weight", &hermite::QuadratureRule::log_weight, py::arg("k"))
      .def("total_weight", &hermite::QuadratureRule::total_weight, py::arg("k"))
      .def("half_weight", &hermite::QuadratureRule::half_weight, py::arg("k"));
  m.def("gauss_hermite_rule", &hermite::gauss_hermite_rule, py::arg("order"),
        py::arg("cap") = hermite::kDefaultOrderCap);

  // Callbacks run under the GIL, so the transform is forced single-threaded.
  m.def(
      "hermite_transform",
      [](const std::function<double(std::vector<double>)>& f, int dim, int order,
         int quadrature_order) {
        const auto rule = hermite::gauss_hermite_rule(quadrature_order);
        const auto wrapped = [&f](std::span<const double> x) {
          return f(std::vector<double>(x.begin(), x.end()));
        };
        return hermite::hermite_transform(wrapped, dim, order, rule, 1);
      },
      py::arg("f"), py::arg("dim"), py::arg("order"), py::arg("quadrature_order"));
  m.def(
      "hermite_reconstruct",
      [](const TruncatedSeq& a, const std::vector<double>& x) {
        return hermite::hermite_reconstruct(a, x);
      },
      py::arg("a"), py::arg("x"));
  m.def(
      "integrate",
      [](const std::function<double(std::vector<double>)>& g, int dim,
         int quadrature_order) {
        const auto rule = hermite::gauss_hermite_rule(quadrature_order);
        const auto wrapped = [&g](std::span<const double> x) {
          return g(std::vector<double>(x.begin(), x.end()));
        };
        return hermite::integrate(wrapped, dim, rule);
      },
      py::arg("g"), py::arg("dim"), py::arg("quadrature_order"));

  // Weighted norms and duality.
  m.def("pairing", &seq::pairing, py::arg("b"), py::arg("a"));
  m.def("norm_p", &seq::norm_p, py::arg("a"), py::arg("p"));
  m.def("dual_norm", &seq::dual_norm, py::arg("b"), py::arg("p"));
  m.def("dual_maximizer", &seq::dual_maximizer, py::arg("b"), py::arg("p"));
  m.def("zeta_const", &seq::zeta_const, py::arg("s"));
  m.def(
      "check_envelope",
      [](const TruncatedSeq& b, int p, double c) {
        const auto r = seq::check_envelope(b, seq::GrowthEnvelope{p, c});
        return py::make_tuple(r.holds, r.prefix_only);
      },
      py::arg("b"), py::arg("p"), py::arg("c"),
      "Returns (holds, prefix_only) for |b_n| <= c (1+n)^p on the stored cube.");
  m.def(
      "envelope_norm_bound",
      [](int p, double c, int dim) {
        return seq::envelope_norm_bound(seq::GrowthEnvelope{p, c}, dim);
      },
      py::arg("p"), py::arg("c"), py::arg("dim"));

  // Gaussian field specs and sampling.
  py::class_<fields::FieldSpec>(m, "FieldSpec")
      .def_static("white", &fields::FieldSpec::white, py::arg("dim"), py::arg("order"))
      .def_static("power_decay", &fields::FieldSpec::power_decay, py::arg("dim"),
                  py::arg("order"), py::arg("q"))
      .def_static("table", &fields::FieldSpec::table, py::arg("dim"), py::arg("order"),
                  py::arg("variances"))
      .def_property_readonly("dim", &fields::FieldSpec::dim)
      .def_property_readonly("order", &fields::FieldSpec::order)
      .def("__len__", &fields::FieldSpec::size)
      .def("variance", &fields::FieldSpec::variance, py::arg("flat"))
      .def("sigmas", [](const fields::FieldSpec& s) { return to_vector(s.sigmas()); })
      .def("scaled", &fields::FieldSpec::scaled, py::arg("factor"));

  m.def(
      "sample_field",
      [](const fields::FieldSpec& spec, std::uint64_t seed, std::uint64_t stream_id) {
        return fields::sample_field(spec, RandomStream{seed, stream_id});
      },
      py::arg("spec"), py::arg("seed"), py::arg("stream_id") = 0);
  m.def(
      "sample_batch",
      [](const fields::FieldSpec& spec, std::uint64_t seed, std::uint64_t stream_id,
         int count, int threads) {
        return fields::sample_batch(spec, RandomStream{seed, stream_id}, count, threads);
      },
      py::arg("spec"), py::arg("seed"), py::arg("stream_id"), py::arg("count"),
      py::arg("threads") = 1);
  m.def("field_pairing", &fields::field_pairing, py::arg("b"), py::arg("a"));
  m.def("gaussian_charfun_exact", &fields::gaussian_charfun_exact, py::arg("spec"),
        py::arg("a"));

  // Empirical characteristic functionals and their diagnostics.
  py::class_<charfun::CharFunEstimate>(m, "CharFunEstimate")
      .def_readonly("bank", &charfun::CharFunEstimate::bank)
      .def_readonly("values", &charfun::CharFunEstimate::values)
      .def_readonly("std_errors", &charfun::CharFunEstimate::std_errors)
      .def_readonly("sample_count", &charfun::CharFunEstimate::sample_count);
  m.def(
      "empirical_charfun",
      [](const std::vector<TruncatedSeq>& samples, const std::vector<TruncatedSeq>& bank,
         int threads) { return charfun::empirical_charfun(samples, bank, threads); },
      py::arg("samples"), py::arg("bank"), py::arg("threads") = 1);

  py::class_<charfun::GramCheck>(m, "GramCheck")
      .def_readonly("pass_", &charfun::GramCheck::pass)
      .def_readonly("min_eigenvalue", &charfun::GramCheck::min_eigenvalue)
      .def_readonly("max_eigenvalue", &charfun::GramCheck::max_eigenvalue);
  m.def(
      "gram_psd_check_empirical",
      [](std::vector<TruncatedSeq> samples, const std::vector<TruncatedSeq>& points,
         double tol, int threads) {
        return charfun::gram_psd_check(
            charfun::make_empirical_charfun(std::move(samples), threads), points, tol);
      },
      py::arg("samples"), py::arg("points"), py::arg("tol") = 1e-8,
      py::arg("threads") = 1);
  m.def(
      "gram_psd_check_exact",
      [](const fields::FieldSpec& spec, const std::vector<TruncatedSeq>& points,
         double tol) {
        const auto exact = [&spec](const TruncatedSeq& a) {
          return fields::gaussian_charfun_exact(spec, a);
        };
        return charfun::gram_psd_check(exact, points, tol);
      },
      py::arg("spec"), py::arg("points"), py::arg("tol") = 1e-10);

  m.def("nu_gaussian_spec", &charfun::nu_gaussian_spec, py::arg("order"), py::arg("sigma"),
        py::arg("q"), py::arg("dim") = 1);
  m.def(
      "nu_gaussian_sample",
      [](int order, double sigma, int q, std::uint64_t seed, std::uint64_t stream_id,
         int dim) {
        return charfun::nu_gaussian_sample(order, sigma, q, RandomStream{seed, stream_id},
                                           dim);
      },
      py::arg("order"), py::arg("sigma"), py::arg("q"), py::arg("seed"),
      py::arg("stream_id") = 0, py::arg("dim") = 1);

  py::class_<charfun::MinlosRow>(m, "MinlosRow")
      .def_readonly("sigma", &charfun::MinlosRow::sigma)
      .def_readonly("lhs", &charfun::MinlosRow::lhs)
      .def_readonly("lhs_stderr", &charfun::MinlosRow::lhs_stderr)
      .def_readonly("rhs", &charfun::MinlosRow::rhs)
      .def_readonly("pass_", &charfun::MinlosRow::pass);
  py::class_<charfun::MinlosReport>(m, "MinlosReport")
      .def_readonly("p", &charfun::MinlosReport::p)
      .def_readonly("q", &charfun::MinlosReport::q)
      .def_readonly("dim", &charfun::MinlosReport::dim)
      .def_readonly("eps", &charfun::MinlosReport::eps)
      .def_readonly("c", &charfun::MinlosReport::c)
      .def_readonly("zeta_value", &charfun::MinlosReport::zeta_value)
      .def_readonly("sample_count", &charfun::MinlosReport::sample_count)
      .def_readonly("rows", &charfun::MinlosReport::rows)
      .def_readonly("all_pass", &charfun::MinlosReport::all_pass)
      .def_readonly("hypothesis_note", &charfun::MinlosReport::hypothesis_note);
  m.def(
      "minlos_tail_check",
      [](const std::vector<TruncatedSeq>& samples, int p, int q,
         const std::vector<double>& sigma_grid, double eps, double c, int threads) {
        return charfun::minlos_tail_check(samples, p, q, sigma_grid, eps, c, threads);
      },
      py::arg("samples"), py::arg("p"), py::arg("q"), py::arg("sigma_grid"),
      py::arg("eps") = 0.0, py::arg("c") = 1.0, py::arg("threads") = 1);

  m.def("tail_hypothesis_constant", &charfun::tail_hypothesis_constant, py::arg("delta"));

  // Convergence harness.
  py::class_<levy::TestFunctionBank>(m, "TestFunctionBank")
      .def_readonly("points", &levy::TestFunctionBank::points)
      .def_readonly("labels", &levy::TestFunctionBank::labels);
  m.def(
      "default_bank",
      [](int dim, int order, std::uint64_t seed, std::uint64_t stream_id,
         int dense_count) {
        return levy::default_bank(dim, order, RandomStream{seed, stream_id}, dense_count);
      },
      py::arg("dim"), py::arg("order"), py::arg("seed"),
      py::arg("stream_id") = 0x8000000000000000ULL, py::arg("dense_count") = 3);

  py::class_<levy::KsResult>(m, "KsResult")
      .def_readonly("statistic", &levy::KsResult::statistic)
      .def_readonly("critical", &levy::KsResult::critical)
      .def_readonly("pass_", &levy::KsResult::pass)
      .def_readonly("sample_count", &levy::KsResult::sample_count);
  m.def("kolmogorov_critical", &levy::kolmogorov_critical, py::arg("alpha"));
  m.def(
      "ks_pairing_test",
      [](const std::vector<double>& samples, const std::function<double(double)>& cdf,
         double alpha) { return levy::ks_pairing_test(samples, cdf, alpha); },
      py::arg("samples"), py::arg("reference_cdf"), py::arg("alpha") = 0.01);

  py::class_<levy::TightnessRow>(m, "TightnessRow")
      .def_readonly("kappa", &levy::TightnessRow::kappa)
      .def_readonly("fraction", &levy::TightnessRow::fraction)
      .def_readonly("std_error", &levy::TightnessRow::std_error);
  m.def(
      "tightness_probe",
      [](const std::vector<TruncatedSeq>& samples, int p,
         const std::vector<double>& kappa_grid, int threads) {
        return levy::tightness_probe(samples, p, kappa_grid, threads);
      },
      py::arg("samples"), py::arg("p"), py::arg("kappa_grid"), py::arg("threads") = 1);

  m.def("bridging_constant", &levy::bridging_constant);
  m.def(
      "q_functional",
      [](const TruncatedSeq& b, const std::vector<TruncatedSeq>& directions,
         std::size_t k0) { return levy::q_functional(b, directions, k0); },
      py::arg("b"), py::arg("directions"), py::arg("k0"));
  m.def(
      "u_functional",
      [](const TruncatedSeq& b, const std::vector<TruncatedSeq>& directions,
         std::size_t k0) { return levy::u_functional(b, directions, k0); },
      py::arg("b"), py::arg("directions"), py::arg("k0"));
  m.def("default_q_directions", &levy::default_q_directions, py::arg("dim"),
        py::arg("order"), py::arg("count"));
  m.def("default_q_tail_bound", &levy::default_q_tail_bound, py::arg("b"),
        py::arg("count"));

  py::class_<levy::GapRow>(m, "GapRow")
      .def_readonly("step", &levy::GapRow::step)
      .def_readonly("label", &levy::GapRow::label)
      .def_readonly("gap", &levy::GapRow::gap)
      .def_readonly("std_error", &levy::GapRow::std_error)
      .def_readonly("allowance", &levy::GapRow::allowance);
  py::class_<levy::PointVerdict>(m, "PointVerdict")
      .def_readonly("label", &levy::PointVerdict::label)
      .def_readonly("final_gap_ok", &levy::PointVerdict::final_gap_ok)
      .def_readonly("monotone_ok", &levy::PointVerdict::monotone_ok);
  py::class_<levy::GapTable>(m, "GapTable")
      .def_readonly("rows", &levy::GapTable::rows)
      .def_readonly("verdicts", &levy::GapTable::verdicts)
      .def_readonly("consistent", &levy::GapTable::consistent);
  py::class_<levy::KsCell>(m, "KsCell")
      .def_readonly("step", &levy::KsCell::step)
      .def_readonly("label", &levy::KsCell::label)
      .def_readonly("result", &levy::KsCell::result)
      .def_readonly("degenerate", &levy::KsCell::degenerate);
  py::class_<levy::TightCell>(m, "TightCell")
      .def_readonly("step", &levy::TightCell::step)
      .def_readonly("row", &levy::TightCell::row);
  py::class_<levy::SelfCell>(m, "SelfCell")
      .def_readonly("label", &levy::SelfCell::label)
      .def_readonly("last_diff", &levy::SelfCell::last_diff)
      .def_readonly("threshold", &levy::SelfCell::threshold)
      .def_readonly("within", &levy::SelfCell::within);
  py::class_<levy::ConvergenceReport>(m, "ConvergenceReport")
      .def_readonly("labels", &levy::ConvergenceReport::labels)
      .def_readonly("gaps", &levy::ConvergenceReport::gaps)
      .def_readonly("ks_cells", &levy::ConvergenceReport::ks_cells)
      .def_readonly("tight_cells", &levy::ConvergenceReport::tight_cells)
      .def_readonly("self_cells", &levy::ConvergenceReport::self_cells)
      .def_readonly("charfun_converged", &levy::ConvergenceReport::charfun_converged)
      .def_readonly("pairing_converged", &levy::ConvergenceReport::pairing_converged)
      .def_readonly("tightness_pass", &levy::ConvergenceReport::tightness_pass)
      .def_readonly("self_convergent", &levy::ConvergenceReport::self_convergent)
      .def_readonly("hypothesis_violated", &levy::ConvergenceReport::hypothesis_violated)
      .def_readonly("flags", &levy::ConvergenceReport::flags)
      .def_readonly("sample_count", &levy::ConvergenceReport::sample_count);
  m.def(
      "equivalence_experiment",
      [](const std::vector<fields::FieldSpec>& sequence, const fields::FieldSpec& limit,
         const levy::TestFunctionBank& bank, int sample_count, std::uint64_t seed,
         std::uint64_t stream_id, int p, const std::vector<double>& kappa_grid,
         double alpha, double tight_threshold, int threads,
         const std::string& truncation_allowance) {
        levy::EquivalenceOptions options;
        options.p = p;
        options.kappa_grid = kappa_grid;
        options.alpha = alpha;
        options.tight_threshold = tight_threshold;
        options.threads = threads;
        options.truncation_allowance = truncation_allowance;
        return levy::equivalence_experiment(sequence, limit, bank, sample_count,
                                            RandomStream{seed, stream_id}, options);
      },
      py::arg("sequence"), py::arg("limit"), py::arg("bank"), py::arg("sample_count"),
      py::arg("seed"), py::arg("stream_id") = 0, py::arg("p") = 0,
      py::arg("kappa_grid") = std::vector<double>{1.0, 2.0, 5.0}, py::arg("alpha") = 0.01,
      py::arg("tight_threshold") = 0.9, py::arg("threads") = 1,
      py::arg("truncation_allowance") = "auto");

  // Counter-based RNG.
  m.def("normal_icdf", &grfkit::rng::normal_icdf, py::arg("u"));
  py::class_<CounterRng>(m, "CounterRng")
      .def(py::init([](std::uint64_t seed, std::uint64_t stream_id) {
             return CounterRng(RandomStream{seed, stream_id});
           }),
           py::arg("seed"), py::arg("stream_id") = 0)
      .def("raw", &CounterRng::raw, py::arg("i"))
      .def("uniform01", &CounterRng::uniform01, py::arg("i"))
      .def("normal", &CounterRng::normal, py::arg("i"));
}
