#include "grfkit/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "grfkit/charfun.hpp"
#include "grfkit/detail/util.hpp"
#include "grfkit/errors.hpp"
#include "grfkit/fields.hpp"
#include "grfkit/hermite.hpp"
#include "grfkit/io.hpp"
#include "grfkit/levy.hpp"
#include "grfkit/seqspace.hpp"

namespace grfkit::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const char* const kExperiments[] = {"transform", "sample", "charfun", "minlos", "levy"};

bool known_experiment(const std::string& name) {
  for (const char* e : kExperiments)
    if (name == e) return true;
  return false;
}

// ---------------------------------------------------------------------------
// validation

void check_field_spec(const json& j, const std::string& prefix, Diagnostics& d) {
  if (!j.is_object()) {
    d.issues.push_back(prefix + " must be an object");
    return;
  }
  if (!j.contains("dim") || !j["dim"].is_number_integer()) {
    d.issues.push_back(prefix + ".dim must be an integer");
    return;
  }
  const int dim = j["dim"].get<int>();
  if (dim < 1 || dim > kMaxDim)
    d.issues.push_back(prefix + ".dim must be in [1," + std::to_string(kMaxDim) + "]");
  if (!j.contains("order") || !j["order"].is_number_integer() || j["order"].get<int>() < 0) {
    d.issues.push_back(prefix + ".order must be an integer >= 0");
    return;
  }
  if (!j.contains("profile") || !j["profile"].is_object()) {
    d.issues.push_back(prefix + ".profile must be an object");
    return;
  }
  const auto& profile = j["profile"];
  const std::string kind = profile.value("kind", "");
  if (kind == "white") {
    // nothing else to check
  } else if (kind == "power_decay") {
    if (!profile.contains("q") || !profile["q"].is_number_integer() ||
        profile["q"].get<int>() < 0 || profile["q"].get<int>() > seq::kMaxNormExponent)
      d.issues.push_back(prefix + ".profile.q must be an integer in [0,16]");
  } else if (kind == "table") {
    if (!profile.contains("table") || !profile["table"].is_array()) {
      d.issues.push_back(prefix + ".profile.table must be an array");
    } else {
      if (dim >= 1 && dim <= kMaxDim && j["order"].get<int>() >= 0 &&
          profile["table"].size() != cube_size(dim, j["order"].get<int>()))
        d.issues.push_back(prefix + ".profile.table length must equal (order+1)^dim");
      for (const auto& v : profile["table"])
        if (!v.is_number() || v.get<double>() < 0.0) {
          d.issues.push_back(prefix + ".profile.table entries must be numbers >= 0");
          break;
        }
    }
  } else {
    d.issues.push_back(prefix + ".profile.kind must be one of white|power_decay|table");
  }
}

void check_bank(const json& params, int field_dim, const fs::path& base_dir,
                Diagnostics& d) {
  if (!params.contains("bank")) return;  // default bank
  const auto& bank = params["bank"];
  if (bank.is_string()) {
    if (bank.get<std::string>() != "default")
      d.issues.push_back("parameters.bank string form must be \"default\"");
    return;
  }
  if (!bank.is_object() || !bank.contains("file") || !bank["file"].is_string()) {
    d.issues.push_back("parameters.bank must be \"default\" or {\"file\": path}");
    return;
  }
  const fs::path path = base_dir / bank["file"].get<std::string>();
  if (!fs::exists(path)) {
    d.issues.push_back("bank file does not exist: " + path.string());
    return;
  }
  try {
    const json j = io::read_json_file(path);
    if (!j.contains("points") || !j["points"].is_array() || j["points"].empty())
      throw std::invalid_argument("bank file needs a non-empty points array");
    if (j.contains("labels") &&
        (!j["labels"].is_array() || j["labels"].size() != j["points"].size()))
      throw std::invalid_argument("bank labels must match points in length");
    for (const auto& pj : j["points"]) {
      const TruncatedSeq p = io::seq_from_json(pj);
      if (p.dim() != field_dim)
        throw std::invalid_argument("bank point dim differs from the field dim");
    }
  } catch (const std::exception& e) {
    d.issues.push_back(std::string("bank file invalid: ") + e.what());
  }
}

void check_sample_count(const json& params, Diagnostics& d, std::size_t minimum = 1) {
  if (!params.contains("sample_count") || !params["sample_count"].is_number_integer() ||
      params["sample_count"].get<std::int64_t>() < 1) {
    d.issues.push_back("sample_count must be ≥ 1");
    return;
  }
  if (minimum > 1 &&
      params["sample_count"].get<std::int64_t>() < static_cast<std::int64_t>(minimum))
    d.issues.push_back("sample_count must be ≥ " + std::to_string(minimum) +
                       " for this experiment");
}

void check_transform(const json& params, const fs::path& base_dir, Diagnostics& d) {
  const int dim = params.value("dim", 0);
  if (!params.contains("dim") || !params["dim"].is_number_integer() || dim < 1 ||
      dim > kMaxDim)
    d.issues.push_back("parameters.dim must be an integer in [1," +
                       std::to_string(kMaxDim) + "]");
  if (!params.contains("order") || !params["order"].is_number_integer() ||
      params["order"].get<int>() < 0) {
    d.issues.push_back("parameters.order must be an integer >= 0");
    return;
  }
  const int order = params["order"].get<int>();
  const int quad = params.value("quadrature_order", 2 * order + 16);
  if (quad < order + 1)
    d.issues.push_back("quadrature_order must be >= order + 1 (refusing to alias)");
  if (quad > hermite::kDefaultOrderCap)
    d.issues.push_back("quadrature_order exceeds the cap of " +
                       std::to_string(hermite::kDefaultOrderCap));
  if (!params.contains("function") || !params["function"].is_object()) {
    d.issues.push_back("parameters.function must be an object");
    return;
  }
  const std::string kind = params["function"].value("kind", "");
  if (kind == "gaussian") {
    // no extra parameters
  } else if (kind == "coefficients") {
    if (!params["function"].contains("file") || !params["function"]["file"].is_string()) {
      d.issues.push_back("function.file must name a coefficient file");
      return;
    }
    const fs::path path = base_dir / params["function"]["file"].get<std::string>();
    if (!fs::exists(path)) {
      d.issues.push_back("coefficient file does not exist: " + path.string());
      return;
    }
    try {
      const TruncatedSeq a = io::read_coefficients(path);
      if (params.contains("dim") && params["dim"].is_number_integer() &&
          a.dim() != params["dim"].get<int>())
        d.issues.push_back("coefficient file dim differs from parameters.dim");
    } catch (const std::exception& e) {
      d.issues.push_back(std::string("coefficient file invalid: ") + e.what());
    }
  } else {
    d.issues.push_back("function.kind must be gaussian or coefficients");
  }
}

void check_minlos(const json& params, Diagnostics& d) {
  check_field_spec(params.value("field", json()), "parameters.field", d);
  check_sample_count(params, d);
  const bool has_p = params.contains("p") && params["p"].is_number_integer();
  const bool has_q = params.contains("q") && params["q"].is_number_integer();
  if (!has_p || params.value("p", -1) < 0 || params.value("p", 99) > seq::kMaxNormExponent)
    d.issues.push_back("parameters.p must be an integer in [0,16]");
  if (!has_q || params.value("q", -1) < 0 || params.value("q", 99) > seq::kMaxNormExponent)
    d.issues.push_back("parameters.q must be an integer in [0,16]");
  if (has_p && has_q && params["q"].get<int>() <= params["p"].get<int>())
    d.issues.push_back(
        "minlos requires q > p: the bound constant ζ(2(q-p)) diverges when q <= p");
  if (!params.contains("sigma_grid") || !params["sigma_grid"].is_array() ||
      params["sigma_grid"].empty()) {
    d.issues.push_back("parameters.sigma_grid must be a non-empty array");
  } else {
    for (const auto& s : params["sigma_grid"])
      if (!s.is_number() || !(s.get<double>() > 0.0)) {
        d.issues.push_back("sigma_grid entries must be positive numbers");
        break;
      }
  }
  if (params.contains("eps") && (!params["eps"].is_number() || params["eps"].get<double>() < 0.0))
    d.issues.push_back("parameters.eps must be a number >= 0");
  if (params.contains("c") && (!params["c"].is_number() || params["c"].get<double>() < 0.0))
    d.issues.push_back("parameters.c must be a number >= 0");
}

void check_charfun(const json& params, const fs::path& base_dir, Diagnostics& d) {
  check_field_spec(params.value("field", json()), "parameters.field", d);
  check_sample_count(params, d);
  int dim = 1;
  if (params.contains("field") && params["field"].is_object() &&
      params["field"].contains("dim") && params["field"]["dim"].is_number_integer())
    dim = params["field"]["dim"].get<int>();
  check_bank(params, dim, base_dir, d);
  if (params.contains("gram_tol") &&
      (!params["gram_tol"].is_number() || !(params["gram_tol"].get<double>() >= 0.0)))
    d.issues.push_back("parameters.gram_tol must be a number >= 0");
  if (params.contains("probe")) {
    const auto& probe = params["probe"];
    if (!probe.is_object()) {
      d.issues.push_back("parameters.probe must be an object");
      return;
    }
    if (!probe.contains("p_candidates") || !probe["p_candidates"].is_array() ||
        probe["p_candidates"].empty())
      d.issues.push_back("probe.p_candidates must be a non-empty array of integers");
    if (!probe.contains("delta_grid") || !probe["delta_grid"].is_array() ||
        probe["delta_grid"].empty())
      d.issues.push_back("probe.delta_grid must be a non-empty array of positive numbers");
    if (!probe.contains("eps_target") || !probe["eps_target"].is_number() ||
        !(probe["eps_target"].get<double>() > 0.0))
      d.issues.push_back("probe.eps_target must be a positive number");
    if (probe.value("probe_count", 1) < 1)
      d.issues.push_back("probe.probe_count must be >= 1");
  }
}

void check_levy(const json& params, const fs::path& base_dir, Diagnostics& d) {
  if (!params.contains("sequence") || !params["sequence"].is_array() ||
      params["sequence"].empty()) {
    d.issues.push_back("parameters.sequence must be a non-empty array of field specs");
  } else {
    for (std::size_t i = 0; i < params["sequence"].size(); ++i)
      check_field_spec(params["sequence"][i],
                       "parameters.sequence[" + std::to_string(i) + "]", d);
  }
  check_field_spec(params.value("limit", json()), "parameters.limit", d);
  check_sample_count(params, d, 100);  // KS stage needs asymptotic-regime N
  int dim = 1;
  if (params.contains("limit") && params["limit"].is_object() &&
      params["limit"].contains("dim") && params["limit"]["dim"].is_number_integer())
    dim = params["limit"]["dim"].get<int>();
  if (params.contains("sequence") && params["sequence"].is_array())
    for (const auto& sj : params["sequence"])
      if (sj.is_object() && sj.contains("dim") && sj["dim"].is_number_integer() &&
          sj["dim"].get<int>() != dim) {
        d.issues.push_back("sequence dims must all equal the limit dim");
        break;
      }
  check_bank(params, dim, base_dir, d);
  if (params.contains("p") &&
      (!params["p"].is_number_integer() || params["p"].get<int>() < 0 ||
       params["p"].get<int>() + 1 > seq::kMaxNormExponent))
    d.issues.push_back("parameters.p must be an integer in [0,15]");
  if (params.contains("kappa_grid")) {
    const auto& grid = params["kappa_grid"];
    bool ok = grid.is_array() && !grid.empty();
    double prev = 0.0;
    if (ok)
      for (const auto& v : grid) {
        if (!v.is_number() || !(v.get<double>() > prev)) {
          ok = false;
          break;
        }
        prev = v.get<double>();
      }
    if (!ok)
      d.issues.push_back("kappa_grid must be a strictly increasing array of positives");
  }
  if (params.contains("alpha") &&
      (!params["alpha"].is_number() || !(params["alpha"].get<double>() > 0.0) ||
       !(params["alpha"].get<double>() < 1.0)))
    d.issues.push_back("parameters.alpha must lie in (0,1)");
  if (params.contains("tight_threshold") &&
      (!params["tight_threshold"].is_number() ||
       params["tight_threshold"].get<double>() < 0.0 ||
       params["tight_threshold"].get<double>() > 1.0))
    d.issues.push_back("tight_threshold must lie in [0,1]");
  const std::string allowance = params.value("truncation_allowance", "auto");
  if (allowance != "auto" && allowance != "none")
    d.issues.push_back("truncation_allowance must be \"auto\" or \"none\"");
}

void check_sample(const json& params, Diagnostics& d) {
  check_field_spec(params.value("field", json()), "parameters.field", d);
  check_sample_count(params, d);
  if (params.contains("save_samples") && !params["save_samples"].is_boolean())
    d.issues.push_back("parameters.save_samples must be a boolean");
}

// ---------------------------------------------------------------------------
// shared run plumbing

struct RunContext {
  json config;
  fs::path base_dir;
  fs::path output_dir;
  std::uint64_t seed = 0;
  int threads = 1;
  bool assert_verdicts = false;
  std::string config_hash;
};

/// Exclusive .lock file, removed on scope exit.  "wx" fails if it already
/// exists, which is the whole point: one run per output_dir at a time.
class DirLock {
 public:
  explicit DirLock(const fs::path& dir) : path_(dir / ".grfkit.lock") {
    std::FILE* f = std::fopen(path_.string().c_str(), "wx");
    if (f == nullptr)
      throw std::runtime_error("output_dir is locked (found " + path_.string() +
                               "); is another run active? Remove the file if stale.");
    std::fputs("grfkit run lock\n", f);
    std::fclose(f);
  }
  ~DirLock() {
    std::error_code ec;
    fs::remove(path_, ec);
  }
  DirLock(const DirLock&) = delete;
  DirLock& operator=(const DirLock&) = delete;

 private:
  fs::path path_;
};

void write_manifest(const RunContext& ctx) {
  const json manifest = {
      {"config_hash", ctx.config_hash},
      {"experiment", ctx.config["experiment"].get<std::string>()},
      {"seed", ctx.seed},
      {"versions",
       {{"grfkit", kToolVersion}, {"coefficient_format", io::kCoefficientFormatVersion}}}};
  io::write_json_file(ctx.output_dir / "manifest.json", manifest);
}

levy::TestFunctionBank load_bank(const json& params, int dim, int order,
                                 std::uint64_t seed, const fs::path& base_dir) {
  if (!params.contains("bank") || params["bank"].is_string()) {
    // Auxiliary stream well away from the sample streams at [0, N).
    return levy::default_bank(dim, order, {seed, 0x8000000000000000ULL});
  }
  const json j = io::read_json_file(base_dir / params["bank"]["file"].get<std::string>());
  levy::TestFunctionBank bank;
  for (const auto& pj : j["points"]) bank.points.push_back(io::seq_from_json(pj));
  if (j.contains("labels"))
    for (const auto& l : j["labels"]) bank.labels.push_back(l.get<std::string>());
  else
    for (std::size_t i = 0; i < bank.points.size(); ++i)
      bank.labels.push_back("point" + std::to_string(i));
  return bank;
}

// ---------------------------------------------------------------------------
// experiments

/// Coefficients of a named analytic function or a coefficient file; the
/// roundtrip residual is reported when the truth is known.
int run_transform(const RunContext& ctx) {
  const auto& params = ctx.config["parameters"];
  const int dim = params["dim"].get<int>();
  const int order = params["order"].get<int>();
  const int quad = params.value("quadrature_order", 2 * order + 16);
  const hermite::QuadratureRule rule = hermite::gauss_hermite_rule(quad);
  const std::string kind = params["function"]["kind"].get<std::string>();

  std::function<double(std::span<const double>)> f;
  std::optional<TruncatedSeq> truth;  // known coefficients, if any
  if (kind == "gaussian") {
    // exp(-|x|^2/2) = pi^(d/4) h_0: the coefficient vector is explicit.
    f = [](std::span<const double> x) {
      double s = 0.0;
      for (double xi : x) s += xi * xi;
      return std::exp(-0.5 * s);
    };
    TruncatedSeq t(dim, order);
    t[0] = std::pow(M_PI, 0.25 * static_cast<double>(dim));
    truth = std::move(t);
  } else {
    const TruncatedSeq a =
        io::read_coefficients(ctx.base_dir / params["function"]["file"].get<std::string>());
    f = [a](std::span<const double> x) { return hermite::hermite_reconstruct(a, x); };
    truth = embed(a, order);
  }

  const TruncatedSeq coeff = hermite::hermite_transform(f, dim, order, rule, ctx.threads);

  std::vector<std::string> header = {"flat_index"};
  for (int i = 0; i < dim; ++i) header.push_back("n_" + std::to_string(i));
  header.emplace_back("value");
  io::CsvWriter csv(header);
  MultiIndex n = MultiIndex::zero(dim);
  std::size_t flat = 0;
  do {
    csv.add_cell(flat);
    for (int i = 0; i < dim; ++i) csv.add_cell(std::to_string(n[i]));
    csv.add_cell(coeff[flat]);
    csv.end_row();
    ++flat;
  } while (n.next_in_cube(order));
  csv.write(ctx.output_dir / "transform.csv");
  io::write_coefficients(ctx.output_dir / "coefficients.json", coeff);

  json report = {{"experiment", "transform"},
                 {"dim", dim},
                 {"order", order},
                 {"quadrature_order", quad},
                 {"function_kind", kind}};
  bool ok = true;
  if (truth) {
    double err = 0.0;
    for (std::size_t i = 0; i < coeff.size(); ++i)
      err = std::max(err, std::fabs(coeff[i] - (*truth)[i]));
    report["roundtrip_max_abs_error"] = err;
    ok = err <= 1e-9;
    report["roundtrip_ok"] = ok;
  }
  io::write_json_file(ctx.output_dir / "report.json", report);
  write_manifest(ctx);
  return ctx.assert_verdicts && !ok ? kExitAssert : kExitOk;
}

int run_sample(const RunContext& ctx) {
  const auto& params = ctx.config["parameters"];
  const fields::FieldSpec spec = io::field_spec_from_json(params["field"]);
  const int count = params["sample_count"].get<int>();
  const std::vector<TruncatedSeq> batch =
      fields::sample_batch(spec, {ctx.seed, 0}, count, ctx.threads);

  // Per-mode moments against the declared variances.
  const std::size_t size = spec.size();
  std::vector<double> scratch(static_cast<std::size_t>(count));
  io::CsvWriter csv({"flat_index", "mean", "variance", "expected_variance"});
  for (std::size_t m = 0; m < size; ++m) {
    for (std::size_t j = 0; j < scratch.size(); ++j) scratch[j] = batch[j][m];
    csv.add_cell(m);
    csv.add_cell(detail::mean(scratch));
    csv.add_cell(count >= 2 ? detail::sample_variance(scratch) : 0.0);
    csv.add_cell(spec.variance(m));
    csv.end_row();
  }
  csv.write(ctx.output_dir / "sample.csv");

  // One summary statistic with a clean sampling law: mean ||b||_0^2 should
  // match the total variance within Monte-Carlo error.
  for (std::size_t j = 0; j < scratch.size(); ++j) {
    const double nb = seq::norm_p(batch[j], 0);
    scratch[j] = nb * nb;
  }
  double expected = 0.0;
  for (std::size_t m = 0; m < size; ++m) expected += spec.variance(m);
  const double mean_norm2 = detail::mean(scratch);
  const double se = count >= 2
                        ? std::sqrt(detail::sample_variance(scratch) / scratch.size())
                        : 0.0;
  const bool ok = std::fabs(mean_norm2 - expected) <= 3.0 * se || count < 2;

  json report = {{"experiment", "sample"},
                 {"field", io::field_spec_to_json(spec)},
                 {"sample_count", count},
                 {"norm0_squared_mean", mean_norm2},
                 {"norm0_squared_expected", expected},
                 {"norm0_squared_stderr", se},
                 {"within_3se", ok}};
  io::write_json_file(ctx.output_dir / "report.json", report);

  if (params.value("save_samples", false)) {
    json rows = json::array();
    for (const auto& b : batch)
      rows.push_back(std::vector<double>(b.values().begin(), b.values().end()));
    const json dump = {{"dim", spec.dim()},        {"order", spec.order()},
                       {"layout", io::kLayoutName}, {"count", count},
                       {"seed", ctx.seed},          {"stream_id_base", 0},
                       {"samples", rows}};
    io::write_json_file(ctx.output_dir / "samples.json", dump);
  }
  write_manifest(ctx);
  return ctx.assert_verdicts && !ok ? kExitAssert : kExitOk;
}

int run_charfun(const RunContext& ctx) {
  const auto& params = ctx.config["parameters"];
  const fields::FieldSpec spec = io::field_spec_from_json(params["field"]);
  const int count = params["sample_count"].get<int>();
  const int bank_order = params.value("bank_order", spec.order());
  const levy::TestFunctionBank bank =
      load_bank(params, spec.dim(), bank_order, ctx.seed, ctx.base_dir);

  const std::vector<TruncatedSeq> batch =
      fields::sample_batch(spec, {ctx.seed, 0}, count, ctx.threads);
  const charfun::CharFunEstimate est =
      charfun::empirical_charfun(batch, bank.points, ctx.threads);

  io::CsvWriter csv({"label", "re", "im", "std_error", "exact_re", "exact_im", "gap"});
  double max_gap_over_se = 0.0;
  for (std::size_t k = 0; k < bank.points.size(); ++k) {
    const std::complex<double> exact = fields::gaussian_charfun_exact(spec, bank.points[k]);
    const double gap = std::abs(est.values[k] - exact);
    if (est.std_errors[k] > 0.0)
      max_gap_over_se = std::max(max_gap_over_se, gap / est.std_errors[k]);
    else if (gap > 0.0)
      max_gap_over_se = std::max(max_gap_over_se, 1e300);
    csv.add_cell(bank.labels[k]);
    csv.add_cell(est.values[k].real());
    csv.add_cell(est.values[k].imag());
    csv.add_cell(est.std_errors[k]);
    csv.add_cell(exact.real());
    csv.add_cell(exact.imag());
    csv.add_cell(gap);
    csv.end_row();
  }
  csv.write(ctx.output_dir / "charfun.csv");

  const double tol = params.value("gram_tol", 1e-8);
  const charfun::GramCheck gram = charfun::gram_psd_check(
      charfun::make_empirical_charfun(batch, ctx.threads), bank.points, tol);

  json report = {{"experiment", "charfun"},
                 {"field", io::field_spec_to_json(spec)},
                 {"sample_count", count},
                 {"max_gap_over_stderr", max_gap_over_se},
                 {"gram",
                  {{"pass", gram.pass},
                   {"min_eigenvalue", gram.min_eigenvalue},
                   {"max_eigenvalue", gram.max_eigenvalue},
                   {"tol", tol}}}};

  bool probe_ok = true;
  if (params.contains("probe")) {
    const auto& pj = params["probe"];
    std::vector<int> ps = pj["p_candidates"].get<std::vector<int>>();
    std::vector<double> deltas = pj["delta_grid"].get<std::vector<double>>();
    const auto result = charfun::continuity_probe(
        charfun::make_empirical_charfun(batch, ctx.threads), ps, deltas,
        pj["eps_target"].get<double>(), pj.value("probe_count", 16),
        {ctx.seed, 0xc011713355ULL}, spec.dim(), bank_order);
    if (result) {
      report["probe"] = {{"found", true},
                         {"p", result->p},
                         {"delta", result->delta},
                         {"worst_deficit", result->worst_deficit},
                         {"sampled_only", result->sampled_only},
                         {"hypothesis_c", charfun::tail_hypothesis_constant(result->delta)}};
    } else {
      report["probe"] = {{"found", false}};
      probe_ok = false;
    }
  }
  io::write_json_file(ctx.output_dir / "report.json", report);
  write_manifest(ctx);
  const bool ok = gram.pass && probe_ok;
  return ctx.assert_verdicts && !ok ? kExitAssert : kExitOk;
}

int run_minlos(const RunContext& ctx) {
  const auto& params = ctx.config["parameters"];
  const fields::FieldSpec spec = io::field_spec_from_json(params["field"]);
  const int count = params["sample_count"].get<int>();
  const int p = params["p"].get<int>();
  const int q = params["q"].get<int>();
  const std::vector<double> sigma_grid = params["sigma_grid"].get<std::vector<double>>();
  const double eps = params.value("eps", 0.0);
  const double c = params.value("c", 0.5);

  const std::vector<TruncatedSeq> batch =
      fields::sample_batch(spec, {ctx.seed, 0}, count, ctx.threads);
  const charfun::MinlosReport report =
      charfun::minlos_tail_check(batch, p, q, sigma_grid, eps, c, ctx.threads);

  io::CsvWriter csv({"sigma", "lhs", "lhs_stderr", "rhs", "pass"});
  json rows = json::array();
  for (const auto& row : report.rows) {
    csv.add_cell(row.sigma);
    csv.add_cell(row.lhs);
    csv.add_cell(row.lhs_stderr);
    csv.add_cell(row.rhs);
    csv.add_cell(row.pass);
    csv.end_row();
    rows.push_back({{"sigma", row.sigma},
                    {"lhs", row.lhs},
                    {"lhs_stderr", row.lhs_stderr},
                    {"rhs", row.rhs},
                    {"pass", row.pass}});
  }
  csv.write(ctx.output_dir / "minlos.csv");

  io::write_json_file(ctx.output_dir / "report.json",
                      {{"experiment", "minlos"},
                       {"field", io::field_spec_to_json(spec)},
                       {"p", report.p},
                       {"q", report.q},
                       {"dim", report.dim},
                       {"eps", report.eps},
                       {"c", report.c},
                       {"zeta_value", report.zeta_value},
                       {"sample_count", report.sample_count},
                       {"rows", rows},
                       {"all_pass", report.all_pass},
                       {"hypothesis_note", report.hypothesis_note}});
  write_manifest(ctx);
  return ctx.assert_verdicts && !report.all_pass ? kExitAssert : kExitOk;
}

int run_levy(const RunContext& ctx) {
  const auto& params = ctx.config["parameters"];
  std::vector<fields::FieldSpec> sequence;
  for (const auto& sj : params["sequence"])
    sequence.push_back(io::field_spec_from_json(sj));
  const fields::FieldSpec limit = io::field_spec_from_json(params["limit"]);
  const int count = params["sample_count"].get<int>();
  const int bank_order = params.value("bank_order", limit.order());
  const levy::TestFunctionBank bank =
      load_bank(params, limit.dim(), bank_order, ctx.seed, ctx.base_dir);

  levy::EquivalenceOptions options;
  options.p = params.value("p", 0);
  if (params.contains("kappa_grid"))
    options.kappa_grid = params["kappa_grid"].get<std::vector<double>>();
  options.alpha = params.value("alpha", 0.01);
  options.tight_threshold = params.value("tight_threshold", 0.9);
  options.threads = ctx.threads;
  options.truncation_allowance = params.value("truncation_allowance", "auto");

  const levy::ConvergenceReport report =
      levy::equivalence_experiment(sequence, limit, bank, count, {ctx.seed, 0}, options);

  // Long format: one row per (step, point) for gaps and KS, one per
  // (step, kappa) for tightness.
  io::CsvWriter csv({"kind", "step", "label", "kappa", "value", "std_error", "aux", "pass"});
  const std::size_t steps = sequence.size();
  for (std::size_t k = 0; k < report.labels.size(); ++k) {
    for (std::size_t s = 0; s < steps; ++s) {
      const auto& row = report.gaps.rows[k * steps + s];
      csv.add_cell(std::string("charfun_gap"));
      csv.add_cell(row.step);
      csv.add_cell(row.label);
      csv.add_cell(std::string(""));
      csv.add_cell(row.gap);
      csv.add_cell(row.std_error);
      csv.add_cell(row.allowance);
      const auto& verdict = report.gaps.verdicts[k];
      csv.add_cell(verdict.final_gap_ok && verdict.monotone_ok);
      csv.end_row();
    }
  }
  for (const auto& cell : report.ks_cells) {
    if (cell.degenerate) continue;
    csv.add_cell(std::string("ks"));
    csv.add_cell(cell.step);
    csv.add_cell(cell.label);
    csv.add_cell(std::string(""));
    csv.add_cell(cell.result.statistic);
    csv.add_cell(0.0);
    csv.add_cell(cell.result.critical);
    csv.add_cell(cell.result.pass);
    csv.end_row();
  }
  for (const auto& cell : report.tight_cells) {
    csv.add_cell(std::string("tightness"));
    csv.add_cell(cell.step);
    csv.add_cell(std::string(""));
    csv.add_cell(cell.row.kappa);
    csv.add_cell(cell.row.fraction);
    csv.add_cell(cell.row.std_error);
    csv.add_cell(0.0);
    csv.add_cell(cell.row.fraction >= 0.0);  // informational rows always "true"
    csv.end_row();
  }
  csv.write(ctx.output_dir / "levy.csv");

  json verdicts = json::array();
  for (const auto& v : report.gaps.verdicts)
    verdicts.push_back({{"label", v.label},
                        {"final_gap_ok", v.final_gap_ok},
                        {"monotone_ok", v.monotone_ok}});
  json self_cells = json::array();
  for (const auto& cell : report.self_cells)
    self_cells.push_back({{"label", cell.label},
                          {"last_diff", cell.last_diff},
                          {"threshold", cell.threshold},
                          {"within", cell.within}});
  json sequence_json = json::array();
  for (const auto& spec : sequence) sequence_json.push_back(io::field_spec_to_json(spec));

  io::write_json_file(ctx.output_dir / "report.json",
                      {{"experiment", "levy"},
                       {"sequence", sequence_json},
                       {"limit", io::field_spec_to_json(limit)},
                       {"sample_count", report.sample_count},
                       {"labels", report.labels},
                       {"charfun_converged", report.charfun_converged},
                       {"pairing_converged", report.pairing_converged},
                       {"tightness_pass", report.tightness_pass},
                       {"self_convergent", report.self_convergent},
                       {"hypothesis_violated", report.hypothesis_violated},
                       {"flags", report.flags},
                       {"point_verdicts", verdicts},
                       {"self_cells", self_cells}});
  write_manifest(ctx);
  const bool ok = report.charfun_converged && report.pairing_converged &&
                  report.tightness_pass && !report.hypothesis_violated;
  return ctx.assert_verdicts && !ok ? kExitAssert : kExitOk;
}

}  // namespace

Diagnostics validate_config(const json& config, const fs::path& base_dir) {
  Diagnostics d;
  if (!config.is_object()) {
    d.issues.push_back("config must be a JSON object");
    return d;
  }
  const std::string experiment = config.value("experiment", "");
  if (!known_experiment(experiment)) {
    d.issues.push_back("experiment must be one of transform|sample|charfun|minlos|levy");
    return d;
  }
  if (!config.contains("seed") || !config["seed"].is_number_integer())
    d.issues.push_back("seed must be present (no wall-clock default)");
  if (!config.contains("output_dir") || !config["output_dir"].is_string() ||
      config["output_dir"].get<std::string>().empty())
    d.issues.push_back("output_dir must be a non-empty string");
  if (config.contains("threads") &&
      (!config["threads"].is_number_integer() || config["threads"].get<int>() < 1))
    d.issues.push_back("threads must be an integer >= 1");
  if (!config.contains("parameters") || !config["parameters"].is_object()) {
    d.issues.push_back("parameters must be an object");
    return d;
  }
  const auto& params = config["parameters"];
  if (experiment == "transform") check_transform(params, base_dir, d);
  if (experiment == "sample") check_sample(params, d);
  if (experiment == "charfun") check_charfun(params, base_dir, d);
  if (experiment == "minlos") check_minlos(params, d);
  if (experiment == "levy") check_levy(params, base_dir, d);
  return d;
}

Diagnostics validate_config_file(const fs::path& path) {
  Diagnostics d;
  json config;
  try {
    config = io::read_json_file(path);
  } catch (const std::exception& e) {
    d.issues.push_back(e.what());
    return d;
  }
  return validate_config(config, path.parent_path());
}

int run_config_file(const fs::path& path, const RunOptions& options) {
  std::string raw;
  {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
      std::cerr << "error: cannot open config " << path << "\n";
      return kExitConfig;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    raw = buf.str();
  }
  json config;
  try {
    config = json::parse(raw);
  } catch (const json::parse_error& e) {
    std::cerr << "error: config parse failure: " << e.what() << "\n";
    return kExitConfig;
  }

  const fs::path base_dir = path.parent_path();
  const Diagnostics diagnostics = validate_config(config, base_dir);
  if (!diagnostics.ok()) {
    for (const auto& issue : diagnostics.issues) std::cerr << "config error: " << issue << "\n";
    return kExitConfig;
  }

  RunContext ctx;
  ctx.config = config;
  ctx.base_dir = base_dir;
  ctx.config_hash = detail::hex64(detail::fnv1a64(raw));
  ctx.seed = options.seed_override.value_or(config["seed"].get<std::uint64_t>());
  ctx.threads = options.threads_override.value_or(config.value("threads", 1));
  ctx.assert_verdicts = options.assert_verdicts;

  // $OUTPUT_DIR (if set) wins over the config; the only env override.
  if (const char* env = std::getenv("OUTPUT_DIR"); env != nullptr && *env != '\0')
    ctx.output_dir = fs::path(env);
  else
    ctx.output_dir = base_dir / config["output_dir"].get<std::string>();

  try {
    fs::create_directories(ctx.output_dir);
    const DirLock lock(ctx.output_dir);
    const std::string experiment = config["experiment"].get<std::string>();
    if (experiment == "transform") return run_transform(ctx);
    if (experiment == "sample") return run_sample(ctx);
    if (experiment == "charfun") return run_charfun(ctx);
    if (experiment == "minlos") return run_minlos(ctx);
    return run_levy(ctx);
  } catch (const CapacityError& e) {
    std::cerr << "capacity error: " << e.what() << "\n";
    return kExitCapacity;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}

}  // namespace grfkit::cli
