#include "grfkit/io.hpp"

#include <fstream>
#include <stdexcept>

#include "grfkit/detail/util.hpp"

namespace grfkit::io {

namespace {

void require_key(const nlohmann::json& j, const char* key, const char* what) {
  if (!j.contains(key))
    throw std::invalid_argument(std::string(what) + ": missing field \"" + key + "\"");
}

}  // namespace

nlohmann::json seq_to_json(const TruncatedSeq& a) {
  return {{"dim", a.dim()},
          {"order", a.order()},
          {"layout", kLayoutName},
          {"values", std::vector<double>(a.values().begin(), a.values().end())}};
}

TruncatedSeq seq_from_json(const nlohmann::json& j) {
  require_key(j, "dim", "coefficients");
  require_key(j, "order", "coefficients");
  require_key(j, "layout", "coefficients");
  require_key(j, "values", "coefficients");
  if (j["layout"].get<std::string>() != kLayoutName)
    throw std::invalid_argument("coefficients: unsupported layout \"" +
                                j["layout"].get<std::string>() + "\"");
  return TruncatedSeq(j["dim"].get<int>(), j["order"].get<int>(),
                      j["values"].get<std::vector<double>>());
}

void write_coefficients(const std::filesystem::path& path, const TruncatedSeq& a) {
  write_json_file(path, seq_to_json(a));
}

TruncatedSeq read_coefficients(const std::filesystem::path& path) {
  return seq_from_json(read_json_file(path));
}

nlohmann::json field_spec_to_json(const fields::FieldSpec& spec) {
  nlohmann::json profile;
  if (std::holds_alternative<fields::WhiteProfile>(spec.profile())) {
    profile = {{"kind", "white"}};
  } else if (const auto* pd = std::get_if<fields::PowerDecayProfile>(&spec.profile())) {
    profile = {{"kind", "power_decay"}, {"q", pd->q}};
  } else {
    profile = {{"kind", "table"},
               {"table", std::get<fields::TableProfile>(spec.profile()).variances}};
  }
  return {{"dim", spec.dim()}, {"order", spec.order()}, {"profile", profile}};
}

fields::FieldSpec field_spec_from_json(const nlohmann::json& j) {
  require_key(j, "dim", "field spec");
  require_key(j, "order", "field spec");
  require_key(j, "profile", "field spec");
  const auto& profile = j["profile"];
  require_key(profile, "kind", "field spec profile");
  const std::string kind = profile["kind"].get<std::string>();
  const int dim = j["dim"].get<int>();
  const int order = j["order"].get<int>();
  if (kind == "white") return fields::FieldSpec::white(dim, order);
  if (kind == "power_decay") {
    require_key(profile, "q", "power_decay profile");
    return fields::FieldSpec::power_decay(dim, order, profile["q"].get<int>());
  }
  if (kind == "table") {
    require_key(profile, "table", "table profile");
    return fields::FieldSpec::table(dim, order, profile["table"].get<std::vector<double>>());
  }
  throw std::invalid_argument("field spec: unknown profile kind \"" + kind + "\"");
}

nlohmann::json envelope_to_json(const seq::GrowthEnvelope& env) {
  return {{"p", env.p}, {"c", env.c}};
}

seq::GrowthEnvelope envelope_from_json(const nlohmann::json& j) {
  require_key(j, "p", "growth envelope");
  require_key(j, "c", "growth envelope");
  return {j["p"].get<int>(), j["c"].get<double>()};
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("cannot parse " + path.string() + ": " + e.what());
  }
  return j;
}

void write_json_file(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path, std::ios::binary);  // binary: LF on every platform
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
  if (header.empty()) throw std::invalid_argument("CsvWriter: empty header");
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) body_ += ',';
    body_ += header[i];
  }
  body_ += '\n';
}

void CsvWriter::add_cell(const std::string& text) {
  if (text.find_first_of(",\n\"") != std::string::npos)
    throw std::invalid_argument("CsvWriter: cell text must not need quoting");
  if (cells_in_row_ >= columns_) throw std::logic_error("CsvWriter: row overflow");
  if (cells_in_row_) body_ += ',';
  body_ += text;
  ++cells_in_row_;
}

void CsvWriter::add_cell(double v) { add_cell(detail::format_double(v)); }

void CsvWriter::add_cell(std::size_t v) { add_cell(std::to_string(v)); }

void CsvWriter::add_cell(bool v) { add_cell(std::string(v ? "true" : "false")); }

void CsvWriter::end_row() {
  if (cells_in_row_ != columns_) throw std::logic_error("CsvWriter: row arity mismatch");
  body_ += '\n';
  cells_in_row_ = 0;
}

std::string CsvWriter::str() const {
  if (cells_in_row_ != 0) throw std::logic_error("CsvWriter: unterminated row");
  return body_;
}

void CsvWriter::write(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << str();
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace grfkit::io
