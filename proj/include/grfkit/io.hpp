#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "grfkit/fields.hpp"
#include "grfkit/seqspace.hpp"
#include "grfkit/truncated_seq.hpp"

namespace grfkit::io {

inline constexpr int kCoefficientFormatVersion = 1;
inline constexpr const char* kLayoutName = "lex-row-major";

/// {dim, order, layout: "lex-row-major", values: [...]}
nlohmann::json seq_to_json(const TruncatedSeq& a);
TruncatedSeq seq_from_json(const nlohmann::json& j);

void write_coefficients(const std::filesystem::path& path, const TruncatedSeq& a);
TruncatedSeq read_coefficients(const std::filesystem::path& path);

/// {dim, order, profile: {kind: "white"|"power_decay"|"table", q?, table?}}
nlohmann::json field_spec_to_json(const fields::FieldSpec& spec);
fields::FieldSpec field_spec_from_json(const nlohmann::json& j);

/// {p, c}
nlohmann::json envelope_to_json(const seq::GrowthEnvelope& env);
seq::GrowthEnvelope envelope_from_json(const nlohmann::json& j);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);

/// CSV with a bit-exact numeric contract: 17 significant digits, '.'
/// decimal separator, LF line endings, no quoting (writers must keep commas
/// out of text cells).
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);

  void add_cell(const std::string& text);
  void add_cell(double v);
  void add_cell(std::size_t v);
  void add_cell(bool v);
  void end_row();

  /// Full file contents; every row must have the header's arity.
  std::string str() const;
  void write(const std::filesystem::path& path) const;

 private:
  std::size_t columns_;
  std::string body_;
  std::size_t cells_in_row_ = 0;
};

}  // namespace grfkit::io
