#pragma once

#include <cstdint>
#include <fstream>
#include <memory>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "ovalab/geometry.hpp"

namespace ovalab {

/// {"dim": 2, "length": L, "theta": [...]} or {"tangents": [[...], ...]}
/// (tangent form may carry "length"; it defaults to 2 pi).
DiscreteCurve parse_curve_json(std::string_view text);
std::string curve_to_json(const DiscreteCurve& curve);

/// {"dim": n, "psi": [[...], ...]}
HarmonicField parse_harmonic_json(std::string_view text);
std::string harmonic_to_json(const HarmonicField& field);

/// Whole file as a string; ValidationError if unreadable.
std::string read_text_file(const std::string& path);

/// Shortest decimal that round-trips the double, "nan"/"inf" otherwise.
std::string format_number(double v);

std::string metadata_line(std::uint64_t config_hash);

/// CSV with a header row and a trailing "# ovalab <version> config=<hash>"
/// line. Rows are flushed as they are written so a failed run leaves a
/// readable partial file; the trailer is written by close() or the
/// destructor.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, std::vector<std::string> header, std::uint64_t config_hash);
  CsvWriter(const std::string& path, std::vector<std::string> header, std::uint64_t config_hash);
  ~CsvWriter();
  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  void row(const std::vector<double>& values);
  /// Pre-formatted cells, for mixed text/number rows.
  void row_text(const std::vector<std::string>& cells);
  void close();
  std::size_t rows() const { return rows_; }

 private:
  void write_header();

  std::unique_ptr<std::ofstream> file_;
  std::ostream* out_;
  std::vector<std::string> header_;
  std::uint64_t hash_;
  std::size_t rows_ = 0;
  bool closed_ = false;
};

}  // namespace ovalab
