#include "ovalab/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "ovalab/common.hpp"

namespace ovalab {

using nlohmann::json;

namespace {

json parse_or_throw(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("malformed JSON: ") + e.what());
  }
}

// rows of equal width, all numbers
std::vector<double> flatten_rows(const json& rows, int& width, const char* what) {
  if (!rows.is_array() || rows.empty()) throw ValidationError(std::string(what) + " must be a non-empty array");
  std::vector<double> out;
  width = -1;
  for (const auto& r : rows) {
    if (!r.is_array()) throw ValidationError(std::string(what) + " rows must be arrays");
    if (width < 0) width = static_cast<int>(r.size());
    if (static_cast<int>(r.size()) != width) throw ValidationError(std::string(what) + " rows differ in length");
    for (const auto& v : r) {
      if (!v.is_number()) throw ValidationError(std::string(what) + " entries must be numbers");
      out.push_back(v.get<double>());
    }
  }
  if (width < 1) throw ValidationError(std::string(what) + " rows are empty");
  return out;
}

}  // namespace

DiscreteCurve parse_curve_json(std::string_view text) {
  json j = parse_or_throw(text);
  if (!j.is_object()) throw ValidationError("curve JSON must be an object");
  double length = kTwoPi;
  if (j.contains("length")) {
    if (!j["length"].is_number()) throw ValidationError("curve length must be a number");
    length = j["length"].get<double>();
  }
  if (j.contains("theta")) {
    if (j.contains("dim") && (!j["dim"].is_number_integer() || j["dim"].get<int>() != 2))
      throw ValidationError("theta form requires dim 2");
    const auto& t = j["theta"];
    if (!t.is_array()) throw ValidationError("theta must be an array");
    std::vector<double> theta;
    theta.reserve(t.size());
    for (const auto& v : t) {
      if (!v.is_number()) throw ValidationError("theta entries must be numbers");
      theta.push_back(v.get<double>());
    }
    return DiscreteCurve::planar(std::move(theta), length);
  }
  if (j.contains("tangents")) {
    int width = 0;
    auto flat = flatten_rows(j["tangents"], width, "tangents");
    if (j.contains("dim") && (!j["dim"].is_number_integer() || j["dim"].get<int>() != width)) throw ValidationError("tangent rows do not match dim");
    return DiscreteCurve::spatial(width, std::move(flat), length);
  }
  throw ValidationError("curve JSON needs \"theta\" or \"tangents\"");
}

std::string curve_to_json(const DiscreteCurve& curve) {
  json j;
  j["dim"] = curve.dim();
  j["length"] = curve.length();
  if (curve.planar()) {
    auto th = curve.theta();
    j["theta"] = std::vector<double>(th.begin(), th.end());
  } else {
    json rows = json::array();
    for (std::size_t i = 0; i < curve.size(); ++i) {
      auto t = curve.tangent(i);
      rows.push_back(std::vector<double>(t.begin(), t.end()));
    }
    j["tangents"] = rows;
  }
  return j.dump();
}

HarmonicField parse_harmonic_json(std::string_view text) {
  json j = parse_or_throw(text);
  if (!j.is_object() || !j.contains("psi")) throw ValidationError("harmonic JSON needs \"psi\"");
  int width = 0;
  auto flat = flatten_rows(j["psi"], width, "psi");
  if (j.contains("dim") && (!j["dim"].is_number_integer() || j["dim"].get<int>() != width))
    throw ValidationError("psi rows do not match dim");
  return HarmonicField(width, std::move(flat));
}

std::string harmonic_to_json(const HarmonicField& field) {
  json rows = json::array();
  for (std::size_t i = 0; i < field.size(); ++i) {
    auto p = field[i];
    rows.push_back(std::vector<double>(p.begin(), p.end()));
  }
  json j;
  j["dim"] = field.dim();
  j["psi"] = rows;
  return j.dump();
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string metadata_line(std::uint64_t config_hash) {
  char buf[80];
  std::snprintf(buf, sizeof buf, "# ovalab %s config=%016llx", OVALAB_VERSION,
                static_cast<unsigned long long>(config_hash));
  return buf;
}

CsvWriter::CsvWriter(std::ostream& out, std::vector<std::string> header, std::uint64_t config_hash)
    : out_(&out), header_(std::move(header)), hash_(config_hash) {
  write_header();
}

CsvWriter::CsvWriter(const std::string& path, std::vector<std::string> header, std::uint64_t config_hash)
    : file_(std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::trunc)),
      out_(file_.get()),
      header_(std::move(header)),
      hash_(config_hash) {
  if (!*file_) throw ValidationError("cannot write " + path);
  write_header();
}

CsvWriter::~CsvWriter() {
  try {
    close();
  } catch (...) {
  }
}

void CsvWriter::write_header() {
  for (std::size_t i = 0; i < header_.size(); ++i) *out_ << (i ? "," : "") << header_[i];
  *out_ << '\n';
  out_->flush();
}

void CsvWriter::row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_number(v));
  row_text(cells);
}

void CsvWriter::row_text(const std::vector<std::string>& cells) {
  if (closed_) throw ValidationError("CSV already closed");
  if (cells.size() != header_.size()) throw ValidationError("CSV row width does not match header");
  for (std::size_t i = 0; i < cells.size(); ++i) *out_ << (i ? "," : "") << cells[i];
  *out_ << '\n';
  out_->flush();
  ++rows_;
}

void CsvWriter::close() {
  if (closed_) return;
  closed_ = true;
  *out_ << metadata_line(hash_) << '\n';
  out_->flush();
}

}  // namespace ovalab
