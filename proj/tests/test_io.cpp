#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <sstream>

#include "ovalab/common.hpp"
#include "ovalab/io.hpp"

using namespace ovalab;

TEST_CASE("curve JSON round trip") {
  auto c = make_named_curve("ellipse", {}, 64).curve;
  auto back = parse_curve_json(curve_to_json(c));
  REQUIRE(back.size() == c.size());
  CHECK(back.length() == c.length());
  CHECK(back.dim() == 2);
  for (std::size_t i = 0; i < c.size(); ++i) CHECK(back.theta()[i] == c.theta()[i]);

  // a great circle in R^3, 16 tangents
  std::string json = R"({"tangents": [)";
  for (int i = 0; i < 16; ++i) {
    double a = kTwoPi * (i + 0.5) / 16;
    json += (i ? "," : "") + std::string("[") + format_number(-std::sin(a)) + ",0," + format_number(std::cos(a)) + "]";
  }
  auto t = parse_curve_json(json + "]}");
  CHECK(t.dim() == 3);
  CHECK(t.length() == doctest::Approx(kTwoPi));
  CHECK(t.closure_defect() < 1e-12);
}

TEST_CASE("harmonic JSON round trip") {
  std::vector<double> v(40);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::sin(0.7 * i) + (i == 3 ? 1e-17 : 0.0);
  HarmonicField f(2, v);
  auto g = parse_harmonic_json(harmonic_to_json(f));
  REQUIRE(g.size() == 20);
  for (std::size_t i = 0; i < v.size(); ++i) CHECK(g.samples()[i] == v[i]);
}

TEST_CASE("malformed JSON") {
  CHECK_THROWS_AS(parse_curve_json("{"), ValidationError);
  CHECK_THROWS_AS(parse_curve_json("[1, 2]"), ValidationError);
  CHECK_THROWS_AS(parse_curve_json(R"({"dim": 2, "theta": "x"})"), ValidationError);
  CHECK_THROWS_AS(parse_curve_json(R"({"dim": 2.5, "theta": [0, 1, 2, 3]})"), ValidationError);
  CHECK_THROWS_AS(parse_curve_json(R"({"dim": 2, "length": -1, "theta": [0, 1, 2, 3]})"), ValidationError);
  CHECK_THROWS_AS(parse_harmonic_json(R"({"dim": 2, "psi": [[1, 0], [0]]})"), ValidationError);
  CHECK_THROWS_AS(read_text_file("/nonexistent/ovalab/file.json"), ValidationError);
}

TEST_CASE("number formatting") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1.0) == "1");
  CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK(format_number(NAN) == "nan");
  CHECK(format_number(-INFINITY) == "-inf");
}

TEST_CASE("CSV writer") {
  std::ostringstream out;
  {
    CsvWriter w(out, {"a", "b"}, 0x1234);
    w.row({1.0, 0.5});
    w.row_text({"x", "2"});
    CHECK(w.rows() == 2);
    CHECK_THROWS_AS(w.row({1.0}), ValidationError);
  }
  std::string expected = "a,b\n1,0.5\nx,2\n" + metadata_line(0x1234) + "\n";
  CHECK(out.str() == expected);
  CHECK(metadata_line(0x1234).find("config=0000000000001234") != std::string::npos);

  // rows reach the file before close
  auto path = (std::filesystem::temp_directory_path() / "ovalab_io_test.csv").string();
  {
    CsvWriter w(path, {"s"}, 7);
    w.row({0.25});
    CHECK(read_text_file(path) == "s\n0.25\n");
    w.close();
    w.close();
    CHECK(read_text_file(path) == "s\n0.25\n" + metadata_line(7) + "\n");
  }
  std::filesystem::remove(path);
}
