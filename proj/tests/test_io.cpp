#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "beamspec/io.hpp"
#include "beamspec/weights.hpp"

using namespace beamspec;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch_dir(const std::string& tag) {
  std::random_device rd;
  const fs::path p = fs::temp_directory_path() / ("beamspec_io_" + tag + "_" + std::to_string(rd()));
  fs::remove_all(p);
  return p;
}

std::size_t count_of(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (std::size_t pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) ++n;
  return n;
}

Branch toy_branch(int k, int sigma, double origin) {
  const Grid g(16);
  Branch b;
  b.k = k;
  b.sigma = sigma;
  b.origin_mu = origin;
  for (int i = 0; i < 5; ++i) {
    BranchPoint p{origin - 3.0 * i, SampledFn::sample(g, [&](double t) { return sigma * 0.1 * i * t * (1 - t); })};
    p.norm = e_norm(p.u);
    p.profile.count = k - 1;
    p.profile.sigma = sigma;
    p.arclength = 0.5 * i;
    b.points.push_back(p);
  }
  return b;
}

}  // namespace

TEST_CASE("fnv-1a reference vectors") {
  CHECK(checksum_hex("") == "cbf29ce484222325");
  CHECK(checksum_hex("a") == "af63dc4c8601ec8c");
  CHECK(checksum_hex("foobar") == "85944171f73967e8");
  CHECK(fnv1a64("") == 14695981039346656037ull);
}

TEST_CASE("doubles are written with 17 significant digits") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(2.0) == "2");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("branch csv layout") {
  const Branch b = toy_branch(2, -1, 100.0);
  const std::string csv = branch_csv(b);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "step,arclength,mu,enorm,count,sigma");
  int rows = 0;
  while (std::getline(in, line)) {
    std::istringstream row(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(row, cell, ',')) cells.push_back(cell);
    REQUIRE(cells.size() == 6);
    CHECK(std::stoi(cells[0]) == rows);
    CHECK(std::stod(cells[2]) == b.points[rows].mu);
    CHECK(std::stod(cells[3]) == b.points[rows].norm.value);
    CHECK(cells[4] == "1");
    CHECK(cells[5] == "-1");
    ++rows;
  }
  CHECK(rows == 5);
}

TEST_CASE("bifurcation diagram") {
  const std::vector<Branch> bs{toy_branch(1, 1, 100.0), toy_branch(1, -1, 100.0), toy_branch(2, 1, 1600.0)};
  const std::string svg = render_diagram(bs);
  CHECK(svg == render_diagram(bs));
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(count_of(svg, "<polyline") == 3);
  CHECK(count_of(svg, "<circle") >= 2);
  CHECK(svg.find("k=2 nu=+ sigma=+") != std::string::npos);
  CHECK(svg.find("k=1 nu=+ sigma=-") != std::string::npos);
  const std::string single = render_diagram({toy_branch(1, 1, 100.0)});
  CHECK(count_of(single, "<polyline") == 1);
  CHECK_NOTHROW(render_diagram({}));
}

TEST_CASE("json builders") {
  const SpectrumResult s = eigen_pencil(builtin_weight("one").sample(Grid(100)), 2, 1, "one");
  const Json j = spectrum_json(s, [](const EigenPair& p) { return "phi_" + std::to_string(p.k) + ".csv"; });
  CHECK(j["weight_id"] == "one");
  CHECK(j["n"] == 100);
  REQUIRE(j["positive"].size() == 2);
  CHECK(j["positive"][1]["phi_csv_ref"] == "phi_2.csv");
  CHECK(j["positive"][0]["mu"].get<double>() == s.positive[0].mu);
  CHECK(j["negative"].empty());
  CHECK(j["no_negative_spectrum"] == true);

  DivergenceReport d;
  d.side = -1;
  d.counts = {0, 1};
  d.pass = true;
  const Json dj = divergence_json(d);
  CHECK(dj["side"] == "-");
  CHECK(dj["counts"] == Json::array({0, 1}));

  NodalProfile p;
  p.count = 1;
  p.sigma = -1;
  p.zeros.push_back(ZeroRecord{0.5, ZeroKind::GeneralizedSimple});
  const Json pj = profile_json(p);
  CHECK(pj["zeros"][0]["kind"] == "generalized_simple");
}

TEST_CASE("output writer and manifest") {
  const fs::path root = scratch_dir("writer");
  OutputWriter w(root);
  w.write("b/second.txt", "two");
  w.write("a.txt", "first");
  w.write("b/second.txt", "two!");
  w.write_manifest(Json{{"n", 10}}, "9.9");
  CHECK(slurp(root / "b" / "second.txt") == "two!");
  const std::string text = slurp(root / "manifest.json");
  CHECK(text.back() == '\n');
  const Json m = Json::parse(text);
  CHECK(m["tool"] == "beamspec");
  CHECK(m["version"] == "9.9");
  CHECK(m["inputs"]["n"] == 10);
  REQUIRE(m["outputs"].size() == 2);
  CHECK(m["outputs"][0]["path"] == "a.txt");
  CHECK(m["outputs"][1]["path"] == "b/second.txt");
  for (const auto& e : m["outputs"]) {
    const std::string body = slurp(root / e["path"].get<std::string>());
    CHECK(e["bytes"] == body.size());
    CHECK(e["fnv1a64"] == checksum_hex(body));
  }
  fs::remove_all(root);
}
