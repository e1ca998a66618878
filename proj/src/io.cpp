#include "beamspec/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include "beamspec/error.hpp"

namespace beamspec {

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string checksum_hex(std::string_view bytes) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Json profile_json(const NodalProfile& p) {
  Json zeros = Json::array();
  for (const auto& z : p.zeros) {
    zeros.push_back({{"t", z.t_star},
                     {"kind", z.kind == ZeroKind::GeneralizedSimple ? "generalized_simple" : "generalized_double"}});
  }
  return {{"count", p.count}, {"sigma", p.sigma}, {"zeros", zeros}};
}

Json spectrum_json(const SpectrumResult& s, const std::function<std::string(const EigenPair&)>& phi_ref) {
  auto list = [&](const std::vector<EigenPair>& pairs) {
    Json a = Json::array();
    for (const auto& p : pairs) a.push_back({{"k", p.k}, {"mu", p.mu}, {"phi_csv_ref", phi_ref(p)}});
    return a;
  };
  Json j = {{"weight_id", s.weight_id},
            {"n", s.grid.n_interior()},
            {"positive", list(s.positive)},
            {"negative", list(s.negative)}};
  if (s.no_negative_spectrum) j["no_negative_spectrum"] = true;
  if (!s.warnings.empty()) j["warnings"] = s.warnings;
  return j;
}

Json parity_json(const ParityReport& r) {
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"mu", row.mu},
                    {"det_sign", row.det_sign},
                    {"eigen_count_below", row.eigen_count_below},
                    {"expected_sign", row.expected_sign},
                    {"match", row.match}});
  }
  return {{"weight_id", r.weight_id}, {"all_match", r.all_match()}, {"rows", rows}, {"skipped", r.skipped}};
}

Json sturm_json(const SturmSuiteReport& r) {
  Json cases = Json::array();
  for (const auto& c : r.cases) {
    cases.push_back({{"k1", c.k1}, {"k2", c.k2}, {"zeros1", c.zeros1}, {"zeros2", c.zeros2}, {"pass", c.pass}});
  }
  return {{"seed", r.seed},
          {"n", r.n},
          {"pairs", r.cases.size()},
          {"passed", r.passed()},
          {"draws", r.draws},
          {"identical_control_rejected", r.identical_control_rejected},
          {"swapped_control_rejected", r.swapped_control_rejected},
          {"cases", cases}};
}

Json divergence_json(const DivergenceReport& r) {
  return {{"side", r.side > 0 ? "+" : "-"}, {"counts", r.counts}, {"pass", r.pass}};
}

Json spacing_json(const SpacingReport& r) {
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"j", row.j}, {"gaps", row.gaps}, {"max_error", row.max_error}, {"pass", row.pass}});
  }
  return {{"pass", r.pass}, {"rows", rows}};
}

std::string branch_csv(const Branch& b) {
  std::string out = "step,arclength,mu,enorm,count,sigma\n";
  for (std::size_t i = 0; i < b.points.size(); ++i) {
    const auto& p = b.points[i];
    out += std::to_string(i) + "," + format_double(p.arclength) + "," + format_double(p.mu) + "," +
           format_double(p.norm.value) + "," + std::to_string(p.profile.count) + "," +
           std::to_string(p.profile.sigma) + "\n";
  }
  return out;
}

std::string render_diagram(const std::vector<Branch>& branches) {
  constexpr double kWidth = 800, kHeight = 560, kLeft = 70, kRight = 180, kTop = 30, kBottom = 50;
  static const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                   "#8c564b", "#e377c2", "#17becf", "#7f7f7f", "#bcbd22"};
  double mu_lo = INFINITY, mu_hi = -INFINITY, y_hi = 0.0;
  for (const auto& b : branches) {
    mu_lo = std::min(mu_lo, b.origin_mu);
    mu_hi = std::max(mu_hi, b.origin_mu);
    for (const auto& p : b.points) {
      mu_lo = std::min(mu_lo, p.mu);
      mu_hi = std::max(mu_hi, p.mu);
      y_hi = std::max(y_hi, p.norm.value);
    }
  }
  if (!std::isfinite(mu_lo)) {
    mu_lo = 0.0;
    mu_hi = 1.0;
  }
  if (mu_hi - mu_lo < 1e-9 * std::max(1.0, std::abs(mu_hi))) {
    const double pad = std::max(1.0, 0.05 * std::abs(mu_hi));
    mu_lo -= pad;
    mu_hi += pad;
  } else {
    const double pad = 0.03 * (mu_hi - mu_lo);
    mu_lo -= pad;
    mu_hi += pad;
  }
  if (!(y_hi > 0.0)) y_hi = 1.0;
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double mu) { return kLeft + (mu - mu_lo) / (mu_hi - mu_lo) * pw; };
  auto py = [&](double y) { return kTop + ph - y / y_hi * ph; };
  auto f3 = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return std::string(buf);
  };
  auto g6 = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return std::string(buf);
  };

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";
  s << "<line x1=\"" << kLeft << "\" y1=\"" << f3(py(0)) << "\" x2=\"" << kLeft + pw << "\" y2=\"" << f3(py(0))
    << "\" stroke=\"black\"/>\n";
  s << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\"" << f3(py(0))
    << "\" stroke=\"black\"/>\n";
  s << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 12 << "\" text-anchor=\"middle\">mu</text>\n";
  s << "<text x=\"16\" y=\"" << kTop + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
    << kTop + ph / 2 << ")\">e_norm</text>\n";
  for (int i = 0; i <= 4; ++i) {
    const double mu = mu_lo + (mu_hi - mu_lo) * i / 4.0;
    const double y = y_hi * i / 4.0;
    s << "<text x=\"" << f3(px(mu)) << "\" y=\"" << f3(py(0) + 16) << "\" text-anchor=\"middle\">" << g6(mu)
      << "</text>\n";
    s << "<text x=\"" << kLeft - 6 << "\" y=\"" << f3(py(y) + 4) << "\" text-anchor=\"end\">" << g6(y)
      << "</text>\n";
  }

  std::map<std::tuple<int, int, int>, std::size_t> colors;
  std::vector<std::tuple<int, int, int>> order;
  for (const auto& b : branches) {
    const auto key = std::make_tuple(b.k, b.nu, b.sigma);
    if (colors.emplace(key, colors.size()).second) order.push_back(key);
  }
  for (const auto& b : branches) {
    const char* color = kPalette[colors[{b.k, b.nu, b.sigma}] % std::size(kPalette)];
    s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    s << f3(px(b.origin_mu)) << "," << f3(py(0));
    for (const auto& p : b.points) s << " " << f3(px(p.mu)) << "," << f3(py(p.norm.value));
    s << "\"/>\n";
  }
  for (const auto& b : branches) {
    s << "<circle cx=\"" << f3(px(b.origin_mu)) << "\" cy=\"" << f3(py(0)) << "\" r=\"3.5\" fill=\"black\"/>\n";
  }
  double ly = kTop + 10;
  for (const auto& key : order) {
    const auto [k, nu, sigma] = key;
    const char* color = kPalette[colors[key] % std::size(kPalette)];
    const double lx = kLeft + pw + 16;
    s << "<line x1=\"" << lx << "\" y1=\"" << ly << "\" x2=\"" << lx + 24 << "\" y2=\"" << ly << "\" stroke=\""
      << color << "\" stroke-width=\"2\"/>\n";
    s << "<text x=\"" << lx + 30 << "\" y=\"" << ly + 4 << "\">k=" << k << " nu=" << (nu > 0 ? '+' : '-')
      << " sigma=" << (sigma > 0 ? '+' : '-') << "</text>\n";
    ly += 18;
  }
  s << "</svg>\n";
  return s.str();
}

OutputWriter::OutputWriter(std::filesystem::path root) : root_(std::move(root)) {
  std::filesystem::create_directories(root_);
}

void OutputWriter::write(const std::string& relative, std::string_view content) {
  const std::filesystem::path target = root_ / relative;
  if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
  std::ofstream out(target, std::ios::binary);
  if (!out) throw Error(ErrorKind::Usage, "cannot write " + target.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(ErrorKind::Usage, "failed writing " + target.string());
  const auto it = std::find_if(entries_.begin(), entries_.end(), [&](const Entry& e) { return e.path == relative; });
  Entry e{relative, content.size(), checksum_hex(content)};
  if (it == entries_.end()) {
    entries_.push_back(std::move(e));
  } else {
    *it = std::move(e);
  }
}

void OutputWriter::write_manifest(const Json& inputs, const std::string& version) {
  std::vector<Entry> sorted = entries_;
  std::sort(sorted.begin(), sorted.end(), [](const Entry& a, const Entry& b) { return a.path < b.path; });
  Json outputs = Json::array();
  for (const auto& e : sorted) outputs.push_back({{"path", e.path}, {"bytes", e.bytes}, {"fnv1a64", e.checksum}});
  const Json manifest = {{"tool", "beamspec"}, {"version", version}, {"inputs", inputs}, {"outputs", outputs}};
  const std::string text = manifest.dump(2) + "\n";
  std::ofstream out(root_ / "manifest.json", std::ios::binary);
  if (!out) throw Error(ErrorKind::Usage, "cannot write manifest.json");
  out << text;
}

}  // namespace beamspec
