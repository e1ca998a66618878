#include "beamspec/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <thread>

#include "beamspec/analysis.hpp"
#include "beamspec/io.hpp"
#include "beamspec/nodal.hpp"
#include "beamspec/weights.hpp"

namespace beamspec {

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Usage:
    case ErrorKind::TooCoarse:
    case ErrorKind::GridMismatch:
    case ErrorKind::OutOfDomain:
      return 1;
    case ErrorKind::GammaNotAdmissible:
    case ErrorKind::NotInWeightClass:
    case ErrorKind::AsymptoticMismatch:
    case ErrorKind::HypothesisViolated:
    case ErrorKind::NoNegativeSpectrum:
    case ErrorKind::BoundaryViolation:
    case ErrorKind::OnEigenvalue:
    case ErrorKind::NoSignChange:
    case ErrorKind::TrivialFunction:
      return 2;
    default:
      return 3;
  }
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct RunConfig {
  std::string command;
  int n = 2000;
  std::string weight = "one";
  std::string out = "beamspec_out";
  int kmax = 6;
  std::vector<int> k{1};
  std::string nu = "+";
  std::string sigma = "both";
  std::string g = "cubic";
  std::string f;
  double gamma = kNaN;
  std::vector<std::string> params;
  std::uint64_t seed = 1;
  int pairs = 200;
  int samples = 25;
  int range_n = 0;
  int stride = 25;
  ContinuationConfig cont;
};

int parse_sign(const std::string& s) {
  if (s == "+" || s == "+1" || s == "1" || s == "plus") return +1;
  if (s == "-" || s == "-1" || s == "minus") return -1;
  throw Error(ErrorKind::Usage, "sign must be + or -, got '" + s + "'");
}

std::vector<int> sigma_list(const std::string& s) {
  if (s == "both") return {+1, -1};
  return {parse_sign(s)};
}

char sign_char(int s) { return s > 0 ? '+' : '-'; }

std::string label(int k, int nu, int sigma) {
  return "k" + std::to_string(k) + "_nu" + sign_char(nu) + "_sigma" + sign_char(sigma);
}

Params parse_params(const std::vector<std::string>& raw) {
  Params p;
  for (const auto& kv : raw) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw Error(ErrorKind::Usage, "--param expects key=value, got '" + kv + "'");
    try {
      std::size_t used = 0;
      const std::string value = kv.substr(eq + 1);
      p[kv.substr(0, eq)] = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::Usage, "--param value is not a number in '" + kv + "'");
    }
  }
  return p;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Usage, "cannot read '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

bool is_builtin_weight(const std::string& name) {
  const auto names = builtin_weight_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

Weight load_weight(const std::string& spec, Json& inputs) {
  if (is_builtin_weight(spec)) return builtin_weight(spec);
  if (!std::filesystem::is_regular_file(spec)) {
    throw Error(ErrorKind::Usage, "weight '" + spec + "' is neither a builtin nor a readable CSV file");
  }
  const std::string text = read_file(spec);
  inputs["weight_file_fnv1a64"] = checksum_hex(text);
  std::istringstream in(text);
  const SampledFn table = read_csv(in);
  const auto v = table.values();
  return tabulated_weight(std::filesystem::path(spec).stem().string(), table.grid().nodes(),
                          std::vector<double>(v.begin(), v.end()));
}

AsymptoticF load_f(const std::string& spec, const Params& params, Json& inputs) {
  const auto names = builtin_asymptotic_names();
  if (std::find(names.begin(), names.end(), spec) != names.end()) return builtin_asymptotic(spec, params);
  if (!std::filesystem::is_regular_file(spec)) {
    throw Error(ErrorKind::Usage, "nonlinearity '" + spec + "' is neither a builtin nor a readable CSV file");
  }
  const std::string text = read_file(spec);
  inputs["f_file_fnv1a64"] = checksum_hex(text);
  std::istringstream in(text);
  return read_asymptotic_csv(in, std::filesystem::path(spec).stem().string());
}

template <class F>
void parallel_for(std::size_t count, F&& body) {
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(thread_budget()), count);
  std::vector<std::exception_ptr> errors(count);
  auto work = [&](std::size_t begin) {
    for (std::size_t i = begin; i < count; i += std::max<std::size_t>(workers, 1)) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

Json config_json(const RunConfig& c) {
  Json j;
  j["command"] = c.command;
  j["n"] = c.n;
  j["weight"] = c.weight;
  if (c.command == "spectrum") j["kmax"] = c.kmax;
  if (c.command == "degree") j["samples"] = c.samples;
  if (c.command == "sturm" || c.command == "verify-all") {
    j["seed"] = c.seed;
    j["pairs"] = c.pairs;
  }
  if (c.command == "branch" || c.command == "solve") {
    j["k"] = c.k;
    j["nu"] = c.nu;
    j["sigma"] = c.sigma;
    if (!c.f.empty()) {
      j["f"] = c.f;
      j["gamma"] = c.gamma;
    } else {
      j["g"] = c.g;
    }
    j["params"] = c.params;
    j["range_n"] = c.range_n;
    j["stride"] = c.stride;
  }
  if (c.command == "branch" || c.command == "solve" || c.command == "verify-all") {
    j["continuation"] = {{"ds", c.cont.ds},
                         {"ds_min", c.cont.ds_min},
                         {"ds_max", c.cont.ds_max},
                         {"eps_start", c.cont.eps_start},
                         {"corrector_tol", c.cont.corrector_tol},
                         {"max_steps", c.cont.max_steps},
                         {"norm_budget", c.cont.norm_budget}};
  }
  return j;
}

Json branch_summary(const Branch& b) {
  return {{"k", b.k},
          {"nu", std::string(1, sign_char(b.nu))},
          {"sigma", std::string(1, sign_char(b.sigma))},
          {"origin_mu", b.origin_mu},
          {"eps", b.eps},
          {"points", b.points.size()},
          {"termination", to_string(b.termination)},
          {"diagnostic", b.diagnostic},
          {"rejected_profile_changes", b.rejected_profile_changes},
          {"rejected_double_zeros", b.rejected_double_zeros}};
}

/// Branch CSV plus every stride-th solution (and the last) in a sidecar directory.
Json write_branch(OutputWriter& w, const std::string& dir, const std::string& name, const Branch& b, int stride) {
  Json j = branch_summary(b);
  const std::string csv = dir + "/" + name + ".csv";
  w.write(csv, branch_csv(b));
  j["csv"] = csv;
  Json sidecar = Json::array();
  if (stride > 0) {
    for (std::size_t i = 0; i < b.points.size(); ++i) {
      if (i % static_cast<std::size_t>(stride) != 0 && i + 1 != b.points.size()) continue;
      char file[32];
      std::snprintf(file, sizeof file, "u_%05zu.csv", i);
      const std::string path = dir + "/" + name + "/" + file;
      w.write(path, to_csv(b.points[i].u));
      sidecar.push_back({{"step", i}, {"path", path}});
    }
  }
  j["solutions"] = sidecar;
  return j;
}

void print_branch_line(const std::string& name, const Branch& b) {
  std::printf("%-22s origin_mu=%-14.8g points=%-5zu termination=%s\n", name.c_str(), b.origin_mu,
              b.points.size(), to_string(b.termination).c_str());
}

int cmd_spectrum(const RunConfig& c, OutputWriter& w, Json& inputs) {
  if (c.kmax < 1 || c.kmax > kMaxEigenCount) {
    throw Error(ErrorKind::Usage, "--kmax must lie in [1, " + std::to_string(kMaxEigenCount) + "]");
  }
  const Grid grid(c.n);
  const Weight weight = load_weight(c.weight, inputs);
  const SampledFn m = weight.sample(grid);
  const auto in = m.interior();
  const bool has_pos = *std::max_element(in.begin(), in.end()) > 0.0;
  const bool has_neg = *std::min_element(in.begin(), in.end()) < 0.0;
  const SpectrumResult s = eigen_pencil(m, has_pos ? c.kmax : 0, has_neg ? c.kmax : 0, weight.id, false);
  auto phi_path = [](const EigenPair& p) {
    return std::string("eigenfunctions/phi_") + (p.nu > 0 ? "pos" : "neg") + "_k" + std::to_string(p.k) + ".csv";
  };
  Json j = spectrum_json(s, phi_path);
  Json nodal = Json::array();
  std::printf("%-4s %-3s %-22s %-6s %s\n", "sign", "k", "mu", "zeros", "profile");
  for (const auto* list : {&s.positive, &s.negative}) {
    for (const auto& p : *list) {
      w.write(phi_path(p), to_csv(p.phi));
      const NodalProfile prof = nodal_profile(p.phi);
      Json row = {{"k", p.k}, {"nu", std::string(1, sign_char(p.nu))}};
      row["profile"] = profile_json(prof);
      nodal.push_back(row);
      std::printf("%-4c %-3d %-22.15g %-6d %s\n", sign_char(p.nu), p.k, p.mu, prof.count,
                  prof.count == p.k - 1 ? "ok" : "count != k-1");
    }
  }
  const NodalOrderReport order = order_by_nodal(s);
  j["nodal"] = nodal;
  j["nodal_violations"] = order.violations;
  w.write("spectrum.json", j.dump(2) + "\n");
  if (s.positive.empty() || s.negative.empty()) {
    std::printf("%s sequence empty\n", s.positive.empty() ? "positive" : "negative");
  }
  for (const auto& v : order.violations) std::printf("nodal violation: %s\n", v.c_str());
  return 0;
}

int cmd_degree(const RunConfig& c, OutputWriter& w, Json& inputs) {
  const Grid grid(c.n);
  const Weight weight = load_weight(c.weight, inputs);
  const SampledFn m = weight.sample(grid);
  const auto in = m.interior();
  const bool has_pos = *std::max_element(in.begin(), in.end()) > 0.0;
  const bool has_neg = *std::min_element(in.begin(), in.end()) < 0.0;
  const SpectrumResult s =
      eigen_pencil(m, has_pos ? kMaxEigenCount : 0, has_neg ? kMaxEigenCount : 0, weight.id, false);
  const ParityReport r = degree_parity_sweep(s, parity_samples(s, c.samples));
  w.write("parity.json", parity_json(r).dump(2) + "\n");
  std::printf("%-22s %-5s %-5s %-5s\n", "mu", "det", "count", "match");
  for (const auto& row : r.rows) {
    std::printf("%-22.15g %-5d %-5d %-5s\n", row.mu, row.det_sign, row.eigen_count_below, row.match ? "yes" : "NO");
  }
  const auto mismatches = std::count_if(r.rows.begin(), r.rows.end(), [](const ParityRow& x) { return !x.match; });
  std::printf("rows=%zu mismatches=%td skipped=%zu\n", r.rows.size(), mismatches, r.skipped.size());
  return 0;
}

int cmd_sturm(const RunConfig& c, OutputWriter& w) {
  if (c.pairs < 1) throw Error(ErrorKind::Usage, "--pairs must be positive");
  const SturmSuiteReport r = sturm_suite(c.pairs, c.seed, c.n);
  w.write("sturm.json", sturm_json(r).dump(2) + "\n");
  std::printf("seed=%llu pairs=%zu passed=%d draws=%d identical_control=%s swapped_control=%s\n",
              static_cast<unsigned long long>(r.seed), r.cases.size(), r.passed(), r.draws,
              r.identical_control_rejected ? "rejected" : "ACCEPTED", r.swapped_control_rejected ? "rejected" : "ACCEPTED");
  return 0;
}

ProblemSpec branch_problem(const RunConfig& c, const SampledFn& m, Json& inputs) {
  const Params params = parse_params(c.params);
  if (!c.f.empty()) {
    if (!std::isfinite(c.gamma) || !(c.gamma > 0.0)) throw Error(ErrorKind::Usage, "--gamma > 0 is required with --f");
    return ProblemSpec{m, Autonomous{c.gamma, load_f(c.f, params, inputs)}};
  }
  return ProblemSpec{m, Perturbed{builtin_perturbation(c.g, params)}};
}

int cmd_branch(const RunConfig& c, OutputWriter& w, Json& inputs) {
  c.cont.validate();
  const Grid grid(c.n);
  const Weight weight = load_weight(c.weight, inputs);
  const ProblemSpec spec = branch_problem(c, weight.sample(grid), inputs);
  const int nu = parse_sign(c.nu);
  const int kmax = *std::max_element(c.k.begin(), c.k.end());
  if (*std::min_element(c.k.begin(), c.k.end()) < 1 || kmax > kMaxEigenCount - 1) {
    throw Error(ErrorKind::Usage, "--k must lie in [1, " + std::to_string(kMaxEigenCount - 1) + "]");
  }
  const SpectrumResult s = eigen_pencil(spec.m, nu > 0 ? kmax + 1 : 0, nu < 0 ? kmax + 1 : 0, weight.id, false);
  struct Job {
    int k, sigma;
  };
  std::vector<Job> jobs;
  for (int k : c.k) {
    for (int sigma : sigma_list(c.sigma)) jobs.push_back({k, sigma});
  }
  std::vector<Branch> branches(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t i) {
    const BranchStart start = bifurcation_start(jobs[i].k, nu, jobs[i].sigma, spec, c.cont, s);
    branches[i] = trace_branch(start, spec, c.cont);
  });
  Json list = Json::array();
  for (const auto& b : branches) {
    const std::string name = label(b.k, b.nu, b.sigma);
    list.push_back(write_branch(w, "branches", name, b, c.stride));
    print_branch_line(name, b);
  }
  w.write("branches.json", Json{{"weight_id", weight.id}, {"branches", list}}.dump(2) + "\n");
  w.write("diagram.svg", render_diagram(branches));
  return 0;
}

Json solution_json(OutputWriter& w, const NodalSolution& sol, int stride) {
  const std::string name = label(sol.k, sol.nu, sol.sigma);
  const std::string path = "solutions/" + name + ".csv";
  w.write(path, to_csv(sol.u));
  Json j = {{"k", sol.k},
            {"nu", std::string(1, sign_char(sol.nu))},
            {"sigma", std::string(1, sign_char(sol.sigma))},
            {"csv", path},
            {"residual", sol.residual},
            {"max_abs", sol.u.max_abs()},
            {"enorm", e_norm(sol.u).value}};
  j["profile"] = profile_json(sol.profile);
  j["branch"] = write_branch(w, "branches", name, sol.branch, stride);
  std::printf("%-22s residual=%-10.3e max|u|=%-14.8g zeros=%d\n", name.c_str(), sol.residual, sol.u.max_abs(),
              sol.profile.count);
  return j;
}

int cmd_solve(const RunConfig& c, OutputWriter& w, Json& inputs) {
  c.cont.validate();
  if (c.f.empty()) throw Error(ErrorKind::Usage, "solve requires --f");
  if (!std::isfinite(c.gamma) || !(c.gamma > 0.0)) throw Error(ErrorKind::Usage, "solve requires --gamma > 0");
  const Grid grid(c.n);
  const Weight weight = load_weight(c.weight, inputs);
  const SampledFn m = weight.sample(grid);
  const AsymptoticF f = load_f(c.f, parse_params(c.params), inputs);
  const int nu = parse_sign(c.nu);
  Json out = {{"weight_id", weight.id}, {"f", f.name}, {"f0", f.f0}, {"finf", f.finf}, {"gamma", c.gamma}};
  Json sols = Json::array();
  std::vector<Branch> branches;

  if (c.range_n > 0) {
    if (c.k.size() != 1) throw Error(ErrorKind::Usage, "--range-n takes a single --k");
    const NodalRange r = solve_nodal_range(c.gamma, f, m, c.k.front(), c.range_n, nu, c.cont);
    out["range"] = {{"k", c.k.front()}, {"n", c.range_n}, {"skipped", r.skipped}, {"notice", r.notice}};
    if (r.skipped) std::printf("notice: %s\n", r.notice.c_str());
    for (const auto& sol : r.solutions) {
      sols.push_back(solution_json(w, sol, c.stride));
      branches.push_back(sol.branch);
    }
  } else {
    struct Job {
      int k, sigma;
    };
    std::vector<Job> jobs;
    for (int k : c.k) {
      for (int sigma : sigma_list(c.sigma)) jobs.push_back({k, sigma});
    }
    std::vector<std::optional<NodalSolution>> found(jobs.size());
    parallel_for(jobs.size(),
                 [&](std::size_t i) { found[i].emplace(solve_nodal(c.gamma, f, m, jobs[i].k, nu, jobs[i].sigma, c.cont)); });
    for (const auto& sol : found) {
      sols.push_back(solution_json(w, *sol, c.stride));
      branches.push_back(sol->branch);
    }
  }
  out["solutions"] = sols;
  w.write("solve.json", out.dump(2) + "\n");
  if (!branches.empty()) w.write("diagram.svg", render_diagram(branches));
  return 0;
}

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

int cmd_verify_all(const RunConfig& c, OutputWriter& w) {
  c.cont.validate();
  const Grid grid(c.n);
  std::vector<Check> checks;
  constexpr double kPi4 = std::numbers::pi * std::numbers::pi * std::numbers::pi * std::numbers::pi;

  // Spectra, nodal counts and parity for every builtin weight.
  bool nodal_ok = true, parity_ok = true;
  std::string nodal_detail, parity_detail;
  for (const auto& name : builtin_weight_names()) {
    const SampledFn m = builtin_weight(name).sample(grid);
    const auto in = m.interior();
    const bool has_pos = *std::max_element(in.begin(), in.end()) > 0.0;
    const bool has_neg = *std::min_element(in.begin(), in.end()) < 0.0;
    const SpectrumResult s =
        eigen_pencil(m, has_pos ? kMaxEigenCount : 0, has_neg ? kMaxEigenCount : 0, name, false);
    auto phi_path = [&](const EigenPair& p) {
      return "eigenfunctions/" + name + "_" + (p.nu > 0 ? "pos" : "neg") + "_k" + std::to_string(p.k) + ".csv";
    };
    Json sj = spectrum_json(s, phi_path);
    Json nodal = Json::array();
    int bad = 0;
    for (const auto* list : {&s.positive, &s.negative}) {
      for (const auto& p : *list) {
        if (p.k > 6) continue;
        w.write(phi_path(p), to_csv(p.phi));
        const NodalProfile prof = nodal_profile(p.phi);
        const bool simple = std::all_of(prof.zeros.begin(), prof.zeros.end(),
                                        [](const ZeroRecord& z) { return z.kind == ZeroKind::GeneralizedSimple; });
        if (prof.count != p.k - 1 || !simple) ++bad;
        Json row = {{"k", p.k}, {"nu", std::string(1, sign_char(p.nu))}};
        row["profile"] = profile_json(prof);
        nodal.push_back(row);
      }
    }
    sj["nodal"] = nodal;
    w.write("spectrum_" + name + ".json", sj.dump(2) + "\n");
    if (bad > 0) {
      nodal_ok = false;
      nodal_detail += name + ": " + std::to_string(bad) + " eigenfunctions with count != k-1; ";
    }
    if (name == "one") {
      double worst = 0.0;
      for (int k = 1; k <= 6; ++k) {
        worst = std::max(worst, std::abs(s.pair(k, 1).mu / (std::pow(k * std::numbers::pi, 4)) - 1.0));
      }
      checks.push_back({"analytic spectrum m=1", worst <= 1e-3 && s.negative.empty(),
                        "max |mu_k/(k pi)^4 - 1| = " + fmt("%.3e", worst)});
    }
    const ParityReport pr = degree_parity_sweep(s, parity_samples(s, c.samples));
    w.write("parity_" + name + ".json", parity_json(pr).dump(2) + "\n");
    const auto mism = std::count_if(pr.rows.begin(), pr.rows.end(), [](const ParityRow& r) { return !r.match; });
    if (mism > 0 || pr.rows.empty()) parity_ok = false;
    parity_detail += name + " " + std::to_string(mism) + "/" + std::to_string(pr.rows.size()) + "; ";
  }
  checks.push_back({"nodal count law", nodal_ok, nodal_ok ? "all k <= 6 eigenfunctions have k-1 simple zeros" : nodal_detail});
  checks.push_back({"degree parity", parity_ok, "mismatches per weight: " + parity_detail});

  const SturmSuiteReport sr = sturm_suite(c.pairs, c.seed, c.n);
  w.write("sturm.json", sturm_json(sr).dump(2) + "\n");
  checks.push_back({"sturm comparison",
                    sr.passed() == c.pairs && static_cast<int>(sr.cases.size()) == c.pairs &&
                        sr.identical_control_rejected && sr.swapped_control_rejected,
                    std::to_string(sr.passed()) + "/" + std::to_string(c.pairs) + " pairs, controls " +
                        (sr.identical_control_rejected && sr.swapped_control_rejected ? "rejected" : "NOT rejected")});

  const SpacingReport sp = spacing_check(8, c.n);
  w.write("spacing.json", spacing_json(sp).dump(2) + "\n");
  double sp_err = 0.0;
  for (const auto& r : sp.rows) sp_err = std::max(sp_err, r.max_error);
  checks.push_back({"zero spacing 1/j", sp.pass, "max gap error " + fmt("%.3e", sp_err)});

  double errs[3];
  const int ns[3] = {500, 1000, 2000};
  for (int i = 0; i < 3; ++i) {
    const SpectrumResult s = eigen_pencil(builtin_weight("one").sample(Grid(ns[i])), 1, 0, "one", false);
    errs[i] = std::abs(s.pair(1, 1).mu - kPi4);
  }
  const double r1 = errs[0] / errs[1], r2 = errs[1] / errs[2];
  checks.push_back({"second-order convergence", r1 >= 3.8 && r1 <= 4.2 && r2 >= 3.8 && r2 <= 4.2,
                    "ratios " + fmt("%.4f", r1) + ", " + fmt("%.4f", r2)});

  const std::vector<LabeledBranch> branches = verify_all_branches(c.n, c.cont);
  Json blist = Json::array();
  std::vector<Branch> plain;
  int doubles = 0, profile_breaks = 0, short_branches = 0, total_points = 0;
  std::string sep_detail;
  bool sep_ok = true;
  for (const auto& lb : branches) {
    const Branch& b = lb.branch;
    const std::string name = lb.problem + "_" + label(b.k, b.nu, b.sigma);
    Json j = write_branch(w, "branches", name, b, c.stride);
    j["problem"] = lb.problem;
    if (lb.problem != "cubic") j["gamma"] = lb.gamma;
    blist.push_back(j);
    plain.push_back(b);
    total_points += static_cast<int>(b.points.size());
    if (b.points.size() < 100) ++short_branches;
    for (const auto& p : b.points) {
      for (const auto& z : p.profile.zeros) doubles += z.kind == ZeroKind::GeneralizedDouble;
      if (p.profile.count != b.k - 1 || p.profile.sigma != b.sigma) ++profile_breaks;
    }
  }
  for (std::size_t i = 0; i + 1 < branches.size(); i += 2) {
    const Branch& a = branches[i].branch;
    const Branch& b = branches[i + 1].branch;
    const double d = min_separation(a, b);
    const bool ok = d > 0.5 * std::min(a.eps, b.eps);
    sep_ok = sep_ok && ok;
    sep_detail += branches[i].problem + " k=" + std::to_string(a.k) + " " + fmt("%.3e", d) + "; ";
  }
  w.write("branches.json", Json{{"branches", blist}}.dump(2) + "\n");
  w.write("diagram.svg", render_diagram(plain));
  checks.push_back({"no generalized double zeros on branches", doubles == 0 && short_branches == 0,
                    std::to_string(branches.size()) + " branches, " + std::to_string(total_points) + " points, " +
                        std::to_string(doubles) + " double zeros, " + std::to_string(short_branches) +
                        " branches under 100 points"});
  checks.push_back({"branch containment", profile_breaks == 0 && sep_ok,
                    std::to_string(profile_breaks) + " profile changes; min sigma separation " + sep_detail});

  {
    const SampledFn m = builtin_weight("one").sample(grid);
    const AsymptoticF f = builtin_asymptotic("saturating");
    const SpectrumResult s = eigen_pencil(m, 3, 0, "one", false);
    Json sols = Json::array();
    bool ok = true;
    std::string detail;
    for (int k : {1, 2}) {
      const double gamma = 0.75 * s.pair(k, 1).mu;
      for (int sigma : {+1, -1}) {
        const NodalSolution sol = solve_nodal(gamma, f, m, k, 1, sigma, c.cont);
        const std::string path = "solutions/saturating_" + label(k, 1, sigma) + ".csv";
        w.write(path, to_csv(sol.u));
        sols.push_back({{"k", k}, {"sigma", std::string(1, sign_char(sigma))}, {"gamma", gamma},
                        {"residual", sol.residual}, {"zeros", sol.profile.count}, {"csv", path}});
        if (sol.profile.count != k - 1 || !(sol.residual <= 1e-8)) ok = false;
      }
    }
    bool rejected = false;
    try {
      solve_nodal(0.25 * s.pair(1, 1).mu, f, m, 1, 1, 1, c.cont);
    } catch (const Error& e) {
      rejected = e.kind() == ErrorKind::GammaNotAdmissible;
    }
    const NodalRange range = solve_nodal_range(0.75 * s.pair(1, 1).mu, f, m, 1, 2, 1, c.cont);
    detail = std::string("gamma = 0.25 mu_1 ") + (rejected ? "rejected" : "NOT rejected");
    if (range.skipped) detail += "; (k, n) = (1, 2) skipped: " + range.notice;
    w.write("desk.json", Json{{"solutions", sols}, {"quarter_gamma_rejected", rejected},
                              {"range_skipped", range.skipped}, {"range_notice", range.notice},
                              {"range_solutions", range.solutions.size()}}
                             .dump(2) + "\n");
    checks.push_back({"nodal solutions for saturating f", ok && rejected, detail});
  }

  Json summary = Json::array();
  bool all = true;
  for (const auto& ch : checks) {
    std::printf("%-4s %-40s %s\n", ch.pass ? "PASS" : "FAIL", ch.name.c_str(), ch.detail.c_str());
    summary.push_back({{"check", ch.name}, {"pass", ch.pass}, {"detail", ch.detail}});
    all = all && ch.pass;
  }
  w.write("verify.json", Json{{"all_pass", all}, {"checks", summary}}.dump(2) + "\n");
  return 0;
}

void add_common(CLI::App* sub, RunConfig& c) {
  sub->add_option("--n", c.n, "interior grid nodes")->check(CLI::Range(Grid::kMinInterior, 200000));
  sub->add_option("--weight", c.weight, "builtin weight (one, sin3pi, cos2pi, linear_ramp) or CSV path t,value");
  sub->add_option("--out", c.out, "output directory");
}

void add_continuation(CLI::App* sub, RunConfig& c) {
  sub->add_option("--ds", c.cont.ds, "initial arclength step");
  sub->add_option("--ds-min", c.cont.ds_min, "smallest step before StepFailure");
  sub->add_option("--ds-max", c.cont.ds_max, "largest step");
  sub->add_option("--eps", c.cont.eps_start, "starting amplitude");
  sub->add_option("--tol", c.cont.corrector_tol, "corrector tolerance relative to max|u|");
  sub->add_option("--max-steps", c.cont.max_steps, "step limit per branch");
  sub->add_option("--norm-budget", c.cont.norm_budget, "stop once e_norm exceeds this");
  sub->add_option("--stride", c.stride, "keep every stride-th branch solution as CSV (0: none)")
      ->check(CLI::NonNegativeNumber);
}

void add_problem(CLI::App* sub, RunConfig& c) {
  sub->add_option("--k", c.k, "eigen index, comma separated list allowed")->delimiter(',');
  sub->add_option("--nu", c.nu, "sign of the eigenvalue sequence (+ or -)");
  sub->add_option("--sigma", c.sigma, "branch half: +, - or both");
  sub->add_option("--f", c.f, "asymptotically linear f: linear, saturating, atan, gaussian or CSV path s,f");
  sub->add_option("--gamma", c.gamma, "coefficient gamma in u'''' = gamma m f(u)");
  sub->add_option("--param", c.params, "nonlinearity parameter key=value, repeatable");
}

/// Turns --config JSON entries into flags for keys absent from the command line.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  }
  if (path.empty()) return args;
  Json cfg;
  try {
    cfg = Json::parse(read_file(path));
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::Usage, "config '" + path + "' is not valid JSON: " + e.what());
  }
  if (!cfg.is_object()) throw Error(ErrorKind::Usage, "config must be a JSON object");
  static const std::vector<std::string> kCommands = {"spectrum", "degree", "sturm", "branch", "solve", "verify-all"};
  const bool has_command = std::any_of(args.begin(), args.end(), [](const std::string& a) {
    return std::find(kCommands.begin(), kCommands.end(), a) != kCommands.end();
  });
  if (!has_command && cfg.contains("command")) args.insert(args.begin(), cfg["command"].get<std::string>());
  auto given = [&](const std::string& flag) {
    return std::any_of(args.begin(), args.end(),
                       [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
  };
  auto scalar = [](const Json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_float()) return format_double(v.get<double>());
    return v.dump();
  };
  for (const auto& [key, value] : cfg.items()) {
    if (key == "command") continue;
    std::string flag = "--" + key;
    std::replace(flag.begin() + 2, flag.end(), '_', '-');
    if (given(flag)) continue;
    if ((key == "f" || key == "g") && value.is_object()) {
      args.push_back(flag + "=" + value.value("type", std::string()));
      if (value.contains("params") && !given("--param")) {
        for (const auto& [pk, pv] : value["params"].items()) args.push_back("--param=" + pk + "=" + scalar(pv));
      }
    } else if (value.is_array()) {
      std::string joined;
      for (const auto& v : value) joined += (joined.empty() ? "" : ",") + scalar(v);
      args.push_back(flag + "=" + joined);
    } else {
      args.push_back(flag + "=" + scalar(value));
    }
  }
  return args;
}

}  // namespace

std::vector<LabeledBranch> verify_all_branches(int n_interior, const ContinuationConfig& config) {
  const Grid grid(n_interior);
  const SampledFn m = builtin_weight("one").sample(grid);
  const SpectrumResult s = eigen_pencil(m, 3, 0, "one", false);
  const AsymptoticF sat = builtin_asymptotic("saturating");
  std::vector<LabeledBranch> out;
  std::vector<ProblemSpec> specs;
  for (int k : {1, 2}) {
    for (int sigma : {+1, -1}) {
      out.push_back({"cubic", 0.0, {}});
      out.back().branch.k = k;
      out.back().branch.sigma = sigma;
      specs.push_back(ProblemSpec{m, Perturbed{builtin_perturbation("cubic")}});
    }
  }
  for (int k : {1, 2}) {
    const double gamma = 0.75 * s.pair(k, 1).mu;
    for (int sigma : {+1, -1}) {
      out.push_back({"saturating", gamma, {}});
      out.back().branch.k = k;
      out.back().branch.sigma = sigma;
      specs.push_back(ProblemSpec{m, Autonomous{gamma, sat}});
    }
  }
  parallel_for(out.size(), [&](std::size_t i) {
    const BranchStart start = bifurcation_start(out[i].branch.k, 1, out[i].branch.sigma, specs[i], config, s);
    out[i].branch = trace_branch(start, specs[i], config);
  });
  return out;
}

int run(const std::vector<std::string>& raw) {
  RunConfig c;
  CLI::App app{"beamspec: spectra, nodal solutions and bifurcation branches of u'''' = mu m u + ..."};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  auto* sp = app.add_subcommand("spectrum", "eigenvalues and eigenfunctions of the weighted pencil");
  add_common(sp, c);
  sp->add_option("--kmax", c.kmax, "eigenpairs per sign");

  auto* dg = app.add_subcommand("degree", "degree parity sweep");
  add_common(dg, c);
  dg->add_option("--samples", c.samples, "sample values per sign")->check(CLI::PositiveNumber);

  auto* st = app.add_subcommand("sturm", "randomized Sturm comparison suite");
  add_common(st, c);
  st->add_option("--seed", c.seed, "random seed");
  st->add_option("--pairs", c.pairs, "ordered weight pairs");

  auto* br = app.add_subcommand("branch", "trace bifurcation branches");
  add_common(br, c);
  add_problem(br, c);
  add_continuation(br, c);
  br->add_option("--g", c.g, "perturbation g: none or cubic (ignored with --f)");

  auto* so = app.add_subcommand("solve", "nodal solutions of u'''' = gamma m f(u)");
  add_common(so, c);
  add_problem(so, c);
  add_continuation(so, c);
  so->add_option("--range-n", c.range_n, "solve every index k..range-n at once");

  auto* va = app.add_subcommand("verify-all", "run every verification and write a summary");
  add_common(va, c);
  add_continuation(va, c);
  va->add_option("--seed", c.seed, "random seed for the Sturm suite");
  va->add_option("--pairs", c.pairs, "Sturm pairs");
  va->add_option("--samples", c.samples, "parity samples per sign");

  try {
    std::vector<std::string> args = expand_config(raw);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e.kind());
  }

  try {
    c.command = app.get_subcommands().front()->get_name();
    Json inputs = config_json(c);
    OutputWriter w(c.out);
    int code = 0;
    if (c.command == "spectrum") code = cmd_spectrum(c, w, inputs);
    else if (c.command == "degree") code = cmd_degree(c, w, inputs);
    else if (c.command == "sturm") code = cmd_sturm(c, w);
    else if (c.command == "branch") code = cmd_branch(c, w, inputs);
    else if (c.command == "solve") code = cmd_solve(c, w, inputs);
    else code = cmd_verify_all(c, w);
    w.write_manifest(inputs, kVersion);
    return code;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args);
}

}  // namespace beamspec
