#include <CLI11.hpp>

#include <cnwave/approx.hpp>
#include <cnwave/elliptic.hpp>
#include <cnwave/experiment.hpp>
#include <cnwave/linop.hpp>
#include <cnwave/modulation.hpp>
#include <cnwave/profiles.hpp>
#include <cnwave/torus.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

// exit codes: 0 pass, 1 acceptance failure, 2 usage error, 3 numerical failure

namespace {

constexpr const char* kRunHeader = "t,m,gamma,xi_l2,xi_h1,eta_h1,lyap,lyap_eps";

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

void print_row(const std::vector<std::string>& cells) {
  for (size_t i = 0; i < cells.size(); ++i)
    std::printf("%s%s", cells[i].c_str(), i + 1 < cells.size() ? "," : "\n");
}

void write_row(std::ostream& os, const std::vector<std::string>& cells) {
  for (size_t i = 0; i < cells.size(); ++i)
    os << cells[i] << (i + 1 < cells.size() ? "," : "\n");
}

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  size_t start = 0;
  for (size_t i = 0; i <= s.size(); ++i)
    if (i == s.size() || s[i] == sep) {
      out.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  return out;
}

double parse_double(const std::string& s) {
  const std::string t = trim(s);
  size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(t, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("not a number: '" + s + "'");
  }
  if (pos != t.size()) throw std::invalid_argument("not a number: '" + s + "'");
  return v;
}

long parse_long(const std::string& s) {
  const std::string t = trim(s);
  size_t pos = 0;
  long v = 0;
  try {
    v = std::stol(t, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("not an integer: '" + s + "'");
  }
  if (pos != t.size())
    throw std::invalid_argument("not an integer: '" + s + "'");
  return v;
}

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  for (const auto& cell : split(s, ',')) {
    const std::string t = trim(cell);
    if (t.empty()) continue;
    out.push_back(parse_double(t));
  }
  return out;
}

// ---------------------------------------------------------------------------
// elliptic

int run_elliptic_eval(double k, bool have_x, double x) {
  cnwave::Modulus m(k);
  auto v = cnwave::elliptic_values(m);
  if (!have_x) {
    print_row({"k", "K", "E", "Theta"});
    print_row({fmt(k), fmt(v.K), fmt(v.E), fmt(v.Theta)});
  } else {
    auto j = cnwave::jacobi(x, m);
    print_row({"k", "x", "K", "E", "Theta", "sn", "cn", "dn"});
    print_row({fmt(k), fmt(x), fmt(v.K), fmt(v.E), fmt(v.Theta), fmt(j.sn),
               fmt(j.cn), fmt(j.dn)});
  }
  return 0;
}

// ---------------------------------------------------------------------------
// profile

int run_profile(double m, int n, bool info_only) {
  auto p = cnwave::build_profile(m, n);
  if (info_only) {
    print_row({"m", "k", "omega", "l2_norm", "h1_norm"});
    print_row({fmt(p.m), fmt(p.k.k), fmt(p.omega),
               fmt(cnwave::l2_norm(p.field)), fmt(cnwave::h1_norm(p.field))});
    return 0;
  }
  print_row({"x", "Q"});
  const auto& s = p.field.samples();
  for (int j = 0; j < n; ++j)
    print_row({fmt(cnwave::two_pi * j / n), fmt(s[j].real())});
  return 0;
}

// ---------------------------------------------------------------------------
// spectrum

cnwave::OperatorKind parse_kind(const std::string& which) {
  if (which == "L+" || which == "l+" || which == "Lplus" || which == "lplus")
    return cnwave::OperatorKind::Lplus;
  if (which == "L-" || which == "l-" || which == "Lminus" || which == "lminus")
    return cnwave::OperatorKind::Lminus;
  throw std::invalid_argument("unknown operator '" + which +
                              "' (expected L+ or L-)");
}

cnwave::Sector parse_sector(const std::string& name) {
  if (name == "full") return cnwave::Sector::Full;
  if (name == "s") return cnwave::Sector::S;
  if (name == "aplus" || name == "a+") return cnwave::Sector::Aplus;
  if (name == "aminus" || name == "a-") return cnwave::Sector::Aminus;
  throw std::invalid_argument("unknown sector '" + name +
                              "' (expected full, s, aplus, aminus)");
}

// closed-form eigenvalues that land in the requested sector, ascending
std::vector<double> closed_eigenvalues_for(cnwave::OperatorKind kind,
                                           cnwave::Sector sec,
                                           cnwave::Modulus k) {
  using cnwave::Sector;
  struct Tagged {
    double value;
    Sector sector;
  };
  std::vector<Tagged> all;
  if (kind == cnwave::OperatorKind::Lminus) {
    auto c = cnwave::lminus_eigenvalues_closed(k);
    all = {{c[0], Sector::S}, {c[1], Sector::Aplus}, {c[2], Sector::Aminus}};
  } else {
    auto c = cnwave::lplus_eigenvalues_closed(k);
    all = {{c[0], Sector::S},
           {c[1], Sector::Aplus},
           {c[2], Sector::Aminus},
           {c[3], Sector::S},
           {c[4], Sector::S}};
  }
  std::vector<double> out;
  for (const auto& t : all)
    if (sec == Sector::Full || sec == t.sector) out.push_back(t.value);
  std::sort(out.begin(), out.end());
  return out;
}

int run_spectrum(double m, const std::string& which, const std::string& sector,
                 int count, int grid) {
  auto kind = parse_kind(which);
  auto sec = parse_sector(sector);
  auto p = cnwave::build_profile(m, grid);
  auto op = cnwave::assemble(kind, p, sec);
  auto sp = cnwave::spectrum(op, count);
  auto closed = closed_eigenvalues_for(kind, sec, p.k);
  print_row({"index", "lambda", "closed_form", "frac_s", "frac_aplus",
             "frac_aminus"});
  for (int i = 0; i < count; ++i) {
    auto f = cnwave::sector_fractions(sp.eigenvectors[i]);
    print_row({std::to_string(i), fmt(sp.eigenvalues[i]),
               i < static_cast<int>(closed.size()) ? fmt(closed[i]) : "",
               fmt(f.s), fmt(f.aplus), fmt(f.aminus)});
  }
  return 0;
}

// ---------------------------------------------------------------------------
// approx

int run_approx(double m, double eps, int n, const std::string& samples_out) {
  auto a = cnwave::build_corrected(m, eps, n);
  std::string ratio_q, ratio_lambda, forcing;
  if (eps > 0) {
    auto rep = cnwave::closeness_report(a);
    ratio_q = fmt(rep.ratio_q);
    ratio_lambda = fmt(rep.ratio_lambda);
    forcing = fmt(cnwave::forcing_residual(m, eps, n));
  }
  print_row({"m", "eps", "lambda", "newton_residual", "iterations", "ratio_q",
             "ratio_lambda", "forcing_residual"});
  print_row({fmt(m), fmt(eps), fmt(a.lambda), fmt(a.newton_residual),
             std::to_string(a.iterations), ratio_q, ratio_lambda, forcing});
  if (!samples_out.empty()) {
    std::ofstream os(samples_out);
    if (!os)
      throw std::runtime_error("cannot open output file: " + samples_out);
    os << "x,re,im\n";
    const auto& s = a.field.samples();
    for (int j = 0; j < n; ++j)
      write_row(os, {fmt(cnwave::two_pi * j / n), fmt(s[j].real()),
                     fmt(s[j].imag())});
  }
  return 0;
}

// ---------------------------------------------------------------------------
// evolve

void write_run_csv(const std::string& path,
                   const std::vector<cnwave::DiagnosticsRecord>& recs) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open output file: " + path);
  os << kRunHeader << '\n';
  for (const auto& r : recs)
    write_row(os, {fmt(r.t), fmt(r.m), fmt(r.gamma), fmt(r.xi_l2),
                   fmt(r.xi_h1), fmt(r.eta_h1), fmt(r.lyap), fmt(r.lyap_eps)});
}

int run_evolve(const cnwave::TrajectoryConfig& tc, const std::string& out) {
  auto res = cnwave::run_trajectory(tc);
  write_run_csv(out, res.records);
  std::fprintf(stderr, "wrote %zu samples to %s\n", res.records.size(),
               out.c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// report

std::vector<cnwave::DiagnosticsRecord> read_run_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::invalid_argument("cannot open input file: " + path);
  std::string line;
  if (!std::getline(is, line))
    throw std::invalid_argument("empty CSV: " + path);
  if (trim(line).rfind("t,m,gamma", 0) != 0)
    throw std::invalid_argument("unrecognized CSV header in " + path);
  std::vector<cnwave::DiagnosticsRecord> out;
  while (std::getline(is, line)) {
    if (trim(line).empty()) continue;
    auto cells = split(line, ',');
    if (cells.size() < 8)
      throw std::invalid_argument("short row in " + path);
    cnwave::DiagnosticsRecord r;
    r.t = parse_double(cells[0]);
    r.m = parse_double(cells[1]);
    r.gamma = parse_double(cells[2]);
    r.xi_l2 = parse_double(cells[3]);
    r.xi_h1 = parse_double(cells[4]);
    r.eta_h1 = parse_double(cells[5]);
    r.lyap = parse_double(cells[6]);
    r.lyap_eps = parse_double(cells[7]);
    out.push_back(r);
  }
  return out;
}

struct FileReport {
  std::string file;
  double m0 = 0;
  double eps = 0;
  size_t samples = 0;
  cnwave::StabilityReport rep;
  cnwave::RateEstimates rates;
};

// reconstruct omega(m(t)) and lambda(m(t), eps) from the stored mass column,
// then rebuild the rate and decay summaries
FileReport analyze_run_csv(const std::string& path, int n_grid) {
  auto recs = read_run_csv(path);
  if (recs.size() < 3)
    throw std::invalid_argument("need at least 3 samples in " + path);
  FileReport fr;
  fr.file = path;
  fr.samples = recs.size();
  fr.m0 = recs.front().m;

  const auto& a = recs.front();
  const auto& b = recs.back();
  if (!(b.t > a.t) || !(a.m > 0) || !(b.m > 0))
    throw std::invalid_argument("degenerate time or mass column in " + path);
  double eps = std::log(a.m / b.m) / (2.0 * (b.t - a.t));
  if (std::fabs(eps) < 1e-15) eps = 0.0;
  if (eps < 0)
    throw std::invalid_argument("mass grows along " + path +
                                "; not a damped run");
  fr.eps = eps;

  cnwave::ApproxProfile warm;
  bool have_warm = false;
  for (auto& r : recs) {
    auto p = cnwave::build_profile(r.m, n_grid);
    r.omega = p.omega;
    if (eps > 0) {
      cnwave::ApproxProfile ap =
          have_warm ? cnwave::build_corrected(r.m, eps, n_grid, warm)
                    : cnwave::build_corrected(r.m, eps, n_grid);
      warm = ap;
      have_warm = true;
      r.lambda_eps = ap.lambda;
    } else {
      r.lambda_eps = p.omega;
    }
  }
  cnwave::fill_gamma_dot(recs);
  fr.rep = cnwave::decay_report(recs, eps, fr.m0);
  fr.rates = cnwave::rate_estimates(recs, eps);
  return fr;
}

std::vector<std::string> report_row(const FileReport& fr) {
  return {fr.file,
          fmt(fr.m0),
          fmt(fr.eps),
          std::to_string(fr.samples),
          fmt(fr.rep.sup_envelope),
          fmt(fr.rep.sup_envelope_scaled),
          fmt(fr.rep.envelope_K),
          fmt(fr.rates.omega_rate),
          fmt(fr.rates.lambda_rate),
          std::to_string(fr.rep.out_of_window)};
}

constexpr const char* kReportHeader =
    "file,m0,eps,samples,sup_envelope,sup_scaled,envelope_K,omega_rate,"
    "lambda_rate,out_of_window";

int run_report(const std::vector<std::string>& files, int n_grid,
               const std::string& out) {
  std::vector<FileReport> reports;
  reports.reserve(files.size());
  for (const auto& f : files) reports.push_back(analyze_run_csv(f, n_grid));

  print_row(split(kReportHeader, ','));
  for (const auto& fr : reports) print_row(report_row(fr));

  if (!out.empty()) {
    std::ofstream os(out);
    if (!os) throw std::runtime_error("cannot open output file: " + out);
    os << kReportHeader << '\n';
    for (const auto& fr : reports) write_row(os, report_row(fr));
  }

  // stability-of-constant check: within each m0 group, the scaled sup over
  // the damped runs must agree to within a factor 2. The recorded initial
  // mass includes the perturbation's own mass, so runs of one sweep differ
  // at the amp^2 level; cluster masses within 1% instead of exact matching.
  bool all_pass = true;
  std::vector<const FileReport*> damped;
  for (const auto& fr : reports)
    if (fr.eps > 0) damped.push_back(&fr);
  std::sort(damped.begin(), damped.end(),
            [](const FileReport* a, const FileReport* b) { return a->m0 < b->m0; });
  std::vector<std::vector<const FileReport*>> groups;
  for (const auto* fr : damped) {
    if (groups.empty() || fr->m0 > 1.01 * groups.back().front()->m0)
      groups.emplace_back();
    groups.back().push_back(fr);
  }
  for (const auto& grp : groups) {
    if (grp.size() < 2) continue;
    double lo = 1e300, hi = 0;
    for (const auto* fr : grp) {
      lo = std::min(lo, fr->rep.sup_envelope_scaled);
      hi = std::max(hi, fr->rep.sup_envelope_scaled);
    }
    const double variation = lo > 0 ? hi / lo : 1e300;
    const bool pass = variation < 2.0;
    all_pass = all_pass && pass;
    std::printf("check,scaled_sup_variation_m0=%s,%s,<2,%s\n",
                fmt_short(grp.front()->m0).c_str(), fmt(variation).c_str(),
                pass ? "PASS" : "FAIL");
  }
  return all_pass ? 0 : 1;
}

// ---------------------------------------------------------------------------
// suite

struct SuiteConfig {
  std::vector<double> m0_list{0.5, 1.0};
  std::vector<double> eps_list{0.02, 0.01, 0.005};
  bool amp_equals_eps = true;  // perturb_amp = eps unless a fixed value is set
  double perturb_amp = 0.0;
  double dt = 1e-3;
  int n_grid = 256;
  double t_mult = 3.0;  // t_end = min(t_mult / eps, eps^{-3/2}, t_cap);
                        // t_mult = 0 drops the first term
  double t_cap = 5000.0;
  int sample_every = 100;
  unsigned seed = 12345;
  std::string output_dir = "runs";
};

double suite_t_end(const SuiteConfig& sc, double eps) {
  double t = std::min(std::pow(eps, -1.5), sc.t_cap);
  if (sc.t_mult > 0) t = std::min(t, sc.t_mult / eps);
  return t;
}

void validate_suite(const SuiteConfig& sc) {
  if (sc.m0_list.empty()) throw std::invalid_argument("m0_list is empty");
  if (sc.eps_list.empty()) throw std::invalid_argument("eps_list is empty");
  for (double m : sc.m0_list)
    if (!(m > 0))
      throw std::invalid_argument("m0_list entries must be positive");
  for (double e : sc.eps_list)
    if (!(e > 0))
      throw std::invalid_argument(
          "eps_list entries must be positive for the damped suite");
  if (!(sc.perturb_amp >= 0))
    throw std::invalid_argument("perturb_amp must be nonnegative");
  if (!(sc.t_mult >= 0)) throw std::invalid_argument("t_mult must be >= 0");
  if (!(sc.t_cap > 0)) throw std::invalid_argument("t_cap must be positive");
  // every evolve config must be admissible before any run starts
  for (double m0 : sc.m0_list)
    for (double eps : sc.eps_list) {
      cnwave::EvolveConfig ec;
      ec.eps = eps;
      ec.dt = sc.dt;
      ec.t_end = suite_t_end(sc, eps);
      ec.n_grid = sc.n_grid;
      ec.sample_every = sc.sample_every;
      try {
        cnwave::validate(ec);
      } catch (const std::exception& e) {
        throw std::invalid_argument("invalid run m0=" + fmt_short(m0) +
                                    " eps=" + fmt_short(eps) + ": " + e.what());
      }
    }
}

void apply_config_file(const std::string& path, SuiteConfig& sc) {
  std::ifstream is(path);
  if (!is) throw std::invalid_argument("cannot open config file: " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                  ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "m0_list") {
      sc.m0_list = parse_double_list(value);
    } else if (key == "eps_list") {
      sc.eps_list = parse_double_list(value);
    } else if (key == "perturb_amp") {
      if (value == "eps") {
        sc.amp_equals_eps = true;
      } else {
        sc.amp_equals_eps = false;
        sc.perturb_amp = parse_double(value);
      }
    } else if (key == "dt") {
      sc.dt = parse_double(value);
    } else if (key == "n_grid") {
      sc.n_grid = static_cast<int>(parse_long(value));
    } else if (key == "t_mult") {
      sc.t_mult = parse_double(value);
    } else if (key == "t_cap") {
      sc.t_cap = parse_double(value);
    } else if (key == "sample_every") {
      sc.sample_every = static_cast<int>(parse_long(value));
    } else if (key == "seed") {
      sc.seed = static_cast<unsigned>(parse_long(value));
    } else if (key == "output_dir") {
      sc.output_dir = value;
    } else {
      throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                  ": unknown key '" + key + "'");
    }
  }
}

std::string run_file_name(double m0, double eps) {
  return "run_m" + fmt_short(m0) + "_eps" + fmt_short(eps) + ".csv";
}

// least-squares slope of log(forcing residual) against log(eps)
double forcing_slope(double m0, const std::vector<double>& eps_list,
                     int n_grid) {
  std::vector<double> xs, ys;
  for (double e : eps_list) {
    xs.push_back(std::log(e));
    ys.push_back(std::log(cnwave::forcing_residual(m0, e, n_grid)));
  }
  const size_t n = xs.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

int run_suite(const SuiteConfig& sc) {
  validate_suite(sc);
  std::filesystem::create_directories(sc.output_dir);

  std::vector<cnwave::TrajectoryConfig> jobs;
  for (double m0 : sc.m0_list)
    for (double eps : sc.eps_list) {
      cnwave::TrajectoryConfig tc;
      tc.m0 = m0;
      tc.eps = eps;
      tc.perturb_amp = sc.amp_equals_eps ? eps : sc.perturb_amp;
      tc.seed = sc.seed;
      tc.dt = sc.dt;
      tc.t_end = suite_t_end(sc, eps);
      tc.n_grid = sc.n_grid;
      tc.sample_every = sc.sample_every;
      jobs.push_back(tc);
    }

  auto sweep = cnwave::run_sweep(jobs);
  bool failed = false;
  for (size_t i = 0; i < jobs.size(); ++i)
    if (!sweep.errors[i].empty()) {
      std::fprintf(stderr, "error: run m0=%s eps=%s failed: %s\n",
                   fmt_short(jobs[i].m0).c_str(),
                   fmt_short(jobs[i].eps).c_str(), sweep.errors[i].c_str());
      failed = true;
    }
  if (failed) return 3;

  const std::filesystem::path dir(sc.output_dir);
  std::ofstream summary(dir / "summary.csv");
  if (!summary)
    throw std::runtime_error("cannot open " + (dir / "summary.csv").string());
  const char* header =
      "m0,eps,t_end,samples,sup_envelope,sup_scaled,envelope_K,omega_rate,"
      "lambda_rate,deriv_dev,out_of_window";
  summary << header << '\n';
  print_row(split(header, ','));

  std::map<long long, std::vector<cnwave::StabilityReport>> by_m0;
  for (size_t i = 0; i < jobs.size(); ++i) {
    const auto& tc = jobs[i];
    const auto& recs = sweep.results[i].records;
    write_run_csv((dir / run_file_name(tc.m0, tc.eps)).string(), recs);
    auto rep = cnwave::decay_report(recs, tc.eps, tc.m0);
    auto rates = cnwave::rate_estimates(recs, tc.eps);
    const double dev = cnwave::lyapunov_time_derivative_check(recs, tc.eps);
    by_m0[std::llround(tc.m0 * 1e9)].push_back(rep);
    const std::vector<std::string> row = {
        fmt(tc.m0),
        fmt(tc.eps),
        fmt(tc.t_end),
        std::to_string(recs.size()),
        fmt(rep.sup_envelope),
        fmt(rep.sup_envelope_scaled),
        fmt(rep.envelope_K),
        fmt(rates.omega_rate),
        fmt(rates.lambda_rate),
        fmt(dev),
        std::to_string(rep.out_of_window)};
    write_row(summary, row);
    print_row(row);
  }

  bool all_pass = true;
  auto check = [&](const std::string& name, double value,
                   const std::string& threshold, bool pass) {
    all_pass = all_pass && pass;
    std::printf("check,%s,%s,%s,%s\n", name.c_str(), fmt(value).c_str(),
                threshold.c_str(), pass ? "PASS" : "FAIL");
  };

  // stability of the sup e^{eps t}||xi||_H1 / sqrt(eps) constant across eps
  for (const auto& [key, reps] : by_m0) {
    if (reps.size() < 2) continue;
    double lo = 1e300, hi = 0;
    for (const auto& r : reps) {
      lo = std::min(lo, r.sup_envelope_scaled);
      hi = std::max(hi, r.sup_envelope_scaled);
    }
    check("scaled_sup_variation_m0=" + fmt_short(reps.front().m0),
          lo > 0 ? hi / lo : 1e300, "<2", lo > 0 && hi / lo < 2.0);
  }

  // corrected-profile forcing residual must shrink like eps^2
  if (sc.eps_list.size() >= 2)
    for (double m0 : sc.m0_list) {
      const double slope = forcing_slope(m0, sc.eps_list, sc.n_grid);
      check("forcing_slope_m0=" + fmt_short(m0), slope, "2.0+-0.2",
            std::fabs(slope - 2.0) <= 0.2);
    }

  // constrained coercivity of the second variation at each base mass
  double cmin = 1e300, cmax = 0;
  for (double m0 : sc.m0_list) {
    auto p = cnwave::build_profile(m0, sc.n_grid);
    auto sv = cnwave::assemble_second_variation(p, cnwave::Sector::Aplus);
    const std::vector<cnwave::SpectralField> constraints{
        p.field, cnwave::cplx(0, 1) * p.field};
    const double c =
        cnwave::coercivity_constant(sv, constraints, cnwave::NormKind::H1);
    cmin = std::min(cmin, c);
    cmax = std::max(cmax, c);
    check("coercivity_m0=" + fmt_short(m0), c, ">0", c > 0);
  }
  if (sc.m0_list.size() >= 2)
    check("coercivity_variation", cmin > 0 ? cmax / cmin : 1e300, "<3",
          cmin > 0 && cmax / cmin < 3.0);

  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cnoidal-wave laboratory for the damped cubic Schrodinger "
               "equation on the torus"};
  app.require_subcommand(1);

  auto* elliptic = app.add_subcommand("elliptic", "elliptic-function values");
  auto* eval = elliptic->add_subcommand("eval", "evaluate at a modulus")
                   ->fallthrough();
  elliptic->require_subcommand(1);
  double ell_k = 0.5, ell_x = 0.0;
  eval->add_option("--k", ell_k, "elliptic modulus in (0,1)")->required();
  auto* xopt = eval->add_option("--x", ell_x, "argument for sn/cn/dn");

  auto* profile =
      app.add_subcommand("profile", "cnoidal profile samples at a given mass");
  double pr_m = 1.0;
  int pr_n = 256;
  bool pr_info = false;
  profile->add_option("--m", pr_m, "profile mass")->required();
  profile->add_option("--n", pr_n, "grid size (multiple of 4)");
  profile->add_flag("--info", pr_info,
                    "print the m,k,omega,norm summary row instead of samples");

  auto* spectrum = app.add_subcommand(
      "spectrum", "eigenvalues of the linearized operators about the profile");
  double sp_m = 1.0;
  std::string sp_which = "L-", sp_sector = "full";
  int sp_n = 4, sp_grid = 256;
  spectrum->add_option("--m", sp_m, "profile mass")->required();
  spectrum->add_option("--which", sp_which, "operator: L+ or L-")->required();
  spectrum->add_option("--sector", sp_sector,
                       "symmetry sector: full, s, aplus, aminus");
  spectrum->add_option("--n", sp_n, "number of eigenvalues");
  spectrum->add_option("--grid", sp_grid, "grid size (multiple of 4)");

  auto* approx = app.add_subcommand(
      "approx", "damping-corrected profile via the bordered Newton solve");
  double ap_m = 1.0, ap_eps = 0.01;
  int ap_n = 256;
  std::string ap_out;
  approx->add_option("--m", ap_m, "profile mass")->required();
  approx->add_option("--eps", ap_eps, "damping coefficient (>= 0)")
      ->required();
  approx->add_option("--n", ap_n, "grid size (multiple of 4)");
  approx->add_option("--samples-out", ap_out,
                     "write corrected-profile samples (x,re,im) to this CSV");

  auto* evolve = app.add_subcommand(
      "evolve", "integrate one damped trajectory and write diagnostics CSV");
  cnwave::TrajectoryConfig ev;
  std::string ev_out;
  evolve->add_option("--m0", ev.m0, "initial profile mass")->required();
  evolve->add_option("--eps", ev.eps, "damping coefficient (>= 0)")
      ->required();
  evolve->add_option("--T", ev.t_end, "final time")->required();
  evolve->add_option("--dt", ev.dt, "time step (0, 0.1]");
  evolve->add_option("--perturb", ev.perturb_amp,
                     "H1 amplitude of the seeded initial perturbation");
  evolve->add_option("--seed", ev.seed, "perturbation seed");
  evolve->add_option("--every", ev.sample_every,
                     "sample diagnostics every this many steps");
  evolve->add_option("--n", ev.n_grid, "grid size (multiple of 4)");
  evolve->add_flag("--project", ev.sector_projection,
                   "project onto the even half-anti-periodic sector each step");
  evolve->add_option("--out", ev_out, "output CSV path")->required();

  auto* report = app.add_subcommand(
      "report", "summarize run CSVs: decay envelopes, rates, constants");
  std::vector<std::string> rp_files;
  int rp_n = 256;
  std::string rp_out;
  report->add_option("files", rp_files, "run CSVs produced by evolve/suite")
      ->required()
      ->expected(-1);
  report->add_option("--n", rp_n,
                     "grid size for the profile rebuilds (multiple of 4)");
  report->add_option("--out", rp_out, "also write the summary table to CSV");

  auto* suite = app.add_subcommand(
      "suite", "full stability sweep over (m0, eps) with summary checks");
  SuiteConfig sc;
  std::string su_config, su_perturb;
  std::vector<double> su_m0, su_eps;
  auto* o_config = suite->add_option(
      "--config", su_config, "key = value config file; flags override it");
  auto* o_m0 = suite->add_option("--m0", su_m0, "base masses (repeatable)");
  auto* o_eps =
      suite->add_option("--eps", su_eps, "damping values (repeatable)");
  auto* o_perturb = suite->add_option(
      "--perturb", su_perturb, "perturbation amplitude: 'eps' or a number");
  auto* o_dt = suite->add_option("--dt", sc.dt, "time step (0, 0.1]");
  auto* o_grid =
      suite->add_option("--n", sc.n_grid, "grid size (multiple of 4)");
  auto* o_tmult = suite->add_option(
      "--t-mult", sc.t_mult, "t_end = min(t_mult/eps, eps^-3/2, t_cap); 0 "
                             "drops the first term");
  auto* o_tcap = suite->add_option("--t-cap", sc.t_cap, "absolute time cap");
  auto* o_every = suite->add_option("--every", sc.sample_every,
                                    "sample every this many steps");
  auto* o_seed = suite->add_option("--seed", sc.seed, "perturbation seed");
  auto* o_dir =
      suite->add_option("--out-dir", sc.output_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (eval->parsed())
      return run_elliptic_eval(ell_k, xopt->count() > 0, ell_x);
    if (profile->parsed()) return run_profile(pr_m, pr_n, pr_info);
    if (spectrum->parsed())
      return run_spectrum(sp_m, sp_which, sp_sector, sp_n, sp_grid);
    if (approx->parsed()) return run_approx(ap_m, ap_eps, ap_n, ap_out);
    if (evolve->parsed()) return run_evolve(ev, ev_out);
    if (report->parsed()) return run_report(rp_files, rp_n, rp_out);
    if (suite->parsed()) {
      // defaults, then config file, then explicit flags
      const double dt_flag = sc.dt;
      const int grid_flag = sc.n_grid;
      const double tmult_flag = sc.t_mult;
      const double tcap_flag = sc.t_cap;
      const int every_flag = sc.sample_every;
      const unsigned seed_flag = sc.seed;
      const std::string dir_flag = sc.output_dir;
      if (o_config->count()) {
        SuiteConfig from_file;
        apply_config_file(su_config, from_file);
        sc = from_file;
      }
      if (o_m0->count()) sc.m0_list = su_m0;
      if (o_eps->count()) sc.eps_list = su_eps;
      if (o_perturb->count()) {
        if (su_perturb == "eps") {
          sc.amp_equals_eps = true;
        } else {
          sc.amp_equals_eps = false;
          sc.perturb_amp = parse_double(su_perturb);
        }
      }
      if (o_dt->count()) sc.dt = dt_flag;
      if (o_grid->count()) sc.n_grid = grid_flag;
      if (o_tmult->count()) sc.t_mult = tmult_flag;
      if (o_tcap->count()) sc.t_cap = tcap_flag;
      if (o_every->count()) sc.sample_every = every_flag;
      if (o_seed->count()) sc.seed = seed_flag;
      if (o_dir->count()) sc.output_dir = dir_flag;
      return run_suite(sc);
    }
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 2;
}
