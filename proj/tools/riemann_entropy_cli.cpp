// riemann-entropy: solve Riemann problems for u_t + v(u) u_x - t (a^2(u) u_x)_x = 0
// with piecewise constant coefficients by minimizing the convex entropy of the
// discontinuity speeds, then reconstruct, verify, sample, and cross-check the
// self-similar profile.
//
// Exit codes: 0 ok, 1 file/parse/validation error, 2 verification failure,
// 3 solver non-convergence.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "riemann_entropy/entropy.hpp"
#include "riemann_entropy/fd_oracle.hpp"
#include "riemann_entropy/model.hpp"
#include "riemann_entropy/optimizer.hpp"
#include "riemann_entropy/problem_io.hpp"
#include "riemann_entropy/profile.hpp"
#include "riemann_entropy/verifier.hpp"

namespace {

using namespace riemann_entropy;

int log_level() {
  static const int level = [] {
    const char* env = std::getenv("RIEMANN_ENTROPY_LOG");
    if (env == nullptr || env[0] == '\0' || std::string(env) == "0") return 0;
    if (std::string(env) == "debug") return 2;
    return 1;
  }();
  return level;
}

void logmsg(int level, const std::string& msg) {
  if (log_level() >= level) std::cerr << "[riemann-entropy] " << msg << "\n";
}

// fixed 17-significant-digit formatting keeps reports byte-reproducible
std::string num(double x) {
  if (std::isnan(x)) return "null";
  if (std::isinf(x)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string num_list(const std::vector<double>& xs) {
  std::string s = "[";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) s += ",";
    s += num(xs[i]);
  }
  return s + "]";
}

struct Config {
  std::string problem_path;
  double tol = 1e-10;
  int max_iter = 500;
  double verify_tol = 1e-8;
  std::vector<double> window;  // empty: auto from the coercivity box
  int count = 1001;
  double L = 0.0;  // 0: auto from the stability precondition
  double h = 0.01;
  double t_final = 1.0;
  double cfl = 0.4;
  std::string out;  // empty: stdout (directory commands use a default)
  std::string format = "csv";
};

void write_artifact(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ParseError("cannot open output file " + path);
  f << content;
}

std::string solve_json(const MinimizeResult& r, const ValidatedProblem& p) {
  std::ostringstream os;
  os << "{\n  \"xi\": " << num_list(r.xi.xi) << ",\n";
  os << "  \"E\": " << num(entropy_value(p, r.xi)) << ",\n";
  os << "  \"E1\": " << num(entropy_alt_value(p, r.xi)) << ",\n";
  os << "  \"kkt_report\": {\n";
  os << "    \"tol\": " << num(r.kkt.tol) << ",\n";
  os << "    \"max_violation\": " << num(r.kkt.max_violation) << ",\n";
  os << "    \"optimal\": " << (r.kkt.optimal ? "true" : "false") << ",\n";
  os << "    \"groups\": [";
  for (std::size_t g = 0; g < r.kkt.groups.groups.size(); ++g) {
    const Group& grp = r.kkt.groups.groups[g];
    if (g) os << ",";
    os << "\n      {\"k\": " << grp.k << ", \"l\": " << grp.l
       << ", \"value\": " << num(grp.value)
       << ", \"group_sum\": " << num(r.kkt.group_sums[g])
       << ", \"suffix_sums\": " << num_list(r.kkt.suffix_sums[g]) << "}";
  }
  if (!r.kkt.groups.groups.empty()) os << "\n    ";
  os << "]\n  },\n";
  os << "  \"iterations\": " << r.iterations << "\n}\n";
  return os.str();
}

std::string verify_json(const VerificationReport& rep) {
  std::ostringstream os;
  os << "{\n  \"tol\": " << num(rep.tol) << ",\n";
  os << "  \"scaled_tol\": " << num(rep.scaled_tol) << ",\n";
  os << "  \"pass\": " << (rep.pass ? "true" : "false") << ",\n";
  os << "  \"max_equality_residual\": " << num(rep.max_equality_residual) << ",\n";
  os << "  \"min_inequality_margin\": " << num(rep.min_inequality_margin) << ",\n";
  os << "  \"jumps\": [";
  for (std::size_t i = 0; i < rep.per_jump.size(); ++i) {
    const JumpCheck& j = rep.per_jump[i];
    if (i) os << ",";
    os << "\n    {\"c\": " << num(j.c) << ", \"k\": " << j.k << ", \"l\": " << j.l
       << ", \"config\": \"" << jump_config_name(j.config) << "\""
       << ", \"kind\": \"" << (j.kind == Discontinuity::Kind::strong ? "strong" : "weak")
       << "\", \"u_minus\": " << num(j.u_minus) << ", \"u_plus\": " << num(j.u_plus)
       << ", \"Aflux_minus\": " << num(j.Aflux_minus)
       << ", \"Aflux_plus\": " << num(j.Aflux_plus)
       << ", \"rh_A_residual\": " << num(j.rh_A_residual)
       << ", \"rh_flux_residual\": " << num(j.rh_flux_residual)
       << ", \"config_residual\": " << num(j.config_residual)
       << ", \"oleinik_margins\": " << num_list(j.oleinik_margins) << "}";
  }
  if (!rep.per_jump.empty()) os << "\n  ";
  os << "]\n}\n";
  return os.str();
}

std::string sample_csv(const std::vector<SampleRow>& rows) {
  std::string s = "xi,u,side\n";
  for (const SampleRow& r : rows) {
    s += num(r.xi);
    s += ",";
    s += num(r.u);
    s += ",";
    s += side_name(r.side);
    s += "\n";
  }
  return s;
}

std::string sample_json(const std::vector<SampleRow>& rows) {
  std::string s = "[";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i) s += ",";
    s += "\n  {\"xi\": " + num(rows[i].xi) + ", \"u\": " + num(rows[i].u) +
         ", \"side\": \"" + side_name(rows[i].side) + "\"}";
  }
  return s + "\n]\n";
}

std::string fd_csv(const FDSolution& fd) {
  std::string s = "x,u\n";
  for (std::size_t i = 0; i < fd.values.size(); ++i) {
    s += num(fd.x_centers[i]);
    s += ",";
    s += num(fd.values[i]);
    s += "\n";
  }
  return s;
}

std::string comparison_json(const FDSolution& fd, const FDComparison& cmp, const FDParams& params) {
  std::ostringstream os;
  os << "{\n  \"l1_error\": " << num(cmp.l1_error) << ",\n";
  os << "  \"linf_error_away_from_jumps\": " << num(cmp.linf_error_away_from_jumps) << ",\n";
  os << "  \"h\": " << num(params.h) << ",\n  \"L\": " << num(params.L) << ",\n";
  os << "  \"t_final\": " << num(params.t_final) << ",\n  \"cfl\": " << num(params.cfl) << ",\n";
  os << "  \"steps_taken\": " << fd.steps_taken << ",\n";
  os << "  \"boundary_flux_in\": " << num(fd.boundary_flux_in) << "\n}\n";
  return os.str();
}

std::string summary_text(const ValidatedProblem& p, const MinimizeResult& r,
                         const VerificationReport& rep, const FDComparison* cmp) {
  auto short_num = [](double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return std::string(buf);
  };
  std::ostringstream os;
  os << "riemann-entropy summary\n";
  os << "problem: n=" << p.n() << " d=" << p.d() << " alpha=" << short_num(p.alpha())
     << " beta=" << short_num(p.beta()) << "\n";
  os << "minimizer xi = " << num_list(r.xi.xi) << "\n";
  os << "E = " << short_num(entropy_value(p, r.xi))
     << "  E1 = " << short_num(entropy_alt_value(p, r.xi))
     << "  iterations = " << r.iterations
     << "  kkt max violation = " << short_num(r.kkt.max_violation) << "\n";
  os << "verification: " << (rep.pass ? "PASS" : "FAIL")
     << "  (max equality residual = " << short_num(rep.max_equality_residual)
     << ", min Oleinik margin = "
     << (std::isfinite(rep.min_inequality_margin) ? short_num(rep.min_inequality_margin)
                                                  : std::string("none"))
     << ")\n";
  if (cmp != nullptr) {
    os << "fd cross-check: l1 = " << short_num(cmp->l1_error)
       << "  linf (away from jumps) = " << short_num(cmp->linf_error_away_from_jumps) << "\n";
  }
  if (rep.per_jump.empty()) {
    os << "discontinuities: none (smooth profile)\n";
  } else {
    os << "discontinuities (" << rep.per_jump.size() << "):\n";
    for (const JumpCheck& j : rep.per_jump) {
      double min_margin = std::numeric_limits<double>::infinity();
      for (double m : j.oleinik_margins) min_margin = std::min(min_margin, m);
      os << "  speed=" << short_num(j.c)
         << " kind=" << (j.kind == Discontinuity::Kind::strong ? "strong" : "weak")
         << " config=" << jump_config_name(j.config) << " u-=" << short_num(j.u_minus)
         << " u+=" << short_num(j.u_plus) << " A'(c-)=" << short_num(j.Aflux_minus)
         << " A'(c+)=" << short_num(j.Aflux_plus) << " min margin="
         << (std::isfinite(min_margin) ? short_num(min_margin) : std::string("none")) << "\n";
    }
  }
  return os.str();
}

std::pair<double, double> default_window(const ValidatedProblem& p) {
  double amax = 0.0, vlo = p.v()[0], vhi = p.v()[0];
  for (double a : p.a()) amax = std::max(amax, a);
  for (double v : p.v()) {
    vlo = std::min(vlo, v);
    vhi = std::max(vhi, v);
  }
  double lo = vlo - 4.0 * amax - 1.0;
  double hi = vhi + 4.0 * amax + 1.0;
  if (p.d() >= 1) {
    const double c = entropy_value(p, initial_point(p));
    const CoercivityBox box = coercivity_box(p, c);
    if (std::isfinite(box.r1) && std::isfinite(box.r2)) {
      lo = box.r1 - 1.0;
      hi = box.r2 + 1.0;
    }
  }
  if (!(lo < hi)) {
    lo -= 1.0;
    hi += 1.0;
  }
  return {lo, hi};
}

FDParams fd_params(const Config& cfg, const ValidatedProblem& p) {
  FDParams params;
  params.h = cfg.h;
  params.t_final = cfg.t_final;
  params.cfl = cfg.cfl;
  if (cfg.L > 0.0) {
    params.L = cfg.L;
  } else {
    double vmax = 0.0, amax = 0.0;
    for (double v : p.v()) vmax = std::max(vmax, std::fabs(v));
    for (double a : p.a()) amax = std::max(amax, a);
    params.L = cfg.t_final * vmax + 6.0 * amax * std::sqrt(cfg.t_final) + 1.0;
  }
  return params;
}

int run_command(const std::string& command, const Config& cfg) {
  const ValidatedProblem p = validate(load_problem(cfg.problem_path));
  logmsg(1, "problem loaded: n=" + std::to_string(p.n()) + " d=" + std::to_string(p.d()));

  MinimizeOptions mopts;
  mopts.tol = cfg.tol;
  mopts.max_iter = cfg.max_iter;
  if (log_level() >= 2) {
    mopts.on_iteration = [](int it, double e) {
      logmsg(2, "iteration " + std::to_string(it) + " E=" + num(e));
    };
  }
  const MinimizeResult solved = minimize(p, mopts);
  logmsg(1, "solved in " + std::to_string(solved.iterations) +
                " iterations, max violation " + num(solved.kkt.max_violation));
  const SelfSimilarProfile prof = build_profile(p, solved.xi);

  if (command == "solve") {
    write_artifact(cfg.out, solve_json(solved, p));
    return 0;
  }

  if (command == "verify") {
    const VerificationReport rep = verify(prof, cfg.verify_tol);
    write_artifact(cfg.out, verify_json(rep));
    return rep.pass ? 0 : 2;
  }

  if (command == "sample") {
    auto [lo, hi] = cfg.window.size() == 2 ? std::pair{cfg.window[0], cfg.window[1]}
                                           : default_window(p);
    const auto rows = sample(prof, lo, hi, cfg.count);
    write_artifact(cfg.out, cfg.format == "json" ? sample_json(rows) : sample_csv(rows));
    return 0;
  }

  const FDParams params = fd_params(cfg, p);

  if (command == "oracle") {
    const std::filesystem::path dir = cfg.out.empty() ? "riemann-entropy-out" : cfg.out;
    std::filesystem::create_directories(dir);
    const FDSolution fd = solve_fd(p, params);
    logmsg(1, "fd solve: " + std::to_string(fd.steps_taken) + " steps");
    const FDComparison cmp = compare(fd, prof);
    write_artifact((dir / "fd.csv").string(), fd_csv(fd));
    write_artifact((dir / "comparison.json").string(), comparison_json(fd, cmp, params));
    return 0;
  }

  // command == "all"
  const std::filesystem::path dir = cfg.out.empty() ? "riemann-entropy-out" : cfg.out;
  std::filesystem::create_directories(dir);
  write_artifact((dir / "solve.json").string(), solve_json(solved, p));
  const VerificationReport rep = verify(prof, cfg.verify_tol);
  write_artifact((dir / "verify.json").string(), verify_json(rep));
  auto [lo, hi] = cfg.window.size() == 2 ? std::pair{cfg.window[0], cfg.window[1]}
                                         : default_window(p);
  write_artifact((dir / "profile.csv").string(), sample_csv(sample(prof, lo, hi, cfg.count)));
  const FDSolution fd = solve_fd(p, params);
  const FDComparison cmp = compare(fd, prof);
  write_artifact((dir / "fd.csv").string(), fd_csv(fd));
  write_artifact((dir / "comparison.json").string(), comparison_json(fd, cmp, params));
  write_artifact((dir / "summary.txt").string(), summary_text(p, solved, rep, &cmp));
  return rep.pass ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"entropy-minimization Riemann solver for degenerate parabolic equations"};
  app.set_help_flag("--help", "print help");  // frees -h for the fd cell size
  app.require_subcommand(1);

  Config cfg;
  std::string command;
  for (const char* name : {"solve", "verify", "sample", "oracle", "all"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->set_help_flag("--help", "print help");
    sub->add_option("--problem", cfg.problem_path, "problem JSON file {\"u\":[..],\"v\":[..],\"a\":[..]}")
        ->required();
    sub->add_option("--tol", cfg.tol, "solver tolerance on the KKT max violation");
    sub->add_option("--max-iter", cfg.max_iter, "solver iteration budget");
    sub->add_option("--verify-tol", cfg.verify_tol, "verification tolerance (scaled internally)");
    sub->add_option("--window", cfg.window, "sampling window LO HI")->expected(2);
    sub->add_option("--count", cfg.count, "number of equispaced samples");
    sub->add_option("--L", cfg.L, "fd domain half-width (default: auto)");
    sub->add_option("--h", cfg.h, "fd cell size");
    sub->add_option("--t-final", cfg.t_final, "fd final time");
    sub->add_option("--cfl", cfg.cfl, "fd stability number in (0,1)");
    sub->add_option("--out", cfg.out, "output file (solve/verify/sample) or directory (oracle/all)");
    sub->add_option("--format", cfg.format, "sample output format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->callback([&command, name] { command = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    return run_command(command, cfg);
  } catch (const MaxIterationsExceeded& e) {
    std::cerr << "riemann-entropy: solver did not converge: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    std::cerr << "riemann-entropy: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "riemann-entropy: " << e.what() << "\n";
    return 1;
  }
}
