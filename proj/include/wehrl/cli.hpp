#pragma once

// Command-line surface: entropy reports, bound tables, norm-monotonicity
// scans, entropy minimization, Carlen checks, radial-ODE experiments and
// conjecture sweeps.  All commands are seed-reproducible and write
// machine-readable JSON or CSV (byte-stable for identical configurations).
//
// Exit codes: 0 success, 1 verification failure (an asserted inequality was
// violated), 2 usage error, 3 numeric failure.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wehrl/carlen.hpp"
#include "wehrl/entropy.hpp"
#include "wehrl/io.hpp"
#include "wehrl/radial_ode.hpp"
#include "wehrl/search.hpp"
#include "wehrl/sphere.hpp"
#include "wehrl/states.hpp"

namespace wehrl::cli {

class usage_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class io_failure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string command;
  int twice_j = 2;
  int n_polar = 64;
  int n_azimuth = 128;
  std::uint64_t seed = 0;
  std::string output_format = "json";  // json | csv
  std::string output_path;             // empty -> stdout

  // state sources (entropy, carlen)
  std::string coeffs_text;
  std::string state_file;
  bool use_random_state = false;

  // exponents / scans
  double p = 2.0;
  double q = 3.0;
  int n_max = 3;
  int num_samples = 1000;

  // minimization
  int num_starts = 50;
  int max_iters = 300;
  double gradient_step = 1e-5;
  double tolerance = 1e-13;
  std::string parametrization = "coefficients";

  // carlen
  double carlen_tol = 1e-6;

  // ode
  double b_el = 1.0;
  double u0 = 0.0;  // 0 -> A_expected
  bool scan = false;
  double u0_lo = 0.0;  // 0 -> 0.1 * A_expected
  double u0_hi = 0.0;  // 0 -> 10  * A_expected
  int scan_points = 64;
  int grid_points = 512;

  // sweep
  std::string twice_j_list;
  double q_min = 0.0;  // 0 -> 2 + 1/j
  double q_max = 5.0;
  double q_step = 0.25;
};

namespace detail {

inline std::vector<Complex> parse_coeffs(const std::string& text) {
  // Comma-separated coefficients; each item "re" or "re:im".
  std::vector<Complex> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) throw usage_error("empty coefficient in --coeffs");
    const auto colon = item.find(':');
    try {
      if (colon == std::string::npos) {
        out.emplace_back(std::stod(item), 0.0);
      } else {
        out.emplace_back(std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1)));
      }
    } catch (const std::exception&) {
      throw usage_error("unparsable coefficient '" + item + "' in --coeffs");
    }
  }
  if (out.empty()) throw usage_error("--coeffs is empty");
  return out;
}

inline std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw usage_error("unparsable integer '" + item + "'");
    }
  }
  return out;
}

// Expand "key = value" config lines into --key=value tokens.  Tokens are
// injected before the command-line flags, so explicit flags win.
inline std::vector<std::string> config_file_tokens(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw usage_error("cannot open config file '" + path + "'");
  std::vector<std::string> tokens;
  std::string line;
  const auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return std::string();
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
  };
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw usage_error("config file line is not 'key = value': '" + t + "'");
    }
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty()) throw usage_error("config file line has empty key: '" + t + "'");
    tokens.push_back("--" + key + "=" + value);
  }
  return tokens;
}

}  // namespace detail

// Parse argv (without the program name) into a RunConfig.  An optional
// config file (--config FILE, plain "key = value" lines) supplies defaults;
// explicit flags override it and unknown keys are rejected.
inline RunConfig parse_config(std::vector<std::string> args) {
  RunConfig cfg;
  std::string config_path;

  CLI::App app{"wehrl-lab: phase-space entropies and norm bounds for a single spin"};
  app.require_subcommand(1);

  const auto add_common = [&](CLI::App* sub, bool with_state_source) {
    sub->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    sub->add_option("--twice-j", cfg.twice_j, "2j (half-integer spins stay integral)")
        ->check(CLI::Range(1, 1 << 20));
    sub->add_option("--n-polar", cfg.n_polar, "polar quadrature nodes")
        ->envname("WEHRL_N_POLAR")
        ->check(CLI::Range(2, 1 << 20));
    sub->add_option("--n-azimuth", cfg.n_azimuth, "azimuthal quadrature nodes")
        ->envname("WEHRL_N_AZIMUTH")
        ->check(CLI::Range(4, 1 << 22));
    sub->add_option("--seed", cfg.seed, "RNG seed");
    sub->add_option("--format", cfg.output_format, "output format")
        ->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--output", cfg.output_path, "output path (default: stdout)");
    sub->add_option("--config", config_path, "config file with 'key = value' lines");
    if (with_state_source) {
      sub->add_option("--coeffs", cfg.coeffs_text, "comma-separated coefficients, each re or re:im");
      sub->add_option("--state-file", cfg.state_file, "JSON state file");
      sub->add_flag("--random", cfg.use_random_state, "draw a random normalized state from --seed");
    }
  };

  auto* entropy = app.add_subcommand("entropy", "entropy report for one state");
  add_common(entropy, true);

  auto* bounds = app.add_subcommand("bounds", "Wehrl entropy lower bounds and their gap");
  add_common(bounds, false);

  auto* verify = app.add_subcommand("verify-norms", "norm monotonicity scan on the lattice q = p + n/j");
  add_common(verify, false);
  verify->add_option("--p", cfg.p, "base exponent")->check(CLI::Range(1.0, 1e6));
  verify->add_option("--n-max", cfg.n_max, "largest lattice step")->check(CLI::Range(1, 1000));
  verify->add_option("--samples", cfg.num_samples, "random states per row")->check(CLI::Range(1, 100000000));

  auto* minimize = app.add_subcommand("minimize", "multistart Wehrl entropy minimization");
  add_common(minimize, false);
  minimize->add_option("--starts", cfg.num_starts, "number of starts")->check(CLI::Range(1, 100000));
  minimize->add_option("--max-iters", cfg.max_iters, "iteration cap per start")->check(CLI::Range(1, 1000000));
  minimize->add_option("--grad-step", cfg.gradient_step, "finite-difference step")
      ->check(CLI::Range(1e-12, 1.0));
  minimize->add_option("--tolerance", cfg.tolerance, "stop when step improvement drops below this")
      ->check(CLI::Range(1e-16, 1.0));
  minimize->add_option("--parametrization", cfg.parametrization, "search coordinates")
      ->check(CLI::IsMember({"coefficients", "majorana"}));

  auto* carlen = app.add_subcommand("carlen", "gradient/norm identity residual for one state");
  add_common(carlen, true);
  carlen->add_option("--q", cfg.q, "norm exponent")->check(CLI::Range(1e-9, 1e6));
  carlen->add_option("--tol", cfg.carlen_tol, "asserted residual bound")->check(CLI::Range(0.0, 1.0));

  auto* ode = app.add_subcommand("ode", "radial Euler-Lagrange shooting and boundary scans");
  add_common(ode, false);
  ode->add_option("--p", cfg.p, "exponent p")->check(CLI::Range(1.0, 1e6));
  ode->add_option("--q", cfg.q, "exponent q");
  ode->add_option("--b-el", cfg.b_el, "constant b of the variational equation")
      ->check(CLI::Range(1e-12, 1e12));
  ode->add_option("--u0", cfg.u0, "initial value (default: predicted amplitude)");
  ode->add_flag("--scan", cfg.scan, "scan u0 for admissible initial values");
  ode->add_option("--u0-lo", cfg.u0_lo, "scan range lower end (default 0.1 A)");
  ode->add_option("--u0-hi", cfg.u0_hi, "scan range upper end (default 10 A)");
  ode->add_option("--scan-points", cfg.scan_points, "scan grid size")->check(CLI::Range(2, 100000));
  ode->add_option("--grid-points", cfg.grid_points, "dense output points")->check(CLI::Range(8, 1 << 20));

  auto* sweep = app.add_subcommand("sweep", "norm-ratio sweep over (q, j), on- and off-lattice");
  add_common(sweep, false);
  sweep->add_option("--twice-j-list", cfg.twice_j_list, "comma-separated twice-j values");
  sweep->add_option("--p", cfg.p, "base exponent")->check(CLI::Range(1.0, 1e6));
  sweep->add_option("--q-min", cfg.q_min, "sweep start (default 2 + 1/j)");
  sweep->add_option("--q-max", cfg.q_max, "sweep end");
  sweep->add_option("--q-step", cfg.q_step, "sweep step")->check(CLI::Range(1e-9, 1e3));
  sweep->add_option("--samples", cfg.num_samples, "random states per point")
      ->check(CLI::Range(1, 100000000));

  // Two-pass parse: the first pass only locates --config and the subcommand;
  // the second parses [command] + config tokens + flags, so flags override.
  std::string command;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (command.empty() && !args[i].empty() && args[i][0] != '-') command = args[i];
    if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
    else if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
  }
  std::vector<std::string> full;
  if (!config_path.empty() && !command.empty()) {
    const auto tokens = detail::config_file_tokens(config_path);
    full.push_back(command);
    full.insert(full.end(), tokens.begin(), tokens.end());
    bool skipped_command = false;
    for (const auto& a : args) {
      if (!skipped_command && a == command) {
        skipped_command = true;
        continue;
      }
      full.push_back(a);
    }
  } else {
    full = args;
  }

  try {
    std::reverse(full.begin(), full.end());  // CLI11 consumes the vector as a stack
    app.parse(full);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help() << std::endl;
    throw usage_error("help requested");
  } catch (const CLI::ParseError& e) {
    throw usage_error(e.what());
  }

  for (auto* sub : {entropy, bounds, verify, minimize, carlen, ode, sweep}) {
    if (sub->parsed()) cfg.command = sub->get_name();
  }

  // Cross-field preconditions that the mapped operations would reject anyway;
  // failing here keeps them usage errors.
  if (cfg.command == "verify-norms" && !(cfg.p > 2.0 / cfg.twice_j)) {
    throw usage_error("verify-norms: requires p > 1/j");
  }
  if (cfg.command == "ode") {
    if (!(cfg.q > cfg.p)) throw usage_error("ode: requires q > p");
    if (!(cfg.p >= 0.5 * cfg.q)) throw usage_error("ode: requires p >= q/2");
  }
  if (cfg.command == "carlen" && !(cfg.q > 0.0)) throw usage_error("carlen: requires q > 0");
  return cfg;
}

namespace detail {

inline SpinState resolve_state(const RunConfig& cfg) {
  if (!cfg.coeffs_text.empty()) {
    return make_state(cfg.twice_j, parse_coeffs(cfg.coeffs_text));
  }
  if (!cfg.state_file.empty()) {
    std::ifstream in(cfg.state_file);
    if (!in) throw io_failure("cannot open state file '" + cfg.state_file + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return io::state_from_json_text(buf.str());
  }
  if (cfg.use_random_state) {
    return random_state(cfg.twice_j, cfg.seed);
  }
  throw usage_error("no state given: use --coeffs, --state-file or --random");
}

}  // namespace detail

// Write a report to the configured destination.
inline void write_report(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << "\n";
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_failure("cannot open output file '" + path + "'");
  out << text;
  if (!out) throw io_failure("failed writing output file '" + path + "'");
}

// Execute a parsed configuration.  Returns the process exit code.
inline int run(const RunConfig& cfg) {
  try {
    const QuadratureRule rule = build_quadrature(cfg.n_polar, cfg.n_azimuth);

    if (cfg.command == "entropy") {
      const SpinState f = detail::resolve_state(cfg);
      if (f.twice_j() != cfg.twice_j) throw usage_error("state twice_j does not match --twice-j");
      const EntropyReport rep = entropy_report(f, rule);
      if (cfg.output_format == "csv") {
        write_report(io::entropy_report_csv_header() + "\n" + io::entropy_report_to_csv_row(rep) + "\n",
                     cfg.output_path);
      } else {
        write_report(io::entropy_report_to_json(rep), cfg.output_path);
      }
      return rep.slack_thm2 >= -1e-8 ? 0 : 1;
    }

    if (cfg.command == "bounds") {
      std::string out;
      const double lieb = lieb_bound(cfg.twice_j);
      const double thm2 = theorem2_bound(cfg.twice_j);
      const double gap = lieb - thm2;
      if (cfg.output_format == "csv") {
        out = "twice_j,lieb_bound,thm2_bound,gap\n" + std::to_string(cfg.twice_j) + "," +
              io::fmt17(lieb) + "," + io::fmt17(thm2) + "," + io::fmt17(gap) + "\n";
      } else {
        out = "{\"gap\":" + io::fmt17(gap) + ",\"lieb_bound\":" + io::fmt17(lieb) +
              ",\"thm2_bound\":" + io::fmt17(thm2) + ",\"twice_j\":" + std::to_string(cfg.twice_j) + "}";
      }
      write_report(out, cfg.output_path);
      const bool ok = gap >= 0.0 && gap < 0.5 / cfg.twice_j;  // 1/(4j)
      return ok ? 0 : 1;
    }

    if (cfg.command == "verify-norms") {
      const ScanReport rep =
          monotonicity_scan(cfg.twice_j, cfg.p, cfg.n_max, cfg.num_samples, cfg.seed, rule);
      if (cfg.output_format == "json") {
        write_report(io::scan_report_to_json(rep), cfg.output_path);
      } else {
        write_report(io::scan_report_to_csv(rep), cfg.output_path);
      }
      return rep.total_violations() == 0 ? 0 : 1;
    }

    if (cfg.command == "minimize") {
      SearchOptions opts;
      opts.seed = cfg.seed;
      opts.num_starts = cfg.num_starts;
      opts.max_iters = cfg.max_iters;
      opts.gradient_step = cfg.gradient_step;
      opts.tolerance = cfg.tolerance;
      opts.parametrization = cfg.parametrization == "majorana" ? Parametrization::majorana_roots
                                                               : Parametrization::coefficients;
      const SearchResult res = minimize_wehrl(cfg.twice_j, opts, rule);
      write_report(io::search_result_to_json(res), cfg.output_path);
      // The proven bound holds unconditionally; flag any numerical breach.
      return res.best_value >= theorem2_bound(cfg.twice_j) - 1e-8 ? 0 : 1;
    }

    if (cfg.command == "carlen") {
      const SpinState f = detail::resolve_state(cfg);
      if (f.twice_j() != cfg.twice_j) throw usage_error("state twice_j does not match --twice-j");
      const CarlenCheck check = carlen_residual(f, cfg.q, rule);
      write_report(io::carlen_to_json(check, cfg.q, cfg.twice_j, rule), cfg.output_path);
      return check.rel_residual <= cfg.carlen_tol ? 0 : 1;
    }

    if (cfg.command == "ode") {
      const OdeProblem prob = problem_from_exponents(cfg.twice_j, ExponentPair(cfg.p, cfg.q), cfg.b_el);
      if (cfg.scan) {
        const double lo = cfg.u0_lo > 0.0 ? cfg.u0_lo : 0.1 * prob.A_expected;
        const double hi = cfg.u0_hi > 0.0 ? cfg.u0_hi : 10.0 * prob.A_expected;
        const auto roots = boundary_scan(prob, lo, hi, cfg.scan_points);
        std::string out = "{\"A_expected\":" + io::fmt17(prob.A_expected) + ",\"admissible_u0\":" +
                          io::json_array(roots, io::fmt17) + ",\"problem\":" +
                          io::ode_problem_to_json(prob) + "}";
        write_report(out, cfg.output_path);
        return 0;
      }
      GridSpec grid;
      grid.num_points = cfg.grid_points;
      const double u0 = cfg.u0 > 0.0 ? cfg.u0 : prob.A_expected;
      const RadialSolution sol = shoot(prob, u0, grid);
      if (cfg.output_format == "csv") {
        write_report(io::radial_solution_to_csv(sol), cfg.output_path);
      } else {
        write_report(io::radial_solution_to_json(sol), cfg.output_path);
      }
      return 0;
    }

    if (cfg.command == "sweep") {
      const std::vector<int> tjs = cfg.twice_j_list.empty()
                                       ? std::vector<int>{cfg.twice_j}
                                       : detail::parse_int_list(cfg.twice_j_list);
      std::string out = "twice_j,p,q,proven,max_ratio,violations\n";
      bool proven_violation = false;
      for (int tj : tjs) {
        const double j = 0.5 * tj;
        const double q0 = cfg.q_min > 0.0 ? cfg.q_min : cfg.p + 1.0 / j;
        for (double q = q0; q <= cfg.q_max + 1e-12; q += cfg.q_step) {
          const double n_real = (q - cfg.p) * j;
          // Proven needs both the lattice relation q = p + n/j and the
          // hypothesis p > 1/j; everything else is conjectural evidence.
          const bool proven = std::abs(n_real - std::round(n_real)) <= 1e-9 &&
                              n_real >= 1.0 - 1e-9 && cfg.p > 2.0 / tj;
          double max_ratio = 0.0;
          int violations = 0;
          for (int s = 0; s < cfg.num_samples; ++s) {
            const SpinState f = random_state(tj, cfg.seed + 7919 * s + 104729ULL * tj);
            const double np = normalized_p_norm(f, cfg.p, rule);
            const double nq = normalized_p_norm(f, q, rule);
            max_ratio = std::max(max_ratio, nq / np);
            if (nq > np + 1e-9) ++violations;
          }
          if (proven && violations > 0) proven_violation = true;
          out += std::to_string(tj) + "," + io::fmt17(cfg.p) + "," + io::fmt17(q) + "," +
                 (proven ? "1" : "0") + "," + io::fmt17(max_ratio) + "," +
                 std::to_string(violations) + "\n";
        }
      }
      write_report(out, cfg.output_path);
      return proven_violation ? 1 : 0;
    }

    throw usage_error("unknown command '" + cfg.command + "'");
  } catch (const usage_error&) {
    throw;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 2;
  } catch (const numeric_domain_error& e) {
    std::cerr << "numeric failure: " << e.what() << std::endl;
    return 3;
  } catch (const integration_failure& e) {
    std::cerr << "numeric failure: " << e.what() << std::endl;
    return 3;
  } catch (const io_failure& e) {
    std::cerr << "i/o failure: " << e.what() << std::endl;
    return 3;
  }
}

}  // namespace wehrl::cli
