#pragma once

// Report serialization.  Output is bit-stable for fixed inputs: JSON objects
// are written with keys in sorted order and floats at 17 significant digits;
// CSV always carries a header row.  State files are parsed with nlohmann/json.

#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "wehrl/carlen.hpp"
#include "wehrl/entropy.hpp"
#include "wehrl/radial_ode.hpp"
#include "wehrl/search.hpp"
#include "wehrl/sphere.hpp"
#include "wehrl/states.hpp"

namespace wehrl::io {

inline std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

inline std::string json_complex(const Complex& c) {
  return "[" + fmt17(c.real()) + "," + fmt17(c.imag()) + "]";
}

template <typename T, typename F>
std::string json_array(const std::vector<T>& v, F&& item) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += item(v[i]);
  }
  return out + "]";
}

// --- states ---------------------------------------------------------------

inline std::string state_to_json(const SpinState& f) {
  return "{\"coeffs\":" + json_array(f.coeffs, json_complex) +
         ",\"twice_j\":" + std::to_string(f.twice_j()) + "}";
}

inline SpinState state_from_json(const nlohmann::json& j) {
  const int twice_j = j.at("twice_j").get<int>();
  std::vector<Complex> coeffs;
  for (const auto& c : j.at("coeffs")) {
    coeffs.emplace_back(c.at(0).get<double>(), c.at(1).get<double>());
  }
  return make_state(twice_j, std::move(coeffs));
}

inline SpinState state_from_json_text(const std::string& text) {
  return state_from_json(nlohmann::json::parse(text));
}

// --- entropy reports --------------------------------------------------------

inline std::string entropy_report_to_json(const EntropyReport& r) {
  std::string renyi = "[";
  for (std::size_t i = 0; i < r.renyi_values.size(); ++i) {
    if (i) renyi += ",";
    renyi += "[" + fmt17(r.renyi_values[i].first) + "," + fmt17(r.renyi_values[i].second) + "]";
  }
  renyi += "]";
  return "{\"lieb_bound\":" + fmt17(r.lieb_bound) + ",\"renyi_values\":" + renyi +
         ",\"slack_lieb\":" + fmt17(r.slack_lieb) + ",\"slack_thm2\":" + fmt17(r.slack_thm2) +
         ",\"thm2_bound\":" + fmt17(r.thm2_bound) + ",\"twice_j\":" + std::to_string(r.twice_j) +
         ",\"wehrl\":" + fmt17(r.wehrl) + "}";
}

inline std::string entropy_report_csv_header() {
  return "twice_j,wehrl,thm2_bound,lieb_bound,slack_thm2,slack_lieb";
}

inline std::string entropy_report_to_csv_row(const EntropyReport& r) {
  return std::to_string(r.twice_j) + "," + fmt17(r.wehrl) + "," + fmt17(r.thm2_bound) + "," +
         fmt17(r.lieb_bound) + "," + fmt17(r.slack_thm2) + "," + fmt17(r.slack_lieb);
}

// --- Carlen checks ----------------------------------------------------------

inline std::string carlen_to_json(const CarlenCheck& c, double q, int twice_j,
                                  const QuadratureRule& rule) {
  return "{\"lhs\":" + fmt17(c.lhs) + ",\"q\":" + fmt17(q) +
         ",\"rel_residual\":" + fmt17(c.rel_residual) + ",\"rhs\":" + fmt17(c.rhs) +
         ",\"rule\":[" + std::to_string(rule.n_polar) + "," + std::to_string(rule.n_azimuth) +
         "],\"twice_j\":" + std::to_string(twice_j) + "}";
}

// --- search results ---------------------------------------------------------

inline std::string search_result_to_json(const SearchResult& r) {
  return "{\"best_state\":" + state_to_json(r.best_state) + ",\"best_value\":" + fmt17(r.best_value) +
         ",\"converged\":" + (r.converged ? std::string("true") : std::string("false")) +
         ",\"iterations_used\":" + std::to_string(r.iterations_used) +
         ",\"per_start_values\":" + json_array(r.per_start_values, fmt17) + "}";
}

// --- scan reports -----------------------------------------------------------

inline std::string scan_report_csv_header() { return "n,q,max_ratio,violations"; }

inline std::string scan_report_to_csv(const ScanReport& r) {
  std::string out = scan_report_csv_header() + "\n";
  for (const auto& row : r.rows) {
    out += std::to_string(row.n) + "," + fmt17(row.q) + "," + fmt17(row.max_ratio) + "," +
           std::to_string(row.violations) + "\n";
  }
  return out;
}

inline std::string scan_report_to_json(const ScanReport& r) {
  std::string rows = "[";
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    if (i) rows += ",";
    rows += "{\"max_ratio\":" + fmt17(r.rows[i].max_ratio) + ",\"n\":" + std::to_string(r.rows[i].n) +
            ",\"q\":" + fmt17(r.rows[i].q) +
            ",\"violations\":" + std::to_string(r.rows[i].violations) + "}";
  }
  rows += "]";
  return "{\"num_samples\":" + std::to_string(r.num_samples) + ",\"p\":" + fmt17(r.p) +
         ",\"rows\":" + rows + ",\"seed\":" + std::to_string(r.seed) +
         ",\"twice_j\":" + std::to_string(r.twice_j) + "}";
}

// --- radial solutions -------------------------------------------------------

inline std::string ode_problem_to_json(const OdeProblem& p) {
  return "{\"A_expected\":" + fmt17(p.A_expected) + ",\"alpha_theta\":" + fmt17(p.alpha_theta) +
         ",\"b_el\":" + fmt17(p.b_el) + ",\"beta_theta\":" + fmt17(p.beta_theta) +
         ",\"on_lattice\":" + (p.on_lattice ? std::string("true") : std::string("false")) +
         ",\"p\":" + fmt17(p.p) + ",\"q\":" + fmt17(p.q) + ",\"s\":" + fmt17(p.s) +
         ",\"twice_j\":" + std::to_string(p.twice_j) + "}";
}

inline std::string radial_solution_to_csv(const RadialSolution& sol) {
  std::string out = "theta,u,du\n";
  for (std::size_t i = 0; i < sol.theta_grid.size(); ++i) {
    out += fmt17(sol.theta_grid[i]) + "," + fmt17(sol.u_values[i]) + "," + fmt17(sol.du_values[i]) +
           "\n";
  }
  return out;
}

inline std::string radial_solution_to_json(const RadialSolution& sol) {
  return "{\"boundary_log_coeff\":" + fmt17(sol.boundary_log_coeff) +
         ",\"boundary_value\":" + fmt17(sol.boundary_value) +
         ",\"clamped\":" + (sol.clamped ? std::string("true") : std::string("false")) +
         ",\"du_values\":" + json_array(sol.du_values, fmt17) +
         ",\"problem\":" + ode_problem_to_json(sol.problem) +
         ",\"theta_grid\":" + json_array(sol.theta_grid, fmt17) +
         ",\"u_values\":" + json_array(sol.u_values, fmt17) + "}";
}

}  // namespace wehrl::io
