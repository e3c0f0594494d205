#pragma once

#include <nlohmann/json.hpp>

#include "lpcop/bench.hpp"
#include "lpcop/comeans.hpp"
#include "lpcop/copula_model.hpp"
#include "lpcop/inference.hpp"

namespace lpcop {

//! {dims, n, coeffs (row-major), selected, null_sd}
inline nlohmann::json to_json(const ComeanTensor& t) {
  nlohmann::json j;
  j["dims"] = t.dims();
  j["n"] = t.sample_size();
  j["coeffs"] = t.coeffs();
  std::vector<int> sel;
  sel.reserve(t.selected().size());
  for (char s : t.selected()) sel.push_back(s != 0 ? 1 : 0);
  j["selected"] = sel;
  j["null_sd"] = comean_null_sd(t.sample_size());
  return j;
}

//! {statistic, scaled, dof, p_value, components}
inline nlohmann::json to_json(const TestResult& r) {
  nlohmann::json j;
  j["statistic"] = r.statistic;
  j["scaled"] = r.scaled;
  j["dof"] = r.dof;
  j["p_value"] = r.p_value;
  j["components"] = nlohmann::json::array();
  for (const auto& c : r.components) {
    j["components"].push_back({{"index", c.index}, {"value", c.value}});
  }
  if (r.small_sample) j["small_sample"] = true;
  return j;
}

inline nlohmann::json to_json(const SpearmanResult& r) {
  return {{"lp11", r.lp11},
          {"z", r.z},
          {"p_one_sided", r.p_one_sided},
          {"p_two_sided", r.p_two_sided}};
}

inline nlohmann::json to_json(const BenchReport& r) {
  return {{"miae_mean", r.miae_mean},
          {"miae_stderr", r.miae_stderr},
          {"per_rep", r.per_rep},
          {"seconds_per_fit", r.seconds_per_fit}};
}

inline nlohmann::json to_json(const MaxCorrelation& m) {
  nlohmann::json j;
  j["lpmax"] = m.lpmax;
  j["lambda1"] = m.lambda1;
  j["phi1"] = nlohmann::json::array();
  for (const auto& [x, s] : m.phi_table) j["phi1"].push_back({x, s});
  j["psi1"] = nlohmann::json::array();
  for (const auto& [y, s] : m.psi_table) j["psi1"].push_back({y, s});
  return j;
}

}  // namespace lpcop
