#include "mimo_switch/scenario_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace mimo_switch {
namespace {

using nlohmann::json;

const json& field(const json& obj, const char* name) {
  if (!obj.contains(name)) throw ContractViolation(std::string("scenario: missing field '") + name + "'");
  return obj.at(name);
}

CMatrix complex_matrix(const json& rows, const char* name) {
  if (!rows.is_array() || rows.empty()) throw ContractViolation(std::string("scenario: ") + name + " must be a nonempty array");
  const auto r = rows.size();
  const auto c = rows[0].size();
  CMatrix m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  for (std::size_t i = 0; i < r; ++i) {
    if (!rows[i].is_array() || rows[i].size() != c)
      throw ContractViolation(std::string("scenario: ") + name + " rows must have equal length");
    for (std::size_t j = 0; j < c; ++j) {
      const json& e = rows[i][j];
      if (e.is_number()) {
        m(i, j) = Complex(e.get<double>(), 0.0);
      } else if (e.is_array() && e.size() == 2) {
        m(i, j) = Complex(e[0].get<double>(), e[1].get<double>());
      } else {
        throw ContractViolation(std::string("scenario: ") + name + " entries must be [re, im]");
      }
    }
  }
  return m;
}

RVector real_vector(const json& arr, const char* name) {
  if (!arr.is_array()) throw ContractViolation(std::string("scenario: ") + name + " must be an array");
  RVector v(static_cast<Eigen::Index>(arr.size()));
  for (std::size_t i = 0; i < arr.size(); ++i) v[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
  return v;
}

json to_pairs(const CMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

json to_array(const RVector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

}  // namespace

ScenarioFile parse_scenario_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ContractViolation(std::string("scenario: ") + e.what());
  }
  try {
    ScenarioParams p;
    p.uplink = complex_matrix(field(doc, "H"), "H");
    p.downlink = complex_matrix(field(doc, "F"), "F");
    if (doc.contains("q_cap")) p.power_caps = real_vector(doc["q_cap"], "q_cap");
    if (doc.contains("q")) p.powers = real_vector(doc["q"], "q");
    if (p.powers.size() == 0 && p.power_caps.size() == 0)
      throw ContractViolation("scenario: q or q_cap is required");
    p.relay_budget = field(doc, "P_r").get<double>();
    p.relay_noise = field(doc, "gamma2").get<double>();
    p.user_noise = field(doc, "sigma2").get<double>();
    if (doc.contains("weights")) {
      p.mse_weights = real_vector(doc["weights"], "weights");
      p.rate_weights = p.mse_weights;
    }
    if (doc.contains("mse_weights")) p.mse_weights = real_vector(doc["mse_weights"], "mse_weights");
    if (doc.contains("rate_weights")) p.rate_weights = real_vector(doc["rate_weights"], "rate_weights");
    const std::vector<int> perm = field(doc, "perm").get<std::vector<int>>();
    SwitchPattern pat = SwitchPattern::from_one_based(perm);
    Scenario sc(std::move(p));
    if (pat.size() != sc.users()) throw ContractViolation("scenario: perm must have K entries");
    return ScenarioFile{std::move(sc), std::move(pat)};
  } catch (const json::exception& e) {
    throw ContractViolation(std::string("scenario: ") + e.what());
  }
}

ScenarioFile load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ContractViolation("cannot open scenario file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario_json(ss.str());
}

std::string scenario_to_json(const Scenario& sc, const SwitchPattern& pat) {
  std::vector<int> perm;
  for (int r : pat.receivers()) perm.push_back(r + 1);
  json doc{{"H", to_pairs(sc.uplink())},
           {"F", to_pairs(sc.downlink())},
           {"q", to_array(sc.powers())},
           {"q_cap", to_array(sc.power_caps())},
           {"P_r", sc.relay_budget()},
           {"gamma2", sc.relay_noise()},
           {"sigma2", sc.user_noise()},
           {"mse_weights", to_array(sc.mse_weights())},
           {"rate_weights", to_array(sc.rate_weights())},
           {"perm", perm}};
  return doc.dump(2);
}

}  // namespace mimo_switch
