#include "puf/config.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>

namespace puf {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw ConfigError(msg); }

void check_keys(const json& j, const std::string& context,
                std::initializer_list<const char*> allowed) {
  if (!j.is_object()) fail(context + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* a : allowed)
      if (key == a) {
        known = true;
        break;
      }
    if (!known) fail(context + ": unknown key '" + key + "'");
  }
}

double get_num(const json& j, const std::string& context, const char* key,
               double def) {
  if (!j.contains(key)) return def;
  if (!j[key].is_number()) fail(context + "." + key + ": expected a number");
  return j[key].get<double>();
}

int get_int(const json& j, const std::string& context, const char* key,
            int def) {
  if (!j.contains(key)) return def;
  if (!j[key].is_number_integer())
    fail(context + "." + key + ": expected an integer");
  return j[key].get<int>();
}

std::vector<double> get_num_list(const json& j, const std::string& context,
                                 const char* key,
                                 std::vector<double> def) {
  if (!j.contains(key)) return def;
  if (!j[key].is_array()) fail(context + "." + key + ": expected an array");
  std::vector<double> out;
  for (const auto& v : j[key]) {
    if (!v.is_number()) fail(context + "." + key + ": expected numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

TransistorParams parse_transistor(const json& j, const std::string& context) {
  check_keys(j, context,
             {"mobility_cox", "width_w", "length_l", "slope_m", "vth_nominal",
              "body_gamma", "fermi_phi", "vth_temp_coeff"});
  TransistorParams p;
  p.mobility_cox = get_num(j, context, "mobility_cox", p.mobility_cox);
  p.width_w = get_num(j, context, "width_w", p.width_w);
  p.length_l = get_num(j, context, "length_l", p.length_l);
  p.slope_m = get_num(j, context, "slope_m", p.slope_m);
  p.vth_nominal = get_num(j, context, "vth_nominal", p.vth_nominal);
  p.body_gamma = get_num(j, context, "body_gamma", p.body_gamma);
  p.fermi_phi = get_num(j, context, "fermi_phi", p.fermi_phi);
  p.vth_temp_coeff = get_num(j, context, "vth_temp_coeff", p.vth_temp_coeff);
  return p;
}

}  // namespace

void ExperimentConfig::validate() const {
  try {
    model.validate();
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }
  if (nominal.temperature <= 0.0) fail("environment.temperature must be > 0");
  if (nominal.supply_vdd < 0.0) fail("environment.supply_vdd must be >= 0");
  const double vpw_bound = 2.0 * model.process.inverter_nmos.fermi_phi;
  auto check_vpw = [&](double v, const char* where) {
    if (std::abs(v) > vpw_bound)
      fail(std::string(where) + ": |body_vpw| exceeds model validity bound");
  };
  check_vpw(nominal.body_vpw, "environment.body_vpw");
  for (double v : stabilization.vpw_sweep)
    check_vpw(v, "stabilization.vpw_sweep");
  if (seeds.empty()) fail("seeds: at least one chip seed required");
  for (double t : temperature_grid)
    if (t <= 0.0) fail("temperature_grid: temperatures must be > 0 K");
  for (double t : stabilization.temp_grid)
    if (t <= 0.0) fail("stabilization.temp_grid: temperatures must be > 0 K");
  for (double s : supply_grid)
    if (s < 0.0) fail("supply_grid: supplies must be >= 0");
  auto odd = [](int v, const char* name) {
    if (v < 1 || v % 2 == 0)
      fail(std::string(name) + ": must be odd and >= 1");
  };
  odd(stabilization.tmv_k, "stabilization.tmv_k");
  odd(stabilization.golden_votes, "stabilization.golden_votes");
  odd(stabilization.enroll_votes, "stabilization.enroll_votes");
  if (evaluation.n_evals < 1) fail("evaluation.n_evals must be >= 1");
  if (evaluation.sweep_n_evals < 1)
    fail("evaluation.sweep_n_evals must be >= 1");
  if (evaluation.autocorr_max_lag < 1)
    fail("evaluation.autocorr_max_lag must be >= 1");
  if (evaluation.nist.alpha <= 0.0 || evaluation.nist.alpha >= 1.0)
    fail("evaluation.nist.alpha must be in (0, 1)");
  if (output_dir.empty()) fail("output_dir must not be empty");
}

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(j, "config",
             {"process", "mismatch", "noise", "geometry", "vm_fraction",
              "environment", "seeds", "temperature_grid", "supply_grid",
              "stabilization", "evaluation", "output_dir"});

  ExperimentConfig cfg;

  if (j.contains("process")) {
    const json& p = j["process"];
    check_keys(p, "process", {"inverter_nmos", "inverter_pmos", "native"});
    if (p.contains("inverter_nmos"))
      cfg.model.process.inverter_nmos =
          parse_transistor(p["inverter_nmos"], "process.inverter_nmos");
    if (p.contains("inverter_pmos"))
      cfg.model.process.inverter_pmos =
          parse_transistor(p["inverter_pmos"], "process.inverter_pmos");
    if (p.contains("native"))
      cfg.model.process.native =
          parse_transistor(p["native"], "process.native");
  }

  if (j.contains("mismatch")) {
    const json& m = j["mismatch"];
    check_keys(m, "mismatch",
               {"pelgrom_avt", "tempco_sigma", "gamma_sigma_rel",
                "tempco_gamma_corr", "sigma_global"});
    MismatchModel& mm = cfg.model.mismatch;
    mm.pelgrom_avt = get_num(m, "mismatch", "pelgrom_avt", mm.pelgrom_avt);
    mm.tempco_sigma = get_num(m, "mismatch", "tempco_sigma", mm.tempco_sigma);
    mm.gamma_sigma_rel =
        get_num(m, "mismatch", "gamma_sigma_rel", mm.gamma_sigma_rel);
    mm.tempco_gamma_corr =
        get_num(m, "mismatch", "tempco_gamma_corr", mm.tempco_gamma_corr);
    mm.sigma_global = get_num(m, "mismatch", "sigma_global", mm.sigma_global);
  }

  if (j.contains("noise")) {
    const json& n = j["noise"];
    check_keys(n, "noise", {"sigma_n", "gain_original", "gain_reconfigured"});
    NoiseModel& nm = cfg.model.noise;
    nm.sigma_n = get_num(n, "noise", "sigma_n", nm.sigma_n);
    nm.gain_original = get_num(n, "noise", "gain_original", nm.gain_original);
    nm.gain_reconfigured =
        get_num(n, "noise", "gain_reconfigured", nm.gain_reconfigured);
  }

  if (j.contains("geometry")) {
    const json& g = j["geometry"];
    check_keys(g, "geometry", {"rows", "cols", "cells_per_regulator"});
    ArrayGeometry& ag = cfg.model.geometry;
    ag.rows = get_int(g, "geometry", "rows", ag.rows);
    ag.cols = get_int(g, "geometry", "cols", ag.cols);
    ag.cells_per_regulator =
        get_int(g, "geometry", "cells_per_regulator", ag.cells_per_regulator);
  }

  cfg.model.vm_fraction =
      get_num(j, "config", "vm_fraction", cfg.model.vm_fraction);

  if (j.contains("environment")) {
    const json& e = j["environment"];
    check_keys(e, "environment",
               {"temperature", "supply_vdd", "bias_vbias", "body_vpw"});
    cfg.nominal.temperature =
        get_num(e, "environment", "temperature", cfg.nominal.temperature);
    cfg.nominal.supply_vdd =
        get_num(e, "environment", "supply_vdd", cfg.nominal.supply_vdd);
    cfg.nominal.bias_vbias =
        get_num(e, "environment", "bias_vbias", cfg.nominal.bias_vbias);
    cfg.nominal.body_vpw =
        get_num(e, "environment", "body_vpw", cfg.nominal.body_vpw);
  }

  if (j.contains("seeds")) {
    if (!j["seeds"].is_array()) fail("seeds: expected an array");
    for (const auto& s : j["seeds"]) {
      if (!s.is_number_unsigned()) fail("seeds: expected unsigned integers");
      cfg.seeds.push_back(s.get<uint64_t>());
    }
  }

  cfg.temperature_grid =
      get_num_list(j, "config", "temperature_grid", cfg.temperature_grid);
  cfg.supply_grid = get_num_list(j, "config", "supply_grid", cfg.supply_grid);

  if (j.contains("stabilization")) {
    const json& s = j["stabilization"];
    check_keys(s, "stabilization",
               {"tmv_k", "golden_votes", "enroll_votes", "vpw_sweep",
                "temp_grid"});
    StabilizationConfig& sc = cfg.stabilization;
    sc.tmv_k = get_int(s, "stabilization", "tmv_k", sc.tmv_k);
    sc.golden_votes =
        get_int(s, "stabilization", "golden_votes", sc.golden_votes);
    sc.enroll_votes =
        get_int(s, "stabilization", "enroll_votes", sc.enroll_votes);
    sc.vpw_sweep = get_num_list(s, "stabilization", "vpw_sweep", sc.vpw_sweep);
    sc.temp_grid = get_num_list(s, "stabilization", "temp_grid", sc.temp_grid);
  }

  if (j.contains("evaluation")) {
    const json& e = j["evaluation"];
    check_keys(e, "evaluation",
               {"n_evals", "sweep_n_evals", "autocorr_max_lag", "nist"});
    EvaluationConfig& ec = cfg.evaluation;
    ec.n_evals = get_int(e, "evaluation", "n_evals", ec.n_evals);
    ec.sweep_n_evals =
        get_int(e, "evaluation", "sweep_n_evals", ec.sweep_n_evals);
    ec.autocorr_max_lag =
        get_int(e, "evaluation", "autocorr_max_lag", ec.autocorr_max_lag);
    if (e.contains("nist")) {
      const json& n = e["nist"];
      check_keys(n, "evaluation.nist",
                 {"alpha", "block_frequency_m", "serial_m",
                  "approximate_entropy_m"});
      ec.nist.alpha = get_num(n, "evaluation.nist", "alpha", ec.nist.alpha);
      ec.nist.block_frequency_m = get_int(n, "evaluation.nist",
                                          "block_frequency_m",
                                          ec.nist.block_frequency_m);
      ec.nist.serial_m =
          get_int(n, "evaluation.nist", "serial_m", ec.nist.serial_m);
      ec.nist.approximate_entropy_m =
          get_int(n, "evaluation.nist", "approximate_entropy_m",
                  ec.nist.approximate_entropy_m);
    }
  }

  if (j.contains("output_dir")) {
    if (!j["output_dir"].is_string()) fail("output_dir: expected a string");
    cfg.output_dir = j["output_dir"].get<std::string>();
  }

  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

namespace {

json transistor_json(const TransistorParams& p) {
  return json{{"mobility_cox", p.mobility_cox},
              {"width_w", p.width_w},
              {"length_l", p.length_l},
              {"slope_m", p.slope_m},
              {"vth_nominal", p.vth_nominal},
              {"body_gamma", p.body_gamma},
              {"fermi_phi", p.fermi_phi},
              {"vth_temp_coeff", p.vth_temp_coeff}};
}

}  // namespace

std::string canonical_config(const ExperimentConfig& cfg) {
  json j;
  j["process"]["inverter_nmos"] = transistor_json(cfg.model.process.inverter_nmos);
  j["process"]["inverter_pmos"] = transistor_json(cfg.model.process.inverter_pmos);
  j["process"]["native"] = transistor_json(cfg.model.process.native);
  j["mismatch"] = {{"pelgrom_avt", cfg.model.mismatch.pelgrom_avt},
                   {"tempco_sigma", cfg.model.mismatch.tempco_sigma},
                   {"gamma_sigma_rel", cfg.model.mismatch.gamma_sigma_rel},
                   {"tempco_gamma_corr", cfg.model.mismatch.tempco_gamma_corr},
                   {"sigma_global", cfg.model.mismatch.sigma_global}};
  j["noise"] = {{"sigma_n", cfg.model.noise.sigma_n},
                {"gain_original", cfg.model.noise.gain_original},
                {"gain_reconfigured", cfg.model.noise.gain_reconfigured}};
  j["geometry"] = {{"rows", cfg.model.geometry.rows},
                   {"cols", cfg.model.geometry.cols},
                   {"cells_per_regulator",
                    cfg.model.geometry.cells_per_regulator}};
  j["vm_fraction"] = cfg.model.vm_fraction;
  j["environment"] = {{"temperature", cfg.nominal.temperature},
                      {"supply_vdd", cfg.nominal.supply_vdd},
                      {"bias_vbias", cfg.nominal.bias_vbias},
                      {"body_vpw", cfg.nominal.body_vpw}};
  j["seeds"] = cfg.seeds;
  j["temperature_grid"] = cfg.temperature_grid;
  j["supply_grid"] = cfg.supply_grid;
  j["stabilization"] = {{"tmv_k", cfg.stabilization.tmv_k},
                        {"golden_votes", cfg.stabilization.golden_votes},
                        {"enroll_votes", cfg.stabilization.enroll_votes},
                        {"vpw_sweep", cfg.stabilization.vpw_sweep},
                        {"temp_grid", cfg.stabilization.temp_grid}};
  j["evaluation"] = {{"n_evals", cfg.evaluation.n_evals},
                     {"sweep_n_evals", cfg.evaluation.sweep_n_evals},
                     {"autocorr_max_lag", cfg.evaluation.autocorr_max_lag},
                     {"nist",
                      {{"alpha", cfg.evaluation.nist.alpha},
                       {"block_frequency_m",
                        cfg.evaluation.nist.block_frequency_m},
                       {"serial_m", cfg.evaluation.nist.serial_m},
                       {"approximate_entropy_m",
                        cfg.evaluation.nist.approximate_entropy_m}}}};
  j["output_dir"] = cfg.output_dir;
  return j.dump();  // nlohmann objects iterate key-sorted
}

std::string config_hash(const ExperimentConfig& cfg) {
  const std::string text = canonical_config(cfg);
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace puf
