#include "puf/config.hpp"
#include "puf/metrics.hpp"
#include "puf/serialize.hpp"
#include "puf/stabilize.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace puf;

namespace {

struct CliOptions {
  std::string config_path = "configs/reference.json";
  std::vector<uint64_t> seeds;  // overrides config seeds when non-empty
  std::string method = "evb";
  std::string out_dir;  // overrides config output_dir when non-empty
  int threads = 1;
  std::string format = "csv";
};

struct RunContext {
  ExperimentConfig cfg;
  CliOptions opts;
  fs::path out;
  json overrides = json::object();
};

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << content;
}

std::string read_file(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream buf;
  buf << f.rdbuf();
  return buf.str();
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

RunContext make_context(const CliOptions& opts) {
  RunContext ctx;
  ctx.cfg = load_config(opts.config_path);
  ctx.opts = opts;
  if (!opts.seeds.empty()) {
    ctx.cfg.seeds = opts.seeds;
    ctx.overrides["seeds"] = opts.seeds;
  }
  if (!opts.out_dir.empty()) {
    ctx.cfg.output_dir = opts.out_dir;
    ctx.overrides["output_dir"] = opts.out_dir;
  }
  ctx.cfg.validate();
  ctx.out = ctx.cfg.output_dir;
  fs::create_directories(ctx.out);
  return ctx;
}

// Reproducibility record; the timestamp lives here and nowhere else.
void write_manifest(const RunContext& ctx, const std::string& command,
                    const std::vector<std::string>& outputs) {
  json m;
  m["command"] = command;
  m["config_file"] = ctx.opts.config_path;
  m["config_hash"] = config_hash(ctx.cfg);
  m["seeds"] = ctx.cfg.seeds;
  m["threads"] = ctx.opts.threads;
  if (!ctx.overrides.empty()) m["overrides"] = ctx.overrides;
  m["outputs"] = outputs;
  const auto now = std::chrono::system_clock::now();
  m["timestamp_unix"] =
      std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch())
          .count();
  write_file(ctx.out / ("manifest_" + command + ".json"), m.dump(2) + "\n");
}

fs::path chip_path(const RunContext& ctx, size_t idx) {
  return ctx.out / ("chip_" + std::to_string(idx) + ".json");
}

json chip_to_json(const ChipInstance& chip) {
  return json{{"chip_id", chip.chip_id},
              {"seed", chip.seed},
              {"rows", chip.geometry.rows},
              {"cols", chip.geometry.cols},
              {"global_vth_shift", chip.global_vth_shift}};
}

// Chips are pure functions of (seed, model); the artifact records identity
// and is cross-checked against the regenerated instance on load.
ChipInstance load_chip(const RunContext& ctx, size_t idx) {
  const fs::path path = chip_path(ctx, idx);
  if (!fs::exists(path))
    throw std::runtime_error("missing chip artifact " + path.string() +
                             " (run 'generate' first)");
  const json j = json::parse(read_file(path));
  const uint64_t seed = j.at("seed").get<uint64_t>();
  const uint32_t chip_id = j.at("chip_id").get<uint32_t>();
  ChipInstance chip = generate_chip(ctx.cfg.model, seed, chip_id);
  if (j.at("rows").get<int>() != chip.geometry.rows ||
      j.at("cols").get<int>() != chip.geometry.cols)
    throw std::runtime_error("chip artifact geometry mismatch: " +
                             path.string());
  return chip;
}

int cmd_generate(const CliOptions& opts) {
  RunContext ctx = make_context(opts);
  std::vector<std::string> outputs;
  for (size_t i = 0; i < ctx.cfg.seeds.size(); ++i) {
    const ChipInstance chip =
        generate_chip(ctx.cfg.model, ctx.cfg.seeds[i], uint32_t(i));
    const fs::path path = chip_path(ctx, i);
    write_file(path, chip_to_json(chip).dump(2) + "\n");
    outputs.push_back(path.filename().string());
  }
  write_manifest(ctx, "generate", outputs);
  std::cout << "generated " << ctx.cfg.seeds.size() << " chip(s) in "
            << ctx.out.string() << "\n";
  return 0;
}

struct EnrollArtifacts {
  GoldenKey golden;
  RMap rmap;
  Mask mask;
};

EnrollArtifacts enroll_chip(const RunContext& ctx, const ChipInstance& chip,
                            const std::string& method) {
  const StabilizationConfig& st = ctx.cfg.stabilization;
  EnrollArtifacts a;
  a.golden = collect_golden(ctx.cfg.model, chip, ctx.cfg.nominal,
                            st.golden_votes, ctx.opts.threads);
  if (method == "temp-oracle") {
    std::vector<double> grid = st.temp_grid;
    if (grid.empty()) grid = ctx.cfg.temperature_grid;
    if (grid.empty())
      throw ConfigError("temp-oracle enrollment needs a temperature grid");
    a.rmap = enroll_rmap_temperature_oracle(ctx.cfg.model, chip, a.golden,
                                            grid, st.enroll_votes,
                                            ctx.opts.threads);
  } else {
    a.rmap = enroll_rmap_evb(ctx.cfg.model, chip, a.golden, st.vpw_sweep,
                             st.enroll_votes, ctx.opts.threads);
  }
  a.mask = mask_residual_unstable(ctx.cfg.model, chip, a.rmap, ctx.cfg.nominal,
                                  st.vpw_sweep, st.enroll_votes,
                                  ctx.opts.threads);
  return a;
}

int cmd_enroll(const CliOptions& opts) {
  RunContext ctx = make_context(opts);
  const std::string& method = ctx.opts.method;
  if (method != "evb" && method != "temp-oracle" && method != "both")
    throw ConfigError("--method must be evb, temp-oracle, or both");

  std::vector<std::string> outputs;
  std::string report = csv_row({"chip", "method", "flagged", "flagged_pct",
                                "masked", "precision", "recall"});
  for (size_t i = 0; i < ctx.cfg.seeds.size(); ++i) {
    const ChipInstance chip = load_chip(ctx, i);
    const std::string tag = std::to_string(i);

    RMap oracle;
    bool have_oracle = false;
    for (const std::string m :
         method == "both" ? std::vector<std::string>{"evb", "temp-oracle"}
                          : std::vector<std::string>{method}) {
      const EnrollArtifacts a = enroll_chip(ctx, chip, m);
      const std::string suffix =
          method == "both" ? tag + "_" + m : tag;
      const fs::path rpath = ctx.out / ("rmap_" + suffix + ".txt");
      const fs::path mpath = ctx.out / ("mask_" + suffix + ".txt");
      const fs::path gpath = ctx.out / ("golden_" + tag + ".hex");
      write_file(rpath, rmap_to_text(a.rmap));
      write_file(mpath, mask_to_text(a.mask));
      write_file(gpath, to_hex(a.golden.bits));
      outputs.push_back(rpath.filename().string());
      outputs.push_back(mpath.filename().string());
      outputs.push_back(gpath.filename().string());

      double precision = 0.0, recall = 0.0;
      if (m == "temp-oracle") {
        oracle = a.rmap;
        have_oracle = true;
      } else if (have_oracle || method == "both") {
        // precision/recall filled on the second pass below
      }
      const size_t flagged = a.rmap.flagged_count();
      const double pct =
          100.0 * double(flagged) / double(a.rmap.reconfigure.size());
      report += csv_row({tag, m, std::to_string(flagged), fmt(pct),
                         std::to_string(a.mask.masked_count()),
                         fmt(precision), fmt(recall)});
    }
    if (method == "both") {
      // Set comparison: EVB flags scored against the temperature oracle.
      const RMap evb = rmap_from_text(
          read_file(ctx.out / ("rmap_" + tag + "_evb.txt")));
      size_t tp = 0, fp = 0, fn = 0;
      for (size_t c = 0; c < evb.reconfigure.size(); ++c) {
        const bool e = evb.flagged(c), o = oracle.flagged(c);
        tp += e && o;
        fp += e && !o;
        fn += !e && o;
      }
      const double precision = tp + fp == 0 ? 0.0 : double(tp) / (tp + fp);
      const double recall = tp + fn == 0 ? 0.0 : double(tp) / (tp + fn);
      report += csv_row({tag, "evb_vs_oracle", std::to_string(tp + fp), "",
                         "", fmt(precision), fmt(recall)});
    }
  }
  const fs::path rpt = ctx.out / "enrollment_report.csv";
  write_file(rpt, report);
  outputs.push_back(rpt.filename().string());
  write_manifest(ctx, "enroll", outputs);
  std::cout << "enrolled " << ctx.cfg.seeds.size() << " chip(s), method "
            << method << "\n";
  return 0;
}

RMap load_rmap(const RunContext& ctx, size_t idx) {
  fs::path p = ctx.out / ("rmap_" + std::to_string(idx) + ".txt");
  if (!fs::exists(p))
    p = ctx.out / ("rmap_" + std::to_string(idx) + "_evb.txt");
  if (!fs::exists(p))
    throw std::runtime_error("missing rmap for chip " + std::to_string(idx) +
                             " (run 'enroll' first)");
  return rmap_from_text(read_file(p));
}

Mask load_mask(const RunContext& ctx, size_t idx) {
  fs::path p = ctx.out / ("mask_" + std::to_string(idx) + ".txt");
  if (!fs::exists(p))
    p = ctx.out / ("mask_" + std::to_string(idx) + "_evb.txt");
  if (!fs::exists(p))
    throw std::runtime_error("missing mask for chip " + std::to_string(idx));
  return mask_from_text(read_file(p));
}

GoldenKey load_golden(const RunContext& ctx, size_t idx,
                      const ChipInstance& chip) {
  const fs::path p = ctx.out / ("golden_" + std::to_string(idx) + ".hex");
  if (!fs::exists(p))
    throw std::runtime_error("missing golden key for chip " +
                             std::to_string(idx) + " (run 'enroll' first)");
  GoldenKey g;
  g.bits = from_hex(read_file(p), chip.geometry.rows, chip.geometry.cols);
  g.collected_at = ctx.cfg.nominal;
  g.votes = ctx.cfg.stabilization.golden_votes;
  return g;
}

int cmd_evaluate(const CliOptions& opts) {
  RunContext ctx = make_context(opts);
  std::vector<std::string> outputs;

  std::vector<BitMatrix> goldens;
  std::vector<std::vector<BitMatrix>> readouts_per_chip;
  std::vector<uint8_t> pooled_bits;
  std::string per_chip =
      csv_row({"chip", "raw_ber", "unstable_fraction", "entropy"});

  for (size_t i = 0; i < ctx.cfg.seeds.size(); ++i) {
    const ChipInstance chip = load_chip(ctx, i);
    const GoldenKey golden = load_golden(ctx, i, chip);
    const std::vector<BitMatrix> reads =
        evaluate_array(ctx.cfg.model, chip, ctx.cfg.nominal, nullptr,
                       ctx.cfg.evaluation.n_evals, ctx.opts.threads);
    std::vector<uint8_t> bits(golden.bits.data());
    pooled_bits.insert(pooled_bits.end(), bits.begin(), bits.end());
    per_chip += csv_row({std::to_string(i), fmt(ber(golden.bits, reads)),
                         fmt(unstable_fraction(golden.bits, reads)),
                         fmt(shannon_entropy(bits))});
    goldens.push_back(golden.bits);
    readouts_per_chip.push_back(std::move(reads));
  }

  EvalReport report;
  report.n_evals = ctx.cfg.evaluation.n_evals;
  double ber_sum = 0.0, unstable_sum = 0.0;
  for (size_t i = 0; i < goldens.size(); ++i) {
    ber_sum += ber(goldens[i], readouts_per_chip[i]);
    unstable_sum += unstable_fraction(goldens[i], readouts_per_chip[i]);
  }
  report.ber = ber_sum / goldens.size();
  report.unstable_fraction = unstable_sum / goldens.size();
  report.hamming = hamming_distances(goldens, readouts_per_chip);
  const int max_lag =
      std::min<size_t>(ctx.cfg.evaluation.autocorr_max_lag,
                       pooled_bits.size() - 1);
  report.autocorr = autocorrelation(pooled_bits, max_lag);
  report.entropy_bits = shannon_entropy(pooled_bits);
  report.test_results =
      nist_800_22_subset(pooled_bits, ctx.cfg.evaluation.nist);

  const fs::path per = ctx.out / "evaluate_per_chip.csv";
  write_file(per, per_chip);
  outputs.push_back(per.filename().string());
  const bool json_out = ctx.opts.format == "json";
  const fs::path rp = ctx.out / (json_out ? "evaluate_report.json"
                                          : "evaluate_report.txt");
  write_file(rp, json_out ? eval_report_to_json(report)
                          : eval_report_to_text(report));
  outputs.push_back(rp.filename().string());
  const fs::path ac = ctx.out / "autocorrelation.csv";
  write_file(ac, autocorrelation_to_csv(report.autocorr));
  outputs.push_back(ac.filename().string());
  write_manifest(ctx, "evaluate", outputs);
  std::cout << eval_report_to_text(report);
  return 0;
}

int cmd_sweep(const CliOptions& opts) {
  RunContext ctx = make_context(opts);
  std::vector<std::string> outputs;

  // Regulator characterization over the configured grids.
  {
    std::vector<Environment> grid;
    for (double t : ctx.cfg.temperature_grid) {
      Environment e = ctx.cfg.nominal;
      e.temperature = t;
      grid.push_back(e);
    }
    for (double s : ctx.cfg.supply_grid) {
      Environment e = ctx.cfg.nominal;
      e.supply_vdd = s;
      grid.push_back(e);
    }
    std::string csv = csv_row(
        {"temperature_K", "supply_V", "vbias_V", "vvdd_V", "converged"});
    if (!grid.empty()) {
      const SweepSummary s =
          sensitivity_sweep(ctx.cfg.model.regulator(), grid);
      for (const SweepRow& r : s.rows)
        csv += csv_row({fmt(r.env.temperature), fmt(r.env.supply_vdd),
                        fmt(r.env.bias_vbias), fmt(r.vvdd),
                        r.converged ? "1" : "0"});
    }
    const fs::path p = ctx.out / "regulator_sweep.csv";
    write_file(p, csv);
    outputs.push_back(p.filename().string());
  }

  // Per-chip BER across the environment grids, unstabilized.
  std::string csv = csv_row({"chip", "temperature_K", "supply_V", "ber",
                             "unstable_fraction"});
  for (size_t i = 0; i < ctx.cfg.seeds.size(); ++i) {
    const ChipInstance chip = load_chip(ctx, i);
    const GoldenKey golden = load_golden(ctx, i, chip);
    std::vector<Environment> grid;
    for (double t : ctx.cfg.temperature_grid) {
      Environment e = ctx.cfg.nominal;
      e.temperature = t;
      grid.push_back(e);
    }
    for (double s : ctx.cfg.supply_grid) {
      Environment e = ctx.cfg.nominal;
      e.supply_vdd = s;
      grid.push_back(e);
    }
    if (grid.empty()) continue;
    const auto points = environment_sweep(ctx.cfg.model, chip, grid, nullptr,
                                          golden.bits,
                                          ctx.cfg.evaluation.sweep_n_evals,
                                          ctx.opts.threads);
    for (const SweepPointAggregate& pt : points)
      csv += csv_row({std::to_string(i), fmt(pt.env.temperature),
                      fmt(pt.env.supply_vdd), fmt(pt.ber),
                      fmt(pt.unstable_fraction)});
  }
  const fs::path p = ctx.out / "environment_sweep.csv";
  write_file(p, csv);
  outputs.push_back(p.filename().string());
  write_manifest(ctx, "sweep", outputs);
  std::cout << "sweep written to " << ctx.out.string() << "\n";
  return 0;
}

int cmd_stabilize(const CliOptions& opts) {
  RunContext ctx = make_context(opts);
  std::vector<std::string> outputs;
  std::string csv = csv_row({"chip", "raw_ber", "tmv_ber", "stabilized_ber",
                             "masked_cells"});
  const int k = ctx.cfg.stabilization.tmv_k;
  const int n_out =
      std::max(1, ctx.cfg.evaluation.n_evals / std::max(1, k));
  for (size_t i = 0; i < ctx.cfg.seeds.size(); ++i) {
    const ChipInstance chip = load_chip(ctx, i);
    const GoldenKey golden = load_golden(ctx, i, chip);
    const RMap rmap = load_rmap(ctx, i);
    const Mask mask = load_mask(ctx, i);
    const RMap empty_rmap{chip.chip_id,
                          BitMatrix(chip.geometry.rows, chip.geometry.cols),
                          MapProvenance::Manual,
                          ""};
    const Mask empty_mask{chip.chip_id,
                          BitMatrix(chip.geometry.rows, chip.geometry.cols),
                          ""};

    const auto raw = evaluate_array(ctx.cfg.model, chip, ctx.cfg.nominal,
                                    nullptr, ctx.cfg.evaluation.n_evals,
                                    ctx.opts.threads);
    const auto tmv_only =
        apply_stabilization(ctx.cfg.model, chip, empty_rmap, empty_mask,
                            ctx.cfg.nominal, k, n_out, ctx.opts.threads);
    const auto full =
        apply_stabilization(ctx.cfg.model, chip, rmap, mask, ctx.cfg.nominal,
                            k, n_out, ctx.opts.threads);
    const GoldenKey golden_stab =
        collect_golden(ctx.cfg.model, chip, ctx.cfg.nominal,
                       ctx.cfg.stabilization.golden_votes, ctx.opts.threads,
                       &rmap);
    csv += csv_row({std::to_string(i), fmt(ber(golden.bits, raw)),
                    fmt(ber(golden.bits, tmv_only)),
                    fmt(ber(golden_stab.bits, full, &mask)),
                    std::to_string(mask.masked_count())});
    const fs::path bp = ctx.out / ("stabilized_" + std::to_string(i) + ".hex");
    write_file(bp, to_hex(full.front()));
    outputs.push_back(bp.filename().string());
  }
  const fs::path p = ctx.out / "stabilize_report.csv";
  write_file(p, csv);
  outputs.push_back(p.filename().string());
  write_manifest(ctx, "stabilize", outputs);
  std::cout << "stabilization report written to " << p.string() << "\n";
  return 0;
}

int cmd_report(const CliOptions& opts) {
  RunContext ctx = make_context(opts);
  std::vector<std::string> outputs;
  const StabilizationConfig& st = ctx.cfg.stabilization;

  // Method comparison across temperature: raw, TMV, reconfig+TMV,
  // temperature-oracle filter.
  std::string cmp = csv_row({"chip", "temperature_K", "raw_ber", "tmv_ber",
                             "reconfig_tmv_ber", "oracle_filter_ber"});
  std::vector<double> temps = ctx.cfg.temperature_grid;
  for (size_t i = 0; i < ctx.cfg.seeds.size() && !temps.empty(); ++i) {
    const ChipInstance chip = load_chip(ctx, i);
    const GoldenKey golden = load_golden(ctx, i, chip);
    const RMap rmap = load_rmap(ctx, i);
    const Mask mask = load_mask(ctx, i);
    std::vector<double> oracle_grid = st.temp_grid;
    if (oracle_grid.empty()) oracle_grid = temps;
    const RMap oracle = enroll_rmap_temperature_oracle(
        ctx.cfg.model, chip, golden, oracle_grid, st.enroll_votes,
        ctx.opts.threads);
    Mask oracle_filter;  // oracle map used as a discard filter
    oracle_filter.chip_id = chip.chip_id;
    oracle_filter.discard = oracle.reconfigure;

    const GoldenKey golden_stab =
        collect_golden(ctx.cfg.model, chip, ctx.cfg.nominal, st.golden_votes,
                       ctx.opts.threads, &rmap);
    const int n = ctx.cfg.evaluation.sweep_n_evals;
    const int n_out = std::max(1, n / st.tmv_k);
    const RMap empty_rmap{chip.chip_id,
                          BitMatrix(chip.geometry.rows, chip.geometry.cols),
                          MapProvenance::Manual,
                          ""};
    const Mask empty_mask{chip.chip_id,
                          BitMatrix(chip.geometry.rows, chip.geometry.cols),
                          ""};
    for (double t : temps) {
      Environment env = ctx.cfg.nominal;
      env.temperature = t;
      const auto raw = evaluate_array(ctx.cfg.model, chip, env, nullptr, n,
                                      ctx.opts.threads);
      const auto tmv_only =
          apply_stabilization(ctx.cfg.model, chip, empty_rmap, empty_mask, env,
                              st.tmv_k, n_out, ctx.opts.threads);
      const auto full = apply_stabilization(ctx.cfg.model, chip, rmap, mask,
                                            env, st.tmv_k, n_out,
                                            ctx.opts.threads);
      cmp += csv_row({std::to_string(i), fmt(t), fmt(ber(golden.bits, raw)),
                      fmt(ber(golden.bits, tmv_only)),
                      fmt(ber(golden_stab.bits, full, &mask)),
                      fmt(ber(golden.bits, raw, &oracle_filter))});
    }
  }
  const fs::path cp = ctx.out / "method_comparison.csv";
  write_file(cp, cmp);
  outputs.push_back(cp.filename().string());

  // Detection rate per single VPW point, against the temperature oracle.
  std::string det = csv_row({"chip", "vpw_V", "flagged", "truly_unstable",
                             "detection_rate"});
  for (size_t i = 0; i < ctx.cfg.seeds.size(); ++i) {
    const ChipInstance chip = load_chip(ctx, i);
    const GoldenKey golden = load_golden(ctx, i, chip);
    std::vector<double> oracle_grid = st.temp_grid;
    if (oracle_grid.empty()) oracle_grid = ctx.cfg.temperature_grid;
    if (oracle_grid.empty()) break;
    const RMap oracle = enroll_rmap_temperature_oracle(
        ctx.cfg.model, chip, golden, oracle_grid, st.enroll_votes,
        ctx.opts.threads);
    for (const DetectionRate& d :
         evb_detection_rates(ctx.cfg.model, chip, golden, st.vpw_sweep, oracle,
                             st.enroll_votes, ctx.opts.threads))
      det += csv_row({std::to_string(i), fmt(d.vpw),
                      std::to_string(d.flagged),
                      std::to_string(d.truly_unstable_flagged), fmt(d.rate)});
  }
  const fs::path dp = ctx.out / "detection_rate.csv";
  write_file(dp, det);
  outputs.push_back(dp.filename().string());

  // Hamming distance samples for histograms.
  {
    std::vector<BitMatrix> goldens;
    std::vector<std::vector<BitMatrix>> reads;
    for (size_t i = 0; i < ctx.cfg.seeds.size(); ++i) {
      const ChipInstance chip = load_chip(ctx, i);
      goldens.push_back(load_golden(ctx, i, chip).bits);
      reads.push_back(evaluate_array(ctx.cfg.model, chip, ctx.cfg.nominal,
                                     nullptr, 32, ctx.opts.threads));
    }
    const HammingReport hd = hamming_distances(goldens, reads);
    std::string csv = csv_row({"kind", "value"});
    for (double v : hd.intra.samples) csv += csv_row({"intra", fmt(v)});
    if (hd.inter)
      for (double v : hd.inter->samples) csv += csv_row({"inter", fmt(v)});
    const fs::path p = ctx.out / "hamming_samples.csv";
    write_file(p, csv);
    outputs.push_back(p.filename().string());
  }
  write_manifest(ctx, "report", outputs);
  std::cout << "report written to " << ctx.out.string() << "\n";
  return 0;
}

// Fast built-in checks of the analytic anchors; the full suite lives in
// the test binaries.
int cmd_selftest(const CliOptions& opts) {
  int failures = 0;
  auto check = [&](const char* name, bool ok) {
    std::cout << (ok ? "ok   " : "FAIL ") << name << "\n";
    if (!ok) ++failures;
  };
  const PhysicalConstants pc;
  check("thermal_voltage 300.15K = 25.87mV",
        std::abs(thermal_voltage(pc, 300.15) - 0.02587) < 1e-5);
  check("tmv binomial tail k=11 p=0.3",
        std::abs(tmv_error_probability(11, 0.3) - 0.07822) < 5e-4);
  check("entropy p=0.489", [&] {
    std::vector<uint8_t> bits(100000, 0);
    for (size_t i = 0; i < 48900; ++i) bits[i] = 1;
    return std::abs(shannon_entropy(bits) - 0.99965) < 1e-4;
  }());
  // Published worked example: the first 100 binary digits of pi.
  {
    const char* eps =
        "1100100100001111110110101010001000100001011010001100"
        "001000110100110001001100011001100010100010111000";
    std::vector<uint8_t> bits;
    for (const char* p = eps; *p; ++p) bits.push_back(*p == '1');
    const TestResult r = frequency_test(bits);
    check("frequency test p=0.109599",
          !r.skipped && std::abs(r.p_value - 0.109599) < 1e-5);
  }
  {
    ExperimentConfig cfg;
    try {
      cfg = load_config(opts.config_path);
      check("config loads and validates", true);
      const double v =
          virtual_vdd_fixed_point(cfg.model.regulator(), cfg.nominal);
      const double c =
          virtual_vdd_closed_form(cfg.model.regulator(), cfg.nominal);
      check("regulator fixed point vs closed form < 1mV",
            std::abs(v - c) < 1e-3);
    } catch (const std::exception& e) {
      std::cout << "FAIL config/regulator: " << e.what() << "\n";
      ++failures;
    }
  }
  std::cout << (failures == 0 ? "selftest passed\n" : "selftest FAILED\n");
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Subthreshold PUF Monte-Carlo simulator"};
  app.require_subcommand(1);

  CliOptions opts;
  app.add_option("--config", opts.config_path, "Experiment config file")
      ->capture_default_str();
  app.add_option("--seed", opts.seeds,
                 "Chip seed (repeatable; overrides config seeds)");
  app.add_option("--out", opts.out_dir, "Output directory override");
  app.add_option("--threads", opts.threads, "Worker threads (results are "
                 "independent of this)")
      ->check(CLI::Range(1, 256))
      ->capture_default_str();
  app.add_option("--format", opts.format, "Report format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();

  auto* generate = app.add_subcommand("generate", "Sample chip instances");
  auto* enroll = app.add_subcommand("enroll", "Enroll reconfigure maps");
  enroll->add_option("--method", opts.method, "evb | temp-oracle | both")
      ->capture_default_str();
  auto* evaluate =
      app.add_subcommand("evaluate", "Raw evaluation and metric report");
  auto* sweep = app.add_subcommand("sweep", "Environment sweeps");
  auto* stabilize =
      app.add_subcommand("stabilize", "Apply the stabilization pipeline");
  auto* report = app.add_subcommand("report", "Plot-ready analysis bundle");
  auto* selftest = app.add_subcommand("selftest", "Quick analytic checks");

  CLI11_PARSE(app, argc, argv);

  try {
    if (generate->parsed()) return cmd_generate(opts);
    if (enroll->parsed()) return cmd_enroll(opts);
    if (evaluate->parsed()) return cmd_evaluate(opts);
    if (sweep->parsed()) return cmd_sweep(opts);
    if (stabilize->parsed()) return cmd_stabilize(opts);
    if (report->parsed()) return cmd_report(opts);
    if (selftest->parsed()) return cmd_selftest(opts);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
