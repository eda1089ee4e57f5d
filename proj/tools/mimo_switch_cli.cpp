// mimo-switch: Monte-Carlo sweeps, single-instance solves and aggregation.
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mimo_switch/mimo_switch.hpp"

namespace ms = mimo_switch;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

// "scheme" runs in every listed mode; "scheme:mode" pins one. Baselines keep their own mode.
std::vector<ms::SchemeRun> build_runs(const std::string& schemes, const std::string& modes) {
  std::vector<ms::Mode> mode_list;
  for (const auto& m : split_list(modes)) mode_list.push_back(ms::parse_mode(m));
  if (mode_list.empty()) throw ms::ContractViolation("no mode given");
  std::vector<ms::SchemeRun> runs;
  std::set<std::pair<int, int>> seen;
  auto add = [&](ms::Scheme s, ms::Mode m) {
    if (auto fixed = ms::fixed_mode(s)) m = *fixed;
    if (seen.emplace(static_cast<int>(s), static_cast<int>(m)).second) runs.push_back({s, m});
  };
  for (const auto& item : split_list(schemes)) {
    const auto colon = item.find(':');
    if (colon != std::string::npos) {
      add(ms::parse_scheme(item.substr(0, colon)), ms::parse_mode(item.substr(colon + 1)));
      continue;
    }
    const ms::Scheme s = ms::parse_scheme(item);
    for (ms::Mode m : mode_list) add(s, m);
  }
  return runs;
}

struct SweepArgs {
  int users = 4;
  int antennas = 4;
  std::string snr = "-10:5:40";
  int trials = 1000;
  std::uint64_t seed = 42;
  std::string schemes = "it-mse-min,it-rate-max,zf-non-pnc";
  std::string mode = "pnc";
  std::string patterns = "all-derangements";
  std::string perm;
  std::string power = "full";
  std::string out = "-";
  std::string format = "csv";
  std::string summary;
  int workers = 1;
  bool timing = false;
};

int run_sweep_command(const SweepArgs& a) {
  ms::SweepConfig cfg;
  cfg.users = a.users;
  cfg.antennas = a.antennas;
  cfg.snr_db = ms::parse_snr_range(a.snr);
  cfg.trials = a.trials;
  cfg.seed = a.seed;
  cfg.runs = build_runs(a.schemes, a.mode);
  cfg.patterns = ms::parse_pattern_policy(a.patterns);
  for (const auto& p : split_list(a.perm)) cfg.fixed_permutation.push_back(std::stoi(p));
  cfg.power = ms::parse_power_policy(a.power);
  cfg.workers = a.workers;
  cfg.timing = a.timing;
  if (a.format != "csv" && a.format != "json") throw ms::ContractViolation("format must be csv or json");

  const std::vector<ms::SweepRecord> records = ms::run_sweep(cfg);
  int failures = 0;
  for (const auto& r : records)
    if (!r.error.empty()) {
      if (failures < 20)
        std::cerr << "warning: " << r.scheme << " snr=" << r.snr_db << " pattern=" << r.pattern_id
                  << " trial=" << r.trial << ": " << r.error << '\n';
      ++failures;
    }
  if (failures) std::cerr << "warning: " << failures << " record(s) failed\n";

  auto emit = [&](std::ostream& os) {
    if (a.format == "csv") ms::write_csv(os, records);
    else ms::write_json(os, records);
  };
  if (a.out == "-") {
    emit(std::cout);
  } else {
    std::ofstream os(a.out);
    if (!os) throw ms::ContractViolation("cannot write '" + a.out + "'");
    emit(os);
  }
  if (!a.summary.empty()) {
    std::ofstream os(a.summary);
    if (!os) throw ms::ContractViolation("cannot write '" + a.summary + "'");
    ms::write_summary_csv(os, ms::aggregate(records));
  }
  return 0;
}

int run_solve_command(const std::string& path, const std::string& scheme, const std::string& mode,
                      const std::string& power, bool trace) {
  const ms::ScenarioFile file = ms::load_scenario(path);
  const ms::SchemeOutcome o = ms::evaluate_scheme(ms::parse_scheme(scheme), ms::parse_mode(mode),
                                                  file.scenario, file.pattern,
                                                  ms::parse_power_policy(power));
  std::cout << "scheme " << scheme << '\n'
            << "mode " << ms::to_string(ms::fixed_mode(ms::parse_scheme(scheme)).value_or(ms::parse_mode(mode)))
            << '\n'
            << "sum_mse " << ms::format_double(o.sum_mse) << '\n'
            << "sum_rate_bits " << ms::format_double(o.sum_rate_bits) << '\n'
            << "iterations " << o.iterations << '\n'
            << "converged " << (o.converged ? "true" : "false") << '\n'
            << "relay_power " << ms::format_double(ms::relay_tx_power(o.solution, file.scenario.with_powers(o.powers)))
            << '\n'
            << "powers";
  for (Eigen::Index i = 0; i < o.powers.size(); ++i) std::cout << ' ' << ms::format_double(o.powers[i]);
  std::cout << '\n';
  if (trace) {
    std::cout << "history";
    for (double v : o.history) std::cout << ' ' << ms::format_double(v);
    std::cout << '\n';
  }
  return 0;
}

int run_aggregate_command(const std::string& in_path, const std::string& out_path) {
  std::ifstream in(in_path);
  if (!in) throw ms::ContractViolation("cannot open '" + in_path + "'");
  const auto rows = ms::aggregate(ms::read_csv(in));
  if (out_path == "-") {
    ms::write_summary_csv(std::cout, rows);
  } else {
    std::ofstream os(out_path);
    if (!os) throw ms::ContractViolation("cannot write '" + out_path + "'");
    ms::write_summary_csv(os, rows);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Relay precoder and receiver optimization for multi-user MIMO switching"};
  app.require_subcommand(1);

  SweepArgs sweep;
  auto* sw = app.add_subcommand("sweep", "Monte-Carlo sweep over SNR, trials, patterns and schemes");
  sw->add_option("--users", sweep.users, "Number of users K")->check(CLI::Range(2, 64));
  sw->add_option("--antennas", sweep.antennas, "Relay antennas N")->check(CLI::Range(1, 64));
  sw->add_option("--snr", sweep.snr, "SNR grid in dB, start:step:stop or a single value");
  sw->add_option("--trials", sweep.trials, "Channel realizations")->check(CLI::PositiveNumber);
  sw->add_option("--seed", sweep.seed, "Master seed");
  sw->add_option("--schemes", sweep.schemes, "Comma-separated schemes, optionally scheme:mode");
  sw->add_option("--mode", sweep.mode, "pnc, non-pnc or pnc,non-pnc");
  sw->add_option("--patterns", sweep.patterns, "all-derangements | fixed-permutation | symmetric-only");
  sw->add_option("--perm", sweep.perm, "1-based permutation for fixed-permutation, e.g. 2,3,4,1");
  sw->add_option("--power", sweep.power, "full | vertex-optimized");
  sw->add_option("--out", sweep.out, "Output path, - for stdout");
  sw->add_option("--format", sweep.format, "csv | json");
  sw->add_option("--summary", sweep.summary, "Also write aggregated means to this CSV");
  sw->add_option("--workers", sweep.workers, "Worker threads")->check(CLI::PositiveNumber);
  sw->add_flag("--timing", sweep.timing, "Record wall time per record");

  std::string scenario_path, scheme = "it-mse-min", mode = "pnc", power = "full";
  bool trace = false;
  auto* so = app.add_subcommand("solve", "Solve one scenario file");
  so->add_option("--scenario", scenario_path, "Scenario JSON")->required();
  so->add_option("--scheme", scheme, "Scheme name");
  so->add_option("--mode", mode, "pnc | non-pnc");
  so->add_option("--power", power, "full | vertex-optimized");
  so->add_flag("--trace", trace, "Print the objective history");

  std::string agg_in, agg_out = "-";
  auto* ag = app.add_subcommand("aggregate", "Summarize a sweep CSV by scheme, mode and SNR");
  ag->add_option("--in", agg_in, "Sweep CSV")->required();
  ag->add_option("--out", agg_out, "Output path, - for stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*sw) return run_sweep_command(sweep);
    if (*so) return run_solve_command(scenario_path, scheme, mode, power, trace);
    if (*ag) return run_aggregate_command(agg_in, agg_out);
  } catch (const ms::NumericFailure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const ms::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return 0;
}
