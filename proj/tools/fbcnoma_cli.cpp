#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fbcnoma/errors.hpp"
#include "fbcnoma/fbc.hpp"
#include "fbcnoma/queuesim.hpp"
#include "fbcnoma/scenario.hpp"
#include "fbcnoma/selftest.hpp"
#include "fbcnoma/sweeps.hpp"

using namespace fbcnoma;

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;

std::string g12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

Scenario resolve_scenario(const std::string& path, const std::vector<std::string>& sets) {
  Scenario s = path.empty() ? parse_scenario(default_scenario_text()) : load_scenario(path);
  for (const auto& a : sets) apply_override(s, a);
  return s;
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

int cmd_rate(double gamma_db, double n, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) {
    std::cerr << "error: --epsilon must lie in (0, 1)\n";
    return kUsage;
  }
  if (!(n >= 1.0) || n != std::floor(n) || !std::isfinite(n)) {
    std::cerr << "error: --n must be a positive integer\n";
    return kUsage;
  }
  const double g = db_to_linear(gamma_db);
  QosSpec q;
  q.epsilon = eps;
  q.blocklength = n;
  const RatePoint r = rate_point(g, q);
  std::cout << "gamma_db " << g12(gamma_db) << "\n"
            << "gamma " << g12(g) << "\n"
            << "n " << g12(n) << "\n"
            << "epsilon " << g12(eps) << "\n"
            << "capacity " << g12(r.capacity) << "\n"
            << "dispersion " << g12(r.dispersion) << "\n"
            << "rate " << g12(r.rate) << "\n";
  return kOk;
}

int cmd_sweep(const std::string& name, const std::string& scenario_path,
              const std::vector<std::string>& sets, const std::string& out) {
  const Scenario s = resolve_scenario(scenario_path, sets);
  const SweepTable t = run_sweep(name, s);
  write_output(out, to_csv(t, name, s));
  return kOk;
}

int cmd_queue_validate(const std::string& scenario_path, const std::vector<std::string>& sets,
                       std::optional<double> theta, double blocks, std::uint64_t seed,
                       double arrival_scale, double nu, const std::string& out) {
  const Scenario s = resolve_scenario(scenario_path, sets);
  QosSpec q = s.qos(2);
  if (theta) {
    if (!(*theta > 0.0)) throw ValidationError("--theta must be positive");
    q.theta = *theta;
  }
  if (!(blocks >= 1e5) || blocks != std::floor(blocks)) {
    throw ValidationError("--blocks must be an integer of at least 1e5");
  }
  if (!(arrival_scale >= 0.0)) throw ValidationError("--arrival-scale must be >= 0");
  if (!(nu > 0.0)) throw ValidationError("--nu must be positive");
  const FadingSpec f = s.fading(2);

  QueueSimConfig cfg;
  cfg.blocks = static_cast<std::int64_t>(blocks);
  cfg.seed = seed;
  cfg.thresholds = default_thresholds(q.theta);
  const double target_arrival = queue_arrival_for_theta(q, f, nu, s.quadrature());
  cfg.arrival_rate = arrival_scale * target_arrival;
  const TailEstimate est = simulate_queue(q, f, [nu](double) { return nu; }, cfg);

  std::cout << "theta " << g12(q.theta) << "\n"
            << "arrival_bits_per_block " << g12(cfg.arrival_rate) << "\n"
            << "mean_service_bits_per_block " << g12(est.mean_service) << "\n";
  if (!est.slope_defined) {
    std::cout << "no exceedances: the queue never passed the first threshold\n";
  } else {
    std::cout << "fitted_slope " << g12(est.slope) << "\n"
              << "slope_stderr " << g12(est.slope_stderr) << "\n"
              << "relative_error " << g12((est.slope - q.theta) / q.theta) << "\n"
              << "thresholds_used " << est.thresholds_used << "\n"
              << "fit_r2 " << g12(est.fit_r2) << "\n";
  }
  if (!out.empty()) {
    std::string csv = "threshold_bits,probability,exceedances\r\n";
    for (const auto& p : est.per_threshold_probs) {
      csv += g12(p.threshold) + "," + g12(p.probability) + "," + std::to_string(p.exceedances) + "\r\n";
    }
    csv += "# theta=" + g12(q.theta) + " arrival=" + g12(cfg.arrival_rate) +
           " slope=" + (est.slope_defined ? g12(est.slope) : std::string("undefined")) + "\r\n";
    csv += "# scenario_hash=" + s.hash() + "\r\n# seed=" + std::to_string(seed) +
           "\r\n# version=" + std::string(kToolVersion) + "\r\n";
    write_output(out, csv);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-blocklength NOMA effective capacity and energy efficiency toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  double gamma_db = 0.0, n = 0.0, eps = 0.0;
  auto* rate = app.add_subcommand("rate", "Capacity, dispersion and achievable rate at one SNR");
  rate->add_option("--gamma-db", gamma_db, "SNR in dB")->required();
  rate->add_option("--n", n, "Blocklength")->required();
  rate->add_option("--epsilon", eps, "Decoding error probability")->required();

  std::string sweep_name, scenario_path, out;
  std::vector<std::string> sets;
  auto* sweep = app.add_subcommand("sweep", "Write one figure-reproduction sweep as CSV");
  sweep->add_option("--name", sweep_name, "Sweep name")
      ->required()
      ->check(CLI::IsMember(sweep_names()));
  sweep->add_option("--scenario", scenario_path, "Scenario file (defaults built in)");
  sweep->add_option("--set", sets, "Override, section.key=value");
  sweep->add_option("--out", out, "Output CSV path ('-' or omitted: stdout)");

  std::optional<double> theta;
  double blocks = 1e7, arrival_scale = 1.0, nu = 1.0;
  std::uint64_t seed = 0;
  std::string q_out;
  auto* queue = app.add_subcommand("queue-validate", "Simulate the queue and fit its tail decay");
  queue->add_option("--scenario", scenario_path, "Scenario file (defaults built in)");
  queue->add_option("--set", sets, "Override, section.key=value");
  queue->add_option("--theta", theta, "QoS exponent (default: user 2 of the scenario)");
  queue->add_option("--blocks", blocks, "Number of simulated blocks");
  queue->add_option("--seed", seed, "Random seed")->required();
  queue->add_option("--arrival-scale", arrival_scale, "Multiplier on the EC-matched arrival rate");
  queue->add_option("--nu", nu, "Constant power allocation");
  queue->add_option("--out", q_out, "Per-threshold CSV path");

  auto* self = app.add_subcommand("selftest", "Run the property suites");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*rate) return cmd_rate(gamma_db, n, eps);
    if (*sweep) return cmd_sweep(sweep_name, scenario_path, sets, out);
    if (*queue) {
      return cmd_queue_validate(scenario_path, sets, theta, blocks, seed, arrival_scale, nu, q_out);
    }
    if (*self) {
      bool ok = true;
      for (const auto& s : run_selftest(std::cout)) ok = ok && s.passed;
      if (!ok) std::cerr << "selftest failed\n";
      return ok ? kOk : kFailure;
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kUsage;
}
