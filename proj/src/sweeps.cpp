#include "fbcnoma/sweeps.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "fbcnoma/effcap.hpp"
#include "fbcnoma/energyeff.hpp"
#include "fbcnoma/errors.hpp"
#include "fbcnoma/fbc.hpp"

namespace fbcnoma {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
  return v;
}

std::vector<double> logspace(double a, double b, int n) {
  auto v = linspace(std::log(a), std::log(b), n);
  for (auto& x : v) x = std::exp(x);
  return v;
}

std::vector<double> blocklength_grid(double lo, double hi, int n) {
  std::vector<double> out;
  for (double x : linspace(lo, hi, n)) {
    const double r = std::round(x);
    if (out.empty() || r > out.back()) out.push_back(r);
  }
  return out;
}

SweepTable fig2_nrt(const Scenario& s) {
  constexpr double eps = 1e-6;
  SweepTable t;
  t.columns = {"gamma_db", "gamma", "nrt_sq", "nrt_sq_as_printed", "quadratic_residual"};
  bool decreasing = true;
  for (double db : linspace(0.0, 20.0, s.grid_points())) {
    const double g = db_to_linear(db);
    const double r = n_rt(1.0, g, eps);
    const double p = n_rt_as_printed(1.0, g, eps);
    if (!t.rows.empty() && !(r * r < t.rows.back()[2])) decreasing = false;
    t.rows.push_back({db, g, r * r, p * p, n_rt_relative_residual(r, 1.0, g, eps)});
  }
  t.notes.push_back("epsilon=1e-6 nu=1");
  t.notes.push_back("nrt_sq strictly decreasing: " + std::string(decreasing ? "yes" : "no"));
  t.notes.push_back("reference endpoints 70.64 -> 58.42; computed nrt_sq " +
                    fmt(t.rows.front()[2]) + " -> " + fmt(t.rows.back()[2]) +
                    "; as-printed closed form " + fmt(t.rows.front()[3]) + " -> " +
                    fmt(t.rows.back()[3]));
  return t;
}

SweepTable fig3_power_vs_n(const Scenario& s) {
  SweepTable t;
  t.columns = {"epsilon", "n", "lambda", "cutoff_snr", "power_at_mean_snr_w"};
  const FadingSpec f = s.fading(2);
  const double pbar = s.mean_power_watts(2);
  for (double eps : {1e-6, 1e-4, 1e-3}) {
    for (double n : blocklength_grid(100, 2000, s.grid_points())) {
      QosSpec q = s.qos(2);
      q.epsilon = eps;
      q.blocklength = n;
      const PowerPolicy p = solve_policy_user2(q, f, pbar);
      t.rows.push_back({eps, n, p.lambda, p.cutoff, p.power(f.mean_snr)});
    }
  }
  t.notes.push_back("theta=" + fmt(s.qos(2).theta) + " mean_snr=" + fmt(f.mean_snr));
  return t;
}

SweepTable fig4_ec_vs_n_theta(const Scenario& s) {
  SweepTable t;
  t.columns = {"theta", "epsilon", "n", "ec_max"};
  const FadingSpec f = s.fading(2);
  const QuadratureSpec quad = s.quadrature();
  for (double theta : {1e-6, 1e-3, 1e-2, 1e-1}) {
    for (double eps : {1e-6, 1e-3}) {
      for (double n : blocklength_grid(100, 2000, s.grid_points())) {
        QosSpec q = s.qos(2);
        q.theta = theta;
        q.epsilon = eps;
        q.blocklength = n;
        const PowerPolicy p = solve_policy_user2(q, f, s.mean_power_watts(2));
        t.rows.push_back({theta, eps, n, effective_capacity(p, f, quad).value});
      }
    }
  }
  return t;
}

SweepTable fig5_ec_exact_vs_approx(const Scenario& s) {
  SweepTable t;
  t.columns = {"theta", "n", "ec_quadrature", "ec_exact", "ec_approx", "ec_infinite_blocklength"};
  const FadingSpec f{1.0, s.fading(2).mean_snr};
  const QuadratureSpec quad = s.quadrature();
  bool bound = true;
  for (double theta : {1e-6, 1e-3}) {
    for (double n : blocklength_grid(200, 2000, s.grid_points())) {
      QosSpec q = s.qos(2);
      q.theta = theta;
      q.blocklength = n;
      const PowerPolicy p = solve_policy_user2(q, f, s.mean_power_watts(2));
      const double ec = effective_capacity(p, f, quad).value;
      const double ex = ec_max_exact(q, f, p, quad).value;
      const double ap = ec_max_approx(q, f, p, 20).value;
      const double inf =
          effective_capacity_rate(theta, 0.0, n,
                                  [&](double g) {
                                    return capacity_dispersion(p.allocation(g) * g).capacity;
                                  },
                                  f, quad, EcNormalization::PerUse, std::vector<double>{p.cutoff})
              .value;
      if (!(ap <= ex)) bound = false;
      t.rows.push_back({theta, n, ec, ex, ap, inf});
    }
  }
  t.notes.push_back("m=1 epsilon=" + fmt(s.qos(2).epsilon) + " mean_snr=" + fmt(f.mean_snr));
  t.notes.push_back("ec_approx <= ec_exact on every row: " + std::string(bound ? "yes" : "no"));
  return t;
}

SweepTable fig6_ec_vs_eps(const Scenario& s) {
  SweepTable t;
  t.columns = {"theta", "n", "epsilon", "ec"};
  const FadingSpec f = s.fading(2);
  const QuadratureSpec quad = s.quadrature();
  const double n0 = s.get("fbc.blocklength");
  for (double theta : {1e-9, 10.0}) {
    for (double n : {n0, 1e8}) {
      for (double eps : logspace(1e-6, 0.999, s.grid_points())) {
        QosSpec q = s.qos(2);
        q.theta = theta;
        q.epsilon = eps;
        q.blocklength = n;
        t.rows.push_back({theta, n, eps, effective_capacity_constant(q, f, 1.0, quad).value});
      }
    }
  }
  t.notes.push_back("constant allocation nu=1; theta=1e-9 and theta=10 stand in for the two limits");
  return t;
}

SweepTable fig7_ee_vs_power(const Scenario& s) {
  SweepTable t;
  t.columns = {"n", "mean_power_dbm", "mean_power_w", "ec", "ee"};
  const FadingSpec f = s.fading(2);
  const PowerModel pm = s.power_model();
  const QuadratureSpec quad = s.quadrature();
  const double pbar = s.mean_power_watts(2);
  for (double n : {800.0, 1000.0, 1200.0}) {
    QosSpec q = s.qos(2);
    q.blocklength = n;
    std::vector<double> ee;
    for (double nu : ee_grid(pbar, pm, s.grid_points())) {
      const EeResult r = ee_value(nu, q, f, pm, pbar, quad);
      const double w = nu * pbar;
      t.rows.push_back({n, watts_to_dbm(w), w, r.ec, r.value});
      ee.push_back(r.value);
    }
    const EeResult best = maximize_ee_golden(q, f, pm, pbar, quad);
    t.notes.push_back("n=" + fmt(n) + " optimum mean_power_w=" + fmt(best.argmax_nu * pbar) +
                      " ee=" + fmt(best.value) +
                      " sign_changes=" + std::to_string(sign_changes_of_differences(ee)));
  }
  t.notes.push_back("theta=" + fmt(s.qos(2).theta) + " epsilon=" + fmt(s.qos(2).epsilon) +
                    " eta=" + fmt(pm.eta) + " circuit_power_w=" + fmt(pm.circuit_power));
  return t;
}

SweepTable fig8_ee_vs_n(const Scenario& s) {
  SweepTable t;
  t.columns = {"theta", "epsilon", "n", "ee_max", "argmax_power_w", "ec_at_optimum"};
  const FadingSpec f = s.fading(2);
  const PowerModel pm = s.power_model();
  const QuadratureSpec quad = s.quadrature();
  const double pbar = s.mean_power_watts(2);
  for (double theta : {1e-6, 0.1}) {
    for (double eps : {1e-6, 1e-4, 1e-3}) {
      for (double n : blocklength_grid(100, 2000, s.grid_points())) {
        QosSpec q = s.qos(2);
        q.theta = theta;
        q.epsilon = eps;
        q.blocklength = n;
        const EeResult r = maximize_ee_golden(q, f, pm, pbar, quad);
        t.rows.push_back({theta, eps, n, r.value, r.argmax_nu * pbar, r.ec});
      }
    }
  }
  t.notes.push_back("mean_snr=" + fmt(f.mean_snr) + " eta=" + fmt(pm.eta) +
                    " circuit_power_w=" + fmt(pm.circuit_power));
  return t;
}

}  // namespace

const std::vector<std::string>& sweep_names() {
  static const std::vector<std::string> names{
      "fig2_nrt",       "fig3_power_vs_n",   "fig4_ec_vs_n_theta",
      "fig5_ec_exact_vs_approx", "fig6_ec_vs_eps", "fig7_ee_vs_power",
      "fig8_ee_vs_n"};
  return names;
}

SweepTable run_sweep(const std::string& name, const Scenario& scenario) {
  if (name == "fig2_nrt") return fig2_nrt(scenario);
  if (name == "fig3_power_vs_n") return fig3_power_vs_n(scenario);
  if (name == "fig4_ec_vs_n_theta") return fig4_ec_vs_n_theta(scenario);
  if (name == "fig5_ec_exact_vs_approx") return fig5_ec_exact_vs_approx(scenario);
  if (name == "fig6_ec_vs_eps") return fig6_ec_vs_eps(scenario);
  if (name == "fig7_ee_vs_power") return fig7_ee_vs_power(scenario);
  if (name == "fig8_ee_vs_n") return fig8_ee_vs_n(scenario);
  throw ValidationError("unknown sweep '" + name + "'");
}

std::string to_csv(const SweepTable& table, const std::string& name,
                   const Scenario& scenario) {
  std::ostringstream os;
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    os << (i ? "," : "") << table.columns[i];
  }
  os << "\r\n";
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size()) {
      throw std::logic_error("sweep row width differs from the header");
    }
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (!std::isfinite(row[i])) {
        throw ConvergenceError("sweep " + name + " produced a non-finite " + table.columns[i]);
      }
      os << (i ? "," : "") << fmt(row[i]);
    }
    os << "\r\n";
  }
  for (const auto& note : table.notes) os << "# " << note << "\r\n";
  os << "# sweep=" << name << "\r\n";
  os << "# scenario_hash=" << scenario.hash() << "\r\n";
  os << "# seed=" << scenario.seed() << "\r\n";
  os << "# version=" << kToolVersion << "\r\n";
  return os.str();
}

}  // namespace fbcnoma
