// geoq: build, simulate and verify geometric gate pulse schedules.
//
//   geoq schedule --gate S --scheme dyncorrected
//   geoq trajectory --gate H --scheme dyncorrected --state zero --gamma1 1e-4 --gamma2 1e-4
//   geoq sweep --gate S --scheme singleloop --grid -0.1:0.1:41
//   geoq heatmap --gate H --scheme composite --out h_comp.csv
//   geoq verify-appendix --gate S --scheme dyncorrected
//   geoq two-qubit --gamma1 1e-4 --gamma2 1e-4
//
// Exit codes: 0 success, 2 validation error, 3 verification failure.

#include "geoq/geoq.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitVerification = 3;

// Writes to --out when given, stdout for "" or "-".
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw geoq::ValidationError("cannot open output file '" + path + "'");
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

struct GateFlags {
  std::string gate;
  std::optional<double> theta, phi, gamma;
  std::string scheme = "dyncorrected";
  int loops = 2;

  void add(CLI::App& app) {
    app.add_option("--gate", gate, "Named gate: S, T, H or U2");
    app.add_option("--theta", theta, "Axis polar angle (rad)");
    app.add_option("--phi", phi, "Axis azimuth (rad)");
    app.add_option("--gamma", gamma, "Geometric phase (rad); for U2 the two-qubit phase");
    app.add_option("--scheme", scheme, "singleloop | composite | dyncorrected");
    app.add_option("--loops", loops, "Loops of the composite scheme");
  }

  bool given() const { return !gate.empty() || theta || phi || gamma; }

  geoq::GateSpec spec(const std::string& fallback = "S") const {
    if (!gate.empty()) {
      geoq::GateSpec g = geoq::GateSpec::named(gate);
      if (g.two_qubit() && gamma) g.two_qubit_phase = *gamma;
      if (!g.two_qubit() && (theta || phi || gamma)) {
        throw geoq::ValidationError("--gate cannot be combined with --theta/--phi/--gamma");
      }
      return g;
    }
    if (theta || phi || gamma) {
      return geoq::GateSpec::explicit_params(theta.value_or(0.0), phi.value_or(0.0),
                                             gamma.value_or(0.0));
    }
    return geoq::GateSpec::named(fallback);
  }

  geoq::Scheme parsed_scheme() const { return geoq::parse_scheme(scheme, loops); }
};

struct ErrorFlags {
  double epsilon = 0.0, delta = 0.0, gamma1 = 0.0, gamma2 = 0.0;
  CLI::Option *eps_opt = nullptr, *delta_opt = nullptr, *g1_opt = nullptr, *g2_opt = nullptr;

  void add(CLI::App& app) {
    eps_opt = app.add_option("--epsilon", epsilon, "Rabi amplitude error ratio");
    delta_opt = app.add_option("--delta", delta, "Dephasing shift (units of Omega_m)");
    g1_opt = app.add_option("--gamma1", gamma1, "Decay rate Gamma1");
    g2_opt = app.add_option("--gamma2", gamma2, "Dephasing rate Gamma2");
  }

  geoq::ErrorModel model() const { return {epsilon, delta, gamma1, gamma2}; }

  void override_into(geoq::ErrorModel& e) const {
    if (eps_opt->count()) e.epsilon = epsilon;
    if (delta_opt->count()) e.delta = delta;
    if (g1_opt->count()) e.gamma1 = gamma1;
    if (g2_opt->count()) e.gamma2 = gamma2;
  }
};

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw geoq::ValidationError("cannot read config file '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw geoq::ValidationError("config file '" + path + "' is not valid JSON: " + e.what());
  }
}

struct SweepFlags {
  GateFlags gate;
  ErrorFlags error;
  std::string config, out, axis = "epsilon", axis2, grid, grid2, encoding = "none";
  double step = 1e-3;
  unsigned workers = 0;
  CLI::Option *scheme_opt = nullptr, *axis_opt = nullptr, *encoding_opt = nullptr,
              *step_opt = nullptr;

  void add(CLI::App& app) {
    gate.add(app);
    error.add(app);
    scheme_opt = app.get_option("--scheme");
    app.add_option("--config", config, "JSON file with SweepSpec fields");
    app.add_option("--out", out, "Output CSV (default stdout)");
    axis_opt = app.add_option("--axis", axis, "First axis: epsilon | delta | Gamma");
    app.add_option("--grid", grid, "First axis range min:max:count");
    app.add_option("--axis2", axis2, "Second axis: epsilon | delta | Gamma");
    app.add_option("--grid2", grid2, "Second axis range min:max:count");
    encoding_opt = app.add_option("--encoding", encoding, "none | dfs");
    step_opt = app.add_option("--step", step, "Lindblad RK4 step");
    app.add_option("--workers", workers, "Worker threads (0: all cores)");
  }

  geoq::SweepSpec spec(geoq::SweepSpec base) const {
    if (!config.empty()) base = geoq::sweep_spec_from_json(read_json_file(config));
    if (scheme_opt->count() || gate.loops != 2) base.scheme = gate.parsed_scheme();
    if (gate.given()) base.gate = gate.spec();
    if (encoding_opt->count()) base.encoding = geoq::parse_encoding(encoding);
    if (axis_opt->count()) base.axis1.param = geoq::parse_sweep_param(axis);
    if (!grid.empty()) base.axis1 = geoq::parse_grid(base.axis1.param, grid);
    if (!axis2.empty()) {
      const auto p = geoq::parse_sweep_param(axis2);
      base.axis2 = base.axis2 ? geoq::SweepAxis{p, base.axis2->min, base.axis2->max,
                                                base.axis2->count}
                              : geoq::SweepAxis{p, 0.0, 5e-4, 41};
    }
    if (!grid2.empty()) {
      if (!base.axis2) throw geoq::ValidationError("--grid2 needs a second axis (--axis2)");
      base.axis2 = geoq::parse_grid(base.axis2->param, grid2);
    }
    error.override_into(base.base);
    if (step_opt->count()) base.step = step;
    if (!out.empty()) base.output = out;
    base.workers = workers;
    return base;
  }
};

int sweep_to_csv(const geoq::SweepSpec& spec) {
  const auto points = geoq::run_sweep(spec);
  Output out(spec.output);
  geoq::write_sweep_csv(out.stream(), spec, points);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonadiabatic geometric gate schedules: build, simulate, verify"};
  app.require_subcommand(1);

  // schedule
  auto* schedule_cmd = app.add_subcommand("schedule", "Emit a pulse schedule as JSON");
  GateFlags schedule_gate;
  ErrorFlags schedule_error;
  std::string schedule_out;
  schedule_gate.add(*schedule_cmd);
  schedule_error.add(*schedule_cmd);
  schedule_cmd->add_option("--out", schedule_out, "Output file (default stdout)");

  // trajectory
  auto* traj_cmd = app.add_subcommand("trajectory", "Lindblad trajectory as CSV");
  GateFlags traj_gate;
  ErrorFlags traj_error;
  std::string traj_state = "plus", traj_out, traj_encoding = "none";
  geoq::LindbladOptions traj_options;
  traj_gate.add(*traj_cmd);
  traj_error.add(*traj_cmd);
  traj_cmd->add_option("--state", traj_state,
                       "Initial state: zero | one | plus | uniform | re,im,re,im...");
  traj_cmd->add_option("--encoding", traj_encoding, "none | dfs");
  traj_cmd->add_option("--step", traj_options.step, "RK4 step (1/Omega_m)");
  traj_cmd->add_option("--samples", traj_options.samples, "Trajectory samples");
  traj_cmd->add_option("--out", traj_out, "Output CSV (default stdout)");

  // sweep / heatmap
  auto* sweep_cmd = app.add_subcommand("sweep", "Gate fidelity over one or two error axes");
  SweepFlags sweep_flags;
  sweep_flags.add(*sweep_cmd);
  auto* heatmap_cmd =
      app.add_subcommand("heatmap", "Gate fidelity over epsilon x Gamma (41 x 41 by default)");
  SweepFlags heatmap_flags;
  heatmap_flags.add(*heatmap_cmd);

  // verify-appendix
  auto* verify_cmd =
      app.add_subcommand("verify-appendix", "Fit F(epsilon) and check the series coefficients");
  GateFlags verify_gate;
  std::string verify_out;
  verify_gate.add(*verify_cmd);
  verify_cmd->add_option("--out", verify_out, "Output JSON (default stdout)");

  // two-qubit
  auto* two_cmd = app.add_subcommand("two-qubit", "DFS-encoded two-logical-qubit gate U2");
  GateFlags two_gate;
  ErrorFlags two_error;
  std::string two_state = "uniform", two_out, two_noise = "logical", two_trajectory;
  geoq::LindbladOptions two_options;
  two_gate.add(*two_cmd);
  two_error.add(*two_cmd);
  two_cmd->add_option("--state", two_state, "Logical initial state: uniform | re,im x4");
  two_cmd->add_option("--noise", two_noise, "Collapse operators: logical | block");
  two_cmd->add_option("--step", two_options.step, "RK4 step (1/Omega_m)");
  two_cmd->add_option("--samples", two_options.samples, "Trajectory samples");
  two_cmd->add_option("--trajectory", two_trajectory, "Write the trajectory CSV here");
  two_cmd->add_option("--out", two_out, "Output JSON report (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (schedule_cmd->parsed()) {
      const geoq::GateSpec gate = schedule_gate.spec();
      const geoq::Experiment exp = geoq::make_experiment(gate, schedule_gate.parsed_scheme());
      const geoq::Schedule s = geoq::apply_error(exp.schedule, schedule_error.model());
      Output out(schedule_out);
      out.stream() << geoq::to_json(s).dump(2) << "\n";
      return 0;
    }

    if (traj_cmd->parsed()) {
      geoq::TrajectorySpec spec;
      spec.gate = traj_gate.spec();
      spec.scheme = traj_gate.parsed_scheme();
      spec.encoding = geoq::parse_encoding(traj_encoding);
      spec.state = spec.gate.two_qubit() && traj_state == "plus" ? "uniform" : traj_state;
      spec.error = traj_error.model();
      spec.options = traj_options;
      const auto result = geoq::run_trajectory(spec);
      Output out(traj_out);
      geoq::write_trajectory_csv(out.stream(), result.trajectory);
      std::cerr << fmt::format("final state fidelity: {:.6f}\n",
                               result.trajectory.back().state_fidelity);
      return 0;
    }

    if (sweep_cmd->parsed()) return sweep_to_csv(sweep_flags.spec(geoq::SweepSpec{}));

    if (heatmap_cmd->parsed()) {
      geoq::SweepSpec base;
      base.axis1 = {geoq::SweepParam::Epsilon, -0.1, 0.1, 41};
      base.axis2 = geoq::SweepAxis{geoq::SweepParam::Gamma, 0.0, 5e-4, 41};
      const geoq::SweepSpec spec = heatmap_flags.spec(base);
      if (!spec.axis2) throw geoq::ValidationError("heatmap needs two axes");
      return sweep_to_csv(spec);
    }

    if (verify_cmd->parsed()) {
      const geoq::GateSpec gate = verify_gate.spec();
      const auto report = geoq::verify_appendix(gate.name, verify_gate.parsed_scheme());
      Output out(verify_out);
      out.stream() << geoq::to_json(report).dump(2) << "\n";
      for (const auto& c : report.checks) {
        std::cerr << fmt::format("{} {}: measured {:.6g}, expected {:.6g} ({} tol {:g})\n",
                                 c.pass ? "PASS" : "FAIL", c.name, c.measured, c.expected,
                                 c.relative ? "relative" : "absolute", c.tolerance);
      }
      return report.passed() ? 0 : kExitVerification;
    }

    if (two_cmd->parsed()) {
      const double gamma_t = two_gate.gamma.value_or(geoq::kPi / 2.0);
      geoq::dfs::TwoQubitNoise noise;
      if (two_noise == "logical") {
        noise = geoq::dfs::TwoQubitNoise::PerLogicalQubit;
      } else if (two_noise == "block") {
        noise = geoq::dfs::TwoQubitNoise::PerBlock;
      } else {
        throw geoq::ValidationError("unknown noise model '" + two_noise +
                                    "' (expected logical or block)");
      }
      const auto report =
          geoq::run_two_qubit(gamma_t, two_gate.parsed_scheme(), two_error.model(),
                              geoq::parse_state(two_state, 4), noise, two_options);
      if (!two_trajectory.empty()) {
        Output traj(two_trajectory);
        geoq::write_trajectory_csv(traj.stream(), report.lindblad.trajectory);
      }
      nlohmann::json diag = nlohmann::json::array();
      for (Eigen::Index i = 0; i < 4; ++i) {
        const auto z = report.gate.logical(i, i);
        diag.push_back({z.real(), z.imag()});
      }
      Output out(two_out);
      out.stream() << nlohmann::json{{"gamma_t", gamma_t},
                                     {"scheme", geoq::to_string(two_gate.parsed_scheme())},
                                     {"gate_fidelity", report.gate.fidelity},
                                     {"leakage", report.gate.leakage},
                                     {"logical_diagonal", diag},
                                     {"state_fidelity", report.state_fidelity}}
                                .dump(2)
                   << "\n";
      return 0;
    }
  } catch (const geoq::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const geoq::VerificationError& e) {
    std::cerr << "verification failed: " << e.what() << "\n";
    return kExitVerification;
  } catch (const geoq::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitVerification;
  }
  return 0;
}
