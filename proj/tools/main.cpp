// Command-line front end: every analysis as a subcommand with JSON config
// input and CSV/JSON output. Exit codes: 0 success, 1 domain error, 2 usage
// error, 3 I/O or parse error.

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <random>
#include <string>
#include <vector>

#include "reflex/collision_sim.hpp"
#include "reflex/config.hpp"
#include "reflex/motor.hpp"
#include "reflex/quadrature.hpp"
#include "reflex/reflex_core.hpp"
#include "reflex/sweep.hpp"
#include "reflex/trace_fit.hpp"
#include "reflex/two_link.hpp"

namespace {

using nlohmann::json;
using namespace reflex;

constexpr double kDegToRad = M_PI / 180.0;

struct ConfigCli {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_path;

  void attach(CLI::App* cmd, bool with_out = true) {
    cmd->add_option("--config", config_path, "JSON run configuration file");
    cmd->add_option("--set", overrides,
                    "config override, section.key=value (repeatable)");
    if (with_out) {
      cmd->add_option("--out", out_path,
                      "output file (.csv or .json); default JSON on stdout");
    }
  }

  RunConfig load() const {
    json doc;
    if (config_path.empty()) {
      doc = dump_config(default_config());
    } else {
      std::ifstream in(config_path);
      if (!in) {
        throw IoError("cannot open config file: " + config_path);
      }
      try {
        in >> doc;
      } catch (const json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
      }
    }
    for (const std::string& assignment : overrides) {
      apply_override(doc, assignment);
    }
    RunConfig config = load_config(doc);
    if (!out_path.empty()) {
      config.out_path = out_path;
    }
    return config;
  }
};

std::string format_cell(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.9g", value);
  return buffer;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot open output file: " + path);
  }
  out << text;
  if (!out) {
    throw IoError("failed writing output file: " + path);
  }
}

bool wants_csv(const std::string& path) {
  return path.size() >= 4 && path.substr(path.size() - 4) == ".csv";
}

// JSON to stdout when no path is given, else to the file.
void emit_json(const json& doc, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << doc.dump(2) << "\n";
  } else {
    write_file(out_path, doc.dump(2) + "\n");
  }
}

json breakdown_json(const PhaseBreakdown& b) {
  return {{"i_plastic", b.i_plastic}, {"i_sensing", b.i_sensing},
          {"i_reaction", b.i_reaction}, {"total", b.total},
          {"t1", b.t1},               {"t2", b.t2}};
}

json motor_json(const MotorSpec& m, double link_length) {
  return {{"name", m.name},
          {"stator_od", m.stator_od},
          {"stack_height", m.stack_height},
          {"rotor_inertia", m.rotor_inertia},
          {"tau_c", m.tau_c},
          {"tau_p", m.tau_p},
          {"gear_ratio", m.gear_ratio},
          {"reflected_inertia", m.reflected_inertia()},
          {"output_peak_torque", m.output_peak_torque()},
          {"reflected_mass_at_link", reflected_mass_at_link(m, link_length)},
          {"force_at_link", force_capability_at_link(m, link_length)},
          {"link_length", link_length}};
}

json matrix_json(const Eigen::Matrix2d& m) {
  return {{m(0, 0), m(0, 1)}, {m(1, 0), m(1, 1)}};
}

const char* flag_name(SurfacePointFlag flag) {
  switch (flag) {
    case SurfacePointFlag::kOk: return "ok";
    case SurfacePointFlag::kSingular: return "singular";
    case SurfacePointFlag::kInfinite: return "infinite";
  }
  return "?";
}

std::string sweep_csv(const SweepResult& result) {
  std::string text;
  for (const std::string& name : result.axis_names) {
    text += "axis_" + name + ",";
  }
  text += "m_f,m_r,k_m,k_s,f_s,v_0,f_a,t1,t2,i1,i2,i3,total,feasible\n";
  for (const SweepRow& row : result.rows) {
    for (double v : row.axis_values) {
      text += format_cell(v) + ",";
    }
    const CollisionParams1D& p = row.params;
    for (double v : {p.m_f, p.m_r, p.k_m, p.k_s, row.f_s, p.v_0, p.f_a,
                     row.breakdown.t1, row.breakdown.t2,
                     row.breakdown.i_plastic, row.breakdown.i_sensing,
                     row.breakdown.i_reaction, row.breakdown.total}) {
      text += format_cell(v) + ",";
    }
    text += row.feasible ? "1\n" : "0\n";
  }
  return text;
}

json sweep_row_json(const SweepResult& result, std::size_t index) {
  const SweepRow& row = result.rows[index];
  json axes = json::object();
  for (std::size_t a = 0; a < result.axis_names.size(); ++a) {
    axes[result.axis_names[a]] = row.axis_values[a];
  }
  return {{"index", index},
          {"axes", axes},
          {"feasible", row.feasible},
          {"f_s", row.f_s},
          {"breakdown", breakdown_json(row.breakdown)}};
}

std::string surface_csv(const ReflexSurface& surface) {
  std::string text =
      "theta_rad,ux,uy,m_f_kg,m_r_kg,k_npm,f_a_n,t1_s,i1_ns,i2_ns,i3_ns,"
      "total_ns,flag\n";
  const double nan = std::nan("");
  for (const SurfacePoint& point : surface.points) {
    const bool ok = point.flag == SurfacePointFlag::kOk;
    const double m_f = point.params ? point.params->m_f : nan;
    const double m_r = point.params ? point.params->m_r : nan;
    const double k = point.params ? combined_stiffness(point.params->k_m,
                                                       point.params->k_s)
                                  : nan;
    const double f_a = point.params ? point.params->f_a : nan;
    for (double v : {point.theta, point.u.x(), point.u.y(), m_f, m_r, k, f_a,
                     ok ? point.breakdown->t1 : nan,
                     ok ? point.breakdown->i_plastic : nan,
                     ok ? point.breakdown->i_sensing : nan,
                     ok ? point.breakdown->i_reaction : nan,
                     ok ? point.breakdown->total : nan}) {
      text += format_cell(v) + ",";
    }
    text += flag_name(point.flag);
    text += "\n";
  }
  return text;
}

json events_json(const SimEvents& events) {
  return {{"t_contact", events.t_contact},
          {"t_detect", events.t_detect},
          {"t_release", events.t_release}};
}

// Documented parameter ranges for the randomized closed-form-vs-oracle batch.
CollisionParams1D random_validation_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto log_uniform = [&](double lo, double hi) {
    return lo * std::pow(hi / lo, u(rng));
  };
  CollisionParams1D p;
  p.m_f = log_uniform(0.02, 0.5);
  p.m_r = log_uniform(0.2, 5.0);
  p.k_m = log_uniform(300.0, 5000.0);
  p.k_s = log_uniform(30.0, 500.0);
  p.sensing = ForceThreshold{log_uniform(1.0, 8.0)};
  p.v_0 = log_uniform(0.1, 3.0);
  p.f_a = log_uniform(2.0, 50.0);
  return p;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"collision reflex metric: closed forms, sweeps, two-link "
               "surfaces, oracle simulation, and trace analysis"};
  app.require_subcommand(1);
  std::function<void()> action;

  // impulse: phase breakdown of the configured 1D collision.
  {
    auto* cmd = app.add_subcommand("impulse",
                                   "total impulse breakdown per phase");
    auto cli = std::make_shared<ConfigCli>();
    cli->attach(cmd);
    auto v0 = std::make_shared<double>(0.0);
    auto* v0_opt = cmd->add_option("--v0", *v0, "pre-impact velocity [m/s]");
    cmd->callback([cli, v0, v0_opt, &action]() {
      action = [cli, v0, v0_opt]() {
        RunConfig config = cli->load();
        if (v0_opt->count() > 0) {
          config.params.v_0 = *v0;
        }
        emit_json(breakdown_json(total_impulse(config.params)),
                  config.out_path);
      };
    });
  }

  // vstar: optimal velocity and minimum impulse.
  {
    auto* cmd = app.add_subcommand(
        "vstar", "optimal pre-impact velocity and minimum impulse");
    auto cli = std::make_shared<ConfigCli>();
    cli->attach(cmd);
    cmd->callback([cli, &action]() {
      action = [cli]() {
        const RunConfig config = cli->load();
        const CollisionParams1D& p = config.params;
        const double f_s = effective_threshold(p.sensing, p.k_s);
        const double k = combined_stiffness(p.k_m, p.k_s);
        emit_json({{"v_star", optimal_velocity(f_s, k, p.m_f)},
                   {"i_star", minimum_impulse(p)}},
                  config.out_path);
      };
    });
  }

  // sweep: parameter grid evaluation.
  {
    auto* cmd = app.add_subcommand("sweep",
                                   "closed-form impulse over a parameter grid");
    auto cli = std::make_shared<ConfigCli>();
    cli->attach(cmd);
    cmd->callback([cli, &action]() {
      action = [cli]() {
        const RunConfig config = cli->load();
        SweepGrid grid{config.sweep_axes, config.params, config.motor};
        const SweepResult result = run_sweep(grid);

        json summary = {{"rows", result.rows.size()},
                        {"feasible", 0},
                        {"argmin", nullptr}};
        std::size_t feasible = 0;
        for (const auto& row : result.rows) {
          feasible += row.feasible ? 1 : 0;
        }
        summary["feasible"] = feasible;
        if (result.argmin >= 0) {
          summary["argmin"] = sweep_row_json(result, result.argmin);
        }

        if (wants_csv(config.out_path)) {
          write_file(config.out_path, sweep_csv(result));
          summary["out"] = config.out_path;
          std::cout << summary.dump(2) << "\n";
        } else {
          json rows = json::array();
          for (std::size_t i = 0; i < result.rows.size(); ++i) {
            rows.push_back(sweep_row_json(result, i));
          }
          summary["table"] = rows;
          emit_json(summary, config.out_path);
        }
      };
    });
  }

  // scale-motor: synthesize a motor at a new stator OD.
  {
    auto* cmd = app.add_subcommand(
        "scale-motor", "scale the reference motor to a new stator OD");
    auto cli = std::make_shared<ConfigCli>();
    cli->attach(cmd);
    auto r_mm = std::make_shared<double>(0.0);
    cmd->add_option("--r-mm", *r_mm, "target stator OD [mm]")->required();
    auto floor = std::make_shared<double>(0.0);
    auto* floor_opt =
        cmd->add_option("--floor", *floor, "output torque floor [N m]");
    auto link_mm = std::make_shared<double>(0.0);
    auto* link_opt =
        cmd->add_option("--link-mm", *link_mm, "contact lever [mm]");
    cmd->callback([cli, r_mm, floor, floor_opt, link_mm, link_opt,
                   &action]() {
      action = [cli, r_mm, floor, floor_opt, link_mm, link_opt]() {
        const RunConfig config = cli->load();
        const MotorScalingContext& ctx = config.motor;
        const double torque_floor =
            floor_opt->count() > 0 ? *floor : ctx.torque_floor;
        const double link = link_opt->count() > 0 ? *link_mm * 1e-3
                                                  : ctx.link_length;
        const MotorSpec scaled =
            scale_motor(ctx.reference, *r_mm * 1e-3, ctx.law, torque_floor);
        emit_json(motor_json(scaled, link), config.out_path);
      };
    });
  }

  // surface: collision reflex surface of the two-link model.
  {
    auto* cmd = app.add_subcommand(
        "surface", "collision reflex surface around the end-effector");
    auto cli = std::make_shared<ConfigCli>();
    cli->attach(cmd);
    struct SurfaceArgs {
      double q1_deg = 0.0;
      double q2_deg = 45.0;
      double v0 = 0.5;
      double f_s = 3.0;
      int n = 360;
      double r_mm = 0.0;
      double r2_mm = 0.0;
    };
    auto args = std::make_shared<SurfaceArgs>();
    cmd->add_option("--q1-deg", args->q1_deg, "first joint angle [deg]");
    cmd->add_option("--q2-deg", args->q2_deg, "second joint angle [deg]");
    cmd->add_option("--v0", args->v0, "pre-impact speed [m/s]");
    cmd->add_option("--fs", args->f_s, "sensing threshold [N]");
    cmd->add_option("--n", args->n, "number of directions");
    auto* r_opt = cmd->add_option(
        "--r-mm", args->r_mm, "scale both joint motors to this stator OD");
    auto* r2_opt = cmd->add_option(
        "--r2-mm", args->r2_mm, "scale only the distal joint motor");
    cmd->callback([cli, args, r_opt, r2_opt, &action]() {
      action = [cli, args, r_opt, r2_opt]() {
        const RunConfig config = cli->load();
        TwoLinkModel model = config.model;
        const MotorScalingContext& ctx = config.motor;
        if (r_opt->count() > 0) {
          const MotorSpec motor = scale_motor(ctx.reference, args->r_mm * 1e-3,
                                              ctx.law, ctx.torque_floor);
          set_joint_motor(model, 0, motor);
          set_joint_motor(model, 1, motor);
        }
        if (r2_opt->count() > 0) {
          set_joint_motor(model, 1,
                          scale_motor(ctx.reference, args->r2_mm * 1e-3,
                                      ctx.law, ctx.torque_floor));
        }
        const Configuration q{args->q1_deg * kDegToRad,
                              args->q2_deg * kDegToRad};
        const ReflexSurface surface =
            reflex_surface(model, q, args->v0, args->f_s, args->n);

        std::size_t finite = 0;
        double min_total = std::numeric_limits<double>::infinity();
        double max_total = 0.0;
        for (const auto& point : surface.points) {
          if (point.flag == SurfacePointFlag::kOk) {
            ++finite;
            min_total = std::min(min_total, point.breakdown->total);
            max_total = std::max(max_total, point.breakdown->total);
          }
        }
        json summary = {{"points", surface.points.size()},
                        {"finite", finite},
                        {"min_total", finite > 0 ? json(min_total) : json()},
                        {"max_total", finite > 0 ? json(max_total) : json()}};

        if (wants_csv(config.out_path)) {
          write_file(config.out_path, surface_csv(surface));
          summary["out"] = config.out_path;
          std::cout << summary.dump(2) << "\n";
        } else {
          json rows = json::array();
          for (const auto& point : surface.points) {
            json row = {{"theta", point.theta},
                        {"u", {point.u.x(), point.u.y()}},
                        {"flag", flag_name(point.flag)}};
            if (point.flag == SurfacePointFlag::kOk) {
              row["breakdown"] = breakdown_json(*point.breakdown);
              row["m_f"] = point.params->m_f;
              row["m_r"] = point.params->m_r;
              row["f_a"] = point.params->f_a;
            }
            rows.push_back(row);
          }
          summary["table"] = rows;
          emit_json(summary, config.out_path);
        }
      };
    });
  }

  // metrics: transparency metrics at a configuration.
  {
    auto* cmd = app.add_subcommand(
        "metrics", "GIE/DME/IMF/effective-mass at a configuration");
    auto cli = std::make_shared<ConfigCli>();
    cli->attach(cmd);
    struct MetricArgs {
      double q1_deg = 0.0;
      double q2_deg = 45.0;
      double theta_deg = 0.0;
    };
    auto args = std::make_shared<MetricArgs>();
    cmd->add_option("--q1-deg", args->q1_deg, "first joint angle [deg]");
    cmd->add_option("--q2-deg", args->q2_deg, "second joint angle [deg]");
    cmd->add_option("--theta-deg", args->theta_deg,
                    "collision direction [deg]");
    cmd->callback([cli, args, &action]() {
      action = [cli, args]() {
        const RunConfig config = cli->load();
        const TwoLinkModel& model = config.model;
        const Configuration q{args->q1_deg * kDegToRad,
                              args->q2_deg * kDegToRad};
        const Eigen::Vector2d u(std::cos(args->theta_deg * kDegToRad),
                                std::sin(args->theta_deg * kDegToRad));
        const double m_r =
            effective_mass(model, q, u, InertiaSelector::kActuators);
        emit_json(
            {{"q", {q.q1, q.q2}},
             {"u", {u.x(), u.y()}},
             {"mass_matrix", matrix_json(mass_matrix(model, q))},
             {"full_mass_matrix", matrix_json(full_mass_matrix(model, q))},
             {"jacobian", matrix_json(jacobian(model, q))},
             {"det_jacobian", jacobian(model, q).determinant()},
             {"gie", matrix_json(gie(model, q))},
             {"dme", matrix_json(dme(model, q))},
             {"imf", imf(model, q)},
             {"effective_mass",
              {{"structure",
                effective_mass(model, q, u, InertiaSelector::kStructure)},
               {"actuators", m_r},
               {"full", effective_mass(model, q, u, InertiaSelector::kFull)}}},
             {"task_stiffness", task_stiffness(model, q, u)},
             {"task_acceleration", task_acceleration(model, q, u, m_r)}},
            config.out_path);
      };
    });
  }

  // simulate: time-stepping oracle run.
  {
    auto* cmd = app.add_subcommand(
        "simulate", "time-stepping oracle run of the configured collision");
    auto cli = std::make_shared<ConfigCli>();
    cli->attach(cmd);
    cmd->callback([cli, &action]() {
      action = [cli]() {
        const RunConfig config = cli->load();
        const SimResult result = simulate(config.params, config.sim);
        json summary = {{"events", events_json(result.events)},
                        {"impulses", breakdown_json(result.impulses)},
                        {"samples", result.trace.size()}};
        if (wants_csv(config.out_path)) {
          ForceTrace trace = result.trace;
          if (config.sim.noise_sigma > 0.0) {
            trace = synthesize_trace(config.params, config.sim);
          }
          write_trace(trace, config.out_path);
          summary["out"] = config.out_path;
          std::cout << summary.dump(2) << "\n";
        } else {
          emit_json(summary, config.out_path);
        }
      };
    });
  }

  // integrate: trace file -> impulse.
  {
    auto* cmd = app.add_subcommand("integrate", "integrate a force trace");
    auto cli = std::make_shared<ConfigCli>();
    cli->attach(cmd);
    auto in_path = std::make_shared<std::string>();
    cmd->add_option("--in", *in_path, "trace CSV file")->required();
    auto method = std::make_shared<std::string>("gauss-kronrod");
    cmd->add_option("--method", *method, "trapezoid | gauss-kronrod");
    cmd->callback([cli, in_path, method, &action]() {
      action = [cli, in_path, method]() {
        const RunConfig config = cli->load();
        IntegrationMethod m;
        if (*method == "trapezoid") {
          m = IntegrationMethod::kTrapezoid;
        } else if (*method == "gauss-kronrod") {
          m = IntegrationMethod::kGaussKronrod;
        } else {
          throw DomainError("unknown integration method: " + *method);
        }
        const ForceTrace trace = read_trace(*in_path);
        emit_json({{"impulse", integrate_trace(trace, m)},
                   {"method", *method},
                   {"samples", trace.size()}},
                  config.out_path);
      };
    });
  }

  // fit: trace file -> model parameters.
  {
    auto* cmd = app.add_subcommand(
        "fit", "one-shot model fit of a collision trace");
    auto cli = std::make_shared<ConfigCli>();
    cli->attach(cmd);
    auto in_path = std::make_shared<std::string>();
    cmd->add_option("--in", *in_path, "trace CSV file")->required();
    auto k_m = std::make_shared<double>(0.0);
    auto* km_opt =
        cmd->add_option("--km", *k_m, "fixed mechanical stiffness [N/m]");
    auto v0 = std::make_shared<double>(0.0);
    auto* v0_opt =
        cmd->add_option("--v0", *v0, "known pre-impact velocity [m/s]");
    cmd->callback([cli, in_path, k_m, km_opt, v0, v0_opt, &action]() {
      action = [cli, in_path, k_m, km_opt, v0, v0_opt]() {
        const RunConfig config = cli->load();
        const double stiffness =
            km_opt->count() > 0 ? *k_m : config.model.contact_stiffness;
        const double velocity =
            v0_opt->count() > 0 ? *v0 : config.params.v_0;
        const FitResult fit =
            fit_trace(read_trace(*in_path), stiffness, velocity);
        emit_json({{"m_f", fit.m_f},
                   {"k_s", fit.k_s},
                   {"f_s", fit.f_s},
                   {"a", fit.a},
                   {"k_m", fit.k_m},
                   {"sigma",
                    {{"m_f", fit.sigma_m_f},
                     {"k_s", fit.sigma_k_s},
                     {"f_s", fit.sigma_f_s},
                     {"a", fit.sigma_a}}},
                   {"residual_rms", fit.residual_rms},
                   {"converged", fit.converged}},
                  config.out_path);
      };
    });
  }

  // validate: randomized closed-form vs oracle batch.
  {
    auto* cmd = app.add_subcommand(
        "validate", "closed form vs time-stepping oracle over random sets");
    auto cli = std::make_shared<ConfigCli>();
    cli->attach(cmd);
    struct ValidateArgs {
      int n = 100;
      std::uint64_t seed = 1;
      double dt = 1e-5;
    };
    auto args = std::make_shared<ValidateArgs>();
    cmd->add_option("--n", args->n, "number of random parameter sets");
    cmd->add_option("--seed", args->seed, "random seed");
    cmd->add_option("--dt", args->dt, "oracle step size [s]");
    cmd->callback([cli, args, &action]() {
      action = [cli, args]() {
        const RunConfig config = cli->load();
        std::mt19937_64 rng(args->seed);
        SimOptions opt = config.sim;
        opt.dt = args->dt;
        opt.lead_in = 0.0;
        opt.tail = 0.0;

        std::string csv =
            "index,m_f,m_r,k_m,k_s,f_s,v_0,f_a,closed_total,sim_total,"
            "rel_err\n";
        double max_err = 0.0;
        double sum_err = 0.0;
        int worst = -1;
        for (int i = 0; i < args->n; ++i) {
          const CollisionParams1D p = random_validation_params(rng);
          const double closed = total_impulse(p).total;
          const double sim = simulated_impulse(p, opt).total;
          const double err = std::abs(sim - closed) / closed;
          sum_err += err;
          if (err > max_err) {
            max_err = err;
            worst = i;
          }
          const double f_s = effective_threshold(p.sensing, p.k_s);
          const double cells[] = {static_cast<double>(i), p.m_f, p.m_r,
                                  p.k_m, p.k_s, f_s, p.v_0, p.f_a,
                                  closed, sim, err};
          for (std::size_t c = 0; c < std::size(cells); ++c) {
            csv += format_cell(cells[c]);
            csv += (c + 1 == std::size(cells)) ? '\n' : ',';
          }
        }
        json summary = {{"n", args->n},
                        {"seed", args->seed},
                        {"dt", args->dt},
                        {"max_rel_err", max_err},
                        {"mean_rel_err", sum_err / args->n},
                        {"worst_index", worst},
                        {"within_2pct", max_err < 0.02}};
        if (wants_csv(config.out_path)) {
          write_file(config.out_path, csv);
          summary["out"] = config.out_path;
          std::cout << summary.dump(2) << "\n";
        } else {
          emit_json(summary, config.out_path);
        }
      };
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: usage: " << e.what() << "\n";
    return 2;
  }

  try {
    action();
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.code() << ": " << e.what() << "\n";
    return 3;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.code() << ": " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.code() << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) { return run_cli(argc, argv); }
