// chase_escape: command-line driver for simulations, sweeps, critical-rate
// bracketing, oriented-lattice probes, snapshot rendering and the self-check
// battery.
//
// Exit codes: 0 ok, 1 check failure or runtime error, 2 usage error (and a
// bracket with no crossing).

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "chase/analytic.hpp"
#include "chase/engine.hpp"
#include "chase/montecarlo.hpp"
#include "chase/percolation.hpp"
#include "chase/render.hpp"
#include "chase/verify.hpp"

namespace {

using namespace chase;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ModelFlags {
  double lambda = 1.0;
  std::string atomic;  // "p=<f>,m=<int>"
  std::uint64_t radius = 100;
  std::uint64_t max_events = 50'000'000;
  double max_time = 0.0;  // 0 = unbounded
  std::uint64_t seed = 1;

  PassageModel model(const CLI::App& app) const {
    if (!atomic.empty()) {
      if (app.count("--lambda") > 0) throw UsageError("--lambda and --atomic are exclusive");
      double p = -1.0;
      long long m = -1;
      std::stringstream ss(atomic);
      std::string part;
      while (std::getline(ss, part, ',')) {
        const auto eq = part.find('=');
        if (eq == std::string::npos) throw UsageError("--atomic expects p=<f>,m=<int>");
        const std::string key = part.substr(0, eq);
        const std::string val = part.substr(eq + 1);
        try {
          if (key == "p") {
            p = std::stod(val);
          } else if (key == "m") {
            m = std::stoll(val);
          } else {
            throw UsageError("unknown --atomic field '" + key + "'");
          }
        } catch (const std::logic_error&) {
          throw UsageError("bad --atomic value '" + part + "'");
        }
      }
      if (p < 0.0 || m < 1 || m > 4294967295LL) throw UsageError("--atomic expects p=<f>,m=<int>");
      return PassageModel::atomic(p, static_cast<std::uint32_t>(m));
    }
    return PassageModel::exponential(lambda);
  }

  StoppingRule stop() const {
    StoppingRule s;
    s.max_radius = radius;
    s.max_events = max_events;
    if (max_time > 0.0) s.max_sim_time = max_time;
    return s;
  }
};

void add_model_flags(CLI::App* cmd, ModelFlags& f, bool with_atomic = true) {
  cmd->add_option("--lambda", f.lambda, "Red passage rate (blue rate is 1)")->capture_default_str();
  if (with_atomic) {
    cmd->add_option("--atomic", f.atomic,
                    "Atomic passage times 'p=<f>,m=<int>' instead of exponential ones");
  }
  cmd->add_option("--radius", f.radius, "Survival proxy: stop once red reaches this distance")
      ->capture_default_str();
  cmd->add_option("--max-events", f.max_events, "Censor a run after this many events")
      ->capture_default_str();
  cmd->add_option("--max-time", f.max_time, "Censor a run past this simulated time (0 = none)")
      ->capture_default_str();
  cmd->add_option("--seed", f.seed, "Seed (base seed for multi-run commands)")
      ->capture_default_str();
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

std::string outcome_json(const Outcome& o, const Topology& t, const PassageModel& m,
                         const StoppingRule& s, std::uint64_t seed) {
  nlohmann::ordered_json j;
  j["graph"] = t.descriptor();
  j["model"] = m.describe();
  j["radius"] = s.max_radius;
  j["seed"] = seed;
  j["status"] = to_string(o.status);
  if (o.extinction_time) {
    j["extinction_time"] = *o.extinction_time;
  } else {
    j["extinction_time"] = nullptr;
  }
  j["ever_red_count"] = o.ever_red_count;
  j["max_red_radius"] = o.max_red_radius;
  j["events_processed"] = o.events_processed;
  j["end_time"] = o.end_time;
  j["version"] = version_string();
  return j.dump(2) + "\n";
}

std::vector<std::uint32_t> parse_m_list(const std::string& text) {
  std::vector<std::uint32_t> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      const long long v = std::stoll(part);
      if (v < 1 || v > 4294967295LL) throw std::out_of_range(part);
      out.push_back(static_cast<std::uint32_t>(v));
    } catch (const std::logic_error&) {
      throw UsageError("bad --m-grid entry '" + part + "'");
    }
  }
  if (out.empty()) throw UsageError("--m-grid is empty");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chase-escape simulator and analytic toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(version_string()));

  // simulate
  ModelFlags sim_flags;
  std::string sim_graph = "half-line";
  std::string sim_trace;
  std::string sim_out;
  auto* simulate_cmd = app.add_subcommand("simulate", "Run one seeded simulation");
  simulate_cmd->add_option("--graph", sim_graph, "Graph descriptor")->capture_default_str();
  add_model_flags(simulate_cmd, sim_flags);
  simulate_cmd->add_option("--trace", sim_trace, "Write the event log here");
  simulate_cmd->add_option("--out", sim_out, "Write the outcome JSON here (default stdout)");

  // sweep
  ModelFlags sweep_flags;
  std::string sweep_graph = "half-line";
  std::string lambda_grid;
  std::string m_grid;
  std::uint64_t sweep_runs = 1000;
  unsigned sweep_workers = 1;
  std::string sweep_out;
  std::string sweep_json;
  bool exclude_censored = false;
  auto* sweep_cmd = app.add_subcommand("sweep", "Survival estimates over a parameter grid");
  sweep_cmd->add_option("--graph", sweep_graph, "Graph descriptor")->capture_default_str();
  add_model_flags(sweep_cmd, sweep_flags);
  sweep_cmd->add_option("--lambda-grid", lambda_grid, "Lambda grid a:b:step");
  sweep_cmd->add_option("--m-grid", m_grid, "m grid a:b:step (needs --atomic for p)");
  sweep_cmd->add_option("--runs", sweep_runs, "Runs per grid point")->capture_default_str();
  sweep_cmd->add_option("--workers", sweep_workers, "Worker threads")->capture_default_str();
  sweep_cmd->add_option("--out", sweep_out, "CSV output path (default stdout)");
  sweep_cmd->add_option("--json", sweep_json, "Also write a JSON mirror here");
  sweep_cmd->add_flag("--exclude-censored", exclude_censored,
                      "Drop censored runs from the denominator instead of counting failures");

  // bracket
  ModelFlags br_flags;
  std::string br_graph = "tree:d=2";
  double br_lo = 0.05, br_hi = 0.5, br_threshold = 0.02, br_tol = 0.05;
  std::uint64_t br_runs = 2000;
  unsigned br_workers = 1;
  std::string br_out;
  auto* bracket_cmd = app.add_subcommand("bracket", "Bisect lambda for the survival crossing");
  bracket_cmd->add_option("--graph", br_graph, "Graph descriptor")->capture_default_str();
  add_model_flags(bracket_cmd, br_flags, false);
  bracket_cmd->add_option("--lo", br_lo, "Lower lambda")->capture_default_str();
  bracket_cmd->add_option("--hi", br_hi, "Upper lambda")->capture_default_str();
  bracket_cmd->add_option("--threshold", br_threshold, "Survival-proxy crossing level")
      ->capture_default_str();
  bracket_cmd->add_option("--tol", br_tol, "Final interval width")->capture_default_str();
  bracket_cmd->add_option("--runs", br_runs, "Runs per evaluation")->capture_default_str();
  bracket_cmd->add_option("--workers", br_workers, "Worker threads")->capture_default_str();
  bracket_cmd->add_option("--out", br_out, "JSON output path (default stdout)");

  // percolation
  int perc_d = 10;
  double perc_p = 0.0;
  std::string perc_m_grid = "2,4,8,16,32";
  int perc_L = 48;
  std::uint64_t perc_runs = 2000;
  std::uint64_t perc_seed = 1;
  unsigned perc_workers = 1;
  std::string perc_out;
  auto* perc_cmd =
      app.add_subcommand("percolation", "Oriented-lattice survival vs (1-p) P(cluster reaches L)");
  perc_cmd->add_option("--d", perc_d, "Dimension")->capture_default_str();
  perc_cmd->add_option("--p", perc_p, "Open probability (0 = 1/d + 1/d^2)")->capture_default_str();
  perc_cmd->add_option("--m-grid", perc_m_grid, "Comma-separated m values")->capture_default_str();
  perc_cmd->add_option("--L", perc_L, "Generation cap for survival and cluster")
      ->capture_default_str();
  perc_cmd->add_option("--runs", perc_runs, "Runs per m")->capture_default_str();
  perc_cmd->add_option("--seed", perc_seed, "Base seed")->capture_default_str();
  perc_cmd->add_option("--workers", perc_workers, "Worker threads")->capture_default_str();
  perc_cmd->add_option("--out", perc_out, "CSV output path (default stdout)");

  // render
  std::string render_graph = "z2";
  double render_lambda = 1.0;
  std::uint64_t render_seed = 1;
  std::uint64_t render_events = 1'000'000;
  std::int64_t render_half = 100;
  std::uint64_t render_radius = 0;
  std::string render_out;
  auto* render_cmd = app.add_subcommand("render", "Render a planar snapshot as binary PPM");
  render_cmd->add_option("--graph", render_graph, "Planar graph descriptor")->capture_default_str();
  render_cmd->add_option("--lambda", render_lambda, "Red passage rate")->capture_default_str();
  render_cmd->add_option("--seed", render_seed, "Seed")->capture_default_str();
  render_cmd->add_option("--events", render_events, "Stop after this many events")
      ->capture_default_str();
  render_cmd->add_option("--half-width", render_half, "Image covers [-w, w] in x and y")
      ->capture_default_str();
  render_cmd->add_option("--radius", render_radius,
                         "Stop once red reaches this distance (0 = half-width)")
      ->capture_default_str();
  render_cmd->add_option("--out", render_out, "Output .ppm path")->required();

  // verify
  bool verify_fast = false;
  auto* verify_cmd = app.add_subcommand("verify", "Run the oracle and statistical check battery");
  verify_cmd->add_flag("--fast", verify_fast, "Smaller statistical suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*simulate_cmd) {
      const Topology topology = Topology::parse(sim_graph);
      const PassageModel model = sim_flags.model(*simulate_cmd);
      const StoppingRule stop = sim_flags.stop();
      Simulation sim(topology, model, stop, sim_flags.seed);
      std::ofstream trace;
      if (!sim_trace.empty()) {
        trace.open(sim_trace, std::ios::binary | std::ios::trunc);
        if (!trace) throw std::runtime_error("cannot open '" + sim_trace + "' for writing");
        trace << "fire_time,from,to,color,applied\n";
        sim.set_trace([&](const TraceRecord& r) { trace << format_trace_line(r) << '\n'; });
      }
      const Outcome outcome = sim.run();
      if (trace.is_open()) {
        trace.flush();
        if (!trace) throw std::runtime_error("failed writing '" + sim_trace + "'");
      }
      write_text(sim_out, outcome_json(outcome, topology, model, stop, sim_flags.seed));
      return kExitOk;
    }

    if (*sweep_cmd) {
      if (lambda_grid.empty() == m_grid.empty()) {
        throw UsageError("sweep needs exactly one of --lambda-grid or --m-grid");
      }
      ExperimentConfig cfg;
      cfg.topology = Topology::parse(sweep_graph);
      cfg.stop = sweep_flags.stop();
      cfg.runs = sweep_runs;
      cfg.base_seed = sweep_flags.seed;
      cfg.workers = sweep_workers;
      cfg.censored = exclude_censored ? CensoredPolicy::Exclude : CensoredPolicy::CountAsFailure;
      SweepParam param = SweepParam::Lambda;
      std::vector<double> grid;
      if (!m_grid.empty()) {
        if (sweep_flags.atomic.empty()) throw UsageError("--m-grid needs --atomic p=<f>,m=<int>");
        cfg.model = sweep_flags.model(*sweep_cmd);
        param = SweepParam::M;
        grid = parse_grid(m_grid);
      } else {
        grid = parse_grid(lambda_grid);
      }
      cfg.validate();
      const std::vector<SweepRow> rows = sweep(cfg, param, grid);
      std::string csv = sweep_csv_header() + "\n";
      nlohmann::ordered_json mirror = nlohmann::ordered_json::array();
      bool any_error = false;
      for (const SweepRow& row : rows) {
        csv += sweep_csv_row(row) + "\n";
        if (row.error) {
          any_error = true;
          std::cerr << fmt::format("grid point {} failed: {}\n", row.param, *row.error);
          mirror.push_back({{"param", row.param}, {"error", *row.error}});
        } else {
          mirror.push_back(nlohmann::ordered_json::parse(estimate_json(row.estimate, cfg, row.param)));
        }
      }
      write_text(sweep_out, csv);
      if (!sweep_json.empty()) write_text(sweep_json, mirror.dump(2) + "\n");
      return any_error ? kExitFailure : kExitOk;
    }

    if (*bracket_cmd) {
      ExperimentConfig cfg;
      cfg.topology = Topology::parse(br_graph);
      cfg.stop = br_flags.stop();
      cfg.runs = br_runs;
      cfg.base_seed = br_flags.seed;
      cfg.workers = br_workers;
      cfg.validate();
      const BracketResult result = bracket_lambda_c(cfg, br_lo, br_hi, br_threshold, br_tol);
      nlohmann::ordered_json j;
      j["graph"] = cfg.topology.descriptor();
      j["crossed"] = result.crossed;
      j["lo"] = result.lo;
      j["hi"] = result.hi;
      j["threshold"] = br_threshold;
      j["radius"] = cfg.stop.max_radius;
      j["runs"] = cfg.runs;
      j["base_seed"] = cfg.base_seed;
      j["version"] = version_string();
      auto& evals = j["evaluations"] = nlohmann::ordered_json::array();
      for (const auto& [lam, est] : result.evaluations) {
        evals.push_back({{"lambda", lam}, {"p_hat", est.p_hat}, {"ci_low", est.ci_low},
                         {"ci_high", est.ci_high}, {"successes", est.successes},
                         {"censored", est.censored}});
      }
      write_text(br_out, j.dump(2) + "\n");
      if (!result.crossed) {
        std::cerr << "no crossing of the threshold inside [" << br_lo << ", " << br_hi << "]\n";
        return kExitUsage;
      }
      return kExitOk;
    }

    if (*perc_cmd) {
      double p = perc_p;
      if (p == 0.0) {
        const auto params = analytic::oriented_survival_params(perc_d);
        p = params.p;
        if (!params.feasible) {
          std::cerr << fmt::format("note: d={} does not satisfy the dead-end condition; "
                                   "probing anyway with p={}\n", perc_d, p);
        }
      }
      if (perc_d < 1 || perc_L < 1) throw UsageError("--d and --L must be positive");
      const auto rows = limit_probe(perc_d, p, parse_m_list(perc_m_grid), perc_L, perc_runs,
                                    perc_seed, perc_workers);
      std::string csv = limit_csv_header() + "\n";
      for (const auto& row : rows) csv += limit_csv_row(row) + "\n";
      write_text(perc_out, csv);
      return kExitOk;
    }

    if (*render_cmd) {
      const Topology topology = Topology::parse(render_graph);
      if (!topology.has_planar_layout()) throw UsageError("render needs a planar graph");
      if (render_half < 1) throw UsageError("--half-width must be >= 1");
      StoppingRule stop;
      stop.max_events = render_events;
      stop.max_radius = render_radius > 0 ? render_radius : static_cast<std::uint64_t>(render_half);
      Simulation sim(topology, PassageModel::exponential(render_lambda), stop, render_seed);
      const Outcome outcome = sim.run();
      Box box{-render_half, render_half, -render_half, render_half};
      if (topology.kind() == GraphKind::Ladder) box.y_min = 0, box.y_max = 1;
      if (topology.kind() == GraphKind::HalfLine || topology.kind() == GraphKind::Line ||
          topology.param() == 1) {
        box.y_min = 0;
        box.y_max = 0;
      }
      write_ppm(sim.snapshot(box), render_out);
      std::cerr << fmt::format("{}: status={} events={} ever_red={} time={:.4f}\n", render_out,
                               to_string(outcome.status), outcome.events_processed,
                               outcome.ever_red_count, outcome.end_time);
      return kExitOk;
    }

    if (*verify_cmd) {
      const auto results = run_verification(verify_fast);
      bool all = true;
      for (const CheckResult& r : results) {
        all = all && r.passed;
        std::cout << fmt::format("{} {:<30} {:6.2f}s  {} -- {}\n", r.passed ? "PASS" : "FAIL",
                                 r.name, r.seconds, r.reference, r.detail);
      }
      std::cout << (all ? "all checks passed\n" : "some checks FAILED\n");
      return all ? kExitOk : kExitFailure;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}
