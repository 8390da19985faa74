#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <limits>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lisa/ctime.hpp"
#include "lisa/engine.hpp"
#include "lisa/estimators.hpp"
#include "lisa/io.hpp"
#include "lisa/stats.hpp"
#include "lisa/theory.hpp"
#include "lisa/verify.hpp"

namespace {

using namespace lisa;

struct ModelFlags {
  std::string model = "close-uniform";
  std::string law = "uniform";
  double a = 0.5;
  double alpha = 2.0;
  double beta = 0.25;
  double p = 0.3;
  double q = 0.5;
  int dim = 1;
  double radius = 0.2;
  std::vector<double> weights = {1.0};
  std::vector<double> window_lo;
  std::vector<double> window_hi;
};

void add_model_flags(CLI::App* cmd, ModelFlags& mf) {
  cmd->add_option("--model", mf.model,
                  "right-uniform | close-uniform | close-normal | "
                  "displacement | urn-copy | adsorption")
      ->capture_default_str();
  cmd->add_option("--law", mf.law,
                  "displacement law: uniform | normal | power-mixture | "
                  "iso-normal | deterministic")
      ->capture_default_str();
  cmd->add_option("--a", mf.a, "scale of the normal laws")
      ->capture_default_str();
  cmd->add_option("--alpha", mf.alpha, "power-mixture tail exponent")
      ->capture_default_str();
  cmd->add_option("--beta", mf.beta, "power-mixture body exponent")
      ->capture_default_str();
  cmd->add_option("--p", mf.p, "power-mixture tail weight")
      ->capture_default_str();
  cmd->add_option("--q", mf.q, "deterministic step size")
      ->capture_default_str();
  cmd->add_option("--dim", mf.dim, "dimension for displacement/window models")
      ->capture_default_str();
  cmd->add_option("--radius", mf.radius, "adsorption interaction radius")
      ->capture_default_str();
  cmd->add_option("--weights", mf.weights,
                  "adsorption weights by neighbour count (last repeats)");
  cmd->add_option("--window-lo", mf.window_lo,
                  "window lower corner (default 0 per axis)");
  cmd->add_option("--window-hi", mf.window_hi,
                  "window upper corner (default 1 per axis)");
}

DisplacementLaw law_from_flags(const ModelFlags& mf) {
  if (mf.law == "uniform") return UniformSymmetric{};
  if (mf.law == "normal") return ScaledNormal{mf.a};
  if (mf.law == "power-mixture")
    return PowerMixture{mf.alpha, mf.beta, mf.p};
  if (mf.law == "iso-normal") return IsotropicNormal{mf.a, mf.dim};
  if (mf.law == "deterministic") return DeterministicStep{mf.q};
  throw CLI::ValidationError("--law", "unknown law '" + mf.law + "'");
}

Box window_from_flags(const ModelFlags& mf) {
  Box box;
  box.lo = mf.window_lo;
  box.hi = mf.window_hi;
  if (box.lo.empty())
    box.lo.assign(static_cast<std::size_t>(mf.dim), 0.0);
  if (box.hi.empty()) box.hi.assign(static_cast<std::size_t>(mf.dim), 1.0);
  return box;
}

ModelSpec spec_from_flags(const ModelFlags& mf) {
  ModelSpec spec;
  if (mf.model == "right-uniform")
    spec.variant = RightUniformModel{};
  else if (mf.model == "close-uniform")
    spec.variant = CloseUniformModel{};
  else if (mf.model == "close-normal")
    spec.variant = CloseNormalModel{mf.a};
  else if (mf.model == "displacement")
    spec.variant = DisplacementModel{law_from_flags(mf)};
  else if (mf.model == "urn-copy")
    spec.variant = UrnCopyModel{window_from_flags(mf)};
  else if (mf.model == "adsorption")
    spec.variant =
        AdsorptionModel{window_from_flags(mf), mf.radius, mf.weights};
  else
    throw CLI::ValidationError("--model",
                               "unknown model '" + mf.model + "'");
  validate_model(spec);
  return spec;
}

void write_file(const std::filesystem::path& path, const std::string& data) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string());
  os << data;
  if (!os) throw std::runtime_error("short write to " + path.string());
}

int cmd_simulate(const ModelFlags& mf, uint64_t steps, double horizon,
                 uint64_t replicas, uint64_t seed,
                 const std::string& out_dir) {
  const ModelSpec spec = spec_from_flags(mf);
  const bool timed_mode = horizon > 0.0;
  std::filesystem::create_directories(out_dir);
  const int threads = verify::default_threads();

  std::ofstream summary(std::filesystem::path(out_dir) / "summary.jsonl",
                        std::ios::binary);
  if (!summary) throw std::runtime_error("cannot open summary.jsonl");

  const uint64_t chunk = std::max<uint64_t>(static_cast<uint64_t>(threads), 4);
  for (uint64_t base = 0; base < replicas; base += chunk) {
    const uint64_t batch = std::min(chunk, replicas - base);
    struct Out {
      std::string steps_csv, config_csv, births_csv, summary_line;
    };
    std::vector<Out> outs(batch);
    verify::parallel_for(batch, threads, [&](uint64_t k) {
      const uint64_t rep = base + k;
      std::ostringstream steps_os, config_os, births_os;
      if (timed_mode) {
        YuleOptions opts;
        opts.horizon = horizon;
        opts.seed = seed;
        opts.replica = rep;
        opts.recorders = kRecordDstar | kKeepRecords;
        TimedTrace timed = yule_run(spec, opts);
        io::write_steps_csv(steps_os, timed.trace);
        io::write_config_csv(config_os, timed.trace.config);
        births_os << "time\n";
        for (double t : timed.birth_times)
          births_os << io::format_double(t) << '\n';
        outs[k].births_csv = births_os.str();
        outs[k].summary_line = io::summary_json(io::summarize(timed.trace));
      } else {
        RunOptions opts;
        opts.steps = steps;
        opts.seed = seed;
        opts.replica = rep;
        opts.recorders = kRecordDstar | kKeepRecords;
        Trace trace = run(spec, opts);
        io::write_steps_csv(steps_os, trace);
        io::write_config_csv(config_os, trace.config);
        outs[k].summary_line = io::summary_json(io::summarize(trace));
      }
      outs[k].steps_csv = steps_os.str();
      outs[k].config_csv = config_os.str();
    });
    for (uint64_t k = 0; k < batch; ++k) {
      const uint64_t rep = base + k;
      const auto dir = std::filesystem::path(out_dir);
      write_file(dir / ("steps-r" + std::to_string(rep) + ".csv"),
                 outs[k].steps_csv);
      write_file(dir / ("config-r" + std::to_string(rep) + ".csv"),
                 outs[k].config_csv);
      if (timed_mode)
        write_file(dir / ("births-r" + std::to_string(rep) + ".csv"),
                   outs[k].births_csv);
      summary << outs[k].summary_line << '\n';
    }
  }
  summary.flush();
  if (!summary) throw std::runtime_error("short write to summary.jsonl");
  return 0;
}

int cmd_verify(const std::string& claim, const std::string& budget,
               uint64_t seed, const std::string& out_dir, bool tamper_lp) {
  verify::VerifyOptions options;
  options.budget = verify::parse_budget(budget);
  options.seed = seed;
  options.threads = verify::default_threads();
  options.tamper_lp = tamper_lp;

  std::vector<std::string> ids;
  if (claim == "all") {
    ids = verify::claim_ids();
  } else {
    const auto& known = verify::claim_ids();
    if (std::find(known.begin(), known.end(), claim) == known.end()) {
      std::ostringstream msg;
      msg << "unknown claim id '" << claim << "'; known:";
      for (const auto& id : known) msg << ' ' << id;
      throw CLI::ValidationError("claim", msg.str());
    }
    ids.push_back(claim);
  }

  if (!out_dir.empty()) std::filesystem::create_directories(out_dir);
  bool all_pass = true;
  for (const auto& id : ids) {
    verify::ClaimReport report;
    try {
      report = verify::run_claim(id, options);
    } catch (const std::exception& e) {
      report.id = id;
      report.budget = verify::budget_name(options.budget);
      report.seed = options.seed;
      report.pass = false;
      report.notes.push_back(std::string("unhandled error: ") + e.what());
    }
    all_pass = all_pass && report.pass;
    std::cout << (report.pass ? "PASS " : "FAIL ") << id << " ("
              << report.budget << ", " << std::fixed << std::setprecision(1)
              << report.runtime_seconds << "s)\n";
    std::cout.unsetf(std::ios::fixed);
    for (const auto& note : report.notes) std::cout << "  " << note << '\n';
    if (!out_dir.empty())
      write_file(std::filesystem::path(out_dir) / (id + ".json"),
                 verify::report_json(report) + "\n");
  }
  return all_pass ? 0 : 1;
}

std::vector<double> parse_grid(const std::string& text) {
  // lo:hi:step, inclusive on both ends up to rounding
  std::vector<double> out;
  if (text.empty()) return out;
  const auto c1 = text.find(':');
  const auto c2 = text.find(':', c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos)
    throw CLI::ValidationError("--grid", "expected lo:hi:step");
  const double lo = io::parse_double(text.substr(0, c1));
  const double hi = io::parse_double(text.substr(c1 + 1, c2 - c1 - 1));
  const double step = io::parse_double(text.substr(c2 + 1));
  if (!(step > 0)) throw CLI::ValidationError("--grid", "step must be > 0");
  for (double v = lo; v <= hi + 0.5 * step; v += step) out.push_back(v);
  return out;
}

int cmd_scan(const ModelFlags& mf, const std::string& grid_text,
             uint64_t steps, uint64_t replicas, uint64_t eh_replicas,
             uint64_t seed, const std::string& out_file) {
  const std::vector<double> grid = parse_grid(grid_text);
  const bool mixture = mf.law == "power-mixture";
  if (!mixture && mf.law != "normal")
    throw CLI::ValidationError("--law",
                               "scan sweeps 'normal' (over a) or "
                               "'power-mixture' (over alpha)");
  if (grid.size() * replicas * steps > 1000000000ULL)
    std::cerr << "warning: scan grid is large for this budget; expect a "
                 "long run\n";

  std::ostringstream os;
  os << "param,median_diam_cp1,median_diam_cp2,median_diam_cp3,eh_mean,"
        "moment_sum\n";
  const std::vector<uint64_t> checkpoints = {
      std::max<uint64_t>(steps / 100, 2), std::max<uint64_t>(steps / 10, 3),
      steps};
  const int threads = verify::default_threads();
  for (double param : grid) {
    const DisplacementLaw law =
        mixture ? DisplacementLaw(PowerMixture{param, mf.beta, mf.p})
                : DisplacementLaw(ScaledNormal{param});
    const ModelSpec spec{DisplacementModel{law}, {}};

    std::vector<std::array<double, 3>> diam(replicas);
    verify::parallel_for(replicas, threads, [&](uint64_t rep) {
      ParticleConfig config(1, NeighborIndex::Backend::sorted1d, false);
      for (const auto& pt : default_initial(spec.variant))
        config.insert(pt, std::nullopt);
      RandomStream rng(seed, rep);
      std::size_t cp = 0;
      for (uint64_t s = 0; s < steps && cp < 3; ++s) {
        step(config, spec.variant, rng);
        if (config.size() >= checkpoints[cp] + 2) {
          diam[rep][cp] = config.max1d - config.min1d;
          ++cp;
        }
      }
      while (cp < 3) {
        diam[rep][cp] = config.max1d - config.min1d;
        ++cp;
      }
    });
    std::array<double, 3> med{};
    for (int c = 0; c < 3; ++c) {
      std::vector<double> v(replicas);
      for (uint64_t i = 0; i < replicas; ++i) v[i] = diam[i][c];
      std::sort(v.begin(), v.end());
      med[static_cast<std::size_t>(c)] =
          replicas % 2 ? v[replicas / 2]
                       : 0.5 * (v[replicas / 2 - 1] + v[replicas / 2]);
    }

    double eh_sum = 0.0;
    for (uint64_t rep = 0; rep < eh_replicas; ++rep) {
      RandomStream rng(seed, rep, 5);
      eh_sum += sample_H(law, rng);
    }
    double moment_sum = std::numeric_limits<double>::infinity();
    try {
      moment_sum = eta_moment(law, 1.0) + eta_hat_moment(law, 1.0);
    } catch (const std::domain_error&) {
      // heavy tail: first moment diverges, report inf
    }

    os << io::format_double(param);
    for (double m : med) os << ',' << io::format_double(m);
    os << ',' << io::format_double(eh_sum /
                                   static_cast<double>(eh_replicas));
    os << ',' << io::format_double(moment_sum) << '\n';
  }
  if (out_file.empty())
    std::cout << os.str();
  else
    write_file(out_file, os.str());
  return 0;
}

int cmd_plot(const std::string& in_file, const std::string& out_file,
             int epochs) {
  std::ifstream is(in_file, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + in_file);
  const io::ConfigTable table = io::read_config_csv(is);
  std::vector<std::array<double, 2>> pts;
  pts.reserve(table.rows.size());
  for (const auto& row : table.rows)
    pts.push_back({row.x[0], table.dimension >= 2 ? row.x[1] : 0.0});
  std::vector<std::size_t> breaks;
  const std::size_t n = pts.size();
  for (int e = 1; e <= epochs; ++e)
    breaks.push_back(n * static_cast<std::size_t>(e) /
                     static_cast<std::size_t>(epochs));
  if (breaks.empty() || breaks.back() != n) breaks.push_back(n);
  std::ostringstream os;
  io::write_scatter_svg(os, pts, breaks);
  write_file(out_file, os.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Sequential particle growth: simulation, verification and scans"};
  app.require_subcommand(1);
  app.set_config("--config", "",
                 "flat key=value configuration file; command line wins");

  ModelFlags sim_mf;
  uint64_t sim_steps = 0, sim_replicas = 1, sim_seed = 1;
  double sim_horizon = 0.0;
  std::string sim_out = "out";
  auto* sim = app.add_subcommand("simulate", "run replicas, write traces");
  add_model_flags(sim, sim_mf);
  auto* steps_opt =
      sim->add_option("--steps", sim_steps, "births per replica");
  auto* horizon_opt = sim->add_option("--horizon", sim_horizon,
                                      "continuous-time horizon (rate-n "
                                      "clock) instead of a step count");
  steps_opt->excludes(horizon_opt);
  horizon_opt->excludes(steps_opt);
  sim->add_option("--replicas", sim_replicas, "independent replicas")
      ->capture_default_str();
  sim->add_option("--seed", sim_seed, "base seed")->capture_default_str();
  sim->add_option("--out", sim_out, "output directory")
      ->capture_default_str();

  std::string ver_claim = "all", ver_budget = "desk", ver_out;
  uint64_t ver_seed = 20240901;
  bool ver_tamper = false;
  auto* ver = app.add_subcommand("verify", "run claim checks");
  ver->add_option("claim", ver_claim, "claim id or 'all'")
      ->capture_default_str();
  ver->add_option("--budget", ver_budget, "smoke | desk | full")
      ->capture_default_str();
  ver->add_option("--seed", ver_seed, "base seed")->capture_default_str();
  ver->add_option("--out", ver_out, "directory for report JSON files");
  ver->add_flag("--tamper-lp", ver_tamper,
                "self-test hook: perturb the spacing formula so the "
                "lp-formula claim must fail");

  ModelFlags scan_mf;
  scan_mf.law = "normal";
  std::string scan_grid, scan_out;
  uint64_t scan_steps = 10000, scan_replicas = 32, scan_eh = 10000,
           scan_seed = 7;
  auto* scan = app.add_subcommand(
      "scan", "sweep a law parameter, one summary row per grid point");
  add_model_flags(scan, scan_mf);
  scan->add_option("--grid", scan_grid, "lo:hi:step over a (normal) or "
                                        "alpha (power-mixture)");
  scan->add_option("--steps", scan_steps, "births per replica")
      ->capture_default_str();
  scan->add_option("--replicas", scan_replicas, "replicas per grid point")
      ->capture_default_str();
  scan->add_option("--eh-replicas", scan_eh,
                   "replicas for the maximal-functional mean")
      ->capture_default_str();
  scan->add_option("--seed", scan_seed, "base seed")->capture_default_str();
  scan->add_option("--out", scan_out, "output CSV (stdout when empty)");

  std::string plot_in, plot_out = "cloud.svg";
  int plot_epochs = 4;
  auto* plot = app.add_subcommand(
      "plot", "render a final-configuration CSV as an SVG scatter");
  plot->add_option("--in", plot_in, "config CSV from simulate")->required();
  plot->add_option("--out", plot_out, "output SVG path")
      ->capture_default_str();
  plot->add_option("--epochs", plot_epochs,
                   "number of shading stages by insertion order")
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) {
      if (sim_steps == 0 && sim_horizon <= 0.0)
        throw CLI::ValidationError("--steps",
                                   "provide --steps or --horizon");
      return cmd_simulate(sim_mf, sim_steps, sim_horizon, sim_replicas,
                          sim_seed, sim_out);
    }
    if (ver->parsed())
      return cmd_verify(ver_claim, ver_budget, ver_seed, ver_out,
                        ver_tamper);
    if (scan->parsed())
      return cmd_scan(scan_mf, scan_grid, scan_steps, scan_replicas,
                      scan_eh, scan_seed, scan_out);
    if (plot->parsed()) return cmd_plot(plot_in, plot_out, plot_epochs);
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
