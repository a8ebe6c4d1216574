// Experiment runner: simulate the process, verify the limit-theorem
// predictions against simulation, or benchmark the kernels.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "contagion/config.hpp"
#include "contagion/process.hpp"
#include "contagion/verify.hpp"

namespace fs = std::filesystem;
using namespace contagion;

namespace {

enum class LogLevel { debug = 0, info = 1, warn = 2, error = 3 };

LogLevel log_level() {
  static const LogLevel lvl = [] {
    const char* e = std::getenv("CONTAGION_LOG");
    if (!e) return LogLevel::warn;
    const std::string s{e};
    if (s == "debug") return LogLevel::debug;
    if (s == "info") return LogLevel::info;
    if (s == "error") return LogLevel::error;
    return LogLevel::warn;
  }();
  return lvl;
}

void log_line(LogLevel lvl, const char* tag, const std::string& msg) {
  if (lvl >= log_level()) std::clog << "[" << tag << "] " << msg << "\n";
}

void log_debug(const std::string& m) { log_line(LogLevel::debug, "debug", m); }
void log_info(const std::string& m) { log_line(LogLevel::info, "info", m); }

void write_text(const fs::path& p, const std::string& body) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  os << body;
  log_info("wrote " + p.string());
}

void write_report(const fs::path& out_dir, const std::string& name, const Report& rep) {
  write_text(out_dir / (name + "_report.json"), rep.to_json().dump(2) + "\n");
}

int report_exit(const Report& rep) { return rep.pass() ? 0 : 1; }

int cmd_simulate(const ExperimentConfig& cfg, int threads, const fs::path& out_dir) {
  const auto& reg = cfg.require_regime();
  const auto& disp = cfg.require_displacement();
  const auto envs = materialize(reg, cfg.steps, cfg.seed, cfg.dimension, disp);
  const std::int64_t R = cfg.replicates;
  log_debug("materialized " + std::to_string(envs.size()) + " environment steps");

  std::vector<std::string> csvs(static_cast<std::size_t>(R));
  std::vector<nlohmann::json> rows(static_cast<std::size_t>(R));
  for_each_replicate(R, threads, [&](std::int64_t i) {
    ProcessState st =
        ProcessState::init(cfg.initial, Rng::derive(cfg.seed, replicate_stream(i)));
    st.run(envs);
    std::ostringstream os;
    write_points_csv(os, st);
    csvs[static_cast<std::size_t>(i)] = os.str();
    rows[static_cast<std::size_t>(i)] = {{"replicate", i},
                                         {"points", st.points().size()},
                                         {"total_weight", st.total_weight()},
                                         {"total_resource", st.total_resource()}};
  });

  fs::create_directories(out_dir);
  for (std::int64_t i = 0; i < R; ++i)
    write_text(out_dir / ("points_r" + std::to_string(i) + ".csv"),
               csvs[static_cast<std::size_t>(i)]);
  nlohmann::json summary{{"seed", cfg.seed},
                         {"steps", cfg.steps},
                         {"replicates", rows},
                         {"config", cfg.raw}};
  write_text(out_dir / "summary.json", summary.dump(2) + "\n");
  return 0;
}

int run_and_emit(const std::string& name, const Report& rep, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  write_report(out_dir, name, rep);
  rep.print(std::cout);
  return report_exit(rep);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dynamic contagious point process: simulator and verification suite"};
  app.require_subcommand(1);
  app.fallthrough(true);

  std::string config_path;
  std::string out_dir = ".";
  int threads = hardware_threads();
  std::uint64_t seed = 0;
  app.add_option("--config", config_path, "experiment config (JSON)");
  app.add_option("--seed", seed, "override the config's base seed");
  app.add_option("--threads", threads, "replicate parallelism degree");
  app.add_option("--out", out_dir, "output directory");

  auto* c_sim = app.add_subcommand("simulate", "run replicated simulations, dump points + summary");
  auto* c_ver = app.add_subcommand("verify", "check a limit theorem's predictions (config: theorem)");
  auto* c_ora = app.add_subcommand("oracle", "exact enumeration vs ch.f. recursion vs Monte Carlo");
  auto* c_ide = app.add_subcommand("identity", "backward vs forward mother-law comparison");
  auto* c_ben = app.add_subcommand("bench", "kernel timing table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (c_ben->parsed()) {
      fs::create_directories(out_dir);
      std::ostringstream csv;
      const Report rep = run_bench(threads, csv);
      write_text(fs::path(out_dir) / "bench.csv", csv.str());
      write_report(out_dir, "bench", rep);
      rep.print(std::cout);
      return report_exit(rep);
    }

    if (config_path.empty()) throw ConfigError("--config: required for this subcommand");
    ExperimentConfig cfg = load_config(config_path);
    if (app.count("--seed") > 0) cfg.seed = seed;
    log_info("loaded config " + config_path + " (seed " + std::to_string(cfg.seed) + ")");

    if (c_sim->parsed()) return cmd_simulate(cfg, threads, out_dir);
    if (c_ver->parsed()) {
      if (cfg.theorem == 1) {
        // theorem 1 compares transforms on a grid; dump the comparison too
        std::ostringstream csv;
        const Report rep = verify_theorem1(cfg, threads, &csv);
        fs::create_directories(out_dir);
        write_text(fs::path(out_dir) / "chf_comparison.csv", csv.str());
        return run_and_emit("verify", rep, out_dir);
      }
      return run_and_emit("verify", verify_theorem(cfg, threads), out_dir);
    }
    if (c_ora->parsed()) return run_and_emit("oracle", verify_oracle(cfg, threads), out_dir);
    if (c_ide->parsed()) return run_and_emit("identity", verify_identity(cfg, threads), out_dir);
  } catch (const ConfigError& e) {
    std::cerr << nlohmann::json{{"error", e.what()}, {"kind", "config"}}.dump() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << nlohmann::json{{"error", e.what()}, {"kind", "runtime"}}.dump() << "\n";
    return 2;
  }
  return 2;
}
