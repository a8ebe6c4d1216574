#pragma once

#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "contagion/config.hpp"

namespace contagion {

int hardware_threads();

// Fans replicate indices 0..R-1 over an OpenMP pool (threads > 1) or the
// serial reference loop (threads <= 1). fn must confine its writes to the
// slot of its replicate index; outputs are then independent of the degree
// of parallelism. The first exception thrown by fn is rethrown after the
// loop drains.
void for_each_replicate(std::int64_t R, int threads,
                        const std::function<void(std::int64_t)>& fn);

// Seed-stream index for replicate i; keeps replicate RNGs clear of the
// streams used by environment materialization.
std::uint64_t replicate_stream(std::int64_t i);

// One statistic with its pinned threshold: pass iff value <= threshold.
struct Check {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct Report {
  std::string title;
  std::vector<Check> checks;
  double elapsed_seconds = 0.0;

  void add(std::string name, double value, double threshold);
  bool pass() const;
  nlohmann::json to_json() const;
  void print(std::ostream& os) const;
};

// Verification protocols. Each is deterministic per (config, seed) apart
// from the elapsed-time field; thresholds are pinned inside.
Report verify_oracle(const ExperimentConfig& cfg, int threads);      // enumeration vs ch.f. vs MC
Report verify_identity(const ExperimentConfig& cfg, int threads);    // backward vs forward KS
Report verify_theorem1(const ExperimentConfig& cfg, int threads);
// As above, also writing the grid comparison (t, analytic and empirical
// re/im, absolute difference, MC band) as CSV.
Report verify_theorem1(const ExperimentConfig& cfg, int threads, std::ostream* chf_csv);
Report verify_theorem2(const ExperimentConfig& cfg, int threads);
Report verify_theorem3(const ExperimentConfig& cfg, int threads);
Report verify_genealogy(const ExperimentConfig& cfg, int threads);
Report verify_scalars();                                             // deterministic diagnostics
Report verify_performance(int threads);

// Dispatch for the verify subcommand; throws ConfigError on a
// regime/theorem mismatch.
Report verify_theorem(const ExperimentConfig& cfg, int threads);

// Timing table: per-op sampler cost vs structure size, per-step simulation
// cost, and serial vs parallel replicate throughput. Writes CSV to `csv`.
Report run_bench(int threads, std::ostream& csv);

// Pinned default configurations for the acceptance protocols.
ExperimentConfig ac1_config();
ExperimentConfig ac2_config_power();
ExperimentConfig ac2_config_exponential();
ExperimentConfig ac3_config();
ExperimentConfig ac4_config(double alpha);
ExperimentConfig ac5_config(double mu);
ExperimentConfig ac6_config();

}  // namespace contagion
