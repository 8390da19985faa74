#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace lisa::verify {

enum class Budget { smoke, desk, full };

Budget parse_budget(std::string_view name);
const char* budget_name(Budget budget);

struct VerifyOptions {
  Budget budget = Budget::desk;
  uint64_t seed = 20240901;
  int threads = 1;
  bool tamper_lp = false;  // self-test hook: perturbs the spacing formula
};

// Everything under stats is a pure function of (claim, budget, seed);
// runtime is bookkeeping and excluded from reproducibility comparisons.
struct ClaimReport {
  std::string id;
  std::string budget;
  uint64_t seed = 0;
  bool pass = true;
  std::vector<std::pair<std::string, double>> stats;
  std::vector<std::string> notes;
  double runtime_seconds = 0.0;
};

const std::vector<std::string>& claim_ids();
ClaimReport run_claim(const std::string& id, const VerifyOptions& options);

std::string report_json(const ClaimReport& report);
// The deterministic part only; equal strings across reruns and thread counts.
std::string report_stats_json(const ClaimReport& report);

// Bounded worker pool. work(i) runs once for each i < count, on any worker;
// callers keep determinism by writing to slot i only.
void parallel_for(uint64_t count, int threads,
                  const std::function<void(uint64_t)>& work);
int default_threads();  // LISA_THREADS when set, hardware width otherwise

}  // namespace lisa::verify
