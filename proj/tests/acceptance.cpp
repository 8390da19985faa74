// Acceptance gate: every release-level behaviour claim, one line each.
// A criterion may bundle several claim checks; it passes only if all of
// them do. Exit status is nonzero when any criterion fails.

#include <cstdio>
#include <string>
#include <vector>

#include "lisa/io.hpp"
#include "lisa/verify.hpp"

namespace {

struct Criterion {
  const char* label;
  std::vector<const char*> claims;
};

const std::vector<Criterion> kCriteria = {
    {"criterion-01", {"sigma-uniform"}},
    {"criterion-02", {"thresholds"}},
    {"criterion-03", {"beta-middle-interval", "beta-boundary-interval"}},
    {"criterion-04", {"example2-bounded"}},
    {"criterion-05", {"lp-formula"}},
    {"criterion-06", {"spacing-decay"}},
    {"criterion-07", {"df-equivalence"}},
    {"criterion-08", {"dimension-rnu"}},
    {"criterion-09", {"mixture-convergence"}},
    {"criterion-10", {"conveq-laws"}},
    {"criterion-11", {"ctime-yule"}},
    {"criterion-12", {"infrastructure"}},
};

}  // namespace

int main(int argc, char** argv) {
  lisa::verify::VerifyOptions options;
  options.budget = lisa::verify::Budget::desk;
  if (argc > 1) options.budget = lisa::verify::parse_budget(argv[1]);
  options.threads = lisa::verify::default_threads();

  int failed = 0;
  for (const auto& criterion : kCriteria) {
    bool pass = true;
    double runtime = 0.0;
    std::string detail;
    std::vector<std::string> notes;
    for (const char* id : criterion.claims) {
      lisa::verify::ClaimReport report;
      try {
        report = lisa::verify::run_claim(id, options);
      } catch (const std::exception& e) {
        report.id = id;
        report.pass = false;
        report.notes.push_back(std::string("unhandled error: ") + e.what());
      }
      pass = pass && report.pass;
      runtime += report.runtime_seconds;
      detail += " [";
      detail += id;
      detail += "]";
      for (const auto& [key, value] : report.stats)
        detail += " " + key + "=" + lisa::io::format_double(value);
      for (const auto& note : report.notes)
        notes.push_back(std::string(id) + ": " + note);
    }
    std::printf("%s %s%s (%s, %.1fs)\n", pass ? "PASS" : "FAIL",
                criterion.label, detail.c_str(),
                lisa::verify::budget_name(options.budget), runtime);
    if (!pass)
      for (const auto& note : notes) std::printf("    %s\n", note.c_str());
    std::fflush(stdout);
    if (!pass) ++failed;
  }
  std::printf("criteria passed: %d/%d\n",
              static_cast<int>(kCriteria.size()) - failed,
              static_cast<int>(kCriteria.size()));
  return failed == 0 ? 0 : 1;
}
