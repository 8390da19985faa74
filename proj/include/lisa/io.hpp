#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lisa/engine.hpp"

namespace lisa::io {

// Shortest decimal form that parses back to the same binary64.
std::string format_double(double v);
double parse_double(std::string_view s);
uint64_t parse_u64(std::string_view s);

// Step records: header n,chi,d,x1[,x2,x3],dstar,m,M. Columns follow the
// model dimension; absent values serialize as nan.
void write_steps_csv(std::ostream& os, const Trace& trace);

struct StepRow {
  uint64_t n = 0;
  uint64_t chi = 0;
  double d = 0;
  std::array<double, 3> x_new{};
  double dstar = 0;
  double m = 0;
  double M = 0;
};

struct StepTable {
  int dimension = 1;
  std::vector<StepRow> rows;
};

StepTable read_steps_csv(std::istream& is);

// Final configuration: header id,parent,x1[,x2,x3]; parent empty for the
// initial particles.
void write_config_csv(std::ostream& os, const ParticleConfig& config);

struct ConfigRow {
  uint64_t id = 0;
  std::optional<uint64_t> parent;
  std::array<double, 3> x{};
};

struct ConfigTable {
  int dimension = 1;
  std::vector<ConfigRow> rows;
};

ConfigTable read_config_csv(std::istream& is);

// One summary object per replica, one line each.
struct ReplicaSummary {
  std::string model;
  uint64_t replica = 0;
  uint64_t seed = 0;
  uint64_t steps = 0;
  uint64_t final_n = 0;
  std::vector<double> bbox_lo;
  std::vector<double> bbox_hi;
  double diameter = 0;  // max bbox side
  double dstar = 0;     // nan when spacing was not tracked
};

ReplicaSummary summarize(Trace& trace);  // non-const: spacing heap is lazy
std::string summary_json(const ReplicaSummary& s);
ReplicaSummary parse_summary_json(std::string_view line);

// Scatter plot of a 2D (or 1D, y jittered to 0) cloud; points are drawn in
// insertion order and shaded from light to dark by epoch so growth stages
// stay visible. epoch_breaks are cumulative counts, last one = total.
void write_scatter_svg(std::ostream& os,
                       std::span<const std::array<double, 2>> points,
                       std::span<const std::size_t> epoch_breaks,
                       int size_px = 720);

}  // namespace lisa::io
