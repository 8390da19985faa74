#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "lisa/distributions.hpp"
#include "lisa/nn_index.hpp"
#include "lisa/rng.hpp"

namespace lisa {

struct Box {
  std::vector<double> lo;
  std::vector<double> hi;
  int dimension() const { return static_cast<int>(lo.size()); }
};

// The six model variants. Placement rules:
//   right-uniform: uniform on the segment from the parent to its right
//     neighbour, or to 1 for the rightmost particle; state space [0,1].
//   close-uniform / close-normal / displacement: x_chi + d_n(x_chi) * psi.
//   urn-copy: copy the parent with probability 1 - 1/n, else fresh from the
//     base measure (uniform on the window).
//   adsorption: density proportional to weight[#neighbours within radius]
//     on the window.
struct RightUniformModel {};

struct CloseUniformModel {};

struct CloseNormalModel {
  double a;
};

struct DisplacementModel {
  DisplacementLaw law;
};

struct UrnCopyModel {
  Box window;
};

struct AdsorptionModel {
  Box window;
  double radius;
  std::vector<double> weights;  // indexed by neighbour count, last repeats
};

using ModelVariant = std::variant<RightUniformModel, CloseUniformModel,
                                  CloseNormalModel, DisplacementModel,
                                  UrnCopyModel, AdsorptionModel>;

struct ModelSpec {
  ModelVariant variant;
  // Initial points; empty selects default_initial.
  std::vector<std::vector<double>> initial;
};

int model_dimension(const ModelVariant& variant);
std::vector<std::vector<double>> default_initial(const ModelVariant& variant);
const char* model_name(const ModelVariant& variant);
void validate_model(const ModelSpec& spec);

enum RecorderFlags : unsigned {
  kRecordNone = 0,
  kRecordDstar = 1u << 0,  // maintain the spacing heap and record d*
  kRecordEta = 1u << 1,    // record |psi| for displacement-style models
  kKeepRecords = 1u << 2,  // materialize the record list on the trace
};

struct StepRecord {
  uint64_t n;    // configuration size before the step
  uint64_t chi;  // chosen parent, 1-based
  double d;      // d_n(x_chi); 0 where the rule does not use it
  std::array<double, 3> x_new;
  double dstar;  // d*_{n+1}, nan when not recorded
  double m;      // running min after the step, 1D only
  double M;      // running max after the step, 1D only
  double eta;    // |psi|, nan when not recorded or not applicable
};

// Growing configuration with parent links; owns the neighbour index.
struct ParticleConfig {
  ParticleConfig(int dimension, NeighborIndex::Backend backend,
                 bool track_spacing);

  uint64_t insert(std::span<const double> x, std::optional<uint64_t> parent);
  std::size_t size() const { return index.size(); }
  int dimension() const { return index.dimension(); }

  NeighborIndex index;
  std::vector<std::optional<uint64_t>> parents;
  double min1d;
  double max1d;
};

// Deterministic injection for single-step tests; absent fields fall back to
// the stream.
struct StepOverride {
  std::optional<uint64_t> chi;
  std::optional<std::vector<double>> psi;
  std::optional<double> u;
  std::optional<bool> fresh;
  std::optional<std::vector<double>> draw;
};

StepRecord step(ParticleConfig& config, const ModelVariant& model,
                RandomStream& rng, unsigned recorders = kRecordNone,
                const StepOverride* injected = nullptr);

struct RunOptions {
  uint64_t steps = 0;
  uint64_t seed = 0;
  uint64_t replica = 0;
  unsigned recorders = kRecordNone;
  std::optional<NeighborIndex::Backend> backend;
  std::function<void(const StepRecord&)> on_step;
};

struct Trace {
  ModelSpec model;
  uint64_t seed = 0;
  uint64_t replica = 0;
  uint64_t steps = 0;
  double initial_min = 0;
  double initial_max = 0;
  std::vector<StepRecord> records;
  ParticleConfig config;
};

Trace run(const ModelSpec& spec, const RunOptions& options);

// Record values of the running maximum: (1-based record position, new M).
std::vector<std::pair<uint64_t, double>> embedded_maxima(const Trace& trace);

}  // namespace lisa
