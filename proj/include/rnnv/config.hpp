#pragma once
// run configuration: JSON-serializable description of one invocation (system,
// context, sequence, protocol, sweep, outputs) plus a stable content hash.

#include <cstdint>
#include <string>

#include <json.hpp>

#include "rnnv/context.hpp"
#include "rnnv/sequence.hpp"

namespace rnnv {

struct SystemConfig {
  double J_hz = 54.39;    // scalar coupling
  double delta_hz = 7.50; // difference chemical shift, omega_delta / 2 pi
  double sigma_hz = 0.0;  // sum chemical shift, omega_sigma / 2 pi

  bool operator==(const SystemConfig&) const = default;
};

struct ContextConfig {
  std::string mode = "delta";    // delta | finite
  double nutation_hz = 12500.0;  // nominal rf nutation frequency
  double amplitude_scale = 1.0;
  double offset_hz = 0.0;        // resonance offset
  double time_grid_us = 0.1;     // spectrometer timing grid
  double delay_scale = 1.0;      // multiplies every delay at execution

  bool operator==(const ContextConfig&) const = default;
};

struct SequenceConfig {
  int N = 4;
  int n = 3;
  int nu = 1;
  std::string construction = "riffled";  // standard | riffled | pulsepol
  std::string element = "plain";         // plain | bb1 | asbo11 | sp7
  std::string delay_policy = "si_table"; // si_table | preserve_taur
  double shift_deg = 0.0;                // overall phase shift of the train

  bool operator==(const SequenceConfig&) const = default;
};

struct ProtocolConfig {
  std::string kind = "filter";  // filter | excite | optimal-n
  int n_elements = 9;
  int n_exc = 0;  // 0 = use n_elements
  int n_rec = 0;  // 0 = use n_elements
  std::string objective = "singlet_order";  // optimal-n: coherence | singlet_order

  bool operator==(const ProtocolConfig&) const = default;
};

struct SweepConfig {
  std::string axis = "n_elements";  // n_elements | amplitude_scale | offset | delay_mismatch
  double from = 1.0;
  double to = 20.0;
  int points = 20;
  unsigned jobs = 0;  // 0 = hardware concurrency

  bool operator==(const SweepConfig&) const = default;
};

struct OutputConfig {
  std::string csv;   // empty = stdout
  std::string json;  // empty = no sidecar

  bool operator==(const OutputConfig&) const = default;
};

struct RunConfig {
  SystemConfig system;
  ContextConfig context;
  SequenceConfig sequence;
  ProtocolConfig protocol;
  SweepConfig sweep;
  OutputConfig output;
  std::uint64_t rng_seed = 0;  // reserved: all computations are deterministic

  // throws std::invalid_argument naming the offending field
  void validate() const;

  // boundary conversions (Hz / degrees / micro-seconds -> rad/s, ns)
  SpinSystem spin_system() const;
  ExecutionContext execution_context() const;
  SymmetryNumbers symmetry_numbers() const;
  Construction construction_kind() const;    // pulsepol maps to riffled
  CompositeKind composite_kind() const;
  CompositeDelayPolicy composite_policy() const;

  bool operator==(const RunConfig&) const = default;
};

void to_json(nlohmann::json& j, const RunConfig& config);
void from_json(const nlohmann::json& j, RunConfig& config);

// canonical serialization (sorted keys, stable number formatting)
std::string canonical_json(const RunConfig& config);

// FNV-1a 64-bit over the canonical serialization, as 16 hex digits
std::uint64_t fnv1a_64(std::string_view bytes);
std::string config_hash(const RunConfig& config);

// parse from a JSON text / load from a file (missing keys keep defaults,
// unknown keys are rejected)
RunConfig parse_config(const std::string& json_text);
RunConfig load_config_file(const std::string& path);

} // namespace rnnv
