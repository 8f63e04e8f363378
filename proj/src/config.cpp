#include "rnnv/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace rnnv {

namespace {

using nlohmann::json;

// strict object reader: every key must be known, missing keys keep defaults
class ObjectReader {
public:
  ObjectReader(const json& j, const std::string& scope) : j_(j), scope_(scope) {
    if (!j.is_object())
      throw std::invalid_argument("config: " + scope + " must be a JSON object");
  }

  template <typename T>
  void read(const char* key, T& target) {
    seen_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      target = it->get<T>();
    } catch (const json::exception&) {
      throw std::invalid_argument("config: bad value type for " + scope_ + "." + key);
    }
  }

  void finish() const {
    for (const auto& [key, value] : j_.items())
      if (!seen_.count(key))
        throw std::invalid_argument("config: unknown key " + scope_ + "." + key);
  }

private:
  const json& j_;
  std::string scope_;
  std::set<std::string> seen_;
};

void require(bool condition, const std::string& message) {
  if (!condition) throw std::invalid_argument("config: " + message);
}

template <typename T>
T parse_choice(const std::string& value, const char* field,
               std::initializer_list<std::pair<const char*, T>> choices) {
  std::string allowed;
  for (const auto& [name, mapped] : choices) {
    if (value == name) return mapped;
    if (!allowed.empty()) allowed += " | ";
    allowed += name;
  }
  throw std::invalid_argument("config: " + std::string(field) + " must be one of " +
                              allowed + " (got \"" + value + "\")");
}

} // namespace

void RunConfig::validate() const {
  require(system.J_hz > 0.0, "system.J_hz must be positive");
  require(std::isfinite(system.delta_hz) && std::isfinite(system.sigma_hz),
          "system frequencies must be finite");
  require(context.nutation_hz > 0.0, "context.nutation_hz must be positive");
  require(context.amplitude_scale > 0.0, "context.amplitude_scale must be positive");
  require(context.time_grid_us > 0.0, "context.time_grid_us must be positive");
  require(context.delay_scale > 0.0, "context.delay_scale must be positive");
  require(protocol.n_elements >= 0, "protocol.n_elements must be non-negative");
  require(protocol.n_exc >= 0 && protocol.n_rec >= 0,
          "protocol.n_exc / n_rec must be non-negative");
  require(sweep.points >= 1, "sweep.points must be >= 1");

  // enum fields: parsing doubles as validation
  execution_context();
  construction_kind();
  composite_kind();
  composite_policy();
  parse_choice<int>(protocol.kind, "protocol.kind",
                    {{"filter", 0}, {"excite", 1}, {"optimal-n", 2}});
  parse_choice<int>(protocol.objective, "protocol.objective",
                    {{"coherence", 0}, {"singlet_order", 1}});
  parse_choice<int>(sweep.axis, "sweep.axis",
                    {{"n_elements", 0},
                     {"amplitude_scale", 1},
                     {"offset", 2},
                     {"delay_mismatch", 3}});
  symmetry_numbers().validate();
}

SpinSystem RunConfig::spin_system() const {
  SpinSystem s;
  s.J_hz = system.J_hz;
  s.omega_delta = 2.0 * pi * system.delta_hz;
  s.omega_sigma = 2.0 * pi * system.sigma_hz;
  return s;
}

ExecutionContext RunConfig::execution_context() const {
  ExecutionContext ctx;
  ctx.mode = parse_choice<PulseMode>(
      context.mode, "context.mode",
      {{"delta", PulseMode::delta}, {"finite", PulseMode::finite}});
  ctx.omega_nut_hz = Rational::from_decimal(context.nutation_hz);
  ctx.amplitude_scale = context.amplitude_scale;
  ctx.offset = 2.0 * pi * context.offset_hz;
  ctx.time_grid_ns = Rational::from_decimal(context.time_grid_us * 1000.0);
  ctx.delay_scale = context.delay_scale;
  return ctx;
}

SymmetryNumbers RunConfig::symmetry_numbers() const {
  if (sequence.construction == "pulsepol") return SymmetryNumbers{4, 3, 1};
  return SymmetryNumbers{sequence.N, sequence.n, sequence.nu};
}

Construction RunConfig::construction_kind() const {
  return parse_choice<Construction>(sequence.construction, "sequence.construction",
                                    {{"standard", Construction::standard},
                                     {"riffled", Construction::riffled},
                                     {"pulsepol", Construction::riffled}});
}

CompositeKind RunConfig::composite_kind() const {
  return parse_choice<CompositeKind>(sequence.element, "sequence.element",
                                     {{"plain", CompositeKind::none},
                                      {"bb1", CompositeKind::bb1},
                                      {"asbo11", CompositeKind::asbo11},
                                      {"sp7", CompositeKind::sp7}});
}

CompositeDelayPolicy RunConfig::composite_policy() const {
  return parse_choice<CompositeDelayPolicy>(
      sequence.delay_policy, "sequence.delay_policy",
      {{"si_table", CompositeDelayPolicy::si_table},
       {"preserve_taur", CompositeDelayPolicy::preserve_taur}});
}

void to_json(json& j, const RunConfig& config) {
  j = json{
      {"system",
       {{"J_hz", config.system.J_hz},
        {"delta_hz", config.system.delta_hz},
        {"sigma_hz", config.system.sigma_hz}}},
      {"context",
       {{"mode", config.context.mode},
        {"nutation_hz", config.context.nutation_hz},
        {"amplitude_scale", config.context.amplitude_scale},
        {"offset_hz", config.context.offset_hz},
        {"time_grid_us", config.context.time_grid_us},
        {"delay_scale", config.context.delay_scale}}},
      {"sequence",
       {{"N", config.sequence.N},
        {"n", config.sequence.n},
        {"nu", config.sequence.nu},
        {"construction", config.sequence.construction},
        {"element", config.sequence.element},
        {"delay_policy", config.sequence.delay_policy},
        {"shift_deg", config.sequence.shift_deg}}},
      {"protocol",
       {{"kind", config.protocol.kind},
        {"n_elements", config.protocol.n_elements},
        {"n_exc", config.protocol.n_exc},
        {"n_rec", config.protocol.n_rec},
        {"objective", config.protocol.objective}}},
      {"sweep",
       {{"axis", config.sweep.axis},
        {"from", config.sweep.from},
        {"to", config.sweep.to},
        {"points", config.sweep.points},
        {"jobs", config.sweep.jobs}}},
      {"output", {{"csv", config.output.csv}, {"json", config.output.json}}},
      {"rng_seed", config.rng_seed},
  };
}

void from_json(const json& j, RunConfig& config) {
  ObjectReader top(j, "");
  json group;

  top.read("system", group);
  if (!group.is_null()) {
    ObjectReader r(group, "system");
    r.read("J_hz", config.system.J_hz);
    r.read("delta_hz", config.system.delta_hz);
    r.read("sigma_hz", config.system.sigma_hz);
    r.finish();
  }

  group = json();
  top.read("context", group);
  if (!group.is_null()) {
    ObjectReader r(group, "context");
    r.read("mode", config.context.mode);
    r.read("nutation_hz", config.context.nutation_hz);
    r.read("amplitude_scale", config.context.amplitude_scale);
    r.read("offset_hz", config.context.offset_hz);
    r.read("time_grid_us", config.context.time_grid_us);
    r.read("delay_scale", config.context.delay_scale);
    r.finish();
  }

  group = json();
  top.read("sequence", group);
  if (!group.is_null()) {
    ObjectReader r(group, "sequence");
    r.read("N", config.sequence.N);
    r.read("n", config.sequence.n);
    r.read("nu", config.sequence.nu);
    r.read("construction", config.sequence.construction);
    r.read("element", config.sequence.element);
    r.read("delay_policy", config.sequence.delay_policy);
    r.read("shift_deg", config.sequence.shift_deg);
    r.finish();
  }

  group = json();
  top.read("protocol", group);
  if (!group.is_null()) {
    ObjectReader r(group, "protocol");
    r.read("kind", config.protocol.kind);
    r.read("n_elements", config.protocol.n_elements);
    r.read("n_exc", config.protocol.n_exc);
    r.read("n_rec", config.protocol.n_rec);
    r.read("objective", config.protocol.objective);
    r.finish();
  }

  group = json();
  top.read("sweep", group);
  if (!group.is_null()) {
    ObjectReader r(group, "sweep");
    r.read("axis", config.sweep.axis);
    r.read("from", config.sweep.from);
    r.read("to", config.sweep.to);
    r.read("points", config.sweep.points);
    r.read("jobs", config.sweep.jobs);
    r.finish();
  }

  group = json();
  top.read("output", group);
  if (!group.is_null()) {
    ObjectReader r(group, "output");
    r.read("csv", config.output.csv);
    r.read("json", config.output.json);
    r.finish();
  }

  top.read("rng_seed", config.rng_seed);
  top.finish();
}

std::string canonical_json(const RunConfig& config) {
  json j;
  to_json(j, config);
  // Output paths and the parallelism bound cannot affect computed data, so
  // they are excluded from the canonical form: rerunning a sweep with a
  // different --jobs or --out must reproduce the same config hash and bytes.
  j.erase("output");
  j["sweep"].erase("jobs");
  return j.dump();  // object keys are kept sorted by nlohmann::json
}

std::uint64_t fnv1a_64(std::string_view bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (const char c : bytes) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 0x100000001b3ull;
  }
  return hash;
}

std::string config_hash(const RunConfig& config) {
  const std::uint64_t h = fnv1a_64(canonical_json(config));
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << h;
  return out.str();
}

RunConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: JSON parse failure: ") + e.what());
  }
  RunConfig config;
  from_json(j, config);
  return config;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open file " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

} // namespace rnnv
