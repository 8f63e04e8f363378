#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rnnv/cli.hpp"
#include "rnnv/config.hpp"
#include "rnnv/context.hpp"

#include "test_helpers.hpp"

namespace {

using nlohmann::json;
using namespace rnnv;

bool is_hex16(const std::string& s) {
  if (s.size() != 16) return false;
  for (char c : s)
    if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
  return true;
}

} // namespace

TEST_SUITE("config") {

TEST_CASE("defaults map to the reference system and context") {
  RunConfig cfg;
  cfg.validate();

  const SpinSystem sys = cfg.spin_system();
  CHECK(sys.J_hz == doctest::Approx(54.39));
  CHECK(sys.omega_delta == doctest::Approx(2.0 * pi * 7.50));
  CHECK(sys.omega_sigma == 0.0);

  const ExecutionContext ctx = cfg.execution_context();
  CHECK(ctx.mode == PulseMode::delta);
  CHECK(ctx.amplitude_scale == 1.0);
  CHECK(ctx.offset == 0.0);
  CHECK(ctx.delay_scale == 1.0);

  const SymmetryNumbers sym = cfg.symmetry_numbers();
  CHECK(sym.N == 4);
  CHECK(sym.n == 3);
  CHECK(sym.nu == 1);
  CHECK(cfg.construction_kind() == Construction::riffled);
}

TEST_CASE("hz and degree fields convert at the boundary") {
  RunConfig cfg;
  cfg.context.offset_hz = 100.0;
  cfg.context.mode = "finite";
  cfg.context.nutation_hz = 10000.0;
  const ExecutionContext ctx = cfg.execution_context();
  CHECK(ctx.offset == doctest::Approx(2.0 * pi * 100.0));
  CHECK(ctx.mode == PulseMode::finite);
  CHECK(ctx.omega_nut_nominal() == doctest::Approx(2.0 * pi * 10000.0));
}

TEST_CASE("serialization round-trips losslessly") {
  RunConfig cfg;
  cfg.system.J_hz = 21.0;
  cfg.system.delta_hz = 0.4;
  cfg.system.sigma_hz = 3.25;
  cfg.context.mode = "finite";
  cfg.context.nutation_hz = 9800.0;
  cfg.context.amplitude_scale = 1.07;
  cfg.context.offset_hz = -42.5;
  cfg.context.delay_scale = 0.995;
  cfg.sequence = SequenceConfig{8, 7, 3, "standard", "sp7", "preserve_taur", -45.0};
  cfg.protocol = ProtocolConfig{"excite", 4, 2, 6, "coherence"};
  cfg.sweep = SweepConfig{"offset", -200.0, 200.0, 41, 3};
  cfg.output = OutputConfig{"a.csv", "b.json"};
  cfg.rng_seed = 7;

  json j;
  to_json(j, cfg);
  RunConfig back = j.get<RunConfig>();
  CHECK(back == cfg);
}

TEST_CASE("config hash is stable, hex, and tracks content") {
  RunConfig cfg;
  const std::string h1 = config_hash(cfg);
  const std::string h2 = config_hash(cfg);
  CHECK(h1 == h2);
  CHECK(is_hex16(h1));

  RunConfig other = cfg;
  other.system.J_hz = 54.40;
  CHECK(config_hash(other) != h1);
}

TEST_CASE("output paths and the jobs bound do not enter the hash") {
  RunConfig cfg;
  RunConfig same = cfg;
  same.output.csv = "somewhere/else.csv";
  same.output.json = "sidecar.json";
  same.sweep.jobs = 13;
  CHECK(canonical_json(same) == canonical_json(cfg));
  CHECK(config_hash(same) == config_hash(cfg));
}

TEST_CASE("unknown keys are rejected, missing keys keep defaults") {
  CHECK_THROWS_WITH_AS(parse_config(R"({"system": {"j_hz": 54.39}})"),
                       doctest::Contains("unknown key"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config(R"({"sequnce": {}})"), std::invalid_argument);

  const RunConfig partial = parse_config(R"({"system": {"J_hz": 10.0}})");
  CHECK(partial.system.J_hz == 10.0);
  CHECK(partial.system.delta_hz == 7.50);      // untouched default
  CHECK(partial.protocol.n_elements == 9);     // untouched default
}

TEST_CASE("invalid enum values name the allowed choices") {
  RunConfig cfg;
  cfg.context.mode = "analog";
  CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("delta"),
                       std::invalid_argument);

  cfg = RunConfig{};
  cfg.sequence.construction = "shuffled";
  CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("riffled"),
                       std::invalid_argument);
}

TEST_CASE("validation rejects unphysical numbers") {
  RunConfig cfg;
  cfg.system.J_hz = -1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

  cfg = RunConfig{};
  cfg.context.nutation_hz = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

  cfg = RunConfig{};
  cfg.sequence.N = 3;  // odd N is infeasible physics, not a usage error
  CHECK_THROWS_AS(cfg.validate(), infeasible_error);
}

TEST_CASE("pulsepol construction pins the symmetry and maps to riffled") {
  RunConfig cfg;
  cfg.sequence.construction = "pulsepol";
  cfg.sequence.N = 10;  // ignored: pulsepol is the riffled R4(3,1)
  cfg.sequence.n = 1;
  cfg.sequence.nu = -4;
  const SymmetryNumbers sym = cfg.symmetry_numbers();
  CHECK(sym.N == 4);
  CHECK(sym.n == 3);
  CHECK(sym.nu == 1);
  CHECK(cfg.construction_kind() == Construction::riffled);
}

} // TEST_SUITE("config")

TEST_SUITE("cli") {

namespace {

struct CliResult {
  int code = 0;
  std::string out;
  std::string err;
};

CliResult run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  CliResult r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::vector<std::string> csv_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) lines.push_back(line);
  return lines;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}

} // namespace

TEST_CASE("--version reports the tool identity") {
  const CliResult r = run({"--version"});
  CHECK(r.code == 0);
  CHECK(r.out.find("rnnv-forge") != std::string::npos);
  CHECK(r.out.find("0.1.0") != std::string::npos);
}

TEST_CASE("missing or unknown arguments are usage errors (exit 2)") {
  CHECK(run({}).code == 2);
  CHECK(run({"derive", "--badflag"}).code == 2);
  CHECK(run({"kappa-table", "--sym", ""}).code == 2);
  CHECK(run({"kappa-table", "--sym", "4,3"}).code == 2);
  CHECK(run({"simulate", "--protocol", "bogus"}).code == 2);
  CHECK(run({"sweep", "--axis", "bogus"}).code == 2);
}

TEST_CASE("kappa-table emits the published set with matching closed forms") {
  const CliResult r = run({"kappa-table"});
  REQUIRE(r.code == 0);
  const auto lines = csv_lines(r.out);
  REQUIRE(lines.size() == 2 + 21);  // version header, column header, 21 rows

  CHECK(lines[0].rfind("# rnnv-forge v0.1.0 config=", 0) == 0);
  CHECK(is_hex16(lines[0].substr(lines[0].find("config=") + 7)));
  CHECK(lines[1] ==
        "N,n,nu,term,kappa_abs_numeric,kappa_arg_numeric_deg,"
        "kappa_abs_closed,kappa_arg_closed_deg,match");
  for (std::size_t i = 2; i < lines.size(); ++i)
    CHECK(lines[i].substr(lines[i].size() - 4) == ",yes");
}

TEST_CASE("kappa-table --sym restricts the listing") {
  const CliResult r = run({"kappa-table", "--sym", "4,3,1"});
  REQUIRE(r.code == 0);
  const auto lines = csv_lines(r.out);
  REQUIRE(lines.size() == 3);
  CHECK(lines[2].rfind("4,3,1,", 0) == 0);
  CHECK(lines[2].find("0.51231203") != std::string::npos);
}

TEST_CASE("derive rejects odd N as infeasible (exit 3)") {
  const CliResult r = run({"derive", "--sym", "3,3,1"});
  CHECK(r.code == 3);
  CHECK(r.err.find("N must be even") != std::string::npos);
}

TEST_CASE("derive --sym 4,3,1 --riffled --shift -45 matches the golden file") {
  const CliResult r = run({"derive", "--sym", "4,3,1", "--riffled", "--shift", "-45"});
  REQUIRE(r.code == 0);
  const std::string golden =
      slurp(std::filesystem::path(RNNV_GOLDEN_DIR) / "pulsepol_r431.json");
  REQUIRE(!golden.empty());
  CHECK(r.out == golden);
}

TEST_CASE("derive --pulsepol emits the same event list") {
  const CliResult a = run({"derive", "--sym", "4,3,1", "--riffled", "--shift", "-45"});
  const CliResult b = run({"derive", "--pulsepol"});
  REQUIRE(a.code == 0);
  REQUIRE(b.code == 0);
  const json ja = json::parse(a.out);
  const json jb = json::parse(b.out);
  CHECK(ja["events"] == jb["events"]);
  CHECK(ja["total_duration_ns"] == jb["total_duration_ns"]);

  // the six-pulse cycle: flips 90/180/90 twice, phases Y X Y then -X Y -X
  std::vector<std::pair<std::string, std::string>> pulses;
  for (const auto& e : ja["events"])
    if (e["type"] == "pulse")
      pulses.emplace_back(e["flip_deg"].get<std::string>(),
                          e["phase_deg"].get<std::string>());
  const std::vector<std::pair<std::string, std::string>> expected = {
      {"90", "90"}, {"180", "0"}, {"90", "90"},
      {"90", "180"}, {"180", "90"}, {"90", "180"}};
  CHECK(pulses == expected);
  int delays = 0;
  for (const auto& e : ja["events"])
    if (e["type"] == "delay") {
      CHECK(e["duration_ns"] == "12500000000/1813");  // (3/8)/J in ns
      ++delays;
    }
  CHECK(delays == 4);
}

TEST_CASE("simulate filter reproduces the brute-force optimum efficiency") {
  const CliResult r = run({"simulate", "--sym", "4,3,1", "--riffled",
                           "--protocol", "filter", "--n-exc", "9", "--n-rec", "9"});
  REQUIRE(r.code == 0);
  const auto lines = csv_lines(r.out);
  REQUIRE(lines.size() == 3);
  CHECK(lines[1] == "n_exc,n_rec,efficiency");
  double ne = 0.0, nr = 0.0, eff = 0.0;
  REQUIRE(std::sscanf(lines[2].c_str(), "%lf,%lf,%lf", &ne, &nr, &eff) == 3);
  CHECK(ne == 9);
  CHECK(nr == 9);
  CHECK(eff == doctest::Approx(-0.639203366).epsilon(1e-6));
}

TEST_CASE("simulate filter with zero elements is the identity experiment") {
  const CliResult r = run({"simulate", "--sym", "4,3,1", "--riffled",
                           "--protocol", "filter", "--n", "0"});
  REQUIRE(r.code == 0);
  const auto lines = csv_lines(r.out);
  REQUIRE(lines.size() == 3);
  double ne = 0.0, nr = 0.0, eff = 1.0;
  REQUIRE(std::sscanf(lines[2].c_str(), "%lf,%lf,%lf", &ne, &nr, &eff) == 3);
  CHECK(eff == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("simulate excite lists the four spectral lines") {
  const CliResult r = run({"simulate", "--sym", "4,3,1", "--riffled",
                           "--protocol", "excite", "--n", "4"});
  REQUIRE(r.code == 0);
  const auto lines = csv_lines(r.out);
  REQUIRE(lines.size() == 2 + 4);
  CHECK(lines[1] == "frequency_hz,amplitude_re,amplitude_im,amplitude_abs");
  std::vector<double> freq;
  for (std::size_t i = 2; i < lines.size(); ++i) {
    double f = 0.0;
    REQUIRE(std::sscanf(lines[i].c_str(), "%lf,", &f) == 1);
    freq.push_back(f);
  }
  // AB quartet at +-(D -+ J)/2 with D = sqrt(J^2 + delta^2), in Hz
  const double D = std::hypot(54.39, 7.50);
  CHECK(freq[0] == doctest::Approx(-(D + 54.39) / 2).epsilon(1e-9));
  CHECK(freq[1] == doctest::Approx(-(D - 54.39) / 2).epsilon(1e-9));
  CHECK(freq[2] == doctest::Approx(+(D - 54.39) / 2).epsilon(1e-9));
  CHECK(freq[3] == doctest::Approx(+(D + 54.39) / 2).epsilon(1e-9));
}

TEST_CASE("simulate optimal-n reports the brute-force and closed-form optima") {
  const CliResult r = run({"simulate", "--sym", "4,3,1", "--riffled",
                           "--protocol", "optimal-n"});
  REQUIRE(r.code == 0);
  const auto lines = csv_lines(r.out);
  REQUIRE(lines.size() == 3);
  CHECK(lines[1] ==
        "objective,n_best,objective_value,n_closed_coherence,n_closed_singlet_order");
  CHECK(lines[2].rfind("singlet_order,9,", 0) == 0);
  CHECK(lines[2].find("1.30558121") != std::string::npos);
  CHECK(lines[2].substr(lines[2].size() - 4) == ",2,5");
}

TEST_CASE("sweep output is deterministic and jobs-invariant") {
  const std::vector<std::string> args = {
      "sweep", "--sym", "4,3,1", "--riffled", "--protocol", "filter",
      "--axis", "n", "--from", "1", "--to", "6"};
  std::vector<std::string> j1 = args;
  j1.push_back("--jobs");
  j1.push_back("1");
  std::vector<std::string> j3 = args;
  j3.push_back("--jobs");
  j3.push_back("3");

  const CliResult a = run(j1);
  const CliResult b = run(j3);
  const CliResult c = run(j1);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);  // same bytes regardless of parallelism
  CHECK(a.out == c.out);  // same bytes on rerun

  const auto lines = csv_lines(a.out);
  REQUIRE(lines.size() == 2 + 6);
  CHECK(lines[1] == "n_elements,observable,error,config_hash");
  double axis = 0.0, value = 0.0;
  REQUIRE(std::sscanf(lines[7].c_str(), "%lf,%lf", &axis, &value) == 2);
  CHECK(axis == 6);
  CHECK(value == doctest::Approx(0.325707032).epsilon(1e-6));
}

TEST_CASE("sweep axis values are emitted sorted") {
  const CliResult r = run({"sweep", "--sym", "4,3,1", "--riffled",
                           "--protocol", "filter", "--axis", "amplitude",
                           "--from", "1.1", "--to", "0.9", "--points", "3"});
  REQUIRE(r.code == 0);
  const auto lines = csv_lines(r.out);
  REQUIRE(lines.size() == 2 + 3);
  std::vector<double> axis;
  for (std::size_t i = 2; i < lines.size(); ++i) {
    double v = 0.0;
    REQUIRE(std::sscanf(lines[i].c_str(), "%lf,", &v) == 1);
    axis.push_back(v);
  }
  CHECK(axis == std::vector<double>{0.9, 1.0, 1.1});
}

TEST_CASE("sweep offset axis agrees with a single simulate point") {
  // finite pulses so the offset actually matters (delta-pulse trains echo it out)
  const CliResult sweep = run({"sweep", "--sym", "4,3,1", "--riffled",
                               "--mode", "finite", "--protocol", "filter",
                               "--axis", "offset", "--from", "1000", "--to", "1000",
                               "--points", "1"});
  const CliResult point = run({"simulate", "--sym", "4,3,1", "--riffled",
                               "--mode", "finite", "--protocol", "filter",
                               "--offset", "1000"});
  REQUIRE(sweep.code == 0);
  REQUIRE(point.code == 0);
  double axis = 0.0, swept = 0.0;
  REQUIRE(std::sscanf(csv_lines(sweep.out)[2].c_str(), "%lf,%lf", &axis, &swept) == 2);
  double ne = 0.0, nr = 0.0, direct = 0.0;
  REQUIRE(std::sscanf(csv_lines(point.out)[2].c_str(), "%lf,%lf,%lf", &ne, &nr,
                      &direct) == 3);
  CHECK(axis == 1000.0);
  CHECK(swept == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("config files load and CLI flags override them") {
  const auto path = temp_path("rnnv_cli_test_cfg.json");
  {
    std::ofstream out(path);
    out << R"({"sequence": {"N": 8, "n": 7, "nu": 3}, "protocol": {"n_elements": 5}})";
  }
  const CliResult file_run = run({"simulate", "--config", path.string(),
                                  "--protocol", "filter"});
  const CliResult flag_run = run({"simulate", "--sym", "8,7,3", "--riffled",
                                  "--protocol", "filter", "--n", "5"});
  REQUIRE(file_run.code == 0);
  REQUIRE(flag_run.code == 0);
  CHECK(file_run.out == flag_run.out);

  // flags take precedence over the file
  const CliResult overridden = run({"simulate", "--config", path.string(),
                                    "--protocol", "filter", "--n", "0"});
  REQUIRE(overridden.code == 0);
  CHECK(csv_lines(overridden.out)[2].rfind("0,0,", 0) == 0);
  std::filesystem::remove(path);

  CHECK(run({"simulate", "--config", temp_path("does_not_exist.json").string()})
            .code == 2);
}

TEST_CASE("--out and --json write files whose content matches stdout") {
  const auto csv = temp_path("rnnv_cli_test_out.csv");
  const auto sidecar = temp_path("rnnv_cli_test_out.json");
  const CliResult direct = run({"simulate", "--sym", "4,3,1", "--riffled",
                                "--protocol", "filter", "--n", "3"});
  const CliResult filed = run({"simulate", "--sym", "4,3,1", "--riffled",
                               "--protocol", "filter", "--n", "3",
                               "--out", csv.string(), "--json", sidecar.string()});
  REQUIRE(direct.code == 0);
  REQUIRE(filed.code == 0);
  CHECK(slurp(csv) == direct.out);

  const json side = json::parse(slurp(sidecar));
  CHECK(side.contains("config"));
  CHECK(side.contains("results"));
  CHECK(is_hex16(side["config_hash"].get<std::string>()));
  CHECK(side["config"]["sequence"]["N"] == 4);
  std::filesystem::remove(csv);
  std::filesystem::remove(sidecar);
}

TEST_CASE("every emitted header carries the config hash of the run") {
  const CliResult r = run({"simulate", "--sym", "4,3,1", "--riffled",
                           "--protocol", "filter", "--n", "2"});
  REQUIRE(r.code == 0);
  const auto lines = csv_lines(r.out);
  const std::string hash = lines[0].substr(lines[0].find("config=") + 7);
  CHECK(is_hex16(hash));

  RunConfig cfg;
  cfg.protocol.n_elements = 2;
  CHECK(hash == config_hash(cfg));  // default sequence is the riffled R4(3,1)
}

} // TEST_SUITE("cli")
