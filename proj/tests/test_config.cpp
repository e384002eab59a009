#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "momentflow/experiment.hpp"

using namespace momentflow;

namespace {

ExperimentConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in, "test.cfg");
}

const CheckResult& check_named(const ExperimentResult& r, const std::string& name) {
  for (const CheckResult& c : r.checks) {
    if (c.name == name) return c;
  }
  FAIL("missing check " << name);
  return r.checks.front();
}

std::string report_value(const std::string& report, const std::string& key) {
  std::istringstream in(report);
  for (std::string line; std::getline(in, line);) {
    if (line.rfind(key + " = ", 0) == 0) return line.substr(key.size() + 3);
  }
  return "";
}

RunOptions in_memory() {
  RunOptions o;
  o.write_files = false;
  return o;
}

}  // namespace

TEST_CASE("parse a minimal config") {
  const ExperimentConfig c = parse(
      "# comment\n"
      "group.kind = torus\n"
      "group.weights = 1,0; 0,1; 1,1   # trailing comment\n"
      "initial_vector = 1:0, 0:-2, 0.5:0.25\n"
      "flow.mode = projective\n"
      "flow.t_max = 1e6\n"
      "analyses.oracle = true\n"
      "seed = 12\n");
  CHECK(c.group_kind == GroupKind::torus);
  REQUIRE(c.weights.size() == 3);
  CHECK(c.weight_rank == 2);
  CHECK(c.weights[2] == Eigen::Vector2i(1, 1));
  CHECK(c.initial_vector(1) == Complex(0, -2));
  CHECK(c.initial_vector(2) == Complex(0.5, 0.25));
  CHECK(c.mode == FlowMode::projective);
  CHECK(c.t_max == 1e6);
  CHECK(c.oracle);
  CHECK(c.seed == 12);
  CHECK(c.lines.at("flow.mode") == 5);
  CHECK(build_group(c).dim_v() == 3);
}

TEST_CASE("parse errors carry the line and the field") {
  const auto expect = [](const std::string& text, int line, const std::string& field) {
    try {
      parse(text);
      FAIL("no error for: " << text);
    } catch (const ConfigError& e) {
      CHECK(e.line() == line);
      CHECK(e.field() == field);
      CHECK(std::string(e.what()).find("test.cfg:" + std::to_string(line)) == 0);
    }
  };
  expect("initial_vector = 1\nflow.bogus = 3\n", 2, "flow.bogus");
  expect("initial_vector = 1\ninitial_vector = 2\n", 2, "initial_vector");
  expect("initial_vector = 1\n\nflow.t_max = abc\n", 3, "flow.t_max");
  expect("initial_vector = 1\nflow.t_max = -1\n", 2, "flow.t_max");
  expect("initial_vector = 1\nflow.eps_grad = 0\n", 2, "flow.eps_grad");
  expect("initial_vector = 1\nflow.mode = sideways\n", 2, "flow.mode");
  expect("initial_vector = 1\nanalyses.ray = maybe\n", 2, "analyses.ray");
  expect("just some words\n", 1, "");
  expect("group.weights = 1,0; 1\ninitial_vector = 1, 1\n", 1, "group.weights");
}

TEST_CASE("group validation names the inconsistent field") {
  const ExperimentConfig c = parse(
      "group.kind = torus\n"
      "group.weights = 1; 2\n"
      "initial_vector = 1, 1, 1\n");
  try {
    build_group(c);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "initial_vector");
    CHECK(e.line() == 3);
    CHECK(std::string(e.what()).find("group.weights") != std::string::npos);
  }
  CHECK_THROWS_AS(run_experiment(c, in_memory()), ConfigError);

  const ExperimentConfig ray_affine = parse(
      "group.weights = 1\ninitial_vector = 1\nflow.mode = affine\nanalyses.ray = true\n");
  CHECK_THROWS_AS(build_group(ray_affine), ConfigError);

  const ExperimentConfig nf = parse("group.weights = 1; -1\ninitial_vector = 1, 1\n"
                                    "analyses.normal_form = true\n");
  CHECK_THROWS_AS(build_group(nf), ConfigError);
}

TEST_CASE("matrix basis groups load from a file") {
  const auto dir = std::filesystem::temp_directory_path() / "momentflow_config_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "basis.txt";
  {
    std::ofstream os(path);
    os << "# i/2 sigma_z then i/2 sigma_x\n"
          "0:0.5 0\n0 0:-0.5\n\n"
          "0 0:0.5\n0:0.5 0\n\n"
          "0:0 0.5\n-0.5 0\n";
  }
  const ExperimentConfig c = parse("group.kind = matrix_basis\ngroup.basis_file = " +
                                   path.string() + "\ninitial_vector = 1, 0\n");
  const GroupPresentation p = build_group(c);
  CHECK(p.rank() == 3);
  CHECK(p.dim_v() == 2);

  const ExperimentConfig missing = parse("group.kind = matrix_basis\ngroup.basis_file = " +
                                         (dir / "nope.txt").string() + "\ninitial_vector = 1, 0\n");
  CHECK_THROWS_AS(build_group(missing), ConfigError);
}

TEST_CASE("builtins") {
  const std::vector<std::string> names = list_builtins();
  CHECK(names == list_builtins());
  CHECK(std::is_sorted(names.begin(), names.end()));
  for (const char* required :
       {"u1_weight1", "torus_12", "torus_c3", "su2_symd", "mgs_u1", "mgs_su2"}) {
    CHECK(std::find(names.begin(), names.end(), required) != names.end());
  }
  for (const std::string& name : names) {
    const ExperimentConfig c = builtin_config(name);
    CHECK(c.name == name);
    CHECK_NOTHROW(build_group(c));
    // The canonical listing parses back to the same listing.
    std::istringstream in(canonical_config(c));
    CHECK(canonical_config(parse_config(in)) == canonical_config(c));
  }
  CHECK_THROWS_AS(builtin_config("nonexistent"), ConfigError);
}

TEST_CASE("u1_weight1 report") {
  const ExperimentResult r = run_experiment(builtin_config("u1_weight1"), in_memory());
  CHECK(r.passed);
  const double alpha = std::stod(report_value(r.report, "alpha_hat"));
  CHECK(alpha >= 0.73);
  CHECK(alpha <= 0.77);
  CHECK(std::abs(std::stod(report_value(r.report, "decay_exponent")) - 2.0) <= 0.05);
  // Section order is fixed.
  std::size_t last = 0;
  for (const char* section : {"[CONFIG]", "[FLOW]", "[RATES]", "[RAY]", "[DEGENERATION]",
                              "[NORMAL_FORM]", "[VERDICT]"}) {
    const std::size_t at = r.report.find(section);
    REQUIRE(at != std::string::npos);
    CHECK(at >= last);
    last = at;
  }
}

TEST_CASE("torus_c3 report") {
  const ExperimentResult r = run_experiment(builtin_config("torus_c3"), in_memory());
  CHECK(r.passed);
  CHECK(report_value(r.report, "verdict") == "match");
  CHECK(report_value(r.report, "rational") == "1 1");
  CHECK(check_named(r, "oracle_match").pass);
}

TEST_CASE("tolerance corruption and scaling flip the verdict") {
  ExperimentConfig c = builtin_config("u1_weight1");
  c.check.decay_tol = 1e-9;
  const ExperimentResult strict = run_experiment(c, in_memory());
  CHECK_FALSE(strict.passed);
  CHECK_FALSE(check_named(strict, "decay_exponent").pass);
  RunOptions loose = in_memory();
  loose.tol_scale = 1e6;
  CHECK(run_experiment(c, loose).passed);
}

TEST_CASE("reports are deterministic and files land in the chosen directory") {
  const auto dir = std::filesystem::temp_directory_path() / "momentflow_run_test";
  std::filesystem::remove_all(dir);
  RunOptions o;
  o.out_dir = (dir / "a").string();
  const ExperimentResult a = run_experiment(builtin_config("torus_12"), o);
  o.out_dir = (dir / "b").string();
  const ExperimentResult b = run_experiment(builtin_config("torus_12"), o);
  CHECK(a.report == b.report);
  for (const char* file : {"report.txt", "trajectory.csv", "ray.csv", "degeneration.csv"}) {
    CHECK(std::filesystem::exists(dir / "a" / file));
  }
  std::ifstream ra(dir / "a" / "report.txt"), rb(dir / "b" / "report.txt");
  std::stringstream sa, sb;
  sa << ra.rdbuf();
  sb << rb.rdbuf();
  CHECK(sa.str() == a.report);
  CHECK(sa.str() == sb.str());

  // Environment fallback when neither the option nor the config sets a directory.
  ::setenv("MOMENTFLOW_OUT", (dir / "env").string().c_str(), 1);
  const ExperimentResult e = run_experiment(builtin_config("mgs_u1"), RunOptions{});
  ::unsetenv("MOMENTFLOW_OUT");
  CHECK(e.out_dir == (dir / "env").string());
  CHECK(std::filesystem::exists(dir / "env" / "report.txt"));
}
