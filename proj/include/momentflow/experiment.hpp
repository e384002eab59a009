#pragma once

// Experiment configuration (flat `key = value` text) and the runner behind
// the command-line tool.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "momentflow/algebra.hpp"
#include "momentflow/error.hpp"
#include "momentflow/types.hpp"

namespace momentflow {

class ConfigError : public Error {
 public:
  ConfigError(const std::string& source, int line, const std::string& field,
              const std::string& message);
  int line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  int line_;
  std::string field_;
};

enum class GroupKind { torus, su2, matrix_basis };
enum class FlowMode { affine, projective, cointegrate };

struct CheckTolerances {
  double decay_target = 2.0;
  double decay_tol = 0.05;
  double alpha_target = 0.75;
  double alpha_tol = 0.02;
  double plateau_ratio = 1.05;
  double quartic_floor = 1e-3;
  double clock_r2 = 0.99;
  double lift = 1e-6;
  double kempf_ness = 1e-6;
  double convexity = 1e-8;
  double ray_angle = 1e-3;
  double ray_residual = 1e-2;
  double ray_spectrum = 1e-3;
  bool ray_monotone = true;
  double oracle_angle = 1e-3;
  double collapse = 1e-4;
  double moment_identity = 1e-5;
  double closedness = 1e-4;
  double negative_control = 1e-2;
  double gram = 1e-6;
};

struct ExperimentConfig {
  std::string source = "<config>";
  std::string name = "custom";

  GroupKind group_kind = GroupKind::torus;
  std::vector<Eigen::VectorXi> weights;
  int weight_rank = 0;
  std::vector<int> degrees;
  std::string basis_file;
  std::string metric = "default";  // default | trace | euclidean
  int torus_generator = -1;        // basis index of a diagonal maximal torus (su2 oracle)

  CVector initial_vector;

  FlowMode mode = FlowMode::affine;
  double t_max = 1e4;
  double projective_t_max = 1e6;
  double eps_grad = 1e-10;
  double initial_step = 1e-3;
  double rtol = 1e-10;

  bool rates = false;
  bool clock = false;
  bool ray = false;
  bool degeneration = false;
  bool oracle = false;
  bool normal_form = false;
  bool kempf_ness = false;

  std::optional<CVector> z0;
  int normal_form_samples = 100;
  double normal_form_step = 1e-4;
  int kempf_ness_geodesics = 20;
  double kempf_ness_h_path = 1e-2;

  std::string output_dir;
  std::uint64_t seed = 1;
  CheckTolerances check;

  // Line number of every key that was set, for validation messages.
  std::map<std::string, int> lines;
};

ExperimentConfig parse_config(std::istream& in, const std::string& source = "<config>");
ExperimentConfig load_config(const std::string& path);

// Stable, sorted names.
std::vector<std::string> list_builtins();
// Throws ConfigError for an unknown name.
std::string builtin_config_text(const std::string& name);
ExperimentConfig builtin_config(const std::string& name);

// Throws ConfigError naming the offending field when the group or vectors
// are inconsistent.
GroupPresentation build_group(const ExperimentConfig& config);

// Canonical `key = value` listing used in the CONFIG section.
std::string canonical_config(const ExperimentConfig& config);

enum class CheckKind { at_most, at_least, band, flag };

struct CheckResult {
  std::string name;
  CheckKind kind = CheckKind::at_most;
  double value = 0.0;
  double threshold = 0.0;  // the bound, or the band half-width
  double target = 0.0;     // band centre
  bool pass = false;
};

struct RunOptions {
  std::string out_dir;      // empty: config output_dir, then $MOMENTFLOW_OUT, then "."
  double tol_scale = 1.0;
  bool write_files = true;
};

struct ExperimentResult {
  std::vector<CheckResult> checks;
  std::string report;
  std::string out_dir;
  bool passed = false;
};

ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

}  // namespace momentflow
