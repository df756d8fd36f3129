#pragma once

#include "nest/pipeline.hpp"
#include "nest/sim.hpp"

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace nest {

//! Resolved options of one CLI invocation.
struct RunConfig
{
  std::string command;
  std::string input;
  std::string output;

  // estimate / tune
  //! Empty selects the command default.
  std::vector<std::string> methods;
  std::optional<double> hx;
  std::optional<double> hsigma;
  //! Fixed bandwidth for the pooled rules (TF, Scaled, k-groups).
  std::optional<double> h;
  std::vector<double> grid_hx;
  //! Multipliers on sigma_scale(sample).
  std::vector<double> grid_hsigma;
  int folds = 10;
  int k_groups = 2;
  bool truncate = false;
  bool stabilize_sign = false;
  bool jackknife = false;

  // simulate / bias
  std::string scenario = "normal";
  //! In (0, 1): var(mu)/var(X). At least 1: the label var(mu)/E var(X|mu).
  double ratio = 9.6;
  std::optional<Index> n;
  std::optional<int> reps;
  bool full = false;
  std::string setting = "single";
  int select_k = 20;

  // expfam
  std::string family;
  double family_param = 1.0;
  double value = 0.0;
  double lf1 = 0.0;

  std::uint64_t seed = 0;
  int threads = 1;
};

//! Runs one command. Results go to config.output (atomically) or `out` when
//! no output path is given; the reproducibility manifest and progress go to
//! `log` as JSON lines. Throws nest::Error on failure.
void run_command(const RunConfig& config, std::ostream& out, std::ostream& log);

//! Reads id,x,sigma (and optional mu_true) from a CSV table.
struct LabeledSample
{
  std::vector<std::string> ids;
  HeteroSample sample;
};
LabeledSample read_sample_csv(const std::string& path);

//! Scenario named "normal", "sparse" or "twopoint" at the given ratio.
SimScenario named_scenario(const std::string& name,
                           double ratio,
                           Index n,
                           int reps,
                           std::uint64_t seed);

//! Default method list for a named scenario.
std::vector<MethodRequest> scenario_methods(const std::string& name);

std::string library_version();

} // namespace nest
