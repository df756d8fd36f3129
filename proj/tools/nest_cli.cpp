#include "nest/commands.hpp"
#include "nest/error.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>

namespace {

void
add_io(CLI::App* sub, nest::RunConfig& c, bool needs_input)
{
  auto* in = sub->add_option("--input", c.input, "Input CSV");
  if (needs_input)
    in->required();
  sub->add_option("--output", c.output, "Output CSV (stdout when omitted)");
  sub->add_option("--seed", c.seed, "Random seed");
  sub->add_option("--threads", c.threads, "Worker threads (0 = all cores)");
}

void
add_grid(CLI::App* sub, nest::RunConfig& c)
{
  sub->add_option("--grid-hx", c.grid_hx, "h_x grid values")->delimiter(',');
  sub->add_option("--grid-hsigma", c.grid_hsigma, "h_sigma multipliers of the sigma scale")
    ->delimiter(',');
  sub->add_option("--folds", c.folds, "Cross-validation folds");
}

void
add_scale(CLI::App* sub, nest::RunConfig& c)
{
  sub->add_option("--n", c.n, "Sample size per replication");
  sub->add_option("--reps", c.reps, "Replications");
  auto* smoke = sub->add_flag("--smoke", "Smoke profile (default)");
  sub->add_flag("--full", c.full, "Full-scale profile")->excludes(smoke);
}

} // namespace

int
main(int argc, char** argv)
{
  nest::RunConfig c;
  CLI::App app{ "Nonparametric empirical Bayes smoothing for heteroscedastic means" };
  app.set_version_flag("--version", nest::library_version());
  app.require_subcommand(1);
  app.set_help_flag("--help", "Print this help message and exit");

  auto* est = app.add_subcommand("estimate", "Estimate means from id,x,sigma data");
  add_io(est, c, true);
  add_grid(est, c);
  est->add_option("--method", c.methods, "nest, tf, scaled, naive, kgroups or N-groups")
    ->delimiter(',');
  est->add_option("--hx", c.hx, "Fixed NEST h_x");
  est->add_option("--hsigma", c.hsigma, "Fixed NEST h_sigma");
  est->add_option("--h", c.h, "Fixed bandwidth for TF, Scaled and k-groups");
  est->add_option("--k-groups", c.k_groups, "Group count for 'kgroups'");
  est->add_flag("--truncate", c.truncate, "Clip NEST estimates to +-2 log n");
  est->add_flag("--stabilize-sign", c.stabilize_sign, "Zero estimates whose sign flips");
  est->add_flag("--jackknife", c.jackknife, "Leave each point out of its own density");

  auto* tune = app.add_subcommand("tune", "SURE surface over the NEST bandwidth grid");
  add_io(tune, c, true);
  add_grid(tune, c);

  auto* sim = app.add_subcommand("simulate", "MSE table for a simulation scenario");
  add_io(sim, c, false);
  add_grid(sim, c);
  add_scale(sim, c);
  sim->add_option("--scenario", c.scenario, "normal, sparse or twopoint");
  sim->add_option("--ratio", c.ratio, "var(mu)/var(X) in (0,1), or a label >= 1");
  sim->add_option("--method", c.methods, "Restrict to these methods")->delimiter(',');
  sim->add_option("--k-groups", c.k_groups, "Group count for 'kgroups'");

  auto* bias = app.add_subcommand("bias", "Selection-bias experiment");
  add_io(bias, c, false);
  add_grid(bias, c);
  add_scale(bias, c);
  bias->add_option("--setting", c.setting, "single or two");
  bias->add_option("--select", c.select_k, "Smallest observations kept per replication");

  auto* ef = app.add_subcommand("expfam", "Posterior mean for an exponential family");
  add_io(ef, c, false);
  ef->add_option("--family", c.family, "binomial, negbinomial, gamma or beta")->required();
  ef->add_option("--param", c.family_param, "n_trials, r, alpha or beta");
  ef->add_option("--x", c.value, "Observation")->required();
  ef->add_option("--lf1", c.lf1, "Estimated log-marginal derivative")->required();

  auto* gap = app.add_subcommand("prep-gap", "Two-proportion gap preprocessing");
  add_io(gap, c, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0)
      return app.exit(e);
    std::cerr << nlohmann::json{ { "error", "UsageError" }, { "message", e.what() } }.dump()
              << '\n';
    return 2;
  }
  c.command = app.get_subcommands().front()->get_name();

  try {
    nest::run_command(c, std::cout, std::cerr);
  } catch (const nest::Error& e) {
    nlohmann::json j{ { "error", nest::to_string(e.code()) }, { "message", e.what() } };
    if (e.index())
      j["index"] = *e.index();
    std::cerr << j.dump() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << nlohmann::json{ { "error", "Internal" }, { "message", e.what() } }.dump() << '\n';
    return 1;
  }
  return 0;
}
