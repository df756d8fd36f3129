#include "nest/commands.hpp"
#include "nest/csv.hpp"
#include "nest/expfam.hpp"
#include "nest/gap.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <filesystem>

namespace nest {

namespace {

using json = nlohmann::json;

void
emit(const RunConfig& config, const std::string& text, std::ostream& out)
{
  if (config.output.empty())
    out << text;
  else
    csv::write_file_atomic(config.output, text);
}

json
manifest_base(const RunConfig& config)
{
  return json{ { "event", "manifest" },
               { "version", library_version() },
               { "command", config.command },
               { "seed", config.seed },
               { "threads", config.threads } };
}

std::string
lower(std::string s)
{
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

MethodRequest
resolve_request(const std::string& name, const RunConfig& config)
{
  MethodRequest r;
  if (lower(name) == "kgroups" || lower(name) == "k-groups") {
    r.kind = MethodKind::KGroups;
    r.k = config.k_groups;
  } else {
    r = parse_method(name);
  }
  r.truncate = config.truncate && r.kind == MethodKind::Nest;
  r.stabilize_sign = config.stabilize_sign && r.kind != MethodKind::Naive &&
                     r.kind != MethodKind::Oracle;
  return r;
}

TuningConfig
tuning_from(const RunConfig& config)
{
  TuningConfig t;
  if (!config.grid_hx.empty())
    t.h_x = config.grid_hx;
  if (!config.grid_hsigma.empty())
    t.h_sigma_multipliers = config.grid_hsigma;
  t.K = config.folds;
  t.threads = config.threads;
  return t;
}

json
describe_spec(const EstimatorSpec& spec)
{
  json j{ { "method", method_name(spec.method) }, { "stabilize_sign", spec.stabilize_sign } };
  if (spec.truncation_bound)
    j["truncation_bound"] = *spec.truncation_bound;
  if (const auto* m = std::get_if<method::Nest>(&spec.method)) {
    j["h_x"] = m->bw.h_x;
    j["h_sigma"] = m->bw.h_sigma;
    j["jackknife"] = m->jackknife;
  } else if (const auto* t = std::get_if<method::Tf>(&spec.method)) {
    j["h"] = t->h;
  } else if (const auto* s = std::get_if<method::Scaled>(&spec.method)) {
    j["h"] = s->h;
  } else if (const auto* g = std::get_if<method::KGroups>(&spec.method)) {
    j["h_per_group"] = g->h_per_group;
  }
  return j;
}

// estimate -----------------------------------------------------------------

void
cmd_estimate(const RunConfig& config, std::ostream& out, std::ostream& log)
{
  const LabeledSample data = read_sample_csv(config.input);
  const HeteroSample& sample = data.sample;
  const auto names = config.methods.empty() ? std::vector<std::string>{ "nest" } : config.methods;
  const TuningConfig tuning = tuning_from(config);

  json manifest = manifest_base(config);
  manifest["n"] = sample.size();
  manifest["folds"] = config.folds;
  manifest["grid_hx"] = tuning.h_x;
  manifest["grid_hsigma_multipliers"] = tuning.h_sigma_multipliers;
  manifest["methods"] = json::array();

  std::vector<std::string> labels;
  std::vector<Eigen::VectorXd> columns;
  for (const auto& name : names) {
    const MethodRequest req = resolve_request(name, config);
    EstimatorSpec spec;
    spec.stabilize_sign = req.stabilize_sign;
    if (req.truncate)
      spec.truncation_bound = default_truncation_bound(sample.size(), tuning.truncation_K);

    bool fixed = false;
    if (req.kind == MethodKind::Nest && config.hx && config.hsigma) {
      spec.method = method::Nest{ Bandwidths{ *config.hx, *config.hsigma }, config.jackknife };
      fixed = true;
    } else if (req.kind == MethodKind::Tf && config.h) {
      spec.method = method::Tf{ *config.h };
      fixed = true;
    } else if (req.kind == MethodKind::Scaled && config.h) {
      spec.method = method::Scaled{ *config.h };
      fixed = true;
    } else if (req.kind == MethodKind::KGroups && config.h) {
      spec.method = method::KGroups{ req.k, std::vector<double>(static_cast<std::size_t>(req.k), *config.h) };
      fixed = true;
    }

    json entry;
    if (fixed) {
      columns.push_back(estimate(spec, sample));
      entry = describe_spec(spec);
      entry["tuned"] = false;
      if (req.kind == MethodKind::Nest && sample.size() == 1)
        entry["warning"] = "n = 1: the density is fitted on the query point itself";
    } else {
      if (req.kind == MethodKind::Oracle)
        throw Error(ErrorCode::InvalidArgument, "the oracle rule is only available in simulations");
      if (req.kind == MethodKind::Nest && config.jackknife)
        throw Error(ErrorCode::InvalidArgument,
                    "--jackknife needs fixed NEST bandwidths (--hx and --hsigma)");
      const FittedMethod fit = fit_method(req, sample, tuning, config.seed);
      columns.push_back(fit.mu_hat);
      entry = describe_spec(fit.spec);
      entry["tuned"] = true;
      if (fit.sure_min)
        entry["sure_min"] = *fit.sure_min;
    }
    labels.push_back(req.label());
    manifest["methods"].push_back(entry);
  }
  log << manifest.dump() << '\n';

  std::vector<std::string> header{ "id", "x", "sigma" };
  header.insert(header.end(), labels.begin(), labels.end());
  csv::Writer w(header);
  for (Index i = 0; i < sample.size(); ++i) {
    w.field(data.ids[static_cast<std::size_t>(i)]).field(sample.x()(i)).field(sample.sigma()(i));
    for (const auto& c : columns)
      w.field(c(i));
    w.end_row();
  }
  emit(config, w.str(), out);
}

// tune ---------------------------------------------------------------------

void
cmd_tune(const RunConfig& config, std::ostream& out, std::ostream& log)
{
  const LabeledSample data = read_sample_csv(config.input);
  const TuningConfig tuning = tuning_from(config);
  SureGrid grid;
  grid.h_x_values = tuning.h_x;
  const double scale = sigma_scale(data.sample);
  for (double c : tuning.h_sigma_multipliers)
    grid.h_sigma_values.push_back(c * scale);
  grid.K = static_cast<int>(std::min<Index>(config.folds, data.sample.size()));
  grid.seed = config.seed;
  const SureReport report = tune(data.sample, grid, config.threads);

  csv::Writer w({ "h_x", "h_sigma", "S" });
  for (std::size_t a = 0; a < grid.h_x_values.size(); ++a)
    for (std::size_t b = 0; b < grid.h_sigma_values.size(); ++b)
      w.field(grid.h_x_values[a])
        .field(grid.h_sigma_values[b])
        .field(report.surface(static_cast<Index>(a), static_cast<Index>(b)))
        .end_row();
  emit(config, w.str(), out);

  json manifest = manifest_base(config);
  manifest["n"] = data.sample.size();
  manifest["folds"] = grid.K;
  manifest["grid_hx"] = grid.h_x_values;
  manifest["grid_hsigma"] = grid.h_sigma_values;
  manifest["argmin"] = { { "h_x", report.argmin.h_x },
                         { "h_sigma", report.argmin.h_sigma },
                         { "S", report.per_point.sum() } };
  log << manifest.dump() << '\n';
  out << "argmin," << csv::format_double(report.argmin.h_x) << ','
      << csv::format_double(report.argmin.h_sigma) << ','
      << csv::format_double(report.per_point.sum()) << '\n';
}

// simulate -----------------------------------------------------------------

double
resolve_ratio(double r)
{
  return r >= 1.0 ? ratio_from_label(r) : r;
}

void
cmd_simulate(const RunConfig& config, std::ostream& out, std::ostream& log)
{
  const Index n = config.n.value_or(config.full ? 5000 : 1000);
  const int reps = config.reps.value_or(config.full ? 50 : 10);
  const SimScenario s =
    named_scenario(config.scenario, resolve_ratio(config.ratio), n, reps, config.seed);

  std::vector<MethodRequest> methods;
  if (config.methods.empty()) {
    methods = scenario_methods(config.scenario);
  } else {
    for (const auto& m : config.methods) {
      MethodRequest r = resolve_request(m, config);
      r.truncate = r.kind == MethodKind::Nest;
      r.stabilize_sign = lower(config.scenario) == "sparse" && r.kind != MethodKind::Naive &&
                         r.kind != MethodKind::Oracle;
      methods.push_back(r);
    }
  }

  TuningConfig tuning = tuning_from(config);
  json manifest = manifest_base(config);
  manifest["scenario"] = s.id;
  manifest["prior"] = describe(s.prior);
  manifest["sigma_law"] = describe(s.sigma_law);
  manifest["sigma_M"] = std::get<UniformSigma>(s.sigma_law).hi;
  manifest["var_ratio"] = resolve_ratio(config.ratio);
  manifest["n"] = n;
  manifest["reps"] = reps;
  manifest["folds"] = tuning.K;
  manifest["grid_hx"] = tuning.h_x;
  manifest["grid_hsigma_multipliers"] = tuning.h_sigma_multipliers;
  log << manifest.dump() << '\n';

  const MseTable table = run_mse_study(s, methods, tuning, [&](int rep, int total) {
    log << json{ { "event", "rep_done" }, { "rep", rep }, { "reps", total } }.dump() << '\n';
  });

  csv::Writer w({ "estimator", "mse", "se", "n", "reps", "scenario" });
  for (const auto& row : table.rows)
    w.field(row.name)
      .field(row.mse)
      .field(row.se)
      .field(static_cast<long long>(table.n))
      .field(row.reps)
      .field(table.scenario_id)
      .end_row();
  emit(config, w.str(), out);
}

// bias ---------------------------------------------------------------------

void
cmd_bias(const RunConfig& config, std::ostream& out, std::ostream& log)
{
  BiasConfig bc;
  const std::string setting = lower(config.setting);
  if (setting == "single" || setting == "single-center")
    bc.setting = BiasSetting::SingleCenter;
  else if (setting == "two" || setting == "two-center")
    bc.setting = BiasSetting::TwoCenter;
  else
    throw Error(ErrorCode::InvalidArgument, "unknown bias setting '" + config.setting + "'");
  bc.n = config.n.value_or(5000);
  bc.reps = config.reps.value_or(config.full ? 200 : 50);
  bc.select_k = config.select_k;
  bc.seed = config.seed;

  TuningConfig tuning = tuning_from(config);
  json manifest = manifest_base(config);
  manifest["setting"] = to_string(bc.setting);
  manifest["n"] = bc.n;
  manifest["reps"] = bc.reps;
  manifest["select_k"] = bc.select_k;
  log << manifest.dump() << '\n';

  const BiasExperimentResult result = run_bias_experiment(bc, tuning);
  csv::Writer w({ "estimator", "rep", "diff" });
  for (const auto& s : result.series)
    for (std::size_t q = 0; q < s.diff.size(); ++q)
      w.field(s.estimator).field(s.rep[q]).field(s.diff[q]).end_row();
  emit(config, w.str(), out);
}

// expfam -------------------------------------------------------------------

void
cmd_expfam(const RunConfig& config, std::ostream& out, std::ostream& log)
{
  const std::string fam = lower(config.family);
  expfam::FamilyPoint p{ expfam::Gamma{ 1.0 }, config.value };
  const auto as_int = [&](const char* what) {
    if (config.family_param != std::floor(config.family_param))
      throw Error(ErrorCode::DomainError, std::string(what) + " must be an integer");
    return static_cast<int>(config.family_param);
  };
  if (fam == "binomial")
    p.family = expfam::Binomial{ as_int("n_trials") };
  else if (fam == "negbinomial" || fam == "negative-binomial")
    p.family = expfam::NegBinomial{ as_int("r") };
  else if (fam == "gamma")
    p.family = expfam::Gamma{ config.family_param };
  else if (fam == "beta")
    p.family = expfam::Beta{ config.family_param };
  else
    throw Error(ErrorCode::InvalidArgument, "unknown family '" + config.family + "'");

  const double lh = expfam::lh_prime(p);
  const double pm = expfam::posterior_mean(p, expfam::ScoreEstimate{ config.lf1 });
  csv::Writer w({ "family", "param", "value", "lf1", "lh_prime", "posterior_mean" });
  w.field(fam)
    .field(config.family_param)
    .field(config.value)
    .field(config.lf1)
    .field(lh)
    .field(pm)
    .end_row();
  log << manifest_base(config).dump() << '\n';
  emit(config, w.str(), out);
}

// prep-gap -----------------------------------------------------------------

void
cmd_prep_gap(const RunConfig& config, std::ostream& out, std::ostream& log)
{
  const csv::Table t = csv::read_file(config.input);
  const std::size_t c_id = t.column("id");
  const std::size_t c_pa = t.column("pass_A");
  const std::size_t c_na = t.column("n_A");
  const std::size_t c_pd = t.column("pass_D");
  const std::size_t c_nd = t.column("n_D");
  std::vector<GapRecord> records;
  records.reserve(t.rows.size());
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    const std::size_t line = t.line_of[r];
    records.push_back({ row[c_id],
                        csv::parse_int(row[c_pa], line, "pass_A"),
                        csv::parse_int(row[c_na], line, "n_A"),
                        csv::parse_int(row[c_pd], line, "pass_D"),
                        csv::parse_int(row[c_nd], line, "n_D"),
                        line });
  }
  const GapResult result = prepare_gap(records);

  csv::Writer w({ "id", "x", "s" });
  for (const auto& k : result.kept)
    w.field(k.id).field(k.x).field(k.s).end_row();
  emit(config, w.str(), out);

  csv::Writer side({ "id", "line", "reason" });
  for (const auto& f : result.filtered)
    side.field(f.id).field(static_cast<long long>(f.line)).field(f.reason).end_row();
  json manifest = manifest_base(config);
  manifest["rows_in"] = records.size();
  manifest["rows_kept"] = result.kept.size();
  manifest["rows_filtered"] = result.filtered.size();
  if (!config.output.empty()) {
    const std::string sidecar = config.output + ".filtered.csv";
    csv::write_file_atomic(sidecar, side.str());
    manifest["filtered_log"] = sidecar;
  } else {
    manifest["filtered"] = json::array();
    for (const auto& f : result.filtered)
      manifest["filtered"].push_back({ { "id", f.id }, { "line", f.line }, { "reason", f.reason } });
  }
  log << manifest.dump() << '\n';
}

} // namespace

std::string
library_version()
{
  return NEST_VERSION;
}

LabeledSample
read_sample_csv(const std::string& path)
{
  const csv::Table t = csv::read_file(path);
  const std::size_t c_x = t.column("x");
  const std::size_t c_s = t.has_column("sigma") ? t.column("sigma") : t.column("s");
  const bool has_id = t.has_column("id");
  const bool has_mu = t.has_column("mu_true");
  const auto n = static_cast<Index>(t.rows.size());
  if (n == 0)
    throw Error(ErrorCode::ParseError, "'" + path + "' has no data rows");

  LabeledSample out{ {}, validate_sample(Eigen::VectorXd::Zero(1), Eigen::VectorXd::Ones(1)) };
  Eigen::VectorXd x(n), s(n), mu(has_mu ? n : 0);
  for (Index i = 0; i < n; ++i) {
    const auto& row = t.rows[static_cast<std::size_t>(i)];
    const std::size_t line = t.line_of[static_cast<std::size_t>(i)];
    out.ids.push_back(has_id ? row[t.column("id")] : std::to_string(i + 1));
    x(i) = csv::parse_double(row[c_x], line, "x");
    s(i) = csv::parse_double(row[c_s], line, t.header[c_s]);
    if (has_mu)
      mu(i) = csv::parse_double(row[t.column("mu_true")], line, "mu_true");
  }
  out.sample = validate_sample(std::move(x), std::move(s),
                               has_mu ? std::optional<Eigen::VectorXd>(std::move(mu)) : std::nullopt);
  return out;
}

SimScenario
named_scenario(const std::string& name, double ratio, Index n, int reps, std::uint64_t seed)
{
  const std::string s = lower(name);
  PriorSpec prior;
  if (s == "normal")
    prior = NormalPrior{ 3.0, 1.0 };
  else if (s == "sparse")
    prior = SparseMixPrior{ 0.7, 3.0, 0.3 };
  else if (s == "twopoint")
    prior = TwoPointPrior{ 0.5, 0.0, 3.0 };
  else
    throw Error(ErrorCode::InvalidArgument, "unknown scenario '" + name + "'");
  const double label = ratio / (1.0 - ratio);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s-k%.3g-n%lld", s.c_str(), label, static_cast<long long>(n));
  return calibrated_scenario(buf, prior, ratio, n, reps, seed);
}

std::vector<MethodRequest>
scenario_methods(const std::string& name)
{
  const bool sparse = lower(name) == "sparse";
  std::vector<MethodRequest> out;
  out.push_back({ MethodKind::Oracle });
  out.push_back({ MethodKind::Naive });
  out.push_back({ MethodKind::Nest, 0, true, sparse });
  out.push_back({ MethodKind::Tf, 0, false, sparse });
  out.push_back({ MethodKind::Scaled, 0, false, sparse });
  for (int k : { 2, 5, 10 })
    out.push_back({ MethodKind::KGroups, k, false, sparse });
  return out;
}

void
run_command(const RunConfig& config, std::ostream& out, std::ostream& log)
{
  const std::string cmd = lower(config.command);
  if (cmd == "estimate")
    cmd_estimate(config, out, log);
  else if (cmd == "tune")
    cmd_tune(config, out, log);
  else if (cmd == "simulate")
    cmd_simulate(config, out, log);
  else if (cmd == "bias")
    cmd_bias(config, out, log);
  else if (cmd == "expfam")
    cmd_expfam(config, out, log);
  else if (cmd == "prep-gap")
    cmd_prep_gap(config, out, log);
  else
    throw Error(ErrorCode::InvalidArgument, "unknown command '" + config.command + "'");
}

} // namespace nest
