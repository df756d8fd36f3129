#include "nest/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

namespace nest {

std::string
MethodRequest::label() const
{
  switch (kind) {
    case MethodKind::Naive: return "Naive";
    case MethodKind::Oracle: return "Oracle";
    case MethodKind::Nest: return "NEST";
    case MethodKind::Tf: return "TF";
    case MethodKind::Scaled: return "Scaled";
    case MethodKind::KGroups: return std::to_string(k) + "-Groups";
  }
  return "?";
}

MethodRequest
parse_method(const std::string& name)
{
  std::string s(name);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  MethodRequest r;
  if (s == "naive")
    r.kind = MethodKind::Naive;
  else if (s == "oracle")
    r.kind = MethodKind::Oracle;
  else if (s == "nest")
    r.kind = MethodKind::Nest;
  else if (s == "tf")
    r.kind = MethodKind::Tf;
  else if (s == "scaled")
    r.kind = MethodKind::Scaled;
  else if (auto dash = s.find("-groups"); dash != std::string::npos && dash > 0 &&
                                          dash + 7 == s.size()) {
    r.kind = MethodKind::KGroups;
    try {
      r.k = std::stoi(s.substr(0, dash));
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidArgument, "bad group count in method '" + name + "'");
    }
    if (r.k < 1)
      throw Error(ErrorCode::BadGroupCount, "bad group count in method '" + name + "'");
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown method '" + name + "'");
  }
  return r;
}

double
rms_sigma(const HeteroSample& sample)
{
  return std::sqrt(sample.sigma().squaredNorm() / static_cast<double>(sample.size()));
}

namespace {

std::vector<double>
scaled_values(const std::vector<double>& multipliers, double scale)
{
  std::vector<double> out;
  out.reserve(multipliers.size());
  for (double m : multipliers)
    out.push_back(m * scale);
  return out;
}

int
fold_count(int K, Index n)
{
  return static_cast<int>(std::min<Index>(K, n));
}

} // namespace

FittedMethod
fit_method(const MethodRequest& request,
           const HeteroSample& sample,
           const TuningConfig& config,
           std::uint64_t seed,
           const std::optional<PriorSpec>& prior)
{
  FittedMethod out;
  out.label = request.label();
  out.spec.stabilize_sign = request.stabilize_sign;
  if (request.truncate)
    out.spec.truncation_bound = default_truncation_bound(sample.size(), config.truncation_K);

  const Index n = sample.size();
  const bool can_tune = n >= 2;

  switch (request.kind) {
    case MethodKind::Naive:
      out.spec.method = method::Naive{};
      break;
    case MethodKind::Oracle:
      if (!prior)
        throw Error(ErrorCode::InvalidArgument, "the oracle rule needs a known prior");
      out.spec.method = method::Oracle{ *prior };
      break;
    case MethodKind::Nest: {
      if (!can_tune)
        throw Error(ErrorCode::BadFoldCount, "SURE tuning needs at least two observations");
      SureGrid grid;
      grid.h_x_values = config.h_x;
      grid.h_sigma_values = scaled_values(config.h_sigma_multipliers, sigma_scale(sample));
      grid.K = fold_count(config.K, n);
      grid.seed = seed;
      SureReport report = tune(sample, grid, config.threads);
      out.sure_min = report.per_point.sum();
      out.spec.method = method::Nest{ report.argmin, false };
      out.nest_report = std::move(report);
      break;
    }
    case MethodKind::Tf:
    case MethodKind::Scaled: {
      if (!can_tune)
        throw Error(ErrorCode::BadFoldCount, "SURE tuning needs at least two observations");
      const bool tf = request.kind == MethodKind::Tf;
      const auto h_values =
        tf ? scaled_values(config.tf_multipliers, rms_sigma(sample)) : config.scaled_h;
      const auto folds = kfold_split(n, fold_count(config.K, n), seed);
      const auto report = tune_pooled(sample, tf ? PooledRule::Tf : PooledRule::Scaled,
                                      h_values, folds, config.threads);
      out.sure_min = report.per_point.sum();
      if (tf)
        out.spec.method = method::Tf{ report.argmin };
      else
        out.spec.method = method::Scaled{ report.argmin };
      break;
    }
    case MethodKind::KGroups: {
      const KGroupsFit groups = k_groups_fit(sample, request.k);
      method::KGroups m{ request.k, {} };
      double total = 0.0;
      for (std::size_t g = 0; g < groups.members.size(); ++g) {
        const auto& idx = groups.members[g];
        const HeteroSample part = sample.subset(idx);
        if (part.size() < 2)
          throw Error(ErrorCode::BadGroupCount,
                      "group " + std::to_string(g) + " is too small to tune");
        const auto folds =
          kfold_split(part.size(), fold_count(config.K, part.size()), derive_seed(seed, g));
        const auto report = tune_pooled(part, PooledRule::Tf,
                                        scaled_values(config.tf_multipliers, rms_sigma(part)),
                                        folds, config.threads);
        total += report.per_point.sum();
        m.h_per_group.push_back(report.argmin);
      }
      out.sure_min = total;
      out.spec.method = std::move(m);
      break;
    }
  }

  out.mu_hat = estimate(out.spec, sample);
  return out;
}

} // namespace nest
