#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace nest {

//! Per-school pass counts for the advantaged (A) and disadvantaged (D)
//! groups.
struct GapRecord
{
  std::string id;
  long long pass_a = 0;
  long long n_a = 0;
  long long pass_d = 0;
  long long n_d = 0;
  std::size_t line = 0;
};

//! Gap x = 100 (p_A - p_D) and its standard error
//! s = 100 sqrt(p_A (1 - p_A) / n_A + p_D (1 - p_D) / n_D), in percentage
//! points.
struct GapRow
{
  std::string id;
  double x = 0.0;
  double s = 0.0;
};

struct GapFiltered
{
  std::string id;
  std::size_t line = 0;
  //! "min-testers", "min-pass" or "min-fail".
  std::string reason;
};

struct GapRules
{
  long long min_testers = 30;
  long long min_pass = 5;
  long long min_fail = 5;
};

struct GapResult
{
  std::vector<GapRow> kept;
  std::vector<GapFiltered> filtered;
};

//! Throws NonsensicalCounts for negative counts or passes exceeding testers.
GapResult prepare_gap(std::span<const GapRecord> records, const GapRules& rules = {});

} // namespace nest
