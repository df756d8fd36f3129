#include "nest/gap.hpp"
#include "nest/error.hpp"

#include <cmath>

namespace nest {

GapResult
prepare_gap(std::span<const GapRecord> records, const GapRules& rules)
{
  GapResult out;
  for (const auto& r : records) {
    if (r.pass_a < 0 || r.pass_d < 0 || r.n_a < 0 || r.n_d < 0 || r.pass_a > r.n_a ||
        r.pass_d > r.n_d)
      throw Error(ErrorCode::NonsensicalCounts,
                  "line " + std::to_string(r.line) + " (id " + r.id +
                    "): pass counts must lie in [0, testers]",
                  r.line);

    if (r.n_a < rules.min_testers || r.n_d < rules.min_testers) {
      out.filtered.push_back({ r.id, r.line, "min-testers" });
      continue;
    }
    if (r.pass_a < rules.min_pass || r.pass_d < rules.min_pass) {
      out.filtered.push_back({ r.id, r.line, "min-pass" });
      continue;
    }
    if (r.n_a - r.pass_a < rules.min_fail || r.n_d - r.pass_d < rules.min_fail) {
      out.filtered.push_back({ r.id, r.line, "min-fail" });
      continue;
    }

    const double pa = static_cast<double>(r.pass_a) / static_cast<double>(r.n_a);
    const double pd = static_cast<double>(r.pass_d) / static_cast<double>(r.n_d);
    const double var = pa * (1.0 - pa) / static_cast<double>(r.n_a) +
                       pd * (1.0 - pd) / static_cast<double>(r.n_d);
    out.kept.push_back({ r.id, 100.0 * (pa - pd), 100.0 * std::sqrt(var) });
  }
  return out;
}

} // namespace nest
