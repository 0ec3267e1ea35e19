#ifndef MODELSEL_POLICY_H_
#define MODELSEL_POLICY_H_

#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "modelsel/model_registry.h"
#include "modelsel/random.h"

namespace modelsel {

// Time left for remote execution once the estimated network round trip is
// subtracted from the SLA. budget_ms may be zero or negative.
struct Budget {
  double sla_ms = 0.0;
  double nw_estimate_ms = 0.0;
  double budget_ms = 0.0;
};

// nw_estimate = 2 * t_input. Throws ValidationError if sla_ms <= 0 or
// t_input_ms < 0.
Budget ComputeBudget(double sla_ms, double t_input_ms);

// Stage one result.
struct BaseChoice {
  ModelProfile model;
  bool feasible = false;
};

// Most accurate model with mean + std strictly below the budget; the
// fastest model (feasible = false) when none qualifies.
BaseChoice SelectBase(const ModelSet& set, const Budget& budget);

// Models whose mean lies in the closed window base.mean +/- base.std.
// `base` must be a member of `set`.
ModelSet ExplorationSet(const ModelSet& set, const ModelProfile& base);

// Accuracy-weighted normalized slack:
//   A(m) * (budget - (mean + std)) / max(|budget - mean|, 1e-9)
// Negative when mean + std exceeds the budget.
double Utility(const ModelProfile& m, const Budget& budget);

inline constexpr double kUtilityDenominatorFloorMs = 1e-9;

// Utilities clamped at zero, then normalized. If every clamped utility is
// zero, all mass goes to the highest raw utility (first in set order on
// ties).
std::map<std::string, double> SelectionProbabilities(const ModelSet& candidates,
                                                     const Budget& budget);

enum class SelectionPath { kBaseFeasible, kFallbackFastest };

struct SelectionOutcome {
  ModelProfile chosen;
  SelectionPath path = SelectionPath::kBaseFeasible;
  ModelProfile base;
  ModelSet exploration_set;
  std::map<std::string, double> probabilities;
};

// Three-stage selection: base model, exploration set around it, then a
// utility-weighted draw.
SelectionOutcome SelectAdaptive(const ModelSet& set, const Budget& budget,
                                Rng& rng);

enum class PolicyKind {
  kAdaptive,
  kStaticGreedy,
  kPureRandom,
  kRelatedRandom,
  kRelatedAccurate,
  kStaticLatency,
  kStaticAccuracy,
};

std::string_view PolicyName(PolicyKind kind);
std::optional<PolicyKind> ParsePolicyKind(std::string_view name);

// Baseline policies. `kind` must not be kAdaptive (throws
// std::invalid_argument). StaticGreedy compares mean + std against the full
// SLA, ignoring the network.
ModelProfile SelectBaseline(PolicyKind kind, const ModelSet& set,
                            double sla_ms, const Budget& budget, Rng& rng);

// Dispatches to SelectAdaptive or SelectBaseline.
ModelProfile SelectModel(PolicyKind kind, const ModelSet& set, double sla_ms,
                         const Budget& budget, Rng& rng);

}  // namespace modelsel

#endif  // MODELSEL_POLICY_H_
