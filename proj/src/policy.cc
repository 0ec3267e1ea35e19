#include "modelsel/policy.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include "modelsel/errors.h"

namespace modelsel {
namespace {

constexpr std::array<std::pair<PolicyKind, std::string_view>, 7> kPolicyNames{{
    {PolicyKind::kAdaptive, "adaptive"},
    {PolicyKind::kStaticGreedy, "static_greedy"},
    {PolicyKind::kPureRandom, "pure_random"},
    {PolicyKind::kRelatedRandom, "related_random"},
    {PolicyKind::kRelatedAccurate, "related_accurate"},
    {PolicyKind::kStaticLatency, "static_latency"},
    {PolicyKind::kStaticAccuracy, "static_accuracy"},
}};

const ModelProfile& UniformPick(const ModelSet& set, Rng& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, set.size() - 1);
  return set[pick(rng)];
}

}  // namespace

Budget ComputeBudget(double sla_ms, double t_input_ms) {
  if (!(sla_ms > 0.0)) throw ValidationError("sla_ms must be > 0");
  if (!(t_input_ms >= 0.0)) throw ValidationError("t_input_ms must be >= 0");
  const double estimate = 2.0 * t_input_ms;
  return Budget{sla_ms, estimate, sla_ms - estimate};
}

BaseChoice SelectBase(const ModelSet& set, const Budget& budget) {
  const ModelProfile* best = nullptr;
  for (const auto& m : set) {
    if (m.conservative_latency_ms() < budget.budget_ms &&
        (best == nullptr || PreferForAccuracy(m, *best))) {
      best = &m;
    }
  }
  if (best == nullptr) return {Fastest(set), false};
  return {*best, true};
}

ModelSet ExplorationSet(const ModelSet& set, const ModelProfile& base) {
  const double lo = base.exec_mean_ms - base.exec_std_ms;
  const double hi = base.exec_mean_ms + base.exec_std_ms;
  std::vector<ModelProfile> members;
  for (const auto& m : set) {
    if (m.exec_mean_ms >= lo && m.exec_mean_ms <= hi) {
      members.push_back(m);
    }
  }
  return ModelSet(std::move(members));
}

double Utility(const ModelProfile& m, const Budget& budget) {
  const double slack = budget.budget_ms - m.conservative_latency_ms();
  const double spread = std::max(std::abs(budget.budget_ms - m.exec_mean_ms),
                                 kUtilityDenominatorFloorMs);
  return m.accuracy * slack / spread;
}

std::map<std::string, double> SelectionProbabilities(const ModelSet& candidates,
                                                     const Budget& budget) {
  std::vector<double> raw;
  raw.reserve(candidates.size());
  for (const auto& m : candidates) raw.push_back(Utility(m, budget));

  double total = 0.0;
  for (double u : raw) total += std::max(u, 0.0);

  std::map<std::string, double> probs;
  if (total > 0.0) {
    for (std::size_t i = 0; i < raw.size(); ++i) {
      probs[candidates[i].name] = std::max(raw[i], 0.0) / total;
    }
    return probs;
  }
  const auto argmax = static_cast<std::size_t>(
      std::max_element(raw.begin(), raw.end()) - raw.begin());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    probs[candidates[i].name] = i == argmax ? 1.0 : 0.0;
  }
  return probs;
}

SelectionOutcome SelectAdaptive(const ModelSet& set, const Budget& budget,
                                Rng& rng) {
  BaseChoice base = SelectBase(set, budget);
  if (!base.feasible) {
    const ModelProfile& fastest = base.model;
    return SelectionOutcome{fastest, SelectionPath::kFallbackFastest, fastest,
                            ModelSet({fastest}), {{fastest.name, 1.0}}};
  }

  ModelSet explore = ExplorationSet(set, base.model);
  auto probs = SelectionProbabilities(explore, budget);

  // Walk the exploration set in its own order so draws do not depend on
  // map ordering of names.
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double u = unit(rng);
  double cumulative = 0.0;
  const ModelProfile* chosen = nullptr;
  for (const auto& m : explore) {
    const double p = probs.at(m.name);
    if (p <= 0.0) continue;
    cumulative += p;
    chosen = &m;
    if (u < cumulative) break;
  }
  ModelProfile picked = *chosen;
  return SelectionOutcome{std::move(picked), SelectionPath::kBaseFeasible,
                          std::move(base.model), std::move(explore),
                          std::move(probs)};
}

std::string_view PolicyName(PolicyKind kind) {
  for (const auto& [k, name] : kPolicyNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

std::optional<PolicyKind> ParsePolicyKind(std::string_view name) {
  for (const auto& [k, n] : kPolicyNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

ModelProfile SelectBaseline(PolicyKind kind, const ModelSet& set,
                            double sla_ms, const Budget& budget, Rng& rng) {
  switch (kind) {
    case PolicyKind::kStaticGreedy:
      return SelectBase(set, Budget{sla_ms, 0.0, sla_ms}).model;
    case PolicyKind::kPureRandom:
      return UniformPick(set, rng);
    case PolicyKind::kRelatedRandom:
      return UniformPick(ExplorationSet(set, SelectBase(set, budget).model), rng);
    case PolicyKind::kRelatedAccurate:
      return MostAccurate(ExplorationSet(set, SelectBase(set, budget).model));
    case PolicyKind::kStaticLatency:
      return Fastest(set);
    case PolicyKind::kStaticAccuracy:
      return MostAccurate(set);
    case PolicyKind::kAdaptive:
      break;
  }
  throw std::invalid_argument("SelectBaseline called with a non-baseline policy");
}

ModelProfile SelectModel(PolicyKind kind, const ModelSet& set, double sla_ms,
                         const Budget& budget, Rng& rng) {
  if (kind == PolicyKind::kAdaptive) {
    return SelectAdaptive(set, budget, rng).chosen;
  }
  return SelectBaseline(kind, set, sla_ms, budget, rng);
}

}  // namespace modelsel
