#ifndef MODELSEL_CONFIG_H_
#define MODELSEL_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "modelsel/experiments.h"

namespace modelsel {

// Command-line values that take precedence over the config file.
struct ExperimentOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> n_requests;
  std::optional<std::filesystem::path> out;
  std::optional<bool> dump_records;
  std::optional<std::vector<double>> sla_list_ms;
  std::optional<std::vector<double>> cv_list;
  std::optional<std::vector<PolicyKind>> policies;
  std::optional<std::filesystem::path> trace_path;
  std::optional<std::filesystem::path> models_path;
  std::optional<bool> duplication;
  std::optional<unsigned> threads;
};

// Starts from DefaultExperimentSpec(kind), applies the JSON config file (if
// any), then the overrides. Relative trace/model paths in the file resolve
// against the file's directory.
//
// Recognized keys: sla_ms, sla_list_ms, cv_list, n_requests, seed, policy,
// policies, duplication, network.{kind,mean_ms,std_ms,cv}, trace_path,
// models_path, on_device.{name,accuracy_pct,mean_ms,std_ms}, out,
// dump_records, threads. Unknown keys are rejected.
//
// Throws ValidationError for bad content and IoError for unreadable files.
ExperimentSpec BuildExperimentSpec(
    ExperimentKind kind, const std::optional<std::filesystem::path>& config_path,
    const ExperimentOverrides& overrides);

// Same, from config text already in memory.
ExperimentSpec BuildExperimentSpecFromText(ExperimentKind kind,
                                           std::string_view config_json,
                                           const std::filesystem::path& base_dir,
                                           const ExperimentOverrides& overrides);

// "30,40,50" or an inclusive range "30:300:10".
std::vector<double> ParseNumberList(std::string_view text);

// Comma-separated policy names.
std::vector<PolicyKind> ParsePolicyList(std::string_view text);

}  // namespace modelsel

#endif  // MODELSEL_CONFIG_H_
