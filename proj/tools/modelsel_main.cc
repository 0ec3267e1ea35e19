// modelsel: run SLA-aware model-selection experiments and write CSV results.
//
//   modelsel sweep-sla        [--config f.json] [--seed S] [--n N] [--out results.csv]
//   modelsel sweep-cv         ...
//   modelsel compare-policies ...
//   modelsel replay-trace     --trace trace.csv ...
//   modelsel models validate  models.csv
//
// Exit codes: 0 success, 2 config/validation error, 3 I/O error.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "modelsel/config.h"
#include "modelsel/errors.h"
#include "modelsel/experiments.h"
#include "modelsel/model_registry.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;

struct ExperimentFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> n;
  std::string out;
  bool dump_records = false;
  std::string sla_list;
  std::string cv_list;
  std::string policies;
  std::string trace;
  std::string models;
  std::optional<bool> duplication;
  std::optional<unsigned> threads;
};

CLI::App* AddExperimentCommand(CLI::App& app, const std::string& name,
                               const std::string& description,
                               ExperimentFlags& flags) {
  CLI::App* cmd = app.add_subcommand(name, description);
  cmd->add_option("--config", flags.config, "JSON experiment config");
  cmd->add_option("--seed", flags.seed, "Base random seed");
  cmd->add_option("--n", flags.n, "Requests per sweep point");
  cmd->add_option("--out", flags.out, "Results CSV path");
  cmd->add_flag("--dump-records", flags.dump_records,
                "Also write per-request records to <out>.records.csv");
  cmd->add_option("--sla-list", flags.sla_list,
                  "SLA targets in ms: a,b,c or start:stop:step");
  cmd->add_option("--policies", flags.policies, "Comma-separated policy names");
  cmd->add_option("--trace", flags.trace, "Network trace CSV");
  cmd->add_option("--models", flags.models, "Model profile CSV");
  cmd->add_option("--duplication", flags.duplication,
                  "Enable on-device request duplication (true/false)");
  cmd->add_option("--threads", flags.threads, "Worker threads (0 = all cores)");
  return cmd;
}

modelsel::ExperimentOverrides ToOverrides(const ExperimentFlags& f) {
  modelsel::ExperimentOverrides o;
  o.seed = f.seed;
  o.n_requests = f.n;
  if (!f.out.empty()) o.out = f.out;
  if (f.dump_records) o.dump_records = true;
  if (!f.sla_list.empty()) o.sla_list_ms = modelsel::ParseNumberList(f.sla_list);
  if (!f.cv_list.empty()) o.cv_list = modelsel::ParseNumberList(f.cv_list);
  if (!f.policies.empty()) o.policies = modelsel::ParsePolicyList(f.policies);
  if (!f.trace.empty()) o.trace_path = f.trace;
  if (!f.models.empty()) o.models_path = f.models;
  o.duplication = f.duplication;
  o.threads = f.threads;
  return o;
}

void PrintSummary(const std::vector<modelsel::ResultRow>& rows) {
  std::printf("%-24s %10s %-17s %9s %9s %9s %11s\n", "experiment", "sweep",
              "policy", "accuracy", "sla_att", "on_dev", "mean_ms");
  for (const auto& r : rows) {
    std::printf("%-24s %10g %-17s %9.4f %9.4f %9.4f %11.2f\n",
                r.experiment.c_str(), r.sweep_value,
                std::string(modelsel::PolicyName(r.policy)).c_str(),
                r.metrics.aggregate_accuracy, r.metrics.sla_attainment,
                r.metrics.on_device_reliance, r.metrics.mean_latency_ms);
  }
}

int RunExperimentCommand(modelsel::ExperimentKind kind, const ExperimentFlags& flags) {
  std::optional<std::filesystem::path> config;
  if (!flags.config.empty()) config = flags.config;
  modelsel::ExperimentSpec spec =
      modelsel::BuildExperimentSpec(kind, config, ToOverrides(flags));
  auto rows = modelsel::RunExperiment(spec);
  modelsel::EmitCsv(rows, spec.out);
  if (spec.dump_records) {
    modelsel::EmitRecordsCsv(rows, modelsel::RecordsPathFor(spec.out));
  }
  PrintSummary(rows);
  std::cout << "wrote " << rows.size() << " rows to " << spec.out.string() << '\n';
  return kExitOk;
}

int ValidateModels(const std::string& path) {
  modelsel::ModelSet set = modelsel::LoadModels(path);
  std::printf("%-24s %9s %10s %9s\n", "name", "accuracy", "mean_ms", "std_ms");
  for (const auto& p : set) {
    std::printf("%-24s %9.3f %10.2f %9.2f\n", p.name.c_str(), p.accuracy,
                p.exec_mean_ms, p.exec_std_ms);
  }
  std::cout << "ok: " << set.size() << " models; fastest "
            << modelsel::Fastest(set).name << ", most accurate "
            << modelsel::MostAccurate(set).name << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SLA-aware model selection simulator"};
  app.require_subcommand(1);

  ExperimentFlags sla_flags, cv_flags, compare_flags, trace_flags;
  CLI::App* sweep_sla = AddExperimentCommand(
      app, "sweep-sla", "Sweep SLA targets on a Gaussian network", sla_flags);
  CLI::App* sweep_cv = AddExperimentCommand(
      app, "sweep-cv", "Sweep network coefficient of variation", cv_flags);
  sweep_cv->add_option("--cv-list", cv_flags.cv_list,
                       "CV values: a,b,c or start:stop:step");
  CLI::App* compare = AddExperimentCommand(
      app, "compare-policies", "Decompose the selection stages against baselines",
      compare_flags);
  CLI::App* replay = AddExperimentCommand(
      app, "replay-trace", "Trace-driven duplication study", trace_flags);

  CLI::App* models = app.add_subcommand("models", "Model profile utilities");
  models->require_subcommand(1);
  std::string models_path;
  CLI::App* validate = models->add_subcommand("validate", "Validate a model CSV");
  validate->add_option("path", models_path, "Model CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (*sweep_sla) return RunExperimentCommand(modelsel::ExperimentKind::kSlaSweep, sla_flags);
    if (*sweep_cv) return RunExperimentCommand(modelsel::ExperimentKind::kCvSweep, cv_flags);
    if (*compare) {
      return RunExperimentCommand(modelsel::ExperimentKind::kPolicyCompare, compare_flags);
    }
    if (*replay) {
      return RunExperimentCommand(modelsel::ExperimentKind::kTraceReplay, trace_flags);
    }
    if (*validate) return ValidateModels(models_path);
  } catch (const modelsel::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const modelsel::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitValidation;
}
