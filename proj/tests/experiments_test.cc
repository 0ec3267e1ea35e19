#include "modelsel/experiments.h"

#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "modelsel/config.h"
#include "modelsel/errors.h"
#include "oracles.h"

using namespace modelsel;

namespace {

ExperimentSpec Spec(ExperimentKind kind, std::uint64_t n = 4000) {
  ExperimentSpec spec = DefaultExperimentSpec(kind);
  std::filesystem::create_directories(oracle::TmpPath(""));
  spec.out = oracle::TmpPath("experiments_out.csv");
  spec.base.n_requests = n;
  spec.base.seed = 5;
  return spec;
}

const ResultRow& Find(const std::vector<ResultRow>& rows, double value,
                      PolicyKind policy, std::string_view experiment = {}) {
  for (const auto& r : rows) {
    if (r.sweep_value == value && r.policy == policy &&
        (experiment.empty() || r.experiment == experiment)) {
      return r;
    }
  }
  FAIL("row not found");
  throw 0;
}

std::filesystem::path ConstantTrace(const std::string& name, double t_input) {
  std::string text = "request_id,t_input_ms\n";
  for (int i = 0; i < 10; ++i) text += std::to_string(i) + "," + std::to_string(t_input) + "\n";
  return oracle::WriteFile(name, text);
}

ExperimentSpec ReplaySpec(const std::filesystem::path& trace) {
  ExperimentOverrides o;
  o.trace_path = trace;
  o.out = oracle::TmpPath("replay_out.csv");
  o.n_requests = 3000;
  return BuildExperimentSpec(ExperimentKind::kTraceReplay, std::nullopt, o);
}

void CheckRowInvariants(const std::vector<ResultRow>& rows) {
  for (const auto& r : rows) {
    double sum = 0.0;
    for (const auto& [name, share] : r.metrics.model_usage) sum += share;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(r.metrics.on_device_reliance >= 0.0);
    CHECK(r.metrics.on_device_reliance <= 1.0);
  }
}

}  // namespace

TEST_CASE("sla sweep: adaptive attainment at least greedy") {
  ExperimentSpec spec = Spec(ExperimentKind::kSlaSweep);
  auto rows = RunSlaSweep(spec);
  REQUIRE(rows.size() == 28 * 2);
  CheckRowInvariants(rows);
  for (double sla = 30; sla <= 300; sla += 10) {
    const auto& a = Find(rows, sla, PolicyKind::kAdaptive);
    const auto& g = Find(rows, sla, PolicyKind::kStaticGreedy);
    CHECK(a.metrics.sla_attainment >= g.metrics.sla_attainment);
  }
  // Rows are ordered by sweep value then policy list order.
  CHECK(rows[0].sweep_value == 30);
  CHECK(rows[0].policy == PolicyKind::kAdaptive);
  CHECK(rows[1].policy == PolicyKind::kStaticGreedy);
  CHECK(rows.back().sweep_value == 300);

  spec.sla_list_ms = {250};
  spec.policies = {PolicyKind::kAdaptive};
  CHECK(RunSlaSweep(spec).at(0).metrics.aggregate_accuracy >= 0.80);
}

TEST_CASE("sla sweep: tiny SLA leans on the fastest model") {
  ExperimentSpec spec = Spec(ExperimentKind::kSlaSweep, 10000);
  spec.sla_list_ms = {25};
  spec.policies = {PolicyKind::kAdaptive};
  auto rows = RunSlaSweep(spec);
  const auto& usage = rows.at(0).metrics.model_usage;
  std::string top;
  double best = 0.0;
  for (const auto& [name, share] : usage) {
    if (share > best) {
      best = share;
      top = name;
    }
  }
  CHECK(top == "MobileNetV1 0.25");
  CHECK(best > 0.9);
}

TEST_CASE("cv sweep") {
  ExperimentSpec spec = Spec(ExperimentKind::kCvSweep, 10000);
  auto rows = RunCvSweep(spec);
  REQUIRE(rows.size() == 10);
  CheckRowInvariants(rows);
  const double cvs[] = {0.0, 0.25, 0.5, 0.75, 1.0};
  CHECK(Find(rows, 0.0, PolicyKind::kAdaptive, "cv_sweep[sla_ms=100]")
            .metrics.sla_attainment <= 0.01);
  double prev = 0.0;
  for (double cv : cvs) {
    const double att =
        Find(rows, cv, PolicyKind::kAdaptive, "cv_sweep[sla_ms=100]").metrics.sla_attainment;
    CHECK(att >= prev - 0.02);
    prev = att;
    const double acc =
        Find(rows, cv, PolicyKind::kAdaptive, "cv_sweep[sla_ms=250]").metrics.aggregate_accuracy;
    CHECK(acc >= 0.77);
    CHECK(acc <= 0.83);
  }

  spec.cv_list = {0.5, 1.5};
  CHECK_THROWS_AS(RunCvSweep(spec), ValidationError);
  spec.cv_list = {-0.1};
  CHECK_THROWS_AS(RunCvSweep(spec), ValidationError);
}

TEST_CASE("policy compare: converged regime matches derived accuracies") {
  ExperimentSpec spec = Spec(ExperimentKind::kPolicyCompare, 10000);
  spec.sla_list_ms = {400};
  auto rows = RunPolicyCompare(spec);
  REQUIRE(rows.size() == 4);
  CheckRowInvariants(rows);
  const double pure = Find(rows, 400, PolicyKind::kPureRandom).metrics.aggregate_accuracy;
  const double related = Find(rows, 400, PolicyKind::kRelatedRandom).metrics.aggregate_accuracy;
  const double accurate = Find(rows, 400, PolicyKind::kRelatedAccurate).metrics.aggregate_accuracy;
  const double adaptive = Find(rows, 400, PolicyKind::kAdaptive).metrics.aggregate_accuracy;
  CHECK(pure == doctest::Approx(oracle::MeanAccuracy(oracle::MeasuredRows())).epsilon(0.015));
  CHECK(related == doctest::Approx(0.663).epsilon(0.015));
  CHECK(accurate == doctest::Approx(0.826).epsilon(0.006));
  CHECK(adaptive == doctest::Approx(0.703).epsilon(0.015));

  spec.base.models = BuiltinCloudModels();
  CHECK_THROWS_AS(RunPolicyCompare(spec), ValidationError);
}

TEST_CASE("policy compare: pure random is flat across SLAs") {
  ExperimentSpec spec = Spec(ExperimentKind::kPolicyCompare, 5000);
  spec.sla_list_ms = {50, 150, 300};
  spec.policies = {PolicyKind::kPureRandom};
  auto rows = RunPolicyCompare(spec);
  for (const auto& r : rows) {
    CHECK(r.metrics.aggregate_accuracy ==
          doctest::Approx(oracle::MeanAccuracy(oracle::MeasuredRows())).epsilon(0.02));
  }
}

TEST_CASE("trace replay") {
  {
    auto rows = RunTraceReplay(ReplaySpec(ConstantTrace("const25.csv", 25)));
    REQUIRE(rows.size() == 4);
    CheckRowInvariants(rows);
    const auto& a = Find(rows, 250, PolicyKind::kAdaptive);
    CHECK(a.metrics.on_device_reliance == 0.0);
    CHECK(a.metrics.aggregate_accuracy == doctest::Approx(0.826).epsilon(1e-9));
    CHECK(a.experiment == "trace_replay");
  }
  {
    auto rows = RunTraceReplay(ReplaySpec(ConstantTrace("const200.csv", 200)));
    for (const auto& r : rows) {
      CHECK(r.metrics.on_device_reliance == 1.0);
      CHECK(r.metrics.aggregate_accuracy == doctest::Approx(0.414).epsilon(1e-9));
    }
  }
  {
    const auto synthetic = SynthesizeTrace(120, 0.9, 5000, 11);
    auto path = oracle::TmpPath("residential.csv");
    {
      std::ofstream out(path);
      WriteTrace(synthetic, out);
    }
    ExperimentSpec spec = ReplaySpec(path);
    spec.base.n_requests = 5000;
    auto rows = RunTraceReplay(spec);
    const auto& adaptive = Find(rows, 250, PolicyKind::kAdaptive).metrics;
    const auto& accurate = Find(rows, 250, PolicyKind::kStaticAccuracy).metrics;
    const auto& fast = Find(rows, 250, PolicyKind::kStaticLatency).metrics;
    CHECK(accurate.on_device_reliance > adaptive.on_device_reliance);
    CHECK(adaptive.aggregate_accuracy > fast.aggregate_accuracy + 0.25);
    CHECK(adaptive.aggregate_accuracy >= accurate.aggregate_accuracy);
  }
}

TEST_CASE("trace replay validation") {
  ExperimentSpec spec = Spec(ExperimentKind::kTraceReplay);
  CHECK_THROWS_AS(RunTraceReplay(spec), ValidationError);  // no trace

  spec = ReplaySpec(ConstantTrace("const25.csv", 25));
  spec.base.duplication = false;
  CHECK_THROWS_AS(RunTraceReplay(spec), ValidationError);

  ExperimentOverrides o;
  o.trace_path = oracle::TmpPath("does_not_exist.csv");
  o.out = oracle::TmpPath("x.csv");
  CHECK_THROWS_AS(BuildExperimentSpec(ExperimentKind::kTraceReplay, std::nullopt, o),
                  IoError);
}

TEST_CASE("fail-fast validation") {
  ExperimentSpec spec = Spec(ExperimentKind::kSlaSweep);
  spec.sla_list_ms = {};
  CHECK_THROWS_AS(spec.Validate(), ValidationError);
  spec.sla_list_ms = {100, 90};
  CHECK_THROWS_AS(spec.Validate(), ValidationError);
  spec.sla_list_ms = {100, 100};
  CHECK_THROWS_AS(spec.Validate(), ValidationError);
  spec.sla_list_ms = {0, 100};
  CHECK_THROWS_AS(spec.Validate(), ValidationError);
  spec.sla_list_ms = {100};
  spec.policies = {};
  CHECK_THROWS_AS(spec.Validate(), ValidationError);
  spec.policies = {PolicyKind::kAdaptive, PolicyKind::kAdaptive};
  CHECK_THROWS_AS(spec.Validate(), ValidationError);
  spec.policies = {PolicyKind::kAdaptive};
  spec.out = oracle::TmpPath("missing_dir/out.csv");
  CHECK_THROWS_AS(spec.Validate(), ValidationError);
  spec.out = oracle::TmpPath("");
  CHECK_THROWS_AS(spec.Validate(), ValidationError);
  spec.out = oracle::TmpPath("ok.csv");
  spec.base.n_requests = 0;
  CHECK_THROWS_AS(spec.Validate(), ValidationError);
  spec.base.n_requests = 10;
  CHECK_NOTHROW(spec.Validate());

  ExperimentSpec cv = Spec(ExperimentKind::kCvSweep);
  cv.base.network = ParseTrace(*std::make_unique<std::istringstream>(
                                   "request_id,t_input_ms\n0,10\n"),
                               "t.csv");
  CHECK_THROWS_AS(cv.Validate(), ValidationError);
}

TEST_CASE("emit_csv") {
  ExperimentSpec spec = Spec(ExperimentKind::kSlaSweep, 500);
  spec.sla_list_ms = {100};
  auto rows = RunSlaSweep(spec);
  REQUIRE(rows.size() == 2);

  auto path = oracle::TmpPath("emit.csv");
  EmitCsv(rows, path);
  const std::string first = oracle::ReadFile(path);
  std::istringstream lines(first);
  std::vector<std::string> all;
  for (std::string line; std::getline(lines, line);) all.push_back(line);
  REQUIRE(all.size() == 3);
  CHECK(all[0] == kResultsHeader);
  CHECK(all[1].rfind("sla_sweep,100,adaptive,500,5,", 0) == 0);

  EmitCsv(RunSlaSweep(spec), path);
  CHECK(oracle::ReadFile(path) == first);

  CHECK_THROWS_AS(EmitCsv({}, path), ValidationError);
  CHECK_THROWS_AS(EmitCsv(rows, oracle::TmpPath("no/such/dir/x.csv")), IoError);

  // Usage column parses back to fractions summing to one.
  const std::string usage_field = all[1].substr(all[1].find(",\"{") + 2);
  std::string json_text = usage_field.substr(0, usage_field.size() - 1);
  std::string unescaped;
  for (std::size_t i = 0; i < json_text.size(); ++i) {
    unescaped += json_text[i];
    if (json_text[i] == '"' && i + 1 < json_text.size() && json_text[i + 1] == '"') ++i;
  }
  auto usage = nlohmann::json::parse(unescaped);
  double sum = 0.0;
  for (const auto& [k, v] : usage.items()) sum += v.get<double>();
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("records dump") {
  ExperimentSpec spec = Spec(ExperimentKind::kSlaSweep, 50);
  spec.sla_list_ms = {100, 200};
  spec.dump_records = true;
  auto rows = RunSlaSweep(spec);
  for (const auto& r : rows) CHECK(r.records.size() == 50);
  std::ostringstream out;
  WriteRecordsCsv(rows, out);
  std::istringstream in(out.str());
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) ++n;
  CHECK(n == 1 + 4 * 50);
  CHECK(RecordsPathFor("dir/results.csv") == std::filesystem::path("dir/results.records.csv"));
}

TEST_CASE("thread count does not change output") {
  ExperimentSpec spec = Spec(ExperimentKind::kPolicyCompare, 300);
  spec.sla_list_ms = {50, 100, 150, 200};
  spec.threads = 1;
  std::ostringstream a, b;
  WriteResultsCsv(RunPolicyCompare(spec), a);
  spec.threads = 4;
  WriteResultsCsv(RunPolicyCompare(spec), b);
  CHECK(a.str() == b.str());
}

TEST_CASE("config file and overrides") {
  const auto dir = oracle::TmpPath("cfg");
  std::filesystem::create_directories(dir);
  oracle::WriteFile("cfg/trace.csv", "request_id,t_input_ms\n0,30\n1,40\n");
  const std::string text = R"({
    "sla_list_ms": [100, 200],
    "n_requests": 1234,
    "seed": 99,
    "policies": ["adaptive", "static_accuracy"],
    "duplication": true,
    "trace_path": "trace.csv",
    "on_device": {"name": "tiny", "accuracy_pct": 40, "mean_ms": 30, "std_ms": 0},
    "out": "res.csv"
  })";
  ExperimentSpec spec =
      BuildExperimentSpecFromText(ExperimentKind::kTraceReplay, text, dir, {});
  CHECK(spec.sla_list_ms == std::vector<double>{100, 200});
  CHECK(spec.base.n_requests == 1234);
  CHECK(spec.base.seed == 99);
  CHECK(spec.policies == std::vector<PolicyKind>{PolicyKind::kAdaptive,
                                                  PolicyKind::kStaticAccuracy});
  CHECK(spec.base.network.kind() == NetworkModel::Kind::kTrace);
  CHECK(spec.base.network.trace().size() == 2);
  CHECK(spec.base.on_device.accuracy == doctest::Approx(0.40));
  CHECK(spec.base.on_device.exec_mean_ms == 30);

  ExperimentOverrides o;
  o.seed = 3;
  o.n_requests = 10;
  o.sla_list_ms = std::vector<double>{250};
  ExperimentSpec over =
      BuildExperimentSpecFromText(ExperimentKind::kTraceReplay, text, dir, o);
  CHECK(over.base.seed == 3);
  CHECK(over.base.n_requests == 10);
  CHECK(over.sla_list_ms == std::vector<double>{250});

  ExperimentSpec single = BuildExperimentSpecFromText(
      ExperimentKind::kSlaSweep,
      R"({"sla_ms": 180, "policy": "static_greedy", "network": {"kind": "gaussian", "mean_ms": 80, "std_ms": 10}})",
      dir, {});
  CHECK(single.sla_list_ms == std::vector<double>{180});
  CHECK(single.policies == std::vector<PolicyKind>{PolicyKind::kStaticGreedy});
  CHECK(single.base.network.mean_ms() == 80);
  CHECK(single.base.network.std_ms() == 10);

  auto bad = [&](const std::string& json) {
    CHECK_THROWS_AS(
        BuildExperimentSpecFromText(ExperimentKind::kSlaSweep, json, dir, {}),
        ValidationError);
  };
  bad(R"({"bogus": 1})");
  bad(R"({"sla_ms": "fast"})");
  bad(R"({"policies": ["nope"]})");
  bad(R"({"network": {"kind": "trace"}})");
  bad(R"({"network": {"kind": "gaussian", "mean_ms": -1}})");
  bad(R"({"n_requests": -5})");
  bad("{not json");
  bad(R"({"sla_ms": 100, "sla_list_ms": [100]})");
}

TEST_CASE("number and policy lists") {
  CHECK(ParseNumberList("30,40,50") == std::vector<double>{30, 40, 50});
  CHECK(ParseNumberList("30:60:10") == std::vector<double>{30, 40, 50, 60});
  CHECK(ParseNumberList("0:1:0.25") == std::vector<double>{0, 0.25, 0.5, 0.75, 1});
  CHECK(ParseNumberList("7") == std::vector<double>{7});
  CHECK_THROWS_AS(ParseNumberList(""), ValidationError);
  CHECK_THROWS_AS(ParseNumberList("a,b"), ValidationError);
  CHECK_THROWS_AS(ParseNumberList("10:5:1"), ValidationError);
  CHECK_THROWS_AS(ParseNumberList("1:5:0"), ValidationError);
  CHECK(ParsePolicyList("adaptive,pure_random") ==
        std::vector<PolicyKind>{PolicyKind::kAdaptive, PolicyKind::kPureRandom});
  CHECK_THROWS_AS(ParsePolicyList("adaptive,,x"), ValidationError);
}
