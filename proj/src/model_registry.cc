#include "modelsel/model_registry.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>

#include "csv_util.h"
#include "modelsel/errors.h"

namespace modelsel {
namespace {

constexpr std::string_view kModelHeader =
    "name,accuracy_pct,exec_mean_ms,exec_std_ms";

double PercentToFraction(double pct) { return pct / 100.0; }

// Shortest decimal percentage whose PercentToFraction is exactly `fraction`.
std::string FractionToPercentText(double fraction) {
  double pct = fraction * 100.0;
  for (int step = 0; step < 8 && PercentToFraction(pct) != fraction; ++step) {
    pct = std::nextafter(pct, PercentToFraction(pct) < fraction ? 1e300 : -1e300);
  }
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), pct);
  return std::string(buf, res.ptr);
}

std::string ShortestText(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

bool PreferForSpeed(const ModelProfile& a, const ModelProfile& b) {
  if (a.exec_mean_ms != b.exec_mean_ms) return a.exec_mean_ms < b.exec_mean_ms;
  if (a.exec_std_ms != b.exec_std_ms) return a.exec_std_ms < b.exec_std_ms;
  return a.name < b.name;
}

}  // namespace

void ModelProfile::Validate() const {
  if (name.empty()) throw ValidationError("model name is empty");
  if (!(accuracy >= 0.0 && accuracy <= 1.0)) {
    throw ValidationError("model '" + name + "': accuracy must be in [0, 1]");
  }
  if (!(exec_mean_ms > 0.0) || !std::isfinite(exec_mean_ms)) {
    throw ValidationError("model '" + name + "': exec_mean_ms must be > 0");
  }
  if (!(exec_std_ms >= 0.0) || !std::isfinite(exec_std_ms)) {
    throw ValidationError("model '" + name + "': exec_std_ms must be >= 0");
  }
}

ModelSet::ModelSet(std::vector<ModelProfile> profiles)
    : profiles_(std::move(profiles)) {
  if (profiles_.empty()) throw ValidationError("model set is empty");
  std::set<std::string_view> seen;
  for (const auto& p : profiles_) {
    p.Validate();
    if (!seen.insert(p.name).second) {
      throw ValidationError("duplicate model name '" + p.name + "'");
    }
  }
}

const ModelProfile* ModelSet::Find(std::string_view name) const {
  auto it = std::find_if(profiles_.begin(), profiles_.end(),
                         [&](const ModelProfile& p) { return p.name == name; });
  return it == profiles_.end() ? nullptr : &*it;
}

std::optional<ModelSet> ModelSet::Without(std::string_view name) const {
  std::vector<ModelProfile> kept;
  for (const auto& p : profiles_) {
    if (p.name != name) kept.push_back(p);
  }
  if (kept.empty()) return std::nullopt;
  return ModelSet(std::move(kept));
}

ModelSet BuiltinMeasuredModels() {
  return ModelSet({
      {"SqueezeNet", PercentToFraction(49.0), 4.91, 0.06},
      {"MobileNetV1 0.25", PercentToFraction(49.7), 3.21, 0.08},
      {"MobileNetV1 0.5", PercentToFraction(63.2), 4.21, 0.06},
      {"DenseNet", PercentToFraction(64.2), 25.49, 0.14},
      {"MobileNetV1 0.75", PercentToFraction(68.3), 4.67, 0.07},
      {"MobileNetV1 1.0", PercentToFraction(71.0), 5.43, 0.11},
      {"NasNet Mobile", PercentToFraction(73.9), 21.18, 0.17},
      {"InceptionResNetV2", PercentToFraction(77.5), 50.85, 0.33},
      {"InceptionV3", PercentToFraction(77.9), 31.11, 0.19},
      {"InceptionV4", PercentToFraction(80.1), 59.21, 0.22},
      {"NasNet Large", PercentToFraction(82.6), 112.61, 0.36},
      {std::string(kFictionalModelName), PercentToFraction(50.0), 112.61, 0.36},
  });
}

ModelSet BuiltinCloudModels() {
  return *BuiltinMeasuredModels().Without(kFictionalModelName);
}

ModelSet ParseModels(std::istream& in, const std::string& source_name) {
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  std::vector<ModelProfile> profiles;
  std::set<std::string> names;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (csv::Trim(line).empty()) continue;

    if (!have_header) {
      if (csv::Trim(line) != kModelHeader) {
        throw ParseError(source_name, line_no,
                         "expected header '" + std::string(kModelHeader) + "'");
      }
      have_header = true;
      continue;
    }

    auto fields = csv::SplitLine(line);
    if (!fields) throw ParseError(source_name, line_no, "unterminated quote");
    if (fields->size() != 4) {
      throw ParseError(source_name, line_no,
                       "expected 4 fields, got " + std::to_string(fields->size()));
    }
    ModelProfile p;
    p.name = std::string(csv::Trim((*fields)[0]));
    auto acc = csv::ParseDouble((*fields)[1]);
    auto mean = csv::ParseDouble((*fields)[2]);
    auto stddev = csv::ParseDouble((*fields)[3]);
    if (!acc || !mean || !stddev) {
      throw ParseError(source_name, line_no, "non-numeric field");
    }
    p.accuracy = PercentToFraction(*acc);
    p.exec_mean_ms = *mean;
    p.exec_std_ms = *stddev;
    try {
      p.Validate();
    } catch (const ValidationError& e) {
      throw ParseError(source_name, line_no, e.what());
    }
    if (!names.insert(p.name).second) {
      throw ValidationError(source_name + ":" + std::to_string(line_no) +
                            ": duplicate model name '" + p.name + "'");
    }
    profiles.push_back(std::move(p));
  }
  if (!have_header) throw ValidationError(source_name + ": empty model file");
  if (profiles.empty()) throw ValidationError(source_name + ": no models");
  return ModelSet(std::move(profiles));
}

ModelSet LoadModels(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open model file " + path.string());
  return ParseModels(in, path.string());
}

void WriteModels(const ModelSet& set, std::ostream& out) {
  out << kModelHeader << '\n';
  for (const auto& p : set) {
    out << csv::Escape(p.name) << ',' << FractionToPercentText(p.accuracy)
        << ',' << ShortestText(p.exec_mean_ms) << ','
        << ShortestText(p.exec_std_ms) << '\n';
  }
}

const ModelProfile& Fastest(const ModelSet& set) {
  return *std::min_element(set.begin(), set.end(), PreferForSpeed);
}

bool PreferForAccuracy(const ModelProfile& a, const ModelProfile& b) {
  if (a.accuracy != b.accuracy) return a.accuracy > b.accuracy;
  if (a.exec_mean_ms != b.exec_mean_ms) return a.exec_mean_ms < b.exec_mean_ms;
  return a.name < b.name;
}

const ModelProfile& MostAccurate(const ModelSet& set) {
  return *std::min_element(set.begin(), set.end(), PreferForAccuracy);
}

}  // namespace modelsel
