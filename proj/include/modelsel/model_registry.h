#ifndef MODELSEL_MODEL_REGISTRY_H_
#define MODELSEL_MODEL_REGISTRY_H_

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace modelsel {

// One functionally-equivalent model: top-1 accuracy as a fraction and the
// server-side execution latency distribution in milliseconds.
struct ModelProfile {
  std::string name;
  double accuracy = 0.0;
  double exec_mean_ms = 0.0;
  double exec_std_ms = 0.0;

  // mean + one standard deviation; the quantity stage one compares
  // against the budget.
  double conservative_latency_ms() const { return exec_mean_ms + exec_std_ms; }

  // Throws ValidationError when any field is out of range.
  void Validate() const;

  friend bool operator==(const ModelProfile&, const ModelProfile&) = default;
};

// Non-empty, name-unique, immutable ordered set of profiles.
class ModelSet {
 public:
  // Throws ValidationError on an empty list, an invalid profile or a
  // duplicated name.
  explicit ModelSet(std::vector<ModelProfile> profiles);

  const std::vector<ModelProfile>& profiles() const { return profiles_; }
  std::size_t size() const { return profiles_.size(); }
  auto begin() const { return profiles_.begin(); }
  auto end() const { return profiles_.end(); }
  const ModelProfile& operator[](std::size_t i) const { return profiles_[i]; }

  const ModelProfile* Find(std::string_view name) const;
  bool Contains(std::string_view name) const { return Find(name) != nullptr; }

  // Copy without the named model; nullopt if that would leave it empty.
  std::optional<ModelSet> Without(std::string_view name) const;

  friend bool operator==(const ModelSet&, const ModelSet&) = default;

 private:
  std::vector<ModelProfile> profiles_;
};

inline constexpr std::string_view kFictionalModelName = "NasNet Fictional";

// The twelve measured profiles, including the low-accuracy copy of
// NasNet Large used by the decomposition study.
ModelSet BuiltinMeasuredModels();

// BuiltinMeasuredModels() minus the fictional row.
ModelSet BuiltinCloudModels();

// CSV with header `name,accuracy_pct,exec_mean_ms,exec_std_ms`.
// Throws IoError, ParseError (with line number) or ValidationError.
ModelSet LoadModels(const std::filesystem::path& path);
ModelSet ParseModels(std::istream& in, const std::string& source_name = "<models>");

// Writes the same CSV format LoadModels reads. Round-trips exactly for any
// accuracy that is itself some percentage / 100 (every loaded or builtin
// profile).
void WriteModels(const ModelSet& set, std::ostream& out);

// Minimum mean; ties by smaller std, then name.
const ModelProfile& Fastest(const ModelSet& set);

// Maximum accuracy; ties by smaller mean, then name.
const ModelProfile& MostAccurate(const ModelSet& set);

// Strict weak order "a is preferred over b" used by MostAccurate and by
// stage-one base selection.
bool PreferForAccuracy(const ModelProfile& a, const ModelProfile& b);

}  // namespace modelsel

#endif  // MODELSEL_MODEL_REGISTRY_H_
