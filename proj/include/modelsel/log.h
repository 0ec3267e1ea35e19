#ifndef MODELSEL_LOG_H_
#define MODELSEL_LOG_H_

#include <functional>
#include <string_view>

namespace modelsel {

using WarningSink = std::function<void(std::string_view)>;

// Routes warnings (trace wrap-around, out-of-range CV, ...) to `sink`.
// An empty sink restores the default, which prints to stderr.
// Returns the previously installed sink.
WarningSink SetWarningSink(WarningSink sink);

// Thread-safe.
void Warn(std::string_view message);

}  // namespace modelsel

#endif  // MODELSEL_LOG_H_
