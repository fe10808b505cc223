#pragma once

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <vector>

#include "prl/errors.hpp"

namespace prl::cli {

using nlohmann::json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitPrecision = 3;

// Schema violation located by a JSON pointer into the task file.
class SchemaError : public InputError {
 public:
  SchemaError(std::string pointer, const std::string& what)
      : InputError(what), pointer_(std::move(pointer)) {}
  const std::string& pointer() const { return pointer_; }

 private:
  std::string pointer_;
};

struct Options {
  bool json = false;
  bool dot = false;
  bool timing = false;
  std::optional<unsigned long long> seed;
  // --precision p=..,M=..,D=..
  std::optional<std::string> precision;
  // PRL_MAX_TRUNC
  std::optional<int> max_trunc;
};

struct Outcome {
  int exit_code = kExitOk;
  json report;
  std::string dot;  // set when the command renders a graph
};

// Evaluates one task; never throws.
Outcome run_task(const json& task, const Options& opts);

// Text written to stdout for an outcome under the given flags.
std::string render(const Outcome& out, const Options& opts);

std::vector<std::string> command_names();

}  // namespace prl::cli
