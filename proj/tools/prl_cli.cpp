#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>

#include "prl/cli.hpp"

using namespace prl::cli;

namespace {

int emit(const Outcome& out, const Options& opts) {
  std::string text = render(out, opts);
  (out.exit_code == kExitOk || opts.json ? std::cout : std::cerr) << text;
  return out.exit_code;
}

Outcome input_failure(const std::string& pointer, const std::string& what) {
  Outcome out;
  out.exit_code = kExitInput;
  out.report = {{"error", {{"type", "SchemaError"}, {"message", what}, {"pointer", pointer}}}};
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"p-adic log-rigidity toolkit"};
  std::vector<std::string> words;
  std::string task_file;
  Options opts;
  unsigned long long seed = 0;
  std::string precision;
  app.add_option("command", words, "command group and operation, e.g. `descent check`");
  app.add_option("--task", task_file, "JSON task file, or - for stdin")->required();
  app.add_flag("--json", opts.json, "machine-readable report");
  app.add_flag("--dot", opts.dot, "print the graph as DOT");
  auto* seed_opt = app.add_option("--seed", seed, "seed for sampling commands");
  auto* prec_opt = app.add_option("--precision", precision, "overrides, e.g. p=5,M=8,D=6");
  app.add_flag("--timing", opts.timing, "add wall time to the report");
  app.footer("commands:\n  " + [] {
    std::string s;
    for (const auto& c : command_names()) s += c + "\n  ";
    return s;
  }());
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }
  if (*seed_opt) opts.seed = seed;
  if (*prec_opt) opts.precision = precision;
  if (const char* cap = std::getenv("PRL_MAX_TRUNC")) {
    try {
      int v = std::stoi(cap);
      if (v < 0) throw std::invalid_argument("negative");
      opts.max_trunc = v;
    } catch (const std::exception&) {
      return emit(input_failure("", "PRL_MAX_TRUNC must be a non-negative integer"), opts);
    }
  }

  std::string text;
  if (task_file == "-") {
    text.assign(std::istreambuf_iterator<char>(std::cin), {});
  } else {
    std::ifstream in(task_file);
    if (!in) return emit(input_failure("", "cannot read task file '" + task_file + "'"), opts);
    text.assign(std::istreambuf_iterator<char>(in), {});
  }
  json task;
  try {
    task = json::parse(text);
  } catch (const json::parse_error& e) {
    return emit(input_failure("", e.what()), opts);
  }
  if (!words.empty()) {
    std::string cmd;
    for (const auto& w : words) cmd += (cmd.empty() ? "" : " ") + w;
    if (task.is_object() && task.contains("command") && task["command"] != cmd)
      return emit(input_failure("/command", "task file names a different command"), opts);
    if (task.is_object()) task["command"] = cmd;
  }
  return emit(run_task(task, opts), opts);
}
