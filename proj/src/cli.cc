// Copyright 2026 The mpst Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mpst/cli.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mpst/errors.h"
#include "mpst/global_type.h"
#include "mpst/projector.h"
#include "mpst/runtime.h"
#include "mpst/session_type.h"
#include "mpst/tracelang.h"
#include "mpst/verifier.h"

namespace mpst {
namespace {

using Json = nlohmann::json;

constexpr int kSchemaVersion = 1;
constexpr int kSimulateMaxLen = 8;
constexpr size_t kShownTraces = 20;

struct RunConfig {
  std::string command;
  std::vector<std::string> inputs;
  bool inline_text = false;
  int max_len = 0;
  int buf_bound = kDefaultBufBound;
  int depth_bound = kDefaultDepthBound;
  int budget = kDefaultAndBudget;
  uint64_t seed = 0;
  bool json = false;
  bool dot = false;
  bool timing = false;
  std::string mode = "algorithmic";
  int samples = 200;
  int max_size = 8;
  int roles = 4;
  int star_depth = 1;
};

// Input that could not be read or parsed.
struct UsageError {
  std::string message;
};

std::string ReadInput(const RunConfig& config, size_t index) {
  const std::string& name = config.inputs.at(index);
  if (config.inline_text) return name;
  if (name == "-") {
    std::stringstream buffer;
    buffer << std::cin.rdbuf();
    return buffer.str();
  }
  std::ifstream in(name);
  if (!in) throw UsageError{"cannot read " + name};
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string SourceName(const RunConfig& config, size_t index) {
  return config.inline_text ? "input " + std::to_string(index + 1)
                            : config.inputs[index];
}

template <typename T, typename F>
T ParseOrUsage(const std::string& what, F parse) {
  try {
    return parse();
  } catch (const Error& e) {
    throw UsageError{what + ": " + e.what()};
  }
}

GlobalType LoadGlobal(const RunConfig& config, size_t index) {
  std::string text = ReadInput(config, index);
  return ParseOrUsage<GlobalType>(SourceName(config, index),
                                  [&] { return ParseGlobalType(text); });
}

SessionEnv LoadEnv(const RunConfig& config, size_t index) {
  std::string text = ReadInput(config, index);
  return ParseOrUsage<SessionEnv>(SourceName(config, index),
                                  [&] { return ParseSessionEnv(text); });
}

Bounds BoundsOf(const RunConfig& config) {
  Bounds b;
  b.max_len = config.max_len;
  b.buf_bound = config.buf_bound;
  b.depth_bound = config.depth_bound;
  b.budget = config.budget;
  return b;
}

Json EnvJson(const SessionEnv& d) {
  Json j = Json::object();
  for (const auto& [role, t] : d) j[role.name] = PrintSessionType(t);
  return j;
}

Json OptionalTrace(const std::optional<Trace>& t) {
  return t ? Json(ToString(*t)) : Json(nullptr);
}

std::vector<Trace> ShortestFirst(const std::set<Trace>& traces) {
  std::vector<Trace> v(traces.begin(), traces.end());
  std::stable_sort(v.begin(), v.end(), [](const Trace& a, const Trace& b) {
    return a.size() < b.size();
  });
  return v;
}

std::string ShowTrace(const Trace& t) {
  return t.empty() ? "(empty)" : ToString(t);
}

std::string Indent(const std::string& text, const std::string& prefix) {
  std::string out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out += prefix + line + "\n";
  return out;
}

// A finished command: its exit code, the JSON result and the text form.
struct Report {
  int code = kExitPass;
  Json result = Json::object();
  std::string text;
};

Json ProjectionErrorJson(const ProjectionError& e) {
  Json j;
  j["kind"] = ToString(e.kind());
  j["location"] = e.location() ? Json(PrintGlobalType(*e.location()))
                               : Json(nullptr);
  j["role"] = e.role() ? Json(e.role()->name) : Json(nullptr);
  j["detail"] = e.detail();
  j["underlying"] = e.underlying() ? Json(ToString(*e.underlying()))
                                   : Json(nullptr);
  return j;
}

std::string ProjectionErrorText(const ProjectionError& e) {
  std::string s = "ProjectionError: " + ToString(e.kind()) + "\n";
  if (e.underlying()) s += "  last candidate: " + ToString(*e.underlying()) + "\n";
  if (e.role()) s += "  role: " + e.role()->name + "\n";
  if (e.location()) s += "  at: " + PrintGlobalType(*e.location()) + "\n";
  s += "  detail: " + e.detail() + "\n";
  return s;
}

ProjectionMode ModeOf(const std::string& mode) {
  if (mode == "lenient") return ProjectionMode::kLenient;
  if (mode == "oblivious") return ProjectionMode::kOblivious;
  return ProjectionMode::kAlgorithmic;
}

Report Check(const RunConfig& config) {
  GlobalType g = LoadGlobal(config, 0);
  WellFormedness wf = WellFormed(g);
  Report r;
  r.result["well_formed"] = wf.well_formed;
  if (wf.well_formed) {
    r.text = "WellFormed\n";
    return r;
  }
  r.code = kExitFinding;
  r.result["witness"] = ToString(wf.witness);
  r.result["position"] = wf.position;
  r.result["swapped"] = ToString(wf.swapped);
  r.text = "NotWellFormed\n  witness:  " + ToString(wf.witness) +
           "\n  position: " + std::to_string(wf.position) +
           "\n  swapped:  " + ToString(wf.swapped) + "\n";
  return r;
}

Report Project(const RunConfig& config) {
  GlobalType g = LoadGlobal(config, 0);
  Report r;
  try {
    SessionEnv d = ProjectTop(g, config.budget,
                              ProjectOptions{ModeOf(config.mode)});
    r.result["projected"] = true;
    r.result["environment"] = EnvJson(d);
    r.text = PrintSessionEnv(d);
  } catch (const ProjectionError& e) {
    r.code = kExitFinding;
    r.result["projected"] = false;
    r.result["error"] = ProjectionErrorJson(e);
    r.text = ProjectionErrorText(e);
  }
  return r;
}

Report Simulate(const RunConfig& config) {
  SessionEnv d = LoadEnv(config, 0);
  LivenessVerdict v = IsLive(d, config.buf_bound, config.depth_bound);
  Report r;
  r.code = v.tag == LivenessVerdict::Tag::kLive ? kExitPass : kExitFinding;
  r.result["verdict"] = ToString(v.tag);
  r.result["explored"] = v.explored;
  r.result["bound_hit"] = v.bound_hit;
  std::ostringstream text;
  text << ToString(v.tag) << " (" << v.explored << " configurations"
       << (v.bound_hit ? ", bound hit" : "") << ")\n";

  if (!v.path.empty()) {
    Json path = Json::array();
    text << "run to a stuck configuration:\n";
    for (size_t i = 0; i < v.path.size(); ++i) {
      Json step;
      step["config"] = ToString(v.path[i]);
      text << Indent(ToString(v.path[i]), "  ");
      if (i < v.labels.size()) {
        step["label"] = v.labels[i] ? Json(ToString(*v.labels[i]))
                                    : Json(nullptr);
        text << "    -- " << (v.labels[i] ? ToString(*v.labels[i]) : "send")
             << " -->\n";
      }
      path.push_back(step);
    }
    r.result["path"] = path;
  }

  int max_len = config.max_len > 0 ? config.max_len : kSimulateMaxLen;
  std::vector<Trace> traces = ShortestFirst(
      SessionTraces(d, max_len, config.buf_bound, config.depth_bound));
  r.result["max_len"] = max_len;
  r.result["trace_count"] = traces.size();
  Json shown = Json::array();
  text << traces.size() << " traces up to length " << max_len << "\n";
  for (size_t i = 0; i < traces.size() && i < kShownTraces; ++i) {
    shown.push_back(ToString(traces[i]));
    text << "  " << ShowTrace(traces[i]) << "\n";
  }
  r.result["traces"] = shown;
  r.text = text.str();
  return r;
}

Report Verify(const RunConfig& config) {
  GlobalType g = LoadGlobal(config, 0);
  Report r;
  SessionEnv d;
  if (config.inputs.size() > 1) {
    d = LoadEnv(config, 1);
    r.result["projected"] = false;
  } else {
    try {
      d = ProjectTop(g, config.budget);
    } catch (const ProjectionError& e) {
      r.code = kExitFinding;
      r.result["projected"] = false;
      r.result["error"] = ProjectionErrorJson(e);
      r.text = ProjectionErrorText(e);
      return r;
    }
    r.result["projected"] = true;
  }
  ConformanceReport c = CheckPreorder(g, d, BoundsOf(config));
  r.code = c.ok() ? kExitPass : kExitFinding;
  r.result["environment"] = EnvJson(d);
  r.result["sound"] = c.sound;
  r.result["counterexample"] = OptionalTrace(c.counterexample);
  r.result["complete"] = c.complete;
  r.result["missing"] = OptionalTrace(c.missing);
  r.result["bounds"] = {{"max_len", c.max_len}, {"buf_bound", c.buf_bound}};
  r.result["basis"] =
      c.basis == ConformanceReport::Basis::kExact ? "Exact" : "Bounded";
  std::ostringstream text;
  text << "sound:    " << (c.sound ? "yes" : "no");
  if (c.counterexample) text << "  (" << ShowTrace(*c.counterexample) << ")";
  text << "\ncomplete: " << (c.complete ? "yes" : "no");
  if (c.missing) text << "  (missing " << ShowTrace(*c.missing) << ")";
  text << "\nbounds:   max-len " << c.max_len << ", buf-bound " << c.buf_bound
       << " (bounded)\n";
  r.text = text.str();
  return r;
}

Report ClassifyCommand(const RunConfig& config) {
  GlobalType g = LoadGlobal(config, 0);
  Classification c = Classify(g, BoundsOf(config));
  Report r;
  r.code = c.category == FlawCategory::kProjectable ? kExitPass : kExitFinding;
  r.result["category"] = ToString(c.category);
  r.result["reason"] = c.reason;
  r.result["relaxed"] =
      c.relaxed ? Json(PrintGlobalType(*c.relaxed)) : Json(nullptr);
  r.result["environment"] =
      c.environment ? EnvJson(*c.environment) : Json(nullptr);
  r.text = ToString(c.category) + "\n  " + c.reason + "\n";
  if (c.relaxed) r.text += "  relaxed: " + PrintGlobalType(*c.relaxed) + "\n";
  return r;
}

Report TraceCommand(const RunConfig& config) {
  GlobalType g = LoadGlobal(config, 0);
  TraceAutomaton a = CompileTraces(g);
  Report r;
  if (config.dot) {
    r.result["dot"] = ToDot(a);
    r.text = ToDot(a);
    return r;
  }
  int max_len = ResolveBounds(g, BoundsOf(config)).max_len;
  std::vector<Trace> traces = ShortestFirst(EnumerateTraces(a, max_len));
  Json list = Json::array();
  std::ostringstream text;
  for (const Trace& t : traces) {
    list.push_back(ToString(t));
    text << ShowTrace(t) << "\n";
  }
  r.result["max_len"] = max_len;
  r.result["count"] = traces.size();
  r.result["traces"] = list;
  r.text = text.str();
  return r;
}

Report CrossCheck(const RunConfig& config) {
  RandomOptions options{config.max_size, config.roles, config.star_depth};
  CrossCheckSummary s =
      CrossCheckTheorems(config.samples, config.seed, options, BoundsOf(config));
  Report r;
  r.code = s.violations == 0 ? kExitPass : kExitFinding;
  r.result["samples"] = s.samples;
  r.result["ill_formed"] = s.ill_formed;
  r.result["rejected"] = s.rejected;
  r.result["projectable"] = s.projectable;
  r.result["skipped"] = s.skipped;
  r.result["violations"] = s.violations;
  r.result["details"] = s.details;
  std::ostringstream text;
  text << "samples " << s.samples << ": " << s.projectable << " projectable, "
       << s.rejected << " rejected, " << s.ill_formed << " ill formed, "
       << s.skipped << " skipped, " << s.violations << " violations\n";
  for (const std::string& d : s.details) text << "  " << d << "\n";
  r.text = text.str();
  return r;
}

}  // namespace

int RunCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err) {
  RunConfig config;
  CLI::App app{"Multiparty session type toolkit", "mpst"};
  app.require_subcommand(1);
  app.add_option("--max-len", config.max_len, "Trace length bound")
      ->check(CLI::PositiveNumber);
  app.add_option("--buf-bound", config.buf_bound, "Messages per queue")
      ->check(CLI::PositiveNumber);
  app.add_option("--depth", config.depth_bound,
                 "Configurations explored by the liveness check")
      ->check(CLI::PositiveNumber);
  app.add_option("--budget", config.budget,
                 "Candidates tried when removing parallel composition")
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", config.seed, "Random seed");
  app.add_flag("--json", config.json, "Print a JSON report");
  app.add_flag("--timing", config.timing, "Include the elapsed time");
  app.add_flag("-e,--expr", config.inline_text,
               "Inputs are source text rather than file names");

  std::map<std::string, std::function<Report(const RunConfig&)>> handlers;
  auto command = [&](const std::string& name, const std::string& help,
                     auto handler, size_t min_inputs, size_t max_inputs,
                     const std::string& inputs_help) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->fallthrough();
    if (max_inputs > 0) {
      sub->add_option("inputs", config.inputs, inputs_help)
          ->expected(static_cast<int>(min_inputs),
                     static_cast<int>(max_inputs))
          ->required(min_inputs > 0);
    }
    handlers[name] = handler;
    return sub;
  };
  command("check", "Decide well-formedness of a global type", Check, 1, 1,
          "global type (.gt)");
  CLI::App* project = command("project", "Project a global type", Project, 1,
                              1, "global type (.gt)");
  project->add_option("--mode", config.mode, "Projection mode")
      ->check(CLI::IsMember({"algorithmic", "lenient", "oblivious"}));
  command("simulate", "Check liveness and list session traces", Simulate, 1, 1,
          "session environment (.mps)");
  command("verify", "Check a projection against its global type", Verify, 1, 2,
          "global type (.gt) and optional environment (.mps)");
  command("classify", "Classify why a global type does not project",
          ClassifyCommand, 1, 1, "global type (.gt)");
  CLI::App* trace = command("trace", "List the traces of a global type",
                            TraceCommand, 1, 1, "global type (.gt)");
  trace->add_flag("--dot", config.dot, "Print the trace automaton instead");
  CLI::App* cross = command("crosscheck",
                            "Check projections of random global types",
                            CrossCheck, 0, 0, "");
  cross->add_option("--samples", config.samples)->check(CLI::PositiveNumber);
  cross->add_option("--max-size", config.max_size)->check(CLI::PositiveNumber);
  cross->add_option("--roles", config.roles)->check(CLI::Range(2, 26));
  cross->add_option("--star-depth", config.star_depth)
      ->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitPass : kExitUsage;
  }
  config.command = app.get_subcommands().front()->get_name();

  auto start = std::chrono::steady_clock::now();
  Report report;
  try {
    report = handlers.at(config.command)(config);
  } catch (const UsageError& e) {
    err << "error: " << e.message << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    // Bounds too small for the input, or an environment the runtime
    // cannot execute.
    report.code = kExitFinding;
    report.result = {{"error", e.what()}};
    report.text = std::string("error: ") + e.what() + "\n";
  }
  double elapsed = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - start)
                       .count();

  if (config.json) {
    Json doc;
    doc["schema"] = kSchemaVersion;
    doc["command"] = config.command;
    doc["inputs"] = config.inline_text ? Json::array() : Json(config.inputs);
    doc["exit_code"] = report.code;
    doc["result"] = report.result;
    if (config.timing) doc["elapsed_ms"] = elapsed;
    out << doc.dump(2) << "\n";
  } else {
    out << report.text;
    if (config.timing) out << "time: " << elapsed << " ms\n";
  }
  return report.code;
}

}  // namespace mpst
