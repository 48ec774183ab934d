// schema_calc: law suites, value iteration, structure learning, sampling and
// batch workflow execution, each writing a JSON run report.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "schemacalc/action.hpp"
#include "schemacalc/causal.hpp"
#include "schemacalc/error.hpp"
#include "schemacalc/laws.hpp"
#include "schemacalc/mind.hpp"
#include "schemacalc/value_iteration.hpp"
#include "schemacalc/workflow.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace schemacalc;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

/// Thrown for malformed input files; carries the full diagnostic.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Report {
  explicit Report(std::string name) : command(std::move(name)) {}

  std::string command;
  std::string status = "pass";
  std::map<std::string, double> metrics;
  std::vector<std::string> artifacts;
  std::uint64_t seed = 0;
  json extra = json::object();

  json to_json() const {
    json j{{"command", command}, {"status", status},     {"metrics", metrics},
           {"artifacts", artifacts}, {"seed", seed}, {"version", SCHEMACALC_VERSION}};
    for (const auto& [k, v] : extra.items()) j[k] = v;
    return j;
  }
};

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const std::string& path) {
  auto text = read_text(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    std::size_t col = 1;
    const auto end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw InputError(path + ":" + std::to_string(line) + ":" + std::to_string(col) + ": malformed JSON: " + e.what());
  }
}

void write_text(const fs::path& path, const std::string& text, Report& report) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError(path.string() + ": cannot write file");
  out << text;
  report.artifacts.push_back(path.string());
  spdlog::info("wrote {}", path.string());
}

void write_json(const fs::path& path, const json& j, Report& report) { write_text(path, j.dump(2) + "\n", report); }

int finish(Report& report, const std::string& out_dir) {
  if (!out_dir.empty()) {
    fs::path path = fs::path(out_dir) / "report.json";
    report.artifacts.push_back(path.string());
    fs::create_directories(out_dir);
    std::ofstream(path, std::ios::binary) << report.to_json().dump(2) << "\n";
  }
  std::cout << report.to_json().dump(2) << "\n";
  return report.status == "pass" ? kExitPass : kExitFail;
}

// ---------------------------------------------------------------- laws

struct LawsArgs {
  std::size_t cases = 100;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_laws(const LawsArgs& a) {
  Report report("laws");
  report.seed = a.seed;
  auto results = laws::run_all(a.cases, a.seed);
  std::size_t failed = 0;
  for (const auto& r : results) {
    report.metrics[r.suite + "." + r.name] = static_cast<double>(r.cases - r.failures);
    if (!r.passed()) {
      ++failed;
      spdlog::error("{}.{}: {} of {} cases failed; {}", r.suite, r.name, r.failures, r.cases, r.first_failure);
    }
  }
  report.metrics["laws_total"] = static_cast<double>(results.size());
  report.metrics["laws_failed"] = static_cast<double>(failed);
  report.metrics["cases"] = static_cast<double>(a.cases);
  report.extra["laws"] = laws::to_json(results);
  report.status = laws::all_passed(results) ? "pass" : "fail";
  return finish(report, a.out);
}

// ---------------------------------------------------------------- vi

struct ViArgs {
  std::string mdp;
  std::optional<double> gamma;
  std::optional<double> delta;
  std::size_t max_iter = vi::kDefaultMaxIter;
  std::string out = "vi_out";
  bool emit_mind = false;
};

int cmd_vi(const ViArgs& a) {
  Report report("vi");
  auto mdp = vi::mdp_from_json(read_json(a.mdp));
  if (a.gamma) mdp.gamma = *a.gamma;
  if (a.delta) mdp.delta = *a.delta;
  vi::validate(mdp);
  impl::ParamTensor theta0({mdp.n_states()}, std::vector<double>(mdp.n_states(), 0.0));

  auto result = vi::run_vi(mdp, theta0, a.max_iter);
  const bool lifting = vi::lifting_check(theta0, mdp) && vi::lifting_check(result.values, mdp);
  auto policy = vi::greedy_policy(result.values, mdp);

  const fs::path out(a.out);
  write_json(out / "value_table.json", vi::value_table_json(mdp.states, result.values), report);
  json pj{{"states", mdp.states.points()}, {"actions", json::array()}};
  for (auto d : policy) pj["actions"].push_back(mdp.actions.points()[d]);
  write_json(out / "policy.json", pj, report);
  write_text(out / "trace.csv", vi::trace_csv(result.trace), report);
  if (a.emit_mind) {
    write_json(out / "mind.json", mind::to_json(vi::make_vi_mind(mdp, theta0, a.max_iter)), report);
    write_json(out / "workflow.json", wf::to_json(vi::make_vi_workflow(mdp, a.max_iter)), report);
  }

  report.metrics["iterations"] = static_cast<double>(result.iterations);
  report.metrics["final_delta"] = result.trace.empty() ? 0.0 : result.trace.back();
  report.metrics["converged"] = result.converged ? 1 : 0;
  report.metrics["lifting_check"] = lifting ? 1 : 0;
  report.metrics["gamma"] = mdp.gamma;
  report.metrics["delta"] = mdp.delta;
  report.status = result.converged && lifting ? "pass" : (lifting ? "partial" : "fail");
  return finish(report, a.out);
}

// ---------------------------------------------------------------- ges

struct GesArgs {
  std::string data;
  double epsilon = causal::kDefaultEpsilon;
  double alpha = causal::kDefaultAlpha;
  std::uint64_t seed = 0;
  std::string truth;
  std::string out = "ges_out";
};

int cmd_ges(const GesArgs& a) {
  Report report("ges");
  report.seed = a.seed;
  auto data = causal::dataset_from_csv(read_text(a.data));
  auto result = causal::ges_run(data, a.epsilon, a.alpha);

  const fs::path out(a.out);
  write_json(out / "model.json", causal::to_json(result.model), report);
  write_json(out / "cpdag.json", causal::to_json(causal::cpdag(result.model.dag), result.model.variables), report);
  write_text(out / "trace.csv", causal::trace_csv(result.trace, result.model.variables), report);

  report.metrics["score"] = result.score;
  report.metrics["forward_moves"] = static_cast<double>(result.forward_moves);
  report.metrics["backward_moves"] = static_cast<double>(result.backward_moves);
  report.metrics["edges"] = static_cast<double>(result.model.dag.edge_count());
  report.metrics["rows"] = static_cast<double>(data.rows.size());
  if (!a.truth.empty()) {
    auto truth = causal::causal_from_json(read_json(a.truth));
    std::vector<std::string> names;
    for (const auto& v : data.variables) names.push_back(v.name);
    const bool eq = causal::markov_equivalent(result.model.dag, causal::dag_over(truth, names));
    report.metrics["markov_equivalent"] = eq ? 1 : 0;
    if (!eq) report.status = "fail";
  }
  return finish(report, a.out);
}

// ---------------------------------------------------------------- sample

struct SampleArgs {
  std::string model;
  std::size_t n = 1000;
  std::uint64_t seed = 0;
  std::string out = "samples.csv";
};

int cmd_sample(const SampleArgs& a) {
  Report report("sample");
  report.seed = a.seed;
  auto model = causal::causal_from_json(read_json(a.model));
  auto data = causal::sample_data(model, a.n, a.seed);
  write_text(a.out, causal::to_csv(data), report);
  report.metrics["rows"] = static_cast<double>(data.rows.size());
  report.metrics["variables"] = static_cast<double>(data.variables.size());
  return finish(report, "");
}

// ---------------------------------------------------------------- workflow

struct WorkflowArgs {
  std::string spec;
  std::string mind;
  std::uint64_t seed = 0;
  std::string out = "workflow_out";
};

int cmd_workflow(const WorkflowArgs& a) {
  Report report("workflow");
  report.seed = a.seed;
  auto spec = read_json(a.spec);
  auto state = mind::mind_from_json(read_json(a.mind));

  exec::ExecContext ctx;
  ctx.operators = vi::standard_operators();
  ctx.predicates = vi::standard_predicates();
  ctx.seed = spec.value("seed", a.seed);
  report.seed = ctx.seed;

  std::optional<wf::PredicateRef> success;
  wf::Workflow w = wf::Workflow::unit_seq();
  if (spec.contains("module")) {
    const auto& module = state.module(spec.at("module").get<std::string>());
    const auto index = spec.value("index", std::size_t{0});
    if (index >= module.workflows.size()) fail(ErrorCode::UnresolvedTarget, "module has no workflow " + std::to_string(index));
    w = module.workflows[index];
    ctx.signature = module.signature;
    success = module.success;
  } else {
    w = wf::workflow_from_json(spec.contains("workflow") ? spec.at("workflow") : spec);
  }

  auto result = exec::execute(w, state, ctx);

  const fs::path out(a.out);
  write_json(out / "mind_out.json", mind::to_json(result), report);
  std::string log;
  for (const auto& line : ctx.log) log += line + "\n";
  write_text(out / "execution.log", log, report);
  for (const auto& [id, s] : result.schemas) {
    if (s.deterministic() && s.term.type().dom.size() == 1) {
      write_json(out / ("value_table_" + id + ".json"), vi::value_table_json(s.term.type().dom[0], s.params), report);
    }
  }

  report.metrics["log_lines"] = static_cast<double>(ctx.log.size());
  report.metrics["max_iter_exceeded"] = ctx.max_iter_exceeded ? 1 : 0;
  if (success) {
    const bool ok = ctx.predicates.find(success->name)(state, result, *success, ctx);
    report.metrics["success"] = ok ? 1 : 0;
    if (!ok) report.status = "fail";
  }
  if (ctx.max_iter_exceeded) report.status = "partial";
  return finish(report, a.out);
}

void configure_logging() {
  auto logger = spdlog::stderr_color_mt("schema_calc");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("SCHEMA_CALC_LOG")) {
    const std::string level = env;
    if (level == "error") spdlog::set_level(spdlog::level::err);
    else if (level == "info") spdlog::set_level(spdlog::level::info);
    else if (level == "debug") spdlog::set_level(spdlog::level::debug);
  }
}

}  // namespace

int main(int argc, char** argv) {
  configure_logging();
  CLI::App app{"Schema calculus driver"};
  app.set_version_flag("--version", SCHEMACALC_VERSION);
  app.require_subcommand(1);

  LawsArgs laws_args;
  auto* laws = app.add_subcommand("laws", "Run every algebraic law suite");
  laws->add_option("--cases", laws_args.cases, "Generated cases per law")->check(CLI::PositiveNumber);
  laws->add_option("--seed", laws_args.seed, "Generator seed");
  laws->add_option("--out", laws_args.out, "Directory for report.json");

  ViArgs vi_args;
  auto* vi_cmd = app.add_subcommand("vi", "Value iteration through the workflow engine");
  vi_cmd->add_option("mdp", vi_args.mdp, "MDP JSON file")->required();
  vi_cmd->add_option("--gamma", vi_args.gamma, "Discount override")->check(CLI::Range(0.0, 1.0));
  vi_cmd->add_option("--delta", vi_args.delta, "Stopping threshold override")->check(CLI::PositiveNumber);
  vi_cmd->add_option("--max-iter", vi_args.max_iter, "Loop bound")->check(CLI::PositiveNumber);
  vi_cmd->add_option("--out", vi_args.out, "Output directory");
  vi_cmd->add_flag("--emit-mind", vi_args.emit_mind, "Also write mind.json and workflow.json");

  GesArgs ges_args;
  auto* ges = app.add_subcommand("ges", "Greedy structure search on a CSV dataset");
  ges->add_option("data", ges_args.data, "CSV dataset")->required();
  ges->add_option("--epsilon", ges_args.epsilon, "Minimum score gain")->check(CLI::NonNegativeNumber);
  ges->add_option("--alpha", ges_args.alpha, "Laplace smoothing")->check(CLI::NonNegativeNumber);
  ges->add_option("--seed", ges_args.seed, "Recorded in the report");
  ges->add_option("--truth", ges_args.truth, "Reference model JSON");
  ges->add_option("--out", ges_args.out, "Output directory");

  SampleArgs sample_args;
  auto* sample = app.add_subcommand("sample", "Ancestral sampling from a causal model");
  sample->add_option("model", sample_args.model, "Causal model JSON")->required();
  sample->add_option("-n", sample_args.n, "Rows")->check(CLI::PositiveNumber);
  sample->add_option("--seed", sample_args.seed, "Sampling seed");
  sample->add_option("--out", sample_args.out, "Output CSV path");

  WorkflowArgs wf_args;
  auto* workflow = app.add_subcommand("workflow", "Execute a workflow JSON on a mind-state JSON");
  workflow->add_option("spec", wf_args.spec, "Workflow JSON")->required();
  workflow->add_option("mind", wf_args.mind, "Mind-state JSON")->required();
  workflow->add_option("--seed", wf_args.seed, "Execution seed");
  workflow->add_option("--out", wf_args.out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*laws) return cmd_laws(laws_args);
    if (*vi_cmd) return cmd_vi(vi_args);
    if (*ges) return cmd_ges(ges_args);
    if (*sample) return cmd_sample(sample_args);
    if (*workflow) return cmd_workflow(wf_args);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFail;
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
    return kExitFail;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFail;
  }
  return kExitUsage;
}
