// onelife: single-life world simulation and event-driven model discovery.
//
// Subcommands: generate, run, infer, compose, compare, experiment. Every
// command is a pure function of its flags, input files, and seed; outputs
// land under --output-directory with fixed names.
//
// Exit codes: 0 success, 2 input/parse, 3 capacity, 4 missing oracle,
// 5 generation.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "onelife/batch.hpp"
#include "onelife/compose.hpp"
#include "onelife/edm.hpp"
#include "onelife/evaluation.hpp"
#include "onelife/inference.hpp"
#include "onelife/io.hpp"
#include "onelife/world.hpp"

namespace fs = std::filesystem;
using namespace onelife;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitCapacity = 3;
constexpr int kExitMissingOracle = 4;
constexpr int kExitGeneration = 5;

std::string out_path(const std::string& dir, const std::string& name) {
  fs::create_directories(dir);
  return (fs::path(dir) / name).string();
}

std::string numbered(const std::string& stem, int index, int count, const std::string& ext) {
  if (count <= 1) return stem + ext;
  char buf[16];
  std::snprintf(buf, sizeof(buf), "_%04d", index);
  return stem + buf + ext;
}

struct GenerateArgs {
  int states = 1, actions = 1, observations = 1;
  double density = 0.0;
  std::uint64_t seed = 0;
  bool allow_sudden_death = false;
  std::string outdir = ".";
};

int cmd_generate(const GenerateArgs& a) {
  const PerfectWorld w = generate_world(a.states, a.actions, a.observations, a.density, a.seed,
                                        a.allow_sudden_death);
  write_file(out_path(a.outdir, "world.world"), print_world(AnyWorld{w}));
  std::cout << "wrote " << out_path(a.outdir, "world.world") << "\n";
  return kExitOk;
}

struct RunArgs {
  std::string world_file;
  std::string policy = "uniform";
  int horizon = 0;
  std::uint64_t seed = 0;
  std::string rewards_file;
  int count = 1;
  int jobs = 0;
  std::string outdir = ".";
};

void write_one_life(const RunArgs& a, const WorldLabels& labels, const LifeRecord& rec,
                    const RewardMap* rewards, int index) {
  write_file(out_path(a.outdir, numbered("life", index, a.count, ".log")),
             print_life_log(rec.history, labels));
  PathFile pf{rec.path, rec.cause};
  write_file(out_path(a.outdir, numbered("path", index, a.count, ".txt")),
             print_path(pf, labels));
  if (rewards) {
    write_file(out_path(a.outdir, numbered("scores", index, a.count, ".csv")),
               print_scores_csv(score_life(rec.history, *rewards)));
  }
}

int cmd_run(const RunArgs& a) {
  const AnyWorld world = load_world(a.world_file);
  const WorldLabels& labels = labels_of(world);
  std::optional<RewardMap> rewards;
  if (!a.rewards_file.empty()) rewards = load_rewards(a.rewards_file, labels);

  PolicyFactory factory = [&] { return make_policy(a.policy, labels); };
  const auto lives = std::visit(
      [&](const auto& w) { return run_lives(w, factory, a.horizon, a.count, a.seed, a.jobs); },
      world);
  for (int i = 0; i < a.count; ++i) {
    write_one_life(a, labels, lives[static_cast<std::size_t>(i)],
                   rewards ? &*rewards : nullptr, i);
  }
  std::cout << "ran " << a.count << (a.count == 1 ? " life of " : " lives of ") << a.horizon
            << " steps\n";
  return kExitOk;
}

struct InferArgs {
  std::string life_file;
  std::string model_file;
  std::string world_file;
  std::string events_file;
  std::string chi_file;
  std::string ground_truth_file;
  int window = 0;
  double min_support = 30.0;
  double threshold = 3.0;
  std::string baseline = "global";
  int lag = 1;
  double significance = 0.05;
  std::uint64_t seed = 0;
  bool approximate = false;
  std::string outdir = ".";
};

int cmd_infer(const InferArgs& a) {
  const AnyWorld world = load_world(a.world_file);
  const WorldLabels& labels = labels_of(world);
  const History life = load_life_log(a.life_file, labels);
  const ModelFile model_file = load_model(a.model_file);
  const EventDrivenModel& model = model_file.base();
  const auto defs = load_event_defs(a.events_file, labels);
  std::optional<ChiTranscript> chi;
  if (!a.chi_file.empty()) chi = load_chi(a.chi_file);

  const EventStream stream = project_events(life, defs, chi ? &*chi : nullptr);

  std::string summary;
  summary += "mode " + std::string(a.approximate ? "agent-side-approximate" : "world-side-exact") +
             "\n";
  summary += "steps " + std::to_string(stream.total_steps) + "\n";
  summary += "ticks " + std::to_string(stream.ticks.size()) + "\n";

  std::vector<std::string> event_names = stream.event_names;
  TraceStatistics stats;
  std::vector<std::string> label_names;
  if (a.approximate) {
    stats = collect_fractional(model, stream);
    label_names = event_names;
    const std::set<StateId> now = estimate_state(model, stream);
    std::string states;
    for (StateId s : now) states += " " + model.state_names[static_cast<std::size_t>(s)];
    summary += "estimated-current-states" +
               (now.empty() ? std::string(" (stream contradicts the model)") : states) + "\n";
    if (model.outside && now.size() == 1) {
      summary += "object-visible " + std::string(model.seen(*now.begin()) ? "yes" : "no") + "\n";
    }
  } else {
    UniformTransitionOracle alpha(Rng(a.seed).substream("alpha").seed());
    const Timeline tl = edm_timeline(model, stream, EdmOracle{&alpha}, model.start);
    stats = collect(tl, stream, a.window);
    label_names.clear();
    for (const auto& e : model.events) label_names.push_back(e.name);
    summary += "no-arrow-notices " + std::to_string(tl.no_arrow_notices) + "\n";

    const auto pi = past_independence_test(tl, stream, a.lag, a.significance);
    summary += "past-independence " + std::string(to_string(pi.verdict)) + " worst-p " +
               format_double(pi.worst_p) + " states-tested " + std::to_string(pi.states_tested) +
               "\n";
    if (model.outside) {
      const StateId last = tl.state_at.back();
      summary += "object-visible-at-end " + std::string(model.seen(last) ? "yes" : "no") + "\n";
    }
  }

  DetectParams params;
  params.min_support = a.min_support;
  params.threshold = a.threshold;
  if (a.baseline == "uniform") {
    params.baseline = BaselineMode::UniformOverEvents;
  } else if (a.baseline != "global") {
    throw InputError("baseline must be global|uniform");
  }
  const auto findings = detect_trace(stats, params, model.state_names, label_names, event_names);
  summary += "findings " + std::to_string(findings.size()) + "\n";
  summary += "adequacy " + format_double(adequacy(findings)) + "\n";

  if (!a.ground_truth_file.empty()) {
    const PathFile gt = load_path(a.ground_truth_file, labels);
    const FullHistory full = full_from_trace(life, gt.path, [&](StateId s) {
      return std::visit([&](const auto& w) { return w.incorrect_set(s); }, world);
    });
    (void)full;
    summary += "ground-truth bad-subset-of-full ok\n";
    const AbridgedModel abridged = std::visit(
        [&](const auto& w) { return abridge(w, LifeRecord{life, gt.path, gt.cause}); }, world);
    summary += "abridged states " + std::to_string(abridged.kept_states.size()) + " arrows " +
               std::to_string(abridged.arrow_counts.size()) + " transitions " +
               std::to_string(abridged.total_transitions()) + "\n";
  }

  write_file(out_path(a.outdir, "findings.csv"),
             findings_csv(findings, model.state_names, label_names, event_names));
  write_file(out_path(a.outdir, "summary.txt"), summary);
  std::cout << summary;
  return kExitOk;
}

struct ComposeArgs {
  std::vector<std::string> model_files;
  std::uint64_t seed = 0;
  std::size_t bound = 1000000;
  std::string outdir = ".";
};

int cmd_compose(const ComposeArgs& a) {
  std::vector<ModelFile> files;
  files.reserve(a.model_files.size());
  for (const auto& f : a.model_files) files.push_back(load_model(f));
  std::vector<Component> components;
  for (const auto& f : files) {
    Component c;
    if (f.has_variables()) {
      c.vm = &f.model;
    } else {
      c.edm = &f.base();
    }
    components.push_back(c);
  }
  CartesianModel cart = cartesian(std::move(components), a.seed);

  std::string report;
  report += "components " + std::to_string(cart.component_count()) + "\n";
  for (int i = 0; i < cart.component_count(); ++i) {
    const Component& c = cart.component(i);
    report += "component " + std::to_string(i) + " states " +
              std::to_string(c.base().num_states()) +
              (c.has_variables() ? " evaluations " + std::to_string(c.vm->eval_count()) : "") +
              "\n";
  }
  report += "alphabet";
  for (const auto& name : cart.alphabet()) report += " " + name;
  report += "\n";
  report += "product-states " + std::to_string(product_state_count(cart)) + "\n";
  if (cart.component_count() == 1) report += "isomorphic to component 0\n";
  report += "start " + cart.print_state(cart.current()) + "\n";

  const ReachableResult reach = reachable_composite(cart, cart.current(), a.bound);
  report += "reachable " + std::to_string(reach.states.size()) +
            (reach.complete ? "" : "+ (partial, cap hit)") + "\n";

  write_file(out_path(a.outdir, "composite.txt"), report);
  std::cout << report;
  if (!reach.complete) {
    std::cerr << "reachability cap " << a.bound << " exceeded\n";
    return kExitCapacity;
  }
  return kExitOk;
}

struct CompareArgs {
  std::string left_file;
  std::string right_file;
  std::string mode = "pareto";
  std::vector<std::size_t> priority;
  std::int64_t schedule_max = 1 << 20;
  std::string outdir = ".";
};

int cmd_compare(const CompareArgs& a) {
  const ScoreSequence left = load_scores_csv(a.left_file);
  const ScoreSequence right = load_scores_csv(a.right_file);
  CompareMode mode;
  if (a.mode == "pareto") {
    mode.kind = CompareMode::Kind::Pareto;
  } else if (a.mode == "lex") {
    mode.kind = CompareMode::Kind::Lexicographic;
    mode.priority = a.priority;
  } else {
    throw InputError("compare mode must be pareto|lex");
  }
  std::vector<std::int64_t> schedule;
  for (std::int64_t k = 1; k <= a.schedule_max; k *= 2) schedule.push_back(k);
  const LifeVerdict v = compare_lives(left, right, mode, schedule);
  write_file(out_path(a.outdir, "verdict.txt"), v.to_string() + "\n");
  std::cout << v.to_string() << "\n";
  return kExitOk;
}

int cmd_experiment(const std::string& config_file) {
  const ExperimentConfig cfg = load_config(config_file);
  RunArgs run;
  run.world_file = cfg.world_file;
  run.policy = cfg.policy;
  run.horizon = cfg.horizon;
  run.seed = cfg.seed;
  run.rewards_file = cfg.rewards_file;
  run.outdir = cfg.output_directory;
  const int rc = cmd_run(run);
  if (rc != kExitOk) return rc;

  if (!cfg.model_file.empty() && !cfg.events_file.empty()) {
    InferArgs infer;
    infer.life_file = out_path(cfg.output_directory, "life.log");
    infer.model_file = cfg.model_file;
    infer.world_file = cfg.world_file;
    infer.events_file = cfg.events_file;
    infer.chi_file = cfg.chi_file;
    infer.ground_truth_file = out_path(cfg.output_directory, "path.txt");
    infer.window = cfg.window;
    infer.min_support = cfg.min_support;
    infer.threshold = cfg.threshold;
    infer.lag = cfg.lag;
    infer.significance = cfg.significance;
    infer.seed = cfg.seed;
    infer.outdir = cfg.output_directory;
    return cmd_infer(infer);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"single-life world simulation and event-driven model discovery"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* cgen = app.add_subcommand("generate", "sample a world file");
  cgen->add_option("--states", gen.states, "state count")->required();
  cgen->add_option("--actions", gen.actions, "action count")->required();
  cgen->add_option("--observations", gen.observations, "observation count")->required();
  cgen->add_option("--incorrect-density", gen.density, "per-(state,action) incorrect probability");
  cgen->add_option("--seed", gen.seed, "generator seed");
  cgen->add_flag("--allow-sudden-death", gen.allow_sudden_death,
                 "permit states with no usable outbound arrow");
  cgen->add_option("-o,--output-directory", gen.outdir, "output directory");

  RunArgs run;
  auto* crun = app.add_subcommand("run", "simulate one or more lives");
  crun->add_option("--world", run.world_file, "world file")->required();
  crun->add_option("--policy", run.policy, "uniform | scripted:a,b,... | repeat-eps:E");
  crun->add_option("--horizon", run.horizon, "successful moves before natural death")->required();
  crun->add_option("--seed", run.seed, "life seed");
  crun->add_option("--rewards", run.rewards_file, "reward map file (writes scores.csv)");
  crun->add_option("--count", run.count, "number of independent lives");
  crun->add_option("--jobs", run.jobs, "parallel workers for --count > 1");
  crun->add_option("-o,--output-directory", run.outdir, "output directory");

  InferArgs infer;
  auto* cinf = app.add_subcommand("infer", "project events and detect the model's trace");
  cinf->add_option("--life", infer.life_file, "life log")->required();
  cinf->add_option("--model", infer.model_file, "candidate model file")->required();
  cinf->add_option("--world", infer.world_file, "world file (alphabets)")->required();
  cinf->add_option("--events", infer.events_file, "event definitions file")->required();
  cinf->add_option("--chi", infer.chi_file, "occurrence transcript for non-visible events");
  cinf->add_option("--ground-truth-path", infer.ground_truth_file, "world-side state path");
  cinf->add_option("--window", infer.window, "around-arrow window half-width");
  cinf->add_option("--min-support", infer.min_support, "minimum opportunities per finding");
  cinf->add_option("--threshold", infer.threshold, "minimum deviation score per finding");
  cinf->add_option("--baseline", infer.baseline, "reference frequency: global | uniform");
  cinf->add_option("--lag", infer.lag, "past-independence lag");
  cinf->add_option("--significance", infer.significance, "past-independence significance");
  cinf->add_option("--seed", infer.seed, "model-side oracle seed");
  cinf->add_flag("--approximate", infer.approximate,
                 "agent-side statistics over estimated state sets");
  cinf->add_option("-o,--output-directory", infer.outdir, "output directory");

  ComposeArgs comp;
  auto* ccomp = app.add_subcommand("compose", "build the Cartesian product of models");
  ccomp->add_option("--model", comp.model_files, "model file (repeatable)")->required();
  ccomp->add_option("--seed", comp.seed, "master seed for per-component oracles");
  ccomp->add_option("--bound", comp.bound, "reachability cap");
  ccomp->add_option("-o,--output-directory", comp.outdir, "output directory");

  CompareArgs cmp;
  auto* ccmp = app.add_subcommand("compare", "compare two score traces");
  ccmp->add_option("--left", cmp.left_file, "score CSV of life 1")->required();
  ccmp->add_option("--right", cmp.right_file, "score CSV of life 2")->required();
  ccmp->add_option("--mode", cmp.mode, "pareto | lex");
  ccmp->add_option("--priority", cmp.priority, "lex priority order (column indices)");
  ccmp->add_option("--schedule-max", cmp.schedule_max, "largest prefix length checked");
  ccmp->add_option("-o,--output-directory", cmp.outdir, "output directory");

  std::string config_file;
  auto* cexp = app.add_subcommand("experiment", "run a configured experiment end to end");
  cexp->add_option("config", config_file, "experiment config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInput;
  }

  try {
    if (cgen->parsed()) return cmd_generate(gen);
    if (crun->parsed()) return cmd_run(run);
    if (cinf->parsed()) return cmd_infer(infer);
    if (ccomp->parsed()) return cmd_compose(comp);
    if (ccmp->parsed()) return cmd_compare(cmp);
    if (cexp->parsed()) return cmd_experiment(config_file);
  } catch (const CapacityError& e) {
    std::cerr << "capacity error: " << e.what() << "\n";
    return kExitCapacity;
  } catch (const MissingOracleError& e) {
    std::cerr << "missing oracle: " << e.what() << "\n";
    return kExitMissingOracle;
  } catch (const GenerationError& e) {
    std::cerr << "generation error: " << e.what() << "\n";
    return kExitGeneration;
  } catch (const ConsistencyError& e) {
    std::cerr << "consistency error: " << e.what() << "\n";
    return kExitInput;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitOk;
}
