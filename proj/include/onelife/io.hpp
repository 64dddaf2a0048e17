#pragma once

#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "onelife/edm.hpp"
#include "onelife/evaluation.hpp"
#include "onelife/history.hpp"
#include "onelife/inference.hpp"
#include "onelife/types.hpp"
#include "onelife/world.hpp"

namespace onelife {

using AnyWorld = std::variant<PerfectWorld, RandomWorld>;

const WorldLabels& labels_of(const AnyWorld& w);

// World files: header, alphabets, one transition triple per line, view and
// incorrect tables, current state. Printing is canonical (fixed order,
// declaration-ordered tables); parse(print(w)) is the identity on canonical
// form.
AnyWorld parse_world(std::istream& in);
AnyWorld load_world(const std::string& path);
std::string print_world(const AnyWorld& w);

// Model files: states (outside flagged), kind-tagged events, arrow triples,
// optional variable declarations and update table.
struct ModelFile {
  VariablesModel model;  // no variables: the base carries everything

  const EventDrivenModel& base() const { return model.base; }
  bool has_variables() const { return !model.variables.empty(); }
};

ModelFile parse_model(std::istream& in);
ModelFile load_model(const std::string& path);
std::string print_model(const ModelFile& m);

// Event definition files, resolved against a world's alphabets. Pattern
// syntax per element: bad/action/obs with '*' wildcards, '+x' containment,
// '{a,b}' exact sets; elements joined by ';', alternative members by '|'.
std::vector<EventDef> parse_event_defs(std::istream& in, const WorldLabels& labels);
std::vector<EventDef> load_event_defs(const std::string& path, const WorldLabels& labels);

ChiTranscript parse_chi(std::istream& in);
ChiTranscript load_chi(const std::string& path);

// Life logs: one `bad={...} action=... obs=...` line per step, optional
// final `pending bad={...} action=...`; set elements ordered by label name.
History parse_life_log(std::istream& in, const WorldLabels& labels);
History load_life_log(const std::string& path, const WorldLabels& labels);
std::string print_life_log(const History& h, const WorldLabels& labels);

// Ground-truth state path files.
struct PathFile {
  StatePath path;
  TerminationCause cause = TerminationCause::NaturalDeath;
};

PathFile parse_path(std::istream& in, const WorldLabels& labels);
PathFile load_path(const std::string& path, const WorldLabels& labels);
std::string print_path(const PathFile& p, const WorldLabels& labels);

// Reward maps: `<observation> <score-or-undef>...` per observation, total
// over the alphabet.
RewardMap parse_rewards(std::istream& in, const WorldLabels& labels);
RewardMap load_rewards(const std::string& path, const WorldLabels& labels);

// Score traces: CSV, one row per step, one column per criterion, Undef
// spelled `undef`.
ScoreSequence parse_scores_csv(std::istream& in);
ScoreSequence load_scores_csv(const std::string& path);
std::string print_scores_csv(const ScoreSequence& s);

std::string findings_csv(std::span<const TraceFinding> findings,
                         std::span<const std::string> state_names,
                         std::span<const std::string> label_names,
                         std::span<const std::string> event_names);

// Experiment configuration: `key=value` lines; every referenced file must
// exist at load.
struct ExperimentConfig {
  std::uint64_t seed = 0;
  std::string world_file;
  std::string policy = "uniform";
  int horizon = 0;
  std::string events_file;
  std::string model_file;
  std::string chi_file;
  std::string rewards_file;
  int window = 0;
  double min_support = 30.0;
  double threshold = 3.0;
  int lag = 1;
  double significance = 0.05;
  std::string output_directory = ".";
};

ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);

// Shortest-round-trip decimal form (to_chars); NaN/Inf are input errors.
std::string format_double(double v);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace onelife
