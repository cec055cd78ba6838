#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "netweave/backend.hpp"
#include "netweave/generate.hpp"
#include "netweave/homophily.hpp"
#include "netweave/metrics.hpp"
#include "netweave/persona.hpp"
#include "netweave/prompt.hpp"

namespace netweave {

enum class StudyKind { Cultural, Method, Language };
inline constexpr std::array<StudyKind, 3> kAllStudies{StudyKind::Cultural, StudyKind::Method,
                                                      StudyKind::Language};

std::string_view study_name(StudyKind s) noexcept;  // "cultural", "method", "language"
StudyKind study_from_name(std::string_view name);

/// The three model variants compared by default; any ids work.
std::vector<std::string> default_models();

struct Condition {
  StudyKind study = StudyKind::Cultural;
  Culture culture = Culture::US;
  Language language = Language::En;
  Method method = Method::Sequential;
  std::string model;
  std::uint64_t seed = 0;  // seed index within the condition

  auto operator<=>(const Condition&) const = default;
};

/// Throws UsageError unless the condition fits its study: cultural is English
/// sequential; method is English with global, local or iterative; language is
/// US framing.
void validate_condition(const Condition& c);

/// Every condition of a study: cultural 4 cultures x 2 seeds x models,
/// method 4 cultures x 3 methods x 2 seeds x models, language 4 languages x
/// 4 methods x 2 seeds x models. Sorted.
std::vector<Condition> enumerate_matrix(StudyKind study,
                                        std::span<const std::string> models = {},
                                        std::size_t seeds_per_condition = 2);

/// "METHOD_model_TOKEN_SEED.adj": uppercase method, model with '.' and '/'
/// replaced by '-', the culture (cultural and method studies) or language
/// (language study) uppercased, and the seed index.
std::string condition_filename(const Condition& c);

/// Inverse of condition_filename. Sanitized model names are mapped back
/// through `known_models` (default_models() when empty). Empty on malformed
/// names.
std::optional<Condition> parse_filename(std::string_view filename,
                                        std::span<const std::string> known_models = {});

/// Generation seed for a condition, derived from the base seed and every
/// condition field so that adding conditions never perturbs existing ones.
std::uint64_t condition_seed(std::uint64_t base_seed, const Condition& c);

struct StudyManifest {
  StudyKind study = StudyKind::Cultural;
  std::vector<Condition> conditions;
  std::filesystem::path output_dir;    // files go to <output_dir>/<study>/
  std::filesystem::path template_dir;
  std::vector<std::string> models;
  std::uint64_t base_seed = 0;
  /// Per-condition settings; model and seed are overwritten per condition.
  GenerationConfig generation;
  /// Conditions generated concurrently.
  std::size_t parallelism = 1;
  /// Extra transcript labels, such as where each setting came from.
  std::map<std::string, std::string> labels;

  /// Throws UsageError on duplicate or invalid conditions.
  void validate() const;
  std::filesystem::path study_dir() const;
};

/// A manifest for the full matrix of `study`.
StudyManifest make_manifest(StudyKind study, std::filesystem::path output_dir,
                            std::filesystem::path template_dir,
                            std::vector<std::string> models = {});

/// JSON: {"study": "language", "models": [...], "seeds": 2, "output": dir,
/// "templates": dir, "overrides": {"seed", "k", "rounds", "temperature",
/// "include_reason", "max_retries", "parallel"}}. Relative paths resolve
/// against `base_dir`. Throws ParseError.
StudyManifest parse_manifest(std::string_view json_text, const std::filesystem::path& base_dir);
StudyManifest load_manifest(const std::filesystem::path& path);

struct ConditionFailure {
  std::string filename;
  std::string message;
  std::filesystem::path transcript;
};

struct RunSummary {
  std::size_t generated = 0;
  std::size_t skipped = 0;
  std::size_t failed = 0;
  std::vector<ConditionFailure> failures;
};

/// Generates, verifies and writes every condition. Checks that all templates
/// exist before generating anything (TemplateError). Each .adj is written
/// atomically; with `resume`, conditions whose .adj already exists and
/// verifies are skipped. A failing condition is recorded and the run goes on.
RunSummary run_study(const StudyManifest& manifest, const Roster& roster, TextBackend& backend,
                     bool resume);

/// Generates one condition without touching the filesystem.
GenerationResult generate_condition(const Condition& c, const Roster& roster,
                                    TextBackend& backend, const TemplateStore& templates,
                                    GenerationConfig config, std::uint64_t base_seed);

struct AnalyzedNetwork {
  std::string filename;
  Condition condition;
  MetricsReport metrics;
  std::vector<HomophilyReport> homophily;
};

struct ModelPairStat {
  std::string model_a;  // model_a < model_b
  std::string model_b;
  double mean = 0.0;
  std::size_t matched = 0;  // condition pairs averaged
};

struct MethodHomophily {
  Method method = Method::Sequential;
  std::map<Attribute, double> mean_ratio;  // over networks where the ratio is defined
  std::optional<Attribute> argmax;
  std::size_t networks = 0;
};

struct StudyAnalysis {
  std::vector<AnalyzedNetwork> networks;
  std::vector<ModelPairStat> edge_distance;
  std::vector<ModelPairStat> degree_ks;
  std::vector<MethodHomophily> by_method;
  std::vector<std::string> skipped;  // files that could not be used
};

/// Reads every .adj in `directory`, skipping (with a warning) files whose
/// names do not parse. Model pairs are compared over conditions that differ
/// only in model. Throws UsageError when nothing is analyzable.
StudyAnalysis analyze_study(const std::filesystem::path& directory, const Roster& roster,
                            std::span<const std::string> known_models = {});

void write_topology_csv(std::ostream& out, const StudyAnalysis& a);
void write_homophily_csv(std::ostream& out, const StudyAnalysis& a);
void write_pair_csv(std::ostream& out, std::span<const ModelPairStat> stats,
                    std::string_view value_column);
void write_method_homophily_csv(std::ostream& out, const StudyAnalysis& a);

/// Writes topology.csv, homophily.csv, edge_distance.csv, degree_ks.csv and
/// homophily_summary.csv under `directory`.
void write_analysis(const StudyAnalysis& a, const std::filesystem::path& directory);

}  // namespace netweave
