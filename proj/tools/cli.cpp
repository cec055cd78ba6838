#include "cli.hpp"

#include <cstdlib>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "netweave/baselines.hpp"
#include "netweave/errors.hpp"
#include "netweave/fightwords.hpp"
#include "netweave/generate.hpp"
#include "netweave/homophily.hpp"
#include "netweave/logging.hpp"
#include "netweave/metrics.hpp"
#include "netweave/mock_backend.hpp"
#include "netweave/persona.hpp"
#include "netweave/prompt.hpp"
#include "netweave/remote_backend.hpp"
#include "netweave/study.hpp"

namespace netweave::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Options every leaf subcommand accepts. Only one subcommand runs per
// invocation, so a single instance is shared.
struct Common {
  std::uint64_t seed = 0;
  std::string out;
  std::string backend;
  std::size_t parallel = 1;
  std::string config;
  std::string mock_config;
  std::string api_base;
  int verbose = 0;
  bool quiet = false;
};

void add_common(CLI::App* sub, Common& c, const std::string& out_help) {
  sub->add_option("--seed", c.seed, "Base seed; every random choice derives from it");
  sub->add_option("--out", c.out, out_help);
  sub->add_option("--backend", c.backend, "Text backend (default remote)")
      ->check(CLI::IsMember({"remote", "mock"}));
  sub->add_option("--parallel", c.parallel, "Concurrent backend calls (default 1)")
      ->check(CLI::PositiveNumber);
  sub->add_option("--config", c.config, "JSON config file")->check(CLI::ExistingFile);
  sub->add_option("--mock-config", c.mock_config, "JSON policy for the mock backend")
      ->check(CLI::ExistingFile);
  sub->add_option("--api-base", c.api_base, "Chat-completions base URL for the remote backend");
  sub->add_flag("-v,--verbose", c.verbose, "More diagnostics on stderr (repeatable)");
  sub->add_flag("-q,--quiet", c.quiet, "Errors only on stderr");
}

struct Settings {
  std::uint64_t seed = 0;
  std::size_t parallel = 1;
  std::string backend = "remote";
  RemoteConfig remote;
  MockConfig mock = signature_mock_config();
  std::optional<std::string> model;
  /// "config.<key>" -> "<value> (<source>)"
  std::map<std::string, std::string> provenance;
};

std::optional<std::string> env(const char* name) {
  const char* v = std::getenv(name);
  if (v == nullptr || *v == '\0') return std::nullopt;
  return std::string(v);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError(fmt::format("cannot read '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Precedence: flags > environment > config file > defaults.
Settings resolve(const Common& c, const CLI::App& sub) {
  json file = json::object();
  if (!c.config.empty()) {
    try {
      file = json::parse(slurp(c.config));
    } catch (const json::exception& e) {
      throw UsageError(fmt::format("config file '{}': {}", c.config, e.what()));
    }
    if (!file.is_object()) throw UsageError(fmt::format("config file '{}' is not an object", c.config));
  }
  Settings s;
  auto note = [&](const std::string& key, const std::string& value, const char* source) {
    s.provenance["config." + key] = fmt::format("{} ({})", value, source);
  };

  try {
    if (sub.count("--seed") > 0) {
      s.seed = c.seed;
      note("seed", std::to_string(s.seed), "flag");
    } else if (file.contains("seed")) {
      s.seed = file.at("seed").get<std::uint64_t>();
      note("seed", std::to_string(s.seed), "config");
    } else {
      note("seed", "0", "default");
    }

    if (sub.count("--parallel") > 0) {
      s.parallel = c.parallel;
      note("parallel", std::to_string(s.parallel), "flag");
    } else if (file.contains("parallel")) {
      s.parallel = file.at("parallel").get<std::size_t>();
      if (s.parallel == 0) throw UsageError("config 'parallel' must be at least 1");
      note("parallel", std::to_string(s.parallel), "config");
    } else {
      note("parallel", "1", "default");
    }

    if (sub.count("--backend") > 0) {
      s.backend = c.backend;
      note("backend", s.backend, "flag");
    } else if (file.contains("backend")) {
      s.backend = file.at("backend").get<std::string>();
      if (s.backend != "remote" && s.backend != "mock") {
        throw UsageError(fmt::format("config 'backend' must be remote or mock, not '{}'", s.backend));
      }
      note("backend", s.backend, "config");
    } else {
      note("backend", s.backend, "default");
    }

    if (file.contains("model")) {
      s.model = file.at("model").get<std::string>();
      note("model", *s.model, "config");
    }

    if (sub.count("--api-base") > 0) {
      s.remote.base_url = c.api_base;
      note("api_base", s.remote.base_url, "flag");
    } else if (auto v = env("NETWEAVE_API_BASE")) {
      s.remote.base_url = *v;
      note("api_base", *v, "environment");
    } else if (file.contains("api_base")) {
      s.remote.base_url = file.at("api_base").get<std::string>();
      note("api_base", s.remote.base_url, "config");
    }
    // The key itself never goes into provenance.
    if (auto v = env("NETWEAVE_API_KEY")) {
      s.remote.api_key = *v;
      note("api_key", "set", "environment");
    } else if (file.contains("api_key")) {
      s.remote.api_key = file.at("api_key").get<std::string>();
      note("api_key", "set", "config");
    }
    if (file.contains("requests_per_minute")) {
      s.remote.requests_per_minute = file.at("requests_per_minute").get<double>();
    }
    if (file.contains("timeout_seconds")) {
      s.remote.timeout = std::chrono::milliseconds(
          static_cast<long long>(file.at("timeout_seconds").get<double>() * 1000.0));
    }
    if (file.contains("max_tokens")) s.remote.max_tokens = file.at("max_tokens").get<std::size_t>();

    if (sub.count("--mock-config") > 0) {
      s.mock = load_mock_config(c.mock_config);
      note("mock", c.mock_config, "flag");
    } else if (file.contains("mock")) {
      s.mock = parse_mock_config(file.at("mock").dump());
      note("mock", "inline", "config");
    }
  } catch (const json::exception& e) {
    throw UsageError(fmt::format("config file '{}': {}", c.config, e.what()));
  }
  return s;
}

void apply_verbosity(const Common& c) {
  if (c.quiet) {
    set_log_level(LogLevel::Error);
  } else if (c.verbose >= 2) {
    set_log_level(LogLevel::Debug);
  } else if (c.verbose == 1) {
    set_log_level(LogLevel::Info);
  } else {
    set_log_level(LogLevel::Warn);
  }
}

std::unique_ptr<TextBackend> make_backend(const Settings& s) {
  if (s.backend == "mock") return std::make_unique<MockBackend>(s.mock);
  if (s.remote.base_url.empty()) {
    throw UsageError(
        "the remote backend needs a base URL: set NETWEAVE_API_BASE, pass --api-base, or use "
        "--backend mock");
  }
  return std::make_unique<RemoteBackend>(s.remote);
}

// Sends `text` to the --out file when given, stdout otherwise.
void emit(const std::string& out_path, const std::string& text, std::ostream& out) {
  if (out_path.empty()) {
    out << text;
    return;
  }
  const fs::path p(out_path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(fmt::format("cannot write '{}'", out_path));
  f << text;
  if (!f.flush()) throw Error(fmt::format("short write to '{}'", out_path));
}

std::string num(double v) { return fmt::format("{}", v); }
std::string num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

std::string csv_field(const std::string& v) {
  if (v.find_first_of(",\"\n\r") == std::string::npos) return v;
  std::string q = "\"";
  for (char c : v) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + '"';
}

// ---- subcommand state --------------------------------------------------

struct RosterSampleArgs {
  std::string marginals;
  std::size_t n = 50;
};

struct RosterShowArgs {
  std::string roster;
  bool baselines = false;
};

struct GenerateArgs {
  std::string method = "sequential";
  std::string language = "en";
  std::string culture = "us";
  std::string model;
  std::size_t k = 12;
  std::size_t rounds = 3;
  double temperature = 0.8;
  bool include_reason = false;
  std::size_t max_retries = 3;
  std::string roster;
  std::string templates;
  std::string transcript;
};

struct AnalyzeArgs {
  std::vector<std::string> files;
  std::string roster;
};

struct CompareArgs {
  std::vector<std::string> files;
};

struct BaselineArgs {
  std::size_t n = 50;
  double density = 0.19;
  std::size_t seeds = 30;
  std::vector<std::string> families{"ER", "BA", "WS"};
  double beta = 0.1;
  bool per_seed = false;
};

struct StudyRunArgs {
  std::string study;
  std::string manifest;
  std::vector<std::string> models;
  std::size_t seeds_per_condition = 2;
  bool resume = false;
  bool include_reason = false;
  std::string roster;
  std::string templates;
  std::size_t k = 12;
  std::size_t rounds = 3;
  double temperature = 0.8;
  std::size_t max_retries = 3;
};

struct StudyAnalyzeArgs {
  std::string directory;
  std::string roster;
  std::vector<std::string> models;
};

struct FightwordsArgs {
  std::string directory;
  std::vector<std::string> a;
  std::vector<std::string> b;
  double alpha0 = 0.0;
  std::size_t ngram = 2;
  std::size_t top = 0;
};

fs::path roster_path(const std::string& flag) {
  return flag.empty() ? canonical_roster_path() : fs::path(flag);
}

fs::path template_path(const std::string& flag) {
  return flag.empty() ? default_template_dir() : fs::path(flag);
}

// ---- handlers ------------------------------------------------------------

int run_roster_sample(const RosterSampleArgs& a, const Common& c, const Settings& s,
                      std::ostream& out) {
  const fs::path mpath = a.marginals.empty() ? canonical_marginals_path() : fs::path(a.marginals);
  const Roster roster = sample_roster(load_marginals(mpath), a.n, s.seed);
  emit(c.out, format_roster(roster), out);
  return kExitOk;
}

int run_roster_show(const RosterShowArgs& a, const Common& c, std::ostream& out) {
  const Roster roster = load_roster(roster_path(a.roster));
  std::ostringstream csv;
  if (a.baselines) {
    csv << "attribute,matching_pairs,total_pairs,baseline\n";
    const std::uint64_t n = roster.size();
    for (Attribute attr : kAllAttributes) {
      csv << attribute_name(attr) << ',' << matching_pair_count(roster, attr) << ','
          << n * (n - 1) << ',' << num(baseline_probability(roster, attr)) << '\n';
    }
  } else {
    csv << "attribute,group,count\n";
    for (Attribute attr : kCategoricalAttributes) {
      for (const auto& [group, ids] : partition(roster, attr).groups) {
        csv << attribute_name(attr) << ',' << csv_field(group) << ',' << ids.size() << '\n';
      }
    }
    std::map<std::string, std::size_t> tags;
    for (const auto& p : roster.personas()) {
      for (const auto& t : p.interests) ++tags[t];
    }
    for (const auto& [tag, count] : tags) {
      csv << "interests," << csv_field(tag) << ',' << count << '\n';
    }
  }
  emit(c.out, csv.str(), out);
  return kExitOk;
}

int run_generate(const GenerateArgs& a, const Common& c, const Settings& s, std::ostream& out,
                 std::ostream& err) {
  const Method method = method_from_name(a.method);
  const Language language = language_from_code(a.language);
  const Culture culture = culture_from_name(a.culture);
  const Roster roster = load_roster(roster_path(a.roster));

  GenerationConfig config;
  config.model = !a.model.empty() ? a.model : s.model.value_or("gpt-4.1-mini");
  config.k = a.k;
  config.rounds = a.rounds;
  config.temperature = a.temperature;
  config.seed = s.seed;
  config.include_reason = a.include_reason;
  config.retry.max_retries = a.max_retries;
  config.parallelism = s.parallel;
  config.validate(method, roster.size());

  const TemplateStore store(template_path(a.templates));
  const PromptTemplate tpl = store.load(method, language, culture);
  auto backend = make_backend(s);

  std::map<std::string, std::string> labels = s.provenance;
  labels["method"] = std::string(method_name(method));
  labels["language"] = std::string(language_code(language));
  labels["culture"] = std::string(culture_name(culture));
  labels["model"] = config.model;

  auto save_transcript = [&](Transcript t) {
    if (a.transcript.empty()) return;
    t.labels.insert(labels.begin(), labels.end());
    emit(a.transcript, transcript_to_json(t), out);
  };

  GenerationResult result;
  try {
    switch (method) {
      case Method::Sequential: result = generate_sequential(*backend, roster, tpl, config); break;
      case Method::Global: result = generate_global(*backend, roster, tpl, config); break;
      case Method::Local: result = generate_local(*backend, roster, tpl, config); break;
      case Method::Iterative:
        result = generate_iterative(*backend, roster,
                                    store.load(Method::Sequential, language, culture), tpl, config);
        break;
    }
  } catch (const GenerationError& e) {
    save_transcript(e.transcript());
    err << "netweave: generation failed: " << e.what() << '\n';
    return kExitFailure;
  }
  const VerificationReport report = verify_network(result.network, roster);
  if (!report.passed) {
    save_transcript(result.transcript);
    err << "netweave: network failed verification: " << report.violations.front() << '\n';
    return kExitFailure;
  }
  save_transcript(result.transcript);
  emit(c.out, format_adj(result.network), out);
  return kExitOk;
}

int run_analyze(const AnalyzeArgs& a, const Common& c, std::ostream& out) {
  const Roster roster = load_roster(roster_path(a.roster));
  std::ostringstream csv;
  csv << "network,node_count,edge_count,density,avg_clustering,lcc,avg_path,modularity";
  for (Attribute attr : kAllAttributes) {
    csv << ",share_" << attribute_name(attr) << ",ratio_" << attribute_name(attr);
  }
  csv << '\n';
  for (const auto& file : a.files) {
    const DirectedNetwork g = read_adj(file);
    const MetricsReport m = compute_metrics(g);
    csv << csv_field(file) << ',' << m.node_count << ',' << m.edge_count << ',' << num(m.density)
        << ',' << num(m.avg_clustering) << ',' << num(m.lcc) << ',' << num(m.avg_path) << ','
        << num(m.modularity);
    for (const auto& h : homophily_profile(g, roster)) {
      csv << ',' << (h.status == HomophilyStatus::EmptyNetwork ? "" : num(h.raw_share)) << ','
          << (h.defined() ? num(h.ratio) : "");
    }
    csv << '\n';
  }
  emit(c.out, csv.str(), out);
  return kExitOk;
}

int run_compare(const CompareArgs& a, const Common& c, std::ostream& out) {
  std::vector<DirectedNetwork> graphs;
  for (const auto& f : a.files) graphs.push_back(read_adj(f));
  std::ostringstream csv;
  csv << "a,b,edge_distance,degree_ks\n";
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    for (std::size_t j = i + 1; j < graphs.size(); ++j) {
      const auto da = degree_sequence(graphs[i]);
      const auto db = degree_sequence(graphs[j]);
      csv << csv_field(a.files[i]) << ',' << csv_field(a.files[j]) << ','
          << num(edge_distance(graphs[i], graphs[j])) << ',' << num(ks_statistic(da, db)) << '\n';
    }
  }
  emit(c.out, csv.str(), out);
  return kExitOk;
}

int run_baselines(const BaselineArgs& a, const Common& c, const Settings& s, std::ostream& out) {
  CalibrationTarget target;
  target.n = a.n;
  target.density = a.density;
  // Seed i of the suite is base + i.
  for (std::size_t i = 0; i < a.seeds; ++i) target.seeds.push_back(s.seed + i);
  std::vector<BaselineFamily> families;
  for (const auto& f : a.families) families.push_back(family_from_name(f));
  const auto suites = baseline_suite(target, families, a.beta, s.parallel);
  std::ostringstream csv;
  if (a.per_seed) {
    write_suite_csv(csv, suites);
  } else {
    write_suite_summary_csv(csv, suites);
  }
  emit(c.out, csv.str(), out);
  return kExitOk;
}

int run_study_run(const StudyRunArgs& a, const Common& c, const Settings& s, const CLI::App& sub,
                  std::ostream& out, std::ostream& err) {
  if (a.study.empty() && a.manifest.empty()) {
    throw UsageError("study run needs --study or --manifest");
  }
  const Roster roster = load_roster(roster_path(a.roster));
  auto backend = make_backend(s);

  std::vector<StudyManifest> manifests;
  if (!a.manifest.empty()) {
    manifests.push_back(load_manifest(a.manifest));
  } else {
    std::vector<StudyKind> kinds;
    if (a.study == "all") {
      kinds.assign(kAllStudies.begin(), kAllStudies.end());
    } else {
      kinds.push_back(study_from_name(a.study));
    }
    const fs::path out_dir = c.out.empty() ? fs::path("runs") : fs::path(c.out);
    for (StudyKind k : kinds) {
      StudyManifest m = make_manifest(k, out_dir, template_path(a.templates), a.models);
      m.conditions = enumerate_matrix(k, m.models, a.seeds_per_condition);
      m.base_seed = s.seed;
      manifests.push_back(std::move(m));
    }
  }

  // Flags given explicitly override manifest values.
  for (auto& m : manifests) {
    if (!a.manifest.empty()) {
      if (!c.out.empty()) m.output_dir = c.out;
      if (!a.templates.empty()) m.template_dir = a.templates;
      if (sub.count("--seed") > 0) m.base_seed = s.seed;
    }
    if (sub.count("--k") > 0 || a.manifest.empty()) m.generation.k = a.k;
    if (sub.count("--rounds") > 0 || a.manifest.empty()) m.generation.rounds = a.rounds;
    if (sub.count("--temperature") > 0 || a.manifest.empty()) {
      m.generation.temperature = a.temperature;
    }
    if (sub.count("--max-retries") > 0 || a.manifest.empty()) {
      m.generation.retry.max_retries = a.max_retries;
    }
    if (a.include_reason) m.generation.include_reason = true;
    if (sub.count("--parallel") > 0 || a.manifest.empty()) m.parallelism = s.parallel;
    m.labels = s.provenance;
    m.validate();
  }

  std::ostringstream csv;
  csv << "study,generated,skipped,failed\n";
  bool any_failed = false;
  for (const auto& m : manifests) {
    const RunSummary r = run_study(m, roster, *backend, a.resume);
    csv << study_name(m.study) << ',' << r.generated << ',' << r.skipped << ',' << r.failed << '\n';
    for (const auto& f : r.failures) {
      err << "netweave: " << f.filename << ": " << f.message << '\n';
    }
    any_failed = any_failed || r.failed > 0;
  }
  out << csv.str();
  return any_failed ? kExitFailure : kExitOk;
}

int run_study_analyze(const StudyAnalyzeArgs& a, const Common& c, std::ostream& out,
                      std::ostream& err) {
  const Roster roster = load_roster(roster_path(a.roster));
  std::vector<std::string> models = a.models.empty() ? default_models() : a.models;
  const StudyAnalysis analysis = analyze_study(a.directory, roster, models);
  const fs::path dest = c.out.empty() ? fs::path(a.directory) / "analysis" : fs::path(c.out);
  write_analysis(analysis, dest);
  for (const auto& f : analysis.skipped) err << "netweave: skipped " << f << '\n';
  std::ostringstream csv;
  write_method_homophily_csv(csv, analysis);
  out << csv.str();
  return analysis.skipped.empty() ? kExitOk : kExitFailure;
}

int run_fightwords(const FightwordsArgs& a, const Common& c, std::ostream& out) {
  TokenizerConfig tok;
  tok.max_ngram = a.ngram;
  const Corpus ca = collect_reasons(a.directory, label_filter(a.a), tok);
  const Corpus cb = collect_reasons(a.directory, label_filter(a.b), tok);
  const double alpha0 = a.alpha0 > 0.0 ? a.alpha0 : default_alpha0(ca, cb);
  auto results = fighting_words(ca, cb, alpha0);
  if (a.top > 0 && results.size() > a.top) results.resize(a.top);
  std::ostringstream csv;
  write_fighting_words_csv(csv, results);
  emit(c.out, csv.str(), out);
  return kExitOk;
}

// argv-style storage for CLI11, which wants mutable C strings.
struct Argv {
  std::vector<std::string> storage;
  std::vector<char*> pointers;

  explicit Argv(const std::vector<std::string>& args) : storage{"netweave"} {
    storage.insert(storage.end(), args.begin(), args.end());
    for (auto& s : storage) pointers.push_back(s.data());
  }
  int argc() const { return static_cast<int>(pointers.size()); }
  char** argv() { return pointers.data(); }
};

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Simulate social networks from persona prompts and analyze their structure",
               "netweave"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);
  app.set_version_flag("--version", "netweave 0.1.0");

  Common common;
  const std::vector<std::string> method_names{"sequential", "global", "local", "iterative"};
  const std::vector<std::string> language_codes{"en", "es", "hi", "ja"};
  const std::vector<std::string> culture_names{"us", "india", "japan", "brazil"};

  // roster
  auto* roster = app.add_subcommand("roster", "Sample or inspect persona rosters");
  roster->require_subcommand(1);
  RosterSampleArgs sample_args;
  auto* sample = roster->add_subcommand("sample", "Sample a roster from attribute marginals");
  sample->add_option("--marginals", sample_args.marginals, "Marginals JSON (default: shipped US)")
      ->check(CLI::ExistingFile);
  sample->add_option("--n", sample_args.n, "Number of personas")->check(CLI::Range(2, 200));
  add_common(sample, common, "Roster JSON output (default stdout)");

  RosterShowArgs show_args;
  auto* show = roster->add_subcommand("show", "Group counts or pair baselines of a roster");
  show->add_option("roster", show_args.roster, "Roster JSON (default: shipped roster)")
      ->check(CLI::ExistingFile);
  show->add_flag("--baselines", show_args.baselines, "Print same-group pair baselines instead");
  add_common(show, common, "CSV output (default stdout)");

  // generate
  GenerateArgs gen_args;
  auto* gen = app.add_subcommand("generate", "Generate one network");
  gen->add_option("--method", gen_args.method, "Generation method")
      ->check(CLI::IsMember(method_names, CLI::ignore_case));
  gen->add_option("--language", gen_args.language, "Prompt language")
      ->check(CLI::IsMember(language_codes, CLI::ignore_case));
  gen->add_option("--culture", gen_args.culture, "Cultural framing")
      ->check(CLI::IsMember(culture_names, CLI::ignore_case));
  gen->add_option("--model", gen_args.model, "Model id sent to the backend");
  gen->add_option("--k", gen_args.k, "Local neighborhood size");
  gen->add_option("--rounds", gen_args.rounds, "Iterative revision rounds");
  gen->add_option("--temperature", gen_args.temperature, "Sampling temperature");
  gen->add_flag("--include-reason", gen_args.include_reason, "Ask for a reason per tie");
  gen->add_option("--max-retries", gen_args.max_retries, "Retries per backend call");
  gen->add_option("--roster", gen_args.roster, "Roster JSON (default: shipped roster)")
      ->check(CLI::ExistingFile);
  gen->add_option("--templates", gen_args.templates, "Template directory")
      ->check(CLI::ExistingDirectory);
  gen->add_option("--transcript", gen_args.transcript, "Write the call transcript here");
  add_common(gen, common, ".adj output (default stdout)");

  // analyze
  AnalyzeArgs analyze_args;
  auto* analyze = app.add_subcommand("analyze", "Topology and homophily of .adj files");
  analyze->add_option("files", analyze_args.files, ".adj files")
      ->required()
      ->check(CLI::ExistingFile);
  analyze->add_option("--roster", analyze_args.roster, "Roster JSON (default: shipped roster)")
      ->check(CLI::ExistingFile);
  add_common(analyze, common, "CSV output (default stdout)");

  // compare
  CompareArgs compare_args;
  auto* compare = app.add_subcommand("compare", "Edge distance and degree KS between networks");
  compare->add_option("files", compare_args.files, ".adj files (at least two)")
      ->required()
      ->expected(2, -1)
      ->check(CLI::ExistingFile);
  add_common(compare, common, "CSV output (default stdout)");

  // baselines
  BaselineArgs base_args;
  auto* base = app.add_subcommand("baselines", "Density-matched ER, BA and WS suites");
  base->add_option("--n", base_args.n, "Nodes per network")->check(CLI::Range(3, 100000));
  base->add_option("--density", base_args.density, "Target density")
      ->check(CLI::Range(0.0, 1.0));
  base->add_option("--seeds", base_args.seeds, "Seeds per family (seed, seed+1, ...)")
      ->check(CLI::Range(2, 100000));
  base->add_option("--families", base_args.families, "Families to run")
      ->delimiter(',')
      ->check(CLI::IsMember({"ER", "BA", "WS"}, CLI::ignore_case));
  base->add_option("--beta", base_args.beta, "Watts-Strogatz rewiring probability")
      ->check(CLI::Range(0.0, 1.0));
  base->add_flag("--per-seed", base_args.per_seed, "One row per network instead of summaries");
  add_common(base, common, "CSV output (default stdout)");

  // study
  auto* study = app.add_subcommand("study", "Run or analyze the experiment matrix");
  study->require_subcommand(1);
  StudyRunArgs run_args;
  auto* run = study->add_subcommand("run", "Generate every condition of a study");
  run->add_option("--study", run_args.study, "Study to run")
      ->check(CLI::IsMember({"cultural", "method", "language", "all"}, CLI::ignore_case));
  run->add_option("--manifest", run_args.manifest, "Manifest JSON")->check(CLI::ExistingFile);
  run->add_option("--models", run_args.models, "Model ids (default: the three compared models)")
      ->delimiter(',');
  run->add_option("--seeds-per-condition", run_args.seeds_per_condition, "Seeds per condition")
      ->check(CLI::Range(1, 1000));
  run->add_flag("--resume", run_args.resume, "Skip conditions whose .adj already verifies");
  run->add_flag("--include-reason", run_args.include_reason, "Ask for a reason per tie");
  run->add_option("--roster", run_args.roster, "Roster JSON (default: shipped roster)")
      ->check(CLI::ExistingFile);
  run->add_option("--templates", run_args.templates, "Template directory")
      ->check(CLI::ExistingDirectory);
  run->add_option("--k", run_args.k, "Local neighborhood size");
  run->add_option("--rounds", run_args.rounds, "Iterative revision rounds");
  run->add_option("--temperature", run_args.temperature, "Sampling temperature");
  run->add_option("--max-retries", run_args.max_retries, "Retries per backend call");
  add_common(run, common, "Output root; files go to <out>/<study>/ (default runs)");

  StudyAnalyzeArgs sa_args;
  auto* sa = study->add_subcommand("analyze", "Analyze a directory of study networks");
  sa->add_option("dir", sa_args.directory, "Study directory holding .adj files")
      ->required()
      ->check(CLI::ExistingDirectory);
  sa->add_option("--roster", sa_args.roster, "Roster JSON (default: shipped roster)")
      ->check(CLI::ExistingFile);
  sa->add_option("--models", sa_args.models, "Model ids used in file names")->delimiter(',');
  add_common(sa, common, "Directory for the CSV tables (default <dir>/analysis)");

  // fightwords
  FightwordsArgs fw_args;
  auto* fw = app.add_subcommand("fightwords", "Distinctive reason terms between two groups");
  fw->add_option("dir", fw_args.directory, "Directory searched for transcripts")
      ->required()
      ->check(CLI::ExistingDirectory);
  fw->add_option("--a", fw_args.a, "Label filter key=value for group A (repeatable)");
  fw->add_option("--b", fw_args.b, "Label filter key=value for group B (repeatable)");
  fw->add_option("--alpha0", fw_args.alpha0, "Prior mass (default 0.01 x pooled count)")
      ->check(CLI::NonNegativeNumber);
  fw->add_option("--ngram", fw_args.ngram, "Longest n-gram")->check(CLI::Range(1, 3));
  fw->add_option("--top", fw_args.top, "Rows to keep (0 keeps all)");
  add_common(fw, common, "CSV output (default stdout)");

  Argv argv(args);
  try {
    app.parse(argv.argc(), argv.argv());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  const CLI::App* leaf = &app;
  while (!leaf->get_subcommands().empty()) leaf = leaf->get_subcommands().front();

  try {
    apply_verbosity(common);
    const Settings settings = resolve(common, *leaf);
    if (leaf == sample) return run_roster_sample(sample_args, common, settings, out);
    if (leaf == show) return run_roster_show(show_args, common, out);
    if (leaf == gen) return run_generate(gen_args, common, settings, out, err);
    if (leaf == analyze) return run_analyze(analyze_args, common, out);
    if (leaf == compare) return run_compare(compare_args, common, out);
    if (leaf == base) return run_baselines(base_args, common, settings, out);
    if (leaf == run) return run_study_run(run_args, common, settings, *run, out, err);
    if (leaf == sa) return run_study_analyze(sa_args, common, out, err);
    if (leaf == fw) return run_fightwords(fw_args, common, out);
    err << app.help();
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "netweave: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "netweave: " << e.what() << '\n';
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "netweave: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace netweave::cli
