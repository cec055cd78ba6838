#include "netweave/study.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "csv.hpp"
#include "file_util.hpp"
#include "log.hpp"
#include "netweave/errors.hpp"
#include "netweave/network.hpp"
#include "netweave/random.hpp"
#include "parallel.hpp"
#include "text_util.hpp"

namespace netweave {

std::string_view study_name(StudyKind s) noexcept {
  switch (s) {
    case StudyKind::Cultural: return "cultural";
    case StudyKind::Method: return "method";
    case StudyKind::Language: return "language";
  }
  return "unknown";
}

StudyKind study_from_name(std::string_view name) {
  const std::string lower = detail::to_lower(name);
  for (StudyKind s : kAllStudies) {
    if (study_name(s) == lower) return s;
  }
  throw UsageError(fmt::format("unknown study '{}'", name));
}

std::vector<std::string> default_models() { return {"gpt-4.1-nano", "gpt-4.1-mini", "gpt-4.1"}; }

void validate_condition(const Condition& c) {
  if (c.model.empty()) throw UsageError("condition has an empty model id");
  switch (c.study) {
    case StudyKind::Cultural:
      if (c.language != Language::En || c.method != Method::Sequential) {
        throw UsageError("cultural-study conditions are English and sequential");
      }
      break;
    case StudyKind::Method:
      if (c.language != Language::En || c.method == Method::Sequential) {
        throw UsageError("method-study conditions are English with global, local or iterative");
      }
      break;
    case StudyKind::Language:
      if (c.culture != Culture::US) throw UsageError("language-study conditions use US framing");
      break;
  }
}

std::vector<Condition> enumerate_matrix(StudyKind study, std::span<const std::string> models,
                                        std::size_t seeds_per_condition) {
  const std::vector<std::string> defaults = default_models();
  if (models.empty()) models = defaults;
  std::vector<Condition> out;
  auto add = [&](Culture c, Language l, Method m) {
    for (const auto& model : models) {
      for (std::uint64_t s = 0; s < seeds_per_condition; ++s) {
        out.push_back({study, c, l, m, model, s});
      }
    }
  };
  switch (study) {
    case StudyKind::Cultural:
      for (Culture c : kAllCultures) add(c, Language::En, Method::Sequential);
      break;
    case StudyKind::Method:
      for (Culture c : kAllCultures) {
        for (Method m : {Method::Global, Method::Local, Method::Iterative}) add(c, Language::En, m);
      }
      break;
    case StudyKind::Language:
      for (Language l : kAllLanguages) {
        for (Method m : kAllMethods) add(Culture::US, l, m);
      }
      break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

std::string sanitize_model(std::string_view model) {
  std::string out(model);
  for (char& ch : out) {
    if (ch == '.' || ch == '/') ch = '-';
  }
  return out;
}

std::string condition_token(const Condition& c) {
  if (c.study == StudyKind::Language) return detail::to_upper(language_code(c.language));
  return detail::to_upper(culture_name(c.culture));
}

}  // namespace

std::string condition_filename(const Condition& c) {
  return fmt::format("{}_{}_{}_{}.adj", detail::to_upper(method_name(c.method)),
                     sanitize_model(c.model), condition_token(c), c.seed);
}

std::optional<Condition> parse_filename(std::string_view filename,
                                        std::span<const std::string> known_models) {
  const std::vector<std::string> defaults = default_models();
  if (known_models.empty()) known_models = defaults;
  constexpr std::string_view ext = ".adj";
  if (filename.size() <= ext.size() || !filename.ends_with(ext)) return std::nullopt;
  filename.remove_suffix(ext.size());

  const std::size_t first = filename.find('_');
  const std::size_t last = filename.rfind('_');
  if (first == std::string_view::npos || last == first) return std::nullopt;
  const std::size_t token_start = filename.rfind('_', last - 1);
  if (token_start == first || token_start == std::string_view::npos) return std::nullopt;

  const std::string_view method_part = filename.substr(0, first);
  const std::string_view model_part = filename.substr(first + 1, token_start - first - 1);
  const std::string_view token = filename.substr(token_start + 1, last - token_start - 1);
  const std::string_view seed_part = filename.substr(last + 1);
  if (model_part.empty() || seed_part.empty()) return std::nullopt;
  if (!std::all_of(seed_part.begin(), seed_part.end(),
                   [](char ch) { return ch >= '0' && ch <= '9'; })) {
    return std::nullopt;
  }
  if (method_part != detail::to_upper(method_part) || token != detail::to_upper(token)) {
    return std::nullopt;
  }

  Condition c;
  try {
    c.method = method_from_name(method_part);
    c.seed = std::stoull(std::string(seed_part));
  } catch (const std::exception&) {
    return std::nullopt;
  }
  c.model = std::string(model_part);
  for (const auto& m : known_models) {
    if (sanitize_model(m) == model_part) {
      c.model = m;
      break;
    }
  }
  try {
    c.culture = culture_from_name(token);
    c.language = Language::En;
    c.study = c.method == Method::Sequential ? StudyKind::Cultural : StudyKind::Method;
  } catch (const UsageError&) {
    try {
      c.language = language_from_code(token);
    } catch (const UsageError&) {
      return std::nullopt;
    }
    c.culture = Culture::US;
    c.study = StudyKind::Language;
  }
  return c;
}

std::uint64_t condition_seed(std::uint64_t base_seed, const Condition& c) {
  const std::string key =
      fmt::format("{}|{}|{}|{}|{}|{}", study_name(c.study), culture_name(c.culture),
                  language_code(c.language), method_name(c.method), c.model, c.seed);
  return derive_seed(base_seed, key);
}

void StudyManifest::validate() const {
  std::set<Condition> seen;
  std::set<std::string> names;
  for (const auto& c : conditions) {
    validate_condition(c);
    if (!seen.insert(c).second || !names.insert(condition_filename(c)).second) {
      throw UsageError(fmt::format("duplicate condition {}", condition_filename(c)));
    }
  }
  if (parallelism < 1) throw UsageError("study parallelism must be at least 1");
}

std::filesystem::path StudyManifest::study_dir() const {
  return output_dir / std::string(study_name(study));
}

StudyManifest make_manifest(StudyKind study, std::filesystem::path output_dir,
                            std::filesystem::path template_dir, std::vector<std::string> models) {
  StudyManifest m;
  m.study = study;
  m.models = models.empty() ? default_models() : std::move(models);
  m.conditions = enumerate_matrix(study, m.models);
  m.output_dir = std::move(output_dir);
  m.template_dir = std::move(template_dir);
  return m;
}

StudyManifest parse_manifest(std::string_view json_text, const std::filesystem::path& base_dir) {
  using nlohmann::json;
  auto resolve = [&](const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base_dir / path;
  };
  try {
    const json j = json::parse(json_text);
    if (!j.contains("study")) throw ParseError("manifest is missing field 'study'");
    const StudyKind study = study_from_name(j.at("study").get<std::string>());
    std::vector<std::string> models = j.value("models", std::vector<std::string>{});
    StudyManifest m = make_manifest(study, resolve(j.value("output", std::string("out"))),
                                    j.contains("templates")
                                        ? resolve(j.at("templates").get<std::string>())
                                        : default_template_dir(),
                                    std::move(models));
    const std::size_t seeds = j.value("seeds", std::size_t{2});
    m.conditions = enumerate_matrix(study, m.models, seeds);
    if (j.contains("overrides")) {
      const json& o = j.at("overrides");
      m.base_seed = o.value("seed", m.base_seed);
      m.generation.k = o.value("k", m.generation.k);
      m.generation.rounds = o.value("rounds", m.generation.rounds);
      m.generation.temperature = o.value("temperature", m.generation.temperature);
      m.generation.include_reason = o.value("include_reason", m.generation.include_reason);
      m.generation.retry.max_retries = o.value("max_retries", m.generation.retry.max_retries);
      m.parallelism = o.value("parallel", m.parallelism);
    }
    m.validate();
    return m;
  } catch (const json::exception& e) {
    throw ParseError(fmt::format("manifest: {}", e.what()));
  } catch (const UsageError& e) {
    throw ParseError(fmt::format("manifest: {}", e.what()));
  }
}

StudyManifest load_manifest(const std::filesystem::path& path) {
  return parse_manifest(detail::read_file(path), path.parent_path());
}

GenerationResult generate_condition(const Condition& c, const Roster& roster,
                                    TextBackend& backend, const TemplateStore& templates,
                                    GenerationConfig config, std::uint64_t base_seed) {
  validate_condition(c);
  config.model = c.model;
  config.seed = condition_seed(base_seed, c);
  const PromptTemplate tpl = templates.load(c.method, c.language, c.culture);
  GenerationResult result;
  switch (c.method) {
    case Method::Sequential: result = generate_sequential(backend, roster, tpl, config); break;
    case Method::Global: result = generate_global(backend, roster, tpl, config); break;
    case Method::Local: result = generate_local(backend, roster, tpl, config); break;
    case Method::Iterative: {
      const PromptTemplate seq = templates.load(Method::Sequential, c.language, c.culture);
      result = generate_iterative(backend, roster, seq, tpl, config);
      break;
    }
  }
  return result;
}

namespace {

std::map<std::string, std::string> condition_labels(const Condition& c) {
  return {{"study", std::string(study_name(c.study))},
          {"culture", std::string(culture_name(c.culture))},
          {"language", std::string(language_code(c.language))},
          {"method", std::string(method_name(c.method))},
          {"model", c.model},
          {"seed_index", std::to_string(c.seed)},
          {"filename", condition_filename(c)}};
}

bool existing_network_ok(const std::filesystem::path& path, const Roster& roster) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) return false;
  try {
    return verify_network(read_adj(path), roster).passed;
  } catch (const Error& e) {
    detail::log().warn("regenerating {}: {}", path.string(), e.what());
    return false;
  }
}

void check_templates(const StudyManifest& manifest) {
  const TemplateStore store(manifest.template_dir);
  std::set<std::filesystem::path> missing;
  for (const auto& c : manifest.conditions) {
    for (const auto& p : store.missing(c.method, c.language, c.culture)) missing.insert(p);
    if (c.method == Method::Iterative) {
      for (const auto& p : store.missing(Method::Sequential, c.language, c.culture)) {
        missing.insert(p);
      }
    }
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& p : missing) list += "\n  " + p.string();
    throw TemplateError(fmt::format("{} template file(s) missing:{}", missing.size(), list));
  }
  // Parse and validate every template the run will use before generating.
  std::set<std::tuple<Method, Language, Culture>> needed;
  for (const auto& c : manifest.conditions) {
    needed.emplace(c.method, c.language, c.culture);
    if (c.method == Method::Iterative) needed.emplace(Method::Sequential, c.language, c.culture);
  }
  for (const auto& [m, l, cu] : needed) store.load(m, l, cu);
}

}  // namespace

RunSummary run_study(const StudyManifest& manifest, const Roster& roster, TextBackend& backend,
                     bool resume) {
  manifest.validate();
  check_templates(manifest);
  const std::filesystem::path dir = manifest.study_dir();
  const std::filesystem::path transcripts = dir / "transcripts";
  std::filesystem::create_directories(transcripts);
  const TemplateStore store(manifest.template_dir);

  enum class Status { Generated, Skipped, Failed };
  struct Outcome {
    Status status = Status::Failed;
    ConditionFailure failure;
  };
  std::vector<Outcome> outcomes(manifest.conditions.size());

  detail::parallel_for(manifest.conditions.size(), manifest.parallelism, [&](std::size_t i) {
    const Condition& c = manifest.conditions[i];
    const std::string name = condition_filename(c);
    const std::string stem = name.substr(0, name.size() - 4);
    const auto adj_path = dir / name;
    if (resume && existing_network_ok(adj_path, roster)) {
      outcomes[i].status = Status::Skipped;
      return;
    }
    Outcome& out = outcomes[i];
    try {
      GenerationResult r =
          generate_condition(c, roster, backend, store, manifest.generation, manifest.base_seed);
      const VerificationReport report = verify_network(r.network, roster);
      if (!report.passed) {
        throw ValidationError(fmt::format("verification failed: {}", report.violations.front()));
      }
      r.transcript.labels = condition_labels(c);
      r.transcript.labels.insert(manifest.labels.begin(), manifest.labels.end());
      detail::write_file_atomic(transcripts / (stem + ".json"), transcript_to_json(r.transcript));
      write_adj(r.network, adj_path);
      out.status = Status::Generated;
    } catch (const GenerationError& e) {
      Transcript t = e.transcript();
      t.labels = condition_labels(c);
      t.labels.insert(manifest.labels.begin(), manifest.labels.end());
      const auto tpath = transcripts / (stem + ".failed.json");
      detail::write_file_atomic(tpath, transcript_to_json(t));
      out.failure = {name, e.what(), tpath};
    } catch (const Error& e) {
      out.failure = {name, e.what(), {}};
    }
    if (out.status == Status::Failed) {
      detail::log().error("condition {} failed: {}", name, out.failure.message);
    }
  });

  RunSummary summary;
  for (auto& o : outcomes) {
    switch (o.status) {
      case Status::Generated: ++summary.generated; break;
      case Status::Skipped: ++summary.skipped; break;
      case Status::Failed:
        ++summary.failed;
        summary.failures.push_back(std::move(o.failure));
        break;
    }
  }
  return summary;
}

namespace {

// Conditions that differ only in model share a key.
std::string match_key(const Condition& c) {
  return fmt::format("{}|{}|{}|{}|{}", study_name(c.study), culture_name(c.culture),
                     language_code(c.language), method_name(c.method), c.seed);
}

template <class Stat>
std::vector<ModelPairStat> pair_stats(const std::vector<AnalyzedNetwork>& nets,
                                      const std::vector<DirectedNetwork>& graphs, Stat stat) {
  std::map<std::string, std::map<std::string, std::size_t>> groups;
  for (std::size_t i = 0; i < nets.size(); ++i) {
    groups[match_key(nets[i].condition)][nets[i].condition.model] = i;
  }
  std::map<std::pair<std::string, std::string>, std::pair<double, std::size_t>> acc;
  for (const auto& [_, by_model] : groups) {
    for (auto a = by_model.begin(); a != by_model.end(); ++a) {
      for (auto b = std::next(a); b != by_model.end(); ++b) {
        auto& slot = acc[{a->first, b->first}];
        slot.first += stat(graphs[a->second], graphs[b->second]);
        ++slot.second;
      }
    }
  }
  std::vector<ModelPairStat> out;
  for (const auto& [pair, v] : acc) {
    out.push_back({pair.first, pair.second, v.first / static_cast<double>(v.second), v.second});
  }
  return out;
}

}  // namespace

StudyAnalysis analyze_study(const std::filesystem::path& directory, const Roster& roster,
                            std::span<const std::string> known_models) {
  std::error_code ec;
  if (!std::filesystem::is_directory(directory, ec)) {
    throw UsageError(fmt::format("'{}' is not a directory", directory.string()));
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(directory)) {
    if (entry.is_regular_file() && entry.path().extension() == ".adj") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  StudyAnalysis a;
  std::vector<DirectedNetwork> graphs;
  for (const auto& path : files) {
    const std::string name = path.filename().string();
    const auto cond = parse_filename(name, known_models);
    if (!cond) {
      detail::log().warn("skipping {}: filename does not encode a condition", name);
      a.skipped.push_back(name);
      continue;
    }
    DirectedNetwork g;
    try {
      g = read_adj(path);
      if (g.node_count() != roster.size()) {
        throw ValidationError(fmt::format("{} nodes, roster has {}", g.node_count(), roster.size()));
      }
    } catch (const Error& e) {
      detail::log().warn("skipping {}: {}", name, e.what());
      a.skipped.push_back(name);
      continue;
    }
    a.networks.push_back({name, *cond, compute_metrics(g), homophily_profile(g, roster)});
    graphs.push_back(std::move(g));
  }
  if (a.networks.empty()) {
    throw UsageError(fmt::format("no analyzable .adj files in '{}'", directory.string()));
  }

  a.edge_distance = pair_stats(a.networks, graphs, [](const auto& x, const auto& y) {
    return edge_distance(x, y);
  });
  a.degree_ks = pair_stats(a.networks, graphs, [](const auto& x, const auto& y) {
    const auto dx = degree_sequence(x);
    const auto dy = degree_sequence(y);
    return ks_statistic(dx, dy);
  });

  for (Method m : kAllMethods) {
    MethodHomophily mh;
    mh.method = m;
    std::map<Attribute, std::pair<double, std::size_t>> sums;
    for (const auto& n : a.networks) {
      if (n.condition.method != m) continue;
      ++mh.networks;
      for (const auto& r : n.homophily) {
        if (!r.defined()) continue;
        sums[r.attribute].first += r.ratio;
        ++sums[r.attribute].second;
      }
    }
    if (mh.networks == 0) continue;
    double best = 0.0;
    for (Attribute attr : kAllAttributes) {
      const auto it = sums.find(attr);
      if (it == sums.end() || it->second.second == 0) continue;
      const double mean = it->second.first / static_cast<double>(it->second.second);
      mh.mean_ratio[attr] = mean;
      if (!mh.argmax || mean > best) {
        mh.argmax = attr;
        best = mean;
      }
    }
    a.by_method.push_back(std::move(mh));
  }
  return a;
}

void write_topology_csv(std::ostream& out, const StudyAnalysis& a) {
  out << "network,study,culture,language,method,model,seed,node_count,edge_count,density,"
         "avg_clustering,lcc,avg_path,modularity\n";
  for (const auto& n : a.networks) {
    const auto& c = n.condition;
    const auto& m = n.metrics;
    out << detail::csv_field(n.filename) << ',' << study_name(c.study) << ','
        << culture_name(c.culture) << ',' << language_code(c.language) << ','
        << method_name(c.method) << ',' << detail::csv_field(c.model) << ',' << c.seed << ','
        << m.node_count << ',' << m.edge_count << ',' << detail::csv_number(m.density) << ','
        << detail::csv_number(m.avg_clustering) << ',' << detail::csv_number(m.lcc) << ','
        << detail::csv_number(m.avg_path) << ',' << detail::csv_number(m.modularity) << '\n';
  }
}

void write_homophily_csv(std::ostream& out, const StudyAnalysis& a) {
  bool header = true;
  for (const auto& n : a.networks) {
    write_profile_csv(out, n.filename, n.homophily, header);
    header = false;
  }
}

void write_pair_csv(std::ostream& out, std::span<const ModelPairStat> stats,
                    std::string_view value_column) {
  out << "model_a,model_b," << value_column << ",matched_conditions\n";
  for (const auto& s : stats) {
    out << detail::csv_field(s.model_a) << ',' << detail::csv_field(s.model_b) << ','
        << detail::csv_number(s.mean) << ',' << s.matched << '\n';
  }
}

void write_method_homophily_csv(std::ostream& out, const StudyAnalysis& a) {
  out << "method,networks,attribute,mean_ratio,is_argmax\n";
  for (const auto& mh : a.by_method) {
    for (const auto& [attr, mean] : mh.mean_ratio) {
      out << method_name(mh.method) << ',' << mh.networks << ',' << attribute_name(attr) << ','
          << detail::csv_number(mean) << ',' << (mh.argmax == attr ? "true" : "false") << '\n';
    }
  }
}

void write_analysis(const StudyAnalysis& a, const std::filesystem::path& directory) {
  std::filesystem::create_directories(directory);
  auto emit = [&](const char* file, auto&& writer) {
    std::ostringstream s;
    writer(s);
    detail::write_file_atomic(directory / file, s.str());
  };
  emit("topology.csv", [&](std::ostream& s) { write_topology_csv(s, a); });
  emit("homophily.csv", [&](std::ostream& s) { write_homophily_csv(s, a); });
  emit("edge_distance.csv",
       [&](std::ostream& s) { write_pair_csv(s, a.edge_distance, "edge_distance"); });
  emit("degree_ks.csv", [&](std::ostream& s) { write_pair_csv(s, a.degree_ks, "ks"); });
  emit("homophily_summary.csv", [&](std::ostream& s) { write_method_homophily_csv(s, a); });
}

}  // namespace netweave
