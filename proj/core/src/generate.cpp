#include "netweave/generate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>
#include <json.hpp>

#include "log.hpp"
#include "netweave/random.hpp"
#include "parallel.hpp"

namespace netweave {

void GenerationConfig::validate(Method method, std::size_t n) const {
  if (n < 2) throw UsageError("generation needs a roster of at least 2 personas");
  if (!(temperature >= 0.0) || !std::isfinite(temperature)) {
    throw UsageError(fmt::format("temperature must be >= 0 (got {})", temperature));
  }
  if (method == Method::Local && (k < 1 || k > n - 1)) {
    throw UsageError(fmt::format("k must be in [1, {}] for a roster of {} (got {})", n - 1, n, k));
  }
  if (parallelism < 1) throw UsageError("parallelism must be at least 1");
  if (!processing_order.empty()) {
    std::vector<PersonaId> sorted = processing_order;
    std::sort(sorted.begin(), sorted.end());
    std::vector<PersonaId> ids(n);
    std::iota(ids.begin(), ids.end(), PersonaId{0});
    if (sorted != ids) throw UsageError("processing order must be a permutation of the roster ids");
  }
}

namespace {

using nlohmann::json;

void bind_optional(Bindings& b, const PromptTemplate& tpl, const GenerationConfig& config) {
  const auto present = tpl.placeholders();
  if (present.contains("culture_preamble")) b["culture_preamble"] = tpl.culture_preamble;
  if (present.contains("reason_instruction")) {
    b["reason_instruction"] = config.include_reason ? tpl.reason_instruction : "";
  }
}

void require_method(const PromptTemplate& tpl, Method expected) {
  if (tpl.method != expected) {
    throw UsageError(fmt::format("expected a {} template, got {}", method_name(expected),
                                 method_name(tpl.method)));
  }
}

Transcript new_transcript(Method m, const GenerationConfig& config) {
  Transcript t;
  t.method = std::string(method_name(m));
  t.model = config.model;
  t.seed = config.seed;
  t.temperature = config.temperature;
  t.include_reason = config.include_reason;
  return t;
}

BackendRequest make_request(const GenerationConfig& config, std::string prompt,
                            std::uint64_t seed_hint, PromptContext ctx) {
  BackendRequest r;
  r.model = config.model;
  r.prompt = std::move(prompt);
  r.temperature = config.temperature;
  r.seed_hint = seed_hint;
  r.context = std::move(ctx);
  return r;
}

struct EgoOutcome {
  CallRecord record;
  std::vector<TieNomination> nominations;
  std::optional<std::string> failure;  // backend error after retries
};

// One persona's call: soft parse failures are retried with the same prompt,
// and after the last attempt the persona contributes nothing.
EgoOutcome run_ego_call(TextBackend& backend, const Roster& roster, const BackendRequest& request,
                        const std::set<PersonaId>& allowed, const GenerationConfig& config) {
  EgoOutcome out;
  const PersonaId ego = *request.context->ego;
  out.record.kind = "ego";
  out.record.ego = ego;
  if (config.record_prompts) out.record.prompt = request.prompt;
  for (std::size_t attempt = 0; attempt <= config.retry.max_retries; ++attempt) {
    std::string text;
    try {
      text = complete_with_retry(backend, request, config.retry);
    } catch (const BackendError& e) {
      out.record.responses.push_back(fmt::format("error: {}", e.what()));
      out.record.outcome = "error";
      out.failure = fmt::format("persona {} ({}): {}", ego, roster[ego].name, e.what());
      return out;
    }
    out.record.responses.push_back(text);
    ParseResult parsed = parse_response(text, ego, allowed, roster, config.include_reason);
    out.record.tally = parsed.tally;
    out.record.rejections = std::move(parsed.rejections);
    if (parsed.explicit_empty) {
      out.record.outcome = "empty";
      return out;
    }
    if (!parsed.soft_failure) {
      out.record.outcome = "ok";
      out.nominations = std::move(parsed.nominations);
      return out;
    }
  }
  out.record.outcome = "no_valid_nominations";
  detail::log().warn("persona {} ({}) produced no valid nominations after {} attempts; "
                     "contributing no edges",
                     ego, roster[ego].name, config.retry.max_retries + 1);
  return out;
}

std::vector<PersonaId> everyone_but(std::size_t n, PersonaId ego) {
  std::vector<PersonaId> out;
  out.reserve(n - 1);
  for (PersonaId j = 0; j < n; ++j) {
    if (j != ego) out.push_back(j);
  }
  return out;
}

// Shared driver for the two factorizing methods. `candidates_for` picks who
// each ego sees; `bind` fills the method's required placeholders.
template <class Candidates, class Bind>
GenerationResult run_per_persona(TextBackend& backend, const Roster& roster,
                                 const PromptTemplate& tpl, const GenerationConfig& config,
                                 Candidates candidates_for, Bind bind) {
  const std::size_t n = roster.size();
  std::vector<PersonaId> order = config.processing_order;
  if (order.empty()) {
    order.resize(n);
    std::iota(order.begin(), order.end(), PersonaId{0});
  }
  std::vector<EgoOutcome> outcomes(n);
  detail::parallel_for(order.size(), config.parallelism, [&](std::size_t idx) {
    const PersonaId ego = order[idx];
    const std::vector<PersonaId> candidates = candidates_for(ego);
    Bindings b;
    bind(b, ego, candidates);
    bind_optional(b, tpl, config);
    PromptContext ctx;
    ctx.mode = PromptMode::Ego;
    ctx.roster = &roster;
    ctx.ego = ego;
    ctx.candidates = candidates;
    ctx.include_reason = config.include_reason;
    const BackendRequest request =
        make_request(config, render_prompt(tpl, b), derive_seed(config.seed, ego), std::move(ctx));
    const std::set<PersonaId> allowed(candidates.begin(), candidates.end());
    outcomes[ego] = run_ego_call(backend, roster, request, allowed, config);
  });

  Transcript t = new_transcript(tpl.method, config);
  std::vector<Edge> edges;
  std::optional<std::string> failure;
  for (auto& o : outcomes) {
    if (o.failure && !failure) failure = o.failure;
    for (const auto& nom : o.nominations) edges.push_back({nom.source, nom.target});
    t.nominations.insert(t.nominations.end(), o.nominations.begin(), o.nominations.end());
    t.calls.push_back(std::move(o.record));
  }
  if (failure) {
    throw GenerationError(fmt::format("backend failed after retries: {}", *failure), std::move(t));
  }
  return {DirectedNetwork(n, std::move(edges)), std::move(t)};
}

struct JointOutcome {
  std::optional<std::vector<TieNomination>> nominations;
  std::optional<std::string> failure;
};

// A whole-network call: any rejected line voids the response and the call is
// retried; duplicates are harmless and ignored.
JointOutcome run_joint_call(TextBackend& backend, const Roster& roster,
                            const BackendRequest& request, const GenerationConfig& config,
                            CallRecord& record) {
  if (config.record_prompts) record.prompt = request.prompt;
  for (std::size_t attempt = 0; attempt <= config.retry.max_retries; ++attempt) {
    std::string text;
    try {
      text = complete_with_retry(backend, request, config.retry);
    } catch (const BackendError& e) {
      record.responses.push_back(fmt::format("error: {}", e.what()));
      record.outcome = "error";
      return {std::nullopt, std::string(e.what())};
    }
    record.responses.push_back(text);
    ParseResult parsed = parse_edge_list(text, roster, config.include_reason);
    record.tally = parsed.tally;
    record.rejections = std::move(parsed.rejections);
    if (parsed.explicit_empty) {
      record.outcome = "empty";
      return {std::vector<TieNomination>{}, std::nullopt};
    }
    const bool clean = parsed.tally.unknown_names == 0 && parsed.tally.self_references == 0;
    if (clean && !parsed.soft_failure) {
      record.outcome = "ok";
      return {std::move(parsed.nominations), std::nullopt};
    }
    record.outcome = parsed.soft_failure ? "no_valid_nominations" : "rejected";
    detail::log().warn("{} response rejected on attempt {} ({} unresolved lines, {} self-loops)",
                       record.kind, attempt + 1, parsed.tally.unknown_names,
                       parsed.tally.self_references);
  }
  return {std::nullopt, fmt::format("no parseable response after {} attempts",
                                    config.retry.max_retries + 1)};
}

std::vector<Edge> edges_of(const std::vector<TieNomination>& noms) {
  std::vector<Edge> out;
  out.reserve(noms.size());
  for (const auto& n : noms) out.push_back({n.source, n.target});
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<PersonaId> all_ids(std::size_t n) {
  std::vector<PersonaId> ids(n);
  std::iota(ids.begin(), ids.end(), PersonaId{0});
  return ids;
}

}  // namespace

GenerationResult generate_sequential(TextBackend& backend, const Roster& roster,
                                     const PromptTemplate& tpl, const GenerationConfig& config) {
  require_method(tpl, Method::Sequential);
  config.validate(Method::Sequential, roster.size());
  const std::size_t n = roster.size();
  return run_per_persona(
      backend, roster, tpl, config, [n](PersonaId ego) { return everyone_but(n, ego); },
      [&](Bindings& b, PersonaId ego, const std::vector<PersonaId>& candidates) {
        b["ego"] = persona_profile(roster[ego]);
        b["roster"] = render_cards(roster, candidates);
      });
}

GenerationResult generate_local(TextBackend& backend, const Roster& roster,
                                const PromptTemplate& tpl, const GenerationConfig& config) {
  require_method(tpl, Method::Local);
  config.validate(Method::Local, roster.size());
  const std::size_t n = roster.size();
  return run_per_persona(
      backend, roster, tpl, config,
      [&](PersonaId ego) { return local_neighborhood(n, ego, config.k, config.seed); },
      [&](Bindings& b, PersonaId ego, const std::vector<PersonaId>& candidates) {
        b["ego"] = persona_profile(roster[ego]);
        b["neighborhood"] = render_cards(roster, candidates);
      });
}

GenerationResult generate_global(TextBackend& backend, const Roster& roster,
                                 const PromptTemplate& tpl, const GenerationConfig& config) {
  require_method(tpl, Method::Global);
  config.validate(Method::Global, roster.size());
  const auto ids = all_ids(roster.size());
  Bindings b;
  b["roster"] = render_cards(roster, ids);
  bind_optional(b, tpl, config);
  PromptContext ctx;
  ctx.mode = PromptMode::Global;
  ctx.roster = &roster;
  ctx.candidates = ids;
  ctx.include_reason = config.include_reason;
  const BackendRequest request = make_request(config, render_prompt(tpl, b),
                                              derive_seed(config.seed, "global"), std::move(ctx));
  Transcript t = new_transcript(Method::Global, config);
  CallRecord record;
  record.kind = "global";
  JointOutcome outcome = run_joint_call(backend, roster, request, config, record);
  t.calls.push_back(std::move(record));
  if (!outcome.nominations) {
    throw GenerationError(fmt::format("global generation failed: {}", *outcome.failure),
                          std::move(t));
  }
  t.nominations = std::move(*outcome.nominations);
  DirectedNetwork g(roster.size(), edges_of(t.nominations));
  return {std::move(g), std::move(t)};
}

GenerationResult generate_iterative(TextBackend& backend, const Roster& roster,
                                    const PromptTemplate& seq_tpl, const PromptTemplate& iter_tpl,
                                    const GenerationConfig& config) {
  require_method(iter_tpl, Method::Iterative);
  config.validate(Method::Iterative, roster.size());
  GenerationResult seq = generate_sequential(backend, roster, seq_tpl, config);

  Transcript t = std::move(seq.transcript);
  t.method = std::string(method_name(Method::Iterative));
  std::vector<Edge> current(seq.network.edges().begin(), seq.network.edges().end());
  t.edge_sets.push_back(current);
  const auto ids = all_ids(roster.size());

  for (std::size_t round = 1; round <= config.rounds; ++round) {
    Bindings b;
    b["roster"] = render_cards(roster, ids);
    b["current_edges"] = render_edges(roster, current);
    b["round"] = std::to_string(round);
    bind_optional(b, iter_tpl, config);
    PromptContext ctx;
    ctx.mode = PromptMode::Iterative;
    ctx.roster = &roster;
    ctx.candidates = ids;
    ctx.current_edges = current;
    ctx.round = round;
    ctx.include_reason = config.include_reason;
    const BackendRequest request =
        make_request(config, render_prompt(iter_tpl, b),
                     derive_seed(config.seed, fmt::format("round-{}", round)), std::move(ctx));
    CallRecord record;
    record.kind = "round";
    record.round = round;
    JointOutcome outcome = run_joint_call(backend, roster, request, config, record);
    t.calls.push_back(std::move(record));
    if (!outcome.nominations) {
      DirectedNetwork last(roster.size(), current);
      throw GenerationError(
          fmt::format("iterative round {} failed: {}", round, *outcome.failure), std::move(t),
          std::move(last));
    }
    current = edges_of(*outcome.nominations);
    t.nominations = std::move(*outcome.nominations);
    t.edge_sets.push_back(current);
  }
  DirectedNetwork g(roster.size(), std::move(current));
  return {std::move(g), std::move(t)};
}

std::vector<PersonaId> local_neighborhood(std::size_t n, PersonaId ego, std::size_t k,
                                          std::uint64_t seed) {
  if (n < 2 || ego >= n) throw UsageError("neighborhood ego outside the roster");
  if (k < 1 || k > n - 1) {
    throw UsageError(fmt::format("k must be in [1, {}] (got {})", n - 1, k));
  }
  Rng rng(derive_seed(derive_seed(seed, "local"), ego));
  std::vector<PersonaId> out;
  out.reserve(k);
  for (std::size_t idx : sample_without_replacement(n - 1, k, rng)) {
    out.push_back(static_cast<PersonaId>(idx >= ego ? idx + 1 : idx));
  }
  std::sort(out.begin(), out.end());
  return out;
}

VerificationReport verify_edges(std::span<const Edge> edges, const Roster& roster) {
  VerificationReport r;
  const std::size_t n = roster.size();
  std::set<Edge> seen;
  for (const Edge& e : edges) {
    if (e.source >= n || e.target >= n) {
      r.violations.push_back(
          fmt::format("edge {} -> {} has an endpoint outside 0..{}", e.source, e.target, n - 1));
      continue;
    }
    if (e.source == e.target) {
      r.violations.push_back(fmt::format("self-loop on {} ({})", e.source, roster[e.source].name));
      continue;
    }
    if (!seen.insert(e).second) {
      r.violations.push_back(fmt::format("duplicate edge {} -> {}", e.source, e.target));
    }
  }
  r.passed = r.violations.empty();
  return r;
}

VerificationReport verify_network(const DirectedNetwork& g, const Roster& roster) {
  if (g.node_count() != roster.size()) {
    VerificationReport r;
    r.passed = false;
    r.violations.push_back(fmt::format("network has {} nodes but the roster has {} personas",
                                       g.node_count(), roster.size()));
    return r;
  }
  return verify_edges(g.edges(), roster);
}

namespace {

json tally_json(const ParseTally& t) {
  return {{"accepted", t.accepted},
          {"unknown_names", t.unknown_names},
          {"self_references", t.self_references},
          {"outside_allowed", t.outside_allowed},
          {"duplicates", t.duplicates}};
}

json edges_json(const std::vector<Edge>& edges) {
  json a = json::array();
  for (const Edge& e : edges) a.push_back({e.source, e.target});
  return a;
}

std::vector<Edge> edges_from(const json& a) {
  std::vector<Edge> out;
  for (const auto& e : a) out.push_back({e.at(0).get<NodeId>(), e.at(1).get<NodeId>()});
  return out;
}

}  // namespace

std::string transcript_to_json(const Transcript& t) {
  json j;
  j["labels"] = t.labels;
  j["method"] = t.method;
  j["model"] = t.model;
  j["seed"] = t.seed;
  j["temperature"] = t.temperature;
  j["include_reason"] = t.include_reason;
  json calls = json::array();
  for (const auto& c : t.calls) {
    json cj = {{"kind", c.kind},
               {"prompt", c.prompt},
               {"responses", c.responses},
               {"attempts", c.responses.size()},
               {"tally", tally_json(c.tally)},
               {"rejections", c.rejections},
               {"outcome", c.outcome}};
    if (c.ego) cj["ego"] = *c.ego;
    if (c.round) cj["round"] = *c.round;
    calls.push_back(std::move(cj));
  }
  j["calls"] = std::move(calls);
  json sets = json::array();
  for (const auto& s : t.edge_sets) sets.push_back(edges_json(s));
  j["edge_sets"] = std::move(sets);
  json noms = json::array();
  for (const auto& n : t.nominations) {
    json nj = {{"source", n.source}, {"target", n.target}};
    if (n.reason) nj["reason"] = *n.reason;
    noms.push_back(std::move(nj));
  }
  j["nominations"] = std::move(noms);
  return j.dump(1, ' ', false, json::error_handler_t::replace) + "\n";
}

Transcript transcript_from_json(std::string_view text) {
  Transcript t;
  try {
    const json j = json::parse(text);
    t.labels = j.value("labels", std::map<std::string, std::string>{});
    t.method = j.value("method", "");
    t.model = j.value("model", "");
    t.seed = j.value("seed", std::uint64_t{0});
    t.temperature = j.value("temperature", 0.0);
    t.include_reason = j.value("include_reason", false);
    for (const auto& cj : j.value("calls", json::array())) {
      CallRecord c;
      c.kind = cj.value("kind", "");
      c.prompt = cj.value("prompt", "");
      c.responses = cj.value("responses", std::vector<std::string>{});
      c.rejections = cj.value("rejections", std::vector<std::string>{});
      c.outcome = cj.value("outcome", "");
      if (cj.contains("ego")) c.ego = cj.at("ego").get<PersonaId>();
      if (cj.contains("round")) c.round = cj.at("round").get<std::size_t>();
      if (cj.contains("tally")) {
        const auto& tj = cj.at("tally");
        c.tally.accepted = tj.value("accepted", std::size_t{0});
        c.tally.unknown_names = tj.value("unknown_names", std::size_t{0});
        c.tally.self_references = tj.value("self_references", std::size_t{0});
        c.tally.outside_allowed = tj.value("outside_allowed", std::size_t{0});
        c.tally.duplicates = tj.value("duplicates", std::size_t{0});
      }
      t.calls.push_back(std::move(c));
    }
    for (const auto& s : j.value("edge_sets", json::array())) t.edge_sets.push_back(edges_from(s));
    for (const auto& nj : j.value("nominations", json::array())) {
      TieNomination n;
      n.source = nj.at("source").get<PersonaId>();
      n.target = nj.at("target").get<PersonaId>();
      if (nj.contains("reason")) n.reason = nj.at("reason").get<std::string>();
      t.nominations.push_back(std::move(n));
    }
  } catch (const json::exception& e) {
    throw ParseError(fmt::format("transcript: {}", e.what()));
  }
  return t;
}

}  // namespace netweave
