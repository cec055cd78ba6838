#include "netweave/mock_backend.hpp"

#include <algorithm>
#include <set>

#include <fmt/format.h>
#include <json.hpp>

#include "file_util.hpp"
#include "netweave/errors.hpp"
#include "netweave/random.hpp"
#include "text_util.hpp"

namespace netweave {

std::string_view iterative_rule_name(IterativeRule r) noexcept {
  switch (r) {
    case IterativeRule::Echo: return "echo";
    case IterativeRule::Clear: return "clear";
    case IterativeRule::TriadicClosure: return "triadic_closure";
    case IterativeRule::Refine: return "refine";
  }
  return "unknown";
}

IterativeRule iterative_rule_from_name(std::string_view name) {
  for (IterativeRule r : {IterativeRule::Echo, IterativeRule::Clear,
                          IterativeRule::TriadicClosure, IterativeRule::Refine}) {
    if (iterative_rule_name(r) == name) return r;
  }
  throw UsageError(fmt::format("unknown iterative rule '{}'", name));
}

MockConfig signature_mock_config() {
  MockConfig c;
  c.ego.weights = {{Attribute::Politics, 3.0}};
  c.ego.base_logit = 1.0;
  c.ego.out_degree_target = 5;
  c.ego.noise = 0.9;
  c.global.weights = {{Attribute::AgeBracket, 3.0}};
  c.global.base_logit = 1.0;
  c.global.out_degree_target = 3;
  c.global.noise = 0.9;
  c.global.seed = 1;
  c.iterative = IterativeRule::Refine;
  c.closure_weight = 0.5;
  return c;
}

namespace {

using nlohmann::json;

void read_policy(const json& j, MockPolicy& p, std::string_view key) {
  if (!j.is_object()) throw ParseError(fmt::format("mock config: '{}' must be an object", key));
  if (j.contains("weights")) {
    p.weights.clear();
    for (const auto& [name, w] : j.at("weights").items()) {
      p.weights[attribute_from_name(name)] = w.get<double>();
    }
  }
  if (j.contains("base_logit")) p.base_logit = j.at("base_logit").get<double>();
  if (j.contains("out_degree")) p.out_degree_target = j.at("out_degree").get<std::size_t>();
  if (j.contains("seed")) p.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("noise")) p.noise = j.at("noise").get<double>();
}

// Reason label per attribute, as a model would phrase it.
std::string_view reason_word(Attribute a) {
  return a == Attribute::AgeBracket ? std::string_view("age") : attribute_name(a);
}

std::string reason_for(const MockPolicy& policy, const Persona& a, const Persona& b) {
  std::optional<Attribute> best;
  double best_w = 0.0;
  for (const auto& [attr, w] : policy.weights) {
    if (w > best_w && a.shares(b, attr)) {
      best = attr;
      best_w = w;
    }
  }
  if (!best) return "good company";
  return fmt::format("same {}", reason_word(*best));
}

double unit_hash(std::uint64_t seed, std::optional<std::uint64_t> hint, PersonaId ego,
                 PersonaId j) {
  std::uint64_t h = derive_seed(seed, hint.value_or(0));
  h = derive_seed(h, ego);
  h = derive_seed(h, j);
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

double policy_score(const MockPolicy& policy, const Persona& ego, const Persona& other,
                    std::optional<std::uint64_t> hint) {
  double s = policy.base_logit;
  for (const auto& [attr, w] : policy.weights) {
    if (w != 0.0 && ego.shares(other, attr)) s += w;
  }
  if (policy.noise != 0.0) s += policy.noise * unit_hash(policy.seed, hint, ego.id, other.id);
  return s;
}

std::vector<PersonaId> top_by_score(std::vector<std::pair<double, PersonaId>> scored,
                                    std::size_t d) {
  std::sort(scored.begin(), scored.end(), [](const auto& x, const auto& y) {
    if (x.first != y.first) return x.first > y.first;
    return x.second < y.second;
  });
  std::vector<PersonaId> out;
  for (std::size_t i = 0; i < std::min(d, scored.size()); ++i) out.push_back(scored[i].second);
  std::sort(out.begin(), out.end());
  return out;
}

const Roster& roster_of(const PromptContext& ctx) {
  if (ctx.roster == nullptr) throw ProtocolError("mock backend: prompt context has no roster");
  return *ctx.roster;
}

std::string ego_line(const Roster& roster, PersonaId target, const std::string* reason) {
  if (reason == nullptr) return fmt::format("- {}\n", roster[target].name);
  return fmt::format("- {}: {}\n", roster[target].name, *reason);
}

std::string edge_line(const Roster& roster, const Edge& e, const std::string* reason) {
  if (reason == nullptr) {
    return fmt::format("{} -> {}\n", roster[e.source].name, roster[e.target].name);
  }
  return fmt::format("{} -> {}: {}\n", roster[e.source].name, roster[e.target].name, *reason);
}

std::string render_edge_set(const Roster& roster, const std::vector<Edge>& edges,
                            const MockPolicy& policy, bool include_reason) {
  if (edges.empty()) return "none\n";
  std::string out;
  for (const Edge& e : edges) {
    if (include_reason) {
      const std::string r = reason_for(policy, roster[e.source], roster[e.target]);
      out += edge_line(roster, e, &r);
    } else {
      out += edge_line(roster, e, nullptr);
    }
  }
  return out;
}

std::vector<Edge> triadic_closure(std::size_t n, const std::vector<Edge>& edges) {
  std::vector<std::vector<NodeId>> out(n);
  for (const Edge& e : edges) out[e.source].push_back(e.target);
  std::set<Edge> result(edges.begin(), edges.end());
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j : out[i]) {
      for (NodeId k : out[j]) {
        if (k != i) result.insert({i, k});
      }
    }
  }
  return {result.begin(), result.end()};
}

std::vector<Edge> refine(const MockConfig& config, const Roster& roster,
                         const std::vector<Edge>& edges, std::optional<std::uint64_t> hint) {
  const std::size_t n = roster.size();
  std::vector<std::vector<char>> near(n, std::vector<char>(n, 0));
  std::vector<std::vector<NodeId>> out(n);
  for (const Edge& e : edges) out[e.source].push_back(e.target);
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j : out[i]) {
      near[i][j] = 1;
      for (NodeId k : out[j]) near[i][k] = 1;
    }
  }
  std::vector<Edge> result;
  for (NodeId i = 0; i < n; ++i) {
    std::vector<std::pair<double, PersonaId>> scored;
    for (NodeId j = 0; j < n; ++j) {
      if (j == i) continue;
      double s = policy_score(config.ego, roster[i], roster[j], hint);
      if (near[i][j]) s += config.closure_weight;
      scored.emplace_back(s, j);
    }
    for (PersonaId j : top_by_score(std::move(scored), config.ego.out_degree_target)) {
      result.push_back({i, j});
    }
  }
  return result;
}

}  // namespace

MockConfig parse_mock_config(std::string_view json_text) {
  MockConfig c = signature_mock_config();
  try {
    const json j = json::parse(json_text);
    if (!j.is_object()) throw ParseError("mock config must be a JSON object");
    if (j.contains("ego")) read_policy(j.at("ego"), c.ego, "ego");
    if (j.contains("global")) read_policy(j.at("global"), c.global, "global");
    if (j.contains("iterative")) {
      c.iterative = iterative_rule_from_name(j.at("iterative").get<std::string>());
    }
    if (j.contains("closure_weight")) c.closure_weight = j.at("closure_weight").get<double>();
  } catch (const json::exception& e) {
    throw ParseError(fmt::format("mock config: {}", e.what()));
  } catch (const UsageError& e) {
    throw ParseError(fmt::format("mock config: {}", e.what()));
  }
  return c;
}

MockConfig load_mock_config(const std::filesystem::path& path) {
  return parse_mock_config(detail::read_file(path));
}

std::vector<PersonaId> mock_select(const MockPolicy& policy, const Roster& roster, PersonaId ego,
                                   std::span<const PersonaId> candidates,
                                   std::optional<std::uint64_t> seed_hint) {
  std::vector<std::pair<double, PersonaId>> scored;
  scored.reserve(candidates.size());
  for (PersonaId j : candidates) {
    if (j == ego) continue;
    scored.emplace_back(policy_score(policy, roster[ego], roster[j], seed_hint), j);
  }
  return top_by_score(std::move(scored), policy.out_degree_target);
}

std::string mock_complete(const MockConfig& config, const PromptContext& ctx,
                          std::optional<std::uint64_t> seed_hint) {
  const Roster& roster = roster_of(ctx);
  switch (ctx.mode) {
    case PromptMode::Ego: {
      if (!ctx.ego) throw ProtocolError("mock backend: ego prompt without an ego");
      const auto picks = mock_select(config.ego, roster, *ctx.ego, ctx.candidates, seed_hint);
      if (picks.empty()) return "none\n";
      std::string out;
      for (PersonaId j : picks) {
        if (ctx.include_reason) {
          const std::string r = reason_for(config.ego, roster[*ctx.ego], roster[j]);
          out += ego_line(roster, j, &r);
        } else {
          out += ego_line(roster, j, nullptr);
        }
      }
      return out;
    }
    case PromptMode::Global: {
      std::vector<Edge> edges;
      for (PersonaId i = 0; i < roster.size(); ++i) {
        for (PersonaId j : mock_select(config.global, roster, i, ctx.candidates, seed_hint)) {
          edges.push_back({i, j});
        }
      }
      return render_edge_set(roster, edges, config.global, ctx.include_reason);
    }
    case PromptMode::Iterative: {
      std::vector<Edge> edges;
      switch (config.iterative) {
        case IterativeRule::Echo: edges = ctx.current_edges; break;
        case IterativeRule::Clear: break;
        case IterativeRule::TriadicClosure:
          edges = triadic_closure(roster.size(), ctx.current_edges);
          break;
        case IterativeRule::Refine:
          edges = refine(config, roster, ctx.current_edges, seed_hint);
          break;
      }
      std::sort(edges.begin(), edges.end());
      return render_edge_set(roster, edges, config.ego, ctx.include_reason);
    }
  }
  return "none\n";
}

std::string MockBackend::complete(const BackendRequest& request) {
  ++calls_;
  if (!request.context) throw ProtocolError("mock backend: request has no prompt context");
  return mock_complete(config_, *request.context, request.seed_hint);
}

}  // namespace netweave
