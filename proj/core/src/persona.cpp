#include "netweave/persona.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <set>

#include <fmt/format.h>
#include <json.hpp>

#include "netweave/errors.hpp"
#include "netweave/random.hpp"
#include "file_util.hpp"
#include "text_util.hpp"

namespace netweave {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string_view attribute_name(Attribute a) noexcept {
  switch (a) {
    case Attribute::Gender: return "gender";
    case Attribute::AgeBracket: return "age_bracket";
    case Attribute::Race: return "race";
    case Attribute::Religion: return "religion";
    case Attribute::Politics: return "politics";
    case Attribute::Interests: return "interests";
  }
  return "unknown";
}

Attribute attribute_from_name(std::string_view name) {
  for (Attribute a : kAllAttributes) {
    if (attribute_name(a) == name) return a;
  }
  if (name == "age") return Attribute::AgeBracket;
  throw UsageError(fmt::format("unknown attribute '{}'", name));
}

std::size_t age_bracket(int age) {
  if (age < kMinAge || age > kMaxAge) {
    throw UsageError(fmt::format("age {} outside [{}, {}]", age, kMinAge, kMaxAge));
  }
  std::size_t bracket = 0;
  for (std::size_t i = 0; i < kAgeBracketStarts.size(); ++i) {
    if (age >= kAgeBracketStarts[i]) bracket = i;
  }
  return bracket;
}

std::string age_bracket_label(int age) {
  const std::size_t b = age_bracket(age);
  if (b + 1 == kAgeBracketStarts.size()) return fmt::format("{}+", kAgeBracketStarts[b]);
  return fmt::format("{}-{}", kAgeBracketStarts[b], kAgeBracketStarts[b + 1] - 1);
}

std::string Persona::group(Attribute a) const {
  switch (a) {
    case Attribute::Gender: return gender;
    case Attribute::AgeBracket: return age_bracket_label(age);
    case Attribute::Race: return race;
    case Attribute::Religion: return religion;
    case Attribute::Politics: return politics;
    case Attribute::Interests: break;
  }
  throw UsageError("interests are a tag set, not a categorical group");
}

bool Persona::shares(const Persona& other, Attribute a) const {
  switch (a) {
    case Attribute::Gender: return gender == other.gender;
    case Attribute::AgeBracket: return age_bracket(age) == age_bracket(other.age);
    case Attribute::Race: return race == other.race;
    case Attribute::Religion: return religion == other.religion;
    case Attribute::Politics: return politics == other.politics;
    case Attribute::Interests: {
      // Both sides are sorted, so a merge walk finds any overlap.
      auto i = interests.begin();
      auto j = other.interests.begin();
      while (i != interests.end() && j != other.interests.end()) {
        if (*i == *j) return true;
        if (*i < *j) ++i; else ++j;
      }
      return false;
    }
  }
  return false;
}

Roster::Roster(std::vector<Persona> personas, RosterProvenance provenance)
    : personas_(std::move(personas)), provenance_(std::move(provenance)) {
  std::sort(personas_.begin(), personas_.end(),
            [](const Persona& a, const Persona& b) { return a.id < b.id; });
  std::set<std::string> names;
  for (std::size_t i = 0; i < personas_.size(); ++i) {
    auto& p = personas_[i];
    if (i > 0 && personas_[i - 1].id == p.id) {
      throw ValidationError(fmt::format("duplicate persona id {}", p.id));
    }
    if (p.id != i) {
      throw ValidationError(fmt::format(
          "persona ids must be exactly 0..{}; found id {} at position {}",
          personas_.size() - 1, p.id, i));
    }
    if (p.name.empty()) throw ValidationError(fmt::format("persona {} has an empty name", p.id));
    if (!names.insert(detail::normalize_name(p.name)).second) {
      throw ValidationError(fmt::format("duplicate persona name '{}'", p.name));
    }
    if (p.age < kMinAge || p.age > kMaxAge) {
      throw ValidationError(fmt::format("persona {} has age {} outside [{}, {}]", p.id, p.age,
                                        kMinAge, kMaxAge));
    }
    std::sort(p.interests.begin(), p.interests.end());
    p.interests.erase(std::unique(p.interests.begin(), p.interests.end()), p.interests.end());
    if (p.interests.empty()) {
      throw ValidationError(fmt::format("persona {} has no interests", p.id));
    }
  }
}

namespace {

void check_distribution(const std::string& what, double total) {
  if (std::abs(total - 1.0) > 1e-9) {
    throw ValidationError(fmt::format("marginal '{}' sums to {}, expected 1", what, total));
  }
}

double sum_values(const std::map<std::string, double>& m) {
  double total = 0.0;
  for (const auto& [_, p] : m) {
    if (p < 0.0) throw ValidationError("marginal probabilities must be non-negative");
    total += p;
  }
  return total;
}

std::string draw_category(const std::map<std::string, double>& dist, Rng& rng) {
  std::vector<double> weights;
  weights.reserve(dist.size());
  for (const auto& [_, p] : dist) weights.push_back(p);
  auto it = dist.begin();
  std::advance(it, static_cast<std::ptrdiff_t>(rng.weighted_index(weights)));
  return it->first;
}

}  // namespace

void Marginals::validate() const {
  check_distribution("gender", sum_values(gender));
  check_distribution("race", sum_values(race));
  check_distribution("religion", sum_values(religion));
  check_distribution("politics", sum_values(politics));
  double age_total = 0.0;
  for (const auto& b : age) {
    if (b.lo < kMinAge || b.hi > kMaxAge || b.lo > b.hi) {
      throw ValidationError(fmt::format("age bracket {}-{} outside [{}, {}]", b.lo, b.hi,
                                        kMinAge, kMaxAge));
    }
    if (b.probability < 0.0) throw ValidationError("age bracket probability is negative");
    age_total += b.probability;
  }
  check_distribution("age", age_total);
  if (interest_pool.empty()) throw ValidationError("interest pool is empty");
  double count_total = 0.0;
  for (const auto& [count, p] : interest_count) {
    if (count < 1 || static_cast<std::size_t>(count) > interest_pool.size()) {
      throw ValidationError(fmt::format(
          "interest draw count {} must lie in [1, {}]", count, interest_pool.size()));
    }
    if (p < 0.0) throw ValidationError("interest count probability is negative");
    count_total += p;
  }
  check_distribution("interests.count", count_total);
}

Roster sample_roster(const Marginals& marginals, std::size_t n, std::uint64_t seed) {
  if (n < 2) throw UsageError("a roster needs at least 2 personas");
  marginals.validate();
  const auto names = name_pool();
  if (n > names.size()) {
    throw CapacityError(fmt::format("requested {} personas but the name pool holds {}", n,
                                    names.size()));
  }

  // One stream per attribute keeps each attribute's draws independent of the others.
  Rng name_rng(derive_seed(seed, "name"));
  Rng gender_rng(derive_seed(seed, "gender"));
  Rng age_rng(derive_seed(seed, "age"));
  Rng race_rng(derive_seed(seed, "race"));
  Rng religion_rng(derive_seed(seed, "religion"));
  Rng politics_rng(derive_seed(seed, "politics"));
  Rng interest_rng(derive_seed(seed, "interests"));

  const auto name_idx = sample_without_replacement(names.size(), n, name_rng);

  std::vector<double> bracket_weights;
  for (const auto& b : marginals.age) bracket_weights.push_back(b.probability);
  std::vector<double> count_weights;
  std::vector<int> counts;
  for (const auto& [c, p] : marginals.interest_count) {
    counts.push_back(c);
    count_weights.push_back(p);
  }

  std::vector<Persona> personas(n);
  for (std::size_t i = 0; i < n; ++i) {
    Persona& p = personas[i];
    p.id = static_cast<PersonaId>(i);
    p.name = std::string(names[name_idx[i]]);
    p.gender = draw_category(marginals.gender, gender_rng);
    const auto& bracket = marginals.age[age_rng.weighted_index(bracket_weights)];
    p.age = bracket.lo + static_cast<int>(age_rng.below(
                             static_cast<std::uint64_t>(bracket.hi - bracket.lo + 1)));
    p.race = draw_category(marginals.race, race_rng);
    p.religion = draw_category(marginals.religion, religion_rng);
    p.politics = draw_category(marginals.politics, politics_rng);
    const int k = counts[interest_rng.weighted_index(count_weights)];
    for (std::size_t t : sample_without_replacement(marginals.interest_pool.size(),
                                                    static_cast<std::size_t>(k), interest_rng)) {
      p.interests.push_back(marginals.interest_pool[t]);
    }
  }
  return Roster(std::move(personas),
                RosterProvenance{marginals.source, seed, "sampled from marginals"});
}

AttributePartition partition(const Roster& roster, Attribute attribute) {
  if (attribute == Attribute::Interests) {
    throw UsageError("interests cannot be partitioned; use pairwise overlap instead");
  }
  AttributePartition out{attribute, {}};
  for (const Persona& p : roster.personas()) out.groups[p.group(attribute)].push_back(p.id);
  return out;
}

// ---------------------------------------------------------------------------
// Roster file I/O

namespace {

std::size_t line_of_offset(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

json parse_json_text(std::string_view text, std::string_view what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(fmt::format("{}: malformed JSON near line {}: {}", what,
                                 line_of_offset(text, e.byte), e.what()));
  }
}

const json& require_field(const json& obj, const char* field, const std::string& context) {
  if (!obj.is_object()) throw ParseError(fmt::format("{}: expected an object", context));
  auto it = obj.find(field);
  if (it == obj.end()) {
    throw ParseError(fmt::format("{}: missing field '{}'", context, field));
  }
  return *it;
}

template <class T>
T field_as(const json& obj, const char* field, const std::string& context) {
  const json& v = require_field(obj, field, context);
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw ParseError(fmt::format("{}: field '{}' has the wrong type", context, field));
  }
}

}  // namespace

std::string format_roster(const Roster& roster) {
  ordered_json prov;
  prov["marginals"] = roster.provenance().marginals;
  if (roster.provenance().seed) prov["seed"] = *roster.provenance().seed;
  prov["note"] = roster.provenance().note;

  std::string out = "{\n  \"format\": \"netweave-roster/1\",\n  \"provenance\": " + prov.dump() +
                    ",\n  \"personas\": [\n";
  for (std::size_t i = 0; i < roster.size(); ++i) {
    const Persona& p = roster[static_cast<PersonaId>(i)];
    ordered_json rec;
    rec["id"] = p.id;
    rec["name"] = p.name;
    rec["gender"] = p.gender;
    rec["age"] = p.age;
    rec["race"] = p.race;
    rec["religion"] = p.religion;
    rec["politics"] = p.politics;
    rec["interests"] = p.interests;
    out += "    " + rec.dump();
    out += (i + 1 < roster.size()) ? ",\n" : "\n";
  }
  out += "  ]\n}\n";
  return out;
}

Roster parse_roster(std::string_view text) {
  const json doc = parse_json_text(text, "roster");
  const json& list = require_field(doc, "personas", "roster");
  if (!list.is_array()) throw ParseError("roster: 'personas' must be an array");

  RosterProvenance prov;
  if (auto it = doc.find("provenance"); it != doc.end() && it->is_object()) {
    prov.marginals = it->value("marginals", "");
    prov.note = it->value("note", "");
    if (auto s = it->find("seed"); s != it->end() && s->is_number_unsigned()) {
      prov.seed = s->get<std::uint64_t>();
    }
  }

  std::vector<Persona> personas;
  personas.reserve(list.size());
  for (std::size_t i = 0; i < list.size(); ++i) {
    const json& rec = list[i];
    const std::string ctx = fmt::format("roster: persona record #{}", i);
    Persona p;
    p.id = field_as<PersonaId>(rec, "id", ctx);
    p.name = field_as<std::string>(rec, "name", ctx);
    p.gender = field_as<std::string>(rec, "gender", ctx);
    p.age = field_as<int>(rec, "age", ctx);
    p.race = field_as<std::string>(rec, "race", ctx);
    p.religion = field_as<std::string>(rec, "religion", ctx);
    p.politics = field_as<std::string>(rec, "politics", ctx);
    p.interests = field_as<std::vector<std::string>>(rec, "interests", ctx);
    personas.push_back(std::move(p));
  }
  return Roster(std::move(personas), std::move(prov));
}

Roster load_roster(const std::filesystem::path& path) {
  try {
    return parse_roster(detail::read_file(path));
  } catch (const ParseError& e) {
    throw ParseError(fmt::format("{}: {}", path.string(), e.what()));
  } catch (const ValidationError& e) {
    throw ValidationError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

void save_roster(const Roster& roster, const std::filesystem::path& path) {
  detail::write_file(path, format_roster(roster));
}

Marginals parse_marginals(std::string_view text) {
  const json doc = parse_json_text(text, "marginals");
  Marginals m;
  m.source = doc.value("source", "");
  const std::string ctx = "marginals";
  m.gender = field_as<std::map<std::string, double>>(doc, "gender", ctx);
  m.race = field_as<std::map<std::string, double>>(doc, "race", ctx);
  m.religion = field_as<std::map<std::string, double>>(doc, "religion", ctx);
  m.politics = field_as<std::map<std::string, double>>(doc, "politics", ctx);
  for (const auto& [label, p] : field_as<std::map<std::string, double>>(doc, "age", ctx)) {
    AgeBracketWeight b;
    if (std::sscanf(label.c_str(), "%d-%d", &b.lo, &b.hi) != 2) {
      throw ParseError(fmt::format("marginals: age bracket '{}' is not of the form lo-hi", label));
    }
    b.probability = p;
    m.age.push_back(b);
  }
  const json& interests = require_field(doc, "interests", ctx);
  m.interest_pool = field_as<std::vector<std::string>>(interests, "pool", "marginals.interests");
  for (const auto& [count, p] :
       field_as<std::map<std::string, double>>(interests, "count", "marginals.interests")) {
    int c = 0;
    try {
      c = std::stoi(count);
    } catch (const std::exception&) {
      throw ParseError(fmt::format("marginals.interests: count key '{}' is not an integer", count));
    }
    m.interest_count[c] = p;
  }
  m.validate();
  return m;
}

Marginals load_marginals(const std::filesystem::path& path) {
  try {
    return parse_marginals(detail::read_file(path));
  } catch (const ParseError& e) {
    throw ParseError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

std::filesystem::path default_data_dir() {
  if (const char* env = std::getenv("NETWEAVE_DATA_DIR"); env != nullptr && *env != '\0') {
    return env;
  }
  return NETWEAVE_DEFAULT_DATA_DIR;
}

std::filesystem::path canonical_roster_path() { return default_data_dir() / "roster.json"; }
std::filesystem::path canonical_marginals_path() {
  return default_data_dir() / "marginals_us.json";
}

}  // namespace netweave
