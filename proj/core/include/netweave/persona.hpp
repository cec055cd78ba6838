#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace netweave {

using PersonaId = std::uint32_t;

/// Demographic dimensions a tie can be homophilous on. Age is compared by
/// bracket (see kAgeBracketStarts); interests match on any shared tag.
enum class Attribute { Gender, AgeBracket, Race, Religion, Politics, Interests };

inline constexpr std::array<Attribute, 6> kAllAttributes{
    Attribute::Gender,   Attribute::AgeBracket, Attribute::Race,
    Attribute::Religion, Attribute::Politics,   Attribute::Interests};

inline constexpr std::array<Attribute, 5> kCategoricalAttributes{
    Attribute::Gender, Attribute::AgeBracket, Attribute::Race, Attribute::Religion,
    Attribute::Politics};

/// Lower edges of the age brackets used for homophily: 18-29, 30-44, 45-64, 65+.
inline constexpr std::array<int, 4> kAgeBracketStarts{18, 30, 45, 65};
inline constexpr int kMinAge = 18;
inline constexpr int kMaxAge = 99;

std::string_view attribute_name(Attribute a) noexcept;
/// Accepts the names produced by attribute_name ("age" is an alias of "age_bracket").
/// Throws UsageError on anything else.
Attribute attribute_from_name(std::string_view name);

/// Index into kAgeBracketStarts. Throws UsageError for ages outside [18, 99].
std::size_t age_bracket(int age);
std::string age_bracket_label(int age);

struct Persona {
  PersonaId id = 0;
  std::string name;
  std::string gender;
  int age = kMinAge;
  std::string race;
  std::string religion;
  std::string politics;
  std::vector<std::string> interests;  // sorted, unique, non-empty

  /// Group label on a categorical attribute. Throws UsageError for Interests.
  std::string group(Attribute a) const;

  /// Same group on `a`; for Interests, at least one shared tag.
  bool shares(const Persona& other, Attribute a) const;

  bool operator==(const Persona&) const = default;
};

struct RosterProvenance {
  std::string marginals;
  std::optional<std::uint64_t> seed;
  std::string note;

  bool operator==(const RosterProvenance&) const = default;
};

/// Ordered, immutable population of personas with ids 0..n-1.
class Roster {
 public:
  Roster() = default;
  /// Sorts by id and validates. Throws ValidationError when ids are not exactly
  /// {0..n-1}, names collide, interests are empty, or an age is out of range.
  explicit Roster(std::vector<Persona> personas, RosterProvenance provenance = {});

  std::size_t size() const noexcept { return personas_.size(); }
  const Persona& operator[](PersonaId id) const { return personas_.at(id); }
  std::span<const Persona> personas() const noexcept { return personas_; }
  const RosterProvenance& provenance() const noexcept { return provenance_; }

  bool operator==(const Roster&) const = default;

 private:
  std::vector<Persona> personas_;
  RosterProvenance provenance_;
};

struct AgeBracketWeight {
  int lo = kMinAge;
  int hi = kMaxAge;
  double probability = 0.0;
};

/// Per-attribute categorical distributions used to sample a roster.
struct Marginals {
  std::string source;
  std::map<std::string, double> gender;
  std::vector<AgeBracketWeight> age;
  std::map<std::string, double> race;
  std::map<std::string, double> religion;
  std::map<std::string, double> politics;
  std::vector<std::string> interest_pool;
  std::map<int, double> interest_count;  // tags per persona -> probability

  /// Throws ValidationError when a distribution does not sum to 1 within 1e-9,
  /// brackets leave [18, 99], or interest draws exceed the pool.
  void validate() const;
};

/// Draws `n` personas independently per attribute. Names come from the fixed
/// name pool without replacement. Pure in (marginals, n, seed).
Roster sample_roster(const Marginals& marginals, std::size_t n, std::uint64_t seed);

/// The fixed pool of 200 display names used by sample_roster.
std::span<const std::string_view> name_pool() noexcept;

struct AttributePartition {
  Attribute attribute = Attribute::Gender;
  std::map<std::string, std::vector<PersonaId>> groups;
};

/// Disjoint, exhaustive grouping of the roster by a categorical attribute.
/// Throws UsageError for Interests, which has no partition.
AttributePartition partition(const Roster& roster, Attribute attribute);

std::string format_roster(const Roster& roster);
Roster parse_roster(std::string_view text);
Roster load_roster(const std::filesystem::path& path);
void save_roster(const Roster& roster, const std::filesystem::path& path);

Marginals parse_marginals(std::string_view text);
Marginals load_marginals(const std::filesystem::path& path);

/// Directory holding the shipped roster, marginals, and prompt templates.
/// NETWEAVE_DATA_DIR overrides the compiled-in location.
std::filesystem::path default_data_dir();
std::filesystem::path canonical_roster_path();
std::filesystem::path canonical_marginals_path();

}  // namespace netweave
