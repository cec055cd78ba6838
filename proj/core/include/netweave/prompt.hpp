#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>

#include "netweave/network.hpp"
#include "netweave/persona.hpp"

namespace netweave {

enum class Method { Sequential, Global, Local, Iterative };
enum class Language { En, Es, Hi, Ja };
enum class Culture { US, India, Japan, Brazil };

inline constexpr std::array<Method, 4> kAllMethods{Method::Sequential, Method::Global,
                                                   Method::Local, Method::Iterative};
inline constexpr std::array<Language, 4> kAllLanguages{Language::En, Language::Es, Language::Hi,
                                                       Language::Ja};
inline constexpr std::array<Culture, 4> kAllCultures{Culture::US, Culture::India, Culture::Japan,
                                                     Culture::Brazil};

// Lowercase tokens ("sequential", "en", "india"); parsing is case-insensitive
// and throws UsageError on unknown values.
std::string_view method_name(Method m) noexcept;
std::string_view language_code(Language l) noexcept;
std::string_view culture_name(Culture c) noexcept;
Method method_from_name(std::string_view name);
Language language_from_code(std::string_view code);
Culture culture_from_name(std::string_view name);

/// Placeholders a method's template must contain.
std::set<std::string> required_placeholders(Method m);
/// Placeholders any template may contain in addition to the required ones.
std::set<std::string> optional_placeholders();

struct PromptTemplate {
  Method method = Method::Sequential;
  Language language = Language::En;
  Culture culture = Culture::US;
  std::string body;              // `{name}` placeholders
  std::string culture_preamble;  // bound to {culture_preamble}
  std::string reason_instruction;  // bound to {reason_instruction} when reasons are requested

  /// Placeholder names that appear in `body`.
  std::set<std::string> placeholders() const;

  /// Throws TemplateError unless the body holds every placeholder its method
  /// requires and nothing outside the required and optional sets.
  void validate() const;
};

using Bindings = std::map<std::string, std::string, std::less<>>;

/// Substitutes every placeholder. Throws TemplateError when a placeholder has
/// no binding or a binding names no placeholder.
std::string render_prompt(const PromptTemplate& tpl, const Bindings& bindings);

/// "<name> | gender: ... | age: ... | race: ... | religion: ... | politics: ... |
/// interests: a, b"
std::string persona_profile(const Persona& p);
/// "<number>. " followed by the profile.
std::string persona_card(const Persona& p, std::size_t number);
std::string render_cards(const Roster& roster, std::span<const PersonaId> ids);
/// One line per source with outgoing edges: "<name> -> <name>, <name>".
/// "(no friendships yet)" when empty.
std::string render_edges(const Roster& roster, std::span<const Edge> edges);

/// Template directory layout:
///   <method>.<lang>.txt          method body
///   culture.<culture>.<lang>.txt preamble injected as {culture_preamble}
///   reason.<lang>.txt            instruction injected as {reason_instruction}
class TemplateStore {
 public:
  explicit TemplateStore(std::filesystem::path directory);

  const std::filesystem::path& directory() const noexcept { return directory_; }

  /// Loads and validates. Throws TemplateError when any file is missing.
  PromptTemplate load(Method m, Language l, Culture c) const;

  /// Files needed for (m, l, c) that are absent.
  std::vector<std::filesystem::path> missing(Method m, Language l, Culture c) const;

 private:
  std::filesystem::path directory_;
};

std::filesystem::path default_template_dir();

}  // namespace netweave
