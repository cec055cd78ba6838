#include "netweave/prompt.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "file_util.hpp"
#include "netweave/errors.hpp"
#include "text_util.hpp"

namespace netweave {

std::string_view method_name(Method m) noexcept {
  switch (m) {
    case Method::Sequential: return "sequential";
    case Method::Global: return "global";
    case Method::Local: return "local";
    case Method::Iterative: return "iterative";
  }
  return "unknown";
}

std::string_view language_code(Language l) noexcept {
  switch (l) {
    case Language::En: return "en";
    case Language::Es: return "es";
    case Language::Hi: return "hi";
    case Language::Ja: return "ja";
  }
  return "unknown";
}

std::string_view culture_name(Culture c) noexcept {
  switch (c) {
    case Culture::US: return "us";
    case Culture::India: return "india";
    case Culture::Japan: return "japan";
    case Culture::Brazil: return "brazil";
  }
  return "unknown";
}

Method method_from_name(std::string_view name) {
  const std::string lower = detail::to_lower(name);
  for (Method m : kAllMethods) {
    if (method_name(m) == lower) return m;
  }
  throw UsageError(fmt::format("unknown method '{}'", name));
}

Language language_from_code(std::string_view code) {
  const std::string lower = detail::to_lower(code);
  for (Language l : kAllLanguages) {
    if (language_code(l) == lower) return l;
  }
  throw UsageError(fmt::format("unknown language '{}'", code));
}

Culture culture_from_name(std::string_view name) {
  const std::string lower = detail::to_lower(name);
  for (Culture c : kAllCultures) {
    if (culture_name(c) == lower) return c;
  }
  throw UsageError(fmt::format("unknown culture '{}'", name));
}

std::set<std::string> required_placeholders(Method m) {
  switch (m) {
    case Method::Sequential: return {"ego", "roster"};
    case Method::Global: return {"roster"};
    case Method::Local: return {"ego", "neighborhood"};
    case Method::Iterative: return {"roster", "current_edges", "round"};
  }
  return {};
}

std::set<std::string> optional_placeholders() { return {"culture_preamble", "reason_instruction"}; }

namespace {

bool is_ident_char(char c) noexcept { return (c >= 'a' && c <= 'z') || c == '_'; }

// Calls on_text for literal runs and on_placeholder for each `{name}`.
template <class Text, class Placeholder>
void scan_template(std::string_view body, Text on_text, Placeholder on_placeholder) {
  std::size_t pos = 0;
  std::size_t literal_start = 0;
  while (pos < body.size()) {
    if (body[pos] == '{') {
      std::size_t end = pos + 1;
      while (end < body.size() && is_ident_char(body[end])) ++end;
      if (end < body.size() && body[end] == '}' && end > pos + 1) {
        on_text(body.substr(literal_start, pos - literal_start));
        on_placeholder(body.substr(pos + 1, end - pos - 1));
        pos = end + 1;
        literal_start = pos;
        continue;
      }
    }
    ++pos;
  }
  on_text(body.substr(literal_start));
}

}  // namespace

std::set<std::string> PromptTemplate::placeholders() const {
  std::set<std::string> out;
  scan_template(body, [](std::string_view) {},
                [&](std::string_view name) { out.emplace(name); });
  return out;
}

void PromptTemplate::validate() const {
  const auto present = placeholders();
  const auto required = required_placeholders(method);
  const auto optional = optional_placeholders();
  for (const auto& r : required) {
    if (!present.contains(r)) {
      throw TemplateError(fmt::format("{} template ({}) lacks placeholder {{{}}}",
                                      method_name(method), language_code(language), r));
    }
  }
  for (const auto& p : present) {
    if (!required.contains(p) && !optional.contains(p)) {
      throw TemplateError(fmt::format("{} template ({}) has unexpected placeholder {{{}}}",
                                      method_name(method), language_code(language), p));
    }
  }
}

std::string render_prompt(const PromptTemplate& tpl, const Bindings& bindings) {
  const auto present = tpl.placeholders();
  for (const auto& [name, _] : bindings) {
    if (!present.contains(name)) {
      throw TemplateError(fmt::format("binding {{{}}} does not appear in the {} template", name,
                                      method_name(tpl.method)));
    }
  }
  std::string out;
  scan_template(
      tpl.body, [&](std::string_view text) { out.append(text); },
      [&](std::string_view name) {
        auto it = bindings.find(name);
        if (it == bindings.end()) {
          throw TemplateError(fmt::format("no binding for placeholder {{{}}} in the {} template",
                                          name, method_name(tpl.method)));
        }
        out.append(it->second);
      });
  return out;
}

std::string persona_profile(const Persona& p) {
  std::string interests;
  for (std::size_t i = 0; i < p.interests.size(); ++i) {
    if (i > 0) interests += ", ";
    interests += p.interests[i];
  }
  return fmt::format(
      "{} | gender: {} | age: {} | race: {} | religion: {} | politics: {} | interests: {}", p.name,
      p.gender, p.age, p.race, p.religion, p.politics, interests);
}

std::string persona_card(const Persona& p, std::size_t number) {
  return fmt::format("{}. {}", number, persona_profile(p));
}

std::string render_cards(const Roster& roster, std::span<const PersonaId> ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i > 0) out += '\n';
    out += persona_card(roster[ids[i]], i + 1);
  }
  return out;
}

std::string render_edges(const Roster& roster, std::span<const Edge> edges) {
  if (edges.empty()) return "(no friendships yet)";
  std::vector<Edge> sorted(edges.begin(), edges.end());
  std::sort(sorted.begin(), sorted.end());
  std::string out;
  std::size_t i = 0;
  while (i < sorted.size()) {
    const NodeId src = sorted[i].source;
    if (!out.empty()) out += '\n';
    out += roster[src].name + " ->";
    bool first = true;
    for (; i < sorted.size() && sorted[i].source == src; ++i) {
      out += first ? " " : ", ";
      out += roster[sorted[i].target].name;
      first = false;
    }
  }
  return out;
}

TemplateStore::TemplateStore(std::filesystem::path directory) : directory_(std::move(directory)) {}

namespace {

std::filesystem::path body_path(const std::filesystem::path& dir, Method m, Language l) {
  return dir / fmt::format("{}.{}.txt", method_name(m), language_code(l));
}
std::filesystem::path culture_path(const std::filesystem::path& dir, Culture c, Language l) {
  return dir / fmt::format("culture.{}.{}.txt", culture_name(c), language_code(l));
}
std::filesystem::path reason_path(const std::filesystem::path& dir, Language l) {
  return dir / fmt::format("reason.{}.txt", language_code(l));
}

std::string read_trimmed(const std::filesystem::path& p) {
  std::string text = detail::read_file(p);
  while (!text.empty() && detail::is_space(text.back())) text.pop_back();
  return text;
}

}  // namespace

std::vector<std::filesystem::path> TemplateStore::missing(Method m, Language l, Culture c) const {
  std::vector<std::filesystem::path> out;
  for (const auto& p : {body_path(directory_, m, l), culture_path(directory_, c, l),
                        reason_path(directory_, l)}) {
    if (!std::filesystem::is_regular_file(p)) out.push_back(p);
  }
  return out;
}

PromptTemplate TemplateStore::load(Method m, Language l, Culture c) const {
  if (const auto gaps = missing(m, l, c); !gaps.empty()) {
    throw TemplateError(fmt::format("missing template file '{}'", gaps.front().string()));
  }
  PromptTemplate tpl;
  tpl.method = m;
  tpl.language = l;
  tpl.culture = c;
  tpl.body = read_trimmed(body_path(directory_, m, l)) + "\n";
  tpl.culture_preamble = read_trimmed(culture_path(directory_, c, l));
  tpl.reason_instruction = read_trimmed(reason_path(directory_, l));
  tpl.validate();
  return tpl;
}

std::filesystem::path default_template_dir() { return default_data_dir() / "templates"; }

}  // namespace netweave
