#include "netweave/parse.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "text_util.hpp"

namespace netweave {

namespace {

bool is_word_byte(char c) noexcept {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

struct Normalized {
  std::string text;                // lowercase, whitespace runs collapsed
  std::vector<std::size_t> origin; // origin[k] = byte offset of text[k] in the input
};

Normalized normalize_with_offsets(std::string_view in) {
  Normalized out;
  out.text.reserve(in.size());
  out.origin.reserve(in.size() + 1);
  bool in_space = false;
  for (std::size_t i = 0; i < in.size(); ++i) {
    const char c = in[i];
    if (detail::is_space(c)) {
      if (!in_space) {
        out.text.push_back(' ');
        out.origin.push_back(i);
      }
      in_space = true;
      continue;
    }
    in_space = false;
    out.text.push_back(detail::ascii_lower(c));
    out.origin.push_back(i);
  }
  out.origin.push_back(in.size());
  return out;
}

bool starts_with_bytes(std::string_view s, std::string_view prefix) {
  return s.substr(0, prefix.size()) == prefix;
}

// Leading separators between a name and its reason.
std::string_view strip_reason_prefix(std::string_view s) {
  while (!s.empty()) {
    if (detail::is_space(s.front()) || s.front() == ':' || s.front() == ',' ||
        s.front() == '-' || s.front() == '(' || s.front() == '>') {
      s.remove_prefix(1);
    } else if (starts_with_bytes(s, "\xE2\x80\x94") || starts_with_bytes(s, "\xE2\x80\x93") ||
               starts_with_bytes(s, "\xEF\xBC\x9A") || starts_with_bytes(s, "\xE3\x80\x81")) {
      // em dash, en dash, fullwidth colon, ideographic comma
      s.remove_prefix(3);
    } else {
      break;
    }
  }
  return s;
}

std::string_view strip_reason_suffix(std::string_view s) {
  while (!s.empty()) {
    const char c = s.back();
    if (detail::is_space(c) || c == '.' || c == ',' || c == ';' || c == '-' || c == ')') {
      s.remove_suffix(1);
    } else {
      break;
    }
  }
  return s;
}

std::optional<std::string> reason_between(std::string_view line, std::size_t from,
                                          std::size_t to) {
  std::string_view r = strip_reason_suffix(strip_reason_prefix(line.substr(from, to - from)));
  if (r.empty()) return std::nullopt;
  return std::string(r);
}

bool is_explicit_empty(std::string_view text) {
  std::string_view t = detail::trim(text);
  while (!t.empty() && t.back() == '.') t.remove_suffix(1);
  return t.empty() || detail::to_lower(t) == "none";
}

// A line formatted as a list entry: "- x", "* x", "• x", "3. x", "3) x".
bool is_list_line(std::string_view line) {
  line = detail::trim(line);
  if (line.empty()) return false;
  if (line.front() == '-' || line.front() == '*') return line.size() > 1;
  if (starts_with_bytes(line, "\xE2\x80\xA2")) return true;
  std::size_t i = 0;
  while (i < line.size() && line[i] >= '0' && line[i] <= '9') ++i;
  return i > 0 && i < line.size() && (line[i] == '.' || line[i] == ')');
}

}  // namespace

NameMatcher::NameMatcher(const Roster& roster) {
  for (const Persona& p : roster.personas()) {
    names_.emplace_back(detail::normalize_name(p.name), p.id);
  }
  std::stable_sort(names_.begin(), names_.end(), [](const auto& a, const auto& b) {
    return a.first.size() > b.first.size();
  });
}

std::vector<NameMatcher::Match> NameMatcher::find_all(std::string_view text) const {
  const Normalized norm = normalize_with_offsets(text);
  const std::string_view hay = norm.text;
  std::vector<Match> out;
  std::size_t pos = 0;
  while (pos < hay.size()) {
    if (pos > 0 && is_word_byte(hay[pos - 1])) {
      ++pos;
      continue;
    }
    bool matched = false;
    for (const auto& [name, id] : names_) {
      if (hay.size() - pos < name.size() || hay.compare(pos, name.size(), name) != 0) continue;
      const std::size_t end = pos + name.size();
      if (end < hay.size() && is_word_byte(hay[end])) continue;
      out.push_back({id, norm.origin[pos], norm.origin[end - 1] + 1});
      pos = end;
      matched = true;
      break;
    }
    if (!matched) ++pos;
  }
  return out;
}

ParseResult parse_response(std::string_view text, PersonaId ego,
                           const std::set<PersonaId>& allowed, const Roster& roster,
                           bool include_reason) {
  ParseResult result;
  if (is_explicit_empty(text)) {
    result.explicit_empty = true;
    return result;
  }
  const NameMatcher matcher(roster);
  std::set<PersonaId> taken;
  for (std::string_view line : detail::split_lines(text)) {
    const auto matches = matcher.find_all(line);
    if (matches.empty()) {
      if (is_list_line(line)) {
        ++result.tally.unknown_names;
        result.rejections.push_back(
            fmt::format("unknown name: {}", detail::trim(line)));
      }
      continue;
    }
    for (std::size_t k = 0; k < matches.size(); ++k) {
      const auto& m = matches[k];
      const std::string& name = roster[m.id].name;
      if (m.id == ego) {
        ++result.tally.self_references;
        result.rejections.push_back(fmt::format("self-reference: {}", name));
        continue;
      }
      if (!allowed.contains(m.id)) {
        ++result.tally.outside_allowed;
        result.rejections.push_back(fmt::format("not an allowed target: {}", name));
        continue;
      }
      if (!taken.insert(m.id).second) {
        ++result.tally.duplicates;
        continue;
      }
      TieNomination nom{ego, m.id, std::nullopt};
      if (include_reason) {
        const std::size_t stop = k + 1 < matches.size() ? matches[k + 1].begin : line.size();
        nom.reason = reason_between(line, m.end, stop);
      }
      result.nominations.push_back(std::move(nom));
      ++result.tally.accepted;
    }
  }
  result.soft_failure = result.nominations.empty();
  return result;
}

ParseResult parse_edge_list(std::string_view text, const Roster& roster, bool include_reason) {
  ParseResult result;
  if (is_explicit_empty(text)) {
    result.explicit_empty = true;
    return result;
  }
  const NameMatcher matcher(roster);
  std::set<std::pair<PersonaId, PersonaId>> taken;
  for (std::string_view line : detail::split_lines(text)) {
    const auto matches = matcher.find_all(line);
    const bool looks_like_edge = line.find("->") != std::string_view::npos || is_list_line(line);
    if (matches.size() < 2) {
      if (looks_like_edge) {
        ++result.tally.unknown_names;
        result.rejections.push_back(fmt::format("unresolved edge line: {}", detail::trim(line)));
      }
      continue;
    }
    const PersonaId source = matches.front().id;
    for (std::size_t k = 1; k < matches.size(); ++k) {
      const auto& m = matches[k];
      if (m.id == source) {
        ++result.tally.self_references;
        result.rejections.push_back(fmt::format("self-loop: {}", roster[source].name));
        continue;
      }
      if (!taken.emplace(source, m.id).second) {
        ++result.tally.duplicates;
        continue;
      }
      TieNomination nom{source, m.id, std::nullopt};
      if (include_reason) {
        const std::size_t stop = k + 1 < matches.size() ? matches[k + 1].begin : line.size();
        nom.reason = reason_between(line, m.end, stop);
      }
      result.nominations.push_back(std::move(nom));
      ++result.tally.accepted;
    }
  }
  result.soft_failure = result.nominations.empty();
  return result;
}

}  // namespace netweave
