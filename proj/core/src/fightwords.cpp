#include "netweave/fightwords.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "csv.hpp"
#include "file_util.hpp"
#include "log.hpp"
#include "netweave/errors.hpp"
#include "netweave/generate.hpp"

namespace netweave {

namespace {

// Decodes one UTF-8 sequence at `i`; returns 0 and advances one byte on
// malformed input so the caller can drop it.
char32_t decode(std::string_view s, std::size_t& i) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  auto cont = [&](std::size_t k) -> int {
    if (i + k >= s.size()) return -1;
    const auto b = static_cast<unsigned char>(s[i + k]);
    return (b & 0xC0) == 0x80 ? (b & 0x3F) : -1;
  };
  if (b0 < 0x80) {
    ++i;
    return b0;
  }
  int len = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    ++i;
    return 0;
  }
  for (int k = 1; k < len; ++k) {
    const int c = cont(static_cast<std::size_t>(k));
    if (c < 0) {
      ++i;
      return 0;
    }
    cp = (cp << 6) | static_cast<char32_t>(c);
  }
  i += static_cast<std::size_t>(len);
  return cp;
}

void encode(char32_t cp, std::string& out) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

char32_t to_lower(char32_t c) {
  if (c >= U'A' && c <= U'Z') return c + 32;
  if (c >= 0xC0 && c <= 0xDE && c != 0xD7) return c + 32;
  if ((c >= 0x100 && c <= 0x137) || (c >= 0x14A && c <= 0x177)) return (c % 2 == 0) ? c + 1 : c;
  if ((c >= 0x139 && c <= 0x148) || (c >= 0x179 && c <= 0x17E)) return (c % 2 == 1) ? c + 1 : c;
  if (c == 0x178) return 0xFF;
  if (c >= 0x391 && c <= 0x3A9 && c != 0x3A2) return c + 32;
  if (c >= 0x410 && c <= 0x42F) return c + 32;
  if (c >= 0x400 && c <= 0x40F) return c + 80;
  return c;
}

bool is_separator(char32_t c) {
  if (c < 0x80) {
    return c <= 0x20 || c == 0x7F || (c >= 0x21 && c <= 0x2F) || (c >= 0x3A && c <= 0x40) ||
           (c >= 0x5B && c <= 0x60) || (c >= 0x7B && c <= 0x7E);
  }
  return (c >= 0x80 && c <= 0xBF) || c == 0xD7 || c == 0xF7 ||  // Latin-1 controls, punctuation
         (c >= 0x2000 && c <= 0x206F) ||                        // general punctuation
         (c >= 0x3000 && c <= 0x303F) ||                        // CJK symbols and punctuation
         c == 0x0964 || c == 0x0965 ||                          // danda
         (c >= 0xFF01 && c <= 0xFF0F) || (c >= 0xFF1A && c <= 0xFF20) ||
         (c >= 0xFF3B && c <= 0xFF40) || (c >= 0xFF5B && c <= 0xFF65);
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text, const TokenizerConfig& config) {
  std::vector<std::string> words;
  std::string current;
  std::size_t i = 0;
  while (i < text.size()) {
    const char32_t c = decode(text, i);
    if (c == 0) continue;
    if (is_separator(c)) {
      if (!current.empty()) words.push_back(std::move(current));
      current.clear();
      continue;
    }
    encode(to_lower(c), current);
  }
  if (!current.empty()) words.push_back(std::move(current));

  std::vector<std::string> out = words;
  for (std::size_t n = 2; n <= config.max_ngram; ++n) {
    for (std::size_t k = 0; k + n <= words.size(); ++k) {
      std::string gram = words[k];
      for (std::size_t j = 1; j < n; ++j) gram += ' ' + words[k + j];
      out.push_back(std::move(gram));
    }
  }
  return out;
}

std::map<std::string, std::size_t> Corpus::counts() const {
  std::map<std::string, std::size_t> c;
  for (const auto& doc : documents) {
    for (auto& t : tokenize(doc, tokenizer)) ++c[std::move(t)];
  }
  return c;
}

namespace {

std::size_t total(const std::map<std::string, std::size_t>& counts) {
  std::size_t n = 0;
  for (const auto& [_, c] : counts) n += c;
  return n;
}

}  // namespace

double default_alpha0(const Corpus& a, const Corpus& b) {
  return 0.01 * static_cast<double>(total(a.counts()) + total(b.counts()));
}

std::vector<FightingWordsResult> fighting_words(const Corpus& a, const Corpus& b, double alpha0) {
  if (!(alpha0 > 0.0)) throw UsageError(fmt::format("alpha0 must be positive (got {})", alpha0));
  const auto ca = a.counts();
  const auto cb = b.counts();
  std::map<std::string, std::size_t> pooled = ca;
  for (const auto& [w, c] : cb) pooled[w] += c;
  const double pooled_total = static_cast<double>(total(pooled));
  if (pooled.empty()) throw UsageError("fighting words needs a non-empty vocabulary");
  const double na = static_cast<double>(total(ca));
  const double nb = static_cast<double>(total(cb));

  std::vector<FightingWordsResult> out;
  out.reserve(pooled.size());
  for (const auto& [w, pc] : pooled) {
    FightingWordsResult r;
    r.term = w;
    if (auto it = ca.find(w); it != ca.end()) r.count_a = it->second;
    if (auto it = cb.find(w); it != cb.end()) r.count_b = it->second;
    const double alpha_w = alpha0 * static_cast<double>(pc) / pooled_total;
    const double ya = static_cast<double>(r.count_a);
    const double yb = static_cast<double>(r.count_b);
    r.delta = std::log((ya + alpha_w) / (na + alpha0 - ya - alpha_w)) -
              std::log((yb + alpha_w) / (nb + alpha0 - yb - alpha_w));
    r.variance = 1.0 / (ya + alpha_w) + 1.0 / (yb + alpha_w);
    r.z = r.delta / std::sqrt(r.variance);
    out.push_back(std::move(r));
  }
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
    const double ax = std::abs(x.z);
    const double ay = std::abs(y.z);
    if (ax != ay) return ax > ay;
    return x.term < y.term;
  });
  return out;
}

Corpus collect_reasons(const std::filesystem::path& directory, const ReasonFilter& filter,
                       const TokenizerConfig& tokenizer) {
  std::error_code ec;
  if (!std::filesystem::is_directory(directory, ec)) {
    throw UsageError(fmt::format("'{}' is not a directory", directory.string()));
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(directory)) {
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && name.ends_with(".json") && !name.ends_with(".failed.json")) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());

  Corpus corpus;
  corpus.tokenizer = tokenizer;
  for (const auto& path : files) {
    Transcript t;
    try {
      t = transcript_from_json(detail::read_file(path));
    } catch (const Error& e) {
      detail::log().warn("skipping {}: {}", path.string(), e.what());
      continue;
    }
    if (filter && !filter(t.labels)) continue;
    for (const auto& n : t.nominations) {
      if (n.reason && !n.reason->empty()) corpus.documents.push_back(*n.reason);
    }
  }
  if (corpus.documents.empty()) {
    throw UsageError(
        fmt::format("no nomination reasons under '{}' match the filter", directory.string()));
  }
  return corpus;
}

ReasonFilter label_filter(std::span<const std::string> terms) {
  std::vector<std::pair<std::string, std::string>> wanted;
  for (const auto& t : terms) {
    const auto eq = t.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw UsageError(fmt::format("filter term '{}' is not key=value", t));
    }
    wanted.emplace_back(t.substr(0, eq), t.substr(eq + 1));
  }
  return [wanted](const std::map<std::string, std::string>& labels) {
    for (const auto& [k, v] : wanted) {
      const auto it = labels.find(k);
      if (it == labels.end() || it->second != v) return false;
    }
    return true;
  };
}

void write_fighting_words_csv(std::ostream& out, std::span<const FightingWordsResult> results) {
  out << "term,count_a,count_b,z\n";
  for (const auto& r : results) {
    out << detail::csv_field(r.term) << ',' << r.count_a << ',' << r.count_b << ','
        << detail::csv_number(r.z) << '\n';
  }
}

}  // namespace netweave
