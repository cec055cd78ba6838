#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace netweave {

struct TokenizerConfig {
  std::size_t max_ngram = 2;  // 1: unigrams; 2: unigrams and bigrams
};

/// Lowercases (Latin, Greek and Cyrillic letters), turns punctuation into
/// spaces, splits on whitespace, and emits n-grams up to `max_ngram` joined by
/// single spaces. Scripts without spaces, such as Japanese, come out as long
/// unsegmented tokens.
std::vector<std::string> tokenize(std::string_view text, const TokenizerConfig& config = {});

struct Corpus {
  std::vector<std::string> documents;
  TokenizerConfig tokenizer;

  /// n-gram counts over all documents.
  std::map<std::string, std::size_t> counts() const;
};

struct FightingWordsResult {
  std::string term;
  std::size_t count_a = 0;
  std::size_t count_b = 0;
  double delta = 0.0;     // log-odds ratio with the informative prior
  double variance = 0.0;
  double z = 0.0;         // positive: associated with corpus A
};

/// Prior mass 0.01 x the pooled n-gram count of both corpora.
double default_alpha0(const Corpus& a, const Corpus& b);

/// Log-odds ratio with an informative Dirichlet prior. The prior on term w is
/// alpha0 times its share of the pooled counts. Sorted by |z| descending, then
/// term. Throws UsageError when the pooled vocabulary is empty or alpha0 <= 0.
std::vector<FightingWordsResult> fighting_words(const Corpus& a, const Corpus& b, double alpha0);

using ReasonFilter = std::function<bool(const std::map<std::string, std::string>& labels)>;

/// Reasons from every nomination in the transcripts under `directory`
/// (searched recursively for *.json, failed transcripts excluded) whose labels
/// satisfy `filter`. Throws UsageError when nothing matches.
Corpus collect_reasons(const std::filesystem::path& directory, const ReasonFilter& filter,
                       const TokenizerConfig& tokenizer = {});

/// Filter from "key=value" terms, all of which must hold.
ReasonFilter label_filter(std::span<const std::string> terms);

/// CSV columns term, count_a, count_b, z.
void write_fighting_words_csv(std::ostream& out, std::span<const FightingWordsResult> results);

}  // namespace netweave
