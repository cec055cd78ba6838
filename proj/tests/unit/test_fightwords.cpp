#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "netweave/errors.hpp"
#include "netweave/fightwords.hpp"
#include "netweave/generate.hpp"

using namespace netweave;

namespace {

Corpus repeated(const std::string& doc, std::size_t times) {
  Corpus c;
  c.documents.assign(times, doc);
  return c;
}

const FightingWordsResult& find(const std::vector<FightingWordsResult>& rs, const std::string& term) {
  for (const auto& r : rs) {
    if (r.term == term) return r;
  }
  FAIL("term missing: " << term);
  throw;
}

}  // namespace

TEST_CASE("tokenizer") {
  using V = std::vector<std::string>;
  CHECK(tokenize("Same party!", {1}) == V{"same", "party"});
  CHECK(tokenize("We share  hobbies, really.") == V{"we", "share", "hobbies", "really", "we share",
                                                     "share hobbies", "hobbies really"});
  CHECK(tokenize("", {}).empty());
  CHECK(tokenize("...", {}).empty());
  CHECK(tokenize("ÉCOLE Ñandú", {1}) == V{"école", "ñandú"});
  CHECK(tokenize("ΑΘΗΝΑ Москва", {1}) == V{"αθηνα", "москва"});
  CHECK(tokenize("同じ趣味。仲良し", {1}) == V{"同じ趣味", "仲良し"});
  CHECK(tokenize("समान रुचि।", {1}) == V{"समान", "रुचि"});
  CHECK(tokenize("a\xff" "b", {1}) == V{"ab"});
}

TEST_CASE("hand-computed two-word example") {
  Corpus a, b;
  a.tokenizer.max_ngram = 1;
  b.tokenizer.max_ngram = 1;
  a.documents = {"cat cat dog"};
  b.documents = {"dog"};
  const auto rs = fighting_words(a, b, 1.0);
  REQUIRE(rs.size() == 2);
  // alpha_w = 0.5 for both terms; n_a = 3, n_b = 1.
  const double z_cat = std::log(5.0) / std::sqrt(1.0 / 2.5 + 1.0 / 0.5);
  const double z_dog = -std::log(5.0) / std::sqrt(2.0 / 1.5);
  CHECK(rs[0].term == "dog");
  CHECK(rs[0].z == doctest::Approx(z_dog).epsilon(1e-12));
  CHECK(rs[1].z == doctest::Approx(z_cat).epsilon(1e-12));
  CHECK(rs[1].count_a == 2);
  CHECK(rs[1].count_b == 0);
}

TEST_CASE("identical corpora give no signal") {
  Corpus a = repeated("same party and same age", 50);
  const auto rs = fighting_words(a, a, default_alpha0(a, a));
  for (const auto& r : rs) CHECK(std::abs(r.z) < 0.5);
}

TEST_CASE("contrasting reasons surface their distinctive terms") {
  const Corpus a = repeated("same party", 200);
  const Corpus b = repeated("same age", 200);
  const auto rs = fighting_words(a, b, default_alpha0(a, b));
  CHECK(find(rs, "party").z > 1.96);
  CHECK(find(rs, "age").z < -1.96);
  CHECK(std::abs(find(rs, "same").z) < 0.5);
  CHECK(std::abs(rs[0].z) >= std::abs(rs.back().z));
}

TEST_CASE("swapping corpora negates z") {
  Rng rng(5);
  const std::vector<std::string> words{"party", "age", "faith", "hobbies", "music", "same", "kind"};
  for (int trial = 0; trial < 20; ++trial) {
    Corpus a, b;
    for (int d = 0; d < 30; ++d) {
      std::string doc;
      for (std::size_t w = 0; w < 1 + rng.below(4); ++w) doc += words[rng.below(words.size())] + " ";
      (rng.bernoulli(0.5) ? a : b).documents.push_back(doc);
    }
    if (a.documents.empty() || b.documents.empty()) continue;
    const double alpha0 = default_alpha0(a, b);
    const auto ab = fighting_words(a, b, alpha0);
    const auto ba = fighting_words(b, a, alpha0);
    REQUIRE(ab.size() == ba.size());
    for (const auto& r : ab) CHECK(find(ba, r.term).z == doctest::Approx(-r.z).epsilon(1e-9));
  }
}

TEST_CASE("bad inputs") {
  const Corpus empty;
  const Corpus a = repeated("x", 1);
  CHECK_THROWS_AS(fighting_words(empty, empty, 1.0), UsageError);
  CHECK_THROWS_AS(fighting_words(a, a, 0.0), UsageError);
  const std::vector<std::string> bad{"model"};
  CHECK_THROWS_AS(label_filter(bad), UsageError);
}

TEST_CASE("reasons are collected from transcripts by label") {
  fixture::TempDir tmp;
  auto write = [&](const std::string& name, const std::string& model, const std::string& reason) {
    Transcript t;
    t.labels = {{"model", model}, {"method", "global"}};
    t.nominations = {{0, 1, reason}, {1, 0, std::nullopt}};
    std::ofstream(tmp.path() / name) << transcript_to_json(t);
  };
  std::filesystem::create_directories(tmp.path() / "sub");
  write("a.json", "x", "same party");
  write("sub/b.json", "y", "same age");
  write("c.failed.json", "x", "should be ignored");
  std::ofstream(tmp.path() / "broken.json") << "{";

  const std::vector<std::string> fx{"model=x"};
  const Corpus x = collect_reasons(tmp.path(), label_filter(fx));
  CHECK(x.documents == std::vector<std::string>{"same party"});
  const Corpus all = collect_reasons(tmp.path(), {});
  CHECK(all.documents.size() == 2);
  const std::vector<std::string> fz{"model=z"};
  CHECK_THROWS_AS(collect_reasons(tmp.path(), label_filter(fz)), UsageError);
  CHECK_THROWS_AS(collect_reasons(tmp.path() / "nope", {}), UsageError);
}

TEST_CASE("csv output") {
  const Corpus a = repeated("same party", 3);
  const Corpus b = repeated("same age", 3);
  const auto rs = fighting_words(a, b, 1.0);
  std::ostringstream out;
  write_fighting_words_csv(out, rs);
  CHECK(out.str().rfind("term,count_a,count_b,z\n", 0) == 0);
  CHECK(out.str().find("\nsame party,3,0,") != std::string::npos);
}
