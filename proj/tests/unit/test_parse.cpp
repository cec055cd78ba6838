#include <doctest.h>

#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "netweave/parse.hpp"

using namespace netweave;
using fixture::persona;

namespace {

// 0 Sam Reed (ego in most cases), 1 Maria Lopez, 2 Ken Tanaka, 3 Ana Lopez,
// 4 Ana Lopez Ruiz, 5 Li Wei
Roster small_roster() {
  return Roster({persona(0, "Sam Reed"), persona(1, "Maria Lopez"), persona(2, "Ken Tanaka"),
                 persona(3, "Ana Lopez"), persona(4, "Ana Lopez Ruiz"), persona(5, "Li Wei")});
}

std::set<PersonaId> others(PersonaId ego, std::size_t n = 6) {
  std::set<PersonaId> s;
  for (PersonaId i = 0; i < n; ++i) {
    if (i != ego) s.insert(i);
  }
  return s;
}

std::vector<PersonaId> targets(const ParseResult& r) {
  std::vector<PersonaId> out;
  for (const auto& n : r.nominations) out.push_back(n.target);
  return out;
}

std::string read(const std::string& name) {
  std::ifstream in(std::string(NETWEAVE_TEST_DATA_DIR) + "/" + name, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("names in prose") {
  const auto r = parse_response("I would befriend Maria Lopez and Ken Tanaka.", 0, others(0),
                                small_roster(), false);
  CHECK(targets(r) == std::vector<PersonaId>{1, 2});
  CHECK(r.tally.accepted == 2);
  CHECK(!r.soft_failure);
  for (const auto& n : r.nominations) {
    CHECK(n.source == 0);
    CHECK(!n.reason.has_value());
  }
}

TEST_CASE("self-reference is rejected and tallied") {
  const auto r = parse_response("- Sam Reed\n- Li Wei", 0, others(0), small_roster(), false);
  CHECK(targets(r) == std::vector<PersonaId>{5});
  CHECK(r.tally.self_references == 1);
  CHECK(r.rejections.size() == 1);
}

TEST_CASE("reasons follow each name (golden fixture)") {
  const auto r = parse_response(read("parse_reasons.txt"), 0, others(0), small_roster(), true);
  std::istringstream expected(read("parse_reasons.expected"));
  std::string line;
  std::size_t i = 0;
  while (std::getline(expected, line)) {
    const auto tab = line.find('\t');
    REQUIRE(i < r.nominations.size());
    CHECK(small_roster()[r.nominations[i].target].name == line.substr(0, tab));
    REQUIRE(r.nominations[i].reason.has_value());
    CHECK(*r.nominations[i].reason == line.substr(tab + 1));
    ++i;
  }
  CHECK(i == 2);
  CHECK(r.nominations.size() == 2);
}

TEST_CASE("list format with colon reasons") {
  const auto r = parse_response("- Maria Lopez: same politics\n- Li Wei: good company\n", 0,
                                others(0), small_roster(), true);
  REQUIRE(r.nominations.size() == 2);
  CHECK(r.nominations[0].reason == "same politics");
  CHECK(r.nominations[1].reason == "good company");
}

TEST_CASE("unknown list entries, outsiders and duplicates") {
  const std::set<PersonaId> allowed{1, 2};
  const auto r = parse_response("- Maria Lopez\n- Zed Quill\n- Li Wei\n- maria lopez\n", 0, allowed,
                                small_roster(), false);
  CHECK(targets(r) == std::vector<PersonaId>{1});
  CHECK(r.tally.unknown_names == 1);
  CHECK(r.tally.outside_allowed == 1);
  CHECK(r.tally.duplicates == 1);
  CHECK(r.tally.rejected() == 3);
}

TEST_CASE("matching is case-insensitive, whitespace-normalized and whole-word") {
  const auto a = parse_response("maria   LOPEZ", 0, others(0), small_roster(), false);
  CHECK(targets(a) == std::vector<PersonaId>{1});
  const auto b = parse_response("Ken Tanakaville is nice", 0, others(0), small_roster(), false);
  CHECK(b.nominations.empty());
  CHECK(b.soft_failure);
}

TEST_CASE("longest name wins") {
  const auto r = parse_response("- Ana Lopez Ruiz", 0, others(0), small_roster(), false);
  CHECK(targets(r) == std::vector<PersonaId>{4});
}

TEST_CASE("explicit empty and soft failure") {
  for (const char* text : {"", "  \n", "none", "None.", "NONE"}) {
    const auto r = parse_response(text, 0, others(0), small_roster(), false);
    CHECK(r.explicit_empty);
    CHECK(!r.soft_failure);
  }
  const auto r = parse_response("I prefer to keep to myself.", 0, others(0), small_roster(), false);
  CHECK(!r.explicit_empty);
  CHECK(r.soft_failure);
}

TEST_CASE("edge lists") {
  const auto r = parse_edge_list(
      "Maria Lopez -> Ken Tanaka, Li Wei: same age\nKen Tanaka -> Ken Tanaka\n"
      "Zed Quill -> Li Wei\nMaria Lopez -> Ken Tanaka\n",
      small_roster(), true);
  REQUIRE(r.nominations.size() == 2);
  CHECK(r.nominations[0].source == 1);
  CHECK(r.nominations[0].target == 2);
  CHECK(r.nominations[1].target == 5);
  CHECK(r.nominations[1].reason == "same age");
  CHECK(r.tally.self_references == 1);
  CHECK(r.tally.unknown_names == 1);
  CHECK(r.tally.duplicates == 1);
  CHECK(parse_edge_list("none", small_roster(), false).explicit_empty);
}

TEST_CASE("parsed nominations always respect the contract") {
  Rng rng(31);
  const Roster roster = fixture::random_roster(rng, 15);
  for (int trial = 0; trial < 300; ++trial) {
    const auto ego = static_cast<PersonaId>(rng.below(15));
    std::set<PersonaId> allowed;
    for (PersonaId i = 0; i < 15; ++i) {
      if (i != ego && rng.bernoulli(0.5)) allowed.insert(i);
    }
    if (allowed.empty()) allowed.insert((ego + 1) % 15);
    std::string text;
    const std::size_t lines = rng.below(8);
    for (std::size_t l = 0; l < lines; ++l) {
      text += rng.bernoulli(0.1) ? "- Nobody Known\n"
                                 : "- " + roster[static_cast<PersonaId>(rng.below(15))].name + "\n";
    }
    const auto r = parse_response(text, ego, allowed, roster, false);
    std::set<PersonaId> seen;
    for (const auto& n : r.nominations) {
      CHECK(n.source == ego);
      CHECK(n.target != ego);
      CHECK(allowed.contains(n.target));
      CHECK(seen.insert(n.target).second);
    }
    CHECK(r.tally.accepted == r.nominations.size());
    CHECK(r.tally.accepted + r.tally.rejected() == lines);
  }
}
