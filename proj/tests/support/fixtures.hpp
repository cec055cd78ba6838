#pragma once

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <functional>
#include <mutex>
#include <string>
#include <vector>

#include <unistd.h>

#include "netweave/backend.hpp"
#include "netweave/network.hpp"
#include "netweave/persona.hpp"
#include "netweave/prompt.hpp"
#include "netweave/random.hpp"

namespace fixture {

using namespace netweave;

inline Persona persona(PersonaId id, std::string name, std::string gender = "Female",
                       int age = 30, std::string race = "White",
                       std::string religion = "Catholic", std::string politics = "Democrat",
                       std::vector<std::string> interests = {"reading"}) {
  Persona p;
  p.id = id;
  p.name = std::move(name);
  p.gender = std::move(gender);
  p.age = age;
  p.race = std::move(race);
  p.religion = std::move(religion);
  p.politics = std::move(politics);
  p.interests = std::move(interests);
  return p;
}

// Letters only, so no name is a whole-word prefix of another.
inline std::string letter_name(std::size_t i) {
  std::string s;
  do {
    s.insert(s.begin(), static_cast<char>('a' + i % 26));
    i /= 26;
  } while (i > 0);
  s[0] = static_cast<char>(s[0] - 'a' + 'A');
  return "Person " + s + "x";
}

/// Random roster with `levels` values per categorical attribute, so groups
/// collide often at small n.
inline Roster random_roster(Rng& rng, std::size_t n, std::size_t levels = 3) {
  static const std::vector<std::string> tags{"chess", "hiking", "jazz", "cooking", "film", "tennis"};
  std::vector<Persona> ps;
  for (std::size_t i = 0; i < n; ++i) {
    auto pick = [&](const char* prefix) {
      return std::string(prefix) + std::to_string(rng.below(levels));
    };
    const int age = 18 + static_cast<int>(rng.below(82));
    std::vector<std::string> interests;
    const std::size_t count = 1 + rng.below(3);
    for (std::size_t idx : sample_without_replacement(tags.size(), count, rng)) {
      interests.push_back(tags[idx]);
    }
    std::sort(interests.begin(), interests.end());
    ps.push_back(persona(static_cast<PersonaId>(i), letter_name(i), pick("g"), age, pick("r"),
                         pick("f"), pick("p"), interests));
  }
  return Roster(std::move(ps));
}

inline DirectedNetwork random_graph(Rng& rng, std::size_t n, double p) {
  std::vector<Edge> edges;
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = 0; j < n; ++j) {
      if (i != j && rng.bernoulli(p)) edges.push_back({i, j});
    }
  }
  return DirectedNetwork(n, std::move(edges));
}

inline Roster canonical_roster() { return load_roster(canonical_roster_path()); }

/// Minimal bodies holding exactly the required placeholders.
inline PromptTemplate bare_template(Method m) {
  PromptTemplate t;
  t.method = m;
  switch (m) {
    case Method::Sequential: t.body = "You are {ego}.\n{roster}\n"; break;
    case Method::Global: t.body = "People:\n{roster}\n"; break;
    case Method::Local: t.body = "You are {ego}.\n{neighborhood}\n"; break;
    case Method::Iterative: t.body = "Round {round}\n{roster}\n{current_edges}\n"; break;
  }
  return t;
}

/// Backend answering from a function; records every request.
class FunctionBackend final : public TextBackend {
 public:
  using Fn = std::function<std::string(const BackendRequest&)>;
  explicit FunctionBackend(Fn fn) : fn_(std::move(fn)) {}

  std::string complete(const BackendRequest& request) override {
    {
      std::lock_guard lock(mutex_);
      requests_.push_back(request);
    }
    ++calls_;
    return fn_(request);
  }

  std::size_t calls() const { return calls_.load(); }
  std::vector<BackendRequest> requests() const {
    std::lock_guard lock(mutex_);
    return requests_;
  }

 private:
  Fn fn_;
  std::atomic<std::size_t> calls_{0};
  mutable std::mutex mutex_;
  std::vector<BackendRequest> requests_;
};

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("netweave-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace fixture
