#include <array>
#include <string>
#include <string_view>

#include "netweave/persona.hpp"

namespace netweave {
namespace {

constexpr std::array<std::string_view, 40> kFirst{
    "Alex",   "Avery",  "Bailey", "Blake",   "Cameron", "Casey",  "Charlie", "Dakota",
    "Drew",   "Eden",   "Elliot", "Emerson", "Finley",  "Frankie", "Harper", "Hayden",
    "Jamie",  "Jesse",  "Jordan", "Kai",     "Kendall", "Lane",   "Logan",   "Morgan",
    "Noel",   "Parker", "Peyton", "Quinn",   "Reese",   "Riley",  "River",   "Robin",
    "Rowan",  "Sage",   "Sam",    "Skyler",  "Taylor",  "Toby",   "Wren",    "Jules"};

constexpr std::array<std::string_view, 40> kLast{
    "Adler",  "Bennett", "Carver", "Dalton",   "Ellis",  "Fischer", "Garner", "Hale",
    "Irwin",  "Jensen",  "Keller", "Lambert",  "Mercer", "Nolan",   "Osborne", "Pryor",
    "Quincy", "Ramsey",  "Sawyer", "Thorne",   "Upton",  "Vance",   "Walsh",  "Yates",
    "Abbott", "Brooks",  "Conley", "Dorsey",   "Emery",  "Foley",   "Gentry", "Hayes",
    "Ingram", "Joyner",  "Kendrick", "Lowell", "Marsh",  "Nash",    "Pruitt", "Rhodes"};

// Name i pairs first[i % 40] with a last name offset by 7 per block of 40, so
// all 200 combinations are distinct.
struct Pool {
  std::array<std::string, 200> storage;
  std::array<std::string_view, 200> views;

  Pool() {
    for (std::size_t i = 0; i < storage.size(); ++i) {
      const std::size_t f = i % kFirst.size();
      const std::size_t l = (f + 7 * (i / kFirst.size())) % kLast.size();
      storage[i] = std::string(kFirst[f]) + " " + std::string(kLast[l]);
      views[i] = storage[i];
    }
  }
};

}  // namespace

std::span<const std::string_view> name_pool() noexcept {
  static const Pool pool;
  return pool.views;
}

}  // namespace netweave
