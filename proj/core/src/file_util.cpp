#include "file_util.hpp"

#include <fstream>
#include <sstream>
#include <system_error>
#include <thread>

#include <fmt/format.h>

#include "netweave/errors.hpp"

namespace netweave::detail {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError(fmt::format("cannot read '{}'", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw UsageError(fmt::format("cannot write '{}'", path.string()));
  out << contents;
  out.flush();
  if (!out) throw UsageError(fmt::format("failed writing '{}'", path.string()));
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  const auto tid = std::hash<std::thread::id>{}(std::this_thread::get_id());
  std::filesystem::path tmp = path;
  tmp += fmt::format(".tmp{:x}", tid);
  write_file(tmp, contents);
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw UsageError(fmt::format("cannot move '{}' into place", path.string()));
  }
}

}  // namespace netweave::detail
