#include "pcf/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "pcf/error.hpp"

namespace pcf::io {

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write '" + tmp + "'");
    out << content;
    if (!out.flush()) throw InputError("write to '" + tmp + "' failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw InputError("cannot move '" + tmp + "' to '" + path.string() + "': " + ec.message());
}

std::string csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& columns) {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t j = 0; j < header.size(); ++j) os << (j ? "," : "") << header[j];
  os << '\n';
  const std::size_t rows = columns.empty() ? 0 : columns.front().size();
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < columns.size(); ++j) os << (j ? "," : "") << columns[j][i];
    os << '\n';
  }
  return os.str();
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string digest(const nlohmann::json& doc) { return fnv1a_hex(doc.dump()); }

nlohmann::json meta(const nlohmann::json& definition, std::uint64_t seed, double wall_seconds) {
  nlohmann::json m = {{"tool", "pcfgeom"}, {"version", kToolVersion}, {"definition_digest", digest(definition)},
                      {"seed", seed}};
  if (wall_seconds >= 0.0) m["wall_seconds"] = wall_seconds;
  return m;
}

std::string dump(const nlohmann::json& doc) { return doc.dump(2) + "\n"; }

}  // namespace pcf::io
