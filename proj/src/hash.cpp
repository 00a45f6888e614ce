#include "commlm/hash.hpp"

#include <array>
#include <cstdio>
#include <fstream>

#include "commlm/error.hpp"

namespace commlm {

std::string to_hex(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

std::string Fnv1a64::hex() const { return to_hex(state_); }

std::uint64_t fnv1a64(std::string_view bytes) { return Fnv1a64{}.update(bytes).value(); }

std::string file_fingerprint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  Fnv1a64 h;
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    h.update(std::string_view(buf.data(), static_cast<std::size_t>(in.gcount())));
  }
  return h.hex();
}

}  // namespace commlm
