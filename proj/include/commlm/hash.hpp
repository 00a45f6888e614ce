#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace commlm {

/// Incremental 64-bit FNV-1a. Used for content fingerprints in reports and
/// manifests, not for anything security related.
class Fnv1a64 {
 public:
  Fnv1a64& update(std::string_view bytes) {
    for (unsigned char c : bytes) {
      state_ ^= c;
      state_ *= 0x100000001b3ULL;
    }
    return *this;
  }

  std::uint64_t value() const { return state_; }
  std::string hex() const;

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

std::uint64_t fnv1a64(std::string_view bytes);
std::string to_hex(std::uint64_t value);

/// Fingerprint of a file's raw bytes (compressed bytes for .gz files).
std::string file_fingerprint(const std::filesystem::path& path);

}  // namespace commlm
