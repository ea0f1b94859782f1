#pragma once

// Canonical JSON rendering (sorted keys, no insignificant whitespace,
// doubles at 17 significant digits) and SHA-256 digests over it.

#include <string>

#include "json.hpp"

namespace tutor {

// Throws TutorError on non-finite numbers.
std::string canonical_dump(const nlohmann::json& j);

std::string sha256_hex(const std::string& bytes);

inline std::string canonical_digest(const nlohmann::json& j) {
  return sha256_hex(canonical_dump(j));
}

}  // namespace tutor
