#pragma once

#include <string>
#include <string_view>

namespace rakelink {

/// Lowercase hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

/// First 16 hex digits of the SHA-256; used as dataset, run and solution ids.
std::string content_hash(std::string_view data);

}  // namespace rakelink
