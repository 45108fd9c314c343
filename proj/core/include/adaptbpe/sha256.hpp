#pragma once

#include <string>
#include <string_view>

namespace adaptbpe {

// Lowercase hex SHA-256 digest; used for provenance pairing of files.
std::string sha256_hex(std::string_view data);
std::string sha256_hex_of_file(const std::string& path);

}  // namespace adaptbpe
