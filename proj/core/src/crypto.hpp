#pragma once

#include <optional>
#include <string>
#include <string_view>

// Thin wrappers over OpenSSL's libcrypto.
namespace graphmac::crypto {

std::string sha256(std::string_view data);  // raw 32 bytes
std::string sha256_hex(std::string_view data);
std::string hmac_sha256(std::string_view key, std::string_view data);  // raw 32 bytes

std::string to_hex(std::string_view bytes);
std::optional<std::string> from_hex(std::string_view hex);

std::string base64_encode(std::string_view bytes);
// Rejects anything that does not re-encode to exactly the same text.
std::optional<std::string> base64_decode_strict(std::string_view text);

bool constant_time_equal(std::string_view a, std::string_view b);

}  // namespace graphmac::crypto
