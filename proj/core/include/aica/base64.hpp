#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace aica {

std::string base64_encode(const std::uint8_t* data, std::size_t size);
std::string base64_encode(const std::vector<std::uint8_t>& data);
std::optional<std::vector<std::uint8_t>> base64_decode(const std::string& text);

}  // namespace aica
