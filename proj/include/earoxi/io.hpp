#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace earoxi::io {

std::string read_file(const std::filesystem::path& file);

// Write-temp-rename so readers never observe a partial file.
void write_file_atomic(const std::filesystem::path& file, std::string_view content);

std::uint64_t fnv1a64(std::string_view data);
std::string hex64(std::uint64_t value);

}  // namespace earoxi::io
