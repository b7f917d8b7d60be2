#pragma once

#include <filesystem>
#include <string>

namespace paraprobe::detail {

// Creates parent directories as needed; throws OutputError.
void write_output_file(const std::filesystem::path& path, const std::string& content);

}  // namespace paraprobe::detail
