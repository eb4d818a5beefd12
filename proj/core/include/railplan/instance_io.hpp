#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "railplan/instance.hpp"

namespace railplan {

struct LoadOptions {
  bool validate = true;  // throw ValidationError on the first error-level violation
};

Instance parseInstance(std::string_view json, const LoadOptions& opts = {});
Instance loadInstance(const std::filesystem::path& path, const LoadOptions& opts = {});

// Canonical JSON text: stable key order, two-space indent, trailing newline.
std::string saveInstance(const Instance& inst);
void writeInstance(const Instance& inst, const std::filesystem::path& path);

}  // namespace railplan
