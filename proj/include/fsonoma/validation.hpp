#pragma once

// Self-check suite behind `fsonoma validate`.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace fsonoma {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct ValidationOptions {
  bool quick = false;                 // smaller samples, well under 30 s
  std::filesystem::path fixture_dir;  // empty: the built-in data directory
  std::uint64_t seed = 20240611;
};

/// Directory holding the reference fixtures shipped with the source tree.
std::filesystem::path default_fixture_dir();

/// Runs every check; a check that throws is reported as failed.
std::vector<CheckResult> run_validation(const ValidationOptions& opt = {});

}  // namespace fsonoma
