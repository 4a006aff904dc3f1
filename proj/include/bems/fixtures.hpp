#pragma once

#include <string>
#include <vector>

#include "bems/config.hpp"

namespace bems::fixtures {

// The bundled parameter tables live in one canonical key-value file each;
// docs/parameters.md and the compiled defaults must both agree with them.
// The synthetic-day fixture is pinned by its seed and content digest instead
// of by files.

struct FixtureIssue {
  std::string entry;   // manifest entry or key
  std::string detail;
};

struct FixtureReport {
  bool ok = true;
  std::vector<FixtureIssue> issues;

  void add(const std::string& entry, const std::string& detail) {
    ok = false;
    issues.push_back({entry, detail});
  }
};

// Markdown render of the canonical tables; byte-stable.
std::string render_parameters_doc(const KeyValueConfig& building_table,
                                  const KeyValueConfig& pvt_table);

// Re-renders docs/parameters.md from the canonical files.
void render_fixtures(const std::string& repo_root);

// Cross-checks canonical tables against compiled defaults, the default
// config, the rendered documentation, and the synthetic-day digest.
FixtureReport validate_fixtures(const std::string& repo_root);

}  // namespace bems::fixtures
