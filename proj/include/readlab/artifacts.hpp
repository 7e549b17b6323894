#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "readlab/config.hpp"
#include "readlab/evalkit.hpp"
#include "readlab/generalist.hpp"
#include "readlab/personalization.hpp"

namespace readlab {

// Per-artifact fingerprint: the run fingerprint bound to the artifact's
// relative name, so equal fingerprints imply byte-identical files.
std::string artifact_fingerprint(const std::string& run_fingerprint,
                                 const std::string& artifact_name);

DeveloperReport make_report(const GeneralistRun& run, const std::string& run_fingerprint);

// JSON/CSV writers. All output is deterministic: keys sorted, no timestamps.
void write_run_json(const std::filesystem::path& path, const GeneralistRun& run,
                    const RunConfig& config, const ShotSet* shots);
void write_report_json(const std::filesystem::path& path, const DeveloperReport& report,
                       const RunConfig& config);
DeveloperReport read_report_json(const std::filesystem::path& path);

void write_aggregate_csv(const std::filesystem::path& path, const MeanTable& table,
                         const std::string& run_fingerprint);
void write_distribution_csv(const std::filesystem::path& path,
                            const std::vector<std::pair<std::string, double>>& rows,
                            const std::string& run_fingerprint);

// Union of shot snippet ids vs. prediction/truth keys; throws DataError when a
// run artifact violates the shot-exclusion property.
void check_shot_exclusion(const std::vector<GeneralistRun>& runs,
                          const std::vector<ShotSet>& shot_sets);

}  // namespace readlab
