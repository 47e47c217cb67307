#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ewarn/detect.hpp"
#include "ewarn/manifest.hpp"
#include "ewarn/ts_core.hpp"

namespace ewarn::pipeline {

struct RunOptions {
    std::optional<std::uint64_t> seed;             // overrides the manifest seed
    std::optional<std::filesystem::path> out_dir;  // overrides the manifest output_dir
    unsigned threads = 1;
};

PipelineManifest load_manifest(const std::filesystem::path& path, const RunOptions& opts);

/// One delay-adjusted daily series per (location, proxy_id), sorted by that key.
/// County parts are aggregated over their common dates; expected baselines are
/// subtracted with zero truncation before the delay shift.
std::vector<DailySeries> load_sources(const PipelineManifest& m);

struct Detection {
    std::vector<DailySeries> series;
    std::vector<TrendPValues> pvalues;  // parallel to series
};

Detection run_detection(const PipelineManifest& m, unsigned threads);

/// First-wave event per (location, proxy) in `direction`, using p-values dated
/// no later than `last` (minus each series' reporting delay) when given.
std::map<std::pair<std::string, std::string>, TrendEvent> first_wave_events(
    const Detection& d, Direction direction, double threshold, int refractory_days,
    std::optional<Date> last = std::nullopt);

void cmd_detect(const PipelineManifest& m, unsigned threads);
void cmd_combine(const PipelineManifest& m, unsigned threads);
void cmd_predict(const PipelineManifest& m, Date as_of, unsigned threads);
void cmd_excess_ili(const PipelineManifest& m);
void cmd_leadlag(const PipelineManifest& m, unsigned threads);

/// Writes data/<state>/<proxy>.csv, truth.json and a manifest.json that
/// points at the generated files.
void cmd_simulate(const std::filesystem::path& spec_path, const std::filesystem::path& out_dir,
                  std::optional<std::uint64_t> seed);

}  // namespace ewarn::pipeline
