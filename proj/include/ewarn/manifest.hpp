#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ewarn/combine.hpp"
#include "ewarn/date.hpp"
#include "ewarn/detect.hpp"
#include "ewarn/synth.hpp"
#include "ewarn/time_to_event.hpp"
#include "ewarn/ts_core.hpp"

namespace ewarn {

enum class Cadence { daily, weekly };

/// One input file. Several declarations with the same (location, proxy_id)
/// are county-level parts, combined by population weight.
struct SourceDecl {
    std::filesystem::path path;
    std::string proxy_id;
    std::string location;
    SeriesKind kind = SeriesKind::proxy;
    int delay_days = 0;
    double weight = 1.0;
    Cadence cadence = Cadence::daily;
    std::optional<std::filesystem::path> expected_path;  // excess = max(observed - expected, 0)
};

struct ExcessIliDecl {
    std::string location;
    std::filesystem::path ili_path;
    std::filesystem::path virology_path;
};

struct ExcessIliConfig {
    std::vector<ExcessIliDecl> states;
    Date fit_end{2020, 2, 29};
    Date precovid_end{2020, 2, 29};
    double season_threshold_pct = 2.0;
    double serial_interval_days = 3.5;
    bool idea_on_counts = true;  // fit IDEA to ILI visit counts rather than activity %
};

struct PipelineManifest {
    std::vector<SourceDecl> sources;
    DetectorConfig detector;
    CombineConfig combine;
    TimeToEventConfig t2e;
    ExcessIliConfig excess_ili;
    std::filesystem::path output_dir = "out";
    int plot_smoothing_days = 7;

    /// Parses JSON. Relative paths resolve against the manifest's directory.
    /// Throws ConfigError on schema violations.
    static PipelineManifest load(const std::filesystem::path& path);
    static PipelineManifest parse(const std::string& json_text, const std::filesystem::path& base_dir);
};

synth::ScenarioSpec load_scenario_spec(const std::filesystem::path& path);
synth::ScenarioSpec parse_scenario_spec(const std::string& json_text);

}  // namespace ewarn
