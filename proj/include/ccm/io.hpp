// File formats: the line-oriented scenario text format, the map grid dump,
// and the CSV schemas for paths, executed runs, collision events, metrics,
// ensemble statistics, and the front-speed calibration file. Every writer has
// a matching reader and emit(parse(emit(x))) is byte-stable.
#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ccm/core.hpp"
#include "ccm/lattice.hpp"
#include "ccm/metrics.hpp"
#include "ccm/planner.hpp"
#include "ccm/scenarios.hpp"
#include "ccm/sim.hpp"

namespace ccm {

// ---- scenario files -------------------------------------------------------
// key = value per line; '#' comments; pedestrians as "pedestrian:" blocks of
// indented keys; alternatively a "template:" block names a generator family.
Scenario load_scenario(std::istream& in, const std::string& name = "<stream>");
Scenario load_scenario_file(const std::string& path);
// Returns the template too when the file contained one.
struct LoadedScenario {
    Scenario scenario;
    std::optional<ScenarioTemplate> source_template;
};
LoadedScenario load_scenario_full(std::istream& in, const std::string& name = "<stream>");

void save_scenario(std::ostream& out, const Scenario& s, bool timestamp = false);

// ---- map dumps -------------------------------------------------------------
// Header "# map n=.. h=.. r_th=..", then n lines (j = 1..n), each holding n
// space-separated entries (i = 1..n): the arrival value, "inf" where the
// front never arrived, "obs" on effective-obstacle cells.
void dump_map(std::ostream& out, const CompactCognitiveMap& map, bool timestamp = false);
CompactCognitiveMap parse_map(std::istream& in);

// ---- CSV outputs -----------------------------------------------------------
void write_path_csv(std::ostream& out, const TimedTrajectory& t, bool timestamp = false);
TimedTrajectory read_path_csv(std::istream& in);

// One row per entity per step: t,entity_id,x,y (agent id 0).
void write_run_csv(std::ostream& out, const SimulationResult& r, const Scenario& s,
                   bool timestamp = false);
void write_events_csv(std::ostream& out, const std::vector<CollisionEvent>& events,
                      bool timestamp = false);
std::vector<CollisionEvent> read_events_csv(std::istream& in);

struct MetricsRow {
    int run = 0;
    std::string mode;
    std::uint64_t seed = 0;
    bool completed = false;
    bool no_path = false;
    MetricsRecord record;
};
void write_metrics_csv(std::ostream& out, const std::vector<MetricsRow>& rows,
                       bool timestamp = false);
std::vector<MetricsRow> read_metrics_csv(std::istream& in);

struct StatsReport {
    struct Row {
        std::string measure;
        std::string mode;
        SampleStats stats;
    };
    std::vector<Row> rows;
    std::vector<std::pair<std::string, double>> p_values;
};
void write_stats_csv(std::ostream& out, const StatsReport& report, bool timestamp = false);
StatsReport read_stats_csv(std::istream& in);

// ---- calibration file ------------------------------------------------------
void write_calibration(std::ostream& out, const FrontCalibration& cal, int n,
                       const LatticeParams& params, bool timestamp = false);
FrontCalibration read_calibration(std::istream& in);

// Number formatting shared by every writer (shortest round-trip form).
std::string format_double(double x);

}  // namespace ccm
