#include "ccm/cli.hpp"

#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include "ccm/io.hpp"
#include "ccm/metrics.hpp"
#include "ccm/planner.hpp"
#include "ccm/rng.hpp"
#include "ccm/scenarios.hpp"
#include "ccm/sim.hpp"

namespace ccm {

namespace {

struct Effective {
    PlannerParams planner;
    SimParams sim;
    double d_crt = 0.3;
    int calibrate_n = 80;
    ScenarioTemplate tpl;
    bool has_template = false;
};

double to_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used == value.size()) return v;
    } catch (...) {
    }
    throw ConfigError("--set " + key + ": expected a number, got '" + value + "'");
}

int to_int(const std::string& key, const std::string& value) {
    return static_cast<int>(to_double(key, value));
}

void apply_override(Effective& eff, const std::string& key, const std::string& value) {
    LatticeParams& lat = eff.planner.lattice;
    if (key == "lattice.dtau") lat.dtau = to_double(key, value);
    else if (key == "lattice.substeps") lat.substeps_per_mental_step = to_int(key, value);
    else if (key == "lattice.patience") lat.patience = to_int(key, value);
    else if (key == "lattice.max_steps") lat.max_mental_steps = to_int(key, value);
    else if (key == "lattice.coupling") lat.coupling = to_double(key, value);
    else if (key == "lattice.recovery") lat.recovery_rate = to_double(key, value);
    else if (key == "lattice.threshold") lat.arrival_threshold = to_double(key, value);
    else if (key == "lattice.band_low") lat.band_low = to_double(key, value);
    else if (key == "lattice.band_high") lat.band_high = to_double(key, value);
    else if (key == "lattice.n") { eff.calibrate_n = to_int(key, value); eff.tpl.n = to_int(key, value); }
    else if (key == "planner.step") eff.planner.descent_step_cells = to_double(key, value);
    else if (key == "planner.target_radius") eff.planner.target_radius = to_double(key, value);
    else if (key == "planner.angle_threshold") eff.planner.crossing_angle_threshold_deg = to_double(key, value);
    else if (key == "planner.lateral_gain") eff.planner.lateral_gain = to_double(key, value);
    else if (key == "planner.predictor_step") eff.planner.predictor_step_seconds = to_double(key, value);
    else if (key == "sim.dt") eff.sim.dt = to_double(key, value);
    else if (key == "sim.time_cap") eff.sim.time_cap = to_double(key, value);
    else if (key == "sim.reaim") eff.sim.reaim_after_cooperation = to_int(key, value) != 0;
    else if (key == "metrics.d_crt") eff.d_crt = to_double(key, value);
    else if (key == "template.pedestrians" || key == "template.count") eff.tpl.pedestrian_count = to_int(key, value);
    else if (key == "template.door_center") eff.tpl.door_center = to_double(key, value);
    else if (key == "template.door_width") eff.tpl.door_width = to_double(key, value);
    else if (key == "template.speed_min") eff.tpl.speed_min = to_double(key, value);
    else if (key == "template.speed_max") eff.tpl.speed_max = to_double(key, value);
    else if (key == "template.personal_radius") eff.tpl.personal_radius = to_double(key, value);
    else if (key == "template.reaction_distance") eff.tpl.reaction_distance = to_double(key, value);
    else if (key == "template.agent_radius") eff.tpl.agent_radius = to_double(key, value);
    else if (key == "template.agent_speed") eff.tpl.agent_speed = to_double(key, value);
    else if (key == "template.nav_tolerance") eff.tpl.nav_tolerance = to_double(key, value);
    else if (key == "template.arena") eff.tpl.arena = to_double(key, value);
    else if (key == "template.segment") eff.tpl.segment = segment_from_name(value);
    else throw ConfigError("--set: unknown key '" + key + "'");
}

void write_sidecar(const std::filesystem::path& dir, const RunConfig& cfg,
                   const Effective& eff, const Scenario* scenario) {
    std::ofstream out(dir / "params_effective.txt");
    std::map<std::string, std::string> kv;
    const LatticeParams& lat = eff.planner.lattice;
    kv["command"] = std::to_string(static_cast<int>(cfg.command));
    kv["mode"] = cfg.mode;
    kv["runs"] = std::to_string(cfg.runs);
    kv["lattice.coupling"] = format_double(lat.coupling);
    kv["lattice.recovery"] = format_double(lat.recovery_rate);
    kv["lattice.dtau"] = format_double(lat.dtau);
    kv["lattice.substeps"] = std::to_string(lat.substeps_per_mental_step);
    kv["lattice.threshold"] = format_double(lat.arrival_threshold);
    kv["lattice.band_low"] = format_double(lat.band_low);
    kv["lattice.band_high"] = format_double(lat.band_high);
    kv["lattice.patience"] = std::to_string(lat.patience);
    kv["lattice.max_steps"] = std::to_string(lat.max_mental_steps);
    kv["planner.step"] = format_double(eff.planner.descent_step_cells);
    kv["planner.target_radius"] = format_double(eff.planner.target_radius);
    kv["planner.angle_threshold"] = format_double(eff.planner.crossing_angle_threshold_deg);
    kv["planner.lateral_gain"] = format_double(eff.planner.lateral_gain);
    kv["planner.predictor_step"] = format_double(eff.planner.predictor_step_seconds);
    kv["sim.dt"] = format_double(eff.sim.dt);
    kv["sim.time_cap"] = format_double(eff.sim.time_cap);
    kv["sim.reaim"] = eff.sim.reaim_after_cooperation ? "1" : "0";
    kv["metrics.d_crt"] = format_double(eff.d_crt);
    if (eff.has_template) {
        kv["template.family"] = family_name(eff.tpl.family);
        kv["template.pedestrians"] = std::to_string(eff.tpl.pedestrian_count);
        kv["template.segment"] = segment_name(eff.tpl.segment);
        kv["template.seed"] = std::to_string(eff.tpl.seed);
        kv["template.door_center"] = format_double(eff.tpl.door_center);
        kv["template.door_width"] = format_double(eff.tpl.door_width);
        kv["template.reaction_distance"] = format_double(eff.tpl.reaction_distance);
        kv["template.personal_radius"] = format_double(eff.tpl.personal_radius);
    }
    if (scenario) {
        kv["scenario.seed"] = std::to_string(scenario->seed);
        kv["scenario.pedestrians"] = std::to_string(scenario->pedestrians.size());
        kv["scenario.agent_speed"] = format_double(scenario->agent_speed);
        kv["scenario.n"] = std::to_string(scenario->mapping.n);
    }
    for (const auto& [k, v] : kv) out << k << " = " << v << "\n";
}

std::vector<Mode> modes_of(const std::string& mode) {
    if (mode == "avus") return {Mode::AvUs};
    if (mode == "cous") return {Mode::CoUs};
    if (mode == "both") return {Mode::AvUs, Mode::CoUs};
    throw ConfigError("--mode must be avus, cous or both");
}

MetricsRecord evaluate_run(const SimulationResult& res, const Scenario& sc, double d_crt) {
    MetricsRecord rec;
    rec.d_crt = d_crt;
    rec.M = static_cast<int>(sc.pedestrians.size());
    std::vector<Vec2> agent_pts;
    agent_pts.reserve(res.agent.points.size() + 1);
    for (const TimedPoint& p : res.agent.points) agent_pts.push_back(p.position);
    // a completed run stops within nav_tolerance of the target; L measures the
    // walk up to the target itself so that L >= 1 always holds
    if ((agent_pts.back() - sc.target).norm() > 0.0) agent_pts.push_back(sc.target);
    rec.L = trajectory_length(agent_pts, sc.agent_start, sc.target, sc.nav_tolerance);
    rec.S = trajectory_safety(agent_pts, res.map.omega, d_crt, sc.mapping);
    std::vector<double> lengths{rec.L};
    for (std::size_t i = 0; i < sc.pedestrians.size(); ++i) {
        std::vector<Vec2> pts;
        pts.reserve(res.pedestrians[i].points.size());
        for (const TimedPoint& p : res.pedestrians[i].points) pts.push_back(p.position);
        lengths.push_back(
            pedestrian_elongation(pts, sc.pedestrians[i].position, sc.pedestrians[i].goal));
    }
    rec.E = social_effort(lengths);
    return rec;
}

void write_file(const std::filesystem::path& p, const std::string& contents) {
    std::ofstream out(p);
    if (!out) throw ConfigError("cannot write " + p.string());
    out << contents;
}

int run_plan(const RunConfig& cfg, const Effective& eff, const Scenario& scenario,
             const std::filesystem::path& dir, std::ostream& out) {
    for (Mode mode : modes_of(cfg.mode)) {
        const CompactCognitiveMap map = build_map(scenario, mode, eff.planner);
        std::ostringstream map_text;
        dump_map(map_text, map, cfg.timestamp);
        write_file(dir / (std::string("map_") + mode_name(mode) + ".txt"), map_text.str());

        std::string status = "ok";
        try {
            const Path path = plan_path(scenario, map, eff.planner);
            const TimedTrajectory traj = to_world_trajectory(path, scenario);
            std::ostringstream path_text;
            write_path_csv(path_text, traj, cfg.timestamp);
            write_file(dir / (std::string("path_") + mode_name(mode) + ".csv"),
                       path_text.str());
        } catch (const NoPath&) {
            status = "no_path";
        }
        out << mode_name(mode) << ": omega_cells=" << map.omega.size()
            << " steps=" << map.steps_run << " status=" << status << "\n";
    }
    return 0;
}

int run_simulate(const RunConfig& cfg, const Effective& eff, const Scenario& scenario,
                 const std::filesystem::path& dir, std::ostream& out) {
    SimParams sim = eff.sim;
    sim.planner = eff.planner;
    for (Mode mode : modes_of(cfg.mode)) {
        const SimulationResult res = simulate(scenario, mode, sim);
        std::ostringstream map_text, run_text, events_text, metrics_text;
        dump_map(map_text, res.map, cfg.timestamp);
        write_file(dir / (std::string("map_") + mode_name(mode) + ".txt"), map_text.str());
        write_run_csv(run_text, res, scenario, cfg.timestamp);
        write_file(dir / (std::string("run_") + mode_name(mode) + ".csv"), run_text.str());
        write_events_csv(events_text, res.collisions, cfg.timestamp);
        write_file(dir / (std::string("events_") + mode_name(mode) + ".csv"),
                   events_text.str());

        MetricsRow row;
        row.run = 0;
        row.mode = mode_name(mode);
        row.seed = scenario.seed;
        row.completed = res.completed;
        row.no_path = res.no_path;
        row.record.d_crt = eff.d_crt;
        row.record.M = static_cast<int>(scenario.pedestrians.size());
        if (res.completed) row.record = evaluate_run(res, scenario, eff.d_crt);
        write_metrics_csv(metrics_text, {row}, cfg.timestamp);
        write_file(dir / (std::string("metrics_") + mode_name(mode) + ".csv"),
                   metrics_text.str());

        out << mode_name(mode) << ": completed=" << (res.completed ? 1 : 0)
            << " no_path=" << (res.no_path ? 1 : 0) << " collisions=" << res.collisions.size();
        if (res.completed) {
            out << " L=" << format_double(row.record.L) << " S=" << format_double(row.record.S)
                << " E=" << format_double(row.record.E);
        }
        out << "\n";
    }
    return 0;
}

int run_ensemble(const RunConfig& cfg, const Effective& eff,
                 const std::filesystem::path& dir, std::ostream& out) {
    if (!eff.has_template) {
        throw ConfigError("ensemble requires --template (or a scenario file with a template)");
    }
    const std::vector<Mode> modes = modes_of(cfg.mode);
    const std::uint64_t base_seed = cfg.seed.value_or(eff.tpl.seed);

    struct RunOutput {
        std::vector<MetricsRow> rows;
    };
    SimParams sim = eff.sim;
    sim.planner = eff.planner;

    // Warm the shared caches before fanning out.
    front_calibration_cached(eff.tpl.n, eff.planner.lattice);
    trained_predictor(eff.planner.predictor_step_seconds);

    const auto one_run = [&](int r) {
        ScenarioTemplate tpl = eff.tpl;
        tpl.seed = detail::mix64(base_seed + 0x9e3779b97f4a7c15ull * (r + 1));
        const Scenario scenario = generate(tpl);
        RunOutput ro;
        for (Mode mode : modes) {
            const SimulationResult res = simulate(scenario, mode, sim);
            MetricsRow row;
            row.run = r;
            row.mode = mode_name(mode);
            row.seed = tpl.seed;
            row.completed = res.completed;
            row.no_path = res.no_path;
            row.record.d_crt = eff.d_crt;
            row.record.M = static_cast<int>(scenario.pedestrians.size());
            if (res.completed) row.record = evaluate_run(res, scenario, eff.d_crt);
            ro.rows.push_back(row);
        }
        return ro;
    };

    const unsigned workers =
        std::max(1u, std::min(std::thread::hardware_concurrency(), 8u));
    std::vector<RunOutput> outputs(static_cast<std::size_t>(cfg.runs));
    for (int begin = 0; begin < cfg.runs; begin += static_cast<int>(workers)) {
        std::vector<std::future<RunOutput>> batch;
        const int end = std::min(cfg.runs, begin + static_cast<int>(workers));
        for (int r = begin; r < end; ++r) {
            batch.push_back(std::async(std::launch::async, one_run, r));
        }
        for (int r = begin; r < end; ++r) {
            outputs[static_cast<std::size_t>(r)] = batch[static_cast<std::size_t>(r - begin)].get();
        }
    }

    std::vector<MetricsRow> rows;
    for (const RunOutput& ro : outputs) {
        rows.insert(rows.end(), ro.rows.begin(), ro.rows.end());
    }
    std::ostringstream metrics_text;
    write_metrics_csv(metrics_text, rows, cfg.timestamp);
    write_file(dir / "metrics_runs.csv", metrics_text.str());

    StatsReport report;
    const char* measures[3] = {"L", "S", "E"};
    std::map<std::string, std::map<std::string, std::vector<double>>> samples;
    for (const MetricsRow& row : rows) {
        if (!row.completed) continue;
        samples["L"][row.mode].push_back(row.record.L);
        samples["S"][row.mode].push_back(row.record.S);
        samples["E"][row.mode].push_back(row.record.E);
    }
    for (const char* m : measures) {
        for (Mode mode : modes) {
            const auto& xs = samples[m][mode_name(mode)];
            report.rows.push_back({m, mode_name(mode), summarize(xs)});
        }
        if (modes.size() == 2) {
            const auto& a = samples[m][mode_name(modes[0])];
            const auto& b = samples[m][mode_name(modes[1])];
            if (a.size() >= 2 && b.size() >= 2) {
                report.p_values.emplace_back(m, welch_p_value(a, b));
            }
        }
    }
    std::ostringstream stats_text;
    write_stats_csv(stats_text, report, cfg.timestamp);
    write_file(dir / "stats.csv", stats_text.str());

    int completed = 0;
    for (const MetricsRow& row : rows) completed += row.completed ? 1 : 0;
    out << "runs=" << cfg.runs << " rows=" << rows.size() << " completed=" << completed
        << "\n";
    for (const auto& [measure, p] : report.p_values) {
        out << "p[" << measure << "]=" << format_double(p) << "\n";
    }
    return 0;
}

int run_calibrate(const RunConfig& cfg, const Effective& eff,
                  const std::filesystem::path& dir, std::ostream& out) {
    const FrontCalibration& cal = front_calibration_cached(eff.calibrate_n, eff.planner.lattice);
    std::ostringstream text;
    write_calibration(text, cal, eff.calibrate_n, eff.planner.lattice, cfg.timestamp);
    write_file(dir / "calibration.txt", text.str());
    out << "n=" << eff.calibrate_n << " v_w=" << format_double(cal.speed)
        << " ignition_delay=" << format_double(cal.ignition_delay) << "\n";
    return 0;
}

}  // namespace

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        Effective eff;
        if (!cfg.template_name.empty()) {
            eff.tpl = template_for(family_from_name(cfg.template_name));
            eff.has_template = true;
        }
        for (const auto& [key, value] : cfg.overrides) apply_override(eff, key, value);

        const std::filesystem::path dir(cfg.out_dir);
        std::filesystem::create_directories(dir);

        std::optional<Scenario> scenario;
        if (!cfg.scenario_path.empty()) {
            if (eff.has_template) throw ConfigError("--scenario and --template are exclusive");
            std::ifstream in(cfg.scenario_path);
            if (!in) throw ConfigError("cannot open scenario file: " + cfg.scenario_path);
            LoadedScenario loaded = load_scenario_full(in, cfg.scenario_path);
            if (loaded.source_template) {
                eff.tpl = *loaded.source_template;
                eff.has_template = true;
                for (const auto& [key, value] : cfg.overrides) {
                    if (key.rfind("template.", 0) == 0) apply_override(eff, key, value);
                }
                if (cfg.seed) eff.tpl.seed = *cfg.seed;
                scenario = generate(eff.tpl);
            } else {
                scenario = loaded.scenario;
                if (cfg.seed) scenario->seed = *cfg.seed;
            }
        } else if (eff.has_template) {
            if (cfg.seed) eff.tpl.seed = *cfg.seed;
            if (cfg.command != Command::ensemble) scenario = generate(eff.tpl);
        } else if (cfg.command != Command::calibrate) {
            throw ConfigError("need --scenario or --template");
        }

        write_sidecar(dir, cfg, eff, scenario ? &*scenario : nullptr);

        switch (cfg.command) {
            case Command::plan:
                if (!scenario) throw ConfigError("plan needs a scenario");
                return run_plan(cfg, eff, *scenario, dir, out);
            case Command::simulate:
                if (!scenario) throw ConfigError("simulate needs a scenario");
                return run_simulate(cfg, eff, *scenario, dir, out);
            case Command::ensemble:
                return run_ensemble(cfg, eff, dir, out);
            case Command::calibrate:
                return run_calibrate(cfg, eff, dir, out);
        }
        return 0;
    } catch (const UnstableIntegration& e) {
        err << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const LearningDiverged& e) {
        err << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace ccm
