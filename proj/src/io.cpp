#include "ccm/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ctime>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace ccm {

std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

bool is_indented(const std::string& raw) {
    return !raw.empty() && (raw[0] == ' ' || raw[0] == '\t');
}

void write_timestamp(std::ostream& out, bool enabled) {
    if (!enabled) return;
    const std::time_t now = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    out << "# generated " << buf << "\n";
}

struct LineReader {
    std::istream& in;
    std::string name;
    int line_no = 0;
    std::string raw;

    bool next() {
        while (std::getline(in, raw)) {
            ++line_no;
            const std::string t = trim(raw);
            if (t.empty() || t[0] == '#') continue;
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw ConfigError(name + ":" + std::to_string(line_no) + ": " + what);
    }
};

double parse_double(const std::string& s, const LineReader& r) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (trim(s.substr(used)).empty()) return v;
    } catch (...) {
    }
    r.fail("expected a number, got '" + s + "'");
}

std::uint64_t parse_u64(const std::string& s, const LineReader& r) {
    try {
        std::size_t used = 0;
        const std::uint64_t v = std::stoull(s, &used);
        if (trim(s.substr(used)).empty()) return v;
    } catch (...) {
    }
    r.fail("expected an unsigned integer, got '" + s + "'");
}

int parse_int(const std::string& s, const LineReader& r) {
    return static_cast<int>(parse_u64(s, r));
}

Vec2 parse_vec2(const std::string& s, const LineReader& r) {
    std::istringstream iss(s);
    double x, y;
    if (iss >> x >> y) {
        std::string rest;
        if (!(iss >> rest)) return Vec2(x, y);
    }
    r.fail("expected two numbers, got '" + s + "'");
}

Mode parse_mode(const std::string& s, const LineReader& r) {
    std::string lower = s;
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (lower == "avus") return Mode::AvUs;
    if (lower == "cous") return Mode::CoUs;
    r.fail("mode must be avus or cous, got '" + s + "'");
}

bool split_kv(const std::string& line, std::string& key, std::string& value) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) return false;
    key = trim(line.substr(0, eq));
    value = trim(line.substr(eq + 1));
    return !key.empty();
}

}  // namespace

LoadedScenario load_scenario_full(std::istream& in, const std::string& name) {
    LineReader r{in, name};
    Scenario sc;
    std::optional<ScenarioTemplate> tpl;
    bool have_agent_start = false, have_target = false;

    enum class Block { none, pedestrian, tmpl };
    Block block = Block::none;
    Pedestrian ped;
    bool ped_has_position = false;
    std::optional<Mode> top_mode;
    std::optional<std::uint64_t> top_seed;

    const auto flush_ped = [&]() {
        if (block != Block::pedestrian) return;
        if (!ped_has_position) r.fail("pedestrian block without position");
        ped.id = static_cast<int>(sc.pedestrians.size()) + 1;
        sc.pedestrians.push_back(ped);
        ped = Pedestrian{};
        ped_has_position = false;
    };

    while (r.next()) {
        const std::string line = trim(r.raw);
        const bool indented = is_indented(r.raw);

        if (!indented) {
            flush_ped();
            block = Block::none;
        }

        if (!indented && line == "pedestrian:") {
            block = Block::pedestrian;
            ped = Pedestrian{};
            ped_has_position = false;
            continue;
        }
        if (!indented && line == "template:") {
            block = Block::tmpl;
            tpl = ScenarioTemplate{};
            continue;
        }

        std::string key, value;
        if (!split_kv(line, key, value)) r.fail("expected 'key = value'");

        if (indented && block == Block::pedestrian) {
            if (key == "position") {
                ped.position = parse_vec2(value, r);
                ped_has_position = true;
            } else if (key == "velocity") {
                ped.velocity = parse_vec2(value, r);
            } else if (key == "personal_radius") {
                ped.personal_radius = parse_double(value, r);
            } else if (key == "reaction_distance") {
                ped.reaction_distance = parse_double(value, r);
            } else if (key == "goal") {
                ped.goal = parse_vec2(value, r);
            } else {
                r.fail("unknown pedestrian key '" + key + "'");
            }
            continue;
        }
        if (indented && block == Block::tmpl) {
            ScenarioTemplate& t = *tpl;
            if (key == "family") {
                const Family fam = family_from_name(value);
                const ScenarioTemplate fresh = template_for(fam);
                // family defaults, then re-apply nothing: family must come first
                t = fresh;
            } else if (key == "pedestrians" || key == "count") {
                t.pedestrian_count = parse_int(value, r);
            } else if (key == "n") {
                t.n = parse_int(value, r);
            } else if (key == "arena") {
                t.arena = parse_double(value, r);
            } else if (key == "door_center") {
                t.door_center = parse_double(value, r);
            } else if (key == "door_width") {
                t.door_width = parse_double(value, r);
            } else if (key == "speed_min") {
                t.speed_min = parse_double(value, r);
            } else if (key == "speed_max") {
                t.speed_max = parse_double(value, r);
            } else if (key == "personal_radius") {
                t.personal_radius = parse_double(value, r);
            } else if (key == "reaction_distance") {
                t.reaction_distance = parse_double(value, r);
            } else if (key == "agent_radius") {
                t.agent_radius = parse_double(value, r);
            } else if (key == "agent_speed") {
                t.agent_speed = parse_double(value, r);
            } else if (key == "nav_tolerance") {
                t.nav_tolerance = parse_double(value, r);
            } else if (key == "segment") {
                t.segment = segment_from_name(value);
            } else if (key == "mode") {
                t.mode = parse_mode(value, r);
            } else if (key == "seed") {
                t.seed = parse_u64(value, r);
            } else {
                r.fail("unknown template key '" + key + "'");
            }
            continue;
        }
        if (indented) r.fail("indented line outside a block");

        // top-level scenario keys
        if (key == "arena") {
            const Vec2 wh = parse_vec2(value, r);
            sc.mapping.arena_width = wh.x();
            sc.mapping.arena_height = wh.y();
        } else if (key == "n") {
            sc.mapping.n = parse_int(value, r);
        } else if (key == "agent_start") {
            sc.agent_start = parse_vec2(value, r);
            have_agent_start = true;
        } else if (key == "agent_radius") {
            sc.agent_radius = parse_double(value, r);
        } else if (key == "target") {
            sc.target = parse_vec2(value, r);
            have_target = true;
        } else if (key == "nav_tolerance") {
            sc.nav_tolerance = parse_double(value, r);
        } else if (key == "mode") {
            top_mode = parse_mode(value, r);
        } else if (key == "time_base") {
            if (value == "auto") {
                sc.time_base.reset();
            } else {
                sc.time_base = parse_double(value, r);
            }
        } else if (key == "agent_speed") {
            sc.agent_speed = parse_double(value, r);
        } else if (key == "seed") {
            top_seed = parse_u64(value, r);
        } else {
            r.fail("unknown key '" + key + "'");
        }
    }
    flush_ped();

    if (tpl) {
        if (top_mode) tpl->mode = *top_mode;
        if (top_seed) tpl->seed = *top_seed;
        LoadedScenario out{generate(*tpl), tpl};
        return out;
    }

    if (top_mode) sc.mode = *top_mode;
    if (top_seed) sc.seed = *top_seed;
    if (!have_agent_start) throw ConfigError(name + ": missing required key 'agent_start'");
    if (!have_target) throw ConfigError(name + ": missing required key 'target'");
    for (auto& p : sc.pedestrians) {
        if (p.goal == Vec2(0, 0) && p.velocity == Vec2(0, 0)) p.goal = p.position;
    }
    try {
        validate(sc);
    } catch (const InvariantViolation& e) {
        throw ConfigError(name + ": " + e.what());
    }
    return {sc, std::nullopt};
}

Scenario load_scenario(std::istream& in, const std::string& name) {
    return load_scenario_full(in, name).scenario;
}

Scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario file: " + path);
    return load_scenario(in, path);
}

void save_scenario(std::ostream& out, const Scenario& s, bool timestamp) {
    write_timestamp(out, timestamp);
    out << "arena = " << format_double(s.mapping.arena_width) << ' '
        << format_double(s.mapping.arena_height) << "\n";
    out << "n = " << s.mapping.n << "\n";
    out << "agent_start = " << format_double(s.agent_start.x()) << ' '
        << format_double(s.agent_start.y()) << "\n";
    out << "agent_radius = " << format_double(s.agent_radius) << "\n";
    out << "target = " << format_double(s.target.x()) << ' ' << format_double(s.target.y())
        << "\n";
    out << "nav_tolerance = " << format_double(s.nav_tolerance) << "\n";
    out << "mode = " << mode_name(s.mode) << "\n";
    out << "time_base = " << (s.time_base ? format_double(*s.time_base) : "auto") << "\n";
    out << "agent_speed = " << format_double(s.agent_speed) << "\n";
    out << "seed = " << s.seed << "\n";
    for (const Pedestrian& p : s.pedestrians) {
        out << "pedestrian:\n";
        out << "  position = " << format_double(p.position.x()) << ' '
            << format_double(p.position.y()) << "\n";
        out << "  velocity = " << format_double(p.velocity.x()) << ' '
            << format_double(p.velocity.y()) << "\n";
        out << "  personal_radius = " << format_double(p.personal_radius) << "\n";
        out << "  reaction_distance = " << format_double(p.reaction_distance) << "\n";
        out << "  goal = " << format_double(p.goal.x()) << ' ' << format_double(p.goal.y())
            << "\n";
    }
}

void dump_map(std::ostream& out, const CompactCognitiveMap& map, bool timestamp) {
    write_timestamp(out, timestamp);
    const int n = map.mapping.n;
    out << "# map n=" << n << " h=" << format_double(map.mental_step_tau)
        << " r_th=" << format_double(map.arrival_threshold) << "\n";
    for (int j = 1; j <= n; ++j) {
        for (int i = 1; i <= n; ++i) {
            if (i > 1) out << ' ';
            if (map.omega.member(i - 1, j - 1)) {
                out << "obs";
            } else if (map.arrival(i - 1, j - 1) < 0.0) {
                out << "inf";
            } else {
                out << format_double(map.arrival(i - 1, j - 1));
            }
        }
        out << "\n";
    }
}

CompactCognitiveMap parse_map(std::istream& in) {
    std::string line;
    int n = 0;
    double h = 0.1, r_th = 1.5;
    // scan for the header
    while (std::getline(in, line)) {
        const std::string t = trim(line);
        if (t.rfind("# map ", 0) == 0) {
            std::istringstream iss(t.substr(6));
            std::string tok;
            while (iss >> tok) {
                if (tok.rfind("n=", 0) == 0) n = std::stoi(tok.substr(2));
                if (tok.rfind("h=", 0) == 0) h = std::stod(tok.substr(2));
                if (tok.rfind("r_th=", 0) == 0) r_th = std::stod(tok.substr(5));
            }
            break;
        }
        if (!t.empty() && t[0] != '#') throw ConfigError("map dump: missing header line");
    }
    if (n <= 0) throw ConfigError("map dump: bad or missing header");

    CompactCognitiveMap map;
    map.mapping = GridMapping{8.0, 8.0, n};
    map.mental_step_tau = h;
    map.arrival_threshold = r_th;
    map.arrival = Field::Constant(n, n, -1.0);
    map.omega = EffectiveObjectSet(n);
    for (int j = 1; j <= n; ++j) {
        if (!std::getline(in, line)) throw ConfigError("map dump: truncated grid");
        std::istringstream iss(line);
        for (int i = 1; i <= n; ++i) {
            std::string tok;
            if (!(iss >> tok)) throw ConfigError("map dump: short row");
            if (tok == "obs") {
                map.omega.member(i - 1, j - 1) = true;
                map.omega.joined.push_back({{i, j}, 0});
            } else if (tok == "inf") {
                // stays -1
            } else {
                map.arrival(i - 1, j - 1) = std::stod(tok);
            }
        }
    }
    map.reachable = (map.arrival >= 0.0) && !map.omega.member;
    // the agent cell is the arrival minimum
    for (int j = 1; j <= n; ++j) {
        for (int i = 1; i <= n; ++i) {
            if (map.arrival(i - 1, j - 1) == 0.0) map.agent_cell = {i, j};
        }
    }
    return map;
}

void write_path_csv(std::ostream& out, const TimedTrajectory& t, bool timestamp) {
    write_timestamp(out, timestamp);
    out << "t_seconds,x_m,y_m\n";
    for (const TimedPoint& p : t.points) {
        out << format_double(p.t) << ',' << format_double(p.position.x()) << ','
            << format_double(p.position.y()) << "\n";
    }
}

TimedTrajectory read_path_csv(std::istream& in) {
    TimedTrajectory t;
    std::string line;
    while (std::getline(in, line)) {
        const std::string s = trim(line);
        if (s.empty() || s[0] == '#' || s == "t_seconds,x_m,y_m") continue;
        std::istringstream iss(s);
        std::string a, b, c;
        if (std::getline(iss, a, ',') && std::getline(iss, b, ',') && std::getline(iss, c)) {
            t.points.push_back({std::stod(a), Vec2(std::stod(b), std::stod(c))});
        }
    }
    return t;
}

void write_run_csv(std::ostream& out, const SimulationResult& r, const Scenario& s,
                   bool timestamp) {
    write_timestamp(out, timestamp);
    out << "t,entity_id,x,y\n";
    const std::size_t steps = r.agent.points.size();
    for (std::size_t k = 0; k < steps; ++k) {
        const TimedPoint& ap = r.agent.points[k];
        out << format_double(ap.t) << ",0," << format_double(ap.position.x()) << ','
            << format_double(ap.position.y()) << "\n";
        for (std::size_t i = 0; i < r.pedestrians.size(); ++i) {
            if (k >= r.pedestrians[i].points.size()) continue;
            const TimedPoint& pp = r.pedestrians[i].points[k];
            out << format_double(pp.t) << ',' << s.pedestrians[i].id << ','
                << format_double(pp.position.x()) << ',' << format_double(pp.position.y())
                << "\n";
        }
    }
}

void write_events_csv(std::ostream& out, const std::vector<CollisionEvent>& events,
                      bool timestamp) {
    write_timestamp(out, timestamp);
    out << "t,id_a,id_b,distance\n";
    for (const CollisionEvent& e : events) {
        out << format_double(e.t) << ',' << e.id_a << ',' << e.id_b << ','
            << format_double(e.distance) << "\n";
    }
}

std::vector<CollisionEvent> read_events_csv(std::istream& in) {
    std::vector<CollisionEvent> events;
    std::string line;
    while (std::getline(in, line)) {
        const std::string s = trim(line);
        if (s.empty() || s[0] == '#' || s == "t,id_a,id_b,distance") continue;
        std::istringstream iss(s);
        std::string a, b, c, d;
        if (std::getline(iss, a, ',') && std::getline(iss, b, ',') &&
            std::getline(iss, c, ',') && std::getline(iss, d)) {
            events.push_back({std::stod(a), std::stoi(b), std::stoi(c), std::stod(d)});
        }
    }
    return events;
}

void write_metrics_csv(std::ostream& out, const std::vector<MetricsRow>& rows,
                       bool timestamp) {
    write_timestamp(out, timestamp);
    out << "run,mode,seed,completed,no_path,L,S,E,d_crt,M\n";
    for (const MetricsRow& r : rows) {
        out << r.run << ',' << r.mode << ',' << r.seed << ',' << (r.completed ? 1 : 0) << ','
            << (r.no_path ? 1 : 0) << ',' << format_double(r.record.L) << ','
            << format_double(r.record.S) << ',' << format_double(r.record.E) << ','
            << format_double(r.record.d_crt) << ',' << r.record.M << "\n";
    }
}

std::vector<MetricsRow> read_metrics_csv(std::istream& in) {
    std::vector<MetricsRow> rows;
    std::string line;
    while (std::getline(in, line)) {
        const std::string s = trim(line);
        if (s.empty() || s[0] == '#' || s.rfind("run,", 0) == 0) continue;
        std::istringstream iss(s);
        std::string tok;
        std::vector<std::string> parts;
        while (std::getline(iss, tok, ',')) parts.push_back(tok);
        if (parts.size() != 10) throw ConfigError("metrics csv: bad row '" + s + "'");
        MetricsRow r;
        r.run = std::stoi(parts[0]);
        r.mode = parts[1];
        r.seed = std::stoull(parts[2]);
        r.completed = parts[3] == "1";
        r.no_path = parts[4] == "1";
        r.record.L = std::stod(parts[5]);
        r.record.S = std::stod(parts[6]);
        r.record.E = std::stod(parts[7]);
        r.record.d_crt = std::stod(parts[8]);
        r.record.M = std::stoi(parts[9]);
        rows.push_back(r);
    }
    return rows;
}

void write_stats_csv(std::ostream& out, const StatsReport& report, bool timestamp) {
    write_timestamp(out, timestamp);
    out << "measure,mode,mean,sd,n\n";
    for (const auto& row : report.rows) {
        out << row.measure << ',' << row.mode << ',' << format_double(row.stats.mean) << ','
            << format_double(row.stats.sd) << ',' << row.stats.n << "\n";
    }
    out << "measure,p_value\n";
    for (const auto& [measure, p] : report.p_values) {
        out << measure << ',' << format_double(p) << "\n";
    }
}

StatsReport read_stats_csv(std::istream& in) {
    StatsReport report;
    std::string line;
    bool in_p = false;
    while (std::getline(in, line)) {
        const std::string s = trim(line);
        if (s.empty() || s[0] == '#' || s == "measure,mode,mean,sd,n") continue;
        if (s == "measure,p_value") {
            in_p = true;
            continue;
        }
        std::istringstream iss(s);
        std::string tok;
        std::vector<std::string> parts;
        while (std::getline(iss, tok, ',')) parts.push_back(tok);
        if (in_p) {
            if (parts.size() != 2) throw ConfigError("stats csv: bad p row '" + s + "'");
            report.p_values.emplace_back(parts[0], std::stod(parts[1]));
        } else {
            if (parts.size() != 5) throw ConfigError("stats csv: bad row '" + s + "'");
            StatsReport::Row row;
            row.measure = parts[0];
            row.mode = parts[1];
            row.stats.mean = std::stod(parts[2]);
            row.stats.sd = std::stod(parts[3]);
            row.stats.n = std::stoi(parts[4]);
            report.rows.push_back(row);
        }
    }
    return report;
}

void write_calibration(std::ostream& out, const FrontCalibration& cal, int n,
                       const LatticeParams& params, bool timestamp) {
    write_timestamp(out, timestamp);
    out << "n = " << n << "\n";
    out << "v_w = " << format_double(cal.speed) << "\n";
    out << "ignition_delay = " << format_double(cal.ignition_delay) << "\n";
    out << "dtau = " << format_double(params.dtau) << "\n";
    out << "substeps_per_mental_step = " << params.substeps_per_mental_step << "\n";
    for (std::size_t k = 0; k < cal.ring_radius.size(); ++k) {
        out << "ring = " << format_double(cal.ring_radius[k]) << ' '
            << format_double(cal.ring_tau[k]) << "\n";
    }
}

FrontCalibration read_calibration(std::istream& in) {
    FrontCalibration cal;
    std::string line;
    while (std::getline(in, line)) {
        const std::string s = trim(line);
        if (s.empty() || s[0] == '#') continue;
        std::string key, value;
        if (!split_kv(s, key, value)) throw ConfigError("calibration: bad line '" + s + "'");
        if (key == "v_w") {
            cal.speed = std::stod(value);
        } else if (key == "ignition_delay") {
            cal.ignition_delay = std::stod(value);
        } else if (key == "ring") {
            std::istringstream iss(value);
            double rad, tau;
            if (iss >> rad >> tau) {
                cal.ring_radius.push_back(rad);
                cal.ring_tau.push_back(tau);
            }
        }
        // n, dtau, substeps are informational
    }
    return cal;
}

}  // namespace ccm
