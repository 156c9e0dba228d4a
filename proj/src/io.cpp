#include "swarmsearch/io.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#ifndef SWARMSEARCH_VERSION
#define SWARMSEARCH_VERSION "unversioned"
#endif

namespace swarm {

using nlohmann::json;

namespace {

constexpr int kSummaryVersion = 1;
constexpr int kFramesVersion = 1;

std::string fmt(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, std::string_view s) {
    s = trim(s);
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw ConfigError(key, "expected a number, got '" + std::string(s) + "'");
    }
    return v;
}

std::int64_t to_int(const std::string& key, std::string_view s) {
    s = trim(s);
    std::int64_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw ConfigError(key, "expected an integer, got '" + std::string(s) + "'");
    }
    return v;
}

std::uint64_t to_u64(const std::string& key, std::string_view s) {
    s = trim(s);
    std::uint64_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw ConfigError(key, "expected a non-negative integer, got '" + std::string(s) + "'");
    }
    return v;
}

bool to_bool(const std::string& key, std::string_view s) {
    s = trim(s);
    if (s == "true" || s == "1") return true;
    if (s == "false" || s == "0") return false;
    throw ConfigError(key, "expected true or false, got '" + std::string(s) + "'");
}

int to_count(const std::string& key, std::string_view s) {
    const auto v = to_int(key, s);
    if (v < -1'000'000'000 || v > 1'000'000'000) throw ConfigError(key, "out of range");
    return static_cast<int>(v);
}

std::vector<double> to_list(const std::string& key, std::string_view s) {
    std::vector<double> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = s.find(',', start);
        const auto item = trim(s.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (item.empty()) throw ConfigError(key, "empty list element");
        out.push_back(to_double(key, item));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

const char* rule_name(CoverageRule r) { return r == CoverageRule::Disc ? "disc" : "point"; }

CoverageRule to_rule(const std::string& key, std::string_view s) {
    s = trim(s);
    if (s == "disc") return CoverageRule::Disc;
    if (s == "point") return CoverageRule::Point;
    throw ConfigError(key, "expected disc or point");
}

struct RawEntry {
    std::string value;
    int line;
};

// Applies one SimConfig key; false if the key is not a SimConfig key.
bool apply_sim_key(SimConfig& c, const std::string& key, std::string_view v) {
    if (key == "side_length") c.side_length = to_double(key, v);
    else if (key == "n") c.n = to_count(key, v);
    else if (key == "targets") c.targets = to_count(key, v);
    else if (key == "v") c.v = to_double(key, v);
    else if (key == "c_f") c.c_f = to_double(key, v);
    else if (key == "r_t") c.r_t = to_double(key, v);
    else if (key == "r_s") c.r_s = to_double(key, v);
    else if (key == "r1_frac") c.r1_frac = to_double(key, v);
    else if (key == "r2_frac") c.r2_frac = to_double(key, v);
    else if (key == "rho") c.rho = to_double(key, v);
    else if (key == "sigma") c.sigma = to_double(key, v);
    else if (key == "seed") c.seed = to_u64(key, v);
    else if (key == "max_ticks") c.max_ticks = to_int(key, v);
    else if (key == "targets_enabled") c.targets_enabled = to_bool(key, v);
    else if (key == "record_trajectory") c.record_trajectory = to_bool(key, v);
    else if (key == "record_components") c.record_components = to_bool(key, v);
    else if (key == "coverage_rule") c.coverage_rule = to_rule(key, v);
    else return false;
    return true;
}

json config_to_json(const SimConfig& c) {
    return json{{"side_length", c.side_length},
                {"n", c.n},
                {"targets", c.targets},
                {"v", c.v},
                {"c_f", c.c_f},
                {"r_t", c.r_t},
                {"r_s", c.r_s},
                {"r1_frac", c.r1_frac},
                {"r2_frac", c.r2_frac},
                {"rho", c.rho},
                {"sigma", c.sigma},
                {"seed", c.seed},
                {"max_ticks", c.max_ticks},
                {"targets_enabled", c.targets_enabled},
                {"record_trajectory", c.record_trajectory},
                {"record_components", c.record_components},
                {"coverage_rule", rule_name(c.coverage_rule)}};
}

SimConfig config_from_json(const json& j) {
    SimConfig c;
    c.side_length = j.at("side_length").get<double>();
    c.n = j.at("n").get<int>();
    c.targets = j.at("targets").get<int>();
    c.v = j.at("v").get<double>();
    c.c_f = j.at("c_f").get<double>();
    c.r_t = j.at("r_t").get<double>();
    c.r_s = j.at("r_s").get<double>();
    c.r1_frac = j.at("r1_frac").get<double>();
    c.r2_frac = j.at("r2_frac").get<double>();
    c.rho = j.at("rho").get<double>();
    c.sigma = j.at("sigma").get<double>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.max_ticks = j.at("max_ticks").get<std::int64_t>();
    c.targets_enabled = j.at("targets_enabled").get<bool>();
    c.record_trajectory = j.at("record_trajectory").get<bool>();
    c.record_components = j.at("record_components").get<bool>();
    c.coverage_rule = to_rule("coverage_rule", j.at("coverage_rule").get<std::string>());
    return c;
}

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }
std::optional<double> opt_from(const json& j) {
    if (j.is_null()) return std::nullopt;
    return j.get<double>();
}

json fraction_map_json(const std::map<double, std::optional<double>>& m) {
    json arr = json::array();
    for (const auto& [x, v] : m) arr.push_back(json::array({x, opt_json(v)}));
    return arr;
}

std::map<double, std::optional<double>> fraction_map_from(const json& arr) {
    std::map<double, std::optional<double>> m;
    for (const auto& p : arr) m[p.at(0).get<double>()] = opt_from(p.at(1));
    return m;
}

json stats_to_json(const BatchStats& s) {
    return json{{"config", config_to_json(s.config)},
                {"base_seed", s.base_seed},
                {"replicates", s.replicates},
                {"executed", s.executed},
                {"censored", s.censored},
                {"censoring_rate", s.censoring_rate},
                {"failed", s.failed},
                {"mean_s_avg", opt_json(s.mean_s_avg)},
                {"std_s_avg", opt_json(s.std_s_avg)},
                {"pooled_sd", opt_json(s.pooled_sd)},
                {"mean_first_find", opt_json(s.mean_first_find)},
                {"mean_f_count", opt_json(s.mean_f_count)},
                {"mean_c_prop", opt_json(s.mean_c_prop)},
                {"mean_c_comp_star", opt_json(s.mean_c_comp_star)},
                {"mean_g_size", opt_json(s.mean_g_size)},
                {"mean_cover_times", fraction_map_json(s.mean_cover_times)},
                {"mean_subgroup_cover_times", fraction_map_json(s.mean_subgroup_cover_times)},
                {"s_avg_samples", s.s_avg_samples}};
}

BatchStats stats_from_json(const json& j) {
    BatchStats s;
    s.config = config_from_json(j.at("config"));
    s.base_seed = j.at("base_seed").get<std::uint64_t>();
    s.replicates = j.at("replicates").get<int>();
    s.executed = j.at("executed").get<int>();
    s.censored = j.at("censored").get<int>();
    s.censoring_rate = j.at("censoring_rate").get<double>();
    s.failed = j.at("failed").get<bool>();
    s.mean_s_avg = opt_from(j.at("mean_s_avg"));
    s.std_s_avg = opt_from(j.at("std_s_avg"));
    s.pooled_sd = opt_from(j.at("pooled_sd"));
    s.mean_first_find = opt_from(j.at("mean_first_find"));
    s.mean_f_count = opt_from(j.at("mean_f_count"));
    s.mean_c_prop = opt_from(j.at("mean_c_prop"));
    s.mean_c_comp_star = opt_from(j.at("mean_c_comp_star"));
    s.mean_g_size = opt_from(j.at("mean_g_size"));
    s.mean_cover_times = fraction_map_from(j.at("mean_cover_times"));
    s.mean_subgroup_cover_times = fraction_map_from(j.at("mean_subgroup_cover_times"));
    s.s_avg_samples = j.at("s_avg_samples").get<std::vector<double>>();
    return s;
}

}  // namespace

ParsedConfig parse_config(std::string_view text, std::optional<std::uint64_t> seed_override) {
    std::vector<std::pair<std::string, RawEntry>> entries;
    std::set<std::string> seen;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError(std::string(line), "line " + std::to_string(line_no) + " is not 'key = value'");
        }
        std::string key(trim(line.substr(0, eq)));
        if (key.empty()) throw ConfigError("", "line " + std::to_string(line_no) + " has an empty key");
        if (!seen.insert(key).second) throw ConfigError(key, "given more than once");
        entries.emplace_back(key, RawEntry{std::string(trim(line.substr(eq + 1))), line_no});
    }

    SimConfig base;
    SweepSpec sweep;
    bool is_sweep = false;
    bool has_seed = false;
    for (const auto& [key, raw] : entries) {
        if (key == "seed") has_seed = true;
        if (apply_sim_key(base, key, raw.value)) continue;
        if (key == "replicates") {
            const auto r = to_int(key, raw.value);
            if (r < 1 || r > 100'000'000) throw ConfigError(key, "must be >= 1");
            sweep.replicates = static_cast<int>(r);
            is_sweep = true;
        } else if (key == "cover_fractions") {
            sweep.cover_fractions = to_list(key, raw.value);
            for (double x : sweep.cover_fractions) {
                if (!(x >= 0.0 && x <= 1.0)) throw ConfigError(key, "fractions must lie in [0, 1]");
            }
            is_sweep = true;
        } else if (key.rfind("axis.", 0) == 0) {
            const std::string name = key.substr(5);
            const auto& names = sweep_axis_names();
            if (std::find(names.begin(), names.end(), name) == names.end()) {
                throw ConfigError(key, "unknown sweep axis");
            }
            sweep.axes.emplace_back(name, to_list(key, raw.value));
            is_sweep = true;
        } else {
            throw ConfigError(key, "unknown key");
        }
    }
    if (seed_override) {
        base.seed = *seed_override;
    } else if (!has_seed && !entries.empty()) {
        throw ConfigError("seed", "missing; give it in the file or on the command line");
    }
    base.validate();
    if (!is_sweep) return base;
    sweep.base = base;
    sweep.base_seed = base.seed;
    (void)expand_sweep(sweep);  // validates every grid point
    return sweep;
}

SimConfig parse_sim_config(std::string_view text, std::optional<std::uint64_t> seed_override) {
    auto parsed = parse_config(text, seed_override);
    if (auto* c = std::get_if<SimConfig>(&parsed)) return *c;
    return std::get<SweepSpec>(parsed).base;
}

SweepSpec parse_sweep_spec(std::string_view text, std::optional<std::uint64_t> seed_override) {
    auto parsed = parse_config(text, seed_override);
    if (auto* s = std::get_if<SweepSpec>(&parsed)) return *s;
    SweepSpec spec;
    spec.base = std::get<SimConfig>(parsed);
    spec.base_seed = spec.base.seed;
    return spec;
}

std::string serialize_config(const SimConfig& c) {
    std::string out;
    auto put = [&](const char* key, const std::string& v) { out += std::string(key) + " = " + v + "\n"; };
    put("side_length", fmt(c.side_length));
    put("n", std::to_string(c.n));
    put("targets", std::to_string(c.targets));
    put("v", fmt(c.v));
    put("c_f", fmt(c.c_f));
    put("r_t", fmt(c.r_t));
    put("r_s", fmt(c.r_s));
    put("r1_frac", fmt(c.r1_frac));
    put("r2_frac", fmt(c.r2_frac));
    put("rho", fmt(c.rho));
    put("sigma", fmt(c.sigma));
    put("seed", std::to_string(c.seed));
    put("max_ticks", std::to_string(c.max_ticks));
    put("targets_enabled", c.targets_enabled ? "true" : "false");
    put("record_trajectory", c.record_trajectory ? "true" : "false");
    put("record_components", c.record_components ? "true" : "false");
    put("coverage_rule", rule_name(c.coverage_rule));
    return out;
}

std::string serialize_sweep(const SweepSpec& spec) {
    SimConfig base = spec.base;
    base.seed = spec.base_seed;
    std::string out = serialize_config(base);
    out += "replicates = " + std::to_string(spec.replicates) + "\n";
    auto list = [](const std::vector<double>& xs) {
        std::string s;
        for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? ", " : "") + fmt(xs[i]);
        return s;
    };
    if (!spec.cover_fractions.empty()) out += "cover_fractions = " + list(spec.cover_fractions) + "\n";
    for (const auto& [name, values] : spec.axes) out += "axis." + name + " = " + list(values) + "\n";
    return out;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw IoError("write failed for " + path.string());
}

std::string summary_csv(const SweepResult& result) {
    std::set<double> fractions(result.spec.cover_fractions.begin(), result.spec.cover_fractions.end());
    for (const auto& inst : result.instances) {
        for (const auto& [x, v] : inst.stats.mean_cover_times) fractions.insert(x);
    }
    std::string out = "# swarmsearch summary v" + std::to_string(kSummaryVersion) + "\n";
    out += "instance,side_length,n,targets,v,c_f,r_t,r_s,r1_frac,r2_frac,rho,sigma,mode,replicates,executed,base_seed,"
           "censored,censoring_rate,failed,mean_s_avg,std_s_avg,pooled_sd,mean_first_find,normalized,mean_c_prop,"
           "mean_g_size,mean_c_comp_star,mean_f_count";
    for (double x : fractions) out += ",cover_" + fmt(x);
    for (double x : fractions) out += ",subgroup_cover_" + fmt(x);
    out += "\n";
    for (std::size_t i = 0; i < result.instances.size(); ++i) {
        const auto& inst = result.instances[i];
        const auto& s = inst.stats;
        const auto& c = s.config;
        std::vector<std::string> cells = {std::to_string(i),
                                          fmt(c.side_length),
                                          std::to_string(c.n),
                                          std::to_string(c.targets),
                                          fmt(c.v),
                                          fmt(c.c_f),
                                          fmt(c.r_t),
                                          fmt(c.r_s),
                                          fmt(c.r1_frac),
                                          fmt(c.r2_frac),
                                          fmt(c.rho),
                                          fmt(c.sigma),
                                          c.metrics_mode() ? "metrics" : "search",
                                          std::to_string(s.replicates),
                                          std::to_string(s.executed),
                                          std::to_string(s.base_seed),
                                          std::to_string(s.censored),
                                          fmt(s.censoring_rate),
                                          s.failed ? "true" : "false",
                                          fmt(s.mean_s_avg),
                                          fmt(s.std_s_avg),
                                          fmt(s.pooled_sd),
                                          fmt(s.mean_first_find),
                                          fmt(inst.normalized),
                                          fmt(s.mean_c_prop),
                                          fmt(s.mean_g_size),
                                          fmt(s.mean_c_comp_star),
                                          fmt(s.mean_f_count)};
        for (double x : fractions) {
            const auto it = s.mean_cover_times.find(x);
            cells.push_back(it == s.mean_cover_times.end() ? "" : fmt(it->second));
        }
        for (double x : fractions) {
            const auto it = s.mean_subgroup_cover_times.find(x);
            cells.push_back(it == s.mean_subgroup_cover_times.end() ? "" : fmt(it->second));
        }
        for (std::size_t k = 0; k < cells.size(); ++k) out += (k ? "," : "") + cells[k];
        out += "\n";
    }
    return out;
}

std::string summary_json(const SweepResult& result) {
    json axes = json::array();
    for (const auto& [name, values] : result.spec.axes) axes.push_back(json{{"name", name}, {"values", values}});
    json instances = json::array();
    for (const auto& inst : result.instances) {
        json params = json::array();
        for (const auto& [name, v] : inst.params) params.push_back(json::array({name, v}));
        instances.push_back(json{{"params", params}, {"normalized", opt_json(inst.normalized)},
                                 {"stats", stats_to_json(inst.stats)}});
    }
    const json doc{{"format", "swarmsearch-summary"},
                   {"version", kSummaryVersion},
                   {"spec",
                    {{"base", config_to_json(result.spec.base)},
                     {"axes", axes},
                     {"replicates", result.spec.replicates},
                     {"base_seed", result.spec.base_seed},
                     {"cover_fractions", result.spec.cover_fractions}}},
                   {"instances", instances}};
    return doc.dump(1) + "\n";
}

SweepResult parse_summary_json(std::string_view text) {
    try {
        const json doc = json::parse(text);
        if (doc.at("format") != "swarmsearch-summary") throw IoError("not a summary file");
        if (doc.at("version").get<int>() != kSummaryVersion) throw IoError("unsupported summary version");
        SweepResult r;
        const auto& spec = doc.at("spec");
        r.spec.base = config_from_json(spec.at("base"));
        for (const auto& a : spec.at("axes")) {
            r.spec.axes.emplace_back(a.at("name").get<std::string>(), a.at("values").get<std::vector<double>>());
        }
        r.spec.replicates = spec.at("replicates").get<int>();
        r.spec.base_seed = spec.at("base_seed").get<std::uint64_t>();
        r.spec.cover_fractions = spec.at("cover_fractions").get<std::vector<double>>();
        for (const auto& i : doc.at("instances")) {
            InstanceResult inst;
            for (const auto& p : i.at("params")) {
                inst.params.emplace_back(p.at(0).get<std::string>(), p.at(1).get<double>());
            }
            inst.normalized = opt_from(i.at("normalized"));
            inst.stats = stats_from_json(i.at("stats"));
            r.instances.push_back(std::move(inst));
        }
        return r;
    } catch (const json::exception& e) {
        throw IoError(std::string("malformed summary json: ") + e.what());
    }
}

std::vector<std::filesystem::path> write_summary(const SweepResult& result, const std::filesystem::path& path) {
    auto twin = path;
    twin.replace_extension(".json");
    if (twin == path) throw IoError("summary path must not end in .json");
    write_text_file(path, summary_csv(result));
    write_text_file(twin, summary_json(result));
    return {path, twin};
}

SweepResult read_summary_json(const std::filesystem::path& path) { return parse_summary_json(read_text_file(path)); }

std::string frames_text(const EventLog& log) {
    if (!log.config.record_trajectory) throw IoError("trajectory recording was disabled for this run");
    std::string out = "# swarmsearch frames v" + std::to_string(kFramesVersion) + "\n";
    std::string cfg = serialize_config(log.config);
    std::size_t start = 0;
    while (start < cfg.size()) {
        const auto nl = cfg.find('\n', start);
        out += "# config " + cfg.substr(start, nl - start) + "\n";
        start = nl + 1;
    }
    for (std::size_t t = 0; t < log.targets.size(); ++t) {
        out += "# target " + std::to_string(t) + " " + fmt(log.targets[t].x) + " " + fmt(log.targets[t].y) + "\n";
    }
    out += "tick,id,x,y,heading_deg,state\n";
    for (const auto& f : log.trajectory) {
        out += std::to_string(f.tick) + "," + std::to_string(f.id) + "," + fmt(f.x) + "," + fmt(f.y) + "," +
               fmt(f.heading) + "," + std::string(to_string(f.tag)) + "\n";
    }
    return out;
}

void write_frames(const EventLog& log, const std::filesystem::path& path) { write_text_file(path, frames_text(log)); }

std::vector<FrameRecord> parse_frames(std::string_view text) {
    std::vector<FrameRecord> out;
    std::istringstream in{std::string(text)};
    std::string line;
    bool header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header) {
            header = true;
            continue;
        }
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (cells.size() != 6) throw IoError("bad frame record: " + line);
        FrameRecord f;
        f.tick = to_int("tick", cells[0]);
        f.id = static_cast<int>(to_int("id", cells[1]));
        f.x = to_double("x", cells[2]);
        f.y = to_double("y", cells[3]);
        f.heading = to_double("heading_deg", cells[4]);
        if (cells[5] == "Search") f.tag = StateTag::Search;
        else if (cells[5] == "Lock") f.tag = StateTag::Lock;
        else if (cells[5] == "Find") f.tag = StateTag::Find;
        else if (cells[5] == "Arrived") f.tag = StateTag::Arrived;
        else throw IoError("bad state tag: " + cells[5]);
        out.push_back(f);
    }
    return out;
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t value) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
    return buf;
}

std::string code_version() { return SWARMSEARCH_VERSION; }

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

RunManifest make_manifest(const std::filesystem::path& dir, std::string_view spec_text, std::uint64_t base_seed,
                          std::string command, const std::vector<std::filesystem::path>& outputs) {
    RunManifest m;
    m.spec_checksum = hex64(fnv1a64(spec_text));
    m.code_version = code_version();
    m.base_seed = base_seed;
    m.timestamp = utc_timestamp();
    m.command = std::move(command);
    for (const auto& p : outputs) {
        const std::string bytes = read_text_file(p);
        m.outputs.push_back({std::filesystem::relative(p, dir).generic_string(), hex64(fnv1a64(bytes)),
                             static_cast<std::uint64_t>(bytes.size())});
    }
    return m;
}

std::string manifest_json(const RunManifest& m) {
    json outs = json::array();
    for (const auto& e : m.outputs) outs.push_back(json{{"path", e.path}, {"checksum", e.checksum}, {"bytes", e.bytes}});
    const json doc{{"format", "swarmsearch-manifest"},
                   {"spec_checksum", m.spec_checksum},
                   {"code_version", m.code_version},
                   {"base_seed", m.base_seed},
                   {"timestamp", m.timestamp},
                   {"command", m.command},
                   {"outputs", outs}};
    return doc.dump(1) + "\n";
}

RunManifest parse_manifest_json(std::string_view text) {
    try {
        const json doc = json::parse(text);
        if (doc.at("format") != "swarmsearch-manifest") throw IoError("not a manifest");
        RunManifest m;
        m.spec_checksum = doc.at("spec_checksum").get<std::string>();
        m.code_version = doc.at("code_version").get<std::string>();
        m.base_seed = doc.at("base_seed").get<std::uint64_t>();
        m.timestamp = doc.at("timestamp").get<std::string>();
        m.command = doc.at("command").get<std::string>();
        for (const auto& e : doc.at("outputs")) {
            m.outputs.push_back({e.at("path").get<std::string>(), e.at("checksum").get<std::string>(),
                                 e.at("bytes").get<std::uint64_t>()});
        }
        return m;
    } catch (const json::exception& e) {
        throw IoError(std::string("malformed manifest: ") + e.what());
    }
}

std::filesystem::path write_manifest(const std::filesystem::path& dir, const RunManifest& manifest) {
    const auto path = dir / "manifest.json";
    write_text_file(path, manifest_json(manifest));
    return path;
}

RunManifest read_manifest(const std::filesystem::path& dir) {
    return parse_manifest_json(read_text_file(dir / "manifest.json"));
}

std::vector<std::string> verify_manifest(const std::filesystem::path& dir) {
    const RunManifest m = read_manifest(dir);
    std::vector<std::string> bad;
    for (const auto& e : m.outputs) {
        std::string bytes;
        try {
            bytes = read_text_file(dir / e.path);
        } catch (const IoError&) {
            bad.push_back(e.path);
            continue;
        }
        if (hex64(fnv1a64(bytes)) != e.checksum || bytes.size() != e.bytes) bad.push_back(e.path);
    }
    return bad;
}

}  // namespace swarm
