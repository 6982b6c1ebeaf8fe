#include <compnoma/config_io.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

namespace compnoma {

using nlohmann::json;

RadioParams RadioConfig::to_params() const
{
    RadioParams p;
    p.tx_power_mw = dbm_to_mw(tx_power_dbm);
    p.noise_density_mw_per_hz = dbm_to_mw(noise_density_dbm_per_hz);
    p.bandwidth_hz = bandwidth_hz;
    p.pathloss_exponent = pathloss_exponent;
    p.sic_tolerance = db_to_linear(sic_tolerance_db);
    return p;
}

std::vector<double> SweepRange::values() const
{
    std::vector<double> out;
    if (!(step > 0.0)) return out;
    for (std::size_t i = 0;; ++i) {
        const double v = start + static_cast<double>(i) * step;
        if (v > stop + 1e-9 * step) break;
        out.push_back(v);
    }
    return out;
}

SweepRange default_sweep(int scenario_id)
{
    if (scenario_id == 1) return {50.0, 400.0, 50.0};
    return {100.0, 300.0, 50.0};
}

SweepRange ExperimentConfig::resolved_sweep() const { return sweep ? *sweep : default_sweep(scenario_id); }

void ExperimentConfig::validate() const
{
    if (scenario_id < 1 || scenario_id > 3) throw ValidationError("scenario_id", "must be 1, 2 or 3");
    if (trials < 1) throw ValidationError("trials", "must be at least 1");
    if (schemes.empty()) throw ValidationError("schemes", "must not be empty");
    for (Scheme s : schemes)
        if ((s == Scheme::CsNoma || s == Scheme::CsOma) && scenario_id != 2)
            throw ValidationError("schemes", "CS-CoMP needs one CoMP user and one non-CoMP user per cell (scenario 2)");
    if (decode_cases.empty()) throw ValidationError("decode_cases", "must not be empty");
    if (std::set<DecodeCase>(decode_cases.begin(), decode_cases.end()).size() != decode_cases.size())
        throw ValidationError("decode_cases", "duplicate case");

    const SweepRange sw = resolved_sweep();
    if (!(sw.step > 0.0) || !std::isfinite(sw.step)) throw ValidationError("sweep.step", "must be positive");
    if (!(sw.start <= sw.stop)) throw ValidationError("sweep.stop", "must not be below sweep.start");
    placement.validate();
    const auto [lo, hi] = sweep_bounds(scenario_id, placement);
    if (!(sw.start > lo)) throw ValidationError("sweep.start", "must be positive");
    for (double v : sw.values())
        if (v > hi) throw ValidationError("sweep.stop", "exceeds " + std::to_string(hi) + " m for this scenario");

    auto finite = [](double v, const char* field) {
        if (!std::isfinite(v)) throw ValidationError(field, "must be finite");
    };
    finite(radio.tx_power_dbm, "radio.tx_power_dbm");
    finite(radio.noise_density_dbm_per_hz, "radio.noise_density_dbm_per_hz");
    finite(radio.sic_tolerance_db, "radio.sic_tolerance_db");
    RadioParams p = radio.to_params();
    try {
        p.validate();
    } catch (const ValidationError& e) {
        // Report the config key, which carries the unit suffix.
        static const std::map<std::string, std::string> keys{
            {"radio.tx_power", "radio.tx_power_dbm"},
            {"radio.noise_density", "radio.noise_density_dbm_per_hz"},
            {"radio.bandwidth", "radio.bandwidth_hz"},
            {"radio.sic_tolerance", "radio.sic_tolerance_db"}};
        const auto it = keys.find(e.field());
        throw ValidationError(it == keys.end() ? e.field() : it->second, "out of range");
    }
}

SweepSpec ExperimentConfig::to_spec() const
{
    validate();
    SweepSpec spec;
    spec.scenario_id = scenario_id;
    spec.schemes = schemes;
    spec.sweep_values = resolved_sweep().values();
    spec.decode_cases = decode_cases;
    spec.trials = trials;
    spec.seed = seed;
    spec.radio = radio.to_params();
    spec.geometry = placement;
    spec.interference = interference_mode;
    spec.jt_split = jt_split;
    spec.workers = workers != 0 ? workers : std::max(1u, std::thread::hardware_concurrency());
    return spec;
}

namespace {

std::size_t line_at(const std::string& text, std::size_t offset)
{
    offset = std::min(offset, text.size());
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

std::size_t line_of_key(const std::string& text, const std::string& key)
{
    const auto pos = text.find("\"" + key + "\"");
    return pos == std::string::npos ? 0 : line_at(text, pos);
}

class Reader {
public:
    explicit Reader(const std::string& text) : text_(text) {}

    void check_keys(const json& obj, const std::string& prefix, std::initializer_list<const char*> allowed) const
    {
        if (!obj.is_object()) fail(prefix.empty() ? "config" : prefix, "must be an object");
        for (const auto& [key, value] : obj.items()) {
            if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
                throw ParseError("unknown key '" + qualified(prefix, key) + "' on line " +
                                     std::to_string(line_of_key(text_, key)),
                                 line_of_key(text_, key), qualified(prefix, key));
        }
    }

    template <class T>
    void read(const json& obj, const std::string& prefix, const char* key, T& out) const
    {
        if (!obj.contains(key)) return;
        try {
            out = obj.at(key).get<T>();
        } catch (const json::exception&) {
            fail(qualified(prefix, key), "has the wrong type");
        }
    }

    [[noreturn]] void fail(const std::string& key, const std::string& why) const
    {
        const std::string leaf = key.substr(key.rfind('.') == std::string::npos ? 0 : key.rfind('.') + 1);
        const std::size_t line = line_of_key(text_, leaf);
        throw ParseError("'" + key + "' " + why + (line ? " (line " + std::to_string(line) + ")" : ""), line, key);
    }

    static std::string qualified(const std::string& prefix, const std::string& key)
    {
        return prefix.empty() ? key : prefix + "." + key;
    }

private:
    const std::string& text_;
};

InterferenceMode parse_interference(const std::string& s)
{
    if (s == "negligible") return InterferenceMode::Negligible;
    if (s == "full") return InterferenceMode::Full;
    throw ValidationError("interference_mode", "expected 'negligible' or 'full', got '" + s + "'");
}

CompPlacement parse_placement(const std::string& s)
{
    if (s == "disc") return CompPlacement::Disc;
    if (s == "annulus") return CompPlacement::Annulus;
    throw ValidationError("placement.comp_placement", "expected 'disc' or 'annulus', got '" + s + "'");
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text)
{
    json doc;
    const bool blank = std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isspace(c); });
    if (blank) {
        doc = json::object();
    } else {
        try {
            doc = json::parse(text);
        } catch (const json::parse_error& e) {
            const std::size_t line = line_at(text, e.byte == 0 ? 0 : e.byte - 1);
            throw ParseError("syntax error on line " + std::to_string(line) + ": " + e.what(), line, "");
        }
    }

    const Reader rd(text);
    rd.check_keys(doc, "", {"scenario_id", "schemes", "sweep", "trials", "seed", "radio", "placement",
                            "interference_mode", "jt_split", "decode_cases", "workers", "output_path"});

    ExperimentConfig cfg;
    rd.read(doc, "", "scenario_id", cfg.scenario_id);
    if (doc.contains("trials") && doc.at("trials").is_number_integer() && doc.at("trials").get<std::int64_t>() < 0)
        throw ValidationError("trials", "must be at least 1");
    rd.read(doc, "", "trials", cfg.trials);
    rd.read(doc, "", "seed", cfg.seed);
    rd.read(doc, "", "workers", cfg.workers);
    rd.read(doc, "", "output_path", cfg.output_path);

    if (doc.contains("schemes")) {
        std::vector<std::string> labels;
        rd.read(doc, "", "schemes", labels);
        cfg.schemes.clear();
        for (const auto& l : labels) cfg.schemes.push_back(parse_scheme(l));
    }
    if (doc.contains("interference_mode")) {
        std::string mode;
        rd.read(doc, "", "interference_mode", mode);
        cfg.interference_mode = parse_interference(mode);
    }
    if (doc.contains("jt_split")) {
        std::string split;
        rd.read(doc, "", "jt_split", split);
        if (split == "equal_received")
            cfg.jt_split = JtSplit::EqualReceived;
        else if (split == "proportional_power")
            cfg.jt_split = JtSplit::ProportionalPower;
        else
            throw ValidationError("jt_split", "expected 'equal_received' or 'proportional_power', got '" + split + "'");
    }
    if (doc.contains("decode_cases")) {
        std::vector<int> cases;
        rd.read(doc, "", "decode_cases", cases);
        cfg.decode_cases.clear();
        for (int c : cases) {
            if (c != 1 && c != 2) throw ValidationError("decode_cases", "cases are 1 or 2");
            cfg.decode_cases.push_back(static_cast<DecodeCase>(c));
        }
    }
    if (doc.contains("sweep") && !doc.at("sweep").is_null()) {
        const json& sw = doc.at("sweep");
        rd.check_keys(sw, "sweep", {"start", "stop", "step"});
        SweepRange range = default_sweep(cfg.scenario_id);
        rd.read(sw, "sweep", "start", range.start);
        rd.read(sw, "sweep", "stop", range.stop);
        rd.read(sw, "sweep", "step", range.step);
        cfg.sweep = range;
    }
    if (doc.contains("radio")) {
        const json& r = doc.at("radio");
        rd.check_keys(r, "radio", {"tx_power_dbm", "noise_density_dbm_per_hz", "bandwidth_hz", "pathloss_exponent",
                                   "sic_tolerance_db"});
        rd.read(r, "radio", "tx_power_dbm", cfg.radio.tx_power_dbm);
        rd.read(r, "radio", "noise_density_dbm_per_hz", cfg.radio.noise_density_dbm_per_hz);
        rd.read(r, "radio", "bandwidth_hz", cfg.radio.bandwidth_hz);
        rd.read(r, "radio", "pathloss_exponent", cfg.radio.pathloss_exponent);
        rd.read(r, "radio", "sic_tolerance_db", cfg.radio.sic_tolerance_db);
    }
    if (doc.contains("placement")) {
        const json& p = doc.at("placement");
        rd.check_keys(p, "placement", {"inter_bs_distance_m", "noncomp_radius_m", "second_user_distance_m",
                                       "noncomp_distance_m", "scenario1_edge_radius_m", "comp_placement"});
        rd.read(p, "placement", "inter_bs_distance_m", cfg.placement.inter_bs_distance_m);
        rd.read(p, "placement", "noncomp_radius_m", cfg.placement.noncomp_radius_m);
        rd.read(p, "placement", "second_user_distance_m", cfg.placement.second_user_distance_m);
        rd.read(p, "placement", "noncomp_distance_m", cfg.placement.noncomp_distance_m);
        rd.read(p, "placement", "scenario1_edge_radius_m", cfg.placement.scenario1_edge_radius_m);
        if (p.contains("comp_placement")) {
            std::string s;
            rd.read(p, "placement", "comp_placement", s);
            cfg.placement.placement = parse_placement(s);
        }
    }

    cfg.validate();
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

std::string emit_config(const ExperimentConfig& c)
{
    json doc;
    doc["scenario_id"] = c.scenario_id;
    json schemes = json::array();
    for (Scheme s : c.schemes) schemes.push_back(to_string(s));
    doc["schemes"] = schemes;
    if (c.sweep) doc["sweep"] = {{"start", c.sweep->start}, {"stop", c.sweep->stop}, {"step", c.sweep->step}};
    doc["trials"] = c.trials;
    doc["seed"] = c.seed;
    doc["radio"] = {{"tx_power_dbm", c.radio.tx_power_dbm},
                    {"noise_density_dbm_per_hz", c.radio.noise_density_dbm_per_hz},
                    {"bandwidth_hz", c.radio.bandwidth_hz},
                    {"pathloss_exponent", c.radio.pathloss_exponent},
                    {"sic_tolerance_db", c.radio.sic_tolerance_db}};
    doc["placement"] = {{"inter_bs_distance_m", c.placement.inter_bs_distance_m},
                        {"noncomp_radius_m", c.placement.noncomp_radius_m},
                        {"second_user_distance_m", c.placement.second_user_distance_m},
                        {"noncomp_distance_m", c.placement.noncomp_distance_m},
                        {"scenario1_edge_radius_m", c.placement.scenario1_edge_radius_m},
                        {"comp_placement", to_string(c.placement.placement)}};
    doc["interference_mode"] = c.interference_mode == InterferenceMode::Full ? "full" : "negligible";
    doc["jt_split"] = to_string(c.jt_split);
    json cases = json::array();
    for (DecodeCase dc : c.decode_cases) cases.push_back(static_cast<int>(dc));
    doc["decode_cases"] = cases;
    doc["workers"] = c.workers;
    doc["output_path"] = c.output_path;
    return doc.dump(2) + "\n";
}

std::string emit_defaults(int scenario_id)
{
    ExperimentConfig c;
    c.scenario_id = scenario_id;
    return emit_config(c);
}

ExperimentConfig preset(const std::string& name)
{
    ExperimentConfig c;
    if (name == "fig4") {
        c.scenario_id = 1;
        c.schemes = {Scheme::JtNoma, Scheme::JtOma};
    } else if (name == "fig5") {
        c.scenario_id = 2;
        c.schemes = {Scheme::JtNoma, Scheme::CsNoma, Scheme::JtOma};
    } else if (name == "fig6") {
        c.scenario_id = 3;
        c.schemes = {Scheme::JtNoma, Scheme::JtOma};
        c.decode_cases = {DecodeCase::Case1, DecodeCase::Case2};
    } else {
        throw ConfigError("unknown preset '" + name + "' (expected fig4, fig5 or fig6)");
    }
    c.sweep = default_sweep(c.scenario_id);
    return c;
}

namespace {

std::string fmt9(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

}  // namespace

std::string format_csv(const SweepResult& result)
{
    std::vector<const SweepRow*> rows;
    for (const auto& r : result.rows) rows.push_back(&r);
    std::stable_sort(rows.begin(), rows.end(), [](const SweepRow* a, const SweepRow* b) {
        if (a->sweep_m != b->sweep_m) return a->sweep_m < b->sweep_m;
        return a->scheme < b->scheme;
    });

    std::string out = "sweep_m,scheme,mean_se_bps_hz,ci95,infeasible_frac,trials\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const SweepRow& r = *rows[i];
        const std::pair<const char*, double> cells[] = {
            {"sweep_m", r.sweep_m}, {"mean_se_bps_hz", r.mean_se}, {"ci95", r.ci95}, {"infeasible_frac", r.infeasible_frac}};
        for (const auto& [column, v] : cells)
            if (!std::isfinite(v))
                throw IoError("refusing to write CSV: non-finite " + std::string(column) + " in data row " +
                              std::to_string(i + 1) + " (" + r.scheme + " at " + fmt9(r.sweep_m) + " m)");
        out += fmt9(r.sweep_m) + "," + r.scheme + "," + fmt9(r.mean_se) + "," + fmt9(r.ci95) + "," +
               fmt9(r.infeasible_frac) + "," + std::to_string(r.trials) + "\n";
    }
    return out;
}

void emit_csv(const SweepResult& result, const std::string& path)
{
    const std::string text = format_csv(result);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << text;
    out.flush();
    if (!out) throw IoError("write to '" + path + "' failed");
}

std::string summary_report(const SweepResult& result)
{
    std::string out;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%10s  %-16s %12s %10s %10s %12s %8s\n", "sweep_m", "scheme", "mean_se", "ci95",
                  "infeasible", "oma_se", "g_viol");
    out += buf;
    for (const auto& r : result.rows) {
        std::snprintf(buf, sizeof buf, "%10.1f  %-16s %12.6f %10.6f %10.4f %12.6f %8llu\n", r.sweep_m, r.scheme.c_str(),
                      r.mean_se, r.ci95, r.infeasible_frac, r.mean_oma_se,
                      static_cast<unsigned long long>(r.guarantee_violations));
        out += buf;
    }
    return out;
}

}  // namespace compnoma
