#include "otabc/runner.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "otabc/io.hpp"

namespace otabc {

using nlohmann::json;

std::vector<double> GridConfig::points() const {
    std::vector<double> pts;
    if (!(step > 0.0) || !(lo < hi)) {
        throw InvalidInputError("GridConfig: requires lo < hi and step > 0");
    }
    const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
    pts.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        pts.push_back(lo + static_cast<double>(i) * step);
    }
    return pts;
}

namespace {

// Collects every violation with its field path instead of stopping at the
// first one.
class Validator {
public:
    explicit Validator(std::vector<std::string>& errors) : errors_(errors) {}

    void fail(const std::string& path, const std::string& message) {
        errors_.push_back(path + ": " + message);
    }

    void check_keys(const json& obj, const std::string& path,
                    std::initializer_list<const char*> allowed) {
        if (!obj.is_object()) {
            fail(path, "expected an object");
            return;
        }
        for (const auto& item : obj.items()) {
            bool known = false;
            for (const char* k : allowed) {
                if (item.key() == k) {
                    known = true;
                    break;
                }
            }
            if (!known) {
                fail(path.empty() ? item.key() : path + "." + item.key(), "unknown field");
            }
        }
    }

    bool has(const json& obj, const char* key) const { return obj.contains(key); }

    std::optional<double> number(const json& obj, const std::string& path, const char* key,
                                 bool required) {
        if (!obj.contains(key)) {
            if (required) fail(path + key, "missing required field");
            return std::nullopt;
        }
        const auto& v = obj.at(key);
        if (!v.is_number()) {
            fail(path + key, "expected a number");
            return std::nullopt;
        }
        return v.get<double>();
    }

    std::optional<std::uint64_t> unsigned_int(const json& obj, const std::string& path,
                                              const char* key, bool required) {
        if (!obj.contains(key)) {
            if (required) fail(path + key, "missing required field");
            return std::nullopt;
        }
        const auto& v = obj.at(key);
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
            fail(path + key, "expected a nonnegative integer");
            return std::nullopt;
        }
        return v.get<std::uint64_t>();
    }

    std::optional<std::string> string(const json& obj, const std::string& path, const char* key,
                                      bool required) {
        if (!obj.contains(key)) {
            if (required) fail(path + key, "missing required field");
            return std::nullopt;
        }
        const auto& v = obj.at(key);
        if (!v.is_string()) {
            fail(path + key, "expected a string");
            return std::nullopt;
        }
        return v.get<std::string>();
    }

    std::optional<bool> boolean(const json& obj, const std::string& path, const char* key) {
        if (!obj.contains(key)) return std::nullopt;
        const auto& v = obj.at(key);
        if (!v.is_boolean()) {
            fail(path + key, "expected a boolean");
            return std::nullopt;
        }
        return v.get<bool>();
    }

    std::optional<std::vector<double>> number_list(const json& obj, const std::string& path,
                                                   const char* key, bool required) {
        if (!obj.contains(key)) {
            if (required) fail(path + key, "missing required field");
            return std::nullopt;
        }
        const auto& v = obj.at(key);
        if (!v.is_array()) {
            fail(path + key, "expected an array of numbers");
            return std::nullopt;
        }
        std::vector<double> out;
        out.reserve(v.size());
        for (const auto& e : v) {
            if (!e.is_number()) {
                fail(path + key, "expected an array of numbers");
                return std::nullopt;
            }
            out.push_back(e.get<double>());
        }
        return out;
    }

    // Interval encoded as [lo, hi] with null for an unbounded end.
    std::optional<Interval> interval(const json& v, const std::string& path) {
        if (!v.is_array() || v.size() != 2) {
            fail(path, "expected [lo, hi] (null for an unbounded end)");
            return std::nullopt;
        }
        Interval iv;
        if (v[0].is_null()) {
            iv.lo = -kInf;
        } else if (v[0].is_number()) {
            iv.lo = v[0].get<double>();
        } else {
            fail(path, "lower end must be a number or null");
            return std::nullopt;
        }
        if (v[1].is_null()) {
            iv.hi = kInf;
        } else if (v[1].is_number()) {
            iv.hi = v[1].get<double>();
        } else {
            fail(path, "upper end must be a number or null");
            return std::nullopt;
        }
        if (!(iv.lo <= iv.hi)) {
            fail(path, "lower end exceeds upper end");
            return std::nullopt;
        }
        return iv;
    }

    std::optional<Box> box(const json& obj, const std::string& path, const char* key,
                           bool required) {
        if (!obj.contains(key)) {
            if (required) fail(path + key, "missing required field");
            return std::nullopt;
        }
        const auto& v = obj.at(key);
        if (!v.is_array() || v.empty()) {
            fail(path + key, "expected a nonempty array of [lo, hi] intervals");
            return std::nullopt;
        }
        Box out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            auto iv = interval(v[i], path + key + "[" + std::to_string(i) + "]");
            if (!iv) return std::nullopt;
            out.push_back(*iv);
        }
        return out;
    }

private:
    std::vector<std::string>& errors_;
};

ModelConfig parse_model(Validator& val, const json& obj, const std::string& path) {
    ModelConfig cfg;
    val.check_keys(obj, path.substr(0, path.size() - 1), {"name", "sigma", "theta_bounds"});
    if (!obj.is_object()) return cfg;
    if (auto name = val.string(obj, path, "name", true)) {
        cfg.name = *name;
        if (cfg.name != "normal_location" && cfg.name != "normal_repeated" &&
            cfg.name != "pref_attach") {
            val.fail(path + "name", "unknown model '" + cfg.name + "'");
        }
    }
    if (auto sigma = val.number(obj, path, "sigma", false)) {
        cfg.sigma = *sigma;
        if (!(cfg.sigma > 0.0)) {
            val.fail(path + "sigma", "must be positive");
        }
        if (cfg.name != "normal_location") {
            val.fail(path + "sigma", "only meaningful for normal_location");
        }
    }
    if (auto bounds = val.box(obj, path, "theta_bounds", false)) {
        cfg.theta_bounds = *bounds;
    }
    return cfg;
}

PriorConfig parse_prior(Validator& val, const json& obj, const std::string& path) {
    PriorConfig cfg;
    val.check_keys(obj, path.substr(0, path.size() - 1), {"kind", "mean", "sd", "bounds"});
    if (!obj.is_object()) return cfg;
    if (auto kind = val.string(obj, path, "kind", true)) {
        cfg.kind = *kind;
        if (cfg.kind != "uniform" && cfg.kind != "gaussian" && cfg.kind != "truncated_gaussian") {
            val.fail(path + "kind", "unknown prior kind '" + cfg.kind + "'");
        }
    }
    if (auto mean = val.number_list(obj, path, "mean", cfg.kind != "uniform")) {
        cfg.mean = *mean;
    }
    if (auto sd = val.number_list(obj, path, "sd", cfg.kind != "uniform")) {
        cfg.sd = *sd;
        for (double s : cfg.sd) {
            if (!(s > 0.0)) {
                val.fail(path + "sd", "entries must be positive");
                break;
            }
        }
    }
    if (auto bounds = val.box(obj, path, "bounds", cfg.kind != "gaussian")) {
        cfg.bounds = *bounds;
    }
    if (cfg.kind == "gaussian" && !cfg.mean.empty() && cfg.mean.size() != cfg.sd.size()) {
        val.fail(path + "sd", "mean/sd lengths differ");
    }
    return cfg;
}

DiscrepancyConfig parse_discrepancy(Validator& val, const json& obj, const std::string& path) {
    DiscrepancyConfig cfg;
    val.check_keys(obj, path.substr(0, path.size() - 1),
                   {"kind", "p", "n_projections", "projection_seed"});
    if (!obj.is_object()) return cfg;
    if (auto kind = val.string(obj, path, "kind", true)) {
        cfg.kind = *kind;
        if (cfg.kind != "wasserstein" && cfg.kind != "sliced_wasserstein" && cfg.kind != "radon") {
            val.fail(path + "kind", "unknown discrepancy kind '" + cfg.kind + "'");
        }
    }
    if (auto p = val.number(obj, path, "p", false)) {
        cfg.p = *p;
        if (!(cfg.p >= 1.0)) val.fail(path + "p", "must be >= 1");
    }
    if (auto np = val.unsigned_int(obj, path, "n_projections", false)) {
        cfg.n_projections = static_cast<int>(*np);
        if (cfg.n_projections < 1) val.fail(path + "n_projections", "must be >= 1");
    }
    if (auto s = val.unsigned_int(obj, path, "projection_seed", false)) {
        cfg.projection_seed = *s;
    }
    return cfg;
}

DataConfig parse_data(Validator& val, const json& obj, const std::string& path,
                      const std::filesystem::path& base_dir) {
    DataConfig cfg;
    val.check_keys(obj, path.substr(0, path.size() - 1), {"inline", "csv", "simulate_from"});
    if (!obj.is_object()) return cfg;
    const int sources = static_cast<int>(obj.contains("inline")) +
                        static_cast<int>(obj.contains("csv")) +
                        static_cast<int>(obj.contains("simulate_from"));
    if (sources != 1) {
        val.fail(path.substr(0, path.size() - 1),
                 "exactly one of inline | csv | simulate_from is required");
        return cfg;
    }
    if (obj.contains("inline")) {
        cfg.source = DataConfig::Source::inline_values;
        if (auto vals = val.number_list(obj, path, "inline", true)) {
            cfg.inline_values = *vals;
            if (cfg.inline_values.empty()) {
                val.fail(path + "inline", "must be nonempty");
            }
        }
    } else if (obj.contains("csv")) {
        cfg.source = DataConfig::Source::csv;
        if (auto p = val.string(obj, path, "csv", true)) {
            std::filesystem::path fp = *p;
            if (fp.is_relative()) fp = base_dir / fp;
            cfg.csv_path = fp;
            if (!std::filesystem::exists(fp)) {
                val.fail(path + "csv", "file does not exist: " + fp.string());
            }
        }
    } else {
        cfg.source = DataConfig::Source::simulate;
        const auto& sim = obj.at("simulate_from");
        const std::string spath = path + "simulate_from.";
        val.check_keys(sim, path + "simulate_from", {"theta", "n", "seed", "model"});
        if (sim.is_object()) {
            if (auto theta = val.number_list(sim, spath, "theta", true)) {
                cfg.simulate.theta = *theta;
            }
            if (auto n = val.unsigned_int(sim, spath, "n", true)) {
                cfg.simulate.n = *n;
                if (cfg.simulate.n < 1) val.fail(spath + "n", "must be >= 1");
            }
            if (auto seed = val.unsigned_int(sim, spath, "seed", true)) {
                cfg.simulate.seed = *seed;
            }
            if (sim.contains("model")) {
                cfg.simulate.model = parse_model(val, sim.at("model"), spath + "model.");
            }
        }
    }
    return cfg;
}

TauSigmaConfig parse_tau_sigma(Validator& val, const json& obj, const std::string& path) {
    TauSigmaConfig cfg;
    val.check_keys(obj, path.substr(0, path.size() - 1),
                   {"theta_values", "theta_stride", "eps_values", "n_values", "mc_reps", "m_proxy",
                    "sigma_zero"});
    if (!obj.is_object()) return cfg;
    if (auto tv = val.number_list(obj, path, "theta_values", false)) {
        cfg.theta_values = *tv;
    }
    if (auto st = val.unsigned_int(obj, path, "theta_stride", false)) {
        cfg.theta_stride = *st;
        if (cfg.theta_stride < 1) val.fail(path + "theta_stride", "must be >= 1");
    }
    if (auto ev = val.number_list(obj, path, "eps_values", true)) {
        cfg.eps_values = *ev;
        for (double e : cfg.eps_values) {
            if (!(e > 0.0)) {
                val.fail(path + "eps_values", "entries must be positive");
                break;
            }
        }
    }
    if (obj.contains("n_values")) {
        if (auto nv = val.number_list(obj, path, "n_values", true)) {
            for (double n : *nv) {
                if (!(n >= 1.0) || n != std::floor(n)) {
                    val.fail(path + "n_values", "entries must be positive integers");
                    break;
                }
                cfg.n_values.push_back(static_cast<std::size_t>(n));
            }
            for (std::size_t i = 1; i < cfg.n_values.size(); ++i) {
                if (cfg.n_values[i] <= cfg.n_values[i - 1]) {
                    val.fail(path + "n_values", "must be strictly increasing");
                    break;
                }
            }
        }
    } else {
        val.fail(path + "n_values", "missing required field");
    }
    if (auto reps = val.unsigned_int(obj, path, "mc_reps", false)) {
        cfg.mc_reps = *reps;
    }
    if (cfg.mc_reps < 100) {
        val.fail(path + "mc_reps", "must be >= 100");
    }
    if (auto m = val.unsigned_int(obj, path, "m_proxy", false)) {
        cfg.m_proxy = *m;
    }
    if (auto sz = val.boolean(obj, path, "sigma_zero")) {
        cfg.sigma_zero = *sz;
    }
    return cfg;
}

BoundsConfig parse_bounds(Validator& val, const json& obj, const std::string& path) {
    BoundsConfig cfg;
    val.check_keys(obj, path.substr(0, path.size() - 1),
                   {"epsilon_offset", "zeta_values", "grid", "t_map_m", "tau_sigma", "modulus"});
    if (!obj.is_object()) return cfg;
    if (auto eps = val.number(obj, path, "epsilon_offset", true)) {
        cfg.epsilon_offset = *eps;
        if (!(cfg.epsilon_offset > 0.0)) val.fail(path + "epsilon_offset", "must be positive");
    }
    if (auto zetas = val.number_list(obj, path, "zeta_values", true)) {
        cfg.zeta_values = *zetas;
        if (cfg.zeta_values.empty()) val.fail(path + "zeta_values", "must be nonempty");
        for (double z : cfg.zeta_values) {
            if (!(z > 0.0 && z <= cfg.epsilon_offset)) {
                val.fail(path + "zeta_values", "entries must lie in ]0, epsilon_offset]");
                break;
            }
        }
    }
    if (obj.contains("grid")) {
        const auto& g = obj.at("grid");
        val.check_keys(g, path + "grid", {"lo", "hi", "step"});
        if (g.is_object()) {
            const std::string gpath = path + "grid.";
            if (auto lo = val.number(g, gpath, "lo", true)) cfg.grid.lo = *lo;
            if (auto hi = val.number(g, gpath, "hi", true)) cfg.grid.hi = *hi;
            if (auto step = val.number(g, gpath, "step", true)) cfg.grid.step = *step;
            if (!(cfg.grid.lo < cfg.grid.hi)) val.fail(gpath + "hi", "requires lo < hi");
            if (!(cfg.grid.step > 0.0)) val.fail(gpath + "step", "must be positive");
        }
    } else {
        val.fail(path + "grid", "missing required field");
    }
    if (auto m = val.unsigned_int(obj, path, "t_map_m", false)) {
        cfg.t_map_m = *m;
        if (cfg.t_map_m < 1) val.fail(path + "t_map_m", "must be >= 1");
    }
    if (obj.contains("tau_sigma")) {
        cfg.tau_sigma = parse_tau_sigma(val, obj.at("tau_sigma"), path + "tau_sigma.");
    } else {
        val.fail(path + "tau_sigma", "missing required field");
    }
    if (obj.contains("modulus")) {
        const auto& m = obj.at("modulus");
        val.check_keys(m, path + "modulus", {"scale", "exponent", "radius"});
        if (m.is_object()) {
            const std::string mpath = path + "modulus.";
            cfg.has_modulus = true;
            if (auto s = val.number(m, mpath, "scale", true)) cfg.modulus.scale = *s;
            if (auto e = val.number(m, mpath, "exponent", true)) cfg.modulus.exponent = *e;
            if (auto r = val.number(m, mpath, "radius", true)) cfg.modulus.radius = *r;
            if (!(cfg.modulus.scale > 0.0 && cfg.modulus.exponent > 0.0 &&
                  cfg.modulus.radius > 0.0)) {
                val.fail(path + "modulus", "scale, exponent and radius must be positive");
            }
        }
    }
    return cfg;
}

json interval_to_json(const Interval& iv) {
    json j = json::array();
    if (iv.lo == -kInf) {
        j.push_back(nullptr);
    } else {
        j.push_back(iv.lo);
    }
    if (iv.hi == kInf) {
        j.push_back(nullptr);
    } else {
        j.push_back(iv.hi);
    }
    return j;
}

json box_to_json(const Box& box) {
    json j = json::array();
    for (const auto& iv : box) j.push_back(interval_to_json(iv));
    return j;
}

json model_to_json(const ModelConfig& cfg) {
    json j{{"name", cfg.name}};
    if (cfg.name == "normal_location") j["sigma"] = cfg.sigma;
    if (!cfg.theta_bounds.empty()) j["theta_bounds"] = box_to_json(cfg.theta_bounds);
    return j;
}

json resolved_to_json(const RunConfig& cfg) {
    json j;
    j["experiment"] = cfg.experiment;
    j["seed"] = cfg.seed;
    j["threads"] = cfg.threads;
    j["output_dir"] = cfg.output_dir.string();
    if (cfg.epsilon0 != kInf) j["epsilon0"] = cfg.epsilon0;
    j["n_draws"] = cfg.n_draws;
    j["model"] = model_to_json(cfg.model);
    json prior{{"kind", cfg.prior.kind}};
    if (!cfg.prior.mean.empty()) prior["mean"] = cfg.prior.mean;
    if (!cfg.prior.sd.empty()) prior["sd"] = cfg.prior.sd;
    if (!cfg.prior.bounds.empty()) prior["bounds"] = box_to_json(cfg.prior.bounds);
    j["prior"] = prior;
    json disc{{"kind", cfg.discrepancy.kind}, {"p", cfg.discrepancy.p}};
    if (cfg.discrepancy.kind == "sliced_wasserstein") {
        disc["n_projections"] = cfg.discrepancy.n_projections;
        disc["projection_seed"] = cfg.discrepancy.projection_seed;
    }
    j["discrepancy"] = disc;
    json data;
    switch (cfg.data.source) {
        case DataConfig::Source::inline_values:
            data["inline"] = cfg.data.inline_values;
            break;
        case DataConfig::Source::csv:
            data["csv"] = cfg.data.csv_path.string();
            break;
        case DataConfig::Source::simulate:
            data["simulate_from"] = {{"theta", cfg.data.simulate.theta},
                                     {"n", cfg.data.simulate.n},
                                     {"seed", cfg.data.simulate.seed}};
            if (cfg.data.simulate.model) {
                data["simulate_from"]["model"] = model_to_json(*cfg.data.simulate.model);
            }
            break;
    }
    j["data"] = data;
    if (cfg.experiment == "abc") {
        if (cfg.epsilon_set) j["epsilon"] = cfg.epsilon;
        if (cfg.epsilon_quantile_set) j["epsilon_quantile"] = cfg.epsilon_quantile;
    } else if (cfg.experiment == "convergence") {
        j["epsilon_schedule"] = cfg.epsilon_schedule;
        json regions = json::array();
        for (const auto& r : cfg.regions) {
            regions.push_back({{"label", r.label}, {"box", box_to_json(r.box)}});
        }
        j["regions"] = regions;
    } else if (cfg.experiment == "bounds") {
        json b;
        b["epsilon_offset"] = cfg.bounds.epsilon_offset;
        b["zeta_values"] = cfg.bounds.zeta_values;
        b["grid"] = {{"lo", cfg.bounds.grid.lo},
                     {"hi", cfg.bounds.grid.hi},
                     {"step", cfg.bounds.grid.step}};
        b["t_map_m"] = cfg.bounds.t_map_m;
        json ts;
        if (!cfg.bounds.tau_sigma.theta_values.empty()) {
            ts["theta_values"] = cfg.bounds.tau_sigma.theta_values;
        } else {
            ts["theta_stride"] = cfg.bounds.tau_sigma.theta_stride;
        }
        ts["eps_values"] = cfg.bounds.tau_sigma.eps_values;
        ts["n_values"] = cfg.bounds.tau_sigma.n_values;
        ts["mc_reps"] = cfg.bounds.tau_sigma.mc_reps;
        if (cfg.bounds.tau_sigma.m_proxy > 0) ts["m_proxy"] = cfg.bounds.tau_sigma.m_proxy;
        ts["sigma_zero"] = cfg.bounds.tau_sigma.sigma_zero;
        b["tau_sigma"] = ts;
        if (cfg.bounds.has_modulus) {
            b["modulus"] = {{"scale", cfg.bounds.modulus.scale},
                            {"exponent", cfg.bounds.modulus.exponent},
                            {"radius", cfg.bounds.modulus.radius}};
        }
        j["bounds"] = b;
    }
    return j;
}

} // namespace

ValidationResult validate_config_text(const std::string& text,
                                      const std::filesystem::path& base_dir) {
    ValidationResult result;
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        result.errors.push_back(std::string("config: JSON parse error: ") + e.what());
        return result;
    }
    if (!root.is_object()) {
        result.errors.push_back("config: top level must be an object");
        return result;
    }

    Validator val(result.errors);
    val.check_keys(root, "",
                   {"experiment", "seed", "threads", "output_dir", "epsilon0", "n_draws", "model",
                    "prior", "discrepancy", "data", "epsilon", "epsilon_quantile",
                    "epsilon_schedule", "regions", "bounds"});

    auto cfg = std::make_shared<RunConfig>();

    if (auto exp = val.string(root, "", "experiment", true)) {
        cfg->experiment = *exp;
        if (cfg->experiment != "abc" && cfg->experiment != "convergence" &&
            cfg->experiment != "bounds") {
            val.fail("experiment", "must be one of abc | convergence | bounds");
        }
    }
    if (auto seed = val.unsigned_int(root, "", "seed", true)) {
        cfg->seed = *seed;
    }
    if (auto threads = val.unsigned_int(root, "", "threads", false)) {
        cfg->threads = static_cast<int>(*threads);
        if (cfg->threads < 1) val.fail("threads", "must be >= 1");
    }
    if (auto out = val.string(root, "", "output_dir", false)) {
        cfg->output_dir = *out;
    }
    if (auto eps0 = val.number(root, "", "epsilon0", false)) {
        cfg->epsilon0 = *eps0;
        if (!(cfg->epsilon0 > 0.0)) val.fail("epsilon0", "must be positive");
    }
    if (auto n = val.unsigned_int(root, "", "n_draws", true)) {
        cfg->n_draws = *n;
        if (cfg->n_draws < 1) val.fail("n_draws", "must be >= 1");
    }

    if (root.contains("model")) {
        cfg->model = parse_model(val, root.at("model"), "model.");
    } else {
        val.fail("model", "missing required field");
    }
    if (root.contains("prior")) {
        cfg->prior = parse_prior(val, root.at("prior"), "prior.");
    } else {
        val.fail("prior", "missing required field");
    }
    if (root.contains("discrepancy")) {
        cfg->discrepancy = parse_discrepancy(val, root.at("discrepancy"), "discrepancy.");
    } else {
        val.fail("discrepancy", "missing required field");
    }
    if (root.contains("data")) {
        cfg->data = parse_data(val, root.at("data"), "data.", base_dir);
    } else {
        val.fail("data", "missing required field");
    }

    if (cfg->experiment == "abc") {
        if (auto eps = val.number(root, "", "epsilon", false)) {
            cfg->epsilon = *eps;
            cfg->epsilon_set = true;
            if (!(cfg->epsilon > 0.0)) val.fail("epsilon", "must be positive");
        }
        if (auto q = val.number(root, "", "epsilon_quantile", false)) {
            cfg->epsilon_quantile = *q;
            cfg->epsilon_quantile_set = true;
            if (!(cfg->epsilon_quantile > 0.0 && cfg->epsilon_quantile <= 1.0)) {
                val.fail("epsilon_quantile", "must lie in ]0, 1]");
            }
        }
        if (cfg->epsilon_set == cfg->epsilon_quantile_set) {
            val.fail("epsilon", "abc experiments need exactly one of epsilon | epsilon_quantile");
        }
        if (root.contains("epsilon_schedule")) val.fail("epsilon_schedule", "not an abc field");
        if (root.contains("regions")) val.fail("regions", "not an abc field");
        if (root.contains("bounds")) val.fail("bounds", "not an abc field");
    } else if (cfg->experiment == "convergence") {
        if (auto schedule = val.number_list(root, "", "epsilon_schedule", true)) {
            cfg->epsilon_schedule = *schedule;
            if (cfg->epsilon_schedule.empty()) {
                val.fail("epsilon_schedule", "must be nonempty");
            }
            for (std::size_t i = 0; i < cfg->epsilon_schedule.size(); ++i) {
                if (!(cfg->epsilon_schedule[i] > 0.0)) {
                    val.fail("epsilon_schedule", "entries must be positive");
                    break;
                }
                if (i > 0 && !(cfg->epsilon_schedule[i] < cfg->epsilon_schedule[i - 1])) {
                    val.fail("epsilon_schedule", "schedule must be strictly decreasing");
                    break;
                }
            }
        }
        if (root.contains("regions")) {
            const auto& regions = root.at("regions");
            if (!regions.is_array() || regions.empty()) {
                val.fail("regions", "expected a nonempty array");
            } else {
                for (std::size_t i = 0; i < regions.size(); ++i) {
                    const std::string rpath = "regions[" + std::to_string(i) + "]";
                    const auto& r = regions[i];
                    val.check_keys(r, rpath, {"label", "box"});
                    if (!r.is_object()) continue;
                    Region region;
                    if (auto label = val.string(r, rpath + ".", "label", false)) {
                        region.label = *label;
                    } else {
                        region.label = "region_" + std::to_string(i);
                    }
                    if (auto b = val.box(r, rpath + ".", "box", true)) {
                        region.box = *b;
                    }
                    cfg->regions.push_back(std::move(region));
                }
            }
        } else {
            val.fail("regions", "missing required field");
        }
        if (root.contains("epsilon")) val.fail("epsilon", "not a convergence field");
        if (root.contains("epsilon_quantile")) {
            val.fail("epsilon_quantile", "not a convergence field");
        }
        if (root.contains("bounds")) val.fail("bounds", "not a convergence field");
    } else if (cfg->experiment == "bounds") {
        if (root.contains("bounds")) {
            cfg->bounds = parse_bounds(val, root.at("bounds"), "bounds.");
        } else {
            val.fail("bounds", "missing required field");
        }
        if (root.contains("epsilon")) val.fail("epsilon", "not a bounds field");
        if (root.contains("epsilon_quantile")) val.fail("epsilon_quantile", "not a bounds field");
        if (root.contains("epsilon_schedule")) {
            val.fail("epsilon_schedule", "not a bounds field");
        }
        if (root.contains("regions")) val.fail("regions", "not a bounds field");
    }

    if (!result.errors.empty()) {
        return result;
    }

    // Cross-checks that need the assembled pieces.
    try {
        make_model(cfg->model);
    } catch (const Error& e) {
        result.errors.push_back(std::string("model: ") + e.what());
    }
    try {
        make_prior(cfg->prior);
    } catch (const Error& e) {
        result.errors.push_back(std::string("prior: ") + e.what());
    }
    try {
        make_discrepancy(cfg->discrepancy);
    } catch (const Error& e) {
        result.errors.push_back(std::string("discrepancy: ") + e.what());
    }
    if (!result.errors.empty()) {
        return result;
    }

    cfg->resolved_json = resolved_to_json(*cfg).dump(2);
    result.config = std::move(cfg);
    return result;
}

ValidationResult validate_config_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        ValidationResult result;
        result.errors.push_back("config: cannot open " + path.string());
        return result;
    }
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return validate_config_text(text, path.has_parent_path() ? path.parent_path()
                                                             : std::filesystem::path("."));
}

std::unique_ptr<GenerativeModel> make_model(const ModelConfig& cfg) {
    if (cfg.name == "normal_location") {
        Box bounds = cfg.theta_bounds.empty() ? Box{Interval{}} : cfg.theta_bounds;
        return std::make_unique<NormalLocationModel>(cfg.sigma, std::move(bounds));
    }
    if (cfg.name == "normal_repeated") {
        Box bounds = cfg.theta_bounds.empty() ? Box{Interval{}} : cfg.theta_bounds;
        return std::make_unique<RepeatedNormalModel>(std::move(bounds));
    }
    if (cfg.name == "pref_attach") {
        Box bounds = cfg.theta_bounds.empty() ? Box{Interval{0.0, 3.0}} : cfg.theta_bounds;
        return std::make_unique<PrefAttachModel>(std::move(bounds));
    }
    throw InvalidInputError("make_model: unknown model '" + cfg.name + "'");
}

Prior make_prior(const PriorConfig& cfg) {
    if (cfg.kind == "uniform") {
        return Prior::uniform(cfg.bounds);
    }
    if (cfg.kind == "gaussian") {
        return Prior::gaussian(cfg.mean, cfg.sd);
    }
    if (cfg.kind == "truncated_gaussian") {
        return Prior::truncated_gaussian(cfg.mean, cfg.sd, cfg.bounds);
    }
    throw InvalidInputError("make_prior: unknown prior kind '" + cfg.kind + "'");
}

Discrepancy make_discrepancy(const DiscrepancyConfig& cfg) {
    Discrepancy d;
    if (cfg.kind == "wasserstein") {
        d.kind = Discrepancy::Kind::wasserstein;
    } else if (cfg.kind == "sliced_wasserstein") {
        d.kind = Discrepancy::Kind::sliced_wasserstein;
    } else if (cfg.kind == "radon") {
        d.kind = Discrepancy::Kind::radon;
    } else {
        throw InvalidInputError("make_discrepancy: unknown kind '" + cfg.kind + "'");
    }
    d.p = cfg.p;
    d.n_projections = cfg.n_projections;
    d.projection_seed = cfg.projection_seed;
    d.validate();
    return d;
}

DataSet resolve_data(const RunConfig& cfg) {
    switch (cfg.data.source) {
        case DataConfig::Source::inline_values: {
            DataSet d;
            d.dim = 1;
            d.values = cfg.data.inline_values;
            return d;
        }
        case DataConfig::Source::csv:
            return read_samples_csv(cfg.data.csv_path);
        case DataConfig::Source::simulate: {
            const ModelConfig& mc =
                cfg.data.simulate.model ? *cfg.data.simulate.model : cfg.model;
            const auto model = make_model(mc);
            RngStream rng(cfg.data.simulate.seed, 0);
            return model->simulate(cfg.data.simulate.theta, cfg.data.simulate.n, rng);
        }
    }
    throw Error("resolve_data: unknown source");
}

namespace {

json finite_or_string(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

json report_to_json(const LowerBoundReport& rep) {
    json j;
    j["epsilon"] = rep.epsilon;
    j["eps_star"] = rep.eps_star;
    j["theta_star"] = rep.theta_star;
    j["tau_hat"] = rep.tau_hat;
    j["sigma_hat"] = rep.sigma_hat;
    j["eps1_hat"] = finite_or_string(rep.eps1_hat);
    j["lambda_eps"] = finite_or_string(rep.lambda_eps);
    j["plain_factor"] = rep.plain_factor;
    j["sharpened_factor"] = finite_or_string(rep.sharpened_factor);
    j["argmin_tolerance"] = rep.argmin_tolerance;
    j["n_accepted"] = rep.n_accepted;
    j["hypothesis_unmet"] = rep.hypothesis_unmet;
    j["part_c_hypothesis_ok"] = rep.part_c_hypothesis_ok;
    if (rep.modulus_available) {
        j["modulus"] = {{"scale", rep.modulus.scale},
                        {"exponent", rep.modulus.exponent},
                        {"radius", rep.modulus.radius},
                        {"fitted", rep.modulus_fitted}};
    } else {
        j["modulus"] = nullptr;
    }
    json df;
    df["estimable"] = rep.density_factor_estimable;
    if (rep.density_factor_estimable) {
        df["factor"] = finite_or_string(rep.density_factor);
        df["log_min_density"] = rep.density_factor_log_min;
        df["log_mean_density"] = rep.density_factor_log_mean;
        df["heuristic"] = true;
    }
    j["density_factor"] = df;
    json lines = json::array();
    for (const auto& l : rep.lines) {
        json line;
        line["part"] = l.part;
        if (!std::isnan(l.zeta)) line["zeta"] = l.zeta;
        line["lhs"] = l.lhs;
        line["rhs"] = l.rhs;
        line["std_error"] = l.std_error;
        line["passes"] = l.passes;
        lines.push_back(line);
    }
    j["bounds"] = lines;
    j["notes"] = rep.notes;
    return j;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot open file for writing: " + path.string());
    }
    out << text;
}

json run_summary(const AbcRun& run) {
    json j;
    j["epsilon"] = finite_or_string(run.epsilon);
    j["n_draws"] = run.n_draws();
    j["n_accepted"] = run.n_accepted();
    j["acceptance_rate"] =
        static_cast<double>(run.n_accepted()) / static_cast<double>(run.n_draws());
    j["model"] = run.model_id;
    j["prior"] = run.prior_id;
    j["deviation"] = run.deviation_id;
    j["seed"] = run.seed;
    return j;
}

int run_abc(const RunConfig& cfg, const GenerativeModel& model, const Prior& prior,
            const DataSet& data, const DeviationMeasure& dev, json& meta) {
    AbcRun run;
    if (cfg.epsilon_quantile_set) {
        run = abc_rejection(model, prior, data, dev, kInf, cfg.n_draws, cfg.seed, cfg.threads,
                            cfg.epsilon0);
        const double eps = epsilon_from_quantile(run.discrepancies, cfg.epsilon_quantile);
        if (!epsilon_valid(eps, cfg.epsilon0)) {
            throw InvalidInputError("epsilon_from_quantile produced an invalid threshold " +
                                    format_g17(eps));
        }
        run = run.with_epsilon(eps);
        meta["epsilon_from_quantile"] = eps;
    } else {
        run = abc_rejection(model, prior, data, dev, cfg.epsilon, cfg.n_draws, cfg.seed,
                            cfg.threads, cfg.epsilon0);
    }
    meta["summary"] = run_summary(run);
    write_draws_csv(cfg.output_dir / "draws.csv", run);
    write_text(cfg.output_dir / "run.json", meta.dump(2) + "\n");
    if (run.zero_acceptance()) {
        return kExitZeroAcceptance;
    }
    return kExitOk;
}

int run_convergence(const RunConfig& cfg, const GenerativeModel& model, const Prior& prior,
                    const DataSet& data, const DeviationMeasure& dev, json& meta) {
    const auto res = convergence_experiment(model, prior, data, dev, cfg.epsilon_schedule,
                                            cfg.n_draws, cfg.regions, cfg.seed, cfg.threads,
                                            cfg.epsilon0);
    meta["summary"] = run_summary(res.run);
    meta["contract_violations"] = convergence_contract_violations(res.rows);
    write_draws_csv(cfg.output_dir / "draws.csv", res.run);
    write_convergence_csv(cfg.output_dir / "convergence.csv", res.rows);
    write_text(cfg.output_dir / "run.json", meta.dump(2) + "\n");
    if (res.run.zero_acceptance()) {
        return kExitZeroAcceptance;
    }
    return kExitOk;
}

int run_bounds(const RunConfig& cfg, const GenerativeModel& model, const Prior& prior,
               const DataSet& data, const DeviationMeasure& dev, json& meta) {
    const Discrepancy disc = make_discrepancy(cfg.discrepancy);
    SampleSpaceConfig space;
    space.dim = model.sample_dim();
    const auto data_proxy = EmpiricalMeasure::from_samples(data, space);

    auto est = estimate_T_map(model, disc, cfg.bounds.grid.points(), data_proxy, cfg.bounds.t_map_m,
                              derive_seed(cfg.seed, 0xE571));

    std::vector<double> theta_sample = cfg.bounds.tau_sigma.theta_values;
    if (theta_sample.empty()) {
        for (std::size_t i = 0; i < est.theta_grid.size(); i += cfg.bounds.tau_sigma.theta_stride) {
            theta_sample.push_back(est.theta_grid[i]);
        }
    }
    const auto ts = estimate_tau_sigma(model, disc, theta_sample, cfg.bounds.tau_sigma.eps_values,
                                       cfg.bounds.tau_sigma.n_values, cfg.bounds.tau_sigma.mc_reps,
                                       derive_seed(cfg.seed, 0x7A0516), cfg.bounds.tau_sigma.m_proxy);
    est.tau_hat = ts.tau_hat;
    est.tau_std_error = ts.tau_std_error;
    est.mc_reps = ts.mc_reps;
    est.n_values = ts.n_values;
    if (cfg.bounds.tau_sigma.sigma_zero) {
        est.sigma_hat = 0.0;
        est.sigma_std_error = 0.0;
        est.eps1_hat = kInf;
    } else {
        est.sigma_hat = ts.sigma_hat;
        est.sigma_std_error = ts.sigma_std_error;
        est.eps1_hat = ts.eps1_hat;
    }

    write_t_map_csv(cfg.output_dir / "t_map.csv", est);

    const double threshold = est.eps_star + cfg.bounds.epsilon_offset;
    const auto run = abc_rejection(model, prior, data, dev, threshold, cfg.n_draws, cfg.seed,
                                   cfg.threads, cfg.epsilon0);
    meta["summary"] = run_summary(run);
    meta["eps_star"] = est.eps_star;
    meta["theta_star"] = est.theta_star;
    write_draws_csv(cfg.output_dir / "draws.csv", run);
    if (run.zero_acceptance()) {
        write_text(cfg.output_dir / "run.json", meta.dump(2) + "\n");
        return kExitZeroAcceptance;
    }

    std::optional<ModulusSpec> modulus;
    if (cfg.bounds.has_modulus) modulus = cfg.bounds.modulus;
    const auto report = lower_bound_report(run, est, prior, cfg.bounds.epsilon_offset,
                                           cfg.bounds.zeta_values, modulus, &model, &data);

    json bounds_json = report_to_json(report);
    json trajectories = json::array();
    for (const auto& tr : ts.trajectories) {
        trajectories.push_back(
            {{"theta", tr.theta}, {"eps", tr.eps}, {"exceedance_by_n", tr.exceedance_by_n}});
    }
    bounds_json["tau_sigma"] = {{"tau_hat", ts.tau_hat},
                                {"sigma_hat", ts.sigma_hat},
                                {"eps1_hat", finite_or_string(ts.eps1_hat)},
                                {"sigma_clamped", ts.sigma_clamped},
                                {"sigma_zero_forced", cfg.bounds.tau_sigma.sigma_zero},
                                {"n_values", ts.n_values},
                                {"mc_reps", ts.mc_reps},
                                {"trajectories", trajectories}};
    write_text(cfg.output_dir / "bounds.json", bounds_json.dump(2) + "\n");
    write_bound_lines_csv(cfg.output_dir / "bounds_lines.csv", report);
    meta["bounds_pass"] = json::array();
    for (const auto& l : report.lines) {
        if (!l.passes) meta["bounds_pass"].push_back(l.part);
    }
    write_text(cfg.output_dir / "run.json", meta.dump(2) + "\n");
    return kExitOk;
}

} // namespace

int run_experiment(const RunConfig& cfg) {
    std::filesystem::create_directories(cfg.output_dir);

    const auto model = make_model(cfg.model);
    const Prior prior = make_prior(cfg.prior);
    const Discrepancy disc = make_discrepancy(cfg.discrepancy);
    const DeviationMeasure dev = deviation_from_discrepancy(disc);
    const DataSet data = resolve_data(cfg);

    json meta;
    meta["experiment"] = cfg.experiment;
    meta["seed"] = cfg.seed;
    meta["threads"] = cfg.threads;
    meta["config"] = json::parse(cfg.resolved_json.empty() ? resolved_to_json(cfg).dump()
                                                           : cfg.resolved_json);
    meta["data_n"] = data.count();

    if (cfg.experiment == "abc") {
        return run_abc(cfg, *model, prior, data, dev, meta);
    }
    if (cfg.experiment == "convergence") {
        return run_convergence(cfg, *model, prior, data, dev, meta);
    }
    if (cfg.experiment == "bounds") {
        return run_bounds(cfg, *model, prior, data, dev, meta);
    }
    throw InvalidInputError("run_experiment: unknown experiment '" + cfg.experiment + "'");
}

} // namespace otabc
