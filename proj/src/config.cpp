#include "weakctl/config.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace weakctl::config {

using nlohmann::json;

namespace {

std::string serialize_poly(const std::vector<double>& p) {
    std::ostringstream out;
    out << '[';
    for (std::size_t i = 0; i < p.size(); ++i) out << (i ? "," : "") << p[i];
    out << ']';
    return out.str();
}

TransferFunction tf_from_json(const json& j, const std::string& name) {
    if (!j.is_object() || !j.contains("num") || !j.contains("den"))
        throw ConfigError(name + ": expected an object with num and den arrays");
    try {
        return TransferFunction(j.at("num").get<std::vector<double>>(),
                                j.at("den").get<std::vector<double>>());
    } catch (const Error& e) {
        throw ConfigError(name + ": " + e.what());
    }
}

json tf_to_json(const TransferFunction& tf) {
    return json{{"num", tf.num}, {"den", tf.den}};
}

void validate(const RunConfig& cfg) {
    if (cfg.consumers.empty()) throw ConfigError("consumers: must be >= 1");
    for (std::size_t i = 0; i < cfg.consumers.size(); ++i) {
        const auto& c = cfg.consumers[i];
        const std::string at = "consumers[" + std::to_string(i) + "]";
        if (c.a <= 0.0) throw ConfigError(at + ".a: must be positive");
        if (c.m < 0.0) throw ConfigError(at + ".m: must be nonnegative");
        if (c.floor > 0.2 * c.m) throw ConfigError(at + ".floor: exceeds the cap 0.2*m");
    }
    if (cfg.step <= 0.0) throw ConfigError("step: must be positive");
    if (cfg.horizon < cfg.step) throw ConfigError("horizon: must cover at least one step");
    if (!cfg.filter_f.is_stable())
        throw ConfigError("filter_f: unstable denominator " + serialize_poly(cfg.filter_f.den));
    if (std::abs(lti::dc_gain(cfg.filter_f) - 1.0) > 1e-9)
        throw ConfigError("filter_f: DC gain must be 1");
    if (!cfg.filter_fd.is_stable())
        throw ConfigError("filter_fd: unstable denominator " + serialize_poly(cfg.filter_fd.den));

    const auto& p = cfg.plants;
    if (p.preset != "unity" && p.preset != "first_order" && p.preset != "explicit")
        throw ConfigError("plants.preset: unknown preset '" + p.preset + "'");
    if (p.preset == "first_order") {
        if (p.tau.empty()) throw ConfigError("plants.tau: required for the first_order preset");
        for (double t : p.tau)
            if (t <= 0.0) throw ConfigError("plants.tau: time constants must be positive");
    }
    if (p.preset == "explicit" && p.tfs.size() != cfg.consumers.size())
        throw ConfigError("plants.tfs: need one transfer function per consumer");

    const auto& g = cfg.gamma;
    if (g.mode != "zero" && g.mode != "unbounded" && g.mode != "design" && g.mode != "explicit")
        throw ConfigError("gamma.mode: unknown mode '" + g.mode + "'");
    if (g.mode == "design") {
        if (g.epsilon <= 0.0) throw ConfigError("gamma.epsilon: must be positive");
        if (g.d_l2 <= 0.0) throw ConfigError("gamma.d_l2: must be positive");
    }
    if (g.mode == "explicit") {
        if (g.values.size() != cfg.consumers.size())
            throw ConfigError("gamma.values: need one value per consumer");
        for (double v : g.values)
            if (v < 0.0) throw ConfigError("gamma.values: must be nonnegative");
    }

    const auto& d = cfg.disturbance;
    if (d.mode != "filtered_gaussian" && d.mode != "step_hold" && d.mode != "none")
        throw ConfigError("disturbance.mode: unknown mode '" + d.mode + "'");
    if (d.variance < 0.0) throw ConfigError("disturbance.variance: must be nonnegative");
    if (d.sample_interval <= 0.0)
        throw ConfigError("disturbance.sample_interval: must be positive");

    if (cfg.models.size() != cfg.consumers.size())
        throw ConfigError("models: need one internal model per consumer");
    for (double t0 = -1.0; const auto& seg : cfg.reference) {
        if (seg.start < t0)
            throw ConfigError("reference: segment start times must be nondecreasing");
        t0 = seg.start;
    }
}

} // namespace

RunConfig parse(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config: top level must be an object");

    RunConfig cfg;
    try {
        for (const auto& c : j.at("consumers")) {
            ConsumerEntry entry;
            entry.a = c.value("a", 1.0);
            entry.b = c.value("b", 0.0);
            entry.m = c.value("m", 100.0);
            entry.floor = c.value("floor", 0.0);
            cfg.consumers.push_back(entry);
        }
        if (j.contains("plants")) {
            const auto& p = j.at("plants");
            if (p.is_string()) {
                cfg.plants.preset = p.get<std::string>();
            } else {
                cfg.plants.preset = p.value("preset", std::string("unity"));
                if (p.contains("tau")) cfg.plants.tau = p.at("tau").get<std::vector<double>>();
                if (p.contains("tfs")) {
                    cfg.plants.preset = "explicit";
                    for (const auto& t : p.at("tfs"))
                        cfg.plants.tfs.push_back(tf_from_json(t, "plants.tfs"));
                }
            }
        }
        if (j.contains("models"))
            for (const auto& t : j.at("models"))
                cfg.models.push_back(tf_from_json(t, "models"));
        else
            cfg.models.assign(cfg.consumers.size(), TransferFunction::unity());
        if (j.contains("filter_f")) cfg.filter_f = tf_from_json(j.at("filter_f"), "filter_f");
        if (j.contains("filter_fd")) cfg.filter_fd = tf_from_json(j.at("filter_fd"), "filter_fd");
        if (j.contains("gamma")) {
            const auto& g = j.at("gamma");
            if (g.is_string()) {
                cfg.gamma.mode = g.get<std::string>();
            } else if (g.contains("design")) {
                cfg.gamma.mode = "design";
                const auto& d = g.at("design");
                cfg.gamma.epsilon = d.value("epsilon", 2.0);
                cfg.gamma.d_l2 = d.value("d_l2", 10.0);
                if (d.contains("weights"))
                    cfg.gamma.weights = d.at("weights").get<std::vector<double>>();
            } else if (g.contains("explicit")) {
                cfg.gamma.mode = "explicit";
                cfg.gamma.values = g.at("explicit").get<std::vector<double>>();
            } else {
                throw ConfigError("gamma: expected a mode string, design block, or explicit list");
            }
        }
        for (const auto& seg : j.value("reference", json::array()))
            cfg.reference.push_back({seg.value("start", 0.0), seg.value("value", 0.0)});
        if (j.contains("disturbance")) {
            const auto& d = j.at("disturbance");
            cfg.disturbance.mode = d.value("mode", std::string("filtered_gaussian"));
            cfg.disturbance.seed = d.value("seed", std::uint64_t{0});
            cfg.disturbance.variance = d.value("variance", 10.0);
            cfg.disturbance.level = d.value("level", 0.0);
            cfg.disturbance.sample_interval = d.value("sample_interval", 1.0);
        }
        cfg.horizon = j.value("horizon", 60.0);
        cfg.step = j.value("step", 0.01);
        cfg.output_dir = j.value("output_dir", std::string("out"));
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }

    validate(cfg);
    return cfg;
}

RunConfig load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("config: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

std::string serialize(const RunConfig& cfg) {
    json j;
    for (const auto& c : cfg.consumers)
        j["consumers"].push_back({{"a", c.a}, {"b", c.b}, {"m", c.m}, {"floor", c.floor}});
    json plants{{"preset", cfg.plants.preset}};
    if (!cfg.plants.tau.empty()) plants["tau"] = cfg.plants.tau;
    if (!cfg.plants.tfs.empty()) {
        plants["tfs"] = json::array();
        for (const auto& t : cfg.plants.tfs) plants["tfs"].push_back(tf_to_json(t));
    }
    j["plants"] = plants;
    j["models"] = json::array();
    for (const auto& t : cfg.models) j["models"].push_back(tf_to_json(t));
    j["filter_f"] = tf_to_json(cfg.filter_f);
    j["filter_fd"] = tf_to_json(cfg.filter_fd);
    if (cfg.gamma.mode == "design") {
        json d{{"epsilon", cfg.gamma.epsilon}, {"d_l2", cfg.gamma.d_l2}};
        if (cfg.gamma.weights) d["weights"] = *cfg.gamma.weights;
        j["gamma"] = json{{"design", d}};
    } else if (cfg.gamma.mode == "explicit") {
        j["gamma"] = json{{"explicit", cfg.gamma.values}};
    } else {
        j["gamma"] = cfg.gamma.mode;
    }
    j["reference"] = json::array();
    for (const auto& seg : cfg.reference)
        j["reference"].push_back({{"start", seg.start}, {"value", seg.value}});
    j["disturbance"] = {{"mode", cfg.disturbance.mode},
                        {"seed", cfg.disturbance.seed},
                        {"variance", cfg.disturbance.variance},
                        {"level", cfg.disturbance.level},
                        {"sample_interval", cfg.disturbance.sample_interval}};
    j["horizon"] = cfg.horizon;
    j["step"] = cfg.step;
    j["output_dir"] = cfg.output_dir;
    return j.dump(2);
}

std::vector<scenario::ConsumerSpec> build_specs(const RunConfig& cfg) {
    std::vector<scenario::ConsumerSpec> specs;
    specs.reserve(cfg.consumers.size());
    for (const auto& c : cfg.consumers)
        specs.push_back({c.a, c.b, 0.2 * c.m, c.floor});
    return specs;
}

std::vector<TransferFunction> build_plants(const RunConfig& cfg) {
    const std::size_t n = cfg.consumers.size();
    std::vector<TransferFunction> plants;
    if (cfg.plants.preset == "unity") {
        plants.assign(n, TransferFunction::unity());
    } else if (cfg.plants.preset == "first_order") {
        for (std::size_t i = 0; i < n; ++i)
            plants.push_back(TransferFunction::first_order_lag(
                cfg.plants.tau[i % cfg.plants.tau.size()]));
    } else {
        plants = cfg.plants.tfs;
    }
    return plants;
}

std::vector<TransferFunction> build_models(const RunConfig& cfg) { return cfg.models; }

SignalTrace build_reference(const RunConfig& cfg) {
    SignalTrace trace;
    trace.step = cfg.step;
    const std::size_t steps = horizon_steps(cfg);
    trace.samples.resize(steps, 0.0);
    for (std::size_t k = 0; k < steps; ++k) {
        const double t = static_cast<double>(k) * cfg.step;
        double value = 0.0;
        for (const auto& seg : cfg.reference)
            if (t >= seg.start) value = seg.value;
        trace.samples[k] = value;
    }
    return trace;
}

scenario::DisturbanceGen build_disturbance(const RunConfig& cfg) {
    scenario::DisturbanceGen gen;
    gen.seed = cfg.disturbance.seed;
    gen.variance = cfg.disturbance.variance;
    gen.filter = cfg.filter_fd;
    gen.sample_interval = cfg.disturbance.sample_interval;
    gen.level = cfg.disturbance.level;
    if (cfg.disturbance.mode == "filtered_gaussian") {
        gen.mode = scenario::DisturbanceMode::FilteredGaussian;
    } else {
        gen.mode = scenario::DisturbanceMode::StepHold;
        if (cfg.disturbance.mode == "none") gen.level = 0.0;
    }
    return gen;
}

std::size_t horizon_steps(const RunConfig& cfg) {
    return static_cast<std::size_t>(std::llround(cfg.horizon / cfg.step));
}

imc::GammaBounds build_gamma(const RunConfig& cfg, const TransferFunction& q) {
    const std::size_t n = cfg.consumers.size();
    if (cfg.gamma.mode == "zero") return imc::GammaBounds::zero(n);
    if (cfg.gamma.mode == "unbounded") return imc::GammaBounds::unbounded(n);
    if (cfg.gamma.mode == "explicit") return imc::GammaBounds::symmetric(cfg.gamma.values);
    std::vector<double> weights =
        cfg.gamma.weights.value_or(std::vector<double>(n, 1.0 / static_cast<double>(n)));
    return imc::design_gamma(build_plants(cfg), q, cfg.gamma.d_l2, cfg.gamma.epsilon, weights);
}

} // namespace weakctl::config
