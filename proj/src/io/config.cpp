#include "levyhedge/io/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "levyhedge/errors.hpp"

namespace levyhedge::io {

using nlohmann::json;

namespace {

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

const json& object_at(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
    for (const auto& item : j.items()) {
        const bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* k) { return item.key() == k; });
        if (!known) throw ConfigError(join(path, item.key()), "unknown key");
    }
    return j;
}

double number(const json& j, const std::string& path) {
    if (!j.is_number()) throw ConfigError(path, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ConfigError(path, "must be finite");
    return v;
}

std::uint64_t count(const json& j, const std::string& path) {
    if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<std::int64_t>() < 0))
        throw ConfigError(path, "expected a non-negative integer");
    return j.get<std::uint64_t>();
}

int small_count(const json& j, const std::string& path) {
    const auto v = count(j, path);
    if (v > 1000000) throw ConfigError(path, "too large");
    return static_cast<int>(v);
}

std::string text(const json& j, const std::string& path) {
    if (!j.is_string()) throw ConfigError(path, "expected a string");
    return j.get<std::string>();
}

bool flag(const json& j, const std::string& path) {
    if (!j.is_boolean()) throw ConfigError(path, "expected true or false");
    return j.get<bool>();
}

std::vector<double> numbers(const json& j, const std::string& path) {
    if (!j.is_array()) throw ConfigError(path, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

std::vector<std::string> strings(const json& j, const std::string& path) {
    if (!j.is_array()) throw ConfigError(path, "expected an array of strings");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(text(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

template <class T, class Read>
void read(const json& block, const std::string& path, const char* key, T& out, Read reader) {
    if (block.contains(key)) out = reader(block.at(key), join(path, key));
}

void require(bool ok, const std::string& path, const std::string& message) {
    if (!ok) throw ConfigError(path, message);
}

JumpLawConfig parse_jump_law(const json& j, const std::string& path) {
    object_at(j, path, {"kind", "rate", "samples", "lower", "upper"});
    JumpLawConfig c;
    read(j, path, "kind", c.kind, text);
    if (c.kind == "exponential") {
        require(!j.contains("samples") && !j.contains("lower") && !j.contains("upper"), path,
                "exponential law takes only 'rate'");
        read(j, path, "rate", c.rate, number);
        require(c.rate > 0.0, join(path, "rate"), "must be > 0");
    } else if (c.kind == "empirical") {
        require(!j.contains("rate") && !j.contains("lower") && !j.contains("upper"), path,
                "empirical law takes only 'samples'");
        require(j.contains("samples"), join(path, "samples"), "required for an empirical law");
        read(j, path, "samples", c.samples, numbers);
        require(!c.samples.empty(), join(path, "samples"), "must not be empty");
    } else if (c.kind == "uniform") {
        require(!j.contains("rate") && !j.contains("samples"), path, "uniform law takes only 'lower' and 'upper'");
        read(j, path, "lower", c.lower, number);
        read(j, path, "upper", c.upper, number);
        require(c.upper > c.lower, path, "need lower < upper");
    } else {
        throw ConfigError(join(path, "kind"), "unknown jump law '" + c.kind + "'");
    }
    return c;
}

}  // namespace

bool RunConfig::wants(const std::string& format) const {
    return std::find(output.formats.begin(), output.formats.end(), format) != output.formats.end();
}

LevyModel build_model(const ModelConfig& c) {
    JumpLaw law;
    if (c.jump_law.kind == "exponential") {
        law = ExponentialNegative{c.jump_law.rate};
    } else if (c.jump_law.kind == "empirical") {
        law = EmpiricalJumps{c.jump_law.samples};
    } else {
        const double lo = c.jump_law.lower;
        const double hi = c.jump_law.upper;
        law = UserDensity{[lo, hi](double y) { return (y >= lo && y <= hi) ? 1.0 / (hi - lo) : 0.0; }, lo, hi};
    }
    return LevyModel(c.u, c.mu, c.lambda, std::move(law));
}

Payoff build_payoff(const PayoffConfig& c, const LevyModel& model) {
    if (c.kind == "constant") return Payoff::constant(c.c);
    if (c.kind == "linear") return Payoff::linear(c.c, c.a);
    if (c.kind == "exp_shift") return Payoff::exp_shift(c.c, c.a, c.b);
    if (c.kind == "ruin_identity") return Payoff::ruin_identity(model);
    throw ConfigError("payoff.kind", "unknown payoff '" + c.kind + "'");
}

RunConfig parse_config(const json& doc) {
    object_at(doc, "", {"model", "horizon", "payoff", "grid", "mc", "hedge", "quad", "identity", "riskfree",
                        "surface_file", "output"});
    RunConfig c;

    require(doc.contains("model"), "model", "required");
    {
        const auto& m = object_at(doc.at("model"), "model", {"u", "mu", "lambda", "jump_law"});
        read(m, "model", "u", c.model.u, number);
        read(m, "model", "mu", c.model.mu, number);
        read(m, "model", "lambda", c.model.lambda, number);
        require(c.model.u > 0.0, "model.u", "must be > 0");
        require(c.model.mu > 0.0, "model.mu", "must be > 0");
        require(c.model.lambda >= 0.0, "model.lambda", "must be >= 0");
        if (m.contains("jump_law")) c.model.jump_law = parse_jump_law(m.at("jump_law"), "model.jump_law");
    }

    read(doc, "", "horizon", c.horizon, number);
    require(c.horizon > 0.0, "horizon", "must be > 0");

    if (doc.contains("payoff")) {
        const auto& p = object_at(doc.at("payoff"), "payoff", {"kind", "c", "a", "b"});
        read(p, "payoff", "kind", c.payoff.kind, text);
        read(p, "payoff", "c", c.payoff.c, number);
        read(p, "payoff", "a", c.payoff.a, number);
        read(p, "payoff", "b", c.payoff.b, number);
        const auto& k = c.payoff.kind;
        require(k == "constant" || k == "linear" || k == "exp_shift" || k == "ruin_identity", "payoff.kind",
                "unknown payoff '" + k + "'");
    }

    if (doc.contains("grid")) {
        const auto& g = object_at(doc.at("grid"), "grid", {"t_nodes", "x_nodes", "x_max"});
        read(g, "grid", "t_nodes", c.grid.t_nodes, small_count);
        read(g, "grid", "x_nodes", c.grid.x_nodes, small_count);
        if (g.contains("x_max")) c.grid.x_max = number(g.at("x_max"), "grid.x_max");
        require(c.grid.t_nodes >= 2, "grid.t_nodes", "must be >= 2");
        require(c.grid.x_nodes >= 2, "grid.x_nodes", "must be >= 2");
        require(!c.grid.x_max || *c.grid.x_max > 0.0, "grid.x_max", "must be > 0");
    }

    if (doc.contains("mc")) {
        const auto& m = object_at(doc.at("mc"), "mc",
                                  {"n_paths", "base_seed", "surface_paths", "nonmartingale_ack", "compensator_times",
                                   "dump_paths"});
        read(m, "mc", "n_paths", c.mc.n_paths, count);
        read(m, "mc", "base_seed", c.mc.base_seed, count);
        read(m, "mc", "surface_paths", c.mc.surface_paths, count);
        read(m, "mc", "nonmartingale_ack", c.mc.nonmartingale_ack, flag);
        read(m, "mc", "compensator_times", c.mc.compensator_times, numbers);
        read(m, "mc", "dump_paths", c.mc.dump_paths, count);
        require(c.mc.n_paths >= 2, "mc.n_paths", "must be >= 2");
        require(c.mc.surface_paths >= 2, "mc.surface_paths", "must be >= 2");
        for (double t : c.mc.compensator_times)
            require(t > 0.0 && t <= c.horizon, "mc.compensator_times", "times must lie in (0, horizon]");
    }

    if (doc.contains("hedge")) {
        const auto& h = object_at(doc.at("hedge"), "hedge", {"n_trading_dates", "n_paths", "dump_paths", "theta"});
        read(h, "hedge", "n_trading_dates", c.hedge.n_trading_dates, small_count);
        read(h, "hedge", "n_paths", c.hedge.n_paths, count);
        read(h, "hedge", "dump_paths", c.hedge.dump_paths, count);
        read(h, "hedge", "theta", c.hedge.theta, text);
        require(c.hedge.n_trading_dates >= 1, "hedge.n_trading_dates", "must be >= 1");
        require(c.hedge.n_paths >= 2, "hedge.n_paths", "must be >= 2");
        require(c.hedge.theta == "automatic" || c.hedge.theta == "general" || c.hedge.theta == "exponential",
                "hedge.theta", "must be automatic, general or exponential");
    }

    if (doc.contains("quad")) {
        const auto& q = object_at(doc.at("quad"), "quad",
                                  {"abs_tol", "rel_tol", "tail_cut", "panels", "max_subdivisions", "method"});
        read(q, "quad", "abs_tol", c.quad.abs_tol, number);
        read(q, "quad", "rel_tol", c.quad.rel_tol, number);
        read(q, "quad", "tail_cut", c.quad.tail_cut, number);
        read(q, "quad", "panels", c.quad.panels, small_count);
        read(q, "quad", "max_subdivisions", c.quad.max_subdivisions, small_count);
        if (q.contains("method")) {
            const auto m = text(q.at("method"), "quad.method");
            require(m == "automatic" || m == "adaptive", "quad.method", "must be automatic or adaptive");
            c.quad.method = m == "automatic" ? QuadMethod::automatic : QuadMethod::adaptive;
        }
        try {
            c.quad.validate();
        } catch (const ModelError& e) {
            throw ConfigError("quad", e.what());
        }
    }

    if (doc.contains("identity")) {
        const auto& i = object_at(doc.at("identity"), "identity", {"times", "n_paths"});
        read(i, "identity", "times", c.identity.times, numbers);
        read(i, "identity", "n_paths", c.identity.n_paths, count);
        for (double t : c.identity.times) require(t > 0.0, "identity.times", "times must be > 0");
        require(c.identity.n_paths >= 2, "identity.n_paths", "must be >= 2");
    }

    if (doc.contains("riskfree")) {
        const auto& r = object_at(doc.at("riskfree"), "riskfree", {"tolerance", "t_nodes", "x_nodes"});
        read(r, "riskfree", "tolerance", c.riskfree.tolerance, number);
        read(r, "riskfree", "t_nodes", c.riskfree.t_nodes, small_count);
        read(r, "riskfree", "x_nodes", c.riskfree.x_nodes, small_count);
        require(c.riskfree.tolerance > 0.0, "riskfree.tolerance", "must be > 0");
        require(c.riskfree.t_nodes >= 1, "riskfree.t_nodes", "must be >= 1");
        require(c.riskfree.x_nodes >= 1, "riskfree.x_nodes", "must be >= 1");
    }

    if (doc.contains("surface_file") && !doc.at("surface_file").is_null())
        c.surface_file = text(doc.at("surface_file"), "surface_file");

    if (doc.contains("output")) {
        const auto& o = object_at(doc.at("output"), "output", {"directory", "formats"});
        read(o, "output", "directory", c.output.directory, text);
        read(o, "output", "formats", c.output.formats, strings);
        for (const auto& f : c.output.formats)
            require(f == "csv" || f == "json", "output.formats", "unknown format '" + f + "'");
        require(!c.output.directory.empty(), "output.directory", "must not be empty");
    }

    try {
        const auto model = build_model(c.model);
        build_payoff(c.payoff, model);
    } catch (const ModelError& e) {
        throw ConfigError("model", e.what());
    }
    return c;
}

RunConfig parse_config_text(const std::string& text_doc) {
    json doc;
    try {
        doc = json::parse(text_doc);
    } catch (const json::parse_error& e) {
        throw ConfigError("<document>", std::string("invalid JSON: ") + e.what());
    }
    return parse_config(doc);
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("--config", "cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str());
}

void apply_environment(RunConfig& config) {
    const char* raw = std::getenv("LEVYHEDGE_SEED");
    if (!raw || !*raw) return;
    const std::string s(raw);
    std::uint64_t seed = 0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), seed);
    if (ec != std::errc{} || end != s.data() + s.size())
        throw ConfigError("LEVYHEDGE_SEED", "expected an unsigned 64-bit integer");
    config.mc.base_seed = seed;
}

json to_json(const RunConfig& c) {
    json law = {{"kind", c.model.jump_law.kind}};
    if (c.model.jump_law.kind == "exponential") law["rate"] = c.model.jump_law.rate;
    if (c.model.jump_law.kind == "empirical") law["samples"] = c.model.jump_law.samples;
    if (c.model.jump_law.kind == "uniform") {
        law["lower"] = c.model.jump_law.lower;
        law["upper"] = c.model.jump_law.upper;
    }
    json doc = {
        {"model", {{"u", c.model.u}, {"mu", c.model.mu}, {"lambda", c.model.lambda}, {"jump_law", law}}},
        {"horizon", c.horizon},
        {"payoff", {{"kind", c.payoff.kind}, {"c", c.payoff.c}, {"a", c.payoff.a}, {"b", c.payoff.b}}},
        {"grid", {{"t_nodes", c.grid.t_nodes}, {"x_nodes", c.grid.x_nodes}}},
        {"mc",
         {{"n_paths", c.mc.n_paths},
          {"base_seed", c.mc.base_seed},
          {"surface_paths", c.mc.surface_paths},
          {"nonmartingale_ack", c.mc.nonmartingale_ack},
          {"compensator_times", c.mc.compensator_times},
          {"dump_paths", c.mc.dump_paths}}},
        {"hedge",
         {{"n_trading_dates", c.hedge.n_trading_dates},
          {"n_paths", c.hedge.n_paths},
          {"dump_paths", c.hedge.dump_paths},
          {"theta", c.hedge.theta}}},
        {"quad",
         {{"abs_tol", c.quad.abs_tol},
          {"rel_tol", c.quad.rel_tol},
          {"tail_cut", c.quad.tail_cut},
          {"panels", c.quad.panels},
          {"max_subdivisions", c.quad.max_subdivisions},
          {"method", c.quad.method == QuadMethod::automatic ? "automatic" : "adaptive"}}},
        {"identity", {{"times", c.identity.times}, {"n_paths", c.identity.n_paths}}},
        {"riskfree",
         {{"tolerance", c.riskfree.tolerance}, {"t_nodes", c.riskfree.t_nodes}, {"x_nodes", c.riskfree.x_nodes}}},
        {"output", {{"directory", c.output.directory}, {"formats", c.output.formats}}},
    };
    if (c.grid.x_max) doc["grid"]["x_max"] = *c.grid.x_max;
    if (c.surface_file) doc["surface_file"] = *c.surface_file;
    return doc;
}

std::string config_hash(const RunConfig& config) {
    const std::string canonical = to_json(config).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : canonical) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace levyhedge::io
