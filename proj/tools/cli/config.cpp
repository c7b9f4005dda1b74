#include "config.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "chaosmm/error.hpp"

namespace chaosmm::cli {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& what) { throw ConfigError(field + ": " + what); }

// Typed access to one JSON object; remembers which keys were read so that
// unknown keys can be rejected.
class Block {
public:
    Block(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) fail(path_, "must be a JSON object");
    }

    [[nodiscard]] std::string field(std::string_view key) const { return path_ + "." + std::string(key); }

    bool has(const std::string& key) {
        used_.insert(key);
        return j_.contains(key);
    }

    double number(const std::string& key, std::optional<double> fallback = std::nullopt) {
        if (!has(key)) {
            if (!fallback) fail(field(key), "required");
            return *fallback;
        }
        const json& v = j_.at(key);
        if (!v.is_number()) fail(field(key), "must be a number");
        const double d = v.get<double>();
        if (!std::isfinite(d)) fail(field(key), "must be finite");
        return d;
    }

    std::size_t count(const std::string& key, std::optional<std::size_t> fallback = std::nullopt) {
        if (!has(key)) {
            if (!fallback) fail(field(key), "required");
            return *fallback;
        }
        const json& v = j_.at(key);
        if (!v.is_number_integer() || v.get<long long>() < 0) fail(field(key), "must be a non-negative integer");
        return v.get<std::size_t>();
    }

    std::uint64_t seed(const std::string& key, std::uint64_t fallback) {
        if (!has(key)) return fallback;
        const json& v = j_.at(key);
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
            fail(field(key), "must be a non-negative integer");
        }
        return v.get<std::uint64_t>();
    }

    std::string text(const std::string& key, std::optional<std::string> fallback = std::nullopt) {
        if (!has(key)) {
            if (!fallback) fail(field(key), "required");
            return *fallback;
        }
        const json& v = j_.at(key);
        if (!v.is_string()) fail(field(key), "must be a string");
        return v.get<std::string>();
    }

    std::vector<double> numbers(const std::string& key) {
        std::vector<double> out;
        if (!has(key)) return out;
        const json& v = j_.at(key);
        if (!v.is_array() || v.empty()) fail(field(key), "must be a non-empty array of numbers");
        for (const json& e : v) {
            if (!e.is_number() || !std::isfinite(e.get<double>())) fail(field(key), "must contain finite numbers");
            out.push_back(e.get<double>());
        }
        return out;
    }

    AxisRange range(const std::string& key, std::optional<AxisRange> fallback = std::nullopt) {
        if (!has(key)) {
            if (!fallback) fail(field(key), "required");
            return *fallback;
        }
        const json& v = j_.at(key);
        if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
            fail(field(key), "must be [lo, hi]");
        }
        const AxisRange r{v[0].get<double>(), v[1].get<double>()};
        if (!(std::isfinite(r.lo) && std::isfinite(r.hi))) fail(field(key), "bounds must be finite");
        return r;
    }

    const json* child(const std::string& key) {
        if (!has(key)) return nullptr;
        return &j_.at(key);
    }

    void finish() const {
        for (const auto& [key, value] : j_.items()) {
            if (!used_.contains(key)) fail(field(key), "unknown field");
        }
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> used_;
};

ModelParams parse_model(const json& j) {
    Block b(j, "model");
    ModelParams m;
    const std::string kind = b.text("kind", "static");
    if (kind == "static") {
        m.kind = ModelKind::StaticRisk;
    } else if (kind == "dynamic") {
        m.kind = ModelKind::DynamicRisk;
    } else if (kind == "limited") {
        m.kind = ModelKind::LimitedDepth;
    } else {
        fail(b.field("kind"), "must be one of static, dynamic, limited");
    }
    m.m_x = b.number("m_x", 1.0);
    m.m_v = b.number("m_v", 1.0);
    m.m_u = b.number("m_u", 1.0);
    m.k_x = b.number("k_x", 0.11);
    m.x_0 = b.number("x_0", 3.0);
    m.epsilon = b.number("epsilon", 0.0);

    m.inventory = m.kind == ModelKind::DynamicRisk ? InventoryPotential{NoPotential{}}
                                                  : InventoryPotential{QuadraticPotential{0.1}};
    if (const json* f = b.child("inventory_potential")) {
        Block fb(*f, "model.inventory_potential");
        const std::string type = fb.text("type");
        if (type == "quadratic") {
            m.inventory = QuadraticPotential{fb.number("k_v")};
        } else if (type == "kick") {
            m.inventory = KickPotential{fb.number("k_v"), fb.number("v_max")};
        } else if (type == "none") {
            m.inventory = NoPotential{};
        } else {
            fail(fb.field("type"), "must be one of quadratic, kick, none");
        }
        fb.finish();
    }
    b.finish();
    try {
        m.validate();
    } catch (const ValidationError& e) {
        throw ConfigError(std::string("model.") + e.what());
    }
    return m;
}

IntegratorBlock parse_integrator(const json* j, const ModelParams& model) {
    IntegratorBlock ib;
    // The kick force is piecewise constant: small fixed leapfrog steps.
    if (std::holds_alternative<KickPotential>(model.inventory)) {
        ib.scheme = Scheme::Leapfrog;
        ib.dt = 0.001;
    }
    if (!j) return ib;
    Block b(*j, "integrator");
    const std::string scheme = b.text("scheme", std::string(chaosmm::to_string(ib.scheme)));
    if (scheme == "yoshida4") {
        ib.scheme = Scheme::Yoshida4;
    } else if (scheme == "leapfrog") {
        ib.scheme = Scheme::Leapfrog;
    } else {
        fail(b.field("scheme"), "must be yoshida4 or leapfrog");
    }
    ib.dt = b.number("dt", ib.dt);
    if (!(ib.dt > 0.0)) fail(b.field("dt"), "must be > 0");
    ib.n_steps = b.count("n_steps", ib.n_steps);
    if (ib.n_steps < 1) fail(b.field("n_steps"), "must be >= 1");
    ib.record_every = b.count("record_every", ib.record_every);
    if (ib.record_every < 1) fail(b.field("record_every"), "must be >= 1");
    b.finish();
    return ib;
}

std::optional<SamplingBox> parse_box(Block& parent, const std::string& path) {
    const json* j = parent.child("sampling_box");
    if (!j) return std::nullopt;
    Block b(*j, path + ".sampling_box");
    SamplingBox box;
    box.bounds = {b.range("q1"), b.range("q2"), b.range("p1"), b.range("p2")};
    b.finish();
    return box;
}

InitialCondition parse_ic(Block& b, const std::string& path) {
    InitialCondition ic;
    if (const json* s = b.child("initial_state")) {
        Block sb(*s, path + ".initial_state");
        ic.state = PhaseState{sb.number("q1"), sb.number("q2"), sb.number("p1"), sb.number("p2"), 0.0};
        sb.finish();
    }
    ic.energy_target = b.number("energy_target", ic.energy_target);
    ic.energy_tol = b.number("energy_tol", ic.energy_tol);
    ic.sampling_box = parse_box(b, path);
    if (!(ic.energy_tol > 0.0)) fail(path + ".energy_tol", "must be > 0");
    return ic;
}

void require_static(const ModelParams& m, Experiment e) {
    if (m.kind != ModelKind::StaticRisk) {
        fail("model.kind", std::string(to_string(e)) + " requires the static model");
    }
}

std::vector<double> epsilon_list(Block& b, const std::string& path, const ModelParams& model) {
    std::vector<double> eps = b.numbers("epsilons");
    if (eps.empty()) eps.push_back(model.epsilon);
    for (double e : eps) {
        if (!(e >= 0.0)) fail(path + ".epsilons", "must be >= 0");
    }
    return eps;
}

void check_ensemble(const ModelParams& model, const IntegratorBlock& ib, double target, double tol,
                    const std::optional<SamplingBox>& box, const std::string& path) {
    EnsembleConfig c;
    c.params = model;
    c.energy_target = target;
    c.energy_tol = tol;
    c.dt = ib.dt;
    c.n_steps = ib.n_steps;
    c.record_every = ib.record_every;
    c.sampling_box = box;
    try {
        c.validate();
    } catch (const ValidationError& e) {
        throw ConfigError(path + "." + e.what());
    }
}

Component parse_component(const std::string& name, const std::string& field) {
    if (name == "x") return Component::Price;
    if (name == "v") return Component::Inventory;
    if (name == "p_x") return Component::P1;
    if (name == "p_v") return Component::P2;
    if (name == "energy") return Component::Energy;
    if (name == "t") return Component::Time;
    fail(field, "must be one of t, x, v, p_x, p_v, energy");
}

json box_json(const SamplingBox& b) {
    auto r = [](const AxisRange& a) { return json::array({a.lo, a.hi}); };
    return {{"q1", r(b.bounds[0])}, {"q2", r(b.bounds[1])}, {"p1", r(b.bounds[2])}, {"p2", r(b.bounds[3])}};
}

json ic_json(const InitialCondition& ic, const ModelParams& model) {
    json j;
    if (ic.state) {
        j["initial_state"] = {{"q1", ic.state->q1}, {"q2", ic.state->q2}, {"p1", ic.state->p1}, {"p2", ic.state->p2}};
    } else {
        j["energy_target"] = ic.energy_target;
        j["energy_tol"] = ic.energy_tol;
        j["sampling_box"] = box_json(ic.sampling_box.value_or(default_sampling_box(model, ic.energy_target)));
    }
    return j;
}

}  // namespace

std::string_view to_string(Experiment e) {
    switch (e) {
        case Experiment::Simulate:
            return "simulate";
        case Experiment::Poincare:
            return "poincare";
        case Experiment::Lyapunov:
            return "lyapunov";
        case Experiment::KamCheck:
            return "kam-check";
        case Experiment::SampleHist:
            return "sample-hist";
        case Experiment::PotentialGrid:
            return "potential-grid";
    }
    return "unknown";
}

std::optional<Experiment> parse_experiment(std::string_view name) {
    for (Experiment e : {Experiment::Simulate, Experiment::Poincare, Experiment::Lyapunov, Experiment::KamCheck,
                         Experiment::SampleHist, Experiment::PotentialGrid}) {
        if (to_string(e) == name) return e;
    }
    return std::nullopt;
}

std::string component_name(Component c) {
    switch (c) {
        case Component::Time:
            return "t";
        case Component::Price:
            return "x";
        case Component::Inventory:
            return "v";
        case Component::Q2:
            return "q2";
        case Component::P1:
            return "p_x";
        case Component::P2:
            return "p_v";
        case Component::Energy:
            return "energy";
    }
    return "x";
}

RunConfig parse_config(const json& doc) {
    Block root(doc, "config");
    RunConfig cfg;

    const json* model = root.child("model");
    if (!model) fail("model", "required");
    cfg.model = parse_model(*model);
    cfg.integrator = parse_integrator(root.child("integrator"), cfg.model);

    if (const json* out = root.child("output")) {
        Block ob(*out, "output");
        cfg.output.directory = ob.text("directory", cfg.output.directory);
        if (const json* formats = ob.child("formats")) {
            if (!formats->is_array()) fail("output.formats", "must be an array");
            for (const json& f : *formats) {
                if (!f.is_string()) fail("output.formats", "entries must be strings");
                const auto name = f.get<std::string>();
                if (name == "svg") {
                    cfg.output.svg = true;
                } else if (name != "csv" && name != "json") {
                    fail("output.formats", "unknown format '" + name + "' (csv, json, svg)");
                }
            }
        }
        ob.finish();
    }

    const json* exp = root.child("experiment");
    if (!exp) fail("experiment", "required");
    if (!exp->is_object() || exp->size() != 1) fail("experiment", "must hold exactly one experiment block");
    const std::string name = exp->begin().key();
    const auto kind = parse_experiment(name);
    if (!kind) fail("experiment." + name, "unknown experiment");
    cfg.experiment = *kind;
    const std::string path = "experiment." + name;
    Block eb(exp->begin().value(), path);
    cfg.master_seed = eb.seed("master_seed", 0);
    const IntegratorBlock& ib = cfg.integrator;

    switch (*kind) {
        case Experiment::Simulate: {
            SimulateParams p{parse_ic(eb, path)};
            if (!p.ic.state) check_ensemble(cfg.model, ib, p.ic.energy_target, p.ic.energy_tol, p.ic.sampling_box, path);
            cfg.params = p;
            break;
        }
        case Experiment::Poincare: {
            require_static(cfg.model, *kind);
            PoincareParams p;
            p.epsilons = epsilon_list(eb, path, cfg.model);
            p.energy_targets = eb.numbers("energy_targets");
            if (eb.has("energy_target")) {
                if (!p.energy_targets.empty()) fail(path + ".energy_target", "give energy_target or energy_targets");
                p.energy_targets.push_back(eb.number("energy_target"));
            }
            if (p.energy_targets.empty()) p.energy_targets.push_back(1.0);
            p.n_paths = eb.count("n_paths", p.n_paths);
            if (p.n_paths < 1) fail(path + ".n_paths", "must be >= 1");
            p.energy_tol = eb.number("energy_tol", p.energy_tol);
            if (!(p.energy_tol > 0.0)) fail(path + ".energy_tol", "must be > 0");
            p.sampling_box = parse_box(eb, path);
            for (double e : p.epsilons) {
                ModelParams m = cfg.model;
                m.epsilon = e;
                for (double target : p.energy_targets) check_ensemble(m, ib, target, p.energy_tol, p.sampling_box, path);
            }
            cfg.params = p;
            break;
        }
        case Experiment::Lyapunov: {
            LyapunovParams p;
            p.epsilons = epsilon_list(eb, path, cfg.model);
            p.energy_target = eb.number("energy_target", p.energy_target);
            p.n_paths = eb.count("n_paths", p.n_paths);
            if (p.n_paths < 1) fail(path + ".n_paths", "must be >= 1");
            p.energy_tol = eb.number("energy_tol", p.energy_tol);
            if (!(p.energy_tol > 0.0)) fail(path + ".energy_tol", "must be > 0");
            p.renorm_every = eb.count("renorm_every", p.renorm_every);
            if (p.renorm_every < 1) fail(path + ".renorm_every", "must be >= 1");
            if (ib.n_steps < p.renorm_every) fail("integrator.n_steps", "must cover at least one renormalisation");
            p.zero_threshold = eb.number("zero_threshold", p.zero_threshold);
            if (!(p.zero_threshold >= 0.0)) fail(path + ".zero_threshold", "must be >= 0");
            p.sampling_box = parse_box(eb, path);
            for (double e : p.epsilons) {
                ModelParams m = cfg.model;
                m.epsilon = e;
                check_ensemble(m, ib, p.energy_target, p.energy_tol, p.sampling_box, path);
            }
            cfg.params = p;
            break;
        }
        case Experiment::KamCheck: {
            require_static(cfg.model, *kind);
            const auto* q = std::get_if<QuadraticPotential>(&cfg.model.inventory);
            if (!q) fail("model.inventory_potential", "kam-check requires a quadratic inventory potential");
            if (!(q->k_v > 0.0)) fail("model.inventory_potential.k_v", "kam-check requires k_v > 0");
            if (!(cfg.model.k_x > 0.0)) fail("model.k_x", "kam-check requires k_x > 0");
            KamParams p;
            p.epsilons = epsilon_list(eb, path, cfg.model);
            p.i_x = eb.number("i_x", p.i_x);
            p.i_v = eb.number("i_v", p.i_v);
            if (!(p.i_x >= 0.0)) fail(path + ".i_x", "must be >= 0");
            if (!(p.i_v >= 0.0)) fail(path + ".i_v", "must be >= 0");
            p.theta_x = eb.number("theta_x", p.theta_x);
            p.theta_v = eb.number("theta_v", p.theta_v);
            if (ib.n_steps / ib.record_every + 1 < 64) {
                fail("integrator.n_steps", "kam-check needs at least 64 recorded samples");
            }
            cfg.params = p;
            break;
        }
        case Experiment::SampleHist: {
            SampleHistParams p{parse_ic(eb, path)};
            p.every_n = eb.count("every_n", p.every_n);
            if (p.every_n < 1) fail(path + ".every_n", "must be >= 1");
            p.n_bins = eb.count("n_bins", p.n_bins);
            if (p.n_bins < 1) fail(path + ".n_bins", "must be >= 1");
            p.component = parse_component(eb.text("component", "x"), path + ".component");
            if (!p.ic.state) check_ensemble(cfg.model, ib, p.ic.energy_target, p.ic.energy_tol, p.ic.sampling_box, path);
            cfg.params = p;
            break;
        }
        case Experiment::PotentialGrid: {
            require_static(cfg.model, *kind);
            PotentialGridParams p;
            p.x_range = eb.range("x_range", p.x_range);
            p.v_range = eb.range("v_range", p.v_range);
            if (!(p.x_range.lo < p.x_range.hi)) fail(path + ".x_range", "must satisfy lo < hi");
            if (!(p.v_range.lo < p.v_range.hi)) fail(path + ".v_range", "must satisfy lo < hi");
            p.n = eb.count("n", p.n);
            if (p.n < 2) fail(path + ".n", "must be >= 2");
            p.epsilons = epsilon_list(eb, path, cfg.model);
            cfg.params = p;
            break;
        }
    }
    eb.finish();
    root.finish();
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    return parse_config(doc);
}

json to_json(const RunConfig& cfg) {
    json model = {{"kind", std::string(chaosmm::to_string(cfg.model.kind))},
                  {"m_x", cfg.model.m_x},
                  {"m_v", cfg.model.m_v},
                  {"m_u", cfg.model.m_u},
                  {"k_x", cfg.model.k_x},
                  {"x_0", cfg.model.x_0},
                  {"epsilon", cfg.model.epsilon}};
    std::visit(
        [&](const auto& f) {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, QuadraticPotential>) {
                model["inventory_potential"] = {{"type", "quadratic"}, {"k_v", f.k_v}};
            } else if constexpr (std::is_same_v<T, KickPotential>) {
                model["inventory_potential"] = {{"type", "kick"}, {"k_v", f.k_v}, {"v_max", f.v_max}};
            } else {
                model["inventory_potential"] = {{"type", "none"}};
            }
        },
        cfg.model.inventory);

    json integrator = {{"scheme", std::string(chaosmm::to_string(cfg.integrator.scheme))},
                       {"dt", cfg.integrator.dt},
                       {"n_steps", cfg.integrator.n_steps},
                       {"record_every", cfg.integrator.record_every}};

    json exp = std::visit(
        [&](const auto& p) -> json {
            using T = std::decay_t<decltype(p)>;
            json j;
            if constexpr (std::is_same_v<T, SimulateParams>) {
                j = ic_json(p.ic, cfg.model);
            } else if constexpr (std::is_same_v<T, PoincareParams>) {
                j = {{"epsilons", p.epsilons}, {"energy_targets", p.energy_targets}, {"n_paths", p.n_paths},
                     {"energy_tol", p.energy_tol}};
                if (p.sampling_box) j["sampling_box"] = box_json(*p.sampling_box);
            } else if constexpr (std::is_same_v<T, LyapunovParams>) {
                j = {{"epsilons", p.epsilons},         {"energy_target", p.energy_target},
                     {"n_paths", p.n_paths},           {"energy_tol", p.energy_tol},
                     {"renorm_every", p.renorm_every}, {"zero_threshold", p.zero_threshold}};
                if (p.sampling_box) j["sampling_box"] = box_json(*p.sampling_box);
            } else if constexpr (std::is_same_v<T, KamParams>) {
                j = {{"epsilons", p.epsilons}, {"i_x", p.i_x},         {"i_v", p.i_v},
                     {"theta_x", p.theta_x},   {"theta_v", p.theta_v}};
            } else if constexpr (std::is_same_v<T, SampleHistParams>) {
                j = ic_json(p.ic, cfg.model);
                j["every_n"] = p.every_n;
                j["n_bins"] = p.n_bins;
                j["component"] = component_name(p.component);
            } else {
                j = {{"x_range", {p.x_range.lo, p.x_range.hi}},
                     {"v_range", {p.v_range.lo, p.v_range.hi}},
                     {"n", p.n},
                     {"epsilons", p.epsilons}};
            }
            j["master_seed"] = cfg.master_seed;
            return j;
        },
        cfg.params);

    json formats = json::array({"csv", "json"});
    if (cfg.output.svg) formats.push_back("svg");
    return {{"model", model},
            {"integrator", integrator},
            {"experiment", {{std::string(to_string(cfg.experiment)), exp}}},
            {"output", {{"directory", cfg.output.directory}, {"formats", formats}}}};
}

void apply_seed_override(RunConfig& cfg, const char* env_value) {
    if (!env_value || !*env_value) return;
    const std::string_view s(env_value);
    std::uint64_t seed = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), seed);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw ConfigError("CHAOS_MM_SEED: must be an unsigned 64-bit integer");
    }
    cfg.master_seed = seed;
}

}  // namespace chaosmm::cli
