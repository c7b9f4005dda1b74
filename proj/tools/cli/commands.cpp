#include "commands.hpp"

#include <charconv>
#include <cmath>
#include <exception>
#include <system_error>

#include <nlohmann/json.hpp>

#include "chaosmm/analysis.hpp"
#include "chaosmm/ensemble.hpp"
#include "chaosmm/error.hpp"
#include "chaosmm/kam.hpp"
#include "chaosmm/version.hpp"
#include "output.hpp"

namespace chaosmm::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

class ExperimentFailed : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Context {
    const RunConfig& config;
    fs::path dir;
    std::size_t workers;
    bool svg;
    json meta = json::object();
    std::vector<fs::path> files;

    void save(const CsvWriter& csv, const std::string& name) {
        csv.save(dir / name);
        files.push_back(dir / name);
    }
    void save_text(const std::string& text, const std::string& name) {
        write_text(dir / name, text);
        files.push_back(dir / name);
    }
};

json state_json(const PhaseState& s) { return {{"q1", s.q1}, {"q2", s.q2}, {"p1", s.p1}, {"p2", s.p2}}; }

json status_json(const Termination& t) { return {{"kind", std::string(to_string(t.kind))}, {"step", t.step}}; }

json box_meta(const SamplingBox& b) {
    json j = json::array();
    for (const AxisRange& r : b.bounds) j.push_back({r.lo, r.hi});
    return j;
}

EnsembleConfig ensemble_for(const RunConfig& cfg, const ModelParams& params, double target, double tol,
                            std::size_t n_paths, const std::optional<SamplingBox>& box) {
    EnsembleConfig e;
    e.params = params;
    e.energy_target = target;
    e.energy_tol = tol;
    e.n_paths = n_paths;
    e.master_seed = cfg.master_seed;
    e.dt = cfg.integrator.dt;
    e.n_steps = cfg.integrator.n_steps;
    e.scheme = cfg.integrator.scheme;
    e.record_every = cfg.integrator.record_every;
    e.sampling_box = box;
    return e;
}

ModelParams with_epsilon(const ModelParams& p, double eps) {
    ModelParams out = p;
    out.epsilon = eps;
    return out;
}

// Explicit state, or the path-0 draw of the energy-targeted sampler.
PhaseState resolve_ic(Context& ctx, const InitialCondition& ic) {
    if (ic.state) {
        ctx.meta["initial_state"] = state_json(*ic.state);
        return *ic.state;
    }
    const EnsembleConfig e = ensemble_for(ctx.config, ctx.config.model, ic.energy_target, ic.energy_tol, 1,
                                          ic.sampling_box);
    const PhaseState s = sample_initial_condition(e, 0);
    ctx.meta["initial_state"] = state_json(s);
    ctx.meta["sampling_box"] = box_meta(e.box());
    ctx.meta["initial_energy"] = energy(ctx.config.model, s);
    return s;
}

void cmd_simulate(Context& ctx, const SimulateParams& p) {
    const RunConfig& cfg = ctx.config;
    const PhaseState ic = resolve_ic(ctx, p.ic);
    const Trajectory traj =
        integrate(cfg.model, ic, cfg.integrator.dt, cfg.integrator.n_steps, cfg.integrator.scheme,
                  cfg.integrator.record_every);
    CsvWriter csv{"step", "t", "x", "v", "p_x", "p_v", "energy"};
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
        const PhaseState& s = traj.states[i];
        const auto c = price_inventory(cfg.model, s);
        csv.cell(i * traj.record_every).cell(s.t).cell(c.x).cell(c.v).cell(c.p_x).cell(c.p_v).cell(traj.energies[i]);
        csv.end_row();
    }
    ctx.save(csv, "trajectory.csv");
    ctx.meta["termination"] = status_json(traj.status);
}

void cmd_poincare(Context& ctx, const PoincareParams& p) {
    const RunConfig& cfg = ctx.config;
    const bool single = p.epsilons.size() == 1 && p.energy_targets.size() == 1;
    json sections = json::array();
    std::size_t ok_paths = 0;
    for (double eps : p.epsilons) {
        const ModelParams params = with_epsilon(cfg.model, eps);
        for (double target : p.energy_targets) {
            const EnsembleConfig e = ensemble_for(cfg, params, target, p.energy_tol, p.n_paths, p.sampling_box);
            const auto results = run_ensemble(e, AnalysisKind::Poincare, ctx.workers);

            CsvWriter csv{"path_id", "t_cross", "x", "p_x"};
            std::vector<ScatterPoint> scatter;
            json failed = json::array();
            std::size_t n_points = 0;
            std::size_t n_regular = 0;
            for (const PathResult& r : results) {
                if (!r.ok()) {
                    failed.push_back({{"path_id", r.path_index}, {"error", r.error}});
                    continue;
                }
                ++ok_paths;
                const auto& sec = std::get<PathSection>(r.result);
                if (is_closed_curve(params, sec.points)) ++n_regular;
                for (const PoincarePoint& pt : sec.points) {
                    csv.cell(pt.path_id).cell(pt.t).cell(pt.x).cell(pt.p_x);
                    csv.end_row();
                    scatter.push_back({pt.x, pt.p_x});
                    ++n_points;
                }
            }
            const std::string stem =
                single ? std::string("poincare") : "poincare_eps" + file_tag(eps) + "_E" + file_tag(target);
            ctx.save(csv, stem + ".csv");
            if (ctx.svg) {
                const std::string title = "Poincare section v=0, eps=" + file_tag(eps) + ", E=" + file_tag(target);
                ctx.save_text(render_scatter_svg(scatter, title, "x", "p_x"), stem + ".svg");
            }
            sections.push_back({{"file", stem + ".csv"},
                                {"epsilon", eps},
                                {"energy_target", target},
                                {"sampling_box", box_meta(e.box())},
                                {"n_points", n_points},
                                {"closed_curve_paths", n_regular},
                                {"failed_paths", failed}});
        }
    }
    ctx.meta["sections"] = sections;
    if (ok_paths == 0) throw ExperimentFailed("all paths failed");
}

void cmd_lyapunov(Context& ctx, const LyapunovParams& p) {
    const RunConfig& cfg = ctx.config;
    CsvWriter csv{"epsilon", "path_id", "lambda_1", "lambda_2", "lambda_3", "lambda_4", "h_ks"};
    CsvWriter summary{"epsilon", "n_paths", "h_ks_min", "h_ks_max", "h_ks_mean", "h_ks_range"};
    json per_eps = json::array();
    std::size_t ok_paths = 0;
    for (double eps : p.epsilons) {
        EnsembleConfig e = ensemble_for(cfg, with_epsilon(cfg.model, eps), p.energy_target, p.energy_tol,
                                        p.n_paths, p.sampling_box);
        e.renorm_every = p.renorm_every;
        e.zero_threshold = p.zero_threshold;
        const auto results = run_ensemble(e, AnalysisKind::Lyapunov, ctx.workers);

        std::vector<double> h;
        json failed = json::array();
        for (const PathResult& r : results) {
            if (!r.ok()) {
                failed.push_back({{"path_id", r.path_index}, {"error", r.error}});
                continue;
            }
            const auto& spec = std::get<LyapunovSpectrum>(r.result);
            csv.cell(eps).cell(r.path_index);
            for (double l : spec.exponents) csv.cell(l);
            csv.cell(spec.h_ks);
            csv.end_row();
            h.push_back(spec.h_ks);
        }
        ok_paths += h.size();
        if (!h.empty()) {
            const RangeStats s = range_stats(h);
            summary.cell(eps).cell(s.count).cell(s.min).cell(s.max).cell(s.mean).cell(s.range());
            summary.end_row();
        }
        per_eps.push_back({{"epsilon", eps}, {"sampling_box", box_meta(e.box())}, {"failed_paths", failed}});
    }
    ctx.save(csv, "lyapunov.csv");
    ctx.save(summary, "lyapunov_summary.csv");
    ctx.meta["runs"] = per_eps;
    if (ok_paths == 0) throw ExperimentFailed("all paths failed");
}

void cmd_kam_check(Context& ctx, const KamParams& p) {
    const RunConfig& cfg = ctx.config;
    CsvWriter csv{"epsilon",      "i_x",          "i_v",
                  "omega_x",      "omega_v",      "omega_x_pred",
                  "omega_v_pred", "omega_x_measured", "resonance_distance"};
    json runs = json::array();
    const kam::ActionAngle ic{p.i_x, p.theta_x, p.i_v, p.theta_v};
    for (double eps : p.epsilons) {
        const ModelParams params = with_epsilon(cfg.model, eps);
        const auto m = kam::measure_frequencies(params, ic, cfg.integrator.dt, cfg.integrator.n_steps,
                                                cfg.integrator.record_every, cfg.integrator.scheme);
        if (!m.status.completed()) throw ExperimentFailed("kam-check orbit terminated early");
        // The prediction is evaluated on the torus the orbit actually occupies.
        const auto pred = kam::predicted_frequencies(params, m.mean_actions.i_x, m.mean_actions.i_v);
        csv.cell(eps)
            .cell(m.mean_actions.i_x)
            .cell(m.mean_actions.i_v)
            .cell(pred.omega_x)
            .cell(pred.omega_v)
            .cell(pred.omega_x_pred)
            .cell(pred.omega_v_pred)
            .cell(m.omega_x_measured)
            .cell(pred.resonance_distance);
        csv.end_row();
        runs.push_back({{"epsilon", eps},
                        {"initial_state", state_json(kam::from_action_angle(params, ic))},
                        {"omega_v_measured", m.omega_v_measured}});
    }
    ctx.save(csv, "kam.csv");
    ctx.meta["nominal_actions"] = {{"i_x", p.i_x}, {"i_v", p.i_v}, {"theta_x", p.theta_x}, {"theta_v", p.theta_v}};
    ctx.meta["runs"] = runs;
}

void cmd_sample_hist(Context& ctx, const SampleHistParams& p) {
    const RunConfig& cfg = ctx.config;
    const PhaseState ic = resolve_ic(ctx, p.ic);
    const Trajectory traj =
        integrate(cfg.model, ic, cfg.integrator.dt, cfg.integrator.n_steps, cfg.integrator.scheme,
                  cfg.integrator.record_every);
    const auto times = subsample(traj, p.every_n, Component::Time);
    const auto values = subsample(traj, p.every_n, p.component);
    const std::string name = component_name(p.component);

    CsvWriter sampled{"sample_index", "t", name};
    for (std::size_t i = 0; i < values.size(); ++i) {
        sampled.cell(i).cell(times[i]).cell(values[i]);
        sampled.end_row();
    }
    ctx.save(sampled, "sampled.csv");

    CsvWriter hist{"bin_left", "bin_right", "count"};
    if (!values.empty()) {
        const Histogram h = histogram(values, p.n_bins);
        for (std::size_t b = 0; b < h.counts.size(); ++b) {
            hist.cell(h.edges[b]).cell(h.edges[b + 1]).cell(h.counts[b]);
            hist.end_row();
        }
    }
    ctx.save(hist, "hist.csv");
    ctx.meta["termination"] = status_json(traj.status);
    ctx.meta["n_samples"] = values.size();
}

void cmd_potential_grid(Context& ctx, const PotentialGridParams& p) {
    const bool single = p.epsilons.size() == 1;
    for (double eps : p.epsilons) {
        const PotentialGrid g = potential_grid(with_epsilon(ctx.config.model, eps), p.x_range, p.v_range, p.n);
        CsvWriter csv{"x", "v", "V"};
        for (std::size_t i = 0; i < g.x_values.size(); ++i) {
            for (std::size_t j = 0; j < g.v_values.size(); ++j) {
                csv.cell(g.x_values[i]).cell(g.v_values[j]).cell(g.at(i, j));
                csv.end_row();
            }
        }
        ctx.save(csv, single ? std::string("potential.csv") : "potential_eps" + file_tag(eps) + ".csv");
    }
}

}  // namespace

PriceInventoryState price_inventory(const ModelParams& params, const PhaseState& s) {
    if (!uses_risk_coordinates(params.kind)) return {s.q1, s.q2, s.p1, s.p2};
    const double v = s.q2 / s.q1;
    return {s.q1, v, s.p1 + v * s.p2, s.q1 * s.p2};
}

std::string file_tag(double value) {
    char buf[64];
    const double mag = std::abs(value);
    const bool plain = value == 0.0 || (mag >= 1e-6 && mag < 1e15);
    const auto res = plain ? std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::fixed)
                           : std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

RunReport run_command(const RunConfig& config, const RunOptions& options) {
    Context ctx{config, options.out_dir.value_or(fs::path(config.output.directory)),
                options.workers, options.svg || config.output.svg, json::object(), {}};
    RunReport report;
    std::error_code ec;
    fs::create_directories(ctx.dir, ec);
    if (ec) {
        report.exit_code = kExitRuntime;
        report.message = "cannot create output directory " + ctx.dir.string() + ": " + ec.message();
        return report;
    }

    std::string failure;
    try {
        std::visit(
            [&](const auto& p) {
                using T = std::decay_t<decltype(p)>;
                if constexpr (std::is_same_v<T, SimulateParams>) {
                    cmd_simulate(ctx, p);
                } else if constexpr (std::is_same_v<T, PoincareParams>) {
                    cmd_poincare(ctx, p);
                } else if constexpr (std::is_same_v<T, LyapunovParams>) {
                    cmd_lyapunov(ctx, p);
                } else if constexpr (std::is_same_v<T, KamParams>) {
                    cmd_kam_check(ctx, p);
                } else if constexpr (std::is_same_v<T, SampleHistParams>) {
                    cmd_sample_hist(ctx, p);
                } else {
                    cmd_potential_grid(ctx, p);
                }
            },
            config.params);
    } catch (const std::exception& e) {
        failure = e.what();
    }

    json meta = {{"command", std::string(to_string(config.experiment))},
                 {"version", kVersion},
                 {"master_seed", config.master_seed},
                 {"config", to_json(config)},
                 {"results", ctx.meta}};
    if (!failure.empty()) meta["error"] = failure;
    json files = json::array();
    for (const fs::path& f : ctx.files) files.push_back(f.filename().string());
    meta["files"] = files;
    try {
        write_text(ctx.dir / "metadata.json", meta.dump(2) + "\n");
        ctx.files.push_back(ctx.dir / "metadata.json");
    } catch (const std::exception& e) {
        if (failure.empty()) failure = e.what();
    }

    report.files = std::move(ctx.files);
    if (!failure.empty()) {
        report.exit_code = kExitRuntime;
        report.message = failure;
    }
    return report;
}

}  // namespace chaosmm::cli
