#pragma once

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "spadmm/ergodic.hpp"
#include "spadmm/estimates.hpp"
#include "spadmm/instances.hpp"

namespace spadmm::driver {

// ---------------------------------------------------------------------------
// Experiment configuration, parsed from a line-oriented `key = value` file.
// `#` starts a comment; unknown keys are a hard error.
// ---------------------------------------------------------------------------

struct RunConfig {
    std::string instance;
    std::uint64_t seed = 42;
    int dim_y = 8, dim_z = 8, dim_x = 4;
    int p = 4;
    double mu = 0.5;
    double tau = 1.0;
    double beta = 1.0;
    int iters = 300;
    WeightScheme weights = WeightScheme::Uniform;
    std::optional<ProximalMode> proximal;  // defaulted per instance when absent
    std::string out;
    bool strict = false;
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("invalid numeric value for key '" + key + "': " + v);
    }
}

inline long long parse_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long long x = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("invalid integer value for key '" + key + "': " + v);
    }
}

}  // namespace detail

inline RunConfig parse_config_text(const std::string& text) {
    RunConfig rc;
    bool has_instance = false;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string val = detail::trim(line.substr(eq + 1));
        if (key.empty() || val.empty())
            throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");

        if (key == "instance") {
            if (val != "lasso_box" && val != "smooth_qp" && val != "nearest_psd" &&
                val != "unit_1d")
                throw ConfigError("unknown instance '" + val + "'");
            rc.instance = val;
            has_instance = true;
        } else if (key == "seed") {
            rc.seed = static_cast<std::uint64_t>(detail::parse_int(key, val));
        } else if (key == "dim_y") {
            rc.dim_y = static_cast<int>(detail::parse_int(key, val));
        } else if (key == "dim_z") {
            rc.dim_z = static_cast<int>(detail::parse_int(key, val));
        } else if (key == "dim_x") {
            rc.dim_x = static_cast<int>(detail::parse_int(key, val));
        } else if (key == "p") {
            rc.p = static_cast<int>(detail::parse_int(key, val));
        } else if (key == "mu") {
            rc.mu = detail::parse_double(key, val);
        } else if (key == "tau") {
            rc.tau = detail::parse_double(key, val);
        } else if (key == "beta") {
            rc.beta = detail::parse_double(key, val);
        } else if (key == "iters") {
            rc.iters = static_cast<int>(detail::parse_int(key, val));
        } else if (key == "weights") {
            if (val == "uniform")
                rc.weights = WeightScheme::Uniform;
            else if (val == "linear")
                rc.weights = WeightScheme::Linear;
            else
                throw ConfigError("weights must be 'uniform' or 'linear', got '" + val + "'");
        } else if (key == "proximal") {
            if (val == "none")
                rc.proximal = ProximalMode::None;
            else if (val == "linearized")
                rc.proximal = ProximalMode::Linearized;
            else
                throw ConfigError("proximal must be 'none' or 'linearized', got '" + val + "'");
        } else if (key == "out") {
            rc.out = val;
        } else {
            throw ConfigError("unknown key '" + key + "'");
        }
    }
    if (!has_instance) throw ConfigError("missing key 'instance'");

    // Solver preconditions are enforced here, before any work starts.
    if (!(rc.tau > 0.0) || !(rc.tau < tau_upper_bound()))
        throw ConfigError("tau out of range (0, 1.6180)");
    if (!(rc.beta > 0.0)) throw ConfigError("beta must be positive");
    if (rc.iters < 0) throw ConfigError("iters must be nonnegative");
    if (rc.mu <= 0.0) throw ConfigError("mu must be positive");
    if (rc.dim_y < 1 || rc.dim_y > 512 || rc.dim_z < 1 || rc.dim_z > 512 || rc.dim_x < 1 ||
        rc.dim_x > 512)
        throw ConfigError("block dimensions must be in [1, 512]");
    if (rc.p < 1 || rc.p > 12) throw ConfigError("p must be in [1, 12]");
    return rc;
}

inline RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

inline GeneratedInstance build_instance(const RunConfig& rc) {
    if (rc.instance == "lasso_box")
        return gen_lasso_box(rc.dim_y, rc.dim_z, rc.dim_x, rc.mu, rc.seed);
    if (rc.instance == "smooth_qp") return gen_smooth_qp(rc.dim_y, rc.dim_z, rc.dim_x, rc.seed);
    if (rc.instance == "nearest_psd") return gen_nearest_psd(rc.p, rc.seed);
    if (rc.instance == "unit_1d") return unit_1d();
    throw ConfigError("unknown instance '" + rc.instance + "'");
}

inline SolverConfig solver_config_for(const GeneratedInstance& inst, const RunConfig& rc) {
    const ProximalMode mode = rc.proximal.value_or(inst.recommended_mode);
    return make_config(inst.problem, rc.tau, rc.beta, mode, rc.iters, rc.weights);
}

inline BlockVector starting_point(const GeneratedInstance& inst, const RunConfig& rc) {
    if (inst.start) return *inst.start;
    return random_feasible_start(inst.problem, rc.seed + 1);
}

// ---------------------------------------------------------------------------
// One experiment run: trajectory, per-iteration certificate columns and
// ergodic bound columns, one row per completed step.
// ---------------------------------------------------------------------------

struct CsvRow {
    int k = 0;
    double r_y = 0.0, r_z = 0.0, r_primal = 0.0;
    double eta_tilde = 0.0, eta = 0.0;
    double dist_M_to_wstar = 0.0;
    double erg_r_norm = 0.0, erg_eps = 0.0, erg_eps_y = 0.0, erg_eps_z = 0.0;
    double rhs_29b = 0.0, rhs_35a = 0.0, rhs_35b = 0.0;
    double slack_hpe = 0.0, slack_contraction = 0.0;
    double inclusion_residual = 0.0;
};

struct RunResult {
    RunConfig config;
    GeneratedInstance instance;
    BlockVector w0;
    std::vector<CsvRow> rows;
    bool bounds_pass = true;
    double min_slack = std::numeric_limits<double>::infinity();
    double max_inclusion = 0.0;
    int iters_to_kkt8 = -1;
    double final_kkt = std::numeric_limits<double>::infinity();
    double final_erg_r_norm = 0.0;
    int last_k = 0;
};

inline RunResult run_experiment(const RunConfig& rc) {
    RunResult res;
    res.config = rc;
    res.instance = build_instance(rc);
    const SplitProblem& prob = res.instance.problem;
    const SolverConfig cfg = solver_config_for(res.instance, rc);
    res.w0 = starting_point(res.instance, rc);

    const Solver solver(prob, cfg);
    const SolverOperators& ops = solver.ops();
    const StepConstants& consts = solver.constants();
    const BlockVector* w_star = prob.solution ? &prob.solution->w_star : nullptr;

    TolerancePolicy tol;
    tol.strict = rc.strict;

    ErgodicAccumulator acc(prob, rc.weights);
    std::optional<BoundInputs> inputs;
    IterateState prev = solver.initial_state(res.w0);

    const auto observer = [&](const IterateState& s) {
        CsvRow row;
        row.k = s.k;
        const KktResidual kkt = kkt_residual(prob, s.w);
        row.r_y = kkt.r_y;
        row.r_z = kkt.r_z;
        row.r_primal = kkt.r_primal;
        row.eta_tilde = s.eta_tilde;
        row.eta = s.eta;
        if (w_star != nullptr) row.dist_M_to_wstar = half_dist_sq(ops.M, *w_star, s.w);

        const IterationCertificate cert =
            evaluate_iteration(prob, cfg, ops, consts, s.k >= 2 ? &prev : nullptr, s, w_star,
                               res.w0);
        row.inclusion_residual = cert.inclusion_residual;
        res.max_inclusion = std::max(res.max_inclusion, cert.inclusion_residual);
        if (cert.inclusion_residual > tol.effective_inclusion()) res.bounds_pass = false;
        const auto track = [&](const std::optional<double>& slack) {
            if (!slack) return;
            res.min_slack = std::min(res.min_slack, *slack);
            if (*slack < -tol.effective_slack()) res.bounds_pass = false;
        };
        track(cert.coupling_slack);
        track(cert.hpe_slack);
        track(cert.contraction_slack);
        track(cert.fejer_slack);
        if (cert.hpe_slack) row.slack_hpe = *cert.hpe_slack;
        if (cert.contraction_slack) row.slack_contraction = *cert.contraction_slack;

        if (s.k == 1 && w_star != nullptr)
            inputs = compute_bound_inputs(ops, consts, res.w0, s, *w_star);
        if (s.k >= 2) {
            acc.add(s);
            const ErgodicPoint pt = acc.point();
            row.erg_r_norm = pt.r_bar.norm();
            row.erg_eps = pt.eps_bar;
            row.erg_eps_y = pt.eps_y;
            row.erg_eps_z = pt.eps_z;
            res.final_erg_r_norm = row.erg_r_norm;
            if (pt.eps_bar < -1e-12 || pt.eps_y < -1e-12 || pt.eps_z < -1e-12)
                res.bounds_pass = false;
            if (std::abs(pt.eps_y + pt.eps_z - pt.eps_bar) > 1e-9 * std::max(1.0, pt.eps_bar))
                res.bounds_pass = false;
            if (inputs) {
                const WeightStats st = weight_stats(rc.weights, pt.k);
                const BoundRhs rhs = bound_rhs(*inputs, st);
                row.rhs_29b = rhs.rhs_29b;
                row.rhs_35a = rhs.rhs_35a;
                row.rhs_35b = rhs.rhs_35b;
                const ErgodicSlacks es = check_ergodic_bounds(pt, *inputs, st);
                for (const double sl :
                     {es.r_norm, es.eps_sum, es.r_norm_sq, es.remark_eps, es.remark_dist}) {
                    res.min_slack = std::min(res.min_slack, sl);
                    if (sl < -tol.effective_slack()) res.bounds_pass = false;
                }
            }
        }
        res.rows.push_back(row);
        if (kkt.total <= 1e-8 && res.iters_to_kkt8 < 0) res.iters_to_kkt8 = s.k;
        res.final_kkt = kkt.total;
        res.last_k = s.k;
        prev = s;
    };

    solver.solve(res.w0, observer);

    // The ergodic point at horizon k becomes available with step k + 1, so the
    // observer stores it one row late; shift the ergodic columns up so that
    // row k carries the horizon-k averages. The final row has no horizon-k
    // point yet and keeps zeros.
    for (std::size_t i = 0; i + 1 < res.rows.size(); ++i) {
        CsvRow& dst = res.rows[i];
        const CsvRow& src = res.rows[i + 1];
        dst.erg_r_norm = src.erg_r_norm;
        dst.erg_eps = src.erg_eps;
        dst.erg_eps_y = src.erg_eps_y;
        dst.erg_eps_z = src.erg_eps_z;
        dst.rhs_29b = src.rhs_29b;
        dst.rhs_35a = src.rhs_35a;
        dst.rhs_35b = src.rhs_35b;
    }
    if (!res.rows.empty()) {
        CsvRow& last = res.rows.back();
        last.erg_r_norm = last.erg_eps = last.erg_eps_y = last.erg_eps_z = 0.0;
        last.rhs_29b = last.rhs_35a = last.rhs_35b = 0.0;
    }
    return res;
}

inline void write_csv(const std::vector<CsvRow>& rows, std::ostream& os) {
    os << "k,r_y,r_z,r_primal,eta_tilde,eta,dist_M_to_wstar,erg_r_norm,erg_eps,erg_eps_y,"
          "erg_eps_z,rhs_29b,rhs_35a,rhs_35b,slack_hpe,slack_contraction,inclusion_residual\n";
    char buf[32];
    const auto put = [&](double v, char sep) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        os << buf << sep;
    };
    for (const auto& r : rows) {
        os << r.k << ',';
        put(r.r_y, ',');
        put(r.r_z, ',');
        put(r.r_primal, ',');
        put(r.eta_tilde, ',');
        put(r.eta, ',');
        put(r.dist_M_to_wstar, ',');
        put(r.erg_r_norm, ',');
        put(r.erg_eps, ',');
        put(r.erg_eps_y, ',');
        put(r.erg_eps_z, ',');
        put(r.rhs_29b, ',');
        put(r.rhs_35a, ',');
        put(r.rhs_35b, ',');
        put(r.slack_hpe, ',');
        put(r.slack_contraction, ',');
        put(r.inclusion_residual, '\n');
    }
}

// ---------------------------------------------------------------------------
// Certification: every suite runs the full set of inequality checks for one
// configured experiment and reports PASS / FAIL / SKIPPED with its worst
// slack (suites needing a known solution are skipped without one).
// ---------------------------------------------------------------------------

struct SuiteResult {
    enum class Status { Pass, Fail, Skipped };
    std::string name;
    Status status = Status::Pass;
    double worst = 0.0;
};

namespace detail {

inline SuiteResult constants_suite() {
    SuiteResult out{"constants-grid", SuiteResult::Status::Pass,
                    std::numeric_limits<double>::infinity()};
    const double grid_tol = 1e-12;
    for (int i = 1; i <= 161; ++i) {
        const double tau = i * 0.01;
        const StepConstants k = step_constants(tau);
        const double tm1 = tau - 1.0;
        const double a = tau * tau * k.sigma;
        const double b = tau * (k.sigma - tm1 * tm1);
        const double c = k.sigma - (tau + 1.0) * tm1 * tm1;
        double worst = std::min({k.sigma, 1.0 - k.sigma, k.gamma, 1.0 - k.gamma,
                                 k.nu - std::max(tau * k.sigma, k.sigma - tm1 * tm1)});
        if (tau < 1.0)
            worst = std::min({worst, b - a, c - b});
        else
            worst = std::min({worst, a - b, b - c, c});
        const double identity = k.sigma * (tau + 1.0) - 1.0 -
                                (k.sigma + tau - 1.0) * std::max(1.0 - tau, tm1 * tau);
        worst = std::min(worst, grid_tol - std::abs(identity));
        out.worst = std::min(out.worst, worst);
    }
    if (out.worst < -grid_tol) out.status = SuiteResult::Status::Fail;
    return out;
}

}  // namespace detail

inline std::vector<SuiteResult> certify_instance(const GeneratedInstance& inst,
                                                 const RunConfig& rc) {
    std::vector<SuiteResult> suites;
    suites.push_back(detail::constants_suite());

    const SplitProblem& prob = inst.problem;
    const SolverConfig cfg = solver_config_for(inst, rc);
    const BlockVector w0 = starting_point(inst, rc);
    const Solver solver(prob, cfg);
    const SolverOperators& ops = solver.ops();
    const StepConstants& consts = solver.constants();
    const bool has_star = prob.solution.has_value();
    const BlockVector* w_star = has_star ? &prob.solution->w_star : nullptr;

    TolerancePolicy tol;
    tol.strict = rc.strict;

    ErgodicAccumulator acc_u(prob, WeightScheme::Uniform);
    ErgodicAccumulator acc_l(prob, WeightScheme::Linear);
    std::optional<BoundInputs> inputs;
    std::optional<IterateState> first_state;

    double worst_inclusion = 0.0;
    double worst_coupling = std::numeric_limits<double>::infinity();
    double worst_hpe = std::numeric_limits<double>::infinity();
    double worst_contraction = std::numeric_limits<double>::infinity();
    double worst_fejer = std::numeric_limits<double>::infinity();
    double worst_chain = std::numeric_limits<double>::infinity();
    double worst_erg_u = std::numeric_limits<double>::infinity();
    double worst_erg_l = std::numeric_limits<double>::infinity();
    bool erg_extra_ok = true;

    IterateState prev = solver.initial_state(w0);
    const auto observer = [&](const IterateState& s) {
        worst_inclusion = std::max(worst_inclusion, check_inclusion(prob, s));
        if (s.k >= 2) {
            worst_coupling = std::min(worst_coupling, check_residual_coupling(prob, prev, s, cfg));
            worst_hpe = std::min(worst_hpe, check_hpe(prev, s, ops, consts));
            if (has_star) {
                const auto con = check_contraction(prev, s, ops, consts, *w_star, w0);
                worst_contraction = std::min(worst_contraction, con.slack);
                worst_fejer = std::min(worst_fejer, con.fejer_slack);
            } else {
                worst_fejer = std::min(worst_fejer, check_fejer(prev, s, ops, consts, w0));
            }
        }
        if (s.k == 1) {
            first_state = s;
            if (has_star) inputs = compute_bound_inputs(ops, consts, w0, s, *w_star);
        }
        if (has_star && first_state) {
            const double dm_k = half_dist_sq(ops.M, *w_star, s.w);
            const double dm_cap = half_dist_sq(ops.M, *w_star, first_state->w) + first_state->eta;
            worst_chain = std::min(worst_chain, relative_slack(dm_k, dm_cap));
        }
        if (s.k >= 2) {
            acc_u.add(s);
            acc_l.add(s);
            if (inputs) {
                for (auto* acc : {&acc_u, &acc_l}) {
                    const ErgodicPoint pt = acc->point();
                    const WeightStats st = weight_stats(acc->scheme(), pt.k);
                    const ErgodicSlacks es = check_ergodic_bounds(pt, *inputs, st);
                    double& worst =
                        acc->scheme() == WeightScheme::Uniform ? worst_erg_u : worst_erg_l;
                    worst = std::min({worst, es.r_norm, es.eps_sum, es.r_norm_sq, es.remark_eps,
                                      es.remark_dist});
                    if (pt.eps_bar < -1e-12 || pt.eps_y < -1e-12 || pt.eps_z < -1e-12)
                        erg_extra_ok = false;
                    if (std::abs(pt.eps_y + pt.eps_z - pt.eps_bar) >
                        1e-9 * std::max(1.0, pt.eps_bar))
                        erg_extra_ok = false;
                }
            }
        }
        prev = s;
    };
    solver.solve(w0, observer);

    const auto slack_suite = [&](const std::string& name, double worst, bool available) {
        SuiteResult sr{name, SuiteResult::Status::Pass, worst};
        if (!available)
            sr.status = SuiteResult::Status::Skipped;
        else if (worst < -tol.effective_slack())
            sr.status = SuiteResult::Status::Fail;
        return sr;
    };

    {
        SuiteResult sr{"inclusion", SuiteResult::Status::Pass, worst_inclusion};
        if (worst_inclusion > tol.effective_inclusion()) sr.status = SuiteResult::Status::Fail;
        suites.push_back(sr);
    }
    suites.push_back(slack_suite("residual-coupling", worst_coupling,
                                 worst_coupling != std::numeric_limits<double>::infinity()));
    suites.push_back(
        slack_suite("hpe", worst_hpe, worst_hpe != std::numeric_limits<double>::infinity()));
    suites.push_back(slack_suite("contraction", worst_contraction, has_star));
    suites.push_back(slack_suite("fejer-probe", worst_fejer,
                                 worst_fejer != std::numeric_limits<double>::infinity()));
    suites.push_back(slack_suite("contraction-chain", worst_chain, has_star));
    {
        SuiteResult sr = slack_suite("ergodic-uniform", worst_erg_u, has_star && inputs.has_value());
        if (!erg_extra_ok && sr.status == SuiteResult::Status::Pass)
            sr.status = SuiteResult::Status::Fail;
        suites.push_back(sr);
        SuiteResult sl = slack_suite("ergodic-linear", worst_erg_l, has_star && inputs.has_value());
        if (!erg_extra_ok && sl.status == SuiteResult::Status::Pass)
            sl.status = SuiteResult::Status::Fail;
        suites.push_back(sl);
    }

    // Sampling certificates at the final horizon.
    if (acc_u.horizon() >= 1) {
        const ErgodicPoint pt = acc_u.point();
        const double radius = 2.0 * (pt.w_bar - w0).norm() + 1.0;
        const auto graph = sample_operator_graph(prob, 100, rc.seed + 7, pt.w_bar, radius);
        const double enl = check_enlargement(pt, graph);
        SuiteResult sr{"enlargement", SuiteResult::Status::Pass, enl};
        if (enl < -tol.effective_sampling()) sr.status = SuiteResult::Status::Fail;
        suites.push_back(sr);

        const Vector vy = pt.r_bar.y - prob.a_map.apply(pt.w_bar.x);
        const double sy = check_eps_subgradient(
            prob.theta, prob.f, pt.w_bar.y, vy, std::max(0.0, pt.eps_y),
            eps_subgradient_samples(pt.w_bar.y, w0.y, 100, rc.seed + 11));
        const Vector vz = pt.r_bar.z - prob.b_map.apply(pt.w_bar.x);
        const double sz = check_eps_subgradient(
            prob.phi, prob.g, pt.w_bar.z, vz, std::max(0.0, pt.eps_z),
            eps_subgradient_samples(pt.w_bar.z, w0.z, 100, rc.seed + 13));
        SuiteResult se{"eps-subgradient", SuiteResult::Status::Pass, std::min(sy, sz)};
        if (se.worst < -tol.effective_sampling()) se.status = SuiteResult::Status::Fail;
        suites.push_back(se);
    } else {
        suites.push_back({"enlargement", SuiteResult::Status::Skipped, 0.0});
        suites.push_back({"eps-subgradient", SuiteResult::Status::Skipped, 0.0});
    }

    // First-step estimates at the configured start plus a handful of others.
    if (has_star) {
        double worst = std::numeric_limits<double>::infinity();
        for (int trial = 0; trial < 6; ++trial) {
            const BlockVector start =
                trial == 0 ? w0 : random_feasible_start(prob, rc.seed + 100 + trial);
            const IterateState s1 = solver.step(solver.initial_state(start));
            const FirstStepCheck fs = check_first_step(prob, cfg, start, s1, *w_star);
            const double d1 = half_dist_sq(ops.M, s1.w, start);
            const FirstBoundCheck fb = check_d1_eta1(d1, s1.eta, fs.dist_sq, cfg.tau);
            worst = std::min({worst, fs.slack_a, fs.slack_b, fs.slack_c, fb.slack_d1,
                              fb.slack_eta1});
        }
        suites.push_back(slack_suite("first-step", worst, true));
    } else {
        suites.push_back({"first-step", SuiteResult::Status::Skipped, 0.0});
    }
    return suites;
}

inline std::vector<SuiteResult> certify_experiment(const RunConfig& rc) {
    return certify_instance(build_instance(rc), rc);
}

// ---------------------------------------------------------------------------
// Tau sweep: one row per grid point.
// ---------------------------------------------------------------------------

struct SweepRow {
    double tau = 0.0;
    int iters_to_kkt8 = -1;
    double erg_kkt = 0.0;
    double worst_slack = 0.0;
};

inline std::vector<SweepRow> sweep_tau(const RunConfig& base, double tau_min, double tau_max,
                                       double tau_step) {
    if (!(tau_step > 0.0) || !(tau_min > 0.0) || !(tau_max < tau_upper_bound()) ||
        tau_min > tau_max + 1e-15)
        throw ConfigError("invalid tau grid: need 0 < tau-min <= tau-max < 1.6180 and step > 0");
    std::vector<SweepRow> rows;
    for (double tau = tau_min; tau <= tau_max + 1e-12; tau += tau_step) {
        RunConfig rc = base;
        rc.tau = tau;
        const RunResult res = run_experiment(rc);
        SweepRow row;
        row.tau = tau;
        row.iters_to_kkt8 = res.iters_to_kkt8;
        row.erg_kkt = res.final_erg_r_norm;
        row.worst_slack = res.min_slack;
        rows.push_back(row);
    }
    return rows;
}

inline void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& os) {
    os << "tau,iters_to_kkt8,erg_kkt,worst_slack\n";
    char buf[32];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf), "%.17g", r.tau);
        os << buf << ',' << r.iters_to_kkt8 << ',';
        std::snprintf(buf, sizeof(buf), "%.17g", r.erg_kkt);
        os << buf << ',';
        std::snprintf(buf, sizeof(buf), "%.17g", r.worst_slack);
        os << buf << '\n';
    }
}

// ---------------------------------------------------------------------------
// Rate fitting over a run CSV: least-squares log-log slope of the squared
// ergodic residual bound over the tail window, and the worst measured ratio
// of the squared ergodic residual to its bound.
// ---------------------------------------------------------------------------

struct RateFit {
    double slope = 0.0;
    double max_ratio = 0.0;
    int points = 0;
};

inline RateFit fit_rate(std::istream& in) {
    std::string header;
    if (!std::getline(in, header)) throw MalformedCsv("empty csv");
    std::vector<std::string> cols;
    {
        std::istringstream hs(header);
        std::string tok;
        while (std::getline(hs, tok, ',')) cols.push_back(detail::trim(tok));
    }
    const auto col_of = [&](const std::string& name) {
        for (std::size_t i = 0; i < cols.size(); ++i)
            if (cols[i] == name) return static_cast<int>(i);
        throw MalformedCsv("csv missing column '" + name + "'");
    };
    const int c_k = col_of("k");
    const int c_rn = col_of("erg_r_norm");
    const int c_rhs = col_of("rhs_35b");

    struct Row {
        double k, rn, rhs;
    };
    std::vector<Row> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (detail::trim(line).empty()) continue;
        std::istringstream ls(line);
        std::string tok;
        std::vector<double> vals;
        while (std::getline(ls, tok, ',')) {
            try {
                std::size_t pos = 0;
                vals.push_back(std::stod(tok, &pos));
            } catch (const std::exception&) {
                throw MalformedCsv("non-numeric csv entry: " + tok);
            }
        }
        if (vals.size() != cols.size()) throw MalformedCsv("csv row has wrong arity");
        rows.push_back({vals[c_k], vals[c_rn], vals[c_rhs]});
    }
    if (rows.empty()) throw MalformedCsv("csv contains no data rows");

    double last = 0.0;
    for (const auto& r : rows) last = std::max(last, r.k);
    const double lo = std::max(10.0, last / 6.0);

    RateFit fit;
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int n = 0;
    for (const auto& r : rows) {
        if (r.rhs <= 0.0) continue;
        fit.max_ratio = std::max(fit.max_ratio, r.rn * r.rn / r.rhs);
        if (r.k < lo || r.k > last) continue;
        const double x = std::log(r.k);
        const double y = std::log(r.rhs);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    if (n < 2) throw MalformedCsv("too few rows in the fit window");
    fit.points = n;
    fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return fit;
}

}  // namespace spadmm::driver
