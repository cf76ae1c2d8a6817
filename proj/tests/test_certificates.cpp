#include <doctest.h>

#include "spadmm/certificates.hpp"
#include "spadmm/ergodic.hpp"
#include "spadmm/instances.hpp"

using namespace spadmm;

TEST_CASE("inclusion residual on the unit 1d trace") {
    const auto inst = unit_1d();
    const auto cfg = make_config(inst.problem, 1.0, 1.0, ProximalMode::None, 10);
    const Solver solver(inst.problem, cfg);
    const auto s1 = solver.step(solver.initial_state(*inst.start));
    CHECK(check_inclusion(inst.problem, s1) <= 1e-12);
}

TEST_CASE("inclusion residual at a fixed point") {
    const auto inst = gen_smooth_qp(4, 4, 2, 31);
    const auto cfg = make_config(inst.problem, 1.0, 1.0, ProximalMode::None, 5);
    const Solver solver(inst.problem, cfg);
    const auto s1 = solver.step(solver.initial_state(inst.problem.solution->w_star));
    CHECK(check_inclusion(inst.problem, s1) <= 1e-10);
}

TEST_CASE("inclusion residual stays small over a lasso run") {
    const auto inst = gen_lasso_box(6, 6, 3, 0.5, 77);
    const auto cfg = make_config(inst.problem, 1.0, 1.0, ProximalMode::Linearized, 50);
    const Solver solver(inst.problem, cfg);
    double worst = 0.0;
    solver.solve(random_feasible_start(inst.problem, 4),
                 [&](const IterateState& s) { worst = std::max(worst, check_inclusion(inst.problem, s)); });
    CHECK(worst <= 1e-8);
}

TEST_CASE("residual coupling slack on the unit 1d trace and at fixed points") {
    const auto inst = unit_1d();
    const auto cfg = make_config(inst.problem, 1.0, 1.0, ProximalMode::None, 10);
    const Solver solver(inst.problem, cfg);
    const auto s1 = solver.step(solver.initial_state(*inst.start));
    const auto s2 = solver.step(s1);
    CHECK(check_residual_coupling(inst.problem, s1, s2, cfg) == doctest::Approx(0.0).epsilon(1e-12));

    const auto f1 = solver.step(solver.initial_state(inst.problem.solution->w_star));
    const auto f2 = solver.step(f1);
    CHECK(std::abs(check_residual_coupling(inst.problem, f1, f2, cfg)) <= 1e-12);
}

TEST_CASE("residual coupling holds at a large step size") {
    const auto inst = gen_lasso_box(6, 6, 3, 0.5, 99);
    const auto cfg = make_config(inst.problem, 1.6, 1.0, ProximalMode::Linearized, 300);
    const Solver solver(inst.problem, cfg);
    double worst = 1e30;
    IterateState prev = solver.initial_state(random_feasible_start(inst.problem, 12));
    solver.solve(prev.w, [&](const IterateState& s) {
        if (s.k >= 2) worst = std::min(worst, check_residual_coupling(inst.problem, prev, s, cfg));
        prev = s;
    });
    CHECK(worst >= -1e-9);
}

TEST_CASE("hpe slack on the unit 1d transition k=1 -> 2") {
    const auto inst = unit_1d();
    const auto cfg = make_config(inst.problem, 1.0, 1.0, ProximalMode::None, 10);
    const Solver solver(inst.problem, cfg);
    const auto s1 = solver.step(solver.initial_state(*inst.start));
    const auto s2 = solver.step(s1);
    // sigma D_G(w~2, w1) = 0 and (1 - gamma) eta~1 = 0.5 * 0.25.
    CHECK(check_hpe(s1, s2, solver.ops(), solver.constants()) ==
          doctest::Approx(0.125).epsilon(1e-12));
}

TEST_CASE("hpe slack is nonnegative across instances and step sizes") {
    const std::vector<GeneratedInstance> instances = {
        gen_smooth_qp(5, 4, 3, 41), gen_lasso_box(5, 4, 3, 0.5, 41), gen_nearest_psd(3, 41)};
    for (const auto& inst : instances) {
        for (const double tau : {0.8, 1.0, 1.3, 1.6}) {
            const auto cfg = make_config(inst.problem, tau, 1.0, inst.recommended_mode, 80);
            const Solver solver(inst.problem, cfg);
            double worst = 1e30;
            IterateState prev = solver.initial_state(random_feasible_start(inst.problem, 6));
            solver.solve(prev.w, [&](const IterateState& s) {
                if (s.k >= 2) worst = std::min(worst, check_hpe(prev, s, solver.ops(), solver.constants()));
                prev = s;
            });
            CHECK(worst >= -1e-9);
        }
    }
}

TEST_CASE("contraction slack on the unit 1d transition") {
    const auto inst = unit_1d();
    const auto cfg = make_config(inst.problem, 1.0, 1.0, ProximalMode::None, 10);
    const Solver solver(inst.problem, cfg);
    const BlockVector w0 = *inst.start;
    const auto s1 = solver.step(solver.initial_state(w0));
    const auto s2 = solver.step(s1);
    const auto con = check_contraction(s1, s2, solver.ops(), solver.constants(),
                                       inst.problem.solution->w_star, w0);
    CHECK(con.slack == doctest::Approx(0.125).epsilon(1e-12));
    CHECK(con.dist_m_next == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(con.fejer_slack >= -1e-12);
}

TEST_CASE("contraction: D_M decreases with the eta corrections over a run") {
    const auto inst = gen_lasso_box(6, 6, 3, 0.5, 55);
    const auto cfg = make_config(inst.problem, 1.3, 1.0, ProximalMode::Linearized, 300);
    const Solver solver(inst.problem, cfg);
    const BlockVector w0 = random_feasible_start(inst.problem, 77);
    const BlockVector& w_star = inst.problem.solution->w_star;

    IterateState prev = solver.initial_state(w0);
    double d1_cap = 0.0;
    double worst_slack = 1e30, worst_chain = 1e30;
    double prev_lyapunov = 1e30;
    solver.solve(w0, [&](const IterateState& s) {
        if (s.k == 1) d1_cap = half_dist_sq(solver.ops().M, w_star, s.w) + s.eta;
        if (s.k >= 2) {
            const auto con = check_contraction(prev, s, solver.ops(), solver.constants(), w_star, w0);
            worst_slack = std::min(worst_slack, con.slack);
            worst_chain = std::min(worst_chain, relative_slack(con.dist_m_next, d1_cap));
            // D_M + eta is non-increasing.
            const double lyap = con.dist_m_next + s.eta;
            CHECK(lyap <= prev_lyapunov + 1e-9 * std::max(1.0, prev_lyapunov));
            prev_lyapunov = std::min(prev_lyapunov, lyap);
        } else {
            prev_lyapunov = half_dist_sq(solver.ops().M, w_star, s.w) + s.eta;
        }
        prev = s;
    });
    CHECK(worst_slack >= -1e-9);
    CHECK(worst_chain >= -1e-9);
}

TEST_CASE("fejer probe stays nonnegative at both anchor points") {
    const auto inst = gen_nearest_psd(4, 23);
    const auto cfg = make_config(inst.problem, 0.8, 1.2, ProximalMode::Linearized, 120);
    const Solver solver(inst.problem, cfg);
    const BlockVector w0 = random_feasible_start(inst.problem, 8);
    IterateState prev = solver.initial_state(w0);
    double worst = 1e30;
    solver.solve(w0, [&](const IterateState& s) {
        if (s.k >= 2) {
            worst = std::min(worst, check_fejer(prev, s, solver.ops(), solver.constants(), w0));
            worst = std::min(worst, check_fejer(prev, s, solver.ops(), solver.constants(),
                                                inst.problem.solution->w_star));
        }
        prev = s;
    });
    CHECK(worst >= -1e-9);
}

TEST_CASE("certificates run with tight declared moduli as well") {
    const auto base = gen_lasso_box(5, 5, 3, 0.5, 67);
    const SplitProblem tight =
        base.problem.with_moduli(base.problem.f.hessian, base.problem.g.hessian);
    const auto cfg = make_config(tight, 1.6, 1.0, ProximalMode::Linearized, 150);
    const Solver solver(tight, cfg);
    const BlockVector w0 = random_feasible_start(tight, 5);
    IterateState prev = solver.initial_state(w0);
    double worst = 1e30;
    double worst_inc = 0.0;
    solver.solve(w0, [&](const IterateState& s) {
        worst_inc = std::max(worst_inc, check_inclusion(tight, s));
        if (s.k >= 2) {
            worst = std::min(worst, check_hpe(prev, s, solver.ops(), solver.constants()));
            worst = std::min(worst, check_residual_coupling(tight, prev, s, cfg));
            worst = std::min(worst, check_contraction(prev, s, solver.ops(), solver.constants(),
                                                      tight.solution->w_star, w0)
                                        .slack);
        }
        prev = s;
    });
    CHECK(worst >= -1e-9);
    CHECK(worst_inc <= 1e-8);
}

TEST_CASE("certificates hold with nonzero positive definite proximal terms") {
    const auto inst = gen_smooth_qp(5, 4, 3, 83);
    const SplitProblem& prob = inst.problem;

    Lcg rng(112);
    Matrix r(5, 5);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) r(i, j) = rng.uniform(-0.5, 0.5);
    SymMatrix s_mat = gram_mtm(r);
    s_mat.add_scaled_identity(0.4);

    SolverConfig cfg;
    cfg.tau = 1.45;
    cfg.beta = 0.7;
    cfg.S = PsdOperator::dense(s_mat);
    cfg.T = PsdOperator::scaled_identity(0.9, 4);
    cfg.max_iter = 200;

    const Solver solver(prob, cfg);
    const BlockVector w0 = random_feasible_start(prob, 21);
    const BlockVector& w_star = prob.solution->w_star;

    // The solution stays a fixed point under the proximal terms.
    const auto f1 = solver.step(solver.initial_state(w_star));
    CHECK((f1.w.y - w_star.y).norm() <= 1e-10);
    CHECK((f1.w.z - w_star.z).norm() <= 1e-10);

    ErgodicAccumulator acc(prob, WeightScheme::Uniform);
    std::optional<BoundInputs> inputs;
    double worst = 1e30, worst_inc = 0.0, worst_eps = 1e30;
    IterateState prev = solver.initial_state(w0);
    solver.solve(w0, [&](const IterateState& s) {
        worst_inc = std::max(worst_inc, check_inclusion(prob, s));
        if (s.k == 1)
            inputs = compute_bound_inputs(solver.ops(), solver.constants(), w0, s, w_star);
        if (s.k >= 2) {
            worst = std::min(worst, check_hpe(prev, s, solver.ops(), solver.constants()));
            worst = std::min(worst, check_residual_coupling(prob, prev, s, cfg));
            worst = std::min(worst, check_contraction(prev, s, solver.ops(), solver.constants(),
                                                      w_star, w0)
                                        .slack);
            acc.add(s);
            const auto pt = acc.point();
            const auto es = check_ergodic_bounds(pt, *inputs, weight_stats(acc.scheme(), pt.k));
            worst = std::min({worst, es.r_norm, es.eps_sum, es.r_norm_sq});
            worst_eps = std::min({worst_eps, pt.eps_bar, pt.eps_y, pt.eps_z});
        }
        prev = s;
    });
    CHECK(worst >= -1e-9);
    CHECK(worst_inc <= 1e-8);
    CHECK(worst_eps >= -1e-12);
}

TEST_CASE("tolerance policy halves under strict mode") {
    TolerancePolicy tol;
    tol.strict = true;
    CHECK(tol.effective_inclusion() == doctest::Approx(5e-9));
    CHECK(tol.effective_slack() == doctest::Approx(5e-10));

    IterationCertificate cert;
    cert.inclusion_residual = 7e-9;
    CHECK(cert.pass(TolerancePolicy{}));
    CHECK(!cert.pass(tol));
}
