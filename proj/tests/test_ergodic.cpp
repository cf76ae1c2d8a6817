#include <doctest.h>

#include <vector>

#include "spadmm/ergodic.hpp"
#include "spadmm/instances.hpp"

using namespace spadmm;

TEST_CASE("weight schemes at small horizons") {
    const auto u4 = ergodic_weights(WeightScheme::Uniform, 4);
    REQUIRE(u4.size() == 5);
    CHECK(u4[0] == 0.0);
    for (int i = 1; i <= 4; ++i) CHECK(u4[i] == doctest::Approx(0.25));
    const auto su = weight_stats(WeightScheme::Uniform, 4);
    CHECK(su.sum_abs_diff == doctest::Approx(0.25));
    CHECK(su.last == doctest::Approx(0.25));

    const auto l3 = ergodic_weights(WeightScheme::Linear, 3);
    REQUIRE(l3.size() == 4);
    CHECK(l3[0] == 0.0);
    CHECK(l3[1] == doctest::Approx(1.0 / 6.0));
    CHECK(l3[2] == doctest::Approx(2.0 / 6.0));
    CHECK(l3[3] == doctest::Approx(3.0 / 6.0));
    const auto sl = weight_stats(WeightScheme::Linear, 3);
    CHECK(sl.sum_abs_diff == doctest::Approx(0.5));
    CHECK(sl.last == doctest::Approx(0.5));

    for (const auto scheme : {WeightScheme::Uniform, WeightScheme::Linear}) {
        const auto w1 = ergodic_weights(scheme, 1);
        REQUIRE(w1.size() == 2);
        CHECK(w1[0] == 0.0);
        CHECK(w1[1] == doctest::Approx(1.0));
        const auto s1 = weight_stats(scheme, 1);
        CHECK(s1.sum_abs_diff == doctest::Approx(1.0));
        CHECK(s1.last == doctest::Approx(1.0));
    }

    CHECK_THROWS_AS(ergodic_weights(WeightScheme::Uniform, 0), BadHorizon);
    CHECK_THROWS_AS(weight_stats(WeightScheme::Linear, 0), BadHorizon);
}

TEST_CASE("weights sum to one at large horizons") {
    for (const auto scheme : {WeightScheme::Uniform, WeightScheme::Linear}) {
        for (const int k : {7, 64, 301}) {
            const auto a = ergodic_weights(scheme, k);
            double total = 0.0;
            for (double x : a) {
                CHECK(x >= 0.0);
                total += x;
            }
            CHECK(std::abs(total - 1.0) <= 1e-14);
        }
    }
}

TEST_CASE("unit 1d ergodic point at horizon 1") {
    const auto inst = unit_1d();
    const auto cfg = make_config(inst.problem, 1.0, 1.0, ProximalMode::None, 10);
    const Solver solver(inst.problem, cfg);
    const auto s1 = solver.step(solver.initial_state(*inst.start));
    const auto s2 = solver.step(s1);

    ErgodicAccumulator acc(inst.problem, WeightScheme::Uniform);
    acc.add(s2);
    const auto pt = acc.point();
    CHECK(pt.k == 1);
    CHECK(pt.w_bar.y[0] == doctest::Approx(0.0));
    CHECK(pt.w_bar.z[0] == doctest::Approx(0.0));
    CHECK(pt.w_bar.x[0] == doctest::Approx(0.0));
    CHECK(pt.r_bar.norm() == doctest::Approx(0.0));
    CHECK(pt.eps_bar == doctest::Approx(0.0));
    CHECK(pt.eps_y == doctest::Approx(0.0));
    CHECK(pt.eps_z == doctest::Approx(0.0));
}

TEST_CASE("accumulator guards index gaps and empty queries") {
    const auto inst = unit_1d();
    const auto cfg = make_config(inst.problem, 1.0, 1.0, ProximalMode::None, 10);
    const Solver solver(inst.problem, cfg);
    const auto s1 = solver.step(solver.initial_state(*inst.start));
    const auto s2 = solver.step(s1);
    const auto s3 = solver.step(s2);

    ErgodicAccumulator acc(inst.problem, WeightScheme::Uniform);
    CHECK_THROWS_AS(acc.point(), EmptyAccumulator);
    CHECK_THROWS_AS(acc.add(s3), IndexGap);
    acc.add(s2);
    CHECK_THROWS_AS(acc.add(s2), IndexGap);
    acc.add(s3);
    CHECK(acc.horizon() == 2);
}

TEST_CASE("streaming accumulator matches direct re-summation") {
    const auto inst = gen_lasso_box(5, 4, 3, 0.5, 3);
    const auto cfg = make_config(inst.problem, 1.3, 1.0, ProximalMode::Linearized, 51);
    const Solver solver(inst.problem, cfg);
    const auto traj = solver.solve(random_feasible_start(inst.problem, 2));
    REQUIRE(traj.size() >= 51);

    for (const auto scheme : {WeightScheme::Uniform, WeightScheme::Linear}) {
        for (const std::size_t upto : {std::size_t{21}, traj.size()}) {
            ErgodicAccumulator acc(inst.problem, scheme);
            for (std::size_t i = 1; i < upto; ++i) acc.add(traj[i]);
            const auto pt = acc.point();
            const int k = pt.k;

            // Direct O(k^2) evaluation from the stored trajectory.
            const auto alpha = ergodic_weights(scheme, k);
            BlockVector w_bar(5, 4, 3), r_bar(5, 4, 3);
            for (int i = 1; i <= k; ++i) {
                w_bar += alpha[i] * traj[static_cast<std::size_t>(i)].w_tilde;
                r_bar += alpha[i] * traj[static_cast<std::size_t>(i)].r;
            }
            double eps = 0.0, eps_y = 0.0, eps_z = 0.0;
            for (int i = 1; i <= k; ++i) {
                const auto& s = traj[static_cast<std::size_t>(i)];
                eps += alpha[i] * (s.w_tilde - w_bar).dot(s.r - r_bar);
                eps_y += alpha[i] *
                         (s.w.y - w_bar.y).dot(s.r.y - inst.problem.a_map.apply(s.x_tilde));
                eps_z += alpha[i] *
                         (s.w.z - w_bar.z).dot(s.r.z - inst.problem.b_map.apply(s.x_tilde));
            }

            CHECK((pt.w_bar - w_bar).norm() <= 1e-12 * std::max(1.0, w_bar.norm()));
            CHECK((pt.r_bar - r_bar).norm() <= 1e-12 * std::max(1.0, r_bar.norm()));
            CHECK(pt.eps_bar == doctest::Approx(eps).epsilon(1e-10));
            CHECK(pt.eps_y == doctest::Approx(eps_y).epsilon(1e-10));
            CHECK(pt.eps_z == doctest::Approx(eps_z).epsilon(1e-10));
        }
    }
}

TEST_CASE("block gap identity eps_y + eps_z = eps over a lasso run") {
    const auto inst = gen_lasso_box(6, 6, 3, 0.5, 101);
    const auto cfg = make_config(inst.problem, 1.0, 1.0, ProximalMode::Linearized, 101);
    const Solver solver(inst.problem, cfg);
    ErgodicAccumulator acc(inst.problem, WeightScheme::Uniform);
    solver.solve(random_feasible_start(inst.problem, 11), [&](const IterateState& s) {
        if (s.k >= 2) acc.add(s);
    });
    // The run may stop early on the pointwise tolerance; the identity holds at
    // whatever horizon was reached.
    REQUIRE(acc.horizon() >= 30);
    const auto pt = acc.point();
    CHECK(std::abs(pt.eps_y + pt.eps_z - pt.eps_bar) <= 1e-9 * std::max(1.0, pt.eps_bar));
    CHECK(pt.eps_bar >= -1e-12);
    CHECK(pt.eps_y >= -1e-12);
    CHECK(pt.eps_z >= -1e-12);
}

TEST_CASE("bound right-hand sides at hand-evaluated inputs") {
    BoundInputs in;
    in.d_star = 1.0;
    in.d_1 = 1.0;
    in.eta_1 = 0.25;
    in.norm_G = 1.0;
    in.norm_G_wstar = 0.0;
    in.sigma_tau = 0.5;
    WeightStats st;
    st.k = 10;
    st.sum_abs_diff = 0.1;
    st.last = 0.1;

    const auto rhs = bound_rhs(in, st);
    CHECK(rhs.rhs_29b == doctest::Approx(0.6).epsilon(1e-14));
    CHECK(rhs.rhs_35a == doctest::Approx(5.85).epsilon(1e-14));
    CHECK(rhs.rhs_35b == doctest::Approx(0.36).epsilon(1e-14));
    CHECK(rhs.rhs_35b == doctest::Approx(rhs.rhs_29b * rhs.rhs_29b).epsilon(1e-14));
    CHECK(rhs.remark_M_over_k == doctest::Approx(11.7).epsilon(1e-14));
    CHECK(rhs.remark_C_over_k2 == doctest::Approx(1.44).epsilon(1e-14));
}

TEST_CASE("linear weights reproduce the k+1 envelope constant") {
    BoundInputs in;
    in.d_star = 0.7;
    in.d_1 = 0.3;
    in.eta_1 = 0.1;
    in.norm_G = 2.0;
    in.norm_G_wstar = 0.9;
    in.sigma_tau = 0.6;
    const int k = 17;
    const auto st = weight_stats(WeightScheme::Linear, k);
    const auto rhs = bound_rhs(in, st);
    const double a = std::sqrt(in.norm_G * (in.d_star + in.d_1 + in.eta_1));
    const double envelope = 64.0 * (a + 0.5 * in.norm_G_wstar) * (a + 0.5 * in.norm_G_wstar) /
                            (static_cast<double>(k + 1) * (k + 1));
    CHECK(rhs.rhs_35b == doctest::Approx(envelope).epsilon(1e-12));
}

TEST_CASE("uniform bound is always covered by the envelope constant") {
    BoundInputs in;
    in.d_star = 1.3;
    in.d_1 = 0.2;
    in.eta_1 = 0.05;
    in.norm_G = 1.7;
    in.norm_G_wstar = 0.4;
    in.sigma_tau = 0.8;
    for (const int k : {1, 5, 50, 300}) {
        const auto rhs = bound_rhs(in, weight_stats(WeightScheme::Uniform, k));
        CHECK(rhs.rhs_35b <= rhs.remark_C_over_k2 * (1.0 + 1e-12));
        CHECK(rhs.rhs_35a <= rhs.remark_M_over_k * (1.0 + 1e-12));
    }
}

TEST_CASE("ergodic bounds hold over a short lasso run") {
    const auto inst = gen_lasso_box(6, 6, 3, 0.5, 19);
    const auto cfg = make_config(inst.problem, 1.6, 1.0, ProximalMode::Linearized, 80);
    const Solver solver(inst.problem, cfg);
    const BlockVector w0 = random_feasible_start(inst.problem, 9);
    const BlockVector& w_star = inst.problem.solution->w_star;

    ErgodicAccumulator acc(inst.problem, WeightScheme::Uniform);
    std::optional<BoundInputs> inputs;
    double worst = 1e30;
    solver.solve(w0, [&](const IterateState& s) {
        if (s.k == 1)
            inputs = compute_bound_inputs(solver.ops(), solver.constants(), w0, s, w_star);
        if (s.k >= 2) {
            acc.add(s);
            const auto pt = acc.point();
            const auto es = check_ergodic_bounds(pt, *inputs, weight_stats(acc.scheme(), pt.k));
            worst = std::min({worst, es.r_norm, es.eps_sum, es.r_norm_sq, es.remark_eps,
                              es.remark_dist});
        }
    });
    CHECK(worst >= -1e-9);
}

TEST_CASE("enlargement certificate against sampled graph points") {
    const auto inst = gen_lasso_box(6, 6, 3, 0.5, 29);
    const auto cfg = make_config(inst.problem, 1.3, 1.0, ProximalMode::Linearized, 120);
    const Solver solver(inst.problem, cfg);
    const BlockVector w0 = random_feasible_start(inst.problem, 15);
    ErgodicAccumulator acc(inst.problem, WeightScheme::Uniform);
    solver.solve(w0, [&](const IterateState& s) {
        if (s.k >= 2) acc.add(s);
    });
    const auto pt = acc.point();
    const auto samples = sample_operator_graph(inst.problem, 100, 31337, pt.w_bar,
                                               2.0 * (pt.w_bar - w0).norm() + 1.0);
    CHECK(check_enlargement(pt, samples) >= -1e-8);
}

TEST_CASE("graph samples really lie in the operator graph") {
    const auto inst = gen_nearest_psd(3, 7);
    const auto samples = sample_operator_graph(
        inst.problem, 20, 99,
        BlockVector(Vector(inst.problem.dim_y()), Vector(inst.problem.dim_z()),
                    Vector(inst.problem.dim_x())),
        2.0);
    for (const auto& gs : samples) {
        // v_1 - grad f(y) - A x must be a subgradient of theta at y, etc.
        const Vector vy = gs.v.y - inst.problem.f.gradient(gs.w.y) - inst.problem.a_map.apply(gs.w.x);
        CHECK(inst.problem.theta.dist_to_subdifferential(gs.w.y, vy) <= 1e-8);
        const Vector vz = gs.v.z - inst.problem.g.gradient(gs.w.z) - inst.problem.b_map.apply(gs.w.x);
        CHECK(inst.problem.phi.dist_to_subdifferential(gs.w.z, vz) <= 1e-8);
        const Vector expect_x = inst.problem.c - inst.problem.a_map.apply_adjoint(gs.w.y) -
                                inst.problem.b_map.apply_adjoint(gs.w.z);
        CHECK((gs.v.x - expect_x).norm() <= 1e-12);
    }
}

TEST_CASE("zero residuals give a zero ergodic point") {
    const auto inst = gen_smooth_qp(4, 3, 2, 3);
    const auto cfg = make_config(inst.problem, 1.0, 1.0, ProximalMode::None, 40);
    const Solver solver(inst.problem, cfg);
    const BlockVector& w_star = inst.problem.solution->w_star;
    ErgodicAccumulator acc(inst.problem, WeightScheme::Linear);
    int steps = 0;
    solver.solve(w_star, [&](const IterateState& s) {
        ++steps;
        if (s.k >= 2) acc.add(s);
    });
    // Started at the solution: converged immediately, residuals all zero.
    if (acc.horizon() >= 1) {
        const auto pt = acc.point();
        CHECK(pt.r_bar.norm() <= 1e-12);
        CHECK(std::abs(pt.eps_bar) <= 1e-12);
    }
    CHECK(steps >= 1);
}
