#include <doctest.h>

#include "spadmm/instances.hpp"

using namespace spadmm;

TEST_CASE("planted residuals are tiny for every family") {
    const auto lasso = gen_lasso_box(8, 8, 4, 0.5, 42);
    CHECK(kkt_residual(lasso.problem, lasso.problem.solution->w_star).total <= 1e-10);
    CHECK(lasso.problem.solution->unique);

    const auto qp = gen_smooth_qp(6, 6, 3, 7);
    CHECK(kkt_residual(qp.problem, qp.problem.solution->w_star).total <= 1e-10);
    CHECK(qp.problem.solution->unique);

    const auto cone = gen_nearest_psd(4, 11);
    CHECK(kkt_residual(cone.problem, cone.problem.solution->w_star).total <= 1e-10);
    CHECK(cone.problem.solution->unique);
}

TEST_CASE("generators are deterministic in the seed") {
    const auto a = gen_lasso_box(5, 4, 3, 0.7, 123);
    const auto b = gen_lasso_box(5, 4, 3, 0.7, 123);
    CHECK(a.problem.c.data().size() == b.problem.c.data().size());
    for (int i = 0; i < a.problem.c.dim(); ++i) CHECK(a.problem.c[i] == b.problem.c[i]);
    for (int i = 0; i < 5; ++i)
        CHECK(a.problem.solution->w_star.y[i] == b.problem.solution->w_star.y[i]);
    const SymMatrix pa = a.problem.f.hessian.to_dense();
    const SymMatrix pb = b.problem.f.hessian.to_dense();
    CHECK(pa == pb);

    const auto c = gen_lasso_box(5, 4, 3, 0.7, 124);
    CHECK(c.problem.c[0] != a.problem.c[0]);
}

TEST_CASE("generator parameter validation") {
    CHECK_THROWS_AS(gen_lasso_box(4, 4, 2, 0.0, 1), BadParameter);
    CHECK_THROWS_AS(gen_lasso_box(4, 4, 2, -0.5, 1), BadParameter);
    CHECK_THROWS_AS(gen_lasso_box(0, 4, 2, 0.5, 1), BadParameter);
    CHECK_THROWS_AS(gen_lasso_box(513, 4, 2, 0.5, 1), BadParameter);
    CHECK_THROWS_AS(gen_smooth_qp(4, 0, 2, 1), BadParameter);
    CHECK_THROWS_AS(gen_nearest_psd(0, 1), BadParameter);
    CHECK_THROWS_AS(gen_nearest_psd(13, 1), BadParameter);
}

TEST_CASE("nearest psd instance from a hand matrix") {
    SymMatrix d(2);
    d.set(0, 0, 1.0);
    d.set(1, 1, -2.0);
    const auto inst = make_nearest_psd_from(d, 0);
    SymMatrix y_expect(2);
    y_expect.set(0, 0, 1.0);
    SymMatrix x_expect(2);
    x_expect.set(1, 1, 2.0);
    const Vector y_packed = pack_sym(y_expect);
    const Vector x_packed = pack_sym(x_expect);
    const auto& w_star = inst.problem.solution->w_star;
    for (int i = 0; i < y_packed.dim(); ++i) {
        CHECK(w_star.y[i] == doctest::Approx(y_packed[i]).epsilon(1e-12));
        CHECK(w_star.z[i] == doctest::Approx(y_packed[i]).epsilon(1e-12));
        CHECK(w_star.x[i] == doctest::Approx(x_packed[i]).epsilon(1e-12));
    }
}

TEST_CASE("nearest psd is a no-op for PSD inputs") {
    SymMatrix d(3);
    d.set(0, 0, 1.0);
    d.set(1, 1, 0.5);
    d.set(2, 2, 2.0);
    d.set(0, 1, 0.1);
    const auto inst = make_nearest_psd_from(d, 0);
    const Vector d_packed = pack_sym(d);
    const auto& w_star = inst.problem.solution->w_star;
    for (int i = 0; i < d_packed.dim(); ++i) {
        CHECK(w_star.y[i] == doctest::Approx(d_packed[i]).epsilon(1e-11));
        CHECK(w_star.x[i] == doctest::Approx(0.0).epsilon(1e-11));
    }
}

TEST_CASE("generated nearest psd instances have indefinite data") {
    for (const std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        const auto inst = gen_nearest_psd(4, seed);
        // x* = clip(D) - D is nonzero exactly when D had a negative eigenvalue.
        CHECK(inst.problem.solution->w_star.x.norm() > 1e-6);
    }
}

TEST_CASE("unit 1d matches its hand-derived data") {
    const auto inst = unit_1d();
    CHECK(inst.problem.dim_y() == 1);
    CHECK(inst.problem.dim_z() == 1);
    CHECK(inst.problem.dim_x() == 1);
    CHECK(inst.problem.c[0] == 0.0);
    CHECK(inst.problem.f.linear[0] == 0.0);
    CHECK(inst.problem.solution->w_star.y[0] == 0.0);
    REQUIRE(inst.start.has_value());
    CHECK(inst.start->y[0] == 1.0);
}

TEST_CASE("solver recovers the planted lasso solution") {
    const auto inst = gen_lasso_box(8, 8, 4, 0.5, 42);
    const auto cfg = make_config(inst.problem, 1.0, 1.0, ProximalMode::Linearized, 2000);
    const Solver solver(inst.problem, cfg);
    const auto traj = solver.solve(random_feasible_start(inst.problem, 43));
    REQUIRE(!traj.empty());
    const auto& last = traj.back();
    CHECK(kkt_residual(inst.problem, last.w).total <= 1e-8);
    const auto& w_star = inst.problem.solution->w_star;
    CHECK((last.w.y - w_star.y).norm() <= 1e-6);
    CHECK((last.w.z - w_star.z).norm() <= 1e-6);
}

TEST_CASE("random feasible starts are feasible") {
    const auto cone = gen_nearest_psd(4, 5);
    const BlockVector w0 = random_feasible_start(cone.problem, 17);
    CHECK(cone.problem.theta.in_domain(w0.y));
    CHECK(cone.problem.phi.in_domain(w0.z));

    const auto lasso = gen_lasso_box(5, 5, 3, 0.5, 5);
    const BlockVector w1 = random_feasible_start(lasso.problem, 17);
    CHECK(lasso.problem.theta.in_domain(w1.y));
}
