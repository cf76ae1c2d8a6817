#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <utility>

#include "spadmm/solver.hpp"

namespace spadmm {

// ---------------------------------------------------------------------------
// Desk-scale instance generators. Every instance is planted: the KKT point is
// chosen first and the problem data back-solved from it, so d*, ||G(w*)|| and
// the contraction targets are known exactly and no test depends on the solver
// to produce its own reference solution.
// ---------------------------------------------------------------------------

struct GeneratedInstance {
    SplitProblem problem;
    SolverConfig recommended_config;
    ProximalMode recommended_mode = ProximalMode::None;
    std::string name;
    std::uint64_t seed = 0;
    std::optional<BlockVector> start;  // canonical starting point, when the instance has one
};

namespace detail {

inline constexpr int kMaxBlockDim = 512;
inline constexpr double kPlantedResidualTol = 1e-10;

inline Matrix random_matrix(Lcg& rng, int rows, int cols, double scale) {
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = scale * rng.uniform(-1.0, 1.0);
    return m;
}

inline SymMatrix random_spd(Lcg& rng, int n, double entry_scale) {
    // R^T R + I; entry_scale 1/sqrt(n) keeps the spectrum O(1), entry_scale 1
    // gives condition numbers around n.
    const Matrix r = random_matrix(rng, n, n, entry_scale);
    SymMatrix p = gram_mtm(r);
    p.add_scaled_identity(1.0);
    return p;
}

inline double min_eigenvalue(const SymMatrix& m) {
    if (m.dim() <= 64) return jacobi_eigendecomposition(m).eigenvalues[0];
    // Shifted power iteration for larger blocks.
    const double shift = m.gershgorin_upper();
    SymMatrix shifted = SymMatrix::scaled_identity(shift, m.dim());
    shifted.add_scaled(m, -1.0);
    return shift - power_iteration_norm(shifted);
}

inline void require_planted(const SplitProblem& prob) {
    const auto res = kkt_residual(prob, prob.solution->w_star);
    if (res.total > kPlantedResidualTol)
        throw Error("instance generator: planted point fails the KKT check");
}

}  // namespace detail

/// Box-constrained quadratic (y-block) coupled to an l1-regularized quadratic
/// (z-block). Both quadratics are strictly positive definite, the stacked map
/// x -> (A x, B x) is injective, the planted y* sits strictly inside the box
/// and z* has no zero entries, so the KKT point is unique.
inline GeneratedInstance gen_lasso_box(int dim_y, int dim_z, int dim_x, double mu,
                                       std::uint64_t seed) {
    using detail::kMaxBlockDim;
    if (dim_y < 1 || dim_z < 1 || dim_x < 1 || dim_y > kMaxBlockDim || dim_z > kMaxBlockDim ||
        dim_x > kMaxBlockDim)
        throw BadParameter("gen_lasso_box: block dimensions must be in [1, 512]");
    if (mu <= 0.0) throw BadParameter("gen_lasso_box: mu must be positive");

    Lcg rng(seed * 0x9e3779b97f4a7c15ULL + 0x1a2b3c4dULL);
    const SymMatrix p_mat = detail::random_spd(rng, dim_y, 1.5);
    const SymMatrix q_mat = detail::random_spd(rng, dim_z, 1.5);

    Matrix a_star, b_star;
    bool injective = false;
    for (int attempt = 0; attempt < 50 && !injective; ++attempt) {
        a_star = detail::random_matrix(rng, dim_x, dim_y, 1.0 / std::sqrt(static_cast<double>(dim_y)));
        b_star = detail::random_matrix(rng, dim_x, dim_z, 1.0 / std::sqrt(static_cast<double>(dim_z)));
        SymMatrix stacked = gram_mmt(a_star);
        stacked.add_scaled(gram_mmt(b_star), 1.0);
        injective = detail::min_eigenvalue(stacked) >= 1e-6;
    }
    if (!injective) throw ResampleExhausted("gen_lasso_box: stacked map never became injective");

    Vector lo(dim_y), hi(dim_y), y_star(dim_y);
    for (int i = 0; i < dim_y; ++i) {
        lo[i] = -1.0;
        hi[i] = 1.0;
        y_star[i] = rng.uniform(-0.8, 0.8);
    }
    Vector z_star(dim_z), sign_z(dim_z);
    for (int i = 0; i < dim_z; ++i) {
        sign_z[i] = rng.uniform() < 0.5 ? -1.0 : 1.0;
        z_star[i] = sign_z[i] * rng.uniform(0.1, 1.0);
    }
    Vector x_star(dim_x);
    for (int i = 0; i < dim_x; ++i) x_star[i] = rng.uniform(-1.0, 1.0);

    LinearMap a_map(a_star), b_map(b_star);
    const Vector c = a_map.apply_adjoint(y_star) + b_map.apply_adjoint(z_star);
    const Vector p_lin = -(p_mat.apply(y_star) + a_map.apply(x_star));
    Vector q_lin = -(q_mat.apply(z_star) + b_map.apply(x_star) + mu * sign_z);

    GeneratedInstance inst{
        SplitProblem(NonsmoothOracle::box(lo, hi), SmoothQuadratic(PsdOperator::dense(p_mat), p_lin),
                     NonsmoothOracle::l1(mu, dim_z), SmoothQuadratic(PsdOperator::dense(q_mat), q_lin),
                     a_map, b_map, c, SolutionInfo{BlockVector(y_star, z_star, x_star), true}),
        SolverConfig{},
        ProximalMode::Linearized,
        "lasso_box",
        seed,
        std::nullopt};
    inst.recommended_config = make_config(inst.problem, 1.0, 1.0, ProximalMode::Linearized, 300);
    detail::require_planted(inst.problem);
    return inst;
}

/// Unconstrained strictly convex QP on both blocks; the classic configuration
/// with S = T = 0 and exact Cholesky subproblem solves.
inline GeneratedInstance gen_smooth_qp(int dim_y, int dim_z, int dim_x, std::uint64_t seed) {
    using detail::kMaxBlockDim;
    if (dim_y < 1 || dim_z < 1 || dim_x < 1 || dim_y > kMaxBlockDim || dim_z > kMaxBlockDim ||
        dim_x > kMaxBlockDim)
        throw BadParameter("gen_smooth_qp: block dimensions must be in [1, 512]");

    Lcg rng(seed * 0x9e3779b97f4a7c15ULL + 0x5f6e7d8cULL);
    const SymMatrix p_mat = detail::random_spd(rng, dim_y, 1.0 / std::sqrt(static_cast<double>(dim_y)));
    const SymMatrix q_mat = detail::random_spd(rng, dim_z, 1.0 / std::sqrt(static_cast<double>(dim_z)));

    Matrix a_star, b_star;
    bool injective = false;
    for (int attempt = 0; attempt < 50 && !injective; ++attempt) {
        a_star = detail::random_matrix(rng, dim_x, dim_y, 1.0 / std::sqrt(static_cast<double>(dim_y)));
        b_star = detail::random_matrix(rng, dim_x, dim_z, 1.0 / std::sqrt(static_cast<double>(dim_z)));
        SymMatrix stacked = gram_mmt(a_star);
        stacked.add_scaled(gram_mmt(b_star), 1.0);
        injective = detail::min_eigenvalue(stacked) >= 1e-6;
    }
    if (!injective) throw ResampleExhausted("gen_smooth_qp: stacked map never became injective");

    Vector y_star(dim_y), z_star(dim_z), x_star(dim_x);
    for (int i = 0; i < dim_y; ++i) y_star[i] = rng.uniform(-1.0, 1.0);
    for (int i = 0; i < dim_z; ++i) z_star[i] = rng.uniform(-1.0, 1.0);
    for (int i = 0; i < dim_x; ++i) x_star[i] = rng.uniform(-1.0, 1.0);

    LinearMap a_map(a_star), b_map(b_star);
    const Vector c = a_map.apply_adjoint(y_star) + b_map.apply_adjoint(z_star);
    const Vector p_lin = -(p_mat.apply(y_star) + a_map.apply(x_star));
    const Vector q_lin = -(q_mat.apply(z_star) + b_map.apply(x_star));

    GeneratedInstance inst{
        SplitProblem(NonsmoothOracle::zero(dim_y), SmoothQuadratic(PsdOperator::dense(p_mat), p_lin),
                     NonsmoothOracle::zero(dim_z), SmoothQuadratic(PsdOperator::dense(q_mat), q_lin),
                     a_map, b_map, c, SolutionInfo{BlockVector(y_star, z_star, x_star), true}),
        SolverConfig{},
        ProximalMode::None,
        "smooth_qp",
        seed,
        std::nullopt};
    inst.recommended_config = make_config(inst.problem, 1.0, 1.0, ProximalMode::None, 300);
    detail::require_planted(inst.problem);
    return inst;
}

/// Nearest-PSD-matrix splitting instance for a given symmetric D:
///   min  delta_PSD(Y) + (1/2) ||Z - D||^2   s.t.  Y - Z = 0
/// over packed symmetric vectors, with the analytic solution
/// Y* = Z* = clip(D) (eigenvalue clipping) and x* = Z* - D.
inline GeneratedInstance make_nearest_psd_from(const SymMatrix& d, std::uint64_t seed_label) {
    const int p = d.dim();
    if (p < 1 || p > 12) throw BadParameter("nearest_psd: order must be in [1, 12]");
    const int dim = packed_sym_dim(p);

    const auto eig = jacobi_eigendecomposition(d);
    SymMatrix clipped(p);
    for (int k = 0; k < p; ++k) {
        const double lam = std::max(0.0, eig.eigenvalues[k]);
        if (lam == 0.0) continue;
        for (int i = 0; i < p; ++i)
            for (int j = 0; j <= i; ++j)
                clipped.add(i, j, lam * eig.eigenvectors(i, k) * eig.eigenvectors(j, k));
    }
    const Vector d_packed = pack_sym(d);
    const Vector z_star = pack_sym(clipped);
    const Vector x_star = z_star - d_packed;

    GeneratedInstance inst{
        SplitProblem(NonsmoothOracle::psd_cone(p), SmoothQuadratic::zero(dim),
                     NonsmoothOracle::zero(dim),
                     SmoothQuadratic(PsdOperator::identity(dim), -d_packed),
                     LinearMap(Matrix::identity(dim)), LinearMap(Matrix::scaled_identity(-1.0, dim)),
                     Vector(dim), SolutionInfo{BlockVector(z_star, z_star, x_star), true}),
        SolverConfig{},
        ProximalMode::Linearized,
        "nearest_psd",
        seed_label,
        std::nullopt};
    inst.recommended_config = make_config(inst.problem, 1.0, 1.0, ProximalMode::Linearized, 300);
    detail::require_planted(inst.problem);
    return inst;
}

inline GeneratedInstance gen_nearest_psd(int p, std::uint64_t seed) {
    if (p < 1 || p > 12) throw BadParameter("gen_nearest_psd: order must be in [1, 12]");
    Lcg rng(seed * 0x9e3779b97f4a7c15ULL + 0x77e5d4c3ULL);
    SymMatrix d(p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j <= i; ++j) d.set(i, j, rng.uniform(-1.0, 1.0));
    const double min_eig = jacobi_eigendecomposition(d).eigenvalues[0];
    if (min_eig >= -1e-3) d.add_scaled_identity(-(min_eig + 1.0));
    return make_nearest_psd_from(d, seed);
}

/// The one-dimensional worked example: P = Q = 1, A* = B* = 1, c = 0,
/// p = q = 0, solution (0, 0, 0), canonical start (1, 1, 1).
inline GeneratedInstance unit_1d() {
    Matrix one(1, 1);
    one(0, 0) = 1.0;
    GeneratedInstance inst{
        SplitProblem(NonsmoothOracle::zero(1),
                     SmoothQuadratic(PsdOperator::identity(1), Vector(1)), NonsmoothOracle::zero(1),
                     SmoothQuadratic(PsdOperator::identity(1), Vector(1)), LinearMap(one),
                     LinearMap(one), Vector(1),
                     SolutionInfo{BlockVector(Vector(1), Vector(1), Vector(1)), true}),
        SolverConfig{},
        ProximalMode::None,
        "unit_1d",
        0,
        BlockVector(Vector{1.0}, Vector{1.0}, Vector{1.0})};
    inst.recommended_config = make_config(inst.problem, 1.0, 1.0, ProximalMode::None, 100);
    detail::require_planted(inst.problem);
    return inst;
}

/// Deterministic feasible starting point: uniform draws projected onto the
/// oracle domains.
inline BlockVector random_feasible_start(const SplitProblem& prob, std::uint64_t seed) {
    Lcg rng(seed * 0x9e3779b97f4a7c15ULL + 0x0ddba11ULL);
    Vector y(prob.dim_y()), z(prob.dim_z()), x(prob.dim_x());
    for (int i = 0; i < y.dim(); ++i) y[i] = rng.uniform(-1.0, 1.0);
    for (int i = 0; i < z.dim(); ++i) z[i] = rng.uniform(-1.0, 1.0);
    for (int i = 0; i < x.dim(); ++i) x[i] = rng.uniform(-1.0, 1.0);
    return BlockVector(prob.theta.project(y), prob.phi.project(z), x);
}

}  // namespace spadmm
