#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "spadmm/linalg.hpp"

namespace spadmm {

// ---------------------------------------------------------------------------
// Nonsmooth oracle: one of the four closed proper convex functions the solver
// supports, with exact prox and subdifferential-distance queries.
//
//   Zero     -- the zero function
//   L1       -- mu * ||.||_1
//   Box      -- indicator of [lo, hi]
//   PsdCone  -- indicator of the PSD cone over packed symmetric vectors
// ---------------------------------------------------------------------------

enum class OracleKind { Zero, L1, Box, PsdCone };

class NonsmoothOracle {
public:
    /// Empty placeholder (dimension 0); real oracles come from the factories.
    NonsmoothOracle() : kind_(OracleKind::Zero), dim_(0) {}

    static NonsmoothOracle zero(int dim) { return NonsmoothOracle(OracleKind::Zero, dim); }

    static NonsmoothOracle l1(double mu, int dim) {
        if (mu <= 0.0) throw BadParameter("l1 oracle requires mu > 0");
        NonsmoothOracle o(OracleKind::L1, dim);
        o.mu_ = mu;
        return o;
    }

    static NonsmoothOracle box(Vector lo, Vector hi) {
        if (lo.dim() != hi.dim()) throw DimensionMismatch("box oracle: bound dimensions differ");
        for (int i = 0; i < lo.dim(); ++i) {
            if (lo[i] > hi[i]) throw BadParameter("box oracle requires lo <= hi");
        }
        NonsmoothOracle o(OracleKind::Box, lo.dim());
        o.lo_ = std::move(lo);
        o.hi_ = std::move(hi);
        return o;
    }

    static NonsmoothOracle psd_cone(int p) {
        if (p <= 0) throw BadParameter("psd cone oracle requires p >= 1");
        NonsmoothOracle o(OracleKind::PsdCone, packed_sym_dim(p));
        o.order_ = p;
        return o;
    }

    OracleKind kind() const { return kind_; }
    int dim() const { return dim_; }
    double mu() const { return mu_; }
    int cone_order() const { return order_; }

    bool in_domain(const Vector& v) const {
        check_dim(v);
        switch (kind_) {
            case OracleKind::Zero:
            case OracleKind::L1:
                return true;
            case OracleKind::Box: {
                for (int i = 0; i < dim_; ++i) {
                    const double tol = feas_tol(i);
                    if (v[i] < lo_[i] - tol || v[i] > hi_[i] + tol) return false;
                }
                return true;
            }
            case OracleKind::PsdCone: {
                const auto eig = jacobi_eigendecomposition(unpack_sym(v, order_));
                return eig.eigenvalues[0] >= -1e-9 * std::max(1.0, v.norm());
            }
        }
        return false;
    }

    double value(const Vector& v) const {
        check_dim(v);
        switch (kind_) {
            case OracleKind::Zero:
                return 0.0;
            case OracleKind::L1: {
                double s = 0.0;
                for (int i = 0; i < dim_; ++i) s += std::abs(v[i]);
                return mu_ * s;
            }
            case OracleKind::Box:
            case OracleKind::PsdCone:
                return in_domain(v) ? 0.0 : std::numeric_limits<double>::infinity();
        }
        return 0.0;
    }

    /// Projection onto the effective domain (identity for Zero/L1).
    Vector project(const Vector& v) const {
        check_dim(v);
        switch (kind_) {
            case OracleKind::Zero:
            case OracleKind::L1:
                return v;
            case OracleKind::Box:
            case OracleKind::PsdCone:
                return prox(v, 1.0);
        }
        return v;
    }

    /// argmin_u  oracle(u) + (lambda/2) ||u - v||^2, in closed form.
    Vector prox(const Vector& v, double lambda) const {
        check_dim(v);
        if (lambda <= 0.0) throw BadLambda("prox requires lambda > 0");
        switch (kind_) {
            case OracleKind::Zero:
                return v;
            case OracleKind::L1: {
                const double t = mu_ / lambda;
                Vector u(dim_);
                for (int i = 0; i < dim_; ++i) {
                    if (v[i] > t)
                        u[i] = v[i] - t;
                    else if (v[i] < -t)
                        u[i] = v[i] + t;
                    else
                        u[i] = 0.0;
                }
                return u;
            }
            case OracleKind::Box: {
                Vector u(dim_);
                for (int i = 0; i < dim_; ++i) u[i] = std::clamp(v[i], lo_[i], hi_[i]);
                return u;
            }
            case OracleKind::PsdCone: {
                const auto eig = jacobi_eigendecomposition(unpack_sym(v, order_));
                SymMatrix out(order_);
                for (int k = 0; k < order_; ++k) {
                    const double lam = std::max(0.0, eig.eigenvalues[k]);
                    if (lam == 0.0) continue;
                    for (int i = 0; i < order_; ++i)
                        for (int j = 0; j <= i; ++j)
                            out.add(i, j, lam * eig.eigenvectors(i, k) * eig.eigenvectors(j, k));
                }
                return pack_sym(out);
            }
        }
        return v;
    }

    /// Euclidean distance from v to the subdifferential of the oracle at `point`.
    /// `point` must lie in the effective domain (up to the feasibility tolerance).
    double dist_to_subdifferential(const Vector& point, const Vector& v) const {
        check_dim(point);
        check_dim(v);
        if (!in_domain(point))
            throw PointOutsideDomain("dist_to_subdifferential: point outside oracle domain");
        switch (kind_) {
            case OracleKind::Zero:
                return v.norm();
            case OracleKind::L1: {
                // At zero coordinates the subdifferential is [-mu, mu]; elsewhere
                // it is the singleton { mu * sign }.
                const double zero_tol = 1e-9 * point.inf_norm() + 1e-12;
                double s = 0.0;
                for (int i = 0; i < dim_; ++i) {
                    double d;
                    if (std::abs(point[i]) <= zero_tol)
                        d = std::max(0.0, std::abs(v[i]) - mu_);
                    else
                        d = std::abs(v[i] - mu_ * (point[i] > 0.0 ? 1.0 : -1.0));
                    s += d * d;
                }
                return std::sqrt(s);
            }
            case OracleKind::Box: {
                // Coordinate-wise normal cone: (-inf,0] when the lower bound is
                // active, [0,inf) at the upper bound, R when both, {0} inside.
                double s = 0.0;
                for (int i = 0; i < dim_; ++i) {
                    const double tol = feas_tol(i);
                    const bool lo_active = point[i] <= lo_[i] + tol;
                    const bool hi_active = point[i] >= hi_[i] - tol;
                    double d = 0.0;
                    if (lo_active && hi_active)
                        d = 0.0;
                    else if (lo_active)
                        d = std::max(0.0, v[i]);
                    else if (hi_active)
                        d = std::max(0.0, -v[i]);
                    else
                        d = std::abs(v[i]);
                    s += d * d;
                }
                return std::sqrt(s);
            }
            case OracleKind::PsdCone:
                return psd_normal_cone_distance(point, v);
        }
        return 0.0;
    }

private:
    NonsmoothOracle(OracleKind kind, int dim) : kind_(kind), dim_(dim) {
        if (dim <= 0) throw BadParameter("oracle dimension must be positive");
    }

    void check_dim(const Vector& v) const {
        if (v.dim() != dim_) throw DimensionMismatch("oracle: argument dimension mismatch");
    }

    double feas_tol(int i) const {
        return 1e-9 * std::max({1.0, std::abs(lo_[i]), std::abs(hi_[i])});
    }

    /// Distance from V to the normal cone of the PSD cone at Y. In the
    /// eigenbasis of Y, the cone consists of matrices vanishing on the range
    /// of Y and negative semidefinite on its null space; the projection zeroes
    /// the range block and clips the null block to its NSD part.
    double psd_normal_cone_distance(const Vector& point, const Vector& v) const {
        const int p = order_;
        const auto eig = jacobi_eigendecomposition(unpack_sym(point, p));
        const double rank_tol = 1e-8 * std::max(1.0, eig.eigenvalues[p - 1]);

        // W = U^T V U
        const SymMatrix vm = unpack_sym(v, p);
        Matrix w(p, p);
        for (int i = 0; i < p; ++i) {
            for (int j = 0; j < p; ++j) {
                double s = 0.0;
                for (int a = 0; a < p; ++a) {
                    double t = 0.0;
                    for (int b = 0; b < p; ++b) t += vm(a, b) * eig.eigenvectors(b, j);
                    s += eig.eigenvectors(a, i) * t;
                }
                w(i, j) = s;
            }
        }

        std::vector<int> null_idx;
        for (int i = 0; i < p; ++i) {
            if (eig.eigenvalues[i] <= rank_tol) null_idx.push_back(i);
        }

        // Projection of W onto the cone, in the rotated basis.
        Matrix proj(p, p);
        if (!null_idx.empty()) {
            const int q = static_cast<int>(null_idx.size());
            SymMatrix wn(q);
            for (int i = 0; i < q; ++i)
                for (int j = 0; j <= i; ++j)
                    wn.set(i, j, 0.5 * (w(null_idx[i], null_idx[j]) + w(null_idx[j], null_idx[i])));
            const auto sub = jacobi_eigendecomposition(wn);
            for (int k = 0; k < q; ++k) {
                const double lam = std::min(0.0, sub.eigenvalues[k]);
                if (lam == 0.0) continue;
                for (int i = 0; i < q; ++i)
                    for (int j = 0; j < q; ++j)
                        proj(null_idx[i], null_idx[j]) +=
                            lam * sub.eigenvectors(i, k) * sub.eigenvectors(j, k);
            }
        }

        double s = 0.0;
        for (int i = 0; i < p; ++i) {
            for (int j = 0; j < p; ++j) {
                const double d = w(i, j) - proj(i, j);
                s += d * d;
            }
        }
        return std::sqrt(s);
    }

    OracleKind kind_;
    int dim_;
    double mu_ = 0.0;
    int order_ = 0;
    Vector lo_, hi_;
};

// ---------------------------------------------------------------------------
// Smooth quadratic  u -> (1/2) <u, P u> + <p, u>  with PSD Hessian P.
// ---------------------------------------------------------------------------

struct SmoothQuadratic {
    PsdOperator hessian;
    Vector linear;

    SmoothQuadratic() = default;
    SmoothQuadratic(PsdOperator P, Vector p) : hessian(std::move(P)), linear(std::move(p)) {
        if (hessian.dim() != linear.dim())
            throw DimensionMismatch("smooth quadratic: Hessian/linear dimension mismatch");
    }

    static SmoothQuadratic zero(int dim) {
        return SmoothQuadratic(PsdOperator::zero(dim), Vector(dim));
    }

    int dim() const { return linear.dim(); }
    double value(const Vector& u) const { return 0.5 * u.dot(hessian.apply(u)) + linear.dot(u); }
    Vector gradient(const Vector& u) const { return hessian.apply(u) + linear; }
};

// ---------------------------------------------------------------------------
// Linear coupling map. Stores the adjoint A*: block space -> X as a dense
// dim_x x dim_block matrix; the forward map A: X -> block space is the
// transpose action.
// ---------------------------------------------------------------------------

class LinearMap {
public:
    LinearMap() = default;
    explicit LinearMap(Matrix a_star) : m_(std::move(a_star)) {}

    int x_dim() const { return m_.rows(); }
    int block_dim() const { return m_.cols(); }

    /// A* v, block space -> X.
    Vector apply_adjoint(const Vector& v) const { return m_.apply(v); }

    /// A x, X -> block space.
    Vector apply(const Vector& x) const { return m_.apply_transpose(x); }

    /// A A* as a dense block_dim x block_dim symmetric matrix.
    SymMatrix gram() const { return gram_mtm(m_); }

    const Matrix& matrix() const { return m_; }

private:
    Matrix m_;
};

// ---------------------------------------------------------------------------
// Problem instance
//
//   min  theta(y) + f(y) + phi(z) + g(z)   s.t.  A* y + B* z = c
// ---------------------------------------------------------------------------

struct SolutionInfo {
    BlockVector w_star;
    bool unique = false;
};

class SplitProblem {
public:
    NonsmoothOracle theta;
    SmoothQuadratic f;
    NonsmoothOracle phi;
    SmoothQuadratic g;
    LinearMap a_map, b_map;
    Vector c;
    PsdOperator sigma_theta_f, sigma_phi_g;
    std::optional<SolutionInfo> solution;

    /// Empty placeholder; real problems come from the full constructors.
    SplitProblem() = default;

    SplitProblem(NonsmoothOracle theta_, SmoothQuadratic f_, NonsmoothOracle phi_,
                 SmoothQuadratic g_, LinearMap a, LinearMap b, Vector c_,
                 PsdOperator sig_theta, PsdOperator sig_phi,
                 std::optional<SolutionInfo> sol = std::nullopt)
        : theta(std::move(theta_)),
          f(std::move(f_)),
          phi(std::move(phi_)),
          g(std::move(g_)),
          a_map(std::move(a)),
          b_map(std::move(b)),
          c(std::move(c_)),
          sigma_theta_f(std::move(sig_theta)),
          sigma_phi_g(std::move(sig_phi)),
          solution(std::move(sol)) {
        validate();
    }

    /// Convenience constructor with zero monotonicity moduli.
    SplitProblem(NonsmoothOracle theta_, SmoothQuadratic f_, NonsmoothOracle phi_,
                 SmoothQuadratic g_, LinearMap a, LinearMap b, Vector c_,
                 std::optional<SolutionInfo> sol = std::nullopt)
        : SplitProblem(std::move(theta_), std::move(f_), std::move(phi_), std::move(g_),
                       std::move(a), std::move(b), std::move(c_),
                       PsdOperator::zero(a.block_dim()), PsdOperator::zero(b.block_dim()),
                       std::move(sol)) {}

    int dim_y() const { return theta.dim(); }
    int dim_z() const { return phi.dim(); }
    int dim_x() const { return c.dim(); }

    /// A* y + B* z - c.
    Vector primal_residual(const Vector& y, const Vector& z) const {
        return a_map.apply_adjoint(y) + b_map.apply_adjoint(z) - c;
    }

    /// Copy of the problem with different declared monotonicity moduli.
    SplitProblem with_moduli(PsdOperator sig_theta, PsdOperator sig_phi) const {
        return SplitProblem(theta, f, phi, g, a_map, b_map, c, std::move(sig_theta),
                            std::move(sig_phi), solution);
    }

private:
    void validate() const {
        if (f.dim() != dim_y() || a_map.block_dim() != dim_y())
            throw DimensionMismatch("split problem: y-block dimensions inconsistent");
        if (g.dim() != dim_z() || b_map.block_dim() != dim_z())
            throw DimensionMismatch("split problem: z-block dimensions inconsistent");
        if (a_map.x_dim() != dim_x() || b_map.x_dim() != dim_x())
            throw DimensionMismatch("split problem: x-block dimensions inconsistent");
        if (sigma_theta_f.dim() != dim_y() || sigma_phi_g.dim() != dim_z())
            throw DimensionMismatch("split problem: moduli dimensions inconsistent");
        check_modulus(theta, f, sigma_theta_f, 101);
        check_modulus(phi, g, sigma_phi_g, 211);
        if (solution) {
            if (solution->w_star.y.dim() != dim_y() || solution->w_star.z.dim() != dim_z() ||
                solution->w_star.x.dim() != dim_x())
                throw DimensionMismatch("split problem: solution dimensions inconsistent");
        }
    }

    /// Sampled check that the declared modulus really lower-bounds the
    /// monotonicity of the combined subdifferential: subgradient pairs are
    /// generated through the prox (lambda (v - prox(v)) is a valid
    /// subgradient at prox(v)) and must satisfy
    ///   <xi' - xi, u' - u> >= ||u' - u||_Sigma^2 - 1e-9.
    void check_modulus(const NonsmoothOracle& oracle, const SmoothQuadratic& smooth,
                       const PsdOperator& sigma, std::uint64_t seed) const {
        if (sigma.is_scaled_identity() && sigma.scale() == 0.0) return;
        Lcg rng(seed);
        const int n = oracle.dim();
        for (int trial = 0; trial < 8; ++trial) {
            Vector d1(n), d2(n);
            for (int i = 0; i < n; ++i) d1[i] = rng.uniform(-2.0, 2.0);
            for (int i = 0; i < n; ++i) d2[i] = rng.uniform(-2.0, 2.0);
            const Vector u1 = oracle.prox(d1, 1.0);
            const Vector u2 = oracle.prox(d2, 1.0);
            const Vector xi1 = (d1 - u1) + smooth.gradient(u1);
            const Vector xi2 = (d2 - u2) + smooth.gradient(u2);
            const double lhs = (xi2 - xi1).dot(u2 - u1);
            if (lhs < seminorm_sq(sigma, u2 - u1) - 1e-9)
                throw BadParameter("split problem: declared modulus violates monotonicity");
        }
    }
};

// ---------------------------------------------------------------------------
// KKT residual at a point w = (y, z, x)
// ---------------------------------------------------------------------------

struct KktResidual {
    double r_y = 0.0;
    double r_z = 0.0;
    double r_primal = 0.0;
    double total = 0.0;
};

inline KktResidual kkt_residual(const SplitProblem& prob, const BlockVector& w) {
    KktResidual r;
    r.r_y = prob.theta.dist_to_subdifferential(w.y, -prob.f.gradient(w.y) - prob.a_map.apply(w.x));
    r.r_z = prob.phi.dist_to_subdifferential(w.z, -prob.g.gradient(w.z) - prob.b_map.apply(w.x));
    r.r_primal = prob.primal_residual(w.y, w.z).norm();
    r.total = std::sqrt(r.r_y * r.r_y + r.r_z * r.r_z + r.r_primal * r.r_primal);
    return r;
}

// ---------------------------------------------------------------------------
// Sampling check of an approximate-subgradient claim. Witnesses (up to
// sampling power) that v is an eps-subgradient of oracle + smooth at y_bar by
// evaluating the defining inequality at a batch of trial points.
// ---------------------------------------------------------------------------

inline double check_eps_subgradient(const NonsmoothOracle& oracle, const SmoothQuadratic& smooth,
                                    const Vector& y_bar, const Vector& v, double eps,
                                    std::span<const Vector> samples) {
    if (eps < -1e-12) throw BadParameter("check_eps_subgradient: eps must be >= -1e-12");
    const double base = oracle.value(oracle.project(y_bar)) + smooth.value(y_bar);
    double min_slack = std::numeric_limits<double>::infinity();
    for (const auto& raw : samples) {
        const Vector w = oracle.project(raw);
        const double slack = oracle.value(w) + smooth.value(w) - base - v.dot(w - y_bar) + eps;
        min_slack = std::min(min_slack, slack);
    }
    return min_slack;
}

}  // namespace spadmm
