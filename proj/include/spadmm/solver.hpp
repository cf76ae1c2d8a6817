#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "spadmm/problem.hpp"

namespace spadmm {

/// Largest admissible dual step size, (1 + sqrt(5)) / 2.
inline double tau_upper_bound() { return 0.5 * (1.0 + std::sqrt(5.0)); }

// ---------------------------------------------------------------------------
// Step-size constants. For tau in (0, (1+sqrt(5))/2):
//
//   sigma = max( (2 - tau)/2 , (1 + tau (tau-1)^2) / (2 - (1-tau)^2) )
//   gamma = min( min(tau^2 sigma, sigma - (tau+1)(tau-1)^2)
//                    / (tau (sigma - (tau-1)^2)),
//                tau sigma / (sigma (tau+1) + tau - 1) )
//   nu    = sigma (tau + 1) + tau - 1
//
// Both sigma and gamma lie in (0, 1); they weight the per-step inequality
// certificates of the iteration.
// ---------------------------------------------------------------------------

struct StepConstants {
    double tau = 1.0;
    double sigma = 0.5;
    double gamma = 0.5;
    double nu = 1.0;
};

inline StepConstants step_constants(double tau) {
    if (!(tau > 0.0) || !(tau < tau_upper_bound()))
        throw TauOutOfRange("tau out of range (0, 1.6180)");
    StepConstants k;
    k.tau = tau;
    const double tm1 = tau - 1.0;
    k.sigma = std::max((2.0 - tau) / 2.0, (1.0 + tau * tm1 * tm1) / (2.0 - tm1 * tm1));
    k.nu = k.sigma * (tau + 1.0) + tau - 1.0;
    const double cand1 = std::min(tau * tau * k.sigma, k.sigma - (tau + 1.0) * tm1 * tm1) /
                         (tau * (k.sigma - tm1 * tm1));
    const double cand2 = tau * k.sigma / k.nu;
    k.gamma = std::min(cand1, cand2);
    return k;
}

// ---------------------------------------------------------------------------
// Solver configuration
// ---------------------------------------------------------------------------

enum class WeightScheme { Uniform, Linear };
enum class ProximalMode { None, Linearized };

struct SolverConfig {
    double tau = 1.0;
    double beta = 1.0;
    PsdOperator S, T;
    /// Set when S (resp. T) completes the subproblem Hessian to a multiple of
    /// the identity, which turns the update into a single prox at that weight.
    std::optional<double> prox_weight_y, prox_weight_z;
    int max_iter = 300;
    WeightScheme weights = WeightScheme::Uniform;
};

/// Proximal terms S = lam_y I - (P_f + beta A A*) and T analogously, with
/// lam taken as the Gershgorin row-sum upper bound on the largest eigenvalue
/// of the completed Hessian. Both are PSD by the bound, and each subproblem
/// collapses to one prox evaluation at weight lam.
struct LinearizedMajorizer {
    PsdOperator s, t;
    double weight_y = 0.0, weight_z = 0.0;
};

inline LinearizedMajorizer linearized_majorizer(const SplitProblem& prob, double beta) {
    if (beta <= 0.0) throw BadParameter("linearized_majorizer requires beta > 0");
    LinearizedMajorizer out;

    SymMatrix hy = prob.f.hessian.to_dense();
    hy.add_scaled(prob.a_map.gram(), beta);
    out.weight_y = hy.gershgorin_upper();
    SymMatrix sy = SymMatrix::scaled_identity(out.weight_y, prob.dim_y());
    sy.add_scaled(hy, -1.0);
    out.s = PsdOperator::dense(sy);

    SymMatrix hz = prob.g.hessian.to_dense();
    hz.add_scaled(prob.b_map.gram(), beta);
    out.weight_z = hz.gershgorin_upper();
    SymMatrix sz = SymMatrix::scaled_identity(out.weight_z, prob.dim_z());
    sz.add_scaled(hz, -1.0);
    out.t = PsdOperator::dense(sz);

    return out;
}

namespace detail {

inline void check_psd_witness(const PsdOperator& e, const char* name) {
    Lcg rng(0x5eedULL + static_cast<std::uint64_t>(e.dim()));
    for (int trial = 0; trial < 4; ++trial) {
        Vector u(e.dim());
        for (int i = 0; i < e.dim(); ++i) u[i] = rng.uniform(-1.0, 1.0);
        if (u.dot(e.apply(u)) < -1e-10 * u.norm_sq())
            throw BadParameter(std::string(name) + ": operator fails PSD witness");
    }
}

}  // namespace detail

inline SolverConfig make_config(const SplitProblem& prob, double tau, double beta,
                                ProximalMode mode, int max_iter,
                                WeightScheme weights = WeightScheme::Uniform) {
    if (!(tau > 0.0) || !(tau < tau_upper_bound()))
        throw TauOutOfRange("tau out of range (0, 1.6180)");
    if (beta <= 0.0) throw BadParameter("beta must be positive");
    if (max_iter < 0) throw BadParameter("max_iter must be nonnegative");

    SolverConfig cfg;
    cfg.tau = tau;
    cfg.beta = beta;
    cfg.max_iter = max_iter;
    cfg.weights = weights;
    if (mode == ProximalMode::Linearized) {
        auto maj = linearized_majorizer(prob, beta);
        cfg.S = std::move(maj.s);
        cfg.T = std::move(maj.t);
        cfg.prox_weight_y = maj.weight_y;
        cfg.prox_weight_z = maj.weight_z;
    } else {
        cfg.S = PsdOperator::zero(prob.dim_y());
        cfg.T = PsdOperator::zero(prob.dim_z());
    }
    detail::check_psd_witness(cfg.S, "solver config S");
    detail::check_psd_witness(cfg.T, "solver config T");
    return cfg;
}

// ---------------------------------------------------------------------------
// Block-diagonal operators on H = Y x Z x X that define the geometry of the
// iteration:
//
//   G     = Diag( S,             T + beta B B*,             (tau beta)^-1 I )
//   M     = Diag( S + Sigma_y,   T + beta B B* + Sigma_z,   (tau beta)^-1 I )
//   Sigma = Diag( Sigma_y,       Sigma_z,                   0 )
//
// so that M = G + Sigma.
// ---------------------------------------------------------------------------

struct SolverOperators {
    PsdOperator G, M, Sigma;
};

inline SolverOperators build_operators(const SplitProblem& prob, const SolverConfig& cfg) {
    if (cfg.S.dim() != prob.dim_y() || cfg.T.dim() != prob.dim_z())
        throw DimensionMismatch("build_operators: proximal term dimensions inconsistent");

    SymMatrix gz = cfg.T.to_dense();
    gz.add_scaled(prob.b_map.gram(), cfg.beta);
    const PsdOperator gz_op = PsdOperator::dense(gz);
    const PsdOperator gx_op =
        PsdOperator::scaled_identity(1.0 / (cfg.tau * cfg.beta), prob.dim_x());

    SolverOperators ops;
    ops.G = PsdOperator::block_diag({cfg.S, gz_op, gx_op});
    ops.M = PsdOperator::block_diag({add_psd(cfg.S, prob.sigma_theta_f),
                                     add_psd(gz_op, prob.sigma_phi_g), gx_op});
    ops.Sigma = PsdOperator::block_diag(
        {prob.sigma_theta_f, prob.sigma_phi_g, PsdOperator::zero(prob.dim_x())});

    // M - G - Sigma must vanish as an operator.
    Lcg rng(0xa11ce5ULL);
    for (int trial = 0; trial < 3; ++trial) {
        Vector u(ops.G.dim());
        for (int i = 0; i < u.dim(); ++i) u[i] = rng.uniform(-1.0, 1.0);
        const Vector diff = ops.M.apply(u) - ops.G.apply(u) - ops.Sigma.apply(u);
        if (diff.norm() > 1e-12 * std::max(1.0, ops.M.apply(u).norm()))
            throw Error("build_operators: M != G + Sigma");
    }
    return ops;
}

// ---------------------------------------------------------------------------
// One iterate of the solver, together with the auxiliary quantities used by
// the per-iteration certificates:
//
//   w_tilde = (y^k, z^k, x_tilde^k),  x_tilde^k = x^{k-1} + beta (A* y^k + B* z^{k-1} - c)
//   r       = G (w^{k-1} - w^k)
//   psi     = < A* y^k + B* z^k - c, B* (z^k - z^{k-1}) >
//   eta_tilde, eta = the step-energy terms entering the contraction estimates
// ---------------------------------------------------------------------------

struct IterateState {
    int k = 0;
    BlockVector w_prev, w;
    Vector x_tilde;
    BlockVector w_tilde;
    BlockVector r;
    double psi = 0.0;
    double eta_tilde = 0.0;
    double eta = 0.0;
};

class Solver {
public:
    Solver(const SplitProblem& prob, const SolverConfig& cfg)
        : prob_(&prob), cfg_(cfg), consts_(step_constants(cfg.tau)), ops_(build_operators(prob, cfg)) {
        if (!cfg_.prox_weight_y) {
            if (prob.theta.kind() == OracleKind::Zero) {
                SymMatrix ky = prob.f.hessian.to_dense();
                ky.add_scaled(cfg_.S.to_dense(), 1.0);
                ky.add_scaled(prob.a_map.gram(), cfg_.beta);
                chol_y_.emplace(ky);
            } else {
                throw SubproblemNotSolvable(
                    "y-subproblem is not exactly solvable: nonsmooth objective without a "
                    "linearizing proximal term");
            }
        }
        if (!cfg_.prox_weight_z) {
            if (prob.phi.kind() == OracleKind::Zero) {
                SymMatrix kz = prob.g.hessian.to_dense();
                kz.add_scaled(cfg_.T.to_dense(), 1.0);
                kz.add_scaled(prob.b_map.gram(), cfg_.beta);
                chol_z_.emplace(kz);
            } else {
                throw SubproblemNotSolvable(
                    "z-subproblem is not exactly solvable: nonsmooth objective without a "
                    "linearizing proximal term");
            }
        }
    }

    const SplitProblem& problem() const { return *prob_; }
    const SolverConfig& config() const { return cfg_; }
    const StepConstants& constants() const { return consts_; }
    const SolverOperators& ops() const { return ops_; }

    IterateState initial_state(const BlockVector& w0) const {
        if (!prob_->theta.in_domain(w0.y) || !prob_->phi.in_domain(w0.z))
            throw PointOutsideDomain("initial point outside the oracle domains");
        IterateState s;
        s.k = 0;
        s.w_prev = w0;
        s.w = w0;
        s.x_tilde = w0.x;
        s.w_tilde = w0;
        s.r = BlockVector(prob_->dim_y(), prob_->dim_z(), prob_->dim_x());
        return s;
    }

    IterateState step(const IterateState& s) const {
        const SplitProblem& p = *prob_;
        const double beta = cfg_.beta;
        const double tau = cfg_.tau;
        const Vector& y = s.w.y;
        const Vector& z = s.w.z;
        const Vector& x = s.w.x;

        // y-update
        Vector y1;
        if (cfg_.prox_weight_y) {
            const double lam = *cfg_.prox_weight_y;
            const Vector grad =
                p.f.gradient(y) + p.a_map.apply(x) + beta * p.a_map.apply(p.primal_residual(y, z));
            y1 = p.theta.prox(y - grad * (1.0 / lam), lam);
        } else {
            Vector rhs = -p.f.linear - p.a_map.apply(x) -
                         beta * p.a_map.apply(p.b_map.apply_adjoint(z) - p.c) + cfg_.S.apply(y);
            y1 = chol_y_->solve(rhs);
        }

        // z-update (y already refreshed)
        Vector z1;
        if (cfg_.prox_weight_z) {
            const double lam = *cfg_.prox_weight_z;
            const Vector grad = p.g.gradient(z) + p.b_map.apply(x) +
                                beta * p.b_map.apply(p.primal_residual(y1, z));
            z1 = p.phi.prox(z - grad * (1.0 / lam), lam);
        } else {
            Vector rhs = -p.g.linear - p.b_map.apply(x) -
                         beta * p.b_map.apply(p.a_map.apply_adjoint(y1) - p.c) + cfg_.T.apply(z);
            z1 = chol_z_->solve(rhs);
        }

        // multiplier update and certificate bookkeeping
        const Vector res_new = p.primal_residual(y1, z1);
        const Vector x1 = x + tau * beta * res_new;
        const Vector x_tilde1 = x + beta * (p.a_map.apply_adjoint(y1) + p.b_map.apply_adjoint(z) - p.c);

        IterateState n;
        n.k = s.k + 1;
        n.w_prev = s.w;
        n.w = BlockVector(y1, z1, x1);
        n.x_tilde = x_tilde1;
        n.w_tilde = BlockVector(y1, z1, x_tilde1);
        n.r = BlockVector(cfg_.S.apply(y - y1), ops_.G.blocks()[1].apply(z - z1),
                          (x - x1) * (1.0 / (tau * beta)));
        n.psi = res_new.dot(p.b_map.apply_adjoint(z1 - z));

        const double sig = consts_.sigma;
        const double nu = consts_.nu;
        n.eta_tilde = (sig - (tau - 1.0) * (tau - 1.0)) * beta / (2.0 * tau) * res_new.norm_sq() +
                      0.5 * sig * seminorm_sq(cfg_.S, y1 - y) +
                      nu / (2.0 * tau) * seminorm_sq(cfg_.T, z1 - z) +
                      (sig + tau - 1.0) / tau * seminorm_sq(p.sigma_phi_g, z1 - z);
        n.eta = n.eta_tilde + 0.25 * seminorm_sq(ops_.Sigma, n.w - s.w);
        return n;
    }

    /// Runs up to max_iter steps, invoking the observer once per completed
    /// step; stops early when the pointwise KKT residual reaches 1e-12.
    std::vector<IterateState> solve(
        const BlockVector& w0,
        const std::function<void(const IterateState&)>& observer = {}) const {
        std::vector<IterateState> traj;
        traj.reserve(static_cast<std::size_t>(std::max(cfg_.max_iter, 0)));
        IterateState s = initial_state(w0);
        for (int it = 0; it < cfg_.max_iter; ++it) {
            s = step(s);
            traj.push_back(s);
            if (observer) observer(s);
            if (kkt_residual(*prob_, s.w).total <= 1e-12) break;
        }
        return traj;
    }

private:
    const SplitProblem* prob_;
    SolverConfig cfg_;
    StepConstants consts_;
    SolverOperators ops_;
    std::optional<CholeskyFactor> chol_y_, chol_z_;
};

inline std::vector<IterateState> solve(const SplitProblem& prob, const SolverConfig& cfg,
                                       const BlockVector& w0,
                                       const std::function<void(const IterateState&)>& observer = {}) {
    return Solver(prob, cfg).solve(w0, observer);
}

}  // namespace spadmm
