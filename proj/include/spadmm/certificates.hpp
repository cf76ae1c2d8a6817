#pragma once

#include <cmath>
#include <optional>

#include "spadmm/solver.hpp"

namespace spadmm {

// ---------------------------------------------------------------------------
// Per-iteration certificates. Each check evaluates one inequality that every
// exact run of the iteration must satisfy and reports its slack, normalized
// as  raw_slack / max(1, |lhs| + |rhs|)  so that slacks remain meaningful
// when both sides collapse to zero near convergence.
// ---------------------------------------------------------------------------

struct TolerancePolicy {
    double inclusion_tol = 1e-8;
    double slack_tol = 1e-9;
    double sampling_tol = 1e-8;
    bool strict = false;

    double effective_inclusion() const { return strict ? 0.5 * inclusion_tol : inclusion_tol; }
    double effective_slack() const { return strict ? 0.5 * slack_tol : slack_tol; }
    double effective_sampling() const { return strict ? 0.5 * sampling_tol : sampling_tol; }
};

inline double relative_slack(double lhs, double rhs) {
    return (rhs - lhs) / std::max(1.0, std::abs(lhs) + std::abs(rhs));
}

/// Residual of the inclusion  r^k in T(w_tilde^k): blockwise distance of the
/// step residual to the optimality system at the corrected iterate. Zero up
/// to round-off whenever the subproblems are solved exactly.
inline double check_inclusion(const SplitProblem& prob, const IterateState& s) {
    const Vector vy = s.r.y - prob.f.gradient(s.w.y) - prob.a_map.apply(s.x_tilde);
    const double dy = prob.theta.dist_to_subdifferential(s.w.y, vy);
    const Vector vz = s.r.z - prob.g.gradient(s.w.z) - prob.b_map.apply(s.x_tilde);
    const double dz = prob.phi.dist_to_subdifferential(s.w.z, vz);
    const double dx = (s.r.x - (prob.c - prob.a_map.apply_adjoint(s.w.y) -
                                prob.b_map.apply_adjoint(s.w.z)))
                          .norm();
    return std::sqrt(dy * dy + dz * dz + dx * dx);
}

/// Coupling bound: the cross term beta psi_{k+1} (primal residual against the
/// z-increment), plus the modulus energy of the increment, is controlled by
/// the previous residual and the two neighbouring T-seminorm increments.
inline double check_residual_coupling(const SplitProblem& prob, const IterateState& sk,
                                      const IterateState& sk1, const SolverConfig& cfg) {
    if (sk1.k != sk.k + 1 || sk.k < 1)
        throw BadParameter("check_residual_coupling: needs consecutive states with k >= 1");
    const double tau = cfg.tau;
    const double beta = cfg.beta;
    const Vector dz_new = sk1.w.z - sk.w.z;
    const Vector dz_prev = sk.w.z - sk.w_prev.z;
    const double res_k = prob.primal_residual(sk.w.y, sk.w.z).norm_sq();

    const double lhs = beta * sk1.psi + seminorm_sq(prob.sigma_phi_g, dz_new);
    const double rhs = std::max(1.0 - tau, 1.0 - 1.0 / tau) * beta / 2.0 * res_k -
                       0.5 * seminorm_sq(cfg.T, dz_new) +
                       std::max(1.0 - tau, (tau - 1.0) * tau) * beta / 2.0 *
                           prob.b_map.apply_adjoint(dz_new).norm_sq() +
                       0.5 * seminorm_sq(cfg.T, dz_prev);
    return relative_slack(lhs, rhs);
}

/// Inexact-proximal-step certificate: the G-energy of the correction plus the
/// new step energy is dominated by sigma times the G-distance to the previous
/// iterate plus the relaxed old step energy,
///   D_G(w_tilde^{k+1}, w^{k+1}) + eta_tilde_{k+1}
///     <= sigma D_G(w_tilde^{k+1}, w^k) + (1 - gamma) eta_tilde_k.
inline double check_hpe(const IterateState& sk, const IterateState& sk1,
                        const SolverOperators& ops, const StepConstants& consts) {
    if (sk1.k != sk.k + 1 || sk.k < 1)
        throw BadParameter("check_hpe: needs consecutive states with k >= 1");
    const double lhs = half_dist_sq(ops.G, sk1.w_tilde, sk1.w) + sk1.eta_tilde;
    const double rhs = consts.sigma * half_dist_sq(ops.G, sk1.w_tilde, sk.w) +
                       (1.0 - consts.gamma) * sk.eta_tilde;
    return relative_slack(lhs, rhs);
}

/// Fejer-type descent inequality probed at an arbitrary comparison point w:
///   D_G(w, w^k) - D_G(w, w^{k+1}) + (1 - gamma) eta_tilde_k
///     >= (1 - sigma) D_G(w_tilde^{k+1}, w^k) + <r^{k+1}, w_tilde^{k+1} - w>
///        + eta_tilde_{k+1}.
inline double check_fejer(const IterateState& sk, const IterateState& sk1,
                          const SolverOperators& ops, const StepConstants& consts,
                          const BlockVector& probe) {
    if (sk1.k != sk.k + 1 || sk.k < 1)
        throw BadParameter("check_fejer: needs consecutive states with k >= 1");
    const double lhs = half_dist_sq(ops.G, probe, sk.w) - half_dist_sq(ops.G, probe, sk1.w) +
                       (1.0 - consts.gamma) * sk.eta_tilde;
    const double rhs = (1.0 - consts.sigma) * half_dist_sq(ops.G, sk1.w_tilde, sk.w) +
                       sk1.r.dot(sk1.w_tilde - probe) + sk1.eta_tilde;
    // lhs >= rhs; report as rhs <= lhs.
    return relative_slack(rhs, lhs);
}

/// M-seminorm contraction toward a solution:
///   D_M(w*, w^{k+1}) + eta_{k+1}
///     <= D_M(w*, w^k) - (1 - sigma) D_G(w_tilde^{k+1}, w^k) + (1 - gamma) eta_k.
struct ContractionCheck {
    double slack = 0.0;        // contraction inequality, relative
    double dist_m_next = 0.0;  // D_M(w*, w^{k+1}), for monotonicity tracking
    double fejer_slack = 0.0;  // descent inequality probed at w0 and w*
};

inline ContractionCheck check_contraction(const IterateState& sk, const IterateState& sk1,
                                          const SolverOperators& ops, const StepConstants& consts,
                                          const BlockVector& w_star, const BlockVector& w0) {
    if (sk1.k != sk.k + 1 || sk.k < 1)
        throw BadParameter("check_contraction: needs consecutive states with k >= 1");
    ContractionCheck out;
    out.dist_m_next = half_dist_sq(ops.M, w_star, sk1.w);
    const double lhs = out.dist_m_next + sk1.eta;
    const double rhs = half_dist_sq(ops.M, w_star, sk.w) -
                       (1.0 - consts.sigma) * half_dist_sq(ops.G, sk1.w_tilde, sk.w) +
                       (1.0 - consts.gamma) * sk.eta;
    out.slack = relative_slack(lhs, rhs);
    out.fejer_slack = std::min(check_fejer(sk, sk1, ops, consts, w0),
                               check_fejer(sk, sk1, ops, consts, w_star));
    return out;
}

// ---------------------------------------------------------------------------
// Aggregate per-iteration certificate. The transition checks need k >= 2
// (their right-hand sides involve the previous step energy), so they are
// absent on the first state.
// ---------------------------------------------------------------------------

struct IterationCertificate {
    int k = 0;
    double inclusion_residual = 0.0;
    std::optional<double> coupling_slack;
    std::optional<double> hpe_slack;
    std::optional<double> contraction_slack;
    std::optional<double> fejer_slack;

    bool pass(const TolerancePolicy& tol) const {
        if (inclusion_residual > tol.effective_inclusion()) return false;
        const double st = -tol.effective_slack();
        if (coupling_slack && *coupling_slack < st) return false;
        if (hpe_slack && *hpe_slack < st) return false;
        if (contraction_slack && *contraction_slack < st) return false;
        if (fejer_slack && *fejer_slack < st) return false;
        return true;
    }
};

inline IterationCertificate evaluate_iteration(const SplitProblem& prob, const SolverConfig& cfg,
                                               const SolverOperators& ops,
                                               const StepConstants& consts,
                                               const IterateState* prev, const IterateState& cur,
                                               const BlockVector* w_star, const BlockVector& w0) {
    IterationCertificate cert;
    cert.k = cur.k;
    cert.inclusion_residual = check_inclusion(prob, cur);
    if (prev != nullptr && prev->k >= 1) {
        cert.coupling_slack = check_residual_coupling(prob, *prev, cur, cfg);
        cert.hpe_slack = check_hpe(*prev, cur, ops, consts);
        if (w_star != nullptr) {
            const auto con = check_contraction(*prev, cur, ops, consts, *w_star, w0);
            cert.contraction_slack = con.slack;
            cert.fejer_slack = con.fejer_slack;
        } else {
            cert.fejer_slack = check_fejer(*prev, cur, ops, consts, w0);
        }
    }
    return cert;
}

}  // namespace spadmm
