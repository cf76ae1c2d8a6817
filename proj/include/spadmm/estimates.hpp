#pragma once

#include <array>
#include <cmath>

#include "spadmm/certificates.hpp"

namespace spadmm {

// ---------------------------------------------------------------------------
// First-step estimates. Three block-diagonal PSD operators measure the
// distance from the starting point to the solution set; the first iterate's
// increments, and through them d_1 and eta_1, are bounded by those distances:
//
//   H1 = Diag[ 2 (S + Sigma_y + 4 beta A A*),  7 beta B B*,                    7  / beta I ]
//   H2 = Diag[ 28 (S + Sigma_y + 5 beta A A*), 2 (T + Sigma_z + 53 beta B B*), 105/ beta I ]
//   H3 = 4 tau Diag[ 30 (S + Sigma_y + 5 beta A A*), 2 (T + Sigma_z + 57 beta B B*), 112/beta I ]
// ---------------------------------------------------------------------------

struct HOperators {
    PsdOperator h1, h2, h3;
};

inline HOperators build_h_operators(const SplitProblem& prob, const SolverConfig& cfg) {
    const SymMatrix s_dense = cfg.S.to_dense();
    const SymMatrix sig_y = prob.sigma_theta_f.to_dense();
    const SymMatrix t_dense = cfg.T.to_dense();
    const SymMatrix sig_z = prob.sigma_phi_g.to_dense();
    const SymMatrix aat = prob.a_map.gram();
    const SymMatrix bbt = prob.b_map.gram();
    const double beta = cfg.beta;
    const double tau = cfg.tau;

    auto y_block = [&](double outer, double a_coeff) {
        SymMatrix m = s_dense;
        m.add_scaled(sig_y, 1.0);
        m.add_scaled(aat, a_coeff * beta);
        m.scale(outer);
        return PsdOperator::dense(m);
    };
    auto z_block = [&](double outer, double b_coeff) {
        SymMatrix m = t_dense;
        m.add_scaled(sig_z, 1.0);
        m.add_scaled(bbt, b_coeff * beta);
        m.scale(outer);
        return PsdOperator::dense(m);
    };
    auto z_block_pure = [&](double coeff) {
        SymMatrix m = bbt;
        m.scale(coeff * beta);
        return PsdOperator::dense(m);
    };

    HOperators h;
    h.h1 = PsdOperator::block_diag({y_block(2.0, 4.0), z_block_pure(7.0),
                                    PsdOperator::scaled_identity(7.0 / beta, prob.dim_x())});
    h.h2 = PsdOperator::block_diag({y_block(28.0, 5.0), z_block(2.0, 53.0),
                                    PsdOperator::scaled_identity(105.0 / beta, prob.dim_x())});
    h.h3 = PsdOperator::block_diag(
        {y_block(4.0 * tau * 30.0, 5.0), z_block(4.0 * tau * 2.0, 57.0),
         PsdOperator::scaled_identity(4.0 * tau * 112.0 / beta, prob.dim_x())});
    return h;
}

// ---------------------------------------------------------------------------
// Checks. The distances dist_{H_i}(w^0, solution set) are evaluated at the
// known solution; on unique-solution instances this is exact, otherwise it
// upper-bounds the true distance, which only loosens the right-hand sides
// (the underlying inequalities hold at every solution point).
// ---------------------------------------------------------------------------

struct FirstStepCheck {
    double slack_a = 0.0;  // y-increment bound, relative
    double slack_b = 0.0;  // z-increment bound, relative
    double slack_c = 0.0;  // x-increment bound, relative
    std::array<double, 3> dist_sq{};  // ||w0 - w*||^2_{H_i}
};

inline FirstStepCheck check_first_step(const SplitProblem& prob, const SolverConfig& cfg,
                                       const BlockVector& w0, const IterateState& state1,
                                       const BlockVector& w_star) {
    if (state1.k != 1) throw BadParameter("check_first_step: needs the first iterate");
    const HOperators h = build_h_operators(prob, cfg);
    const Vector dw = (w0 - w_star).flat();

    FirstStepCheck out;
    out.dist_sq[0] = seminorm_sq(h.h1, dw);
    out.dist_sq[1] = seminorm_sq(h.h2, dw);
    out.dist_sq[2] = seminorm_sq(h.h3, dw);

    SymMatrix ey = cfg.S.to_dense();
    ey.add_scaled(prob.sigma_theta_f.to_dense(), 1.0);
    ey.add_scaled(prob.a_map.gram(), cfg.beta);
    const double lhs_a = seminorm_sq(PsdOperator::dense(ey), state1.w.y - w0.y);

    SymMatrix ez = cfg.T.to_dense();
    ez.add_scaled(prob.sigma_phi_g.to_dense(), 1.0);
    ez.add_scaled(prob.b_map.gram(), cfg.beta);
    const double lhs_b = seminorm_sq(PsdOperator::dense(ez), state1.w.z - w0.z);

    const double lhs_c = (state1.w.x - w0.x).norm_sq() / (cfg.tau * cfg.beta);

    out.slack_a = relative_slack(lhs_a, out.dist_sq[0]);
    out.slack_b = relative_slack(lhs_b, out.dist_sq[1]);
    out.slack_c = relative_slack(lhs_c, out.dist_sq[2]);
    return out;
}

struct FirstBoundCheck {
    double slack_d1 = 0.0;
    double slack_eta1 = 0.0;
};

/// d_1 <= (1/2) sum_i dist^2_{H_i}  and  eta_1 <= max(1/(2 tau^2), 2) sum_i dist^2_{H_i}.
inline FirstBoundCheck check_d1_eta1(double d1, double eta1, const std::array<double, 3>& dist_sq,
                                     double tau) {
    const double total = dist_sq[0] + dist_sq[1] + dist_sq[2];
    FirstBoundCheck out;
    out.slack_d1 = relative_slack(d1, 0.5 * total);
    out.slack_eta1 = relative_slack(eta1, std::max(1.0 / (2.0 * tau * tau), 2.0) * total);
    return out;
}

}  // namespace spadmm
