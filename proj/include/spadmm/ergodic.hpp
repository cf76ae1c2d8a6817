#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "spadmm/certificates.hpp"

namespace spadmm {

// ---------------------------------------------------------------------------
// Weight schemes for the ergodic averages. For a horizon of k steps the
// weights alpha_1..alpha_{k+1} satisfy alpha_1 = 0 and sum to one over the
// remaining entries:
//
//   Uniform: alpha_{i+1} = 1/k
//   Linear:  alpha_{i+1} = i / (k (k+1) / 2)
//
// Both are proportional to a fixed raw weight (1 resp. i), so running sums
// can be normalized at any horizon.
// ---------------------------------------------------------------------------

struct WeightStats {
    int k = 0;
    double sum_abs_diff = 0.0;  // sum_{i=1..k} |alpha_{i+1} - alpha_i|
    double last = 0.0;          // alpha_{k+1}
};

inline double raw_weight(WeightScheme scheme, int i) {
    return scheme == WeightScheme::Uniform ? 1.0 : static_cast<double>(i);
}

inline std::vector<double> ergodic_weights(WeightScheme scheme, int k) {
    if (k < 1) throw BadHorizon("ergodic weights need horizon k >= 1");
    std::vector<double> alpha(static_cast<std::size_t>(k) + 1, 0.0);
    double total = 0.0;
    for (int i = 1; i <= k; ++i) total += raw_weight(scheme, i);
    for (int i = 1; i <= k; ++i) alpha[static_cast<std::size_t>(i)] = raw_weight(scheme, i) / total;
    return alpha;
}

inline WeightStats weight_stats(WeightScheme scheme, int k) {
    if (k < 1) throw BadHorizon("weight stats need horizon k >= 1");
    WeightStats st;
    st.k = k;
    if (scheme == WeightScheme::Uniform) {
        st.sum_abs_diff = 1.0 / k;
        st.last = 1.0 / k;
    } else {
        st.sum_abs_diff = 2.0 / (k + 1);
        st.last = 2.0 / (k + 1);
    }
    return st;
}

// ---------------------------------------------------------------------------
// Streaming accumulator for the weighted averages. Step k of the solver
// contributes the pair (w_tilde^k, r^k) with raw weight k - 1, so the first
// contribution arrives with the second step (the first iterate carries zero
// weight by construction). All averages and gap terms are recovered at query
// time from raw-weighted running sums.
// ---------------------------------------------------------------------------

struct ErgodicPoint {
    int k = 0;              // horizon (number of accumulated pairs)
    BlockVector w_bar;      // (y_bar, z_bar, x_bar), with x_bar averaging x_tilde
    BlockVector r_bar;      // averaged residuals
    double eps_bar = 0.0;   // total gap
    double eps_y = 0.0;     // y-block gap
    double eps_z = 0.0;     // z-block gap
};

class ErgodicAccumulator {
public:
    ErgodicAccumulator(const SplitProblem& prob, WeightScheme scheme)
        : prob_(&prob),
          scheme_(scheme),
          sum_w_(prob.dim_y(), prob.dim_z(), prob.dim_x()),
          sum_r_(prob.dim_y(), prob.dim_z(), prob.dim_x()) {}

    WeightScheme scheme() const { return scheme_; }
    int horizon() const { return last_k_ - 1; }

    void add(const IterateState& s) {
        if (s.k != last_k_ + 1)
            throw IndexGap("ergodic accumulator: state index not consecutive");
        last_k_ = s.k;
        const double w = raw_weight(scheme_, s.k - 1);
        wsum_ += w;
        sum_w_ += w * s.w_tilde;
        sum_r_ += w * s.r;
        sum_wr_ += w * s.w_tilde.dot(s.r);
        sum_y_r1_ += w * s.w.y.dot(s.r.y);
        sum_ay_xt_ += w * prob_->a_map.apply_adjoint(s.w.y).dot(s.x_tilde);
        sum_z_r2_ += w * s.w.z.dot(s.r.z);
        sum_bz_xt_ += w * prob_->b_map.apply_adjoint(s.w.z).dot(s.x_tilde);
    }

    ErgodicPoint point() const {
        if (horizon() < 1) throw EmptyAccumulator("ergodic accumulator holds no steps");
        ErgodicPoint pt;
        pt.k = horizon();
        const double inv = 1.0 / wsum_;
        pt.w_bar = inv * sum_w_;
        pt.r_bar = inv * sum_r_;
        pt.eps_bar = sum_wr_ * inv - pt.w_bar.dot(pt.r_bar);
        pt.eps_y = (sum_y_r1_ - sum_ay_xt_) * inv - pt.w_bar.y.dot(pt.r_bar.y) +
                   prob_->a_map.apply_adjoint(pt.w_bar.y).dot(pt.w_bar.x);
        pt.eps_z = (sum_z_r2_ - sum_bz_xt_) * inv - pt.w_bar.z.dot(pt.r_bar.z) +
                   prob_->b_map.apply_adjoint(pt.w_bar.z).dot(pt.w_bar.x);
        // The block gaps split the total gap exactly; a violation beyond
        // round-off means the residuals fed in were inconsistent.
        if (std::abs(pt.eps_y + pt.eps_z - pt.eps_bar) > 1e-9 * std::max(1.0, pt.eps_bar))
            throw Error("ergodic point: block gap identity violated");
        return pt;
    }

private:
    const SplitProblem* prob_;
    WeightScheme scheme_;
    int last_k_ = 1;
    double wsum_ = 0.0;
    BlockVector sum_w_, sum_r_;
    double sum_wr_ = 0.0;
    double sum_y_r1_ = 0.0, sum_ay_xt_ = 0.0;
    double sum_z_r2_ = 0.0, sum_bz_xt_ = 0.0;
};

// ---------------------------------------------------------------------------
// Complexity-bound evaluation. The right-hand sides depend only on first-step
// data and the geometry operator G:
//
//   d*    = D_M(w*, w^0)
//   d_1   = D_M(w^1, w^0)
//   eta_1 = step energy of the first step
// ---------------------------------------------------------------------------

struct BoundInputs {
    double d_star = 0.0;
    double d_1 = 0.0;
    double eta_1 = 0.0;
    double norm_G = 0.0;        // spectral norm of G
    double norm_G_wstar = 0.0;  // || G(w*) ||
    double sigma_tau = 0.0;
};

inline BoundInputs compute_bound_inputs(const SolverOperators& ops, const StepConstants& consts,
                                        const BlockVector& w0, const IterateState& state1,
                                        const BlockVector& w_star) {
    if (state1.k != 1) throw BadParameter("compute_bound_inputs: needs the first iterate");
    BoundInputs in;
    in.d_star = half_dist_sq(ops.M, w_star, w0);
    in.d_1 = half_dist_sq(ops.M, state1.w, w0);
    in.eta_1 = state1.eta;
    in.norm_G = spectral_norm(ops.G);
    in.norm_G_wstar = ops.G.apply(w_star.flat()).norm();
    in.sigma_tau = consts.sigma;
    return in;
}

struct BoundRhs {
    double rhs_29b = 0.0;          // bound on || r_bar ||
    double rhs_35a = 0.0;          // bound on eps_y + eps_z
    double rhs_35b = 0.0;          // bound on || r_bar ||^2
    double remark_M_over_k = 0.0;  // O(1/k) envelope for the gap
    double remark_C_over_k2 = 0.0; // O(1/k^2) envelope for the squared residual
};

inline BoundRhs bound_rhs(const BoundInputs& in, const WeightStats& st) {
    BoundRhs out;
    const double sum3 = in.d_star + in.d_1 + in.eta_1;
    const double a = 2.0 * std::sqrt(in.norm_G) * std::sqrt(sum3) + in.norm_G_wstar;
    const double gap_coeff = 2.0 * sum3 * (11.0 - 9.0 * in.sigma_tau) / (1.0 - in.sigma_tau);
    out.rhs_29b = a * (st.sum_abs_diff + st.last);
    out.rhs_35a = gap_coeff * st.sum_abs_diff;
    out.rhs_35b = out.rhs_29b * out.rhs_29b;
    out.remark_M_over_k = 2.0 * gap_coeff / st.k;
    const double c_half = std::sqrt(in.norm_G * sum3) + 0.5 * in.norm_G_wstar;
    out.remark_C_over_k2 = 64.0 * c_half * c_half / (static_cast<double>(st.k) * st.k);
    return out;
}

struct ErgodicSlacks {
    double r_norm = 0.0;       // || r_bar ||        <= rhs_29b
    double eps_sum = 0.0;      // eps_y + eps_z      <= rhs_35a
    double r_norm_sq = 0.0;    // || r_bar ||^2      <= rhs_35b
    double remark_eps = 0.0;   // eps_y + eps_z      <= M/k
    double remark_dist = 0.0;  // || r_bar ||^2      <= C/k^2
};

/// Relative slacks of the ergodic bounds at one horizon. The squared-residual
/// bound covers the ergodic KKT measure because the averaged residual blocks
/// are epsilon-subgradient certificates at the averaged point and the third
/// block equals the averaged primal residual.
inline ErgodicSlacks check_ergodic_bounds(const ErgodicPoint& pt, const BoundInputs& in,
                                          const WeightStats& st) {
    const BoundRhs rhs = bound_rhs(in, st);
    ErgodicSlacks s;
    const double rn = pt.r_bar.norm();
    const double eps_sum = std::max(pt.eps_bar, pt.eps_y + pt.eps_z);
    s.r_norm = relative_slack(rn, rhs.rhs_29b);
    s.eps_sum = relative_slack(eps_sum, rhs.rhs_35a);
    s.r_norm_sq = relative_slack(rn * rn, rhs.rhs_35b);
    s.remark_eps = relative_slack(eps_sum, rhs.remark_M_over_k);
    s.remark_dist = relative_slack(rn * rn, rhs.remark_C_over_k2);
    return s;
}

// ---------------------------------------------------------------------------
// Enlargement certificate. The averaged pair (w_bar, r_bar) must satisfy
//   < v' - r_bar, w' - w_bar > >= -eps_bar
// against every point (w', v') of the graph of the KKT operator. The check
// samples the graph: feasible y', z' with prox-generated subgradients and an
// arbitrary multiplier block.
// ---------------------------------------------------------------------------

struct GraphSample {
    BlockVector w, v;
};

inline GraphSample make_graph_sample(const SplitProblem& prob, const Vector& d_y,
                                     const Vector& d_z, const Vector& x) {
    const Vector y = prob.theta.prox(d_y, 1.0);
    const Vector z = prob.phi.prox(d_z, 1.0);
    GraphSample gs;
    gs.w = BlockVector(y, z, x);
    gs.v = BlockVector((d_y - y) + prob.f.gradient(y) + prob.a_map.apply(x),
                       (d_z - z) + prob.g.gradient(z) + prob.b_map.apply(x),
                       prob.c - prob.a_map.apply_adjoint(y) - prob.b_map.apply_adjoint(z));
    return gs;
}

inline std::vector<GraphSample> sample_operator_graph(const SplitProblem& prob, int count,
                                                      std::uint64_t seed,
                                                      const BlockVector& center, double radius) {
    Lcg rng(seed);
    std::vector<GraphSample> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int t = 0; t < count; ++t) {
        Vector dy(prob.dim_y()), dz(prob.dim_z()), x(prob.dim_x());
        for (int i = 0; i < dy.dim(); ++i) dy[i] = center.y[i] + radius * rng.uniform(-1.0, 1.0);
        for (int i = 0; i < dz.dim(); ++i) dz[i] = center.z[i] + radius * rng.uniform(-1.0, 1.0);
        for (int i = 0; i < x.dim(); ++i) x[i] = center.x[i] + radius * rng.uniform(-1.0, 1.0);
        out.push_back(make_graph_sample(prob, dy, dz, x));
    }
    if (prob.solution) {
        GraphSample star;
        star.w = prob.solution->w_star;
        star.v = BlockVector(Vector(prob.dim_y()), Vector(prob.dim_z()), Vector(prob.dim_x()));
        out.push_back(star);
    }
    return out;
}

inline double check_enlargement(const ErgodicPoint& pt, std::span<const GraphSample> samples) {
    double min_slack = std::numeric_limits<double>::infinity();
    for (const auto& gs : samples) {
        const double slack = (gs.v - pt.r_bar).dot(gs.w - pt.w_bar) + pt.eps_bar;
        min_slack = std::min(min_slack, slack);
    }
    return min_slack;
}

/// Trial points for the epsilon-subgradient sampling check, centred at y_bar
/// with radius 2 ||y_bar - y0|| + 1.
inline std::vector<Vector> eps_subgradient_samples(const Vector& y_bar, const Vector& y0,
                                                   int count, std::uint64_t seed) {
    Lcg rng(seed);
    const double radius = 2.0 * (y_bar - y0).norm() + 1.0;
    std::vector<Vector> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int t = 0; t < count; ++t) {
        Vector s(y_bar.dim());
        for (int i = 0; i < s.dim(); ++i) s[i] = y_bar[i] + radius * rng.uniform(-1.0, 1.0);
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace spadmm
