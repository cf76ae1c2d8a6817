#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <numeric>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "spadmm/errors.hpp"

namespace spadmm {

/// Small deterministic PRNG (Knuth's MMIX linear congruential generator).
/// state <- state * 6364136223846793005 + 1442695040888963407, output is the
/// top 53 bits mapped to [0, 1). Used everywhere randomness is needed so that
/// instances and tests are bit-reproducible across platforms.
class Lcg {
public:
    explicit Lcg(std::uint64_t seed) : state_(seed) {
        // Warm up so that small seeds do not produce near-zero first draws.
        next_u64();
        next_u64();
    }

    std::uint64_t next_u64() {
        state_ = state_ * 6364136223846793005ULL + 1442695040888963407ULL;
        return state_;
    }

    /// Uniform double in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform double in [a, b).
    double uniform(double a, double b) { return a + (b - a) * uniform(); }

private:
    std::uint64_t state_;
};

// ---------------------------------------------------------------------------
// Dense vector
// ---------------------------------------------------------------------------

class Vector {
public:
    Vector() = default;
    explicit Vector(int dim) : d_(static_cast<std::size_t>(dim), 0.0) {
        if (dim < 0) throw BadParameter("vector dimension must be nonnegative");
    }
    Vector(std::initializer_list<double> xs) : d_(xs) {}

    int dim() const { return static_cast<int>(d_.size()); }

    double& operator[](int i) { return d_[static_cast<std::size_t>(i)]; }
    const double& operator[](int i) const { return d_[static_cast<std::size_t>(i)]; }

    Vector& operator+=(const Vector& o) {
        check_same_dim(o);
        for (int i = 0; i < dim(); ++i) d_[i] += o.d_[i];
        return *this;
    }
    Vector& operator-=(const Vector& o) {
        check_same_dim(o);
        for (int i = 0; i < dim(); ++i) d_[i] -= o.d_[i];
        return *this;
    }
    Vector& operator*=(double s) {
        for (double& x : d_) x *= s;
        return *this;
    }

    friend Vector operator+(Vector a, const Vector& b) { return a += b; }
    friend Vector operator-(Vector a, const Vector& b) { return a -= b; }
    friend Vector operator*(Vector a, double s) { return a *= s; }
    friend Vector operator*(double s, Vector a) { return a *= s; }
    friend Vector operator-(Vector a) { return a *= -1.0; }

    double dot(const Vector& o) const {
        check_same_dim(o);
        double s = 0.0;
        for (int i = 0; i < dim(); ++i) s += d_[i] * o.d_[i];
        return s;
    }
    double norm_sq() const { return dot(*this); }
    double norm() const { return std::sqrt(norm_sq()); }
    double inf_norm() const {
        double m = 0.0;
        for (double x : d_) m = std::max(m, std::abs(x));
        return m;
    }

    bool all_finite() const {
        for (double x : d_) {
            if (!std::isfinite(x)) return false;
        }
        return true;
    }

    std::span<const double> data() const { return d_; }

private:
    void check_same_dim(const Vector& o) const {
        if (o.dim() != dim()) throw DimensionMismatch("vector dimensions differ");
    }

    std::vector<double> d_;
};

inline double dot(const Vector& a, const Vector& b) { return a.dot(b); }

// ---------------------------------------------------------------------------
// Dense rectangular matrix (row-major)
// ---------------------------------------------------------------------------

class Matrix {
public:
    Matrix() = default;
    Matrix(int rows, int cols)
        : rows_(rows), cols_(cols), d_(static_cast<std::size_t>(rows) * cols, 0.0) {
        if (rows < 0 || cols < 0) throw BadParameter("matrix dimensions must be nonnegative");
    }

    static Matrix identity(int n) {
        Matrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }
    static Matrix scaled_identity(double s, int n) {
        Matrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = s;
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    double& operator()(int i, int j) { return d_[static_cast<std::size_t>(i) * cols_ + j]; }
    const double& operator()(int i, int j) const {
        return d_[static_cast<std::size_t>(i) * cols_ + j];
    }

    /// y = M v  (v has cols() entries, result has rows()).
    Vector apply(const Vector& v) const {
        if (v.dim() != cols_) throw DimensionMismatch("matrix apply: dimension mismatch");
        Vector y(rows_);
        for (int i = 0; i < rows_; ++i) {
            double s = 0.0;
            for (int j = 0; j < cols_; ++j) s += (*this)(i, j) * v[j];
            y[i] = s;
        }
        return y;
    }

    /// y = M^T v  (v has rows() entries, result has cols()).
    Vector apply_transpose(const Vector& v) const {
        if (v.dim() != rows_) throw DimensionMismatch("matrix apply_transpose: dimension mismatch");
        Vector y(cols_);
        for (int i = 0; i < rows_; ++i) {
            const double vi = v[i];
            for (int j = 0; j < cols_; ++j) y[j] += (*this)(i, j) * vi;
        }
        return y;
    }

private:
    int rows_ = 0, cols_ = 0;
    std::vector<double> d_;
};

// ---------------------------------------------------------------------------
// Dense symmetric matrix. Symmetry is enforced by construction: writes go
// through set()/add() which mirror the entry, so the upper triangle can never
// drift from the lower one.
// ---------------------------------------------------------------------------

class SymMatrix {
public:
    SymMatrix() = default;
    explicit SymMatrix(int n) : n_(n), d_(static_cast<std::size_t>(n) * n, 0.0) {
        if (n < 0) throw BadParameter("matrix dimension must be nonnegative");
    }

    static SymMatrix identity(int n) {
        SymMatrix m(n);
        for (int i = 0; i < n; ++i) m.set(i, i, 1.0);
        return m;
    }
    static SymMatrix scaled_identity(double s, int n) {
        SymMatrix m(n);
        for (int i = 0; i < n; ++i) m.set(i, i, s);
        return m;
    }

    int dim() const { return n_; }

    const double& operator()(int i, int j) const {
        return d_[static_cast<std::size_t>(i) * n_ + j];
    }

    void set(int i, int j, double v) {
        d_[static_cast<std::size_t>(i) * n_ + j] = v;
        d_[static_cast<std::size_t>(j) * n_ + i] = v;
    }
    void add(int i, int j, double v) {
        d_[static_cast<std::size_t>(i) * n_ + j] += v;
        if (i != j) d_[static_cast<std::size_t>(j) * n_ + i] += v;
    }

    /// this += s * other
    void add_scaled(const SymMatrix& other, double s) {
        if (other.n_ != n_) throw DimensionMismatch("symmetric add: dimension mismatch");
        for (std::size_t t = 0; t < d_.size(); ++t) d_[t] += s * other.d_[t];
    }
    void add_scaled_identity(double s) {
        for (int i = 0; i < n_; ++i) d_[static_cast<std::size_t>(i) * n_ + i] += s;
    }
    void scale(double s) {
        for (double& x : d_) x *= s;
    }

    /// Copies `block` into the diagonal block starting at `offset`.
    void place(const SymMatrix& block, int offset) {
        for (int i = 0; i < block.dim(); ++i)
            for (int j = 0; j <= i; ++j) set(offset + i, offset + j, block(i, j));
    }

    Vector apply(const Vector& v) const {
        if (v.dim() != n_) throw DimensionMismatch("symmetric apply: dimension mismatch");
        Vector y(n_);
        for (int i = 0; i < n_; ++i) {
            double s = 0.0;
            const double* row = d_.data() + static_cast<std::size_t>(i) * n_;
            for (int j = 0; j < n_; ++j) s += row[j] * v[j];
            y[i] = s;
        }
        return y;
    }

    double frob_norm() const {
        double s = 0.0;
        for (double x : d_) s += x * x;
        return std::sqrt(s);
    }

    double max_diag() const {
        double m = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < n_; ++i) m = std::max(m, (*this)(i, i));
        return n_ == 0 ? 0.0 : m;
    }

    /// Gershgorin upper bound on the largest eigenvalue:
    /// max_i ( a_ii + sum_{j != i} |a_ij| ).
    double gershgorin_upper() const {
        double m = 0.0;
        for (int i = 0; i < n_; ++i) {
            double row = (*this)(i, i);
            for (int j = 0; j < n_; ++j) {
                if (j != i) row += std::abs((*this)(i, j));
            }
            m = std::max(m, row);
        }
        return m;
    }

    bool operator==(const SymMatrix& o) const { return n_ == o.n_ && d_ == o.d_; }

private:
    int n_ = 0;
    std::vector<double> d_;
};

/// M^T M of a rectangular matrix, as a symmetric cols x cols matrix.
inline SymMatrix gram_mtm(const Matrix& m) {
    SymMatrix g(m.cols());
    for (int i = 0; i < m.cols(); ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = 0.0;
            for (int k = 0; k < m.rows(); ++k) s += m(k, i) * m(k, j);
            g.set(i, j, s);
        }
    }
    return g;
}

/// M M^T of a rectangular matrix, as a symmetric rows x rows matrix.
inline SymMatrix gram_mmt(const Matrix& m) {
    SymMatrix g(m.rows());
    for (int i = 0; i < m.rows(); ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = 0.0;
            for (int k = 0; k < m.cols(); ++k) s += m(i, k) * m(j, k);
            g.set(i, j, s);
        }
    }
    return g;
}

// ---------------------------------------------------------------------------
// Cholesky factorization for symmetric positive definite systems
// ---------------------------------------------------------------------------

class CholeskyFactor {
public:
    /// Factors K = L L^T. A pivot <= 1e-12 * max_diag(K) rejects the matrix.
    explicit CholeskyFactor(const SymMatrix& k) : n_(k.dim()), l_(static_cast<std::size_t>(n_) * n_, 0.0) {
        const double thresh = 1e-12 * std::max(k.max_diag(), 0.0);
        for (int j = 0; j < n_; ++j) {
            double d = k(j, j);
            for (int t = 0; t < j; ++t) d -= at(j, t) * at(j, t);
            if (d <= thresh)
                throw NotPositiveDefinite("cholesky: pivot below positive definiteness threshold");
            at(j, j) = std::sqrt(d);
            for (int i = j + 1; i < n_; ++i) {
                double s = k(i, j);
                for (int t = 0; t < j; ++t) s -= at(i, t) * at(j, t);
                at(i, j) = s / at(j, j);
            }
        }
    }

    Vector solve(const Vector& b) const {
        if (b.dim() != n_) throw DimensionMismatch("cholesky solve: dimension mismatch");
        Vector y(n_);
        for (int i = 0; i < n_; ++i) {
            double s = b[i];
            for (int t = 0; t < i; ++t) s -= at(i, t) * y[t];
            y[i] = s / at(i, i);
        }
        Vector x(n_);
        for (int i = n_ - 1; i >= 0; --i) {
            double s = y[i];
            for (int t = i + 1; t < n_; ++t) s -= at(t, i) * x[t];
            x[i] = s / at(i, i);
        }
        return x;
    }

private:
    double& at(int i, int j) { return l_[static_cast<std::size_t>(i) * n_ + j]; }
    const double& at(int i, int j) const { return l_[static_cast<std::size_t>(i) * n_ + j]; }

    int n_;
    std::vector<double> l_;
};

inline Vector cholesky_solve(const SymMatrix& k, const Vector& b) {
    return CholeskyFactor(k).solve(b);
}

// ---------------------------------------------------------------------------
// Jacobi eigendecomposition for small dense symmetric matrices
// ---------------------------------------------------------------------------

struct EigenDecomposition {
    Vector eigenvalues;   // ascending
    Matrix eigenvectors;  // columns, orthonormal: M = U diag(values) U^T
};

/// Cyclic Jacobi. Intended for desk-scale matrices (dim <= 64); stops when the
/// off-diagonal Frobenius mass falls below 1e-11 * ||M||_F or fails after 100
/// sweeps.
inline EigenDecomposition jacobi_eigendecomposition(const SymMatrix& m) {
    const int n = m.dim();
    if (n > 64) throw BadParameter("jacobi_eigendecomposition: dim > 64");

    std::vector<double> a(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a[static_cast<std::size_t>(i) * n + j] = m(i, j);
    Matrix u = Matrix::identity(n);

    auto at = [&](int i, int j) -> double& { return a[static_cast<std::size_t>(i) * n + j]; };
    auto off_norm = [&] {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (i != j) s += at(i, j) * at(i, j);
        return std::sqrt(s);
    };

    const double fnorm = m.frob_norm();
    const double tol = 1e-11 * fnorm;
    bool converged = (fnorm == 0.0) || (off_norm() <= tol);
    for (int sweep = 0; sweep < 100 && !converged; ++sweep) {
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = at(p, q);
                if (apq == 0.0) continue;
                const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                const double app = at(p, p), aqq = at(q, q);
                at(p, p) = app - t * apq;
                at(q, q) = aqq + t * apq;
                at(p, q) = at(q, p) = 0.0;
                for (int i = 0; i < n; ++i) {
                    if (i == p || i == q) continue;
                    const double aip = at(i, p), aiq = at(i, q);
                    at(i, p) = at(p, i) = c * aip - s * aiq;
                    at(i, q) = at(q, i) = s * aip + c * aiq;
                }
                for (int i = 0; i < n; ++i) {
                    const double uip = u(i, p), uiq = u(i, q);
                    u(i, p) = c * uip - s * uiq;
                    u(i, q) = s * uip + c * uiq;
                }
            }
        }
        converged = off_norm() <= tol;
    }
    if (!converged) throw NoConvergence("jacobi_eigendecomposition: 100 sweeps exceeded");

    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int i, int j) { return at(i, i) < at(j, j); });

    EigenDecomposition out;
    out.eigenvalues = Vector(n);
    out.eigenvectors = Matrix(n, n);
    for (int j = 0; j < n; ++j) {
        out.eigenvalues[j] = at(order[j], order[j]);
        for (int i = 0; i < n; ++i) out.eigenvectors(i, j) = u(i, order[j]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Packed symmetric vectors. A p x p symmetric matrix is stored as a length
// p(p+1)/2 vector (lower triangle, row-major) with off-diagonals scaled by
// sqrt(2), so the Euclidean inner product of two packed vectors equals the
// trace inner product of the matrices.
// ---------------------------------------------------------------------------

inline int packed_sym_dim(int p) { return p * (p + 1) / 2; }

/// Matrix order p recovered from a packed dimension; rejects non-triangular sizes.
inline int packed_sym_order(int dim) {
    const int p = static_cast<int>(std::floor((std::sqrt(8.0 * dim + 1.0) - 1.0) / 2.0 + 0.5));
    if (packed_sym_dim(p) != dim)
        throw DimensionMismatch("packed symmetric vector has non-triangular length");
    return p;
}

inline Vector pack_sym(const SymMatrix& a) {
    const int p = a.dim();
    Vector v(packed_sym_dim(p));
    const double rt2 = std::sqrt(2.0);
    int t = 0;
    for (int i = 0; i < p; ++i)
        for (int j = 0; j <= i; ++j) v[t++] = (i == j) ? a(i, i) : rt2 * a(i, j);
    return v;
}

inline SymMatrix unpack_sym(const Vector& v, int p) {
    if (v.dim() != packed_sym_dim(p)) throw DimensionMismatch("unpack_sym: wrong packed length");
    SymMatrix a(p);
    const double inv_rt2 = 1.0 / std::sqrt(2.0);
    int t = 0;
    for (int i = 0; i < p; ++i)
        for (int j = 0; j <= i; ++j) a.set(i, j, (i == j) ? v[t++] : v[t++] * inv_rt2);
    return a;
}

// ---------------------------------------------------------------------------
// Self-adjoint positive semidefinite operator: a scaled identity, a dense
// symmetric matrix, or a block-diagonal composition of the two.
// ---------------------------------------------------------------------------

class PsdOperator {
public:
    PsdOperator() : rep_(ScaledId{0.0, 0}) {}

    static PsdOperator scaled_identity(double lambda, int dim) {
        if (lambda < 0.0) throw BadParameter("scaled identity requires lambda >= 0");
        PsdOperator e;
        e.rep_ = ScaledId{lambda, dim};
        return e;
    }
    static PsdOperator identity(int dim) { return scaled_identity(1.0, dim); }
    static PsdOperator zero(int dim) { return scaled_identity(0.0, dim); }
    static PsdOperator dense(SymMatrix m) {
        PsdOperator e;
        e.rep_ = std::move(m);
        return e;
    }
    static PsdOperator block_diag(std::vector<PsdOperator> blocks) {
        PsdOperator e;
        e.rep_ = std::move(blocks);
        return e;
    }

    int dim() const {
        if (const auto* s = std::get_if<ScaledId>(&rep_)) return s->dim;
        if (const auto* m = std::get_if<SymMatrix>(&rep_)) return m->dim();
        const auto& bs = std::get<std::vector<PsdOperator>>(rep_);
        int d = 0;
        for (const auto& b : bs) d += b.dim();
        return d;
    }

    bool is_scaled_identity() const { return std::holds_alternative<ScaledId>(rep_); }
    bool is_dense() const { return std::holds_alternative<SymMatrix>(rep_); }
    bool is_block_diag() const { return std::holds_alternative<std::vector<PsdOperator>>(rep_); }

    double scale() const { return std::get<ScaledId>(rep_).lambda; }
    const SymMatrix& dense_matrix() const { return std::get<SymMatrix>(rep_); }
    const std::vector<PsdOperator>& blocks() const {
        return std::get<std::vector<PsdOperator>>(rep_);
    }

    Vector apply(const Vector& v) const {
        if (v.dim() != dim()) throw DimensionMismatch("psd operator apply: dimension mismatch");
        if (const auto* s = std::get_if<ScaledId>(&rep_)) return v * s->lambda;
        if (const auto* m = std::get_if<SymMatrix>(&rep_)) return m->apply(v);
        const auto& bs = std::get<std::vector<PsdOperator>>(rep_);
        Vector y(v.dim());
        int off = 0;
        for (const auto& b : bs) {
            Vector seg(b.dim());
            for (int i = 0; i < b.dim(); ++i) seg[i] = v[off + i];
            Vector r = b.apply(seg);
            for (int i = 0; i < b.dim(); ++i) y[off + i] = r[i];
            off += b.dim();
        }
        return y;
    }

    /// <v, Ev>, clamped at zero against round-off (E is PSD by construction).
    double quad(const Vector& v) const { return std::max(0.0, v.dot(apply(v))); }

    SymMatrix to_dense() const {
        if (const auto* s = std::get_if<ScaledId>(&rep_))
            return SymMatrix::scaled_identity(s->lambda, s->dim);
        if (const auto* m = std::get_if<SymMatrix>(&rep_)) return *m;
        SymMatrix out(dim());
        int off = 0;
        for (const auto& b : blocks()) {
            out.place(b.to_dense(), off);
            off += b.dim();
        }
        return out;
    }

private:
    struct ScaledId {
        double lambda;
        int dim;
    };
    std::variant<ScaledId, SymMatrix, std::vector<PsdOperator>> rep_;
};

/// E1 + E2, keeping the scaled-identity representation when possible.
inline PsdOperator add_psd(const PsdOperator& a, const PsdOperator& b) {
    if (a.dim() != b.dim()) throw DimensionMismatch("psd operator sum: dimension mismatch");
    if (b.is_scaled_identity() && b.scale() == 0.0) return a;
    if (a.is_scaled_identity() && a.scale() == 0.0) return b;
    if (a.is_scaled_identity() && b.is_scaled_identity())
        return PsdOperator::scaled_identity(a.scale() + b.scale(), a.dim());
    SymMatrix m = a.to_dense();
    m.add_scaled(b.to_dense(), 1.0);
    return PsdOperator::dense(m);
}

namespace detail {

/// Power iteration on a dense symmetric PSD matrix. Starts from the
/// normalized all-ones vector; restarts once from (1,-1,1,-1,...) if the
/// Rayleigh quotient stagnates at zero.
inline double power_iteration_norm(const SymMatrix& m) {
    const int n = m.dim();
    if (n == 0) return 0.0;
    const double fnorm = m.frob_norm();
    if (fnorm == 0.0) return 0.0;
    const double stagnation = 1e-14 * fnorm;

    Vector v(n);
    for (int i = 0; i < n; ++i) v[i] = 1.0;
    v *= 1.0 / std::sqrt(static_cast<double>(n));

    bool restarted = false;
    double prev = 0.0;
    for (int it = 0; it < 10000; ++it) {
        Vector w = m.apply(v);
        const double lam = v.dot(w);
        if (lam <= stagnation) {
            if (!restarted) {
                restarted = true;
                for (int i = 0; i < n; ++i) v[i] = (i % 2 == 0) ? 1.0 : -1.0;
                v *= 1.0 / std::sqrt(static_cast<double>(n));
                prev = 0.0;
                continue;
            }
            return std::max(lam, 0.0);
        }
        if (std::abs(lam - prev) <= 1e-10 * lam) return lam;
        prev = lam;
        const double wn = w.norm();
        if (wn == 0.0) return std::max(lam, 0.0);
        v = w * (1.0 / wn);
    }
    throw NoConvergence("power iteration: 10000 iterations exceeded");
}

}  // namespace detail

/// Largest eigenvalue of a PSD operator. Exact for scaled identities,
/// blockwise maximum for block diagonals, power iteration for dense blocks.
inline double spectral_norm(const PsdOperator& e) {
    if (e.is_scaled_identity()) return e.scale();
    if (e.is_dense()) return detail::power_iteration_norm(e.dense_matrix());
    double m = 0.0;
    for (const auto& b : e.blocks()) m = std::max(m, spectral_norm(b));
    return m;
}

// ---------------------------------------------------------------------------
// Seminorm machinery induced by a PSD operator
// ---------------------------------------------------------------------------

inline double seminorm_sq(const PsdOperator& e, const Vector& w) { return e.quad(w); }
inline double seminorm(const PsdOperator& e, const Vector& w) { return std::sqrt(e.quad(w)); }

/// Half squared seminorm distance (1/2) ||a - b||_E^2.
inline double half_dist_sq(const PsdOperator& e, const Vector& a, const Vector& b) {
    return 0.5 * seminorm_sq(e, a - b);
}

/// Seminorm distance from w to a finite set of points.
inline double dist_to_points(const PsdOperator& e, const Vector& w,
                             std::span<const Vector> points) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : points) best = std::min(best, seminorm(e, w - p));
    return best;
}

// ---------------------------------------------------------------------------
// Block vector w = (y, z, x)
// ---------------------------------------------------------------------------

struct BlockVector {
    Vector y, z, x;

    BlockVector() = default;
    BlockVector(Vector y_, Vector z_, Vector x_)
        : y(std::move(y_)), z(std::move(z_)), x(std::move(x_)) {}
    BlockVector(int dim_y, int dim_z, int dim_x) : y(dim_y), z(dim_z), x(dim_x) {}

    BlockVector& operator+=(const BlockVector& o) {
        y += o.y;
        z += o.z;
        x += o.x;
        return *this;
    }
    BlockVector& operator-=(const BlockVector& o) {
        y -= o.y;
        z -= o.z;
        x -= o.x;
        return *this;
    }
    BlockVector& operator*=(double s) {
        y *= s;
        z *= s;
        x *= s;
        return *this;
    }
    friend BlockVector operator+(BlockVector a, const BlockVector& b) { return a += b; }
    friend BlockVector operator-(BlockVector a, const BlockVector& b) { return a -= b; }
    friend BlockVector operator*(BlockVector a, double s) { return a *= s; }
    friend BlockVector operator*(double s, BlockVector a) { return a *= s; }

    double dot(const BlockVector& o) const { return y.dot(o.y) + z.dot(o.z) + x.dot(o.x); }
    double norm() const { return std::sqrt(dot(*this)); }

    /// Concatenation (y, z, x), matching the block order of the operators on H.
    Vector flat() const {
        Vector v(y.dim() + z.dim() + x.dim());
        int t = 0;
        for (int i = 0; i < y.dim(); ++i) v[t++] = y[i];
        for (int i = 0; i < z.dim(); ++i) v[t++] = z[i];
        for (int i = 0; i < x.dim(); ++i) v[t++] = x[i];
        return v;
    }
};

inline double seminorm_sq(const PsdOperator& e, const BlockVector& w) {
    return seminorm_sq(e, w.flat());
}
inline double half_dist_sq(const PsdOperator& e, const BlockVector& a, const BlockVector& b) {
    return 0.5 * seminorm_sq(e, (a - b).flat());
}

}  // namespace spadmm
