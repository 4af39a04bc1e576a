#pragma once

/**
 * @file splines.hpp
 * @brief Univariate B-spline / NURBS evaluation, Greville abscissae, tensor-product
 *        NURBS patches with derivatives up to second order, boundary curve views
 *        and knot refinement.
 */

#include <igacontact/core.hpp>

#include <algorithm>
#include <optional>

namespace iga {

// ---------------------------------------------------------------------------
// KnotVector
// ---------------------------------------------------------------------------

/// Local basis evaluation result: the p+1 functions that are nonzero on the span.
/// ders(k, j) is the k-th derivative of basis function (span - p + j).
struct BasisEval {
    int span = 0;
    MatX ders;  // (nders+1) x (p+1)
    int first_index(int degree) const { return span - degree; }
};

class KnotVector {
public:
    KnotVector() = default;

    KnotVector(int degree, std::vector<double> knots) : p_(degree), knots_(std::move(knots)) {
        validate();
    }

    /// Open uniform knot vector on [a, b] with the given number of basis functions.
    static KnotVector open_uniform(int degree, int num_basis, double a = 0.0, double b = 1.0) {
        if (num_basis < degree + 1) throw ConfigError("open_uniform: too few basis functions");
        std::vector<double> k;
        int nspans = num_basis - degree;
        for (int i = 0; i <= degree; ++i) k.push_back(a);
        for (int i = 1; i < nspans; ++i) k.push_back(a + (b - a) * double(i) / nspans);
        for (int i = 0; i <= degree; ++i) k.push_back(b);
        return KnotVector(degree, std::move(k));
    }

    /// Open knot vector from explicit interior break positions (each simple).
    static KnotVector open_with_breaks(int degree, const std::vector<double>& breaks, double a,
                                       double b) {
        std::vector<double> k;
        for (int i = 0; i <= degree; ++i) k.push_back(a);
        for (double x : breaks) k.push_back(x);
        for (int i = 0; i <= degree; ++i) k.push_back(b);
        return KnotVector(degree, std::move(k));
    }

    int degree() const { return p_; }
    int num_basis() const { return int(knots_.size()) - p_ - 1; }
    const std::vector<double>& knots() const { return knots_; }
    double front() const { return knots_.front(); }
    double back() const { return knots_.back(); }

    /// Knot span index k with knots[k] <= x < knots[k+1]; the right endpoint is
    /// treated as part of the last span so boundary points are evaluable.
    int find_span(double x) const {
        const int n = num_basis();
        if (x < knots_.front() - 1e-14 || x > knots_.back() + 1e-14)
            throw DomainError("find_span: parameter outside knot range");
        if (x >= knots_[n]) return n - 1;
        if (x <= knots_[p_]) return p_;
        auto it = std::upper_bound(knots_.begin() + p_, knots_.begin() + n, x);
        return int(it - knots_.begin()) - 1;
    }

    /// Nonzero basis functions and derivatives at x (derivative table algorithm).
    BasisEval eval_basis(double x, int nders) const {
        const int p = p_;
        if (nders > p) nders = p;
        BasisEval out;
        out.span = find_span(x);
        const int i = out.span;

        // Triangular table of knot differences and basis values.
        MatX ndu(p + 1, p + 1);
        std::vector<double> left(p + 1), right(p + 1);
        ndu(0, 0) = 1.0;
        for (int j = 1; j <= p; ++j) {
            left[j] = x - knots_[i + 1 - j];
            right[j] = knots_[i + j] - x;
            double saved = 0.0;
            for (int r = 0; r < j; ++r) {
                ndu(j, r) = right[r + 1] + left[j - r];
                double temp = (ndu(j, r) != 0.0) ? ndu(r, j - 1) / ndu(j, r) : 0.0;
                ndu(r, j) = saved + right[r + 1] * temp;
                saved = left[j - r] * temp;
            }
            ndu(j, j) = saved;
        }

        out.ders = MatX::Zero(nders + 1, p + 1);
        for (int j = 0; j <= p; ++j) out.ders(0, j) = ndu(j, p);

        MatX a(2, p + 1);
        for (int r = 0; r <= p; ++r) {
            int s1 = 0, s2 = 1;
            a(0, 0) = 1.0;
            for (int k = 1; k <= nders; ++k) {
                double d = 0.0;
                int rk = r - k, pk = p - k;
                if (r >= k) {
                    a(s2, 0) = (ndu(pk + 1, rk) != 0.0) ? a(s1, 0) / ndu(pk + 1, rk) : 0.0;
                    d = a(s2, 0) * ndu(rk, pk);
                }
                int j1 = (rk >= -1) ? 1 : -rk;
                int j2 = (r - 1 <= pk) ? k - 1 : p - r;
                for (int j = j1; j <= j2; ++j) {
                    a(s2, j) = (ndu(pk + 1, rk + j) != 0.0)
                                   ? (a(s1, j) - a(s1, j - 1)) / ndu(pk + 1, rk + j)
                                   : 0.0;
                    d += a(s2, j) * ndu(rk + j, pk);
                }
                if (r <= pk) {
                    a(s2, k) = (ndu(pk + 1, r) != 0.0) ? -a(s1, k - 1) / ndu(pk + 1, r) : 0.0;
                    d += a(s2, k) * ndu(r, pk);
                }
                out.ders(k, r) = d;
                std::swap(s1, s2);
            }
        }
        double factor = p;
        for (int k = 1; k <= nders; ++k) {
            for (int j = 0; j <= p; ++j) out.ders(k, j) *= factor;
            factor *= p - k;
        }
        return out;
    }

    /// Greville abscissae: averages of p consecutive interior knots.
    std::vector<double> greville() const {
        const int n = num_basis();
        std::vector<double> g(n);
        for (int i = 0; i < n; ++i) {
            double s = 0.0;
            for (int j = 1; j <= p_; ++j) s += knots_[i + j];
            g[i] = s / p_;
        }
        // Endpoint averages of repeated knots are exact by construction.
        g.front() = knots_.front();
        g.back() = knots_.back();
        return g;
    }

    /// Unique nonzero spans as (low, high) parameter pairs.
    std::vector<std::pair<double, double>> spans() const {
        std::vector<std::pair<double, double>> s;
        for (std::size_t i = p_; i + 1 < knots_.size() - p_; ++i)
            if (knots_[i + 1] > knots_[i]) s.emplace_back(knots_[i], knots_[i + 1]);
        return s;
    }

    int multiplicity(double x) const {
        int m = 0;
        for (double k : knots_)
            if (std::abs(k - x) < 1e-14) ++m;
        return m;
    }

    int max_interior_multiplicity() const {
        int worst = 0;
        for (std::size_t i = p_ + 1; i < knots_.size() - p_ - 1; ++i) {
            int m = 1;
            while (i + 1 < knots_.size() - p_ - 1 && knots_[i + 1] == knots_[i]) {
                ++m;
                ++i;
            }
            worst = std::max(worst, m);
        }
        return worst;
    }

private:
    void validate() const {
        if (p_ < 1) throw ConfigError("KnotVector: degree must be >= 1");
        if (int(knots_.size()) < 2 * (p_ + 1)) throw ConfigError("KnotVector: too few knots");
        for (std::size_t i = 1; i < knots_.size(); ++i)
            if (knots_[i] < knots_[i - 1]) throw ConfigError("KnotVector: knots must be non-decreasing");
        for (int i = 0; i < p_; ++i) {
            if (knots_[i] != knots_[i + 1]) throw ConfigError("KnotVector: not open at start");
            if (knots_[knots_.size() - 1 - i] != knots_[knots_.size() - 2 - i])
                throw ConfigError("KnotVector: not open at end");
        }
        // Interior multiplicity beyond p would make basis functions discontinuous.
        KnotVector tmp = *this;
        if (const_cast<KnotVector&>(tmp).max_interior_multiplicity() > p_)
            throw ConfigError("KnotVector: interior knot multiplicity exceeds degree");
    }

    int p_ = 1;
    std::vector<double> knots_;
};

inline std::vector<double> greville_points(const KnotVector& kv) { return kv.greville(); }

// ---------------------------------------------------------------------------
// NurbsCurve2D
// ---------------------------------------------------------------------------

struct CurvePoint {
    Vec2 x = Vec2::Zero();    ///< position
    Vec2 d1 = Vec2::Zero();   ///< first parametric derivative
    Vec2 d2 = Vec2::Zero();   ///< second parametric derivative
};

class NurbsCurve2D {
public:
    NurbsCurve2D() = default;
    NurbsCurve2D(KnotVector kv, std::vector<Vec2> cps, std::vector<double> weights)
        : kv_(std::move(kv)), cps_(std::move(cps)), w_(std::move(weights)) {
        if (int(cps_.size()) != kv_.num_basis() || cps_.size() != w_.size())
            throw ConfigError("NurbsCurve2D: control net size mismatch");
        for (double w : w_)
            if (w <= 0.0) throw ConfigError("NurbsCurve2D: weights must be positive");
    }

    const KnotVector& knots() const { return kv_; }
    int num_cps() const { return int(cps_.size()); }
    const std::vector<Vec2>& control_points() const { return cps_; }
    const std::vector<double>& weights() const { return w_; }

    CurvePoint eval(double xi, int nders = 2) const { return eval_with(cps_, xi, nders); }

    /// Evaluate with substituted control point positions (same weights/knots);
    /// used for deformed-configuration curve evaluation.
    CurvePoint eval_with(const std::vector<Vec2>& cps, double xi, int nders = 2) const {
        BasisEval be = kv_.eval_basis(xi, nders);
        const int p = kv_.degree();
        const int nd = std::min(nders, p);
        // Homogeneous sums A^(k), w^(k).
        std::array<Vec2, 3> A{Vec2::Zero(), Vec2::Zero(), Vec2::Zero()};
        std::array<double, 3> W{0.0, 0.0, 0.0};
        for (int j = 0; j <= p; ++j) {
            int idx = be.first_index(p) + j;
            for (int k = 0; k <= nd; ++k) {
                A[k] += be.ders(k, j) * w_[idx] * cps[idx];
                W[k] += be.ders(k, j) * w_[idx];
            }
        }
        CurvePoint out;
        out.x = A[0] / W[0];
        if (nd >= 1) out.d1 = (A[1] - W[1] * out.x) / W[0];
        if (nd >= 2) out.d2 = (A[2] - 2.0 * W[1] * out.d1 - W[2] * out.x) / W[0];
        return out;
    }

    /// Rational basis values/derivatives of the nonzero functions at xi.
    BasisEval rational_basis(double xi, int nders) const {
        BasisEval be = kv_.eval_basis(xi, nders);
        const int p = kv_.degree();
        const int nd = std::min(nders, p);
        std::array<double, 3> W{0.0, 0.0, 0.0};
        for (int j = 0; j <= p; ++j) {
            int idx = be.first_index(p) + j;
            for (int k = 0; k <= nd; ++k) W[k] += be.ders(k, j) * w_[idx];
        }
        BasisEval out;
        out.span = be.span;
        out.ders = MatX::Zero(nd + 1, p + 1);
        for (int j = 0; j <= p; ++j) {
            int idx = be.first_index(p) + j;
            double R = be.ders(0, j) * w_[idx] / W[0];
            out.ders(0, j) = R;
            if (nd >= 1) out.ders(1, j) = (be.ders(1, j) * w_[idx] - W[1] * R) / W[0];
            if (nd >= 2)
                out.ders(2, j) =
                    (be.ders(2, j) * w_[idx] - 2.0 * W[1] * out.ders(1, j) - W[2] * R) / W[0];
        }
        return out;
    }

private:
    KnotVector kv_;
    std::vector<Vec2> cps_;
    std::vector<double> w_;
};

// ---------------------------------------------------------------------------
// NurbsPatch2D
// ---------------------------------------------------------------------------

struct SurfacePoint {
    Vec2 x = Vec2::Zero();
    Vec2 d_xi = Vec2::Zero(), d_eta = Vec2::Zero();
    Vec2 d_xixi = Vec2::Zero(), d_xieta = Vec2::Zero(), d_etaeta = Vec2::Zero();

    Mat2 jacobian() const {
        Mat2 J;
        J.col(0) = d_xi;
        J.col(1) = d_eta;
        return J;
    }
};

/// Local 2D rational basis at a parametric point: values, parametric gradients and
/// Hessians of the (p+1)(q+1) nonzero functions, with their grid indices.
struct PatchBasis {
    std::vector<int> indices;           ///< grid index i + n*j per local function
    std::vector<double> val;
    std::vector<Vec2> grad;             ///< (d/dxi, d/deta)
    std::vector<Eigen::Vector3d> hess;  ///< (d2/dxi2, d2/dxideta, d2/deta2)
};

class NurbsPatch2D {
public:
    NurbsPatch2D() = default;
    NurbsPatch2D(KnotVector ku, KnotVector kv, std::vector<Vec2> cps, std::vector<double> w)
        : ku_(std::move(ku)), kv_(std::move(kv)), cps_(std::move(cps)), w_(std::move(w)) {
        if (int(cps_.size()) != ku_.num_basis() * kv_.num_basis() || cps_.size() != w_.size())
            throw ConfigError("NurbsPatch2D: control net size mismatch");
        for (double wi : w_)
            if (wi <= 0.0) throw ConfigError("NurbsPatch2D: weights must be positive");
    }

    const KnotVector& knots_u() const { return ku_; }
    const KnotVector& knots_v() const { return kv_; }
    int nu() const { return ku_.num_basis(); }
    int nv() const { return kv_.num_basis(); }
    int num_cps() const { return nu() * nv(); }
    int grid_index(int i, int j) const { return i + nu() * j; }
    const std::vector<Vec2>& control_points() const { return cps_; }
    const std::vector<double>& weights() const { return w_; }
    Vec2 control_point(int i, int j) const { return cps_[grid_index(i, j)]; }

    SurfacePoint eval_surface(double xi, double eta, int nders = 1) const {
        BasisEval bu = ku_.eval_basis(xi, nders);
        BasisEval bv = kv_.eval_basis(eta, nders);
        const int p = ku_.degree(), q = kv_.degree();
        const int ndu = std::min(nders, p), ndv = std::min(nders, q);

        // Homogeneous partial sums A_(a,b), W_(a,b) for a+b <= 2.
        Vec2 A[3][3];
        double W[3][3];
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) {
                A[a][b] = Vec2::Zero();
                W[a][b] = 0.0;
            }
        for (int jj = 0; jj <= q; ++jj) {
            int j = bv.first_index(q) + jj;
            for (int ii = 0; ii <= p; ++ii) {
                int i = bu.first_index(p) + ii;
                int idx = grid_index(i, j);
                for (int a = 0; a <= ndu; ++a)
                    for (int b = 0; b <= ndv; ++b) {
                        if (a + b > nders) continue;
                        double f = bu.ders(a, ii) * bv.ders(b, jj) * w_[idx];
                        A[a][b] += f * cps_[idx];
                        W[a][b] += f;
                    }
            }
        }
        SurfacePoint s;
        s.x = A[0][0] / W[0][0];
        if (nders >= 1) {
            s.d_xi = (A[1][0] - W[1][0] * s.x) / W[0][0];
            s.d_eta = (A[0][1] - W[0][1] * s.x) / W[0][0];
        }
        if (nders >= 2) {
            s.d_xixi = (A[2][0] - 2.0 * W[1][0] * s.d_xi - W[2][0] * s.x) / W[0][0];
            s.d_etaeta = (A[0][2] - 2.0 * W[0][1] * s.d_eta - W[0][2] * s.x) / W[0][0];
            s.d_xieta =
                (A[1][1] - W[1][0] * s.d_eta - W[0][1] * s.d_xi - W[1][1] * s.x) / W[0][0];
        }
        return s;
    }

    /// Rational basis functions with parametric derivatives up to `nders` (0..2).
    PatchBasis basis(double xi, double eta, int nders) const {
        BasisEval bu = ku_.eval_basis(xi, std::min(nders, ku_.degree()));
        BasisEval bv = kv_.eval_basis(eta, std::min(nders, kv_.degree()));
        const int p = ku_.degree(), q = kv_.degree();
        const int ndu = std::min(nders, p), ndv = std::min(nders, q);

        double W[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
        for (int jj = 0; jj <= q; ++jj) {
            int j = bv.first_index(q) + jj;
            for (int ii = 0; ii <= p; ++ii) {
                int idx = grid_index(bu.first_index(p) + ii, j);
                for (int a = 0; a <= ndu; ++a)
                    for (int b = 0; b <= ndv; ++b)
                        W[a][b] += bu.ders(a, ii) * bv.ders(b, jj) * w_[idx];
            }
        }
        PatchBasis out;
        const int nloc = (p + 1) * (q + 1);
        out.indices.resize(nloc);
        out.val.resize(nloc);
        if (nders >= 1) out.grad.resize(nloc);
        if (nders >= 2) out.hess.resize(nloc);
        int loc = 0;
        for (int jj = 0; jj <= q; ++jj) {
            int j = bv.first_index(q) + jj;
            for (int ii = 0; ii <= p; ++ii, ++loc) {
                int i = bu.first_index(p) + ii;
                int idx = grid_index(i, j);
                out.indices[loc] = idx;
                auto n = [&](int a, int b) {
                    double du = (a <= ndu) ? bu.ders(a, ii) : 0.0;
                    double dv = (b <= ndv) ? bv.ders(b, jj) : 0.0;
                    return du * dv * w_[idx];
                };
                double R = n(0, 0) / W[0][0];
                out.val[loc] = R;
                if (nders >= 1) {
                    double Rx = (n(1, 0) - W[1][0] * R) / W[0][0];
                    double Re = (n(0, 1) - W[0][1] * R) / W[0][0];
                    out.grad[loc] = Vec2(Rx, Re);
                    if (nders >= 2) {
                        double Rxx = (n(2, 0) - 2.0 * W[1][0] * Rx - W[2][0] * R) / W[0][0];
                        double Ree = (n(0, 2) - 2.0 * W[0][1] * Re - W[0][2] * R) / W[0][0];
                        double Rxe =
                            (n(1, 1) - W[1][0] * Re - W[0][1] * Rx - W[1][1] * R) / W[0][0];
                        out.hess[loc] = Eigen::Vector3d(Rxx, Rxe, Ree);
                    }
                }
            }
        }
        return out;
    }

    /// Grid indices of the control points owning a boundary side, ordered along the
    /// side's own parameter (xi for south/north, eta for west/east).
    std::vector<int> boundary_indices(Side side) const {
        std::vector<int> ids;
        switch (side) {
            case Side::South:
                for (int i = 0; i < nu(); ++i) ids.push_back(grid_index(i, 0));
                break;
            case Side::North:
                for (int i = 0; i < nu(); ++i) ids.push_back(grid_index(i, nv() - 1));
                break;
            case Side::West:
                for (int j = 0; j < nv(); ++j) ids.push_back(grid_index(0, j));
                break;
            case Side::East:
                for (int j = 0; j < nv(); ++j) ids.push_back(grid_index(nu() - 1, j));
                break;
        }
        return ids;
    }

    /// Univariate curve view of a patch boundary. Control points/weights are the
    /// boundary row or column; evaluation agrees with eval_surface on the side.
    NurbsCurve2D boundary_curve(Side side) const {
        auto ids = boundary_indices(side);
        std::vector<Vec2> c;
        std::vector<double> w;
        for (int id : ids) {
            c.push_back(cps_[id]);
            w.push_back(w_[id]);
        }
        const KnotVector& kv = (side == Side::South || side == Side::North) ? ku_ : kv_;
        return NurbsCurve2D(kv, std::move(c), std::move(w));
    }

    /// Knot insertion in one direction; the geometry map is unchanged.
    NurbsPatch2D refine_knots(int direction, const std::vector<double>& new_knots) const {
        NurbsPatch2D out = *this;
        for (double x : new_knots) out = out.insert_single(direction, x);
        return out;
    }

private:
    NurbsPatch2D insert_single(int direction, double x) const {
        const KnotVector& kv = (direction == 0) ? ku_ : kv_;
        const int p = kv.degree();
        if (x <= kv.front() + 1e-15 || x >= kv.back() - 1e-15)
            throw ConfigError("refine_knots: knot outside open range");
        if (kv.multiplicity(x) >= p)
            throw ConfigError("refine_knots: insertion would exceed multiplicity limit");
        const auto& U = kv.knots();
        const int k = kv.find_span(x);

        std::vector<double> newU(U.begin(), U.end());
        newU.insert(newU.begin() + k + 1, x);

        const int n_old = (direction == 0) ? nu() : nv();
        const int n_other = (direction == 0) ? nv() : nu();
        const int n_new = n_old + 1;

        // Boehm's algorithm on homogeneous coordinates, applied line by line.
        std::vector<Vec2> nc(std::size_t(n_new) * n_other);
        std::vector<double> nw(std::size_t(n_new) * n_other);
        auto old_at = [&](int i, int line) {
            return (direction == 0) ? grid_index(i, line) : grid_index(line, i);
        };
        auto new_at = [&](int i, int line) {
            return (direction == 0) ? (i + n_new * line) : (line + n_other * i);
        };
        for (int line = 0; line < n_other; ++line) {
            for (int i = 0; i < n_new; ++i) {
                double alpha;
                if (i <= k - p)
                    alpha = 1.0;
                else if (i >= k + 1)
                    alpha = 0.0;
                else
                    alpha = (x - U[i]) / (U[i + p] - U[i]);
                Vec2 hi = Vec2::Zero();
                double hw = 0.0;
                if (alpha > 0.0) {
                    int io = old_at(i, line);
                    hi += alpha * w_[io] * cps_[io];
                    hw += alpha * w_[io];
                }
                if (alpha < 1.0) {
                    int io = old_at(i - 1, line);
                    hi += (1.0 - alpha) * w_[io] * cps_[io];
                    hw += (1.0 - alpha) * w_[io];
                }
                nc[new_at(i, line)] = hi / hw;
                nw[new_at(i, line)] = hw;
            }
        }
        KnotVector nk(p, std::move(newU));
        if (direction == 0) return NurbsPatch2D(std::move(nk), kv_, std::move(nc), std::move(nw));
        return NurbsPatch2D(ku_, std::move(nk), std::move(nc), std::move(nw));
    }

    KnotVector ku_, kv_;
    std::vector<Vec2> cps_;
    std::vector<double> w_;
};

// ---------------------------------------------------------------------------
// Geometry construction helpers
// ---------------------------------------------------------------------------

/// Axis-aligned rectangle [x0,x0+w] x [y0,y0+h]. Control points sit at Greville
/// abscissae so the geometry map is exactly affine for any degree and knot grading.
/// Optional monotone reparametrizations qx, qy (mapping [0,1] onto [0,1]) place
/// the control abscissae at q(greville) instead: the geometry is the same
/// rectangle with a curvilinear (non-affine) parametrization. Monotonicity of
/// the spline map follows from the variation-diminishing property.
inline NurbsPatch2D make_rectangle(const KnotVector& ku, const KnotVector& kv, double x0,
                                   double y0, double w, double h,
                                   const std::function<double(double)>& qx = {},
                                   const std::function<double(double)>& qy = {}) {
    auto gu = ku.greville();
    auto gv = kv.greville();
    double u0 = ku.front(), u1 = ku.back();
    double v0 = kv.front(), v1 = kv.back();
    std::vector<Vec2> cps;
    std::vector<double> wt;
    for (double gy : gv)
        for (double gx : gu) {
            double tx = (gx - u0) / (u1 - u0);
            double ty = (gy - v0) / (v1 - v0);
            if (qx) tx = qx(tx);
            if (qy) ty = qy(ty);
            cps.emplace_back(x0 + w * tx, y0 + h * ty);
            wt.push_back(1.0);
        }
    return NurbsPatch2D(ku, kv, std::move(cps), std::move(wt));
}

/// Cubic bump reparametrization t + alpha t(1-t)(t-c); monotone for moderate alpha.
inline std::function<double(double)> bump_reparam(double alpha, double c) {
    return [alpha, c](double t) { return t + alpha * t * (1.0 - t) * (t - c); };
}

namespace detail {

/// One rational Bezier degree elevation step on homogeneous control points.
inline void bezier_elevate(std::vector<Vec2>& cp, std::vector<double>& w) {
    const int p = int(cp.size()) - 1;
    std::vector<Vec2> nc(p + 2);
    std::vector<double> nw(p + 2);
    for (int i = 0; i <= p + 1; ++i) {
        double a = double(i) / (p + 1);
        Vec2 h = Vec2::Zero();
        double hw = 0.0;
        if (i <= p) {
            h += (1.0 - a) * w[i] * cp[i];
            hw += (1.0 - a) * w[i];
        }
        if (i >= 1) {
            h += a * w[i - 1] * cp[i - 1];
            hw += a * w[i - 1];
        }
        nc[i] = h / hw;
        nw[i] = hw;
    }
    cp = std::move(nc);
    w = std::move(nw);
}

}  // namespace detail

/// Exact circular arc of given degree, split into `narcs` rational Bezier segments
/// of at most 90 degrees each (mid control point weight cos(dtheta/2)), joined C0.
inline NurbsCurve2D make_circular_arc(const Vec2& center, double radius, double theta0,
                                      double theta1, int degree, int narcs = 1) {
    if (degree < 2) throw ConfigError("make_circular_arc: degree must be >= 2");
    double total = theta1 - theta0;
    if (std::abs(total) / narcs > M_PI / 2.0 + 1e-12)
        throw ConfigError("make_circular_arc: segments must not exceed 90 degrees");

    std::vector<Vec2> cps;
    std::vector<double> wts;
    std::vector<double> knots;
    for (int d = 0; d <= degree; ++d) knots.push_back(0.0);

    for (int s = 0; s < narcs; ++s) {
        double a0 = theta0 + total * s / narcs;
        double a1 = theta0 + total * (s + 1) / narcs;
        double half = 0.5 * (a1 - a0);
        double wm = std::cos(half);
        Vec2 p0(std::cos(a0), std::sin(a0));
        Vec2 p2(std::cos(a1), std::sin(a1));
        // Tangent intersection point of the two endpoint tangents.
        Vec2 pm(std::cos(0.5 * (a0 + a1)) / wm, std::sin(0.5 * (a0 + a1)) / wm);
        std::vector<Vec2> seg{center + radius * p0, center + radius * pm, center + radius * p2};
        std::vector<double> segw{1.0, wm, 1.0};
        for (int e = 2; e < degree; ++e) detail::bezier_elevate(seg, segw);

        if (s == 0) {
            cps = seg;
            wts = segw;
        } else {
            for (std::size_t i = 1; i < seg.size(); ++i) {
                cps.push_back(seg[i]);
                wts.push_back(segw[i]);
            }
            double brk = double(s) / narcs;
            for (int d = 0; d < degree; ++d) knots.push_back(brk);
        }
    }
    for (int d = 0; d <= degree; ++d) knots.push_back(1.0);
    return NurbsCurve2D(KnotVector(degree, std::move(knots)), std::move(cps), std::move(wts));
}

/// Annular sector: xi runs radially from r_inner to r_outer, eta along the arc.
/// Every xi = const line is an exact circle of the interpolated radius.
inline NurbsPatch2D make_annulus(const Vec2& center, double r_inner, double r_outer,
                                 double theta0, double theta1, int degree, int radial_basis,
                                 int narcs = 1) {
    NurbsCurve2D arc = make_circular_arc(Vec2::Zero(), 1.0, theta0, theta1, degree, narcs);
    KnotVector kr = KnotVector::open_uniform(degree, radial_basis, 0.0, 1.0);
    auto gr = kr.greville();
    std::vector<Vec2> cps;
    std::vector<double> wts;
    for (std::size_t j = 0; j < arc.control_points().size(); ++j)
        for (double g : gr) {
            double rho = r_inner + (r_outer - r_inner) * g;
            cps.push_back(center + rho * arc.control_points()[j]);
            wts.push_back(arc.weights()[j]);
        }
    return NurbsPatch2D(kr, arc.knots(), std::move(cps), std::move(wts));
}

/// Interior break positions packing `frac_elems` of the elements into `frac_len` of
/// the parameter range, measured from the start; both zones are uniform.
inline std::vector<double> graded_breaks(int n_elems, double frac_elems, double frac_len,
                                         bool from_start = true) {
    int n_fine = int(std::round(frac_elems * n_elems));
    n_fine = std::max(1, std::min(n_elems - 1, n_fine));
    int n_coarse = n_elems - n_fine;
    std::vector<double> breaks;
    for (int i = 1; i < n_fine; ++i) breaks.push_back(frac_len * double(i) / n_fine);
    breaks.push_back(frac_len);
    for (int i = 1; i < n_coarse; ++i)
        breaks.push_back(frac_len + (1.0 - frac_len) * double(i) / n_coarse);
    if (!from_start) {
        std::vector<double> rev;
        for (auto it = breaks.rbegin(); it != breaks.rend(); ++it) rev.push_back(1.0 - *it);
        return rev;
    }
    return breaks;
}

/// Power-law graded break positions, x_i = (i/n)^beta; beta > 1 refines near 0.
inline std::vector<double> power_breaks(int n_elems, double beta) {
    std::vector<double> breaks;
    for (int i = 1; i < n_elems; ++i) breaks.push_back(std::pow(double(i) / n_elems, beta));
    return breaks;
}

}  // namespace iga
