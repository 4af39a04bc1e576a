#pragma once

/**
 * @file contact.hpp
 * @brief Frictionless penalty contact: closest-point projection, gap and traction
 *        kinematics, Gauss-point and Greville-point Galerkin contact contributions
 *        (one-pass and two-half-pass), moment-fitted point weights, and collocated
 *        contact rows with the row-replacement merge.
 */

#include <igacontact/collocation.hpp>

namespace iga {

// ---------------------------------------------------------------------------
// Surface views
// ---------------------------------------------------------------------------

/// Evaluable view of a contact surface in the current configuration: either a
/// patch boundary curve of a deformable body or a rigid line.
class SurfaceView {
public:
    SurfaceView() = default;

    SurfaceView(const Discretization& disc, Side side)
        : disc_(&disc), side_(side), curve_(disc.patch().boundary_curve(side)),
          cp_ids_(disc.patch().boundary_indices(side)) {
        // Orientation such that normal_sign * perp(tangent) points outward.
        double mid = 0.5 * (curve_.knots().front() + curve_.knots().back());
        CurvePoint c = curve_.eval(mid, 1);
        Vec2 n_out = outward_normal(disc.patch(), side, side_uv(mid));
        normal_sign_ = (n_out.dot(perp(c.d1)) >= 0.0) ? 1.0 : -1.0;
        Vec2 lo = curve_.control_points().front(), hi = lo;
        for (const auto& p : curve_.control_points()) {
            lo = lo.cwiseMin(p);
            hi = hi.cwiseMax(p);
        }
        diameter_ = (hi - lo).norm();
    }

    explicit SurfaceView(const RigidLine& line) : rigid_line_(line), diameter_(1.0) {}

    bool is_rigid() const { return disc_ == nullptr; }
    const Discretization& disc() const { return *disc_; }
    Side side() const { return side_; }
    const NurbsCurve2D& ref_curve() const { return curve_; }
    const std::vector<int>& cp_ids() const { return cp_ids_; }
    double normal_sign() const { return normal_sign_; }
    double diameter() const { return diameter_; }
    const RigidLine& rigid_line() const { return rigid_line_; }

    /// Patch parametric coordinates of a point on this side.
    Vec2 side_uv(double xi) const {
        const auto& patch = disc_->patch();
        switch (side_) {
            case Side::South: return Vec2(xi, patch.knots_v().front());
            case Side::North: return Vec2(xi, patch.knots_v().back());
            case Side::West: return Vec2(patch.knots_u().front(), xi);
            case Side::East: return Vec2(patch.knots_u().back(), xi);
        }
        return Vec2::Zero();
    }

    std::vector<Vec2> current_cps(const SystemState& state) const {
        std::vector<Vec2> cur(cp_ids_.size());
        for (std::size_t k = 0; k < cp_ids_.size(); ++k) {
            cur[k] = curve_.control_points()[k] +
                     Vec2(state.u[disc_->dof(cp_ids_[k], 0)], state.u[disc_->dof(cp_ids_[k], 1)]);
        }
        return cur;
    }

    int dof(int edge_cp, int comp) const { return disc_->dof(cp_ids_[edge_cp], comp); }

private:
    const Discretization* disc_ = nullptr;
    Side side_ = Side::South;
    NurbsCurve2D curve_;
    std::vector<int> cp_ids_;
    double normal_sign_ = 1.0;
    double diameter_ = 1.0;
    RigidLine rigid_line_{};
};

// ---------------------------------------------------------------------------
// Closest-point projection
// ---------------------------------------------------------------------------

struct ProjectionResult {
    double xi = 0.0;
    Vec2 xbar = Vec2::Zero();
    Vec2 nbar = Vec2::Zero();  ///< unit outward normal of the projected surface
    Vec2 tbar = Vec2::Zero();  ///< unit tangent
    Vec2 d1 = Vec2::Zero();    ///< curve first derivative at xi
    Vec2 d2 = Vec2::Zero();
    double gap = 0.0;          ///< (x - xbar) . nbar, positive when separated
    bool converged = false;
    bool clamped = false;
    double t_off = 0.0;        ///< tangential offset, nonzero for clamped projections
};

/// Macaulay-bracket penalty traction, t_N = eps <g>_- .
inline double penalty_traction(double gap, double penalty) {
    return gap <= 0.0 ? penalty * gap : 0.0;
}

/// Closest-point projection of x onto the master surface in the current
/// configuration. Newton on the orthogonality condition with a sampled cold
/// start; minimizers at curve endpoints are clamped and flagged.
inline ProjectionResult closest_point(const SurfaceView& master,
                                      const std::vector<Vec2>& master_cur, const Vec2& x,
                                      std::optional<double> seed = std::nullopt) {
    ProjectionResult out;
    if (master.is_rigid()) {
        const RigidLine& L = master.rigid_line();
        out.gap = (x - L.point).dot(L.normal);
        out.nbar = L.normal;
        out.tbar = Vec2(-L.normal.y(), L.normal.x());
        out.xbar = x - out.gap * L.normal;
        out.converged = true;
        return out;
    }

    const NurbsCurve2D& c = master.ref_curve();
    const double lo = c.knots().front(), hi = c.knots().back();
    auto dist = [&](double xi) {
        return (x - c.eval_with(master_cur, xi, 0).x).norm();
    };
    auto fval = [&](double xi) {
        CurvePoint ev = c.eval_with(master_cur, xi, 2);
        return std::make_pair(ev, (x - ev.x).dot(ev.d1));
    };

    // Newton refiner on the orthogonality condition; may land on any stationary
    // point, so every result is validated against the sampled bracket below.
    auto newton_from = [&](double xi0) -> std::optional<double> {
        double xi = std::min(hi, std::max(lo, xi0));
        for (int it = 0; it < 40; ++it) {
            auto [ev, f] = fval(xi);
            Vec2 d = x - ev.x;
            double scale = std::max(d.norm() * ev.d1.norm(), 1e-300);
            if (std::abs(f) <= 1e-14 * scale + 1e-300) return xi;
            double fp = -ev.d1.squaredNorm() + d.dot(ev.d2);
            if (fp == 0.0) return std::nullopt;
            double next = xi - f / fp;
            if (next < lo) next = lo;
            if (next > hi) next = hi;
            if ((next == lo && xi == lo) || (next == hi && xi == hi)) return xi;
            if (std::abs(next - xi) <= 1e-15 * (hi - lo)) return next;
            xi = next;
        }
        return std::nullopt;
    };

    // Bracket the global minimum by uniform sampling.
    const int ns = 64;
    double best = lo;
    double best_d = std::numeric_limits<double>::max();
    for (int i = 0; i <= ns; ++i) {
        double xi = lo + (hi - lo) * double(i) / ns;
        double d = dist(xi);
        if (d < best_d) {
            best_d = d;
            best = xi;
        }
    }

    double xi_opt = best;
    double d_opt = best_d;
    bool refined = false;
    std::vector<double> starts{best};
    if (seed && *seed >= lo && *seed <= hi) starts.push_back(*seed);
    for (double s0 : starts) {
        if (auto r = newton_from(s0)) {
            double dr = dist(*r);
            if (dr <= d_opt * (1.0 + 1e-12) + 1e-300) {
                xi_opt = *r;
                d_opt = dr;
                refined = true;
            }
        }
    }
    if (!refined) {
        // Golden-section polish of the sampled bracket.
        double a = std::max(lo, best - (hi - lo) / ns);
        double b = std::min(hi, best + (hi - lo) / ns);
        const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
        for (int it = 0; it < 90; ++it) {
            double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
            if (dist(x1) < dist(x2))
                b = x2;
            else
                a = x1;
        }
        xi_opt = 0.5 * (a + b);
    }

    const double xi = std::min(hi, std::max(lo, xi_opt));
    auto [ev, f] = fval(xi);
    Vec2 d = x - ev.x;
    out.xi = xi;
    out.xbar = ev.x;
    out.d1 = ev.d1;
    out.d2 = ev.d2;
    double j = ev.d1.norm();
    if (j == 0.0) return out;  // degenerate, treated as failed projection
    out.tbar = ev.d1 / j;
    out.nbar = master.normal_sign() * perp(ev.d1) / j;
    out.gap = d.dot(out.nbar);
    out.t_off = d.dot(out.tbar);
    // Clamped when pinned at an endpoint with the true minimizer outside the
    // parameter range (sign of the orthogonality residual points outward).
    double ftol = 1e-10 * std::max(d.norm() * j, 1e-30);
    out.clamped = (xi == lo && f < -ftol) || (xi == hi && f > ftol);
    out.converged = true;
    return out;
}

/// Active-set rule: penetrating and, for clamped endpoint projections, inside
/// the endpoint's normal wedge. Points overhanging a curve end have tangential
/// offsets far exceeding the penetration and are treated as open contact.
inline bool projection_active(const ProjectionResult& pr, double /*diameter*/) {
    if (!pr.converged) return false;
    if (pr.gap > 0.0) return false;
    if (pr.clamped && std::abs(pr.t_off) > std::abs(pr.gap)) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Moment-fitted point weights (PTS+)
// ---------------------------------------------------------------------------

struct PtsWeights {
    std::vector<double> points;  ///< Greville abscissae of the slave curve
    VecX weights;
};

/// Solve G w = F with F_i the exact basis moments and G_ij = R_i(tau_j).
inline PtsWeights compute_pts_weights(const NurbsCurve2D& curve) {
    const int n = curve.num_cps();
    const int p = curve.knots().degree();
    PtsWeights out;
    out.points = curve.knots().greville();

    VecX F = VecX::Zero(n);
    const auto& gr = gauss_rule(p + 1);
    for (auto [a, b] : curve.knots().spans())
        for (std::size_t q = 0; q < gr.nodes.size(); ++q) {
            double xi = 0.5 * ((b - a) * gr.nodes[q] + a + b);
            double w = 0.5 * (b - a) * gr.weights[q];
            BasisEval be = curve.rational_basis(xi, 0);
            for (int k = 0; k <= p; ++k) F[be.first_index(p) + k] += w * be.ders(0, k);
        }

    MatX G = MatX::Zero(n, n);
    for (int jcol = 0; jcol < n; ++jcol) {
        BasisEval be = curve.rational_basis(out.points[jcol], 0);
        for (int k = 0; k <= p; ++k) G(be.first_index(p) + k, jcol) = be.ders(0, k);
    }
    Eigen::FullPivLU<MatX> lu(G);
    if (!lu.isInvertible()) throw ConfigError("compute_pts_weights: singular moment system");
    out.weights = lu.solve(F);
    return out;
}

// ---------------------------------------------------------------------------
// Galerkin contact (GPTS / PTS, one-pass and two-half-pass)
// ---------------------------------------------------------------------------

/// Per-evaluation-point contact state, reported for post-processing.
struct ContactPointState {
    Vec2 x = Vec2::Zero();  ///< current position of the evaluation point
    double gap = 0.0;
    double t_N = 0.0;
    bool active = false;
};

/// Persistent projection seeds, one per evaluation point of each pass.
struct ContactSeeds {
    std::map<std::pair<int, int>, std::vector<double>> seeds;
    std::vector<double>& get(int pair_idx, int pass_idx) {
        return seeds[{pair_idx, pass_idx}];
    }
};

namespace detail {

struct SlaveEvalPoint {
    double xi = 0.0;
    double w = 0.0;  ///< parametric quadrature weight
};

inline std::vector<SlaveEvalPoint> gauss_eval_points(const NurbsCurve2D& curve) {
    std::vector<SlaveEvalPoint> pts;
    const int p = curve.knots().degree();
    const auto& gr = gauss_rule(p + 1);
    for (auto [a, b] : curve.knots().spans())
        for (std::size_t q = 0; q < gr.nodes.size(); ++q)
            pts.push_back({0.5 * ((b - a) * gr.nodes[q] + a + b), 0.5 * (b - a) * gr.weights[q]});
    return pts;
}

inline std::vector<SlaveEvalPoint> pts_eval_points(const PtsWeights& w) {
    std::vector<SlaveEvalPoint> pts;
    for (std::size_t i = 0; i < w.points.size(); ++i) pts.push_back({w.points[i], w.weights[i]});
    return pts;
}

}  // namespace detail

/// One contact pass: penalty tractions on the slave surface from projection onto
/// the master; optional action-reaction transfer of master row contributions
/// (one-pass mode). The tangent is the exact linearization of the residual,
/// including normal rotation, projection sliding and slave stretch terms.
inline void assemble_contact_pass(const SurfaceView& slave, const SurfaceView& master,
                                  const SystemState& state, double penalty, bool transfer,
                                  const std::vector<detail::SlaveEvalPoint>& eval_pts,
                                  std::vector<double>& seeds, AssembledSystem& sys,
                                  std::vector<ContactPointState>* report = nullptr) {
    const auto slave_cur = slave.current_cps(state);
    const auto master_cur = master.is_rigid() ? std::vector<Vec2>{} : master.current_cps(state);
    if (seeds.size() != eval_pts.size()) seeds.assign(eval_pts.size(), -1.0);

    const int ps = slave.ref_curve().knots().degree();
    const int pm = master.is_rigid() ? -1 : master.ref_curve().knots().degree();

    for (std::size_t q = 0; q < eval_pts.size(); ++q) {
        const double zeta = eval_pts[q].xi;
        const double wq = eval_pts[q].w;

        BasisEval sb = slave.ref_curve().rational_basis(zeta, 1);
        const int s0 = sb.first_index(ps);
        Vec2 xs = Vec2::Zero(), xsp = Vec2::Zero();
        for (int k = 0; k <= ps; ++k) {
            xs += sb.ders(0, k) * slave_cur[s0 + k];
            xsp += sb.ders(1, k) * slave_cur[s0 + k];
        }
        std::optional<double> seed;
        if (seeds[q] >= 0.0) seed = seeds[q];
        ProjectionResult pr = closest_point(master, master_cur, xs, seed);
        if (pr.converged && !master.is_rigid()) seeds[q] = pr.xi;

        bool active = projection_active(pr, master.diameter());
        if (report)
            report->push_back({xs, pr.gap, active ? penalty * pr.gap : 0.0, active});
        if (!active) continue;

        const double g = pr.gap;
        const Vec2 n = pr.nbar;
        const double jhat = xsp.norm();
        const Vec2 ts = xsp / jhat;

        // Local dof layout: slave edge functions first, then master edge functions.
        const int ns = ps + 1;
        const int nm = master.is_rigid() ? 0 : pm + 1;
        const int nloc = 2 * (ns + nm);
        std::vector<int> dofs(nloc);
        for (int a = 0; a < ns; ++a)
            for (int c = 0; c < 2; ++c) dofs[2 * a + c] = slave.dof(s0 + a, c);

        BasisEval mb;
        int m0 = 0;
        if (!master.is_rigid()) {
            mb = master.ref_curve().rational_basis(pr.xi, 1);
            m0 = mb.first_index(pm);
            for (int b = 0; b < nm; ++b)
                for (int c = 0; c < 2; ++c) dofs[2 * (ns + b) + c] = master.dof(m0 + b, c);
        }

        // Linear forms of the projection kinematics over the local dofs.
        VecX Dg = VecX::Zero(nloc), Dxi = VecX::Zero(nloc), Dj = VecX::Zero(nloc);
        MatX Dn = MatX::Zero(2, nloc);
        for (int a = 0; a < ns; ++a)
            for (int c = 0; c < 2; ++c) {
                Dg[2 * a + c] = n[c] * sb.ders(0, a);
                Dj[2 * a + c] = ts[c] * sb.ders(1, a);
            }
        if (!master.is_rigid()) {
            const double kappa = pr.d1.squaredNorm() - g * n.dot(pr.d2);
            const bool slide = !pr.clamped && std::abs(kappa) > 1e-300;
            for (int b = 0; b < nm; ++b)
                for (int c = 0; c < 2; ++c) Dg[2 * (ns + b) + c] -= n[c] * mb.ders(0, b);
            if (slide) {
                for (int a = 0; a < ns; ++a)
                    for (int c = 0; c < 2; ++c)
                        Dxi[2 * a + c] = pr.d1[c] * sb.ders(0, a) / kappa;
                for (int b = 0; b < nm; ++b)
                    for (int c = 0; c < 2; ++c)
                        Dxi[2 * (ns + b) + c] =
                            (-pr.d1[c] * mb.ders(0, b) + g * n[c] * mb.ders(1, b)) / kappa;
            }
            const double ncurv = n.dot(pr.d2);
            const double jm = pr.d1.norm();
            for (int v = 0; v < nloc; ++v) {
                double dtm = ncurv * Dxi[v];
                if (v >= 2 * ns) {
                    int b = (v - 2 * ns) / 2, c = (v - 2 * ns) % 2;
                    dtm += n[c] * mb.ders(1, b);
                }
                for (int i = 0; i < 2; ++i) Dn(i, v) = -pr.tbar[i] * dtm / jm;
            }
        }

        // Residual and exact tangent.
        const double f0 = wq * penalty;
        for (int a = 0; a < ns; ++a)
            for (int i = 0; i < 2; ++i) {
                int row = dofs[2 * a + i];
                sys.rhs[row] += f0 * g * n[i] * sb.ders(0, a) * jhat;
                for (int v = 0; v < nloc; ++v)
                    sys.add(row, dofs[v],
                            f0 * sb.ders(0, a) *
                                (jhat * n[i] * Dg[v] + jhat * g * Dn(i, v) +
                                 g * n[i] * Dj[v]));
            }
        if (transfer && !master.is_rigid()) {
            for (int b = 0; b < nm; ++b)
                for (int i = 0; i < 2; ++i) {
                    int row = dofs[2 * (ns + b) + i];
                    sys.rhs[row] -= f0 * g * n[i] * mb.ders(0, b) * jhat;
                    for (int v = 0; v < nloc; ++v)
                        sys.add(row, dofs[v],
                                -f0 * (jhat * mb.ders(0, b) * n[i] * Dg[v] +
                                       jhat * mb.ders(0, b) * g * Dn(i, v) +
                                       jhat * g * n[i] * mb.ders(1, b) * Dxi[v] +
                                       g * n[i] * mb.ders(0, b) * Dj[v]));
                }
        }
    }
}

/// Contact virtual work integrated at Gauss points of the slave boundary
/// elements (one-pass with action-reaction, or two independent half passes).
inline void assemble_gpts(const ProblemSpace& space, const SystemState& state,
                          const ContactPairSpec& pair, int pair_idx, bool two_half_pass,
                          ContactSeeds& seeds, AssembledSystem& sys) {
    SurfaceView a = pair.a.is_rigid() ? SurfaceView(pair.a.rigid)
                                      : SurfaceView(space.discs[pair.a.body], pair.a.side);
    SurfaceView b = pair.b.is_rigid() ? SurfaceView(pair.b.rigid)
                                      : SurfaceView(space.discs[pair.b.body], pair.b.side);
    if (!a.is_rigid()) {
        auto pts = detail::gauss_eval_points(a.ref_curve());
        assemble_contact_pass(a, b, state, pair.penalty, !two_half_pass, pts,
                              seeds.get(pair_idx, 0), sys);
    }
    if (two_half_pass && !b.is_rigid()) {
        auto pts = detail::gauss_eval_points(b.ref_curve());
        assemble_contact_pass(b, a, state, pair.penalty, false, pts, seeds.get(pair_idx, 1),
                              sys);
    }
}

/// Same contact virtual work, but evaluated at the slave Greville abscissae with
/// moment-fitted weights (reduced quadrature).
inline void assemble_pts(const ProblemSpace& space, const SystemState& state,
                         const ContactPairSpec& pair, int pair_idx, bool two_half_pass,
                         ContactSeeds& seeds, AssembledSystem& sys) {
    SurfaceView a = pair.a.is_rigid() ? SurfaceView(pair.a.rigid)
                                      : SurfaceView(space.discs[pair.a.body], pair.a.side);
    SurfaceView b = pair.b.is_rigid() ? SurfaceView(pair.b.rigid)
                                      : SurfaceView(space.discs[pair.b.body], pair.b.side);
    if (!a.is_rigid()) {
        auto w = compute_pts_weights(a.ref_curve());
        assemble_contact_pass(a, b, state, pair.penalty, !two_half_pass,
                              detail::pts_eval_points(w), seeds.get(pair_idx, 0), sys);
    }
    if (two_half_pass && !b.is_rigid()) {
        auto w = compute_pts_weights(b.ref_curve());
        assemble_contact_pass(b, a, state, pair.penalty, false, detail::pts_eval_points(w),
                              seeds.get(pair_idx, 1), sys);
    }
}

// ---------------------------------------------------------------------------
// Collocated contact rows (C / EC contact edges, CCS / ECCS row replacement)
// ---------------------------------------------------------------------------

struct CollocatedContactRows {
    std::vector<char> replace_mask;
    std::vector<Triplet> trips;
    std::vector<std::pair<int, double>> rhs;  ///< exclusive-owner row values
};

namespace detail {

/// Rows for all contact-edge collocation points of one deformable surface.
/// Each boundary control point of the side owns one 2-row block; the block
/// holds P N - T = 0 (plain) or the enhanced area/edge combination.
inline void surface_contact_rows(const SurfaceView& own, const SurfaceView& other,
                                 const SystemState& state, double load_factor, double penalty,
                                 bool enhanced, double cstar, std::vector<double>& seeds,
                                 CollocatedContactRows& out,
                                 std::vector<ContactPointState>* report) {
    const Discretization& disc = own.disc();
    const NurbsPatch2D& patch = disc.patch();
    const auto own_cur = own.current_cps(state);
    const auto other_cur = other.is_rigid() ? std::vector<Vec2>{} : other.current_cps(state);
    const auto greville = own.ref_curve().knots().greville();
    const int nedge = int(greville.size());
    if (seeds.size() != std::size_t(nedge)) seeds.assign(nedge, -1.0);
    const int pe = own.ref_curve().knots().degree();

    for (int k = 0; k < nedge; ++k) {
        const int cp = own.cp_ids()[k];
        const double tau = greville[k];
        const Vec2 uv = own.side_uv(tau);
        PointCache pc = build_point_cache(patch, uv, 2);

        // Adjacent sides at this point: the contact side, plus the neighbouring
        // side when the control point sits in a patch corner.
        std::vector<Side> sides{own.side()};
        if (k == 0 || k == nedge - 1) {
            int i = cp % patch.nu(), j = cp / patch.nu();
            for (Side s : all_sides) {
                if (s == own.side()) continue;
                bool on = (s == Side::South && j == 0) || (s == Side::North && j == patch.nv() - 1) ||
                          (s == Side::West && i == 0) || (s == Side::East && i == patch.nu() - 1);
                if (on) {
                    if (disc.body().side(s).contact)
                        throw ConfigError("contact rows: adjacent contact sides at a corner");
                    sides.push_back(s);
                }
            }
        }

        // Current position and edge stretch of the collocation point.
        BasisEval eb = own.ref_curve().rational_basis(tau, 1);
        const int e0 = eb.first_index(pe);
        Vec2 xc = Vec2::Zero(), xcp = Vec2::Zero();
        for (int a = 0; a <= pe; ++a) {
            xc += eb.ders(0, a) * own_cur[e0 + a];
            xcp += eb.ders(1, a) * own_cur[e0 + a];
        }
        CurvePoint ref = own.ref_curve().eval(tau, 1);
        const double Xp = ref.d1.norm();

        std::optional<double> seed;
        if (seeds[k] >= 0.0) seed = seeds[k];
        ProjectionResult pr = closest_point(other, other_cur, xc, seed);
        if (pr.converged && !other.is_rigid()) seeds[k] = pr.xi;
        const bool active = projection_active(pr, other.diameter());
        if (report)
            report->push_back({xc, pr.gap, active ? penalty * pr.gap : 0.0, active});

        // Assemble the 2-row block over the union of local dofs.
        RowTerms row;
        std::vector<int> dofs;
        std::map<int, int> dofmap;
        auto local = [&](int gdof) {
            auto it = dofmap.find(gdof);
            if (it != dofmap.end()) return it->second;
            int idx = int(dofs.size());
            dofs.push_back(gdof);
            dofmap[gdof] = idx;
            return idx;
        };
        for (std::size_t b = 0; b < pc.cps.size(); ++b)
            for (int c = 0; c < 2; ++c) local(disc.dof(pc.cps[b], c));
        const int nm = other.is_rigid() ? 0 : other.ref_curve().knots().degree() + 1;
        BasisEval mb;
        int m0 = 0;
        if (active && !other.is_rigid()) {
            mb = other.ref_curve().rational_basis(pr.xi, 1);
            m0 = mb.first_index(other.ref_curve().knots().degree());
            for (int b = 0; b < nm; ++b)
                for (int c = 0; c < 2; ++c) local(other.dof(m0 + b, c));
        }

        Vec2 r = Vec2::Zero();
        MatX K = MatX::Zero(2, dofs.size());
        auto add_terms = [&](const RowTerms& rt, double scale) {
            r += scale * rt.r;
            for (std::size_t v = 0; v < rt.dofs.size(); ++v) {
                int lv = local(rt.dofs[v]);
                for (int i = 0; i < 2; ++i) K(i, lv) += scale * rt.K(i, v);
            }
        };

        if (enhanced) add_terms(pde_terms(disc, pc, state), 1.0);

        for (Side s : sides) {
            const BoundarySpec& bs = disc.body().side(s);
            Vec2 N = outward_normal(patch, s, uv);
            double scale = enhanced ? -cstar / perpendicular_width(patch, s, uv) : 1.0;
            RowTerms flux = flux_terms(disc, pc, state, N);
            add_terms(flux, scale);

            Vec2 T = Vec2::Zero();
            if (s == own.side() && active) {
                // Live contact traction mapped to the reference configuration by
                // the boundary stretch (Nanson on the curve).
                const double g = pr.gap;
                const Vec2 n = pr.nbar;
                const double shat = xcp.norm() / Xp;
                T = -penalty * g * shat * n;

                // Tangent of T over (own edge dofs, other edge dofs).
                const int ns = pe + 1;
                const int nl = 2 * (ns + nm);
                VecX Dg = VecX::Zero(nl), Dxi = VecX::Zero(nl), Ds = VecX::Zero(nl);
                MatX Dn = MatX::Zero(2, nl);
                const Vec2 tc = xcp / xcp.norm();
                for (int a = 0; a < ns; ++a)
                    for (int c = 0; c < 2; ++c) {
                        Dg[2 * a + c] = n[c] * eb.ders(0, a);
                        Ds[2 * a + c] = tc[c] * eb.ders(1, a) / Xp;
                    }
                if (!other.is_rigid()) {
                    const double kappa = pr.d1.squaredNorm() - g * n.dot(pr.d2);
                    const bool slide = !pr.clamped && std::abs(kappa) > 1e-300;
                    for (int b = 0; b < nm; ++b)
                        for (int c = 0; c < 2; ++c) Dg[2 * (ns + b) + c] -= n[c] * mb.ders(0, b);
                    if (slide) {
                        for (int a = 0; a < ns; ++a)
                            for (int c = 0; c < 2; ++c)
                                Dxi[2 * a + c] = pr.d1[c] * eb.ders(0, a) / kappa;
                        for (int b = 0; b < nm; ++b)
                            for (int c = 0; c < 2; ++c)
                                Dxi[2 * (ns + b) + c] =
                                    (-pr.d1[c] * mb.ders(0, b) + g * n[c] * mb.ders(1, b)) /
                                    kappa;
                    }
                    const double ncurv = n.dot(pr.d2);
                    const double jm = pr.d1.norm();
                    for (int v = 0; v < nl; ++v) {
                        double dtm = ncurv * Dxi[v];
                        if (v >= 2 * ns) {
                            int b = (v - 2 * ns) / 2, c = (v - 2 * ns) % 2;
                            dtm += n[c] * mb.ders(1, b);
                        }
                        for (int i = 0; i < 2; ++i) Dn(i, v) = -pr.tbar[i] * dtm / jm;
                    }
                }
                // dT_i = -eps (Dg n_i s + g Dn_i s + g n_i Ds); row K -= scale * dT.
                auto col = [&](int v) {
                    if (v < 2 * ns) {
                        int a = v / 2, c = v % 2;
                        return local(own.dof(e0 + a, c));
                    }
                    int b = (v - 2 * ns) / 2, c = (v - 2 * ns) % 2;
                    return local(other.dof(m0 + b, c));
                };
                for (int v = 0; v < nl; ++v) {
                    int lv = col(v);
                    for (int i = 0; i < 2; ++i) {
                        double dT = -penalty * (Dg[v] * n[i] * shat + g * Dn(i, v) * shat +
                                                g * n[i] * Ds[v]);
                        K(i, lv) -= scale * dT;
                    }
                }
            } else if (bs.traction) {
                // Inactive contact points fall back to the prescribed boundary
                // traction (dead load); plain Neumann data on adjacent sides.
                T = bs.traction(pc.X, load_factor);
            }
            r -= scale * T;
        }

        for (int c = 0; c < 2; ++c) {
            int rowdof = disc.dof(cp, c);
            out.replace_mask[rowdof] = 1;
            out.rhs.emplace_back(rowdof, r[c]);
            for (std::size_t v = 0; v < dofs.size(); ++v)
                if (K(c, v) != 0.0) out.trips.emplace_back(rowdof, dofs[v], K(c, v));
        }
    }
}

}  // namespace detail

/// Collocated contact row blocks for both deformable surfaces of a pair
/// (inherently two-half-pass). Inactive points reduce to strong Neumann rows.
inline CollocatedContactRows collocated_contact_rows(const ProblemSpace& space,
                                                     const SystemState& state,
                                                     double load_factor,
                                                     const ContactPairSpec& pair, int pair_idx,
                                                     bool enhanced, ContactSeeds& seeds,
                                                     std::vector<ContactPointState>* report = nullptr,
                                                     double cstar = kEnhancedCstarDefault) {
    CollocatedContactRows out;
    out.replace_mask.assign(space.ndof, 0);
    SurfaceView a = pair.a.is_rigid() ? SurfaceView(pair.a.rigid)
                                      : SurfaceView(space.discs[pair.a.body], pair.a.side);
    SurfaceView b = pair.b.is_rigid() ? SurfaceView(pair.b.rigid)
                                      : SurfaceView(space.discs[pair.b.body], pair.b.side);
    if (!a.is_rigid())
        detail::surface_contact_rows(a, b, state, load_factor, pair.penalty, enhanced, cstar,
                                     seeds.get(pair_idx, 10), out, report);
    if (!b.is_rigid())
        detail::surface_contact_rows(b, a, state, load_factor, pair.penalty, enhanced, cstar,
                                     seeds.get(pair_idx, 11), out, report);
    return out;
}

/// Replace the rows of all DOFs whose basis functions have support on the contact
/// boundary by the collocated contact rows, directly in the assembled system.
inline void merge_collocated_rows(AssembledSystem& sys, const CollocatedContactRows& rows) {
    sys.drop_rows(rows.replace_mask);
    for (const auto& [row, val] : rows.rhs) sys.rhs[row] = val;
    sys.trips.insert(sys.trips.end(), rows.trips.begin(), rows.trips.end());
    for (int i = 0; i < sys.n; ++i)
        if (rows.replace_mask[i]) sys.kind[i] = RowKind::Collocated;
}

/// Active flags at the formulation's contact evaluation points, re-evaluated at
/// the given state (Greville points of both surfaces of the pair).
inline std::vector<ContactPointState> active_set(const ProblemSpace& space,
                                                 const SystemState& state,
                                                 const ContactPairSpec& pair) {
    std::vector<ContactPointState> report;
    auto eval_surface = [&](const ContactSurfaceRef& sref, const ContactSurfaceRef& oref) {
        if (sref.is_rigid()) return;
        SurfaceView own(space.discs[sref.body], sref.side);
        SurfaceView other = oref.is_rigid() ? SurfaceView(oref.rigid)
                                            : SurfaceView(space.discs[oref.body], oref.side);
        auto own_cur = own.current_cps(state);
        auto other_cur = other.is_rigid() ? std::vector<Vec2>{} : other.current_cps(state);
        for (double tau : own.ref_curve().knots().greville()) {
            Vec2 xc = Vec2::Zero();
            BasisEval eb = own.ref_curve().rational_basis(tau, 0);
            int e0 = eb.first_index(own.ref_curve().knots().degree());
            for (int a = 0; a <= own.ref_curve().knots().degree(); ++a)
                xc += eb.ders(0, a) * own_cur[e0 + a];
            ProjectionResult pr = closest_point(other, other_cur, xc);
            bool act = projection_active(pr, other.diameter());
            report.push_back({xc, pr.gap, act ? pair.penalty * pr.gap : 0.0, act});
        }
    };
    eval_surface(pair.a, pair.b);
    eval_surface(pair.b, pair.a);
    return report;
}

}  // namespace iga
