#pragma once

/**
 * @file collocation.hpp
 * @brief Strong-form residual rows at Greville collocation points: interior
 *        momentum balance, Neumann edge/corner rows, and the enhanced boundary
 *        treatment that blends area and edge terms with a Cstar/h weight.
 */

#include <igacontact/fespace.hpp>

namespace iga {

inline constexpr double kEnhancedCstarDefault = 4.0;

/// Basis and geometry data at one collocation point, in physical coordinates.
struct PointCache {
    Vec2 uv;
    Vec2 X;
    Mat2 J;  ///< reference geometry Jacobian dX/d(xi,eta)
    std::vector<int> cps;
    std::vector<double> val;
    std::vector<Vec2> grad;                 ///< physical gradients
    std::vector<Eigen::Vector3d> hess;      ///< physical (xx, xy, yy)
};

/// Build basis caches at a parametric point; second derivatives are mapped with
/// the curved-geometry correction term.
inline PointCache build_point_cache(const NurbsPatch2D& patch, const Vec2& uv, int nders) {
    PointCache pc;
    pc.uv = uv;
    SurfacePoint sp = patch.eval_surface(uv[0], uv[1], nders);
    pc.X = sp.x;
    pc.J = sp.jacobian();
    Mat2 Jinv = pc.J.inverse();
    PatchBasis pb = patch.basis(uv[0], uv[1], nders);
    pc.cps = pb.indices;
    pc.val = pb.val;
    if (nders >= 1) {
        pc.grad.resize(pc.cps.size());
        for (std::size_t k = 0; k < pc.cps.size(); ++k)
            pc.grad[k] = Jinv.transpose() * pb.grad[k];
    }
    if (nders >= 2) {
        // Parametric Hessians of the geometry components.
        Mat2 HX0, HX1;
        HX0 << sp.d_xixi[0], sp.d_xieta[0], sp.d_xieta[0], sp.d_etaeta[0];
        HX1 << sp.d_xixi[1], sp.d_xieta[1], sp.d_xieta[1], sp.d_etaeta[1];
        pc.hess.resize(pc.cps.size());
        for (std::size_t k = 0; k < pc.cps.size(); ++k) {
            Mat2 Hp;
            Hp << pb.hess[k][0], pb.hess[k][1], pb.hess[k][1], pb.hess[k][2];
            Mat2 Hc = Hp - pc.grad[k][0] * HX0 - pc.grad[k][1] * HX1;
            Mat2 H = Jinv.transpose() * Hc * Jinv;
            pc.hess[k] = Eigen::Vector3d(H(0, 0), 0.5 * (H(0, 1) + H(1, 0)), H(1, 1));
        }
    }
    return pc;
}

/// Residual 2-vector with its dense tangent over the point's local DOFs.
struct RowTerms {
    Vec2 r = Vec2::Zero();
    std::vector<int> dofs;  ///< global column dofs, 2 per local control point
    MatX K;                 ///< 2 x dofs.size()
};

inline void init_row_terms(const Discretization& disc, const PointCache& pc, RowTerms& out) {
    out.dofs.resize(2 * pc.cps.size());
    for (std::size_t b = 0; b < pc.cps.size(); ++b)
        for (int c = 0; c < 2; ++c) out.dofs[2 * b + c] = disc.dof(pc.cps[b], c);
    out.K = MatX::Zero(2, out.dofs.size());
}

/// Pointwise divergence of the first Piola-Kirchhoff stress, div P (+ B = 0),
/// with consistent tangent. Requires second derivative caches.
inline RowTerms pde_terms(const Discretization& disc, const PointCache& pc,
                          const SystemState& state) {
    RowTerms out;
    init_row_terms(disc, pc, out);
    const Material& mat = disc.body().material;

    Mat2 gu = Mat2::Zero();
    double H[2][2][2] = {};  // H[k][l][j] = d2 u_k / dX_l dX_j
    for (std::size_t b = 0; b < pc.cps.size(); ++b) {
        Vec2 ub(state.u[out.dofs[2 * b]], state.u[out.dofs[2 * b + 1]]);
        gu += ub * pc.grad[b].transpose();
        const auto& h = pc.hess[b];
        const double hm[2][2] = {{h[0], h[1]}, {h[1], h[2]}};
        for (int k = 0; k < 2; ++k)
            for (int l = 0; l < 2; ++l)
                for (int j = 0; j < 2; ++j) H[k][l][j] += hm[l][j] * ub[k];
    }
    Mat2 F = Mat2::Identity() + gu;
    PointStress ps = eval_PA(mat, F);
    Tensor6 D = eval_dA(mat, F);

    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
                for (int l = 0; l < 2; ++l) out.r[i] += ps.A(i, j, k, l) * H[k][l][j];

    // d r_i = (dA : dF) H + A : dH
    Mat2 DH[2];  // DH[i](m,n) = sum_jkl D(i,j,k,l,m,n) H[k][l][j]
    for (int i = 0; i < 2; ++i) {
        DH[i].setZero();
        if (mat.kind == Material::Kind::NeoHookean)
            for (int m = 0; m < 2; ++m)
                for (int n = 0; n < 2; ++n) {
                    double v = 0.0;
                    for (int j = 0; j < 2; ++j)
                        for (int k = 0; k < 2; ++k)
                            for (int l = 0; l < 2; ++l) v += D(i, j, k, l, m, n) * H[k][l][j];
                    DH[i](m, n) = v;
                }
    }
    for (std::size_t b = 0; b < pc.cps.size(); ++b) {
        const auto& h = pc.hess[b];
        const double hm[2][2] = {{h[0], h[1]}, {h[1], h[2]}};
        for (int i = 0; i < 2; ++i)
            for (int m = 0; m < 2; ++m) {
                double v = 0.0;
                for (int n = 0; n < 2; ++n) v += DH[i](m, n) * pc.grad[b][n];
                for (int j = 0; j < 2; ++j)
                    for (int l = 0; l < 2; ++l) v += ps.A(i, j, m, l) * hm[l][j];
                out.K(i, 2 * b + m) += v;
            }
    }
    return out;
}

/// Traction flux P N with consistent tangent (N fixed in the reference config).
inline RowTerms flux_terms(const Discretization& disc, const PointCache& pc,
                           const SystemState& state, const Vec2& N_ref) {
    RowTerms out;
    init_row_terms(disc, pc, out);
    const Material& mat = disc.body().material;
    Mat2 gu = Mat2::Zero();
    for (std::size_t b = 0; b < pc.cps.size(); ++b) {
        Vec2 ub(state.u[out.dofs[2 * b]], state.u[out.dofs[2 * b + 1]]);
        gu += ub * pc.grad[b].transpose();
    }
    Mat2 F = Mat2::Identity() + gu;
    PointStress ps = eval_PA(mat, F);
    out.r = ps.P * N_ref;
    for (std::size_t b = 0; b < pc.cps.size(); ++b)
        for (int i = 0; i < 2; ++i)
            for (int m = 0; m < 2; ++m) {
                double v = 0.0;
                for (int j = 0; j < 2; ++j)
                    for (int l = 0; l < 2; ++l)
                        v += ps.A(i, j, m, l) * N_ref[j] * pc.grad[b][l];
                out.K(i, 2 * b + m) += v;
            }
    return out;
}

// ---------------------------------------------------------------------------
// Collocation grid
// ---------------------------------------------------------------------------

enum class CollocClass { Interior, Edge, Corner };

struct CollocEdgeData {
    Side side = Side::South;
    Vec2 N_ref = Vec2::Zero();  ///< outward unit normal in the reference configuration
    double h = 0.0;             ///< physical element width perpendicular to the edge
};

struct CollocPoint {
    int cp = 0;  ///< control point grid index; rows 2cp, 2cp+1 belong to this point
    Vec2 uv;
    CollocClass cls = CollocClass::Interior;
    std::vector<CollocEdgeData> edges;  ///< one entry for edge points, two at corners
    PointCache cache;
};

/// Outward unit reference normal of a patch side at a parametric point.
inline Vec2 outward_normal(const NurbsPatch2D& patch, Side side, const Vec2& uv) {
    SurfacePoint sp = patch.eval_surface(uv[0], uv[1], 1);
    Mat2 JinvT = sp.jacobian().inverse().transpose();
    Vec2 dir;
    switch (side) {
        case Side::South: dir = -JinvT.col(1); break;
        case Side::North: dir = JinvT.col(1); break;
        case Side::West: dir = -JinvT.col(0); break;
        case Side::East: dir = JinvT.col(0); break;
    }
    return dir.normalized();
}

/// Physical element width perpendicular to a boundary side at a parametric point.
inline double perpendicular_width(const NurbsPatch2D& patch, Side side, const Vec2& uv) {
    auto boundary_span = [](const KnotVector& kv, bool from_end) {
        auto s = kv.spans();
        return from_end ? s.back() : s.front();
    };
    Vec2 a = uv, b = uv;
    if (side == Side::South || side == Side::North) {
        auto sp = boundary_span(patch.knots_v(), side == Side::North);
        a[1] = sp.first;
        b[1] = sp.second;
    } else {
        auto sp = boundary_span(patch.knots_u(), side == Side::East);
        a[0] = sp.first;
        b[0] = sp.second;
    }
    return (patch.eval_surface(b[0], b[1], 0).x - patch.eval_surface(a[0], a[1], 0).x).norm();
}

class CollocationGrid {
public:
    explicit CollocationGrid(const Discretization& disc) : disc_(&disc) {
        const auto& patch = disc.patch();
        if (patch.knots_u().degree() < 2 || patch.knots_v().degree() < 2)
            throw ConfigError("CollocationGrid: bulk collocation requires degree >= 2");
        if (patch.knots_u().max_interior_multiplicity() > patch.knots_u().degree() - 1 ||
            patch.knots_v().max_interior_multiplicity() > patch.knots_v().degree() - 1)
            throw ConfigError("CollocationGrid: interior continuity below C^1");

        auto gu = patch.knots_u().greville();
        auto gv = patch.knots_v().greville();
        const int n = patch.nu(), m = patch.nv();
        points_.reserve(std::size_t(n) * m);
        for (int j = 0; j < m; ++j)
            for (int i = 0; i < n; ++i) {
                CollocPoint cp;
                cp.cp = patch.grid_index(i, j);
                cp.uv = Vec2(gu[i], gv[j]);
                std::vector<Side> sides;
                if (j == 0) sides.push_back(Side::South);
                if (i == n - 1) sides.push_back(Side::East);
                if (j == m - 1) sides.push_back(Side::North);
                if (i == 0) sides.push_back(Side::West);
                cp.cls = sides.empty() ? CollocClass::Interior
                                       : (sides.size() == 1 ? CollocClass::Edge
                                                            : CollocClass::Corner);
                for (Side s : sides) {
                    CollocEdgeData ed;
                    ed.side = s;
                    ed.N_ref = outward_normal(patch, s, cp.uv);
                    ed.h = perpendicular_width(patch, s, cp.uv);
                    cp.edges.push_back(ed);
                }
                cp.cache = build_point_cache(patch, cp.uv, 2);
                points_.push_back(std::move(cp));
            }
    }

    const Discretization& disc() const { return *disc_; }
    const std::vector<CollocPoint>& points() const { return points_; }

    bool touches_contact(const CollocPoint& p) const {
        for (const auto& e : p.edges)
            if (disc_->body().side(e.side).contact) return true;
        return false;
    }

private:
    const Discretization* disc_;
    std::vector<CollocPoint> points_;
};

enum class CollocMode { Plain, Enhanced };

/// Scatter a 2-row block into the system at the collocation point's DOF rows.
inline void scatter_rows(const Discretization& disc, int cp, const RowTerms& rt,
                         AssembledSystem& sys) {
    for (int c = 0; c < 2; ++c) {
        int row = disc.dof(cp, c);
        sys.rhs[row] += rt.r[c];
        for (std::size_t k = 0; k < rt.dofs.size(); ++k) sys.add(row, rt.dofs[k], rt.K(c, k));
    }
}

/// Strong-form rows for the collocated bulk. Contact-edge and contact-corner
/// points are left untouched; the contact module owns those rows. Dirichlet
/// components are overwritten later by apply_dirichlet.
inline void assemble_collocated_bulk(const CollocationGrid& grid, const SystemState& state,
                                     double load_factor, CollocMode mode, AssembledSystem& sys,
                                     double cstar = kEnhancedCstarDefault) {
    const Discretization& disc = grid.disc();
    for (const auto& p : grid.points()) {
        if (grid.touches_contact(p)) continue;
        if (p.cls == CollocClass::Interior) {
            scatter_rows(disc, p.cp, pde_terms(disc, p.cache, state), sys);
            continue;
        }
        // Edge or corner point: combine traction mismatches of adjacent sides.
        RowTerms row;
        bool enhanced = (mode == CollocMode::Enhanced);
        if (enhanced) row = pde_terms(disc, p.cache, state);
        bool first = true;
        for (const auto& e : p.edges) {
            const BoundarySpec& bs = disc.body().side(e.side);
            RowTerms flux = flux_terms(disc, p.cache, state, e.N_ref);
            Vec2 Tbar = bs.traction ? bs.traction(p.cache.X, load_factor) : Vec2::Zero();
            flux.r -= Tbar;
            double scale = enhanced ? -cstar / e.h : 1.0;
            if (first && !enhanced) {
                row = flux;
                row.r *= scale;
                row.K *= scale;
                first = false;
            } else {
                row.r += scale * flux.r;
                row.K += scale * flux.K;
            }
        }
        scatter_rows(disc, p.cp, row, sys);
        for (int c = 0; c < 2; ++c) sys.kind[disc.dof(p.cp, c)] = RowKind::Collocated;
    }
    for (const auto& p : grid.points()) {
        if (grid.touches_contact(p)) continue;
        if (p.cls == CollocClass::Interior)
            for (int c = 0; c < 2; ++c) sys.kind[disc.dof(p.cp, c)] = RowKind::Collocated;
    }
}

}  // namespace iga
