#pragma once

/**
 * @file fespace.hpp
 * @brief Two-body model description (boundary tagging, contact pairing, load
 *        schedules), DOF management and Galerkin assembly of the bulk:
 *        internal/external force vectors, consistent tangent, Dirichlet and
 *        periodic constraints.
 */

#include <igacontact/materials.hpp>
#include <igacontact/splines.hpp>

namespace iga {

// ---------------------------------------------------------------------------
// Model description
// ---------------------------------------------------------------------------

/// Scalar boundary data as a function of reference position and load factor.
using ScalarFn = std::function<double(const Vec2&, double)>;
/// Reference traction (dead load) as a function of reference position and load factor.
using TractionFn = std::function<Vec2(const Vec2&, double)>;

struct BoundarySpec {
    bool contact = false;
    std::array<bool, 2> dirichlet{false, false};
    std::array<ScalarFn, 2> dirichlet_value{};
    /// Prescribed reference traction. On contact sides this doubles as the value
    /// enforced at contact evaluation points that are not in contact.
    TractionFn traction{};

    void set_dirichlet(int comp, ScalarFn fn) {
        dirichlet[comp] = true;
        dirichlet_value[comp] = std::move(fn);
    }
    void set_dirichlet_const(int comp, double v) {
        set_dirichlet(comp, [v](const Vec2&, double) { return v; });
    }
    /// Prescribed value scaled linearly by the load factor.
    void set_dirichlet_ramp(int comp, double v) {
        set_dirichlet(comp, [v](const Vec2&, double s) { return v * s; });
    }
};

struct Body {
    NurbsPatch2D patch;
    Material material;
    std::array<BoundarySpec, 4> sides{};

    BoundarySpec& side(Side s) { return sides[int(s)]; }
    const BoundarySpec& side(Side s) const { return sides[int(s)]; }
};

/// Rigid flat obstacle; `normal` is the outward normal of the rigid half space,
/// pointing toward the deformable body.
struct RigidLine {
    Vec2 point = Vec2::Zero();
    Vec2 normal = Vec2(0.0, 1.0);
};

struct ContactSurfaceRef {
    int body = -1;  ///< -1 marks a rigid surface
    Side side = Side::South;
    RigidLine rigid{};

    bool is_rigid() const { return body < 0; }
    static ContactSurfaceRef deformable(int body, Side side) { return {body, side, {}}; }
    static ContactSurfaceRef rigid_line(const RigidLine& line) {
        ContactSurfaceRef r;
        r.body = -1;
        r.rigid = line;
        return r;
    }
};

/// Contact pair; surface `a` is the slave in one-pass formulations.
struct ContactPairSpec {
    ContactSurfaceRef a, b;
    double penalty = 100.0;
};

/// Master/slave side tie within one body (matching control point counts).
struct PeriodicTie {
    int body = 0;
    Side master = Side::West;
    Side slave = Side::East;
};

struct Model {
    std::vector<Body> bodies;
    std::vector<ContactPairSpec> contacts;
    std::vector<PeriodicTie> periodic;
};

// ---------------------------------------------------------------------------
// Discretization
// ---------------------------------------------------------------------------

/// Per-body discretization: global DOF window, element quadrature caches in the
/// reference configuration and boundary bookkeeping. Basis data is immutable
/// after construction; assembly recomputes only state-dependent quantities.
class Discretization {
public:
    struct QuadPoint {
        Vec2 X;
        double w = 0.0;  ///< gauss weight x reference Jacobian determinant
        std::vector<double> val;
        std::vector<Vec2> grad;  ///< physical gradients
    };
    struct Element {
        std::vector<int> cps;  ///< local-to-grid control point map
        std::vector<QuadPoint> qps;
    };
    struct EdgeQuadPoint {
        double xi = 0.0;  ///< edge curve parameter
        Vec2 X;
        double w = 0.0;  ///< gauss weight x |X'(xi)|
        std::vector<int> cps;
        std::vector<double> val;
    };
    struct DirichletEntry {
        int dof = 0;
        ScalarFn value;
    };

    Discretization(const Body& body, int body_index, int dof_offset)
        : body_(body), body_index_(body_index), dof_offset_(dof_offset) {
        body_.material.validate();
        build_elements();
        build_edges();
        collect_dirichlet();
    }

    const Body& body() const { return body_; }
    const NurbsPatch2D& patch() const { return body_.patch; }
    int body_index() const { return body_index_; }
    int dof_offset() const { return dof_offset_; }
    int num_cps() const { return body_.patch.num_cps(); }
    int num_dofs() const { return 2 * num_cps(); }
    int dof(int cp, int comp) const { return dof_offset_ + 2 * cp + comp; }

    const std::vector<Element>& elements() const { return elements_; }
    const std::vector<EdgeQuadPoint>& edge_quadrature(Side s) const { return edge_qps_[int(s)]; }
    const std::vector<DirichletEntry>& dirichlet() const { return dirichlet_; }

    /// Displacement gradient at a quadrature point from the global state vector.
    Mat2 grad_u(const QuadPoint& qp, const std::vector<int>& cps, const VecX& u) const {
        Mat2 g = Mat2::Zero();
        for (std::size_t b = 0; b < cps.size(); ++b) {
            Vec2 ub(u[dof(cps[b], 0)], u[dof(cps[b], 1)]);
            g += ub * qp.grad[b].transpose();
        }
        return g;
    }

    Vec2 cp_position(int cp) const { return body_.patch.control_points()[cp]; }

    /// Reference position of the Greville map of a control point; used to
    /// evaluate prescribed boundary values.
    Vec2 greville_position(int i, int j) const {
        auto gu = body_.patch.knots_u().greville();
        auto gv = body_.patch.knots_v().greville();
        return body_.patch.eval_surface(gu[i], gv[j], 0).x;
    }

private:
    void build_elements() {
        const auto& patch = body_.patch;
        const int p = patch.knots_u().degree(), q = patch.knots_v().degree();
        const auto& gr_u = gauss_rule(p + 1);
        const auto& gr_v = gauss_rule(q + 1);
        for (auto [u0, u1] : patch.knots_u().spans()) {
            for (auto [v0, v1] : patch.knots_v().spans()) {
                Element el;
                bool first = true;
                for (std::size_t a = 0; a < gr_u.nodes.size(); ++a) {
                    double xi = 0.5 * ((u1 - u0) * gr_u.nodes[a] + u0 + u1);
                    for (std::size_t b = 0; b < gr_v.nodes.size(); ++b) {
                        double eta = 0.5 * ((v1 - v0) * gr_v.nodes[b] + v0 + v1);
                        PatchBasis pb = patch.basis(xi, eta, 1);
                        if (first) {
                            el.cps = pb.indices;
                            first = false;
                        }
                        SurfacePoint sp = patch.eval_surface(xi, eta, 1);
                        Mat2 J = sp.jacobian();
                        double detJ = J.determinant();
                        if (detJ <= 0.0)
                            throw ConfigError("Discretization: degenerate geometry map");
                        Mat2 Jinv = J.inverse();
                        QuadPoint qp;
                        qp.X = sp.x;
                        qp.w = gr_u.weights[a] * gr_v.weights[b] * 0.25 * (u1 - u0) *
                               (v1 - v0) * detJ;
                        qp.val = pb.val;
                        qp.grad.resize(pb.indices.size());
                        for (std::size_t k = 0; k < pb.indices.size(); ++k)
                            qp.grad[k] = Jinv.transpose() * pb.grad[k];
                        el.qps.push_back(std::move(qp));
                    }
                }
                elements_.push_back(std::move(el));
            }
        }
    }

    void build_edges() {
        for (Side s : all_sides) {
            NurbsCurve2D curve = body_.patch.boundary_curve(s);
            auto ids = body_.patch.boundary_indices(s);
            const int p = curve.knots().degree();
            const auto& gr = gauss_rule(p + 1);
            for (auto [x0, x1] : curve.knots().spans()) {
                for (std::size_t a = 0; a < gr.nodes.size(); ++a) {
                    double xi = 0.5 * ((x1 - x0) * gr.nodes[a] + x0 + x1);
                    BasisEval be = curve.rational_basis(xi, 0);
                    CurvePoint cp = curve.eval(xi, 1);
                    EdgeQuadPoint eq;
                    eq.xi = xi;
                    eq.X = cp.x;
                    eq.w = gr.weights[a] * 0.5 * (x1 - x0) * cp.d1.norm();
                    for (int k = 0; k <= p; ++k) {
                        eq.cps.push_back(ids[be.first_index(p) + k]);
                        eq.val.push_back(be.ders(0, k));
                    }
                    edge_qps_[int(s)].push_back(std::move(eq));
                }
            }
        }
    }

    void collect_dirichlet() {
        auto gu = body_.patch.knots_u().greville();
        auto gv = body_.patch.knots_v().greville();
        std::map<int, double> probe;  // conflict detection at s = 1
        for (Side s : all_sides) {
            const BoundarySpec& bs = body_.side(s);
            for (int comp = 0; comp < 2; ++comp) {
                if (!bs.dirichlet[comp]) continue;
                for (int id : body_.patch.boundary_indices(s)) {
                    int i = id % body_.patch.nu();
                    int j = id / body_.patch.nu();
                    Vec2 X = body_.patch.eval_surface(gu[i], gv[j], 0).x;
                    double v1 = bs.dirichlet_value[comp](X, 1.0);
                    int d = dof(id, comp);
                    auto it = probe.find(d);
                    if (it != probe.end()) {
                        if (std::abs(it->second - v1) > 1e-12)
                            throw ConfigError("Dirichlet: conflicting corner prescriptions");
                        continue;
                    }
                    probe[d] = v1;
                    dirichlet_.push_back({d, bs.dirichlet_value[comp]});
                }
            }
        }
    }

    Body body_;
    int body_index_;
    int dof_offset_;
    std::vector<Element> elements_;
    std::array<std::vector<EdgeQuadPoint>, 4> edge_qps_;
    std::vector<DirichletEntry> dirichlet_;
};

/// All per-body discretizations plus the global DOF layout.
struct ProblemSpace {
    std::vector<Discretization> discs;
    int ndof = 0;

    explicit ProblemSpace(const Model& model) {
        int offset = 0;
        for (std::size_t k = 0; k < model.bodies.size(); ++k) {
            discs.emplace_back(model.bodies[k], int(k), offset);
            offset += discs.back().num_dofs();
        }
        ndof = offset;
    }
};

struct SystemState {
    VecX u;
    double load_factor = 0.0;

    explicit SystemState(int ndof) : u(VecX::Zero(ndof)) {}
};

// ---------------------------------------------------------------------------
// Assembled system
// ---------------------------------------------------------------------------

enum class RowKind { Galerkin, Collocated, DirichletFixed, PeriodicTie };

struct AssembledSystem {
    int n = 0;
    std::vector<Triplet> trips;
    VecX rhs;
    std::vector<RowKind> kind;

    explicit AssembledSystem(int ndof)
        : n(ndof), rhs(VecX::Zero(ndof)), kind(ndof, RowKind::Galerkin) {}

    void add(int i, int j, double v) {
        if (v != 0.0) trips.emplace_back(i, j, v);
    }

    /// Remove all matrix rows and residual entries selected by the mask.
    void drop_rows(const std::vector<char>& mask) {
        trips.erase(std::remove_if(trips.begin(), trips.end(),
                                   [&](const Triplet& t) { return mask[t.row()]; }),
                    trips.end());
        for (int i = 0; i < n; ++i)
            if (mask[i]) rhs[i] = 0.0;
    }

    SpMat matrix() const {
        SpMat K(n, n);
        K.setFromTriplets(trips.begin(), trips.end());
        return K;
    }
};

// ---------------------------------------------------------------------------
// Galerkin assembly
// ---------------------------------------------------------------------------

/// Internal virtual work and consistent tangent over the Bezier elements.
inline void assemble_bulk(const Discretization& disc, const SystemState& state,
                          AssembledSystem& sys) {
    const Material& mat = disc.body().material;
    for (const auto& el : disc.elements()) {
        const int nloc = int(el.cps.size());
        MatX Ke = MatX::Zero(2 * nloc, 2 * nloc);
        VecX re = VecX::Zero(2 * nloc);
        for (const auto& qp : el.qps) {
            Mat2 F = Mat2::Identity() + disc.grad_u(qp, el.cps, state.u);
            PointStress ps = eval_PA(mat, F);
            for (int a = 0; a < nloc; ++a) {
                const Vec2& ga = qp.grad[a];
                for (int i = 0; i < 2; ++i)
                    re[2 * a + i] += qp.w * (ps.P(i, 0) * ga[0] + ps.P(i, 1) * ga[1]);
                for (int b = 0; b < nloc; ++b) {
                    const Vec2& gb = qp.grad[b];
                    for (int i = 0; i < 2; ++i)
                        for (int k = 0; k < 2; ++k) {
                            double v = 0.0;
                            for (int j = 0; j < 2; ++j)
                                for (int l = 0; l < 2; ++l)
                                    v += ga[j] * ps.A(i, j, k, l) * gb[l];
                            Ke(2 * a + i, 2 * b + k) += qp.w * v;
                        }
                }
            }
        }
        for (int a = 0; a < nloc; ++a)
            for (int i = 0; i < 2; ++i) {
                int ra = disc.dof(el.cps[a], i);
                sys.rhs[ra] += re[2 * a + i];
                for (int b = 0; b < nloc; ++b)
                    for (int k = 0; k < 2; ++k)
                        sys.add(ra, disc.dof(el.cps[b], k), Ke(2 * a + i, 2 * b + k));
            }
    }
}

/// Prescribed-traction contributions (dead loads in the reference configuration),
/// scaled by the load factor. Sides without a traction function are skipped.
inline void assemble_neumann(const Discretization& disc, double load_factor,
                             AssembledSystem& sys) {
    for (Side s : all_sides) {
        const BoundarySpec& bs = disc.body().side(s);
        if (!bs.traction) continue;
        for (const auto& eq : disc.edge_quadrature(s)) {
            Vec2 T = bs.traction(eq.X, load_factor);
            if (T.squaredNorm() == 0.0) continue;
            for (std::size_t k = 0; k < eq.cps.size(); ++k)
                for (int i = 0; i < 2; ++i)
                    sys.rhs[disc.dof(eq.cps[k], i)] -= eq.w * eq.val[k] * T[i];
        }
    }
}

/// Strong Dirichlet enforcement: each constrained DOF row becomes an identity row
/// with residual (current value - prescribed value at this load factor).
inline void apply_dirichlet(const ProblemSpace& space, const SystemState& state,
                            double load_factor, AssembledSystem& sys) {
    std::vector<char> mask(sys.n, 0);
    for (const auto& disc : space.discs)
        for (const auto& e : disc.dirichlet()) mask[e.dof] = 1;
    sys.drop_rows(mask);
    for (const auto& disc : space.discs) {
        const auto& patch = disc.patch();
        for (const auto& e : disc.dirichlet()) {
            int cp = (e.dof - disc.dof_offset()) / 2;
            int i = cp % patch.nu();
            int j = cp / patch.nu();
            Vec2 X = disc.greville_position(i, j);
            sys.add(e.dof, e.dof, 1.0);
            sys.rhs[e.dof] = state.u[e.dof] - e.value(X, load_factor);
            sys.kind[e.dof] = RowKind::DirichletFixed;
        }
    }
}

/// Periodic master/slave coupling: slave rows and columns are folded into their
/// masters; the slave row is replaced by the tie equation u_slave - u_master = 0.
inline void apply_periodic(const Model& model, const ProblemSpace& space,
                           const SystemState& state, AssembledSystem& sys) {
    if (model.periodic.empty()) return;
    std::vector<int> rep(sys.n);
    for (int i = 0; i < sys.n; ++i) rep[i] = i;
    std::vector<std::pair<int, int>> ties;  // (slave dof, master dof)
    for (const auto& tie : model.periodic) {
        const auto& disc = space.discs[tie.body];
        auto mids = disc.patch().boundary_indices(tie.master);
        auto sids = disc.patch().boundary_indices(tie.slave);
        if (mids.size() != sids.size())
            throw ConfigError("apply_periodic: side control point counts differ");
        for (std::size_t k = 0; k < mids.size(); ++k)
            for (int c = 0; c < 2; ++c) {
                int dm = disc.dof(mids[k], c), ds = disc.dof(sids[k], c);
                rep[ds] = dm;
                ties.emplace_back(ds, dm);
            }
    }
    for (auto& t : sys.trips) t = Triplet(rep[t.row()], rep[t.col()], t.value());
    for (const auto& [ds, dm] : ties) {
        sys.rhs[dm] += sys.rhs[ds];
        sys.rhs[ds] = 0.0;
    }
    for (const auto& [ds, dm] : ties) {
        sys.add(ds, ds, 1.0);
        sys.add(ds, dm, -1.0);
        sys.rhs[ds] = state.u[ds] - state.u[dm];
        sys.kind[ds] = RowKind::PeriodicTie;
    }
}

}  // namespace iga
