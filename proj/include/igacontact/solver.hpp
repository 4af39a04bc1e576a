#pragma once

/**
 * @file solver.hpp
 * @brief Formulation routing, incremental-iterative Newton solution with load
 *        stepping, bisection of increments on non-convergence or zig-zagging,
 *        and reaction force extraction.
 */

#include <igacontact/contact.hpp>

#include <Eigen/SparseLU>

#include <iostream>
#include <optional>

namespace iga {

enum class Formulation { GPTS, GPTS2hp, PTS, PTS2hp, C, EC, CCS, ECCS };

inline bool has_collocated_bulk(Formulation f) {
    return f == Formulation::C || f == Formulation::EC;
}
inline bool has_collocated_contact(Formulation f) {
    return f == Formulation::C || f == Formulation::EC || f == Formulation::CCS ||
           f == Formulation::ECCS;
}
inline bool has_enhanced_rows(Formulation f) {
    return f == Formulation::EC || f == Formulation::ECCS;
}
inline bool is_two_half_pass(Formulation f) {
    return f == Formulation::GPTS2hp || f == Formulation::PTS2hp;
}
inline bool is_pts(Formulation f) {
    return f == Formulation::PTS || f == Formulation::PTS2hp;
}

inline const char* formulation_name(Formulation f) {
    switch (f) {
        case Formulation::GPTS: return "gpts";
        case Formulation::GPTS2hp: return "gpts2hp";
        case Formulation::PTS: return "pts";
        case Formulation::PTS2hp: return "pts2hp";
        case Formulation::C: return "c";
        case Formulation::EC: return "ec";
        case Formulation::CCS: return "ccs";
        case Formulation::ECCS: return "eccs";
    }
    return "?";
}

inline Formulation parse_formulation(const std::string& name) {
    for (Formulation f : {Formulation::GPTS, Formulation::GPTS2hp, Formulation::PTS,
                          Formulation::PTS2hp, Formulation::C, Formulation::EC,
                          Formulation::CCS, Formulation::ECCS})
        if (name == formulation_name(f)) return f;
    throw ConfigError("unknown formulation: " + name);
}

// ---------------------------------------------------------------------------
// Merged system assembly per formulation
// ---------------------------------------------------------------------------

/// Long-lived per-solve caches: collocation grids, projection warm starts and
/// moment-fitted point weights.
struct SolverWorkspace {
    ContactSeeds seeds;
    std::vector<std::optional<CollocationGrid>> grids;
    std::map<std::pair<int, int>, PtsWeights> pts_weights;

    void ensure_grids(const ProblemSpace& space) {
        if (grids.size() != space.discs.size()) grids.resize(space.discs.size());
        for (std::size_t k = 0; k < space.discs.size(); ++k)
            if (!grids[k]) grids[k].emplace(space.discs[k]);
    }
};

struct AssembleResult {
    AssembledSystem sys;
    VecX pre_dirichlet_rhs;  ///< residual after periodic fold, before Dirichlet rows
};

inline AssembleResult assemble_full(const Model& model, const ProblemSpace& space,
                                    const SystemState& state, double load_factor,
                                    Formulation f, SolverWorkspace& ws) {
    AssembledSystem sys(space.ndof);

    if (has_collocated_bulk(f)) {
        ws.ensure_grids(space);
        CollocMode mode = (f == Formulation::EC) ? CollocMode::Enhanced : CollocMode::Plain;
        for (std::size_t k = 0; k < space.discs.size(); ++k)
            assemble_collocated_bulk(*ws.grids[k], state, load_factor, mode, sys);
    } else {
        for (const auto& disc : space.discs) {
            assemble_bulk(disc, state, sys);
            assemble_neumann(disc, load_factor, sys);
        }
    }

    for (std::size_t pi = 0; pi < model.contacts.size(); ++pi) {
        const ContactPairSpec& pair = model.contacts[pi];
        if (has_collocated_contact(f)) {
            auto rows = collocated_contact_rows(space, state, load_factor, pair, int(pi),
                                                has_enhanced_rows(f), ws.seeds);
            merge_collocated_rows(sys, rows);
        } else if (is_pts(f)) {
            auto view = [&](const ContactSurfaceRef& r) {
                return r.is_rigid() ? SurfaceView(r.rigid)
                                    : SurfaceView(space.discs[r.body], r.side);
            };
            SurfaceView a = view(pair.a), b = view(pair.b);
            bool thp = is_two_half_pass(f);
            if (!a.is_rigid()) {
                auto key = std::make_pair(int(pi), 0);
                if (!ws.pts_weights.count(key))
                    ws.pts_weights.emplace(key, compute_pts_weights(a.ref_curve()));
                assemble_contact_pass(a, b, state, pair.penalty, !thp,
                                      detail::pts_eval_points(ws.pts_weights.at(key)),
                                      ws.seeds.get(int(pi), 0), sys);
            }
            if (thp && !b.is_rigid()) {
                auto key = std::make_pair(int(pi), 1);
                if (!ws.pts_weights.count(key))
                    ws.pts_weights.emplace(key, compute_pts_weights(b.ref_curve()));
                assemble_contact_pass(b, a, state, pair.penalty, false,
                                      detail::pts_eval_points(ws.pts_weights.at(key)),
                                      ws.seeds.get(int(pi), 1), sys);
            }
        } else {
            assemble_gpts(space, state, pair, int(pi), is_two_half_pass(f), ws.seeds, sys);
        }
    }

    apply_periodic(model, space, state, sys);
    AssembleResult out{std::move(sys), VecX()};
    out.pre_dirichlet_rhs = out.sys.rhs;
    apply_dirichlet(space, state, load_factor, out.sys);
    return out;
}

// ---------------------------------------------------------------------------
// Newton iteration with bisection control
// ---------------------------------------------------------------------------

struct SolveConfig {
    double newton_rtol = 1e-9;
    double newton_atol = 1e-12;
    int max_iter = 30;
    int max_bisections = 8;
    double zigzag_rtol = 1e-3;  ///< residual alternation detection threshold
    bool verbose = false;
};

struct StepRecord {
    double load_factor = 0.0;
    bool at_target = false;  ///< coincides with a schedule breakpoint
    int iterations = 0;
    int bisections = 0;
    double residual0 = 0.0;
    double residual = 0.0;
    Vec2 reaction = Vec2::Zero();
};

struct SolveTrace {
    std::vector<StepRecord> steps;
    bool success = true;
    std::string failure;
};

struct ReactionSpec {
    std::vector<std::pair<int, Side>> boundaries;
};

/// Reaction at the constrained components of a boundary: sum of the assembled
/// residual (before Dirichlet row replacement) over the side's Dirichlet DOFs.
inline Vec2 reaction_force(const ProblemSpace& space, const VecX& pre_dirichlet_rhs, int body,
                           Side side) {
    const auto& disc = space.discs[body];
    const auto& bs = disc.body().side(side);
    Vec2 R = Vec2::Zero();
    for (int id : disc.patch().boundary_indices(side))
        for (int c = 0; c < 2; ++c)
            if (bs.dirichlet[c]) R[c] += pre_dirichlet_rhs[disc.dof(id, c)];
    return R;
}

struct NewtonOutcome {
    bool converged = false;
    int iterations = 0;
    double residual0 = 0.0;
    double residual = 0.0;
    VecX pre_dirichlet_rhs;
    std::string note;
};

inline NewtonOutcome newton_solve(const Model& model, const ProblemSpace& space,
                                  SystemState& state, double load_factor, Formulation f,
                                  const SolveConfig& cfg, SolverWorkspace& ws) {
    NewtonOutcome out;
    std::vector<double> hist;
    int zigzag_hits = 0;
    double ref = 0.0;

    for (int it = 0; it <= cfg.max_iter; ++it) {
        AssembleResult ar = [&]() -> AssembleResult {
            return assemble_full(model, space, state, load_factor, f, ws);
        }();

        double rn = 0.0, cn = 0.0;
        for (int i = 0; i < ar.sys.n; ++i) {
            if (ar.sys.kind[i] == RowKind::Galerkin || ar.sys.kind[i] == RowKind::Collocated)
                rn += ar.sys.rhs[i] * ar.sys.rhs[i];
            else
                cn = std::max(cn, std::abs(ar.sys.rhs[i]));
        }
        rn = std::sqrt(rn);
        if (it == 0) {
            ref = std::max(rn, cfg.newton_atol);
            out.residual0 = rn;
        }
        hist.push_back(rn);
        if (cfg.verbose)
            std::cout << "    newton it " << it << "  |r| = " << rn << "  |c| = " << cn
                      << "\n";

        if (rn <= std::max(cfg.newton_rtol * ref, cfg.newton_atol) &&
            cn <= 1e-10 * (1.0 + state.u.norm())) {
            out.converged = true;
            out.iterations = it;
            out.residual = rn;
            out.pre_dirichlet_rhs = std::move(ar.pre_dirichlet_rhs);
            return out;
        }
        if (it == cfg.max_iter) break;

        // Zig-zag guard: residual alternating between two values. Stagnation at
        // the roundoff floor (within two orders of the target) is accepted.
        if (hist.size() >= 3) {
            double prev2 = hist[hist.size() - 3];
            if (rn > 0.0 && std::abs(rn - prev2) / rn < cfg.zigzag_rtol) {
                if (++zigzag_hits >= 2) {
                    if (rn <= 100.0 * std::max(cfg.newton_rtol * ref, cfg.newton_atol) &&
                        cn <= 1e-10 * (1.0 + state.u.norm())) {
                        out.converged = true;
                        out.iterations = it;
                        out.residual = rn;
                        out.pre_dirichlet_rhs = std::move(ar.pre_dirichlet_rhs);
                        return out;
                    }
                    out.note = "zigzag";
                    return out;
                }
            } else {
                zigzag_hits = 0;
            }
        }

        SpMat K = ar.sys.matrix();
        K.makeCompressed();
        Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
        lu.analyzePattern(K);
        lu.factorize(K);
        if (lu.info() != Eigen::Success) {
            out.note = "linear solver failure";
            return out;
        }
        VecX du = lu.solve(-ar.sys.rhs);
        if (!du.allFinite()) {
            out.note = "non-finite update";
            return out;
        }
        state.u += du;
    }
    out.note = "no convergence in max_iter";
    return out;
}

struct SolveResult {
    SystemState state;
    SolveTrace trace;
};

/// March the load factor through the schedule breakpoints; on failure of a step
/// the increment is halved (bisection) and retried from the last converged state.
inline SolveResult solve(const Model& model, const ProblemSpace& space, Formulation f,
                         const std::vector<double>& schedule, const SolveConfig& cfg,
                         const ReactionSpec& reaction = {}) {
    SolveResult res{SystemState(space.ndof), {}};
    SolverWorkspace ws;
    SystemState good = res.state;
    double s_done = 0.0;

    for (double target : schedule) {
        if (target <= s_done + 1e-15) continue;
        double delta = target - s_done;
        int nbis = 0;
        while (s_done < target - 1e-15) {
            bool last = delta >= target - s_done - 1e-15;
            double s_try = last ? target : s_done + delta;
            SystemState attempt = good;
            NewtonOutcome oc;
            bool inadmissible = false;
            try {
                oc = newton_solve(model, space, attempt, s_try, f, cfg, ws);
            } catch (const InadmissibleState&) {
                inadmissible = true;
            }
            if (!inadmissible && oc.converged) {
                good = attempt;
                s_done = s_try;
                StepRecord rec;
                rec.load_factor = s_try;
                rec.at_target = last;
                rec.iterations = oc.iterations;
                rec.bisections = nbis;
                rec.residual0 = oc.residual0;
                rec.residual = oc.residual;
                for (const auto& [rb, rs] : reaction.boundaries)
                    rec.reaction += reaction_force(space, oc.pre_dirichlet_rhs, rb, rs);
                res.trace.steps.push_back(rec);
                if (cfg.verbose)
                    std::cout << "  step s = " << s_try << " converged in " << oc.iterations
                              << " iterations\n";
            } else {
                ++nbis;
                if (nbis > cfg.max_bisections) {
                    res.trace.success = false;
                    res.trace.failure = "bisection limit at s = " + std::to_string(s_try) +
                                        (oc.note.empty() ? "" : " (" + oc.note + ")");
                    res.state = good;
                    return res;
                }
                delta *= 0.5;
                if (cfg.verbose)
                    std::cout << "  step s = " << s_try << " failed ("
                              << (inadmissible ? "inadmissible state" : oc.note)
                              << "), bisecting to " << delta << "\n";
            }
        }
    }
    res.state = good;
    return res;
}

inline std::vector<double> uniform_schedule(int nsteps) {
    std::vector<double> s(nsteps);
    for (int i = 0; i < nsteps; ++i) s[i] = double(i + 1) / nsteps;
    return s;
}

}  // namespace iga
