#pragma once

/**
 * @file materials.hpp
 * @brief Plane-strain constitutive laws: linear elasticity and compressible
 *        neo-Hookean hyperelasticity with analytic tangents up to second order.
 *
 * The deformation gradient is stored 2x2 with the out-of-plane stretch equal
 * to one; the first invariant includes the +1 out-of-plane contribution.
 */

#include <igacontact/core.hpp>

namespace iga {

struct Material {
    enum class Kind { LinearElastic, NeoHookean };

    Kind kind = Kind::LinearElastic;
    double lambda = 1.0;
    double mu = 0.5;

    static Material linear_elastic(double lambda, double mu) {
        return Material{Kind::LinearElastic, lambda, mu};
    }
    static Material neo_hookean(double lambda, double mu) {
        return Material{Kind::NeoHookean, lambda, mu};
    }
    static Material from_young_poisson(Kind kind, double E, double nu) {
        Material m;
        m.kind = kind;
        m.lambda = E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
        m.mu = E / (2.0 * (1.0 + nu));
        return m;
    }

    void validate() const {
        if (mu <= 0.0) throw ConfigError("Material: mu must be positive");
        if (lambda + 2.0 * mu / 3.0 <= 0.0) throw ConfigError("Material: bulk modulus must be positive");
    }
};

struct KinematicState {
    Mat2 F = Mat2::Identity();
    double J = 1.0;
    Mat2 C = Mat2::Identity();
    Mat2 E = Mat2::Zero();

    static KinematicState from_F(const Mat2& F) {
        KinematicState k;
        k.F = F;
        k.J = F.determinant();
        k.C = F.transpose() * F;
        k.E = 0.5 * (k.C - Mat2::Identity());
        return k;
    }
};

struct StressState {
    Mat2 S = Mat2::Zero();        ///< second Piola-Kirchhoff
    Mat2 P = Mat2::Zero();        ///< first Piola-Kirchhoff, P = F S
    Mat3 C_voigt = Mat3::Zero();  ///< dS/dE in Voigt order (xx, yy, xy), engineering shear
};

/// Strain energy density. For the linear branch this is the quadratic form in the
/// symmetric displacement gradient, so that stress remains its exact derivative.
inline double eval_energy(const Material& mat, const KinematicState& kin) {
    if (mat.kind == Material::Kind::NeoHookean) {
        if (kin.J <= 0.0) throw InadmissibleState("eval_energy: J <= 0");
        double lnJ = std::log(kin.J);
        double I1 = kin.C.trace() + 1.0;  // plane strain
        return 0.5 * mat.mu * (I1 - 3.0) - mat.mu * lnJ + 0.5 * mat.lambda * lnJ * lnJ;
    }
    Mat2 eps = 0.5 * (kin.F + kin.F.transpose()) - Mat2::Identity();
    double tr = eps.trace();
    return 0.5 * mat.lambda * tr * tr + mat.mu * eps.squaredNorm();
}

inline StressState eval_stress(const Material& mat, const KinematicState& kin) {
    StressState out;
    if (mat.kind == Material::Kind::NeoHookean) {
        if (kin.J <= 0.0) throw InadmissibleState("eval_stress: J <= 0");
        double lnJ = std::log(kin.J);
        Mat2 Cinv = kin.C.inverse();
        out.S = mat.mu * (Mat2::Identity() - Cinv) + mat.lambda * lnJ * Cinv;
        out.P = kin.F * out.S;
        const double c1 = mat.lambda;
        const double c2 = mat.mu - mat.lambda * lnJ;
        auto cc = [&](int i, int j, int k, int l) {
            return c1 * Cinv(i, j) * Cinv(k, l) +
                   c2 * (Cinv(i, k) * Cinv(j, l) + Cinv(i, l) * Cinv(j, k));
        };
        const int vi[3] = {0, 1, 0};
        const int vj[3] = {0, 1, 1};
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) out.C_voigt(a, b) = cc(vi[a], vj[a], vi[b], vj[b]);
        return out;
    }
    Mat2 eps = 0.5 * (kin.F + kin.F.transpose()) - Mat2::Identity();
    Mat2 sig = mat.lambda * eps.trace() * Mat2::Identity() + 2.0 * mat.mu * eps;
    out.S = sig;
    out.P = sig;
    out.C_voigt << mat.lambda + 2.0 * mat.mu, mat.lambda, 0.0,
                   mat.lambda, mat.lambda + 2.0 * mat.mu, 0.0,
                   0.0, 0.0, mat.mu;
    return out;
}

/// First Piola-Kirchhoff stress and first elasticity tensor A = dP/dF.
/// For the linear branch P is identified with the small-strain Cauchy stress.
struct PointStress {
    Mat2 P = Mat2::Zero();
    Tensor4 A;
};

inline PointStress eval_PA(const Material& mat, const Mat2& F) {
    PointStress out;
    if (mat.kind == Material::Kind::NeoHookean) {
        double J = F.determinant();
        if (J <= 0.0) throw InadmissibleState("eval_PA: J <= 0");
        double lnJ = std::log(J);
        Mat2 G = F.inverse().transpose();
        double c = mat.lambda * lnJ - mat.mu;
        out.P = mat.mu * F + c * G;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int k = 0; k < 2; ++k)
                    for (int l = 0; l < 2; ++l)
                        out.A(i, j, k, l) = mat.mu * (i == k) * (j == l) +
                                            mat.lambda * G(i, j) * G(k, l) -
                                            c * G(i, l) * G(k, j);
        return out;
    }
    Mat2 eps = 0.5 * (F + F.transpose()) - Mat2::Identity();
    out.P = mat.lambda * eps.trace() * Mat2::Identity() + 2.0 * mat.mu * eps;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
                for (int l = 0; l < 2; ++l)
                    out.A(i, j, k, l) = mat.lambda * (i == j) * (k == l) +
                                        mat.mu * ((i == k) * (j == l) + (i == l) * (j == k));
    return out;
}

/// dA/dF, needed for the consistent tangent of pointwise strong-form residuals.
inline Tensor6 eval_dA(const Material& mat, const Mat2& F) {
    Tensor6 D;
    if (mat.kind == Material::Kind::LinearElastic) return D;
    double J = F.determinant();
    if (J <= 0.0) throw InadmissibleState("eval_dA: J <= 0");
    double lnJ = std::log(J);
    Mat2 G = F.inverse().transpose();
    double c = mat.lambda * lnJ - mat.mu;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
                for (int l = 0; l < 2; ++l)
                    for (int m = 0; m < 2; ++m)
                        for (int n = 0; n < 2; ++n)
                            D(i, j, k, l, m, n) =
                                -mat.lambda * (G(i, n) * G(m, j) * G(k, l) +
                                               G(i, j) * G(k, n) * G(m, l) +
                                               G(m, n) * G(i, l) * G(k, j)) +
                                c * (G(i, n) * G(m, l) * G(k, j) +
                                     G(i, l) * G(k, n) * G(m, j));
    return D;
}

/// Cauchy stress from the deformation state, sigma = J^-1 P F^T for the finite
/// strain branch; the linear branch returns the small-strain stress directly.
inline Mat2 cauchy_stress(const Material& mat, const Mat2& F) {
    PointStress ps = eval_PA(mat, F);
    if (mat.kind == Material::Kind::NeoHookean)
        return ps.P * F.transpose() / F.determinant();
    return ps.P;
}

}  // namespace iga
