#include "generators.hpp"

#include <gtest/gtest.h>

using namespace nhfloquet;

namespace {

const cplx I(0, 1);

double residual(const Complex3& f, const StateVector& v, cplx E) {
    StateVector hv = pauli_matrix(f) * v;
    return std::hypot(std::abs(hv.a - E * v.a), std::abs(hv.b - E * v.b)) / v.norm();
}

double mat_diff(const Matrix2& a, const Matrix2& b) { return (a - b).norm(); }

}  // namespace

TEST(Cdot, IsotropicVectorSquaresToZero) {
    Complex3 u{1.0, I, 0.0};
    EXPECT_EQ(cdot(u, u), cplx(0, 0));
}

TEST(Cdot, RealEuclidean) { EXPECT_EQ(cdot(Complex3{1.0, 2.0, 3.0}, Complex3{4.0, 5.0, 6.0}), cplx(32, 0)); }

TEST(Cdot, UcfPSquared) {
    cplx r = 0.2 * I;
    Complex3 p{-1.0, 0.0, I * r};
    EXPECT_NEAR(std::abs(cdot(p, p) - 1.04), 0.0, 1e-15);
}

TEST(GaugeSplit, Identity) {
    GaugeSplit g = gauge_split(Matrix2::identity());
    EXPECT_EQ(g.f0, cplx(1, 0));
    EXPECT_EQ(norm(g.f), 0.0);
}

TEST(GaugeSplit, DiagonalTwoZero) {
    Matrix2 h;
    h(0, 0) = 2;
    GaugeSplit g = gauge_split(h);
    EXPECT_EQ(g.f0, cplx(1, 0));
    EXPECT_NEAR(norm(g.f - Complex3{0.0, 0.0, 1.0}), 0.0, 1e-15);
}

TEST(GaugeSplit, UcfAtTimeZero) {
    DriveSpec s = model_ucf(0.2 * I, -0.8, 1.0);
    Matrix2 h = pauli_matrix(f_at(s, 0.0));
    GaugeSplit g = gauge_split(h);
    EXPECT_NEAR(std::abs(g.f0), 0.0, 1e-15);
    EXPECT_NEAR(norm(g.f - Complex3{-1.0, 0.0, I * (0.2 * I) + 0.8 * I}), 0.0, 1e-15);
}

TEST(GaugeSplit, ReconstructRoundTrip) {
    nhtest::Draw d(1);
    for (int k = 0; k < 200; ++k) {
        Matrix2 h;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) h(i, j) = d.polar(0, 3);
        EXPECT_LT(mat_diff(reconstruct(gauge_split(h)), h), 1e-14 * h.norm());
    }
}

TEST(Eigensystem, DiagonalFallsBack) {
    InstantEigensystem e = instantaneous_eigensystem({0.0, 0.0, 1.0});
    EXPECT_NEAR(std::abs(e.E_plus - 1.0), 0, 1e-15);
    EXPECT_NEAR(std::abs(e.E_minus + 1.0), 0, 1e-15);
    EXPECT_NEAR(std::abs(e.v_plus.a), 1.0, 1e-15);
    EXPECT_NEAR(std::abs(e.v_plus.b), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(e.v_minus.a), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(e.v_minus.b), 1.0, 1e-15);
}

TEST(Eigensystem, SigmaOne) {
    InstantEigensystem e = instantaneous_eigensystem({1.0, 0.0, 0.0});
    EXPECT_NEAR(std::abs(e.E_plus - 1.0), 0, 1e-15);
    EXPECT_NEAR(std::abs(e.v_plus.b / e.v_plus.a - 1.0), 0, 1e-14);
    EXPECT_NEAR(std::abs(e.v_minus.b / e.v_minus.a + 1.0), 0, 1e-14);
}

TEST(Eigensystem, UcfResidual) {
    DriveSpec s = model_ucf(0.2 * I, -0.8, 1.0);
    Complex3 f = f_at(s, M_PI);
    InstantEigensystem e = instantaneous_eigensystem(f);
    EXPECT_LT(residual(f, e.v_plus, e.E_plus), 1e-12 * norm(f));
    EXPECT_LT(residual(f, e.v_minus, e.E_minus), 1e-12 * norm(f));
}

TEST(Eigensystem, RandomResidualInvariant) {
    nhtest::Draw d(2);
    for (int k = 0; k < 1000; ++k) {
        Complex3 f{d.polar(0, 2), d.polar(0, 2), d.polar(0, 2)};
        if (ep_distance(f) < 1e-6 * norm(f) * norm(f)) continue;
        InstantEigensystem e = instantaneous_eigensystem(f);
        EXPECT_LT(residual(f, e.v_plus, e.E_plus), 1e-12 * norm(f));
        EXPECT_LT(residual(f, e.v_minus, e.E_minus), 1e-12 * norm(f));
    }
}

TEST(Eigensystem, ThrowsAtExceptionalPoint) {
    try {
        instantaneous_eigensystem({1.0, I, 0.0});
        FAIL() << "expected AtExceptionalPoint";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::AtExceptionalPoint);
    }
}

TEST(Eigensystem, BranchTrackingAcrossSquareRootCut) {
    // f.f = e^{i theta} winds once around zero; the tracked E_plus must be
    // continuous, so after a full turn it comes back with the opposite sign.
    std::optional<InstantEigensystem> prev;
    const int n = 400;
    cplx E0;
    for (int k = 0; k <= n; ++k) {
        double th = 2 * M_PI * k / n;
        cplx w = std::polar(1.0, th / 2);
        Complex3 f{w, 0.0, 0.0};  // f.f = e^{i theta}
        InstantEigensystem e = instantaneous_eigensystem(f, prev);
        if (prev) {
            EXPECT_LT(std::abs(e.E_plus - prev->E_plus), 0.05);
        }
        if (k == 0) E0 = e.E_plus;
        prev = e;
    }
    EXPECT_NEAR(std::abs(prev->E_plus + E0), 0.0, 1e-12);
}

TEST(EpDistance, Examples) {
    EXPECT_EQ(ep_distance(Complex3{1.0, I, 0.0}), 0.0);
    EXPECT_EQ(ep_distance(Complex3{0.0, 0.0, 1.0}), 1.0);
}

TEST(EpDistance, UcfNeverTouchesEp) {
    DriveSpec s = model_ucf(0.2 * I, -0.8, 1.0);
    double mn = 1e300;
    for (int k = 0; k < 10000; ++k) mn = std::min(mn, ep_distance(f_at(s, 2 * M_PI * k / 10000)));
    EXPECT_GT(mn, 0.0);
}

TEST(ChordalDistance, Properties) {
    EXPECT_EQ(chordal_distance(cplx(0.3, 0.1), cplx(0.3, 0.1)), 0.0);
    EXPECT_NEAR(chordal_distance(cplx(0, 0), cplx(1, 0)), 1 / std::sqrt(2.0), 1e-15);
    StateVector up{1.0, 0.0}, down{0.0, 1.0};
    EXPECT_NEAR(ray_distance(up, down), 1.0, 1e-15);
    StateVector x{cplx(0.3, 1), cplx(2, -1)}, y{2.0 * I * x.a, 2.0 * I * x.b};
    EXPECT_NEAR(ray_distance(x, y), 0.0, 1e-15);
}

TEST(Rotation, AlreadyUpperTriangular) {
    RotationAngles a = rotation_to_upper_triangular({0.0, 0.0, 1.0});
    EXPECT_EQ(a.alpha, 0.0);
    EXPECT_EQ(a.beta, 0.0);
    EXPECT_EQ(a.gamma, 0.0);
}

TEST(Rotation, Examples) {
    for (Complex3 p : {Complex3{1.0, 0.0, 0.0}, Complex3{1.0, I, 2.0}}) {
        RotationAngles a = rotation_to_upper_triangular(p);
        EXPECT_LT(std::abs(apply_rotation(a, p).upper()), 1e-10 * norm(p));
    }
}

TEST(Rotation, RejectsZeroVector) { EXPECT_THROW(rotation_to_upper_triangular(Complex3{}), Error); }

TEST(Rotation, IdentityAnglesLeaveVectorUnchanged) {
    Complex3 f{cplx(1, 2), cplx(-0.3, 0.1), cplx(0, 4)};
    EXPECT_LT(norm(apply_rotation({}, f) - f), 1e-15);
}

TEST(Rotation, CdotInvariance) {
    nhtest::Draw d(3);
    for (int k = 0; k < 1000; ++k) {
        RotationAngles R{d.uni(0, 2 * M_PI), d.uni(0, M_PI), d.uni(0, 2 * M_PI)};
        Complex3 u{d.polar(0, 2), d.polar(0, 2), d.polar(0, 2)};
        Complex3 v{d.polar(0, 2), d.polar(0, 2), d.polar(0, 2)};
        cplx before = cdot(u, v), after = cdot(apply_rotation(R, u), apply_rotation(R, v));
        EXPECT_NEAR(before.real(), after.real(), 1e-12 * std::max(1.0, std::abs(before)));
        EXPECT_NEAR(before.imag(), after.imag(), 1e-12 * std::max(1.0, std::abs(before)));
    }
}

TEST(Rotation, MatchesConjugationOfPauliMatrix) {
    // R^{-1} (f.sigma) R computed directly as 2x2 matrices
    RotationAngles ang{0.7, 1.1, -0.4};
    Complex3 f{cplx(0.3, 0.2), cplx(-1, 0.5), cplx(0.1, -0.7)};
    auto expm = [](double th, int axis) {
        Matrix2 m;
        double c = std::cos(th / 2), s = std::sin(th / 2);
        if (axis == 3) {
            m(0, 0) = std::polar(1.0, th / 2);
            m(1, 1) = std::polar(1.0, -th / 2);
        } else {
            m(0, 0) = m(1, 1) = c;
            m(0, 1) = m(1, 0) = I * s;
        }
        return m;
    };
    Matrix2 R = expm(ang.alpha, 3) * expm(ang.beta, 1) * expm(ang.gamma, 3);
    Matrix2 Rinv = expm(-ang.gamma, 3) * expm(-ang.beta, 1) * expm(-ang.alpha, 3);
    Matrix2 lhs = Rinv * pauli_matrix(f) * R;
    EXPECT_LT(mat_diff(lhs, pauli_matrix(apply_rotation(ang, f))), 1e-14);
}

TEST(Rotation, RandomUpperResidual) {
    nhtest::Draw d(4);
    for (int k = 0; k < 100; ++k) {
        Complex3 v{d.polar(0.1, 2), d.polar(0.1, 2), d.polar(0.1, 2)};
        RotationAngles a = rotation_to_upper_triangular(v);
        EXPECT_LT(std::abs(apply_rotation(a, v).upper()), 1e-10 * norm(v));
    }
}
