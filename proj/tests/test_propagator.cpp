#include "generators.hpp"

#include <gtest/gtest.h>

using namespace nhfloquet;

namespace {

const cplx I(0, 1);

double sdiff(const StateVector& x, const StateVector& y) { return std::hypot(std::abs(x.a - y.a), std::abs(x.b - y.b)); }

}  // namespace

TEST(Propagate, SigmaOneRotation) {
    DriveSpec s = model_constant({1.0, 0.0, 0.0});
    StateVector r = propagate<double>(s, {1.0, 0.0}, 0.0, M_PI / 2, 1e-12);
    EXPECT_LT(sdiff(r, {0.0, -I}), 1e-10);
}

TEST(Propagate, SameTimeIsIdentity) {
    DriveSpec s = model_ucf(0.2 * I, -0.8, 1.0);
    StateVector s0{cplx(0.3, 0.1), cplx(-0.2, 0.7)};
    EXPECT_LT(sdiff(propagate<double>(s, s0, 1.0, 1.0), s0), 1e-15);
    EXPECT_LT((evolve_operator<double>(s, 2.0, 2.0).U - Matrix2::identity()).norm(), 1e-15);
}

TEST(Propagate, SingleFrequencyEigenstateAcquiresPhase) {
    // f = p e^{i w t} with p = (1, 0, i/2); eigenvectors (1, s sqrt(3/4) - i/2).
    // The decaying mode is ill-conditioned in double (the other mode grows by
    // e^{2 Re c (1 - e^{iwt})}), so this runs in binary128.
    Complex3 p{1.0, 0.0, 0.5 * I};
    const double w = 2 * M_PI / 50;
    DriveSpec s = model_single_frequency(p, w);
    const quad root = sqrt(quad(3) / 4);
    const cquad iq(0, 1);
    const cquad c = cquad(root, 0) / quad(w);
    for (int sign : {1, -1}) {
        State<quad> v{cquad(1, 0), cquad(sign * root, quad(-0.5))};
        for (double t : {3.0, 11.0, 27.0}) {
            State<quad> got = propagate<quad>(s, v, quad(0), quad(t), 1e-22);
            cquad fac = exp(quad(sign) * c * (cquad(1, 0) - exp(iq * quad(w) * quad(t))));
            quad err = sqrt(abs2(got.a - fac * v.a) + abs2(got.b - fac * v.b));
            EXPECT_LT(to_double(err / (abs(fac) * v.norm())), 1e-18) << "t=" << t << " sign=" << sign;
        }
    }
}

TEST(Propagate, UcfMatchesKummerBasis) {
    // T = 300 puts the Kummer argument past the evaluator's |z| limit
    DriveSpec s = model_ucf(0.2 * I, -0.8, 2 * M_PI / 50);
    AnalyticBasis B(s);
    const quad T = quad(50);
    for (BasisIndex bi : {BasisIndex::First, BasisIndex::Second}) {
        State<quad> s0 = B.state(quad(0), bi);
        std::vector<quad> grid;
        for (int k = 0; k <= 30; ++k) grid.push_back(T * k / 30);
        Trajectory<quad> tr = trajectory<quad>(s, s0, grid, 1e-22);
        for (std::size_t k = 0; k < grid.size(); ++k) {
            State<quad> want = B.state(grid[k], bi);
            if (to_double(abs(want.a)) < 1e-6) continue;
            EXPECT_LT(to_double(abs(tr.s[k].a - want.a) / abs(want.a)), 1e-6);
        }
    }
}

TEST(Propagate, RejectsToleranceOutOfRange) {
    DriveSpec s = model_constant({1.0, 0.0, 0.0});
    EXPECT_THROW(propagate<double>(s, {1.0, 0.0}, 0.0, 1.0, 1e-3), Error);
    EXPECT_THROW(propagate<double>(s, {1.0, 0.0}, 0.0, 1.0, 1e-15), Error);
}

TEST(EvolveOperator, SemigroupAndPeriodicity) {
    DriveSpec s = model_ucf(0.3, 0.4, 1.0);
    const double T = s.period();
    Matrix2 U01 = evolve_operator<double>(s, 0.0, T, 1e-12).U;
    Matrix2 U12 = evolve_operator<double>(s, T, 2 * T, 1e-12).U;
    Matrix2 U02 = evolve_operator<double>(s, 0.0, 2 * T, 1e-12).U;
    EXPECT_LT((U02 - U12 * U01).norm(), 1e-8);
    EXPECT_LT((U12 - U01).norm(), 1e-8);
}

TEST(EvolveOperator, TracelessHasUnitDeterminant) {
    nhtest::Draw d(30);
    for (int k = 0; k < 10; ++k) {
        DriveSpec s = model_h01(d.generic(0.2, 0.8), d.generic(0.2, 0.8), d.uni(0.5, 2));
        EXPECT_LT(std::abs(evolve_operator<double>(s, 0.0, s.period(), 1e-12).U.det() - 1.0), 1e-8);
    }
}

TEST(EvolveOperator, H12ParabolicCylinderIsIdentityAfterOnePeriod) {
    DriveSpec s = model_h12({0.5, 0.3 * I, 0.4}, {0.3, -0.3 * I, 0.5}, 1.0);
    Matrix2 U = evolve_operator<double>(s, 0.0, s.period(), 1e-12).U;
    EXPECT_LT((U - Matrix2::identity()).norm(), 1e-7);
}

TEST(EvolveOperator, ScalarPartGivesLiouvilleDeterminant) {
    DriveSpec s = model_ucf(0.2 * I, 0.5, 1.5);
    s.f0 = cplx(0.2, 0.05);
    double t1 = 2.3;
    cplx det = evolve_operator<double>(s, 0.0, t1, 1e-12).U.det();
    EXPECT_LT(std::abs(det - std::exp(-2.0 * I * s.f0 * t1)), 1e-9);
}

TEST(BFromA, ConstantSigmaOne) {
    // a = cos t, b = -i sin t solves the sigma_1 problem from (1, 0)
    DriveSpec s = model_constant({1.0, 0.0, 0.0});
    for (double t : {0.3, 1.1, 2.0}) {
        cplx a = std::cos(t), adot = -std::sin(t);
        StateVector direct = propagate<double>(s, {1.0, 0.0}, 0.0, t, 1e-12);
        EXPECT_LT(std::abs(b_from_a(s, a, adot, t) - direct.b), 1e-10);
    }
}

TEST(BFromA, NoF3Reduction) {
    DriveSpec s = model_constant({cplx(0.4, 0.1), 0.3, 0.0});
    cplx a(0.2, 0.3), adot(-0.1, 0.5);
    Complex3 f = f_at(s, 0.0);
    EXPECT_LT(std::abs(b_from_a(s, a, adot, 0.0) - I * adot / f.upper()), 1e-15);
}

TEST(BFromA, LowerTriangularPointThrows) {
    DriveSpec s = model_constant({1.0, -I, 0.3});
    try {
        b_from_a(s, cplx(1), cplx(0), 0.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::LowerTriangularPoint);
    }
}

TEST(BFromA, UcfAnalyticConsistency) {
    DriveSpec s = model_ucf(0.2 * I, -0.8, 2 * M_PI / 50);
    AnalyticBasis B(s);
    nhtest::Draw d(31);
    State<quad> s0 = B.state(quad(0), BasisIndex::First);
    for (int k = 0; k < 50; ++k) {
        double t = d.uni(0, 50);
        State<quad> want = B.state(quad(t), BasisIndex::First);
        State<quad> got = propagate<quad>(s, s0, quad(0), quad(t), 1e-22);
        EXPECT_LT(to_double(abs(got.b - want.b) / (abs(want.a) + abs(want.b))), 1e-8);
    }
}

TEST(Wronskian, Dependent) { EXPECT_EQ(wronskian(cplx(2, 1), cplx(0.5, -1), 3.0 * cplx(2, 1), 3.0 * cplx(0.5, -1)), cplx(0, 0)); }

TEST(Wronskian, AbelIdentity) {
    // a'' = (f'/f) a' - (f.f - i f3') a with f = f1 - i f2 (upper entry):
    // W(t) / upper(t) is constant along pairs of solutions.
    DriveSpec s = model_h01({0.4, 0.2, 0.3}, {0.3, cplx(0, 0.2), -0.25}, 1.0);
    auto adot = [&](const StateVector& v, double t) {
        Complex3 f = f_at(s, t);
        return -I * (f.f3 * v.a + f.upper() * v.b);
    };
    StateVector s1{1.0, 0.0}, s2{0.0, 1.0};
    cplx ref = wronskian(s1.a, adot(s1, 0.0), s2.a, adot(s2, 0.0)) / f_at(s, 0.0).upper();
    for (double t : {0.7, 2.2, 4.0, 6.1}) {
        StateVector y1 = propagate<double>(s, s1, 0.0, t, 1e-12), y2 = propagate<double>(s, s2, 0.0, t, 1e-12);
        cplx w = wronskian(y1.a, adot(y1, t), y2.a, adot(y2, t)) / f_at(s, t).upper();
        EXPECT_LT(std::abs(w - ref) / std::abs(ref), 1e-8);
    }
}

TEST(Trajectory, SinglePointGrid) {
    DriveSpec s = model_ucf(0.2 * I, -0.8, 1.0);
    StateVector s0{0.6, cplx(0, 0.8)};
    Trajectory<double> tr = trajectory<double>(s, s0, {0.5});
    ASSERT_EQ(tr.s.size(), 1u);
    EXPECT_EQ(sdiff(tr.s[0], s0), 0.0);
}

TEST(Trajectory, RefinementConsistency) {
    DriveSpec s = model_ucf(0.2 * I, -0.8, 2 * M_PI / 30);
    const double rtol = 1e-10;
    StateVector s0{1.0, 0.0};
    auto g1 = uniform_grid(0, 30, 100), g2 = uniform_grid(0, 30, 200);
    Trajectory<double> a = trajectory<double>(s, s0, g1, rtol), b = trajectory<double>(s, s0, g2, rtol);
    for (std::size_t k = 0; k < g1.size(); ++k) {
        const StateVector& x = a.s[k];
        const StateVector& y = b.s[2 * k];
        EXPECT_LT(sdiff(x, y) / y.norm(), rtol * 100);
    }
    // continued integration agrees with single-shot propagation
    StateVector end = propagate<double>(s, s0, 0.0, 30.0, rtol);
    EXPECT_LT(sdiff(end, a.s.back()) / end.norm(), rtol * 100);
}

TEST(Trajectory, UcfLongGridCompletes) {
    DriveSpec s = model_ucf(0.2 * I, -0.8, 2 * M_PI / 300);
    Trajectory<double> tr = trajectory<double>(s, {1.0, 0.0}, uniform_grid(0, 300, 3000));
    EXPECT_EQ(tr.s.size(), 3001u);
    for (auto& v : tr.s) EXPECT_TRUE(std::isfinite(v.norm()));
}
