#include "generators.hpp"

#include <gtest/gtest.h>

using namespace nhfloquet;

namespace {

const cplx I(0, 1);

template <class F>
ErrorCode code_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no exception";
    return ErrorCode::ConfigError;
}

void expect_poly(const ExponentForm& f, std::vector<cplx> want) {
    ASSERT_GE(f.poly.size(), 1u);
    while (want.size() < f.poly.size()) want.push_back(0.0);
    for (std::size_t k = 0; k < want.size(); ++k) EXPECT_LT(std::abs(f.coeff(static_cast<int>(k)) - want[k]), 1e-14);
}

}  // namespace

TEST(ExponentForm, Ucf) {
    cplx r = 0.2 * I, rho = -0.8;
    ExponentForm f = exponent_form(model_ucf(r, rho, 1.0));
    EXPECT_EQ(f.kind, ExponentKind::Quadratic01);
    expect_poly(f, {1.0 - r * r, 2.0 * r * rho, -rho * rho});
}

TEST(ExponentForm, BerryUzdin) {
    ExponentForm f = exponent_form(model_berry_uzdin(0.3, 0.5, 1.0));
    EXPECT_EQ(f.kind, ExponentKind::Quadratic01);
    expect_poly(f, {0.3, -0.5, 0.0});
}

TEST(ExponentForm, HarmonicKinds) {
    Complex3 a{0.3, 0.1, 0.2}, b{0.2, -0.1, 0.4}, c{0.1, 0.3, -0.2};
    EXPECT_EQ(exponent_form(model_h12(a, b, 1.0)).kind, ExponentKind::Quadratic12);
    EXPECT_EQ(exponent_form(model_h1m1(a, b, 1.0)).kind, ExponentKind::QuarticOverX2);
    EXPECT_EQ(exponent_form(model_appB_m101(a, b, c, 1.0)).kind, ExponentKind::QuarticOverX2);
    EXPECT_EQ(exponent_form(model_appB_012(a, b, c, 1.0)).kind, ExponentKind::QuarticOverX);
    DriveSpec wide;
    wide.harmonics[0] = a;
    wide.harmonics[3] = b;
    EXPECT_EQ(exponent_form(wide).kind, ExponentKind::NumericQuadrature);
}

TEST(ExponentForm, Unsupported) {
    EXPECT_EQ(code_of([] { exponent_form(DriveSpec{}); }), ErrorCode::UnsupportedHarmonics);
    DriveSpec s;
    s.harmonics[-3] = {1.0, 0.0, 0.0};
    s.harmonics[3] = {0.0, 1.0, 0.0};
    EXPECT_EQ(code_of([&] { exponent_form(s); }), ErrorCode::UnsupportedHarmonics);
}

TEST(CriticalExponent, SingleFrequencyHasNoCrossings) {
    // b = c = 0: g = +-i sqrt(a) theta + const, flat real part for real a
    CriticalExponent H(quadratic01(0.7, 0.0, 0.0));
    double g0 = H(0.1).real();
    for (double th : {1.0, 2.0, 4.0, 6.0}) EXPECT_NEAR(H(th).real(), g0, 1e-12);
    EXPECT_TRUE(stokes_crossings(H).empty());
    cplx a(0.7, 0.2);
    CriticalExponent G(quadratic01(a, 0.0, 0.0));
    cplx step = G(1.0) - G(0.5), want = std::sqrt(a) * I * 0.5;
    EXPECT_LT(std::min(std::abs(step - want), std::abs(step + want)), 1e-12);
}

TEST(CriticalExponent, UcfFourSignChanges) {
    ExponentForm f = exponent_form(model_ucf(0.2 * I, -0.8, 1.0));
    CriticalExponent G(f);
    int changes = 0;
    double prev = G(0.0).real();
    for (int k = 1; k <= 4096; ++k) {
        double v = G(2 * M_PI * k / 4096.0 - 1e-12).real();
        if ((v > 0) != (prev > 0)) ++changes;
        prev = v;
    }
    EXPECT_EQ(changes, 4);
    EXPECT_EQ(stokes_crossings(f).size(), 4u);
}

TEST(CriticalExponent, AiryClosedForm) {
    DriveSpec s = model_airy({1.0, 0.0, 0.5 * I}, 0.6, 1.0);
    Complex3 p = s.coeff(1), q = s.coeff(2);
    cplx pp = cdot(p, p), pq = cdot(p, q);
    ExponentForm f = exponent_form(s);
    EXPECT_EQ(f.kind, ExponentKind::Quadratic12);
    EXPECT_LT(std::abs(f.c()), 1e-15);
    CriticalExponent G(f);
    // equal up to the overall sign of the square root
    cplx ratio0 = G(0.3) / (std::pow(pp + 2.0 * pq * std::polar(1.0, 0.3), 1.5) / (3.0 * pq));
    EXPECT_NEAR(std::abs(ratio0), 1.0, 1e-12);
    for (int k = 0; k < 50; ++k) {
        double th = 2 * M_PI * (k + 0.5) / 50;
        cplx F = std::pow(pp + 2.0 * pq * std::polar(1.0, th), 1.5) / (3.0 * pq);
        EXPECT_LT(std::abs(G(th) - ratio0 * F), 1e-12);
    }
}

TEST(CriticalExponent, ClosedFormMatchesQuadrature) {
    ExponentForm f = exponent_form(model_ucf(0.2 * I, -0.8, 1.0));
    CriticalExponent C(f, CriticalExponent::Method::ClosedForm), Q(f, CriticalExponent::Method::Quadrature);
    for (int k = 0; k < 100; ++k) {
        double th = 2 * M_PI * k / 100;
        EXPECT_LT(std::abs(C(th) - Q(th)), 1e-9);
    }
}

TEST(CriticalExponent, NodeCountDoesNotMoveTheCut) {
    ExponentForm f;
    f.kind = ExponentKind::QuarticOverX2;
    f.weight = 2;
    f.poly = {cplx(0.1, 0.05), cplx(0.3, -0.2), cplx(0.8, 0.1), cplx(-0.2, 0.3), cplx(0.15, 0)};
    CriticalExponent A(f, CriticalExponent::Method::Quadrature, 256), B(f, CriticalExponent::Method::Quadrature, 4096);
    for (double d : {1e-3, 1e-2, 5e-2}) {
        double th = std::fmod(A.theta0() - d + 2 * M_PI, 2 * M_PI);
        EXPECT_LT(std::abs(A(th) - B(th)), 1e-10);
    }
}

TEST(CriticalExponent, BranchPointOnCircle) {
    EXPECT_EQ(code_of([] { CriticalExponent G(quadratic01(1.0, 0.0, -1.0)); }), ErrorCode::BranchPointOnCircle);
}

TEST(CriticalExponent, ThetaRange) {
    ExponentForm f = quadratic01(1.0, 0.3, 0.2);
    EXPECT_EQ(code_of([&] { critical_exponent(f, 2 * M_PI); }), ErrorCode::ConfigError);
    EXPECT_EQ(code_of([&] { critical_exponent(f, -0.1); }), ErrorCode::ConfigError);
    EXPECT_NO_THROW(critical_exponent(f, 0.0));
}

TEST(CriticalExponent, AnchorIsRootOfP) {
    ExponentForm f = exponent_form(model_ucf(0.2 * I, -0.8, 1.0));
    CriticalExponent G(f);
    ASSERT_TRUE(G.has_anchor());
    EXPECT_NEAR(G.theta0(), std::arg(G.anchor()) < 0 ? std::arg(G.anchor()) + 2 * M_PI : std::arg(G.anchor()), 1e-12);
    EXPECT_LT(std::abs(f.coeff(0) + f.coeff(1) * G.anchor() + f.coeff(2) * G.anchor() * G.anchor()), 1e-12);
}

TEST(StokesCrossings, Examples) {
    EXPECT_TRUE(stokes_crossings(exponent_form(model_ucf(0.1, 0.0, 1.0))).empty());
    auto ax = stokes_crossings(exponent_form(model_airy({1.0, 0.0, 0.5 * I}, 0.6, 1.0)));
    EXPECT_EQ(ax.size(), 3u);
    for (double t : ax) {
        EXPECT_GE(t, 0.0);
        EXPECT_LT(t, 2 * M_PI);
    }
    EXPECT_TRUE(std::is_sorted(ax.begin(), ax.end()));
}

TEST(PredictHops, Examples) {
    DriveSpec ucf = model_ucf(0.2 * I, -0.8, 2 * M_PI / 300);
    EXPECT_EQ(predict_hops(ucf, HopMode::Minus).count(), 4);
    EXPECT_EQ(predict_hops(ucf, HopMode::Plus).count(), 0);
    DriveSpec airy = model_airy({1.0, 0.0, 0.5 * I}, 0.6, 2 * M_PI / 50);
    HopReport ai = predict_hops(airy, HopMode::Ai);
    ASSERT_EQ(ai.count(), 1);
    EXPECT_NEAR(ai.hops[0].t / airy.period(), 0.5, 0.05);
    EXPECT_EQ(predict_hops(airy, HopMode::Bi).count(), 3);
    EXPECT_EQ(predict_hops(model_ucf(0.3, 0.0, 0.1), HopMode::Minus).count(), 0);
    EXPECT_EQ(predict_hops(model_single_frequency({1.0, 0.0, 0.5 * I}, 0.1), HopMode::Minus).count(), 0);
}

TEST(DetectHops, SingleFrequencyFollows) {
    DriveSpec s = model_single_frequency({1.0, 0.0, 0.5 * I}, 2 * M_PI / 50);
    FloquetSolution F = floquet_solve(s);
    for (Mode m : {Mode::Plus, Mode::Minus}) {
        Trajectory<double> tr = cyclic_trajectory(s, F, m, uniform_grid(0, s.period(), 2000));
        EXPECT_EQ(detect_hops_numeric(tr, s).count(), 0);
        FollowingData fd = following_distances(tr, s);
        double worst = 0;
        for (std::size_t k = 0; k < fd.t.size(); ++k) worst = std::max(worst, std::min(fd.d_plus[k], fd.d_minus[k]));
        EXPECT_LT(worst, 1e-8);
    }
}

TEST(DetectHops, UcfMatchesCrossings) {
    DriveSpec s = model_ucf(0.2 * I, -0.8, 2 * M_PI / 300);
    FloquetSolution F = floquet_solve(s);
    Trajectory<double> tr = cyclic_trajectory(s, F, Mode::Minus, uniform_grid(0, s.period(), 3000));
    HopReport h = detect_hops_numeric(tr, s);
    ASSERT_EQ(h.count(), 4);
    std::vector<double> c = predict_hops(s, HopMode::Minus).crossings;
    for (auto& e : h.hops) {
        double best = 1e300;
        for (double t : c) best = std::min(best, std::abs(t - e.t));
        EXPECT_LT(best, 0.02 * s.period());
        EXPECT_EQ(e.kind, HopKind::Numeric);
    }
}

TEST(DetectHops, Preconditions) {
    DriveSpec s = model_ucf(0.2 * I, -0.8, 1.0);
    Trajectory<double> shortgrid = trajectory<double>(s, {1.0, 0.0}, uniform_grid(0, s.period(), 100));
    EXPECT_EQ(code_of([&] { detect_hops_numeric(shortgrid, s); }), ErrorCode::ConfigError);
    Trajectory<double> partial = trajectory<double>(s, {1.0, 0.0}, uniform_grid(0, s.period() / 2, 2500));
    EXPECT_EQ(code_of([&] { detect_hops_numeric(partial, s); }), ErrorCode::ConfigError);
}

TEST(DetectHops, FastDrivingIsAmbiguous) {
    // far from adiabatic: over one short period the state barely leaves (1, 0)
    // while both eigenstates stay near psi = +-1, chordal distance ~0.7
    DriveSpec s = model_h01({0.05, 0.0, 0.0}, {0.0, 0.0, 0.005}, 20.0);
    Trajectory<double> tr = trajectory<double>(s, {1.0, 0.0}, uniform_grid(0, s.period(), 2000));
    EXPECT_EQ(code_of([&] { detect_hops_numeric(tr, s); }), ErrorCode::AmbiguousFollowing);
}

TEST(Tangency, SymmetricAtZeroR) {
    auto br = tangency_solve(0.0);
    ASSERT_GE(br.size(), 2u);
    for (auto& b : br) {
        ASSERT_EQ(b.theta.size(), 2u);
        EXPECT_NEAR(b.theta[0] + b.theta[1], 2 * M_PI, 1e-8);
    }
    EXPECT_NEAR(br.front().rho, -br.back().rho, 1e-8);
}

TEST(Tangency, FourHopBoundaryAtPi) {
    // for |r| below the bifurcation a theta = pi tangency exists together
    // with the off-axis pairs; above it only the axis tangencies are left
    for (double r : {0.1, 0.3}) {
        auto br = tangency_solve(r);
        bool at_pi = false;
        for (auto& b : br)
            for (double t : b.theta) at_pi = at_pi || std::abs(t - M_PI) < 1e-8;
        EXPECT_TRUE(at_pi) << r;
        EXPECT_EQ(off_axis_tangencies(r), 4) << r;
    }
    EXPECT_EQ(off_axis_tangencies(0.5), 0);
}

TEST(Tangency, CriticalRhoForSmallR) {
    auto br = tangency_solve(0.1);
    bool found = false;
    for (auto& b : br) found = found || std::abs(b.rho - 0.5766416) < 1e-6;
    EXPECT_TRUE(found);
}

TEST(Bifurcation, RestrictedRangeHasNone) {
    EXPECT_EQ(code_of([] { bifurcation_scan(0.5, 0.9); }), ErrorCode::NoBifurcation);
}

TEST(Bifurcation, RejectsUnstableRange) {
    EXPECT_EQ(code_of([] { bifurcation_scan(0.5, 1.2); }), ErrorCode::ConfigError);
    EXPECT_EQ(code_of([] { bifurcation_scan(-1.5, -0.5); }), ErrorCode::ConfigError);
}

TEST(PhaseDiagram, Cells) {
    EXPECT_EQ(phase_cell(0.2, 0.0, 4096).region, Region::NoHop);
    EXPECT_EQ(phase_cell(0.2 * I, -0.8, 4096).region, Region::Hop4);
    EXPECT_EQ(phase_cell(0.5, 0.4, 4096).region, Region::Hop2);
    EXPECT_EQ(phase_cell(0.5, -0.4, 4096).region, Region::Hop2);
}

TEST(PhaseDiagram, SmallGridDeterministic) {
    PhaseDiagramSpec ps;
    ps.n_r = 12;
    ps.n_rho = 9;
    ps.theta_nodes = 1024;
    ps.threads = 1;
    auto a = phase_diagram(ps);
    ps.threads = 3;
    auto b = phase_diagram(ps);
    ASSERT_EQ(a.size(), 108u);
    for (std::size_t k = 0; k < a.size(); ++k) {
        EXPECT_EQ(a[k].region, b[k].region);
        EXPECT_EQ(a[k].crossings, b[k].crossings);
        EXPECT_EQ(a[k].re_r, b[k].re_r);
    }
    EXPECT_EQ(a.front().re_r, ps.r_lo);
    EXPECT_EQ(a.back().re_rho, ps.rho_hi);
    std::ostringstream os;
    write_phase_diagram_csv(os, a);
    EXPECT_EQ(os.str().substr(0, 27), "re_r,re_rho,crossings,regio");
}

TEST(PhaseDiagram, RejectsOversizedGrid) {
    PhaseDiagramSpec ps;
    ps.n_r = 2000;
    ps.n_rho = 1000;
    EXPECT_THROW(phase_diagram(ps), Error);
}
