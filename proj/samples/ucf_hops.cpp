// Cyclic states of the ucf model: the plus mode follows one instantaneous
// eigenstate, the minus mode hops at every Stokes crossing.

#include <nhfloquet/nhfloquet.hpp>

#include <cstdio>

using namespace nhfloquet;

int main() {
    DriveSpec spec = model_ucf(cplx(0, 0.2), -0.8, 2 * M_PI / 300);
    const double T = spec.period();
    FloquetSolution F = floquet_solve(spec);
    std::printf("phi+ = %.10f%+.3ei, phi- = %.10f%+.3ei (%s)\n", F.phi_plus.real(), F.phi_plus.imag(),
                F.phi_minus.real(), F.phi_minus.imag(), class_name(F.classification));

    auto grid = uniform_grid(0, T, 3000);
    for (auto [mode, hm, name] : {std::tuple{Mode::Plus, HopMode::Plus, "F+"}, std::tuple{Mode::Minus, HopMode::Minus, "F-"}}) {
        Trajectory<double> tr = cyclic_trajectory(spec, F, mode, grid);
        HopReport num = detect_hops_numeric(tr, spec);
        HopReport pred = predict_hops(spec, hm);
        std::printf("%s: %d numeric hops, %d predicted\n", name, num.count(), pred.count());
        for (auto& h : num.hops) std::printf("   hop at t/T = %.4f\n", h.t / T);
    }
    std::printf("Stokes crossings at t/T =");
    for (double t : predict_hops(spec, HopMode::Minus).crossings) std::printf(" %.4f", t / T);
    std::printf("\n");
}
