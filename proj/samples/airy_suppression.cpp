// Airy model: the Ai solution is recessive on most of the circle and hops
// once near T/2; Bi hops at all three crossings.

#include <nhfloquet/nhfloquet.hpp>

#include <cstdio>

using namespace nhfloquet;

int main() {
    DriveSpec spec = model_airy({1.0, 0.0, cplx(0, 0.5)}, 0.6, 2 * M_PI / 50);
    const double T = spec.period();
    FloquetSolution F = floquet_solve(spec);
    std::printf("U(T) class: %s\n", class_name(F.classification));

    CriticalExponent G(exponent_form(spec));
    std::printf("Re g(theta):\n");
    for (int k = 0; k < 12; ++k) {
        double th = 2 * M_PI * k / 12;
        std::printf("  %6.3f  % .6f\n", th, G(th).real());
    }
    auto grid = uniform_grid(0, T, 3000);
    for (auto [mode, hm] : {std::pair{Mode::Plus, HopMode::Ai}, std::pair{Mode::Minus, HopMode::Bi}}) {
        HopReport num = detect_hops_numeric(cyclic_trajectory(spec, F, mode, grid), spec);
        HopReport pred = predict_hops(spec, hm);
        std::printf("%s: %d numeric, %d predicted;", hop_mode_name(hm), num.count(), pred.count());
        for (auto& h : num.hops) std::printf(" t/T=%.3f", h.t / T);
        std::printf("\n");
    }
}
