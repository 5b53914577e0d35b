// A few special-function values and the one-turn continuation of Bessel J.

#include <nhfloquet/nhfloquet.hpp>

#include <cstdio>

using namespace nhfloquet;
using namespace nhfloquet::specfun;

namespace {

void show(const char* what, cplx v) { std::printf("%-28s %.15g%+.15gi\n", what, v.real(), v.imag()); }

}  // namespace

int main() {
    show("Gamma(1/3)", gamma<double>(cplx(1.0 / 3, 0)));
    show("Ai(0)", airy_ai<double>(0.0));
    show("Bi(1+i)", airy_bi<double>(cplx(1, 1)));
    show("M(0.5, 1.5, 2i) regularized", kummer_m_reg<double>(0.5, 1.5, cplx(0, 2)));
    show("U(0.3, 0.7, 2)", tricomi_u<double>(0.3, 0.7, 2.0));
    show("W_{0.2,0.3}(1.5)", whittaker_w<double>(0.2, 0.3, 1.5));
    show("D_{0.5}(1)", pcf_d<double>(0.5, 1.0));

    cplx nu(0.3, 0.1), z(1.2, 0.4);
    cplx j0 = bessel_j<double>(nu, z), j1 = bessel_j<double>(nu, z, 1);
    show("J_nu(z)", j0);
    show("J_nu(z e^{2 pi i})", j1);
    show("ratio", j1 / j0);
    show("e^{2 pi i nu}", std::exp(cplx(0, 2 * M_PI) * nu));
}
