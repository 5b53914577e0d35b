#pragma once

// Dormand-Prince 8(5,3) embedded pair with 7th-order continuous extension.
// Coefficients carry ~30 significant digits so the same tableau serves
// double and binary128 integration.

#include "error.hpp"
#include "scalar.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

namespace nhfloquet {

template <class T>
struct Dop853Tableau {
    T c2, c3, c4, c5, c6, c7, c8, c9, c10, c11, c14, c15, c16;
    T a21, a31, a32, a41, a43, a51, a53, a54, a61, a64, a65, a71, a74, a75, a76;
    T a81, a84, a85, a86, a87, a91, a94, a95, a96, a97, a98;
    T a101, a104, a105, a106, a107, a108, a109;
    T a111, a114, a115, a116, a117, a118, a119, a1110;
    T a121, a124, a125, a126, a127, a128, a129, a1210, a1211;
    T a141, a147, a148, a149, a1410, a1411, a1412, a1413;
    T a151, a156, a157, a158, a1511, a1512, a1513, a1514;
    T a161, a166, a167, a168, a169, a1613, a1614, a1615;
    T b1, b6, b7, b8, b9, b10, b11, b12;
    T bhh1, bhh2, bhh3;
    T er1, er6, er7, er8, er9, er10, er11, er12;
    T d41, d46, d47, d48, d49, d410, d411, d412, d413, d414, d415, d416;
    T d51, d56, d57, d58, d59, d510, d511, d512, d513, d514, d515, d516;
    T d61, d66, d67, d68, d69, d610, d611, d612, d613, d614, d615, d616;
    T d71, d76, d77, d78, d79, d710, d711, d712, d713, d714, d715, d716;

    static const Dop853Tableau& get() {
        static const Dop853Tableau tab = make();
        return tab;
    }

private:
    static Dop853Tableau make() {
        auto v = [](const char* s) { return from_string<T>(s); };
        Dop853Tableau t;
        t.c2 = v("0.526001519587677318785587544488e-01");
        t.c3 = v("0.789002279381515978178381316732e-01");
        t.c4 = v("0.118350341907227396726757197510e+00");
        t.c5 = v("0.281649658092772603273242802490e+00");
        t.c6 = v("0.333333333333333333333333333333333e+00");
        t.c7 = v("0.25e+00");
        t.c8 = v("0.307692307692307692307692307692307e+00");
        t.c9 = v("0.651282051282051282051282051282051e+00");
        t.c10 = v("0.6e+00");
        t.c11 = v("0.857142857142857142857142857142857e+00");
        t.c14 = v("0.1e+00");
        t.c15 = v("0.2e+00");
        t.c16 = v("0.777777777777777777777777777777778e+00");

        t.a21 = v("5.26001519587677318785587544488e-2");
        t.a31 = v("1.97250569845378994544595329183e-2");
        t.a32 = v("5.91751709536136983633785987549e-2");
        t.a41 = v("2.95875854768068491816892993775e-2");
        t.a43 = v("8.87627564304205475450678981324e-2");
        t.a51 = v("2.41365134159266685502369798665e-1");
        t.a53 = v("-8.84549479328286085344864962717e-1");
        t.a54 = v("9.24834003261792003115737966543e-1");
        t.a61 = v("3.70370370370370370370370370370370e-2");
        t.a64 = v("1.70828608729473871279604482173e-1");
        t.a65 = v("1.25467687566822425016691814123e-1");
        t.a71 = v("3.7109375e-2");
        t.a74 = v("1.70252211019544039314978060272e-1");
        t.a75 = v("6.02165389804559606850219397283e-2");
        t.a76 = v("-1.7578125e-2");
        t.a81 = v("3.70920001185047927108779319836e-2");
        t.a84 = v("1.70383925712239993810214054705e-1");
        t.a85 = v("1.07262030446373284651809199168e-1");
        t.a86 = v("-1.53194377486244017527936158236e-2");
        t.a87 = v("8.27378916381402288758473766002e-3");
        t.a91 = v("6.24110958716075717114429577812e-1");
        t.a94 = v("-3.36089262944694129406857109825e0");
        t.a95 = v("-8.68219346841726006818189891453e-1");
        t.a96 = v("2.75920996994467083049415600797e1");
        t.a97 = v("2.01540675504778934086186788979e1");
        t.a98 = v("-4.34898841810699588477366255144e1");
        t.a101 = v("4.77662536438264365890433908527e-1");
        t.a104 = v("-2.48811461997166764192642586468e0");
        t.a105 = v("-5.90290826836842996371446475743e-1");
        t.a106 = v("2.12300514481811942347288949897e1");
        t.a107 = v("1.52792336328824235832596922938e1");
        t.a108 = v("-3.32882109689848629194453265587e1");
        t.a109 = v("-2.03312017085086261358222928593e-2");
        t.a111 = v("-9.3714243008598732571704021658e-1");
        t.a114 = v("5.18637242884406370830023853209e0");
        t.a115 = v("1.09143734899672957818500254654e0");
        t.a116 = v("-8.14978701074692612513997267357e0");
        t.a117 = v("-1.85200656599969598641566180701e1");
        t.a118 = v("2.27394870993505042818970056734e1");
        t.a119 = v("2.49360555267965238987089396762e0");
        t.a1110 = v("-3.0467644718982195003823669022e0");
        t.a121 = v("2.27331014751653820792359768449e0");
        t.a124 = v("-1.05344954667372501984066689879e1");
        t.a125 = v("-2.00087205822486249909675718444e0");
        t.a126 = v("-1.79589318631187989172765950534e1");
        t.a127 = v("2.79488845294199600508499808837e1");
        t.a128 = v("-2.85899827713502369474065508674e0");
        t.a129 = v("-8.87285693353062954433549289258e0");
        t.a1210 = v("1.23605671757943030647266201528e1");
        t.a1211 = v("6.43392746015763530355970484046e-1");

        t.a141 = v("5.61675022830479523392909219681e-2");
        t.a147 = v("2.53500210216624811088794765333e-1");
        t.a148 = v("-2.46239037470802489917441475441e-1");
        t.a149 = v("-1.24191423263816360469010140626e-1");
        t.a1410 = v("1.5329179827876569731206322685e-1");
        t.a1411 = v("8.20105229563468988491666602057e-3");
        t.a1412 = v("7.56789766054569976138603589584e-3");
        t.a1413 = v("-8.298e-3");
        t.a151 = v("3.18346481635021405060768473261e-2");
        t.a156 = v("2.83009096723667755288322961402e-2");
        t.a157 = v("5.35419883074385676223797384372e-2");
        t.a158 = v("-5.49237485713909884646569340306e-2");
        t.a1511 = v("-1.08347328697249322858509316994e-4");
        t.a1512 = v("3.82571090835658412954920192323e-4");
        t.a1513 = v("-3.40465008687404560802977114492e-4");
        t.a1514 = v("1.41312443674632500278074618366e-1");
        t.a161 = v("-4.28896301583791923408573538692e-1");
        t.a166 = v("-4.69762141536116384314449447206e0");
        t.a167 = v("7.68342119606259904184240953878e0");
        t.a168 = v("4.06898981839711007970213554331e0");
        t.a169 = v("3.56727187455281109270669543021e-1");
        t.a1613 = v("-1.39902416515901462129418009734e-3");
        t.a1614 = v("2.9475147891527723389556272149e0");
        t.a1615 = v("-9.15095847217987001081870187138e0");

        t.b1 = v("5.42937341165687622380535766363e-2");
        t.b6 = v("4.45031289275240888144113950566e0");
        t.b7 = v("1.89151789931450038304281599044e0");
        t.b8 = v("-5.8012039600105847814672114227e0");
        t.b9 = v("3.1116436695781989440891606237e-1");
        t.b10 = v("-1.52160949662516078556178806805e-1");
        t.b11 = v("2.01365400804030348374776537501e-1");
        t.b12 = v("4.47106157277725905176885569043e-2");

        t.bhh1 = v("0.244094488188976377952755905512e+00");
        t.bhh2 = v("0.733846688281611857341361741547e+00");
        t.bhh3 = v("0.220588235294117647058823529412e-01");

        t.er1 = v("0.1312004499419488073250102996e-01");
        t.er6 = v("-0.1225156446376204440720569753e+01");
        t.er7 = v("-0.4957589496572501915214079952e+00");
        t.er8 = v("0.1664377182454986536961530415e+01");
        t.er9 = v("-0.3503288487499736816886487290e+00");
        t.er10 = v("0.3341791187130174790297318841e+00");
        t.er11 = v("0.8192320648511571246570742613e-01");
        t.er12 = v("-0.2235530786388629525884427845e-01");

        t.d41 = v("-0.84289382761090128651353491142e+01");
        t.d46 = v("0.56671495351937776962531783590e+00");
        t.d47 = v("-0.30689499459498916912797304727e+01");
        t.d48 = v("0.23846676565120698287728149680e+01");
        t.d49 = v("0.21170345824450282767155149946e+01");
        t.d410 = v("-0.87139158377797299206789907490e+00");
        t.d411 = v("0.22404374302607882758541771650e+01");
        t.d412 = v("0.63157877876946881815570249290e+00");
        t.d413 = v("-0.88990336451333310820698117400e-01");
        t.d414 = v("0.18148505520854727256656404962e+02");
        t.d415 = v("-0.91946323924783554000451984436e+01");
        t.d416 = v("-0.44360363875948939664310572000e+01");
        t.d51 = v("0.10427508642579134603413151009e+02");
        t.d56 = v("0.24228349177525818288430175319e+03");
        t.d57 = v("0.16520045171727028198505394887e+03");
        t.d58 = v("-0.37454675472269020279518312152e+03");
        t.d59 = v("-0.22113666853125306036270938578e+02");
        t.d510 = v("0.77334326684722638389603898808e+01");
        t.d511 = v("-0.30674084731089398182061213626e+02");
        t.d512 = v("-0.93321305264302278729567221706e+01");
        t.d513 = v("0.15697238121770843886131091075e+02");
        t.d514 = v("-0.31139403219565177677282850411e+02");
        t.d515 = v("-0.93529243588444783865713862664e+01");
        t.d516 = v("0.35816841486394083752465898540e+02");
        t.d61 = v("0.19985053242002433820987653617e+02");
        t.d66 = v("-0.38703730874935176555105901742e+03");
        t.d67 = v("-0.18917813819516756882830838328e+03");
        t.d68 = v("0.52780815920542364900561016686e+03");
        t.d69 = v("-0.11573902539959630126141871134e+02");
        t.d610 = v("0.68812326946963000169666922661e+01");
        t.d611 = v("-0.10006050966910838403183860980e+01");
        t.d612 = v("0.77771377980534432092869265740e+00");
        t.d613 = v("-0.27782057523535084065932004339e+01");
        t.d614 = v("-0.60196695231264120758267380846e+02");
        t.d615 = v("0.84320405506677161018159903784e+02");
        t.d616 = v("0.11992291136182789328035130030e+02");
        t.d71 = v("-0.25693933462703749003312586129e+02");
        t.d76 = v("-0.15418974869023643374053993627e+03");
        t.d77 = v("-0.23152937917604549567536039109e+03");
        t.d78 = v("0.35763911791061412378285349910e+03");
        t.d79 = v("0.93405324183624310003907691704e+02");
        t.d710 = v("-0.37458323136451633156875139351e+02");
        t.d711 = v("0.10409964950896230045147246184e+03");
        t.d712 = v("0.29840293426660503123344363579e+02");
        t.d713 = v("-0.43533456590011143754432175058e+02");
        t.d714 = v("0.96324553959188282948394950600e+02");
        t.d715 = v("-0.39177261675615439165231486172e+02");
        t.d716 = v("-0.14972683625798562581422125276e+03");
        return t;
    }
};

struct IntegratorOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    double h_init = 0.0;       // 0 picks a starting step automatically
    long max_steps = 50'000'000;
};

struct IntegratorStats {
    long steps = 0;
    long rejected = 0;
    long evaluations = 0;
};

// Integrates y' = F(t, y) for N complex components. The state is kept as
// exp(log_scale) * y so that exponentially growing solutions never overflow;
// the rescaling is one common factor for every component.
template <class T, std::size_t N>
class Dop853 {
public:
    using C = std::complex<T>;
    using Vec = std::array<C, N>;
    using Rhs = std::function<void(const T&, const Vec&, Vec&)>;
    // Called with (t, y, log_scale) at every requested output time.
    using Sink = std::function<void(const T&, const Vec&, const T&)>;

    Dop853(Rhs f, IntegratorOptions opt) : f_(std::move(f)), opt_(opt), tab_(Dop853Tableau<T>::get()) {}

    const IntegratorStats& stats() const { return stats_; }
    T log_scale() const { return log_scale_; }
    double error_estimate() const { return err_sum_; }

    // Integrates from t0 to t1 (t1 > t0 or t1 < t0). Output times must be
    // monotone in the direction of integration and lie inside [t0, t1].
    Vec integrate(const T& t0, const T& t1, Vec y, const std::vector<T>& outputs = {}, const Sink& sink = {}) {
        using std::abs;
        using std::max;
        using std::min;
        using std::pow;
        using std::sqrt;
        log_scale_ = 0;
        err_sum_ = 0;
        std::size_t next_out = 0;
        const T dir = t1 >= t0 ? T(1) : T(-1);
        auto emit_until = [&](const T& tend, bool final) {
            while (next_out < outputs.size() && (dir * (outputs[next_out] - tend) <= 0 || final)) {
                if (final && dir * (outputs[next_out] - tend) > 0) break;
                sink(outputs[next_out], y, log_scale_);
                ++next_out;
            }
        };
        if (t1 == t0) {
            if (sink) emit_until(t0, true);
            return y;
        }
        const T rtol = T(opt_.rtol), atol = T(opt_.atol);
        T t = t0;
        Vec k1, k2, k3, k4, k5, k6, k7, k8, k9, k10, yw, ynew;
        f_(t, y, k1);
        ++stats_.evaluations;
        T h = opt_.h_init > 0 ? T(opt_.h_init) : initial_step(t, y, k1, dir, rtol, atol);
        h = dir * min(abs(h), abs(t1 - t0));
        if (sink) {
            while (next_out < outputs.size() && outputs[next_out] == t0) {
                sink(t0, y, log_scale_);
                ++next_out;
            }
        }
        const T expo1 = T(1) / T(8);
        const T facc1 = T(1) / T(0.333), facc2 = T(1) / T(6);
        const T safe = T(0.9);
        bool reject = false;
        bool last = false;
        const auto& c = tab_;
        while (true) {
            if (stats_.steps >= opt_.max_steps)
                throw Error(ErrorCode::StepSizeUnderflow, "step budget exhausted");
            if (abs(h) <= eps_v<T>() * 16 * max(abs(t), T(1)))
                throw Error(ErrorCode::StepSizeUnderflow, "step size underflow");
            if (dir * (t + T(1.01) * h - t1) > 0) {
                h = t1 - t;
                last = true;
            }
            ++stats_.steps;
            stage(yw, y, h, {{c.a21, &k1}});
            f_(t + c.c2 * h, yw, k2);
            stage(yw, y, h, {{c.a31, &k1}, {c.a32, &k2}});
            f_(t + c.c3 * h, yw, k3);
            stage(yw, y, h, {{c.a41, &k1}, {c.a43, &k3}});
            f_(t + c.c4 * h, yw, k4);
            stage(yw, y, h, {{c.a51, &k1}, {c.a53, &k3}, {c.a54, &k4}});
            f_(t + c.c5 * h, yw, k5);
            stage(yw, y, h, {{c.a61, &k1}, {c.a64, &k4}, {c.a65, &k5}});
            f_(t + c.c6 * h, yw, k6);
            stage(yw, y, h, {{c.a71, &k1}, {c.a74, &k4}, {c.a75, &k5}, {c.a76, &k6}});
            f_(t + c.c7 * h, yw, k7);
            stage(yw, y, h, {{c.a81, &k1}, {c.a84, &k4}, {c.a85, &k5}, {c.a86, &k6}, {c.a87, &k7}});
            f_(t + c.c8 * h, yw, k8);
            stage(yw, y, h, {{c.a91, &k1}, {c.a94, &k4}, {c.a95, &k5}, {c.a96, &k6}, {c.a97, &k7}, {c.a98, &k8}});
            f_(t + c.c9 * h, yw, k9);
            stage(yw, y, h,
                  {{c.a101, &k1}, {c.a104, &k4}, {c.a105, &k5}, {c.a106, &k6}, {c.a107, &k7}, {c.a108, &k8},
                   {c.a109, &k9}});
            f_(t + c.c10 * h, yw, k10);
            stage(yw, y, h,
                  {{c.a111, &k1}, {c.a114, &k4}, {c.a115, &k5}, {c.a116, &k6}, {c.a117, &k7}, {c.a118, &k8},
                   {c.a119, &k9}, {c.a1110, &k10}});
            f_(t + c.c11 * h, yw, k2);  // stage 11 lives in k2
            T xph = t + h;
            stage(yw, y, h,
                  {{c.a121, &k1}, {c.a124, &k4}, {c.a125, &k5}, {c.a126, &k6}, {c.a127, &k7}, {c.a128, &k8},
                   {c.a129, &k9}, {c.a1210, &k10}, {c.a1211, &k2}});
            f_(xph, yw, k3);  // stage 12 lives in k3
            stats_.evaluations += 11;
            for (std::size_t i = 0; i < N; ++i) {
                k4[i] = c.b1 * k1[i] + c.b6 * k6[i] + c.b7 * k7[i] + c.b8 * k8[i] + c.b9 * k9[i] + c.b10 * k10[i] +
                        c.b11 * k2[i] + c.b12 * k3[i];
                k5[i] = y[i] + h * k4[i];
            }
            T err = 0, err2 = 0;
            for (std::size_t i = 0; i < N; ++i) {
                T sk = atol + rtol * max(abs(y[i]), abs(k5[i]));
                C e2 = k4[i] - c.bhh1 * k1[i] - c.bhh2 * k9[i] - c.bhh3 * k3[i];
                C e1 = c.er1 * k1[i] + c.er6 * k6[i] + c.er7 * k7[i] + c.er8 * k8[i] + c.er9 * k9[i] +
                       c.er10 * k10[i] + c.er11 * k2[i] + c.er12 * k3[i];
                err2 += abs2(e2) / (sk * sk);
                err += abs2(e1) / (sk * sk);
            }
            T deno = err + T(0.01) * err2;
            if (deno <= 0) deno = 1;
            err = abs(h) * err * sqrt(T(1) / (T(N) * deno));
            T fac11 = pow(err, expo1);
            T fac = fac11 / safe;
            fac = max(facc2, min(facc1, fac));
            T hnew = h / fac;
            if (err <= 1) {
                err_sum_ += to_double(err) * opt_.rtol;
                f_(xph, k5, k4);  // derivative at the new point
                ++stats_.evaluations;
                bool need_dense = false;
                if (sink && next_out < outputs.size() && dir * (outputs[next_out] - xph) <= 0) need_dense = true;
                if (need_dense) {
                    Dense d = dense(t, h, y, k5, k1, k2, k3, k4, k6, k7, k8, k9, k10);
                    while (next_out < outputs.size() && dir * (outputs[next_out] - xph) <= 0) {
                        T s = (outputs[next_out] - t) / h;
                        Vec yo;
                        eval_dense(d, s, yo);
                        sink(outputs[next_out], yo, log_scale_);
                        ++next_out;
                    }
                }
                k1 = k4;
                y = k5;
                t = xph;
                rescale(y, k1);
                if (last) {
                    if (sink) emit_until(t, true);
                    return y;
                }
                if (abs(hnew) > abs(t1 - t)) hnew = t1 - t;
                if (reject) hnew = dir * min(abs(hnew), abs(h));
                reject = false;
                h = hnew;
            } else {
                hnew = h / min(facc1, fac11 / safe);
                reject = true;
                last = false;
                ++stats_.rejected;
                h = hnew;
            }
        }
    }

private:
    struct Dense {
        Vec r1, r2, r3, r4, r5, r6, r7, r8;
    };

    void stage(Vec& out, const Vec& y, const T& h, std::initializer_list<std::pair<T, const Vec*>> terms) const {
        for (std::size_t i = 0; i < N; ++i) {
            C acc(0, 0);
            for (auto& tm : terms) acc += tm.first * (*tm.second)[i];
            out[i] = y[i] + h * acc;
        }
    }

    Dense dense(const T& t, const T& h, const Vec& y, const Vec& ynew, const Vec& k1, Vec k2, Vec k3, const Vec& k4,
                const Vec& k6, const Vec& k7, const Vec& k8, const Vec& k9, Vec k10) {
        const auto& c = tab_;
        Dense d;
        for (std::size_t i = 0; i < N; ++i) {
            d.r1[i] = y[i];
            C ydiff = ynew[i] - y[i];
            d.r2[i] = ydiff;
            C bspl = h * k1[i] - ydiff;
            d.r3[i] = bspl;
            d.r4[i] = ydiff - h * k4[i] - bspl;
            d.r5[i] = c.d41 * k1[i] + c.d46 * k6[i] + c.d47 * k7[i] + c.d48 * k8[i] + c.d49 * k9[i] +
                      c.d410 * k10[i] + c.d411 * k2[i] + c.d412 * k3[i];
            d.r6[i] = c.d51 * k1[i] + c.d56 * k6[i] + c.d57 * k7[i] + c.d58 * k8[i] + c.d59 * k9[i] +
                      c.d510 * k10[i] + c.d511 * k2[i] + c.d512 * k3[i];
            d.r7[i] = c.d61 * k1[i] + c.d66 * k6[i] + c.d67 * k7[i] + c.d68 * k8[i] + c.d69 * k9[i] +
                      c.d610 * k10[i] + c.d611 * k2[i] + c.d612 * k3[i];
            d.r8[i] = c.d71 * k1[i] + c.d76 * k6[i] + c.d77 * k7[i] + c.d78 * k8[i] + c.d79 * k9[i] +
                      c.d710 * k10[i] + c.d711 * k2[i] + c.d712 * k3[i];
        }
        Vec yw;
        stage(yw, y, h,
              {{c.a141, &k1}, {c.a147, &k7}, {c.a148, &k8}, {c.a149, &k9}, {c.a1410, &k10}, {c.a1411, &k2},
               {c.a1412, &k3}, {c.a1413, &k4}});
        f_(t + c.c14 * h, yw, k10);
        stage(yw, y, h,
              {{c.a151, &k1}, {c.a156, &k6}, {c.a157, &k7}, {c.a158, &k8}, {c.a1511, &k2}, {c.a1512, &k3},
               {c.a1513, &k4}, {c.a1514, &k10}});
        f_(t + c.c15 * h, yw, k2);
        stage(yw, y, h,
              {{c.a161, &k1}, {c.a166, &k6}, {c.a167, &k7}, {c.a168, &k8}, {c.a169, &k9}, {c.a1613, &k4},
               {c.a1614, &k10}, {c.a1615, &k2}});
        f_(t + c.c16 * h, yw, k3);
        stats_.evaluations += 3;
        for (std::size_t i = 0; i < N; ++i) {
            d.r5[i] = h * (d.r5[i] + c.d413 * k4[i] + c.d414 * k10[i] + c.d415 * k2[i] + c.d416 * k3[i]);
            d.r6[i] = h * (d.r6[i] + c.d513 * k4[i] + c.d514 * k10[i] + c.d515 * k2[i] + c.d516 * k3[i]);
            d.r7[i] = h * (d.r7[i] + c.d613 * k4[i] + c.d614 * k10[i] + c.d615 * k2[i] + c.d616 * k3[i]);
            d.r8[i] = h * (d.r8[i] + c.d713 * k4[i] + c.d714 * k10[i] + c.d715 * k2[i] + c.d716 * k3[i]);
        }
        return d;
    }

    static void eval_dense(const Dense& d, const T& s, Vec& out) {
        T s1 = T(1) - s;
        for (std::size_t i = 0; i < N; ++i)
            out[i] = d.r1[i] +
                     s * (d.r2[i] +
                          s1 * (d.r3[i] + s * (d.r4[i] + s1 * (d.r5[i] + s * (d.r6[i] + s1 * (d.r7[i] + s * d.r8[i]))))));
    }

    T initial_step(const T& t, const Vec& y, const Vec& f0, const T& dir, const T& rtol, const T& atol) {
        using std::abs;
        using std::max;
        using std::min;
        using std::pow;
        using std::sqrt;
        T dnf = 0, dny = 0;
        for (std::size_t i = 0; i < N; ++i) {
            T sk = atol + rtol * abs(y[i]);
            dnf += abs2(f0[i]) / (sk * sk);
            dny += abs2(y[i]) / (sk * sk);
        }
        T h = (dnf <= T(1e-10) || dny <= T(1e-10)) ? T(1e-6) : sqrt(dny / dnf) * T(0.01);
        Vec y1, f1;
        for (std::size_t i = 0; i < N; ++i) y1[i] = y[i] + dir * h * f0[i];
        f_(t + dir * h, y1, f1);
        ++stats_.evaluations;
        T der2 = 0;
        for (std::size_t i = 0; i < N; ++i) {
            T sk = atol + rtol * abs(y[i]);
            der2 += abs2(f1[i] - f0[i]) / (sk * sk);
        }
        der2 = sqrt(der2) / h;
        T der12 = max(abs(der2), sqrt(dnf));
        T h1 = der12 <= T(1e-15) ? max(T(1e-6), abs(h) * T(1e-3)) : pow(T(0.01) / der12, T(1) / T(8));
        return dir * min(T(100) * abs(h), h1);
    }

    void rescale(Vec& y, Vec& k1) {
        using std::abs;
        using std::log;
        T m = 0;
        for (auto& x : y) m = std::max(m, abs(x));
        if (!(m < T(1e150))) throw Error(ErrorCode::StepSizeUnderflow, "state norm exceeded overflow guard");
        if (m > T(1e100)) {
            T inv = T(1) / m;
            for (auto& x : y) x *= inv;
            for (auto& x : k1) x *= inv;
            log_scale_ += log(m);
        }
    }

    Rhs f_;
    IntegratorOptions opt_;
    const Dop853Tableau<T>& tab_;
    IntegratorStats stats_;
    T log_scale_ = 0;
    double err_sum_ = 0;
};

}  // namespace nhfloquet
