#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <complex>

#include "doctest.h"
#include "fpl/rng.hpp"
#include "fpl/spectral.hpp"
#include "fpl/theory.hpp"

using namespace fpl;
using namespace fpl::theory;

namespace {
constexpr double kPi = 3.141592653589793238462643383279;

// quadrature oracle: int a tanh(wx+b) e^{-ikx} dx by Simpson on [-X, X]
// with Abel-regularized analytic tails. Test-only; independent of the
// closed forms it checks.
Complex quad_unit_ft(double a, double w, double b, double k) {
    const double aw = std::abs(w);
    const double sgn = w > 0 ? 1.0 : -1.0;
    const double X = std::max(18.0 / aw + std::abs(b) / aw, 6.0);
    std::size_t npts = static_cast<std::size_t>(std::max(16000.0, 160.0 * k * X / kPi));
    if (npts % 2) ++npts;
    const double h = 2.0 * X / static_cast<double>(npts);
    Complex acc(0, 0);
    for (std::size_t i = 0; i <= npts; ++i) {
        const double x = -X + h * static_cast<double>(i);
        const double wgt = (i == 0 || i == npts) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        acc += wgt * std::tanh(w * x + b) * std::exp(Complex(0, -k * x));
    }
    acc *= h / 3.0;
    const Complex ik(0, k);
    const Complex tail_p = sgn * (std::exp(-ik * X) / ik -
                                  2.0 * std::exp(-2.0 * sgn * b) *
                                      std::exp(-(2.0 * aw + ik) * X) / (2.0 * aw + ik));
    const Complex tail_m = sgn * (std::exp(ik * X) / ik +
                                  2.0 * std::exp(2.0 * sgn * b) * std::exp(-2.0 * aw * X) *
                                      std::exp(ik * X) / (2.0 * aw - ik));
    return a * (acc + tail_p + tail_m);
}

UnitParams random_net(Rng& rng, std::size_t m, double wlo, double whi) {
    UnitParams net;
    for (std::size_t j = 0; j < m; ++j) {
        net.a.push_back(rng.uniform(0.5, 1.5));
        net.b.push_back(rng.uniform(0.2, 0.8));
        net.w.push_back(rng.uniform(wlo, whi) * (rng.uniform() < 0.5 ? -1.0 : 1.0));
    }
    return net;
}

}  // namespace

TEST_CASE("tanh_unit_ft reduces to -i pi / sinh(pi k / 2)") {
    for (double k : {0.3, 0.7, 1.3, 3.0, -2.1}) {
        const Complex got = tanh_unit_ft(1.0, 1.0, 0.0, k);
        const Complex want = Complex(0, -kPi) / std::sinh(kPi * k / 2.0);
        CHECK(std::abs(got - want) <= 1e-12 * std::abs(want));
    }
}

TEST_CASE("tanh_unit_ft conjugate symmetry and errors") {
    const Complex plus = tanh_unit_ft(0.8, 1.3, -0.4, 1.7);
    const Complex minus = tanh_unit_ft(0.8, 1.3, -0.4, -1.7);
    CHECK(std::abs(std::conj(plus) - minus) < 1e-12);
    CHECK_THROWS_AS(tanh_unit_ft(1.0, 0.0, 0.0, 1.0), Error);
    CHECK_THROWS_AS(tanh_unit_ft(1.0, 1.0, 0.0, 0.0), Error);
}

TEST_CASE("tanh_unit_ft survives tiny w without overflow") {
    const Complex v = tanh_unit_ft(1.0, 1e-7, 0.2, 1.0);
    CHECK(std::isfinite(v.real()));
    CHECK(std::isfinite(v.imag()));
    CHECK(std::abs(v) < 1e-300 + 1.0);  // astronomically suppressed, never inf
}

TEST_CASE("tanh_unit_ft matches the quadrature oracle") {
    // a fixed spot-check value
    const Complex closed = tanh_unit_ft(0.5, 2.0, 0.3, 1.7);
    const Complex quad = quad_unit_ft(0.5, 2.0, 0.3, 1.7);
    CHECK(std::abs(closed - quad) / std::abs(closed) < 1e-3);
}

TEST_CASE("network_ft: reduction, linearity, quadrature agreement") {
    Rng rng(7);
    UnitParams one;
    one.a = {0.6};
    one.w = {1.2};
    one.b = {-0.3};
    CHECK(std::abs(network_ft(one, 2.1) - tanh_unit_ft(0.6, 1.2, -0.3, 2.1)) < 1e-15);

    UnitParams net = random_net(rng, 3, 0.2, 2.0);
    const Complex base = network_ft(net, 1.1);
    UnitParams doubled = net;
    for (double& a : doubled.a) a *= 2.0;
    CHECK(std::abs(network_ft(doubled, 1.1) - 2.0 * base) < 1e-12 * std::abs(base));

    // 20 random draws vs quadrature, rel 1e-3
    for (int t = 0; t < 20; ++t) {
        UnitParams n3 = random_net(rng, 3, 0.2, 2.0);
        const double k = rng.uniform(0.5, 5.0);
        Complex cf(0, 0), qd(0, 0);
        for (std::size_t j = 0; j < 3; ++j) {
            cf += tanh_unit_ft(n3.a[j], n3.w[j], n3.b[j], k);
            qd += quad_unit_ft(n3.a[j], n3.w[j], n3.b[j], k);
        }
        CHECK(std::abs(cf - qd) / std::abs(cf) < 1e-3);
    }
}

TEST_CASE("freq_loss_and_grads: zero deviation means zero gradients") {
    UnitParams net;
    net.a = {0.5};
    net.w = {0.9};
    net.b = {0.1};
    const Complex target = network_ft(net, 1.3);
    auto g = freq_loss_and_grads(net, 1.3, target);
    CHECK(g.state.loss == doctest::Approx(0.0).epsilon(1e-28));
    CHECK(g.da[0] == 0.0);
    CHECK(g.dw[0] == 0.0);
    CHECK(g.db[0] == 0.0);
}

TEST_CASE("closed-form gradients match 4th-order finite differences of L(k)") {
    Rng rng(1);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        UnitParams net = random_net(rng, 4, 0.2, 1.0);
        const double k = rng.uniform(0.5, 3.0);
        const Complex target =
            rng.uniform(0.5, 1.5) * std::exp(Complex(0, rng.uniform(0.0, 2 * kPi)));
        auto g = freq_loss_and_grads(net, k, target);
        double gmax = 0.0;
        for (std::size_t j = 0; j < 4; ++j)
            gmax = std::max({gmax, std::abs(g.da[j]), std::abs(g.dw[j]), std::abs(g.db[j])});

        auto loss_of = [&]() {
            const Complex d = network_ft(net, k) - target;
            return 0.5 * std::norm(d);
        };
        const double eps = 1e-5;
        auto fd4 = [&](double* slot) {
            const double old = *slot;
            *slot = old + eps;
            const double lp = loss_of();
            *slot = old - eps;
            const double lm = loss_of();
            *slot = old + 2 * eps;
            const double lp2 = loss_of();
            *slot = old - 2 * eps;
            const double lm2 = loss_of();
            *slot = old;
            return (8.0 * (lp - lm) - (lp2 - lm2)) / (12.0 * eps);
        };
        for (std::size_t j = 0; j < 4; ++j) {
            const double checks[3][2] = {{fd4(&net.a[j]), g.da[j]},
                                         {fd4(&net.w[j]), g.dw[j]},
                                         {fd4(&net.b[j]), g.db[j]}};
            for (const auto& c : checks) {
                if (std::abs(c[0]) + std::abs(c[1]) < 1e-5 * (1.0 + gmax)) continue;
                const double rel = std::abs(c[0] - c[1]) / (std::abs(c[0]) + std::abs(c[1]));
                worst = std::max(worst, rel);
            }
        }
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("gradient dominance factor scales like exp(-|pi k/2w|)") {
    // |dL/da_j| scaled by e^{+|pi k/2 w_j|} stays within a factor 3 across
    // k in {1,2,4} when A(k) is pinned to the same value
    UnitParams net;
    net.a = {1.0};
    net.w = {0.4};
    net.b = {0.5};
    Vec scaled;
    for (double k : {1.0, 2.0, 4.0}) {
        // choose the target so that |D| = 1 exactly: target = hhat - e^{i0}
        const Complex target = network_ft(net, k) - Complex(1.0, 0.0);
        auto g = freq_loss_and_grads(net, k, target);
        CHECK(g.state.amplitude == doctest::Approx(1.0).epsilon(1e-12));
        scaled.push_back(std::abs(g.da[0]) * std::exp(std::abs(kPi * k / (2 * net.w[0]))));
    }
    for (double v : scaled) {
        CHECK(v < 3.0 * scaled[0]);
        CHECK(v > scaled[0] / 3.0);
    }
}

TEST_CASE("W -> 0 limit: |hhat| -> 0 and A -> |fhat|") {
    UnitParams net;
    net.a = {1.0, 1.0};
    net.b = {0.5, 0.5};
    const Complex target(0.7, -0.2);
    double prev_h = 1e300;
    for (double w : {0.5, 0.25, 0.1, 0.05, 0.02}) {
        net.w = {w, -w};
        const double hmag = std::abs(network_ft(net, 1.0));
        CHECK(hmag < prev_h);
        prev_h = hmag;
    }
    net.w = {0.02, -0.02};
    auto g = freq_loss_and_grads(net, 1.0, target);
    CHECK(g.state.amplitude == doctest::Approx(std::abs(target)).epsilon(1e-8));
}

TEST_CASE("ball sampler: radius bound, symmetry, second moment") {
    BallSampler spec{6, 0.5, 123};
    BallStream stream(spec);
    const std::size_t N = 100000;
    Vec mean(6, 0.0);
    double m2 = 0.0;
    for (std::size_t t = 0; t < N; ++t) {
        Vec w = stream.next();
        double n2 = 0.0;
        for (std::size_t j = 0; j < 6; ++j) {
            mean[j] += w[j];
            n2 += w[j] * w[j];
        }
        CHECK(n2 <= 0.25 * (1 + 1e-12));
        for (double v : w) CHECK(std::abs(v) >= 1e-8);
        m2 += n2;
    }
    m2 /= N;
    // E||W||^2 = r^2 m/(m+2); MC within 2%
    const double expect = 0.25 * 6.0 / 8.0;
    CHECK(m2 == doctest::Approx(expect).epsilon(0.02));
    // mean ~ 0 within 3 sigma of the per-coordinate MC error
    const double sigma = 0.5 / std::sqrt(static_cast<double>(N));
    for (double v : mean) CHECK(std::abs(v / N) < 3.5 * sigma);
}

TEST_CASE("wilson interval sanity") {
    auto w = wilson95(99, 100);
    CHECK(w.ratio == doctest::Approx(0.99));
    CHECK(w.lo < 0.99);
    CHECK(w.hi > 0.99);
    CHECK(w.hi <= 1.0);
    auto all = wilson95(1000, 1000);
    CHECK(all.lo > 0.995);
}

TEST_CASE("theorem ratios: small sample run is reproducible and consistent") {
    TheoremConfig cfg;
    cfg.samples = 4000;
    cfg.delta = 0.25;
    cfg.seed = 42;
    auto a = theorem_ratios(cfg);
    auto b = theorem_ratios(cfg);
    CHECK(a.thm1.ratio == b.thm1.ratio);
    CHECK(a.thm2.ratio == b.thm2.ratio);
    CHECK(a.thm1.ratio >= 0.0);
    CHECK(a.thm1.ratio <= 1.0);
    CHECK(a.thm2.ratio >= a.thm1.ratio);  // theorem-1 event implies the theorem-2 event
    CHECK(a.implication_violations == 0);
    CHECK(a.dissipation_violations == 0);
    CHECK(a.thm1.ratio > 0.95);  // delta = 0.25 sits deep in the dominance regime
}

TEST_CASE("worker count does not change the recorded ratios") {
    TheoremConfig cfg;
    cfg.samples = 3000;
    cfg.delta = 0.5;
    cfg.seed = 9;
    auto serial = theorem_ratios(cfg);
    setenv("FPL_THREADS", "4", 1);
    auto parallel = theorem_ratios(cfg);
    unsetenv("FPL_THREADS");
    CHECK(serial.thm1.ratio == parallel.thm1.ratio);
    CHECK(serial.thm2.ratio == parallel.thm2.ratio);
}

TEST_CASE("ideal model: limits and spectral coefficients") {
    IdealModel m = ideal_preset("equal", true);
    Vec xs(100);
    for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = -6.28 + 12.56 * i / 99.0;

    Vec h0 = ideal_eval(m, xs, 0.0);
    for (double v : h0) CHECK(v == 0.0);

    Vec hinf = ideal_eval(m, xs, 1e9);
    Vec target = ideal_target(m, xs);
    for (std::size_t i = 0; i < xs.size(); ++i) CHECK(hinf[i] == doctest::Approx(target[i]));

    // spectral coefficient at frequency (2k-1) equals c_k (1 - e^{-a_k t});
    // sample one period of the slowest sine so the bins are orthogonal
    const double t = 0.31;
    const std::size_t n = 256;
    Vec period(n);
    Vec hx(n);
    IdealModel probe = m;
    for (std::size_t i = 0; i < n; ++i) period[i] = 2.0 * kPi * i / n;
    hx = ideal_eval(probe, period, t);
    CVec dft = spectral::dft_1d(hx);
    for (std::size_t k = 0; k < 4; ++k) {
        const double freq = probe.frequencies[k];
        const double expect = probe.amplitudes[k] * (1 - std::exp(-probe.rates[k] * t)) / 2.0;
        // sine splits into conjugate bins of magnitude c/2
        CHECK(std::abs(dft[static_cast<std::size_t>(freq)]) ==
              doctest::Approx(expect).epsilon(1e-10));
    }
}

TEST_CASE("ideal F-ordering trace turns: distance falls then rises") {
    // closed-form outputs fed through the filtering distance machinery
    IdealModel m = ideal_preset("equal", true);
    Vec xs(100);
    for (std::size_t i = 0; i < 100; ++i) xs[i] = -6.28 + 12.56 * i / 99.0;
    Mat inputs(100, 1);
    for (std::size_t i = 0; i < 100; ++i) inputs.at(i, 0) = xs[i];
    Mat ym(100, 1);
    Vec y = ideal_target(m, xs);
    for (std::size_t i = 0; i < 100; ++i) ym.at(i, 0) = y[i];
    Mat y_low = spectral::filter_low(inputs, ym, 0.5);

    std::vector<std::size_t> epochs;
    std::vector<Mat> outputs;
    for (std::size_t step = 0; step <= 600; ++step) {
        Vec h = ideal_eval(m, xs, 1e-3 * static_cast<double>(step * 10));
        Mat hm(100, 1);
        for (std::size_t i = 0; i < 100; ++i) hm.at(i, 0) = h[i];
        epochs.push_back(step);
        outputs.push_back(std::move(hm));
    }
    auto tr = spectral::distance_and_turning_epoch(epochs, outputs, y_low);
    CHECK(tr.turning_epoch > 0);
    CHECK(tr.turning_epoch < 600);
    const double at_turn = tr.dist[tr.turning_epoch];
    CHECK(at_turn < tr.dist.front());
    CHECK(tr.dist.back() > at_turn);
}

TEST_CASE("ideal presets: rate ordering flips between F and anti-F") {
    auto f = ideal_preset("decaying", true);
    auto anti = ideal_preset("decaying", false);
    CHECK(f.rates == Vec{200.0, 150.0, 5.0, 1.0});
    CHECK(anti.rates == Vec{1.0, 5.0, 150.0, 200.0});
    CHECK_THROWS_AS(ideal_preset("bogus", true), Error);
}
