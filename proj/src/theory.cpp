#include "fpl/theory.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <mutex>

namespace fpl::theory {

namespace {
constexpr double kPi = 3.141592653589793238462643383279;
constexpr double kInf = std::numeric_limits<double>::infinity();

// 1/(e^{-s} - e^{s}) = -sgn(s) e^{-|s|} / (1 - e^{-2|s|})
inline double inv_neg_twosinh(double s) {
    const double mag = std::exp(-std::abs(s)) / (1.0 - std::exp(-2.0 * std::abs(s)));
    return s > 0.0 ? -mag : mag;
}
}  // namespace

Complex tanh_unit_ft(double a, double w, double b, double k) {
    require(w != 0.0, "tanh_unit_ft: w must be nonzero (unit constant in x)");
    require(k != 0.0, "tanh_unit_ft: k = 0 is distributional, excluded from grids");
    const double s = kPi * k / (2.0 * w);
    const Complex phase = std::exp(Complex(0.0, b * k / w));
    return Complex(0.0, 2.0 * kPi * a / std::abs(w)) * phase * inv_neg_twosinh(s);
}

Complex network_ft(const UnitParams& net, double k) {
    require(net.a.size() == net.w.size() && net.a.size() == net.b.size(),
            "network_ft: parameter arrays must share a length");
    Complex acc(0.0, 0.0);
    for (std::size_t j = 0; j < net.a.size(); ++j)
        acc += tanh_unit_ft(net.a[j], net.w[j], net.b[j], k);
    return acc;
}

FreqGrads freq_loss_and_grads(const UnitParams& net, double k, Complex target) {
    const std::size_t m = net.a.size();
    FreqGrads g;
    g.state.k = k;
    g.state.target = target;
    g.state.deviation = network_ft(net, k) - target;
    g.state.amplitude = std::abs(g.state.deviation);
    g.state.phase = std::arg(g.state.deviation);
    g.state.loss = 0.5 * g.state.amplitude * g.state.amplitude;
    g.da.assign(m, 0.0);
    g.dw.assign(m, 0.0);
    g.db.assign(m, 0.0);
    if (g.state.amplitude == 0.0) return g;  // phase undefined; L at its minimum in D

    const double A = g.state.amplitude;
    const double phi = g.state.phase;
    for (std::size_t j = 0; j < m; ++j) {
        const double a = net.a[j], w = net.w[j], b = net.b[j];
        const double s = kPi * k / (2.0 * w);
        // E0 = sgn(w) A / (e^{s} - e^{-s}), stabilized; sgn(w) sgn(s) = sgn(k)
        const double E0 = (k > 0.0 ? 1.0 : -1.0) * A * std::exp(-std::abs(s)) /
                          (1.0 - std::exp(-2.0 * std::abs(s)));
        const double E1 = (s > 0.0 ? 1.0 : -1.0) * (1.0 + std::exp(-2.0 * std::abs(s))) /
                          (1.0 - std::exp(-2.0 * std::abs(s)));
        const double psi = b * k / w - phi;
        const double sp = std::sin(psi), cp = std::cos(psi);
        g.da[j] = (2.0 * kPi / w) * sp * E0;
        g.dw[j] = (sp * (kPi * kPi * a * k / (w * w * w) * E1 - 2.0 * kPi * a / (w * w)) -
                   2.0 * kPi * a * b * k / (w * w * w) * cp) *
                  E0;
        g.db[j] = 2.0 * kPi * a * k / (w * w) * cp * E0;
    }
    return g;
}

LogGradMags log_grad_magnitudes(const UnitParams& net, double k, Complex target) {
    const std::size_t m = net.a.size();
    LogGradMags out;
    out.la.assign(m, -kInf);
    out.lw.assign(m, -kInf);
    out.lb.assign(m, -kInf);
    const Complex D = network_ft(net, k) - target;
    const double A = std::abs(D);
    if (A == 0.0) return out;
    const double phi = std::arg(D);
    const double logA = std::log(A);
    for (std::size_t j = 0; j < m; ++j) {
        const double a = net.a[j], w = net.w[j], b = net.b[j];
        const double s = kPi * k / (2.0 * w);
        const double logE0 = logA - std::abs(s) - std::log1p(-std::exp(-2.0 * std::abs(s)));
        const double E1 = (s > 0.0 ? 1.0 : -1.0) * (1.0 + std::exp(-2.0 * std::abs(s))) /
                          (1.0 - std::exp(-2.0 * std::abs(s)));
        const double psi = b * k / w - phi;
        const double fa = 2.0 * kPi / std::abs(w) * std::abs(std::sin(psi));
        const double fw =
            std::abs(std::sin(psi) * (kPi * kPi * a * k / (w * w * w) * E1 - 2.0 * kPi * a / (w * w)) -
                     2.0 * kPi * a * b * k / (w * w * w) * std::cos(psi));
        const double fb = std::abs(2.0 * kPi * a * k / (w * w) * std::cos(psi));
        out.la[j] = fa > 0.0 ? std::log(fa) + logE0 : -kInf;
        out.lw[j] = fw > 0.0 ? std::log(fw) + logE0 : -kInf;
        out.lb[j] = fb > 0.0 ? std::log(fb) + logE0 : -kInf;
    }
    return out;
}

BallStream::BallStream(const BallSampler& spec, std::uint64_t substream)
    : m_(spec.dimension), radius_(spec.radius), rng_(Rng::substream(spec.seed, substream)) {
    require(m_ >= 1, "ball sampler: dimension must be >= 1");
    require(radius_ > 0.0, "ball sampler: radius must be positive");
}

Vec BallStream::next() {
    Vec w(m_);
    for (;;) {
        double norm2 = 0.0;
        for (std::size_t j = 0; j < m_; ++j) {
            w[j] = rng_.normal();
            norm2 += w[j] * w[j];
        }
        if (norm2 == 0.0) continue;
        const double r = radius_ * std::pow(rng_.uniform(), 1.0 / static_cast<double>(m_));
        const double scale = r / std::sqrt(norm2);
        bool ok = true;
        for (std::size_t j = 0; j < m_; ++j) {
            w[j] *= scale;
            if (std::abs(w[j]) < 1e-8) ok = false;
        }
        if (ok) return w;
    }
}

WilsonInterval wilson95(std::size_t successes, std::size_t trials) {
    require(trials > 0, "wilson95: no trials");
    const double z = 1.959963984540054;
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double den = 1.0 + z * z / n;
    const double center = (p + z * z / (2.0 * n)) / den;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / den;
    return WilsonInterval{p, std::max(0.0, center - half), std::min(1.0, center + half)};
}

TheoremEstimates theorem_ratios(const TheoremConfig& cfg) {
    require(std::abs(cfg.k2) > std::abs(cfg.k1) && std::abs(cfg.k1) > 0.0,
            "theorem_ratios: need |k2| > |k1| > 0");
    require(std::abs(cfg.f1) > 0.0 && std::abs(cfg.f2) > 0.0,
            "theorem_ratios: target amplitudes must be nonzero");
    require(cfg.samples > 0, "theorem_ratios: no samples");

    // fixed logical substream count: the sample set, and therefore every
    // recorded ratio, is identical for any FPL_THREADS
    const std::size_t streams = std::min<std::size_t>(16, cfg.samples);
    std::vector<std::size_t> counts1(streams, 0), counts2(streams, 0), impl(streams, 0),
        diss(streams, 0);

    UnitParams base;
    base.a.assign(cfg.m, cfg.a_const);
    base.w.assign(cfg.m, 0.0);
    base.b.assign(cfg.m, cfg.b_const);

    const std::size_t per = (cfg.samples + streams - 1) / streams;
    parallel_chunks(streams, [&](std::size_t wlo, std::size_t whi) {
        for (std::size_t wi = wlo; wi < whi; ++wi) {
            const std::size_t lo = wi * per;
            const std::size_t hi = std::min(cfg.samples, lo + per);
            if (lo >= hi) continue;
            BallStream stream(BallSampler{cfg.m, cfg.delta, cfg.seed}, wi);
            UnitParams net = base;
            for (std::size_t t = lo; t < hi; ++t) {
                net.w = stream.next();
                const LogGradMags lg1 = log_grad_magnitudes(net, cfg.k1, cfg.f1);
                const LogGradMags lg2 = log_grad_magnitudes(net, cfg.k2, cfg.f2);
                bool ev1 = true;
                for (std::size_t j = 0; j < cfg.m && ev1; ++j) {
                    ev1 = lg1.la[j] > lg2.la[j] && lg1.lw[j] > lg2.lw[j] && lg1.lb[j] > lg2.lb[j];
                }
                const FreqGrads g1 = freq_loss_and_grads(net, cfg.k1, cfg.f1);
                const FreqGrads g2 = freq_loss_and_grads(net, cfg.k2, cfg.f2);
                double s11 = 0.0, s22 = 0.0, s12 = 0.0, sq = 0.0;
                for (std::size_t j = 0; j < cfg.m; ++j) {
                    const double u[3] = {g1.da[j], g1.dw[j], g1.db[j]};
                    const double v[3] = {g2.da[j], g2.dw[j], g2.db[j]};
                    for (int t3 = 0; t3 < 3; ++t3) {
                        s11 += u[t3] * u[t3];
                        s22 += v[t3] * v[t3];
                        s12 += u[t3] * v[t3];
                        const double sum = u[t3] + v[t3];
                        sq += sum * sum;
                    }
                }
                const double dL1 = -s11 - s12;
                const double dL2 = -s22 - s12;
                const bool ev2 = dL1 <= 0.0 && dL1 <= dL2;
                if (ev1) ++counts1[wi];
                if (ev2) ++counts2[wi];
                if (ev1 && !ev2) ++impl[wi];
                if (-sq > 0.0) ++diss[wi];
            }
        }
    });

    std::size_t t1 = 0, t2 = 0, iv = 0, dv = 0;
    for (std::size_t w = 0; w < streams; ++w) {
        t1 += counts1[w];
        t2 += counts2[w];
        iv += impl[w];
        dv += diss[w];
    }
    TheoremEstimates est;
    est.thm1 = wilson95(t1, cfg.samples);
    est.thm2 = wilson95(t2, cfg.samples);
    est.implication_violations = iv;
    est.dissipation_violations = dv;
    return est;
}

Vec ideal_eval(const IdealModel& model, const Vec& xs, double t) {
    require(model.frequencies.size() == model.amplitudes.size() &&
                model.frequencies.size() == model.rates.size(),
            "ideal model: list lengths differ");
    for (double r : model.rates) require(r > 0.0, "ideal model: rates must be positive");
    Vec out(xs.size(), model.c0 * (1.0 - std::exp(-model.a0 * t)));
    for (std::size_t k = 0; k < model.frequencies.size(); ++k) {
        const double gain = (1.0 - std::exp(-model.rates[k] * t)) * model.amplitudes[k];
        for (std::size_t i = 0; i < xs.size(); ++i)
            out[i] += gain * std::sin(model.frequencies[k] * xs[i]);
    }
    return out;
}

Vec ideal_target(const IdealModel& model, const Vec& xs) {
    Vec out(xs.size(), model.c0);
    for (std::size_t k = 0; k < model.frequencies.size(); ++k)
        for (std::size_t i = 0; i < xs.size(); ++i)
            out[i] += model.amplitudes[k] * std::sin(model.frequencies[k] * xs[i]);
    return out;
}

IdealModel ideal_preset(const std::string& amplitudes_row, bool f_principle) {
    IdealModel m;
    m.frequencies = {1.0, 3.0, 5.0, 7.0};
    if (amplitudes_row == "decaying")
        m.amplitudes = {1.0, 0.5, 0.2, 0.125};
    else if (amplitudes_row == "equal")
        m.amplitudes = {1.0, 1.0, 1.0, 1.0};
    else if (amplitudes_row == "growing")
        m.amplitudes = {1.0, 2.0, 5.0, 8.0};
    else
        fail("unknown ideal amplitude row: " + amplitudes_row);
    m.rates = {200.0, 150.0, 5.0, 1.0};
    if (!f_principle) std::reverse(m.rates.begin(), m.rates.end());
    return m;
}

void write_theory_csv(const std::vector<TheoryCsvRow>& rows, const std::string& path) {
    std::string out =
        "delta,samples,ratio_thm1,ci_lo,ci_hi,ratio_thm2,ci2_lo,ci2_hi,"
        "implication_violations,dissipation_violations\n";
    char buf[220];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.17g,%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%zu,%zu\n",
                      r.delta, r.samples, r.est.thm1.ratio, r.est.thm1.lo, r.est.thm1.hi,
                      r.est.thm2.ratio, r.est.thm2.lo, r.est.thm2.hi, r.est.implication_violations,
                      r.est.dissipation_violations);
        out += buf;
    }
    std::ofstream f(path, std::ios::binary);
    require(f.good(), "write_theory_csv: cannot open " + path);
    f << out;
}

}  // namespace fpl::theory
