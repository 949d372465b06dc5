#ifndef FPL_THEORY_HPP
#define FPL_THEORY_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "fpl/common.hpp"
#include "fpl/rng.hpp"

namespace fpl::theory {

// One-hidden-layer tanh analysis in the angular-frequency convention
// fhat(k) = int f(x) e^{-ikx} dx. Frequencies here are rad/unit, unlike the
// cycles-per-unit grids of the spectral module.

// Fourier transform of a * tanh(w x + b) at k != 0:
//   (2 pi i a / |w|) exp(i b k / w) / (exp(-pi k/2w) - exp(pi k/2w)).
// Evaluated through e^{-|s|}/(1 - e^{-2|s|}), s = pi k/(2w), so tiny |w|
// cannot overflow.
Complex tanh_unit_ft(double a, double w, double b, double k);

struct UnitParams {
    Vec a, w, b;  // equal length m
};

// hhat(k) = sum_j tanh_unit_ft(a_j, w_j, b_j, k)
Complex network_ft(const UnitParams& net, double k);

struct FreqLossState {
    double k = 0.0;
    Complex deviation;   // D(k) = hhat - fhat
    double amplitude = 0.0;
    double phase = 0.0;
    double loss = 0.0;   // L(k) = |D|^2 / 2
    Complex target;
};

struct FreqGrads {
    FreqLossState state;
    Vec da, dw, db;  // dL(k)/da_j, dL(k)/dw_j, dL(k)/db_j
};

// Closed-form gradients of L(k). A(k) = 0 makes the phase undefined; the
// gradients are returned as zero there (continuous extension, L is at a
// minimum in D).
FreqGrads freq_loss_and_grads(const UnitParams& net, double k, Complex target);

// log10-free natural-log magnitudes of the same gradients, exact up to the
// log-domain arithmetic. The theorem events compare gradients whose shared
// factor e^{-|pi k/2 w_j|} underflows doubles near w_j = 0 (well inside the
// sampler's admissible |w_j| >= 1e-8), so dominance must be decided here.
struct LogGradMags {
    Vec la, lw, lb;  // -inf marks an exactly-zero gradient factor
};

LogGradMags log_grad_magnitudes(const UnitParams& net, double k, Complex target);

struct BallSampler {
    std::size_t dimension = 0;
    double radius = 0.0;
    std::uint64_t seed = 0;
};

// Uniform draw from the m-ball: isotropic direction times radius U^{1/m}.
// Redraws while any |w_j| < 1e-8 (closed forms are singular at w_j = 0).
class BallStream {
  public:
    explicit BallStream(const BallSampler& spec, std::uint64_t substream = 0);
    Vec next();

  private:
    std::size_t m_;
    double radius_;
    Rng rng_;
};

struct WilsonInterval {
    double ratio = 0.0;
    double lo = 0.0;
    double hi = 0.0;
};

WilsonInterval wilson95(std::size_t successes, std::size_t trials);

struct TheoremConfig {
    std::size_t m = 4;
    double k1 = 1.0;
    double k2 = 3.0;
    Complex f1{1.0, 0.0};
    Complex f2{1.0, 0.0};
    double a_const = 1.0;   // fixed a_j
    double b_const = 0.5;   // fixed b_j
    double delta = 0.25;
    std::size_t samples = 100000;
    std::uint64_t seed = 0;
};

struct TheoremEstimates {
    WilsonInterval thm1;  // measure of { |dL(k1)/dθ| > |dL(k2)/dθ| for all θ }
    WilsonInterval thm2;  // measure of S = { dL(k1)/dt <= 0, dL(k1)/dt <= dL(k2)/dt }
    std::size_t implication_violations = 0;  // thm1 event without thm2 event
    std::size_t dissipation_violations = 0;  // d(L1+L2)/dt > 0
};

// Monte-Carlo over W in B_delta with a_j, b_j fixed; both theorem events are
// counted in one pass. Worker substreams merge by count, so the estimate is
// independent of FPL_THREADS.
TheoremEstimates theorem_ratios(const TheoremConfig& config);

struct IdealModel {
    Vec frequencies;  // (2k-1) pattern
    Vec amplitudes;   // c_k
    Vec rates;        // a_k
    double c0 = 0.0;
    double a0 = 1.0;
};

// h(x,t) = c0 (1 - e^{-a0 t}) + sum_k (1 - e^{-a_k t}) c_k sin((2k-1) x)
Vec ideal_eval(const IdealModel& model, const Vec& xs, double t);

// target limit h(x, infinity)
Vec ideal_target(const IdealModel& model, const Vec& xs);

// amplitude rows from the synthetic filtering study; rates [200,150,5,1]
// assigned low-to-high frequency for F-ordering, reversed for anti-F
IdealModel ideal_preset(const std::string& amplitudes_row, bool f_principle);

struct TheoryCsvRow {
    double delta;
    std::size_t samples;
    TheoremEstimates est;
};

// CSV: delta,samples,ratio_thm1,ci1_lo,ci1_hi,ratio_thm2,ci2_lo,ci2_hi,
//      implication_violations,dissipation_violations
void write_theory_csv(const std::vector<TheoryCsvRow>& rows, const std::string& path);

}  // namespace fpl::theory

#endif
