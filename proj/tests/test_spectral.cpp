#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <complex>

#include "doctest.h"
#include "fpl/rng.hpp"
#include "fpl/spectral.hpp"

using namespace fpl;
using namespace fpl::spectral;

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

TEST_CASE("dft_1d: constant signal concentrates at k=0") {
    Vec y(12, 3.25);
    CVec c = dft_1d(y);
    CHECK(std::abs(c[0] - Complex(3.25, 0)) < 1e-12);
    for (std::size_t k = 1; k < c.size(); ++k) CHECK(std::abs(c[k]) < 1e-12);
}

TEST_CASE("dft_1d: cosine splits into half-amplitude pair") {
    const std::size_t n = 8;
    Vec y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = std::cos(kTwoPi * i / n);
    CVec c = dft_1d(y);
    CHECK(std::abs(c[1]) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::abs(c[7]) == doctest::Approx(0.5).epsilon(1e-12));
    for (std::size_t k : {0u, 2u, 3u, 4u, 5u, 6u}) CHECK(std::abs(c[k]) < 1e-12);
}

TEST_CASE("dft_1d: Parseval identity") {
    Rng rng(9);
    Vec y(33);
    for (double& v : y) v = rng.normal();
    CVec c = dft_1d(y);
    double time_side = 0.0, freq_side = 0.0;
    for (double v : y) time_side += v * v;
    time_side /= static_cast<double>(y.size());
    for (const Complex& v : c) freq_side += std::norm(v);
    CHECK(time_side == doctest::Approx(freq_side).epsilon(1e-10));
}

TEST_CASE("dft_1d rejects empty input") { CHECK_THROWS_AS(dft_1d({}), Error); }

TEST_CASE("principal_direction on axis-aligned points") {
    Mat pts(10, 2);
    for (int t = 1; t <= 10; ++t) pts.at(t - 1, 0) = t;
    auto p = principal_direction(pts);
    CHECK(p.direction[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(p.direction[1]) < 1e-9);
}

TEST_CASE("principal_direction on the diagonal pair") {
    Mat pts(2, 2);
    pts.at(0, 0) = 1;
    pts.at(0, 1) = 1;
    pts.at(1, 0) = -1;
    pts.at(1, 1) = -1;
    auto p = principal_direction(pts);
    const double s = 1.0 / std::sqrt(2.0);
    CHECK(p.direction[0] == doctest::Approx(s).epsilon(1e-12));
    CHECK(p.direction[1] == doctest::Approx(s).epsilon(1e-12));
}

TEST_CASE("principal_direction matches dense eigensolver oracle") {
    // oracle: Jacobi eigenvalue sweeps on the 5x5 covariance
    Rng rng(21);
    Mat pts(100, 5);
    for (auto& v : pts.data) v = rng.normal();
    // stretch a known direction so the top eigenpair is unambiguous
    for (std::size_t s = 0; s < pts.rows; ++s) {
        const double t = rng.normal() * 3.0;
        for (std::size_t j = 0; j < 5; ++j) pts.at(s, j) += t * (j + 1) / std::sqrt(55.0);
    }
    auto p = principal_direction(pts);

    // dense symmetric eigensolver (cyclic Jacobi rotations)
    const std::size_t d = 5, n = pts.rows;
    Vec mean(d, 0.0);
    for (std::size_t s = 0; s < n; ++s)
        for (std::size_t j = 0; j < d; ++j) mean[j] += pts.at(s, j);
    for (double& m : mean) m /= n;
    double a[5][5] = {};
    for (std::size_t s = 0; s < n; ++s)
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j)
                a[i][j] += (pts.at(s, i) - mean[i]) * (pts.at(s, j) - mean[j]) / (n - 1);
    double v[5][5] = {};
    for (std::size_t i = 0; i < d; ++i) v[i][i] = 1.0;
    for (int sweep = 0; sweep < 100; ++sweep) {
        for (std::size_t p2 = 0; p2 < d; ++p2)
            for (std::size_t q = p2 + 1; q < d; ++q) {
                if (std::abs(a[p2][q]) < 1e-15) continue;
                const double theta = 0.5 * std::atan2(2 * a[p2][q], a[q][q] - a[p2][p2]);
                const double c = std::cos(theta), s2 = std::sin(theta);
                for (std::size_t i = 0; i < d; ++i) {
                    const double ap = a[i][p2], aq = a[i][q];
                    a[i][p2] = c * ap - s2 * aq;
                    a[i][q] = s2 * ap + c * aq;
                }
                for (std::size_t i = 0; i < d; ++i) {
                    const double ap = a[p2][i], aq = a[q][i];
                    a[p2][i] = c * ap - s2 * aq;
                    a[q][i] = s2 * ap + c * aq;
                }
                for (std::size_t i = 0; i < d; ++i) {
                    const double vp = v[i][p2], vq = v[i][q];
                    v[i][p2] = c * vp - s2 * vq;
                    v[i][q] = s2 * vp + c * vq;
                }
            }
    }
    std::size_t top = 0;
    for (std::size_t i = 1; i < d; ++i)
        if (a[i][i] > a[top][top]) top = i;
    double dot = 0.0;
    for (std::size_t i = 0; i < d; ++i) dot += p.direction[i] * v[i][top];
    CHECK(std::abs(std::abs(dot) - 1.0) < 1e-6);  // angle below 1e-6 rad up to sign
}

TEST_CASE("principal_direction rejects degenerate input") {
    Mat pts(3, 2, 1.0);
    CHECK_THROWS_AS(principal_direction(pts), Error);
    CHECK_THROWS_AS(principal_direction(Mat(1, 2)), Error);
}

TEST_CASE("nonuniform_ft: single sample and constants") {
    Mat x(1, 3);
    Vec y{1.0};
    Vec p{1.0, 0.0, 0.0};
    Vec grid{0.0, 0.7, 2.3};
    CVec c = nonuniform_ft(x, y, p, grid);
    for (const auto& v : c) CHECK(std::abs(v - Complex(1, 0)) < 1e-14);

    Mat x2(5, 1);
    for (int i = 0; i < 5; ++i) x2.at(i, 0) = 0.2 * i;
    Vec y2(5, 4.5);
    CVec c2 = nonuniform_ft(x2, y2, Vec{1.0}, Vec{0.0});
    CHECK(std::abs(c2[0] - Complex(4.5, 0)) < 1e-13);
}

TEST_CASE("nonuniform_ft: sine on the unit interval") {
    const std::size_t n = 100;
    Mat x(n, 1);
    Vec y(n);
    for (std::size_t i = 0; i < n; ++i) {
        x.at(i, 0) = static_cast<double>(i) / n;
        y[i] = std::sin(kTwoPi * x.at(i, 0));
    }
    CVec c = nonuniform_ft(x, y, Vec{1.0}, Vec{1.0});
    CHECK(std::abs(c[0]) == doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("nonuniform_ft agrees with dft_1d on the uniform grid") {
    const std::size_t n = 24;
    Rng rng(4);
    Mat x(n, 1);
    Vec y(n);
    for (std::size_t i = 0; i < n; ++i) {
        x.at(i, 0) = static_cast<double>(i) / n;
        y[i] = rng.normal();
    }
    CVec ref = dft_1d(y);
    Vec grid;
    for (std::size_t k = 0; k < n; ++k) grid.push_back(static_cast<double>(k));
    CVec c = nonuniform_ft(x, y, Vec{1.0}, grid);
    for (std::size_t k = 0; k < n; ++k) CHECK(std::abs(c[k] - ref[k]) < 1e-12);
}

TEST_CASE("delta_F basics and the scaling invariance") {
    CHECK(delta_F(Complex(1, 0), Complex(1, 0)) == doctest::Approx(0.0));
    CHECK(delta_F(Complex(0.4, -0.3), Complex(0, 0)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(delta_F(Complex(1, 0), Complex(1, 1)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(delta_F(Complex(0, 0), Complex(1, 0)), Error);

    Rng rng(8);
    for (int t = 0; t < 25; ++t) {
        Complex y(rng.normal(), rng.normal());
        Complex h(rng.normal(), rng.normal());
        Complex scale(rng.normal(), rng.normal());
        if (std::abs(y) < 1e-6 || std::abs(scale) < 1e-6) continue;
        CHECK(delta_F(y, h) == doctest::Approx(delta_F(scale * y, scale * h)).epsilon(1e-12));
    }
}

TEST_CASE("select_peak_frequencies: rules") {
    // two interior maxima plus an endpoint maximum
    std::vector<double> mag{0.1, 0.9, 0.2, 0.5, 0.1, 0.7};
    auto p3 = select_peak_frequencies(mag, 3);
    CHECK(p3 == std::vector<std::size_t>{1, 3, 5});
    auto p1 = select_peak_frequencies(mag, 1);
    CHECK(p1 == std::vector<std::size_t>{1});  // always contains the global max

    std::vector<double> mono{0.1, 0.2, 0.3, 0.4};
    CHECK(select_peak_frequencies(mono, 1) == std::vector<std::size_t>{3});
    CHECK_THROWS_AS(select_peak_frequencies(mono, 2), Error);

    std::vector<double> twin{0.0, 0.8, 0.0, 0.8, 0.0};
    CHECK(select_peak_frequencies(twin, 1) == std::vector<std::size_t>{1});  // tie to lower k

    // invariance under positive scaling
    std::vector<double> scaled = mag;
    for (double& v : scaled) v *= 17.5;
    CHECK(select_peak_frequencies(scaled, 3) == p3);
}

TEST_CASE("gaussian split: constants, decomposition, and the hand-computed pair") {
    Mat x(2, 1);
    x.at(1, 0) = 1.0;
    Mat y(2, 1);
    y.at(1, 0) = 1.0;

    auto f = gaussian_low_high_split(x, y, 0.5);
    // y0_low = e^{-1} / (1 + e^{-1})
    const double expect = std::exp(-1.0) / (1.0 + std::exp(-1.0));
    CHECK(f.low.at(0, 0) == doctest::Approx(expect).epsilon(1e-12));
    CHECK(f.norm[0] == doctest::Approx(1.0 + std::exp(-1.0)).epsilon(1e-12));
    for (std::size_t i = 0; i < y.data.size(); ++i)
        CHECK(std::abs(f.low.data[i] + f.high.data[i] - y.data[i]) < 1e-12);

    Mat yc(2, 1, 2.5);
    auto fc = gaussian_low_high_split(x, yc, 3.0);
    CHECK(fc.low.at(0, 0) == doctest::Approx(2.5).epsilon(1e-14));
    CHECK(std::abs(fc.high.at(0, 0)) < 1e-14);

    CHECK_THROWS_AS(gaussian_low_high_split(x, y, 0.0), Error);
}

TEST_CASE("gaussian split: delta to infinity approaches the mean") {
    Rng rng(14);
    Mat x(40, 2), y(40, 1);
    for (auto& v : x.data) v = rng.uniform();
    double mean = 0.0;
    for (std::size_t i = 0; i < 40; ++i) {
        y.at(i, 0) = rng.normal();
        mean += y.at(i, 0);
    }
    mean /= 40.0;
    auto f = gaussian_low_high_split(x, y, 1e12);
    for (std::size_t i = 0; i < 40; ++i) CHECK(std::abs(f.low.at(i, 0) - mean) < 1e-6);
}

TEST_CASE("gaussian split: smoothing variance is non-increasing in delta") {
    Rng rng(15);
    Mat x(60, 1), y(60, 1);
    for (std::size_t i = 0; i < 60; ++i) {
        x.at(i, 0) = i / 59.0;
        y.at(i, 0) = std::sin(kTwoPi * 3.0 * x.at(i, 0)) + 0.3 * rng.normal();
    }
    double prev = 1e100;
    for (double delta : {1e-4, 1e-3, 1e-2, 1e-1, 1.0}) {
        auto f = gaussian_low_high_split(x, y, delta);
        double m = 0.0, v = 0.0;
        for (std::size_t i = 0; i < 60; ++i) m += f.low.at(i, 0);
        m /= 60.0;
        for (std::size_t i = 0; i < 60; ++i) {
            const double d = f.low.at(i, 0) - m;
            v += d * d;
        }
        CHECK(v <= prev + 1e-12);
        prev = v;
    }
}

TEST_CASE("e_low_e_high limit cases") {
    Rng rng(2);
    Mat x(30, 1), y(30, 1);
    for (std::size_t i = 0; i < 30; ++i) {
        x.at(i, 0) = i / 29.0;
        y.at(i, 0) = std::sin(kTwoPi * 2 * x.at(i, 0)) + 0.2 * std::sin(kTwoPi * 9 * x.at(i, 0));
    }
    auto f = gaussian_low_high_split(x, y, 0.01);

    auto e0 = e_low_e_high(f, f.low, f.high);  // h = y exactly
    CHECK(e0.e_low == doctest::Approx(0.0));
    CHECK(e0.e_high == doctest::Approx(0.0));

    Mat zeros(30, 1);
    auto e1 = e_low_e_high(f, zeros, zeros);  // h = 0
    CHECK(e1.e_low == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(e1.e_high == doctest::Approx(1.0).epsilon(1e-12));

    auto e2 = e_low_e_high(f, f.low, zeros);  // low matched, high zero
    CHECK(e2.e_low == doctest::Approx(0.0));
    CHECK(e2.e_high == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("distance_and_turning_epoch tie and valley rules") {
    Mat y(3, 1);
    y.at(0, 0) = 1.0;
    std::vector<std::size_t> epochs{0, 10, 20, 30, 40};
    std::vector<Mat> constant(5, Mat(3, 1, 0.5));
    auto t = distance_and_turning_epoch(epochs, constant, y);
    CHECK(t.turning_epoch == 0);

    std::vector<Mat> valley;
    for (double v : {3.0, 2.0, 1.0, 2.0, 3.0}) valley.push_back(Mat(3, 1, v));
    auto t2 = distance_and_turning_epoch(epochs, valley, Mat(3, 1, 0.0));
    CHECK(t2.turning_epoch == 20);

    CHECK_THROWS_AS(distance_and_turning_epoch({0}, {Mat(3, 1)}, y), Error);
}

TEST_CASE("spectrum trace CSV round structure") {
    SpectrumTrace tr = make_spectrum_trace({0.0, 1.0, 2.0},
                                           {Complex(1, 0), Complex(0.5, 0.5), Complex(0, 0)});
    trace_append(tr, 0, {Complex(0, 0), Complex(0, 0), Complex(0, 0)});
    trace_append(tr, 5, {Complex(1, 0), Complex(0.5, 0.5), Complex(0, 0)});
    CHECK(tr.rel_err[0][0] == doctest::Approx(1.0));
    CHECK(tr.rel_err[1][1] == doctest::Approx(0.0));
    CHECK(std::isnan(tr.rel_err[0][2]));  // |yhat| below tolerance: missing, not 0 or inf

    const std::string path = "/tmp/fpl_spec_trace_test.csv";
    write_spectrum_csv(tr, path);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "epoch,k,re_yhat,im_yhat,re_hhat,im_hhat,delta_F");
    std::remove(path.c_str());
}
