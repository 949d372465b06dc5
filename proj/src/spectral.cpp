#include "fpl/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

namespace fpl::spectral {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

void write_csv_value(std::string& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
}
}  // namespace

CVec dft_1d(const Vec& samples) {
    const std::size_t n = samples.size();
    require(n >= 1, "dft_1d: empty input");
    CVec out(n);
    for (std::size_t k = 0; k < n; ++k) {
        double re = 0.0, im = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double ang = -kTwoPi * static_cast<double>(j) * static_cast<double>(k) /
                               static_cast<double>(n);
            re += samples[j] * std::cos(ang);
            im += samples[j] * std::sin(ang);
        }
        out[k] = Complex(re / static_cast<double>(n), im / static_cast<double>(n));
    }
    return out;
}

PrincipalDirection principal_direction(const Mat& inputs) {
    const std::size_t n = inputs.rows, d = inputs.cols;
    require(n >= 2, "principal_direction: need at least 2 points");

    Vec mean(d, 0.0);
    for (std::size_t s = 0; s < n; ++s) {
        const double* x = inputs.row(s);
        for (std::size_t j = 0; j < d; ++j) mean[j] += x[j];
    }
    for (double& m : mean) m /= static_cast<double>(n);

    Mat cov(d, d);
    for (std::size_t s = 0; s < n; ++s) {
        const double* x = inputs.row(s);
        for (std::size_t i = 0; i < d; ++i) {
            const double xi = x[i] - mean[i];
            double* cr = cov.row(i);
            for (std::size_t j = i; j < d; ++j) cr[j] += xi * (x[j] - mean[j]);
        }
    }
    double trace = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i; j < d; ++j) {
            cov.at(i, j) /= static_cast<double>(n - 1);
            cov.at(j, i) = cov.at(i, j);
        }
        trace += cov.at(i, i);
    }
    require(trace > 0.0, "principal_direction: zero covariance (all points identical)");

    Vec v(d, 1.0 / std::sqrt(static_cast<double>(d)));
    double lambda = 0.0;
    Vec w(d);
    for (int iter = 0; iter < 2000; ++iter) {
        for (std::size_t i = 0; i < d; ++i) {
            const double* cr = cov.row(i);
            double acc = 0.0;
            for (std::size_t j = 0; j < d; ++j) acc += cr[j] * v[j];
            w[i] = acc;
        }
        double norm = 0.0;
        for (double x : w) norm += x * x;
        norm = std::sqrt(norm);
        if (norm == 0.0) break;  // started orthogonal to the range; restart shifted
        double diff = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            w[i] /= norm;
            diff += std::abs(w[i] - v[i]);
        }
        lambda = norm;
        const bool settled = diff < 1e-14 || std::abs(diff - 2.0) < 1e-14;  // +/- flip
        v = w;
        if (settled && iter > 4) break;
    }
    // sign: largest-magnitude entry positive
    std::size_t arg = 0;
    for (std::size_t i = 1; i < d; ++i)
        if (std::abs(v[i]) > std::abs(v[arg])) arg = i;
    if (v[arg] < 0.0)
        for (double& x : v) x = -x;
    return PrincipalDirection{std::move(v), lambda};
}

CVec nonuniform_ft(const Mat& inputs, const Vec& labels, const Vec& direction, const Vec& grid) {
    const std::size_t n = inputs.rows;
    require(n >= 1 && !grid.empty(), "nonuniform_ft: empty dataset or grid");
    require(labels.size() == n, "nonuniform_ft: labels size mismatch");
    require(direction.size() == inputs.cols, "nonuniform_ft: direction dimension mismatch");
    double norm = 0.0;
    for (double x : direction) norm += x * x;
    require(std::abs(std::sqrt(norm) - 1.0) < 1e-9, "nonuniform_ft: direction must be unit norm");

    Vec proj(n);
    for (std::size_t s = 0; s < n; ++s) {
        const double* x = inputs.row(s);
        double acc = 0.0;
        for (std::size_t j = 0; j < inputs.cols; ++j) acc += direction[j] * x[j];
        proj[s] = acc;
    }
    CVec out(grid.size());
    parallel_chunks(grid.size(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t g = lo; g < hi; ++g) {
            const double k = grid[g];
            double re = 0.0, im = 0.0;
            for (std::size_t s = 0; s < n; ++s) {
                const double ang = -kTwoPi * proj[s] * k;
                re += labels[s] * std::cos(ang);
                im += labels[s] * std::sin(ang);
            }
            out[g] = Complex(re / static_cast<double>(n), im / static_cast<double>(n));
        }
    });
    return out;
}

double delta_F(Complex yhat, Complex hhat) {
    const double denom = std::abs(yhat);
    require(denom > kCoeffTolerance, "delta_F: undefined frequency (|yhat| below tolerance)");
    return std::abs(hhat - yhat) / denom;
}

std::vector<std::size_t> select_peak_frequencies(const std::vector<double>& mag,
                                                 std::size_t count) {
    require(!mag.empty(), "select_peak_frequencies: empty spectrum");
    std::vector<std::size_t> maxima;
    for (std::size_t i = 0; i < mag.size(); ++i) {
        if (mag[i] <= kCoeffTolerance) continue;
        const bool left_ok = i == 0 || mag[i] > mag[i - 1];
        const bool right_ok = i + 1 == mag.size() || mag[i] > mag[i + 1];
        if (left_ok && right_ok) maxima.push_back(i);
    }
    require(count <= maxima.size(), "select_peak_frequencies: count exceeds number of local maxima");
    std::stable_sort(maxima.begin(), maxima.end(), [&](std::size_t a, std::size_t b) {
        if (mag[a] != mag[b]) return mag[a] > mag[b];
        return a < b;
    });
    maxima.resize(count);
    std::sort(maxima.begin(), maxima.end());
    return maxima;
}

namespace {

// one kernel pass: out_low = normalized Gaussian smoothing of `values`,
// returning C_i when norm_out is non-null
Mat kernel_low(const Mat& inputs, const Mat& values, double delta, Vec* norm_out) {
    require(delta > 0.0, "gaussian filter: delta must be positive");
    require(inputs.rows == values.rows, "gaussian filter: row mismatch");
    const std::size_t n = inputs.rows, d = inputs.cols, c = values.cols;
    Mat low(n, c);
    if (norm_out) norm_out->assign(n, 0.0);
    parallel_chunks(n, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            const double* xi = inputs.row(i);
            double* li = low.row(i);
            double C = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                const double* xj = inputs.row(j);
                double r2 = 0.0;
                for (std::size_t t = 0; t < d; ++t) {
                    const double dx = xi[t] - xj[t];
                    r2 += dx * dx;
                }
                const double w = std::exp(-r2 / (2.0 * delta));
                C += w;
                const double* vj = values.row(j);
                for (std::size_t t = 0; t < c; ++t) li[t] += w * vj[t];
            }
            for (std::size_t t = 0; t < c; ++t) li[t] /= C;
            if (norm_out) (*norm_out)[i] = C;
        }
    });
    return low;
}

}  // namespace

FilteredDataset gaussian_low_high_split(const Mat& inputs, const Mat& labels, double delta) {
    FilteredDataset out;
    out.inputs = inputs;
    out.labels = labels;
    out.delta = delta;
    out.low = kernel_low(inputs, labels, delta, &out.norm);
    out.high = Mat(labels.rows, labels.cols);
    for (std::size_t i = 0; i < labels.data.size(); ++i)
        out.high.data[i] = labels.data[i] - out.low.data[i];
    return out;
}

Mat filter_low(const Mat& inputs, const Mat& values, double delta) {
    return kernel_low(inputs, values, delta, nullptr);
}

KernelCache::KernelCache(const Mat& inputs) : n_(inputs.rows) {
    require(n_ >= 1, "KernelCache: empty inputs");
    dist2_.assign(n_ * n_, 0.0);
    const std::size_t d = inputs.cols;
    parallel_chunks(n_, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            const double* xi = inputs.row(i);
            double* out = dist2_.data() + i * n_;
            for (std::size_t j = 0; j < n_; ++j) {
                const double* xj = inputs.row(j);
                double r2 = 0.0;
                for (std::size_t t = 0; t < d; ++t) {
                    const double dx = xi[t] - xj[t];
                    r2 += dx * dx;
                }
                out[j] = r2;
            }
        }
    });
}

Mat KernelCache::filter_low(const Mat& values, double delta) const {
    require(delta > 0.0, "KernelCache: delta must be positive");
    require(values.rows == n_, "KernelCache: row mismatch");
    const std::size_t c = values.cols;
    Mat low(n_, c);
    parallel_chunks(n_, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            const double* d2 = dist2_.data() + i * n_;
            double* li = low.row(i);
            double C = 0.0;
            for (std::size_t j = 0; j < n_; ++j) {
                const double w = std::exp(-d2[j] / (2.0 * delta));
                C += w;
                const double* vj = values.row(j);
                for (std::size_t t = 0; t < c; ++t) li[t] += w * vj[t];
            }
            for (std::size_t t = 0; t < c; ++t) li[t] /= C;
        }
    });
    return low;
}

LowHighError e_low_e_high(const FilteredDataset& t, const Mat& out_low, const Mat& out_high) {
    require(out_low.rows == t.low.rows && out_low.cols == t.low.cols,
            "e_low_e_high: decomposition shape mismatch");
    double num_l = 0.0, den_l = 0.0, num_h = 0.0, den_h = 0.0;
    for (std::size_t i = 0; i < t.low.data.size(); ++i) {
        const double dl = t.low.data[i] - out_low.data[i];
        const double dh = t.high.data[i] - out_high.data[i];
        num_l += dl * dl;
        den_l += t.low.data[i] * t.low.data[i];
        num_h += dh * dh;
        den_h += t.high.data[i] * t.high.data[i];
    }
    require(den_l > 0.0, "e_low_e_high: zero low-part denominator");
    require(den_h > 0.0, "e_low_e_high: zero high-part denominator");
    return LowHighError{std::sqrt(num_l / den_l), std::sqrt(num_h / den_h)};
}

DistanceTrace distance_and_turning_epoch(const std::vector<std::size_t>& epochs,
                                         const std::vector<Mat>& outputs,
                                         const Mat& filtered_labels) {
    require(epochs.size() >= 2, "distance_and_turning_epoch: need at least 2 recorded epochs");
    require(epochs.size() == outputs.size(), "distance_and_turning_epoch: trace size mismatch");
    DistanceTrace tr;
    tr.epochs = epochs;
    tr.dist.resize(epochs.size());
    for (std::size_t e = 0; e < outputs.size(); ++e) {
        const Mat& h = outputs[e];
        require(h.rows == filtered_labels.rows && h.cols == filtered_labels.cols,
                "distance_and_turning_epoch: output shape mismatch");
        double acc = 0.0;
        for (std::size_t i = 0; i < h.data.size(); ++i) {
            const double dv = h.data[i] - filtered_labels.data[i];
            acc += dv * dv;
        }
        tr.dist[e] = acc / static_cast<double>(filtered_labels.rows);
    }
    std::size_t best = 0;
    for (std::size_t e = 1; e < tr.dist.size(); ++e)
        if (tr.dist[e] < tr.dist[best]) best = e;
    tr.turning_epoch = epochs[best];
    return tr;
}

SpectrumTrace make_spectrum_trace(Vec grid, CVec target) {
    require(grid.size() == target.size(), "spectrum trace: grid/target size mismatch");
    require(std::is_sorted(grid.begin(), grid.end()), "spectrum trace: grid must be ascending");
    SpectrumTrace t;
    t.grid = std::move(grid);
    t.target = std::move(target);
    return t;
}

void trace_append(SpectrumTrace& trace, std::size_t epoch, CVec model_coeffs) {
    require(model_coeffs.size() == trace.grid.size(), "spectrum trace: coefficient count mismatch");
    Vec rel(trace.grid.size());
    for (std::size_t i = 0; i < rel.size(); ++i) {
        rel[i] = std::abs(trace.target[i]) > kCoeffTolerance
                     ? delta_F(trace.target[i], model_coeffs[i])
                     : std::numeric_limits<double>::quiet_NaN();
    }
    trace.epochs.push_back(epoch);
    trace.model.push_back(std::move(model_coeffs));
    trace.rel_err.push_back(std::move(rel));
}

void write_spectrum_csv(const SpectrumTrace& trace, const std::string& path) {
    std::string out = "epoch,k,re_yhat,im_yhat,re_hhat,im_hhat,delta_F\n";
    for (std::size_t e = 0; e < trace.epochs.size(); ++e) {
        for (std::size_t i = 0; i < trace.grid.size(); ++i) {
            out += std::to_string(trace.epochs[e]);
            out += ',';
            write_csv_value(out, trace.grid[i]);
            out += ',';
            write_csv_value(out, trace.target[i].real());
            out += ',';
            write_csv_value(out, trace.target[i].imag());
            out += ',';
            write_csv_value(out, trace.model[e][i].real());
            out += ',';
            write_csv_value(out, trace.model[e][i].imag());
            out += ',';
            if (std::isnan(trace.rel_err[e][i]))
                out += "nan";
            else
                write_csv_value(out, trace.rel_err[e][i]);
            out += '\n';
        }
    }
    std::ofstream f(path, std::ios::binary);
    require(f.good(), "write_spectrum_csv: cannot open " + path);
    f << out;
}

void write_filter_csv(const std::vector<FilterTraceRow>& rows, const std::string& path) {
    std::string out = "epoch,delta,e_low,e_high,dist\n";
    for (const auto& r : rows) {
        out += std::to_string(r.epoch);
        out += ',';
        write_csv_value(out, r.delta);
        out += ',';
        write_csv_value(out, r.e_low);
        out += ',';
        write_csv_value(out, r.e_high);
        out += ',';
        write_csv_value(out, r.dist);
        out += '\n';
    }
    std::ofstream f(path, std::ios::binary);
    require(f.good(), "write_filter_csv: cannot open " + path);
    f << out;
}

}  // namespace fpl::spectral
