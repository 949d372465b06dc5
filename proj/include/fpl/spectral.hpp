#ifndef FPL_SPECTRAL_HPP
#define FPL_SPECTRAL_HPP

#include <optional>
#include <string>
#include <vector>

#include "fpl/common.hpp"

namespace fpl::spectral {

// |yhat_k| below this is treated as "target coefficient absent": delta_F is
// undefined there and peak selection ignores the bin.
inline constexpr double kCoeffTolerance = 1e-12;

// yhat_k = (1/n) sum_i y_i exp(-i 2 pi i k / n), k = 0..n-1. Direct O(n^2)
// summation; every experiment in this lab stays well below FFT-worthy sizes.
CVec dft_1d(const Vec& samples);

struct PrincipalDirection {
    Vec direction;      // unit vector
    double eigenvalue;  // dominant eigenvalue of the covariance
};

// Top eigenvector of the mean-centered input covariance via power iteration.
// Sign fixed so the largest-magnitude entry is positive.
PrincipalDirection principal_direction(const Mat& inputs);

// yhat_k = (1/n) sum_i y_i exp(-i 2 pi (p . x_i) k) for each k in grid.
// Frequencies are cycles per unit of the projected coordinate.
CVec nonuniform_ft(const Mat& inputs, const Vec& labels, const Vec& direction, const Vec& grid);

// Relative spectral error |hhat - yhat| / |yhat|. Errors out when |yhat| is
// below kCoeffTolerance instead of returning infinity.
double delta_F(Complex yhat, Complex hhat);

// Indices of the `count` largest strict local maxima of magnitudes, returned
// sorted by frequency index. Endpoints count when they beat their single
// neighbor; ties between peaks resolve toward the lower index.
std::vector<std::size_t> select_peak_frequencies(const std::vector<double>& magnitudes,
                                                 std::size_t count);

struct FilteredDataset {
    Mat inputs;
    Mat labels;
    double delta = 0.0;
    Mat low;    // y^{low,delta}
    Mat high;   // y - y^{low,delta}
    Vec norm;   // C_i
};

// Gaussian low/high split of Eq. (4): y_i^low = (1/C_i) sum_j y_j G(x_i-x_j),
// G(r) = exp(-|r|^2 / (2 delta)). delta is the variance-like width: it sits
// under |r|^2/2, it is NOT a standard deviation. The j = i self term is
// included in both the sum and C_i.
FilteredDataset gaussian_low_high_split(const Mat& inputs, const Mat& labels, double delta);

// Same kernel applied to another field sampled on the same inputs (the DNN
// outputs); reuses the C_i of the dataset split.
Mat filter_low(const Mat& inputs, const Mat& values, double delta);

// Precomputed pairwise squared distances, for repeated filtering of model
// outputs against the same inputs (targets and outputs must share one
// kernel matrix). O(n^2 d) once, O(n^2 c) per call.
class KernelCache {
  public:
    explicit KernelCache(const Mat& inputs);
    Mat filter_low(const Mat& values, double delta) const;
    std::size_t size() const { return n_; }

  private:
    std::size_t n_;
    std::vector<double> dist2_;  // row-major n x n
};

struct LowHighError {
    double e_low = 0.0;
    double e_high = 0.0;
};

// Eq. (3): e = (sum |y_part - h_part|^2 / sum |y_part|^2)^{1/2}.
LowHighError e_low_e_high(const FilteredDataset& targets, const Mat& out_low, const Mat& out_high);

struct DistanceTrace {
    std::vector<std::size_t> epochs;
    Vec dist;                  // mean squared distance to the filtered labels
    std::size_t turning_epoch; // epoch attaining the minimum (earliest on ties)
};

// Dist(y^delta, h) over recorded epochs plus the turning epoch T_delta.
DistanceTrace distance_and_turning_epoch(const std::vector<std::size_t>& epochs,
                                         const std::vector<Mat>& outputs, const Mat& filtered_labels);

struct SpectrumTrace {
    Vec grid;                                  // frequency values, ascending
    CVec target;                               // yhat_k
    std::vector<std::size_t> epochs;
    std::vector<CVec> model;                   // hhat_k per epoch
    // delta_F(k) per epoch; NaN marks bins where |yhat| < tolerance
    std::vector<Vec> rel_err;
};

SpectrumTrace make_spectrum_trace(Vec grid, CVec target);
void trace_append(SpectrumTrace& trace, std::size_t epoch, CVec model_coeffs);

// CSV per External Interfaces: epoch,k,re_yhat,im_yhat,re_hhat,im_hhat,delta_F
void write_spectrum_csv(const SpectrumTrace& trace, const std::string& path);

struct FilterTraceRow {
    std::size_t epoch;
    double delta;
    double e_low;
    double e_high;
    double dist;
};

// CSV: epoch,delta,e_low,e_high,dist
void write_filter_csv(const std::vector<FilterTraceRow>& rows, const std::string& path);

}  // namespace fpl::spectral

#endif
