#ifndef FPL_DATASETS_HPP
#define FPL_DATASETS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fpl/common.hpp"

namespace fpl::datasets {

struct LabeledDataset {
    Mat inputs;                      // n x d
    Mat labels;                      // n x c
    std::vector<int> class_index;    // per-sample class, when categorical
    std::string provenance;          // preset name or file digest
};

struct Synth1dSpec {
    Vec amplitudes;
    Vec frequencies;  // radians per unit
    double x_min = 0.0;
    double x_max = 1.0;
    std::size_t n = 0;
};

// f(x) = sum_j amp_j sin(freq_j x) on n evenly spaced samples.
LabeledDataset synth_1d(const Synth1dSpec& spec);

// presets: "appA" = sin(x)+sin(3x)+sin(5x), 201 pts on [-3.14, 3.14];
//          "intro" = sin(x)+sin(2x), 201 pts on [-3.14, 3.14]
Synth1dSpec synth_preset(const std::string& name);

struct ParitySpec {
    std::size_t dimension = 0;
    std::size_t subset_size = 0;  // 0 = full corner enumeration
    std::uint64_t seed = 0;
};

// Labels prod_j x_j on {-1,1}^d, full enumeration or a seeded subset
// sampled without replacement.
LabeledDataset parity_dataset(const ParitySpec& spec);

// fhat(k) = (-i)^d prod_j sin(2 pi k_j); exact closed form.
Complex parity_exact_ft(std::size_t d, const Vec& k);

// IDX image/label pair (big-endian, magics 0x803/0x801). Pixels scaled to
// [0,1], labels one-hot over the distinct values present (digits: 10).
// subset_count > 0 takes a seeded sample without replacement.
LabeledDataset load_idx(const std::string& images_path, const std::string& labels_path,
                        std::size_t subset_count = 0, std::uint64_t seed = 0);

struct ImageDataset {
    std::size_t width = 0, height = 0;
    Mat inputs;                    // (x, y) scaled to [0,1]^2, row-major pixels
    Mat labels;                    // n x 1, mean-centered then max-abs normalized
    std::vector<bool> training;    // odd-column split flag
};

// PGM (P2 ascii or P5 binary), maxval <= 65535. Training pixels are the
// odd-column ones per the 2-d memorization setup.
ImageDataset load_pgm(const std::string& path);

// Bilinear-resizes every image of a (n x h*w) dataset to new_h x new_w and
// grows it to `count` samples with seeded integer shifts in [-max_shift,
// max_shift]^2 (zero fill). Desk-scale stand-in for full-size image corpora.
LabeledDataset expand_images(const LabeledDataset& ds, std::size_t h, std::size_t w,
                             std::size_t new_h, std::size_t new_w, std::size_t count,
                             int max_shift, std::uint64_t seed);

// SHA-256 of the canonical little-endian f64 serialization of inputs then
// labels; hex string.
std::string dataset_digest(const LabeledDataset& ds);

}  // namespace fpl::datasets

#endif
