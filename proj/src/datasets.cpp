#include "fpl/datasets.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

#include "fpl/rng.hpp"

namespace fpl::datasets {

LabeledDataset synth_1d(const Synth1dSpec& spec) {
    require(spec.n >= 2, "synth_1d: need at least 2 samples");
    require(spec.amplitudes.size() == spec.frequencies.size(), "synth_1d: amp/freq length mismatch");
    require(spec.x_max > spec.x_min, "synth_1d: empty range");
    LabeledDataset ds;
    ds.inputs = Mat(spec.n, 1);
    ds.labels = Mat(spec.n, 1);
    for (std::size_t i = 0; i < spec.n; ++i) {
        const double x = spec.x_min + (spec.x_max - spec.x_min) * static_cast<double>(i) /
                                          static_cast<double>(spec.n - 1);
        double y = 0.0;
        for (std::size_t j = 0; j < spec.amplitudes.size(); ++j)
            y += spec.amplitudes[j] * std::sin(spec.frequencies[j] * x);
        ds.inputs.at(i, 0) = x;
        ds.labels.at(i, 0) = y;
    }
    return ds;
}

Synth1dSpec synth_preset(const std::string& name) {
    Synth1dSpec s;
    s.x_min = -3.14;
    s.x_max = 3.14;
    s.n = 201;
    if (name == "appA") {
        s.amplitudes = {1.0, 1.0, 1.0};
        s.frequencies = {1.0, 3.0, 5.0};
    } else if (name == "intro") {
        s.amplitudes = {1.0, 1.0};
        s.frequencies = {1.0, 2.0};
    } else {
        fail("unknown synth preset: " + name);
    }
    return s;
}

LabeledDataset parity_dataset(const ParitySpec& spec) {
    const std::size_t d = spec.dimension;
    require(d >= 1 && d <= 24, "parity_dataset: dimension must be in [1, 24]");
    const std::size_t full = std::size_t{1} << d;
    require(spec.subset_size <= full, "parity_dataset: subset larger than the domain");

    std::vector<std::size_t> picks;
    if (spec.subset_size == 0 || spec.subset_size == full) {
        picks.resize(full);
        std::iota(picks.begin(), picks.end(), 0);
    } else {
        // seeded partial Fisher-Yates over corner codes
        std::vector<std::size_t> pool(full);
        std::iota(pool.begin(), pool.end(), 0);
        Rng rng(spec.seed);
        for (std::size_t i = 0; i < spec.subset_size; ++i) {
            const std::size_t j = i + rng.below(full - i);
            std::swap(pool[i], pool[j]);
        }
        picks.assign(pool.begin(), pool.begin() + spec.subset_size);
    }

    LabeledDataset ds;
    ds.inputs = Mat(picks.size(), d);
    ds.labels = Mat(picks.size(), 1);
    for (std::size_t s = 0; s < picks.size(); ++s) {
        double prod = 1.0;
        for (std::size_t j = 0; j < d; ++j) {
            const double v = (picks[s] >> j) & 1 ? 1.0 : -1.0;
            ds.inputs.at(s, j) = v;
            prod *= v;
        }
        ds.labels.at(s, 0) = prod;
    }
    ds.provenance = "parity";
    return ds;
}

Complex parity_exact_ft(std::size_t d, const Vec& k) {
    require(k.size() == d, "parity_exact_ft: frequency dimension mismatch");
    // (-i)^d cycles through 1, -i, -1, i
    static const Complex table[4] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};
    Complex out = table[d % 4];
    for (double kj : k) out *= std::sin(2.0 * 3.141592653589793238462643383279 * kj);
    return out;
}

namespace {

std::uint32_t read_be32(std::ifstream& in, const std::string& what) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    require(in.good(), "load_idx: truncated " + what);
    return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) | (std::uint32_t(b[2]) << 8) |
           std::uint32_t(b[3]);
}

}  // namespace

LabeledDataset load_idx(const std::string& images_path, const std::string& labels_path,
                        std::size_t subset_count, std::uint64_t seed) {
    std::ifstream img(images_path, std::ios::binary);
    require(img.good(), "load_idx: cannot open " + images_path);
    require(read_be32(img, "image magic") == 0x00000803u, "load_idx: bad image magic");
    const std::size_t n = read_be32(img, "image count");
    const std::size_t rows = read_be32(img, "image rows");
    const std::size_t cols = read_be32(img, "image cols");
    std::vector<unsigned char> pixels(n * rows * cols);
    img.read(reinterpret_cast<char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
    require(img.gcount() == static_cast<std::streamsize>(pixels.size()),
            "load_idx: truncated image payload");

    std::ifstream lab(labels_path, std::ios::binary);
    require(lab.good(), "load_idx: cannot open " + labels_path);
    require(read_be32(lab, "label magic") == 0x00000801u, "load_idx: bad label magic");
    const std::size_t nl = read_be32(lab, "label count");
    require(nl == n, "load_idx: image/label count mismatch");
    std::vector<unsigned char> raw_labels(n);
    lab.read(reinterpret_cast<char*>(raw_labels.data()), static_cast<std::streamsize>(n));
    require(lab.gcount() == static_cast<std::streamsize>(n), "load_idx: truncated label payload");

    std::vector<std::size_t> picks(n);
    std::iota(picks.begin(), picks.end(), 0);
    if (subset_count > 0 && subset_count < n) {
        Rng rng(seed);
        for (std::size_t i = 0; i < subset_count; ++i) {
            const std::size_t j = i + rng.below(n - i);
            std::swap(picks[i], picks[j]);
        }
        picks.resize(subset_count);
    }

    const int classes = 1 + *std::max_element(raw_labels.begin(), raw_labels.end());
    LabeledDataset ds;
    ds.inputs = Mat(picks.size(), rows * cols);
    ds.labels = Mat(picks.size(), static_cast<std::size_t>(classes));
    ds.class_index.resize(picks.size());
    for (std::size_t s = 0; s < picks.size(); ++s) {
        const unsigned char* px = pixels.data() + picks[s] * rows * cols;
        double* x = ds.inputs.row(s);
        for (std::size_t t = 0; t < rows * cols; ++t) x[t] = static_cast<double>(px[t]) / 255.0;
        const int cls = raw_labels[picks[s]];
        ds.labels.at(s, static_cast<std::size_t>(cls)) = 1.0;
        ds.class_index[s] = cls;
    }
    ds.provenance = images_path;
    return ds;
}

namespace {

void skip_pgm_space(std::istream& in) {
    for (;;) {
        int c = in.peek();
        if (c == '#') {
            std::string line;
            std::getline(in, line);
        } else if (std::isspace(c)) {
            in.get();
        } else {
            return;
        }
    }
}

std::size_t read_pgm_int(std::istream& in) {
    skip_pgm_space(in);
    std::size_t v = 0;
    bool any = false;
    while (std::isdigit(in.peek())) {
        v = v * 10 + static_cast<std::size_t>(in.get() - '0');
        any = true;
    }
    require(any, "load_pgm: malformed header");
    return v;
}

}  // namespace

ImageDataset load_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), "load_pgm: cannot open " + path);
    char m0 = 0, m1 = 0;
    in.get(m0);
    in.get(m1);
    require(m0 == 'P' && (m1 == '2' || m1 == '5'), "load_pgm: not a PGM file");
    const bool binary = m1 == '5';
    const std::size_t w = read_pgm_int(in);
    const std::size_t h = read_pgm_int(in);
    const std::size_t maxval = read_pgm_int(in);
    require(w >= 1 && h >= 1 && maxval >= 1 && maxval <= 65535, "load_pgm: bad dimensions");

    std::vector<double> gray(w * h);
    if (binary) {
        in.get();  // single whitespace after maxval
        if (maxval < 256) {
            std::vector<unsigned char> buf(w * h);
            in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
            require(in.gcount() == static_cast<std::streamsize>(buf.size()),
                    "load_pgm: truncated payload");
            for (std::size_t i = 0; i < buf.size(); ++i) gray[i] = buf[i];
        } else {
            std::vector<unsigned char> buf(2 * w * h);
            in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
            require(in.gcount() == static_cast<std::streamsize>(buf.size()),
                    "load_pgm: truncated payload");
            for (std::size_t i = 0; i < w * h; ++i)
                gray[i] = 256.0 * buf[2 * i] + buf[2 * i + 1];
        }
    } else {
        for (std::size_t i = 0; i < w * h; ++i) gray[i] = static_cast<double>(read_pgm_int(in));
    }

    double mean = 0.0;
    for (double g : gray) mean += g;
    mean /= static_cast<double>(gray.size());
    double maxabs = 0.0;
    for (double& g : gray) {
        g -= mean;
        maxabs = std::max(maxabs, std::abs(g));
    }
    if (maxabs > 0.0)
        for (double& g : gray) g /= maxabs;

    ImageDataset ds;
    ds.width = w;
    ds.height = h;
    ds.inputs = Mat(w * h, 2);
    ds.labels = Mat(w * h, 1);
    ds.training.resize(w * h);
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            const std::size_t i = y * w + x;
            ds.inputs.at(i, 0) = w > 1 ? static_cast<double>(x) / static_cast<double>(w - 1) : 0.0;
            ds.inputs.at(i, 1) = h > 1 ? static_cast<double>(y) / static_cast<double>(h - 1) : 0.0;
            ds.labels.at(i, 0) = gray[i];
            ds.training[i] = (x % 2) == 1;
        }
    }
    return ds;
}

LabeledDataset expand_images(const LabeledDataset& ds, std::size_t h, std::size_t w,
                             std::size_t new_h, std::size_t new_w, std::size_t count,
                             int max_shift, std::uint64_t seed) {
    require(ds.inputs.cols == h * w, "expand_images: dataset is not h*w wide");
    require(count >= 1 && ds.inputs.rows >= 1, "expand_images: empty request");

    // bilinear resize, pixel-center convention
    const std::size_t n0 = ds.inputs.rows;
    Mat up(n0, new_h * new_w);
    for (std::size_t s = 0; s < n0; ++s) {
        const double* src = ds.inputs.row(s);
        double* dst = up.row(s);
        for (std::size_t i = 0; i < new_h; ++i) {
            const double sy = (static_cast<double>(i) + 0.5) * static_cast<double>(h) /
                                  static_cast<double>(new_h) - 0.5;
            const long y0 = static_cast<long>(std::floor(sy));
            const double fy = sy - static_cast<double>(y0);
            const std::size_t y0c = static_cast<std::size_t>(std::clamp<long>(y0, 0, long(h) - 1));
            const std::size_t y1c = static_cast<std::size_t>(std::clamp<long>(y0 + 1, 0, long(h) - 1));
            for (std::size_t j = 0; j < new_w; ++j) {
                const double sx = (static_cast<double>(j) + 0.5) * static_cast<double>(w) /
                                      static_cast<double>(new_w) - 0.5;
                const long x0 = static_cast<long>(std::floor(sx));
                const double fx = sx - static_cast<double>(x0);
                const std::size_t x0c = static_cast<std::size_t>(std::clamp<long>(x0, 0, long(w) - 1));
                const std::size_t x1c = static_cast<std::size_t>(std::clamp<long>(x0 + 1, 0, long(w) - 1));
                dst[i * new_w + j] = src[y0c * w + x0c] * (1 - fy) * (1 - fx) +
                                     src[y0c * w + x1c] * (1 - fy) * fx +
                                     src[y1c * w + x0c] * fy * (1 - fx) +
                                     src[y1c * w + x1c] * fy * fx;
            }
        }
    }

    LabeledDataset out;
    out.inputs = Mat(count, new_h * new_w);
    out.labels = Mat(count, ds.labels.cols);
    out.class_index.resize(count);
    Rng rng(seed);
    for (std::size_t s = 0; s < count; ++s) {
        const std::size_t base = s % n0;
        const int span = 2 * max_shift + 1;
        const int dy = max_shift > 0 ? static_cast<int>(rng.below(span)) - max_shift : 0;
        const int dx = max_shift > 0 ? static_cast<int>(rng.below(span)) - max_shift : 0;
        const double* src = up.row(base);
        double* dst = out.inputs.row(s);
        for (std::size_t i = 0; i < new_h; ++i) {
            for (std::size_t j = 0; j < new_w; ++j) {
                const long si = static_cast<long>(i) - dy;
                const long sj = static_cast<long>(j) - dx;
                dst[i * new_w + j] =
                    (si >= 0 && si < long(new_h) && sj >= 0 && sj < long(new_w))
                        ? src[static_cast<std::size_t>(si) * new_w + static_cast<std::size_t>(sj)]
                        : 0.0;
            }
        }
        std::memcpy(out.labels.row(s), ds.labels.row(base), ds.labels.cols * sizeof(double));
        out.class_index[s] = ds.class_index.empty() ? 0 : ds.class_index[base];
    }
    out.provenance = ds.provenance + ":expanded";
    return out;
}

std::string dataset_digest(const LabeledDataset& ds) {
    std::vector<unsigned char> bytes;
    bytes.reserve(8 * (ds.inputs.data.size() + ds.labels.data.size()));
    auto push = [&](const Vec& v) {
        for (double x : v) {
            std::uint64_t bits;
            std::memcpy(&bits, &x, 8);
            for (int b = 0; b < 8; ++b) bytes.push_back(static_cast<unsigned char>(bits >> (8 * b)));
        }
    };
    push(ds.inputs.data);
    push(ds.labels.data);

    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int md_len = 0;
    require(EVP_Digest(bytes.data(), bytes.size(), md, &md_len, EVP_sha256(), nullptr) == 1,
            "dataset_digest: SHA-256 failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * md_len);
    for (unsigned int i = 0; i < md_len; ++i) {
        out.push_back(hex[md[i] >> 4]);
        out.push_back(hex[md[i] & 0xf]);
    }
    return out;
}

}  // namespace fpl::datasets
