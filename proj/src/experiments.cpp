#include "fpl/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>

#include "fpl/datasets.hpp"
#include "fpl/nn.hpp"
#include "fpl/pde.hpp"
#include "fpl/rng.hpp"
#include "fpl/svg.hpp"
#include "fpl/theory.hpp"
#include "fpl/version.hpp"
#include "json.hpp"

namespace fpl::experiments {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    std::size_t b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
}

std::string fmt_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_short(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

}  // namespace

Config Config::from_file(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), "config: cannot open " + path);
    Config cfg;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        require(eq != std::string::npos,
                "config: line " + std::to_string(lineno) + " has no '=': " + line);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        require(!key.empty(), "config: empty key on line " + std::to_string(lineno));
        cfg.set(key, value);
    }
    return cfg;
}

void Config::set(const std::string& key, const std::string& value) { values_[key] = value; }

bool Config::has(const std::string& key) const { return values_.count(key) > 0; }

std::string Resolver::str(const std::string& key, const std::string& def) {
    seen_.push_back(key);
    auto it = cfg_.entries().find(key);
    const std::string v = it == cfg_.entries().end() ? def : it->second;
    resolved_[key] = v;
    return v;
}

double Resolver::num(const std::string& key, double def) {
    const std::string v = str(key, fmt_short(def));
    try {
        std::size_t pos = 0;
        const double out = std::stod(v, &pos);
        require(pos == v.size(), "");
        return out;
    } catch (...) {
        fail("config: key '" + key + "' is not a number: " + v);
    }
}

std::size_t Resolver::count(const std::string& key, std::size_t def) {
    const double v = num(key, static_cast<double>(def));
    require(v >= 0 && v == std::floor(v), "config: key '" + key + "' must be a whole number");
    return static_cast<std::size_t>(v);
}

bool Resolver::flag(const std::string& key, bool def) {
    const std::string v = str(key, def ? "true" : "false");
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    fail("config: key '" + key + "' is not a boolean: " + v);
}

namespace {
std::vector<std::string> split_commas(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::string join_nums(const Vec& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        s += fmt_short(v[i]);
    }
    return s;
}
}  // namespace

Vec Resolver::num_list(const std::string& key, const Vec& def) {
    const std::string v = str(key, join_nums(def));
    Vec out;
    for (const std::string& item : split_commas(v)) {
        try {
            out.push_back(std::stod(item));
        } catch (...) {
            fail("config: key '" + key + "' has a non-numeric entry: " + item);
        }
    }
    require(!out.empty(), "config: key '" + key + "' is an empty list");
    return out;
}

std::vector<std::size_t> Resolver::count_list(const std::string& key,
                                              const std::vector<std::size_t>& def) {
    Vec dv;
    for (std::size_t u : def) dv.push_back(static_cast<double>(u));
    Vec nums = num_list(key, dv);
    std::vector<std::size_t> out;
    for (double x : nums) {
        require(x >= 0 && x == std::floor(x), "config: key '" + key + "' needs whole numbers");
        out.push_back(static_cast<std::size_t>(x));
    }
    return out;
}

std::vector<std::size_t> Resolver::count_list_with_inf(const std::string& key,
                                                       const std::string& def) {
    const std::string v = str(key, def);
    std::vector<std::size_t> out;
    for (const std::string& item : split_commas(v)) {
        if (item == "inf") {
            out.push_back(SIZE_MAX);
            continue;
        }
        try {
            out.push_back(static_cast<std::size_t>(std::stoull(item)));
        } catch (...) {
            fail("config: key '" + key + "' has a bad entry: " + item);
        }
    }
    require(!out.empty(), "config: key '" + key + "' is an empty list");
    return out;
}

std::size_t Resolver::batch_size(const std::string& key, std::size_t def) {
    const std::string v = str(key, def == 0 ? "full" : fmt_short(static_cast<double>(def)));
    if (v == "full") return 0;
    try {
        return static_cast<std::size_t>(std::stoull(v));
    } catch (...) {
        fail("config: key '" + key + "' must be a whole number or 'full': " + v);
    }
}

void Resolver::finish_validation() const {
    for (const auto& [key, value] : cfg_.entries()) {
        (void)value;
        if (std::find(seen_.begin(), seen_.end(), key) == seen_.end())
            fail("config: unknown key '" + key + "'");
    }
}

std::string Manifest::to_json() const {
    json j;
    j["experiment"] = experiment;
    j["version"] = version;
    j["config"] = config;
    j["dataset_digests"] = dataset_digests;
    j["outputs"] = outputs;
    j["results"] = results;
    j["threads"] = threads;
    return j.dump(2) + "\n";
}

std::vector<std::optional<std::size_t>> threshold_crossing_epochs(
    const spectral::SpectrumTrace& trace, double threshold) {
    require(threshold > 0.0 && threshold <= 1.0, "threshold_crossing_epochs: threshold in (0,1]");
    std::vector<std::optional<std::size_t>> out(trace.grid.size());
    for (std::size_t g = 0; g < trace.grid.size(); ++g) {
        bool defined = false;
        for (std::size_t e = 0; e < trace.epochs.size(); ++e) {
            const double v = trace.rel_err[e][g];
            if (std::isnan(v)) continue;
            defined = true;
            if (v < threshold) {
                out[g] = trace.epochs[e];
                break;
            }
        }
        require(defined, "threshold_crossing_epochs: frequency absent from trace");
    }
    return out;
}

namespace {

// ---------------------------------------------------------------- helpers

struct Ctx {
    const Config& cfg;
    std::string out_dir;
    bool svg = false;
    Manifest manifest;

    std::string path(const std::string& file) {
        manifest.outputs.push_back(file);
        return (fs::path(out_dir) / file).string();
    }
};

// `scale = desk` (default) or `scale = paper`: paper-* presets carry the
// published hyperparameters, desk-* the scaled-down ones. The manifest
// records the preset name and every materialized value.
bool resolve_scale(Ctx& ctx, Resolver& r, const std::string& experiment) {
    const std::string scale = r.str("scale", "desk");
    require(scale == "desk" || scale == "paper", "config: scale must be desk or paper");
    ctx.manifest.results["preset_name"] = scale + "-" + experiment;
    return scale == "paper";
}

void write_crossings_csv(const std::string& path, const Vec& freqs,
                         const std::vector<std::optional<std::size_t>>& epochs, double threshold) {
    std::string out = "k,threshold,first_epoch_below\n";
    for (std::size_t i = 0; i < freqs.size(); ++i) {
        out += fmt_short(freqs[i]);
        out += ',';
        out += fmt_short(threshold);
        out += ',';
        out += epochs[i] ? std::to_string(*epochs[i]) : "never";
        out += '\n';
    }
    std::ofstream f(path, std::ios::binary);
    require(f.good(), "write_crossings_csv: cannot open " + path);
    f << out;
}

// spectrum of scalar values sampled on arbitrary 1-d inputs, at freqs
CVec spectrum_1d(const Vec& xs, const Vec& values, const Vec& freqs) {
    Mat inputs(xs.size(), 1);
    for (std::size_t i = 0; i < xs.size(); ++i) inputs.at(i, 0) = xs[i];
    return spectral::nonuniform_ft(inputs, values, Vec{1.0}, freqs);
}

Vec magnitudes(const CVec& c) {
    Vec m(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) m[i] = std::abs(c[i]);
    return m;
}

void delta_f_svg(Ctx& ctx, const std::string& file, const spectral::SpectrumTrace& trace,
                 const std::string& title) {
    std::vector<svg::Series> series;
    for (std::size_t g = 0; g < trace.grid.size(); ++g) {
        svg::Series s;
        s.name = "k=" + fmt_short(trace.grid[g]);
        for (std::size_t e = 0; e < trace.epochs.size(); ++e) {
            if (std::isnan(trace.rel_err[e][g])) continue;
            s.x.push_back(static_cast<double>(trace.epochs[e]));
            s.y.push_back(trace.rel_err[e][g]);
        }
        series.push_back(std::move(s));
    }
    svg::write_line_plot(ctx.path(file), title, "epoch", "delta_F", series, false, true);
}

// ------------------------------------------------------------- synth1d

void run_synth1d(Ctx& ctx, Resolver& r) {
    const std::string preset = r.str("preset", "appA");
    datasets::Synth1dSpec spec = datasets::synth_preset(preset);
    spec.n = r.count("n", spec.n);
    const bool paper = resolve_scale(ctx, r, "synth1d");
    auto widths = r.count_list("widths", paper ? std::vector<std::size_t>{1, 8000, 1}
                                               : std::vector<std::size_t>{1, 200, 1});
    const double lr = r.num("lr", 2e-4);
    const double init_std = r.num("init_std", 0.1);
    const std::size_t epochs = r.count("epochs", 40000);
    const std::size_t record_every = r.count("record_every", 50);
    const std::uint64_t seed = r.count("seed", 1);
    const std::size_t peak_count = r.count("peak_count", spec.frequencies.size());
    const double threshold = r.num("threshold", 0.3);
    const bool stop_when_crossed = r.flag("stop_when_crossed", true);
    r.finish_validation();

    auto ds = datasets::synth_1d(spec);
    ds.provenance = preset;
    ctx.manifest.dataset_digests[preset] = datasets::dataset_digest(ds);

    // DFT index grid (cycles per window); peaks from the first half
    const std::size_t n = spec.n;
    Vec labels(ds.labels.data);
    CVec full = spectral::dft_1d(labels);
    Vec half_mag;
    for (std::size_t k = 0; k <= n / 2; ++k) half_mag.push_back(std::abs(full[k]));
    auto peaks = spectral::select_peak_frequencies(half_mag, peak_count);

    // samples sit on i/n in window units, so the DFT index is the frequency
    Vec xs_unit(n);
    for (std::size_t i = 0; i < n; ++i) xs_unit[i] = static_cast<double>(i) / static_cast<double>(n);
    Vec grid;
    CVec target;
    for (std::size_t p : peaks) {
        grid.push_back(static_cast<double>(p));
        target.push_back(full[p]);
    }
    auto trace = spectral::make_spectrum_trace(grid, target);

    nn::Dataset data{ds.inputs, ds.labels};
    auto params = nn::init_network(widths, nn::Activation::Tanh, nn::OutputHead::Linear, init_std,
                                   seed);
    nn::AdamState adam = nn::make_adam_state(params);
    auto record = [&](std::size_t epoch) {
        Mat out = nn::forward(params, ds.inputs);
        Vec h(out.data);
        spectral::trace_append(trace, epoch, spectrum_1d(xs_unit, h, grid));
        const auto& rel = trace.rel_err.back();
        return *std::max_element(rel.begin(), rel.end());
    };

    record(0);
    std::size_t ran = 0;
    for (std::size_t epoch = 1; epoch <= epochs; ++epoch) {
        auto g = nn::loss_and_grad(params, data.inputs, data.labels, nn::LossKind::Mse);
        nn::adam_step(params, adam, g, lr);
        ran = epoch;
        if (epoch % record_every == 0 || epoch == epochs) {
            const double worst = record(epoch);
            if (stop_when_crossed && worst < threshold) break;
        }
    }
    ctx.manifest.results["epochs_run"] = std::to_string(ran);
    ctx.manifest.results["final_loss"] =
        fmt_num(nn::loss_and_grad(params, data.inputs, data.labels, nn::LossKind::Mse).loss);

    spectral::write_spectrum_csv(trace, ctx.path("synth1d_trace.csv"));
    auto crossings = threshold_crossing_epochs(trace, threshold);
    write_crossings_csv(ctx.path("synth1d_crossings.csv"), grid, crossings, threshold);
    for (std::size_t g = 0; g < grid.size(); ++g)
        ctx.manifest.results["crossing_k" + fmt_short(grid[g])] =
            crossings[g] ? std::to_string(*crossings[g]) : "never";
    if (ctx.svg) {
        svg::write_spectrum_plot(ctx.path("synth1d_spectrum.svg"), "target spectrum (" + preset + ")",
                                 [&] {
                                     Vec f(half_mag.size());
                                     for (std::size_t i = 0; i < f.size(); ++i) f[i] = i;
                                     return f;
                                 }(),
                                 half_mag, peaks);
        delta_f_svg(ctx, "synth1d_delta_f.svg", trace, "relative spectral error per peak");
    }
}

// ------------------------------------------------------------- project

datasets::LabeledDataset load_image_dataset(Ctx& ctx, Resolver& r) {
    const std::string images = r.str("images", "data/digits-images.idx3-ubyte");
    const std::string labels = r.str("labels", "data/digits-labels.idx1-ubyte");
    const std::size_t subset = r.count("subset", 0);
    const std::uint64_t seed = r.count("seed", 0);
    const std::size_t expand_count = r.count("expand_count", 5000);
    const std::size_t expand_hw = r.count("expand_hw", 28);
    const std::size_t expand_shift = r.count("expand_shift", 2);

    auto ds = datasets::load_idx(images, labels, subset, seed);
    if (expand_count > 0) {
        const std::size_t hw = static_cast<std::size_t>(std::lround(std::sqrt(
            static_cast<double>(ds.inputs.cols))));
        require(hw * hw == ds.inputs.cols, "expand: dataset is not square-image shaped");
        ds = datasets::expand_images(ds, hw, hw, expand_hw, expand_hw, expand_count,
                                     static_cast<int>(expand_shift), seed + 1);
    }
    ctx.manifest.dataset_digests["dataset"] = datasets::dataset_digest(ds);
    return ds;
}

void run_project(Ctx& ctx, Resolver& r) {
    auto ds = load_image_dataset(ctx, r);
    const bool paper = resolve_scale(ctx, r, "project");
    auto widths = r.count_list(
        "widths", paper ? std::vector<std::size_t>{ds.inputs.cols, 400, 200, ds.labels.cols}
                        : std::vector<std::size_t>{ds.inputs.cols, 64, 32, ds.labels.cols});
    const double lr = r.num("lr", paper ? 1e-3 : 3e-3);
    const double init_std = r.num("init_std", 0.05);
    const std::size_t epochs = r.count("epochs", 300);
    const std::size_t record_every = r.count("record_every", 5);
    const std::uint64_t seed = r.count("seed", 0);
    const std::size_t component = r.count("component", 3);
    const std::size_t freq_count = r.count("freq_count", 40);
    const std::size_t peak_count = r.count("peak_count", 4);
    const std::string loss_name = r.str("loss", "cross_entropy_softmax");
    std::size_t batch = r.batch_size("batch", paper ? 10000 : 0);
    if (batch > ds.inputs.rows) batch = 0;  // a batch beyond the dataset is full batch
    const double threshold = r.num("threshold", 0.3);
    r.finish_validation();

    require(component < ds.labels.cols, "project: component out of range");
    const nn::LossKind loss = nn::loss_from_string(loss_name);
    const nn::OutputHead head = loss == nn::LossKind::CrossEntropySoftmax
                                    ? nn::OutputHead::Softmax
                                    : nn::OutputHead::Linear;

    // first principal component and the projected frequency grid
    auto pd = spectral::principal_direction(ds.inputs);
    Vec proj(ds.inputs.rows);
    for (std::size_t s = 0; s < ds.inputs.rows; ++s) {
        double acc = 0.0;
        for (std::size_t j = 0; j < ds.inputs.cols; ++j)
            acc += pd.direction[j] * ds.inputs.at(s, j);
        proj[s] = acc;
    }
    const auto [lo_it, hi_it] = std::minmax_element(proj.begin(), proj.end());
    const double range = *hi_it - *lo_it;
    require(range > 0.0, "project: degenerate projection");
    Vec grid(freq_count);
    for (std::size_t j = 0; j < freq_count; ++j) grid[j] = static_cast<double>(j) / range;
    ctx.manifest.results["projection_range"] = fmt_num(range);
    ctx.manifest.results["top_eigenvalue"] = fmt_num(pd.eigenvalue);

    Vec scalar_labels(ds.inputs.rows);
    for (std::size_t s = 0; s < ds.inputs.rows; ++s) scalar_labels[s] = ds.labels.at(s, component);
    CVec spectrum = spectral::nonuniform_ft(ds.inputs, scalar_labels, pd.direction, grid);
    Vec mags = magnitudes(spectrum);
    // selection runs over the nonzero frequencies; the DC bin is the class
    // balance and matches almost immediately
    Vec mags_nonzero(mags.begin() + 1, mags.end());
    auto peaks = spectral::select_peak_frequencies(mags_nonzero, peak_count);
    for (std::size_t& p : peaks) p += 1;

    Vec peak_grid;
    CVec peak_target;
    for (std::size_t p : peaks) {
        peak_grid.push_back(grid[p]);
        peak_target.push_back(spectrum[p]);
    }
    auto trace = spectral::make_spectrum_trace(peak_grid, peak_target);

    auto params = nn::init_network(widths, nn::Activation::Tanh, head, init_std, seed);
    nn::TrainConfig tc;
    tc.loss = loss;
    tc.optimizer = nn::OptimizerKind::Adam;
    tc.learning_rate = lr;
    tc.batch_size = batch;
    tc.epochs = epochs;
    tc.record_every = record_every;
    tc.seed = seed;
    nn::Dataset data{ds.inputs, ds.labels};
    auto training = nn::train(params, data, tc, &ds.inputs,
                              [&](std::size_t epoch, const Mat& outputs) {
                                  Vec h(outputs.rows);
                                  for (std::size_t s = 0; s < outputs.rows; ++s)
                                      h[s] = outputs.at(s, component);
                                  spectral::trace_append(
                                      trace, epoch,
                                      spectral::nonuniform_ft(ds.inputs, h, pd.direction,
                                                              peak_grid));
                              });

    // training-set accuracy of the categorical head, recorded but not gated
    if (!ds.class_index.empty()) {
        Mat out = nn::forward(params, ds.inputs);
        std::size_t hit = 0;
        for (std::size_t s = 0; s < out.rows; ++s) {
            const std::size_t arg =
                std::max_element(out.row(s), out.row(s) + out.cols) - out.row(s);
            if (static_cast<int>(arg) == ds.class_index[s]) ++hit;
        }
        ctx.manifest.results["train_accuracy"] =
            fmt_num(static_cast<double>(hit) / static_cast<double>(out.rows));
    }
    ctx.manifest.results["final_loss"] = fmt_num(training.records.back().loss);

    spectral::write_spectrum_csv(trace, ctx.path("project_trace.csv"));
    auto crossings = threshold_crossing_epochs(trace, threshold);
    write_crossings_csv(ctx.path("project_crossings.csv"), peak_grid, crossings, threshold);
    if (ctx.svg) {
        svg::write_spectrum_plot(ctx.path("project_spectrum.svg"),
                                 "target spectrum along the first principal component", grid, mags,
                                 peaks);
        delta_f_svg(ctx, "project_delta_f.svg", trace, "delta_F at the selected peaks");
    }
}

// ------------------------------------------------------------- filter

void run_filter(Ctx& ctx, Resolver& r) {
    auto ds = load_image_dataset(ctx, r);
    const bool paper = resolve_scale(ctx, r, "filter");
    auto widths = r.count_list(
        "widths", paper ? std::vector<std::size_t>{ds.inputs.cols, 400, 200, ds.labels.cols}
                        : std::vector<std::size_t>{ds.inputs.cols, 64, 32, ds.labels.cols});
    const double lr = r.num("lr", paper ? 0.015 : 1e-2);
    const double init_std = r.num("init_std", 0.05);
    const std::size_t epochs = r.count("epochs", 200);
    const std::size_t record_every = r.count("record_every", 5);
    const std::uint64_t seed = r.count("seed", 5);
    std::size_t batch = r.batch_size("batch", paper ? 10000 : 0);
    if (batch > ds.inputs.rows) batch = 0;
    Vec deltas = r.num_list("deltas", {3.0, 7.0});
    const double stop_e_low = r.num("stop_e_low", 0.3);
    r.finish_validation();

    spectral::KernelCache kernel(ds.inputs);
    struct Filtered {
        double delta;
        Mat low, high;
        bool done = false;
    };
    std::vector<Filtered> targets;
    for (double d : deltas) {
        Filtered f;
        f.delta = d;
        f.low = kernel.filter_low(ds.labels, d);
        f.high = Mat(ds.labels.rows, ds.labels.cols);
        for (std::size_t i = 0; i < ds.labels.data.size(); ++i)
            f.high.data[i] = ds.labels.data[i] - f.low.data[i];
        targets.push_back(std::move(f));
    }

    auto params = nn::init_network(widths, nn::Activation::Tanh, nn::OutputHead::Linear, init_std,
                                   seed);
    nn::AdamState adam = nn::make_adam_state(params);
    std::vector<spectral::FilterTraceRow> rows;
    std::map<std::string, std::vector<double>> dist_series;  // per delta, for T_delta
    std::vector<std::size_t> recorded_epochs;

    auto record = [&](std::size_t epoch) {
        Mat out = nn::forward(params, ds.inputs);
        recorded_epochs.push_back(epoch);
        bool all_done = true;
        for (auto& t : targets) {
            if (t.done) continue;
            Mat h_low = kernel.filter_low(out, t.delta);
            Mat h_high(out.rows, out.cols);
            for (std::size_t i = 0; i < out.data.size(); ++i)
                h_high.data[i] = out.data[i] - h_low.data[i];
            spectral::FilteredDataset proxy;
            proxy.low = t.low;
            proxy.high = t.high;
            auto e = spectral::e_low_e_high(proxy, h_low, h_high);
            double dist = 0.0;
            for (std::size_t i = 0; i < out.data.size(); ++i) {
                const double dv = out.data[i] - t.low.data[i];
                dist += dv * dv;
            }
            dist /= static_cast<double>(out.rows);
            rows.push_back({epoch, t.delta, e.e_low, e.e_high, dist});
            dist_series["d" + fmt_short(t.delta)].push_back(dist);
            if (stop_e_low > 0.0 && e.e_low < stop_e_low) t.done = true;
            if (!t.done) all_done = false;
        }
        return all_done;
    };

    nn::Dataset data{ds.inputs, ds.labels};
    const std::size_t n = ds.inputs.rows;
    Rng shuffle_rng(seed);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    bool done = false;
    std::size_t ran = 0;
    for (std::size_t epoch = 1; epoch <= epochs && !done; ++epoch) {
        if (batch == 0 || batch >= n) {
            auto g = nn::loss_and_grad(params, data.inputs, data.labels, nn::LossKind::Mse);
            nn::adam_step(params, adam, g, lr);
        } else {
            shuffle_rng.shuffle(order);
            for (std::size_t lo = 0; lo < n; lo += batch) {
                const std::size_t hi = std::min(n, lo + batch);
                Mat bx(hi - lo, data.inputs.cols), by(hi - lo, data.labels.cols);
                for (std::size_t t = lo; t < hi; ++t) {
                    std::memcpy(bx.row(t - lo), data.inputs.row(order[t]),
                                data.inputs.cols * sizeof(double));
                    std::memcpy(by.row(t - lo), data.labels.row(order[t]),
                                data.labels.cols * sizeof(double));
                }
                auto g = nn::loss_and_grad(params, bx, by, nn::LossKind::Mse);
                nn::adam_step(params, adam, g, lr);
            }
        }
        ran = epoch;
        if (epoch % record_every == 0 || epoch == epochs) done = record(epoch);
    }
    ctx.manifest.results["epochs_run"] = std::to_string(ran);

    spectral::write_filter_csv(rows, ctx.path("filter_trace.csv"));
    // turning epochs per delta over the recorded window
    for (const auto& [name, series] : dist_series) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < series.size(); ++i)
            if (series[i] < series[best]) best = i;
        ctx.manifest.results["turning_epoch_" + name] = std::to_string(recorded_epochs[best]);
    }
    if (ctx.svg) {
        // one heatmap panel per measure; rows = deltas, cols = epochs
        std::vector<svg::Heatmap> panels(2);
        panels[0].title = "e_low";
        panels[1].title = "e_high";
        std::size_t max_cols = 0;
        for (auto& p : panels) {
            p.values = Mat(deltas.size(), recorded_epochs.size(), 1.0);
            for (std::size_t d = 0; d < deltas.size(); ++d)
                p.row_labels.push_back("delta=" + fmt_short(deltas[d]));
            for (std::size_t e : recorded_epochs) p.col_labels.push_back(std::to_string(e));
            max_cols = std::max(max_cols, recorded_epochs.size());
        }
        for (const auto& row : rows) {
            const std::size_t d =
                std::find(deltas.begin(), deltas.end(), row.delta) - deltas.begin();
            const std::size_t e = std::find(recorded_epochs.begin(), recorded_epochs.end(),
                                            row.epoch) -
                                  recorded_epochs.begin();
            panels[0].values.at(d, e) = row.e_low;
            panels[1].values.at(d, e) = row.e_high;
        }
        svg::write_heatmap(ctx.path("filter_heatmap.svg"), "epoch", "delta", panels);
    }
}

// ------------------------------------------------------------- poisson

void run_poisson(Ctx& ctx, Resolver& r) {
    const std::string problem_name = r.str("problem", "paper-poisson");
    require(problem_name == "paper-poisson", "config: unknown problem preset " + problem_name);
    const bool paper = resolve_scale(ctx, r, "poisson");
    const std::size_t n = r.count("n", 1000);
    pde::SolveConfig sc;
    sc.widths = r.count_list("widths", paper ? std::vector<std::size_t>{1, 4000, 500, 400, 1}
                                             : std::vector<std::size_t>{1, 400, 100, 1});
    sc.learning_rate = r.num("lr", 5e-4);
    sc.init_std = r.num("init_std", 0.02);
    sc.beta = r.num("beta", 10.0);
    sc.epochs = r.count("epochs", 3000);
    sc.record_every = r.count("record_every", 25);
    sc.seed = r.count("seed", 6);
    const std::size_t jacobi_sweeps = r.count("jacobi_sweeps", 130000);
    const std::size_t jacobi_record = r.count("jacobi_record", 50);
    const double dnn_threshold = r.num("dnn_threshold", 0.2);
    const double jacobi_threshold = r.num("jacobi_threshold", 0.1);
    const double stop_delta_f = r.num("stop_delta_f", 0.2);
    const std::size_t freq_count = r.count("freq_count", 40);
    r.finish_validation();

    auto problem = pde::paper_poisson();
    {
        pde::GridField grid = pde::make_grid(problem.a, problem.b, n);
        datasets::LabeledDataset prov;
        prov.inputs = Mat(grid.x.size(), 1);
        prov.labels = Mat(grid.x.size(), 1);
        for (std::size_t i = 0; i < grid.x.size(); ++i) {
            prov.inputs.at(i, 0) = grid.x[i];
            prov.labels.at(i, 0) = problem.u_ref(grid.x[i]);
        }
        ctx.manifest.dataset_digests["grid_reference"] = datasets::dataset_digest(prov);
    }
    sc.stop_delta_f = stop_delta_f;
    pde::PdeTrace dnn = pde::dnn_solve(problem, n, sc);
    pde::PdeTrace jac = pde::jacobi_solve(problem, n, jacobi_sweeps, jacobi_record);

    pde::write_pde_csv(dnn, ctx.path("poisson_dnn.csv"));
    pde::write_pde_csv(jac, ctx.path("poisson_jacobi.csv"));

    auto crossings = [&](const pde::PdeTrace& trace, double threshold) {
        std::vector<std::optional<std::size_t>> out(trace.peak_freqs.size());
        for (std::size_t g = 0; g < trace.peak_freqs.size(); ++g) {
            for (const auto& row : trace.rows) {
                if (row.delta_f[g] < threshold) {
                    out[g] = row.step;
                    break;
                }
            }
        }
        return out;
    };
    auto dnn_cross = crossings(dnn, dnn_threshold);
    auto jac_cross = crossings(jac, jacobi_threshold);
    write_crossings_csv(ctx.path("poisson_dnn_crossings.csv"), problem.peak_grid_freqs, dnn_cross,
                        dnn_threshold);
    write_crossings_csv(ctx.path("poisson_jacobi_crossings.csv"), problem.peak_grid_freqs,
                        jac_cross, jacobi_threshold);
    for (std::size_t g = 0; g < problem.peak_grid_freqs.size(); ++g) {
        const std::string k = fmt_short(problem.peak_grid_freqs[g]);
        ctx.manifest.results["dnn_crossing_k" + k] =
            dnn_cross[g] ? std::to_string(*dnn_cross[g]) : "never";
        ctx.manifest.results["jacobi_crossing_k" + k] =
            jac_cross[g] ? std::to_string(*jac_cross[g]) : "never";
    }

    if (ctx.svg) {
        pde::GridField grid = pde::make_grid(problem.a, problem.b, n);
        Vec uref(grid.x.size());
        for (std::size_t i = 0; i < uref.size(); ++i) uref[i] = problem.u_ref(grid.x[i]);
        Vec freqs = pde::diagnostic_grid(problem.b - problem.a, freq_count);
        CVec spec = spectrum_1d(grid.x, uref, freqs);
        std::vector<std::size_t> peak_idx;
        for (double k : problem.peak_grid_freqs)
            peak_idx.push_back(static_cast<std::size_t>(std::lround(k * 2.0 * (problem.b - problem.a))));
        svg::write_spectrum_plot(ctx.path("poisson_spectrum.svg"), "reference solution spectrum",
                                 freqs, magnitudes(spec), peak_idx);
        for (const auto* tr : {&dnn, &jac}) {
            std::vector<svg::Series> series;
            for (std::size_t g = 0; g < tr->peak_freqs.size(); ++g) {
                svg::Series s;
                s.name = "k=" + fmt_short(tr->peak_freqs[g]);
                for (const auto& row : tr->rows) {
                    s.x.push_back(static_cast<double>(row.step));
                    s.y.push_back(row.delta_f[g]);
                }
                series.push_back(std::move(s));
            }
            svg::write_line_plot(ctx.path(tr == &dnn ? "poisson_dnn_delta_f.svg"
                                                     : "poisson_jacobi_delta_f.svg"),
                                 tr == &dnn ? "DNN solver" : "Jacobi",
                                 tr == &dnn ? "epoch" : "sweep", "delta_F", series, false, true);
        }
    }
}

// ------------------------------------------------------------- hybrid

void run_hybrid(Ctx& ctx, Resolver& r) {
    const std::string problem_name = r.str("problem", "paper-poisson");
    require(problem_name == "paper-poisson", "config: unknown problem preset " + problem_name);
    const std::size_t n = r.count("n", 4000);
    pde::SolveConfig sc;
    sc.widths = r.count_list("widths", {1, 32, 32, 1});
    sc.learning_rate = r.num("lr", 1e-2);
    sc.init_std = r.num("init_std", 0.5);
    sc.beta = r.num("beta", 10.0);
    sc.epochs = r.count("dnn_epochs_cap", 800);
    sc.record_every = r.count("record_every", 25);
    sc.seed = r.count("seed", 3);
    auto handoffs = r.count_list_with_inf("m_list", "0,50,75,100,125,150,200,300,400,600,inf");
    const double sup_target = r.num("sup_target", 5e-2);
    const std::size_t jacobi_budget = r.count("jacobi_budget", 3000000);
    const std::size_t jacobi_record = r.count("jacobi_record", 500);
    r.finish_validation();

    auto problem = pde::paper_poisson();
    {
        pde::GridField grid = pde::make_grid(problem.a, problem.b, n);
        datasets::LabeledDataset prov;
        prov.inputs = Mat(grid.x.size(), 1);
        prov.labels = Mat(grid.x.size(), 1);
        for (std::size_t i = 0; i < grid.x.size(); ++i) {
            prov.inputs.at(i, 0) = grid.x[i];
            prov.labels.at(i, 0) = problem.u_ref(grid.x[i]);
        }
        ctx.manifest.dataset_digests["grid_reference"] = datasets::dataset_digest(prov);
    }
    auto result =
        pde::hybrid_solve(problem, n, sc, handoffs, sup_target, jacobi_budget, jacobi_record);

    std::string summary = "M,reached,cost_to_target\n";
    std::vector<svg::Series> series;
    for (const auto& leg : result.legs) {
        const std::string mname = leg.handoff_epoch == SIZE_MAX
                                      ? "inf"
                                      : std::to_string(leg.handoff_epoch);
        summary += mname;
        summary += leg.reached ? ",yes," : ",no,";
        summary += leg.reached ? fmt_num(leg.cost_to_target) : "over_budget";
        summary += '\n';
        pde::write_pde_csv(leg.trace, ctx.path("hybrid_M" + mname + ".csv"));
        ctx.manifest.results["cost_M" + mname] =
            leg.reached ? fmt_num(leg.cost_to_target) : "over_budget";
        if (ctx.svg) {
            svg::Series s;
            s.name = "M=" + mname;
            for (const auto& row : leg.trace.rows) {
                if (row.cost_units <= 0.0) continue;
                s.x.push_back(row.cost_units);
                s.y.push_back(row.sup_norm_err);
            }
            if (!s.x.empty()) series.push_back(std::move(s));
        }
    }
    {
        std::ofstream f(ctx.path("hybrid_summary.csv"), std::ios::binary);
        require(f.good(), "hybrid: cannot write summary");
        f << summary;
    }
    if (ctx.svg && !series.empty())
        svg::write_line_plot(ctx.path("hybrid_error_vs_cost.svg"), "sup-norm error vs cost",
                             "cost units", "|h－u_ref|_inf", series, true, true);
}

// ------------------------------------------------------------- theory

void run_theory(Ctx& ctx, Resolver& r) {
    theory::TheoremConfig tc;
    tc.m = r.count("m", 4);
    tc.k1 = r.num("k1", 1.0);
    tc.k2 = r.num("k2", 3.0);
    tc.f1 = Complex(r.num("amp1", 1.0), 0.0);
    tc.f2 = Complex(r.num("amp2", 1.0), 0.0);
    tc.a_const = r.num("a_const", 1.0);
    tc.b_const = r.num("b_const", 0.5);
    tc.samples = r.count("samples", 100000);
    tc.seed = r.count("seed", 0);
    Vec deltas = r.num_list("deltas", {2.0, 1.0, 0.5, 0.25});
    r.finish_validation();

    std::vector<theory::TheoryCsvRow> rows;
    for (double d : deltas) {
        theory::TheoremConfig c = tc;
        c.delta = d;
        rows.push_back({d, c.samples, theory::theorem_ratios(c)});
        ctx.manifest.results["thm1_delta" + fmt_short(d)] = fmt_num(rows.back().est.thm1.ratio);
        ctx.manifest.results["thm2_delta" + fmt_short(d)] = fmt_num(rows.back().est.thm2.ratio);
    }
    theory::write_theory_csv(rows, ctx.path("theory.csv"));
    if (ctx.svg) {
        svg::Series s1, s2;
        s1.name = "theorem 1";
        s2.name = "theorem 2";
        for (const auto& row : rows) {
            s1.x.push_back(row.delta);
            s1.y.push_back(row.est.thm1.ratio);
            s2.x.push_back(row.delta);
            s2.y.push_back(row.est.thm2.ratio);
        }
        svg::write_line_plot(ctx.path("theory_ratios.svg"), "dominance ratios vs ball radius",
                             "delta", "ratio", {s1, s2}, false, false);
    }
}

// ------------------------------------------------------------- parity

void run_parity(Ctx& ctx, Resolver& r) {
    datasets::ParitySpec spec;
    spec.dimension = r.count("d", 10);
    spec.subset_size = r.count("s", 200);
    spec.seed = r.count("seed", 45);
    const bool paper = resolve_scale(ctx, r, "parity");
    auto widths = r.count_list("widths", paper ? std::vector<std::size_t>{spec.dimension, 500, 100, 1}
                                               : std::vector<std::size_t>{spec.dimension, 128, 64, 1});
    const double lr = r.num("lr", paper ? 5e-4 : 3e-3);
    const double init_std = r.num("init_std", 0.05);
    const std::size_t epochs = r.count("epochs", 6000);
    const std::size_t record_every = r.count("record_every", 200);
    const std::size_t freq_den = r.count("freq_denominator", 64);
    const std::size_t freq_count = r.count("freq_count", 33);
    r.finish_validation();

    datasets::ParitySpec full_spec;
    full_spec.dimension = spec.dimension;
    auto full = datasets::parity_dataset(full_spec);
    auto train_set = datasets::parity_dataset(spec);
    ctx.manifest.dataset_digests["train_subset"] = datasets::dataset_digest(train_set);

    // per-coordinate frequencies along the all-ones direction; the unit
    // projection direction rescales the grid by sqrt(d)
    const double root_d = std::sqrt(static_cast<double>(spec.dimension));
    Vec k_grid(freq_count);
    for (std::size_t j = 0; j < freq_count; ++j)
        k_grid[j] = static_cast<double>(j) / static_cast<double>(freq_den);
    Vec proj_grid(freq_count);
    for (std::size_t j = 0; j < freq_count; ++j) proj_grid[j] = k_grid[j] * root_d;
    Vec ones_dir(spec.dimension, 1.0 / root_d);

    CVec fhat(freq_count);
    for (std::size_t j = 0; j < freq_count; ++j)
        fhat[j] = datasets::parity_exact_ft(spec.dimension, Vec(spec.dimension, k_grid[j]));
    Vec sub_labels(train_set.labels.data);
    CVec fhat_S =
        spectral::nonuniform_ft(train_set.inputs, sub_labels, ones_dir, proj_grid);

    // train on the subset, evaluate the spectrum on the full domain
    auto params = nn::init_network(widths, nn::Activation::Tanh, nn::OutputHead::Linear, init_std,
                                   spec.seed + 100);
    nn::TrainConfig tc;
    tc.loss = nn::LossKind::Mse;
    tc.optimizer = nn::OptimizerKind::Adam;
    tc.learning_rate = lr;
    tc.epochs = epochs;
    tc.record_every = record_every;
    tc.seed = spec.seed + 100;

    auto trace = spectral::make_spectrum_trace(k_grid, fhat_S);
    nn::Dataset data{train_set.inputs, train_set.labels};
    auto training = nn::train(params, data, tc, &full.inputs,
                              [&](std::size_t epoch, const Mat& outputs) {
                                  Vec h(outputs.data);
                                  spectral::trace_append(
                                      trace, epoch,
                                      spectral::nonuniform_ft(full.inputs, h, ones_dir, proj_grid));
                              });
    ctx.manifest.results["final_loss"] = fmt_num(training.records.back().loss);

    spectral::write_spectrum_csv(trace, ctx.path("parity_trace.csv"));
    // summary: exact vs sampled vs trained model at each k
    {
        std::string out = "k,abs_fhat,abs_fhat_S,abs_hhat,abs_fhatS_minus_fhat,abs_hhat_minus_fhat\n";
        const CVec& hh = trace.model.back();
        for (std::size_t j = 0; j < freq_count; ++j) {
            char buf[200];
            std::snprintf(buf, sizeof buf, "%g,%.17g,%.17g,%.17g,%.17g,%.17g\n", k_grid[j],
                          std::abs(fhat[j]), std::abs(fhat_S[j]), std::abs(hh[j]),
                          std::abs(fhat_S[j] - fhat[j]), std::abs(hh[j] - fhat[j]));
            out += buf;
        }
        std::ofstream f(ctx.path("parity_spectra.csv"), std::ios::binary);
        require(f.good(), "parity: cannot write spectra csv");
        f << out;
    }
    ctx.manifest.results["fhatS_at_0"] = fmt_num(std::abs(fhat_S[0]));

    if (ctx.svg) {
        svg::Series se, ss, sh;
        se.name = "|fhat| exact";
        ss.name = "|fhat_S| subset";
        sh.name = "|hhat| trained";
        const CVec& hh = trace.model.back();
        for (std::size_t j = 0; j < freq_count; ++j) {
            se.x.push_back(k_grid[j]);
            se.y.push_back(std::abs(fhat[j]));
            ss.x.push_back(k_grid[j]);
            ss.y.push_back(std::abs(fhat_S[j]));
            sh.x.push_back(k_grid[j]);
            sh.y.push_back(std::abs(hh[j]));
        }
        svg::write_line_plot(ctx.path("parity_spectra.svg"),
                             "parity spectra along the all-ones direction", "k per coordinate",
                             "amplitude", {se, ss, sh}, false, false);
    }
}

// ------------------------------------------------------------- image2d

void run_image2d(Ctx& ctx, Resolver& r) {
    const std::string image = r.str("image", "data/scene.pgm");
    auto img = datasets::load_pgm(image);
    const std::size_t row = r.count("row", img.height / 2);
    const bool paper = resolve_scale(ctx, r, "image2d");
    auto widths = r.count_list("widths", paper ? std::vector<std::size_t>{2, 400, 200, 100, 1}
                                               : std::vector<std::size_t>{2, 128, 64, 1});
    const double lr = r.num("lr", paper ? 2e-4 : 1e-3);
    const double init_std = r.num("init_std", 0.08);
    const std::size_t epochs = r.count("epochs", 8000);
    const std::size_t record_every = r.count("record_every", 100);
    const std::uint64_t seed = r.count("seed", 1);
    const std::size_t peak_count = r.count("peak_count", 5);
    const double threshold = r.num("threshold", 0.3);
    r.finish_validation();
    require(row < img.height, "image2d: row out of range");

    // odd-column training split
    nn::Dataset data;
    std::size_t n_train = 0;
    for (bool t : img.training) n_train += t ? 1 : 0;
    data.inputs = Mat(n_train, 2);
    data.labels = Mat(n_train, 1);
    std::size_t w = 0;
    for (std::size_t i = 0; i < img.training.size(); ++i) {
        if (!img.training[i]) continue;
        data.inputs.at(w, 0) = img.inputs.at(i, 0);
        data.inputs.at(w, 1) = img.inputs.at(i, 1);
        data.labels.at(w, 0) = img.labels.at(i, 0);
        ++w;
    }
    {
        datasets::LabeledDataset prov;
        prov.inputs = img.inputs;
        prov.labels = img.labels;
        ctx.manifest.dataset_digests["image"] = datasets::dataset_digest(prov);
    }

    // the fixed-row slice: target f(x) along that row
    Mat slice_inputs(img.width, 2);
    Vec slice_target(img.width);
    for (std::size_t x = 0; x < img.width; ++x) {
        const std::size_t i = row * img.width + x;
        slice_inputs.at(x, 0) = img.inputs.at(i, 0);
        slice_inputs.at(x, 1) = img.inputs.at(i, 1);
        slice_target[x] = img.labels.at(i, 0);
    }
    CVec full_dft = spectral::dft_1d(slice_target);
    Vec half_mag;
    for (std::size_t k = 0; k <= img.width / 2; ++k) half_mag.push_back(std::abs(full_dft[k]));
    auto peaks = spectral::select_peak_frequencies(half_mag,
                                                   std::min(peak_count, half_mag.size()));
    Vec grid;
    CVec target;
    Vec xs_unit(img.width);
    for (std::size_t x = 0; x < img.width; ++x)
        xs_unit[x] = static_cast<double>(x) / static_cast<double>(img.width);
    for (std::size_t p : peaks) {
        grid.push_back(static_cast<double>(p));
        target.push_back(full_dft[p]);
    }
    auto trace = spectral::make_spectrum_trace(grid, target);

    auto params = nn::init_network(widths, nn::Activation::Tanh, nn::OutputHead::Linear, init_std,
                                   seed);
    nn::TrainConfig tc;
    tc.loss = nn::LossKind::Mse;
    tc.optimizer = nn::OptimizerKind::Adam;
    tc.learning_rate = lr;
    tc.epochs = epochs;
    tc.record_every = record_every;
    tc.seed = seed;
    auto training = nn::train(params, data, tc, &slice_inputs,
                              [&](std::size_t epoch, const Mat& outputs) {
                                  Vec h(outputs.data);
                                  spectral::trace_append(trace, epoch,
                                                         spectrum_1d(xs_unit, h, grid));
                              });
    ctx.manifest.results["final_loss"] = fmt_num(training.records.back().loss);

    spectral::write_spectrum_csv(trace, ctx.path("image2d_trace.csv"));
    auto crossings = threshold_crossing_epochs(trace, threshold);
    write_crossings_csv(ctx.path("image2d_crossings.csv"), grid, crossings, threshold);
    if (ctx.svg) {
        Vec f(half_mag.size());
        for (std::size_t i = 0; i < f.size(); ++i) f[i] = i;
        svg::write_spectrum_plot(ctx.path("image2d_spectrum.svg"), "row-slice spectrum", f,
                                 half_mag, peaks);
        delta_f_svg(ctx, "image2d_delta_f.svg", trace, "delta_F at the slice peaks");
    }
}

// ------------------------------------------------------------- ideal

void run_ideal(Ctx& ctx, Resolver& r) {
    const std::string amps = r.str("amps", "equal");
    const std::string order = r.str("order", "both");
    Vec deltas = r.num_list("deltas", {0.25, 0.5, 1.0, 2.0});
    const double t_max = r.num("t_max", 6.0);
    const double dt = r.num("dt", 1e-3);
    const std::size_t xn = r.count("x_n", 100);
    const double x_range = r.num("x_range", 6.28);
    r.finish_validation();
    require(order == "f" || order == "anti" || order == "both", "ideal: order must be f|anti|both");

    Vec xs(xn);
    for (std::size_t i = 0; i < xn; ++i)
        xs[i] = -x_range + 2.0 * x_range * static_cast<double>(i) / static_cast<double>(xn - 1);
    Mat inputs(xn, 1);
    for (std::size_t i = 0; i < xn; ++i) inputs.at(i, 0) = xs[i];

    std::vector<std::string> orders;
    if (order == "both") {
        orders = {"f", "anti"};
    } else {
        orders = {order};
    }
    for (const std::string& ord : orders) {
        auto model = theory::ideal_preset(amps, ord == "f");
        Vec y = theory::ideal_target(model, xs);
        Mat ymat(xn, 1);
        for (std::size_t i = 0; i < xn; ++i) ymat.at(i, 0) = y[i];
        {
            datasets::LabeledDataset prov;
            prov.inputs = inputs;
            prov.labels = ymat;
            ctx.manifest.dataset_digests["target_" + ord] = datasets::dataset_digest(prov);
        }

        std::vector<spectral::FilterTraceRow> rows;
        std::vector<svg::Series> series;
        for (double d : deltas) {
            auto filt = spectral::gaussian_low_high_split(inputs, ymat, d);
            svg::Series s;
            s.name = "delta=" + fmt_short(d);
            std::size_t best_step = 0;
            double best = std::numeric_limits<double>::infinity();
            const std::size_t steps = static_cast<std::size_t>(std::lround(t_max / dt));
            for (std::size_t step = 0; step <= steps; ++step) {
                const double t = dt * static_cast<double>(step);
                Vec h = theory::ideal_eval(model, xs, t);
                Mat hm(xn, 1);
                for (std::size_t i = 0; i < xn; ++i) hm.at(i, 0) = h[i];
                Mat h_low = spectral::filter_low(inputs, hm, d);
                Mat h_high(xn, 1);
                for (std::size_t i = 0; i < xn; ++i)
                    h_high.at(i, 0) = hm.at(i, 0) - h_low.at(i, 0);
                auto e = spectral::e_low_e_high(filt, h_low, h_high);
                double dist = 0.0;
                for (std::size_t i = 0; i < xn; ++i) {
                    const double dv = h[i] - filt.low.at(i, 0);
                    dist += dv * dv;
                }
                dist /= static_cast<double>(xn);
                if (dist < best) {
                    best = dist;
                    best_step = step;
                }
                if (step % 10 == 0) {
                    rows.push_back({step, d, e.e_low, e.e_high, dist});
                    s.x.push_back(t);
                    s.y.push_back(dist);
                }
            }
            ctx.manifest.results["T_" + ord + "_delta" + fmt_short(d)] =
                fmt_num(dt * static_cast<double>(best_step));
            series.push_back(std::move(s));
        }
        spectral::write_filter_csv(rows, ctx.path("ideal_" + ord + ".csv"));
        if (ctx.svg)
            svg::write_line_plot(ctx.path("ideal_" + ord + "_dist.svg"),
                                 ord == "f" ? "F-ordering" : "anti-F ordering", "t",
                                 "Dist(y_delta, h)", series, false, false);
    }
}

}  // namespace

const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names{"synth1d", "project", "filter",
                                                "poisson", "hybrid",  "theory",
                                                "parity",  "image2d", "ideal"};
    return names;
}

Manifest run_experiment(const std::string& name, const Config& config, const std::string& out_dir,
                        bool emit_svg) {
    const auto& names = experiment_names();
    require(std::find(names.begin(), names.end(), name) != names.end(),
            "unknown experiment: " + name);
    fs::create_directories(out_dir);

    Ctx ctx{config, out_dir, emit_svg, Manifest{}};
    ctx.manifest.experiment = name;
    ctx.manifest.version = FPL_VERSION;
    ctx.manifest.threads = worker_count();

    Resolver r(config);
    if (name == "synth1d")
        run_synth1d(ctx, r);
    else if (name == "project")
        run_project(ctx, r);
    else if (name == "filter")
        run_filter(ctx, r);
    else if (name == "poisson")
        run_poisson(ctx, r);
    else if (name == "hybrid")
        run_hybrid(ctx, r);
    else if (name == "theory")
        run_theory(ctx, r);
    else if (name == "parity")
        run_parity(ctx, r);
    else if (name == "image2d")
        run_image2d(ctx, r);
    else if (name == "ideal")
        run_ideal(ctx, r);

    ctx.manifest.config = r.resolved();
    const std::string mpath = (fs::path(out_dir) / "manifest.json").string();
    ctx.manifest.outputs.push_back("manifest.json");
    std::ofstream f(mpath, std::ios::binary);
    require(f.good(), "run_experiment: cannot write manifest");
    f << ctx.manifest.to_json();
    return ctx.manifest;
}

}  // namespace fpl::experiments
