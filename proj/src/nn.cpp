#include "fpl/nn.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

#include "fpl/rng.hpp"
#include "json.hpp"

namespace fpl::nn {

namespace {

inline double act_eval(Activation a, double z) {
    return a == Activation::Tanh ? std::tanh(z) : (z > 0.0 ? z : 0.0);
}

// derivative expressed through the activation value (tanh' = 1 - a^2)
inline double act_deriv(Activation a, double av, double z) {
    return a == Activation::Tanh ? 1.0 - av * av : (z > 0.0 ? 1.0 : 0.0);
}

void affine_forward(const Mat& W, const Vec& b, const Mat& in, Mat& out) {
    out = Mat(in.rows, W.rows);
    for (std::size_t s = 0; s < in.rows; ++s) {
        const double* x = in.row(s);
        double* z = out.row(s);
        for (std::size_t o = 0; o < W.rows; ++o) {
            const double* w = W.row(o);
            double acc = b[o];
            for (std::size_t i = 0; i < W.cols; ++i) acc += w[i] * x[i];
            z[o] = acc;
        }
    }
}

void softmax_rows(Mat& m) {
    for (std::size_t s = 0; s < m.rows; ++s) {
        double* z = m.row(s);
        double mx = z[0];
        for (std::size_t j = 1; j < m.cols; ++j) mx = std::max(mx, z[j]);
        double sum = 0.0;
        for (std::size_t j = 0; j < m.cols; ++j) {
            z[j] = std::exp(z[j] - mx);
            sum += z[j];
        }
        for (std::size_t j = 0; j < m.cols; ++j) z[j] /= sum;
    }
}

struct ForwardCache {
    std::vector<Mat> acts;    // acts[0] = inputs, acts[l+1] = activation of layer l
    Mat logits;               // pre-head output layer values
};

Mat forward_cached(const NetworkParams& p, const Mat& inputs, ForwardCache* cache) {
    require(inputs.cols == p.input_dim(), "forward: input dimension mismatch");
    for (double v : inputs.data)
        require(std::isfinite(v), "forward: non-finite input");
    Mat cur = inputs;
    if (cache) {
        cache->acts.clear();
        cache->acts.push_back(cur);
    }
    const std::size_t L = p.layer_count();
    Mat z;
    for (std::size_t l = 0; l < L; ++l) {
        affine_forward(p.weights[l], p.biases[l], cur, z);
        if (l + 1 < L) {
            for (double& v : z.data) v = act_eval(p.activation, v);
            cur = z;
            if (cache) cache->acts.push_back(cur);
        } else {
            cur = z;
        }
    }
    if (cache) cache->logits = cur;
    if (p.head == OutputHead::Softmax) softmax_rows(cur);
    return cur;
}

}  // namespace

std::size_t NetworkParams::param_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < weights.size(); ++l) n += weights[l].size() + biases[l].size();
    return n;
}

NetworkParams init_network(const std::vector<std::size_t>& widths, Activation act, OutputHead head,
                           double init_std, std::uint64_t seed) {
    require(widths.size() >= 2, "init_network: need at least input and output widths");
    for (std::size_t w : widths) require(w >= 1, "init_network: widths must be positive");
    require(init_std > 0.0, "init_network: init_std must be positive");

    NetworkParams p;
    p.widths = widths;
    p.activation = act;
    p.head = head;
    Rng rng(seed);
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
        Mat W(widths[l + 1], widths[l]);
        for (double& v : W.data) v = rng.normal(0.0, init_std);
        Vec b(widths[l + 1]);
        for (double& v : b) v = rng.normal(0.0, init_std);
        p.weights.push_back(std::move(W));
        p.biases.push_back(std::move(b));
    }
    return p;
}

Mat forward(const NetworkParams& params, const Mat& inputs) {
    return forward_cached(params, inputs, nullptr);
}

LossGrad loss_and_grad(const NetworkParams& p, const Mat& inputs, const Mat& labels,
                       LossKind kind) {
    require(inputs.rows > 0, "loss_and_grad: empty batch");
    require(inputs.rows == labels.rows, "loss_and_grad: inputs/labels row mismatch");
    const std::size_t B = inputs.rows;
    const std::size_t c = p.output_dim();

    const bool class_index_labels = labels.cols == 1 && c > 1;
    if (kind == LossKind::CrossEntropySoftmax) {
        require(p.head == OutputHead::Softmax, "loss_and_grad: cross-entropy needs softmax head");
        require(class_index_labels || labels.cols == c,
                "loss_and_grad: labels must be one-hot or class indices");
    } else {
        require(labels.cols == c, "loss_and_grad: label arity mismatch");
    }

    ForwardCache cache;
    Mat out = forward_cached(p, inputs, &cache);

    LossGrad g;
    g.dW.resize(p.layer_count());
    g.db.resize(p.layer_count());
    for (std::size_t l = 0; l < p.layer_count(); ++l) {
        g.dW[l] = Mat(p.weights[l].rows, p.weights[l].cols);
        g.db[l] = Vec(p.biases[l].size(), 0.0);
    }

    // dz = dL/d(logits)
    Mat dz(B, c);
    double loss = 0.0;
    if (kind == LossKind::CrossEntropySoftmax) {
        for (std::size_t s = 0; s < B; ++s) {
            const double* prob = out.row(s);
            std::size_t cls;
            if (class_index_labels) {
                cls = static_cast<std::size_t>(labels.at(s, 0));
                require(cls < c, "loss_and_grad: class index out of range");
            } else {
                cls = static_cast<std::size_t>(
                    std::max_element(labels.row(s), labels.row(s) + c) - labels.row(s));
            }
            loss -= std::log(std::max(prob[cls], 1e-300));
            double* d = dz.row(s);
            for (std::size_t j = 0; j < c; ++j) d[j] = prob[j] / static_cast<double>(B);
            d[cls] -= 1.0 / static_cast<double>(B);
        }
        loss /= static_cast<double>(B);
    } else {
        // (1/2) * mean over batch of squared error
        for (std::size_t s = 0; s < B; ++s) {
            const double* h = out.row(s);
            const double* y = labels.row(s);
            double* d = dz.row(s);
            for (std::size_t j = 0; j < c; ++j) {
                const double e = h[j] - y[j];
                loss += 0.5 * e * e;
                d[j] = e / static_cast<double>(B);
            }
        }
        loss /= static_cast<double>(B);
        if (p.head == OutputHead::Softmax) {
            // pull dL/d(prob) back through the softmax Jacobian
            for (std::size_t s = 0; s < B; ++s) {
                const double* prob = out.row(s);
                double* d = dz.row(s);
                double dot = 0.0;
                for (std::size_t j = 0; j < c; ++j) dot += d[j] * prob[j];
                for (std::size_t j = 0; j < c; ++j) d[j] = prob[j] * (d[j] - dot);
            }
        }
    }
    g.loss = loss;

    // backward through the affine/activation stack
    Mat cur = std::move(dz);
    for (std::size_t l = p.layer_count(); l-- > 0;) {
        const Mat& a_in = cache.acts[l];
        Mat& dW = g.dW[l];
        Vec& db = g.db[l];
        for (std::size_t s = 0; s < B; ++s) {
            const double* d = cur.row(s);
            const double* a = a_in.row(s);
            for (std::size_t o = 0; o < dW.rows; ++o) {
                const double dv = d[o];
                if (dv == 0.0) continue;
                double* wr = dW.row(o);
                for (std::size_t i = 0; i < dW.cols; ++i) wr[i] += dv * a[i];
                db[o] += dv;
            }
        }
        if (l == 0) break;
        const Mat& W = p.weights[l];
        Mat prev(B, W.cols);
        for (std::size_t s = 0; s < B; ++s) {
            const double* d = cur.row(s);
            double* pr = prev.row(s);
            std::fill(pr, pr + W.cols, 0.0);
            for (std::size_t o = 0; o < W.rows; ++o) {
                const double dv = d[o];
                if (dv == 0.0) continue;
                const double* wr = W.row(o);
                for (std::size_t i = 0; i < W.cols; ++i) pr[i] += dv * wr[i];
            }
            // through the activation of layer l-1
            const double* av = cache.acts[l].row(s);
            for (std::size_t i = 0; i < W.cols; ++i) {
                pr[i] *= act_deriv(p.activation, av[i], av[i]);
            }
        }
        cur = std::move(prev);
    }
    return g;
}

namespace {

void check_finite_grad(const LossGrad& g) {
    for (const Mat& m : g.dW)
        for (double v : m.data) require(std::isfinite(v), "optimizer step: non-finite gradient");
    for (const Vec& b : g.db)
        for (double v : b) require(std::isfinite(v), "optimizer step: non-finite gradient");
}

}  // namespace

void gd_step(NetworkParams& params, const LossGrad& grad, double lr) {
    check_finite_grad(grad);
    for (std::size_t l = 0; l < params.layer_count(); ++l) {
        double* w = params.weights[l].data.data();
        const double* g = grad.dW[l].data.data();
        for (std::size_t i = 0; i < params.weights[l].size(); ++i) w[i] -= lr * g[i];
        for (std::size_t i = 0; i < params.biases[l].size(); ++i)
            params.biases[l][i] -= lr * grad.db[l][i];
    }
}

AdamState make_adam_state(const NetworkParams& params) {
    AdamState s;
    s.m.assign(params.param_count(), 0.0);
    s.v.assign(params.param_count(), 0.0);
    return s;
}

void adam_step(NetworkParams& params, AdamState& state, const LossGrad& grad, double lr,
               double beta1, double beta2, double eps) {
    check_finite_grad(grad);
    state.step += 1;
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(state.step));
    std::size_t idx = 0;
    auto update = [&](double* p, const double* g, std::size_t n) {
        for (std::size_t i = 0; i < n; ++i, ++idx) {
            state.m[idx] = beta1 * state.m[idx] + (1.0 - beta1) * g[i];
            state.v[idx] = beta2 * state.v[idx] + (1.0 - beta2) * g[i] * g[i];
            const double mh = state.m[idx] / bc1;
            const double vh = state.v[idx] / bc2;
            p[i] -= lr * mh / (std::sqrt(vh) + eps);
        }
    };
    for (std::size_t l = 0; l < params.layer_count(); ++l) {
        update(params.weights[l].data.data(), grad.dW[l].data.data(), params.weights[l].size());
        update(params.biases[l].data(), grad.db[l].data(), params.biases[l].size());
    }
}

namespace {

Mat take_rows(const Mat& m, const std::vector<std::size_t>& idx, std::size_t lo, std::size_t hi) {
    Mat out(hi - lo, m.cols);
    for (std::size_t r = lo; r < hi; ++r)
        std::memcpy(out.row(r - lo), m.row(idx[r]), m.cols * sizeof(double));
    return out;
}

}  // namespace

TrainingTrace train(NetworkParams& params, const Dataset& data, const TrainConfig& config,
                    const Mat* probe_inputs, const ProbeFn& probe) {
    const std::size_t n = data.inputs.rows;
    require(n > 0, "train: empty dataset");
    require(config.record_every >= 1, "train: record_every must be >= 1");
    std::size_t batch = config.batch_size == 0 ? n : config.batch_size;
    require(batch <= n, "train: batch_size exceeds dataset size");
    if (config.optimizer == OptimizerKind::Gd) batch = n;

    AdamState adam = make_adam_state(params);
    Rng shuffle_rng(config.seed);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);

    TrainingTrace trace;
    auto record = [&](std::size_t epoch) {
        TraceRecord rec;
        rec.epoch = epoch;
        rec.loss = loss_and_grad(params, data.inputs, data.labels, config.loss).loss;
        if (probe_inputs) {
            rec.probe_outputs = forward(params, *probe_inputs);
            if (probe) probe(epoch, rec.probe_outputs);
        } else if (probe) {
            Mat outs = forward(params, data.inputs);
            if (probe) probe(epoch, outs);
        }
        trace.records.push_back(std::move(rec));
    };

    record(0);
    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        if (batch < n) shuffle_rng.shuffle(order);
        for (std::size_t lo = 0; lo < n; lo += batch) {
            const std::size_t hi = std::min(n, lo + batch);
            LossGrad g;
            if (batch == n) {
                g = loss_and_grad(params, data.inputs, data.labels, config.loss);
            } else {
                g = loss_and_grad(params, take_rows(data.inputs, order, lo, hi),
                                  take_rows(data.labels, order, lo, hi), config.loss);
            }
            if (config.optimizer == OptimizerKind::Adam) {
                adam_step(params, adam, g, config.learning_rate);
            } else {
                gd_step(params, g, config.learning_rate);
            }
        }
        if (epoch % config.record_every == 0 || epoch == config.epochs) record(epoch);
    }
    return trace;
}

void save_network(const NetworkParams& p, const std::string& path) {
    nlohmann::json header;
    header["widths"] = p.widths;
    header["activation"] = to_string(p.activation);
    header["head"] = to_string(p.head);
    std::ofstream out(path, std::ios::binary);
    require(out.good(), "save_network: cannot open " + path);
    out << header.dump() << '\n';
    static_assert(sizeof(double) == 8);
    auto write_doubles = [&](const double* v, std::size_t n) {
        for (std::size_t i = 0; i < n; ++i) {
            std::uint64_t bits;
            std::memcpy(&bits, &v[i], 8);
            unsigned char buf[8];
            for (int b = 0; b < 8; ++b) buf[b] = static_cast<unsigned char>(bits >> (8 * b));
            out.write(reinterpret_cast<const char*>(buf), 8);
        }
    };
    for (std::size_t l = 0; l < p.layer_count(); ++l) {
        write_doubles(p.weights[l].data.data(), p.weights[l].size());
        write_doubles(p.biases[l].data(), p.biases[l].size());
    }
    require(out.good(), "save_network: write failed for " + path);
}

NetworkParams load_network(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), "load_network: cannot open " + path);
    std::string line;
    std::getline(in, line);
    nlohmann::json header = nlohmann::json::parse(line);
    NetworkParams p;
    p.widths = header.at("widths").get<std::vector<std::size_t>>();
    p.activation = activation_from_string(header.at("activation").get<std::string>());
    p.head = head_from_string(header.at("head").get<std::string>());
    require(p.widths.size() >= 2, "load_network: bad widths");
    auto read_doubles = [&](double* v, std::size_t n) {
        for (std::size_t i = 0; i < n; ++i) {
            unsigned char buf[8];
            in.read(reinterpret_cast<char*>(buf), 8);
            require(in.good(), "load_network: truncated payload");
            std::uint64_t bits = 0;
            for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(buf[b]) << (8 * b);
            std::memcpy(&v[i], &bits, 8);
        }
    };
    for (std::size_t l = 0; l + 1 < p.widths.size(); ++l) {
        Mat W(p.widths[l + 1], p.widths[l]);
        read_doubles(W.data.data(), W.size());
        Vec b(p.widths[l + 1]);
        read_doubles(b.data(), b.size());
        p.weights.push_back(std::move(W));
        p.biases.push_back(std::move(b));
    }
    return p;
}

const char* to_string(Activation a) { return a == Activation::Tanh ? "tanh" : "relu"; }
const char* to_string(OutputHead h) { return h == OutputHead::Linear ? "linear" : "softmax"; }

Activation activation_from_string(const std::string& s) {
    if (s == "tanh") return Activation::Tanh;
    if (s == "relu") return Activation::Relu;
    fail("unknown activation: " + s);
}

OutputHead head_from_string(const std::string& s) {
    if (s == "linear") return OutputHead::Linear;
    if (s == "softmax") return OutputHead::Softmax;
    fail("unknown output head: " + s);
}

LossKind loss_from_string(const std::string& s) {
    if (s == "mse") return LossKind::Mse;
    if (s == "cross_entropy_softmax") return LossKind::CrossEntropySoftmax;
    fail("unknown loss: " + s);
}

OptimizerKind optimizer_from_string(const std::string& s) {
    if (s == "gd") return OptimizerKind::Gd;
    if (s == "sgd") return OptimizerKind::Sgd;
    if (s == "adam") return OptimizerKind::Adam;
    fail("unknown optimizer: " + s);
}

}  // namespace fpl::nn
