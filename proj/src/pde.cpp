#include "fpl/pde.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "fpl/spectral.hpp"

namespace fpl::pde {

namespace {
constexpr double kPi = 3.141592653589793238462643383279;
}

GridField make_grid(double a, double b, std::size_t n) {
    require(n >= 2 && b > a, "make_grid: need n >= 2 intervals and b > a");
    GridField g;
    g.dx = (b - a) / static_cast<double>(n);
    g.x.resize(n + 1);
    g.values.assign(n + 1, 0.0);
    for (std::size_t i = 0; i <= n; ++i)
        g.x[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n);
    return g;
}

PoissonProblem paper_poisson() {
    PoissonProblem p;
    p.a = -1.0;
    p.b = 1.0;
    p.g = [](double x) {
        return std::sin(x) + 4.0 * std::sin(4.0 * x) - 8.0 * std::sin(8.0 * x) +
               16.0 * std::sin(24.0 * x);
    };
    auto g0 = [](double x) {
        return std::sin(x) + std::sin(4.0 * x) / 4.0 - std::sin(8.0 * x) / 8.0 +
               std::sin(24.0 * x) / 36.0;
    };
    const double c1 = (g0(-1.0) - g0(1.0)) / 2.0;
    const double c0 = -(g0(-1.0) + g0(1.0)) / 2.0;
    p.u_ref = [g0, c1, c0](double x) { return g0(x) + c1 * x + c0; };
    // peaks {1,4,8,24} rad/unit -> quarter-cycle grid indices round(2w/pi)
    const double L = p.b - p.a;
    for (double w : {1.0, 4.0, 8.0, 24.0}) {
        const double j = std::round(2.0 * w / kPi);
        p.peak_grid_freqs.push_back(j / (2.0 * L));
    }
    return p;
}

Vec diagnostic_grid(double length, std::size_t count) {
    Vec grid(count);
    for (std::size_t j = 0; j < count; ++j)
        grid[j] = static_cast<double>(j) / (2.0 * length);
    return grid;
}

Tridiag assemble_system(const PoissonProblem& problem, std::size_t n) {
    require(n >= 2, "assemble_system: n must be >= 2");
    const std::size_t m = n - 1;
    Tridiag t;
    t.diag.assign(m, 2.0);
    t.lower.assign(m, -1.0);
    t.upper.assign(m, -1.0);
    t.lower[0] = 0.0;
    t.upper[m - 1] = 0.0;
    t.rhs.resize(m);
    const double dx = (problem.b - problem.a) / static_cast<double>(n);
    for (std::size_t i = 1; i < n; ++i) {
        const double x = problem.a + dx * static_cast<double>(i);
        t.rhs[i - 1] = dx * dx * problem.g(x);
    }
    return t;
}

JacobiState make_jacobi_state(const Tridiag& system) {
    JacobiState s;
    s.u.assign(system.rhs.size(), 0.0);
    s.rhs = system.rhs;
    return s;
}

void jacobi_iterate(JacobiState& state) {
    const std::size_t m = state.u.size();
    static thread_local Vec next;
    next.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double left = i > 0 ? state.u[i - 1] : 0.0;
        const double right = i + 1 < m ? state.u[i + 1] : 0.0;
        next[i] = 0.5 * (left + right + state.rhs[i]);
    }
    state.u.swap(next);
    state.sweeps += 1;
}

JacobiSpectrum jacobi_spectrum(std::size_t n) {
    require(n >= 2, "jacobi_spectrum: n must be >= 2");
    JacobiSpectrum s;
    for (std::size_t k = 1; k < n; ++k) {
        s.eigenvalues.push_back(std::cos(static_cast<double>(k) * kPi / static_cast<double>(n)));
        Vec v(n - 1);
        for (std::size_t i = 1; i < n; ++i)
            v[i - 1] = std::sin(static_cast<double>(i * k) * kPi / static_cast<double>(n));
        s.modes.push_back(std::move(v));
    }
    return s;
}

Vec solve_tridiag(const Tridiag& system) {
    const std::size_t m = system.diag.size();
    Vec c(m), d(m);
    c[0] = system.upper[0] / system.diag[0];
    d[0] = system.rhs[0] / system.diag[0];
    for (std::size_t i = 1; i < m; ++i) {
        const double denom = system.diag[i] - system.lower[i] * c[i - 1];
        c[i] = i + 1 < m ? system.upper[i] / denom : 0.0;
        d[i] = (system.rhs[i] - system.lower[i] * d[i - 1]) / denom;
    }
    Vec u(m);
    u[m - 1] = d[m - 1];
    for (std::size_t i = m - 1; i-- > 0;) u[i] = d[i] - c[i] * u[i + 1];
    return u;
}

namespace {

struct TangentCache {
    std::vector<Mat> a;    // a[0] = x column
    std::vector<Mat> ta;   // ta[0] = ones
    std::vector<Mat> tz;   // pre-activation tangents per layer
};

void forward_tangent_cached(const nn::NetworkParams& p, const Vec& xs, TangentCache& c) {
    require(p.input_dim() == 1 && p.output_dim() == 1,
            "variational loss: network must be 1-d in, 1-d out");
    const std::size_t B = xs.size();
    const std::size_t L = p.layer_count();
    c.a.assign(L + 1, Mat());
    c.ta.assign(L + 1, Mat());
    c.tz.assign(L, Mat());
    c.a[0] = Mat(B, 1);
    c.ta[0] = Mat(B, 1, 1.0);
    for (std::size_t s = 0; s < B; ++s) c.a[0].at(s, 0) = xs[s];

    for (std::size_t l = 0; l < L; ++l) {
        const Mat& W = p.weights[l];
        const Vec& b = p.biases[l];
        const Mat& ain = c.a[l];
        const Mat& tain = c.ta[l];
        Mat z(B, W.rows), tz(B, W.rows);
        for (std::size_t s = 0; s < B; ++s) {
            const double* av = ain.row(s);
            const double* tv = tain.row(s);
            double* zr = z.row(s);
            double* tr = tz.row(s);
            for (std::size_t o = 0; o < W.rows; ++o) {
                const double* w = W.row(o);
                double acc = b[o], tacc = 0.0;
                for (std::size_t i = 0; i < W.cols; ++i) {
                    acc += w[i] * av[i];
                    tacc += w[i] * tv[i];
                }
                zr[o] = acc;
                tr[o] = tacc;
            }
        }
        c.tz[l] = tz;
        if (l + 1 < L) {
            Mat act(B, W.rows), tact(B, W.rows);
            const bool tanh_act = p.activation == nn::Activation::Tanh;
            for (std::size_t i = 0; i < z.data.size(); ++i) {
                if (tanh_act) {
                    const double a = std::tanh(z.data[i]);
                    act.data[i] = a;
                    tact.data[i] = (1.0 - a * a) * tz.data[i];
                } else {
                    act.data[i] = z.data[i] > 0.0 ? z.data[i] : 0.0;
                    tact.data[i] = z.data[i] > 0.0 ? tz.data[i] : 0.0;
                }
            }
            c.a[l + 1] = std::move(act);
            c.ta[l + 1] = std::move(tact);
        } else {
            c.a[l + 1] = std::move(z);
            c.ta[l + 1] = std::move(tz);
        }
    }
}

// reverse pass with seeds on h (gh) and on h' (gth)
void backward_tangent(const nn::NetworkParams& p, const TangentCache& c, const Vec& gh,
                      const Vec& gth, std::vector<Mat>& dW, std::vector<Vec>& db) {
    const std::size_t B = gh.size();
    const std::size_t L = p.layer_count();
    dW.resize(L);
    db.resize(L);
    for (std::size_t l = 0; l < L; ++l) {
        dW[l] = Mat(p.weights[l].rows, p.weights[l].cols);
        db[l] = Vec(p.biases[l].size(), 0.0);
    }
    Mat d_a(B, 1), d_ta(B, 1);
    for (std::size_t s = 0; s < B; ++s) {
        d_a.at(s, 0) = gh[s];
        d_ta.at(s, 0) = gth[s];
    }
    const bool tanh_act = p.activation == nn::Activation::Tanh;
    for (std::size_t l = L; l-- > 0;) {
        const Mat& W = p.weights[l];
        Mat d_z, d_tz;
        if (l + 1 == L) {
            d_z = std::move(d_a);
            d_tz = std::move(d_ta);
        } else {
            const Mat& act = c.a[l + 1];
            const Mat& tz = c.tz[l];
            d_z = Mat(B, W.rows);
            d_tz = Mat(B, W.rows);
            for (std::size_t i = 0; i < act.data.size(); ++i) {
                if (tanh_act) {
                    const double a = act.data[i];
                    const double d1 = 1.0 - a * a;          // act'
                    const double d2 = -2.0 * a * d1;        // act''
                    d_tz.data[i] = d_ta.data[i] * d1;
                    d_z.data[i] = d_a.data[i] * d1 + d_ta.data[i] * tz.data[i] * d2;
                } else {
                    const double on = act.data[i] > 0.0 ? 1.0 : 0.0;
                    d_tz.data[i] = d_ta.data[i] * on;
                    d_z.data[i] = d_a.data[i] * on;
                }
            }
        }
        const Mat& ain = c.a[l];
        const Mat& tain = c.ta[l];
        for (std::size_t s = 0; s < B; ++s) {
            const double* dzr = d_z.row(s);
            const double* dtzr = d_tz.row(s);
            const double* av = ain.row(s);
            const double* tv = tain.row(s);
            for (std::size_t o = 0; o < W.rows; ++o) {
                double* wr = dW[l].row(o);
                const double dz = dzr[o], dtz = dtzr[o];
                for (std::size_t i = 0; i < W.cols; ++i) wr[i] += dz * av[i] + dtz * tv[i];
                db[l][o] += dz;
            }
        }
        if (l == 0) break;
        Mat prev_a(B, W.cols), prev_ta(B, W.cols);
        for (std::size_t s = 0; s < B; ++s) {
            const double* dzr = d_z.row(s);
            const double* dtzr = d_tz.row(s);
            double* pa = prev_a.row(s);
            double* pt = prev_ta.row(s);
            for (std::size_t o = 0; o < W.rows; ++o) {
                const double* w = W.row(o);
                const double dz = dzr[o], dtz = dtzr[o];
                for (std::size_t i = 0; i < W.cols; ++i) {
                    pa[i] += dz * w[i];
                    pt[i] += dtz * w[i];
                }
            }
        }
        d_a = std::move(prev_a);
        d_ta = std::move(prev_ta);
    }
}

}  // namespace

void forward_with_tangent(const nn::NetworkParams& params, const Vec& xs, Vec& h, Vec& dh) {
    TangentCache c;
    forward_tangent_cached(params, xs, c);
    const std::size_t B = xs.size();
    h.resize(B);
    dh.resize(B);
    for (std::size_t s = 0; s < B; ++s) {
        h[s] = c.a.back().at(s, 0);
        dh[s] = c.ta.back().at(s, 0);
    }
}

VariationalResult variational_loss(const nn::NetworkParams& params, const GridField& grid,
                                   const std::function<double(double)>& g, double beta) {
    require(beta >= 0.0, "variational_loss: beta must be nonnegative");
    const std::size_t nodes = grid.x.size();
    require(nodes >= 3, "variational_loss: need at least one interior node");

    TangentCache cache;
    forward_tangent_cached(params, grid.x, cache);
    const Mat& hm = cache.a.back();
    const Mat& dhm = cache.ta.back();

    double value = 0.0;
    Vec gh(nodes, 0.0), gth(nodes, 0.0);
    for (std::size_t i = 1; i + 1 < nodes; ++i) {
        const double h = hm.at(i, 0);
        const double dh = dhm.at(i, 0);
        const double gi = g(grid.x[i]);
        value += (0.5 * dh * dh - gi * h) * grid.dx;
        gh[i] = -gi * grid.dx;
        gth[i] = dh * grid.dx;
    }
    const double h0 = hm.at(0, 0), hn = hm.at(nodes - 1, 0);
    value += beta * (h0 * h0 + hn * hn);
    gh[0] = 2.0 * beta * h0;
    gh[nodes - 1] = 2.0 * beta * hn;

    VariationalResult r;
    r.value = value;
    backward_tangent(params, cache, gh, gth, r.dW, r.db);
    return r;
}

double dnn_epoch_cost(const nn::NetworkParams& params, std::size_t samples) {
    return 12.0 * static_cast<double>(params.param_count()) * static_cast<double>(samples);
}

double jacobi_sweep_cost(std::size_t n) { return 5.0 * static_cast<double>(n + 1); }

double sup_norm_error(const Vec& field, const Vec& reference) {
    require(!field.empty() && field.size() == reference.size(), "sup_norm_error: size mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < field.size(); ++i)
        m = std::max(m, std::abs(field[i] - reference[i]));
    return m;
}

namespace {

Vec reference_on_grid(const PoissonProblem& problem, const GridField& grid) {
    require(static_cast<bool>(problem.u_ref), "poisson solve: problem has no reference solution");
    Vec u(grid.x.size());
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = problem.u_ref(grid.x[i]);
    return u;
}

CVec spectrum_on_grid(const GridField& grid, const Vec& values, const Vec& freqs) {
    Mat inputs(grid.x.size(), 1);
    for (std::size_t i = 0; i < grid.x.size(); ++i) inputs.at(i, 0) = grid.x[i];
    return spectral::nonuniform_ft(inputs, values, Vec{1.0}, freqs);
}

Vec delta_f_row(const CVec& target, const CVec& model) {
    Vec out(target.size());
    for (std::size_t i = 0; i < target.size(); ++i)
        out[i] = spectral::delta_F(target[i], model[i]);
    return out;
}

}  // namespace

PdeTrace dnn_solve(const PoissonProblem& problem, std::size_t n, const SolveConfig& config,
                   nn::NetworkParams* trained_out,
                   const std::function<void(std::size_t, const Vec&)>& snapshot) {
    GridField grid = make_grid(problem.a, problem.b, n);
    const Vec uref = reference_on_grid(problem, grid);
    const CVec target = spectrum_on_grid(grid, uref, problem.peak_grid_freqs);

    nn::NetworkParams net = nn::init_network(config.widths, nn::Activation::Tanh,
                                             nn::OutputHead::Linear, config.init_std, config.seed);
    nn::AdamState adam = nn::make_adam_state(net);
    const double epoch_cost = dnn_epoch_cost(net, grid.x.size());

    PdeTrace trace;
    trace.peak_freqs = problem.peak_grid_freqs;
    Vec h, dh;
    auto record = [&](std::size_t epoch) {
        forward_with_tangent(net, grid.x, h, dh);
        PdeTraceRow row;
        row.phase = "dnn";
        row.step = epoch;
        row.cost_units = epoch_cost * static_cast<double>(epoch);
        row.sup_norm_err = sup_norm_error(h, uref);
        row.delta_f = delta_f_row(target, spectrum_on_grid(grid, h, problem.peak_grid_freqs));
        trace.rows.push_back(std::move(row));
        if (snapshot) snapshot(epoch, h);
        double worst = 0.0;
        for (double v : trace.rows.back().delta_f) worst = std::max(worst, v);
        return worst;
    };

    record(0);
    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        VariationalResult r = variational_loss(net, grid, problem.g, config.beta);
        nn::LossGrad g;
        g.loss = r.value;
        g.dW = std::move(r.dW);
        g.db = std::move(r.db);
        nn::adam_step(net, adam, g, config.learning_rate);
        if (epoch % config.record_every == 0 || epoch == config.epochs) {
            const double worst = record(epoch);
            if (config.stop_delta_f > 0.0 && worst < config.stop_delta_f) break;
        }
    }
    if (trained_out) *trained_out = std::move(net);
    return trace;
}

PdeTrace jacobi_solve(const PoissonProblem& problem, std::size_t n, std::size_t sweeps,
                      std::size_t record_every, const Vec* start, double cost_offset) {
    GridField grid = make_grid(problem.a, problem.b, n);
    const Vec uref = reference_on_grid(problem, grid);
    const CVec target = spectrum_on_grid(grid, uref, problem.peak_grid_freqs);

    Tridiag system = assemble_system(problem, n);
    JacobiState state = make_jacobi_state(system);
    if (start) {
        require(start->size() == grid.x.size(), "jacobi_solve: start field size mismatch");
        for (std::size_t i = 1; i < n; ++i) state.u[i - 1] = (*start)[i];
    }

    PdeTrace trace;
    trace.peak_freqs = problem.peak_grid_freqs;
    Vec field(grid.x.size(), 0.0);
    field[0] = problem.left_bc;
    field[n] = problem.right_bc;
    auto record = [&](std::size_t sweep) {
        for (std::size_t i = 1; i < n; ++i) field[i] = state.u[i - 1];
        PdeTraceRow row;
        row.phase = "jacobi";
        row.step = sweep;
        row.cost_units = cost_offset + jacobi_sweep_cost(n) * static_cast<double>(sweep);
        row.sup_norm_err = sup_norm_error(field, uref);
        row.delta_f = delta_f_row(target, spectrum_on_grid(grid, field, problem.peak_grid_freqs));
        trace.rows.push_back(std::move(row));
    };

    record(0);
    for (std::size_t t = 1; t <= sweeps; ++t) {
        jacobi_iterate(state);
        if (t % record_every == 0 || t == sweeps) record(t);
    }
    return trace;
}

HybridResult hybrid_solve(const PoissonProblem& problem, std::size_t n, const SolveConfig& config,
                          const std::vector<std::size_t>& handoffs, double sup_target,
                          std::size_t jacobi_budget, std::size_t jacobi_record) {
    GridField grid = make_grid(problem.a, problem.b, n);
    const Vec uref = reference_on_grid(problem, grid);
    const CVec target = spectrum_on_grid(grid, uref, problem.peak_grid_freqs);

    std::size_t max_epochs = 0;
    bool pure_dnn_leg = false;
    for (std::size_t m : handoffs) {
        if (m == SIZE_MAX)
            pure_dnn_leg = true;
        else
            max_epochs = std::max(max_epochs, m);
    }
    // one training run, snapshots where a leg hands off; the pure-DNN leg
    // extends the run to the configured cap
    SolveConfig train_cfg = config;
    train_cfg.epochs = pure_dnn_leg ? std::max(max_epochs, config.epochs) : max_epochs;
    std::vector<std::pair<std::size_t, Vec>> snaps;
    PdeTrace dnn_trace = dnn_solve(problem, n, train_cfg, nullptr,
                                   [&](std::size_t epoch, const Vec& h) {
                                       snaps.emplace_back(epoch, h);
                                   });

    const double epoch_cost =
        dnn_epoch_cost(nn::init_network(config.widths, nn::Activation::Tanh,
                                        nn::OutputHead::Linear, config.init_std, config.seed),
                       grid.x.size());

    HybridResult result;
    result.target = sup_target;
    for (std::size_t m : handoffs) {
        HybridLeg leg;
        leg.handoff_epoch = m;
        leg.trace.peak_freqs = problem.peak_grid_freqs;
        // DNN prefix rows
        for (const auto& row : dnn_trace.rows) {
            if (m != SIZE_MAX && row.step > m) break;
            leg.trace.rows.push_back(row);
        }
        if (m != SIZE_MAX) {
            Vec start(grid.x.size(), 0.0);
            start[0] = problem.left_bc;
            start[n] = problem.right_bc;
            if (m > 0) {
                auto it = std::find_if(snaps.begin(), snaps.end(),
                                       [m](const auto& s) { return s.first == m; });
                require(it != snaps.end(), "hybrid_solve: missing handoff snapshot");
                for (std::size_t i = 1; i < n; ++i) start[i] = it->second[i];
            }
            Tridiag system = assemble_system(problem, n);
            JacobiState state = make_jacobi_state(system);
            for (std::size_t i = 1; i < n; ++i) state.u[i - 1] = start[i];
            const double offset = epoch_cost * static_cast<double>(m);
            Vec field = start;
            auto record = [&](std::size_t sweep) {
                for (std::size_t i = 1; i < n; ++i) field[i] = state.u[i - 1];
                PdeTraceRow row;
                row.phase = "jacobi";
                row.step = sweep;
                row.cost_units = offset + jacobi_sweep_cost(n) * static_cast<double>(sweep);
                row.sup_norm_err = sup_norm_error(field, uref);
                row.delta_f =
                    delta_f_row(target, spectrum_on_grid(grid, field, problem.peak_grid_freqs));
                leg.trace.rows.push_back(std::move(row));
                return leg.trace.rows.back().sup_norm_err;
            };
            double sup = record(0);
            for (std::size_t t = 1; t <= jacobi_budget && sup >= sup_target; ++t) {
                jacobi_iterate(state);
                if (t % jacobi_record == 0 || t == jacobi_budget) sup = record(t);
            }
        }
        leg.cost_to_target = std::numeric_limits<double>::infinity();
        for (const auto& row : leg.trace.rows) {
            if (row.sup_norm_err < sup_target) {
                leg.cost_to_target = row.cost_units;
                leg.reached = true;
                break;
            }
        }
        result.legs.push_back(std::move(leg));
    }
    return result;
}

void write_pde_csv(const PdeTrace& trace, const std::string& path) {
    std::string out = "phase,step,cost_units,sup_norm_err";
    char buf[64];
    for (double k : trace.peak_freqs) {
        std::snprintf(buf, sizeof buf, ",delta_F_k=%g", k);
        out += buf;
    }
    out += '\n';
    for (const auto& row : trace.rows) {
        out += row.phase;
        out += ',';
        out += std::to_string(row.step);
        std::snprintf(buf, sizeof buf, ",%.17g,%.17g", row.cost_units, row.sup_norm_err);
        out += buf;
        for (double v : row.delta_f) {
            std::snprintf(buf, sizeof buf, ",%.17g", v);
            out += buf;
        }
        out += '\n';
    }
    std::ofstream f(path, std::ios::binary);
    require(f.good(), "write_pde_csv: cannot open " + path);
    f << out;
}

}  // namespace fpl::pde
