#ifndef FPL_PDE_HPP
#define FPL_PDE_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fpl/common.hpp"
#include "fpl/nn.hpp"

namespace fpl::pde {

struct GridField {
    Vec x;       // n+1 nodes, uniform
    Vec values;  // node values
    double dx = 0.0;
};

GridField make_grid(double a, double b, std::size_t n);  // n intervals, n+1 nodes

struct PoissonProblem {
    std::function<double(double)> g;
    double a = -1.0, b = 1.0;
    double left_bc = 0.0, right_bc = 0.0;
    std::function<double(double)> u_ref;  // null when no closed form is known
    Vec peak_grid_freqs;                  // diagnostic-grid frequencies of u_ref's peaks
};

// -u'' = sin(x) + 4 sin(4x) - 8 sin(8x) + 16 sin(24x) on (-1,1), u(+-1) = 0,
// with u_ref = g0 + c1 x + c0. Peaks {1,4,8,24} rad/unit land on the
// quarter-cycle diagnostic grid k_j = j/(2L) at j = {1,3,5,15}.
PoissonProblem paper_poisson();

// diagnostic grid for a domain of length L: k_j = j/(2L), j = 0..count-1
Vec diagnostic_grid(double length, std::size_t count);

struct Tridiag {
    Vec diag, lower, upper;  // A bands; interior size n-1
    Vec rhs;                 // (dx)^2 g(x_i)
};

Tridiag assemble_system(const PoissonProblem& problem, std::size_t n);

struct JacobiState {
    Vec u;    // interior iterate, length n-1
    Vec rhs;  // (dx)^2 g
    std::size_t sweeps = 0;
};

JacobiState make_jacobi_state(const Tridiag& system);

// One synchronous sweep: u_i <- (u_{i-1} + u_{i+1} + g_i)/2, boundary
// neighbors zero. Never Gauss-Seidel ordering.
void jacobi_iterate(JacobiState& state);

struct JacobiSpectrum {
    Vec eigenvalues;           // lambda_k = cos(k pi / n), k = 1..n-1
    std::vector<Vec> modes;    // v_k[i] = sin(i k pi / n), i = 1..n-1
};

// Closed-form eigenpairs of R_J. |lambda_k| shrinks toward k = n/2, so low
// frequencies converge slowest under Jacobi.
JacobiSpectrum jacobi_spectrum(std::size_t n);

// Exact tridiagonal solve (Thomas algorithm) for oracle/reference use.
Vec solve_tridiag(const Tridiag& system);

struct VariationalResult {
    double value = 0.0;
    std::vector<Mat> dW;
    std::vector<Vec> db;
};

// I_emp = sum_{i=1}^{n-1} (|h'(x_i)|^2/2 - g(x_i) h(x_i)) dx
//         + beta (h(x_0)^2 + h(x_n)^2).
// h' is the exact input derivative (forward tangent through the net);
// parameter gradients backpropagate through both h and h'.
VariationalResult variational_loss(const nn::NetworkParams& params, const GridField& grid,
                                   const std::function<double(double)>& g, double beta);

// forward pass returning h and dh/dx on a set of 1-d inputs
void forward_with_tangent(const nn::NetworkParams& params, const Vec& xs, Vec& h, Vec& dh);

struct SolveConfig {
    std::vector<std::size_t> widths;
    double init_std = 0.02;
    double learning_rate = 5e-4;
    double beta = 10.0;
    std::size_t epochs = 0;
    std::size_t record_every = 25;
    std::uint64_t seed = 0;
    // > 0: stop at the first record where every tracked peak sits below this
    double stop_delta_f = 0.0;
};

struct PdeTraceRow {
    std::string phase;        // "dnn" or "jacobi"
    std::size_t step = 0;     // epoch or sweep
    double cost_units = 0.0;
    double sup_norm_err = 0.0;
    Vec delta_f;              // per tracked peak
};

struct PdeTrace {
    Vec peak_freqs;
    std::vector<PdeTraceRow> rows;
};

// cost model: one DNN epoch = 12 * param_count * samples flops,
// one Jacobi sweep = 5 n flops
double dnn_epoch_cost(const nn::NetworkParams& params, std::size_t samples);
double jacobi_sweep_cost(std::size_t n);

// Trains by Adam on I_emp over n+1 nodes; records sup-norm error and
// delta_F at the problem's peak frequencies every record stride.
PdeTrace dnn_solve(const PoissonProblem& problem, std::size_t n, const SolveConfig& config,
                   nn::NetworkParams* trained_out = nullptr,
                   const std::function<void(std::size_t, const Vec&)>& snapshot = {});

// Jacobi-only trace from a given start field (zero by default).
PdeTrace jacobi_solve(const PoissonProblem& problem, std::size_t n, std::size_t sweeps,
                      std::size_t record_every, const Vec* start = nullptr,
                      double cost_offset = 0.0);

struct HybridLeg {
    std::size_t handoff_epoch = 0;  // M; SIZE_MAX marks the pure-DNN leg
    PdeTrace trace;
    // cost when |h - u_ref|_inf first drops below the target, inf if never
    double cost_to_target = 0.0;
    bool reached = false;
};

struct HybridResult {
    std::vector<HybridLeg> legs;
    double target = 0.0;
};

// M epochs of DNN training, grid sampling, then Jacobi sweeps from the
// sampled field. M = 0 is pure Jacobi; the SIZE_MAX sentinel is pure DNN.
HybridResult hybrid_solve(const PoissonProblem& problem, std::size_t n, const SolveConfig& config,
                          const std::vector<std::size_t>& handoffs, double sup_target,
                          std::size_t jacobi_budget, std::size_t jacobi_record);

double sup_norm_error(const Vec& field, const Vec& reference);

// CSV: phase,step,cost_units,sup_norm_err,delta_F_k=<k> per peak
void write_pde_csv(const PdeTrace& trace, const std::string& path);

}  // namespace fpl::pde

#endif
