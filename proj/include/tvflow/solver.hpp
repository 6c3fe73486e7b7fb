#pragma once

#include <filesystem>
#include <limits>
#include <vector>

#include "tvflow/graph.hpp"

namespace tvflow {

/// Diagonal preconditioning of the primal-dual iteration:
/// gamma_i = gamma_scale / d_i per node, lambda_e = 1/(2 W_e) per edge.
/// gamma_scale = 1 is the reference setting; 0.5 gives the variant with
/// halved primal steps (both converge, the reference is canonical).
struct ScalingFactors {
    std::vector<double> gamma;
    std::vector<double> lambda;

    static ScalingFactors standard(const EmpiricalGraph& g) { return scaled(g, 1.0); }
    static ScalingFactors scaled(const EmpiricalGraph& g, double gamma_scale);
};

/// Iteration state. x_cur matches the observed labels exactly after every
/// iteration and ||y||_inf <= 1 exactly (the dual clip is exact).
struct SolverState {
    GraphSignal x_prev;
    GraphSignal x_cur;
    GraphSignal x_bar;   // running average of x_cur over iterations 1..k
    EdgeVector y;
    EdgeVector y_bar;    // running average of y
    long k = 0;

    GraphSignal x_tilde;  // extrapolation scratch, valid within an iteration

    static SolverState zeros(const EmpiricalGraph& g);
    static SolverState warm(GraphSignal x0, EdgeVector y0);
};

enum class StopReason { max_iterations, gap_tolerance };

struct TraceRecord {
    long k;
    double tv_bar;
    double gap;              // +inf while the dual certificate is infeasible
    double label_violation;  // max |x_cur_i - label_i| over the training set
};

struct SolverTrace {
    std::vector<TraceRecord> records;  // one per iteration when tracing is on
    long iterations = 0;
    StopReason stop_reason = StopReason::max_iterations;
    double final_gap = std::numeric_limits<double>::infinity();
    bool final_gap_feasible = false;
};

struct SolveOptions {
    long max_iters = 2000;
    double gap_tol = 1e-6;         // <= 0 disables the certificate stop
    long gap_check_interval = 1;   // evaluate the certificate every k-th iteration
    double feas_tol_scale = 1e-9;  // divergence tolerance at unlabeled nodes, scaled by d_max
    double gamma_scale = 1.0;
    bool record_trace = true;
};

struct SolveResult {
    GraphSignal x_bar;   // canonical output (running average)
    GraphSignal x_last;  // last iterate, converges fast on exact-recovery instances
    EdgeVector y;        // final dual iterate
    EdgeVector y_bar;
    SolverTrace trace;
};

/// Entrywise clip of y into [-bound, bound]; the resolvent of the
/// TV conjugate (interior entries unchanged).
EdgeVector resolvent_gstar(const EdgeVector& y, double bound = 1.0);

/// Overwrites labeled entries with the observed labels; the resolvent of
/// the label-constraint indicator.
GraphSignal resolvent_h(const GraphSignal& x, const TrainingSet& t);

/// One full primal-dual iteration: extrapolate, dual ascent + clip,
/// primal descent, label clamp, average update.
void pd_iterate(SolverState& state, const EmpiricalGraph& g, const TrainingSet& t,
                const ScalingFactors& s);

/// Sub-optimality certificate from the dual. The pair is feasible when
/// ||y||_inf <= 1 and the divergence D^T y vanishes (within feas_tol) at
/// every unlabeled node; the gap then upper-bounds TV(x) - TV(optimum).
struct Certificate {
    bool feasible = false;
    double gap = std::numeric_limits<double>::infinity();
    double dual_objective = 0.0;          // sum over labeled nodes of label * (D^T y)_i
    double max_unlabeled_residual = 0.0;  // max |(D^T y)_i| over unlabeled nodes
    double max_dual_magnitude = 0.0;
};

Certificate certificate_gap(const EmpiricalGraph& g, const TrainingSet& t,
                            const GraphSignal& x, const EdgeVector& y, double feas_tol);

/// Uses the default tolerance 1e-9 * d_max.
Certificate certificate_gap(const EmpiricalGraph& g, const TrainingSet& t,
                            const GraphSignal& x, const EdgeVector& y);

/// Runs the primal-dual method from zero initialization. Stops at
/// max_iters or when the certificate gap at (x_bar, y) drops to gap_tol.
/// Throws if the training set is empty (minimizer not unique).
SolveResult solve_tvmin(const EmpiricalGraph& g, const TrainingSet& t,
                        const SolveOptions& opts = {});

/// Warm-started variant; x0/y0 must be sized to g.
SolveResult solve_tvmin(const EmpiricalGraph& g, const TrainingSet& t,
                        const SolveOptions& opts, const GraphSignal& x0,
                        const EdgeVector& y0);

/// max over recorded iterations k >= k_min of k * (tv_bar_k - tv_opt).
/// Bounded sequences confirm the O(1/K) convergence of the averages.
double suboptimality_constant(const SolverTrace& trace, double tv_opt, long k_min = 1);

/// Trace CSV `k,tv_bar,gap,label_violation`; infeasible gaps print as inf.
void write_trace_csv(const std::filesystem::path& file, const SolverTrace& trace);

}  // namespace tvflow
