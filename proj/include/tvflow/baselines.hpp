#pragma once

#include <functional>
#include <vector>

#include "tvflow/graph.hpp"

namespace tvflow {

struct LpOptions {
    double tol = 1e-10;     // relative residual target of the CG solve
    long max_iters = 20000;
};

/// Label propagation: minimizes the squared-weight quadratic
/// sum_e W_e^2 (x_i - x_j)^2 subject to the label clamps: the harmonic
/// extension under edge weights W^2, solved by Jacobi-preconditioned
/// conjugate gradient on the unlabeled block. Throws when a connected
/// component has no labeled node (singular system).
/// on_iter, when set, receives the full estimate after every CG iteration.
GraphSignal solve_lp(const EmpiricalGraph& g, const TrainingSet& t, const LpOptions& opts = {},
                     const std::function<void(long, const GraphSignal&)>& on_iter = {});

struct NLassoOptions {
    double lambda = 1e-2;  // TV penalty weight, must be positive
    long max_iters = 2000;
    double tol = 0.0;      // stop when the iterate moves less than this (0 disables)
};

struct NLassoResult {
    GraphSignal x_bar;   // running average
    GraphSignal x_last;
    EdgeVector y;
    long iterations = 0;
};

/// Network Lasso: minimizes sum over labeled nodes of (x_i - label_i)^2
/// plus lambda * TV. Same primal-dual scheme as the TV solver with the dual
/// clipped to [-lambda, lambda] and the label clamp replaced by the
/// proximal blend t_i = (x_i + 2 gamma_i label_i) / (1 + 2 gamma_i).
NLassoResult solve_nlasso(const EmpiricalGraph& g, const TrainingSet& t,
                          const NLassoOptions& opts);

/// Value of the nLasso objective at x.
double nlasso_objective(const EmpiricalGraph& g, const TrainingSet& t, const GraphSignal& x,
                        double lambda);

struct ConsistencyReport {
    bool found = false;
    double lambda = 0.0;      // smallest sweep value reproducing the TV-min solution
    double best_error = 0.0;  // max abs deviation at the best lambda
    std::string note;
    std::vector<std::pair<double, double>> sweep;  // (lambda, max abs deviation)
};

/// Sweeps lambda over a log grid and reports whether some value makes the
/// nLasso estimate match the TV minimizer within tol (qualitative check;
/// instances with an unlabeled connected component are reported not-found
/// since the TV minimizer is not unique there).
ConsistencyReport nlasso_tvmin_consistency(const EmpiricalGraph& g, const TrainingSet& t,
                                           double tol = 1e-3);

}  // namespace tvflow
