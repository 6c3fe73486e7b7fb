#include "tvflow/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

#include "tvflow/detail/pd_core.hpp"
#include "tvflow/solver.hpp"

namespace tvflow {

namespace {

// Every connected component must see a label, otherwise the reduced
// quadratic is singular.
void require_labels_in_components(const EmpiricalGraph& g, const TrainingSet& t) {
    const std::vector<char> labeled = t.mask(g.num_nodes());
    std::vector<int> component(static_cast<std::size_t>(g.num_nodes()), -1);
    int num_components = 0;
    for (int start = 0; start < g.num_nodes(); ++start) {
        if (component[static_cast<std::size_t>(start)] != -1) continue;
        const int c = num_components++;
        std::deque<int> queue{start};
        component[static_cast<std::size_t>(start)] = c;
        while (!queue.empty()) {
            const int u = queue.front();
            queue.pop_front();
            for (const auto& inc : g.incident(u)) {
                const auto& e = g.edge(inc.edge);
                const int v = e.head == u ? e.tail : e.head;
                if (component[static_cast<std::size_t>(v)] == -1) {
                    component[static_cast<std::size_t>(v)] = c;
                    queue.push_back(v);
                }
            }
        }
    }
    std::vector<char> has_label(static_cast<std::size_t>(num_components), 0);
    for (int i = 0; i < g.num_nodes(); ++i)
        if (labeled[static_cast<std::size_t>(i)])
            has_label[static_cast<std::size_t>(component[static_cast<std::size_t>(i)])] = 1;
    for (int c = 0; c < num_components; ++c)
        if (!has_label[static_cast<std::size_t>(c)])
            throw std::invalid_argument(
                "solve_lp: connected component without a labeled node (singular system)");
}

}  // namespace

GraphSignal solve_lp(const EmpiricalGraph& g, const TrainingSet& t, const LpOptions& opts,
                     const std::function<void(long, const GraphSignal&)>& on_iter) {
    if (t.empty()) throw std::invalid_argument("solve_lp: empty training set");
    t.validate_for(g);
    require_labels_in_components(g, t);

    const int n = g.num_nodes();
    const std::vector<char> labeled = t.mask(n);
    std::vector<int> unlabeled;
    std::vector<int> idx(static_cast<std::size_t>(n), -1);
    for (int i = 0; i < n; ++i) {
        if (!labeled[static_cast<std::size_t>(i)]) {
            idx[static_cast<std::size_t>(i)] = static_cast<int>(unlabeled.size());
            unlabeled.push_back(i);
        }
    }

    GraphSignal x(static_cast<std::size_t>(n), 0.0);
    detail::clamp_labels(x, t);
    if (unlabeled.empty()) return x;

    const std::size_t m = unlabeled.size();

    // Reduced W^2-Laplacian: diag holds the full squared-weight degree,
    // off-diagonal couplings stay within the unlabeled block, labeled
    // neighbors move to the right-hand side.
    struct Coupling {
        int row;
        int col;
        double w2;
    };
    std::vector<Coupling> couplings;
    std::vector<double> diag(m, 0.0);
    std::vector<double> rhs(m, 0.0);
    for (const auto& e : g.edges()) {
        const double w2 = e.weight * e.weight;
        const int hi = idx[static_cast<std::size_t>(e.head)];
        const int ti = idx[static_cast<std::size_t>(e.tail)];
        if (hi >= 0) diag[static_cast<std::size_t>(hi)] += w2;
        if (ti >= 0) diag[static_cast<std::size_t>(ti)] += w2;
        if (hi >= 0 && ti >= 0) {
            couplings.push_back({hi, ti, w2});
        } else if (hi >= 0) {
            rhs[static_cast<std::size_t>(hi)] += w2 * x[static_cast<std::size_t>(e.tail)];
        } else if (ti >= 0) {
            rhs[static_cast<std::size_t>(ti)] += w2 * x[static_cast<std::size_t>(e.head)];
        }
    }

    auto matvec = [&](const std::vector<double>& v, std::vector<double>& out) {
        for (std::size_t k = 0; k < m; ++k) out[k] = diag[k] * v[k];
        for (const auto& c : couplings) {
            out[static_cast<std::size_t>(c.row)] -= c.w2 * v[static_cast<std::size_t>(c.col)];
            out[static_cast<std::size_t>(c.col)] -= c.w2 * v[static_cast<std::size_t>(c.row)];
        }
    };
    auto dot = [m](const std::vector<double>& a, const std::vector<double>& b) {
        double acc = 0.0;
        for (std::size_t k = 0; k < m; ++k) acc += a[k] * b[k];
        return acc;
    };
    auto publish = [&](long iter, const std::vector<double>& u) {
        if (!on_iter) return;
        GraphSignal snapshot = x;
        for (std::size_t k = 0; k < m; ++k)
            snapshot[static_cast<std::size_t>(unlabeled[k])] = u[k];
        on_iter(iter, snapshot);
    };

    // Jacobi-preconditioned CG from zero.
    std::vector<double> u(m, 0.0), r = rhs, z(m), pdir(m), Ap(m);
    for (std::size_t k = 0; k < m; ++k) z[k] = r[k] / diag[k];
    pdir = z;
    double rz = dot(r, z);
    const double rhs_norm = std::sqrt(dot(rhs, rhs));
    const double target = opts.tol * (rhs_norm > 0.0 ? rhs_norm : 1.0);

    for (long iter = 1; iter <= opts.max_iters; ++iter) {
        if (std::sqrt(dot(r, r)) <= target) break;
        matvec(pdir, Ap);
        const double alpha = rz / dot(pdir, Ap);
        for (std::size_t k = 0; k < m; ++k) u[k] += alpha * pdir[k];
        for (std::size_t k = 0; k < m; ++k) r[k] -= alpha * Ap[k];
        publish(iter, u);
        for (std::size_t k = 0; k < m; ++k) z[k] = r[k] / diag[k];
        const double rz_next = dot(r, z);
        for (std::size_t k = 0; k < m; ++k) pdir[k] = z[k] + (rz_next / rz) * pdir[k];
        rz = rz_next;
    }

    for (std::size_t k = 0; k < m; ++k) x[static_cast<std::size_t>(unlabeled[k])] = u[k];
    return x;
}

NLassoResult solve_nlasso(const EmpiricalGraph& g, const TrainingSet& t,
                          const NLassoOptions& opts) {
    if (!(opts.lambda > 0.0)) throw std::invalid_argument("solve_nlasso: lambda must be positive");
    t.validate_for(g);

    const ScalingFactors s = ScalingFactors::standard(g);
    SolverState state = SolverState::zeros(g);
    const auto& mnodes = t.nodes();
    const auto& mvalues = t.values();

    auto prox = [&](GraphSignal& x) {
        for (std::size_t m = 0; m < mnodes.size(); ++m) {
            const auto i = static_cast<std::size_t>(mnodes[m]);
            const double two_gamma = 2.0 * s.gamma[i];
            x[i] = (x[i] + two_gamma * mvalues[m]) / (1.0 + two_gamma);
        }
    };

    GraphSignal prev_bar;
    for (long k = 0; k < opts.max_iters; ++k) {
        if (opts.tol > 0.0) prev_bar = state.x_bar;
        detail::pd_step(g, s.gamma, opts.lambda, state, prox);
        if (opts.tol > 0.0 && state.k > 1) {
            double delta = 0.0;
            for (std::size_t i = 0; i < prev_bar.size(); ++i)
                delta = std::max(delta, std::abs(state.x_bar[i] - prev_bar[i]));
            if (delta <= opts.tol) break;
        }
    }

    NLassoResult result;
    result.iterations = state.k;
    result.x_bar = std::move(state.x_bar);
    result.x_last = std::move(state.x_cur);
    result.y = std::move(state.y);
    return result;
}

double nlasso_objective(const EmpiricalGraph& g, const TrainingSet& t, const GraphSignal& x,
                        double lambda) {
    const auto& nodes = t.nodes();
    const auto& values = t.values();
    double fid = 0.0;
    for (std::size_t m = 0; m < nodes.size(); ++m) {
        const double d = x[static_cast<std::size_t>(nodes[m])] - values[m];
        fid += d * d;
    }
    return fid + lambda * tv_norm(g, x);
}

ConsistencyReport nlasso_tvmin_consistency(const EmpiricalGraph& g, const TrainingSet& t,
                                           double tol) {
    ConsistencyReport report;
    try {
        require_labels_in_components(g, t);
    } catch (const std::invalid_argument&) {
        report.note = "unlabeled connected component: TV minimizer not unique, check skipped";
        return report;
    }

    SolveOptions tv_opts;
    tv_opts.max_iters = 200000;
    tv_opts.gap_tol = 1e-9;
    tv_opts.record_trace = false;
    const GraphSignal x_tv = solve_tvmin(g, t, tv_opts).x_last;

    report.best_error = std::numeric_limits<double>::infinity();
    for (double lambda = 1e-4; lambda <= 1e2 * (1.0 + 1e-12); lambda *= 10.0) {
        NLassoOptions opts;
        opts.lambda = lambda;
        opts.max_iters = 100000;
        opts.tol = tol * 1e-3;
        const NLassoResult nl = solve_nlasso(g, t, opts);
        double err = 0.0;
        for (std::size_t i = 0; i < x_tv.size(); ++i)
            err = std::max(err, std::abs(nl.x_last[i] - x_tv[i]));
        report.sweep.emplace_back(lambda, err);
        if (err < report.best_error) report.best_error = err;
        if (!report.found && err <= tol) {
            report.found = true;
            report.lambda = lambda;
        }
    }
    return report;
}

}  // namespace tvflow
