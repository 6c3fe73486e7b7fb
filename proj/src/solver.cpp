#include "tvflow/solver.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "tvflow/detail/pd_core.hpp"
#include "tvflow/io.hpp"

namespace tvflow {

ScalingFactors ScalingFactors::scaled(const EmpiricalGraph& g, double gamma_scale) {
    if (!(gamma_scale > 0.0))
        throw std::invalid_argument("gamma_scale must be positive");
    ScalingFactors s;
    s.gamma.resize(static_cast<std::size_t>(g.num_nodes()));
    for (int i = 0; i < g.num_nodes(); ++i)
        s.gamma[static_cast<std::size_t>(i)] = gamma_scale / g.degree(i);
    s.lambda.resize(static_cast<std::size_t>(g.num_edges()));
    for (int e = 0; e < g.num_edges(); ++e)
        s.lambda[static_cast<std::size_t>(e)] = 1.0 / (2.0 * g.edge(e).weight);
    return s;
}

SolverState SolverState::zeros(const EmpiricalGraph& g) {
    SolverState st;
    st.x_prev.assign(static_cast<std::size_t>(g.num_nodes()), 0.0);
    st.x_cur = st.x_prev;
    st.x_bar = st.x_prev;
    st.y.assign(static_cast<std::size_t>(g.num_edges()), 0.0);
    st.y_bar = st.y;
    return st;
}

SolverState SolverState::warm(GraphSignal x0, EdgeVector y0) {
    SolverState st;
    st.x_prev = x0;
    st.x_cur = std::move(x0);
    st.x_bar.assign(st.x_cur.size(), 0.0);
    st.y = std::move(y0);
    st.y_bar.assign(st.y.size(), 0.0);
    return st;
}

EdgeVector resolvent_gstar(const EdgeVector& y, double bound) {
    EdgeVector out(y.size());
    for (std::size_t e = 0; e < y.size(); ++e)
        out[e] = std::clamp(y[e], -bound, bound);
    return out;
}

GraphSignal resolvent_h(const GraphSignal& x, const TrainingSet& t) {
    GraphSignal out = x;
    detail::clamp_labels(out, t);
    return out;
}

void pd_iterate(SolverState& state, const EmpiricalGraph& g, const TrainingSet& t,
                const ScalingFactors& s) {
    if (state.x_cur.size() != static_cast<std::size_t>(g.num_nodes()) ||
        state.y.size() != static_cast<std::size_t>(g.num_edges()))
        throw std::invalid_argument("pd_iterate: state sized to a different graph");
    detail::pd_step(g, s.gamma, 1.0, state,
                    [&t](GraphSignal& x) { detail::clamp_labels(x, t); });
}

Certificate certificate_gap(const EmpiricalGraph& g, const TrainingSet& t,
                            const GraphSignal& x, const EdgeVector& y, double feas_tol) {
    if (x.size() != static_cast<std::size_t>(g.num_nodes()) ||
        y.size() != static_cast<std::size_t>(g.num_edges()))
        throw std::invalid_argument("certificate_gap: size mismatch");

    Certificate cert;
    for (double v : y) cert.max_dual_magnitude = std::max(cert.max_dual_magnitude, std::abs(v));

    const GraphSignal divergence = incidence_transpose_apply(g, y);
    const std::vector<char> labeled = t.mask(g.num_nodes());
    for (int i = 0; i < g.num_nodes(); ++i)
        if (!labeled[static_cast<std::size_t>(i)])
            cert.max_unlabeled_residual = std::max(
                cert.max_unlabeled_residual, std::abs(divergence[static_cast<std::size_t>(i)]));

    const auto& nodes = t.nodes();
    const auto& values = t.values();
    double dual_obj = 0.0;
    for (std::size_t m = 0; m < nodes.size(); ++m)
        dual_obj += values[m] * divergence[static_cast<std::size_t>(nodes[m])];
    cert.dual_objective = dual_obj;

    cert.feasible =
        cert.max_dual_magnitude <= 1.0 && cert.max_unlabeled_residual <= feas_tol;
    if (cert.feasible) cert.gap = tv_norm(g, x) - dual_obj;
    return cert;
}

Certificate certificate_gap(const EmpiricalGraph& g, const TrainingSet& t,
                            const GraphSignal& x, const EdgeVector& y) {
    return certificate_gap(g, t, x, y, 1e-9 * g.max_degree());
}

namespace {

SolveResult run_solver(const EmpiricalGraph& g, const TrainingSet& t, const SolveOptions& opts,
                       SolverState state) {
    if (t.empty())
        throw std::invalid_argument(
            "solve_tvmin: empty training set (every constant signal is a minimizer)");
    t.validate_for(g);
    if (opts.max_iters < 0) throw std::invalid_argument("max_iters must be nonnegative");

    const ScalingFactors s = ScalingFactors::scaled(g, opts.gamma_scale);
    const double feas_tol = opts.feas_tol_scale * g.max_degree();
    const long check_every = std::max<long>(1, opts.gap_check_interval);

    SolveResult result;
    result.trace.records.reserve(opts.record_trace ? static_cast<std::size_t>(opts.max_iters)
                                                   : 0);

    const auto& mnodes = t.nodes();
    const auto& mvalues = t.values();

    while (state.k < opts.max_iters) {
        pd_iterate(state, g, t, s);

        const bool check_gap =
            (opts.gap_tol > 0.0 || opts.record_trace) && (state.k % check_every == 0);
        Certificate cert;
        if (check_gap) cert = certificate_gap(g, t, state.x_bar, state.y, feas_tol);

        if (opts.record_trace) {
            double viol = 0.0;
            for (std::size_t m = 0; m < mnodes.size(); ++m)
                viol = std::max(viol, std::abs(state.x_cur[static_cast<std::size_t>(mnodes[m])] -
                                               mvalues[m]));
            result.trace.records.push_back(
                {state.k, tv_norm(g, state.x_bar), cert.gap, viol});
        }
        if (check_gap) {
            result.trace.final_gap = cert.gap;
            result.trace.final_gap_feasible = cert.feasible;
            if (opts.gap_tol > 0.0 && cert.feasible && cert.gap <= opts.gap_tol) {
                result.trace.stop_reason = StopReason::gap_tolerance;
                break;
            }
        }
    }
    result.trace.iterations = state.k;
    result.x_bar = std::move(state.x_bar);
    result.x_last = std::move(state.x_cur);
    result.y = std::move(state.y);
    result.y_bar = std::move(state.y_bar);
    return result;
}

}  // namespace

SolveResult solve_tvmin(const EmpiricalGraph& g, const TrainingSet& t, const SolveOptions& opts) {
    return run_solver(g, t, opts, SolverState::zeros(g));
}

SolveResult solve_tvmin(const EmpiricalGraph& g, const TrainingSet& t, const SolveOptions& opts,
                        const GraphSignal& x0, const EdgeVector& y0) {
    if (x0.size() != static_cast<std::size_t>(g.num_nodes()) ||
        y0.size() != static_cast<std::size_t>(g.num_edges()))
        throw std::invalid_argument("solve_tvmin: warm start sized to a different graph");
    return run_solver(g, t, opts, SolverState::warm(x0, y0));
}

double suboptimality_constant(const SolverTrace& trace, double tv_opt, long k_min) {
    if (!std::isfinite(tv_opt))
        throw std::invalid_argument("suboptimality_constant: reference optimum missing");
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& r : trace.records)
        if (r.k >= k_min)
            best = std::max(best, static_cast<double>(r.k) * (r.tv_bar - tv_opt));
    if (!std::isfinite(best))
        throw std::invalid_argument("suboptimality_constant: no trace records at k >= k_min");
    return best;
}

void write_trace_csv(const std::filesystem::path& file, const SolverTrace& trace) {
    std::ofstream out(file);
    if (!out) throw ParseError("cannot write file: " + file.string());
    out << "k,tv_bar,gap,label_violation\n";
    for (const auto& r : trace.records)
        out << r.k << "," << format_double(r.tv_bar) << "," << format_double(r.gap) << ","
            << format_double(r.label_violation) << "\n";
}

}  // namespace tvflow
