#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "tvflow/graph.hpp"
#include "tvflow/solver.hpp"

namespace tvflow {

/// Seedable 64-bit generator with portable uniform draws (the standard
/// distributions are implementation-defined, these are not).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double uniform();                  // [0, 1)
    int uniform_int(int lo, int hi);   // inclusive, unbiased

private:
    std::mt19937_64 eng_;
};

/// Deterministic per-trial stream seed from (experiment seed, trial index).
std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t index);

struct GeneratedInstance {
    EmpiricalGraph graph;
    Partition partition;
};

/// Two Erdos-Renyi clusters of n_per_cluster nodes (intra-edge probability
/// p_edge) joined by n_cross distinct uniformly chosen cross edges, unit
/// weights. Regenerates on isolated nodes, up to max_retries.
GeneratedInstance gen_two_cluster(int n_per_cluster, double p_edge, int n_cross,
                                  std::uint64_t seed, int max_retries = 64);
GeneratedInstance gen_two_cluster(int n_per_cluster, double p_edge, int n_cross, Rng& rng,
                                  int max_retries = 64);

/// Stochastic block model: intra-cluster edges with probability p_in,
/// cross-cluster with p_out, unit weights.
GeneratedInstance gen_sbm(const std::vector<int>& cluster_sizes, double p_in, double p_out,
                          std::uint64_t seed, int max_retries = 64);
GeneratedInstance gen_sbm(const std::vector<int>& cluster_sizes, double p_in, double p_out,
                          Rng& rng, int max_retries = 64);

/// ||x_true - x_hat||^2 / ||x_true||^2; throws on a zero true signal.
double nmse(const GraphSignal& x_true, const GraphSignal& x_hat);

struct OracleResult {
    double tv = 0.0;
    GraphSignal x;
};

/// Exhaustive TV-minimization oracle: tries every assignment of the
/// unlabeled nodes to the observed label values and returns a minimizer
/// (an optimal vertex with values in the label set always exists).
/// Refuses instances beyond max_unlabeled unlabeled nodes or max_values
/// distinct label values.
OracleResult tvmin_oracle(const EmpiricalGraph& g, const TrainingSet& t, int max_unlabeled = 10,
                          int max_values = 4);

struct TwoClusterSetting {
    double p_edge;
    int n_cross;
};

struct TwoClusterConfig {
    std::uint64_t seed = 1;
    int trials = 10;  // per sweep setting
    int n_per_cluster = 100;
    double amplitude_a = 0.1;   // planted value on the first cluster
    double amplitude_b = -0.1;  // and on the second
    std::vector<TwoClusterSetting> sweep;  // default sweep spans rho in [0, 2]
    SolveOptions solver = experiment_solver_defaults();
    double bucket_width = 0.5;

    static SolveOptions experiment_solver_defaults();
};

struct TwoClusterTrial {
    int setting;
    int trial;
    double rho_bar;  // mean of the two cluster connectivities; inf when no boundary
    double nmse_value;
};

struct TwoClusterBucket {
    double rho_mean;
    double nmse_mean;
    int count;
};

struct TwoClusterResult {
    std::vector<TwoClusterTrial> trials;
    std::vector<TwoClusterBucket> buckets;  // ascending connectivity
};

/// Plants a two-valued signal, labels one node per cluster, measures the
/// connectivity rho of both clusters by max-flow and the solver NMSE, then
/// averages per connectivity bucket.
TwoClusterResult exp_two_cluster(const TwoClusterConfig& cfg);

struct SbmConfig {
    std::uint64_t seed = 1;
    int trials = 100;  // per ratio
    std::vector<int> cluster_sizes{10, 10, 10};
    int labels_per_cluster = 5;
    double p_in = 0.85;
    std::vector<double> ratios{1, 2, 4, 6, 8, 10, 12};
    std::vector<double> amplitudes{0.1, -0.1, 0.2};
    SolveOptions solver = TwoClusterConfig::experiment_solver_defaults();
};

struct SbmRow {
    double ratio;
    double nmse_mean;
    double margin;  // minimum recovery margin across clusters at this ratio
};

struct SbmResult {
    std::vector<SbmRow> rows;
};

/// Sweeps the ratio p_in/p_out at fixed p_in and reports mean NMSE together
/// with the recovery-condition margin.
SbmResult exp_sbm(const SbmConfig& cfg);

struct ComparisonConfig {
    std::uint64_t seed = 1;
    int n_per_cluster = 100;
    double p_edge = 0.2;
    int n_cross = 10;
    int labels_per_cluster = 10;
    double amplitude_a = 0.1;
    double amplitude_b = -0.1;
    long iters = 300;
    double lambda = 1e-3;  // nLasso penalty
};

struct ComparisonRow {
    long k;
    double nmse_tvmin;
    double nmse_lp;
    double nmse_nlasso;
};

struct ComparisonResult {
    std::vector<ComparisonRow> rows;
};

/// Per-iteration NMSE of the three methods on one generated instance.
ComparisonResult exp_comparison(const ComparisonConfig& cfg);

/// CSV emitters; every file starts with `# seed=` and `# config=` comments.
void write_two_cluster_csv(std::ostream& out, const TwoClusterResult& result,
                           std::uint64_t seed, const std::string& config_comment);
void write_sbm_csv(std::ostream& out, const SbmResult& result, std::uint64_t seed,
                   const std::string& config_comment);
void write_comparison_csv(std::ostream& out, const ComparisonResult& result,
                          std::uint64_t seed, const std::string& config_comment);

}  // namespace tvflow
