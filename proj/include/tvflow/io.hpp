#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "tvflow/graph.hpp"

namespace tvflow {

/// Error in an input file; message carries path and 1-based line number.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::filesystem::path& file, int line, const std::string& what)
        : std::runtime_error(file.string() + ":" + std::to_string(line) + ": " + what) {}
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

/// Edge-list text file: one `u v w` per line, 0-based node ids, w > 0,
/// `#` starts a comment. Edges are re-oriented and sorted canonically;
/// duplicates, self-loops and isolated nodes are rejected.
EmpiricalGraph load_graph(const std::filesystem::path& file);

/// Lines `i value`. Ids are range-checked when num_nodes >= 0.
TrainingSet load_labels(const std::filesystem::path& file, int num_nodes = -1);

/// Lines `i cluster_id`; every node 0..num_nodes-1 must appear exactly once
/// and cluster ids must be contiguous from 0.
Partition load_partition(const std::filesystem::path& file, int num_nodes);

/// Estimate CSV `node,estimate` with one row per node.
GraphSignal load_estimate_csv(const std::filesystem::path& file, int num_nodes);
void write_estimate_csv(const std::filesystem::path& file, const GraphSignal& x);

/// Dual CSV `head,tail,y`, rows in canonical edge order matching g.
EdgeVector load_dual_csv(const std::filesystem::path& file, const EmpiricalGraph& g);
void write_dual_csv(const std::filesystem::path& file, const EmpiricalGraph& g,
                    const EdgeVector& y);

/// Formats a double with enough digits to round-trip exactly.
std::string format_double(double v);

}  // namespace tvflow
