#include "tvflow/io.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace tvflow {

namespace {

std::ifstream open_or_throw(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ParseError("cannot open file: " + file.string());
    return in;
}

// Strips comments/whitespace; returns false for blank lines.
bool payload(std::string& line) {
    if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
    return line.find_first_not_of(" \t\r\n") != std::string::npos;
}

template <typename Fn>
void for_each_record(const std::filesystem::path& file, Fn&& fn) {
    std::ifstream in = open_or_throw(file);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!payload(line)) continue;
        std::istringstream ss(line);
        fn(ss, lineno);
        std::string rest;
        if (ss >> rest)
            throw ParseError(file, lineno, "trailing content: '" + rest + "'");
    }
}

}  // namespace

EmpiricalGraph load_graph(const std::filesystem::path& file) {
    std::vector<GraphEdge> edges;
    int max_node = -1;
    for_each_record(file, [&](std::istringstream& ss, int lineno) {
        GraphEdge e{};
        if (!(ss >> e.head >> e.tail >> e.weight))
            throw ParseError(file, lineno, "expected 'u v w'");
        if (e.head < 0 || e.tail < 0)
            throw ParseError(file, lineno, "negative node id");
        if (e.head == e.tail)
            throw ParseError(file, lineno, "self-loop at node " + std::to_string(e.head));
        if (!(e.weight > 0.0) || !std::isfinite(e.weight))
            throw ParseError(file, lineno, "weight must be positive");
        max_node = std::max(max_node, std::max(e.head, e.tail));
        edges.push_back(e);
    });
    if (edges.empty()) throw ParseError(file.string() + ": no edges");
    try {
        return EmpiricalGraph(max_node + 1, std::move(edges));
    } catch (const std::invalid_argument& ex) {
        throw ParseError(file.string() + ": " + ex.what());
    }
}

TrainingSet load_labels(const std::filesystem::path& file, int num_nodes) {
    std::vector<std::pair<int, double>> pairs;
    for_each_record(file, [&](std::istringstream& ss, int lineno) {
        int node;
        double value;
        if (!(ss >> node >> value))
            throw ParseError(file, lineno, "expected 'i value'");
        pairs.emplace_back(node, value);
    });
    try {
        return TrainingSet::from_pairs(std::move(pairs), num_nodes);
    } catch (const std::invalid_argument& ex) {
        throw ParseError(file.string() + ": " + ex.what());
    }
}

Partition load_partition(const std::filesystem::path& file, int num_nodes) {
    std::vector<int> cluster_of(static_cast<std::size_t>(num_nodes), -1);
    for_each_record(file, [&](std::istringstream& ss, int lineno) {
        int node, cluster;
        if (!(ss >> node >> cluster))
            throw ParseError(file, lineno, "expected 'i cluster_id'");
        if (node < 0 || node >= num_nodes)
            throw ParseError(file, lineno, "node id out of range: " + std::to_string(node));
        if (cluster_of[static_cast<std::size_t>(node)] != -1)
            throw ParseError(file, lineno, "node " + std::to_string(node) + " assigned twice");
        cluster_of[static_cast<std::size_t>(node)] = cluster;
    });
    for (int i = 0; i < num_nodes; ++i)
        if (cluster_of[static_cast<std::size_t>(i)] == -1)
            throw ParseError(file.string() + ": node " + std::to_string(i) + " unassigned");
    try {
        return Partition::from_assignments(std::move(cluster_of));
    } catch (const std::invalid_argument& ex) {
        throw ParseError(file.string() + ": " + ex.what());
    }
}

GraphSignal load_estimate_csv(const std::filesystem::path& file, int num_nodes) {
    std::ifstream in = open_or_throw(file);
    std::string line;
    int lineno = 0;
    GraphSignal x(static_cast<std::size_t>(num_nodes));
    std::vector<char> seen(static_cast<std::size_t>(num_nodes), 0);
    while (std::getline(in, line)) {
        ++lineno;
        if (!payload(line)) continue;
        if (line.rfind("node,", 0) == 0) continue;  // header
        int node;
        double value;
        if (std::sscanf(line.c_str(), "%d,%lf", &node, &value) != 2)
            throw ParseError(file, lineno, "expected 'node,estimate'");
        if (node < 0 || node >= num_nodes)
            throw ParseError(file, lineno, "node id out of range: " + std::to_string(node));
        if (seen[static_cast<std::size_t>(node)])
            throw ParseError(file, lineno, "node " + std::to_string(node) + " repeated");
        seen[static_cast<std::size_t>(node)] = 1;
        x[static_cast<std::size_t>(node)] = value;
    }
    for (int i = 0; i < num_nodes; ++i)
        if (!seen[static_cast<std::size_t>(i)])
            throw ParseError(file.string() + ": missing estimate for node " + std::to_string(i));
    return x;
}

void write_estimate_csv(const std::filesystem::path& file, const GraphSignal& x) {
    std::ofstream out(file);
    if (!out) throw ParseError("cannot write file: " + file.string());
    out << "node,estimate\n";
    for (std::size_t i = 0; i < x.size(); ++i)
        out << i << "," << format_double(x[i]) << "\n";
}

EdgeVector load_dual_csv(const std::filesystem::path& file, const EmpiricalGraph& g) {
    std::ifstream in = open_or_throw(file);
    std::string line;
    int lineno = 0;
    EdgeVector y;
    y.reserve(static_cast<std::size_t>(g.num_edges()));
    while (std::getline(in, line)) {
        ++lineno;
        if (!payload(line)) continue;
        if (line.rfind("head,", 0) == 0) continue;
        int head, tail;
        double value;
        if (std::sscanf(line.c_str(), "%d,%d,%lf", &head, &tail, &value) != 3)
            throw ParseError(file, lineno, "expected 'head,tail,y'");
        const int e = static_cast<int>(y.size());
        if (e >= g.num_edges())
            throw ParseError(file, lineno, "more rows than graph edges");
        if (head != g.edge(e).head || tail != g.edge(e).tail)
            throw ParseError(file, lineno, "edge (" + std::to_string(head) + "," +
                                               std::to_string(tail) +
                                               ") does not match canonical edge " +
                                               std::to_string(e));
        y.push_back(value);
    }
    if (static_cast<int>(y.size()) != g.num_edges())
        throw ParseError(file.string() + ": expected " + std::to_string(g.num_edges()) +
                         " rows, got " + std::to_string(y.size()));
    return y;
}

void write_dual_csv(const std::filesystem::path& file, const EmpiricalGraph& g,
                    const EdgeVector& y) {
    if (static_cast<int>(y.size()) != g.num_edges())
        throw std::invalid_argument("write_dual_csv: size mismatch");
    std::ofstream out(file);
    if (!out) throw ParseError("cannot write file: " + file.string());
    out << "head,tail,y\n";
    for (int e = 0; e < g.num_edges(); ++e)
        out << g.edge(e).head << "," << g.edge(e).tail << ","
            << format_double(y[static_cast<std::size_t>(e)]) << "\n";
}

std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace tvflow
