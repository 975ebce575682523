#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bpbound/errors.hpp"
#include "bpbound/rng.hpp"

namespace bpbound {

// Node-perspective degree distributions of a bipartite code ensemble.
//
// var_node_dist[d] is the fraction of variable nodes of degree d (likewise for checks).
// Edge-perspective coefficients follow lambda_d = d * Lambda_d / alpha.
struct DegreeDistribution {
    std::vector<double> var_node_dist;
    std::vector<double> chk_node_dist;
    double alpha = 0.0;
    double beta = 0.0;

    static DegreeDistribution from_node_fractions(const std::map<int, double>& var,
                                                  const std::map<int, double>& chk) {
        DegreeDistribution dd;
        dd.var_node_dist = densify(var, "variable");
        dd.chk_node_dist = densify(chk, "check");
        dd.alpha = mean_degree(dd.var_node_dist);
        dd.beta = mean_degree(dd.chk_node_dist);
        return dd;
    }

    int max_var_degree() const { return static_cast<int>(var_node_dist.size()) - 1; }
    int max_chk_degree() const { return static_cast<int>(chk_node_dist.size()) - 1; }

    bool is_regular() const { return support(var_node_dist) == 1 && support(chk_node_dist) == 1; }

    // Edge-perspective coefficients, indexed by degree d (coefficient of x^(d-1)).
    std::vector<double> lambda() const { return edge_perspective(var_node_dist, alpha); }
    std::vector<double> rho() const { return edge_perspective(chk_node_dist, beta); }

    double lambda_at(double x) const { return poly_at(lambda(), x); }
    double rho_at(double x) const { return poly_at(rho(), x); }
    // Node-perspective variable polynomial L(x) = sum_d Lambda_d x^d.
    double var_node_poly_at(double x) const {
        double acc = 0.0;
        for (std::size_t d = 1; d < var_node_dist.size(); ++d)
            acc += var_node_dist[d] * std::pow(x, static_cast<double>(d));
        return acc;
    }

private:
    static std::vector<double> densify(const std::map<int, double>& fractions, const char* side) {
        if (fractions.empty())
            throw std::invalid_argument(std::string("empty ") + side + " degree distribution");
        std::vector<double> dist(static_cast<std::size_t>(fractions.rbegin()->first) + 1, 0.0);
        double total = 0.0;
        for (auto [d, f] : fractions) {
            if (d < 1) throw std::invalid_argument(std::string(side) + " degrees must be >= 1");
            if (!(f >= 0.0)) throw std::invalid_argument("degree fractions must be nonnegative");
            dist[static_cast<std::size_t>(d)] = f;
            total += f;
        }
        if (std::abs(total - 1.0) > 1e-12)
            throw std::invalid_argument(std::string(side) + " degree distribution must sum to 1");
        return dist;
    }

    static double mean_degree(const std::vector<double>& dist) {
        double m = 0.0;
        for (std::size_t d = 0; d < dist.size(); ++d) m += static_cast<double>(d) * dist[d];
        return m;
    }

    static std::size_t support(const std::vector<double>& dist) {
        return static_cast<std::size_t>(std::count_if(dist.begin(), dist.end(),
                                                      [](double f) { return f > 0.0; }));
    }

    static std::vector<double> edge_perspective(const std::vector<double>& node, double mean) {
        std::vector<double> edge(node.size(), 0.0);
        for (std::size_t d = 1; d < node.size(); ++d)
            edge[d] = static_cast<double>(d) * node[d] / mean;
        return edge;
    }

    static double poly_at(const std::vector<double>& coeffs, double x) {
        double acc = 0.0;
        for (std::size_t d = 1; d < coeffs.size(); ++d)
            if (coeffs[d] != 0.0) acc += coeffs[d] * std::pow(x, static_cast<double>(d - 1));
        return acc;
    }
};

inline DegreeDistribution regular_ensemble(int dv, int dc) {
    if (dv < 2) throw std::invalid_argument("regular ensemble: variable degree must be >= 2");
    if (dc <= dv)
        throw std::invalid_argument("regular ensemble: check degree must exceed variable degree");
    return DegreeDistribution::from_node_fractions({{dv, 1.0}}, {{dc, 1.0}});
}

// 1 - alpha/beta.
inline double design_rate(const DegreeDistribution& dd) { return 1.0 - dd.alpha / dd.beta; }

enum class CodeFamily { ldpc, ldgm };

inline const char* to_string(CodeFamily f) { return f == CodeFamily::ldpc ? "ldpc" : "ldgm"; }

// Code rate of an ensemble: parity checks for LDPC, generator outputs for LDGM.
inline double code_rate(const DegreeDistribution& dd, CodeFamily family) {
    return family == CodeFamily::ldpc ? design_rate(dd) : dd.beta / dd.alpha;
}

// Bipartite graph with mirrored adjacency. For LDGM codes the check nodes are the
// transmitted generator outputs and the variable nodes are information bits.
class TannerGraph {
public:
    using Edge = std::pair<std::size_t, std::size_t>;  // (variable, check)

    TannerGraph() = default;

    static TannerGraph from_edges(std::size_t n, std::size_t m, std::vector<Edge> edges,
                                  CodeFamily family = CodeFamily::ldpc) {
        std::sort(edges.begin(), edges.end());
        if (std::adjacent_find(edges.begin(), edges.end()) != edges.end())
            throw std::invalid_argument("tanner graph: repeated edge");
        TannerGraph g;
        g.family_ = family;
        g.var_adj_.resize(n);
        g.chk_adj_.resize(m);
        for (auto [v, c] : edges) {
            if (v >= n || c >= m) throw std::invalid_argument("tanner graph: edge index out of range");
            g.var_adj_[v].push_back(c);
            g.chk_adj_[c].push_back(v);
        }
        g.num_edges_ = edges.size();
        return g;
    }

    std::size_t n() const { return var_adj_.size(); }
    std::size_t m() const { return chk_adj_.size(); }
    std::size_t num_edges() const { return num_edges_; }
    CodeFamily family() const { return family_; }

    const std::vector<std::size_t>& var_neighbors(std::size_t v) const { return var_adj_[v]; }
    const std::vector<std::size_t>& chk_neighbors(std::size_t c) const { return chk_adj_[c]; }

    // Number of transmitted bits: variables for LDPC, generator outputs for LDGM.
    std::size_t num_output_bits() const { return family_ == CodeFamily::ldpc ? n() : m(); }

    double average_var_degree() const { return static_cast<double>(num_edges_) / static_cast<double>(n()); }
    double average_chk_degree() const { return static_cast<double>(num_edges_) / static_cast<double>(m()); }

    // Edges sorted by variable then check.
    std::vector<Edge> edges() const {
        std::vector<Edge> out;
        out.reserve(num_edges_);
        for (std::size_t v = 0; v < n(); ++v)
            for (std::size_t c : var_adj_[v]) out.emplace_back(v, c);
        return out;
    }

private:
    std::vector<std::vector<std::size_t>> var_adj_;
    std::vector<std::vector<std::size_t>> chk_adj_;
    std::size_t num_edges_ = 0;
    CodeFamily family_ = CodeFamily::ldpc;
};

namespace detail {

// Splits `count` items across degrees in proportion to `dist` by largest remainder.
inline std::vector<int> apportion_degrees(const std::vector<double>& dist, std::size_t count) {
    std::vector<std::pair<double, int>> remainders;
    std::vector<int> degrees;
    std::size_t assigned = 0;
    for (std::size_t d = 1; d < dist.size(); ++d) {
        if (dist[d] <= 0.0) continue;
        const double exact = dist[d] * static_cast<double>(count);
        const auto whole = static_cast<std::size_t>(std::floor(exact));
        degrees.insert(degrees.end(), whole, static_cast<int>(d));
        assigned += whole;
        remainders.emplace_back(exact - static_cast<double>(whole), static_cast<int>(d));
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t k = 0; assigned < count; ++k, ++assigned)
        degrees.push_back(remainders[k % remainders.size()].second);
    std::sort(degrees.begin(), degrees.end());
    return degrees;
}

}  // namespace detail

// Configuration-model sample of the ensemble on n variable nodes.
//
// Sockets are matched through a uniform permutation; repeated (v, c) pairs are then
// repaired by swapping check endpoints with uniformly chosen edges.
inline TannerGraph sample_graph(const DegreeDistribution& dd, std::size_t n, CodeFamily family,
                                Rng& rng) {
    if (n == 0) throw std::invalid_argument("sample_graph: n must be positive");
    if (n < static_cast<std::size_t>(dd.max_chk_degree()))
        throw std::invalid_argument("sample_graph: n must be at least the maximum check degree");
    const double exact_m = static_cast<double>(n) * dd.alpha / dd.beta;
    const auto m = static_cast<std::size_t>(std::llround(exact_m));
    if (m == 0) throw std::invalid_argument("sample_graph: ensemble yields no check nodes");
    if (dd.is_regular() && std::abs(exact_m - static_cast<double>(m)) > 1e-9)
        throw std::invalid_argument("sample_graph: n*alpha/beta must be integral for a regular ensemble");

    const std::vector<int> var_deg = detail::apportion_degrees(dd.var_node_dist, n);
    std::vector<int> chk_deg = detail::apportion_degrees(dd.chk_node_dist, m);

    std::size_t edges = 0;
    for (int d : var_deg) edges += static_cast<std::size_t>(d);
    std::size_t chk_edges = 0;
    for (int d : chk_deg) chk_edges += static_cast<std::size_t>(d);
    // Irregular rounding: move sockets on the check side until the totals agree.
    for (std::size_t k = 0; chk_edges < edges; ++k, ++chk_edges) ++chk_deg[k % m];
    for (std::size_t k = 0; chk_edges > edges; ++k) {
        if (k > 2 * chk_edges * m)
            throw std::invalid_argument("sample_graph: degree sequences cannot be balanced");
        auto& d = chk_deg[m - 1 - (k % m)];
        if (d > 1) {
            --d;
            --chk_edges;
        }
    }

    std::vector<std::size_t> var_sockets;
    var_sockets.reserve(edges);
    for (std::size_t v = 0; v < n; ++v)
        var_sockets.insert(var_sockets.end(), static_cast<std::size_t>(var_deg[v]), v);
    std::vector<std::size_t> chk_sockets;
    chk_sockets.reserve(edges);
    for (std::size_t c = 0; c < m; ++c)
        chk_sockets.insert(chk_sockets.end(), static_cast<std::size_t>(chk_deg[c]), c);
    shuffle(var_sockets, rng);

    std::vector<TannerGraph::Edge> list(edges);
    std::map<TannerGraph::Edge, int> multiplicity;
    for (std::size_t e = 0; e < edges; ++e) {
        list[e] = {var_sockets[e], chk_sockets[e]};
        ++multiplicity[list[e]];
    }

    std::size_t attempts = 0;
    const std::size_t cap = 1000 + 200 * edges;
    for (std::size_t e = 0; e < edges; ++e) {
        while (multiplicity[list[e]] > 1) {
            if (++attempts > cap)
                throw GraphConstructionError("sample_graph: could not remove repeated edges; reseed");
            const auto f = static_cast<std::size_t>(uniform_below(rng, edges));
            if (f == e) continue;
            const TannerGraph::Edge a{list[e].first, list[f].second};
            const TannerGraph::Edge b{list[f].first, list[e].second};
            if (a == b) continue;
            auto count_of = [&](const TannerGraph::Edge& x) {
                auto it = multiplicity.find(x);
                return it == multiplicity.end() ? 0 : it->second;
            };
            if (count_of(a) > 0 || count_of(b) > 0) continue;
            --multiplicity[list[e]];
            --multiplicity[list[f]];
            list[e] = a;
            list[f] = b;
            ++multiplicity[a];
            ++multiplicity[b];
        }
    }
    return TannerGraph::from_edges(n, m, std::move(list), family);
}

// Variable nodes whose outputs reach variable `center` within `depth` decoding iterations.
struct Neighborhood {
    std::size_t center = 0;
    int depth = 0;
    std::vector<std::size_t> members;  // sorted, excludes center
    std::size_t size() const { return members.size(); }
};

// Breadth-first profile of a node's computation graph: how many same-side nodes lie
// within each iteration depth, and whether the ball up to that depth is a tree.
struct NeighborhoodProfile {
    std::vector<std::size_t> sizes;  // sizes[l], sizes[0] = 0
    std::vector<bool> tree_like;     // tree_like[l]
};

enum class NodeSide { variable, check };

namespace detail {

// BFS of depth 2*max_depth in the bipartite graph from (side, start). Visits nodes on
// the starting side at even distances; `on_layer` sees each completed iteration depth.
template <class OnDepth>
void bipartite_bfs(const TannerGraph& g, NodeSide side, std::size_t start, int max_depth,
                   OnDepth&& on_depth) {
    auto neighbors = [&](NodeSide s, std::size_t u) -> const std::vector<std::size_t>& {
        return s == NodeSide::variable ? g.var_neighbors(u) : g.chk_neighbors(u);
    };
    auto other = [](NodeSide s) {
        return s == NodeSide::variable ? NodeSide::check : NodeSide::variable;
    };
    std::vector<std::uint8_t> seen_same(side == NodeSide::variable ? g.n() : g.m(), 0);
    std::vector<std::uint8_t> seen_other(side == NodeSide::variable ? g.m() : g.n(), 0);
    seen_same[start] = 1;
    // Frontier entries carry the node they were reached from to skip the parent edge.
    std::vector<std::pair<std::size_t, std::size_t>> frontier{{start, SIZE_MAX}};
    std::vector<std::size_t> reached;
    bool tree = true;
    for (int depth = 1; depth <= max_depth; ++depth) {
        std::vector<std::pair<std::size_t, std::size_t>> mid;
        for (auto [u, parent] : frontier) {
            for (std::size_t w : neighbors(side, u)) {
                if (w == parent) continue;
                if (seen_other[w]) {
                    tree = false;
                    continue;
                }
                seen_other[w] = 1;
                mid.emplace_back(w, u);
            }
        }
        std::vector<std::pair<std::size_t, std::size_t>> next;
        for (auto [w, parent] : mid) {
            for (std::size_t u : neighbors(other(side), w)) {
                if (u == parent) continue;
                if (seen_same[u]) {
                    tree = false;
                    continue;
                }
                seen_same[u] = 1;
                next.emplace_back(u, w);
                reached.push_back(u);
            }
        }
        frontier = std::move(next);
        on_depth(depth, reached, tree);
    }
}

}  // namespace detail

inline Neighborhood neighborhood(const TannerGraph& g, std::size_t i, int l) {
    if (i >= g.n()) throw std::out_of_range("neighborhood: variable index out of range");
    if (l < 0) throw std::invalid_argument("neighborhood: depth must be nonnegative");
    Neighborhood nb{i, l, {}};
    detail::bipartite_bfs(g, NodeSide::variable, i, l,
                          [&](int depth, const std::vector<std::size_t>& reached, bool) {
                              if (depth == l) nb.members = reached;
                          });
    std::sort(nb.members.begin(), nb.members.end());
    return nb;
}

// Neighborhood of a transmitted bit: variables for LDPC, generator outputs for LDGM.
inline Neighborhood output_neighborhood(const TannerGraph& g, std::size_t bit, int l) {
    if (g.family() == CodeFamily::ldpc) return neighborhood(g, bit, l);
    if (bit >= g.m()) throw std::out_of_range("output_neighborhood: bit index out of range");
    Neighborhood nb{bit, l, {}};
    detail::bipartite_bfs(g, NodeSide::check, bit, l,
                          [&](int depth, const std::vector<std::size_t>& reached, bool) {
                              if (depth == l) nb.members = reached;
                          });
    std::sort(nb.members.begin(), nb.members.end());
    return nb;
}

inline NeighborhoodProfile output_neighborhood_profile(const TannerGraph& g, std::size_t bit,
                                                       int max_l) {
    NeighborhoodProfile p;
    p.sizes.assign(static_cast<std::size_t>(max_l) + 1, 0);
    p.tree_like.assign(static_cast<std::size_t>(max_l) + 1, true);
    const NodeSide side = g.family() == CodeFamily::ldpc ? NodeSide::variable : NodeSide::check;
    detail::bipartite_bfs(g, side, bit, max_l,
                          [&](int depth, const std::vector<std::size_t>& reached, bool tree) {
                              p.sizes[static_cast<std::size_t>(depth)] = reached.size();
                              p.tree_like[static_cast<std::size_t>(depth)] = tree;
                          });
    return p;
}

// True when the depth-l computation graph of variable i contains no cycle.
inline bool neighborhood_is_tree(const TannerGraph& g, std::size_t i, int l) {
    bool tree = true;
    detail::bipartite_bfs(g, NodeSide::variable, i, l,
                          [&](int, const std::vector<std::size_t>&, bool t) { tree = t; });
    return tree;
}

// sum_{i=1}^{l} (alpha-1)^i (beta-1)^i, the approximate neighborhood size used with
// average degrees.
inline double nominal_k_estimate(double alpha, double beta, int l) {
    if (l < 0) throw std::invalid_argument("nominal_k_estimate: l must be nonnegative");
    const double r = (alpha - 1.0) * (beta - 1.0);
    double term = 1.0;
    double sum = 0.0;
    for (int i = 1; i <= l; ++i) {
        term *= r;
        sum += term;
    }
    return sum;
}

// Exact number of variable nodes (excluding the root) in a depth-l regular tree:
// sum_{i=1}^{l} dv (dv-1)^(i-1) (dc-1)^i.
inline std::uint64_t exact_tree_cap(int dv, int dc, int l) {
    if (dv < 1 || dc < 1 || l < 0) throw std::invalid_argument("exact_tree_cap: invalid arguments");
    std::uint64_t sum = 0;
    std::uint64_t branch = static_cast<std::uint64_t>(dv);
    for (int i = 1; i <= l; ++i) {
        branch *= static_cast<std::uint64_t>(dc - 1);
        sum += branch;
        branch *= static_cast<std::uint64_t>(dv - 1);
    }
    return sum;
}

// Edge-list text format: "n m" then one "v c" line per edge, sorted, zero-indexed.
inline void write_edge_list(std::ostream& out, const TannerGraph& g) {
    out << g.n() << ' ' << g.m() << '\n';
    for (auto [v, c] : g.edges()) out << v << ' ' << c << '\n';
}

inline TannerGraph read_edge_list(std::istream& in, CodeFamily family = CodeFamily::ldpc) {
    std::size_t n = 0, m = 0;
    if (!(in >> n >> m)) throw ConfigError("edge list: missing 'n m' header");
    std::vector<TannerGraph::Edge> edges;
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        std::istringstream fields(line);
        std::size_t v = 0, c = 0;
        std::string extra;
        if (!(fields >> v)) continue;  // blank line
        if (!(fields >> c) || (fields >> extra)) throw ConfigError("edge list: malformed edge line '" + line + "'");
        edges.emplace_back(v, c);
    }
    try {
        return TannerGraph::from_edges(n, m, std::move(edges), family);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("edge list: ") + e.what());
    }
}

}  // namespace bpbound
