#pragma once

#include "dmckf/linalg.hpp"
#include "dmckf/random.hpp"
#include "dmckf/system_model.hpp"

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dmckf {

/// Undirected sensor graph. Node indices are zero-based in the API and
/// one-based in edge-list files and reports.
class Topology {
public:
    explicit Topology(std::size_t node_count = 0);

    void add_edge(std::size_t a, std::size_t b);
    bool has_edge(std::size_t a, std::size_t b) const;

    std::size_t node_count() const { return adjacency_.size(); }
    std::size_t degree(std::size_t i) const { return neighbors(i).size(); }
    /// Neighbours of i in ascending order, excluding i.
    const std::vector<std::size_t>& neighbors(std::size_t i) const;
    /// Each undirected edge once as (lo, hi).
    std::vector<std::pair<std::size_t, std::size_t>> edges() const;

    /// Parse "i j" lines with 1-based indices; '#' starts a comment. The node
    /// count is the largest index seen unless min_nodes is larger.
    static Topology parse_edge_list(std::string_view text, std::size_t min_nodes = 0);
    static Topology load_edge_list(const std::string& path, std::size_t min_nodes = 0);
    std::string to_edge_list() const;

private:
    std::vector<std::vector<std::size_t>> adjacency_;
};

/// The shipped 20-node network; nodes 16, 5, 4, 2, 8, 9, 7 (one-based) have
/// 1 through 7 neighbours respectively.
Topology default_topology();
std::string_view default_topology_edge_list();

/// {i} followed by the neighbours of i in ascending order.
std::vector<std::size_t> neighborhood(const Topology& topology, std::size_t i);

/// Per directed link reception probabilities p(receiver <- sender) in (0, 1].
/// Self-reception always succeeds.
class DropModel {
public:
    explicit DropModel(double uniform_p = 1.0);

    void set_link(std::size_t receiver, std::size_t sender, double p);
    double probability(std::size_t receiver, std::size_t sender) const;
    double uniform_probability() const { return uniform_p_; }

private:
    double uniform_p_;
    std::map<std::pair<std::size_t, std::size_t>, double> overrides_;
};

/// Realized reception indicators at one step. received[i][k] refers to the
/// k-th member of neighborhood(topology, i).
struct DropRealization {
    std::size_t step = 0;
    std::vector<std::vector<std::uint8_t>> received;

    bool indicator(const Topology& topology, std::size_t receiver, std::size_t sender) const;
};

/// Independent Bernoulli draw per directed link, self-links fixed at one.
/// Draw order is receiver-major over neighborhood order, one uniform per
/// non-self link, so equal streams at different p are coupled.
DropRealization sample_drops(const DropModel& drop_model, const Topology& topology, std::size_t step,
                             RandomStream& rng);

/// Stacked observation model of a neighborhood. All block quantities share
/// the member order in `members`; offsets[k] is the first row of member k.
struct NeighborhoodStack {
    std::size_t node = 0;
    std::vector<std::size_t> members;
    std::vector<Eigen::Index> offsets;
    Matrix c;        // col{C_j}
    Matrix r;        // diag{R_j}
    Matrix d_gamma;  // diag{gamma_j I}
    Matrix d_p;      // diag{p_j I}
    Vector s;        // D_gamma * vec{y_j}

    Eigen::Index stacked_dim() const { return c.rows(); }
};

/// Build the neighborhood stack of node i. observations[j] must have length
/// m_j for every member j.
NeighborhoodStack stack_neighborhood(const StateSpaceModel& model, const Topology& topology,
                                     const DropModel& drop_model, std::size_t i,
                                     const DropRealization& realization,
                                     std::span<const Vector> observations,
                                     FlopCounter* counter = nullptr);

}  // namespace dmckf
