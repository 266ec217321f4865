#include "dmckf/network.hpp"

#include "dmckf/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace dmckf {

namespace {

void check_node(const Topology& t, std::size_t i) {
    if (i >= t.node_count())
        throw InvalidParameter("node index " + std::to_string(i + 1) + " outside 1.." +
                               std::to_string(t.node_count()));
}

void check_probability(double p) {
    if (!(p > 0.0 && p <= 1.0))
        throw InvalidParameter("reception probability must lie in (0, 1], got " + std::to_string(p));
}

}  // namespace

Topology::Topology(std::size_t node_count) : adjacency_(node_count) {}

void Topology::add_edge(std::size_t a, std::size_t b) {
    check_node(*this, a);
    check_node(*this, b);
    if (a == b) throw InvalidParameter("self-loop on node " + std::to_string(a + 1));
    auto insert = [](std::vector<std::size_t>& list, std::size_t v) {
        auto it = std::lower_bound(list.begin(), list.end(), v);
        if (it == list.end() || *it != v) list.insert(it, v);
    };
    insert(adjacency_[a], b);
    insert(adjacency_[b], a);
}

bool Topology::has_edge(std::size_t a, std::size_t b) const {
    const auto& list = neighbors(a);
    return std::binary_search(list.begin(), list.end(), b);
}

const std::vector<std::size_t>& Topology::neighbors(std::size_t i) const {
    check_node(*this, i);
    return adjacency_[i];
}

std::vector<std::pair<std::size_t, std::size_t>> Topology::edges() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t a = 0; a < adjacency_.size(); ++a)
        for (auto b : adjacency_[a])
            if (a < b) out.emplace_back(a, b);
    return out;
}

Topology Topology::parse_edge_list(std::string_view text, std::size_t min_nodes) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    std::size_t max_index = 0;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream fields(line);
        long a = 0, b = 0;
        std::string extra;
        if (!(fields >> a) || !(fields >> b) || (fields >> extra))
            throw ConfigError("edge list line " + std::to_string(line_no) + ": expected 'i j'");
        if (a < 1 || b < 1)
            throw ConfigError("edge list line " + std::to_string(line_no) + ": indices are 1-based");
        if (a == b)
            throw ConfigError("edge list line " + std::to_string(line_no) + ": self-loop");
        pairs.emplace_back(static_cast<std::size_t>(a - 1), static_cast<std::size_t>(b - 1));
        max_index = std::max({max_index, static_cast<std::size_t>(a), static_cast<std::size_t>(b)});
    }
    Topology t(std::max(max_index, min_nodes));
    for (auto [a, b] : pairs) t.add_edge(a, b);
    return t;
}

Topology Topology::load_edge_list(const std::string& path, std::size_t min_nodes) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open edge list '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_edge_list(buf.str(), min_nodes);
}

std::string Topology::to_edge_list() const {
    std::string out;
    for (auto [a, b] : edges()) out += std::to_string(a + 1) + " " + std::to_string(b + 1) + "\n";
    return out;
}

Topology default_topology() { return Topology::parse_edge_list(default_topology_edge_list(), 20); }

std::vector<std::size_t> neighborhood(const Topology& topology, std::size_t i) {
    const auto& nbrs = topology.neighbors(i);
    std::vector<std::size_t> out;
    out.reserve(nbrs.size() + 1);
    out.push_back(i);
    out.insert(out.end(), nbrs.begin(), nbrs.end());
    return out;
}

DropModel::DropModel(double uniform_p) : uniform_p_(uniform_p) { check_probability(uniform_p); }

void DropModel::set_link(std::size_t receiver, std::size_t sender, double p) {
    check_probability(p);
    if (receiver == sender) throw InvalidParameter("self-reception probability is fixed at 1");
    overrides_[{receiver, sender}] = p;
}

double DropModel::probability(std::size_t receiver, std::size_t sender) const {
    if (receiver == sender) return 1.0;
    if (auto it = overrides_.find({receiver, sender}); it != overrides_.end()) return it->second;
    return uniform_p_;
}

bool DropRealization::indicator(const Topology& topology, std::size_t receiver, std::size_t sender) const {
    if (receiver == sender) return true;
    const auto& nbrs = topology.neighbors(receiver);
    auto it = std::lower_bound(nbrs.begin(), nbrs.end(), sender);
    if (it == nbrs.end() || *it != sender)
        throw InvalidParameter("node " + std::to_string(sender + 1) + " is not a neighbour of node " +
                               std::to_string(receiver + 1));
    return received.at(receiver).at(static_cast<std::size_t>(it - nbrs.begin()) + 1) != 0;
}

DropRealization sample_drops(const DropModel& drop_model, const Topology& topology, std::size_t step,
                             RandomStream& rng) {
    DropRealization out;
    out.step = step;
    out.received.resize(topology.node_count());
    for (std::size_t i = 0; i < topology.node_count(); ++i) {
        const auto& nbrs = topology.neighbors(i);
        auto& row = out.received[i];
        row.reserve(nbrs.size() + 1);
        row.push_back(1);
        for (auto j : nbrs) row.push_back(rng.bernoulli(drop_model.probability(i, j)) ? 1 : 0);
    }
    return out;
}

NeighborhoodStack stack_neighborhood(const StateSpaceModel& model, const Topology& topology,
                                     const DropModel& drop_model, std::size_t i,
                                     const DropRealization& realization,
                                     std::span<const Vector> observations, FlopCounter* counter) {
    if (topology.node_count() != model.node_count())
        throw DimensionMismatch("topology and model disagree on the node count");
    NeighborhoodStack st;
    st.node = i;
    st.members = neighborhood(topology, i);
    if (realization.received.size() != topology.node_count() ||
        realization.received[i].size() != st.members.size())
        throw DimensionMismatch("drop realization does not match the topology");

    const auto n = model.state_dim();
    Eigen::Index total = 0;
    for (auto j : st.members) {
        st.offsets.push_back(total);
        total += model.measurement_dim(j);
    }
    st.c.resize(total, n);
    st.r = Matrix::Zero(total, total);
    st.d_gamma = Matrix::Zero(total, total);
    st.d_p = Matrix::Zero(total, total);
    Vector y(total);

    for (std::size_t k = 0; k < st.members.size(); ++k) {
        const auto j = st.members[k];
        const auto m = model.measurement_dim(j);
        const auto off = st.offsets[k];
        if (j >= observations.size() || observations[j].size() != m)
            throw InvalidParameter("missing observation for node " + std::to_string(j + 1) +
                                   " in the neighborhood of node " + std::to_string(i + 1));
        const double gamma = realization.received[i][k] ? 1.0 : 0.0;
        const double p = drop_model.probability(i, j);
        st.c.middleRows(off, m) = model.c[j];
        st.r.block(off, off, m, m) = model.r[j];
        st.d_gamma.block(off, off, m, m).diagonal().setConstant(gamma);
        st.d_p.block(off, off, m, m).diagonal().setConstant(p);
        y.segment(off, m) = observations[j];
    }
    st.s = counted_multiply(st.d_gamma, y, counter);
    return st;
}

}  // namespace dmckf
