#include "ezbft/core.hpp"

#include <algorithm>
#include <set>

namespace ezbft {

void Config::validate() const {
    if (n != 3 * f + 1) {
        throw ConfigError("replica count must be 3f+1 (n=" + std::to_string(n) +
                          ", f=" + std::to_string(f) + ")");
    }
    if (replica_ids.size() != n) {
        throw ConfigError("replica_ids must list exactly n identifiers");
    }
    if (n > 64 || client_ids.size() > 64) {
        throw ConfigError("configuration too large for the simulator");
    }
    std::set<std::string> seen;
    for (const auto& id : replica_ids) {
        if (id.empty() || !seen.insert(id).second) {
            throw ConfigError("replica identifiers must be non-empty and distinct: '" + id + "'");
        }
    }
    for (const auto& id : client_ids) {
        if (id.empty() || !seen.insert(id).second) {
            throw ConfigError("client identifiers must be non-empty and distinct: '" + id + "'");
        }
    }
    std::set<ReplicaId> byz(byzantine_ids.begin(), byzantine_ids.end());
    if (byz.size() != byzantine_ids.size()) throw ConfigError("duplicate byzantine id");
    if (byz.size() > f) throw ConfigError("more byzantine replicas than the fault bound");
    for (auto r : byz) {
        if (r.index >= n) throw ConfigError("byzantine id is not a replica");
    }
    for (auto c : faulty_client_ids) {
        if (c.index >= client_ids.size()) throw ConfigError("faulty client id is not a client");
    }
}

bool Config::is_byzantine(ReplicaId r) const {
    return std::find(byzantine_ids.begin(), byzantine_ids.end(), r) != byzantine_ids.end();
}

bool Config::is_faulty(ClientId c) const {
    return std::find(faulty_client_ids.begin(), faulty_client_ids.end(), c) !=
           faulty_client_ids.end();
}

ReplicaId Config::replica(std::string_view name) const {
    for (std::size_t i = 0; i < replica_ids.size(); ++i) {
        if (replica_ids[i] == name) return {static_cast<std::uint8_t>(i)};
    }
    throw ConfigError("unknown replica '" + std::string(name) + "'");
}

ClientId Config::client(std::string_view name) const {
    for (std::size_t i = 0; i < client_ids.size(); ++i) {
        if (client_ids[i] == name) return {static_cast<std::uint8_t>(i)};
    }
    throw ConfigError("unknown client '" + std::string(name) + "'");
}

NodeId Config::node(std::string_view name) const {
    for (std::size_t i = 0; i < replica_ids.size(); ++i) {
        if (replica_ids[i] == name) return NodeId::of(ReplicaId{static_cast<std::uint8_t>(i)});
    }
    for (std::size_t i = 0; i < client_ids.size(); ++i) {
        if (client_ids[i] == name) return NodeId::of(ClientId{static_cast<std::uint8_t>(i)});
    }
    throw ConfigError("unknown node '" + std::string(name) + "'");
}

const std::string& Config::name(NodeId id) const {
    return id.is_replica() ? replica_ids.at(id.index) : client_ids.at(id.index);
}

std::vector<ReplicaId> Config::replicas() const {
    std::vector<ReplicaId> out;
    for (std::uint32_t i = 0; i < n; ++i) out.push_back({static_cast<std::uint8_t>(i)});
    return out;
}

std::vector<ReplicaId> Config::correct_replicas() const {
    std::vector<ReplicaId> out;
    for (auto r : replicas()) {
        if (is_correct(r)) out.push_back(r);
    }
    return out;
}

bool interferes(const Command& a, const Command& b) {
    if (a.is_noop() || b.is_noop()) return false;
    return a.object_key == b.object_key && a.id != b.id;
}

DepSet::DepSet(std::initializer_list<InstanceId> ids) : DepSet(std::vector<InstanceId>(ids)) {}

DepSet::DepSet(std::vector<InstanceId> ids) : ids_(std::move(ids)) {
    std::sort(ids_.begin(), ids_.end());
    ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
}

void DepSet::insert(InstanceId id) {
    auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
    if (it == ids_.end() || *it != id) ids_.insert(it, id);
}

void DepSet::merge(const DepSet& other) {
    std::vector<InstanceId> out;
    out.reserve(ids_.size() + other.ids_.size());
    std::set_union(ids_.begin(), ids_.end(), other.ids_.begin(), other.ids_.end(),
                   std::back_inserter(out));
    ids_ = std::move(out);
}

bool DepSet::contains(InstanceId id) const {
    return std::binary_search(ids_.begin(), ids_.end(), id);
}

bool DepSet::is_subset_of(const DepSet& other) const {
    return std::includes(other.ids_.begin(), other.ids_.end(), ids_.begin(), ids_.end());
}

DepSet DepSet::minus(const DepSet& other) const {
    DepSet out;
    std::set_difference(ids_.begin(), ids_.end(), other.ids_.begin(), other.ids_.end(),
                        std::back_inserter(out.ids_));
    return out;
}

bool tuples_equal(const OrderingTuple& p, const OrderingTuple& q) {
    return p.command.id == q.command.id && p.seq == q.seq && p.deps == q.deps;
}

bool tuple_less(const OrderingTuple& p, const OrderingTuple& q) {
    if (p.command.id != q.command.id) return p.command.id < q.command.id;
    if (p.seq != q.seq) return p.seq < q.seq;
    return p.deps < q.deps;
}

std::uint32_t compute_seq(const DepSet& deps, const KnownTuples& known) {
    std::uint32_t highest = 0;
    for (auto d : deps) {
        auto it = known.find(d);
        if (it == known.end()) {
            throw MissingDependency("dependency at instance " + std::to_string(d.owner.index) +
                                    "." + std::to_string(d.slot) + " is unknown");
        }
        highest = std::max(highest, it->second.seq);
    }
    return highest + 1;
}

std::uint32_t compute_seq_known(const DepSet& deps, const KnownTuples& known) {
    std::uint32_t highest = 0;
    for (auto d : deps) {
        if (auto it = known.find(d); it != known.end()) highest = std::max(highest, it->second.seq);
    }
    return highest + 1;
}

}  // namespace ezbft
