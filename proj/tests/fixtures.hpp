#pragma once

#include "ezbft/explorer.hpp"
#include "ezbft/scenarios.hpp"

#include <map>
#include <set>

#include <string>
#include <vector>

namespace ezt {

using namespace ezbft;

inline const Config& honest() {
    static const Config c = paper_config();
    return c;
}

inline InstanceId inst(const std::string& s, const Config& cfg = honest()) { return Codec(cfg).instance(s); }

inline Command cmd(const std::string& id, const std::string& key = "x") {
    const ClientId c{static_cast<std::uint8_t>(id == "alpha" ? 0 : 1)};
    return {id, c, key, ""};
}

inline OrderingTuple tup(const std::string& id, std::vector<std::string> deps, std::uint32_t seq) {
    OrderingTuple t{cmd(id), {}, seq};
    for (const auto& d : deps) t.deps.insert(inst(d));
    return t;
}

inline SpecReply reply(const std::string& from, const std::string& at, const OrderingTuple& t,
                       std::uint32_t owner = 0) {
    return {honest().replica(from), t.command.client, inst(at), OwnerNumber{owner}, t};
}

inline CertPtr cert(CertPath path, const std::vector<SpecReply>& replies, const Config& cfg = honest()) {
    auto c = std::make_shared<CommitCertificate>();
    c->path = path;
    c->instance = replies.front().instance;
    c->owner_number = replies.front().owner_number;
    c->replies = replies;
    c->tuple = path == CertPath::fast ? replies.front().tuple : finalize_tuple(replies, cfg);
    return c;
}

inline OwnerChangeVote vote(const std::string& from, const std::string& at, std::uint32_t target,
                            const std::optional<SpecReply>& own, CertPtr c = nullptr) {
    OwnerChangeVote v;
    v.sender = honest().replica(from);
    v.instance = inst(at);
    v.owner_number = OwnerNumber{target};
    v.spec_reply = own;
    v.certificate = c;
    v.accepted_tuple = c ? c->tuple : own ? std::optional<OrderingTuple>(own->tuple) : std::nullopt;
    return v;
}

template <class T>
std::vector<const T*> bodies(StepOutput&&) = delete;

template <class T>
std::vector<const T*> bodies(const StepOutput& out) {
    std::vector<const T*> v;
    for (const auto& o : out.out) {
        if (const auto* b = std::get_if<T>(&o.body)) v.push_back(b);
    }
    return v;
}

inline std::string summary(const OrderingTuple& t) { return tuple_summary(t, honest()); }

inline std::vector<Effect> effects_of(const Trace& t, Effect::Kind k) {
    std::vector<Effect> out;
    for (const auto& s : t.steps) {
        for (const auto& e : s.effects) {
            if (e.kind == k) out.push_back(e);
        }
    }
    return out;
}

}  // namespace ezt
