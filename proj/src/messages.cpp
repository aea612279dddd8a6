#include "ezbft/messages.hpp"

#include <algorithm>
#include <set>

namespace ezbft {

bool records_equal(const SpecReply& a, const SpecReply& b) {
    return a.replica == b.replica && a.client == b.client && a.instance == b.instance &&
           a.owner_number == b.owner_number && tuples_equal(a.tuple, b.tuple);
}

const char* to_string(CertDefect d) {
    switch (d) {
        case CertDefect::none: return "none";
        case CertDefect::too_few_replies: return "too_few_replies";
        case CertDefect::duplicate_signer: return "duplicate_signer";
        case CertDefect::wrong_instance: return "wrong_instance";
        case CertDefect::mixed_owner_numbers: return "mixed_owner_numbers";
        case CertDefect::wrong_command: return "wrong_command";
        case CertDefect::not_identical: return "not_identical";
        case CertDefect::deps_not_union: return "deps_not_union";
        case CertDefect::seq_mismatch: return "seq_mismatch";
    }
    return "unknown";
}

CertDefect validate_certificate(const CommitCertificate& cert, const Config& cfg) {
    const auto& replies = cert.replies;
    if (cert.path == CertPath::fast) {
        if (replies.size() != cfg.fast_quorum()) return CertDefect::too_few_replies;
    } else if (replies.size() < cfg.slow_quorum()) {
        return CertDefect::too_few_replies;
    }

    std::set<ReplicaId> signers;
    std::uint32_t max_seq = 0;
    DepSet deps_union;
    for (const auto& r : replies) {
        if (r.replica.index >= cfg.n || !signers.insert(r.replica).second) {
            return CertDefect::duplicate_signer;
        }
        if (r.instance != cert.instance) return CertDefect::wrong_instance;
        if (r.owner_number != cert.owner_number) return CertDefect::mixed_owner_numbers;
        if (r.tuple.command.id != cert.tuple.command.id) return CertDefect::wrong_command;
        max_seq = std::max(max_seq, r.tuple.seq);
        deps_union.merge(r.tuple.deps);
    }

    if (cert.path == CertPath::fast) {
        for (const auto& r : replies) {
            if (!tuples_equal(r.tuple, cert.tuple)) return CertDefect::not_identical;
        }
        return CertDefect::none;
    }

    if (deps_union != cert.tuple.deps) return CertDefect::deps_not_union;
    const bool seq_ok = cfg.seq_mode == SeqMode::max_of_replies ? cert.tuple.seq == max_seq
                                                                 : cert.tuple.seq >= max_seq;
    return seq_ok ? CertDefect::none : CertDefect::seq_mismatch;
}

OrderingTuple finalize_tuple(const std::vector<SpecReply>& replies, const Config& cfg,
                             const KnownTuples& known) {
    OrderingTuple out;
    if (replies.empty()) return out;
    out.command = replies.front().tuple.command;
    out.seq = 0;
    for (const auto& r : replies) {
        out.deps.merge(r.tuple.deps);
        out.seq = std::max(out.seq, r.tuple.seq);
    }
    if (cfg.seq_mode == SeqMode::recompute) {
        out.seq = std::max(out.seq, compute_seq_known(out.deps, known));
    }
    return out;
}

const char* kind_name(const MessageBody& body) {
    struct Visitor {
        const char* operator()(const ClientRequest&) const { return "request"; }
        const char* operator()(const SpecOrder&) const { return "spec_order"; }
        const char* operator()(const SpecReply&) const { return "spec_reply"; }
        const char* operator()(const CommitFast&) const { return "commit_fast"; }
        const char* operator()(const Commit&) const { return "commit"; }
        const char* operator()(const CommitReply&) const { return "commit_reply"; }
        const char* operator()(const OwnerChange&) const { return "owner_change"; }
        const char* operator()(const NewOwner&) const { return "new_owner"; }
    };
    return std::visit(Visitor{}, body);
}

// ---------------------------------------------------------------------------

void hash_append(Hasher& h, const Command& c) {
    h.str(c.id);
    h.word(c.client.index);
    h.str(c.object_key);
    h.str(c.payload);
}

static void hash_append(Hasher& h, InstanceId i) { h.word((std::uint64_t{i.owner.index} << 32) | i.slot); }

void hash_append(Hasher& h, const OrderingTuple& t) {
    hash_append(h, t.command);
    h.word(t.deps.size());
    for (auto d : t.deps) hash_append(h, d);
    h.word(t.seq);
}

void hash_append(Hasher& h, const SpecReply& r) {
    h.word(r.replica.index);
    h.word(r.client.index);
    hash_append(h, r.instance);
    h.word(r.owner_number.value);
    hash_append(h, r.tuple);
}

void hash_append(Hasher& h, const CommitCertificate& c) {
    h.word(static_cast<std::uint64_t>(c.path));
    hash_append(h, c.instance);
    h.word(c.owner_number.value);
    hash_append(h, c.tuple);
    h.word(c.replies.size());
    for (const auto& r : c.replies) hash_append(h, r);
}

static void hash_cert(Hasher& h, const CertPtr& c) {
    h.word(c ? 1 : 0);
    if (c) hash_append(h, *c);
}

void hash_append(Hasher& h, const OwnerChangeVote& v) {
    h.word(v.sender.index);
    hash_append(h, v.instance);
    h.word(v.owner_number.value);
    h.word(v.accepted_tuple ? 1 : 0);
    if (v.accepted_tuple) hash_append(h, *v.accepted_tuple);
    h.word(v.spec_reply ? 1 : 0);
    if (v.spec_reply) hash_append(h, *v.spec_reply);
    hash_cert(h, v.certificate);
    h.word(v.dep_evidence.size());
    for (const auto& e : v.dep_evidence) {
        hash_append(h, e.instance);
        h.word(e.spec_reply ? 1 : 0);
        if (e.spec_reply) hash_append(h, *e.spec_reply);
        hash_cert(h, e.certificate);
    }
}

void hash_append(Hasher& h, const MessageBody& body) {
    h.word(body.index());
    std::visit(
        [&h](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, ClientRequest>) {
                hash_append(h, m.command);
            } else if constexpr (std::is_same_v<T, SpecOrder>) {
                hash_append(h, m.instance);
                h.word(m.owner_number.value);
                hash_append(h, m.tuple);
            } else if constexpr (std::is_same_v<T, SpecReply>) {
                hash_append(h, m);
            } else if constexpr (std::is_same_v<T, CommitFast>) {
                hash_cert(h, m.certificate);
            } else if constexpr (std::is_same_v<T, Commit>) {
                hash_append(h, m.tuple);
                hash_cert(h, m.certificate);
            } else if constexpr (std::is_same_v<T, CommitReply>) {
                h.word(m.replica.index);
                hash_append(h, m.instance);
                hash_append(h, m.tuple);
                h.str(m.result);
            } else if constexpr (std::is_same_v<T, OwnerChange>) {
                hash_append(h, m.vote);
            } else if constexpr (std::is_same_v<T, NewOwner>) {
                hash_append(h, m.instance);
                h.word(m.owner_number.value);
                hash_append(h, m.tuple);
                h.word(m.proof.size());
                for (const auto& v : m.proof) hash_append(h, v);
            }
        },
        body);
}

void Message::seal() {
    Hasher h;
    h.word((std::uint64_t{id.producer.index} << 8) | static_cast<std::uint64_t>(id.producer.kind));
    h.word(id.counter);
    h.word((std::uint64_t{from.index} << 8) | static_cast<std::uint64_t>(from.kind));
    h.word((std::uint64_t{to.index} << 8) | static_cast<std::uint64_t>(to.kind));
    hash_append(h, body);
    digest = h.finish();
}

}  // namespace ezbft
