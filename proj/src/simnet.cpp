#include "ezbft/simnet.hpp"

#include <algorithm>
#include <set>

namespace ezbft {

const char* to_string(Event::Kind k) {
    switch (k) {
        case Event::Kind::deliver: return "deliver";
        case Event::Kind::timeout: return "timeout";
        case Event::Kind::trigger_owner_change: return "trigger_owner_change";
        case Event::Kind::adversary: return "adversary";
        case Event::Kind::synchronous_tail: return "synchronous_tail";
    }
    return "unknown";
}

namespace {

constexpr int kMaxTailRounds = 64;

bool pending_less(const MessagePtr& m, const MessageId& id) { return m->id < id; }

}  // namespace

World World::start(const Config& cfg, const std::vector<WorkloadItem>& workload,
                   std::vector<MessagePtr>* emitted) {
    cfg.validate();
    World w;
    w.cfg = std::make_shared<const Config>(cfg);
    w.workload = workload;
    for (auto r : cfg.replicas()) w.replicas.emplace_back(r);
    for (std::size_t c = 0; c < cfg.client_ids.size(); ++c) {
        w.clients.emplace_back(ClientId{static_cast<std::uint8_t>(c)});
    }
    const std::size_t nodes = w.replicas.size() + w.clients.size();
    w.counters.assign(nodes, 0);
    w.clocks.assign(nodes, 0);

    std::set<std::string> ids;
    for (const auto& item : workload) {
        if (item.command.is_noop()) throw ConfigError("workload command without id");
        if (!ids.insert(item.command.id).second) throw ConfigError("duplicate command id " + item.command.id);
        if (item.command.client.index >= w.clients.size()) throw ConfigError("workload client out of range");
        if (item.target.index >= w.replicas.size()) throw ConfigError("workload target out of range");
        auto& client = w.clients[item.command.client.index];
        if (client.command) throw ConfigError("client " + cfg.name(client.id) + " has two commands");
        Event ev;
        ev.kind = Event::Kind::adversary;
        ev.node = NodeId::of(client.id);
        auto rec = w.record(ev, NodeId::of(client.id), std::nullopt, submit(client, item.command, item.target));
        if (emitted) {
            for (auto& m : rec.emitted) emitted->push_back(std::move(m));
        }
    }
    return w;
}

std::size_t World::slot(NodeId n) const {
    return n.is_replica() ? n.index : replicas.size() + n.index;
}

const MessagePtr* World::find_pending(const MessageId& id) const {
    auto it = std::lower_bound(pending.begin(), pending.end(), id, pending_less);
    return it != pending.end() && (*it)->id == id ? &*it : nullptr;
}

std::vector<MessageId> World::pending_messages() const {
    std::vector<MessageId> out;
    out.reserve(pending.size());
    for (const auto& m : pending) out.push_back(m->id);
    return out;
}

StepRecord World::record(const Event& ev, NodeId actor, std::optional<MessageId> cause, StepOutput&& out) {
    StepRecord rec;
    rec.event = ev;
    const std::size_t s = slot(actor);
    std::uint32_t clock = clocks[s];
    for (auto& o : out.out) {
        auto m = std::make_shared<Message>();
        m->id = {actor, counters[s]++};
        m->from = actor;
        m->to = o.to;
        m->step = clocks[s] + 1 + o.hop;
        m->cause = cause;
        m->body = std::move(o.body);
        m->seal();
        clock = std::max(clock, m->step);
        auto it = std::lower_bound(pending.begin(), pending.end(), m->id, pending_less);
        pending.insert(it, m);
        rec.emitted.push_back(std::move(m));
    }
    clocks[s] = clock;
    rec.effects = std::move(out.effects);
    if (record_digests) rec.digests = node_digests();
    return rec;
}

StepRecord World::deliver(const Event& ev, const MessagePtr& msg) {
    const Config& c = *cfg;
    auto it = std::lower_bound(pending.begin(), pending.end(), msg->id, pending_less);
    pending.erase(it);
    const NodeId to = msg->to;
    clocks[slot(to)] = std::max(clocks[slot(to)], msg->step);

    const ByzantineChoice honest;
    const ByzantineChoice& choice = ev.byzantine ? *ev.byzantine : honest;
    StepOutput out;

    if (to.is_replica()) {
        auto& st = replicas[to.index];
        const bool byz = c.is_byzantine(st.id);
        if (ev.byzantine && !byz) throw ScheduleError("byzantine choice on correct replica " + c.name(st.id));
        const bool silent = byz && choice.kind == ByzantineChoice::Kind::silent;
        std::visit(
            [&](const auto& body) {
                using T = std::decay_t<decltype(body)>;
                if constexpr (std::is_same_v<T, ClientRequest>) {
                    out = byz ? byz_propose(st, body.command, choice, c) : on_client_request(st, body.command, c);
                } else if constexpr (std::is_same_v<T, SpecOrder>) {
                    out = byz ? byz_spec_replies(st, msg->from, body, choice, c)
                              : on_spec_order(st, msg->from, body, c);
                } else if constexpr (std::is_same_v<T, CommitFast>) {
                    if (!silent) out = on_commit_fast(st, body, c);
                } else if constexpr (std::is_same_v<T, Commit>) {
                    if (!silent) out = on_commit(st, msg->from, body, c);
                } else if constexpr (std::is_same_v<T, OwnerChange>) {
                    if (!silent) {
                        if (body.vote.sender != msg->from.replica() || !msg->from.is_replica()) {
                            Effect e;
                            e.kind = Effect::Kind::drop;
                            e.node = to;
                            e.instance = body.vote.instance;
                            e.detail = to_string(DropReason::unexpected);
                            out.effects.push_back(std::move(e));
                        } else {
                            out = on_owner_change(st, body.vote, c);
                        }
                    }
                } else if constexpr (std::is_same_v<T, NewOwner>) {
                    if (!silent) out = on_new_owner(st, msg->from, body, c);
                } else {
                    Effect e;
                    e.kind = Effect::Kind::drop;
                    e.node = to;
                    e.detail = to_string(DropReason::unexpected);
                    out.effects.push_back(std::move(e));
                }
            },
            msg->body);
    } else {
        if (ev.byzantine) throw ScheduleError("byzantine choice on a client delivery");
        auto& cl = clients[to.index];
        const bool faulty = c.is_faulty(cl.id);
        if (const auto* r = std::get_if<SpecReply>(&msg->body)) {
            if (faulty) {
                record_spec_reply(cl, msg->id, *r);
            } else {
                out = on_spec_reply(cl, msg->id, *r, c);
            }
        } else if (const auto* cr = std::get_if<CommitReply>(&msg->body)) {
            out = on_commit_reply(cl, *cr, c);
        }
    }
    return record(ev, to, msg->id, std::move(out));
}

StepRecord World::apply(const Event& ev) {
    const Config& c = *cfg;
    switch (ev.kind) {
        case Event::Kind::deliver: {
            if (!ev.message) throw ScheduleError("deliver without message id");
            const auto* m = find_pending(*ev.message);
            if (!m) {
                const auto& id = *ev.message;
                const bool produced =
                    slot(id.producer) < counters.size() && id.counter < counters[slot(id.producer)];
                throw ScheduleError(std::string(produced ? "message already delivered: " : "no such message: ") +
                                    c.name(id.producer) + "#" + std::to_string(id.counter));
            }
            MessagePtr msg = *m;
            return deliver(ev, msg);
        }
        case Event::Kind::timeout: {
            if (!ev.node.is_client() || ev.node.index >= clients.size()) {
                throw ScheduleError("timeout on a non-client node");
            }
            auto& cl = clients[ev.node.index];
            StepOutput out;
            if (!c.is_faulty(cl.id)) out = on_timeout(cl, c);
            return record(ev, ev.node, std::nullopt, std::move(out));
        }
        case Event::Kind::trigger_owner_change: {
            if (!ev.node.is_replica() || ev.node.index >= replicas.size() || !ev.instance) {
                throw ScheduleError("trigger_owner_change needs a replica and an instance");
            }
            auto& st = replicas[ev.node.index];
            StepOutput out;
            if (ev.byzantine) {
                if (!c.is_byzantine(st.id)) throw ScheduleError("byzantine choice on correct replica");
                out = byz_owner_change_vote(st, *ev.instance, *ev.byzantine, c);
            } else {
                out = trigger_owner_change(st, *ev.instance, c);
            }
            return record(ev, ev.node, std::nullopt, std::move(out));
        }
        case Event::Kind::adversary: {
            StepOutput out;
            if (ev.node.is_replica()) {
                if (ev.node.index >= replicas.size() || !c.is_byzantine(ev.node.replica())) {
                    throw ScheduleError("adversary event on a correct replica");
                }
                if (!ev.byzantine) throw ScheduleError("adversary event without a byzantine choice");
                const auto instance = ev.instance ? ev.instance : ev.byzantine->instance;
                if (!instance) throw ScheduleError("adversary vote without an instance");
                out = byz_owner_change_vote(replicas[ev.node.index], *instance, *ev.byzantine, c);
            } else {
                if (ev.node.index >= clients.size() || !c.is_faulty(ev.node.client())) {
                    throw ScheduleError("adversary event on a correct client");
                }
                if (!ev.faulty) throw ScheduleError("adversary event without a faulty-client choice");
                out = faulty_client_certificates(clients[ev.node.index], *ev.faulty, c);
            }
            return record(ev, ev.node, std::nullopt, std::move(out));
        }
        case Event::Kind::synchronous_tail: break;
    }
    throw ScheduleError("synchronous_tail must be run through World::synchronous_tail");
}

std::vector<StepRecord> World::synchronous_tail(const Event& ev) {
    const Config& c = *cfg;
    std::vector<StepRecord> out;
    auto emit = [&](StepRecord&& r) {
        r.tail = true;
        out.push_back(std::move(r));
    };
    for (int round = 0; round < kMaxTailRounds; ++round) {
        bool changed = false;
        while (!pending.empty()) {
            MessagePtr m = pending.front();
            Event d;
            d.kind = Event::Kind::deliver;
            d.message = m->id;
            d.note = ev.note;
            emit(deliver(d, m));
            changed = true;
        }
        for (auto& cl : clients) {
            if (c.is_faulty(cl.id) || !timeout_ready(cl, c)) continue;
            Event t;
            t.kind = Event::Kind::timeout;
            t.node = NodeId::of(cl.id);
            emit(apply(t));
            changed = true;
        }
        if (changed) continue;

        std::set<InstanceId> open;
        for (auto r : c.correct_replicas()) {
            for (const auto& rec : replicas[r.index].log) open.insert(rec.instance);
        }
        for (auto i : open) {
            bool everywhere = true;
            OwnerNumber target = c.default_owner_number(i);
            for (auto r : c.correct_replicas()) {
                everywhere = everywhere && replicas[r.index].committed(i);
                target = std::max(target, replicas[r.index].owner_number(i, c));
            }
            if (everywhere) continue;
            if (target == c.default_owner_number(i)) target.value += 1;
            for (auto r : c.correct_replicas()) {
                if (replicas[r.index].owner_number(i, c) >= target) continue;
                Event t;
                t.kind = Event::Kind::trigger_owner_change;
                t.node = NodeId::of(r);
                t.instance = i;
                emit(apply(t));
                changed = true;
            }
        }
        if (!changed) break;
    }
    tail_ran = true;
    return out;
}

Digest World::digest() const {
    Hasher h;
    for (const auto& r : replicas) r.hash_into(h);
    for (const auto& cl : clients) cl.hash_into(h);
    h.word(pending.size());
    for (const auto& m : pending) h.digest(m->digest);
    for (auto n : counters) h.word(n);
    h.word(tail_ran ? 1 : 0);
    return h.finish();
}

std::vector<std::pair<std::string, std::string>> World::node_digests() const {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& r : replicas) {
        Hasher h;
        r.hash_into(h);
        out.emplace_back(cfg->name(r.id), h.finish().hex());
    }
    for (const auto& cl : clients) {
        Hasher h;
        cl.hash_into(h);
        out.emplace_back(cfg->name(cl.id), h.finish().hex());
    }
    return out;
}

Trace run(const Schedule& schedule) {
    Trace trace;
    trace.config = schedule.config;
    trace.workload = schedule.workload;
    World w = World::start(schedule.config, schedule.workload, &trace.initial);
    trace.initial_digests = w.node_digests();
    std::uint32_t seq = 0;
    for (const auto& ev : schedule.events) {
        if (ev.kind == Event::Kind::synchronous_tail) {
            StepRecord marker;
            marker.seq_no = ++seq;
            marker.event = ev;
            marker.tail = true;
            marker.digests = w.node_digests();
            trace.steps.push_back(std::move(marker));
            for (auto& r : w.synchronous_tail(ev)) {
                r.seq_no = ++seq;
                trace.steps.push_back(std::move(r));
            }
            trace.has_tail = true;
            continue;
        }
        auto r = w.apply(ev);
        r.seq_no = ++seq;
        trace.steps.push_back(std::move(r));
    }
    return trace;
}

World replay_world(const Schedule& schedule) {
    World w = World::start(schedule.config, schedule.workload);
    for (const auto& ev : schedule.events) {
        if (ev.kind == Event::Kind::synchronous_tail) {
            w.synchronous_tail(ev);
        } else {
            w.apply(ev);
        }
    }
    return w;
}

}  // namespace ezbft
