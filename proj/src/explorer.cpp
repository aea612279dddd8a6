#include "ezbft/explorer.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

namespace ezbft {

std::vector<WorkloadItem> default_workload(const Config& cfg, std::size_t commands, const std::string& beta_target) {
    std::vector<WorkloadItem> w;
    if (commands == 0) return w;
    if (cfg.client_ids.size() < commands || commands > 2) throw ConfigError("workload needs one client per command (max 2)");
    w.push_back({{"alpha", ClientId{0}, "x", ""}, ReplicaId{0}});
    if (commands == 2) {
        const ReplicaId target = beta_target.empty() ? ReplicaId{static_cast<std::uint8_t>(std::min<std::uint32_t>(2, cfg.n - 1))}
                                                     : cfg.replica(beta_target);
        w.push_back({{"beta", ClientId{1}, "x", ""}, target});
    }
    return w;
}

std::optional<ViolationReport> replay_check(const Schedule& schedule, Property p) {
    try {
        const Trace trace = run(schedule);
        const auto obs = observe(trace);
        if (p == Property::liveness && !obs.has_tail) return std::nullopt;
        return check(p, obs);
    } catch (const Error&) {
        return std::nullopt;
    }
}

Schedule minimize(const Schedule& schedule, const ViolationReport& report) {
    Schedule best = schedule;
    for (bool shrunk = true; shrunk;) {
        shrunk = false;
        for (std::size_t i = best.events.size(); i-- > 0;) {
            Schedule trial = best;
            trial.events.erase(trial.events.begin() + static_cast<std::ptrdiff_t>(i));
            auto r = replay_check(trial, report.property);
            if (r && same_report(*r, report)) {
                best = std::move(trial);
                shrunk = true;
            }
        }
    }
    for (std::size_t i = 0; i < best.events.size(); ++i) best.events[i].seq_no = static_cast<std::uint32_t>(i + 1);
    return best;
}

namespace {

struct History {
    std::shared_ptr<const History> parent;
    Event event;
};
using HistPtr = std::shared_ptr<const History>;

std::vector<Event> events_of(const HistPtr& h) {
    std::vector<Event> out;
    for (const History* p = h.get(); p; p = p->parent.get()) out.push_back(p->event);
    std::reverse(out.begin(), out.end());
    for (std::size_t i = 0; i < out.size(); ++i) out[i].seq_no = static_cast<std::uint32_t>(i + 1);
    return out;
}

struct Frame {
    World world;
    HistPtr history;
    std::uint32_t depth = 0;
};

void add_unique(std::vector<OrderingTuple>& v, const OrderingTuple& t) {
    for (const auto& x : v) {
        if (tuples_equal(x, t)) return;
    }
    v.push_back(t);
}

class ActionGen {
  public:
    ActionGen(const Config& cfg, const ExploreBounds& b) : cfg_(cfg), b_(b) {}

    /// Tuples a byzantine replica may claim for `base`'s command: as proposed,
    /// as a correct replica would compute it, then other dependency subsets
    /// over instances it knows.
    std::vector<OrderingTuple> candidate_tuples(const ReplicaState& st, InstanceId instance,
                                                const OrderingTuple& base) const {
        std::vector<OrderingTuple> out;
        add_unique(out, base);
        add_unique(out, updated_tuple(st, instance, base));
        std::vector<InstanceId> visible;
        for (const auto& r : st.log) {
            if (r.instance != instance) visible.push_back(r.instance);
        }
        const auto known = st.known();
        const std::size_t subsets = visible.size() < 8 ? (std::size_t{1} << visible.size()) : 256;
        for (std::size_t mask = 0; mask < subsets && out.size() < b_.byzantine_branch_tuples; ++mask) {
            OrderingTuple t = base;
            t.deps = {};
            for (std::size_t k = 0; k < visible.size() && k < 8; ++k) {
                if (mask & (std::size_t{1} << k)) t.deps.insert(visible[k]);
            }
            t.seq = std::max<std::uint32_t>(1, compute_seq_known(t.deps, known));
            add_unique(out, t);
        }
        if (out.size() > b_.byzantine_branch_tuples) out.resize(b_.byzantine_branch_tuples);
        return out;
    }

    std::vector<Event> actions(const World& w) const {
        std::vector<Event> out;
        for (const auto& m : w.pending) {
            Event ev;
            ev.kind = Event::Kind::deliver;
            ev.message = m->id;
            if (m->to.is_replica() && cfg_.is_byzantine(m->to.replica())) {
                out.push_back(ev);
                if (const auto* so = std::get_if<SpecOrder>(&m->body)) {
                    Event silent = ev;
                    silent.byzantine = ByzantineChoice{ByzantineChoice::Kind::silent, {}, {}, {}, {}};
                    out.push_back(silent);
                    const auto cands = candidate_tuples(w.replicas[m->to.index], so->instance, so->tuple);
                    for (std::size_t i = 0; i < cands.size(); ++i) {
                        for (std::size_t j = 0; j < cands.size(); ++j) {
                            if (i == j) continue;
                            Event eq = ev;
                            eq.byzantine = ByzantineChoice{ByzantineChoice::Kind::equivocate_spec_reply,
                                                           {cands[i], cands[j]}, {}, {}, {}};
                            out.push_back(std::move(eq));
                        }
                    }
                }
                continue;
            }
            out.push_back(std::move(ev));
        }
        for (const auto& cl : w.clients) {
            if (cfg_.is_faulty(cl.id) || !timeout_ready(cl, cfg_)) continue;
            Event ev;
            ev.kind = Event::Kind::timeout;
            ev.node = NodeId::of(cl.id);
            out.push_back(std::move(ev));
        }
        for (const auto& cl : w.clients) {
            if (!cfg_.is_faulty(cl.id) || cl.certificates_sent.size() >= b_.faulty_sends) continue;
            faulty_actions(cl, out);
        }
        std::set<InstanceId> instances;
        for (const auto& st : w.replicas) {
            for (const auto& r : st.log) instances.insert(r.instance);
        }
        for (auto i : instances) {
            for (const auto& st : w.replicas) {
                const auto cur = st.owner_number(i, cfg_).value;
                if (cur - cfg_.default_owner_number(i).value >= b_.max_owner_changes_per_instance) continue;
                Event ev;
                ev.kind = Event::Kind::trigger_owner_change;
                ev.node = NodeId::of(st.id);
                ev.instance = i;
                out.push_back(ev);
                if (!cfg_.is_byzantine(st.id)) continue;
                const auto* rec = st.find(i);
                if (!rec) continue;
                for (const auto& t : candidate_tuples(st, i, rec->tuple)) {
                    Event arb = ev;
                    arb.byzantine = ByzantineChoice{ByzantineChoice::Kind::arbitrary_owner_change_tuple, {t}, {}, {}, {}};
                    out.push_back(std::move(arb));
                }
            }
        }
        return out;
    }

    /// Single-certificate sends a faulty client can make from what it holds,
    /// deduplicated by vouched tuple.
    void faulty_actions(const ClientState& cl, std::vector<Event>& out) const {
        // Group distinct-sender choices per (instance, owner number).
        std::map<std::pair<InstanceId, OwnerNumber>, std::map<ReplicaId, std::vector<MessageId>>> groups;
        for (const auto& [mid, r] : cl.received) groups[{r.instance, r.owner_number}][r.replica].push_back(mid);

        std::vector<std::pair<CertPath, OrderingTuple>> seen;
        std::vector<CertificateSpec> specs;
        for (const auto& [key, by_sender] : groups) {
            std::vector<ReplicaId> senders;
            for (const auto& [s, _] : by_sender) senders.push_back(s);
            const std::size_t n = senders.size();
            if (n < cfg_.slow_quorum()) continue;
            for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
                if (static_cast<std::size_t>(__builtin_popcountll(mask)) < cfg_.slow_quorum()) continue;
                std::vector<ReplicaId> chosen;
                for (std::size_t k = 0; k < n; ++k) {
                    if (mask & (std::size_t{1} << k)) chosen.push_back(senders[k]);
                }
                // Odometer over one reply per chosen sender.
                std::vector<std::size_t> pick(chosen.size(), 0);
                while (true) {
                    std::vector<MessageId> ids;
                    std::vector<SpecReply> replies;
                    for (std::size_t k = 0; k < chosen.size(); ++k) {
                        const auto& mid = by_sender.at(chosen[k])[pick[k]];
                        ids.push_back(mid);
                        replies.push_back(*cl.reply_by_id(mid));
                    }
                    auto consider = [&](CertPath path, const OrderingTuple& t) {
                        for (const auto& [p, x] : seen) {
                            if (p == path && tuples_equal(x, t)) return;
                        }
                        seen.emplace_back(path, t);
                        specs.push_back({path, ids, {}});
                    };
                    consider(CertPath::slow, finalize_tuple(replies, cfg_));
                    if (replies.size() == cfg_.fast_quorum() &&
                        std::all_of(replies.begin(), replies.end(),
                                    [&](const SpecReply& r) { return tuples_equal(r.tuple, replies[0].tuple); })) {
                        consider(CertPath::fast, replies[0].tuple);
                    }
                    std::size_t k = 0;
                    for (; k < chosen.size(); ++k) {
                        if (++pick[k] < by_sender.at(chosen[k]).size()) break;
                        pick[k] = 0;
                    }
                    if (k == chosen.size()) break;
                }
            }
        }
        for (const auto& spec : specs) {
            for (auto r : cfg_.replicas()) {
                Event ev;
                ev.kind = Event::Kind::adversary;
                ev.node = NodeId::of(cl.id);
                FaultyClientChoice choice;
                choice.kind = FaultyClientChoice::Kind::selective_send;
                choice.certificates = {{spec.path, spec.reply_ids, {r}}};
                ev.faulty = std::move(choice);
                out.push_back(std::move(ev));
            }
        }
    }

  private:
    const Config& cfg_;
    const ExploreBounds& b_;
};

class Explorer {
  public:
    Explorer(const Config& cfg, const ExploreBounds& bounds, const std::vector<Property>& props)
        : cfg_(cfg), b_(bounds), props_(props), start_(std::chrono::steady_clock::now()) {
        for (auto p : props_) {
            if (p != Property::liveness) safety_props_.push_back(p);
        }
    }

    ExploreResult run() {
        std::vector<Frame> stack;
        {
            Frame root{World::start(cfg_, b_.workload), nullptr, 0};
            root.world.record_digests = false;
            stack.push_back(std::move(root));
        }
        bool complete = true;
        while (!stack.empty() && !stop_) {
            Frame f = std::move(stack.back());
            stack.pop_back();

            const Digest d = f.world.digest();
            auto [it, inserted] = visited_.try_emplace(d, f.depth);
            if (!inserted) {
                if (it->second <= f.depth) continue;
                it->second = f.depth;
            }
            ++res_.states_visited;
            if (limit_hit()) {
                complete = false;
                break;
            }

            auto acts = ActionGen(cfg_, b_).actions(f.world);
            if (acts.empty() || f.depth >= b_.max_events) {
                run_tail(f.world, f.history);
                continue;
            }
            for (auto a = acts.rbegin(); a != acts.rend() && !stop_; ++a) {
                Frame child{f.world, std::make_shared<History>(History{f.history, *a}), f.depth + 1};
                StepRecord rec;
                try {
                    rec = child.world.apply(*a);
                } catch (const Error&) {
                    continue;
                }
                ++res_.transitions;
                if (b_.eager_faulty_delivery) absorb_faulty(child);
                bool committed = false;
                bool conflict = false;
                for (const auto& e : rec.effects) {
                    committed = committed || e.kind == Effect::Kind::commit;
                    conflict = conflict || (e.kind == Effect::Kind::selection && e.outcome == SelectionOutcome::conflict);
                }
                if (committed && !safety_props_.empty()) {
                    const auto obs = observe(child.world);
                    for (auto p : safety_props_) {
                        if (auto r = check(p, obs)) found(*r, events_of(child.history), false);
                    }
                }
                if (conflict) run_tail(child.world, child.history);
                stack.push_back(std::move(child));
            }
        }
        res_.exhausted = complete && !stop_ && stack.empty();
        res_.seconds = elapsed();
        return std::move(res_);
    }

  private:
    /// Delivers everything addressed to faulty clients. Their options only
    /// grow with what they hold, so holding messages back adds no behaviour.
    void absorb_faulty(Frame& f) const {
        for (bool again = true; again;) {
            again = false;
            for (const auto& m : f.world.pending) {
                if (!m->to.is_client() || !cfg_.is_faulty(m->to.client())) continue;
                Event ev;
                ev.kind = Event::Kind::deliver;
                ev.message = m->id;
                f.world.apply(ev);
                f.history = std::make_shared<History>(History{f.history, ev});
                again = true;
                break;
            }
        }
    }

    double elapsed() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

    bool limit_hit() const {
        if (b_.max_states && res_.states_visited >= b_.max_states) return true;
        if (b_.time_limit_seconds > 0 && (res_.states_visited & 1023) == 0 && elapsed() > b_.time_limit_seconds) {
            return true;
        }
        return false;
    }

    void run_tail(const World& w, const HistPtr& h) {
        World t = w;
        Event ev;
        ev.kind = Event::Kind::synchronous_tail;
        try {
            t.synchronous_tail(ev);
        } catch (const Error&) {
            return;
        }
        ++res_.tails_run;
        const auto obs = observe(t);
        std::vector<Event> events;
        bool have_events = false;
        for (auto p : props_) {
            if (auto r = check(p, obs)) {
                if (!have_events) {
                    events = events_of(h);
                    events.push_back(ev);
                    events.back().seq_no = static_cast<std::uint32_t>(events.size());
                    have_events = true;
                }
                found(*r, events, true);
            }
        }
    }

    void found(const ViolationReport& r, const std::vector<Event>& events, bool) {
        const std::string key = std::string(to_string(r.property)) + "|" + witness_summary(r, cfg_);
        if (!seen_.insert(key).second) return;
        ++res_.counts[r.property];
        auto& kept = kept_[r.property];
        if (kept < b_.keep_per_property) {
            ++kept;
            Schedule s{cfg_, b_.workload, events};
            FoundViolation v;
            v.report = r;
            v.original_events = events.size();
            // World-derived reports carry no trace positions; the replayed
            // trace supplies them.
            if (auto replayed = replay_check(s, r.property); replayed && same_report(*replayed, r)) {
                v.schedule = minimize(s, *replayed);
                auto again = replay_check(v.schedule, r.property);
                v.replays = again && same_report(*again, r);
                if (again) v.report = *again;
            } else {
                v.schedule = s;
            }
            res_.violations.push_back(std::move(v));
        }
        if (!b_.stop_when_found.empty()) {
            stop_ = std::all_of(b_.stop_when_found.begin(), b_.stop_when_found.end(),
                                [&](Property p) { return res_.counts.count(p) != 0; });
        }
    }

    const Config& cfg_;
    const ExploreBounds& b_;
    std::vector<Property> props_;
    std::vector<Property> safety_props_;
    std::chrono::steady_clock::time_point start_;
    std::unordered_map<Digest, std::uint32_t, DigestHash> visited_;
    std::set<std::string> seen_;
    std::map<Property, std::uint32_t> kept_;
    ExploreResult res_;
    bool stop_ = false;
};

}  // namespace

std::vector<Event> enabled_events(const World& world, const ExploreBounds& bounds) {
    return ActionGen(*world.cfg, bounds).actions(world);
}

ExploreResult explore(const Config& cfg, const ExploreBounds& bounds, const std::vector<Property>& properties) {
    cfg.validate();
    if (bounds.deepen_from == 0 || bounds.deepen_from >= bounds.max_events) {
        Explorer ex(cfg, bounds, properties);
        auto r = ex.run();
        r.max_events = bounds.max_events;
        return r;
    }
    const auto start = std::chrono::steady_clock::now();
    ExploreResult total;
    ExploreBounds b = bounds;
    for (std::uint32_t e = bounds.deepen_from; e <= bounds.max_events; ++e) {
        b.max_events = e;
        if (bounds.time_limit_seconds > 0) {
            b.time_limit_seconds = bounds.time_limit_seconds -
                                   std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            if (b.time_limit_seconds <= 0) break;
        }
        Explorer ex(cfg, b, properties);
        auto r = ex.run();
        total.states_visited += r.states_visited;
        total.transitions += r.transitions;
        total.tails_run += r.tails_run;
        total.exhausted = r.exhausted;
        total.max_events = e;
        total.violations = std::move(r.violations);
        total.counts = std::move(r.counts);
        const bool satisfied =
            !bounds.stop_when_found.empty() &&
            std::all_of(bounds.stop_when_found.begin(), bounds.stop_when_found.end(),
                        [&](Property p) { return total.counts.count(p) != 0; });
        if (satisfied || !r.exhausted) break;
    }
    total.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return total;
}

Json encode_result(const ExploreResult& r, const Config& cfg) {
    Json j;
    j["states_visited"] = r.states_visited;
    j["transitions"] = r.transitions;
    j["tails_run"] = r.tails_run;
    j["exhausted"] = r.exhausted;
    j["seconds"] = r.seconds;
    j["max_events"] = r.max_events;
    Json counts = Json::object();
    for (const auto& [p, n] : r.counts) counts[to_string(p)] = n;
    j["counts"] = counts;
    Json vs = Json::array();
    for (const auto& v : r.violations) {
        Json x;
        x["report"] = encode_report(v.report, cfg);
        x["original_events"] = v.original_events;
        x["minimized_events"] = v.schedule.events.size();
        x["replays"] = v.replays;
        x["schedule"] = encode_schedule(v.schedule);
        vs.push_back(std::move(x));
    }
    j["violations"] = vs;
    return j;
}

}  // namespace ezbft
