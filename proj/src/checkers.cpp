#include "ezbft/checkers.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace ezbft {

const char* to_string(Property p) {
    switch (p) {
        case Property::agreement: return "agreement";
        case Property::validity: return "validity";
        case Property::execution_consistency: return "execution_consistency";
        case Property::liveness: return "liveness";
        case Property::dependency_inclusion: return "dependency_inclusion";
    }
    return "unknown";
}

std::vector<Property> all_properties() {
    return {Property::agreement, Property::validity, Property::dependency_inclusion,
            Property::execution_consistency, Property::liveness};
}

Property parse_property(const std::string& s) {
    for (auto p : all_properties()) {
        if (s == to_string(p)) return p;
    }
    throw FormatError("unknown property '" + s + "'");
}

std::vector<Property> parse_properties(const std::string& csv) {
    if (csv.empty() || csv == "all") return all_properties();
    std::vector<Property> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        auto p = parse_property(item);
        if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
    }
    return out;
}

const Observations::Commit* Observations::commit(ReplicaId r, InstanceId i) const {
    auto it = commits.find({r, i});
    return it == commits.end() ? nullptr : &it->second;
}

Observations observe(const Trace& trace) {
    Observations obs;
    obs.config = trace.config;
    const Config& cfg = obs.config;
    for (const auto& w : trace.workload) obs.proposed.push_back(w.command.id);
    obs.has_tail = trace.has_tail;
    for (const auto& step : trace.steps) {
        obs.last_seq_no = step.seq_no;
        for (const auto& e : step.effects) {
            if (!e.node.is_replica()) continue;
            const ReplicaId r = e.node.replica();
            switch (e.kind) {
                case Effect::Kind::commit:
                    if (cfg.is_correct(r)) obs.commits.try_emplace({r, e.instance}, Observations::Commit{e.tuple, e.detail, step.seq_no});
                    break;
                case Effect::Kind::execute:
                    if (cfg.is_correct(r)) obs.executed[r] = e.order;
                    break;
                case Effect::Kind::selection:
                    obs.selections.push_back({r, e.instance, e.owner_number, e.outcome, e.tuple, e.rival, step.seq_no});
                    break;
                default: break;
            }
        }
    }
    return obs;
}

Observations observe(const World& world) {
    Observations obs;
    obs.config = *world.cfg;
    const Config& cfg = obs.config;
    for (const auto& w : world.workload) obs.proposed.push_back(w.command.id);
    obs.has_tail = world.tail_ran;
    for (const auto& st : world.replicas) {
        if (cfg.is_correct(st.id)) {
            for (const auto& rec : st.log) {
                if (rec.status == RecordStatus::committed) {
                    obs.commits.emplace(std::pair{st.id, rec.instance},
                                        Observations::Commit{rec.tuple, rec.certificate ? "commit_fast" : "new_owner", 0});
                }
            }
            obs.executed[st.id] = st.executed;
        }
        for (const auto& round : st.rounds) {
            if (round.status != LeaderRound::Status::stuck) continue;
            const auto sel = select_safe_tuple(round.votes, cfg);
            obs.selections.push_back({st.id, round.instance, round.target, sel.outcome, sel.tuple, sel.rival, 0});
        }
    }
    return obs;
}

namespace {

std::uint32_t min_seq(std::initializer_list<const Observations::Commit*> cs) {
    std::uint32_t m = UINT32_MAX;
    for (const auto* c : cs) m = std::min(m, c->seq_no);
    return m == UINT32_MAX ? 0 : m;
}

struct CommittedInstance {
    InstanceId instance;
    OrderingTuple tuple;
    ReplicaId replica;  // lowest correct replica holding this commit
    std::uint32_t seq_no = 0;
};

/// Distinct committed (instance, tuple) pairs across correct replicas.
std::vector<CommittedInstance> committed_instances(const Observations& obs) {
    std::vector<CommittedInstance> out;
    for (const auto& [key, c] : obs.commits) {
        if (c.tuple.command.is_noop()) continue;
        auto it = std::find_if(out.begin(), out.end(), [&](const CommittedInstance& x) {
            return x.instance == key.second && tuples_equal(x.tuple, c.tuple);
        });
        if (it == out.end()) {
            out.push_back({key.second, c.tuple, key.first, c.seq_no});
        } else if (key.first < it->replica) {
            it->replica = key.first;
            it->seq_no = c.seq_no;
        }
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return a.instance != b.instance ? a.instance < b.instance : tuple_less(a.tuple, b.tuple);
    });
    return out;
}

bool neither_includes(InstanceId x, const OrderingTuple& tx, InstanceId y, const OrderingTuple& ty) {
    return x != y && interferes(tx.command, ty.command) && !tx.deps.contains(y) && !ty.deps.contains(x);
}

std::optional<ViolationReport> dependency_failure(const Observations& obs) {
    const auto all = committed_instances(obs);
    for (std::size_t a = 0; a < all.size(); ++a) {
        for (std::size_t b = a + 1; b < all.size(); ++b) {
            const auto& x = all[a];
            const auto& y = all[b];
            if (!neither_includes(x.instance, x.tuple, y.instance, y.tuple)) continue;
            ViolationReport r;
            r.property = Property::dependency_inclusion;
            r.witnesses = {{x.replica, x.instance, x.tuple}, {y.replica, y.instance, y.tuple}};
            r.detail = "interfering commands committed without either in the other's dependency list";
            r.trace_slice = {std::min(x.seq_no, y.seq_no), obs.last_seq_no};
            return r;
        }
    }
    return std::nullopt;
}

}  // namespace

std::optional<ViolationReport> check_agreement(const Observations& obs) {
    std::map<InstanceId, std::vector<std::pair<ReplicaId, const Observations::Commit*>>> by_instance;
    for (const auto& [key, c] : obs.commits) by_instance[key.second].emplace_back(key.first, &c);
    for (const auto& [instance, commits] : by_instance) {
        bool split = false;
        for (const auto& [_, c] : commits) {
            if (!tuples_equal(c->tuple, commits.front().second->tuple)) split = true;
        }
        if (!split) continue;
        ViolationReport r;
        r.property = Property::agreement;
        std::uint32_t lo = UINT32_MAX;
        std::uint32_t hi = 0;
        for (const auto& [rep, c] : commits) {
            r.witnesses.push_back({rep, instance, c->tuple});
            lo = std::min(lo, c->seq_no);
            hi = std::max(hi, c->seq_no);
        }
        r.detail = "correct replicas committed different tuples at one instance";
        r.trace_slice = {lo, hi};
        return r;
    }
    return std::nullopt;
}

std::optional<ViolationReport> check_validity(const Observations& obs) {
    for (const auto& [key, c] : obs.commits) {
        if (c.tuple.command.is_noop()) continue;
        if (std::find(obs.proposed.begin(), obs.proposed.end(), c.tuple.command.id) != obs.proposed.end()) continue;
        ViolationReport r;
        r.property = Property::validity;
        r.witnesses = {{key.first, key.second, c.tuple}};
        r.detail = "committed command '" + c.tuple.command.id + "' was never proposed by a client";
        r.trace_slice = {c.seq_no, c.seq_no};
        return r;
    }
    return std::nullopt;
}

std::optional<ViolationReport> check_dependency_inclusion(const Observations& obs) { return dependency_failure(obs); }

std::optional<ViolationReport> check_execution_consistency(const Observations& obs) {
    // Positions of committed commands in each correct replica's final log.
    struct Entry {
        InstanceId instance;
        OrderingTuple tuple;
    };
    std::map<ReplicaId, std::vector<Entry>> logs;
    for (const auto& [rep, order] : obs.executed) {
        for (const auto& x : order) {
            if (const auto* c = obs.commit(rep, x.instance)) logs[rep].push_back({x.instance, c->tuple});
        }
    }
    for (auto ia = logs.begin(); ia != logs.end(); ++ia) {
        for (auto ib = std::next(ia); ib != logs.end(); ++ib) {
            const auto& la = ia->second;
            const auto& lb = ib->second;
            for (std::size_t i = 0; i < la.size(); ++i) {
                for (std::size_t j = i + 1; j < la.size(); ++j) {
                    if (!interferes(la[i].tuple.command, la[j].tuple.command)) continue;
                    auto pos = [&](InstanceId x) {
                        for (std::size_t k = 0; k < lb.size(); ++k) {
                            if (lb[k].instance == x) return static_cast<std::ptrdiff_t>(k);
                        }
                        return std::ptrdiff_t{-1};
                    };
                    const auto pi = pos(la[i].instance);
                    const auto pj = pos(la[j].instance);
                    if (pi < 0 || pj < 0 || pi < pj) continue;
                    ViolationReport r;
                    r.property = Property::execution_consistency;
                    r.witnesses = {{ia->first, la[i].instance, la[i].tuple},
                                   {ia->first, la[j].instance, la[j].tuple},
                                   {ib->first, lb[pj].instance, lb[pj].tuple},
                                   {ib->first, lb[pi].instance, lb[pi].tuple}};
                    r.detail = "interfering commands executed in different orders";
                    r.trace_slice = {0, obs.last_seq_no};
                    return r;
                }
            }
        }
    }
    if (auto dep = dependency_failure(obs)) {
        dep->property = Property::execution_consistency;
        dep->detail = "execution order unconstrained: interfering committed commands lack dependency inclusion";
        return dep;
    }
    return std::nullopt;
}

std::optional<ViolationReport> check_liveness(const Observations& obs) {
    if (!obs.has_tail) throw PreconditionUnmet("liveness needs a synchronous tail in the schedule");
    for (const auto& s : obs.selections) {
        if (s.outcome != SelectionOutcome::conflict || !s.rival) continue;
        bool anywhere = false;
        for (auto r : obs.config.correct_replicas()) {
            if (obs.commit(r, s.instance)) anywhere = true;
        }
        if (anywhere) continue;
        ViolationReport r;
        r.property = Property::liveness;
        r.witnesses = {{s.leader, s.instance, s.tuple}, {s.leader, s.instance, *s.rival}};
        r.detail = "owner change stuck: Conflict(" + tuple_summary(s.tuple, obs.config) + ", " +
                   tuple_summary(*s.rival, obs.config) + ") at owner number " +
                   std::to_string(s.owner_number.value) + "; instance uncommitted at every correct replica";
        r.trace_slice = {s.seq_no, obs.last_seq_no};
        return r;
    }
    return std::nullopt;
}

std::optional<ViolationReport> check(Property p, const Observations& obs) {
    switch (p) {
        case Property::agreement: return check_agreement(obs);
        case Property::validity: return check_validity(obs);
        case Property::execution_consistency: return check_execution_consistency(obs);
        case Property::liveness: return check_liveness(obs);
        case Property::dependency_inclusion: return check_dependency_inclusion(obs);
    }
    return std::nullopt;
}

std::vector<ViolationReport> check_all(const Observations& obs, const std::vector<Property>& props, bool strict) {
    std::vector<ViolationReport> out;
    for (auto p : props) {
        if (p == Property::liveness && !obs.has_tail && !strict) continue;
        if (auto r = check(p, obs)) out.push_back(std::move(*r));
    }
    return out;
}

bool verify_report(const ViolationReport& report, const Config& cfg, const std::vector<std::string>& proposed) {
    const auto& w = report.witnesses;
    for (const auto& x : w) {
        if (x.replica.index >= cfg.n) return false;
    }
    auto correct = [&](const Witness& x) { return cfg.is_correct(x.replica); };
    switch (report.property) {
        case Property::agreement: {
            if (w.size() < 2 || !std::all_of(w.begin(), w.end(), correct)) return false;
            bool split = false;
            for (const auto& x : w) {
                if (x.instance != w[0].instance) return false;
                if (!tuples_equal(x.tuple, w[0].tuple)) split = true;
            }
            return split;
        }
        case Property::validity:
            return w.size() == 1 && correct(w[0]) && !w[0].tuple.command.is_noop() &&
                   std::find(proposed.begin(), proposed.end(), w[0].tuple.command.id) == proposed.end();
        case Property::dependency_inclusion:
            return w.size() == 2 && correct(w[0]) && correct(w[1]) &&
                   neither_includes(w[0].instance, w[0].tuple, w[1].instance, w[1].tuple);
        case Property::execution_consistency:
            if (w.size() == 2) {
                return correct(w[0]) && correct(w[1]) &&
                       neither_includes(w[0].instance, w[0].tuple, w[1].instance, w[1].tuple);
            }
            return w.size() == 4 && std::all_of(w.begin(), w.end(), correct) && w[0].replica == w[1].replica &&
                   w[2].replica == w[3].replica && w[0].replica != w[2].replica && w[0].instance == w[3].instance &&
                   w[1].instance == w[2].instance && w[0].instance != w[1].instance &&
                   interferes(w[0].tuple.command, w[1].tuple.command);
        case Property::liveness:
            return w.size() == 2 && w[0].instance == w[1].instance && !tuples_equal(w[0].tuple, w[1].tuple);
    }
    return false;
}

std::string tuple_summary(const OrderingTuple& t, const Config& cfg) {
    const Codec codec(cfg);
    std::string deps;
    for (auto d : t.deps) deps += (deps.empty() ? "" : ",") + codec.instance(d);
    const std::string cmd = t.command.is_noop() ? "noop" : t.command.id;
    return "<" + cmd + ",{" + deps + "}," + std::to_string(t.seq) + ">";
}

std::string witness_summary(const ViolationReport& r, const Config& cfg) {
    const Codec codec(cfg);
    std::string out;
    for (const auto& w : r.witnesses) {
        if (!out.empty()) out += "; ";
        out += cfg.name(w.replica) + "@" + codec.instance(w.instance) + "=" + tuple_summary(w.tuple, cfg);
    }
    return out;
}

bool same_report(const ViolationReport& a, const ViolationReport& b) {
    if (a.property != b.property || a.witnesses.size() != b.witnesses.size()) return false;
    for (std::size_t i = 0; i < a.witnesses.size(); ++i) {
        const auto& x = a.witnesses[i];
        const auto& y = b.witnesses[i];
        if (x.replica != y.replica || x.instance != y.instance || !tuples_equal(x.tuple, y.tuple)) return false;
    }
    return true;
}

Json encode_report(const ViolationReport& r, const Config& cfg) {
    const Codec codec(cfg);
    Json j;
    j["property"] = to_string(r.property);
    Json ws = Json::array();
    for (const auto& w : r.witnesses) {
        Json x;
        x["replica"] = cfg.name(w.replica);
        x["instance"] = codec.instance(w.instance);
        x["tuple"] = codec.tuple(w.tuple);
        ws.push_back(std::move(x));
    }
    j["witnesses"] = ws;
    j["summary"] = witness_summary(r, cfg);
    j["detail"] = r.detail;
    j["trace_slice"] = {r.trace_slice.first, r.trace_slice.second};
    return j;
}

ViolationReport decode_report(const Json& j, const Config& cfg) {
    const Codec codec(cfg);
    ViolationReport r;
    try {
        r.property = parse_property(j.at("property").get<std::string>());
        for (const auto& x : j.at("witnesses")) {
            r.witnesses.push_back({cfg.replica(x.at("replica").get<std::string>()),
                                   codec.instance(x.at("instance").get<std::string>()), codec.tuple(x.at("tuple"))});
        }
        if (j.contains("detail")) r.detail = j["detail"].get<std::string>();
        if (j.contains("trace_slice")) {
            r.trace_slice = {j["trace_slice"].at(0).get<std::uint32_t>(), j["trace_slice"].at(1).get<std::uint32_t>()};
        }
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("report: ") + e.what());
    }
    return r;
}

}  // namespace ezbft
