#include "ezbft/codec.hpp"

#include <fstream>
#include <sstream>

namespace ezbft {

namespace {

const Json& at(const Json& j, const char* key) {
    if (!j.is_object()) throw FormatError(std::string("expected an object holding '") + key + "'");
    auto it = j.find(key);
    if (it == j.end()) throw FormatError(std::string("missing field '") + key + "'");
    return *it;
}

template <typename T>
T get(const Json& j, const char* key) {
    try {
        return at(j, key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("field '") + key + "': " + e.what());
    }
}

bool has(const Json& j, const char* key) {
    auto it = j.find(key);
    return it != j.end() && !it->is_null();
}

const char* seq_mode_name(SeqMode m) { return m == SeqMode::recompute ? "recompute" : "max_of_replies"; }

}  // namespace

Json encode_config(const Config& cfg) {
    Json j;
    j["n"] = cfg.n;
    j["f"] = cfg.f;
    j["replica_ids"] = cfg.replica_ids;
    Json byz = Json::array();
    for (auto r : cfg.byzantine_ids) byz.push_back(cfg.name(r));
    j["byzantine_ids"] = byz;
    j["client_ids"] = cfg.client_ids;
    Json faulty = Json::array();
    for (auto c : cfg.faulty_client_ids) faulty.push_back(cfg.name(c));
    j["faulty_client_ids"] = faulty;
    j["seq_mode"] = seq_mode_name(cfg.seq_mode);
    return j;
}

Config decode_config(const Json& j) {
    Config cfg;
    cfg.replica_ids = get<std::vector<std::string>>(j, "replica_ids");
    cfg.f = has(j, "f") ? get<std::uint32_t>(j, "f") : static_cast<std::uint32_t>((cfg.replica_ids.size() - 1) / 3);
    cfg.n = has(j, "n") ? get<std::uint32_t>(j, "n") : static_cast<std::uint32_t>(cfg.replica_ids.size());
    cfg.client_ids = get<std::vector<std::string>>(j, "client_ids");
    if (has(j, "byzantine_ids")) {
        for (const auto& name : get<std::vector<std::string>>(j, "byzantine_ids")) {
            cfg.byzantine_ids.push_back(cfg.replica(name));
        }
    }
    if (has(j, "faulty_client_ids")) {
        for (const auto& name : get<std::vector<std::string>>(j, "faulty_client_ids")) {
            cfg.faulty_client_ids.push_back(cfg.client(name));
        }
    }
    if (has(j, "seq_mode")) {
        const auto m = get<std::string>(j, "seq_mode");
        if (m == "recompute") {
            cfg.seq_mode = SeqMode::recompute;
        } else if (m != "max_of_replies") {
            throw FormatError("unknown seq_mode '" + m + "'");
        }
    }
    cfg.validate();
    return cfg;
}

std::string Codec::instance(InstanceId i) const { return cfg_.name(i.owner) + "." + std::to_string(i.slot); }

InstanceId Codec::instance(const std::string& s) const {
    auto dot = s.rfind('.');
    if (dot == std::string::npos || dot + 1 == s.size()) throw FormatError("bad instance '" + s + "'");
    InstanceId i;
    i.owner = cfg_.replica(s.substr(0, dot));
    try {
        i.slot = static_cast<std::uint32_t>(std::stoul(s.substr(dot + 1)));
    } catch (const std::exception&) {
        throw FormatError("bad instance slot '" + s + "'");
    }
    return i;
}

std::string Codec::message_id(const MessageId& id) const {
    return cfg_.name(id.producer) + "#" + std::to_string(id.counter);
}

MessageId Codec::message_id(const std::string& s) const {
    auto hash = s.rfind('#');
    if (hash == std::string::npos || hash + 1 == s.size()) throw FormatError("bad message id '" + s + "'");
    MessageId id;
    id.producer = cfg_.node(s.substr(0, hash));
    try {
        id.counter = static_cast<std::uint32_t>(std::stoul(s.substr(hash + 1)));
    } catch (const std::exception&) {
        throw FormatError("bad message counter '" + s + "'");
    }
    return id;
}

Json Codec::command(const Command& c) const {
    Json j;
    j["id"] = c.id;
    j["client"] = c.is_noop() ? std::string() : cfg_.name(c.client);
    j["key"] = c.object_key;
    j["payload"] = c.payload;
    return j;
}

Command Codec::command(const Json& j) const {
    Command c;
    c.id = get<std::string>(j, "id");
    const auto client = get<std::string>(j, "client");
    if (!client.empty()) c.client = cfg_.client(client);
    c.object_key = get<std::string>(j, "key");
    if (has(j, "payload")) c.payload = get<std::string>(j, "payload");
    return c;
}

Json Codec::deps(const DepSet& d) const {
    Json j = Json::array();
    for (auto i : d) j.push_back(instance(i));
    return j;
}

DepSet Codec::deps(const Json& j) const {
    if (!j.is_array()) throw FormatError("deps must be an array");
    DepSet d;
    for (const auto& x : j) d.insert(instance(x.get<std::string>()));
    return d;
}

Json Codec::tuple(const OrderingTuple& t) const {
    Json j;
    j["command"] = command(t.command);
    j["deps"] = deps(t.deps);
    j["seq"] = t.seq;
    return j;
}

OrderingTuple Codec::tuple(const Json& j) const {
    OrderingTuple t;
    t.command = command(at(j, "command"));
    t.deps = deps(at(j, "deps"));
    t.seq = get<std::uint32_t>(j, "seq");
    return t;
}

Json Codec::spec_reply(const SpecReply& r) const {
    Json j;
    j["replica"] = cfg_.name(r.replica);
    j["client"] = cfg_.name(r.client);
    j["instance"] = instance(r.instance);
    j["owner_number"] = r.owner_number.value;
    j["tuple"] = tuple(r.tuple);
    return j;
}

SpecReply Codec::spec_reply(const Json& j) const {
    SpecReply r;
    r.replica = cfg_.replica(get<std::string>(j, "replica"));
    r.client = cfg_.client(get<std::string>(j, "client"));
    r.instance = instance(get<std::string>(j, "instance"));
    r.owner_number = {get<std::uint32_t>(j, "owner_number")};
    r.tuple = tuple(at(j, "tuple"));
    return r;
}

Json Codec::certificate(const CommitCertificate& c) const {
    Json j;
    j["path"] = c.path == CertPath::fast ? "fast" : "slow";
    j["instance"] = instance(c.instance);
    j["owner_number"] = c.owner_number.value;
    j["tuple"] = tuple(c.tuple);
    Json rs = Json::array();
    for (const auto& r : c.replies) rs.push_back(spec_reply(r));
    j["replies"] = rs;
    return j;
}

CertPtr Codec::certificate(const Json& j) const {
    auto c = std::make_shared<CommitCertificate>();
    const auto path = get<std::string>(j, "path");
    if (path != "fast" && path != "slow") throw FormatError("unknown certificate path '" + path + "'");
    c->path = path == "fast" ? CertPath::fast : CertPath::slow;
    c->instance = instance(get<std::string>(j, "instance"));
    c->owner_number = {get<std::uint32_t>(j, "owner_number")};
    c->tuple = tuple(at(j, "tuple"));
    for (const auto& r : at(j, "replies")) c->replies.push_back(spec_reply(r));
    return c;
}

Json Codec::vote(const OwnerChangeVote& v) const {
    Json j;
    j["sender"] = cfg_.name(v.sender);
    j["instance"] = instance(v.instance);
    j["owner_number"] = v.owner_number.value;
    j["accepted_tuple"] = v.accepted_tuple ? tuple(*v.accepted_tuple) : Json();
    j["spec_reply"] = v.spec_reply ? spec_reply(*v.spec_reply) : Json();
    j["certificate"] = v.certificate ? certificate(*v.certificate) : Json();
    Json ev = Json::array();
    for (const auto& e : v.dep_evidence) {
        Json x;
        x["instance"] = instance(e.instance);
        x["spec_reply"] = e.spec_reply ? spec_reply(*e.spec_reply) : Json();
        x["certificate"] = e.certificate ? certificate(*e.certificate) : Json();
        ev.push_back(std::move(x));
    }
    j["dep_evidence"] = ev;
    return j;
}

OwnerChangeVote Codec::vote(const Json& j) const {
    OwnerChangeVote v;
    v.sender = cfg_.replica(get<std::string>(j, "sender"));
    v.instance = instance(get<std::string>(j, "instance"));
    v.owner_number = {get<std::uint32_t>(j, "owner_number")};
    if (has(j, "accepted_tuple")) v.accepted_tuple = tuple(j["accepted_tuple"]);
    if (has(j, "spec_reply")) v.spec_reply = spec_reply(j["spec_reply"]);
    if (has(j, "certificate")) v.certificate = certificate(j["certificate"]);
    if (has(j, "dep_evidence")) {
        for (const auto& x : j["dep_evidence"]) {
            DepEvidence e;
            e.instance = instance(get<std::string>(x, "instance"));
            if (has(x, "spec_reply")) e.spec_reply = spec_reply(x["spec_reply"]);
            if (has(x, "certificate")) e.certificate = certificate(x["certificate"]);
            v.dep_evidence.push_back(std::move(e));
        }
    }
    return v;
}

Json Codec::body(const MessageBody& b) const {
    Json j;
    j["type"] = kind_name(b);
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, ClientRequest>) {
                j["command"] = command(m.command);
            } else if constexpr (std::is_same_v<T, SpecOrder>) {
                j["instance"] = instance(m.instance);
                j["owner_number"] = m.owner_number.value;
                j["tuple"] = tuple(m.tuple);
            } else if constexpr (std::is_same_v<T, SpecReply>) {
                j["reply"] = spec_reply(m);
            } else if constexpr (std::is_same_v<T, CommitFast>) {
                j["certificate"] = certificate(*m.certificate);
            } else if constexpr (std::is_same_v<T, Commit>) {
                j["tuple"] = tuple(m.tuple);
                j["certificate"] = certificate(*m.certificate);
            } else if constexpr (std::is_same_v<T, CommitReply>) {
                j["replica"] = cfg_.name(m.replica);
                j["instance"] = instance(m.instance);
                j["tuple"] = tuple(m.tuple);
                j["result"] = m.result;
            } else if constexpr (std::is_same_v<T, OwnerChange>) {
                j["vote"] = vote(m.vote);
            } else if constexpr (std::is_same_v<T, NewOwner>) {
                j["instance"] = instance(m.instance);
                j["owner_number"] = m.owner_number.value;
                j["tuple"] = tuple(m.tuple);
                Json proof = Json::array();
                for (const auto& v : m.proof) proof.push_back(vote(v));
                j["proof"] = proof;
            }
        },
        b);
    return j;
}

MessageBody Codec::body(const Json& j) const {
    const auto type = get<std::string>(j, "type");
    if (type == "request") return ClientRequest{command(at(j, "command"))};
    if (type == "spec_order") {
        return SpecOrder{instance(get<std::string>(j, "instance")), {get<std::uint32_t>(j, "owner_number")},
                         tuple(at(j, "tuple"))};
    }
    if (type == "spec_reply") return spec_reply(at(j, "reply"));
    if (type == "commit_fast") return CommitFast{certificate(at(j, "certificate"))};
    if (type == "commit") return Commit{tuple(at(j, "tuple")), certificate(at(j, "certificate"))};
    if (type == "commit_reply") {
        return CommitReply{cfg_.replica(get<std::string>(j, "replica")), instance(get<std::string>(j, "instance")),
                           tuple(at(j, "tuple")), get<std::string>(j, "result")};
    }
    if (type == "owner_change") return OwnerChange{vote(at(j, "vote"))};
    if (type == "new_owner") {
        NewOwner m;
        m.instance = instance(get<std::string>(j, "instance"));
        m.owner_number = {get<std::uint32_t>(j, "owner_number")};
        m.tuple = tuple(at(j, "tuple"));
        for (const auto& v : at(j, "proof")) m.proof.push_back(vote(v));
        return m;
    }
    throw FormatError("unknown message type '" + type + "'");
}

Json Codec::message(const Message& m) const {
    Json j;
    j["id"] = message_id(m.id);
    j["from"] = cfg_.name(m.from);
    j["to"] = cfg_.name(m.to);
    j["step"] = m.step;
    j["cause"] = m.cause ? Json(message_id(*m.cause)) : Json();
    j["body"] = body(m.body);
    return j;
}

MessagePtr Codec::message(const Json& j) const {
    auto m = std::make_shared<Message>();
    m->id = message_id(get<std::string>(j, "id"));
    m->from = cfg_.node(get<std::string>(j, "from"));
    m->to = cfg_.node(get<std::string>(j, "to"));
    m->step = get<std::uint32_t>(j, "step");
    if (has(j, "cause")) m->cause = message_id(get<std::string>(j, "cause"));
    m->body = body(at(j, "body"));
    m->seal();
    return m;
}

Json Codec::effect(const Effect& e) const {
    Json j;
    j["kind"] = to_string(e.kind);
    j["node"] = cfg_.name(e.node);
    switch (e.kind) {
        case Effect::Kind::accept:
        case Effect::Kind::commit:
            j["instance"] = instance(e.instance);
            j["tuple"] = tuple(e.tuple);
            j["owner_number"] = e.owner_number.value;
            j["detail"] = e.detail;
            break;
        case Effect::Kind::execute: {
            Json order = Json::array();
            for (const auto& x : e.order) {
                Json o;
                o["command"] = x.command_id;
                o["instance"] = instance(x.instance);
                o["seq"] = x.seq;
                o["deps"] = deps(x.deps);
                o["result"] = x.result;
                order.push_back(std::move(o));
            }
            j["order"] = order;
            break;
        }
        case Effect::Kind::selection: {
            j["instance"] = instance(e.instance);
            j["owner_number"] = e.owner_number.value;
            j["outcome"] = to_string(e.outcome);
            j["tuple"] = tuple(e.tuple);
            j["rival"] = e.rival ? tuple(*e.rival) : Json();
            j["detail"] = e.detail;
            Json voters = Json::array();
            for (auto v : e.voters) voters.push_back(cfg_.name(v));
            j["voters"] = voters;
            break;
        }
        case Effect::Kind::client_complete:
            j["instance"] = instance(e.instance);
            j["tuple"] = tuple(e.tuple);
            j["detail"] = e.detail;
            break;
        case Effect::Kind::drop:
            j["instance"] = instance(e.instance);
            j["detail"] = e.detail;
            break;
    }
    return j;
}

Effect Codec::effect(const Json& j) const {
    Effect e;
    const auto kind = get<std::string>(j, "kind");
    bool known = false;
    for (auto k : {Effect::Kind::accept, Effect::Kind::commit, Effect::Kind::execute, Effect::Kind::selection,
                   Effect::Kind::client_complete, Effect::Kind::drop}) {
        if (kind == to_string(k)) {
            e.kind = k;
            known = true;
        }
    }
    if (!known) throw FormatError("unknown effect kind '" + kind + "'");
    e.node = cfg_.node(get<std::string>(j, "node"));
    if (has(j, "instance")) e.instance = instance(get<std::string>(j, "instance"));
    if (has(j, "tuple")) e.tuple = tuple(j["tuple"]);
    if (has(j, "owner_number")) e.owner_number = {get<std::uint32_t>(j, "owner_number")};
    if (has(j, "detail")) e.detail = get<std::string>(j, "detail");
    if (has(j, "rival")) e.rival = tuple(j["rival"]);
    if (has(j, "outcome")) {
        const auto o = get<std::string>(j, "outcome");
        e.outcome = o == "safe" ? SelectionOutcome::safe
                    : o == "conflict" ? SelectionOutcome::conflict
                                      : SelectionOutcome::none;
    }
    if (has(j, "voters")) {
        for (const auto& v : j["voters"]) e.voters.push_back(cfg_.replica(v.get<std::string>()));
    }
    if (has(j, "order")) {
        for (const auto& o : j["order"]) {
            ExecutedEntry x;
            x.command_id = get<std::string>(o, "command");
            x.instance = instance(get<std::string>(o, "instance"));
            x.seq = get<std::uint32_t>(o, "seq");
            x.deps = deps(at(o, "deps"));
            x.result = get<std::string>(o, "result");
            e.order.push_back(std::move(x));
        }
    }
    return e;
}

Json Codec::byzantine_choice(const ByzantineChoice& c) const {
    Json j;
    j["kind"] = to_string(c.kind);
    if (!c.branches.empty()) {
        Json b = Json::array();
        for (const auto& t : c.branches) b.push_back(tuple(t));
        j["branches"] = b;
    }
    if (!c.recipients.empty()) {
        Json rs = Json::array();
        for (const auto& set : c.recipients) {
            Json s = Json::array();
            for (auto r : set) s.push_back(cfg_.name(r));
            rs.push_back(std::move(s));
        }
        j["recipients"] = rs;
    }
    if (c.instance) j["instance"] = instance(*c.instance);
    if (c.target) j["target"] = c.target->value;
    return j;
}

ByzantineChoice Codec::byzantine_choice(const Json& j) const {
    ByzantineChoice c;
    const auto kind = get<std::string>(j, "kind");
    bool known = false;
    for (auto k : {ByzantineChoice::Kind::honest, ByzantineChoice::Kind::silent,
                   ByzantineChoice::Kind::equivocate_spec_reply, ByzantineChoice::Kind::arbitrary_owner_change_tuple,
                   ByzantineChoice::Kind::equivocate_spec_order}) {
        if (kind == to_string(k)) {
            c.kind = k;
            known = true;
        }
    }
    if (!known) throw FormatError("unknown byzantine choice '" + kind + "'");
    if (has(j, "branches")) {
        for (const auto& t : j["branches"]) c.branches.push_back(tuple(t));
    }
    if (has(j, "recipients")) {
        for (const auto& s : j["recipients"]) {
            std::vector<ReplicaId> set;
            for (const auto& r : s) set.push_back(cfg_.replica(r.get<std::string>()));
            c.recipients.push_back(std::move(set));
        }
    }
    if (has(j, "instance")) c.instance = instance(get<std::string>(j, "instance"));
    if (has(j, "target")) c.target = OwnerNumber{get<std::uint32_t>(j, "target")};
    return c;
}

Json Codec::faulty_choice(const FaultyClientChoice& c) const {
    Json j;
    j["kind"] = to_string(c.kind);
    Json certs = Json::array();
    for (const auto& s : c.certificates) {
        Json x;
        x["path"] = s.path == CertPath::fast ? "fast" : "slow";
        Json ids = Json::array();
        for (const auto& id : s.reply_ids) ids.push_back(message_id(id));
        x["replies"] = ids;
        Json rs = Json::array();
        for (auto r : s.recipients) rs.push_back(cfg_.name(r));
        x["recipients"] = rs;
        certs.push_back(std::move(x));
    }
    j["certificates"] = certs;
    return j;
}

FaultyClientChoice Codec::faulty_choice(const Json& j) const {
    FaultyClientChoice c;
    const auto kind = get<std::string>(j, "kind");
    bool known = false;
    for (auto k : {FaultyClientChoice::Kind::honest, FaultyClientChoice::Kind::split_certificates,
                   FaultyClientChoice::Kind::selective_send}) {
        if (kind == to_string(k)) {
            c.kind = k;
            known = true;
        }
    }
    if (!known) throw FormatError("unknown faulty-client choice '" + kind + "'");
    if (has(j, "certificates")) {
        for (const auto& x : j["certificates"]) {
            CertificateSpec s;
            const auto path = get<std::string>(x, "path");
            if (path != "fast" && path != "slow") throw FormatError("unknown certificate path '" + path + "'");
            s.path = path == "fast" ? CertPath::fast : CertPath::slow;
            for (const auto& id : at(x, "replies")) s.reply_ids.push_back(message_id(id.get<std::string>()));
            for (const auto& r : at(x, "recipients")) s.recipients.push_back(cfg_.replica(r.get<std::string>()));
            c.certificates.push_back(std::move(s));
        }
    }
    return c;
}

Json Codec::event(const Event& e) const {
    Json j;
    j["seq_no"] = e.seq_no;
    j["kind"] = to_string(e.kind);
    switch (e.kind) {
        case Event::Kind::deliver:
            j["message"] = e.message ? Json(message_id(*e.message)) : Json();
            break;
        case Event::Kind::timeout:
            j["node"] = cfg_.name(e.node);
            break;
        case Event::Kind::trigger_owner_change:
        case Event::Kind::adversary:
            j["node"] = cfg_.name(e.node);
            if (e.instance) j["instance"] = instance(*e.instance);
            break;
        case Event::Kind::synchronous_tail: break;
    }
    if (e.byzantine) j["choice"] = byzantine_choice(*e.byzantine);
    if (e.faulty) j["choice"] = faulty_choice(*e.faulty);
    if (!e.note.empty()) j["note"] = e.note;
    return j;
}

Event Codec::event(const Json& j) const {
    Event e;
    const auto kind = get<std::string>(j, "kind");
    bool known = false;
    for (auto k : {Event::Kind::deliver, Event::Kind::timeout, Event::Kind::trigger_owner_change,
                   Event::Kind::adversary, Event::Kind::synchronous_tail}) {
        if (kind == to_string(k)) {
            e.kind = k;
            known = true;
        }
    }
    if (!known) throw FormatError("unknown event kind '" + kind + "'");
    if (has(j, "seq_no")) e.seq_no = get<std::uint32_t>(j, "seq_no");
    if (has(j, "message")) e.message = message_id(get<std::string>(j, "message"));
    if (has(j, "node")) e.node = cfg_.node(get<std::string>(j, "node"));
    if (has(j, "instance")) e.instance = instance(get<std::string>(j, "instance"));
    if (has(j, "choice")) {
        if (e.node.is_client()) {
            e.faulty = faulty_choice(j["choice"]);
        } else {
            e.byzantine = byzantine_choice(j["choice"]);
        }
    }
    if (has(j, "note")) e.note = get<std::string>(j, "note");
    return e;
}

Json Codec::workload(const std::vector<WorkloadItem>& w) const {
    Json j = Json::array();
    for (const auto& item : w) {
        Json x = command(item.command);
        x["target"] = cfg_.name(item.target);
        j.push_back(std::move(x));
    }
    return j;
}

std::vector<WorkloadItem> Codec::workload(const Json& j) const {
    if (!j.is_array()) throw FormatError("workload must be an array");
    std::vector<WorkloadItem> w;
    for (const auto& x : j) w.push_back({command(x), cfg_.replica(get<std::string>(x, "target"))});
    return w;
}

Json encode_schedule(const Schedule& s) {
    const Codec codec(s.config);
    Json j;
    j["config"] = encode_config(s.config);
    j["workload"] = codec.workload(s.workload);
    Json evs = Json::array();
    for (const auto& e : s.events) evs.push_back(codec.event(e));
    j["events"] = evs;
    return j;
}

Schedule decode_schedule(const Json& j) {
    Schedule s;
    s.config = decode_config(at(j, "config"));
    const Codec codec(s.config);
    s.workload = codec.workload(at(j, "workload"));
    std::uint32_t last = 0;
    std::uint32_t index = 0;
    for (const auto& x : at(j, "events")) {
        Event e = codec.event(x);
        ++index;
        if (!has(x, "seq_no")) e.seq_no = last + 1;
        if (index > 1 && e.seq_no <= last) throw ScheduleError("event seq_no must be strictly increasing");
        last = e.seq_no;
        s.events.push_back(std::move(e));
    }
    return s;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path + "'");
    out << text;
}

Schedule load_schedule(const std::string& path) {
    Json j;
    try {
        j = Json::parse(read_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError(path + ": " + e.what());
    }
    return decode_schedule(j);
}

void save_schedule(const Schedule& s, const std::string& path) { write_file(path, encode_schedule(s).dump(2) + "\n"); }

namespace {

Json digests_json(const std::vector<std::pair<std::string, std::string>>& d) {
    Json j = Json::object();
    for (const auto& [k, v] : d) j[k] = v;
    return j;
}

std::vector<std::pair<std::string, std::string>> digests_from(const Json& j) {
    std::vector<std::pair<std::string, std::string>> out;
    for (auto it = j.begin(); it != j.end(); ++it) out.emplace_back(it.key(), it.value().get<std::string>());
    return out;
}

}  // namespace

std::string write_trace(const Trace& t) {
    const Codec codec(t.config);
    std::string out;
    {
        Json j;
        j["seq_no"] = 0;
        j["kind"] = "init";
        j["config"] = encode_config(t.config);
        j["workload"] = codec.workload(t.workload);
        Json em = Json::array();
        for (const auto& m : t.initial) em.push_back(codec.message(*m));
        j["emitted"] = em;
        j["digests"] = digests_json(t.initial_digests);
        out += j.dump() + "\n";
    }
    for (const auto& s : t.steps) {
        Json j;
        j["seq_no"] = s.seq_no;
        j["kind"] = to_string(s.event.kind);
        j["event"] = codec.event(s.event);
        j["tail"] = s.tail;
        Json em = Json::array();
        for (const auto& m : s.emitted) em.push_back(codec.message(*m));
        j["emitted"] = em;
        Json ef = Json::array();
        for (const auto& e : s.effects) ef.push_back(codec.effect(e));
        j["effects"] = ef;
        j["digests"] = digests_json(s.digests);
        out += j.dump() + "\n";
    }
    return out;
}

Trace read_trace(const std::string& text) {
    Trace t;
    std::istringstream in(text);
    std::string line;
    bool first = true;
    std::optional<Codec> codec;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        Json j;
        try {
            j = Json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw FormatError("trace line " + std::to_string(lineno) + ": " + e.what());
        }
        if (first) {
            if (get<std::string>(j, "kind") != "init") throw FormatError("trace must start with an init line");
            t.config = decode_config(at(j, "config"));
            codec.emplace(t.config);
            t.workload = codec->workload(at(j, "workload"));
            for (const auto& m : at(j, "emitted")) t.initial.push_back(codec->message(m));
            if (has(j, "digests")) t.initial_digests = digests_from(j["digests"]);
            first = false;
            continue;
        }
        StepRecord s;
        s.seq_no = get<std::uint32_t>(j, "seq_no");
        s.event = codec->event(at(j, "event"));
        s.tail = get<bool>(j, "tail");
        for (const auto& m : at(j, "emitted")) s.emitted.push_back(codec->message(m));
        for (const auto& e : at(j, "effects")) s.effects.push_back(codec->effect(e));
        if (has(j, "digests")) s.digests = digests_from(j["digests"]);
        if (s.event.kind == Event::Kind::synchronous_tail) t.has_tail = true;
        t.steps.push_back(std::move(s));
    }
    if (first) throw FormatError("empty trace");
    return t;
}

Trace load_trace(const std::string& path) { return read_trace(read_file(path)); }

}  // namespace ezbft
