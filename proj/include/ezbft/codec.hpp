#pragma once

#include "ezbft/simnet.hpp"

#include <json.hpp>

#include <string>

namespace ezbft {

using Json = nlohmann::ordered_json;

Json encode_config(const Config& cfg);
/// Throws FormatError on malformed input and ConfigError on an invalid config.
Config decode_config(const Json& j);

/// Name-aware JSON encoding of protocol values. Instances print as "R.0",
/// message ids as "R#3".
class Codec {
  public:
    explicit Codec(const Config& cfg) : cfg_(cfg) {}

    std::string instance(InstanceId i) const;
    InstanceId instance(const std::string& s) const;
    std::string message_id(const MessageId& id) const;
    MessageId message_id(const std::string& s) const;

    Json command(const Command& c) const;
    Command command(const Json& j) const;
    Json deps(const DepSet& d) const;
    DepSet deps(const Json& j) const;
    Json tuple(const OrderingTuple& t) const;
    OrderingTuple tuple(const Json& j) const;
    Json spec_reply(const SpecReply& r) const;
    SpecReply spec_reply(const Json& j) const;
    Json certificate(const CommitCertificate& c) const;
    CertPtr certificate(const Json& j) const;
    Json vote(const OwnerChangeVote& v) const;
    OwnerChangeVote vote(const Json& j) const;
    Json body(const MessageBody& b) const;
    MessageBody body(const Json& j) const;
    Json message(const Message& m) const;
    MessagePtr message(const Json& j) const;
    Json effect(const Effect& e) const;
    Effect effect(const Json& j) const;
    Json byzantine_choice(const ByzantineChoice& c) const;
    ByzantineChoice byzantine_choice(const Json& j) const;
    Json faulty_choice(const FaultyClientChoice& c) const;
    FaultyClientChoice faulty_choice(const Json& j) const;
    Json event(const Event& e) const;
    Event event(const Json& j) const;
    Json workload(const std::vector<WorkloadItem>& w) const;
    std::vector<WorkloadItem> workload(const Json& j) const;

    const Config& config() const { return cfg_; }

  private:
    const Config& cfg_;
};

Json encode_schedule(const Schedule& s);
Schedule decode_schedule(const Json& j);
Schedule load_schedule(const std::string& path);
void save_schedule(const Schedule& s, const std::string& path);

/// JSON Lines: an init line, then one line per step record.
std::string write_trace(const Trace& t);
Trace read_trace(const std::string& text);
Trace load_trace(const std::string& path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

}  // namespace ezbft
