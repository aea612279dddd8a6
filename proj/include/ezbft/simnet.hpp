#pragma once

#include "ezbft/adversary.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace ezbft {

struct WorkloadItem {
    Command command;
    ReplicaId target;
};

struct Event {
    enum class Kind : std::uint8_t { deliver, timeout, trigger_owner_change, adversary, synchronous_tail };

    Kind kind = Kind::deliver;
    std::uint32_t seq_no = 0;
    std::optional<MessageId> message;            // deliver
    NodeId node;                                 // timeout, trigger_owner_change, adversary
    std::optional<InstanceId> instance;          // trigger_owner_change, adversary votes
    std::optional<ByzantineChoice> byzantine;    // deliver to / adversary on a byzantine replica
    std::optional<FaultyClientChoice> faulty;    // adversary on a faulty client
    std::string note;
};

const char* to_string(Event::Kind k);

struct Schedule {
    Config config;
    std::vector<WorkloadItem> workload;
    std::vector<Event> events;
};

/// One trace line: an event (or a delivery inside the synchronous tail) and
/// what it produced.
struct StepRecord {
    std::uint32_t seq_no = 0;
    Event event;
    bool tail = false;
    std::vector<MessagePtr> emitted;
    std::vector<Effect> effects;
    std::vector<std::pair<std::string, std::string>> digests;  // node name -> 32 hex digits
};

struct Trace {
    Config config;
    std::vector<WorkloadItem> workload;
    std::vector<MessagePtr> initial;  // client requests emitted at start
    std::vector<std::pair<std::string, std::string>> initial_digests;
    std::vector<StepRecord> steps;
    bool has_tail = false;
};

/// The whole simulated system: node states plus the in-flight messages.
struct World {
    std::shared_ptr<const Config> cfg;
    std::vector<WorkloadItem> workload;
    std::vector<ReplicaState> replicas;
    std::vector<ClientState> clients;
    std::vector<MessagePtr> pending;       // sorted by id
    std::vector<std::uint32_t> counters;   // emissions per node: replicas, then clients
    std::vector<std::uint32_t> clocks;     // Lamport clock per node
    bool tail_ran = false;
    bool record_digests = true;  // per-node digests on every step record

    /// Builds the initial state and emits every workload request.
    static World start(const Config& cfg, const std::vector<WorkloadItem>& workload,
                       std::vector<MessagePtr>* emitted = nullptr);

    std::size_t slot(NodeId n) const;
    const MessagePtr* find_pending(const MessageId& id) const;
    std::vector<MessageId> pending_messages() const;

    /// Applies one non-tail event. Throws ScheduleError on an invalid event.
    StepRecord apply(const Event& ev);

    /// Runs the synchronous tail: deliver everything, fire ready timeouts,
    /// trigger owner changes on uncommitted instances, until quiescent.
    std::vector<StepRecord> synchronous_tail(const Event& ev);

    /// Digest of everything that determines future behavior. Lamport clocks
    /// are excluded: they only annotate messages.
    Digest digest() const;
    std::vector<std::pair<std::string, std::string>> node_digests() const;

  private:
    StepRecord record(const Event& ev, NodeId actor, std::optional<MessageId> cause, StepOutput&& out);
    StepRecord deliver(const Event& ev, const MessagePtr& msg);
};

/// Runs a schedule from the start. Throws ScheduleError / ForgedReply on bad input.
Trace run(const Schedule& schedule);

/// World state after replaying all events of a schedule.
World replay_world(const Schedule& schedule);

}  // namespace ezbft
