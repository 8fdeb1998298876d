#pragma once

// Run trace: one structured record per observable event, serialized as one
// line per record with a stable field order so two runs can be compared
// byte-for-byte and checkers can replay a run offline.

#include "decloak/crypto.hpp"

#include <iosfwd>
#include <vector>

namespace decloak {

enum class EventKind : uint8_t {
    TxSubmitted = 0,
    TxAccepted,
    TxRejected,
    BlockMined,
    MsgSent,       // off-chain party<->executor message
    MsgDelivered,
    EnclaveOp,     // enclave operation outcome (negotiate, execute, ...)
    OutputLearned, // a party learned a plaintext output
    ActorNote,     // behaviour-tag annotations (withhold, mismatch, ...)
};

const char* event_kind_name(EventKind k);

struct TraceEvent {
    uint64_t tick = 0;
    uint64_t height = 0;
    EventKind kind{};
    std::string actor;        // stable actor label, e.g. "party0", "exec1", "chain"
    std::string what;         // operation or tx kind name
    Digest subject;           // tx id / proposal id / output fingerprint
    std::string note;

    // tick|height|kind|actor|what|subject|note  (note is %xx-escaped)
    std::string line() const;
    static TraceEvent parse(const std::string& line);
    bool operator==(const TraceEvent&) const = default;
};

struct Trace {
    std::vector<TraceEvent> events;

    void add(TraceEvent ev) { events.push_back(std::move(ev)); }
    std::string serialize() const;
    static Trace deserialize(std::istream& in);
    static Trace load(const std::string& path);
    void save(const std::string& path) const;
};

}  // namespace decloak
