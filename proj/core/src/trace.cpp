#include "decloak/trace.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace decloak {

const char* event_kind_name(EventKind k) {
    switch (k) {
        case EventKind::TxSubmitted: return "tx_submitted";
        case EventKind::TxAccepted: return "tx_accepted";
        case EventKind::TxRejected: return "tx_rejected";
        case EventKind::BlockMined: return "block_mined";
        case EventKind::MsgSent: return "msg_sent";
        case EventKind::MsgDelivered: return "msg_delivered";
        case EventKind::EnclaveOp: return "enclave_op";
        case EventKind::OutputLearned: return "output_learned";
        case EventKind::ActorNote: return "actor_note";
    }
    return "?";
}

static EventKind kind_from_name(const std::string& s) {
    for (int i = 0; i <= static_cast<int>(EventKind::ActorNote); ++i) {
        auto k = static_cast<EventKind>(i);
        if (s == event_kind_name(k)) return k;
    }
    throw std::runtime_error("unknown trace event kind: " + s);
}

static std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '|' || c == '%' || c == '\n') {
            char buf[4];
            snprintf(buf, sizeof buf, "%%%02x", static_cast<unsigned char>(c));
            out += buf;
        } else {
            out += c;
        }
    }
    return out;
}

static std::string unescape(const std::string& s) {
    std::string out;
    for (size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '%' && i + 2 < s.size()) {
            out += static_cast<char>(std::stoi(s.substr(i + 1, 2), nullptr, 16));
            i += 2;
        } else {
            out += s[i];
        }
    }
    return out;
}

std::string TraceEvent::line() const {
    std::ostringstream os;
    os << tick << '|' << height << '|' << event_kind_name(kind) << '|' << escape(actor) << '|'
       << escape(what) << '|' << subject.hex() << '|' << escape(note);
    return os.str();
}

TraceEvent TraceEvent::parse(const std::string& line) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : line) {
        if (c == '|') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    parts.push_back(cur);
    if (parts.size() != 7) throw std::runtime_error("malformed trace line: " + line);
    TraceEvent ev;
    ev.tick = std::stoull(parts[0]);
    ev.height = std::stoull(parts[1]);
    ev.kind = kind_from_name(parts[2]);
    ev.actor = unescape(parts[3]);
    ev.what = unescape(parts[4]);
    Bytes raw = from_hex(parts[5]);
    if (raw.size() != kDigestWidth) throw std::runtime_error("bad subject digest");
    std::copy(raw.begin(), raw.end(), ev.subject.bytes.begin());
    ev.note = unescape(parts[6]);
    return ev;
}

std::string Trace::serialize() const {
    std::string out;
    for (const auto& ev : events) {
        out += ev.line();
        out += '\n';
    }
    return out;
}

Trace Trace::deserialize(std::istream& in) {
    Trace t;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        t.events.push_back(TraceEvent::parse(line));
    }
    return t;
}

Trace Trace::load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open trace file: " + path);
    return deserialize(f);
}

void Trace::save(const std::string& path) const {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write trace file: " + path);
    f << serialize();
}

}  // namespace decloak
