#include "decloak/gas.hpp"

#include <fstream>
#include <sstream>

namespace decloak {

const char* gas_op_name(TxKind k) {
    switch (k) {
        case TxKind::Register: return "register";
        case TxKind::Deposit: return "deposit";
        case TxKind::ChaT: return "challengeTEE";
        case TxKind::Ack: return "acknowledge";
        case TxKind::FNeg: return "failNegotiation";
        case TxKind::ChaP: return "challengeParties";
        case TxKind::ResP: return "partyResponse";
        case TxKind::PnsP: return "punishParties";
        case TxKind::Cmt: return "commit";
        case TxKind::Com: return "complete";
        case TxKind::PnsT: return "punishTEE";
    }
    return "?";
}

GasTable GasTable::defaults() {
    GasTable t;
    t.entries = {
        {"register", 127068},        {"deposit", 42325},
        {"challengeTEE", 131762},    {"acknowledge", 26999},
        {"failNegotiation", 30563},  {"challengeParties", 33786},
        {"partyResponse", 34313},    {"punishParties", 45518},
        {"commit", 104568},          {"complete", 110570},
        {"punishTEE", 53254},
    };
    return t;
}

GasTable GasTable::load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open gas table: " + path);
    GasTable t = defaults();
    std::string line;
    size_t lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        auto last = line.find_last_not_of(" \t\r");
        line = line.substr(first, last - first + 1);
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("gas table line " + std::to_string(lineno) +
                                     ": expected name=value");
        std::string name = line.substr(0, eq);
        while (!name.empty() && (name.back() == ' ' || name.back() == '\t')) name.pop_back();
        std::string value = line.substr(eq + 1);
        auto v0 = value.find_first_not_of(" \t");
        value = v0 == std::string::npos ? "" : value.substr(v0);
        if (!t.entries.count(name))
            throw std::runtime_error("gas table line " + std::to_string(lineno) +
                                     ": unknown operation " + name);
        t.entries[name] = std::stoull(value);
    }
    return t;
}

void GasTable::save(const std::string& path) const {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write gas table: " + path);
    f << "# per-operation gas costs\n";
    for (const auto& [k, v] : entries) f << k << " = " << v << "\n";
}

uint64_t GasTable::cost(const std::string& op) const {
    auto it = entries.find(op);
    if (it == entries.end()) throw std::runtime_error("no gas entry for " + op);
    return it->second;
}

uint64_t GasTable::cost(TxKind k) const { return cost(gas_op_name(k)); }

std::string GasReport::to_text() const {
    std::ostringstream os;
    os << "operation          count      unit       total\n";
    for (const auto& r : rows) {
        os << r.op;
        for (size_t i = r.op.size(); i < 19; ++i) os << ' ';
        std::string c = std::to_string(r.count), u = std::to_string(r.unit),
                    t = std::to_string(r.total);
        for (size_t i = c.size(); i < 5; ++i) os << ' ';
        os << c << "  ";
        for (size_t i = u.size(); i < 8; ++i) os << ' ';
        os << u << "  ";
        for (size_t i = t.size(); i < 10; ++i) os << ' ';
        os << t << "\n";
    }
    os << "total gas: " << total << "\n";
    return os.str();
}

GasReport gas_report(const RunResult& r, const GasTable& table) {
    std::map<std::string, GasReport::Row> rows;
    for (const auto& b : r.chain->blocks()) {
        for (size_t i = 0; i < b.txs.size(); ++i) {
            if (i >= b.receipts.size() || !b.receipts[i].ok) continue;
            std::string op = gas_op_name(b.txs[i].kind);
            auto& row = rows[op];
            row.op = op;
            row.unit = table.cost(op);
            row.count += 1;
            row.total = row.count * row.unit;
        }
    }
    GasReport rep;
    // Emit in protocol order rather than alphabetical.
    for (TxKind k :
         {TxKind::Register, TxKind::Deposit, TxKind::ChaT, TxKind::Ack, TxKind::FNeg,
          TxKind::ChaP, TxKind::ResP, TxKind::PnsP, TxKind::Cmt, TxKind::Com, TxKind::PnsT}) {
        auto it = rows.find(gas_op_name(k));
        if (it == rows.end()) continue;
        rep.rows.push_back(it->second);
        rep.total += it->second.total;
    }
    return rep;
}

}  // namespace decloak
