#pragma once

// Gas accounting: a flat per-operation cost table (overridable from a
// key=value text file) and a per-run report of what each accepted
// transaction cost.

#include "decloak/actors.hpp"

namespace decloak {

struct GasTable {
    std::map<std::string, uint64_t> entries;

    static GasTable defaults();
    static GasTable load(const std::string& path);
    void save(const std::string& path) const;

    uint64_t cost(const std::string& op) const;
    uint64_t cost(TxKind k) const;
};

// Operation name a transaction kind is charged under.
const char* gas_op_name(TxKind k);

struct GasReport {
    struct Row {
        std::string op;
        uint64_t count = 0;
        uint64_t unit = 0;
        uint64_t total = 0;
    };
    std::vector<Row> rows;
    uint64_t total = 0;

    std::string to_text() const;
};

// Charges every accepted transaction in the run's chain.
GasReport gas_report(const RunResult& r, const GasTable& table);

}  // namespace decloak
