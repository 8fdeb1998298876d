#pragma once

// Post-run property checkers. Each one inspects a finished run (trace, chain,
// contract snapshot, actor reports) and decides whether the protocol kept its
// promise: correct outputs, no honest money lost, bounded-delay all-or-nothing
// delivery, and outputs reconstructible from public chain data.

#include "decloak/actors.hpp"

namespace decloak {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct CheckReport {
    std::vector<CheckResult> checks;

    bool all_pass() const;
    std::string to_text() const;
};

// Completed runs only: recomputes the transition over the settled parties'
// declared inputs and compares against what each honest party learned and
// against the on-chain state-commitment digest.
CheckResult check_correctness(const RunResult& r);

// No honest actor ends below its starting balance; an aborted run punishes
// at least one misbehaving actor and only misbehaving actors lose coins.
CheckResult check_financial_fairness(const RunResult& r);

// Every honest settled party that learns its output learns it within delta
// ticks of the first learner.
CheckResult check_delivery_fairness(const RunResult& r);

// All honest settled parties learn their outputs, or none do.
CheckResult check_delivery_atomicity(const RunResult& r);

// Completed runs: outputs were reconstructible from on-chain data plus the
// party's own key, evidenced by every honest settled party holding plaintext
// state and return values consistent with the published commitments.
CheckResult check_data_availability(const RunResult& r);

// The proposal reached an absorbing state (or never left the off-chain world).
CheckResult check_termination(const RunResult& r);

CheckReport check_run(const RunResult& r);

bool traces_equal(const Trace& a, const Trace& b);

}  // namespace decloak
