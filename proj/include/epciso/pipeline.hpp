#pragma once

#include <string>
#include <vector>

#include "epciso/lift.hpp"

namespace epciso {

struct RefutationReport {
    enum class Outcome { Refuted, NotDistinguished };
    Outcome outcome = Outcome::NotDistinguished;
    ProofMetrics metrics;
    int states = 0;
    int ops_executed = 0;
    std::vector<long> denominator_atoms;  // scaling factors used by the producer
    std::vector<std::pair<std::string, double>> timings_ms;
    std::string to_text() const;
};

struct RefuteResult {
    RefutationReport report;
    Proof proof;                // meaningful when outcome == Refuted
    std::vector<Axiom> axioms;  // the P_iso system of the input pair
};

// Runs the trace, lifting the axiom system across every executed operation;
// at the first state with differing restricted sketches, derives the constant
// 1 over the lifted system. The emitted proof is re-checked before the
// outcome is reported as Refuted.
RefuteResult refute(const Structure& g, const Structure& h, const DwlTrace& trace, int jobs = 1);

}  // namespace epciso
