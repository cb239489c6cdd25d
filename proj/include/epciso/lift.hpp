#pragma once

#include "epciso/derive.hpp"
#include "epciso/dwl.hpp"

namespace epciso {

// Extension plan for one executed operation: one descriptor per pair of new
// vertices, in canonical order.
struct LiftPlan {
    OpKind op;
    ColorId color;
    std::vector<Vertex> new_left, new_right;  // next-state side-local, ascending
    struct NewPair {
        Vertex v, w;  // next-state side-local
        ExtensionDescriptor desc;
    };
    std::vector<NewPair> new_pairs;
    // extension-count bound: |new_pairs| <= |V(G')|^2
};

LiftPlan make_lift_plan(const CloudState& prev, const CloudState& next,
                        const SystemView& prev_view);

struct LiftResult {
    SystemView view;      // realized P_iso of the next state
    PisoSystem direct;    // piso(next), the faithfulness reference
    int ext_base = 0;     // first extension index allocated by this lift
    int ext_count = 0;
};

// Derives the full axiom system of the next state from the previous one:
// extension introductions, row/column axioms for new vertices, repaired
// row/column axioms for survivors of a contraction, and the local axioms for
// new-old and new-new pairs. Every derived polynomial is checked against the
// directly generated system.
LiftResult lift_axioms(DeriveCtx& prev_ctx, const CloudState& prev, const CloudState& next,
                       const LiftPlan& plan);

}  // namespace epciso
