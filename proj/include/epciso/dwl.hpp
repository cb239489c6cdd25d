#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "epciso/coherent.hpp"
#include "epciso/structures.hpp"

namespace epciso {

enum class OpKind { Pair, Scc };

struct DwlOp {
    OpKind kind;
    ColorId color;  // canonical stable colour id of the current state
};

struct DwlTrace {
    std::vector<DwlOp> ops;
    int budget_vertices = 4096;
    int budget_steps = 64;

    std::string serialize() const;
};

DwlTrace parse_trace(const std::string& text);
DwlTrace parse_trace_file(const std::string& path);

struct Provenance {
    enum class Kind { Original, Pair, Scc };
    Kind kind = Kind::Original;
    Vertex prev = -1;               // Original: previous union index
    VertexPair parents{-1, -1};     // Pair: previous union indices
    std::vector<Vertex> members;    // Scc: previous union indices, sorted
};

// Immutable snapshot of the cloud after refinement.
struct CloudState {
    UnionStructure structure;
    ColorHistory history;
    AlgebraicSketch sketch_left, sketch_right;
    std::vector<Provenance> provenance;     // per current union vertex
    std::vector<Vertex> prev_to_cur;        // previous union index -> current (-1 if removed)
    int step_count = 0;
    OpKind op_kind = OpKind::Pair;          // op that produced this state (undefined for state 0)
    ColorId op_color = -1;

    bool distinguished() const { return !(sketch_left == sketch_right); }
};

CloudState initial_state(const Structure& g, const Structure& h, int jobs = 1);

// pair(R): one fresh vertex per pair of colour R, linked to its two parents.
CloudState exec_pair(const CloudState& state, ColorId r, const DwlTrace& budget, int jobs = 1);
// scc(R): contract every SCC of the colour-R digraph.
CloudState exec_scc(const CloudState& state, ColorId r, const DwlTrace& budget, int jobs = 1);

enum class TraceOutcome { Distinguished, NotDistinguished };

struct TraceRun {
    std::vector<CloudState> states;  // state 0 .. last executed
    TraceOutcome outcome = TraceOutcome::NotDistinguished;
    int ops_executed = 0;  // ops executed before stopping
};

// Executes ops in order, stopping early at the first state whose restricted
// sketches differ.
TraceRun run_trace(const Structure& g, const Structure& h, const DwlTrace& trace, int jobs = 1);

}  // namespace epciso
