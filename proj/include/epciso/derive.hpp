#pragma once

#include <map>
#include <set>
#include <vector>

#include "epciso/coherent.hpp"
#include "epciso/polynomial.hpp"
#include "epciso/proof.hpp"

namespace epciso {

// Appends steps to a proof under construction; input axioms are materialized
// lazily as Axiom steps and cached.
class ProofBuilder {
  public:
    ProofBuilder(Proof& proof, const std::vector<Axiom>& input_axioms)
        : proof_(proof), axioms_(input_axioms), axiom_steps_(input_axioms.size(), -1) {}

    int axiom_step(int axiom_index);
    int append(Polynomial poly, Justification just);
    // allocates the next extension index, appends its introduction step
    int add_extension(ExtensionDescriptor d);
    int ext_intro_step(int ext_index) const { return ext_steps_.at(static_cast<size_t>(ext_index)); }
    const Polynomial& poly(int step) const { return proof_.steps[static_cast<size_t>(step)].poly; }
    Proof& proof() { return proof_; }
    const std::vector<Axiom>& input_axioms() const { return axioms_; }
    int size() const { return static_cast<int>(proof_.steps.size()); }
    // scaling factors used by LIN chains (for the denominator audit)
    const std::set<long>& denominator_atoms() const { return denom_atoms_; }
    void note_denominator(long k) { if (k > 1) denom_atoms_.insert(k); }

  private:
    Proof& proof_;
    const std::vector<Axiom>& axioms_;
    std::vector<int> axiom_steps_;
    std::vector<int> ext_steps_;
    std::set<long> denom_atoms_;
};

// Either an input axiom or an already-derived step.
struct Handle {
    int step = -1;
    int axiom = -1;
    bool valid() const { return step >= 0 || axiom >= 0; }
};

// A realized axiom system P_iso(G_i, H_i): variable map plus one handle per
// row/column/local axiom. State 0 uses input-axiom handles; lifted states use
// derived steps.
struct SystemView {
    const UnionStructure* st = nullptr;
    const ColorHistory* hist = nullptr;
    std::vector<std::vector<VariableId>> varmap;  // [v][w], side-local
    std::vector<std::vector<char>> varok;
    std::vector<std::vector<Vertex>> partners_left;   // sorted
    std::vector<std::vector<Vertex>> partners_right;  // sorted
    std::vector<Handle> row;  // per right vertex
    std::vector<Handle> col;  // per left vertex
    std::map<Monomial, Handle> local;  // canonical monomial in proof variables
    std::map<uint32_t, VertexPair> rev;  // VariableId.raw -> side-local (v,w)

    bool has_var(Vertex v, Vertex w) const { return varok[static_cast<size_t>(v)][static_cast<size_t>(w)] != 0; }
    VariableId var(Vertex v, Vertex w) const { return varmap[static_cast<size_t>(v)][static_cast<size_t>(w)]; }
    VertexPair pebble_of(VariableId x) const { return rev.at(x.raw); }
};

SystemView make_state0_view(const UnionStructure& gh, const ColorHistory& hist,
                            const PisoSystem& sys);

// Position: set of at most two pebble pairs, side-local coordinates.
using Position = std::vector<VertexPair>;  // sorted, deduplicated
Position normalize_position(Position p);
Monomial position_monomial(const SystemView& sys, const Position& p);

struct DeriveCtx {
    ProofBuilder& pb;
    SystemView& sys;
    bool sketches_equal = false;  // lifting-time guard: Case 2 must not arise
    std::map<Position, int> pos_memo;
    std::map<Monomial, int> term_memo;
    std::map<std::pair<int, ColorId>, int> census_memo;

    DeriveCtx(ProofBuilder& b, SystemView& s, bool eq) : pb(b), sys(s), sketches_equal(eq) {}
};

// MC3 fragment ending in X_pos; recursion on the first separating iteration.
int derive_position(DeriveCtx& ctx, Position pos);

// Fragment ending in the product of the given variables (<= 3 factors), using
// a sub-position separated strictly before `max_iteration` (or a failed local
// isomorphism) and re-attaching the remaining factors.
int derive_term(DeriveCtx& ctx, const Monomial& mono, int max_iteration);

// Fragment ending in the constant 1; requires the restricted sketches of the
// two sides to differ.
int derive_one(DeriveCtx& ctx);

// Least fixpoint of MC3-derivable positions of size <= 2 (independent test
// oracle). Positions are returned as normalized pebble lists; the empty
// position denotes the 1-polynomial.
std::set<Position> derivable_closure_oracle(const UnionStructure& gh);

}  // namespace epciso
