#pragma once

#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "epciso/structures.hpp"

namespace epciso {

using ColorId = int;

// One refinement layer: canonical colour ids for every ordered vertex pair.
// Ids are canonical per layer (isomorphic inputs get identical ids): layer-0
// colours are ordered by atomic type, later layers by (parent id, signature).
struct Layer {
    std::vector<ColorId> color;  // index u*n+v
    int num_colors = 0;
    std::vector<ColorId> parent;    // per colour; -1 at layer 0
    std::vector<char> is_diag;      // per colour
    std::vector<char> is_cross;     // per colour (always 0 for single structures)
};

struct SeparationWitness {
    int iteration = 0;      // first layer with distinct colours
    ColorId s1 = -1, s2 = -1;  // witness colours of the previous layer (iteration >= 1)
    long count1 = 0, count2 = 0;
};

// Full iterated 2-WL history of a structure or a disjoint union. The last
// layer is stable and is the coarsest coherent configuration refining the
// input; colour ids there are the canonical colour names.
struct ColorHistory {
    Structure structure;
    bool is_union = false;
    std::vector<Side> side;  // empty unless union
    int left_size = 0;
    int n = 0;
    std::vector<Layer> layers;
    int stable_index = 0;  // == layers.size() - 1
    std::vector<ColorId> converse;  // stable layer: colour of R^{-1}

    const Layer& stable() const { return layers[static_cast<size_t>(stable_index)]; }
    ColorId color_at(int layer, Vertex u, Vertex v) const {
        return layers[static_cast<size_t>(layer)].color[static_cast<size_t>(u) * n + v];
    }
    ColorId stable_color(Vertex u, Vertex v) const { return color_at(stable_index, u, v); }
    std::vector<VertexPair> color_class(ColorId c) const;      // stable, sorted
    bool is_crossing(ColorId c) const { return stable().is_cross[static_cast<size_t>(c)] != 0; }
    bool is_diagonal(ColorId c) const { return stable().is_diag[static_cast<size_t>(c)] != 0; }
    // diagonal colour of (v,v) at a layer
    ColorId diag_color_at(int layer, Vertex v) const { return color_at(layer, v, v); }
};

ColorHistory refine(const Structure& a, int jobs = 1);
ColorHistory refine(const UnionStructure& a, int jobs = 1);

// The tuple (tau, sigma, refines, q) in canonical form.
struct AlgebraicSketch {
    std::vector<std::string> tau;
    int num_colors = 0;
    std::vector<char> diag;
    std::vector<std::vector<int>> refines;  // per colour: indices into tau, sorted
    std::map<std::tuple<ColorId, ColorId, ColorId>, long> q;  // absent = 0

    std::string serialize() const;
    bool operator==(const AlgebraicSketch& o) const = default;
};

AlgebraicSketch sketch(const ColorHistory& h);

// Sketch of one side of a union, canonically renamed; validates that the
// union's stable colouring restricted to the side coincides with the side's
// own stable colouring.
AlgebraicSketch restrict_sketch(const ColorHistory& h, Side side);

std::optional<SeparationWitness> first_separation(const ColorHistory& h, VertexPair a,
                                                  VertexPair b);

// SCCs of the stable colour class R: paths of length >= 1, loopless
// singletons excluded. Sorted by least member.
std::vector<std::vector<Vertex>> sccs_of_color(const ColorHistory& h, ColorId r);
std::vector<std::vector<Vertex>> sccs_of_relation(const std::vector<VertexPair>& pairs, int n);

struct ValidationCheck {
    std::string name;
    bool pass = true;
    std::string detail;  // counterexample description on failure
};
struct ValidationReport {
    std::vector<ValidationCheck> checks;
    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
    std::string to_string() const;
};

// Checks every coherent-configuration clause and the SCC/endpoint/between-SCC
// colour properties by brute-force recount over the structure.
ValidationReport validate_configuration(const ColorHistory& h);

// Per-layer invariants of union refinements: crossing/non-crossing colours
// never mix; endpoint diagonal colours exist per colour; crossing colours are
// determined by their endpoint diagonal colours.
ValidationReport validate_layers(const ColorHistory& h);

}  // namespace epciso
