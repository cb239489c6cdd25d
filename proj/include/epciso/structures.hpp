#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace epciso {

using Vertex = int;
using VertexPair = std::pair<Vertex, Vertex>;

// Domain errors carry a stable code (first token of what()) plus detail.
class DomainError : public std::runtime_error {
  public:
    DomainError(std::string code, const std::string& detail)
        : std::runtime_error(code + ": " + detail), code_(std::move(code)) {}
    const std::string& code() const { return code_; }

  private:
    std::string code_;
};

struct Relation {
    std::string name;
    bool is_color = false;  // vertex colour, must be diagonal
    std::set<VertexPair> pairs;

    bool contains(Vertex u, Vertex v) const { return pairs.count({u, v}) != 0; }
    bool operator==(const Relation&) const = default;
};

// Finite universe 0..n-1 with named binary relations. Vertex colours are
// diagonal relations flagged `color`; they must partition the diagonal when
// present. Immutable by convention once validated.
struct Structure {
    int n = 0;
    std::vector<Relation> relations;  // sorted by name, names unique

    const Relation* find(const std::string& name) const;
    bool has(const std::string& name, Vertex u, Vertex v) const;

    bool is_connected() const;  // over the union of all relations and converses

    // Set of colour-relation names containing (v,v); the vertex colour class.
    std::set<std::string> vertex_color(Vertex v) const;
    // Set of all relation names containing (v,v) (colour relations and loops).
    std::set<std::string> diagonal_type(Vertex v) const;

    void validate() const;           // throws DomainError(VALIDATION_ERROR, ...)
    std::string serialize() const;   // canonical text form
    bool operator==(const Structure& o) const { return n == o.n && relations == o.relations; }
};

void validate_color_partition(const Structure& s);

Structure parse_structure(const std::string& text);
Structure parse_structure_file(const std::string& path);

enum class Side { Left, Right };

// Disjoint union G ⊎ H with side tags; relations never cross sides and each
// side must induce a connected structure.
struct UnionStructure {
    Structure s;
    std::vector<Side> side;
    int left_size = 0;
    int right_size = 0;

    bool is_left(Vertex v) const { return side[static_cast<size_t>(v)] == Side::Left; }
    // side-local index <-> union index
    Vertex to_union(Side sd, Vertex local) const { return sd == Side::Left ? local : local + left_size; }
    Vertex to_local(Vertex u) const { return is_left(u) ? u : u - left_size; }
    int side_size(Side sd) const { return sd == Side::Left ? left_size : right_size; }

    Structure extract(Side sd) const;  // standalone copy of one side
    void validate() const;
};

UnionStructure disjoint_union(const Structure& left, const Structure& right);

// CFI companions of a connected simple undirected base graph. Always vertex-
// coloured with one colour class per vertex gadget and per edge gadget; with
// `ordered`, a total preorder relation over the gadget classes is added. The
// first companion is plain; the second is twisted at the lexicographically
// least base edge when `twisted` is set, otherwise identical to the first.
std::pair<Structure, Structure> cfi_pair(const Structure& base, bool twisted, bool ordered);

// Brute-force colour-preserving isomorphism search (test oracle).
std::optional<std::vector<Vertex>> find_isomorphism(const Structure& a, const Structure& b);

}  // namespace epciso
