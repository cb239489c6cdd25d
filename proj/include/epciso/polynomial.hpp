#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "epciso/rational.hpp"
#include "epciso/structures.hpp"

namespace epciso {

// Variable: ORIG(v,w) for an original pair (v in the left graph, w in the
// right graph, side-local indices) or EXT(k) for an extension variable.
// Packed so the natural integer order is the canonical variable order
// (all ORIG variables precede all EXT variables).
struct VariableId {
    uint32_t raw = 0;

    static constexpr uint32_t kExtBit = 0x80000000u;
    static VariableId orig(Vertex v, Vertex w) {
        if (v < 0 || w < 0 || v >= (1 << 16) || w >= (1 << 15))
            throw DomainError("VALIDATION_ERROR", "vertex index out of packing range");
        return {static_cast<uint32_t>(v) << 15 | static_cast<uint32_t>(w)};
    }
    static VariableId ext(int k) { return {kExtBit | static_cast<uint32_t>(k)}; }
    bool is_ext() const { return (raw & kExtBit) != 0; }
    int ext_index() const { return static_cast<int>(raw & ~kExtBit); }
    Vertex left() const { return static_cast<Vertex>(raw >> 15); }
    Vertex right() const { return static_cast<Vertex>(raw & 0x7fffu); }
    auto operator<=>(const VariableId&) const = default;
    std::string str() const;
};

// Product of variables, stored as the sorted expanded factor sequence
// (x^2 = [x, x]). The empty monomial is the constant 1.
struct Monomial {
    std::vector<VariableId> factors;

    static Monomial one() { return {}; }
    static Monomial var(VariableId v) { return {{v}}; }
    int degree() const { return static_cast<int>(factors.size()); }
    Monomial times(VariableId v) const;
    Monomial times(const Monomial& o) const;
    // divide by `o`; false when not divisible
    bool divide(const Monomial& o, Monomial& quotient) const;
    bool contains(VariableId v) const;
    // shorter-first, then lexicographic: 1 < x < x^2 < xy
    auto operator<=>(const Monomial& m) const {
        if (auto c = factors.size() <=> m.factors.size(); c != 0) return c;
        return factors <=> m.factors;
    }
    bool operator==(const Monomial&) const = default;
};

// Sparse multivariate polynomial over exact rationals; canonical form (no
// zero coefficients, monomials sorted). Immutable value semantics.
struct Polynomial {
    std::vector<std::pair<Monomial, Rational>> terms;  // sorted by monomial

    static Polynomial zero() { return {}; }
    static Polynomial constant(const Rational& c);
    static Polynomial variable(VariableId v);
    static Polynomial monomial(const Monomial& m, const Rational& c);

    bool is_zero() const { return terms.empty(); }
    bool is_one() const;
    int degree() const;  // max total multiplicity; extension variables count 1
    size_t monomial_count() const { return terms.size(); }
    Rational coeff(const Monomial& m) const;
    std::set<VariableId> variables() const;

    Polynomial plus(const Polynomial& o) const { return add_scaled(*this, o, 1, 1); }
    Polynomial minus(const Polynomial& o) const { return add_scaled(*this, o, 1, -1); }
    Polynomial scaled(const Rational& a) const;

    static Polynomial add_scaled(const Polynomial& p, const Polynomial& q, const Rational& a,
                                 const Rational& b);
    static Polynomial mul_var(const Polynomial& p, VariableId x);
    static Polynomial mul(const Polynomial& p, const Polynomial& q);

    std::string str() const;  // canonical text form
    bool operator==(const Polynomial&) const = default;
    auto operator<=>(const Polynomial&) const = default;
};

Polynomial parse_polynomial(const std::string& text);

// Defining polynomial of an extension variable. Restricted forms: a product
// of two variables, or (1/n) * sum of n^2 distinct variables.
struct ExtensionDescriptor {
    enum class Kind { Pair, Scc, Other };
    Kind kind = Kind::Other;
    Polynomial f;

    static ExtensionDescriptor pair(VariableId x, VariableId y);
    static ExtensionDescriptor scc(const std::vector<VariableId>& vars, long n);
    static ExtensionDescriptor other(Polynomial f);
    // checks the restricted shape from f alone, ignoring `kind`
    bool restricted_form_ok() const;
};

// Evaluates p under a {0,1} assignment of ORIG variables; extension variables
// evaluate through their defining polynomials.
class Assignment {
  public:
    void set(VariableId v, int value);
    bool has(VariableId v) const;
    int get(VariableId v) const;

  private:
    std::map<VariableId, int> vals_;
};

Rational evaluate(const Polynomial& p, const Assignment& assign,
                  const std::vector<ExtensionDescriptor>& ext_table);

// ---------------------------------------------------------------------------
// P_iso(G,H)

enum class AxiomKind { Row, Col, Local };

struct Axiom {
    Polynomial poly;
    AxiomKind kind;
    Vertex vertex = -1;  // the row/column vertex (side-local), -1 for Local
};

struct PisoSystem {
    std::vector<Axiom> axioms;  // rows (by w), then columns (by v), then locals
    bool color_count_mismatch = false;
    // same-vertex-colour classes: per left vertex, the partner right vertices
    std::vector<std::vector<Vertex>> partners_of_left;
    std::vector<std::vector<Vertex>> partners_of_right;

    bool var_exists(Vertex v, Vertex w) const;
    int row_index(Vertex w) const;  // axiom index
    int col_index(Vertex v) const;
    const std::map<Monomial, int>& local_index() const { return local_idx_; }
    std::map<Monomial, int> local_idx_;
};

// Whether {(v,w),(v',w')} is a local isomorphism between the two sides of gh
// (side-local indices). Handles the singleton case v==v' && w==w'.
bool local_isomorphism(const UnionStructure& gh, Vertex v, Vertex w, Vertex v2, Vertex w2);

PisoSystem piso(const UnionStructure& gh);

}  // namespace epciso
