#pragma once

#include <optional>
#include <string>
#include <vector>

#include "epciso/polynomial.hpp"

namespace epciso {

enum class Mode { MC3, PC3, EPC3 };

std::string mode_str(Mode m);
Mode parse_mode(const std::string& s);

// Justification of one proof step. Premise indices refer to earlier steps.
struct Justification {
    enum class Rule { Axiom, BooleanAx, Mul, Lin, Ext };
    Rule rule;
    int axiom = -1;              // Axiom
    VariableId var;              // BooleanAx (the variable), Mul (the multiplier)
    int premise = -1;            // Mul
    int premise_a = -1, premise_b = -1;  // Lin
    Rational ca, cb;             // Lin coefficients
    int ext = -1;                // Ext: index into the extension table

    static Justification ax(int i);
    static Justification boolean(VariableId v);
    static Justification mul(int premise, VariableId v);
    static Justification lin(int a, const Rational& ca, int b, const Rational& cb);
    static Justification extension(int k);
};

struct ProofStep {
    Polynomial poly;
    Justification just;
};

struct Proof {
    Mode mode = Mode::EPC3;
    bool restricted_ext = false;
    std::vector<ExtensionDescriptor> ext_table;
    std::vector<ProofStep> steps;

    std::string serialize() const;
};

Proof parse_proof(const std::string& text);
Proof parse_proof_file(const std::string& path);

enum class CheckError {
    None,
    BadPremise,
    DegreeExceeded,
    NotFresh,
    BadExtForm,
    McMulViolation,
    PolyMismatch,
    BooleanOnExt,
};

std::string check_error_str(CheckError e);

struct ProofMetrics {
    long size = 0;            // total monomial occurrences over all step polynomials
    int bit_complexity = 0;   // max bits of any occurring coefficient (num+den)
    int extension_count = 0;
    int max_degree = 0;
};

struct CheckResult {
    bool accepted = false;
    bool refutation = false;  // last step is the constant 1
    CheckError error = CheckError::None;
    int failed_step = -1;
    std::string detail;
    ProofMetrics metrics;
};

// Recomputes every step from its justification; trusts nothing but the axiom
// list. Degree bound 3, extension variables count 1.
CheckResult check(const Proof& proof, const std::vector<Axiom>& axioms);

struct SoundnessResult {
    bool passed = false;
    int failed_step = -1;  // first step evaluating nonzero
    std::string detail;
};

// Precondition: `assign` zeroes every axiom and is {0,1} on ORIG variables.
// Every step of an accepted proof must evaluate to zero.
SoundnessResult soundness_probe(const Proof& proof, const std::vector<Axiom>& axioms,
                                const Assignment& assign);

}  // namespace epciso
