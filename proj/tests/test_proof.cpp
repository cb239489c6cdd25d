#include <doctest.h>

#include "corpus.hpp"
#include "epciso/proof.hpp"

using namespace epciso;

namespace {

VariableId X(int v, int w) { return VariableId::orig(v, w); }

std::vector<Axiom> tiny_axioms() {
    // axioms {X - 1, X} over a single variable
    Polynomial x = Polynomial::variable(X(0, 0));
    return {{x.minus(Polynomial::constant(1)), AxiomKind::Row, 0}, {x, AxiomKind::Col, 0}};
}

}  // namespace

TEST_CASE("accept and refute the tiny inconsistent system") {
    Proof p;
    p.mode = Mode::MC3;
    p.steps.push_back({Polynomial::variable(X(0, 0)), Justification::ax(1)});
    p.steps.push_back({Polynomial::variable(X(0, 0)).minus(Polynomial::constant(1)),
                       Justification::ax(0)});
    p.steps.push_back({Polynomial::constant(1), Justification::lin(0, 1, 1, -1)});
    CheckResult r = check(p, tiny_axioms());
    REQUIRE(r.accepted);
    CHECK(r.refutation);
    CHECK(r.metrics.size == 4);
    CHECK(r.metrics.max_degree == 1);
    CHECK(r.metrics.extension_count == 0);
    CHECK(r.metrics.bit_complexity == 2);  // 1/1 takes one bit each
}

TEST_CASE("accepted non-refutation") {
    Proof p;
    p.mode = Mode::MC3;
    Polynomial ax0 = tiny_axioms()[0].poly;
    p.steps.push_back({ax0, Justification::ax(0)});
    p.steps.push_back({Polynomial::zero(), Justification::lin(0, 1, 0, -1)});
    CheckResult r = check(p, tiny_axioms());
    CHECK(r.accepted);
    CHECK(!r.refutation);
}

TEST_CASE("empty proof is accepted and vacuously sound") {
    Proof p;
    CheckResult r = check(p, tiny_axioms());
    CHECK(r.accepted);
    CHECK(!r.refutation);
    Assignment a;
    a.set(X(0, 0), 1);
    CHECK(soundness_probe(p, {tiny_axioms()[0]}, a).passed);
}

TEST_CASE("degree bound enforcement") {
    // x^3 is fine, x^4 exceeds the bound
    Proof p;
    p.mode = Mode::PC3;
    Polynomial x = Polynomial::variable(X(0, 0));
    p.steps.push_back({x, Justification::ax(1)});
    Polynomial cur = x;
    for (int d = 2; d <= 3; ++d) {
        cur = Polynomial::mul_var(cur, X(0, 0));
        p.steps.push_back({cur, Justification::mul(d - 2, X(0, 0))});
    }
    CHECK(check(p, tiny_axioms()).accepted);
    cur = Polynomial::mul_var(cur, X(0, 0));
    p.steps.push_back({cur, Justification::mul(2, X(0, 0))});
    CheckResult r = check(p, tiny_axioms());
    CHECK(!r.accepted);
    CHECK(r.error == CheckError::DegreeExceeded);
    CHECK(r.failed_step == 3);
}

TEST_CASE("adversarial rejects with pinpointed steps") {
    std::vector<Axiom> axs = tiny_axioms();

    SUBCASE("wrong axiom index recomputes differently") {
        Proof p;
        p.steps.push_back({axs[0].poly, Justification::ax(1)});
        CheckResult r = check(p, axs);
        CHECK(!r.accepted);
        CHECK(r.error == CheckError::PolyMismatch);
        CHECK(r.failed_step == 0);
    }
    SUBCASE("axiom index out of range") {
        Proof p;
        p.steps.push_back({axs[0].poly, Justification::ax(7)});
        CheckResult r = check(p, axs);
        CHECK(!r.accepted);
        CHECK(r.error == CheckError::BadPremise);
    }
    SUBCASE("bad linear combination arithmetic") {
        Proof p;
        p.steps.push_back({axs[0].poly, Justification::ax(0)});
        p.steps.push_back({axs[1].poly, Justification::ax(1)});
        p.steps.push_back({Polynomial::constant(1), Justification::lin(0, 1, 1, 1)});
        CheckResult r = check(p, axs);
        CHECK(!r.accepted);
        CHECK(r.error == CheckError::PolyMismatch);
        CHECK(r.failed_step == 2);
    }
    SUBCASE("forward premise reference") {
        Proof p;
        p.steps.push_back({axs[0].poly, Justification::lin(0, 1, 0, 0)});
        CheckResult r = check(p, axs);
        CHECK(!r.accepted);
        CHECK(r.error == CheckError::BadPremise);
    }
    SUBCASE("Boolean axiom on an extension variable") {
        Proof p;
        p.mode = Mode::EPC3;
        p.ext_table.push_back(ExtensionDescriptor::pair(X(0, 0), X(0, 0)));
        VariableId e0 = VariableId::ext(0);
        p.steps.push_back(
            {Polynomial::add_scaled(Polynomial::variable(e0), p.ext_table[0].f, 1, -1),
             Justification::extension(0)});
        Monomial sq = Monomial::var(e0).times(e0);
        p.steps.push_back({Polynomial::add_scaled(Polynomial::monomial(sq, 1),
                                                  Polynomial::variable(e0), 1, -1),
                           Justification::boolean(e0)});
        CheckResult r = check(p, axs);
        CHECK(!r.accepted);
        CHECK(r.error == CheckError::BooleanOnExt);
        CHECK(r.failed_step == 1);
    }
    SUBCASE("non-fresh extension variable") {
        Proof p;
        p.mode = Mode::EPC3;
        p.ext_table.push_back(ExtensionDescriptor::pair(X(0, 0), X(0, 0)));
        VariableId e0 = VariableId::ext(0);
        Polynomial intro =
            Polynomial::add_scaled(Polynomial::variable(e0), p.ext_table[0].f, 1, -1);
        p.steps.push_back({intro, Justification::extension(0)});
        p.steps.push_back({intro, Justification::extension(0)});
        CheckResult r = check(p, axs);
        CHECK(!r.accepted);
        CHECK(r.error == CheckError::NotFresh);
        CHECK(r.failed_step == 1);
    }
    SUBCASE("extension used before introduction") {
        Proof p;
        p.mode = Mode::EPC3;
        p.ext_table.push_back(ExtensionDescriptor::pair(X(0, 0), X(0, 0)));
        p.steps.push_back({Polynomial::variable(VariableId::ext(0)), Justification::ax(0)});
        CheckResult r = check(p, axs);
        CHECK(!r.accepted);
        CHECK(r.error == CheckError::NotFresh);
    }
    SUBCASE("mc multiplication restriction") {
        // premise (X - 1) + X = 2X - 1 is neither a monomial nor monomial*axiom
        Proof p;
        p.mode = Mode::MC3;
        p.steps.push_back({axs[0].poly, Justification::ax(0)});
        p.steps.push_back({axs[1].poly, Justification::ax(1)});
        Polynomial twoxm1 = Polynomial::add_scaled(axs[0].poly, axs[1].poly, 1, 1);
        p.steps.push_back({twoxm1, Justification::lin(0, 1, 1, 1)});
        p.steps.push_back({Polynomial::mul_var(twoxm1, X(0, 0)), Justification::mul(2, X(0, 0))});
        CheckResult r = check(p, axs);
        CHECK(!r.accepted);
        CHECK(r.error == CheckError::McMulViolation);
        CHECK(r.failed_step == 3);
        // the same proof in pc3 mode is fine
        p.mode = Mode::PC3;
        CHECK(check(p, axs).accepted);
    }
    SUBCASE("restricted extension form") {
        Proof p;
        p.mode = Mode::EPC3;
        p.restricted_ext = true;
        Polynomial bad = Polynomial::variable(X(0, 0)).plus(Polynomial::constant(1));
        p.ext_table.push_back(ExtensionDescriptor::other(bad));
        p.steps.push_back(
            {Polynomial::add_scaled(Polynomial::variable(VariableId::ext(0)), bad, 1, -1),
             Justification::extension(0)});
        CheckResult r = check(p, axs);
        CHECK(!r.accepted);
        CHECK(r.error == CheckError::BadExtForm);
        CHECK(r.failed_step == 0);
        p.restricted_ext = false;
        CHECK(check(p, axs).accepted);
    }
    SUBCASE("extension axiom outside epc3") {
        Proof p;
        p.mode = Mode::MC3;
        p.ext_table.push_back(ExtensionDescriptor::pair(X(0, 0), X(0, 0)));
        p.steps.push_back(
            {Polynomial::add_scaled(Polynomial::variable(VariableId::ext(0)), p.ext_table[0].f, 1,
                                    -1),
             Justification::extension(0)});
        CheckResult r = check(p, axs);
        CHECK(!r.accepted);
        CHECK(r.error == CheckError::BadPremise);
    }
}

TEST_CASE("mc multiplication allows monomials and monomial times axiom") {
    std::vector<Axiom> axs = tiny_axioms();
    Proof p;
    p.mode = Mode::MC3;
    p.steps.push_back({axs[0].poly, Justification::ax(0)});
    // X * (X - 1): premise is an axiom
    p.steps.push_back({Polynomial::mul_var(axs[0].poly, X(0, 0)), Justification::mul(0, X(0, 0))});
    // X * X * (X - 1): premise is monomial * axiom
    p.steps.push_back(
        {Polynomial::mul_var(p.steps[1].poly, X(0, 0)), Justification::mul(1, X(0, 0))});
    CHECK(check(p, axs).accepted);
}

TEST_CASE("proof serialization round trip, bit exact") {
    Proof p;
    p.mode = Mode::EPC3;
    p.restricted_ext = true;
    p.ext_table.push_back(ExtensionDescriptor::pair(X(0, 0), X(1, 1)));
    p.steps.push_back(
        {Polynomial::add_scaled(Polynomial::variable(VariableId::ext(0)), p.ext_table[0].f, 1, -1),
         Justification::extension(0)});
    p.steps.push_back({Polynomial::mul_var(p.steps[0].poly, X(0, 1)),
                       Justification::mul(0, X(0, 1))});
    p.steps.push_back({p.steps[1].poly.scaled(rat(-2, 3)),
                       Justification::lin(1, rat(-2, 3), 1, 0)});
    std::string text = p.serialize();
    Proof q = parse_proof(text);
    CHECK(q.serialize() == text);
    CHECK(q.steps.size() == p.steps.size());
    CHECK(q.ext_table.size() == 1);
    CHECK(q.ext_table[0].kind == ExtensionDescriptor::Kind::Pair);
}

TEST_CASE("structural corruption is rejected or harmless") {
    std::vector<Axiom> axs = tiny_axioms();
    Proof p;
    p.mode = Mode::EPC3;
    p.steps.push_back({axs[0].poly, Justification::ax(0)});
    p.steps.push_back({axs[1].poly, Justification::ax(1)});
    p.steps.push_back({Polynomial::constant(1), Justification::lin(1, 1, 0, -1)});
    p.steps.push_back({Polynomial::mul_var(axs[0].poly, X(0, 0)), Justification::mul(0, X(0, 0))});
    REQUIRE(check(p, axs).accepted);

    std::mt19937 rng(79);
    int rejected = 0, harmless = 0;
    for (int trial = 0; trial < 200; ++trial) {
        Proof q = p;
        size_t si = std::uniform_int_distribution<size_t>(0, q.steps.size() - 1)(rng);
        ProofStep& st = q.steps[si];
        switch (std::uniform_int_distribution<int>(0, 3)(rng)) {
            case 0:  // bump a stated coefficient
                if (!st.poly.terms.empty()) {
                    size_t ti =
                        std::uniform_int_distribution<size_t>(0, st.poly.terms.size() - 1)(rng);
                    st.poly.terms[ti].second += 1;
                }
                break;
            case 1:  // swap a premise or axiom index
                if (st.just.rule == Justification::Rule::Lin && si > 0)
                    st.just.premise_a = (st.just.premise_a + 1) % static_cast<int>(si);
                else if (st.just.rule == Justification::Rule::Mul && si > 0)
                    st.just.premise = (st.just.premise + 1) % static_cast<int>(si);
                else if (st.just.rule == Justification::Rule::Axiom)
                    st.just.axiom = 1 - st.just.axiom;
                break;
            case 2:  // perturb a variable id inside the polynomial
                if (!st.poly.terms.empty() && !st.poly.terms[0].first.factors.empty())
                    st.poly.terms[0].first.factors[0] = X(1, 1);
                break;
            case 3:  // change a lin coefficient
                if (st.just.rule == Justification::Rule::Lin) st.just.ca += 1;
                break;
        }
        CheckResult r = check(q, axs);
        if (!r.accepted) {
            ++rejected;
            continue;
        }
        bool same = true;
        for (size_t i = 0; i < p.steps.size(); ++i)
            if (!(q.steps[i].poly == p.steps[i].poly)) same = false;
        CHECK(same);
        ++harmless;
    }
    CHECK(rejected > 0);
    CHECK(rejected + harmless == 200);
}

TEST_CASE("single-character file corruption never crashes and never changes accepted content") {
    std::vector<Axiom> axs = tiny_axioms();
    Proof p;
    p.mode = Mode::EPC3;
    p.ext_table.push_back(ExtensionDescriptor::pair(X(0, 0), X(0, 0)));
    p.steps.push_back(
        {Polynomial::add_scaled(Polynomial::variable(VariableId::ext(0)), p.ext_table[0].f, 1, -1),
         Justification::extension(0)});
    p.steps.push_back({axs[0].poly, Justification::ax(0)});
    p.steps.push_back({Polynomial::mul_var(axs[0].poly, X(0, 0)), Justification::mul(1, X(0, 0))});
    p.steps.push_back({p.steps[2].poly.scaled(rat(-1, 2)), Justification::lin(2, rat(-1, 2), 2, 0)});
    REQUIRE(check(p, axs).accepted);
    std::string text = p.serialize();

    std::mt19937 rng(113);
    std::uniform_int_distribution<size_t> pos(0, text.size() - 1);
    const std::string alphabet = "0123456789ex[],*/+-:= abcdefgh\n";
    std::uniform_int_distribution<size_t> pick(0, alphabet.size() - 1);
    int parse_failed = 0, rejected = 0, harmless = 0;
    for (int trial = 0; trial < 400; ++trial) {
        std::string mutated = text;
        mutated[pos(rng)] = alphabet[pick(rng)];
        Proof q;
        try {
            q = parse_proof(mutated);
        } catch (const std::exception&) {
            ++parse_failed;
            continue;
        }
        CheckResult r = check(q, axs);
        if (!r.accepted) {
            ++rejected;
            continue;
        }
        bool same = q.steps.size() == p.steps.size();
        for (size_t i = 0; same && i < p.steps.size(); ++i)
            if (!(q.steps[i].poly == p.steps[i].poly)) same = false;
        CHECK(same);
        ++harmless;
    }
    CHECK(parse_failed + rejected + harmless == 400);
    CHECK(rejected + parse_failed > 0);
}

TEST_CASE("soundness probe pinpoints nonzero steps and bad assignments") {
    std::vector<Axiom> axs = tiny_axioms();
    Proof p;
    p.steps.push_back({axs[1].poly, Justification::ax(1)});
    // X -> 0 does not zero the axiom X - 1: precondition rejection
    Assignment zero;
    zero.set(X(0, 0), 0);
    SoundnessResult bad = soundness_probe(p, axs, zero);
    CHECK(!bad.passed);
    CHECK(bad.failed_step == -1);
    // an incomplete assignment is an error, as in evaluation
    CHECK_THROWS_WITH_AS(soundness_probe(p, axs, Assignment{}),
                         doctest::Contains("INCOMPLETE_ASSIGNMENT"), DomainError);

    // use only the consistent axiom {X - 1}
    std::vector<Axiom> consistent{axs[0]};
    Assignment good;
    good.set(X(0, 0), 1);
    Proof q;
    q.steps.push_back({axs[0].poly, Justification::ax(0)});
    q.steps.push_back({Polynomial::mul_var(axs[0].poly, X(0, 0)), Justification::mul(0, X(0, 0))});
    REQUIRE(check(q, consistent).accepted);
    SoundnessResult ok = soundness_probe(q, consistent, good);
    CHECK(ok.passed);

    // a smuggled nonzero step is pinpointed
    q.steps.push_back({Polynomial::constant(1), Justification::ax(0)});
    SoundnessResult fail = soundness_probe(q, consistent, good);
    CHECK(!fail.passed);
    CHECK(fail.failed_step == 2);
}
