#include <doctest.h>

#include "corpus.hpp"
#include "epciso/dwl.hpp"

using namespace epciso;

namespace {

ColorId union_color(const CloudState& st, VertexPair left_pair) {
    return st.history.stable_color(left_pair.first, left_pair.second);
}

}  // namespace

TEST_CASE("trace file round trip") {
    DwlTrace t;
    t.budget_vertices = 100;
    t.budget_steps = 5;
    t.ops.push_back({OpKind::Pair, 3});
    t.ops.push_back({OpKind::Scc, 0});
    DwlTrace u = parse_trace(t.serialize());
    CHECK(u.serialize() == t.serialize());
    CHECK(u.ops.size() == 2);
    CHECK(u.budget_vertices == 100);
    CHECK_THROWS_WITH_AS(parse_trace("dwltrace v1 budget_vertices=0 budget_steps=1\n"),
                         doctest::Contains("PARSE_ERROR"), DomainError);
}

TEST_CASE("pair on the shared edge colour of K2+K2") {
    CloudState s0 = initial_state(corpus::k(2), corpus::k(2));
    REQUIRE(!s0.distinguished());
    ColorId edge = union_color(s0, {0, 1});
    CHECK(!s0.history.is_crossing(edge));
    DwlTrace budget;
    CloudState s1 = exec_pair(s0, edge, budget);
    CHECK(s1.structure.s.n == 8);  // two ordered pairs per side
    CHECK(s1.structure.left_size == 4);
    REQUIRE(s1.structure.s.find("E_left") != nullptr);
    REQUIRE(s1.structure.s.find("E_right") != nullptr);
    // D_R is the lexicographically least fresh binary name
    const Relation* dr = s1.structure.s.find("0");
    REQUIRE(dr != nullptr);
    CHECK(dr->is_color);
    CHECK(dr->pairs.size() == 4);
    for (auto [u, v] : dr->pairs) CHECK(u == v);
    CHECK(!s1.distinguished());
}

TEST_CASE("pair on the diagonal colour of K1+K1") {
    CloudState s0 = initial_state(corpus::k(1), corpus::k(1));
    ColorId diag = union_color(s0, {0, 0});
    DwlTrace budget;
    CloudState s1 = exec_pair(s0, diag, budget);
    CHECK(s1.structure.s.n == 4);
    const Relation* el = s1.structure.s.find("E_left");
    const Relation* er = s1.structure.s.find("E_right");
    REQUIRE(el);
    REQUIRE(er);
    // each fresh vertex hangs off its single parent by both link relations
    CHECK(el->pairs == er->pairs);
    CHECK(el->pairs.size() == 2);
}

TEST_CASE("pair on a crossing colour is not normalised") {
    CloudState s0 = initial_state(corpus::k(2), corpus::k(2));
    ColorId crossing = -1;
    for (ColorId c = 0; c < s0.history.stable().num_colors; ++c)
        if (s0.history.is_crossing(c)) crossing = c;
    REQUIRE(crossing >= 0);
    DwlTrace budget;
    CHECK_THROWS_WITH_AS(exec_pair(s0, crossing, budget), doctest::Contains("NOT_NORMALISED"),
                         DomainError);
    CHECK_THROWS_WITH_AS(exec_pair(s0, 999, budget), doctest::Contains("UNKNOWN_COLOR"),
                         DomainError);
}

TEST_CASE("scc contracts directed 3-cycles to looped points") {
    CloudState s0 = initial_state(corpus::directed_cycle(3), corpus::directed_cycle(3));
    ColorId arc = union_color(s0, {0, 1});
    DwlTrace budget;
    CloudState s1 = exec_scc(s0, arc, budget);
    CHECK(s1.structure.s.n == 2);
    CHECK(s1.structure.left_size == 1);
    const Relation* e = s1.structure.s.find("E");
    REQUIRE(e);
    CHECK(e->contains(0, 0));  // self-loop from the contracted cycle
    CHECK(e->contains(1, 1));
    // previous-state consequences: equal SCC sizes, count = |dom(P)| / size
    auto sccs = sccs_of_color(s0.history, arc);
    REQUIRE(sccs.size() == 2);
    CHECK(sccs[0].size() == sccs[1].size());
    CHECK(static_cast<long>(sccs.size()) * static_cast<long>(sccs[0].size()) == 6);
}

TEST_CASE("scc on the diagonal colour is a relabeling plus a marker") {
    CloudState s0 = initial_state(corpus::cycle(3), corpus::cycle(3));
    ColorId diag = union_color(s0, {0, 0});
    DwlTrace budget;
    CloudState s1 = exec_scc(s0, diag, budget);
    CHECK(s1.structure.s.n == 6);
    Structure left = s1.structure.extract(Side::Left);
    // dropping the fresh marker relation leaves a structure isomorphic to C3
    left.relations.erase(std::remove_if(left.relations.begin(), left.relations.end(),
                                        [](const Relation& r) { return r.name == "0"; }),
                         left.relations.end());
    CHECK(find_isomorphism(left, corpus::cycle(3)).has_value());
}

TEST_CASE("scc without components is refused") {
    CloudState s0 = initial_state(corpus::directed_path(3), corpus::directed_path(3));
    ColorId arc = union_color(s0, {0, 1});
    DwlTrace budget;
    CHECK_THROWS_WITH_AS(exec_scc(s0, arc, budget), doctest::Contains("NO_SCCS"), DomainError);
}

TEST_CASE("budgets are enforced") {
    CloudState s0 = initial_state(corpus::k(2), corpus::k(2));
    ColorId edge = union_color(s0, {0, 1});
    DwlTrace small;
    small.budget_vertices = 5;
    CHECK_THROWS_WITH_AS(exec_pair(s0, edge, small), doctest::Contains("BUDGET_EXCEEDED"),
                         DomainError);
    DwlTrace nosteps;
    nosteps.budget_steps = 0;
    CHECK_THROWS_WITH_AS(exec_pair(s0, edge, nosteps), doctest::Contains("BUDGET_EXCEEDED"),
                         DomainError);
}

TEST_CASE("run_trace outcomes") {
    DwlTrace empty;
    TraceRun pk = run_trace(corpus::prism(), corpus::k33(), empty);
    CHECK(pk.outcome == TraceOutcome::Distinguished);
    CHECK(pk.states.size() == 1);

    TraceRun c5 = run_trace(corpus::cycle(5), corpus::cycle(5), empty);
    CHECK(c5.outcome == TraceOutcome::NotDistinguished);

    // ops after the first divergence are not executed
    CloudState s0 = initial_state(corpus::prism(), corpus::k33());
    (void)s0;
    DwlTrace t;
    t.ops.push_back({OpKind::Pair, 0});
    TraceRun early = run_trace(corpus::prism(), corpus::k33(), t);
    CHECK(early.outcome == TraceOutcome::Distinguished);
    CHECK(early.ops_executed == 0);
}

TEST_CASE("twisted CFI over K4 is 2-WL equivalent but non-isomorphic") {
    auto [g, h] = cfi_pair(corpus::k(4), true, false);
    DwlTrace empty;
    TraceRun run = run_trace(g, h, empty);
    CHECK(run.outcome == TraceOutcome::NotDistinguished);
    CHECK(!find_isomorphism(g, h).has_value());
}

TEST_CASE("evolved cloud states still validate as coherent configurations") {
    std::mt19937 rng(107);
    DwlTrace budget;
    int done = 0;
    while (done < 10) {
        Structure a = corpus::random_connected(rng, 6, 2);
        Structure b = corpus::permute(a, rng);
        CloudState s0 = initial_state(a, b);
        const Layer& st = s0.history.stable();
        std::vector<std::pair<OpKind, ColorId>> cands;
        for (ColorId c = 0; c < st.num_colors; ++c) {
            if (st.is_cross[static_cast<size_t>(c)]) continue;
            auto cls = s0.history.color_class(c);
            if (static_cast<long>(cls.size()) > 20) continue;
            cands.push_back({OpKind::Pair, c});
            if (!sccs_of_relation(cls, s0.structure.s.n).empty())
                cands.push_back({OpKind::Scc, c});
        }
        if (cands.empty()) continue;
        auto [kind, color] = cands[std::uniform_int_distribution<size_t>(0, cands.size() - 1)(rng)];
        CloudState s1 = kind == OpKind::Pair ? exec_pair(s0, color, budget)
                                             : exec_scc(s0, color, budget);
        ValidationReport conf = validate_configuration(s1.history);
        CAPTURE(conf.to_string());
        CHECK(conf.all_pass());
        ValidationReport lay = validate_layers(s1.history);
        CAPTURE(lay.to_string());
        CHECK(lay.all_pass());
        ++done;
    }
}

TEST_CASE("operations commute with relabeling up to canonical sketches") {
    std::mt19937 rng(97);
    Structure a = corpus::cycle(6);
    Structure b = corpus::cycle(6);
    CloudState s0 = initial_state(a, b);
    ColorId edge = union_color(s0, {0, 1});
    DwlTrace budget;
    CloudState s1 = exec_pair(s0, edge, budget);

    Structure ap = corpus::permute(a, rng);
    Structure bp = corpus::permute(b, rng);
    CloudState t0 = initial_state(ap, bp);
    CloudState t1 = exec_pair(t0, edge, budget);
    CHECK(sketch(s0.history).serialize() == sketch(t0.history).serialize());
    CHECK(sketch(s1.history).serialize() == sketch(t1.history).serialize());
    CHECK(s1.sketch_left.serialize() == t1.sketch_left.serialize());

    // and for a contraction
    CloudState sd = exec_scc(s0, union_color(s0, {0, 0}), budget);
    CloudState td = exec_scc(t0, union_color(t0, {0, 0}), budget);
    CHECK(sketch(sd.history).serialize() == sketch(td.history).serialize());
}
