#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <set>

#include "fixtures.hpp"
#include "gogb/tree.hpp"

using namespace gogb;
using namespace gogb::tree;
using fixtures::hnn_ab;
using fixtures::random_loop;
using fixtures::two_tori;
using freegrp::canonical_end;
using freegrp::FreeBoundaryPoint;
using gog::compile;
using gog::GammaElement;
using gog::vertex_element;

namespace {

Word W(const std::string& s) { return Word::parse(s); }

// Independent derivation of an edge trace: the tree edge's subgroup fixes
// the end s * image^inf in the chart; collapsing that end must give the
// same parabolic class the trace reports.
void check_traces_against_collapse(const Compiled& c, const ClassAt& at) {
  for (const auto& ge : glue_edges(c, at)) {
    const int src = c.cross_source(ge.cross);
    const auto& st = c.source_status(ge.cross);
    const auto near = freegrp::canonicalize_point(
        c.group(src), FreeBoundaryPoint::from_end(canonical_end(ge.s, st.image)));
    REQUIRE(near.kind == FreeBoundaryPoint::Kind::ParabolicClass);
    CHECK(edge_trace(c, ge.s, ge.cross) == LocalClass{near.coset_rep, near.peripheral});

    const int tgt = c.cross_target(ge.cross);
    const auto& st2 = c.target_status(ge.cross);
    const auto far = freegrp::canonicalize_point(
        c.group(tgt), FreeBoundaryPoint::from_end(canonical_end(Word{}, st2.image)));
    REQUIRE(far.kind == FreeBoundaryPoint::Kind::ParabolicClass);
    CHECK(far_trace(c, ge.cross) == LocalClass{far.coset_rep, far.peripheral});
    CHECK(ge.other.cls == LocalClass{far.coset_rep, far.peripheral});
  }
}

ClassAt base_class(const Compiled& c) {
  return {base_vertex(c), LocalClass{Word{}, 0}};
}

std::set<PathForm> vert_set(const DomainView& d) {
  std::set<PathForm> out;
  for (const auto& ca : d.verts) out.insert(ca.vertex);
  return out;
}

}  // namespace

TEST_CASE("distances and geodesics in the tree") {
  const auto c = compile(two_tori(1, 1));
  const auto L = base_vertex(c);
  gog::Builder b(c);
  b.push_cross(0, +1);
  const auto R = b.path();
  b.push_word(W("a"));
  b.push_cross(0, -1);
  const auto L2 = b.path();
  CHECK(distance(L, L) == 0);
  CHECK(distance(L, R) == 1);
  CHECK(distance(L, L2) == 2);
  CHECK(distance(R, L2) == 1);
  CHECK(gromov(R, L2) == 1);
  const auto geo = geodesic(c, L, L2);
  REQUIRE(geo.size() == 3);
  CHECK(geo[0] == L);
  CHECK(geo[1] == R);
  CHECK(geo[2] == L2);
  const auto rev = geodesic(c, L2, L);
  CHECK(rev.front() == L2);
  CHECK(rev.back() == L);
}

TEST_CASE("the action on the tree is isometric") {
  const auto c = compile(two_tori(1, 2));
  Rng rng(99);
  for (int trial = 0; trial < 40; ++trial) {
    const auto g = random_loop(rng, c, 5);
    const auto u = random_loop(rng, c, 4).path();
    const auto v = random_loop(rng, c, 4).path();
    CHECK(distance(translate_vertex(c, g, u), translate_vertex(c, g, v)) == distance(u, v));
  }
}

TEST_CASE("edge traces match the collapsed ends of edge subgroups") {
  for (const auto& spec : {two_tori(1, 1), two_tori(2, 2), two_tori(1, 2), two_tori(1, 3)}) {
    const auto c = compile(spec);
    const auto dom = domain(c, base_class(c), {4, 256});
    for (const auto& ca : dom.verts) check_traces_against_collapse(c, ca);
  }
  const auto c = compile(hnn_ab());
  for (const auto& ca : domain(c, base_class(c), {4, 64}).verts)
    check_traces_against_collapse(c, ca);
}

TEST_CASE("domain shapes: equal index 1 gives a single edge") {
  const auto c = compile(two_tori(1, 1));
  const auto d = domain(c, base_class(c), {6, 256});
  CHECK(d.complete);
  CHECK(d.verts.size() == 2);
  CHECK(d.edges.size() == 1);
  CHECK(d.verts[0].vertex == base_vertex(c));
}

TEST_CASE("domain shapes: indices (1,2) give a three-vertex path") {
  const auto c = compile(two_tori(1, 2));
  const auto d = domain(c, base_class(c), {8, 256});
  CHECK(d.complete);
  CHECK(d.verts.size() == 3);
  CHECK(d.edges.size() == 2);
  // path: degrees 1,2,1
  std::map<int, int> deg;
  for (auto [a, b] : d.edges) {
    ++deg[a];
    ++deg[b];
  }
  int leaves = 0, mids = 0;
  for (auto [v, k] : deg) (k == 1 ? leaves : mids) += 1;
  CHECK(leaves == 2);
  CHECK(mids == 1);
}

TEST_CASE("domain shapes: indices (1,3) give a four-vertex star") {
  const auto c = compile(two_tori(1, 3));
  const auto d = domain(c, base_class(c), {8, 256});
  CHECK(d.complete);
  CHECK(d.verts.size() == 4);
  CHECK(d.edges.size() == 3);
  std::map<int, int> deg;
  for (auto [a, b] : d.edges) {
    ++deg[a];
    ++deg[b];
  }
  int three = 0, one = 0;
  for (auto [v, k] : deg) {
    if (k == 3) ++three;
    if (k == 1) ++one;
  }
  CHECK(three == 1);
  CHECK(one == 3);
}

TEST_CASE("domain shapes: indices (2,2) give a line growing as 2r+1") {
  const auto c = compile(two_tori(2, 2));
  for (int r = 1; r <= 4; ++r) {
    const auto d = domain(c, base_class(c), {r, 4096});
    CHECK(!d.complete);
    CHECK(static_cast<int>(d.verts.size()) == 2 * r + 1);
    CHECK(d.edges.size() == d.verts.size() - 1);
    std::map<int, int> deg;
    for (auto [a, b] : d.edges) {
      ++deg[a];
      ++deg[b];
    }
    for (auto [v, k] : deg) CHECK(k <= 2);
  }
}

TEST_CASE("domain shapes: HNN conjugation glues two charts") {
  const auto c = compile(hnn_ab());
  const auto d = domain(c, base_class(c), {6, 64});
  CHECK(d.complete);
  CHECK(d.verts.size() == 2);
  // the far chart sees the class of the other peripheral
  CHECK(d.verts[1].cls.peripheral == 1);

  const auto c2 = compile(hnn_ab(1, 2));
  const auto d2 = domain(c2, base_class(c2), {6, 64});
  CHECK(d2.complete);
  CHECK(d2.verts.size() == 3);
}

TEST_CASE("minimal vertex is found from anywhere in the domain") {
  const auto c = compile(two_tori(1, 2));
  const auto d = domain(c, base_class(c), {8, 256});
  REQUIRE(d.verts.size() == 3);
  for (const auto& ca : d.verts) {
    const auto m = minimize_class(c, ca);
    CHECK(m.vertex == base_vertex(c));
    CHECK(m.cls == LocalClass{Word{}, 0});
  }
}

TEST_CASE("exact domain membership agrees with the enumerated domain") {
  const auto c = compile(two_tori(2, 2));
  const auto seed = base_class(c);
  const auto d = domain(c, seed, {3, 256});
  std::map<PathForm, LocalClass> expected;
  for (const auto& ca : d.verts) expected.emplace(ca.vertex, ca.cls);
  for (const auto& [v, cls] : expected) {
    const auto got = in_domain(c, seed, v);
    REQUIRE(got.has_value());
    CHECK(*got == cls);
  }
  // vertices outside the domain are rejected
  const auto ball = tree_ball(c, base_vertex(c), {2, 2, 4096});
  int outside = 0;
  for (const auto& v : ball.verts)
    if (!expected.count(v)) {
      CHECK(!in_domain(c, seed, v).has_value());
      ++outside;
    }
  CHECK(outside > 0);
}

TEST_CASE("the point stabilizer preserves its domain") {
  const auto c = compile(two_tori(2, 2));
  const auto d = domain(c, base_class(c), {4, 256});
  const auto verts = vert_set(d);
  const auto q = vertex_element(c, 0, W("abAB"));
  const auto r = vertex_element(c, 1, W("abAB"));
  gog::Builder to_r(c);
  to_r.push_cross(0, +1);
  const auto R_vertex = to_r.path();
  for (const auto& ca : d.verts) {
    // q reflects about the base and r about R: translate only what is
    // certain to land back inside the enumerated radius-4 window.
    if (distance(ca.vertex, base_vertex(c)) <= 3)
      CHECK(verts.count(translate_vertex(c, q, ca.vertex)) == 1);
    if (distance(ca.vertex, R_vertex) <= 3)
      CHECK(verts.count(translate_vertex(c, r, ca.vertex)) == 1);
    // the edge subgroup fixes the whole domain pointwise
    const auto q2 = gog::gpow(c, q, 2);
    CHECK(translate_vertex(c, q2, ca.vertex) == ca.vertex);
  }
  // q reflects the line about the base: it swaps the two branch directions
  gog::Builder b(c);
  b.push_cross(0, +1);
  const auto R = b.path();
  const auto qR = translate_vertex(c, q, R);
  CHECK(qR != R);
  CHECK(distance(qR, base_vertex(c)) == 1);
  CHECK(verts.count(qR) == 1);
}

TEST_CASE("truncated tree balls enumerate coset children") {
  const auto c = compile(two_tori(1, 1));
  const auto ball = tree_ball(c, base_vertex(c), {1, 2, 4096});
  // rank-2 transversal of <[a,b]> up to length 2 has 16 reps (BA is not
  // canonical: BA [a,b] == AB is shortlex-smaller), so the radius-1 ball
  // holds the center plus 16 children.
  CHECK(ball.verts.size() == 17);
  CHECK(ball.edges.size() == 16);
  CHECK(!ball.vertex_limit_hit);
  CHECK(ball.depth[0] == 0);
  for (std::size_t i = 1; i < ball.depth.size(); ++i) CHECK(ball.depth[i] == 1);

  const auto transversal = coset_transversal(c, 0, W("abAB"), 2);
  CHECK(transversal.size() == 16);
  std::set<std::vector<freegrp::Letter>> reps;
  for (const auto& s : transversal) reps.insert(s.letters());
  CHECK(reps.count(W("BA").letters()) == 0);
  CHECK(reps.count(W("AB").letters()) == 1);
}

TEST_CASE("ball growth respects the vertex budget") {
  const auto c = compile(two_tori(2, 2));
  const auto ball = tree_ball(c, base_vertex(c), {3, 2, 40});
  CHECK(ball.vertex_limit_hit);
  CHECK(ball.verts.size() <= 40);
}
