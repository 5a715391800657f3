#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "gogb/boundary.hpp"

using namespace gogb;
using namespace gogb::boundary;
using fixtures::hnn_ab;
using fixtures::lone_torus;
using fixtures::two_tori;
using gog::Compiled;
using gog::compile;
using gog::gid;
using gog::ginv;
using gog::gmul;
using gog::gpow;
using gog::stable_letter;
using gog::vertex_element;
using tree::back_edge_trace;
using tree::base_vertex;
using tree::gromov;

namespace {

Word W(const std::string& s) { return Word::parse(s); }

PeriodicEndForm E(const std::string& prefix, const std::string& period) {
  return freegrp::canonical_end(W(prefix), W(period));
}

// Chart point u * p^inf at a tree vertex.
BoundaryPoint chart_end(const Compiled& c, const gog::PathForm& at, const std::string& prefix,
                        const std::string& period) {
  return glue_class(c, at, FreeBoundaryPoint::from_end(E(prefix, period)));
}

// The child of `from` across the tree edge with coset rep s.
gog::PathForm child_of(const Compiled& c, const gog::PathForm& from, const std::string& rep,
                       gog::Cross x) {
  gog::PathForm p = from;
  p.steps.push_back({W(rep), x});
  p.end_vertex = c.cross_target(x);
  return p;
}

// In the two-torus gluings: the left-to-right crossing of the single edge.
const gog::Cross kLR{0, +1};

// ab * e * b * e^-1: loxodromic, axis through the depth-2 cylinder "ab".
GammaElement lox_ab(const Compiled& c) {
  return gmul(c, vertex_element(c, 0, W("ab")), vertex_element(c, 1, W("b")));
}
// a * e * b * e^-1: loxodromic through the cylinder "a" \ "ab".
GammaElement lox_a(const Compiled& c) {
  return gmul(c, vertex_element(c, 0, W("a")), vertex_element(c, 1, W("b")));
}
// In two_tori(2,2): the product of the near peripheral loops at both ends of
// the glued edge; it translates the (bi-infinite) shared domain line by 2.
GammaElement line_shift(const Compiled& c) {
  return gmul(c, vertex_element(c, 1, W("abAB")), vertex_element(c, 0, W("abAB")));
}

NeighborhoodSpec chart_spec(const gog::PathForm& at, const std::vector<std::string>& inc,
                            const std::vector<std::string>& exc = {}) {
  ChartOpen u;
  u.at = at;
  for (const auto& s : inc) u.include.push_back(W(s));
  for (const auto& s : exc) u.exclude.push_back(W(s));
  NeighborhoodSpec w;
  w.kind = NeighborhoodSpec::Kind::Chart;
  w.support = {u};
  w.m = 0;
  return w;
}

}  // namespace

TEST_CASE("chart opens admit saturated cylinder data") {
  const auto g = fixtures::torus_group();
  ChartOpen u;
  u.at = {};
  u.include = {W("ab"), W("ba")};

  // All directions must extend an include word.
  CHECK(open_contains(g, u, {E("", "ab")}));
  CHECK(open_contains(g, u, {E("abAB", "ab")}));  // prefix abab...
  CHECK(!open_contains(g, u, {E("", "a")}));
  CHECK(open_contains(g, u, {E("", "abAB"), E("", "baBA")}));
  CHECK(!open_contains(g, u, {E("a", "abAB"), E("a", "baBA")}));  // prefix aa...

  // Exclusions knock out otherwise admitted data.
  u.exclude = {W("abAB")};
  CHECK(open_contains(g, u, {E("", "ab")}));
  CHECK(!open_contains(g, u, {E("", "abAB"), E("", "baBA")}));

  // Empty include admits everything not excluded.
  ChartOpen all;
  all.at = {};
  CHECK(open_contains(g, all, {E("", "Ba")}));
  all.exclude = {W("B")};
  CHECK(!open_contains(g, all, {E("", "Ba")}));
}

TEST_CASE("subtree selection matches brute-force first-edge scan") {
  const auto c = compile(two_tori(1, 2));
  const auto base = base_vertex(c);

  // Oracle: w lies in the selected subtree iff the first edge of [at, w]
  // carries a class inside U. Enumerate a radius-3 ball and check both
  // prongs against the trace tables directly.
  const auto check_against = [&](const ChartOpen& u) {
    const auto ball = tree::tree_ball(c, base, {3, 2, 4000});
    REQUIRE(ball.verts.size() > 10);
    for (const auto& w : ball.verts) {
      const Verdict got = subtree_contains(c, u, w);
      bool expect;
      if (w == u.at) {
        expect = true;
      } else {
        // First edge of [u.at, w]: forward step when w extends u.at, else
        // the edge from u.at towards the base.
        tree::LocalClass t;
        if (gromov(u.at, w) == u.at.length() && w.length() > u.at.length()) {
          t = tree::edge_trace(c, w.steps[u.at.length()].rep, w.steps[u.at.length()].cross);
        } else {
          t = back_edge_trace(c, u.at);
        }
        const auto& grp = c.group(u.at.end_vertex);
        const auto dirs =
            freegrp::directions(grp, FreeBoundaryPoint::parabolic(t.rep, t.peripheral));
        expect = open_contains(grp, u, dirs);
      }
      CHECK(got == (expect ? Verdict::True : Verdict::False));
    }
  };

  ChartOpen u;
  u.at = base;
  u.include = {W("ab"), W("ba")};
  check_against(u);
  u.include = {W("a")};
  check_against(u);
  u.include.clear();
  u.exclude = {W("b"), W("B")};
  check_against(u);

  // Same scan from a non-base vertex: routes towards the base matter too.
  u.at = child_of(c, base, "1", kLR);
  u.exclude.clear();
  u.include = {W("ab"), W("ba")};
  check_against(u);
}

TEST_CASE("translation steps and ray prefixes") {
  const auto c = compile(two_tori(1, 1));
  CHECK(translation_steps(c, gid(c, 0)) == 0);
  CHECK(translation_steps(c, vertex_element(c, 0, W("abAB"))) == 0);
  CHECK(translation_steps(c, vertex_element(c, 1, W("ba"))) == 0);

  const auto g = lox_ab(c);
  CHECK(translation_steps(c, g) == 2);
  CHECK(translation_steps(c, ginv(c, g)) == 2);
  CHECK(translation_steps(c, gpow(c, g, 3)) == 6);

  const auto c22 = compile(two_tori(2, 2));
  CHECK(translation_steps(c22, line_shift(c22)) == 2);

  const auto ch = compile(hnn_ab());
  CHECK(translation_steps(ch, stable_letter(ch, 0)) == 1);

  // Ray prefixes are coherent and eventually agree with high powers.
  const auto xi = glue_class(c, gid(c, 0), g);
  REQUIRE(xi.kind == BoundaryPoint::Kind::TreeEnd);
  const auto r4 = ray_path(c, xi, 4);
  const auto r7 = ray_path(c, xi, 7);
  CHECK(r4.length() == 4);
  CHECK(r7.length() == 7);
  CHECK(gromov(r4, r7) == 4);
  const auto big = gpow(c, g, 8).path();
  CHECK(gromov(r7, big) >= 7);
  CHECK(path_prefix(c, big, 7) == r7);
  CHECK(r7.steps[0].rep == W("ab"));
}

TEST_CASE("gluing folds parabolic data and identified rays") {
  const auto c = compile(two_tori(1, 1));
  const auto base = base_vertex(c);
  const auto rchild = child_of(c, base, "1", kLR);

  // An ordinary end stays a chart point; a peripheral-period end folds.
  const auto p1 = chart_end(c, base, "", "ab");
  CHECK(p1.kind == BoundaryPoint::Kind::VertexPoint);
  const auto p2 = chart_end(c, base, "a", "abAB");
  CHECK(p2.kind == BoundaryPoint::Kind::EdgeParabolic);

  // The glued edge class looks the same from both endpoints.
  const auto from_l = glue_class(c, tree::ClassAt{base, {Word(), 0}});
  const auto from_r = glue_class(c, tree::ClassAt{rchild, {Word(), 0}});
  CHECK(from_l.kind == BoundaryPoint::Kind::EdgeParabolic);
  CHECK(equal(c, from_l, from_r));
  CHECK(from_l.cls.vertex == base);
  CHECK(equal(c, p2, glue_class(c, tree::ClassAt{base, {W("a"), 0}})));
  CHECK(!equal(c, p2, from_l));

  // Loxodromic rays in the amalgam with simple edge powers are genuine ends,
  // and the presentation of the ray does not matter.
  const auto g = lox_ab(c);
  const auto xi = glue_class(c, gid(c, 0), g);
  REQUIRE(xi.kind == BoundaryPoint::Kind::TreeEnd);
  CHECK(equal(c, xi, glue_class(c, g, g)));
  CHECK(equal(c, xi, glue_class(c, gid(c, 0), gpow(c, g, 2))));
  CHECK(equal(c, xi, glue_class(c, g, gpow(c, g, 3))));
  CHECK(!equal(c, xi, glue_class(c, gid(c, 0), ginv(c, g))));
  CHECK(!equal(c, xi, glue_class(c, gid(c, 0), lox_a(c))));
  CHECK(!equal(c, xi, from_l));

  // The stable letter of the conjugating loop is likewise genuine.
  const auto ch = compile(hnn_ab());
  const auto tau = stable_letter(ch, 0);
  CHECK(glue_class(ch, gid(ch, 0), tau).kind == BoundaryPoint::Kind::TreeEnd);

  // With index 2 on both sides the edge-class domain is a line, and the
  // element shifting the line has its whole ray inside one domain: the ray
  // is the parabolic point, not a tree end.
  const auto c22 = compile(two_tori(2, 2));
  const auto delta = line_shift(c22);
  const auto folded = glue_class(c22, gid(c22, 0), delta);
  CHECK(folded.kind == BoundaryPoint::Kind::EdgeParabolic);
  CHECK(equal(c22, folded, glue_class(c22, tree::ClassAt{base_vertex(c22), {Word(), 0}})));
  CHECK(equal(c22, folded, glue_class(c22, gid(c22, 0), ginv(c22, delta))));

  // Conjugating the shift off the line gives the translated class.
  const auto a0 = vertex_element(c22, 0, W("a"));
  const auto conj = gmul(c22, a0, gmul(c22, delta, ginv(c22, a0)));
  const auto folded2 = glue_class(c22, gid(c22, 0), conj);
  CHECK(folded2.kind == BoundaryPoint::Kind::EdgeParabolic);
  CHECK(equal(c22, folded2, glue_class(c22, tree::ClassAt{base_vertex(c22), {W("a"), 0}})));
  CHECK(!equal(c22, folded2, folded));

  // Elliptic periods cannot define a ray.
  CHECK_THROWS_AS((void)glue_class(c, gid(c, 0), vertex_element(c, 0, W("a"))),
                  std::invalid_argument);

  // Stubs compare only as recorded paths.
  const auto s1 = ray_stub(c, ray_path(c, xi, 4));
  const auto s2 = ray_stub(c, ray_path(c, xi, 4));
  const auto s3 = ray_stub(c, ray_path(c, xi, 5));
  CHECK(s1.kind == BoundaryPoint::Kind::TreeEnd);
  CHECK(!s1.exact);
  CHECK(equal(c, s1, s2));
  CHECK(!equal(c, s1, s3));
  CHECK(!equal(c, s1, xi));
}

TEST_CASE("membership clauses are exclusive and match hand computations") {
  const auto c = compile(two_tori(1, 1));
  const auto base = base_vertex(c);
  const auto rchild = child_of(c, base, "1", kLR);

  const auto p_ab = chart_end(c, base, "", "ab");
  const auto w2 = basic_nbhd(c, p_ab, 2);
  REQUIRE(w2.kind == NeighborhoodSpec::Kind::Chart);
  REQUIRE(w2.support.size() == 1);
  CHECK(w2.support[0].at == base);
  REQUIRE(w2.support[0].include.size() == 1);
  CHECK(w2.support[0].include[0] == W("ab"));

  // Center containment is the chart clause.
  const auto self = in_neighborhood_ex(c, p_ab, w2);
  CHECK(self.verdict == Verdict::True);
  CHECK(self.clause == Clause::ChartC);

  // A chart point of the far vertex is gated by the connecting edge's trace:
  // directions ab... and ba..., so the depth-2 include {ab} rejects it.
  const auto q_r = chart_end(c, rchild, "", "ab");
  const auto mr = in_neighborhood_ex(c, q_r, w2);
  CHECK(mr.verdict == Verdict::False);
  CHECK(mr.clause == Clause::DisjointB);

  // Widening the include to the full saturation admits the far subtree.
  const auto w_sat = chart_spec(base, {"ab", "ba"});
  const auto mr2 = in_neighborhood_ex(c, q_r, w_sat);
  CHECK(mr2.verdict == Verdict::True);
  CHECK(mr2.clause == Clause::DisjointB);

  // ...but not the subtree behind the a-rep edge (directions aa/ab).
  const auto q_a = chart_end(c, child_of(c, base, "a", kLR), "", "b");
  const auto ma = in_neighborhood_ex(c, q_a, w_sat);
  CHECK(ma.verdict == Verdict::False);
  CHECK(ma.clause == Clause::DisjointB);

  // A parabolic point visible at a support vertex is decided in-chart.
  const auto x_e = glue_class(c, tree::ClassAt{base, {Word(), 0}});
  const auto mx = in_neighborhood_ex(c, x_e, w_sat);
  CHECK(mx.verdict == Verdict::True);
  CHECK(mx.clause == Clause::ChartC);
  CHECK(in_neighborhood(c, x_e, w2) == Verdict::False);
  CHECK(in_neighborhood_ex(c, x_e, w2).clause == Clause::ChartC);

  // Tree ends go through the ends clause, gated by their first edges.
  const auto xi_ab = glue_class(c, gid(c, 0), lox_ab(c));
  const auto xa = in_neighborhood_ex(c, xi_ab, w2);
  CHECK(xa.verdict == Verdict::True);
  CHECK(xa.clause == Clause::EndsA);
  const auto xi_a = glue_class(c, gid(c, 0), lox_a(c));
  const auto xb = in_neighborhood_ex(c, xi_a, w2);
  CHECK(xb.verdict == Verdict::False);
  CHECK(xb.clause == Clause::EndsA);

  // Two-vertex support around the glued class: the ends clause checks the
  // gate at each support vertex (back edges towards the base included).
  const auto w2x = basic_nbhd(c, x_e, 2);
  REQUIRE(w2x.support.size() == 2);
  const auto xab2 = in_neighborhood_ex(c, xi_ab, w2x);
  CHECK(xab2.verdict == Verdict::True);
  CHECK(xab2.clause == Clause::EndsA);

  // A chart point at the far support vertex is in-chart there.
  const auto q_far = chart_end(c, rchild, "", "a");
  const auto mf = in_neighborhood_ex(c, q_far, w2x);
  CHECK(mf.verdict == Verdict::False);
  CHECK(mf.clause == Clause::ChartC);

  // A parabolic sharing only the base with the support is decided at the
  // shared vertex, even though its domain leaves the support.
  const auto y = glue_class(c, tree::ClassAt{base, {W("a"), 0}});
  const auto my = in_neighborhood_ex(c, y, w2x);
  CHECK(my.verdict == Verdict::False);
  CHECK(my.clause == Clause::ChartC);
}

TEST_CASE("branch neighborhoods capture positions past the cut") {
  const auto c = compile(two_tori(1, 1));
  const auto base = base_vertex(c);
  const auto xi = glue_class(c, gid(c, 0), lox_ab(c));

  const auto w = basic_nbhd(c, xi, 2);
  REQUIRE(w.kind == NeighborhoodSpec::Kind::Branch);
  CHECK(w.m == 2);
  CHECK(w.branch == ray_path(c, xi, 3));

  CHECK(in_neighborhood(c, xi, w) == Verdict::True);
  CHECK(in_neighborhood_ex(c, xi, w).clause == Clause::EndsA);

  // Chart points in and out of the hanging subtree.
  const auto v4 = ray_path(c, xi, 4);
  CHECK(in_neighborhood(c, chart_end(c, v4, "", "ba"), w) == Verdict::True);
  CHECK(in_neighborhood(c, chart_end(c, base, "", "ab"), w) == Verdict::False);

  // Parabolic positions use the minimal domain vertex: the class of the cut
  // edge itself reaches one vertex above the cut and is excluded.
  const auto cut_cls = edge_class_point(c, ray_path(c, xi, 3));
  CHECK(in_neighborhood(c, cut_cls, w) == Verdict::False);
  const auto deep_cls = edge_class_point(c, ray_path(c, xi, 4));
  CHECK(in_neighborhood(c, deep_cls, w) == Verdict::True);

  // The other loxodromic ray splits off at the first step.
  CHECK(in_neighborhood(c, glue_class(c, gid(c, 0), lox_a(c)), w) == Verdict::False);

  // Stubs: decided exactly when the recorded prefix decides.
  CHECK(in_neighborhood(c, ray_stub(c, v4), w) == Verdict::True);
  CHECK(in_neighborhood(c, ray_stub(c, ray_path(c, xi, 2)), w) == Verdict::Undecided);
  const auto other = gpow(c, lox_a(c), 3).path();
  CHECK(in_neighborhood(c, ray_stub(c, path_prefix(c, other, 4)), w) == Verdict::False);
}

TEST_CASE("every point is inside its own neighborhood ladder") {
  for (const auto& spec : {two_tori(1, 1), two_tori(1, 2), two_tori(2, 2)}) {
    const auto c = compile(spec);
    std::vector<GammaElement> axes = {lox_ab(c), lox_a(c)};
    const auto pts = sample_points(c, {2, 2, 3, 2, 2, 40, 7}, axes);
    REQUIRE(pts.size() >= 20u);
    for (const auto& p : pts) {
      for (int m = 1; m <= 3; ++m) {
        if (p.kind == BoundaryPoint::Kind::TreeEnd && !p.exact &&
            p.approx.length() < m + 1)
          continue;
        const auto mem = in_neighborhood_ex(c, p, basic_nbhd(c, p, m));
        CHECK(mem.verdict == Verdict::True);
        if (p.kind == BoundaryPoint::Kind::TreeEnd)
          CHECK(mem.clause == Clause::EndsA);
        else
          CHECK(mem.clause == Clause::ChartC);
      }
    }
  }
}

TEST_CASE("neighborhood ladders are nested") {
  const auto c = compile(two_tori(1, 2));
  std::vector<GammaElement> axes = {lox_ab(c), lox_a(c)};
  const auto pts = sample_points(c, {2, 2, 3, 2, 2, 36, 11}, axes);
  int checked = 0;
  for (const auto& p : pts) {
    if (p.kind == BoundaryPoint::Kind::TreeEnd && !p.exact) continue;
    for (int m = 1; m <= 2; ++m) {
      const auto wide = basic_nbhd(c, p, m);
      const auto tight = basic_nbhd(c, p, m + 1);
      for (const auto& z : pts) {
        if (in_neighborhood(c, z, tight) == Verdict::True) {
          CHECK(in_neighborhood(c, z, wide) == Verdict::True);
          ++checked;
        }
      }
    }
  }
  CHECK(checked > 50);
}

TEST_CASE("avoiding an edge class") {
  const auto c = compile(two_tori(1, 1));
  const auto base = base_vertex(c);
  const auto rchild = child_of(c, base, "1", kLR);
  const auto q_e = edge_class_point(c, rchild);

  // A chart end, a parabolic, and a tree end all get separating data.
  const auto p1 = chart_end(c, base, "", "ab");
  const auto w1 = avoid_edge(c, p1, rchild);
  CHECK(in_neighborhood(c, p1, w1) == Verdict::True);
  CHECK(in_neighborhood(c, q_e, w1) == Verdict::False);

  const auto p2 = glue_class(c, tree::ClassAt{base, {W("a"), 0}});
  const auto w2 = avoid_edge(c, p2, rchild);
  CHECK(in_neighborhood(c, p2, w2) == Verdict::True);
  CHECK(in_neighborhood(c, q_e, w2) == Verdict::False);

  const auto xi = glue_class(c, gid(c, 0), lox_ab(c));
  const auto w3 = avoid_edge(c, xi, rchild);
  CHECK(in_neighborhood(c, xi, w3) == Verdict::True);
  CHECK(in_neighborhood(c, q_e, w3) == Verdict::False);

  // The edge on the ray itself can also be avoided: the branch moves past
  // the extent of the edge class's domain.
  const auto on_ray = ray_path(c, xi, 2);
  const auto w4 = avoid_edge(c, xi, on_ray);
  CHECK(in_neighborhood(c, xi, w4) == Verdict::True);
  CHECK(in_neighborhood(c, edge_class_point(c, on_ray), w4) == Verdict::False);

  // Avoiding your own edge is meaningless.
  CHECK_THROWS_AS((void)avoid_edge(c, q_e, rchild), std::invalid_argument);

  // Sweep: every sampled point distinct from the class certifies.
  std::vector<GammaElement> axes = {lox_ab(c), lox_a(c)};
  const auto pts = sample_points(c, {2, 2, 3, 2, 2, 30, 3}, axes);
  const auto ball = tree::tree_ball(c, base, {2, 1, 500});
  int swept = 0;
  for (const auto& child : ball.verts) {
    if (child.length() == 0) continue;
    const auto qc = edge_class_point(c, child);
    for (const auto& p : pts) {
      if (equal(c, p, qc)) continue;
      if (p.kind == BoundaryPoint::Kind::TreeEnd && !p.exact) continue;
      const auto w = avoid_edge(c, p, child);
      CHECK(in_neighborhood(c, p, w) == Verdict::True);
      CHECK(in_neighborhood(c, qc, w) == Verdict::False);
      ++swept;
    }
  }
  CHECK(swept > 40);
}

TEST_CASE("separating distinct points") {
  const auto c = compile(two_tori(1, 1));
  const auto base = base_vertex(c);

  const auto p_end = chart_end(c, base, "", "ab");
  const auto x_e = glue_class(c, tree::ClassAt{base, {Word(), 0}});
  const auto xi = glue_class(c, gid(c, 0), lox_ab(c));

  CertifyParams params;
  params.sample.count = 40;
  params.sample.seed = 5;

  for (const auto& [p, q] : std::vector<std::pair<BoundaryPoint, BoundaryPoint>>{
           {p_end, x_e}, {p_end, xi}, {x_e, xi}}) {
    const auto s = separate(c, p, q, params);
    REQUIRE(s.certified == Verdict::True);
    CHECK(in_neighborhood(c, p, s.left) == Verdict::True);
    CHECK(in_neighborhood(c, q, s.right) == Verdict::True);
    CHECK(in_neighborhood(c, q, s.left) != Verdict::True);
    CHECK(in_neighborhood(c, p, s.right) != Verdict::True);
  }

  // Close pairs force the ladder deeper but still certify.
  const auto deep1 = chart_end(c, base, "ababab", "b");
  const auto deep2 = chart_end(c, base, "ababab", "Ba");
  const auto s = separate(c, deep1, deep2, params);
  CHECK(s.certified == Verdict::True);
  CHECK(s.m >= 3);

  // Sweep over sampled pairs: no false positives, overwhelming certification.
  std::vector<GammaElement> axes = {lox_ab(c), lox_a(c)};
  const auto pts = sample_points(c, {2, 2, 3, 2, 2, 26, 13}, axes);
  int pairs = 0;
  for (size_t i = 0; i < pts.size(); ++i) {
    for (size_t j = i + 1; j < pts.size() && pairs < 160; ++j) {
      if (equal(c, pts[i], pts[j])) continue;
      if (pts[i].kind == BoundaryPoint::Kind::TreeEnd && !pts[i].exact) continue;
      if (pts[j].kind == BoundaryPoint::Kind::TreeEnd && !pts[j].exact) continue;
      const auto r = separate(c, pts[i], pts[j], params);
      CHECK(r.certified == Verdict::True);
      ++pairs;
    }
  }
  CHECK(pairs >= 100);
}

TEST_CASE("filtration refines a given neighborhood") {
  const auto c = compile(two_tori(1, 1));
  const auto base = base_vertex(c);
  CertifyParams params;
  params.sample.count = 36;
  params.sample.seed = 17;

  // Around the same center the ladder refines structurally.
  const auto p = chart_end(c, base, "", "ab");
  const auto outer = basic_nbhd(c, p, 2);
  const auto f = filtration(c, outer, p, params);
  CHECK(f.certified == Verdict::True);
  CHECK(f.m > 2);
  CHECK(in_neighborhood(c, p, f.inner) == Verdict::True);

  // A nearby end inside the outer set gets its own smaller chart data.
  const auto q = chart_end(c, base, "ababa", "B");
  REQUIRE(in_neighborhood(c, q, outer) == Verdict::True);
  const auto f2 = filtration(c, outer, q, params);
  CHECK(f2.certified == Verdict::True);
  CHECK(in_neighborhood(c, q, f2.inner) == Verdict::True);

  // Branch case: a tree end inside a branch neighborhood.
  const auto xi = glue_class(c, gid(c, 0), lox_ab(c));
  const auto wb = basic_nbhd(c, xi, 2);
  const auto f3 = filtration(c, wb, xi, params);
  CHECK(f3.certified == Verdict::True);

  // The class of a deep ray edge lies inside the branch set as well.
  const auto deep_cls = edge_class_point(c, ray_path(c, xi, 5));
  REQUIRE(in_neighborhood(c, deep_cls, wb) == Verdict::True);
  const auto f4 = filtration(c, wb, deep_cls, params);
  CHECK(f4.certified == Verdict::True);
  CHECK(in_neighborhood(c, deep_cls, f4.inner) == Verdict::True);

  // Points outside are refused.
  CHECK_THROWS_AS((void)filtration(c, wb, chart_end(c, base, "", "ab"), params),
                  std::invalid_argument);
}

TEST_CASE("closure gaps between ladder levels") {
  CertifyParams params;
  params.sample.count = 36;
  params.sample.seed = 23;

  // Chart point whose periodic tail stays clear of the peripheral: the next
  // level suffices.
  const auto c = compile(two_tori(1, 1));
  const auto base = base_vertex(c);
  const auto p = chart_end(c, base, "", "a");
  const auto g1 = closure_gap(c, p, 2, params);
  CHECK(g1.n == 3);
  CHECK(g1.certified == Verdict::True);

  // (ab)^inf grazes the peripheral once: the class with representative "a"
  // has one direction inside cyl(aba) but its partner leaves cyl(ab), so
  // level 3 is not enough.
  const auto pab = chart_end(c, base, "", "ab");
  const auto g1b = closure_gap(c, pab, 2, params);
  CHECK(g1b.n == 4);
  CHECK(g1b.certified == Verdict::True);

  // A tail grazing the peripheral axis admits marginal classes: one
  // direction enters the deeper cylinder while the other leaves the shallow
  // one, so the gap must widen.
  const auto cl = compile(lone_torus());
  const auto pg = chart_end(cl, base_vertex(cl), "", "aab");
  const auto g2 = closure_gap(cl, pg, 2, params);
  CHECK(g2.n == 4);
  CHECK(g2.certified == Verdict::True);

  // Tree ends: the cut must advance at least two levels, far enough that
  // the frontier edge class falls inside the outer branch set.
  const auto xi = glue_class(c, gid(c, 0), lox_ab(c));
  const auto g3 = closure_gap(c, xi, 2, params);
  CHECK(g3.n >= 4);
  REQUIRE(g3.inner.kind == NeighborhoodSpec::Kind::Branch);
  const auto frontier = edge_class_point(c, ray_path(c, xi, g3.n + 1));
  CHECK(in_neighborhood(c, frontier, basic_nbhd(c, xi, 2)) == Verdict::True);
  CHECK(g3.certified == Verdict::True);

  // Parabolic with an infinite domain line.
  const auto c22 = compile(two_tori(2, 2));
  const auto x22 = glue_class(c22, tree::ClassAt{base_vertex(c22), {Word(), 0}});
  const auto g4 = closure_gap(c22, x22, 2, params);
  CHECK(g4.n > 2);
  CHECK(g4.certified == Verdict::True);
}

TEST_CASE("convergence of point sequences") {
  const auto c = compile(two_tori(1, 1));
  const auto base = base_vertex(c);
  const auto xi = glue_class(c, gid(c, 0), lox_ab(c));

  // Constant sequences converge immediately.
  std::vector<BoundaryPoint> cst(6, xi);
  const auto r0 = converges(c, cst, xi);
  CHECK(r0.verdict == Verdict::True);
  for (const auto& lvl : r0.levels) CHECK(lvl.tail_start == 0);

  // Chart points marching down the axis converge to the end.
  std::vector<BoundaryPoint> march;
  for (int n = 1; n <= 9; ++n) march.push_back(chart_end(c, ray_path(c, xi, n), "", "ab"));
  const auto r1 = converges(c, march, xi);
  CHECK(r1.verdict == Verdict::True);

  // ...but not to a different end, nor does a far constant sequence.
  CHECK(converges(c, march, glue_class(c, gid(c, 0), lox_a(c))).verdict == Verdict::False);
  std::vector<BoundaryPoint> far(6, chart_end(c, base, "", "ba"));
  CHECK(converges(c, far, xi).verdict == Verdict::False);

  // Translates of a neighboring class marching along an infinite domain
  // line converge to the line's class, not to a tree end.
  const auto c22 = compile(two_tori(2, 2));
  const auto delta = line_shift(c22);
  const auto x22 = glue_class(c22, tree::ClassAt{base_vertex(c22), {Word(), 0}});
  std::vector<BoundaryPoint> off_line;
  const auto a_child = child_of(c22, base_vertex(c22), "a", kLR);
  for (int n = 0; n < 8; ++n)
    off_line.push_back(
        edge_class_point(c22, gog::translate_vertex(c22, gpow(c22, delta, n), a_child)));
  CHECK(off_line[0].kind == BoundaryPoint::Kind::EdgeParabolic);
  const auto r2 = converges(c22, off_line, x22, 3);
  CHECK(r2.verdict == Verdict::True);
}

TEST_CASE("accumulation points of sequences") {
  const auto c = compile(two_tori(1, 1));
  const auto base = base_vertex(c);

  // In-chart accumulation: deepening prefixes pick out the end a^inf.
  std::vector<BoundaryPoint> seq;
  for (int k = 1; k <= 9; ++k)
    seq.push_back(chart_end(c, base, W("a").str() + std::string(k - 1, 'a'), "b"));
  auto acc = accumulation_point(c, seq);
  REQUIRE(acc.ok);
  CHECK(acc.limit.kind == BoundaryPoint::Kind::VertexPoint);
  CHECK(equal(c, acc.limit, chart_end(c, base, "", "a")));
  CHECK(acc.indices.size() >= 3u);

  // Distinct edges at a pivot: the departing traces accumulate in-chart.
  std::vector<BoundaryPoint> spread;
  for (int k = 1; k <= 8; ++k) {
    const auto child = child_of(c, base, std::string(k, 'a'), kLR);
    spread.push_back(chart_end(c, child, "", "b"));
  }
  acc = accumulation_point(c, spread);
  REQUIRE(acc.ok);
  CHECK(acc.limit.kind == BoundaryPoint::Kind::VertexPoint);
  CHECK(equal(c, acc.limit, chart_end(c, base, "", "a")));

  // Escaping along an axis: the subsequence recovers the exact tree end.
  const auto g = lox_ab(c);
  const auto xi = glue_class(c, gid(c, 0), g);
  std::vector<BoundaryPoint> axis;
  for (int n = 1; n <= 8; ++n) axis.push_back(chart_end(c, ray_path(c, xi, n), "", "ab"));
  acc = accumulation_point(c, axis);
  REQUIRE(acc.ok);
  REQUIRE(acc.limit.kind == BoundaryPoint::Kind::TreeEnd);
  CHECK(acc.limit.exact);
  CHECK(equal(c, acc.limit, xi));
  CHECK(converges(c, std::vector<BoundaryPoint>(acc.indices.size(), acc.limit), acc.limit)
            .verdict == Verdict::True);

  // Escaping along an infinite domain line: the limit folds to the class.
  const auto c22 = compile(two_tori(2, 2));
  const auto delta = line_shift(c22);
  const auto a_child = child_of(c22, base_vertex(c22), "a", kLR);
  std::vector<BoundaryPoint> line_march;
  for (int n = 0; n < 9; ++n)
    line_march.push_back(
        edge_class_point(c22, gog::translate_vertex(c22, gpow(c22, delta, n), a_child)));
  acc = accumulation_point(c22, line_march);
  REQUIRE(acc.ok);
  CHECK(acc.limit.kind == BoundaryPoint::Kind::EdgeParabolic);
  CHECK(equal(c22, acc.limit,
              glue_class(c22, tree::ClassAt{base_vertex(c22), {Word(), 0}})));

  // The selected subsequence converges to the reported limit.
  std::vector<BoundaryPoint> sel;
  for (int i : acc.indices) sel.push_back(line_march[static_cast<size_t>(i)]);
  CHECK(converges(c22, sel, acc.limit, 3).verdict == Verdict::True);
}

TEST_CASE("literals round-trip") {
  const auto c = compile(two_tori(1, 1));
  const auto base = base_vertex(c);

  std::vector<GammaElement> axes = {lox_ab(c), lox_a(c)};
  auto pts = sample_points(c, {2, 2, 3, 2, 2, 30, 19}, axes);
  pts.push_back(ray_stub(c, gpow(c, lox_ab(c), 3).path()));
  REQUIRE(!pts.empty());
  for (const auto& p : pts) {
    const auto lit = point_literal(c, p);
    const auto back = parse_point(c, lit);
    CHECK(equal(c, p, back));
    CHECK(point_literal(c, back) == lit);
  }

  const auto p_ab = chart_end(c, base, "", "ab");
  for (const auto& w :
       {basic_nbhd(c, p_ab, 2), basic_nbhd(c, glue_class(c, tree::ClassAt{base, {Word(), 0}}), 2),
        basic_nbhd(c, glue_class(c, gid(c, 0), lox_ab(c)), 3),
        chart_spec(base, {"ab", "ba"}, {"abAB"})}) {
    const auto lit = nbhd_literal(c, w);
    CHECK(nbhd_literal(c, parse_nbhd(c, lit)) == lit);
  }

  // Path literals cover the identity and nontrivial coset reps.
  const auto v = child_of(c, child_of(c, base, "1", kLR), "bA", kLR.reversed());
  CHECK(parse_path(c, path_literal(c, v)) == v);
  CHECK(parse_path(c, path_literal(c, base)) == base);
}

TEST_CASE("samples are deterministic and mixed") {
  const auto c = compile(two_tori(1, 2));
  std::vector<GammaElement> axes = {lox_ab(c)};
  const auto a = sample_points(c, {2, 2, 3, 2, 2, 50, 99}, axes);
  const auto b = sample_points(c, {2, 2, 3, 2, 2, 50, 99}, axes);
  REQUIRE(a.size() == b.size());
  bool end = false, cls = false, ray = false;
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(point_literal(c, a[i]) == point_literal(c, b[i]));
    end |= a[i].kind == BoundaryPoint::Kind::VertexPoint;
    cls |= a[i].kind == BoundaryPoint::Kind::EdgeParabolic;
    ray |= a[i].kind == BoundaryPoint::Kind::TreeEnd;
  }
  CHECK(end);
  CHECK(cls);
  CHECK(ray);

  // No duplicates under the canonical literal.
  std::set<std::string> lits;
  for (const auto& p : a) lits.insert(point_literal(c, p));
  CHECK(lits.size() == a.size());
}
