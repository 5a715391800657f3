#pragma once
// Shared example graphs of groups for the test suite.

#include <string>

#include "gogb/gog.hpp"
#include "gogb/rng.hpp"

namespace gogb::fixtures {

using freegrp::Letter;
using freegrp::VertexGroupSpec;
using freegrp::Word;
using gog::EdgeSpec;
using gog::GraphSpec;
using gog::NamedVertex;

inline VertexGroupSpec torus_group() {
  VertexGroupSpec g;
  g.rank = 2;
  g.peripherals = {Word::parse("abAB")};
  return g;
}

// Two once-punctured torus groups glued along powers of their boundary
// commutators: the edge generator maps to [a,b]^nv on the left and [a,b]^nw
// on the right.
inline GraphSpec two_tori(int nv, int nw) {
  GraphSpec s;
  s.vertices = {{"L", torus_group()}, {"R", torus_group()}};
  EdgeSpec e;
  e.id = "e";
  e.v = 0;
  e.w = 1;
  e.image_v = freegrp::rpow(Word::parse("abAB"), nv);
  e.image_w = freegrp::rpow(Word::parse("abAB"), nw);
  e.in_tree = true;
  s.edges = {e};
  s.base = 0;
  return s;
}

// F(a,b) with malnormal peripherals {a, b} and a stable letter conjugating
// a to b: one vertex, one non-tree loop.
inline GraphSpec hnn_ab(int na = 1, int nb = 1) {
  GraphSpec s;
  VertexGroupSpec g;
  g.rank = 2;
  g.peripherals = {Word::parse("a"), Word::parse("b")};
  s.vertices = {{"V", g}};
  EdgeSpec e;
  e.id = "t";
  e.v = 0;
  e.w = 0;
  e.image_v = freegrp::rpow(Word::parse("b"), nb);
  e.image_w = freegrp::rpow(Word::parse("a"), na);
  e.in_tree = false;
  s.edges = {e};
  s.base = 0;
  return s;
}

// A single punctured-torus vertex, no edges.
inline GraphSpec lone_torus() {
  GraphSpec s;
  s.vertices = {{"V", torus_group()}};
  s.base = 0;
  return s;
}

inline Word random_reduced_word(Rng& rng, int rank, int max_len) {
  const int len = rng.below(max_len + 1);
  std::vector<Letter> ls;
  ls.reserve(len);
  for (int i = 0; i < len; ++i) {
    Letter x;
    do {
      const int gen = rng.below(rank) + 1;
      x = static_cast<Letter>(rng.coin() ? gen : -gen);
    } while (!ls.empty() && x == freegrp::letter_inv(ls.back()));
    ls.push_back(x);
  }
  return Word(std::move(ls));
}

// A random loop at the base: a token walk through the graph, closed up along
// the spanning tree.
inline gog::GammaElement random_loop(Rng& rng, const gog::Compiled& c, int tokens) {
  gog::Builder b(c);
  for (int i = 0; i < tokens; ++i) {
    const int at = b.vertex();
    const auto& inc = c.incident[at];
    if (!inc.empty() && rng.coin()) {
      const auto pick = inc[rng.below(static_cast<int>(inc.size()))];
      b.push_cross(pick.edge, pick.dir);
    } else {
      b.push_word(random_reduced_word(rng, c.group(at).rank, 4));
    }
  }
  const auto back = c.tree_path[b.vertex()];
  for (auto it = back.rbegin(); it != back.rend(); ++it) b.push_cross(it->reversed());
  return b.element();
}

}  // namespace gogb::fixtures
