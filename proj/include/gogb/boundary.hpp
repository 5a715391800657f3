#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gogb/gog.hpp"
#include "gogb/tree.hpp"

// The collapsed boundary space at finite resolution. Points are vertex-chart
// ends, glued edge-parabolic classes, or tree ends; rays whose tail stays in
// one class domain are folded into that class, so stored points are always
// canonical. Neighborhoods carry finite per-chart open data over a support
// inside the domain (or a branch cut for tree ends), and every topological
// predicate answers with a three-valued verdict: truncation must never be
// reported as a decision.
namespace gogb::boundary {

using freegrp::FreeBoundaryPoint;
using freegrp::PeriodicEndForm;
using freegrp::Word;
using gog::Compiled;
using gog::GammaElement;
using gog::PathForm;
using tree::ClassAt;
using tree::LocalClass;

enum class Verdict { True, False, Undecided };
const char* verdict_str(Verdict v);

// ---------------------------------------------------------------------------
struct BoundaryPoint {
  enum class Kind { VertexPoint, EdgeParabolic, TreeEnd };
  Kind kind = Kind::VertexPoint;

  // VertexPoint: a non-parabolic end in the chart of one tree vertex.
  PathForm chart;
  PeriodicEndForm end;

  // EdgeParabolic: canonical id = minimal domain vertex + local class there.
  ClassAt cls;

  // TreeEnd: the from-base geodesic ray towards lim pre*per^n*base. Exact
  // rays require per to move the base vertex; a stub is a truncation-only
  // ray known to depth approx.length().
  GammaElement pre, per;
  bool exact = true;
  PathForm approx;

  std::string str(const Compiled& c) const;
};

// Canonical constructors; the gluing relations are applied here. A parabolic
// chart point becomes the EdgeParabolic of its minimized class; a ray whose
// tail lies in one class domain becomes that EdgeParabolic.
BoundaryPoint glue_class(const Compiled& c, const PathForm& chart, const FreeBoundaryPoint& p);
BoundaryPoint glue_class(const Compiled& c, const ClassAt& at);
// Throws std::invalid_argument when per does not move the base vertex.
BoundaryPoint glue_class(const Compiled& c, const GammaElement& pre, const GammaElement& per);
BoundaryPoint ray_stub(const Compiled& c, const PathForm& deep);

// Exact on canonical variants; a stub equals only the identical stub.
bool equal(const Compiled& c, const BoundaryPoint& a, const BoundaryPoint& b);

// Steps the base vertex is displaced along its axis (0 for elliptic g).
int translation_steps(const Compiled& c, const GammaElement& g);
// First k steps of the from-base geodesic ray of an exact tree end.
PathForm ray_path(const Compiled& c, const BoundaryPoint& xi, int k);
// The first k steps of a path, as a vertex.
PathForm path_prefix(const Compiled& c, const PathForm& p, int k);

// ---------------------------------------------------------------------------
// Open data in one chart: every direction of a member must extend one of
// `include` (when nonempty) and may extend none of `exclude`.
struct ChartOpen {
  PathForm at;
  std::vector<Word> include;
  std::vector<Word> exclude;
};
bool open_contains(const freegrp::VertexGroupSpec& g, const ChartOpen& U,
                   const std::vector<PeriodicEndForm>& dirs);

// Chart kind: finite support of chart opens across the center's domain, each
// containing the center's trace there. Branch kind: everything whose
// position extends the (m+1)-step ray prefix `branch`.
struct NeighborhoodSpec {
  enum class Kind { Chart, Branch };
  Kind kind = Kind::Chart;
  std::vector<ChartOpen> support;
  PathForm branch;
  int m = 0;
  std::string str(const Compiled& c) const;
};

struct NeighborhoodParams {
  int support_cap = 8;  // finite sub-support; the rest of the domain is open
};

// The W_m ladder: depth-m cylinder data at every domain vertex within radius
// m of the minimal vertex (capped), or the branch past the ray's (m+1)-step
// prefix. Requires m >= 1; stubs must be at least m+1 deep.
NeighborhoodSpec basic_nbhd(const Compiled& c, const BoundaryPoint& x, int m,
                            const NeighborhoodParams& params = {});

// Which disjunct decided a membership: tree ends through admitted branches
// (A), domain-disjoint points behind admitted first edges (B), or chart
// opens at shared domain vertices (C). The three cases are exclusive.
enum class Clause { None, EndsA, DisjointB, ChartC };
struct Membership {
  Verdict verdict = Verdict::Undecided;
  Clause clause = Clause::None;
};
Membership in_neighborhood_ex(const Compiled& c, const BoundaryPoint& q,
                              const NeighborhoodSpec& W);
Verdict in_neighborhood(const Compiled& c, const BoundaryPoint& q, const NeighborhoodSpec& W);

// Subtree selected by one chart open: w belongs iff w == U.at or the first
// edge of [U.at, w] carries a class inside U.
Verdict subtree_contains(const Compiled& c, const ChartOpen& U, const PathForm& w);

// The local class of the tree edge between `child` and its parent, glued.
BoundaryPoint edge_class_point(const Compiled& c, const PathForm& child);

// ---------------------------------------------------------------------------
struct SampleParams {
  int ball_radius = 2;
  int transversal_len = 2;
  int word_len = 3;
  int per_vertex = 4;
  int class_depth = 2;
  int count = 160;
  std::uint64_t seed = 1;
};
// Deterministic canonical sample: chart ends and visible classes over the
// enumerated ball, plus exact tree ends from the given axis elements.
std::vector<BoundaryPoint> sample_points(const Compiled& c, const SampleParams& params = {},
                                         const std::vector<GammaElement>& axes = {});

// A neighborhood of p excluding the class of the tree edge `child` --
// parent(child). Throws std::invalid_argument when p is parabolic and both
// endpoints lie in its domain, or when p is a stub too shallow to decide.
NeighborhoodSpec avoid_edge(const Compiled& c, const BoundaryPoint& p, const PathForm& child);

struct CertifyParams {
  int max_m = 9;
  SampleParams sample;
};

struct Separation {
  NeighborhoodSpec left, right;
  int m = 0;
  Verdict certified = Verdict::Undecided;  // True: no sampled point in both
  std::string witness;
};
Separation separate(const Compiled& c, const BoundaryPoint& p, const BoundaryPoint& q,
                    const CertifyParams& params = {});

struct FiltrationResult {
  NeighborhoodSpec inner;
  int m = 0;
  Verdict certified = Verdict::Undecided;  // True: inner <= outer on samples
  std::string witness;
};
// Requires in_neighborhood(q, outer) == True.
FiltrationResult filtration(const Compiled& c, const NeighborhoodSpec& outer,
                            const BoundaryPoint& q, const CertifyParams& params = {});

struct ClosureGapResult {
  NeighborhoodSpec inner;
  int n = 0;
  Verdict certified = Verdict::Undecided;  // True: adherent(inner) <= outer on samples
  std::string witness;
};
// Picks n with closure(W_n(p)) inside W_m(p) at resolution: the branch cut
// advances past the frontier edge class, chart data deepens by one.
ClosureGapResult closure_gap(const Compiled& c, const BoundaryPoint& p, int m,
                             const CertifyParams& params = {});

// ---------------------------------------------------------------------------
struct ConvergenceLevel {
  int level = 0;
  int tail_start = -1;
  Verdict verdict = Verdict::Undecided;
};
struct ConvergenceReport {
  std::vector<ConvergenceLevel> levels;
  Verdict verdict = Verdict::Undecided;  // True when every level captured a tail
  std::string witness;
};
// Tail capture per level: for each n <= levels some tail of seq lies in
// W_n(p).
ConvergenceReport converges(const Compiled& c, const std::vector<BoundaryPoint>& seq,
                            const BoundaryPoint& p, int levels = 4,
                            const NeighborhoodParams& params = {});

struct AccumulationParams {
  int ray_budget = 16;   // descent depth before declaring an escaping ray
  int min_bucket = 3;    // smallest subsequence worth selecting
  int dir_depth = 14;    // in-chart cylinder descent budget
};
struct Accumulation {
  std::vector<int> indices;
  BoundaryPoint limit;
  bool ok = false;
  std::string note;
};
// Subsequence extraction: descend while one branch dominates (escape to a
// ray), else stop at a pivot vertex and accumulate either the points of its
// chart or the traces of the distinct departing edges.
Accumulation accumulation_point(const Compiled& c, const std::vector<BoundaryPoint>& seq,
                                const AccumulationParams& params = {});

// ---------------------------------------------------------------------------
// Stable text syntax (CLI interchange). Round-trips with the parsers below.
std::string point_literal(const Compiled& c, const BoundaryPoint& p);
std::string nbhd_literal(const Compiled& c, const NeighborhoodSpec& w);
BoundaryPoint parse_point(const Compiled& c, const std::string& s);
NeighborhoodSpec parse_nbhd(const Compiled& c, const std::string& s);
std::string path_literal(const Compiled& c, const PathForm& p);
PathForm parse_path(const Compiled& c, const std::string& s);

}  // namespace gogb::boundary
