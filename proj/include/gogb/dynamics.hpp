#pragma once
// Group elements acting on the finite-resolution boundary: classification by
// tree translation length, the induced left action on boundary points and
// neighborhood specs, and certified probes for the dynamical behaviour the
// boundary model is expected to exhibit: north-south collapse of loxodromic
// sequences, shrinking coset images of cyclic subgroup limit sets, conical
// and bounded-parabolic witnesses for limit points, and limit sets and
// stabilizer checks for subgroup handles.
//
// Probes return reports, never bare booleans: a report carries the verdict,
// the resolution it was certified at, and the witnesses backing it, so a
// failed certification is inspectable rather than silent.

#include <map>
#include <string>
#include <vector>

#include "gogb/boundary.hpp"
#include "gogb/rng.hpp"

namespace gogb::dynamics {

using boundary::BoundaryPoint;
using boundary::ChartOpen;
using boundary::NeighborhoodSpec;
using boundary::SampleParams;
using boundary::Verdict;
using freegrp::Word;
using gog::Compiled;
using gog::GammaElement;
using gog::PathForm;
using tree::ClassAt;

// ---------------------------------------------------------------------------
// Classification. A nontrivial element either fixes a tree vertex (and its
// local part there is loxodromic in the chart or fixes a peripheral class)
// or translates along an axis.

struct ElementClass {
  enum class Kind {
    Elliptic,       // fixes a vertex; local part loxodromic in that chart
    EdgeParabolic,  // fixes a vertex and a peripheral class there
    Loxodromic,     // translates along an axis
  };
  Kind kind = Kind::Elliptic;
  PathForm fixed_vertex;       // Elliptic / EdgeParabolic
  Word local;                  // Elliptic / EdgeParabolic: conjugated local word
  ClassAt cls;                 // EdgeParabolic: the fixed class, minimized
  int translation_length = 0;  // Loxodromic; 0 otherwise
  std::vector<PathForm> axis;  // Loxodromic: one fundamental segment of the axis
  std::string str() const;
};

// Throws std::invalid_argument on the identity; g must be a loop at the base.
ElementClass classify(const Compiled& c, const GammaElement& g);

// ---------------------------------------------------------------------------
// Action. g acts on the left; g must be a loop at the base vertex. Results
// are canonical: folding to a class point happens exactly as in glue_class.

BoundaryPoint act(const Compiled& c, const GammaElement& g, const BoundaryPoint& p);

// Image spec g W, valid on exactly the image set. Throws std::invalid_argument
// when the image is not expressible at this resolution: a branch whose image
// subtree contains the base, or a cylinder fully cancelled by the local part.
NeighborhoodSpec translate_nbhd(const Compiled& c, const GammaElement& g,
                                const NeighborhoodSpec& w);

// ---------------------------------------------------------------------------
// Subgroup handles: a cyclic subgroup given by its generator, or the image of
// the fundamental group of a connected subgraph containing the base vertex,
// optionally with finitely generated subgroups at some vertices.

struct SubgroupHandle {
  std::vector<GammaElement> generators;          // cyclic handles: exactly one
  std::vector<int> sub_vertices;                 // subgraph handles: vertex ids
  std::vector<int> sub_edges;                    // edge indices of the subgraph
  std::map<int, std::vector<Word>> vertex_gens;  // per-vertex restriction; absent = full
  bool is_subgraph() const { return !sub_vertices.empty(); }
  static SubgroupHandle cyclic(const GammaElement& g);
  static SubgroupHandle subgraph(std::vector<int> vertices, std::vector<int> edges);
};

// Is g an element of the subgroup. Budget bounds the power / coset searches.
Verdict handle_membership(const Compiled& c, const SubgroupHandle& h, const GammaElement& g,
                          int budget = 64);

// Is p in the limit set of the subgroup.
Verdict limit_contains(const Compiled& c, const SubgroupHandle& h, const BoundaryPoint& p,
                       int budget = 64);

// Sampled points certified inside the limit set (limit_contains == True).
std::vector<BoundaryPoint> limit_set_sample(const Compiled& c, const SubgroupHandle& h,
                                            const SampleParams& sp = {});

// ---------------------------------------------------------------------------
// North-south probe: a sequence of distinct elements, a sample, and a depth.
// Finds candidate attractor / repeller by accumulation of translated reference
// points, then certifies: every sample point outside the depth-d repeller
// neighborhood is carried into the depth-d attractor neighborhood from some
// index on; capture_n0 is the largest such starting index over the sample.

struct NorthSouthReport {
  BoundaryPoint attractor, repeller;
  bool have_attractor = false, have_repeller = false;
  int capture_n0 = -1;
  int captured = 0, skipped = 0, escapees = 0;
  Verdict certified = Verdict::Undecided;
  std::string note;
};

NorthSouthReport north_south_probe(const Compiled& c, const std::vector<GammaElement>& seq,
                                   const std::vector<BoundaryPoint>& sample, int depth);

// ---------------------------------------------------------------------------
// Dynamical quasi-convexity probe for a cyclic handle: diameters of the coset
// images g_i Lambda(h) at the given depth. Diameter is 2^-agreement where
// agreement is the deepest cylinder level the image endpoints share (0 when
// they share none, and the limit set of a peripheral conjugate is a single
// point of diameter 0). Throws when some g_i or quotient g_i^-1 g_j lies in h
// (the cosets must be distinct and nontrivial).

struct QcRow {
  GammaElement g;
  int agreement = 0;
  double diameter = 1.0;
};

struct QcReport {
  std::vector<QcRow> rows;
  int depth = 0;
  int exceeding = 0;  // rows with diameter > 2^(1-depth)
  std::vector<BoundaryPoint> h_limits;
};

QcReport dyn_qc_probe(const Compiled& c, const SubgroupHandle& h,
                      const std::vector<GammaElement>& cosets, int depth);

// ---------------------------------------------------------------------------
// Conical witness for an exactly represented tree end: the elements
// gamma_n = pre * per^n move base points along the ray; the probe certifies a
// point `collapse` such that the pulled-back sample gamma_n^-1 q eventually
// lies in the depth-d neighborhood of `collapse` while gamma_n^-1 end stays
// outside it. Throws on stubs and non-tree-end points.

struct ConicalReport {
  std::vector<GammaElement> gammas;
  BoundaryPoint collapse;
  bool have_collapse = false;
  int collapsed = 0, skipped = 0;
  Verdict certified = Verdict::Undecided;
  std::string note;
};

ConicalReport conical_witness(const Compiled& c, const BoundaryPoint& end, int count = 6,
                              int depth = 2, const SampleParams& sp = {});

// ---------------------------------------------------------------------------
// Bounded parabolic witness for an edge-parabolic class x: loops and carriers
// generating (part of) its stabilizer, a compact piece K given per domain
// vertex as the complement of the depth-d cylinders around the class's
// directions there, and a certification that stabilizer translates of K cover
// the sampled points other than x itself. Throws on non-class points.

struct CoverReport {
  std::vector<ChartOpen> compacts;
  std::vector<GammaElement> q_gens;
  int covered = 0, skipped = 0;
  std::vector<std::string> uncovered;  // literals of sample points left uncovered
  Verdict certified = Verdict::Undecided;
};

// Elements fixing x: peripheral loops over the domain vertices, plus carriers
// moving the domain along itself when the domain is infinite.
std::vector<GammaElement> parabolic_stabilizer(const Compiled& c, const BoundaryPoint& x,
                                               int radius = 4);

CoverReport bounded_parabolic_witness(const Compiled& c, const BoundaryPoint& x, int depth,
                                      const SampleParams& sp = {}, int translate_budget = 2);

// ---------------------------------------------------------------------------
// Stabilizer probe: for each candidate, membership in the handle's subgroup
// and whether it preserves the sampled limit set; a non-member should move
// some certified limit point out (recorded as a witness literal).

struct StabilizerRow {
  GammaElement g;
  Verdict member = Verdict::Undecided;
  Verdict preserved = Verdict::Undecided;
  std::string witness;
};

struct StabilizerReport {
  std::vector<StabilizerRow> rows;
  int consistent = 0;
  Verdict ok = Verdict::Undecided;
};

StabilizerReport stabilizer_probe(const Compiled& c, const SubgroupHandle& h,
                                  const std::vector<GammaElement>& candidates, int budget = 64,
                                  const SampleParams& sp = {});

// ---------------------------------------------------------------------------
// Random loop at the base: `crossings` edge crossings with random local words
// between them, closed back along the spanning tree. Deterministic in rng.
GammaElement random_element(const Compiled& c, Rng& rng, int crossings, int word_len);

}  // namespace gogb::dynamics
