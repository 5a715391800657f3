// Command-line workbench: load a scenario, run experiments, write artifacts
// and a canonical manifest into a run directory. Exit code 0 = the scenario's
// declared expectations are met (or none are declared), 2 = an expectation
// mismatch, 1 = error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gogb/dynamics.hpp"
#include "gogb/lab.hpp"

namespace fs = std::filesystem;
using namespace gogb;
using freegrp::Word;
using gog::GammaElement;
using lab::Scenario;

namespace {

constexpr const char* kToolVersion = "gogb 0.1.0";

struct Common {
  std::string scenario, out, format = "csv";
  int depth = 0, radius = 0, budget = 0;
  std::uint64_t seed = 0;
  CLI::Option *od = nullptr, *orad = nullptr, *ob = nullptr, *osd = nullptr;

  void attach(CLI::App* cmd) {
    cmd->add_option("--scenario", scenario, "scenario JSON file")->required();
    od = cmd->add_option("--depth", depth, "resolution depth (default: scenario params)");
    orad = cmd->add_option("--radius", radius, "enumeration radius (default: scenario params)");
    ob = cmd->add_option("--budget", budget, "search budget (default: scenario params)");
    osd = cmd->add_option("--seed", seed, "RNG seed (default: scenario params)");
    cmd->add_option("--out", out, "run directory (default: runs/<name>-<command>)");
    cmd->add_option("--format", format, "artifact format")
        ->check(CLI::IsMember({"csv", "dot"}));
  }

  lab::ExperimentParams params(const Scenario& s) const {
    auto p = s.params;
    if (od->count()) p.depth = depth;
    if (orad->count()) p.radius = radius;
    if (ob->count()) p.budget = budget;
    if (osd->count()) p.seed = seed;
    return p;
  }
};

std::string hex64(std::uint64_t x) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

struct RunDir {
  fs::path dir;
  std::vector<std::string> files;

  RunDir(const Common& o, const std::string& command, const std::string& name) {
    dir = o.out.empty() ? fs::path("runs") / (name + "-" + command) : fs::path(o.out);
    fs::create_directories(dir);
  }

  void write(const std::string& file, const std::string& bytes) {
    std::ofstream f(dir / file, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + (dir / file).string());
    f << bytes;
    files.push_back(file);
  }

  void manifest(const std::string& command, const Scenario& s, const lab::ExperimentParams& p,
                const std::string& format) {
    lab::RunManifest m;
    m.command = command;
    m.inputs = {{"scenario", s.name}, {"scenario_hash", hex64(lab::scenario_hash(s))}};
    m.params = {{"budget", std::to_string(p.budget)}, {"depth", std::to_string(p.depth)},
                {"format", format},                   {"radius", std::to_string(p.radius)},
                {"seed", std::to_string(p.seed)},     {"tool", kToolVersion}};
    m.outputs = files;
    std::ofstream f(dir / "manifest.json", std::ios::binary | std::ios::trunc);
    f << lab::manifest_json(m);
    std::cout << "run directory: " << dir.string() << "\n";
  }
};

std::vector<int> component_depths(const Scenario& s, const lab::ExperimentParams& p) {
  if (!s.expect.component_depths.empty()) return s.expect.component_depths;
  return {p.depth};
}

// Draw random base loops until one translates along a tree axis.
GammaElement find_loxodromic(const gog::Compiled& c, Rng& rng) {
  for (int t = 0; t < 512; ++t) {
    const auto g = dynamics::random_element(c, rng, 1 + t % 3, 3);
    if (g.is_identity()) continue;
    if (dynamics::classify(c, g).kind == dynamics::ElementClass::Kind::Loxodromic) return g;
  }
  throw std::runtime_error("no loxodromic element found within the draw budget");
}

int cmd_validate(const Common& o) {
  const auto s = lab::load_scenario(o.scenario);
  const auto p = o.params(s);
  const auto rep = gog::validate(s.spec);
  std::ostringstream txt;
  for (const auto& e : rep.errors) txt << "error: " << e.where << ": " << e.message << "\n";
  for (const auto& w : rep.warnings) txt << "warning: " << w.where << ": " << w.message << "\n";
  txt << "ok: " << (rep.ok() ? "true" : "false") << "\n";
  std::cout << txt.str();
  RunDir run(o, "validate", s.name);
  run.write("validation.txt", txt.str());
  run.manifest("validate", s, p, o.format);
  return rep.ok() ? 0 : 2;
}

int cmd_parabolize(const Common& o) {
  auto s = lab::load_scenario(o.scenario);
  const auto p = o.params(s);
  Scenario t = s;
  t.spec = gog::parabolize(s.spec);
  RunDir run(o, "parabolize", s.name);
  run.write("scenario.json", lab::scenario_to_json(t));
  for (size_t i = 0; i < t.spec.vertices.size(); ++i)
    std::cout << "vertex " << t.spec.vertices[i].id << ": "
              << s.spec.vertices[i].group.peripherals.size() << " -> "
              << t.spec.vertices[i].group.peripherals.size() << " peripherals\n";
  run.manifest("parabolize", s, p, o.format);
  return 0;
}

int cmd_tree(const Common& o) {
  const auto s = lab::load_scenario(o.scenario);
  const auto p = o.params(s);
  const auto c = lab::compile_scenario(s);
  const auto ball = tree::tree_ball(c, tree::base_vertex(c), {p.radius, 2, 2048});
  RunDir run(o, "tree", s.name);
  if (o.format == "dot") {
    run.write("tree.dot", lab::dot_ball(c, ball));
  } else {
    std::ostringstream csv;
    csv << "index,depth,vertex\n";
    for (size_t i = 0; i < ball.verts.size(); ++i)
      csv << i << ',' << ball.depth[i] << ',' << boundary::path_literal(c, ball.verts[i])
          << '\n';
    run.write("tree.csv", csv.str());
  }
  std::cout << "tree ball: " << ball.verts.size() << " vertices"
            << (ball.vertex_limit_hit ? " (vertex limit hit)" : "") << "\n";
  run.manifest("tree", s, p, o.format);
  return 0;
}

int cmd_domain(const Common& o) {
  const auto s = lab::load_scenario(o.scenario);
  const auto p = o.params(s);
  const auto c = lab::compile_scenario(s);
  const auto x = lab::removed_class(c, s);
  const auto dom = tree::domain(c, x.cls, {p.radius, 4096});
  RunDir run(o, "domain", s.name);
  if (o.format == "dot") {
    run.write("domain.dot", lab::dot_domain(c, dom));
  } else {
    std::ostringstream csv;
    csv << "index,vertex,rep,peripheral\n";
    for (size_t i = 0; i < dom.verts.size(); ++i)
      csv << i << ',' << boundary::path_literal(c, dom.verts[i].vertex) << ','
          << dom.verts[i].cls.rep.str() << ',' << dom.verts[i].cls.peripheral << '\n';
    run.write("domain.csv", csv.str());
  }
  std::cout << "domain of " << boundary::point_literal(c, x) << ": " << dom.verts.size()
            << " vertices, complete: " << (dom.complete ? "true" : "false") << "\n";
  run.manifest("domain", s, p, o.format);
  return 0;
}

int cmd_components(const Common& o) {
  const auto s = lab::load_scenario(o.scenario);
  const auto p = o.params(s);
  const auto c = lab::compile_scenario(s);
  const auto x = lab::removed_class(c, s);
  const auto depths = component_depths(s, p);
  const auto rows = lab::run_components(c, x, depths);
  RunDir run(o, "components", s.name);
  run.write("components.csv", lab::csv_components(rows));
  if (o.format == "dot") {
    const auto dom = tree::domain(c, x.cls, {depths.back(), 4096});
    run.write("domain.dot", lab::dot_domain(c, dom));
  }
  bool met = true;
  for (const auto& r : rows)
    std::cout << "depth " << r.depth << ": " << r.count << " components (region " << r.region
              << (r.complete ? ", complete" : ", truncated") << ")\n";
  if (!s.expect.component_counts.empty()) {
    met = s.expect.component_counts.size() == rows.size();
    for (size_t i = 0; met && i < rows.size(); ++i)
      met = rows[i].count == s.expect.component_counts[i];
  }
  if (s.expect.strictly_increasing)
    for (size_t i = 0; i + 1 < rows.size(); ++i)
      if (rows[i + 1].count <= rows[i].count) met = false;
  run.manifest("components", s, p, o.format);
  std::cout << (met ? "expectations met\n" : "expectation mismatch\n");
  return met ? 0 : 2;
}

int cmd_dynamics(const Common& o, const std::string& probe) {
  const auto s = lab::load_scenario(o.scenario);
  const auto p = o.params(s);
  const auto c = lab::compile_scenario(s);
  boundary::SampleParams sp;
  sp.seed = p.seed;
  sp.count = 48;
  RunDir run(o, "dynamics-" + probe, s.name);
  Rng rng(p.seed);

  if (probe == "north-south") {
    const auto g = find_loxodromic(c, rng);
    std::vector<GammaElement> powers;
    for (int n = 1; n <= 8; ++n) powers.push_back(gog::gpow(c, g, n));
    const auto pts = boundary::sample_points(c, sp, {g});
    const auto ns = dynamics::north_south_probe(c, powers, pts, std::min(p.depth, 4));
    std::ostringstream csv, txt;
    csv << "n0,captured,skipped,escapees,certified\n"
        << ns.capture_n0 << ',' << ns.captured << ',' << ns.skipped << ',' << ns.escapees << ','
        << boundary::verdict_str(ns.certified) << '\n';
    txt << "element: " << g.str(c) << "\n";
    if (ns.have_attractor) txt << "attractor: " << boundary::point_literal(c, ns.attractor) << "\n";
    if (ns.have_repeller) txt << "repeller: " << boundary::point_literal(c, ns.repeller) << "\n";
    if (!ns.note.empty()) txt << "note: " << ns.note << "\n";
    run.write("north_south.csv", csv.str());
    run.write("north_south.txt", txt.str());
    std::cout << "north-south: certified " << boundary::verdict_str(ns.certified) << ", n0 "
              << ns.capture_n0 << "\n";
  } else if (probe == "dyn-qc") {
    const int base = c.spec.base;
    if (c.group(base).rank < 2)
      throw std::runtime_error("dyn-qc probe needs rank >= 2 at the base vertex");
    const auto h = dynamics::SubgroupHandle::cyclic(gog::vertex_element(c, base, Word::parse("a")));
    std::vector<GammaElement> cosets;
    const int n = std::max(1, std::min(p.budget, 50));
    for (int i = 1; i <= n; ++i)
      cosets.push_back(gog::vertex_element(c, base, freegrp::rpow(Word::parse("b"), i)));
    const auto qc = dynamics::dyn_qc_probe(c, h, cosets, p.depth);
    std::ostringstream csv;
    csv << "coset,agreement,diameter\n";
    for (size_t i = 0; i < qc.rows.size(); ++i)
      csv << i + 1 << ',' << qc.rows[i].agreement << ',' << qc.rows[i].diameter << '\n';
    run.write("dyn_qc.csv", csv.str());
    std::cout << "dyn-qc: " << qc.rows.size() << " cosets, " << qc.exceeding
              << " exceeding 2^(1-depth) at depth " << qc.depth << "\n";
  } else if (probe == "conical") {
    const auto g = find_loxodromic(c, rng);
    std::vector<boundary::BoundaryPoint> ends;
    ends.push_back(boundary::glue_class(c, gog::gid(c, c.spec.base), g));
    ends.push_back(boundary::glue_class(c, gog::gid(c, c.spec.base), gog::ginv(c, g)));
    std::ostringstream csv, txt;
    csv << "end,collapsed,skipped,certified\n";
    for (size_t i = 0; i < ends.size(); ++i) {
      const auto rep = dynamics::conical_witness(c, ends[i], 6, std::min(p.depth, 2), sp);
      csv << i << ',' << rep.collapsed << ',' << rep.skipped << ','
          << boundary::verdict_str(rep.certified) << '\n';
      txt << "end " << i << ": " << boundary::point_literal(c, ends[i]) << "\n";
      if (rep.have_collapse)
        txt << "  collapse: " << boundary::point_literal(c, rep.collapse) << "\n";
      std::cout << "conical end " << i << ": " << boundary::verdict_str(rep.certified) << "\n";
    }
    run.write("conical.csv", csv.str());
    run.write("conical.txt", txt.str());
  } else if (probe == "bounded-parabolic") {
    const auto x = lab::removed_class(c, s);
    const auto cover = dynamics::bounded_parabolic_witness(c, x, std::min(p.depth, 4), sp);
    std::ostringstream csv, txt;
    csv << "covered,skipped,uncovered,certified\n"
        << cover.covered << ',' << cover.skipped << ',' << cover.uncovered.size() << ','
        << boundary::verdict_str(cover.certified) << '\n';
    txt << "class: " << boundary::point_literal(c, x) << "\n";
    txt << "stabilizer generators: " << cover.q_gens.size() << "\n";
    for (const auto& u : cover.uncovered) txt << "uncovered: " << u << "\n";
    run.write("bounded_parabolic.csv", csv.str());
    run.write("bounded_parabolic.txt", txt.str());
    std::cout << "bounded-parabolic: certified " << boundary::verdict_str(cover.certified)
              << ", covered " << cover.covered << ", uncovered " << cover.uncovered.size()
              << "\n";
  } else {
    throw std::runtime_error("unknown probe: " + probe);
  }
  run.manifest("dynamics-" + probe, s, p, o.format);
  return 0;
}

int cmd_limitset(const Common& o) {
  const auto s = lab::load_scenario(o.scenario);
  const auto p = o.params(s);
  const auto c = lab::compile_scenario(s);
  boundary::SampleParams sp;
  sp.seed = p.seed;
  const auto h = dynamics::SubgroupHandle::subgraph({c.spec.base}, {});
  const auto pts = dynamics::limit_set_sample(c, h, sp);
  std::ostringstream txt;
  for (const auto& q : pts) txt << boundary::point_literal(c, q) << "\n";
  RunDir run(o, "limitset", s.name);
  run.write("limitset.txt", txt.str());
  std::cout << "limit set of the base vertex group: " << pts.size()
            << " certified sample points\n";
  run.manifest("limitset", s, p, o.format);
  return 0;
}

int cmd_homeo(const Common& o, const std::string& other_path,
              const std::vector<std::string>& subs) {
  const auto sa = lab::load_scenario(o.scenario);
  const auto sb = lab::load_scenario(other_path);
  const auto p = o.params(sa);
  const auto a = lab::compile_scenario(sa);
  const auto b = lab::compile_scenario(sb);

  std::vector<std::vector<Word>> maps;
  const size_t nv = a.spec.vertices.size();
  if (subs.empty()) {
    for (size_t i = 0; i < nv; ++i) {
      std::vector<Word> id;
      for (int k = 1; k <= a.group(static_cast<int>(i)).rank; ++k)
        id.push_back(Word{{static_cast<freegrp::Letter>(k)}});
      maps.push_back(std::move(id));
    }
  } else {
    if (subs.size() != nv)
      throw std::runtime_error("need one --sub per vertex (" + std::to_string(nv) + ")");
    for (const auto& sub : subs) {
      std::vector<Word> images;
      for (const char ch : sub) images.push_back(Word::parse(std::string(1, ch)));
      maps.push_back(std::move(images));
    }
  }

  const auto outcome = lab::build_homeo(a, b, maps, 3);
  RunDir run(o, "homeo", sa.name);
  std::ostringstream txt;
  txt << "built: " << (outcome.ok() ? "yes" : "no") << "\n";
  for (const auto& r : outcome.refusals) txt << "refusal: " << r << "\n";
  if (outcome.ok()) {
    const auto& m = *outcome.map;
    std::ostringstream csv;
    csv << "level,rows\n";
    for (size_t d = 0; d < m.table.size(); ++d) csv << d << ',' << m.table[d].size() << '\n';
    run.write("homeo.csv", csv.str());
    boundary::SampleParams sp;
    sp.seed = p.seed;
    sp.count = 80;
    const auto rep = lab::check_homeo(a, b, m, std::min(p.depth, 3), sp);
    txt << "table_ok: " << (rep.table_ok ? "true" : "false") << "\n";
    txt << "points: " << rep.points << "\ncertified: " << rep.certified
        << "\nundecided: " << rep.undecided << "\nskipped: " << rep.skipped << "\n";
    for (const auto& w : rep.witnesses) txt << "witness: " << w << "\n";
    std::cout << "homeo built; continuity certified on " << rep.certified << "/" << rep.points
              << " sampled points\n";
  } else {
    for (const auto& r : outcome.refusals) std::cout << "refusal: " << r << "\n";
  }
  run.write("homeo.txt", txt.str());
  run.manifest("homeo", sa, p, o.format);
  if (sa.expect.homeo_builds && *sa.expect.homeo_builds != outcome.ok()) {
    std::cout << "expectation mismatch\n";
    return 2;
  }
  return 0;
}

int cmd_export(const Common& o) {
  const auto s = lab::load_scenario(o.scenario);
  const auto p = o.params(s);
  const auto c = lab::compile_scenario(s);
  const auto x = lab::removed_class(c, s);
  RunDir run(o, "export", s.name);
  if (o.format == "dot") {
    const auto ball = tree::tree_ball(c, tree::base_vertex(c), {std::min(p.radius, 3), 2, 2048});
    run.write("tree.dot", lab::dot_ball(c, ball));
    const auto dom = tree::domain(c, x.cls, {p.radius, 4096});
    run.write("domain.dot", lab::dot_domain(c, dom));
    const int cyl_depth = std::min(p.depth, 3);
    for (size_t v = 0; v < c.spec.vertices.size(); ++v)
      run.write("cylinders-" + c.spec.vertices[v].id + ".dot",
                lab::dot_cylinders(c.group(static_cast<int>(v)), cyl_depth, {}));
    const auto& min_vertex = x.cls.vertex;
    run.write("cylinders-removed.dot",
              lab::dot_cylinders(
                  c.group(min_vertex.end_vertex), cyl_depth,
                  {freegrp::FreeBoundaryPoint::parabolic(x.cls.cls.rep, x.cls.cls.peripheral)}));
  } else {
    const auto rows = lab::run_components(c, x, component_depths(s, p));
    run.write("components.csv", lab::csv_components(rows));
  }
  std::cout << "exported " << run.files.size() << " artifacts\n";
  run.manifest("export", s, p, o.format);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finite-resolution boundary workbench for graphs of free groups"};
  app.require_subcommand(1);

  Common v_opt, p_opt, t_opt, d_opt, c_opt, dy_opt, l_opt, h_opt, e_opt;
  std::string probe = "north-south", other;
  std::vector<std::string> subs;

  v_opt.attach(app.add_subcommand("validate", "check a scenario and report issues"));
  p_opt.attach(app.add_subcommand("parabolize", "convert loxodromic edge images to parabolic"));
  t_opt.attach(app.add_subcommand("tree", "enumerate a ball of the acting tree"));
  d_opt.attach(app.add_subcommand("domain", "enumerate the removed class's domain"));
  c_opt.attach(app.add_subcommand("components", "count boundary components minus the class"));
  auto* dyn = app.add_subcommand("dynamics", "run a dynamics probe");
  dy_opt.attach(dyn);
  dyn->add_option("--probe", probe, "north-south | dyn-qc | conical | bounded-parabolic")
      ->check(CLI::IsMember({"north-south", "dyn-qc", "conical", "bounded-parabolic"}));
  l_opt.attach(app.add_subcommand("limitset", "sample the base vertex group's limit set"));
  auto* hom = app.add_subcommand("homeo", "build and check an induced boundary map");
  h_opt.attach(hom);
  hom->add_option("--other", other, "target scenario JSON file")->required();
  hom->add_option("--sub", subs,
                  "generator substitution per vertex, one string of image letters each "
                  "(default: identity)");
  e_opt.attach(app.add_subcommand("export", "write artifacts for a scenario"));

  CLI11_PARSE(app, argc, argv);

  try {
    const auto* sub = app.get_subcommands().front();
    const auto& name = sub->get_name();
    if (name == "validate") return cmd_validate(v_opt);
    if (name == "parabolize") return cmd_parabolize(p_opt);
    if (name == "tree") return cmd_tree(t_opt);
    if (name == "domain") return cmd_domain(d_opt);
    if (name == "components") return cmd_components(c_opt);
    if (name == "dynamics") return cmd_dynamics(dy_opt, probe);
    if (name == "limitset") return cmd_limitset(l_opt);
    if (name == "homeo") return cmd_homeo(h_opt, other, subs);
    if (name == "export") return cmd_export(e_opt);
    std::cerr << "error: unknown subcommand\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
