#include "sheafkit/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <optional>
#include <sstream>

#include "sheafkit/error.hpp"
#include "sheafkit/etheory.hpp"
#include "sheafkit/interval_algebra.hpp"
#include "sheafkit/intertwine.hpp"
#include "sheafkit/io.hpp"
#include "sheafkit/towers.hpp"

namespace sheafkit {

namespace {

using io::Json;

// Raised for results that are well-defined but empty (no factorization, no inverse).
struct Infeasible {
  std::string message;
};

struct Output {
  std::ostream& out;
  bool json = false;

  void emit(const Json& j, const std::string& text) const {
    if (json)
      out << io::dump(j);
    else
      out << text << '\n';
  }
};

std::string vector_string(std::span<const Integer> v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i].get_str();
  return s + ")";
}

std::string lattice_string(const Lattice& l) {
  std::string s = "rank " + std::to_string(l.rank()) + "; basis [";
  for (std::size_t j = 0; j < l.rank(); ++j) s += (j ? ", " : "") + vector_string(l.basis_vector(j));
  return s + "]";
}

std::string hom_string(const HomGroup& g) {
  std::string s = "rank " + std::to_string(g.rank()) + "; basis [";
  const auto basis = g.basis();
  for (std::size_t j = 0; j < basis.size(); ++j) {
    const std::string t = to_string(basis[j]);
    s += (j ? ", " : "") + t.substr(1, t.size() - 2);
  }
  return s + "]";
}

ElementaryAlgebra load_algebra(const std::string& path) { return io::algebra_from_json(io::load_file(path)); }

// Blocks written as [] read as 0x0; give them the expected empty shape.
HomTuple conform(HomTuple t, const BlockShapes& shapes) {
  if (t.betas.size() != shapes.size()) return t;
  for (std::size_t k = 0; k < shapes.size(); ++k) {
    const auto [r, c] = shapes[k];
    if (t.betas[k].rows() == 0 && t.betas[k].cols() == 0 && (r == 0 || c == 0)) t.betas[k] = IntMatrix(r, c);
  }
  return t;
}

HomTuple load_tuple(const std::string& path, const ElementaryAlgebra& a, const ElementaryAlgebra& b,
                    const CombInterval& range) {
  io::MorphismFile m = io::morphism_from_json(io::load_file(path));
  if (!m.from.empty() && m.from != a.name)
    throw ValidationError("'" + path + "' is a morphism from '" + m.from + "', expected '" + a.name + "'");
  if (!m.to.empty() && m.to != b.name)
    throw ValidationError("'" + path + "' is a morphism to '" + m.to + "', expected '" + b.name + "'");
  return conform(std::move(m.tuple), hom_shapes(a, b, range));
}

HomTuple load_tuple(const std::string& path, const ElementaryAlgebra& a, const ElementaryAlgebra& b) {
  return load_tuple(path, a, b, CombInterval{1, a.n() + 1});
}

Json morphism_json(const std::string& from, const std::string& to, const HomTuple& t) {
  return io::to_json(io::MorphismFile{from, to, t});
}

// Checks the relations with plain matrix products, independent of the
// vectorized assembly used by the engine.
bool relations_hold_directly(const ElementaryAlgebra& a, const ElementaryAlgebra& b, const HomTuple& t) {
  for (std::size_t i = 1; i <= a.n(); ++i) {
    const int j = b.gamma(i, 0).is_identity() ? 0 : 1;
    const int jp = 1 - j;
    const IntMatrix lhs = t.betas[i + jp - 1] * a.gamma(i, jp);
    const IntMatrix rhs = b.gamma(i, jp) * t.betas[i + j - 1] * a.gamma(i, j);
    if (lhs != rhs) return false;
  }
  return true;
}

HomGroup default_hom(const ElementaryAlgebra& a, const ElementaryAlgebra& b) {
  return has_identity_sides(a) ? hom_sheaf(a, b) : hom_sheaf_via_delta(a, b);
}

// ------------------------------------------------------------ commands

int cmd_validate(const Output& o, const std::string& file) {
  const ElementaryAlgebra a = load_algebra(file);
  const ValidationReport r = validate(a);
  Json violations = Json::array();
  for (const auto& v : r.violations) violations.push_back(Json{{"index", v.index}, {"constraint", v.constraint}});
  std::string text = r.summary();
  if (r.ok()) text += r.special_elementary ? " (special elementary)" : "";
  o.emit(Json{{"name", a.name}, {"valid", r.ok()}, {"special_elementary", r.special_elementary},
              {"violations", violations}},
         text);
  return r.ok() ? kExitOk : kExitInvalid;
}

int cmd_k(const Output& o, const std::string& file, const std::string& interval) {
  const ElementaryAlgebra a = load_algebra(file);
  require_valid(a);
  const CombInterval range = CombInterval::parse(interval);
  const KPair k = k_groups(a, range);
  o.emit(Json{{"interval", range.to_string()},
              {"k0", io::to_json(k.k0_embedding)},
              {"k1", io::to_json(k.k1)},
              {"k1_derived", true}},
         "K0 " + lattice_string(k.k0_embedding) + "\nK1 " + k.k1.to_string() +
             " (derived from the defining extension)");
  return kExitOk;
}

int cmd_hom(const Output& o, const std::string& fa, const std::string& fb, bool via_delta, bool e1,
            bool general) {
  const ElementaryAlgebra a = load_algebra(fa);
  const ElementaryAlgebra b = load_algebra(fb);
  require_valid(a);
  require_valid(b);
  const bool relations = !via_delta && (general || has_identity_sides(a));
  const HomGroup g = relations ? hom_sheaf(a, b, general ? SourceCheck::AllowGeneral : SourceCheck::RequireStrict)
                               : hom_sheaf_via_delta(a, b);
  Json j{{"source", a.name}, {"target", b.name}, {"route", relations ? "relations" : "boundary"},
         {"hom", io::to_json(g)}};
  std::string text = hom_string(g);
  if (!relations && !via_delta) text += "\nroute: boundary map (source is not strict)";
  if (e1) {
    const FgAbGroup e = e1_group(a, b);
    j["e1"] = io::to_json(e);
    j["e1_derived"] = true;
    text += "\nE1 " + e.to_string() + " (derived from the boundary exact sequence)";
  }
  o.emit(j, text);
  return kExitOk;
}

int cmd_sky(const Output& o, std::size_t d_rank, const std::string& at, const std::string& fb, bool via_tower) {
  const ElementaryAlgebra b = load_algebra(fb);
  const SkyscraperLocation loc = SkyscraperLocation::parse(at);
  const GradedGroup g = via_tower ? skyscraper_e_via_tower(d_rank, loc, b) : skyscraper_e(d_rank, loc, b);
  o.emit(Json{{"location", loc.to_string()},
              {"d_rank", d_rank},
              {"route", via_tower ? "tower" : "closed form"},
              {"e0", io::to_json(g.e0)},
              {"e1", io::to_json(g.e1)}},
         "E0 " + g.e0.to_string() + "\nE1 " + g.e1.to_string());
  return kExitOk;
}

int cmd_restrict(const Output& o, const std::string& fa, const std::string& fb, const std::string& from,
                 const std::string& to, const std::string& tuple_file) {
  const ElementaryAlgebra a = load_algebra(fa);
  const ElementaryAlgebra b = load_algebra(fb);
  const CombInterval i = CombInterval::parse(from);
  const CombInterval j = CombInterval::parse(to);
  const HomTuple t = load_tuple(tuple_file, a, b, i);
  if (!e_subinterval(a, b, i).contains(t))
    throw MembershipError("tuple is not in E over " + i.to_string());
  const HomTuple r = restrict_hom(a, b, i, j, t);
  if (!e_subinterval(a, b, j).contains(r))
    throw std::logic_error("restriction left E over " + j.to_string());
  o.emit(Json{{"from", i.to_string()}, {"to", j.to_string()}, {"betas", io::to_json(r)}}, to_string(r));
  return kExitOk;
}

int cmd_pullback(const Output& o, const std::string& fa, const std::string& fb, const std::string& y,
                 const std::string& z) {
  const ElementaryAlgebra a = load_algebra(fa);
  const ElementaryAlgebra b = load_algebra(fb);
  const PullbackReport r = pullback_check(a, b, CombInterval::parse(y), CombInterval::parse(z));
  Json j{{"holds", r.holds}, {"disjoint", r.disjoint}, {"union_rank", r.union_rank},
         {"pullback_rank", r.pullback_rank}};
  std::string text = std::string("pullback property: ") + (r.holds ? "holds" : "fails");
  if (r.witness) {
    j["witness"] = io::to_json(*r.witness);
    text += "\nwitness " + to_string(*r.witness);
  }
  o.emit(j, text);
  return r.holds ? kExitOk : kExitInvalid;
}

int cmd_compose(const Output& o, const std::vector<std::string>& files) {
  const ElementaryAlgebra a = load_algebra(files[0]);
  const ElementaryAlgebra b = load_algebra(files[1]);
  const ElementaryAlgebra c = load_algebra(files[2]);
  const HomTuple s = load_tuple(files[3], a, b);
  const HomTuple t = load_tuple(files[4], b, c);
  const HomTuple r = compose(a, b, c, s, t);
  o.emit(morphism_json(a.name, c.name, r), to_string(r));
  return kExitOk;
}

int cmd_invert(const Output& o, const std::string& fa, const std::string& fb, const std::string& ft) {
  const ElementaryAlgebra a = load_algebra(fa);
  const ElementaryAlgebra b = load_algebra(fb);
  const HomTuple t = load_tuple(ft, a, b);
  const auto inv = is_isomorphism(a, b, t);
  if (!inv) throw Infeasible{"not an isomorphism"};
  o.emit(morphism_json(b.name, a.name, *inv), to_string(*inv));
  return kExitOk;
}

int cmd_refine(const Output& o, const std::string& file, std::size_t segment) {
  const ElementaryAlgebra a = load_algebra(file);
  const ElementaryAlgebra r = refine(a, segment);
  o.out << io::dump(io::to_json(r));
  return kExitOk;
}

int cmd_factor(const Output& o, const std::vector<std::string>& files) {
  const ElementaryAlgebra a = load_algebra(files[0]);
  const ElementaryAlgebra bs = load_algebra(files[1]);
  const ElementaryAlgebra bb = load_algebra(files[2]);
  const HomTuple psi = load_tuple(files[3], bs, bb);
  const HomTuple alpha = load_tuple(files[4], a, bb);
  const auto f = factor(a, bs, bb, psi, alpha);
  if (!f) throw Infeasible{"no factorization: alpha does not factor through psi"};
  o.emit(Json{{"mu", morphism_json(a.name, bs.name, f->mu)}, {"kernel", io::to_json(f->kernel)}},
         "mu " + to_string(f->mu) + "\nkernel " + hom_string(f->kernel));
  return kExitOk;
}

int cmd_intertwine(const Output& o, const std::string& file) {
  const io::IntertwineInput in = io::intertwine_from_json(io::load_file(file));
  const IntertwineReport r = intertwine(in.a, in.b, in.alpha);
  Json steps = Json::array();
  std::string text;
  for (const auto& s : r.steps) {
    const bool mu = s.kind == ZigzagStep::Kind::Mu;
    const std::string from = std::string(mu ? "A_" : "B_") + std::to_string(s.from);
    const std::string to = std::string(mu ? "B_" : "A_") + std::to_string(s.to);
    steps.push_back(Json{{"round", s.round}, {"kind", to_string(s.kind)}, {"from", from}, {"to", to},
                         {"betas", io::to_json(s.map)}});
    text += "round " + std::to_string(s.round) + " " + to_string(s.kind) + " " + from + " -> " + to + " " +
            to_string(s.map) + "\n";
  }
  Json j{{"complete", r.complete}, {"steps", steps}};
  if (r.failure) {
    j["failure"] = Json{{"round", r.failure->round}, {"kind", to_string(r.failure->kind)},
                        {"reason", r.failure->reason}};
    text += "failed at round " + std::to_string(r.failure->round) + " (" + to_string(r.failure->kind) +
            "): " + r.failure->reason;
  } else {
    text += "zigzag complete; all triangles verified";
  }
  o.emit(j, text);
  return r.complete ? kExitOk : kExitInfeasible;
}

int cmd_oracle(const Output& o, const std::string& fa, const std::string& fb, long box) {
  const ElementaryAlgebra a = load_algebra(fa);
  const ElementaryAlgebra b = load_algebra(fb);
  require_valid(a);
  require_valid(b);
  if (box < 0) throw RangeError("--box must be non-negative");
  const HomGroup g = default_hom(a, b);
  const BlockShapes& shapes = g.shapes();
  const std::size_t dim = vectorized_size(shapes);
  const std::size_t width = static_cast<std::size_t>(2 * box + 1);
  std::size_t total = 1;
  for (std::size_t i = 0; i < dim; ++i) {
    if (total > 20'000'000 / width) throw RangeError("oracle-check: box too large for this instance");
    total *= width;
  }

  std::size_t solutions = 0, missing = 0, spurious = 0;
  IntVector v(dim, Integer(-box));
  for (std::size_t count = 0; count < total; ++count) {
    const HomTuple t = devectorize(v, shapes);
    if (relations_hold_directly(a, b, t)) {
      ++solutions;
      if (!g.lattice().contains(v)) ++missing;
    }
    for (std::size_t i = 0; i < dim; ++i) {
      if (v[i] < box) {
        ++v[i];
        break;
      }
      v[i] = -box;
    }
  }
  for (const HomTuple& t : g.basis())
    if (!relations_hold_directly(a, b, t)) ++spurious;

  const bool agree = missing == 0 && spurious == 0;
  o.emit(Json{{"agree", agree}, {"checked", total}, {"solutions", solutions}, {"missing", missing},
              {"spurious_basis", spurious}},
         std::string("oracle: ") + (agree ? "agree" : "DISAGREE") + " (" + std::to_string(total) +
             " tuples checked, " + std::to_string(solutions) + " solutions, " + std::to_string(missing) +
             " missing, " + std::to_string(spurious) + " spurious basis tuples)");
  return agree ? kExitOk : kExitInvalid;
}

int cmd_tower(const Output& o, const std::string& file) {
  const Tower t = io::tower_from_json(io::load_file(file));
  validate(t);
  const bool ml = mittag_leffler(t);
  Json j{{"mittag_leffler", ml}, {"lim1", to_string(lim1_status(t))}};
  std::string text = std::string("Mittag-Leffler: ") + (ml ? "yes" : "no") + "\nlim1 " + to_string(lim1_status(t));
  if (ml) {
    const InverseLimit lim = inverse_limit(t);
    j["lim"] = io::to_json(lim.group);
    text += "\nlim " + lim.group.to_string();
  }
  o.emit(j, text);
  return kExitOk;
}

bool json_default() {
  const char* env = std::getenv("SHEAFKIT_OUTPUT");
  return env != nullptr && std::string(env) == "json";
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact K-theoretic invariants of elementary C[0,1]-algebras", "sheafkit"};
  app.require_subcommand(1);
  app.fallthrough();
  bool json = json_default();
  bool text_flag = false;
  app.add_flag("--json", json, "JSON output (default from SHEAFKIT_OUTPUT=json|text)");
  app.add_flag("--text", text_flag, "text output");

  std::string f1, f2, interval, at, from, to, y, z, tuple_file;
  std::vector<std::string> files;
  bool via_delta = false, e1 = false, general = false, via_tower = false;
  std::size_t d_rank = 1, segment = 1;
  long box = 2;

  auto* validate_cmd = app.add_subcommand("validate", "check an algebra file");
  validate_cmd->add_option("file", f1)->required();

  auto* k_cmd = app.add_subcommand("k", "K-groups of A restricted to an interval");
  k_cmd->add_option("file", f1)->required();
  k_cmd->add_option("--interval", interval, "p:q")->required();

  auto* hom_cmd = app.add_subcommand("hom", "E_[0,1](A, B) as a lattice of tuples");
  hom_cmd->add_option("a", f1)->required();
  hom_cmd->add_option("b", f2)->required();
  hom_cmd->add_flag("--via-delta", via_delta, "use the boundary-map route");
  hom_cmd->add_flag("--e1", e1, "also print E^1");
  hom_cmd->add_flag("--general-source", general, "use the relation route for a source without identity sides");

  auto* sky_cmd = app.add_subcommand("sky", "E-groups of a skyscraper algebra into B");
  sky_cmd->add_option("--d-rank", d_rank, "rank of K_0(D)")->required();
  sky_cmd->add_option("--at", at, "x_i, seg_k, end0 or end1")->required();
  sky_cmd->add_option("b", f1)->required();
  sky_cmd->add_flag("--via-tower", via_tower, "compute through the inverse system of windows");

  auto* restrict_cmd = app.add_subcommand("restrict", "restrict a tuple to a subinterval");
  restrict_cmd->add_option("a", f1)->required();
  restrict_cmd->add_option("b", f2)->required();
  restrict_cmd->add_option("--from", from)->required();
  restrict_cmd->add_option("--to", to)->required();
  restrict_cmd->add_option("--tuple", tuple_file)->required();

  auto* pullback_cmd = app.add_subcommand("pullback-check", "check the pullback square for Y and Z");
  pullback_cmd->add_option("a", f1)->required();
  pullback_cmd->add_option("b", f2)->required();
  pullback_cmd->add_option("--y", y)->required();
  pullback_cmd->add_option("--z", z)->required();

  auto* compose_cmd = app.add_subcommand("compose", "t o s for s: A -> B, t: B -> C");
  compose_cmd->add_option("files", files, "A B C s t")->required()->expected(5);

  auto* invert_cmd = app.add_subcommand("invert", "inverse of a morphism, if it is an isomorphism");
  invert_cmd->add_option("a", f1)->required();
  invert_cmd->add_option("b", f2)->required();
  invert_cmd->add_option("tuple", tuple_file)->required();

  auto* refine_cmd = app.add_subcommand("refine", "split a segment with a trivial singular point");
  refine_cmd->add_option("file", f1)->required();
  refine_cmd->add_option("--segment", segment)->required();

  auto* factor_cmd = app.add_subcommand("factor", "all mu with psi o mu = alpha");
  factor_cmd->add_option("files", files, "A Bsmall Bbig psi alpha")->required()->expected(5);

  auto* intertwine_cmd = app.add_subcommand("intertwine", "finite-stage zigzag between two systems");
  intertwine_cmd->add_option("file", f1, "system file")->required();

  auto* oracle_cmd = app.add_subcommand("oracle-check", "compare hom(A, B) with brute-force enumeration");
  oracle_cmd->add_option("a", f1)->required();
  oracle_cmd->add_option("b", f2)->required();
  oracle_cmd->add_option("--box", box, "entries range over [-box, box]")->capture_default_str();

  auto* tower_cmd = app.add_subcommand("tower", "inverse limit and lim^1 status of a tower");
  tower_cmd->add_option("file", f1)->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }
  if (text_flag) json = false;
  const Output o{out, json};

  try {
    if (*validate_cmd) return cmd_validate(o, f1);
    if (*k_cmd) return cmd_k(o, f1, interval);
    if (*hom_cmd) return cmd_hom(o, f1, f2, via_delta, e1, general);
    if (*sky_cmd) return cmd_sky(o, d_rank, at, f1, via_tower);
    if (*restrict_cmd) return cmd_restrict(o, f1, f2, from, to, tuple_file);
    if (*pullback_cmd) return cmd_pullback(o, f1, f2, y, z);
    if (*compose_cmd) return cmd_compose(o, files);
    if (*invert_cmd) return cmd_invert(o, f1, f2, tuple_file);
    if (*refine_cmd) return cmd_refine(o, f1, segment);
    if (*factor_cmd) return cmd_factor(o, files);
    if (*intertwine_cmd) return cmd_intertwine(o, f1);
    if (*oracle_cmd) return cmd_oracle(o, f1, f2, box);
    if (*tower_cmd) return cmd_tower(o, f1);
  } catch (const Infeasible& e) {
    err << "infeasible: " << e.message << '\n';
    return kExitInfeasible;
  } catch (const sheafkit::ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kExitParse;
  } catch (const RangeError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const UnsupportedError& e) {
    err << "unsupported: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const ValidationError& e) {
    err << "invalid: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const ShapeError& e) {
    err << "shape error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const MembershipError& e) {
    err << "membership error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitUsage;
}

}  // namespace sheafkit
