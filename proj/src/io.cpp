#include "sheafkit/io.hpp"

#include <fstream>
#include <limits>
#include <sstream>

namespace sheafkit::io {

namespace {

[[noreturn]] void bad(const std::string& where, const std::string& what) {
  throw ParseError(where + ": " + what);
}

const Json& field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object()) bad(where, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) bad(where, std::string("missing field '") + key + "'");
  return *it;
}

std::size_t count_from_json(const Json& j, const std::string& where) {
  if (!j.is_number_integer() || j.get<std::int64_t>() < 0) bad(where, "expected a non-negative integer");
  return j.get<std::size_t>();
}

std::vector<std::size_t> counts_from_json(const Json& j, const std::string& where) {
  if (!j.is_array()) bad(where, "expected an array");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(count_from_json(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<IntMatrix> matrices_from_json(const Json& j, const std::string& where) {
  if (!j.is_array()) bad(where, "expected an array of matrices");
  std::vector<IntMatrix> out;
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(matrix_from_json(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

Json matrices_to_json(const std::vector<IntMatrix>& ms) {
  Json out = Json::array();
  for (const auto& m : ms) out.push_back(to_json(m));
  return out;
}

InductiveSystem system_from_json(const Json& j, const std::string& where) {
  InductiveSystem sys;
  const Json& stages = field(j, "stages", where);
  if (!stages.is_array()) bad(where + ".stages", "expected an array of algebras");
  for (const auto& s : stages) sys.stages.push_back(algebra_from_json(s));
  const Json& maps = field(j, "maps", where);
  if (!maps.is_array()) bad(where + ".maps", "expected an array of tuples");
  for (const auto& m : maps) sys.maps.push_back(morphism_from_json(m).tuple);
  return sys;
}

}  // namespace

Json load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("'" + path.string() + "': " + e.what());
  }
}

Json to_json(const Integer& v) {
  if (v.fits_slong_p()) return Json(static_cast<std::int64_t>(v.get_si()));
  return Json(v.get_str());
}

Integer integer_from_json(const Json& j, const std::string& where) {
  if (j.is_number_unsigned()) return Integer(std::to_string(j.get<std::uint64_t>()));
  if (j.is_number_integer()) return Integer(std::to_string(j.get<std::int64_t>()));
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    Integer v;
    if (s.empty() || v.set_str(s, 10) != 0) bad(where, "'" + s + "' is not a decimal integer");
    return v;
  }
  bad(where, "expected an integer");
}

Json to_json(const IntMatrix& m) {
  if (m.empty()) return Json{{"rows", m.rows()}, {"cols", m.cols()}};
  Json rows = Json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

IntMatrix matrix_from_json(const Json& j, const std::string& where) {
  if (j.is_object()) {
    const std::size_t rows = count_from_json(field(j, "rows", where), where + ".rows");
    const std::size_t cols = count_from_json(field(j, "cols", where), where + ".cols");
    if (rows != 0 && cols != 0) bad(where, "the {rows, cols} form is only for empty matrices");
    return IntMatrix(rows, cols);
  }
  if (!j.is_array()) bad(where, "expected an array of rows");
  if (j.empty()) return IntMatrix(0, 0);
  std::vector<IntVector> rows;
  std::size_t cols = 0;
  for (std::size_t r = 0; r < j.size(); ++r) {
    const std::string rw = where + "[" + std::to_string(r) + "]";
    if (!j[r].is_array()) bad(rw, "expected a row array");
    if (r == 0) cols = j[r].size();
    if (j[r].size() != cols) bad(rw, "ragged matrix");
    IntVector row;
    for (std::size_t c = 0; c < cols; ++c) row.push_back(integer_from_json(j[r][c], rw + "[" + std::to_string(c) + "]"));
    rows.push_back(std::move(row));
  }
  return IntMatrix::from_rows(rows, cols);
}

Json to_json(const ElementaryAlgebra& a) {
  Json j;
  j["name"] = a.name;
  j["n"] = a.n();
  if (a.coords) j["coords"] = *a.coords;
  j["d_ranks"] = a.d_ranks;
  j["h_ranks"] = a.h_ranks;
  j["gamma0"] = matrices_to_json(a.gamma0);
  j["gamma1"] = matrices_to_json(a.gamma1);
  j["strict_elementary"] = a.strict_elementary;
  return j;
}

ElementaryAlgebra algebra_from_json(const Json& j) {
  const std::string where = "algebra";
  ElementaryAlgebra a;
  const Json& name = field(j, "name", where);
  if (!name.is_string()) bad(where + ".name", "expected a string");
  a.name = name.get<std::string>();
  const std::string w = "algebra '" + a.name + "'";
  const std::size_t n = count_from_json(field(j, "n", w), w + ".n");
  if (const auto it = j.find("coords"); it != j.end() && !it->is_null()) {
    if (!it->is_array()) bad(w + ".coords", "expected an array of numbers");
    std::vector<double> xs;
    for (const auto& x : *it) {
      if (!x.is_number()) bad(w + ".coords", "expected numbers");
      xs.push_back(x.get<double>());
    }
    a.coords = std::move(xs);
  }
  a.d_ranks = counts_from_json(field(j, "d_ranks", w), w + ".d_ranks");
  a.h_ranks = counts_from_json(field(j, "h_ranks", w), w + ".h_ranks");
  a.gamma0 = matrices_from_json(field(j, "gamma0", w), w + ".gamma0");
  a.gamma1 = matrices_from_json(field(j, "gamma1", w), w + ".gamma1");
  const Json& strict = field(j, "strict_elementary", w);
  if (!strict.is_boolean()) bad(w + ".strict_elementary", "expected a boolean");
  a.strict_elementary = strict.get<bool>();
  if (a.d_ranks.size() != n)
    throw ValidationError(w + ": n = " + std::to_string(n) + " but d_ranks has " +
                          std::to_string(a.d_ranks.size()) + " entries");
  // A matrix with a zero dimension may be written as [], which reads as 0x0;
  // give it the shape the ranks call for.
  for (std::size_t i = 0; i < n; ++i) {
    if (i < a.gamma0.size() && a.gamma0[i].empty() && i < a.h_ranks.size() && (a.h_ranks[i] == 0 || a.d_ranks[i] == 0))
      a.gamma0[i] = IntMatrix(a.h_ranks[i], a.d_ranks[i]);
    if (i < a.gamma1.size() && a.gamma1[i].empty() && i + 1 < a.h_ranks.size() &&
        (a.h_ranks[i + 1] == 0 || a.d_ranks[i] == 0))
      a.gamma1[i] = IntMatrix(a.h_ranks[i + 1], a.d_ranks[i]);
  }
  return a;
}

Json to_json(const HomTuple& t) { return matrices_to_json(t.betas); }

HomTuple tuple_from_json(const Json& j, const std::string& where) {
  return HomTuple{matrices_from_json(j, where)};
}

Json to_json(const MorphismFile& m) {
  Json j;
  j["from"] = m.from;
  j["to"] = m.to;
  j["betas"] = to_json(m.tuple);
  return j;
}

MorphismFile morphism_from_json(const Json& j) {
  MorphismFile m;
  if (j.is_array()) {
    m.tuple = tuple_from_json(j, "tuple");
    return m;
  }
  const std::string where = "morphism";
  if (const auto it = j.find("from"); it != j.end()) {
    if (!it->is_string()) bad(where + ".from", "expected a string");
    m.from = it->get<std::string>();
  }
  if (const auto it = j.find("to"); it != j.end()) {
    if (!it->is_string()) bad(where + ".to", "expected a string");
    m.to = it->get<std::string>();
  }
  m.tuple = tuple_from_json(field(j, "betas", where), where + ".betas");
  return m;
}

Json to_json(const Tower& t) {
  Json j;
  j["ranks"] = t.ranks;
  j["maps"] = matrices_to_json(t.maps);
  j["iterated_self_map"] = t.iterated_self_map;
  return j;
}

Tower tower_from_json(const Json& j) {
  const std::string where = "tower";
  if (j.contains("torsion"))
    throw UnsupportedError("tower: stages with torsion are not supported; stages are free of the given ranks");
  Tower t;
  t.ranks = counts_from_json(field(j, "ranks", where), where + ".ranks");
  t.maps = matrices_from_json(field(j, "maps", where), where + ".maps");
  if (const auto it = j.find("iterated_self_map"); it != j.end()) {
    if (!it->is_boolean()) bad(where + ".iterated_self_map", "expected a boolean");
    t.iterated_self_map = it->get<bool>();
  }
  // Empty matrices written as [] take their shape from the ranks.
  for (std::size_t k = 0; k < t.maps.size(); ++k) {
    if (!t.maps[k].empty()) continue;
    const std::size_t rows = t.iterated_self_map ? t.ranks.at(0) : (k < t.ranks.size() ? t.ranks[k] : 0);
    const std::size_t cols = t.iterated_self_map ? t.ranks.at(0) : (k + 1 < t.ranks.size() ? t.ranks[k + 1] : 0);
    if (rows == 0 || cols == 0) t.maps[k] = IntMatrix(rows, cols);
  }
  return t;
}

Json to_json(const FgAbGroup& g) {
  Json torsion = Json::array();
  for (const auto& d : g.torsion()) torsion.push_back(to_json(d));
  return Json{{"rank", g.free_rank()}, {"torsion", torsion}};
}

Json to_json(const HomGroup& g) {
  Json basis = Json::array();
  for (const auto& t : g.basis()) basis.push_back(to_json(t));
  return Json{{"rank", g.rank()}, {"torsion", Json::array()}, {"basis", basis}};
}

Json to_json(const Lattice& l) {
  Json basis = Json::array();
  for (std::size_t j = 0; j < l.rank(); ++j) {
    Json v = Json::array();
    for (const auto& x : l.basis_vector(j)) v.push_back(to_json(x));
    basis.push_back(std::move(v));
  }
  return Json{{"rank", l.rank()}, {"torsion", Json::array()}, {"basis", basis}};
}

IntertwineInput intertwine_from_json(const Json& j) {
  IntertwineInput in;
  in.a = system_from_json(field(j, "a", "intertwine"), "intertwine.a");
  in.b = system_from_json(field(j, "b", "intertwine"), "intertwine.b");
  in.alpha = morphism_from_json(field(j, "alpha", "intertwine")).tuple;
  return in;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace sheafkit::io
