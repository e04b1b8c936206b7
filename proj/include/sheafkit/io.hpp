#pragma once

// JSON reading and writing for algebras, tuples, towers and results.
// Integers outside the int64 range are written as decimal strings and read
// back from either form.

#include <filesystem>
#include <string>

#include <json.hpp>

#include "sheafkit/etheory.hpp"
#include "sheafkit/intertwine.hpp"
#include "sheafkit/towers.hpp"

namespace sheafkit::io {

using Json = nlohmann::ordered_json;

/// Reads and parses a file; IO and syntax problems become ParseError.
Json load_file(const std::filesystem::path& path);

Json to_json(const Integer& v);
Integer integer_from_json(const Json& j, const std::string& where);

/// Array of rows; matrices with a zero dimension use {"rows": r, "cols": c}.
Json to_json(const IntMatrix& m);
IntMatrix matrix_from_json(const Json& j, const std::string& where);

Json to_json(const ElementaryAlgebra& a);
ElementaryAlgebra algebra_from_json(const Json& j);

/// Tuple as a list of matrices.
Json to_json(const HomTuple& t);
HomTuple tuple_from_json(const Json& j, const std::string& where);

/// {"from", "to", "betas"}.
struct MorphismFile {
  std::string from;
  std::string to;
  HomTuple tuple;
};
Json to_json(const MorphismFile& m);
/// Accepts the object form or a bare list of matrices.
MorphismFile morphism_from_json(const Json& j);

/// {"ranks": [...], "maps": [...], "iterated_self_map": bool}.
Json to_json(const Tower& t);
Tower tower_from_json(const Json& j);

/// {"rank", "torsion", "basis"} for a lattice of tuples.
Json to_json(const HomGroup& g);
/// {"rank", "torsion"}.
Json to_json(const FgAbGroup& g);
Json to_json(const Lattice& l);

/// {"a": {"stages": [...], "maps": [...]}, "b": {...}, "alpha": tuple}.
struct IntertwineInput {
  InductiveSystem a;
  InductiveSystem b;
  HomTuple alpha;
};
IntertwineInput intertwine_from_json(const Json& j);

/// Deterministic serialization (two-space indent, trailing newline).
std::string dump(const Json& j);

}  // namespace sheafkit::io
