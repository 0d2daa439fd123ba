#pragma once

#include <json.hpp>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "algebroid.hpp"
#include "liepair.hpp"

namespace liekit {

using Json = nlohmann::ordered_json;

/// A malformed instance file: wrong shape, wrong type, an index out of
/// range, or a rational that does not parse. Kept apart from mathematical
/// failures so callers can map the two to different exit codes.
struct SchemaError : std::runtime_error {
  explicit SchemaError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Rationals travel as strings ("-3/2") so no reader ever rounds them.
inline Rat parse_rat(const Json& v, const std::string& where) {
  if (!v.is_string()) throw SchemaError(where + ": rationals must be strings");
  const std::string s = v.get<std::string>();
  auto bad = [&]() -> SchemaError {
    return SchemaError(where + ": '" + s + "' is not a rational of the form [-]digits[/digits]");
  };
  size_t i = 0;
  if (i < s.size() && s[i] == '-') ++i;
  size_t j = i;
  while (j < s.size() && s[j] >= '0' && s[j] <= '9') ++j;
  if (j == i) throw bad();
  if (j < s.size()) {
    if (s[j] != '/') throw bad();
    size_t k = ++j;
    bool all_zero = true;
    while (k < s.size() && s[k] >= '0' && s[k] <= '9') {
      if (s[k] != '0') all_zero = false;
      ++k;
    }
    if (k == j || k != s.size()) throw bad();
    if (all_zero) throw SchemaError(where + ": zero denominator in '" + s + "'");
  }
  return Rat(s);
}

namespace schema {

inline const Json& need(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object()) throw SchemaError(where + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw SchemaError(where + ": missing field '" + key + "'");
  return *it;
}

inline long long need_int(const Json& j, const char* key, const std::string& where) {
  const Json& v = need(j, key, where);
  if (!v.is_number_integer())
    throw SchemaError(where + ": field '" + key + "' must be an integer");
  return v.get<long long>();
}

inline std::string need_str(const Json& j, const char* key, const std::string& where) {
  const Json& v = need(j, key, where);
  if (!v.is_string()) throw SchemaError(where + ": field '" + key + "' must be a string");
  return v.get<std::string>();
}

inline const Json& need_array(const Json& j, const char* key, const std::string& where) {
  const Json& v = need(j, key, where);
  if (!v.is_array()) throw SchemaError(where + ": field '" + key + "' must be an array");
  return v;
}

inline std::vector<int> int_list(const Json& v, const std::string& where) {
  if (!v.is_array()) throw SchemaError(where + ": expected an array of integers");
  std::vector<int> out;
  for (const Json& e : v) {
    if (!e.is_number_integer()) throw SchemaError(where + ": expected an array of integers");
    out.push_back(int(e.get<long long>()));
  }
  return out;
}

}  // namespace schema

/// Sparse coefficients of one graded-coordinate vector: (slot, value) pairs.
using SparseCoords = std::vector<std::pair<int, Rat>>;

struct DeformSection {
  std::vector<std::string> variables;
  std::vector<std::vector<int>> ideal;   // exponent vectors generating the ideal
  std::vector<std::vector<int>> socles;  // one kernel monomial per lifting step, crossed in order
  // degree-one element over the smallest ring: one sparse block per named monomial
  std::vector<std::pair<std::vector<int>, SparseCoords>> element;
  std::vector<int> levels{0, 1};         // pairing levels k to report when a lift obstructs
  std::vector<SparseCoords> exploratory; // extra degree-two representatives, report only
};

struct TwoChartSection {
  int window = 6;
  int nmax = 3;
  std::vector<int> twists;
};

/// Everything an instance file can carry. Sections are optional; each
/// command states which ones it needs.
struct Instance {
  std::string name;
  std::vector<std::string> generators;
  // normalized brackets with i < j, at most one entry per (i, j, k)
  std::vector<std::tuple<int, int, int, Rat>> brackets;
  std::optional<std::vector<int>> sub;
  int fiber = 0;  // 0 when the file has no module section
  std::vector<std::vector<Rat>> connection;  // row-major fiber x fiber block per generator
  std::optional<DeformSection> deformation;
  std::optional<TwoChartSection> twochart;

  bool has_algebroid() const { return !generators.empty(); }
  bool has_module() const { return fiber > 0; }

  PointAlgebroid build_algebroid(const QRing& ring) const {
    PointAlgebroid g = PointAlgebroid::make(ring, generators);
    for (const auto& [i, j, k, c] : brackets) g.set_bracket(ring, i, j, k, c);
    return g;
  }

  std::vector<RMat<QRing>> build_connection(const QRing& ring) const {
    std::vector<RMat<QRing>> out;
    for (const auto& block : connection) {
      RMat<QRing> m(ring, fiber, fiber);
      for (int r = 0; r < fiber; ++r)
        for (int c = 0; c < fiber; ++c) m.at(r, c) = block[size_t(r * fiber + c)];
      out.push_back(m);
    }
    return out;
  }

  ModuleAction<QRing> build_action(const QRing& ring) const {
    if (!has_module()) return ModuleAction<QRing>::scalar_action();
    return ModuleAction<QRing>::module_action(build_connection(ring), {});
  }
};

namespace schema {

inline void parse_algebroid(const Json& a, Instance& inst) {
  const std::string where = "algebroid";
  const Json& gens = need_array(a, "generators", where);
  if (gens.empty()) throw SchemaError(where + ": needs at least one generator");
  for (const Json& g : gens) {
    if (!g.is_string()) throw SchemaError(where + ": generators must be strings");
    inst.generators.push_back(g.get<std::string>());
  }
  const int rank = int(inst.generators.size());
  std::map<std::tuple<int, int, int>, Rat> seen;
  if (a.contains("brackets")) {
    const Json& brs = need_array(a, "brackets", where);
    for (const Json& e : brs) {
      int i = int(need_int(e, "i", where + ".brackets"));
      int j = int(need_int(e, "j", where + ".brackets"));
      int k = int(need_int(e, "k", where + ".brackets"));
      Rat c = parse_rat(need(e, "c", where + ".brackets"), where + ".brackets");
      if (i < 0 || i >= rank || j < 0 || j >= rank || k < 0 || k >= rank)
        throw SchemaError(where + ".brackets: generator index out of range");
      if (i == j) {
        if (c != 0) throw SchemaError(where + ".brackets: [x, x] must vanish");
        continue;
      }
      // store with i < j; a transposed duplicate must carry the opposite sign
      Rat cn = i < j ? c : Rat(-c);
      auto key = std::make_tuple(std::min(i, j), std::max(i, j), k);
      auto it = seen.find(key);
      if (it != seen.end()) {
        if (it->second != cn)
          throw SchemaError(where + ".brackets: conflicting coefficients for one bracket");
        continue;
      }
      seen.emplace(key, cn);
    }
  }
  for (const auto& [key, c] : seen)
    inst.brackets.emplace_back(std::get<0>(key), std::get<1>(key), std::get<2>(key), c);
}

inline void parse_pair(const Json& p, Instance& inst) {
  const std::string where = "pair";
  std::vector<int> sub = int_list(need_array(p, "sub", where), where + ".sub");
  const int rank = int(inst.generators.size());
  std::vector<bool> used(size_t(rank), false);
  for (int i : sub) {
    if (i < 0 || i >= rank) throw SchemaError(where + ".sub: generator index out of range");
    if (used[size_t(i)]) throw SchemaError(where + ".sub: repeated generator index");
    used[size_t(i)] = true;
  }
  inst.sub = std::move(sub);
}

inline void parse_module(const Json& m, Instance& inst) {
  const std::string where = "module";
  long long fiber = need_int(m, "fiber", where);
  if (fiber < 1) throw SchemaError(where + ": fiber must be at least 1");
  inst.fiber = int(fiber);
  const Json& conn = need_array(m, "connection", where);
  if (int(conn.size()) != int(inst.generators.size()))
    throw SchemaError(where + ".connection: needs one block per generator");
  for (const Json& block : conn) {
    if (!block.is_array() || int(block.size()) != inst.fiber * inst.fiber)
      throw SchemaError(where + ".connection: each block must list fiber*fiber entries row-major");
    std::vector<Rat> vals;
    for (const Json& v : block) vals.push_back(parse_rat(v, where + ".connection"));
    inst.connection.push_back(std::move(vals));
  }
}

inline SparseCoords parse_sparse(const Json& arr, const std::string& where) {
  if (!arr.is_array()) throw SchemaError(where + ": expected an array of {slot, value}");
  SparseCoords out;
  for (const Json& e : arr) {
    int slot = int(need_int(e, "slot", where));
    if (slot < 0) throw SchemaError(where + ": negative slot");
    out.emplace_back(slot, parse_rat(need(e, "value", where), where));
  }
  return out;
}

inline void parse_deformation(const Json& d, Instance& inst) {
  const std::string where = "deformation";
  DeformSection out;
  const Json& ring = need(d, "ring", where);
  for (const Json& v : need_array(ring, "variables", where + ".ring")) {
    if (!v.is_string()) throw SchemaError(where + ".ring: variables must be strings");
    out.variables.push_back(v.get<std::string>());
  }
  if (out.variables.empty()) throw SchemaError(where + ".ring: needs at least one variable");
  const int nv = int(out.variables.size());
  auto exponents = [&](const Json& v, const char* what) {
    std::vector<int> e = int_list(v, where + std::string(".") + what);
    if (int(e.size()) != nv)
      throw SchemaError(where + ": " + what + " exponent vectors must match the variable count");
    for (int x : e)
      if (x < 0) throw SchemaError(where + ": negative exponent in " + what);
    return e;
  };
  for (const Json& v : need_array(ring, "ideal", where + ".ring"))
    out.ideal.push_back(exponents(v, "ideal"));
  if (d.contains("socles"))
    for (const Json& v : need_array(d, "socles", where)) out.socles.push_back(exponents(v, "socles"));
  if (d.contains("element")) {
    for (const Json& e : need_array(d, "element", where)) {
      std::vector<int> mono = exponents(need(e, "monomial", where + ".element"), "element");
      out.element.emplace_back(std::move(mono),
                               parse_sparse(need(e, "coords", where + ".element"), where + ".element"));
    }
  }
  if (d.contains("levels")) {
    out.levels = int_list(need_array(d, "levels", where), where + ".levels");
    for (int k : out.levels)
      if (k < 0) throw SchemaError(where + ".levels: negative level");
  }
  if (d.contains("exploratory"))
    for (const Json& e : need_array(d, "exploratory", where))
      out.exploratory.push_back(parse_sparse(e, where + ".exploratory"));
  inst.deformation = std::move(out);
}

inline void parse_twochart(const Json& t, Instance& inst) {
  const std::string where = "twochart";
  TwoChartSection out;
  out.window = int(need_int(t, "window", where));
  if (out.window < 1) throw SchemaError(where + ": window must be at least 1");
  if (t.contains("nmax")) {
    out.nmax = int(need_int(t, "nmax", where));
    if (out.nmax < 0) throw SchemaError(where + ": nmax must be nonnegative");
  }
  out.twists = int_list(need_array(t, "twists", where), where + ".twists");
  if (out.twists.empty()) throw SchemaError(where + ".twists: needs at least one twist");
  inst.twochart = std::move(out);
}

}  // namespace schema

inline Instance parse_instance(const Json& j) {
  if (!j.is_object()) throw SchemaError("instance: top level must be an object");
  if (schema::need_str(j, "format", "instance") != "liekit-instance")
    throw SchemaError("instance: format must be 'liekit-instance'");
  if (schema::need_int(j, "version", "instance") != 1)
    throw SchemaError("instance: unsupported version");
  const Json& ras = schema::need(j, "rationals-as-strings", "instance");
  if (!ras.is_boolean() || !ras.get<bool>())
    throw SchemaError("instance: 'rationals-as-strings' must be true");
  Instance inst;
  inst.name = schema::need_str(j, "name", "instance");
  if (j.contains("algebroid")) schema::parse_algebroid(j.at("algebroid"), inst);
  if (j.contains("pair")) {
    if (!inst.has_algebroid()) throw SchemaError("pair: needs an algebroid section");
    schema::parse_pair(j.at("pair"), inst);
  }
  if (j.contains("module")) {
    if (!inst.has_algebroid()) throw SchemaError("module: needs an algebroid section");
    schema::parse_module(j.at("module"), inst);
  }
  if (j.contains("deformation")) schema::parse_deformation(j.at("deformation"), inst);
  if (j.contains("twochart")) schema::parse_twochart(j.at("twochart"), inst);
  if (!inst.has_algebroid() && !inst.twochart)
    throw SchemaError("instance: needs an algebroid or a twochart section");
  return inst;
}

inline Instance parse_instance_text(const std::string& text) {
  Json j = Json::parse(text, nullptr, false);
  if (j.is_discarded()) throw SchemaError("instance: input is not valid JSON");
  return parse_instance(j);
}

}  // namespace liekit
