#pragma once

// JSON case files and the built-in registry. Every number is a string holding an exact
// rational ("5/18").

#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "kstab/biconic.hpp"
#include "kstab/errors.hpp"
#include "kstab/exactnum.hpp"
#include "kstab/filtration.hpp"
#include "kstab/okounkov.hpp"
#include "kstab/surfgeom.hpp"

#ifndef KSTAB_DATA_DIR
#define KSTAB_DATA_DIR "data"
#endif

namespace kstab {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

inline const std::set<std::string>& case_kinds() {
  static const std::set<std::string> k{"okounkov-body", "dh-measure", "surface-case", "pencil-case", "volume-curve", "biconic-form"};
  return k;
}

// ---------------------------------------------------------------------------
// Locating files

inline std::filesystem::path data_dir() {
  if (const char* env = std::getenv("KSTAB_DATA_DIR")) return env;
  return KSTAB_DATA_DIR;
}

inline std::vector<std::string> builtin_keys() {
  std::vector<std::string> keys;
  auto dir = data_dir() / "cases";
  if (!std::filesystem::is_directory(dir)) return keys;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.path().extension() == ".json") keys.push_back(e.path().stem().string());
  std::sort(keys.begin(), keys.end());
  return keys;
}

/// "builtin:<key>", a bare registry key, or a path. A family name alone means its DH measure.
inline std::filesystem::path resolve_case_path(const std::string& ref) {
  std::string key = ref.rfind("builtin:", 0) == 0 ? ref.substr(8) : ref;
  if (key == "2.23a" || key == "2.23b") key += ".dh";
  auto builtin = data_dir() / "cases" / (key + ".json");
  if (std::filesystem::exists(builtin)) return builtin;
  if (ref.rfind("builtin:", 0) != 0 && std::filesystem::exists(ref)) return ref;
  throw CaseFileMissing(ref);
}

// ---------------------------------------------------------------------------
// Field access with schema errors

namespace json_detail {

inline const Json& field(const Json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) throw ParseError(std::string("missing field '") + name + "'");
  return j.at(name);
}

inline Rational rational(const Json& j) {
  if (!j.is_string()) throw ParseError("numbers must be strings, got " + j.dump());
  return parse_rational(j.get<std::string>());
}

inline std::vector<Rational> rationals(const Json& j) {
  if (!j.is_array()) throw ParseError("expected an array of rationals, got " + j.dump());
  std::vector<Rational> out;
  for (const auto& x : j) out.push_back(rational(x));
  return out;
}

inline std::string str(const Json& j, const char* name) {
  const auto& v = field(j, name);
  if (!v.is_string()) throw ParseError(std::string("field '") + name + "' must be a string");
  return v.get<std::string>();
}

inline Affine2 affine(const Json& j) {
  auto v = rationals(j);
  if (v.size() < 2 || v.size() > 3) throw ParseError("affine form needs [c, cs] or [c, cs, ct]");
  return {v[0], v[1], v.size() == 3 ? v[2] : Rational(0)};
}

inline PiecewisePoly piecewise(const Json& j) {
  auto bps = rationals(field(j, "breakpoints"));
  const auto& ps = field(j, "pieces");
  if (!ps.is_array() || ps.size() + 1 != bps.size()) throw ParseError("pieces must number breakpoints - 1");
  std::vector<Poly> pieces;
  for (const auto& p : ps) pieces.emplace_back(rationals(p));
  for (std::size_t i = 0; i + 1 < bps.size(); ++i)
    if (bps[i] >= bps[i + 1]) throw ParseError("breakpoints must increase");
  return PiecewisePoly(std::move(bps), std::move(pieces));
}

}  // namespace json_detail

struct CaseFile {
  int schema_version = kSchemaVersion;
  std::string kind;
  std::string comment;
  std::string source;  // where it was loaded from
  Json payload;
};

inline CaseFile parse_case_json(const Json& j, const std::string& source = "<inline>") {
  using namespace json_detail;
  CaseFile c;
  c.source = source;
  const auto& v = field(j, "schema_version");
  if (!v.is_number_integer() || v.get<int>() != kSchemaVersion)
    throw ParseError(source + ": unsupported schema_version " + v.dump());
  c.kind = str(j, "kind");
  if (!case_kinds().count(c.kind)) throw ParseError(source + ": unknown kind '" + c.kind + "'");
  if (j.contains("comment")) c.comment = str(j, "comment");
  c.payload = j;
  return c;
}

inline CaseFile load_case(const std::string& ref) {
  auto path = resolve_case_path(ref);
  std::ifstream in(path);
  if (!in) throw CaseFileMissing(path.string());
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return parse_case_json(j, path.string());
}

inline void expect_kind(const CaseFile& c, const std::string& kind) {
  if (c.kind != kind) throw ParseError(c.source + ": expected kind '" + kind + "', found '" + c.kind + "'");
}

// ---------------------------------------------------------------------------
// Per-kind payloads

inline LatticeBody body_from(const CaseFile& c) {
  using namespace json_detail;
  expect_kind(c, "okounkov-body");
  std::vector<Vec3> pts;
  for (const auto& p : field(c.payload, "points")) {
    auto v = rationals(p);
    if (v.size() != 3) throw ParseError(c.source + ": body points have 3 coordinates");
    pts.push_back({v[0], v[1], v[2]});
  }
  Rational shift = c.payload.contains("axis_shift") ? rational(c.payload["axis_shift"]) : Rational(0);
  return shift_axis(convex_hull(pts), shift);
}

inline DHMeasure dh_from(const CaseFile& c) {
  if (c.kind == "okounkov-body") return dh_from_body(body_from(c));
  expect_kind(c, "dh-measure");
  return {json_detail::piecewise(c.payload)};
}

inline VolumeCurve3D volume_curve_from(const CaseFile& c) {
  expect_kind(c, "volume-curve");
  VolumeCurve3D vc{json_detail::piecewise(c.payload), json_detail::rational(json_detail::field(c.payload, "total"))};
  vc.validate();
  return vc;
}

inline BiconicForm biconic_from(const CaseFile& c) {
  expect_kind(c, "biconic-form");
  return BiconicForm::from_list(json_detail::rationals(json_detail::field(c.payload, "coefficients")));
}

namespace json_detail {

inline NSLattice lattice(const Json& j) {
  NSLattice lat;
  for (const auto& n : field(j, "classes")) lat.class_names.push_back(n.get<std::string>());
  for (const auto& row : field(j, "gram")) lat.gram.push_back(rationals(row));
  if (j.contains("curves"))
    for (const auto& c : j["curves"]) lat.curves.push_back({str(c, "name"), rationals(field(c, "class"))});
  lat.validate();
  return lat;
}

inline DivisorFamily family(const Json& j) {
  DivisorFamily fam;
  if (!j.is_array() || j.empty()) throw ParseError("family must be a non-empty array of pieces");
  for (const auto& p : j) {
    auto s = rationals(field(p, "s"));
    if (s.size() != 2) throw ParseError("piece range 's' needs two entries");
    FamilyPiece fp;
    fp.s0 = s[0];
    fp.s1 = s[1];
    fp.cls = {rationals(field(p, "base")), rationals(field(p, "ds")), rationals(field(p, "dt"))};
    fp.t_max = affine(field(p, "t_max"));
    if (p.contains("fixed"))
      for (const auto& f : p["fixed"]) fp.fixed.push_back({str(f, "curve"), affine(field(f, "coeff"))});
    fam.pieces.push_back(std::move(fp));
  }
  return fam;
}

inline std::vector<MarkedPoint> points(const Json& j) {
  std::vector<MarkedPoint> pts;
  if (j.contains("points"))
    for (const auto& p : j["points"])
      pts.push_back({str(p, "id"), p.contains("orbifold") ? rational(p["orbifold"]) : Rational(0)});
  return pts;
}

inline WeightKind weight(const Json& j) {
  std::string w = str(j, "weight");
  if (w == "unit") return WeightKind::Unit;
  if (w == "soliton") return WeightKind::Soliton;
  throw ParseError("weight must be 'unit' or 'soliton', got '" + w + "'");
}

}  // namespace json_detail

inline SurfaceCase surface_from(const CaseFile& c) {
  using namespace json_detail;
  expect_kind(c, "surface-case");
  const Json& j = c.payload;
  SurfaceCase sc;
  sc.name = c.source;
  try {
    sc.lattice = lattice(field(j, "lattice"));
    sc.family = family(field(j, "family"));
    sc.weight = weight(j);
    sc.a_value = rational(field(j, "a_value"));
    const auto& ref = field(j, "refining");
    sc.refining = str(ref, "name");
    sc.refining_class = rationals(field(ref, "class"));
    if (j.contains("incidence"))
      for (const auto& i : j["incidence"]) sc.incidence.push_back({str(i, "curve"), str(i, "point"), rational(field(i, "mult"))});
    sc.points = points(j);
    sc.validate();
  } catch (const Json::exception& e) {
    throw ParseError(c.source + ": " + e.what());
  }
  std::string dh = str(j, "dh");
  sc.dh = dh == "family" ? DHMeasure{half_volume_at_zero(sc.lattice, sc.family)} : dh_from(load_case(dh));
  return sc;
}

inline PencilCase pencil_from(const CaseFile& c) {
  using namespace json_detail;
  if (c.kind == "surface-case") return derive_pencil(surface_from(c));
  expect_kind(c, "pencil-case");
  const Json& j = c.payload;
  PencilCase pc;
  pc.points = points(j);
  pc.weight = weight(j);
  for (const auto& cell : field(j, "cells")) {
    auto s = rationals(field(cell, "s"));
    if (s.size() != 2) throw ParseError(c.source + ": cell range 's' needs two entries");
    PencilCell pcell{{s[0], s[1], Poly(rationals(field(cell, "t_lo"))), Poly(rationals(field(cell, "t_hi")))},
                     affine(field(cell, "degree")),
                     {}};
    for (const auto& p : pc.points) pcell.mult[p.id] = Affine2{};
    if (cell.contains("mult"))
      for (const auto& [id, m] : cell["mult"].items()) {
        if (!pc.find(id)) throw UnknownPoint(c.source + ": '" + id + "'");
        pcell.mult[id] = affine(m);
      }
    pc.cells.push_back(std::move(pcell));
  }
  pc.dh = dh_from(load_case(str(j, "dh")));
  return pc;
}

}  // namespace kstab
