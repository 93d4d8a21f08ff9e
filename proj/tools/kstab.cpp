// kstab: command-line front end for the K-stability toolkit.

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "kstab/biconic.hpp"
#include "kstab/casefile.hpp"
#include "kstab/filtration.hpp"
#include "kstab/okounkov.hpp"
#include "kstab/soliton.hpp"
#include "kstab/stability.hpp"
#include "kstab/surfgeom.hpp"

using namespace kstab;

namespace {

using Oct = boost::multiprecision::cpp_bin_float_oct;

template <class T>
struct Tag {
  using type = T;
};

/// KSTAB_PRECISION in mantissa bits: <= 64 long double, <= 113 quad (default), else octuple.
int precision_bits() {
  const char* env = std::getenv("KSTAB_PRECISION");
  if (!env || !*env) return 113;
  std::string v = env;
  if (v == "long double") return 64;
  if (v == "quad") return 113;
  if (v == "oct") return 237;
  try {
    std::size_t used = 0;
    int bits = std::stoi(v, &used);
    if (used == v.size() && bits > 0) return bits;
  } catch (const std::exception&) {
  }
  throw ParseError("KSTAB_PRECISION must be a bit count or one of 'long double', 'quad', 'oct', got '" + v + "'");
}

template <class F>
int with_precision(F&& f) {
  int bits = precision_bits();
  if (bits <= 64) return f(Tag<long double>{});
  if (bits <= 113) return f(Tag<Quad>{});
  return f(Tag<Oct>{});
}

template <class Real>
std::string precision_name() {
  if constexpr (std::is_same_v<Real, long double>)
    return "long double";
  else if constexpr (std::is_same_v<Real, Quad>)
    return "quad";
  else
    return "oct";
}

// A flat table rendered in the three output formats.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> r) { rows.push_back(std::move(r)); }

  std::string render(ReportFormat fmt) const {
    std::ostringstream os;
    switch (fmt) {
      case ReportFormat::Text: {
        std::vector<std::size_t> w(header.size());
        for (std::size_t c = 0; c < header.size(); ++c) w[c] = header[c].size();
        for (const auto& r : rows)
          for (std::size_t c = 0; c < r.size(); ++c) w[c] = std::max(w[c], r[c].size());
        auto line = [&](const std::vector<std::string>& r) {
          for (std::size_t c = 0; c < r.size(); ++c) {
            os << (c ? "  " : "");
            if (c + 1 < r.size())
              os << std::left << std::setw(static_cast<int>(w[c])) << r[c];
            else
              os << r[c];
          }
          os << "\n";
        };
        line(header);
        for (const auto& r : rows) line(r);
        break;
      }
      case ReportFormat::Csv:
        for (std::size_t c = 0; c < header.size(); ++c) os << (c ? "," : "") << csv_field(header[c]);
        os << "\n";
        for (const auto& r : rows) {
          for (std::size_t c = 0; c < r.size(); ++c) os << (c ? "," : "") << csv_field(r[c]);
          os << "\n";
        }
        break;
      case ReportFormat::Json: {
        Json arr = Json::array();
        for (const auto& r : rows) {
          Json o = Json::object();
          for (std::size_t c = 0; c < r.size(); ++c) o[header[c]] = r[c];
          arr.push_back(o);
        }
        os << arr.dump(2) << "\n";
        break;
      }
    }
    return os.str();
  }
};

Table key_values(std::vector<std::pair<std::string, std::string>> kv) {
  Table t{{"quantity", "value"}, {}};
  for (auto& [k, v] : kv) t.add({k, v});
  return t;
}

// ---------------------------------------------------------------------------

int cmd_dh(const std::string& ref, ReportFormat fmt, int samples) {
  auto dh = dh_from(load_case(ref));
  const auto& f = dh.density;
  if (samples > 0) {
    Table t{{"s", "density"}, {}};
    for (int i = 0; i <= samples; ++i) {
      Rational s = f.lower() + (f.upper() - f.lower()) * make_rational(i, samples);
      t.add({to_string(s), to_string(f(s))});
    }
    std::cout << t.render(fmt);
    return 0;
  }
  Table t{{"from", "to", "density"}, {}};
  for (std::size_t i = 0; i < f.size(); ++i) {
    std::ostringstream p;
    p << f.piece(i);
    t.add({to_string(f.breakpoints()[i]), to_string(f.breakpoints()[i + 1]), p.str()});
  }
  t.add({to_string(f.lower()), to_string(f.upper()), "mass " + to_string(pw_mass(f))});
  std::cout << t.render(fmt);
  return 0;
}

int cmd_soliton(const std::string& ref, ReportFormat fmt, double tol) {
  auto dh = dh_from(load_case(ref));
  return with_precision([&](auto tag) {
    using Real = typename decltype(tag)::type;
    auto c = minimize_h<Real>(dh, Real(tol));
    std::cout << key_values({{"xi0", format_real(c.xi0)},
                             {"residual", format_real(c.residual, 3)},
                             {"bracket_lo", format_real(c.lo)},
                             {"bracket_hi", format_real(c.hi)},
                             {"iterations", std::to_string(c.iterations)},
                             {"Bv^g", format_real(bv(dh, Weight<Real>::Exp(c.xi0)))},
                             {"precision", precision_name<Real>()}})
                     .render(fmt);
    return 0;
  });
}

int cmd_sg(const std::string& ref, ReportFormat fmt, const std::string& point) {
  auto cf = load_case(ref);
  if (cf.kind == "pencil-case" && point.empty()) throw ParseError("pencil cases need --point");
  PencilCase pc;
  std::optional<SurfaceCase> sc;
  if (cf.kind == "surface-case") sc = surface_from(cf);
  if (!point.empty()) pc = sc ? derive_pencil(*sc) : pencil_from(cf);
  WeightKind wk = sc ? sc->weight : pc.weight;
  std::string target = point.empty() ? "divisor " + sc->refining : "point " + point;

  if (wk == WeightKind::Unit) {
    Rational s = point.empty() ? sg_divisor_exact(*sc) : sg_point_exact(pc, point);
    Rational a = point.empty() ? sc->a_value : 1 - point_orbifold(pc, point);
    std::cout << key_values({{"target", target},
                             {"weight", "unit"},
                             {"S", to_string(s)},
                             {"S_decimal", format_real(to_real<Quad>(s))},
                             {"A", to_string(a)},
                             {"A/S", to_string(a / s)}})
                     .render(fmt);
    return 0;
  }
  const DHMeasure& dh = sc ? sc->dh : pc.dh;
  return with_precision([&](auto tag) {
    using Real = typename decltype(tag)::type;
    auto w = Weight<Real>::Exp(minimize_h<Real>(dh).xi0);
    Real s = point.empty() ? sg_divisor<Real>(*sc, w) : sg_point<Real>(pc, point, w);
    Rational a = point.empty() ? sc->a_value : 1 - point_orbifold(pc, point);
    std::cout << key_values({{"target", target},
                             {"weight", "soliton"},
                             {"xi0", format_real(w.xi0)},
                             {"Bv^g", format_real(bv(dh, w))},
                             {"S^g", format_real(s)},
                             {"A", to_string(a)},
                             {"A/S^g", format_real(to_real<Real>(a) / s)},
                             {"precision", precision_name<Real>()}})
                     .render(fmt);
    return 0;
  });
}

int cmd_zariski(const std::string& ref, ReportFormat fmt, const std::vector<std::string>& at) {
  if (at.size() != 2) throw ParseError("--at needs two rationals s t");
  auto sc = surface_from(load_case(ref));
  Rational s = parse_rational(at[0]), t = parse_rational(at[1]);
  auto z = zariski_at(sc.lattice, sc.family, s, t);
  std::string n;
  for (const auto& [i, c] : z.negative) n += (n.empty() ? "" : " + ") + ("(" + to_string(c) + ")" + sc.lattice.curves[i].name);
  const auto& piece = sc.family.pieces[sc.family.locate(s)];
  std::cout << key_values({{"s", to_string(s)},
                           {"t", to_string(t)},
                           {"D", format_class(sc.lattice, piece.cls.at(s, t))},
                           {"P", format_class(sc.lattice, z.positive)},
                           {"N", n.empty() ? "0" : n},
                           {"volume", to_string(z.volume)}})
                   .render(fmt);
  return 0;
}

Json git_json(const BiconicForm& f, const GITVerdict& v) {
  Json pts = Json::array();
  for (const auto& p : v.singularities.points) pts.push_back({{"x", to_string(p.x)}, {"y", to_string(p.y)}, {"type", to_string(p.tag)}});
  Json nr = Json::array();
  for (const auto& p : v.singularities.nonreduced) nr.push_back({{"component", p.component}, {"type", to_string(p.tag)}});
  Json out = {{"form", to_string(f)},
              {"class", to_string(v.cls)},
              {"semistable", is_semistable(v.cls)},
              {"reason", v.reason},
              {"components", v.components},
              {"singular_points", pts},
              {"nonreduced", nr},
              {"weighted_k_verdict", to_string(verdict_2_23a(v).kind)}};
  if (v.destabilizer) {
    const auto& d = *v.destabilizer;
    out["destabilizer"] = {{"x", to_string(d.x)}, {"y", to_string(d.y)}, {"weights", {d.weights.first, d.weights.second}}};
  } else {
    out["destabilizer"] = nullptr;
  }
  return out;
}

int cmd_git(const std::vector<std::string>& args, ReportFormat fmt) {
  BiconicForm f;
  if (args.size() == 9) {
    std::vector<Rational> c;
    for (const auto& a : args) c.push_back(parse_rational(a));
    f = BiconicForm::from_list(c);
  } else if (args.size() == 1) {
    f = biconic_from(load_case(args[0]));
  } else {
    throw ParseError("git takes nine rationals a00 a01 a02 a10 ... a22 or one case file");
  }
  auto v = git_classify(f);
  auto j = git_json(f, v);
  if (fmt == ReportFormat::Json) {
    std::cout << j.dump(2) << "\n";
    return 0;
  }
  std::string pts;
  for (const auto& p : j["singular_points"]) pts += (pts.empty() ? "" : "; ") + p["type"].get<std::string>() + " at (" + p["x"].get<std::string>() + ", " + p["y"].get<std::string>() + ")";
  for (const auto& p : j["nonreduced"]) pts += (pts.empty() ? "" : "; ") + p["type"].get<std::string>() + " " + p["component"].get<std::string>();
  std::string d = "none";
  if (v.destabilizer)
    d = "weights (" + std::to_string(v.destabilizer->weights.first) + ", " + std::to_string(v.destabilizer->weights.second) + ") at (" +
        to_string(v.destabilizer->x) + ", " + to_string(v.destabilizer->y) + ")";
  std::cout << key_values({{"form", to_string(f)},
                           {"class", to_string(v.cls)},
                           {"reason", v.reason},
                           {"singularities", pts.empty() ? "none" : pts},
                           {"destabilizer", d},
                           {"weighted_k_verdict", to_string(verdict_2_23a(v).kind)}})
                   .render(fmt);
  return 0;
}

int cmd_delta(const std::string& family, ReportFormat fmt) {
  auto root = delta_tree(family);
  Table t{{"node", "A", "S", "ratio"}, {}};
  auto add = [&](const AZNode<Rational>& n, const std::string& path) {
    t.add({path, to_string(n.a_value - n.orbifold), to_string(n.s_value), to_string(node_ratio(n))});
  };
  add(root, root.label);
  for (const auto& c : root.children) {
    add(c, c.label);
    for (const auto& l : c.children) add(l, c.label + " > " + l.label);
    t.add({c.label + " bound", "", "", to_string(az_lower_bound(c).value)});
  }
  auto v = delta_verdict(root);
  t.add({"delta(X)", "", "", to_string(*v.value) + " minimized by " + join_path(v.witness)});
  std::cout << t.render(fmt);
  return 0;
}

int cmd_verify(ReportFormat fmt, bool unit_only, const std::string& tilt) {
  SuiteOptions opt;
  opt.unit_only = unit_only;
  if (!tilt.empty()) opt.dh_tilt = parse_rational(tilt);
  return with_precision([&](auto tag) {
    using Real = typename decltype(tag)::type;
    auto rows = run_suite<Real>(opt);
    std::cout << format_report(rows, fmt);
    return all_pass(rows) ? 0 : static_cast<int>(ErrorClass::Mismatch);
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kstab: K-stability toolkit for Fano threefolds 2.23"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string format = "text";
  app.add_option("--format,-f", format, "Output format")->check(CLI::IsMember({"text", "csv", "json"}));

  std::string ref, point, family, tilt;
  int samples = 0;
  double tol = kSolitonTol;
  bool unit_only = false;
  std::vector<std::string> at, git_args;

  auto* dh = app.add_subcommand("dh", "DH density table and mass of a body or dh-measure file");
  dh->add_option("case", ref, "Case file or builtin key")->required();
  dh->add_option("--samples", samples, "Emit (s, density) at N+1 equally spaced points");

  auto* sol = app.add_subcommand("soliton", "Soliton candidate xi0, residual, and Bv^g");
  sol->add_option("case", ref, "Case file or builtin key")->required();
  sol->add_option("--tol", tol, "Tolerance on |H'(xi0)|");

  auto* sg = app.add_subcommand("sg", "S^g of the refining divisor, or of a point with --point");
  sg->add_option("case", ref, "Case file or builtin key")->required();
  sg->add_option("--point", point, "Point id, 'generic', or merged ids like p3=p4");

  auto* zar = app.add_subcommand("zariski", "Zariski decomposition at (s, t)");
  zar->add_option("case", ref, "Case file or builtin key")->required();
  zar->add_option("--at", at, "s t")->expected(2)->required();

  auto* git = app.add_subcommand("git", "GIT class of a (2,2)-form");
  git->add_option("form", git_args, "Nine rationals a00 a01 a02 a10 a11 a12 a20 a21 a22, or a case file")->required();

  auto* delta = app.add_subcommand("delta", "Delta invariant estimate for a subfamily");
  delta->add_option("family", family, "2.23a or 2.23b")->required()->check(CLI::IsMember({"2.23a", "2.23b"}));

  auto* verify = app.add_subcommand("verify", "Run the full verification suite");
  verify->add_flag("--unit-only", unit_only, "Exact unit-weight rows only");
  verify->add_option("--perturb-dh", tilt, "Multiply the density feeding xi0 by (1 + eps s)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ErrorClass::Parse);
  }

  try {
    auto fmt = parse_report_format(format);
    if (*dh) return cmd_dh(ref, fmt, samples);
    if (*sol) return cmd_soliton(ref, fmt, tol);
    if (*sg) return cmd_sg(ref, fmt, point);
    if (*zar) return cmd_zariski(ref, fmt, at);
    if (*git) return cmd_git(git_args, fmt);
    if (*delta) return cmd_delta(family, fmt);
    if (*verify) return cmd_verify(fmt, unit_only, tilt);
  } catch (const Error& e) {
    std::cerr << "kstab: " << e.what() << "\n";
    return e.exit_code();
  } catch (const Json::exception& e) {
    std::cerr << "kstab: " << e.what() << "\n";
    return static_cast<int>(ErrorClass::Parse);
  } catch (const std::exception& e) {
    std::cerr << "kstab: " << e.what() << "\n";
    return static_cast<int>(ErrorClass::MathDomain);
  }
  return static_cast<int>(ErrorClass::Parse);
}
