#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "kstab/casefile.hpp"
#include "kstab/filtration.hpp"

using namespace kstab;

namespace {

struct Run {
  std::string out;
  int code;
};

Run kstab_cli(const std::string& args, const std::string& env = "") {
  std::string cmd = env + (env.empty() ? "" : " ") + KSTAB_CLI_PATH + std::string(" ") + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  std::string out;
  std::array<char, 4096> buf;
  while (std::size_t n = fread(buf.data(), 1, buf.size(), p)) out.append(buf.data(), n);
  int status = pclose(p);
  return {out, WEXITSTATUS(status)};
}

Json read_json(const std::filesystem::path& p) {
  std::ifstream in(p);
  return Json::parse(in);
}

std::filesystem::path temp_file(const std::string& name, const Json& j) {
  auto p = std::filesystem::temp_directory_path() / ("kstab_test_" + name + ".json");
  std::ofstream(p) << j.dump(2);
  return p;
}

Json strings(const std::vector<Rational>& v) {
  Json a = Json::array();
  for (const auto& x : v) a.push_back(to_string(x));
  return a;
}

}  // namespace

TEST(Registry, HasEveryKey) {
  std::vector<std::string> want = {"2.23a.body",      "2.23a.dh",       "2.23a.caseA",       "2.23a.caseB1",
                                   "2.23a.caseB2",    "2.23a.caseB3",   "2.23a.caseB4",      "2.23a.caseC2",
                                   "2.23a.caseC3",    "2.23a.caseC4",   "2.23b.body",        "2.23b.dh",
                                   "2.23b.caseE",     "2.23b.ordH",     "delta.a.caseA",     "delta.a.caseB",
                                   "delta.a.caseC",   "delta.b.caseA",  "delta.b.caseB",     "delta.b.caseC",
                                   "threefold.volcurve.2.23", "threefold.volcurve.2.23b.Eo"};
  auto keys = builtin_keys();
  for (const auto& k : want) EXPECT_NE(std::find(keys.begin(), keys.end(), k), keys.end()) << k;
  std::size_t moduli = std::count_if(keys.begin(), keys.end(), [](const std::string& k) { return k.rfind("2.23a.moduli.", 0) == 0; });
  EXPECT_GE(moduli, 12u);
}

TEST(Registry, EveryFileValidatesForItsKind) {
  for (const auto& k : builtin_keys()) {
    SCOPED_TRACE(k);
    auto c = load_case(k);
    EXPECT_EQ(c.schema_version, 1);
    EXPECT_FALSE(c.comment.empty());
    if (c.kind == "okounkov-body" || c.kind == "dh-measure") {
      EXPECT_EQ(pw_mass(dh_from(c).density), 5);
    } else if (c.kind == "volume-curve") {
      EXPECT_NO_THROW(volume_curve_from(c));
    } else if (c.kind == "biconic-form") {
      EXPECT_NO_THROW(biconic_from(c));
    } else {
      EXPECT_EQ(c.kind, "surface-case");
      EXPECT_NO_THROW(surface_from(c));
    }
  }
}

TEST(Registry, ResolvesReferences) {
  EXPECT_EQ(resolve_case_path("builtin:2.23a.caseA"), resolve_case_path("2.23a.caseA"));
  EXPECT_EQ(resolve_case_path("builtin:2.23b"), resolve_case_path("2.23b.dh"));
  EXPECT_EQ(load_case(resolve_case_path("2.23a.dh").string()).kind, "dh-measure");
  EXPECT_THROW(resolve_case_path("builtin:no.such.case"), CaseFileMissing);
  EXPECT_THROW(load_case("/nonexistent/file.json"), CaseFileMissing);
}

TEST(Registry, DataDirFromEnvironment) {
  auto dir = std::filesystem::temp_directory_path() / "kstab_test_data";
  std::filesystem::create_directories(dir / "cases");
  std::filesystem::copy_file(resolve_case_path("2.23a.dh"), dir / "cases" / "only.json",
                             std::filesystem::copy_options::overwrite_existing);
  setenv("KSTAB_DATA_DIR", dir.c_str(), 1);
  auto keys = builtin_keys();
  unsetenv("KSTAB_DATA_DIR");
  EXPECT_EQ(keys, std::vector<std::string>{"only"});
}

TEST(CaseFile, SchemaErrors) {
  Json good = {{"schema_version", 1}, {"kind", "dh-measure"}, {"breakpoints", {"0", "1"}}, {"pieces", {{"1"}}}};
  EXPECT_EQ(pw_mass(dh_from(parse_case_json(good)).density), 1);
  auto bad = [&](auto mutate) {
    Json j = good;
    mutate(j);
    return j;
  };
  EXPECT_THROW(parse_case_json(bad([](Json& j) { j.erase("schema_version"); })), ParseError);
  EXPECT_THROW(parse_case_json(bad([](Json& j) { j["schema_version"] = 2; })), ParseError);
  EXPECT_THROW(parse_case_json(bad([](Json& j) { j["kind"] = "polytope"; })), ParseError);
  EXPECT_THROW(dh_from(parse_case_json(bad([](Json& j) { j["pieces"] = {{1}}; }))), ParseError);
  EXPECT_THROW(dh_from(parse_case_json(bad([](Json& j) { j["breakpoints"] = {"1", "0"}; }))), ParseError);
  EXPECT_THROW(dh_from(parse_case_json(bad([](Json& j) { j["pieces"] = Json::array(); }))), ParseError);
  EXPECT_THROW(biconic_from(parse_case_json(good)), ParseError);
  Json form = {{"schema_version", 1}, {"kind", "biconic-form"}, {"coefficients", {"1", "2"}}};
  EXPECT_THROW(biconic_from(parse_case_json(form)), ParseError);
}

TEST(CaseFile, SurfaceCaseErrors) {
  Json base = read_json(resolve_case_path("delta.a.caseB"));
  auto load = [&](auto mutate) {
    Json j = base;
    mutate(j);
    return surface_from(parse_case_json(j));
  };
  EXPECT_NO_THROW(load([](Json&) {}));
  EXPECT_THROW(load([](Json& j) { j["weight"] = "cubic"; }), ParseError);
  EXPECT_THROW(load([](Json& j) { j["a_value"] = "0"; }), ParseError);
  EXPECT_THROW(load([](Json& j) { j["lattice"]["gram"][0][0] = 0.5; }), ParseError);
  EXPECT_THROW(load([](Json& j) { j["incidence"][0]["point"] = "zz"; }), ParseError);
  EXPECT_THROW(load([](Json& j) { j["dh"] = "missing.case"; }), CaseFileMissing);
  EXPECT_THROW(load([](Json& j) { j.erase("family"); }), ParseError);
  // A fixed curve without a declared point only fails once a pencil is derived.
  auto sc = load([](Json& j) { j["incidence"].erase(2); });
  EXPECT_THROW(derive_pencil(sc), MissingIncidence);
}

TEST(CaseFile, PencilCaseRoundTrip) {
  auto sc = surface_from(load_case("delta.a.caseB"));
  auto pc = derive_pencil(sc);
  Json cells = Json::array();
  for (const auto& c : pc.cells) {
    Json mult = Json::object();
    for (const auto& [id, m] : c.mult) mult[id] = strings({m.c, m.cs, m.ct});
    cells.push_back({{"s", strings({c.region.s0, c.region.s1})},
                     {"t_lo", strings(c.region.lo.coeffs())},
                     {"t_hi", strings(c.region.hi.coeffs())},
                     {"degree", strings({c.degree.c, c.degree.cs, c.degree.ct})},
                     {"mult", mult}});
  }
  Json points = Json::array();
  for (const auto& p : pc.points) points.push_back({{"id", p.id}, {"orbifold", to_string(p.orbifold)}});
  Json j = {{"schema_version", 1}, {"kind", "pencil-case"}, {"comment", "round trip"}, {"weight", "unit"},
            {"dh", "2.23a.dh"},    {"points", points},        {"cells", cells}};
  auto path = temp_file("pencil", j);
  auto back = pencil_from(load_case(path.string()));
  for (std::string id : {"generic", "p1", "p2", "p3", "p1=p3"}) EXPECT_EQ(sg_point_exact(back, id), sg_point_exact(pc, id)) << id;
  j["cells"][0]["mult"]["nope"] = strings({1, 0, 0});
  EXPECT_THROW(pencil_from(parse_case_json(j)), UnknownPoint);
}

TEST(Cli, GitTorusInvariantForm) {
  auto r = kstab_cli("git 0 0 0 0 1 0 0 0 0 --format json");
  ASSERT_EQ(r.code, 0);
  auto j = Json::parse(r.out);
  EXPECT_EQ(j["class"], "polystable");
  EXPECT_EQ(j["destabilizer"], nullptr);
  EXPECT_EQ(j["singular_points"].size(), 4u);
}

TEST(Cli, GitUnstableCarriesCertificate) {
  auto r = kstab_cli("git builtin:2.23a.moduli.triple_point -f json");
  ASSERT_EQ(r.code, 0);
  auto j = Json::parse(r.out);
  EXPECT_EQ(j["class"], "unstable");
  ASSERT_TRUE(j["destabilizer"].is_object());
  EXPECT_EQ(j["weighted_k_verdict"], "weighted-K-unstable");
}

TEST(Cli, SolitonBuiltin) {
  auto r = kstab_cli("soliton builtin:2.23a -f json");
  ASSERT_EQ(r.code, 0);
  auto j = Json::parse(r.out);
  ASSERT_EQ(j[0]["quantity"], "xi0");
  double xi = std::stod(j[0]["value"].get<std::string>());
  // Independent closed-form minimizer.
  EXPECT_NEAR(xi, 0.27379184887668864, 1e-15);
  EXPECT_NEAR(xi, 0.2737918510108124, 1e-8);
}

TEST(Cli, PrecisionOverride) {
  auto r = kstab_cli("soliton 2.23b.dh -f csv", "KSTAB_PRECISION=64");
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("precision,long double"), std::string::npos);
  EXPECT_NE(r.out.find("xi0,0.1546428238366"), std::string::npos);
  EXPECT_EQ(kstab_cli("soliton 2.23b.dh", "KSTAB_PRECISION=lots").code, 1);
}

TEST(Cli, SgExactAndWeighted) {
  auto r = kstab_cli("sg delta.b.caseC --point p0 -f csv");
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("S,31/120"), std::string::npos);
  EXPECT_NE(r.out.find("A/S,60/31"), std::string::npos);
  auto w = kstab_cli("sg 2.23a.caseC3 --point p2=p4 -f csv");
  ASSERT_EQ(w.code, 0);
  EXPECT_NE(w.out.find("S^g,0.5"), std::string::npos);
}

TEST(Cli, OutputIsDeterministic) {
  auto a = kstab_cli("sg 2.23a.caseB1 --point p3");
  auto b = kstab_cli("sg 2.23a.caseB1 --point p3");
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out.find("0.73931147947845785"), std::string::npos);
}

TEST(Cli, ZariskiMatchesLibrary) {
  auto r = kstab_cli("zariski 2.23a.caseB1 --at -1/2 3 -f json");
  ASSERT_EQ(r.code, 0);
  auto j = Json::parse(r.out);
  auto sc = surface_from(load_case("2.23a.caseB1"));
  std::string vol;
  for (const auto& row : j)
    if (row["quantity"] == "volume") vol = row["value"];
  EXPECT_EQ(parse_rational(vol), vol_at(sc.lattice, sc.family, make_rational(-1, 2), 3));
}

TEST(Cli, DhTableAndSamples) {
  auto r = kstab_cli("dh 2.23a.body -f csv");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "from,to,density");
  EXPECT_NE(r.out.find("mass 5"), std::string::npos);
  auto s = kstab_cli("dh 2.23a.dh --samples 3 -f csv");
  EXPECT_EQ(s.out, "s,density\n-1,1\n0,4\n1,1\n2,0\n");
}

TEST(Cli, DeltaReport) {
  for (std::string fam : {"2.23a", "2.23b"}) {
    auto r = kstab_cli("delta " + fam);
    ASSERT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("12/13 minimized by H~"), std::string::npos);
  }
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(kstab_cli("").code, 1);
  EXPECT_EQ(kstab_cli("sg no.such.case").code, 1);
  EXPECT_EQ(kstab_cli("git 1 2 3").code, 1);
  EXPECT_EQ(kstab_cli("git 0 0 0 0 0 0 0 0 0").code, 1);
  EXPECT_EQ(kstab_cli("delta 2.24").code, 1);
  EXPECT_EQ(kstab_cli("zariski 2.23a.caseB1 --at 5 0").code, 2);
  EXPECT_EQ(kstab_cli("sg 2.23a.caseB1 --point p9").code, 1);
  EXPECT_EQ(kstab_cli("verify --unit-only").code, 0);
}

TEST(Cli, VerifyReportsEveryCriterion) {
  auto r = kstab_cli("verify -f json");
  auto j = Json::parse(r.out);
  std::set<int> crit;
  std::vector<std::string> failing;
  for (const auto& row : j["rows"]) {
    crit.insert(row["criterion"].get<int>());
    if (!row["pass"].get<bool>()) failing.push_back(row["quantity"]);
  }
  EXPECT_EQ(crit.size(), 10u);
  // Mismatch exit while the printed soliton digits disagree with the computed minimizers.
  EXPECT_EQ(r.code, failing.empty() ? 0 : 3);
  EXPECT_EQ(failing, (std::vector<std::string>{"xi0 (2.23a)", "eta0 (2.23b)"}));
}
