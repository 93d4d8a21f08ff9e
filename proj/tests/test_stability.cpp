#include <gtest/gtest.h>

#include <random>

#include "kstab/stability.hpp"

using namespace kstab;

namespace {

Rational R(long long p, long long q = 1) { return make_rational(p, q); }

AZNode<double> leaf(std::string id, double s, Rational c = 0) { return {std::move(id), 1, s, c, {}}; }

const std::vector<SuiteRow>& full_run() {
  static const auto rows = run_suite<Quad>();
  return rows;
}

}  // namespace

TEST(AZLowerBound, SingleNodeWithAEqualS) {
  AZNode<Rational> n{"F", R(3), R(3), 0, {}};
  EXPECT_EQ(az_lower_bound(n).value, 1);
  AZNode<double> d{"F", R(2), 2.0, 0, {}};
  EXPECT_DOUBLE_EQ(az_lower_bound(d).value, 1.0);
}

TEST(AZLowerBound, OrbifoldLeafAndListedArguments) {
  // Only the listed leaves enter the minimum.
  AZNode<double> e{"E", R(3), 2.782066, 0, {leaf("p0", 0.325861, R(1, 2)), leaf("p1", 0.782066)}};
  auto refine = az_lower_bound(e.children[0]).value < az_lower_bound(e.children[1]).value ? az_lower_bound(e.children[0])
                                                                                            : az_lower_bound(e.children[1]);
  EXPECT_NEAR(refine.value, 1 / 0.782066, 1e-15);
  EXPECT_EQ(refine.witness, std::vector<std::string>{"p1"});
  EXPECT_NEAR(node_ratio(e.children[0]), 0.5 / 0.325861, 1e-15);
  auto b = az_lower_bound(e);
  EXPECT_NEAR(b.value, 3 / 2.782066, 1e-15);
  EXPECT_EQ(b.witness, std::vector<std::string>{"E"});
}

TEST(AZLowerBound, WitnessIsPathToMinimizer) {
  AZNode<Rational> root{"X", 1, R(1, 2), 0, {}};
  AZNode<Rational> mid{"F", 2, R(1), 0, {{"q", 1, R(3, 2), 0, {}}, {"r", 1, R(1, 2), 0, {}}}};
  root.children.push_back(mid);
  auto b = az_lower_bound(root);
  EXPECT_EQ(b.value, R(2, 3));
  EXPECT_EQ(b.witness, (std::vector<std::string>{"X", "F", "q"}));
}

TEST(AZLowerBound, MonotoneInS) {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(0.2, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    AZNode<double> root{"E", R(2), u(rng), 0, {leaf("a", u(rng)), leaf("b", u(rng), R(1, 2)), leaf("c", u(rng))}};
    double before = az_lower_bound(root).value;
    auto bumped = root;
    std::size_t pick = static_cast<std::size_t>(trial) % 4;
    (pick == 0 ? bumped.s_value : bumped.children[pick - 1].s_value) *= 1.5;
    EXPECT_LE(az_lower_bound(bumped).value, before);
  }
}

TEST(AZLowerBound, RejectsMalformedNodes) {
  EXPECT_THROW(az_lower_bound(AZNode<Rational>{"F", R(0), R(1), 0, {}}), ParseError);
  EXPECT_THROW(az_lower_bound(AZNode<Rational>{"F", R(1), R(0), 0, {}}), ParseError);
  EXPECT_THROW(az_lower_bound(AZNode<Rational>{"p", R(1), R(1), R(1), {}}), ParseError);
}

TEST(TreeVerdict, ExactAndBoundary) {
  EXPECT_EQ(tree_verdict(AZNode<Rational>{"E", 2, R(2), 0, {}}).kind, VerdictKind::Semistable);
  EXPECT_EQ(tree_verdict(AZNode<Rational>{"E", 2, R(3), 0, {}}).kind, VerdictKind::Unstable);
  EXPECT_EQ(tree_verdict(AZNode<Rational>{"E", 2, R(1), 0, {}}).kind, VerdictKind::Polystable);
  auto v = tree_verdict(AZNode<double>{"E", 1, 1 + 1e-12, 0, {}});
  EXPECT_EQ(v.kind, VerdictKind::Semistable);
  EXPECT_TRUE(v.boundary());
  EXPECT_EQ(v.note, "boundary: consistent with = 1");
  EXPECT_EQ(tree_verdict(AZNode<double>{"E", 1, 1 + 1e-6, 0, {}}).kind, VerdictKind::Unstable);
  EXPECT_EQ(tree_verdict(AZNode<double>{"E", 1, 1 - 1e-6, 0, {}}).kind, VerdictKind::Polystable);
}

TEST(Verdict2_23a, CorrespondenceTable) {
  auto of = [](const std::string& name) {
    return verdict_2_23a(git_classify(biconic_from(load_case("2.23a.moduli." + name))));
  };
  EXPECT_EQ(of("smooth").kind, VerdictKind::Polystable);
  EXPECT_EQ(of("four_rulings").kind, VerdictKind::Polystable);
  EXPECT_EQ(of("node").kind, VerdictKind::Semistable);
  auto u = of("ruling_tangent");
  EXPECT_EQ(u.kind, VerdictKind::Unstable);
  ASSERT_EQ(u.witness.size(), 2u);
  EXPECT_NE(u.witness[1].find("destabilizing weights"), std::string::npos);
}

TEST(WeightedTrees, MatchEstimateConclusions) {
  struct Want {
    const char* key;
    VerdictKind kind;
    bool boundary;
  };
  using enum VerdictKind;
  for (const auto& w : {Want{"2.23a.caseA", Polystable, false}, Want{"2.23a.caseB1", Polystable, false},
                        Want{"2.23a.caseB2", Semistable, true}, Want{"2.23a.caseB3", Unstable, false},
                        Want{"2.23a.caseC2", Polystable, false}, Want{"2.23a.caseC3", Semistable, true},
                        Want{"2.23a.caseC4", Unstable, false}, Want{"2.23b.caseE", Semistable, true},
                        Want{"2.23b.ordH", Unstable, false}}) {
    SCOPED_TRACE(w.key);
    auto v = tree_verdict(weighted_tree<Quad>(surface_from(load_case(w.key)), listed_points(w.key)));
    EXPECT_EQ(v.kind, w.kind);
    EXPECT_EQ(v.boundary(), w.boundary);
  }
}

TEST(WeightedTrees, CaseCBoundEqualsRootRatio) {
  auto sc = surface_from(load_case("2.23a.caseC2"));
  auto t = weighted_tree<Quad>(sc, listed_points("2.23a.caseC2"));
  auto b = az_lower_bound(t);
  EXPECT_EQ(b.witness, std::vector<std::string>{"E"});
  // S(E) = 2 + q with q the ruling value of Case A.
  auto a = surface_from(load_case("2.23a.caseA"));
  Quad q = sg_divisor<Quad>(a, resolve_weight<Quad>(a));
  EXPECT_LT(abs(b.value - 3 / (2 + q)), Quad(1e-20));
}

TEST(DeltaTree, BothFamiliesMinimizedByH) {
  for (std::string fam : {"2.23a", "2.23b"}) {
    auto v = delta_verdict(delta_tree(fam));
    EXPECT_EQ(v.kind, VerdictKind::DeltaValue);
    EXPECT_EQ(*v.value, R(12, 13));
    EXPECT_EQ(v.witness, std::vector<std::string>{"H~"});
  }
  auto a = delta_tree("2.23a");
  ASSERT_EQ(a.children.size(), 3u);
  EXPECT_EQ(az_lower_bound(a.children[0]).value, R(40, 31));
  EXPECT_EQ(az_lower_bound(a.children[1]).value, R(120, 109));
  EXPECT_EQ(az_lower_bound(a.children[2]).value, R(24, 25));
  auto b = delta_tree("2.23b");
  EXPECT_EQ(az_lower_bound(b.children[0]).value, R(30, 31));
  EXPECT_EQ(az_lower_bound(b.children[1]).value, R(30, 31));
  EXPECT_EQ(az_lower_bound(b.children[2]).value, R(180, 187));
  EXPECT_THROW(delta_tree("2.24"), ParseError);
}

TEST(Suite, CoversEveryCriterion) {
  std::set<int> seen;
  for (const auto& r : full_run()) seen.insert(r.criterion);
  EXPECT_EQ(seen, (std::set<int>{1, 2, 3, 4, 5, 6, 7, 8, 9, 10}));
}

TEST(Suite, OnlyPrintedSolitonDigitsDisagree) {
  std::vector<std::string> failing;
  for (const auto& r : full_run())
    if (!r.pass) failing.push_back(r.quantity);
  EXPECT_EQ(failing, (std::vector<std::string>{"xi0 (2.23a)", "eta0 (2.23b)"}));
}

TEST(Suite, PerturbedDensityOnlyMovesXi0) {
  SuiteOptions opt;
  opt.dh_tilt = R(1, 10);
  auto tilted = run_suite<Quad>(opt);
  const auto& base = full_run();
  ASSERT_EQ(tilted.size(), base.size());
  for (std::size_t i = 0; i < base.size(); ++i) {
    SCOPED_TRACE(base[i].quantity);
    EXPECT_EQ(tilted[i].quantity, base[i].quantity);
    if (base[i].quantity == "xi0 (2.23a)") {
      EXPECT_NE(tilted[i].computed, base[i].computed);
      EXPECT_FALSE(tilted[i].pass);
    } else {
      EXPECT_EQ(tilted[i].computed, base[i].computed);
      EXPECT_EQ(tilted[i].pass, base[i].pass);
    }
  }
}

TEST(Suite, UnitWeightRunIsExact) {
  SuiteOptions opt;
  opt.unit_only = true;
  auto rows = run_suite<Quad>(opt);
  EXPECT_GE(rows.size(), 20u);
  for (const auto& r : rows) {
    EXPECT_EQ(r.criterion, 6);
    EXPECT_TRUE(r.pass) << r.quantity;
    EXPECT_TRUE(r.delta == "exact" || r.delta == "ok") << r.quantity;
  }
}

TEST(Report, Formats) {
  std::vector<SuiteRow> rows{{6, "S, exact", "13/12", "13/12", "exact", true}, {2, "xi0", "0.27", "0.28", "1e-2", false}};
  auto csv = format_report(rows, ReportFormat::Csv);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "criterion,quantity,computed,expected,delta,pass");
  EXPECT_NE(csv.find("\"S, exact\""), std::string::npos);
  auto j = Json::parse(format_report(rows, ReportFormat::Json));
  EXPECT_FALSE(j["all_pass"].get<bool>());
  EXPECT_EQ(j["rows"].size(), 2u);
  EXPECT_EQ(j["rows"][0]["computed"], "13/12");
  auto text = format_report(rows, ReportFormat::Text);
  EXPECT_NE(text.find("1/2 rows pass"), std::string::npos);
  EXPECT_EQ(parse_report_format("csv"), ReportFormat::Csv);
  EXPECT_THROW(parse_report_format("xml"), ParseError);
}
