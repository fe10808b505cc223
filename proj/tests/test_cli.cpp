#include "doctest.h"
#include "prl/cli.hpp"

using namespace prl::cli;

namespace {

json task(const std::string& command, json params, json precision = {{"p", "5"}, {"abs_prec", "6"}}) {
  return {{"version", "1"}, {"command", command}, {"params", std::move(params)}, {"precision", std::move(precision)}};
}

Outcome run(const json& t, Options o = {}) { return run_task(t, o); }

std::string pointer_of(const Outcome& o) { return o.report["error"]["pointer"].get<std::string>(); }

json mat(std::initializer_list<std::initializer_list<const char*>> rows) {
  json out = json::array();
  for (auto r : rows) {
    json row = json::array();
    for (auto x : r) row.push_back(x);
    out.push_back(row);
  }
  return out;
}

}  // namespace

TEST_CASE("every documented command is registered") {
  auto names = command_names();
  for (const char* c : {"descent check", "descent monodromy", "descent from-n", "descent descends", "descent phi",
                        "node check", "node branch", "node center", "node descends", "affine check",
                        "affine monodromy", "affine rigidity", "points classify", "points gauss-norm",
                        "points spectral-norm", "points specializes", "points newton", "points stability",
                        "model build", "model specialize", "model shilov", "model dot", "cover partition",
                        "cover classify-point", "cover propagate", "dodge image", "dodge lemma46",
                        "dodge hn-exponent", "dodge hn-bound", "conn build", "conn residues", "conn solve",
                        "conn trivial"})
    CHECK(std::find(names.begin(), names.end(), c) != names.end());
  CHECK(names.size() == 33);
}

TEST_CASE("descent commands") {
  Outcome id = run(task("descent check", {{"T", {{"dim", "2"}, {"terms", {{{"coeff", mat({{"1", "0"}, {"0", "1"}})}}}}}}}));
  CHECK(id.exit_code == kExitOk);
  CHECK(id.report["verdict"] == "ok");
  CHECK(id.report["precision"] == "mod 5^6, to order 8");

  json n = mat({{"0", "3"}, {"0", "0"}});
  Outcome from = run(task("descent from-n", {{"N", n}}));
  REQUIRE(from.exit_code == kExitOk);
  // the emitted series reads back as the same datum
  Outcome back = run(task("descent monodromy", {{"T", from.report["T"]}}));
  CHECK(back.report["N"] == n);
  CHECK(run(task("descent check", {{"T", from.report["T"]}})).report["verdict"] == "ok");
  CHECK(run(task("descent descends", {{"N", n}})).report["verdict"] == "false");
  CHECK(run(task("descent descends", {{"N", mat({{"0"}})}})).report["verdict"] == "true");

  json bad{{"dim", "1"}, {"terms", {{{"coeff", mat({{"1"}})}}, {{"exps", {{"t", "2"}}}, {"coeff", mat({{"1"}})}}}}};
  Outcome fail = run(task("descent check", {{"T", bad}}));
  CHECK(fail.exit_code == kExitOk);
  CHECK(fail.report["verdict"] == "fail");
  CHECK(fail.report.contains("failing"));

  // N phi = p phi N with phi = diag(1, p) and N = E01
  Outcome phi = run(task("descent phi", {{"phi", mat({{"1", "0"}, {"0", "5"}})}, {"N", mat({{"0", "1"}, {"0", "0"}})}}));
  CHECK(phi.exit_code == kExitOk);
  CHECK(phi.report.contains("verdict"));
}

TEST_CASE("node and affine commands") {
  json n = mat({{"0", "2"}, {"0", "0"}});
  json p10{{"p", "5"}, {"abs_prec", "10"}, {"truncations", {{"order", "5"}}}};
  CHECK(run(task("node check", {{"N", n}}, p10)).report["verdict"] == "ok");
  CHECK(run(task("node descends", {{"N", n}}, p10)).report["verdict"] == "false");
  Outcome br = run(task("node branch", {{"N", n}, {"branch", "0"}}, p10));
  REQUIRE(br.exit_code == kExitOk);
  CHECK(br.report["monodromy"].size() == 4);
  CHECK(br.report["monodromy"]["3"] == n);
  Outcome ctr = run(task("node center", {{"N", n}, {"direction", {"2", "1"}}}, p10));
  CHECK(ctr.report["all_directions_trivial"] == "false");
  CHECK(ctr.report["directional_monodromy"] == mat({{"0", "4"}, {"0", "0"}}));

  json g = json::array({{{"i", "0"}, {"j", "1"}, {"c", "3"}, {"a", "1"}}});
  Outcome pull = run(task("node descends", {{"N", mat({{"0", "0"}, {"0", "0"}})}, {"gauge", g}}, p10));
  CHECK(pull.report["verdict"] == "true");

  CHECK(run(task("affine check", {{"N", n}, {"gauge", g}})).report["verdict"] == "ok");
  Outcome mono = run(task("affine monodromy", {{"N", n}, {"gauge", g}}));
  CHECK(mono.report["monodromy"].size() == 5);
  CHECK(mono.report["monodromy"]["0"] == n);
  json zero = mat({{"0", "0"}, {"0", "0"}});
  CHECK(run(task("affine rigidity", {{"N", zero}, {"gauge", g}, {"alpha", "2"}})).report["verdict"] == "ok");
  CHECK(run(task("affine rigidity", {{"N", n}, {"alpha", "2"}})).exit_code == kExitInput);
  Outcome bad_alpha = run(task("affine monodromy", {{"N", n}, {"alpha", "7"}}));
  CHECK(bad_alpha.exit_code == kExitInput);
  CHECK(pointer_of(bad_alpha) == "/params/alpha");
}

TEST_CASE("points commands") {
  Outcome g = run(task("points gauss-norm", {{"f", {{"poly", {"5", "0", "1"}}}}, {"v", "1"}}));
  CHECK(g.report["exponent"] == "1");
  json lf{{"coeffs", {{"-1", "1"}, {"2", "25"}}}};
  Outcome g2 = run(task("points gauss-norm", {{"f", lf}, {"v", "1/2"}}));
  CHECK(g2.report["exponent"] == "-1/2");
  CHECK(run(task("points spectral-norm", {{"f", {{"poly", {"0", "1"}}}}, {"v1", "1"}, {"v2", "2"}})).report["exponent"] ==
        "1");
  Outcome c = run(task("points classify", {{"point", {{"center", "3"}, {"radius", "rational"}, {"v", "1/2"}}}}));
  CHECK(c.report["kind"] == "II");
  Outcome iv = run(task("points classify", {{"point", {{"prefix", {{{"center", "0"}, {"v", "1"}}}}}}}));
  CHECK(iv.exit_code == kExitInput);
  CHECK(pointer_of(iv) == "/params/point");
  json x{{"center", "0"}, {"radius", "zero"}};
  json y{{"center", "0"}, {"radius", "rational"}, {"v", "1"}};
  CHECK(run(task("points specializes", {{"x", x}, {"y", x}})).report["verdict"] == "true");
  CHECK(run(task("points specializes", {{"x", x}, {"y", y}})).report.contains("verdict"));

  Outcome nw = run(task("points newton", {{"coeffs", {"25", "5", "1"}}}));
  REQUIRE(nw.exit_code == kExitOk);
  CHECK(nw.report["segments"] == json::array({{{"length", "2"}, {"slope", "1"}}}));
  CHECK(run(task("points stability", {{"coeffs", {"25", "5", "1"}}})).report["bounds"].size() == 3);
  CHECK(run(task("points newton", {{"coeffs", {"1", "5"}}})).exit_code == kExitInput);
}

TEST_CASE("model and cover commands") {
  Outcome m1 = run(task("model build", {{"m", "1"}}));
  CHECK(m1.report["components"].size() == 2);
  CHECK(m1.report["edges"].size() == 1);
  CHECK(m1.dot.find("C0 -- C1;") != std::string::npos);
  Outcome m3 = run(task("model dot", {{"m", "3"}}));
  CHECK(m3.dot.find("C3 [") != std::string::npos);
  CHECK(m3.report["dot"] == m3.dot);
  CHECK(run(task("model specialize", {{"m", "2"}, {"v", "1/2"}})).report["target"] == "node(0,1)");
  Outcome sm = run(task("model specialize", {{"m", "2"}, {"v", "1"}, {"residue", "3"}}));
  CHECK(sm.report["target"].get<std::string>().find("C1") != std::string::npos);
  Outcome out = run(task("model specialize", {{"m", "2"}, {"v", "3"}}));
  CHECK(out.exit_code == kExitInput);
  CHECK(pointer_of(out) == "/params/v");
  CHECK(run(task("model shilov", {{"m", "3"}})).report["points"].size() == 4);
  CHECK(pointer_of(run(task("model build", {{"m", "0"}}))) == "/params/m");

  json f{{"names", {"C0", "Z1", "C2"}},
         {"verdicts", {"finite", "contracted", "finite"}},
         {"nodes", json::array({json::array({"0", "1"}), json::array({"1", "2"})})},
         {"target_components", "2"},
         {"image", {"0", "0", "1"}}};
  Outcome part = run(task("cover partition", {{"map", f}}));
  REQUIRE(part.exit_code == kExitOk);
  CHECK(part.report["contracting"] == json::array({"1"}));
  CHECK(part.dot.find("style=dashed") != std::string::npos);
  CHECK(run(task("cover classify-point", {{"map", f}, {"components", {"2"}}})).report["class"] == "good");
  Outcome prop = run(task("cover propagate", {{"verdicts", {"finite", "finite", "contracted", "finite"}},
                                              {"links", json::array({json::array({"0", "1"}), json::array({"1", "3"})})},
                                              {"seeds", {"0"}}}));
  CHECK(prop.report["linked"] == json::array({"0", "1", "3"}));
}

TEST_CASE("dodge commands") {
  json mob{{"kind", "mobius"}, {"a", "1"}, {"b", "0"}, {"c", "1"}, {"d", "4"}};
  Outcome im = run(task("dodge image", {{"map", mob}, {"point", {{"center", "0"}, {"radius", "rational"}, {"v", "1"}}}}));
  CHECK(im.exit_code == kExitOk);
  CHECK(im.report.contains("exponent"));
  json ex{{"map", {{"kind", "hn"}, {"n", "2"}, {"a", "5"}}}, {"order", "10"}};
  Outcome hn = run(task("dodge hn-exponent", ex, {{"p", "5"}, {"abs_prec", "12"}}));
  REQUIRE(hn.exit_code == kExitOk);
  CHECK(std::stoi(hn.report["N"].get<std::string>()) >= 1);
  CHECK(run(task("dodge hn-exponent", {{"map", mob}})).exit_code == kExitInput);
  CHECK(run(task("dodge hn-bound", {{"n", "2"}, {"val_a", "1"}, {"val_delta", "1"}})).report["bound"] == "4");
  CHECK(run(task("dodge hn-bound", {{"n", "2"}, {"val_a", "1"}, {"val_delta", "0"}})).exit_code == kExitInput);

  json nb{{"kind", "typeII"}, {"v_min", "0"}, {"v_max", "0"}, {"removed", {{{"center", "1"}, {"v", "0"}}}}};
  json params{{"neighborhood", nb}, {"s0", "1"}, {"samples", "20"}};
  json pr{{"p", "5"}, {"abs_prec", "8"}};
  Outcome l1 = run(task("dodge lemma46", params, pr));
  REQUIRE(l1.exit_code == kExitOk);
  CHECK(l1.report["verdict"] == "ok");
  CHECK(l1.report["at_s0"] == "-1");
  Options seeded;
  seeded.seed = 99;
  Outcome l2 = run(task("dodge lemma46", params, pr), seeded);
  CHECK(l2.report["seed"] == "99");
  CHECK(render(run(task("dodge lemma46", params, pr), seeded), seeded) == render(l2, seeded));
  Outcome inside = run(task("dodge lemma46", {{"neighborhood", nb}, {"s0", "2"}}, pr));
  CHECK(inside.exit_code == kExitInput);
  CHECK(inside.report["error"]["type"] == "ConfigMismatch");
}

TEST_CASE("conn commands") {
  json p10{{"p", "5"}, {"abs_prec", "10"}, {"truncations", {{"order", "4"}, {"window", "6"}}}};
  json n = mat({{"0", "2"}, {"0", "0"}});
  Outcome b = run(task("conn build", {{"N", n}}, p10));
  REQUIRE(b.exit_code == kExitOk);
  CHECK(b.report["A"]["0"] == mat({{"0", "9765623"}, {"0", "0"}}));
  Outcome r = run(task("conn residues", {{"N", n}}, p10));
  CHECK(r.report["res_x"] == mat({{"0", "9765623"}, {"0", "0"}}));
  CHECK(r.report["res_y"] == n);
  // the emitted connection reads back
  CHECK(run(task("conn residues", {{"A", b.report["A"]}}, p10)).report == r.report);

  Outcome one = run(task("conn solve", {{"A", {{"0", mat({{"1"}})}}}}, p10));
  CHECK(one.report["verdict"] == "full");
  CHECK(one.report["basis"][0].contains("-1"));
  CHECK(one.report["precision"] == "mod p^10, Laurent window |k| <= 6");
  Outcome half = run(task("conn solve", {{"A", {{"0", mat({{"1/2"}})}}}}, p10));
  CHECK(half.report["verdict"] == "partial");
  CHECK(half.report.contains("obstruction"));
  CHECK(run(task("conn trivial", {{"A", {{"0", mat({{"1/2"}})}}}}, p10)).report["verdict"] == "false");
  json g = json::array({{{"i", "0"}, {"j", "1"}, {"c", "1"}, {"b", "1"}}});
  CHECK(run(task("conn trivial", {{"N", mat({{"0", "0"}, {"0", "0"}})}, {"gauge", g}}, p10)).report["verdict"] ==
        "true");
  Outcome nc = run(task("conn build", {{"T", {{"dim", "1"}, {"terms", {{{"coeff", mat({{"5"}})}}}}}}}, p10));
  CHECK(nc.exit_code == kExitInput);
  CHECK(nc.report["error"]["type"] == "NonUnitConstantTerm");
}

TEST_CASE("schema errors carry pointers") {
  json good = task("descent check", {{"N", mat({{"0"}})}});
  json t = good;
  t["precision"]["p"] = "4";
  CHECK(pointer_of(run(t)) == "/precision/p");
  CHECK(run(t).exit_code == kExitInput);
  t = good;
  t["precision"]["p"] = 5;
  CHECK(pointer_of(run(t)) == "/precision/p");
  t = good;
  t["precision"].erase("abs_prec");
  CHECK(pointer_of(run(t)) == "/precision/abs_prec");
  t = good;
  t["precision"]["abs_prec"] = "40";
  CHECK(pointer_of(run(t)) == "/precision/abs_prec");
  t = good;
  t["version"] = "2";
  CHECK(pointer_of(run(t)) == "/version");
  t = good;
  t["command"] = "descent wobble";
  CHECK(pointer_of(run(t)) == "/command");
  t = good;
  t["params"]["N"] = mat({{"0", "x"}});
  CHECK(pointer_of(run(t)) == "/params/N/0/1");
  t = good;
  t["params"]["N"] = mat({{"0", "1"}});
  CHECK(pointer_of(run(t)) == "/params/N");
  CHECK(pointer_of(run(task("descent check", {{"T", {{"dim", "1"}, {"terms", {{{"exps", {{"s", "1"}}}, {"coeff", mat({{"1"}})}}}}}}}))) ==
        "/params/T/terms/0/exps/s");
  Outcome raw = run(json::array());
  CHECK(raw.exit_code == kExitInput);
  Options o;
  o.dot = true;
  CHECK(run(good, o).exit_code == kExitInput);
}

TEST_CASE("precision failures exit with three") {
  // the node ring needs order >= 1 to see dx; an hn_prime tail that cannot be certified
  json ex{{"map", {{"kind", "hn_prime"}, {"n", "3"}, {"a", "125"}}}, {"order", "2"}};
  Outcome o = run(task("dodge hn-exponent", ex, {{"p", "5"}, {"abs_prec", "12"}}));
  CHECK(o.exit_code == kExitPrecision);
  CHECK(o.report["error"]["type"] == "TruncationInsufficient");
}

TEST_CASE("overrides and truncation cap") {
  json t = task("descent check", {{"N", mat({{"0", "1"}, {"0", "0"}})}});
  Options o;
  o.precision = "p=3,M=5,D=6";
  Outcome r = run(t, o);
  CHECK(r.report["precision"] == "mod 3^5, to order 6");
  o.max_trunc = 3;
  r = run(t, o);
  CHECK(r.report["precision"] == "mod 3^5, to order 3");
  CHECK(r.report.contains("truncation_capped"));
  o.precision = "q=3";
  CHECK(pointer_of(run(t, o)) == "--precision");
}

TEST_CASE("output is deterministic") {
  json t = task("conn solve", {{"A", {{"0", mat({{"1", "0"}, {"0", "-2"}})}, {"1", mat({{"0", "5"}, {"0", "0"}})}}}});
  Options j;
  j.json = true;
  std::string a = render(run(t, j), j), b = render(run(t, j), j);
  CHECK(a == b);
  CHECK(json::parse(a)["verdict"].is_string());
  Options text;
  CHECK(render(run(t), text) == render(run(t), text));
  Options timed = j;
  timed.timing = true;
  CHECK(run(t, timed).report.contains("timing_ms"));
  CHECK_FALSE(run(t, j).report.contains("timing_ms"));
  Options dot;
  dot.dot = true;
  std::string d = render(run(task("model build", {{"m", "2"}}), dot), dot);
  CHECK(d.rfind("graph annulus_m2 {", 0) == 0);
}
