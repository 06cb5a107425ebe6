#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "tml/dsl.hpp"

using namespace tml;

TEST_CASE("smallest legal model parses") {
  auto p = parse_model("model M  machine A { thing X  action c1: create of X }");
  REQUIRE(p.ok());
  CHECK(p.value->name == "M");
  CHECK(p.value->machines.size() == 1);
  CHECK(p.value->things.size() == 1);
  CHECK(p.value->actions.size() == 1);
  CHECK(p.value->actions.at("A.c1").kind == ActionKind::Create);
}

TEST_CASE("empty model prints as a bare header") {
  StaticModel m;
  m.name = "M";
  CHECK(print_model(m) == "model M\n");
}

TEST_CASE("atm fixture parses with the expected machine tree") {
  auto atm = test_helpers::load_model("atm.tm");
  REQUIRE(atm.machines.size() == 4);
  CHECK(atm.machines.count("User") == 1);
  CHECK(atm.machines.count("ATM") == 1);
  CHECK(atm.machines.count("BankSystem") == 1);
  CHECK(atm.machines.count("BankSystem.AccountSystem") == 1);
  CHECK(atm.machines.at("BankSystem.AccountSystem").parent == MachineId("BankSystem"));
  CHECK(atm.machines.at("BankSystem").children ==
        std::vector<MachineId>{"BankSystem.AccountSystem"});
}

TEST_CASE("fixtures are stored in canonical form") {
  for (const char* name : {"atm.tm", "ordering.tm"}) {
    std::string text = test_helpers::read_file(test_helpers::corpus_path(name));
    auto parsed = parse_model(text, name);
    REQUIRE(parsed.ok());
    CHECK_MESSAGE(print_model(*parsed.value) == text, name, " reprints byte-identical");
  }
}

TEST_CASE("print is idempotent") {
  for (unsigned seed = 0; seed < 50; ++seed) {
    auto m = test_helpers::random_model(seed);
    std::string once = print_model(m);
    auto reparsed = parse_model(once);
    REQUIRE(reparsed.ok());
    CHECK(print_model(*reparsed.value) == once);
  }
}

TEST_CASE("parse-print round trip is the identity on generated models") {
  for (unsigned seed = 0; seed < 1000; ++seed) {
    auto m = test_helpers::random_model(seed);
    auto back = parse_model(print_model(m));
    REQUIRE_MESSAGE(back.ok(), "seed ", seed);
    CHECK_MESSAGE(*back.value == m, "seed ", seed);
  }
}

TEST_CASE("labels and the simplified flag survive the round trip") {
  const char* text =
      "model demo simplified\n\nmachine A {\n  thing X\n  action c1: create of X #\"14\"\n}\n";
  auto p = parse_model(text);
  REQUIRE(p.ok());
  CHECK(p.value->simplified);
  CHECK(p.value->actions.at("A.c1").label == std::string("14"));
  CHECK(print_model(*p.value) == text);
}

TEST_CASE("duplicate step labels are allowed") {
  auto p = parse_model(
      "model M machine A { thing X action a: create of X #\"13\" action b: process of X #\"13\" }"
      " flow A.a -> A.b");
  REQUIRE(p.ok());
}

TEST_CASE("syntax errors carry a source span") {
  auto p = parse_model("model M\nmachine A {\n  action : create of X\n}\n", "bad.tm");
  REQUIRE_FALSE(p.ok());
  REQUIRE_FALSE(p.diagnostics.empty());
  CHECK(p.diagnostics[0].span.file == "bad.tm");
  CHECK(p.diagnostics[0].span.line == 3);
  CHECK(p.diagnostics[0].code == "SyntaxError");
}

TEST_CASE("semantic errors surface as diagnostics, not crashes") {
  SUBCASE("dangling reference") {
    auto p = parse_model("model M machine A { thing X } flow A.x -> A.y");
    REQUIRE_FALSE(p.ok());
    CHECK(p.diagnostics[0].code == "DanglingReference");
  }
  SUBCASE("cross-thing flow") {
    auto p = parse_model(
        "model M machine A { thing X thing Y action rx: release of X action ry: receive of Y }"
        " flow A.rx -> A.ry");
    REQUIRE_FALSE(p.ok());
    CHECK(p.diagnostics[0].code == "CrossThingFlow");
  }
  SUBCASE("duplicate action") {
    auto p = parse_model(
        "model M machine A { thing X action a: create of X action a: process of X }");
    REQUIRE_FALSE(p.ok());
    CHECK(p.diagnostics[0].code == "DuplicateId");
  }
}

TEST_CASE("comments are ignored") {
  auto p = parse_model("model M // header\nmachine A { // body\n  thing X\n}\n");
  REQUIRE(p.ok());
  CHECK(p.value->things.count("X") == 1);
}

TEST_CASE("arcs may be declared inside machine blocks") {
  auto p = parse_model(
      "model M machine A { thing X action c: create of X action q: process of X"
      " flow A.c -> A.q trigger A.q ~> A.c }");
  REQUIRE(p.ok());
  CHECK(p.value->flows.size() == 1);
  CHECK(p.value->triggers.size() == 1);
  // canonical form hoists them to the top level
  CHECK(print_model(*p.value).find("}\n\nflow A.c -> A.q") != std::string::npos);
}

TEST_CASE("parser survives arbitrary bytes") {
  std::mt19937 rng(99);
  for (int round = 0; round < 300; ++round) {
    std::string junk;
    int len = std::uniform_int_distribution<int>(0, 200)(rng);
    for (int i = 0; i < len; ++i)
      junk.push_back(static_cast<char>(std::uniform_int_distribution<int>(1, 255)(rng)));
    auto p = parse_model(junk);
    CHECK((p.ok() || !p.diagnostics.empty()));
  }
  // and mutated fixture text
  std::string atm = test_helpers::read_file(test_helpers::corpus_path("atm.tm"));
  for (int round = 0; round < 100; ++round) {
    std::string mutated = atm;
    std::size_t at = std::uniform_int_distribution<std::size_t>(0, mutated.size() - 1)(rng);
    mutated[at] = static_cast<char>(std::uniform_int_distribution<int>(1, 255)(rng));
    auto p = parse_model(mutated);
    CHECK((p.ok() || !p.diagnostics.empty()));
  }
}
