#include <doctest.h>

#include "helpers.hpp"
#include "tml/json_io.hpp"

using namespace tml;

TEST_CASE("empty model encodes with sorted keys") {
  StaticModel m;
  m.name = "M";
  CHECK(to_json(m) ==
        R"({"actions":[],"flows":[],"machines":[],"name":"M","storages":[],"things":[],"triggers":[]})");
}

TEST_CASE("json round trip is the identity on the corpus") {
  for (const char* name : {"atm.tm", "ordering.tm"}) {
    auto m = test_helpers::load_model(name);
    auto back = from_json(to_json(m));
    REQUIRE_MESSAGE(back.ok(), name);
    CHECK(*back.value == m);
  }
}

TEST_CASE("json round trip is the identity on generated models") {
  for (unsigned seed = 0; seed < 1000; ++seed) {
    auto m = test_helpers::random_model(seed);
    auto back = from_json(to_json(m));
    REQUIRE_MESSAGE(back.ok(), "seed ", seed);
    CHECK_MESSAGE(*back.value == m, "seed ", seed);
  }
}

TEST_CASE("schema violations name the offending JSON pointer") {
  SUBCASE("flow missing its target") {
    auto p = from_json(
        R"({"actions":[],"flows":[{"from":"A.x","id":"A.x->A.y"}],"machines":[],)"
        R"("name":"M","storages":[],"things":[],"triggers":[]})");
    REQUIRE_FALSE(p.ok());
    CHECK(p.diagnostics[0].code == "SchemaViolation");
    CHECK(p.diagnostics[0].message.find("/flows/0/to") != std::string::npos);
  }
  SUBCASE("wrong type") {
    auto p = from_json(R"({"name":42})");
    REQUIRE_FALSE(p.ok());
    CHECK(p.diagnostics[0].message.find("/name") != std::string::npos);
  }
  SUBCASE("not json at all") {
    auto p = from_json("model M");
    REQUIRE_FALSE(p.ok());
    CHECK(p.diagnostics[0].code == "SchemaViolation");
  }
  SUBCASE("missing collection") {
    auto p = from_json(R"({"name":"M"})");
    REQUIRE_FALSE(p.ok());
    CHECK(p.diagnostics[0].message.find("/machines") != std::string::npos);
  }
}

TEST_CASE("simplified flag only appears when set") {
  StaticModel m;
  m.name = "M";
  CHECK(to_json(m).find("simplified") == std::string::npos);
  m.simplified = true;
  std::string text = to_json(m);
  CHECK(text.find("\"simplified\":true") != std::string::npos);
  auto back = from_json(text);
  REQUIRE(back.ok());
  CHECK(back.value->simplified);
}
