#include <doctest.h>

#include <nlohmann/json.hpp>

#include <random>

#include "courtsim/case_model.hpp"
#include "support/test_helpers.hpp"

using namespace courtsim;
using test::TempDir;

namespace {

const char* kFixtureJson = R"({
  "case_id": "case_001",
  "summary": "A market altercation ending in a stab wound.",
  "charges": ["Voluntarily causing hurt by dangerous weapons"],
  "law_explanation": "Identity and weapon use must be proved beyond reasonable doubt.",
  "prosecution_evidence": ["knife recovered", "complainant statement", "stall owner testimony"],
  "defense_evidence": ["alibi testimony", "tower record", "no fingerprints"],
  "keywords": ["Knife", "alibi", "witness"]
})";

CaseFile valid_case() {
    return parse_case_json(kFixtureJson);
}

}  // namespace

TEST_CASE("load_case reads a fixture file and normalizes keywords") {
    TempDir dir("case");
    test::write_file(dir.path() / "case.json", kFixtureJson);

    CaseFile c = load_case(dir.path() / "case.json");
    CHECK(c.case_id == "case_001");
    CHECK(c.charges.size() == 1);
    CHECK(c.prosecution_evidence.size() == 3);
    CHECK(c.defense_evidence.size() == 3);
    REQUIRE(c.keywords.size() == 3);
    CHECK(c.keywords[0] == "Knife");              // display casing retained
    CHECK(c.keywords_normalized[0] == "knife");   // matching form lower-cased
    CHECK(c.keywords_normalized[1] == "alibi");
}

TEST_CASE("missing required fields are reported by name") {
    for (const char* field : {"case_id", "summary", "charges", "law_explanation",
                              "prosecution_evidence", "defense_evidence", "keywords"}) {
        auto doc = nlohmann::json::parse(kFixtureJson);
        doc.erase(field);
        try {
            parse_case_json(doc.dump());
            FAIL("expected CaseFileError for missing " << field);
        } catch (const CaseFileError& e) {
            CHECK(e.kind() == CaseFileError::Kind::MissingField);
            CHECK(e.field() == field);
        }
    }
}

TEST_CASE("empty required values are rejected") {
    auto doc = nlohmann::json::parse(kFixtureJson);

    SUBCASE("charges empty list") {
        doc["charges"] = nlohmann::json::array();
        try {
            parse_case_json(doc.dump());
            FAIL("expected EmptyField");
        } catch (const CaseFileError& e) {
            CHECK(e.kind() == CaseFileError::Kind::EmptyField);
            CHECK(e.field() == "charges");
        }
    }
    SUBCASE("blank keyword") {
        doc["keywords"] = {"  "};
        try {
            parse_case_json(doc.dump());
            FAIL("expected EmptyField");
        } catch (const CaseFileError& e) {
            CHECK(e.field() == "keywords");
        }
    }
    SUBCASE("empty summary") {
        doc["summary"] = "   ";
        CHECK_THROWS_AS(parse_case_json(doc.dump()), CaseFileError);
    }
    SUBCASE("case_id with path separator") {
        doc["case_id"] = "a/b";
        CHECK_THROWS_AS(parse_case_json(doc.dump()), CaseFileError);
    }
}

TEST_CASE("malformed input reports MalformedFile") {
    try {
        parse_case_json("{not json");
        FAIL("expected CaseFileError");
    } catch (const CaseFileError& e) {
        CHECK(e.kind() == CaseFileError::Kind::Malformed);
    }
    try {
        auto doc = nlohmann::json::parse(kFixtureJson);
        doc["charges"] = "not a list";
        parse_case_json(doc.dump());
        FAIL("expected CaseFileError");
    } catch (const CaseFileError& e) {
        CHECK(e.kind() == CaseFileError::Kind::Malformed);
        CHECK(e.field() == "charges");
    }
}

TEST_CASE("unknown extra fields are ignored with a warning") {
    auto doc = nlohmann::json::parse(kFixtureJson);
    doc["verdict_hint"] = "should be ignored";
    std::vector<std::string> warnings;
    CaseFile c = parse_case_json(doc.dump(), &warnings);
    CHECK(c.case_id == "case_001");
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].find("verdict_hint") != std::string::npos);
}

TEST_CASE("validate_case lists one descriptor per violated invariant") {
    CHECK(validate_case(valid_case()).empty());

    CaseFile c = valid_case();
    c.case_id = "";
    auto violations = validate_case(c);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].field == "case_id");

    c = valid_case();
    c.keywords = {"  "};
    c.keywords_normalized = {"  "};
    violations = validate_case(c);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].field == "keywords");

    c = valid_case();
    c.charges.clear();
    c.summary = "";
    violations = validate_case(c);
    CHECK(violations.size() == 2);
}

TEST_CASE("serialize/load round trip is the identity on valid cases") {
    std::mt19937 rng(20240817);
    std::uniform_int_distribution<int> len(1, 12);
    std::uniform_int_distribution<int> ch(0, 25);
    std::uniform_int_distribution<int> list_len(1, 5);
    auto word = [&] {
        std::string w;
        int n = len(rng);
        for (int i = 0; i < n; ++i) w.push_back(static_cast<char>('a' + ch(rng)));
        return w;
    };
    auto sentence = [&] {
        std::string s = word();
        for (int i = 0; i < 6; ++i) s += " " + word();
        return s;
    };

    for (int trial = 0; trial < 100; ++trial) {
        CaseFile c;
        c.case_id = word() + "_" + std::to_string(trial);
        c.summary = sentence() + " — चाकू";  // non-ASCII survives the trip
        c.law_explanation = sentence();
        int n = list_len(rng);
        for (int i = 0; i < n; ++i) c.charges.push_back(sentence());
        n = list_len(rng) - 1;
        for (int i = 0; i < n; ++i) c.prosecution_evidence.push_back(sentence());
        n = list_len(rng) - 1;
        for (int i = 0; i < n; ++i) c.defense_evidence.push_back(sentence());
        n = list_len(rng);
        for (int i = 0; i < n; ++i) {
            std::string k = word();
            c.keywords.push_back(k);
            c.keywords_normalized.push_back(k);  // already lower-case
        }

        CaseFile loaded = parse_case_json(serialize_case(c));
        CHECK(loaded == c);
        CHECK(validate_case(c).empty());
    }
}

TEST_CASE("validate_case accepts exactly what the loader accepts") {
    // Degenerate-but-legal: empty evidence lists.
    CaseFile c = valid_case();
    c.prosecution_evidence.clear();
    c.defense_evidence.clear();
    CHECK(validate_case(c).empty());
    CHECK_NOTHROW(parse_case_json(serialize_case(c)));

    // Violating case: the loader must reject its serialized form.
    c = valid_case();
    c.charges.clear();
    CHECK(!validate_case(c).empty());
    CHECK_THROWS_AS(parse_case_json(serialize_case(c)), CaseFileError);
}

TEST_CASE("shipped fixture cases all load and validate") {
    for (int i = 1; i <= 5; ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "case_%03d.json", i);
        CaseFile c = load_case(test::fixtures_dir() / "cases" / name);
        CHECK(validate_case(c).empty());
        CHECK(c.keywords.size() >= 1);
        CHECK(!c.charges.empty());
    }
}
