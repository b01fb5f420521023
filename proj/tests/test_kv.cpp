#include <doctest.h>

#include <stdexcept>

#include "forage/kv.hpp"

using namespace forage;

TEST_CASE("parse splits sections, keeps order, tolerates comments and blanks") {
    KvDoc doc = KvDoc::parse(
        "# a comment\n"
        "top = 1\n"
        "\n"
        "[alpha]\n"
        "x = 10\n"
        "y = hello world\n"
        "[beta]\n"
        "x = -3.5\n"
        "[alpha]\n"
        "x = 20\n");

    REQUIRE(doc.sections.size() == 4);
    CHECK(doc.sections[0].name == "");
    CHECK(doc.sections[0].get("top") == "1");

    const KvSection* alpha = doc.find("alpha");
    REQUIRE(alpha != nullptr);
    CHECK(alpha->get_int("x") == 10);
    CHECK(alpha->get("y") == "hello world");

    auto alphas = doc.all("alpha");
    REQUIRE(alphas.size() == 2);
    CHECK(alphas[1]->get_int("x") == 20);

    CHECK(doc.find("beta")->get_double("x") == -3.5);
    CHECK(doc.find("gamma") == nullptr);
}

TEST_CASE("empty prologue is dropped") {
    KvDoc doc = KvDoc::parse("# only a comment\n\n[s]\nk = v\n");
    REQUIRE(doc.sections.size() == 1);
    CHECK(doc.sections[0].name == "s");
}

TEST_CASE("lookup fallbacks and errors") {
    KvDoc doc = KvDoc::parse("[s]\na = 2\n");
    const KvSection& s = *doc.find("s");
    CHECK(s.has("a"));
    CHECK(!s.has("b"));
    CHECK(s.get_or("b", "dflt") == "dflt");
    CHECK(s.get_int_or("b", 9) == 9);
    CHECK(s.get_double_or("b", 0.5) == 0.5);
    CHECK_THROWS_AS(s.get("b"), std::out_of_range);
}

TEST_CASE("malformed lines report their line number") {
    CHECK_THROWS_WITH_AS(KvDoc::parse("[s]\nnot a kv line\n"),
                         doctest::Contains("line 2"), std::invalid_argument);
    CHECK_THROWS_AS(KvDoc::parse("[unterminated\n"), std::invalid_argument);
    CHECK_THROWS_AS(KvDoc::parse("= nameless\n"), std::invalid_argument);
}

TEST_CASE("numeric conversions reject trailing garbage") {
    KvDoc doc = KvDoc::parse("[s]\na = 3.5x\nb = 12 monkeys\nc = 1e3\n");
    const KvSection& s = *doc.find("s");
    CHECK_THROWS_AS(s.get_double("a"), std::invalid_argument);
    CHECK_THROWS_AS(s.get_int("b"), std::invalid_argument);
    CHECK(s.get_double("c") == 1000.0);
}

TEST_CASE("load reports unreadable paths") {
    CHECK_THROWS_AS(KvDoc::load("/nonexistent/p/q.cfg"), std::runtime_error);
}
