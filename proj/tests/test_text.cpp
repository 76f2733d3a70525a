#include <doctest.h>

#include <cmath>

#include "entailrl/text.hpp"

using namespace entailrl;

TEST_CASE("tokenize lowercases and strips punctuation") {
  CHECK(tokenize("A Rock, is a SOLID.") ==
        std::vector<std::string>{"a", "rock", "is", "a", "solid"});
  CHECK(tokenize("   ") == std::vector<std::string>{});
  CHECK(tokenize("x->y") == std::vector<std::string>{"x", "y"});
}

TEST_CASE("normalize_whitespace") {
  CHECK(normalize_whitespace("  a   b \t c  ") == "a b c");
  CHECK(normalize_whitespace("") == "");
}

TEST_CASE("lexical_similarity") {
  CHECK(lexical_similarity("the same text", "the same text") == 1.0);
  CHECK(lexical_similarity("alpha beta", "gamma delta") == 0.0);
  // 5 shared tokens over lengths 5 and 6: F1 = 2*5/(5+6) = 10/11
  CHECK(lexical_similarity("the moon orbits the earth",
                           "the moon always orbits the earth") ==
        doctest::Approx(10.0 / 11.0).epsilon(1e-12));
}

TEST_CASE("token_f1 counts bag overlap") {
  CHECK(token_f1({"a", "a", "b"}, {"a", "b", "b"}) ==
        doctest::Approx(4.0 / 6.0));  // overlap a:1 b:1 -> 2*2/(3+3)
  CHECK(token_f1({}, {"a"}) == 0.0);
  CHECK(token_f1({}, {}) == 0.0);
}

TEST_CASE("type_coverage") {
  std::set<std::string> target{"a", "b", "c", "d"};
  CHECK(type_coverage(target, {"a", "c"}) == 0.5);
  CHECK(type_coverage({}, {"a"}) == 0.0);
}

TEST_CASE("idf table") {
  IdfTable idf = IdfTable::from_texts({"red fox", "fox jumps"});
  // df(fox)=2, N=2 -> ln(3/3)+1 = 1
  CHECK(idf.idf("fox") == doctest::Approx(1.0));
  // df(red)=1 -> ln(3/2)+1
  CHECK(idf.idf("red") == doctest::Approx(std::log(1.5) + 1.0));
  // unseen token -> ln(3/1)+1
  CHECK(idf.idf("wolf") == doctest::Approx(std::log(3.0) + 1.0));
}
