#include <doctest.h>

#include "dietmine/text.hpp"

using namespace dietmine;

TEST_CASE("split_words lowercases and splits on non-word characters") {
    auto w = text::split_words("McDonald's - Premium (Grilled)");
    CHECK(w == std::vector<std::string>{"mcdonald", "s", "premium", "grilled"});
    CHECK(text::split_words("").empty());
    CHECK(text::split_words("--- !!").empty());
    CHECK(text::split_words("100% Whole-Wheat") ==
          std::vector<std::string>{"100", "whole", "wheat"});
}

TEST_CASE("tokenize applies the length and alphabetic filters") {
    CHECK(text::tokenize("McDonald's - Premium Sweet Chili Chicken Wrap (Grilled)") ==
          std::vector<std::string>{"mcdonald", "premium", "sweet", "chili", "chicken",
                                   "wrap", "grilled"});
    CHECK(text::tokenize("100% Whole-Wheat") == std::vector<std::string>{"whole", "wheat"});
    CHECK(text::tokenize("").empty());
    CHECK(text::tokenize("a an ab 12ab x_y").empty());
}

TEST_CASE("lemmatize rules") {
    CHECK(text::lemmatize("sprouts") == "sprout");
    CHECK(text::lemmatize("rice") == "rice");
    CHECK(text::lemmatize("berries") == "berry");
    CHECK(text::lemmatize("glasses") == "glass");
    CHECK(text::lemmatize("boxes") == "box");
    CHECK(text::lemmatize("dishes") == "dish");
    CHECK(text::lemmatize("leaves") == "leaf");
    CHECK(text::lemmatize("grilled") == "grill");
    CHECK(text::lemmatize("fries") == "fry");
    CHECK(text::lemmatize("eggs") == "egg");
    CHECK(text::lemmatize("hummus") == "hummus");
    CHECK(text::lemmatize("couscous") == "couscous");
    CHECK(text::lemmatize("tea") == "tea");
}

TEST_CASE("lemmatize is idempotent on dictionary-ish tokens") {
    for (const char* t : {"sprouts", "berries", "glasses", "lenses", "leaves", "grilled",
                          "fries", "tomatoes", "potatoes", "sandwiches", "apples",
                          "grapes", "noodles", "is", "us", "gas"}) {
        auto once = text::lemmatize(t);
        CHECK(text::lemmatize(once) == once);
    }
}

TEST_CASE("normalize_ws trims and collapses") {
    CHECK(text::normalize_ws("  a\t b \n c ") == "a b c");
    CHECK(text::normalize_ws("") == "");
    CHECK(text::normalize_ws("   ") == "");
}
