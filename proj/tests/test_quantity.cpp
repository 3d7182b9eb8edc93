#include <doctest.h>

#include <cstdint>
#include <optional>
#include <regex>
#include <string>

#include "hpk/errors.hpp"
#include "hpk/quantity.hpp"

using namespace hpk;

namespace {

// Independent oracle for the quantity grammar: regex split plus exact
// integer fraction arithmetic (value = digits / 10^k * num / den, ceiling),
// no floating point anywhere.
std::optional<std::int64_t> oracle_quantity(const std::string& text, ResourceKind kind) {
    static const std::regex grammar(R"(^(\d+)(?:\.(\d+))?([A-Za-z]*)$)");
    std::smatch m;
    if (!std::regex_match(text, m, grammar)) return std::nullopt;

    const std::string intPart = m[1].str();
    const std::string fracPart = m[2].str();
    const std::string suffix = m[3].str();

    // multiplier as num/den in base units
    __int128 num = 0, den = 1;
    if (kind == ResourceKind::Cpu) {
        if (suffix == "") num = 1000;
        else if (suffix == "m") num = 1;
        else return std::nullopt;
    } else {
        if (suffix == "") num = 1;
        else if (suffix == "m") { num = 1; den = 1000; }
        else if (suffix == "k") num = 1000;
        else if (suffix == "M") num = 1000000;
        else if (suffix == "G") num = 1000000000;
        else if (suffix == "T") num = 1000000000000LL;
        else if (suffix == "Ki") num = 1024;
        else if (suffix == "Mi") num = 1048576;
        else if (suffix == "Gi") num = 1073741824;
        else if (suffix == "Ti") num = 1099511627776LL;
        else return std::nullopt;
    }

    // digits = intPart.fracPart as integer over 10^k
    __int128 digits = 0;
    for (char c : intPart) digits = digits * 10 + (c - '0');
    __int128 scale = 1;
    for (char c : fracPart) {
        digits = digits * 10 + (c - '0');
        scale *= 10;
    }

    const __int128 denominator = den * scale;
    const __int128 numerator = digits * num;
    return static_cast<std::int64_t>((numerator + denominator - 1) / denominator);
}

}  // namespace

TEST_CASE("cpu quantities") {
    CHECK(parse_quantity("1", ResourceKind::Cpu).canonical == 1000);
    CHECK(parse_quantity("500m", ResourceKind::Cpu).canonical == 500);
    CHECK(parse_quantity("0", ResourceKind::Cpu).canonical == 0);
    CHECK(parse_quantity("1.5", ResourceKind::Cpu).canonical == 1500);
    CHECK(parse_quantity("1500m", ResourceKind::Cpu).canonical == 1500);
}

TEST_CASE("memory quantities") {
    CHECK(parse_quantity("2Gi", ResourceKind::Memory).canonical == 2147483648LL);
    CHECK(parse_quantity("1024Mi", ResourceKind::Memory).canonical ==
          parse_quantity("1Gi", ResourceKind::Memory).canonical);
    CHECK(parse_quantity("8000m", ResourceKind::Memory).canonical == 8);
    CHECK(parse_quantity("1m", ResourceKind::Memory).canonical == 1);
}

TEST_CASE("memory decimal suffixes") {
    CHECK(parse_quantity("1k", ResourceKind::Memory).canonical == 1000);
    CHECK(parse_quantity("2M", ResourceKind::Memory).canonical == 2000000);
    CHECK(parse_quantity("3G", ResourceKind::Memory).canonical == 3000000000LL);
    CHECK(parse_quantity("1.5Ki", ResourceKind::Memory).canonical == 1536);
}

TEST_CASE("round-trips keep the original text") {
    for (const char* text : {"1", "500m", "8000m", "1.5"}) {
        CHECK(parse_quantity(text, ResourceKind::Cpu).text == text);
    }
    for (const char* text : {"2Gi", "512Mi", "8000m", "1k"}) {
        CHECK(parse_quantity(text, ResourceKind::Memory).text == text);
    }
}

TEST_CASE("bad quantities throw") {
    CHECK_THROWS_AS(parse_quantity("", ResourceKind::Cpu), BadQuantity);
    CHECK_THROWS_AS(parse_quantity("-1", ResourceKind::Cpu), BadQuantity);
    CHECK_THROWS_AS(parse_quantity("abc", ResourceKind::Cpu), BadQuantity);
    CHECK_THROWS_AS(parse_quantity("1Zi", ResourceKind::Memory), BadQuantity);
    CHECK_THROWS_AS(parse_quantity("1.2.3", ResourceKind::Cpu), BadQuantity);
    CHECK_THROWS_AS(parse_quantity("1Ki", ResourceKind::Cpu), BadQuantity);
}

TEST_CASE("implementation agrees with the independent grammar oracle") {
    const char* cpuCases[] = {"0", "1", "2", "16", "500m", "1500m", "0.5", "2.25", "100m"};
    for (const char* text : cpuCases) {
        auto expected = oracle_quantity(text, ResourceKind::Cpu);
        REQUIRE(expected.has_value());
        CHECK(parse_quantity(text, ResourceKind::Cpu).canonical == *expected);
    }
    const char* memCases[] = {"0",    "1",      "1024",  "8000m", "1m",   "1Ki",
                              "2Mi",  "2Gi",    "1Ti",   "1k",    "5M",   "3G",
                              "1.5Gi", "0.5Mi", "123456", "7.25Ki"};
    for (const char* text : memCases) {
        auto expected = oracle_quantity(text, ResourceKind::Memory);
        REQUIRE(expected.has_value());
        CHECK(parse_quantity(text, ResourceKind::Memory).canonical == *expected);
    }
}
