#include "hpk/quantity.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>

#include "hpk/errors.hpp"

namespace hpk {

namespace {

struct Suffix {
    const char* spelling;
    long double multiplier;
};

// Binary and decimal suffixes, longest first so "Ki" wins over "k".
constexpr Suffix kMemorySuffixes[] = {
    {"Ki", 1024.0L},
    {"Mi", 1024.0L * 1024},
    {"Gi", 1024.0L * 1024 * 1024},
    {"Ti", 1024.0L * 1024 * 1024 * 1024},
    {"k", 1e3L},
    {"M", 1e6L},
    {"G", 1e9L},
    {"T", 1e12L},
    {"m", 1e-3L},
    {"", 1.0L},
};

constexpr Suffix kCpuSuffixes[] = {
    {"m", 1.0L},     // already millicores
    {"", 1000.0L},   // whole cores
};

long double parse_number(const std::string& digits, const std::string& whole) {
    if (digits.empty()) throw BadQuantity("empty quantity: \"" + whole + "\"");
    std::size_t dots = 0;
    for (char c : digits) {
        if (c == '.') {
            ++dots;
        } else if (!std::isdigit(static_cast<unsigned char>(c))) {
            throw BadQuantity("bad quantity: \"" + whole + "\"");
        }
    }
    if (dots > 1 || digits == ".") throw BadQuantity("bad quantity: \"" + whole + "\"");
    return std::strtold(digits.c_str(), nullptr);
}

}  // namespace

Quantity parse_quantity(const std::string& text, ResourceKind kind) {
    if (text.empty()) throw BadQuantity("empty quantity");
    if (text[0] == '-') throw BadQuantity("negative quantity: \"" + text + "\"");

    std::size_t suffix_at = text.size();
    while (suffix_at > 0) {
        char c = text[suffix_at - 1];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') break;
        --suffix_at;
    }
    const std::string number = text.substr(0, suffix_at);
    const std::string suffix = text.substr(suffix_at);

    long double multiplier = -1.0L;
    if (kind == ResourceKind::Cpu) {
        for (const auto& s : kCpuSuffixes) {
            if (suffix == s.spelling) { multiplier = s.multiplier; break; }
        }
    } else {
        for (const auto& s : kMemorySuffixes) {
            if (suffix == s.spelling) { multiplier = s.multiplier; break; }
        }
    }
    if (multiplier < 0.0L) throw BadQuantity("unknown suffix \"" + suffix + "\" in \"" + text + "\"");

    // Fractional base units round up, so "8000m" memory is 8 bytes and "1m" is 1.
    const long double value = parse_number(number, text) * multiplier;
    return Quantity{static_cast<std::int64_t>(std::ceil(value)), text};
}

}  // namespace hpk
