#pragma once

#include <cstdint>
#include <string>

namespace hpk {

enum class ResourceKind { Cpu, Memory };

// A Kubernetes-style resource quantity. The canonical value is held in base
// units: millicores for CPU, bytes for memory. The original spelling is kept
// so that serialization round-trips.
struct Quantity {
    std::int64_t canonical = 0;
    std::string text;

    bool operator==(const Quantity& other) const { return canonical == other.canonical; }
};

// Parses the decimal/binary-suffix quantity grammar:
//   cpu:    "1" -> 1000 millicores, "500m" -> 500, "1.5" -> 1500
//   memory: plain/decimal numbers in bytes; Ki/Mi/Gi/Ti binary and
//           k/M/G/T decimal suffixes; "m" divides by 1000, rounded up to a
//           1-byte minimum ("8000m" -> 8 bytes).
// Fractional byte counts round up. Throws BadQuantity on anything outside
// the grammar or on negative values.
Quantity parse_quantity(const std::string& text, ResourceKind kind);

}  // namespace hpk
