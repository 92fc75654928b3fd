#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <unordered_set>
#include <vector>

#include "syracuse/error.hpp"
#include "syracuse/integer.hpp"
#include "syracuse/map.hpp"

namespace syracuse {

/// A cycle rotated so that elements[0] is its minimum omega.
struct Cycle {
    std::vector<Integer> elements;
    Integer omega;
    std::size_t K = 0;  // odd elements
    std::size_t L = 0;  // even elements
    Integer min_odd;
    Integer max;

    std::size_t length() const { return elements.size(); }

    friend bool operator==(const Cycle& x, const Cycle& y) { return x.elements == y.elements; }
};

/// True iff `claimed` is a genuine T-cycle: distinct elements and the step relation closes.
inline bool verify_cycle(const MapParams& map, std::span<const Integer> claimed) {
    if (claimed.empty()) return false;
    std::unordered_set<Integer, IntegerHash> seen;
    for (const auto& v : claimed) {
        if (sgn(v) <= 0 || !seen.insert(v).second) return false;
    }
    for (std::size_t i = 0; i < claimed.size(); ++i) {
        if (step(map, claimed[i]) != claimed[(i + 1) % claimed.size()]) return false;
    }
    return true;
}

inline bool verify_cycle(const MapParams& map, const std::vector<Integer>& claimed) {
    return verify_cycle(map, std::span<const Integer>(claimed));
}

/// Rotation and parity bookkeeping only; the caller vouches for the step relation.
inline Cycle canonical_form(std::span<const Integer> raw) {
    if (raw.empty()) throw Error(ErrorCode::NotACycle, "empty cycle");
    const auto min_it = std::min_element(raw.begin(), raw.end());
    Cycle c;
    c.elements.reserve(raw.size());
    c.elements.insert(c.elements.end(), min_it, raw.end());
    c.elements.insert(c.elements.end(), raw.begin(), min_it);
    c.omega = c.elements.front();
    c.max = *std::max_element(raw.begin(), raw.end());
    bool have_odd = false;
    for (const auto& v : c.elements) {
        if (is_odd(v)) {
            ++c.K;
            if (!have_odd || v < c.min_odd) c.min_odd = v;
            have_odd = true;
        } else {
            ++c.L;
        }
    }
    return c;
}

inline Cycle canonicalize(const MapParams& map, std::span<const Integer> raw) {
    if (!verify_cycle(map, raw)) throw Error(ErrorCode::NotACycle, "step relation fails or elements repeat");
    return canonical_form(raw);
}

inline Cycle canonicalize(const MapParams& map, const std::vector<Integer>& raw) {
    return canonicalize(map, std::span<const Integer>(raw));
}

} // namespace syracuse
