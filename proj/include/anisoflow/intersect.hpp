#pragma once

#include <cstddef>
#include <optional>
#include <utility>

#include "anisoflow/polycurve.hpp"
#include "anisoflow/vec2.hpp"

namespace anisoflow {

// Strict transversal crossing test: the open interiors of segments ab and cd
// intersect at a single point. Shared endpoints, touching and collinear
// overlap all return false.
inline bool segments_properly_cross(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
    const double d1 = cross(d - c, a - c);
    const double d2 = cross(d - c, b - c);
    const double d3 = cross(b - a, c - a);
    const double d4 = cross(b - a, d - a);
    return ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) &&
           ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0));
}

// O(N^2) sweep over non-adjacent segment pairs.
inline bool polygon_is_simple(const PolyCurve& poly) {
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (j == i + 1 || (i == 0 && j == n - 1)) continue;  // adjacent share a vertex
            if (segments_properly_cross(poly.pts[i], poly.pts[(i + 1) % n], poly.pts[j],
                                        poly.pts[(j + 1) % n]))
                return false;
        }
    }
    return true;
}

// Inclusive index range of polygon segments (segment i starts at vertex i).
struct SegmentRange {
    std::size_t begin = 0;
    std::size_t count = 0;

    bool contains(std::size_t i, std::size_t n) const {
        if (count == 0) return false;
        const std::size_t off = (i + n - begin % n) % n;
        return off < count;
    }
};

// First properly crossing segment pair between two polygons, skipping pairs
// where both segments fall in the respective excluded ranges (used for arcs
// that coincide by construction).
inline std::optional<std::pair<std::size_t, std::size_t>> polygons_properly_cross(
    const PolyCurve& a, const PolyCurve& b, const SegmentRange& skip_a = {},
    const SegmentRange& skip_b = {}) {
    const std::size_t na = a.size(), nb = b.size();
    for (std::size_t i = 0; i < na; ++i) {
        for (std::size_t j = 0; j < nb; ++j) {
            if (skip_a.contains(i, na) && skip_b.contains(j, nb)) continue;
            if (segments_properly_cross(a.pts[i], a.pts[(i + 1) % na], b.pts[j],
                                        b.pts[(j + 1) % nb]))
                return std::make_pair(i, j);
        }
    }
    return std::nullopt;
}

}  // namespace anisoflow
