#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace anisoflow {

// Base class for every failure raised by the flow machinery.
struct FlowError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegenerateEdge : FlowError {
    explicit DegenerateEdge(std::size_t edge)
        : FlowError("zero-length edge " + std::to_string(edge)), index(edge) {}
    std::size_t index;
};

// Turning angle reached +-pi: tan(phi/2) is undefined and the scheme breaks down.
struct FoldedVertex : FlowError {
    FoldedVertex(std::size_t vertex, double phi)
        : FlowError("folded vertex " + std::to_string(vertex) +
                    " (turning angle " + std::to_string(phi) + ")"),
          index(vertex), turn(phi) {}
    std::size_t index;
    double turn;
};

// cos(phi/2) fell under the guard threshold; vertex averaging would blow up.
struct NearlyFoldedVertex : FlowError {
    NearlyFoldedVertex(std::size_t vertex, double cos_half)
        : FlowError("nearly folded vertex " + std::to_string(vertex) +
                    " (cos(phi/2) = " + std::to_string(cos_half) + ")"),
          index(vertex), c(cos_half) {}
    std::size_t index;
    double c;
};

struct NonpositiveArea : FlowError {
    explicit NonpositiveArea(double area)
        : FlowError("enclosed area " + std::to_string(area) + " is not positive"), value(area) {}
    double value;
};

// max|sin(phi/2)| == 0: the polygon is flat, not a closed curve.
struct AllFlat : FlowError {
    AllFlat() : FlowError("all turning angles vanish; not a closed polygon") {}
};

struct SolveFailure : FlowError {
    using FlowError::FlowError;
};

struct RadiusTooSmall : FlowError {
    RadiusTooSmall(double radius, double threshold)
        : FlowError("circle radius " + std::to_string(radius) +
                    " below admissible threshold " + std::to_string(threshold)),
          value(radius), min_value(threshold) {}
    double value;
    double min_value;
};

struct DegenerateSpec : FlowError {
    using FlowError::FlowError;
};

// Configuration problems carry the offending field path, e.g. "sigma.eps".
struct ConfigError : FlowError {
    ConfigError(std::string field_path, const std::string& what)
        : FlowError(field_path + ": " + what), path(std::move(field_path)) {}
    std::string path;
};

}  // namespace anisoflow
