#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "sponge/dimension.hpp"
#include "sponge/spec.hpp"

namespace sponge {

struct Box {
    std::array<double, 3> corner{};
    std::array<double, 3> edges{};

    bool operator==(const Box&) const = default;
};

/// Every R_{omega(n)} over words of length `depth`, in lexicographic word order.
struct BoxCover {
    int depth = 0;
    std::vector<Box> boxes;
};

inline constexpr std::size_t kDefaultMaxBoxes = std::size_t{1} << 22;

/// Throws PreconditionError when |I|^depth exceeds max_boxes. Depth 0 is
/// the unit cube.
BoxCover generate_cover(const SpongeSpec& spec, int depth, std::size_t max_boxes = kDefaultMaxBoxes);

double min_edge(const BoxCover& cover);
double max_edge(const BoxCover& cover);

/// Geometric series of `count` values from the largest box edge of the
/// cover up to its square root. Below the largest edge the count starts to
/// resolve the boxes themselves instead of the attractor.
std::vector<double> default_delta_series(const BoxCover& cover, int count = 8);

/// Number of grid cells [q delta, (q+1) delta)^3 meeting the interior of some box.
std::uint64_t count_cells(const BoxCover& cover, double delta);

struct BoxCountEstimate {
    std::vector<double> deltas;
    std::vector<std::uint64_t> counts;
    double slope = 0;      // least squares of log N against log(1/delta)
    double intercept = 0;
    double slope_stderr = 0;
    double band_low = 0;   // slope -/+ 2 standard errors
    double band_high = 0;
};

/// Requires at least 3 deltas, each in [min_edge(cover), 1].
BoxCountEstimate box_count_estimate(const BoxCover& cover, const std::vector<double>& deltas, int threads = 1);

/// One-sided reading of a finite-depth box-count slope against the formula:
/// agreement means slope >= formula - tolerance, and a slope above
/// formula + tolerance is flagged rather than failed.
OracleComparison compare_with_formula(const BoxCountEstimate& estimate, double formula, int depth,
                                      double tolerance = 0.15);

/// "json" or "obj"; anything else throws PreconditionError.
std::string export_geometry(const BoxCover& cover, std::string_view format);

/// Inverse of export_geometry(cover, "json").
BoxCover parse_geometry_json(std::string_view document);

}  // namespace sponge
