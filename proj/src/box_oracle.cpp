#include "sponge/box_oracle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>
#include <unordered_set>

#include <json.hpp>

#include "sponge/error.hpp"

namespace sponge {

namespace {

constexpr int kAxisBits = 21;
constexpr std::int64_t kAxisCells = std::int64_t{1} << kAxisBits;

std::uint64_t pack(std::int64_t x, std::int64_t y, std::int64_t z) {
    return (static_cast<std::uint64_t>(x) << (2 * kAxisBits)) | (static_cast<std::uint64_t>(y) << kAxisBits) |
           static_cast<std::uint64_t>(z);
}

// Index range of cells whose interior meets the open interval (lo, hi).
std::pair<std::int64_t, std::int64_t> cell_range(double lo, double hi, double delta) {
    constexpr double eps = 1e-9;
    auto first = static_cast<std::int64_t>(std::floor(lo / delta + eps));
    auto last = static_cast<std::int64_t>(std::ceil(hi / delta - eps)) - 1;
    const std::int64_t top = static_cast<std::int64_t>(std::ceil(1.0 / delta - eps)) - 1;
    first = std::clamp<std::int64_t>(first, 0, top);
    last = std::clamp<std::int64_t>(last, first, top);
    return {first, last};
}

}  // namespace

BoxCover generate_cover(const SpongeSpec& spec, int depth, std::size_t max_boxes) {
    if (depth < 0) throw PreconditionError("depth must be non-negative");
    double expected = 1.0;
    for (int d = 0; d < depth; ++d) {
        expected *= static_cast<double>(spec.num_symbols());
        if (expected > static_cast<double>(max_boxes)) {
            throw PreconditionError("cover would have " + std::to_string(spec.num_symbols()) + "^" +
                                    std::to_string(depth) + " boxes, more than the limit of " +
                                    std::to_string(max_boxes));
        }
    }

    std::vector<std::array<double, 3>> offset(spec.num_symbols()), ratio(spec.num_symbols());
    for (std::size_t s = 0; s < spec.num_symbols(); ++s) {
        const auto& sym = spec.symbol(s);
        offset[s] = {spec.u_a(sym.i, sym.j, sym.k), spec.u_b(sym.i, sym.j), spec.u_c(sym.i)};
        ratio[s] = {spec.a(sym.i, sym.j, sym.k), spec.b(sym.i, sym.j), spec.c(sym.i)};
    }

    BoxCover cover{depth, {Box{{0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}}}};
    for (int d = 0; d < depth; ++d) {
        std::vector<Box> next;
        next.reserve(cover.boxes.size() * spec.num_symbols());
        for (const auto& box : cover.boxes) {
            for (std::size_t s = 0; s < spec.num_symbols(); ++s) {
                Box child;
                for (int q = 0; q < 3; ++q) {
                    child.corner[q] = box.corner[q] + box.edges[q] * offset[s][q];
                    child.edges[q] = box.edges[q] * ratio[s][q];
                }
                next.push_back(child);
            }
        }
        cover.boxes = std::move(next);
    }
    return cover;
}

double min_edge(const BoxCover& cover) {
    double out = 1.0;
    for (const auto& box : cover.boxes) out = std::min({out, box.edges[0], box.edges[1], box.edges[2]});
    return out;
}

double max_edge(const BoxCover& cover) {
    double out = 0.0;
    for (const auto& box : cover.boxes) out = std::max({out, box.edges[0], box.edges[1], box.edges[2]});
    return out;
}

std::vector<double> default_delta_series(const BoxCover& cover, int count) {
    if (count < 2) throw PreconditionError("delta series needs at least 2 values");
    const double lo = std::log(max_edge(cover));
    const double hi = 0.5 * lo;
    std::vector<double> out;
    for (int q = 0; q < count; ++q) out.push_back(std::exp(lo + (hi - lo) * q / (count - 1)));
    return out;
}

std::uint64_t count_cells(const BoxCover& cover, double delta) {
    if (!(delta > 0.0 && delta <= 1.0)) throw PreconditionError("delta must lie in (0, 1]");
    if (1.0 / delta > static_cast<double>(kAxisCells)) throw PreconditionError("delta too small for the cell grid");
    std::unordered_set<std::uint64_t> cells;
    cells.reserve(cover.boxes.size() * 2);
    for (const auto& box : cover.boxes) {
        const auto [x0, x1] = cell_range(box.corner[0], box.corner[0] + box.edges[0], delta);
        const auto [y0, y1] = cell_range(box.corner[1], box.corner[1] + box.edges[1], delta);
        const auto [z0, z1] = cell_range(box.corner[2], box.corner[2] + box.edges[2], delta);
        for (auto x = x0; x <= x1; ++x)
            for (auto y = y0; y <= y1; ++y)
                for (auto z = z0; z <= z1; ++z) cells.insert(pack(x, y, z));
    }
    return cells.size();
}

BoxCountEstimate box_count_estimate(const BoxCover& cover, const std::vector<double>& deltas, int threads) {
    if (deltas.size() < 3) throw PreconditionError("degenerate regression: fewer than 3 delta values");
    const double floor = min_edge(cover);
    for (double d : deltas) {
        if (!(d >= floor * (1 - 1e-12) && d <= 1.0)) {
            throw PreconditionError("delta values must lie between the smallest box edge and 1");
        }
    }

    BoxCountEstimate est;
    est.deltas = deltas;
    est.counts.resize(deltas.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t q; (q = next++) < deltas.size();) est.counts[q] = count_cells(cover, deltas[q]);
    };
    const std::size_t workers = std::clamp<std::size_t>(threads, 1, deltas.size());
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();

    const double n = static_cast<double>(deltas.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t q = 0; q < deltas.size(); ++q) {
        const double x = -std::log(deltas[q]), y = std::log(static_cast<double>(est.counts[q]));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double sxx_c = sxx - sx * sx / n;
    if (!(sxx_c > 0.0)) throw PreconditionError("degenerate regression: all delta values coincide");
    est.slope = (sxy - sx * sy / n) / sxx_c;
    est.intercept = (sy - est.slope * sx) / n;
    double rss = 0.0;
    for (std::size_t q = 0; q < deltas.size(); ++q) {
        const double r = std::log(static_cast<double>(est.counts[q])) - est.intercept + est.slope * std::log(deltas[q]);
        rss += r * r;
    }
    est.slope_stderr = std::sqrt(rss / (n - 2.0) / sxx_c);
    est.band_low = est.slope - 2.0 * est.slope_stderr;
    est.band_high = est.slope + 2.0 * est.slope_stderr;
    return est;
}

OracleComparison compare_with_formula(const BoxCountEstimate& estimate, double formula, int depth,
                                      double tolerance) {
    OracleComparison out;
    out.depth = depth;
    out.slope = estimate.slope;
    out.band_low = estimate.band_low;
    out.band_high = estimate.band_high;
    out.formula = formula;
    out.tolerance = tolerance;
    out.agrees = estimate.slope >= formula - tolerance;
    out.flagged_above = estimate.slope > formula + tolerance;
    out.caveat =
        "finite-depth grid box-counting slope; the box dimension of a self-affine sponge may exceed its "
        "Hausdorff dimension, so only slope >= formula - tolerance is required and larger slopes are flagged";
    return out;
}

std::string export_geometry(const BoxCover& cover, std::string_view format) {
    std::ostringstream os;
    os.precision(17);
    if (format == "obj") {
        os << "# depth " << cover.depth << ", " << cover.boxes.size() << " boxes\n";
        static constexpr int faces[12][3] = {{1, 3, 2}, {2, 3, 4}, {5, 6, 7}, {6, 8, 7}, {1, 2, 5}, {2, 6, 5},
                                             {3, 7, 4}, {4, 7, 8}, {1, 5, 3}, {3, 5, 7}, {2, 4, 6}, {4, 8, 6}};
        std::size_t base = 0;
        for (const auto& box : cover.boxes) {
            // Vertex v = 1 + x + 2y + 4z over the corner bits.
            for (int v = 0; v < 8; ++v) {
                os << 'v';
                for (int q = 0; q < 3; ++q) os << ' ' << box.corner[q] + ((v >> q) & 1) * box.edges[q];
                os << '\n';
            }
            for (const auto& f : faces) {
                os << "f " << base + f[0] << ' ' << base + f[1] << ' ' << base + f[2] << '\n';
            }
            base += 8;
        }
        return os.str();
    }
    if (format == "json") {
        nlohmann::json doc;
        doc["depth"] = cover.depth;
        doc["boxes"] = nlohmann::json::array();
        for (const auto& box : cover.boxes) doc["boxes"].push_back({{"corner", box.corner}, {"edges", box.edges}});
        return doc.dump() + "\n";
    }
    throw PreconditionError("unsupported geometry format '" + std::string(format) + "' (expected json or obj)");
}

BoxCover parse_geometry_json(std::string_view document) {
    try {
        const auto doc = nlohmann::json::parse(document);
        BoxCover cover;
        cover.depth = doc.at("depth").get<int>();
        for (const auto& b : doc.at("boxes")) {
            cover.boxes.push_back({b.at("corner").get<std::array<double, 3>>(), b.at("edges").get<std::array<double, 3>>()});
        }
        return cover;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("geometry document: ") + e.what());
    }
}

}  // namespace sponge
