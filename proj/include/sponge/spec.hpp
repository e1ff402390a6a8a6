#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sponge {

template <class T>
using Nested2 = std::vector<std::vector<T>>;
template <class T>
using Nested3 = std::vector<std::vector<std::vector<T>>>;

/// Raw, unvalidated description of a sponge as it appears in an input
/// document. Level arrays are indexed [i], [i][j], [i][j][k] (0-based here;
/// every report uses 1-based paths).
struct SpongeLevels {
    std::string name;
    std::vector<double> c;
    Nested2<double> b;
    Nested3<double> a;
    std::optional<std::vector<double>> u_c;
    std::optional<Nested2<double>> u_b;
    std::optional<Nested3<double>> u_a;
};

struct Violation {
    std::string constraint;  // shape, ratio_range, ratio_order, level_sum, offset_range, offset_gap
    std::string level;       // c, b, a, u_c, u_b, u_a
    std::vector<int> path;   // 1-based
    std::string message;

    bool operator==(const Violation&) const = default;
};

struct ValidationReport {
    bool ok = true;
    std::vector<Violation> violations;
};

/// Slack applied to sum and gap constraints so that exact equality cases
/// (e.g. three ratios of 1/3) survive floating-point accumulation.
inline constexpr double kConstraintSlack = 1e-12;

/// Checks every constraint; never throws.
ValidationReport validate(const SpongeLevels& levels);

/// Greedy left-packing u_1 = 0, u_{n+1} = u_n + r_n for every omitted
/// offset level.
SpongeLevels with_filled_offsets(SpongeLevels levels);

struct FiberInfo {
    std::size_t i = 0;
    std::size_t j = 0;
    std::size_t first_symbol = 0;
    std::size_t count = 0;  // m_ij
};

struct SymbolInfo {
    std::size_t i = 0;
    std::size_t j = 0;
    std::size_t k = 0;
    std::size_t fiber = 0;
};

/// Immutable, validated sponge. Fibers (i,j) and symbols (i,j,k) are also
/// addressable through flat lexicographic indices.
class SpongeSpec {
public:
    /// Fills omitted offsets and validates. Throws ConstraintError carrying the
    /// first violation found.
    static SpongeSpec create(SpongeLevels levels);

    const std::string& name() const noexcept { return levels_.name; }
    const SpongeLevels& levels() const noexcept { return levels_; }

    std::size_t m() const noexcept { return levels_.c.size(); }
    std::size_t m_i(std::size_t i) const { return levels_.b.at(i).size(); }
    std::size_t m_ij(std::size_t i, std::size_t j) const { return levels_.a.at(i).at(j).size(); }

    double c(std::size_t i) const { return levels_.c[i]; }
    double b(std::size_t i, std::size_t j) const { return levels_.b[i][j]; }
    double a(std::size_t i, std::size_t j, std::size_t k) const { return levels_.a[i][j][k]; }
    double u_c(std::size_t i) const { return (*levels_.u_c)[i]; }
    double u_b(std::size_t i, std::size_t j) const { return (*levels_.u_b)[i][j]; }
    double u_a(std::size_t i, std::size_t j, std::size_t k) const { return (*levels_.u_a)[i][j][k]; }

    std::size_t num_fibers() const noexcept { return fibers_.size(); }
    const FiberInfo& fiber(std::size_t f) const { return fibers_[f]; }
    std::size_t fiber_index(std::size_t i, std::size_t j) const { return fiber_begin_[i] + j; }
    /// Fibers of first-level symbol i occupy [fiber_begin(i), fiber_begin(i+1)).
    std::size_t fiber_begin(std::size_t i) const { return fiber_begin_[i]; }

    std::size_t num_symbols() const noexcept { return symbols_.size(); }
    const SymbolInfo& symbol(std::size_t s) const { return symbols_[s]; }
    std::size_t symbol_index(std::size_t i, std::size_t j, std::size_t k) const {
        return fibers_[fiber_index(i, j)].first_symbol + k;
    }

    // Log-ratios in flat layouts.
    double log_c(std::size_t i) const { return log_c_[i]; }
    double fiber_log_b(std::size_t f) const { return fiber_log_b_[f]; }
    double symbol_log_a(std::size_t s) const { return symbol_log_a_[s]; }

    double min_a() const noexcept { return min_a_; }
    double max_a() const noexcept { return max_a_; }
    double max_b() const noexcept { return max_b_; }
    double min_c() const noexcept { return min_c_; }
    double max_c() const noexcept { return max_c_; }

    /// All ratios equal at each level and all counts equal at each level.
    bool is_fully_symmetric() const noexcept;

    bool operator==(const SpongeSpec& other) const;

private:
    explicit SpongeSpec(SpongeLevels levels);

    SpongeLevels levels_;
    std::vector<FiberInfo> fibers_;
    std::vector<std::size_t> fiber_begin_;
    std::vector<SymbolInfo> symbols_;
    std::vector<double> log_c_;
    std::vector<double> fiber_log_b_;
    std::vector<double> symbol_log_a_;
    double min_a_ = 1, max_a_ = 0, max_b_ = 0, min_c_ = 1, max_c_ = 0;
};

/// Sub-sponge keeping only the fibers flagged in `keep`; first-level symbols
/// left without fibers are dropped. `fiber_map[f]` is the original index of
/// sub-fiber f.
struct SubSpec {
    SpongeSpec spec;
    std::vector<std::size_t> fiber_map;
};
SubSpec restrict_to_fibers(const SpongeSpec& spec, const std::vector<bool>& keep);

/// Parses the JSON document format; throws SchemaError on malformed input.
SpongeLevels parse_levels(std::string_view document);

/// parse_levels + SpongeSpec::create.
SpongeSpec parse_spec(std::string_view document);

/// Serializes with offsets always present.
std::string serialize_spec(const SpongeSpec& spec);

}  // namespace sponge
