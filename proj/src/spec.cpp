#include "sponge/spec.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <sstream>

#include "json.hpp"
#include "sponge/error.hpp"

namespace sponge {

namespace {

using nlohmann::json;

std::string path_string(const std::vector<int>& path) {
    std::ostringstream os;
    os << '(';
    for (std::size_t n = 0; n < path.size(); ++n) os << (n ? "," : "") << path[n];
    os << ')';
    return os.str();
}

class Checker {
public:
    void add(std::string constraint, std::string level, std::vector<int> path, std::string what) {
        std::string message = constraint;
        std::replace(message.begin(), message.end(), '_', ' ');
        message += " at level " + level;
        if (!path.empty()) message += " " + path_string(path);
        message += ": " + what;
        report_.violations.push_back(
            {std::move(constraint), std::move(level), std::move(path), std::move(message)});
        report_.ok = false;
    }

    void ratio(double r, const std::string& level, std::vector<int> path) {
        if (!(r > 0.0 && r < 1.0)) {
            std::ostringstream os;
            os << "ratio " << r << " outside (0,1)";
            add("ratio_range", level, std::move(path), os.str());
        }
    }

    void level_sum(const std::vector<double>& ratios, const std::string& level,
                   std::vector<int> path) {
        double sum = 0.0;
        for (double r : ratios) sum += r;
        if (sum > 1.0 + kConstraintSlack) {
            std::ostringstream os;
            os << "sum " << sum << " exceeds 1";
            add("level_sum", level, std::move(path), os.str());
        }
    }

    // Offsets within one sibling group: strictly increasing with gap >= ratio,
    // last offset + ratio <= 1.
    void offsets(const std::vector<double>& u, const std::vector<double>& ratios,
                 const std::string& level, const std::vector<int>& parent) {
        if (u.size() != ratios.size()) {
            add("shape", level, parent, "offset count does not match ratio count");
            return;
        }
        for (std::size_t n = 0; n < u.size(); ++n) {
            auto path = parent;
            path.push_back(static_cast<int>(n + 1));
            if (!(u[n] >= 0.0 && u[n] < 1.0)) {
                add("offset_range", level, path, "offset outside [0,1)");
                continue;
            }
            const double next = n + 1 < u.size() ? u[n + 1] : 1.0;
            if (next - u[n] < ratios[n] - kConstraintSlack) {
                add("offset_gap", level, path, "gap to next offset smaller than ratio");
            }
        }
    }

    ValidationReport take() { return std::move(report_); }

private:
    ValidationReport report_;
};

std::vector<double> filled(const std::vector<double>& ratios) {
    std::vector<double> u(ratios.size());
    double acc = 0.0;
    for (std::size_t n = 0; n < ratios.size(); ++n) {
        u[n] = acc;
        acc += ratios[n];
    }
    return u;
}

template <class T>
T get_array(const json& doc, const char* key) {
    try {
        return doc.at(key).get<T>();
    } catch (const json::exception& e) {
        throw SchemaError(std::string("field '") + key + "': " + e.what());
    }
}

}  // namespace

ValidationReport validate(const SpongeLevels& lv) {
    Checker chk;
    const std::size_t m = lv.c.size();
    if (m == 0) chk.add("shape", "c", {}, "no first-level symbols");
    if (lv.b.size() != m) chk.add("shape", "b", {}, "length differs from c");
    if (lv.a.size() != m) chk.add("shape", "a", {}, "length differs from c");
    if (lv.u_c && lv.u_c->size() != m) chk.add("shape", "u_c", {}, "length differs from c");
    if (lv.u_b && lv.u_b->size() != lv.b.size()) chk.add("shape", "u_b", {}, "length differs from b");
    if (lv.u_a && lv.u_a->size() != lv.a.size()) chk.add("shape", "u_a", {}, "length differs from a");
    {
        auto early = chk.take();
        if (!early.ok) return early;
        chk = Checker{};
    }

    for (std::size_t i = 0; i < m; ++i) {
        const int ii = static_cast<int>(i + 1);
        if (lv.b[i].empty()) chk.add("shape", "b", {ii}, "no second-level symbols");
        if (lv.a[i].size() != lv.b[i].size()) chk.add("shape", "a", {ii}, "length differs from b");
        for (std::size_t j = 0; j < std::min(lv.a[i].size(), lv.b[i].size()); ++j) {
            if (lv.a[i][j].empty()) {
                chk.add("shape", "a", {ii, static_cast<int>(j + 1)}, "no third-level symbols");
            }
        }
    }
    {
        auto early = chk.take();
        if (!early.ok) return early;
        chk = Checker{};
    }

    for (std::size_t i = 0; i < m; ++i) {
        const int ii = static_cast<int>(i + 1);
        chk.ratio(lv.c[i], "c", {ii});
        for (std::size_t j = 0; j < lv.b[i].size(); ++j) {
            const int jj = static_cast<int>(j + 1);
            chk.ratio(lv.b[i][j], "b", {ii, jj});
            if (lv.b[i][j] > lv.c[i]) {
                chk.add("ratio_order", "b", {ii, jj}, "b_ij exceeds c_i");
            }
            for (std::size_t k = 0; k < lv.a[i][j].size(); ++k) {
                const int kk = static_cast<int>(k + 1);
                chk.ratio(lv.a[i][j][k], "a", {ii, jj, kk});
                if (lv.a[i][j][k] > lv.b[i][j]) {
                    chk.add("ratio_order", "a", {ii, jj, kk}, "a_ijk exceeds b_ij");
                }
            }
            chk.level_sum(lv.a[i][j], "a", {ii, jj});
        }
        chk.level_sum(lv.b[i], "b", {ii});
    }
    chk.level_sum(lv.c, "c", {});

    if (lv.u_c) chk.offsets(*lv.u_c, lv.c, "u_c", {});
    for (std::size_t i = 0; i < m; ++i) {
        const int ii = static_cast<int>(i + 1);
        if (lv.u_b) {
            if ((*lv.u_b)[i].size() != lv.b[i].size()) {
                chk.add("shape", "u_b", {ii}, "length differs from b");
            } else {
                chk.offsets((*lv.u_b)[i], lv.b[i], "u_b", {ii});
            }
        }
        if (lv.u_a) {
            const auto& ua = (*lv.u_a)[i];
            if (ua.size() != lv.a[i].size()) {
                chk.add("shape", "u_a", {ii}, "length differs from a");
                continue;
            }
            for (std::size_t j = 0; j < ua.size(); ++j) {
                chk.offsets(ua[j], lv.a[i][j], "u_a", {ii, static_cast<int>(j + 1)});
            }
        }
    }
    return chk.take();
}

SpongeLevels with_filled_offsets(SpongeLevels lv) {
    if (!lv.u_c) lv.u_c = filled(lv.c);
    if (!lv.u_b) {
        Nested2<double> u;
        for (const auto& row : lv.b) u.push_back(filled(row));
        lv.u_b = std::move(u);
    }
    if (!lv.u_a) {
        Nested3<double> u;
        for (const auto& plane : lv.a) {
            Nested2<double> up;
            for (const auto& row : plane) up.push_back(filled(row));
            u.push_back(std::move(up));
        }
        lv.u_a = std::move(u);
    }
    return lv;
}

SpongeSpec SpongeSpec::create(SpongeLevels levels) {
    // Shape problems must surface before filling, which assumes consistent shapes.
    auto report = validate(levels);
    if (report.ok) report = validate(levels = with_filled_offsets(std::move(levels)));
    if (!report.ok) {
        const auto& v = report.violations.front();
        throw ConstraintError(v.constraint, v.level, v.path, v.message);
    }
    return SpongeSpec(std::move(levels));
}

SpongeSpec::SpongeSpec(SpongeLevels levels) : levels_(std::move(levels)) {
    for (std::size_t i = 0; i < m(); ++i) {
        fiber_begin_.push_back(fibers_.size());
        log_c_.push_back(std::log(levels_.c[i]));
        min_c_ = std::min(min_c_, levels_.c[i]);
        max_c_ = std::max(max_c_, levels_.c[i]);
        for (std::size_t j = 0; j < m_i(i); ++j) {
            const std::size_t f = fibers_.size();
            fibers_.push_back({i, j, symbols_.size(), m_ij(i, j)});
            fiber_log_b_.push_back(std::log(levels_.b[i][j]));
            max_b_ = std::max(max_b_, levels_.b[i][j]);
            for (std::size_t k = 0; k < m_ij(i, j); ++k) {
                symbols_.push_back({i, j, k, f});
                symbol_log_a_.push_back(std::log(levels_.a[i][j][k]));
                min_a_ = std::min(min_a_, levels_.a[i][j][k]);
                max_a_ = std::max(max_a_, levels_.a[i][j][k]);
            }
        }
    }
    fiber_begin_.push_back(fibers_.size());
}

bool SpongeSpec::is_fully_symmetric() const noexcept {
    const auto& lv = levels_;
    for (std::size_t i = 0; i < m(); ++i) {
        if (lv.c[i] != lv.c[0] || lv.b[i].size() != lv.b[0].size()) return false;
        for (std::size_t j = 0; j < lv.b[i].size(); ++j) {
            if (lv.b[i][j] != lv.b[0][0] || lv.a[i][j].size() != lv.a[0][0].size()) return false;
            for (double r : lv.a[i][j]) {
                if (r != lv.a[0][0][0]) return false;
            }
        }
    }
    return true;
}

bool SpongeSpec::operator==(const SpongeSpec& o) const {
    const auto& x = levels_;
    const auto& y = o.levels_;
    return x.name == y.name && x.c == y.c && x.b == y.b && x.a == y.a && x.u_c == y.u_c &&
           x.u_b == y.u_b && x.u_a == y.u_a;
}

SubSpec restrict_to_fibers(const SpongeSpec& spec, const std::vector<bool>& keep) {
    if (keep.size() != spec.num_fibers()) {
        throw PreconditionError("restrict_to_fibers: mask size differs from fiber count");
    }
    const auto& lv = spec.levels();
    SpongeLevels sub;
    sub.name = lv.name + "/face";
    sub.u_c.emplace();
    sub.u_b.emplace();
    sub.u_a.emplace();
    std::vector<std::size_t> map;
    for (std::size_t i = 0; i < spec.m(); ++i) {
        std::vector<double> b, ub;
        Nested2<double> a, ua;
        for (std::size_t j = 0; j < spec.m_i(i); ++j) {
            const std::size_t f = spec.fiber_index(i, j);
            if (!keep[f]) continue;
            map.push_back(f);
            b.push_back(lv.b[i][j]);
            ub.push_back((*lv.u_b)[i][j]);
            a.push_back(lv.a[i][j]);
            ua.push_back((*lv.u_a)[i][j]);
        }
        if (b.empty()) continue;
        sub.c.push_back(lv.c[i]);
        sub.u_c->push_back((*lv.u_c)[i]);
        sub.b.push_back(std::move(b));
        sub.u_b->push_back(std::move(ub));
        sub.a.push_back(std::move(a));
        sub.u_a->push_back(std::move(ua));
    }
    if (map.empty()) throw PreconditionError("restrict_to_fibers: empty face");
    return {SpongeSpec::create(std::move(sub)), std::move(map)};
}

SpongeLevels parse_levels(std::string_view document) {
    json doc;
    try {
        doc = json::parse(document);
    } catch (const json::parse_error& e) {
        throw SchemaError(std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw SchemaError("document must be a JSON object");
    for (const auto& [key, value] : doc.items()) {
        static const char* const known[] = {"name", "c", "b", "a", "u_c", "u_b", "u_a"};
        if (std::find(std::begin(known), std::end(known), key) == std::end(known)) {
            throw SchemaError("unknown field '" + key + "'");
        }
    }
    SpongeLevels lv;
    if (doc.contains("name")) {
        if (!doc["name"].is_string()) throw SchemaError("field 'name' must be a string");
        lv.name = doc["name"].get<std::string>();
    }
    lv.c = get_array<std::vector<double>>(doc, "c");
    lv.b = get_array<Nested2<double>>(doc, "b");
    lv.a = get_array<Nested3<double>>(doc, "a");
    if (doc.contains("u_c")) lv.u_c = get_array<std::vector<double>>(doc, "u_c");
    if (doc.contains("u_b")) lv.u_b = get_array<Nested2<double>>(doc, "u_b");
    if (doc.contains("u_a")) lv.u_a = get_array<Nested3<double>>(doc, "u_a");
    return lv;
}

SpongeSpec parse_spec(std::string_view document) {
    return SpongeSpec::create(parse_levels(document));
}

std::string serialize_spec(const SpongeSpec& spec) {
    const auto& lv = spec.levels();
    json doc;
    doc["name"] = lv.name;
    doc["c"] = lv.c;
    doc["b"] = lv.b;
    doc["a"] = lv.a;
    doc["u_c"] = *lv.u_c;
    doc["u_b"] = *lv.u_b;
    doc["u_a"] = *lv.u_a;
    return doc.dump(2);
}

}  // namespace sponge
