#pragma once

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "sponge/random.hpp"
#include "sponge/spec.hpp"

namespace sponge::testing {

inline SpongeSpec uniform_spec(double r, std::size_t m, std::size_t m_i, std::size_t m_ij) {
    SpongeLevels lv;
    lv.name = "uniform";
    lv.c.assign(m, r);
    lv.b.assign(m, std::vector<double>(m_i, r));
    lv.a.assign(m, Nested2<double>(m_i, std::vector<double>(m_ij, r)));
    return SpongeSpec::create(lv);
}

inline SpongeSpec make_spec(std::vector<double> c, Nested2<double> b, Nested3<double> a) {
    SpongeLevels lv;
    lv.name = "test";
    lv.c = std::move(c);
    lv.b = std::move(b);
    lv.a = std::move(a);
    return SpongeSpec::create(lv);
}

inline std::string read_text(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline SpongeSpec load_spec(const std::string& name) {
    return parse_spec(read_text(std::string(SPONGE_SPECS_DIR) + "/" + name + ".json"));
}

/// Random valid spec: shapes up to max_count per level, ratios in
/// [0.05, bound] where bound keeps every order and sum constraint.
inline SpongeSpec random_spec(Rng& rng, std::size_t max_count = 3) {
    auto count = [&] { return 1 + static_cast<std::size_t>(rng.uniform() * max_count * 0.999999); };
    auto ratio = [&](double bound) { return 0.05 + (bound - 0.05) * rng.uniform(); };
    SpongeLevels lv;
    lv.name = "random";
    const std::size_t m = count();
    for (std::size_t i = 0; i < m; ++i) {
        lv.c.push_back(ratio(0.95 / m));
        const std::size_t mi = count();
        std::vector<double> b;
        Nested2<double> a;
        for (std::size_t j = 0; j < mi; ++j) {
            b.push_back(ratio(std::min(lv.c.back(), 0.95 / mi)));
            const std::size_t mij = count();
            std::vector<double> ak;
            for (std::size_t k = 0; k < mij; ++k) ak.push_back(ratio(std::min(b.back(), 0.95 / mij)));
            a.push_back(std::move(ak));
        }
        lv.b.push_back(std::move(b));
        lv.a.push_back(std::move(a));
    }
    return SpongeSpec::create(lv);
}

/// Closed form for grid-aligned sponges with c = 1/n1, b = 1/n2, a = 1/n3:
/// log_{n1} sum_i (sum_j m_ij^{log_{n3} n2})^{log_{n2} n1}.
inline double grid_sponge_dimension(const SpongeSpec& s) {
    const double n1 = 1.0 / s.c(0), n2 = 1.0 / s.b(0, 0), n3 = 1.0 / s.a(0, 0, 0);
    double outer = 0.0;
    for (std::size_t i = 0; i < s.m(); ++i) {
        double inner = 0.0;
        for (std::size_t j = 0; j < s.m_i(i); ++j) {
            inner += std::pow(static_cast<double>(s.m_ij(i, j)), std::log(n2) / std::log(n3));
        }
        outer += std::pow(inner, std::log(n1) / std::log(n2));
    }
    return std::log(outer) / std::log(n1);
}

}  // namespace sponge::testing
