#pragma once

// Joint distributions q_{s,t} over (#single-edges, #triangle corners) per node.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace clusterepi {

using Count = std::uint32_t;

struct DegreePair {
    Count s = 0;  // single-edge stubs
    Count t = 0;  // triangle corners
    friend bool operator==(const DegreePair&, const DegreePair&) = default;
};

/// Independent Poisson counts of single-edges and triangles.
struct DoublyPoisson {
    double lambda_s = 0.0;
    double lambda_t = 0.0;
};

/// s = 2 * Poisson((4 - c) / 2 * lambda), t = Poisson(c / 2 * lambda).
/// Mean degree 4*lambda and degree variance 8*lambda for every c in [0, 4].
struct ClusterTunable {
    double lambda = 1.0;
    double c = 0.0;

    double pair_rate() const { return 0.5 * (4.0 - c) * lambda; }
    double triangle_rate() const { return 0.5 * c * lambda; }
};

struct TableRow {
    Count s = 0;
    Count t = 0;
    double p = 0.0;
};

/// Finite-support joint distribution. Rows must be distinct with sum(p) == 1.
struct Table {
    std::vector<TableRow> rows;
};

struct MomentSet {
    double mean_s = 0.0;  // <s>
    double mean_t = 0.0;  // <t>
    double ex2_s = 0.0;   // <s^2>
    double ex2_t = 0.0;   // <t^2>
    double cross = 0.0;   // <st>
};

/// G(a,b) = sum q a^s b^t and its two size-biased companions.
struct PgfTerms {
    double G = 1.0;
    double edge = 1.0;  // sum s q a^(s-1) b^t / <s>
    double tri = 1.0;   // sum t q a^s b^(t-1) / <t>
};

namespace detail {

inline double poisson_pmf(double rate, Count k) {
    if (rate == 0.0) return k == 0 ? 1.0 : 0.0;
    return std::exp(static_cast<double>(k) * std::log(rate) - rate -
                    std::lgamma(static_cast<double>(k) + 1.0));
}

template <class URBG>
Count draw_poisson(double rate, URBG& rng) {
    if (rate <= 0.0) return 0;
    std::poisson_distribution<Count> dist(rate);
    return dist(rng);
}

inline double ipow(double base, Count e) {
    // pow(0, 0) == 1 is what the generating functions need.
    return e == 0 ? 1.0 : std::pow(base, static_cast<double>(e));
}

}  // namespace detail

class JointDegreeModel {
public:
    using Variant = std::variant<DoublyPoisson, ClusterTunable, Table>;

    JointDegreeModel(DoublyPoisson m) : model_(m) { validate(); }
    JointDegreeModel(ClusterTunable m) : model_(m) { validate(); }
    JointDegreeModel(Table m) : model_(std::move(m)) {
        validate();
        const auto& rows = std::get<Table>(model_).rows;
        cumulative_.reserve(rows.size());
        double acc = 0.0;
        for (const auto& r : rows) cumulative_.push_back(acc += r.p);
    }

    const Variant& variant() const { return model_; }

    template <class T>
    const T* get_if() const { return std::get_if<T>(&model_); }

    double pmf(Count s, Count t) const {
        return std::visit(
            [&](const auto& m) -> double {
                using M = std::decay_t<decltype(m)>;
                if constexpr (std::is_same_v<M, DoublyPoisson>) {
                    return detail::poisson_pmf(m.lambda_s, s) * detail::poisson_pmf(m.lambda_t, t);
                } else if constexpr (std::is_same_v<M, ClusterTunable>) {
                    if (s % 2 != 0) return 0.0;
                    return detail::poisson_pmf(m.pair_rate(), s / 2) *
                           detail::poisson_pmf(m.triangle_rate(), t);
                } else {
                    for (const auto& r : m.rows)
                        if (r.s == s && r.t == t) return r.p;
                    return 0.0;
                }
            },
            model_);
    }

    MomentSet moments() const {
        return std::visit(
            [](const auto& m) -> MomentSet {
                using M = std::decay_t<decltype(m)>;
                MomentSet out;
                if constexpr (std::is_same_v<M, DoublyPoisson>) {
                    out.mean_s = m.lambda_s;
                    out.ex2_s = m.lambda_s + m.lambda_s * m.lambda_s;
                    out.mean_t = m.lambda_t;
                    out.ex2_t = m.lambda_t + m.lambda_t * m.lambda_t;
                    out.cross = m.lambda_s * m.lambda_t;
                } else if constexpr (std::is_same_v<M, ClusterTunable>) {
                    const double a = m.pair_rate();
                    const double b = m.triangle_rate();
                    out.mean_s = 2.0 * a;
                    out.ex2_s = 4.0 * (a + a * a);
                    out.mean_t = b;
                    out.ex2_t = b + b * b;
                    out.cross = 2.0 * a * b;
                } else {
                    for (const auto& r : m.rows) {
                        const double s = r.s, t = r.t;
                        out.mean_s += r.p * s;
                        out.mean_t += r.p * t;
                        out.ex2_s += r.p * s * s;
                        out.ex2_t += r.p * t * t;
                        out.cross += r.p * s * t;
                    }
                }
                return out;
            },
            model_);
    }

    /// Evaluates the three generating-function sums at (a, b) in [0,1]^2.
    /// A size-biased term whose normalizing mean is zero is defined as 1.
    PgfTerms pgf_terms(double a, double b) const {
        if (!(a >= 0.0 && a <= 1.0 && b >= 0.0 && b <= 1.0))
            throw std::domain_error("pgf_terms: arguments must lie in [0,1]");
        return std::visit(
            [&](const auto& m) -> PgfTerms {
                using M = std::decay_t<decltype(m)>;
                PgfTerms out;
                if constexpr (std::is_same_v<M, DoublyPoisson>) {
                    const double v = std::exp(m.lambda_s * (a - 1.0) + m.lambda_t * (b - 1.0));
                    out.G = v;
                    out.edge = m.lambda_s > 0.0 ? v : 1.0;
                    out.tri = m.lambda_t > 0.0 ? v : 1.0;
                } else if constexpr (std::is_same_v<M, ClusterTunable>) {
                    const double v =
                        std::exp(m.pair_rate() * (a * a - 1.0) + m.triangle_rate() * (b - 1.0));
                    out.G = v;
                    out.edge = m.pair_rate() > 0.0 ? a * v : 1.0;
                    out.tri = m.triangle_rate() > 0.0 ? v : 1.0;
                } else {
                    double g = 0.0, edge = 0.0, tri = 0.0, ms = 0.0, mt = 0.0;
                    for (const auto& r : m.rows) {
                        g += r.p * detail::ipow(a, r.s) * detail::ipow(b, r.t);
                        if (r.s > 0) {
                            edge += r.p * r.s * detail::ipow(a, r.s - 1) * detail::ipow(b, r.t);
                            ms += r.p * r.s;
                        }
                        if (r.t > 0) {
                            tri += r.p * r.t * detail::ipow(a, r.s) * detail::ipow(b, r.t - 1);
                            mt += r.p * r.t;
                        }
                    }
                    out.G = std::clamp(g, 0.0, 1.0);
                    out.edge = ms > 0.0 ? std::clamp(edge / ms, 0.0, 1.0) : 1.0;
                    out.tri = mt > 0.0 ? std::clamp(tri / mt, 0.0, 1.0) : 1.0;
                }
                return out;
            },
            model_);
    }

    template <class URBG>
    DegreePair sample(URBG& rng) const {
        return std::visit(
            [&](const auto& m) -> DegreePair {
                using M = std::decay_t<decltype(m)>;
                if constexpr (std::is_same_v<M, DoublyPoisson>) {
                    const Count s = detail::draw_poisson(m.lambda_s, rng);
                    const Count t = detail::draw_poisson(m.lambda_t, rng);
                    return {s, t};
                } else if constexpr (std::is_same_v<M, ClusterTunable>) {
                    const Count x = detail::draw_poisson(m.pair_rate(), rng);
                    const Count t = detail::draw_poisson(m.triangle_rate(), rng);
                    return {2 * x, t};
                } else {
                    std::uniform_real_distribution<double> unif(0.0, cumulative_.back());
                    const double u = unif(rng);
                    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
                    if (it == cumulative_.end()) --it;
                    const auto& r = m.rows[static_cast<std::size_t>(it - cumulative_.begin())];
                    return {r.s, r.t};
                }
            },
            model_);
    }

private:
    void validate() const {
        std::visit(
            [](const auto& m) {
                using M = std::decay_t<decltype(m)>;
                if constexpr (std::is_same_v<M, DoublyPoisson>) {
                    if (!(m.lambda_s >= 0.0) || !(m.lambda_t >= 0.0) || !std::isfinite(m.lambda_s) ||
                        !std::isfinite(m.lambda_t))
                        throw std::invalid_argument("DoublyPoisson: rates must be finite and >= 0");
                } else if constexpr (std::is_same_v<M, ClusterTunable>) {
                    if (!(m.lambda > 0.0) || !std::isfinite(m.lambda))
                        throw std::invalid_argument("ClusterTunable: lambda must be > 0");
                    if (!(m.c >= 0.0 && m.c <= 4.0))
                        throw std::invalid_argument("ClusterTunable: c must lie in [0,4]");
                } else {
                    if (m.rows.empty()) throw std::invalid_argument("Table: no rows");
                    std::set<std::pair<Count, Count>> seen;
                    double total = 0.0;
                    for (const auto& r : m.rows) {
                        if (!(r.p >= 0.0) || !std::isfinite(r.p))
                            throw std::invalid_argument("Table: probabilities must be >= 0");
                        if (!seen.emplace(r.s, r.t).second)
                            throw std::invalid_argument("Table: duplicate (s,t) pair");
                        total += r.p;
                    }
                    if (std::abs(total - 1.0) > 1e-12)
                        throw std::invalid_argument("Table: probabilities must sum to 1");
                }
            },
            model_);
    }

    Variant model_;
    std::vector<double> cumulative_;
};

/// Parses `s,t,p` CSV. The total mass must be within 1e-9 of one; rows are
/// then renormalized so the resulting Table sums to one exactly.
inline Table parse_table_csv(std::istream& in) {
    std::string line;
    auto trim = [](std::string x) {
        const auto b = x.find_first_not_of(" \t\r");
        const auto e = x.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string{} : x.substr(b, e - b + 1);
    };
    if (!std::getline(in, line) || trim(line) != "s,t,p")
        throw std::invalid_argument("table csv: expected header 's,t,p'");

    Table table;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string fs, ft, fp;
        if (!std::getline(ss, fs, ',') || !std::getline(ss, ft, ',') || !std::getline(ss, fp))
            throw std::invalid_argument("table csv: malformed line " + std::to_string(lineno));
        try {
            std::size_t used = 0;
            const long long s = std::stoll(trim(fs), &used);
            const long long t = std::stoll(trim(ft));
            const double p = std::stod(trim(fp));
            if (s < 0 || t < 0) throw std::invalid_argument("negative count");
            table.rows.push_back({static_cast<Count>(s), static_cast<Count>(t), p});
        } catch (const std::exception&) {
            throw std::invalid_argument("table csv: bad value on line " + std::to_string(lineno));
        }
    }
    if (table.rows.empty()) throw std::invalid_argument("table csv: no rows");
    double total = 0.0;
    for (const auto& r : table.rows) total += r.p;
    if (!(total >= 1.0 - 1e-9 && total <= 1.0 + 1e-9))
        throw std::invalid_argument("table csv: probabilities sum outside [1-1e-9, 1+1e-9]");
    for (auto& r : table.rows) r.p /= total;
    return table;
}

inline Table load_table_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open table file: " + path);
    return parse_table_csv(in);
}

}  // namespace clusterepi
