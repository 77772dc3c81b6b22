#include "pexstab/domain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>

#include "pexstab/error.hpp"

namespace pexstab {
namespace {

__extension__ using Wide = __int128;

std::int64_t floor_mod(std::int64_t a, std::int64_t m) {
    const std::int64_t r = a % m;
    return r < 0 ? r + m : r;
}

std::int64_t centered(std::int64_t a, std::int64_t m) {
    const std::int64_t r = floor_mod(a, m);
    return 2 * r > m ? r - m : r;
}

std::vector<Point> enumerate_modular(int m, int d) {
    std::vector<Point> out;
    std::size_t total = 1;
    for (int i = 0; i < d; ++i) total *= static_cast<std::size_t>(m);
    out.reserve(total);
    for (std::size_t idx = 0; idx < total; ++idx) {
        Point p(static_cast<std::size_t>(d));
        std::size_t rest = idx;
        for (int i = d - 1; i >= 0; --i) {
            p[static_cast<std::size_t>(i)] = centered(static_cast<std::int64_t>(rest % m), m);
            rest /= static_cast<std::size_t>(m);
        }
        out.push_back(std::move(p));
    }
    return out;
}

std::vector<Point> enumerate_window(int d, int radius) {
    const std::size_t side = static_cast<std::size_t>(2 * radius + 1);
    std::size_t total = 1;
    for (int i = 0; i < d; ++i) total *= side;
    std::vector<Point> out;
    out.reserve(total);
    for (std::size_t idx = 0; idx < total; ++idx) {
        Point p(static_cast<std::size_t>(d));
        std::size_t rest = idx;
        for (int i = d - 1; i >= 0; --i) {
            p[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(rest % side) - radius;
            rest /= side;
        }
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace

Carrier::Carrier(bool modular, int dim, int modulus, int radius)
    : modular_(modular), dim_(dim), modulus_(modulus), radius_(radius) {
    points_ = std::make_shared<const std::vector<Point>>(modular ? enumerate_modular(modulus, dim)
                                                                 : enumerate_window(dim, radius));
}

Carrier Carrier::modular(int modulus, int dim) {
    if (modulus < 2) throw Error(ErrorKind::Config, "modulus must be >= 2");
    if (dim < 1) throw Error(ErrorKind::Config, "dimension must be >= 1");
    if (std::pow(static_cast<double>(modulus), dim) > 1e6)
        throw Error(ErrorKind::Config, "modular carrier too large to enumerate");
    return Carrier(true, dim, modulus, 0);
}

Carrier Carrier::lattice(int dim, int radius) {
    if (dim < 1) throw Error(ErrorKind::Config, "dimension must be >= 1");
    if (radius < 1) throw Error(ErrorKind::Config, "window radius must be >= 1");
    if (std::pow(2.0 * radius + 1.0, dim) > 1e6)
        throw Error(ErrorKind::Config, "lattice window too large to enumerate");
    return Carrier(false, dim, 0, radius);
}

Point Carrier::reduce(Point x) const {
    if (modular_)
        for (auto& c : x) c = centered(c, modulus_);
    return x;
}

Point Carrier::add(const Point& x, const Point& y) const {
    Point out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + y[i];
    return reduce(std::move(out));
}

bool Carrier::contains(const Point& x) const {
    if (x.size() != static_cast<std::size_t>(dim_)) return false;
    for (auto c : x) {
        if (modular_) {
            if (centered(c, modulus_) != c) return false;
        } else if (c < -radius_ || c > radius_) {
            return false;
        }
    }
    return true;
}

std::optional<std::size_t> Carrier::index_of(const Point& x) const {
    if (!contains(x)) return std::nullopt;
    std::size_t idx = 0;
    if (modular_) {
        for (auto c : x) idx = idx * static_cast<std::size_t>(modulus_) + static_cast<std::size_t>(floor_mod(c, modulus_));
    } else {
        const auto side = static_cast<std::size_t>(2 * radius_ + 1);
        for (auto c : x) idx = idx * side + static_cast<std::size_t>(c + radius_);
    }
    return idx;
}

Automorphism::Automorphism(int dim, std::vector<std::int64_t> entries)
    : dim_(dim), entries_(std::move(entries)) {
    if (dim < 1 || entries_.size() != static_cast<std::size_t>(dim * dim))
        throw Error(ErrorKind::Config, "automorphism needs " + std::to_string(dim * dim) + " entries");
}

Automorphism Automorphism::identity(int dim) {
    std::vector<std::int64_t> e(static_cast<std::size_t>(dim * dim), 0);
    for (int i = 0; i < dim; ++i) e[static_cast<std::size_t>(i * dim + i)] = 1;
    return {dim, std::move(e)};
}

Automorphism Automorphism::negation(int dim) {
    std::vector<std::int64_t> e(static_cast<std::size_t>(dim * dim), 0);
    for (int i = 0; i < dim; ++i) e[static_cast<std::size_t>(i * dim + i)] = -1;
    return {dim, std::move(e)};
}

// Bareiss fraction-free elimination; exact for the small matrices used here.
std::int64_t Automorphism::determinant() const {
    const auto n = static_cast<std::size_t>(dim_);
    std::vector<Wide> a(entries_.begin(), entries_.end());
    Wide prev = 1;
    int sign = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (a[k * n + k] == 0) {
            std::size_t swap = k + 1;
            while (swap < n && a[swap * n + k] == 0) ++swap;
            if (swap == n) return 0;
            for (std::size_t j = 0; j < n; ++j) std::swap(a[k * n + j], a[swap * n + j]);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j)
                a[i * n + j] = (a[i * n + j] * a[k * n + k] - a[i * n + k] * a[k * n + j]) / prev;
        prev = a[k * n + k];
    }
    return sign * static_cast<std::int64_t>(a[n * n - 1]);
}

Automorphism normalize(const Automorphism& a, const Carrier& carrier) {
    if (!carrier.is_modular()) return a;
    auto e = a.entries();
    for (auto& v : e) v = floor_mod(v, carrier.modulus());
    return {a.dim(), std::move(e)};
}

Automorphism compose(const Automorphism& a, const Automorphism& b, const Carrier& carrier) {
    const int n = a.dim();
    std::vector<std::int64_t> e(static_cast<std::size_t>(n * n), 0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            std::int64_t s = 0;
            for (int k = 0; k < n; ++k) s += a.at(i, k) * b.at(k, j);
            e[static_cast<std::size_t>(i * n + j)] = s;
        }
    return normalize(Automorphism(n, std::move(e)), carrier);
}

bool is_invertible(const Automorphism& a, const Carrier& carrier) {
    const std::int64_t det = a.determinant();
    if (carrier.is_modular()) return std::gcd(floor_mod(det, carrier.modulus()), std::int64_t{carrier.modulus()}) == 1;
    return det == 1 || det == -1;
}

Point act(const Automorphism& k, const Point& x, const Carrier& carrier) {
    const int n = k.dim();
    Point y(static_cast<std::size_t>(n), 0);
    for (int i = 0; i < n; ++i) {
        std::int64_t s = 0;
        for (int j = 0; j < n; ++j) s += k.at(i, j) * x[static_cast<std::size_t>(j)];
        y[static_cast<std::size_t>(i)] = s;
    }
    return carrier.reduce(std::move(y));
}

double point_norm(const Point& x, const Carrier& carrier) {
    const Point c = carrier.reduce(x);
    double s = 0.0;
    for (auto v : c) s += static_cast<double>(v) * static_cast<double>(v);
    return std::sqrt(s);
}

std::vector<Point> GroupK::orbit(const Point& x) const {
    std::vector<Point> out;
    out.reserve(elements_.size());
    for (const auto& k : elements_) {
        Point y = act(k, x, carrier_);
        if (std::find(out.begin(), out.end(), y) == out.end()) out.push_back(std::move(y));
    }
    return out;
}

GroupK build_group(const std::vector<Automorphism>& generators, const Carrier& carrier, std::size_t cap) {
    const int d = carrier.dim();
    std::vector<Automorphism> gens;
    for (const auto& g : generators) {
        if (g.dim() != d)
            throw Error(ErrorKind::Config, "generator dimension " + std::to_string(g.dim()) +
                                               " does not match carrier dimension " + std::to_string(d));
        if (!is_invertible(g, carrier))
            throw Error(ErrorKind::NonInvertible, "generator determinant " + std::to_string(g.determinant()) +
                                                      " is not a unit for this carrier");
        gens.push_back(normalize(g, carrier));
    }
    for (std::size_t i = 0; i < gens.size(); ++i)
        for (std::size_t j = i + 1; j < gens.size(); ++j)
            if (compose(gens[i], gens[j], carrier) != compose(gens[j], gens[i], carrier))
                throw Error(ErrorKind::NonAbelian, "generators " + std::to_string(i) + " and " +
                                                       std::to_string(j) + " do not commute");

    const Automorphism id = normalize(Automorphism::identity(d), carrier);
    std::set<Automorphism> seen{id};
    std::vector<Automorphism> frontier{id};
    while (!frontier.empty()) {
        std::vector<Automorphism> next;
        for (const auto& a : frontier)
            for (const auto& g : gens) {
                auto b = compose(a, g, carrier);
                if (seen.insert(b).second) {
                    if (seen.size() > cap)
                        throw Error(ErrorKind::ClosureOverflow,
                                    "group closure exceeds cap of " + std::to_string(cap) + " elements");
                    next.push_back(std::move(b));
                }
            }
        frontier = std::move(next);
    }

    std::vector<Automorphism> elements;
    elements.push_back(id);
    for (const auto& a : seen)
        if (a != id) elements.push_back(a);

    // A finite set of units closed under composition is a group; check the rest anyway.
    for (const auto& a : elements) {
        bool has_inverse = false;
        for (const auto& b : elements) {
            if (seen.count(compose(a, b, carrier)) == 0)
                throw Error(ErrorKind::Config, "closure is not closed under composition");
            if (compose(a, b, carrier) == id) has_inverse = true;
            if (compose(a, b, carrier) != compose(b, a, carrier))
                throw Error(ErrorKind::NonAbelian, "closure contains non-commuting elements");
        }
        if (!has_inverse) throw Error(ErrorKind::NonInvertible, "closure element without inverse");
    }
    return GroupK(carrier, std::move(elements));
}

DoublingCheck check_doubling(const Carrier& carrier, const GroupK& group) {
    DoublingCheck out{true, 0.0, carrier.zero()};
    for (const auto& x : carrier.points()) {
        const double nx = point_norm(x, carrier);
        if (nx == 0.0) continue;
        for (const auto& k : group.elements()) {
            const double ratio = point_norm(carrier.add(x, act(k, x, carrier)), carrier) / nx;
            if (ratio > out.max_ratio) {
                out.max_ratio = ratio;
                out.worst_x = x;
            }
        }
    }
    out.holds = out.max_ratio <= 2.0 + 1e-12;
    return out;
}

}  // namespace pexstab
