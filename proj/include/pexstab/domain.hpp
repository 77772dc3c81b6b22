#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

namespace pexstab {

/// Integer d-tuple. Modular points are kept as centered representatives in (-m/2, m/2].
using Point = std::vector<std::int64_t>;

/// The concrete abelian group standing in for E: either Z_m^d or Z^d observed
/// through the cube window [-R, R]^d.
class Carrier {
public:
    static Carrier modular(int modulus, int dim);
    static Carrier lattice(int dim, int radius);

    bool is_modular() const noexcept { return modular_; }
    int dim() const noexcept { return dim_; }
    int modulus() const noexcept { return modulus_; }
    int radius() const noexcept { return radius_; }

    /// Canonical representative (centered residue for Z_m, identity for Z^d).
    Point reduce(Point x) const;
    Point add(const Point& x, const Point& y) const;
    Point zero() const { return Point(static_cast<std::size_t>(dim_), 0); }

    /// Modular: x is a centered representative. Lattice: x lies in the window.
    bool contains(const Point& x) const;

    /// Enumeration of the full modular carrier (residue order, first coordinate
    /// slowest) or of the lattice window (lexicographic from -R to R).
    const std::vector<Point>& points() const { return *points_; }
    std::size_t size() const { return points_->size(); }
    std::optional<std::size_t> index_of(const Point& x) const;

    friend bool operator==(const Carrier& a, const Carrier& b) {
        return a.modular_ == b.modular_ && a.dim_ == b.dim_ && a.modulus_ == b.modulus_ &&
               a.radius_ == b.radius_;
    }

private:
    Carrier(bool modular, int dim, int modulus, int radius);

    bool modular_;
    int dim_;
    int modulus_;
    int radius_;
    std::shared_ptr<const std::vector<Point>> points_;
};

/// d x d integer matrix acting on points, row-major.
class Automorphism {
public:
    Automorphism() = default;
    Automorphism(int dim, std::vector<std::int64_t> entries);

    static Automorphism identity(int dim);
    static Automorphism negation(int dim);

    int dim() const noexcept { return dim_; }
    std::int64_t at(int row, int col) const { return entries_[static_cast<std::size_t>(row * dim_ + col)]; }
    const std::vector<std::int64_t>& entries() const noexcept { return entries_; }
    std::int64_t determinant() const;

    friend bool operator==(const Automorphism&, const Automorphism&) = default;
    friend auto operator<=>(const Automorphism&, const Automorphism&) = default;

private:
    int dim_ = 0;
    std::vector<std::int64_t> entries_;
};

/// Matrix entries reduced into [0, m) on a modular carrier; unchanged on a lattice.
Automorphism normalize(const Automorphism& a, const Carrier& carrier);
Automorphism compose(const Automorphism& a, const Automorphism& b, const Carrier& carrier);
bool is_invertible(const Automorphism& a, const Carrier& carrier);

/// k . x reduced to the carrier's representative.
Point act(const Automorphism& k, const Point& x, const Carrier& carrier);

/// Euclidean norm of the centered representative.
double point_norm(const Point& x, const Carrier& carrier);

class GroupK;

inline constexpr std::size_t kDefaultClosureCap = 64;

/// Closure of `generators` under composition. Throws NonInvertible, NonAbelian or
/// ClosureOverflow.
GroupK build_group(const std::vector<Automorphism>& generators, const Carrier& carrier,
                   std::size_t cap = kDefaultClosureCap);

/// Finite abelian group of automorphisms; elements sorted with the identity first.
class GroupK {
public:
    const std::vector<Automorphism>& elements() const noexcept { return elements_; }
    std::size_t order() const noexcept { return elements_.size(); }
    const Carrier& carrier() const noexcept { return carrier_; }

    /// Distinct points of the orbit {k . x}. Each occurs |K|/|orbit| times in the full action.
    std::vector<Point> orbit(const Point& x) const;

private:
    friend GroupK build_group(const std::vector<Automorphism>&, const Carrier&, std::size_t);
    GroupK(Carrier carrier, std::vector<Automorphism> elements)
        : carrier_(std::move(carrier)), elements_(std::move(elements)) {}

    Carrier carrier_;
    std::vector<Automorphism> elements_;
};

struct DoublingCheck {
    bool holds;
    double max_ratio;
    Point worst_x;
};

/// Exhaustive test of ||x + k.x|| <= 2||x|| over the enumeration.
DoublingCheck check_doubling(const Carrier& carrier, const GroupK& group);

}  // namespace pexstab
