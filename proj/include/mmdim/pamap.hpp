#pragma once

#include "mmdim/geometry.hpp"

#include <memory>
#include <optional>
#include <vector>

namespace mmdim {

/// Axis-wise affine map on a box: y_i = ±scale_i * x_i + offset_i, the sign
/// being negative when the axis is reflected.
struct AffinePiece {
    Box domain;
    std::vector<Rational> scale;
    std::vector<Rational> offset;
    std::vector<bool> reflect;

    int dim() const { return domain.dim(); }
    Rational coefficient(int axis) const;
    Point apply(const Point& p) const;
    Point apply_inverse(const Point& p) const;
    Box image() const;
    /// Points of the domain whose image lies in `target`; nullopt when empty.
    std::optional<Box> preimage(const Box& target) const;

    friend bool operator==(const AffinePiece&, const AffinePiece&) = default;
};

/// Checks the piece invariants (positive scales, matching sizes). Throws std::invalid_argument.
void check_piece(const AffinePiece& piece);

/// `second` after `first`, restricted to where both are defined; nullopt
/// when that region has empty interior.
std::optional<AffinePiece> compose(const AffinePiece& first, const AffinePiece& second);

/// A (possibly partial) map on exact points. Points it is undefined on go to Escaped.
class PartialMap {
public:
    virtual ~PartialMap() = default;
    virtual int dim() const = 0;
    virtual MapState apply(const MapState& s) const = 0;

    MapState apply(const Point& p) const { return apply(MapState::inside(p)); }
};

/// Piecewise-affine partial map. Pieces are kept in lexicographic order of
/// their domains; a point on a shared boundary uses the first piece that
/// contains it.
class PAMap final : public PartialMap {
public:
    PAMap(Cube ambient, std::vector<AffinePiece> pieces);

    static PAMap identity(const Cube& ambient);

    int dim() const override { return ambient_.dim; }
    MapState apply(const MapState& s) const override;
    using PartialMap::apply;

    const Cube& ambient() const { return ambient_; }
    const std::vector<AffinePiece>& pieces() const { return pieces_; }

    std::optional<std::size_t> locate(const Point& p) const;
    /// Preimage of a box as a union of boxes (one per piece that reaches it).
    std::vector<Box> preimage(const Box& target) const;
    /// Exhaustive pairwise check that piece images have disjoint interiors.
    bool images_disjoint() const;

private:
    Cube ambient_;
    std::vector<AffinePiece> pieces_;
    Rational max_span0_;
};

/// `second ∘ first` as an explicit PAMap on first's ambient cube.
PAMap compose(const PAMap& first, const PAMap& second);

class IdentityMap final : public PartialMap {
public:
    explicit IdentityMap(int dim) : dim_(dim) {}
    int dim() const override { return dim_; }
    MapState apply(const MapState& s) const override { return s; }
    using PartialMap::apply;

private:
    int dim_;
};

/// The map applied `power` times in a row, without materializing the composition.
class PowerMap final : public PartialMap {
public:
    PowerMap(std::shared_ptr<const PartialMap> base, int power);
    int dim() const override { return base_->dim(); }
    MapState apply(const MapState& s) const override;
    using PartialMap::apply;

private:
    std::shared_ptr<const PartialMap> base_;
    int power_;
};

}  // namespace mmdim
