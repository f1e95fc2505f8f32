#include "mmdim/pamap.hpp"

#include <algorithm>
#include <stdexcept>

namespace mmdim {

Rational AffinePiece::coefficient(int axis) const {
    const auto i = static_cast<std::size_t>(axis);
    return reflect[i] ? -scale[i] : scale[i];
}

Point AffinePiece::apply(const Point& p) const {
    std::vector<Rational> out;
    out.reserve(static_cast<std::size_t>(dim()));
    for (int i = 0; i < dim(); ++i) out.push_back(coefficient(i) * p[i] + offset[static_cast<std::size_t>(i)]);
    return Point(std::move(out));
}

Point AffinePiece::apply_inverse(const Point& p) const {
    std::vector<Rational> out;
    out.reserve(static_cast<std::size_t>(dim()));
    for (int i = 0; i < dim(); ++i) out.push_back((p[i] - offset[static_cast<std::size_t>(i)]) / coefficient(i));
    return Point(std::move(out));
}

Box AffinePiece::image() const {
    std::vector<Interval> axes;
    axes.reserve(static_cast<std::size_t>(dim()));
    for (int i = 0; i < dim(); ++i) {
        const Rational a = coefficient(i);
        const Rational& b = offset[static_cast<std::size_t>(i)];
        Rational y0 = a * domain.axis(i).lo + b;
        Rational y1 = a * domain.axis(i).hi + b;
        if (y1 < y0) std::swap(y0, y1);
        axes.push_back({std::move(y0), std::move(y1)});
    }
    return Box(std::move(axes));
}

std::optional<Box> AffinePiece::preimage(const Box& target) const {
    std::vector<Interval> axes;
    axes.reserve(static_cast<std::size_t>(dim()));
    for (int i = 0; i < dim(); ++i) {
        const Rational a = coefficient(i);
        const Rational& b = offset[static_cast<std::size_t>(i)];
        Rational x0 = (target.axis(i).lo - b) / a;
        Rational x1 = (target.axis(i).hi - b) / a;
        if (x1 < x0) std::swap(x0, x1);
        Interval iv{max(x0, domain.axis(i).lo), min(x1, domain.axis(i).hi)};
        if (iv.hi < iv.lo) return std::nullopt;
        axes.push_back(std::move(iv));
    }
    return Box(std::move(axes));
}

void check_piece(const AffinePiece& piece) {
    const auto n = static_cast<std::size_t>(piece.dim());
    if (piece.scale.size() != n || piece.offset.size() != n || piece.reflect.size() != n)
        throw std::invalid_argument("affine piece with inconsistent dimensions");
    for (const auto& s : piece.scale)
        if (s.sign() <= 0) throw std::invalid_argument("affine piece scales must be positive");
}

std::optional<AffinePiece> compose(const AffinePiece& first, const AffinePiece& second) {
    auto reach = first.image().intersect(second.domain);
    if (!reach || !reach->has_interior()) return std::nullopt;
    auto domain = first.preimage(*reach);
    if (!domain || !domain->has_interior()) return std::nullopt;

    AffinePiece out;
    out.domain = std::move(*domain);
    for (int i = 0; i < first.dim(); ++i) {
        const auto k = static_cast<std::size_t>(i);
        out.scale.push_back(first.scale[k] * second.scale[k]);
        out.reflect.push_back(first.reflect[k] != second.reflect[k]);
        out.offset.push_back(second.coefficient(i) * first.offset[k] + second.offset[k]);
    }
    return out;
}

PAMap::PAMap(Cube ambient, std::vector<AffinePiece> pieces) : ambient_(std::move(ambient)), pieces_(std::move(pieces)) {
    for (const auto& p : pieces_) {
        check_piece(p);
        if (p.dim() != ambient_.dim) throw std::invalid_argument("piece dimension differs from ambient cube");
    }
    std::stable_sort(pieces_.begin(), pieces_.end(),
                     [](const AffinePiece& a, const AffinePiece& b) { return a.domain < b.domain; });
    for (const auto& p : pieces_)
        if (max_span0_ < p.domain.axis(0).length()) max_span0_ = p.domain.axis(0).length();
}

PAMap PAMap::identity(const Cube& ambient) {
    const auto n = static_cast<std::size_t>(ambient.dim);
    AffinePiece id{ambient.box(), std::vector<Rational>(n, Rational(1)), std::vector<Rational>(n, Rational(0)),
                   std::vector<bool>(n, false)};
    return PAMap(ambient, {std::move(id)});
}

std::optional<std::size_t> PAMap::locate(const Point& p) const {
    if (pieces_.empty() || p.dim() != dim()) return std::nullopt;
    // Pieces are sorted by domain lower corner on axis 0; only pieces starting
    // within max_span0_ to the left of the point can contain it.
    auto it = std::upper_bound(pieces_.begin(), pieces_.end(), p[0],
                               [](const Rational& x, const AffinePiece& piece) { return x < piece.domain.axis(0).lo; });
    std::optional<std::size_t> found;
    const Rational reach = p[0] - max_span0_;
    while (it != pieces_.begin()) {
        --it;
        if (it->domain.axis(0).lo < reach) break;
        if (it->domain.contains(p)) found = static_cast<std::size_t>(it - pieces_.begin());
    }
    return found;
}

MapState PAMap::apply(const MapState& s) const {
    if (s.is_escaped()) return s;
    const auto idx = locate(s.point());
    if (!idx) return MapState::escaped();
    return MapState::inside(pieces_[*idx].apply(s.point()));
}

std::vector<Box> PAMap::preimage(const Box& target) const {
    std::vector<Box> out;
    for (const auto& piece : pieces_) {
        auto b = piece.preimage(target);
        if (b) out.push_back(std::move(*b));
    }
    return out;
}

bool PAMap::images_disjoint() const {
    std::vector<Box> images;
    images.reserve(pieces_.size());
    for (const auto& p : pieces_) images.push_back(p.image());
    for (std::size_t i = 0; i < images.size(); ++i)
        for (std::size_t j = i + 1; j < images.size(); ++j)
            if (images[i].interiors_intersect(images[j])) return false;
    return true;
}

PAMap compose(const PAMap& first, const PAMap& second) {
    std::vector<AffinePiece> pieces;
    for (const auto& f : first.pieces()) {
        const Box img = f.image();
        for (const auto& g : second.pieces()) {
            if (!img.interiors_intersect(g.domain)) continue;
            if (auto c = compose(f, g)) pieces.push_back(std::move(*c));
        }
    }
    return PAMap(first.ambient(), std::move(pieces));
}

PowerMap::PowerMap(std::shared_ptr<const PartialMap> base, int power) : base_(std::move(base)), power_(power) {
    if (!base_) throw std::invalid_argument("power of a null map");
    if (power_ < 0) throw std::invalid_argument("negative map power");
}

MapState PowerMap::apply(const MapState& s) const {
    MapState cur = s;
    for (int i = 0; i < power_ && cur.is_inside(); ++i) cur = base_->apply(cur);
    return cur;
}

}  // namespace mmdim
