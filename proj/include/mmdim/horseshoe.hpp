#pragma once

#include "mmdim/pamap.hpp"

#include <string>
#include <vector>

namespace mmdim {

/// Leg multi-index (i_1, ..., i_{n-1}); every entry odd in [1, 2L-1].
using LegIndex = std::vector<int>;

/// Strip and slab subdivision of a cube [a,b]^n for a horseshoe with L legs
/// per transverse axis (L odd, L >= 3) and L^{n-1} odd strips.
///
/// Transverse cuts t_0 < ... < t_{2L-1} have spacing |E|/(2L-1); strip cuts
/// s_0 < ... < s_{2N-1} (N = L^{n-1}) have spacing |E|/(2N-1). Strip V_l is
/// [s_{l-1}, s_l] x [a,b]^{n-1}; leg H_i is [a,b] x prod_j [t_{i_j-1}, t_{i_j}].
class SubdivisionGrid {
public:
    SubdivisionGrid(Cube cube, int legs);

    const Cube& cube() const { return cube_; }
    int dim() const { return cube_.dim; }
    int legs_per_axis() const { return legs_; }
    /// N = L^{n-1}: number of odd strips and of legs.
    long odd_strips() const { return odd_strips_; }
    long leg_count() const { return odd_strips_; }
    /// 2N - 1
    long strip_count() const { return 2 * odd_strips_ - 1; }

    const std::vector<Rational>& t() const { return t_; }
    const std::vector<Rational>& s() const { return s_; }
    Rational strip_width() const { return s_[1] - s_[0]; }
    Rational leg_width() const { return t_[1] - t_[0]; }

    /// l in [1, 2N-1].
    Box strip_box(long l) const;
    Box leg_box(const LegIndex& leg) const;
    bool valid_leg(const LegIndex& leg) const;

    /// Legs in boustrophedon order: position 0 is the leg containing
    /// (a,...,a,b), position N-1 the leg containing (b,...,b,a), and
    /// consecutive positions are adjacent legs.
    LegIndex leg_at(long position) const;
    /// All legs in lexicographic order of their indices.
    std::vector<LegIndex> all_legs() const;

    Point corner_low() const;   // (a, ..., a, b)
    Point corner_high() const;  // (b, ..., b, a)

private:
    Cube cube_;
    int legs_;
    long odd_strips_;
    std::vector<Rational> t_;
    std::vector<Rational> s_;
};

/// Throws std::invalid_argument unless L is odd, L >= 3, n >= 2 and L^{n-1} fits the grid limit.
SubdivisionGrid subdivide(const Cube& cube, int legs);

class HorseshoeMap {
public:
    /// No validation; see validate_horseshoe.
    HorseshoeMap(SubdivisionGrid grid, std::vector<LegIndex> assignment, PAMap map);

    const SubdivisionGrid& grid() const { return grid_; }
    /// assignment()[p] is the leg that odd strip l = 2p+1 is mapped onto.
    const std::vector<LegIndex>& assignment() const { return assignment_; }
    const PAMap& map() const { return map_; }
    const Cube& cube() const { return grid_.cube(); }

    MapState apply(const MapState& s) const { return map_.apply(s); }

private:
    SubdivisionGrid grid_;
    std::vector<LegIndex> assignment_;
    PAMap map_;
};

/// Odd strips, left to right, go onto legs in boustrophedon order. Every
/// piece stretches axis 0 by 2N-1 and shrinks the others by 1/(2L-1); all
/// pieces preserve orientation, which already fixes both distinguished corners.
HorseshoeMap build_horseshoe(const Cube& cube, int legs);

struct ValidationCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct ValidationReport {
    std::vector<ValidationCheck> checks;

    bool ok() const;
    const ValidationCheck* find(const std::string& name) const;
    bool passed(const std::string& name) const;
};

ValidationReport validate_horseshoe(const HorseshoeMap& h);

/// phi∘phi as an explicit piecewise-affine map (N^2 pieces).
PAMap square(const HorseshoeMap& h);

}  // namespace mmdim
