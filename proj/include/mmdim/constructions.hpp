#pragma once

#include "mmdim/horseshoe.hpp"
#include "mmdim/log_expr.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace mmdim {

/// Raised when pointwise evaluation reaches a block whose geometry was not built.
class UnmaterializedBlock : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class SizeLaw { geometric, quadratic };
enum class ActiveSet { all, self_powers };

std::string to_string(SizeLaw law);
std::string to_string(ActiveSet set);

/// Size and leg schedule of a stacked system: block k has side B/3^{kr}
/// (geometric) or B/k^2 (quadratic) and L_k legs per transverse axis
/// (3^k unless overridden).
struct Schedule {
    SizeLaw law = SizeLaw::geometric;
    Rational B{1};
    Rational r{1};  // geometric only
    ActiveSet active = ActiveSet::all;
    /// legs_override[k-1] replaces 3^k for the first blocks.
    std::vector<long> legs_override;

    static Schedule geometric(Rational B, Rational r);
    static Schedule quadratic(Rational B);
    Schedule sparse() const;

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;

    bool is_active(long k) const;
    BigInt legs(long k) const;
    LogExpr log_legs(long k) const;
    /// |E_k|, when it is rational.
    std::optional<Rational> side(long k) const;
    LogExpr log_side(long k) const;
    /// eps_k = |E_k| / (2 L_k - 1), when rational.
    std::optional<Rational> eps(long k) const;
    LogExpr log_eps(long k) const;
    /// Every |E_k| is rational (r integral for geometric laws).
    bool sides_rational() const;

    /// The value both mean dimensions converge to for the dense system.
    Rational dense_target(int n) const;

    friend bool operator==(const Schedule&, const Schedule&) = default;
};

/// alpha in (0, n]: geometric with r = n/alpha - 1 below n, quadratic at n.
Schedule solve_rate(const Rational& alpha, int n);

struct BlockPlacement {
    long k = 0;
    Rational side;
    Rational slot_lo;
    /// Right end of the block's slot on axis 0; for geometric laws this is
    /// a_k = sum_{i<k} C / 3^{ir} with C = (3^r - 1)/3^r.
    Rational slot_hi;
    Cube cube;   // E_k = [slot_lo + side/10, slot_lo + 11 side/10]^n
    Cube outer;  // E'_k = [slot_lo, slot_lo + 6 side/5]^n
};

struct Placement {
    Schedule schedule;  // with B possibly rescaled
    Rational rescale{1};
    std::vector<BlockPlacement> blocks;
};

/// Throws std::domain_error when sizes are irrational (non-integral r).
Placement place_cubes(const Schedule& schedule, int n, long k_max);

enum class BlockStatus { identity, horseshoe, symbolic_only };
std::string to_string(BlockStatus s);

struct Block {
    long k = 0;
    BlockStatus status = BlockStatus::identity;
    BigInt legs;
    std::optional<BlockPlacement> placement;
    std::optional<HorseshoeMap> horseshoe;
};

inline constexpr long kDefaultLegLimit = 729;

class StackedSystem final : public PartialMap {
public:
    static StackedSystem identity(int n);
    /// Assembles a system from parts (used when loading files); checks block order only.
    StackedSystem(int n, std::optional<Schedule> schedule, Rational rescale, long k_max, long leg_limit,
                  std::vector<Block> blocks);

    int dim() const override { return n_; }
    /// Identity outside the enlarged cubes, horseshoe on active blocks,
    /// escape in E'_k \ E_k of active blocks.
    MapState apply(const MapState& s) const override;
    using PartialMap::apply;

    bool is_identity() const { return !schedule_.has_value(); }
    const std::optional<Schedule>& schedule() const { return schedule_; }
    const Rational& rescale() const { return rescale_; }
    long k_max() const { return k_max_; }
    long leg_limit() const { return leg_limit_; }
    const std::vector<Block>& blocks() const { return blocks_; }
    const Block& block(long k) const;
    /// Throws UnmaterializedBlock unless block k carries explicit geometry.
    const HorseshoeMap& horseshoe(long k) const;

private:
    int n_;
    std::optional<Schedule> schedule_;
    Rational rescale_{1};
    long k_max_ = 0;
    long leg_limit_ = kDefaultLegLimit;
    std::vector<Block> blocks_;
};

StackedSystem build_stacked(const Schedule& schedule, int n, long k_max, long leg_limit = kDefaultLegLimit);

struct DisjointnessReport {
    bool ok = true;
    std::string detail;
};

/// E_k inside the interior of E'_k, enlarged cubes with pairwise disjoint
/// interiors and all inside [0,1]^n, for every placed block.
DisjointnessReport check_disjointness(const StackedSystem& system);

/// Lower half [0,1/2]^n carries `lower` through T_1(x) = 2x, upper half
/// [1/2,1]^n carries `upper` through T_2(x) = 2x - 1; identity elsewhere.
class TwoBlockSystem final : public PartialMap {
public:
    TwoBlockSystem(Rational alpha, Rational beta, StackedSystem lower, StackedSystem upper);

    int dim() const override { return lower_.dim(); }
    MapState apply(const MapState& s) const override;
    using PartialMap::apply;

    const Rational& alpha() const { return alpha_; }
    const Rational& beta() const { return beta_; }
    const StackedSystem& lower() const { return lower_; }
    const StackedSystem& upper() const { return upper_; }

    static Point to_lower_chart(const Point& p);    // T_1
    static Point from_lower_chart(const Point& p);  // T_1^{-1}
    static Point to_upper_chart(const Point& p);    // T_2
    static Point from_upper_chart(const Point& p);  // T_2^{-1}
    /// Both charts scale distances by exactly this factor.
    static Rational chart_scale() { return Rational(2); }

private:
    Rational alpha_;
    Rational beta_;
    StackedSystem lower_;
    StackedSystem upper_;
};

/// 0 <= alpha <= beta <= n. Lower half: sparse system for beta (identity if
/// beta = 0); upper half: dense system for alpha (identity if alpha = 0).
/// With alpha = beta both halves carry the dense system.
TwoBlockSystem build_two_block(const Rational& alpha, const Rational& beta, int n, long k_max,
                               long leg_limit = kDefaultLegLimit);

using System = std::variant<StackedSystem, TwoBlockSystem>;

/// geometric | quadratic | sparse | identity | two_block
std::string system_kind(const System& system);
int system_dim(const System& system);
const PartialMap& as_map(const System& system);

struct TargetValues {
    Rational liminf;
    Rational limsup;
};

TargetValues analytic_target(const StackedSystem& system);
TargetValues analytic_target(const System& system);

}  // namespace mmdim
