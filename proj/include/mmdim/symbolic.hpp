#pragma once

#include "mmdim/constructions.hpp"
#include "mmdim/log_expr.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mmdim {

class BudgetExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One step of a cylinder word: the odd strip and the leg the point is in.
struct Letter {
    long strip = 1;
    LegIndex leg;

    friend bool operator==(const Letter&, const Letter&) = default;
    friend auto operator<=>(const Letter&, const Letter&) = default;
};

/// Points x of block k with phi^{2j}(x) in V_{word[j].strip} ∩ H_{word[j].leg}
/// for j = 0..depth-1.
struct CylinderCode {
    long k = 1;
    std::vector<Letter> word;

    int depth() const { return static_cast<int>(word.size()); }
    friend bool operator==(const CylinderCode&, const CylinderCode&) = default;
};

/// Exact box of the cylinder via nested preimages under phi∘phi; nullopt when
/// the set has empty interior. Throws std::logic_error if the preimage splits
/// into more than one box.
std::optional<Box> cylinder_box(const HorseshoeMap& h, const std::vector<Letter>& word);

/// Throws UnmaterializedBlock for blocks without geometry and
/// std::invalid_argument for empty or out-of-range codes.
Box cylinder_geometry(const StackedSystem& system, const CylinderCode& code);

/// L odd strips, evenly spaced among the L^{n-1} odd strips (every
/// L^{n-2}-th one), so closed strips are at least one leg width apart.
std::vector<long> selected_strips(long legs, int n);
std::vector<long> selected_strips(const StackedSystem& system, long k);

/// 3^{k n m}
BigInt count_cylinders(long k, int n, int m);
/// L^{n m} for a block with L legs per axis.
BigInt count_cylinders_for_legs(const BigInt& legs, int n, int m);

struct Cylinder {
    std::vector<Letter> word;
    Box box;
};

/// All depth-m cylinders over the given strips and all legs, in
/// lexicographic word order. Throws BudgetExceeded when more than `budget`
/// words would be produced.
std::vector<Cylinder> enumerate_cylinders(const HorseshoeMap& h, int m, const std::vector<long>& strips,
                                          const BigInt& budget);

/// Closed-form bounds at scale eps_k for one block index.
///
/// lower_ratio uses |log eps_{k+1}| (valid for every eps in [eps_{k+1}, eps_k]),
/// upper_ratio uses log(4 / eps_k), upper_ratio_4eps uses |log 4 eps_k| and
/// lower_ratio_at_scale uses |log eps_k|.
/// Rates are natural logs of per-step growth: n log L_k on active blocks, 0 otherwise.
struct RateBound {
    long k = 0;
    bool active = false;
    std::string branch;
    bool has_scale = true;

    LogExpr lower_rate;
    LogExpr upper_rate;
    /// m-independent part log(k / eps_k) of the spanning bound k L^{nm} / eps.
    LogExpr span_additive;
    LogExpr log_eps;
    LogExpr log_eps_next;
    std::optional<Rational> eps_exact;

    BigFloat eps_value;
    BigFloat lower_rate_value;
    BigFloat upper_rate_value;
    BigFloat lower_ratio;
    BigFloat upper_ratio;
    BigFloat upper_ratio_4eps;
    BigFloat lower_ratio_at_scale;

    /// (log(k/eps) + m upper_rate) / m
    BigFloat upper_rate_at_depth(int m, int digits) const;
};

/// `chart_scale` multiplies every length (1/2 for the halves of a two-block system).
std::vector<RateBound> rate_profile(const Schedule& schedule, int n, long k_first, long k_last, int digits = 30,
                                    const Rational& chart_scale = Rational(1));
std::vector<RateBound> rate_profile(const StackedSystem& system, long k_first, long k_last, int digits = 30,
                                    const Rational& chart_scale = Rational(1));
/// Two-block: per index, each ratio is the larger of the two halves' (each
/// half seen through its chart).
std::vector<RateBound> rate_profile(const TwoBlockSystem& system, long k_first, long k_last, int digits = 30);
std::vector<RateBound> rate_profile(const System& system, long k_first, long k_last, int digits = 30);

struct InverseKFit {
    double limit = 0;  // c in c - d/k
    double slope = 0;  // d
    double residual = 0;  // RMS
    std::size_t points = 0;
    bool degenerate = false;
};

/// Least squares fit of y = c - d/k.
InverseKFit fit_inverse_k(const std::vector<double>& ks, const std::vector<double>& ys);

struct BranchFit {
    std::string branch;
    InverseKFit lower;
    InverseKFit upper;
};

struct Extrapolation {
    double liminf = 0;
    double limsup = 0;
    double liminf_residual = 0;
    double limsup_residual = 0;
    std::string liminf_branch;
    std::string limsup_branch;
    bool degenerate = false;
    std::vector<BranchFit> branches;
};

/// Fits each branch on its `window` largest indices, never including the
/// branch's smallest index unless only two points exist; the liminf estimate is
/// the smallest lower-ratio limit over branches, the limsup estimate the
/// largest upper-ratio limit. Needs at least 4 rows.
Extrapolation extrapolate(const std::vector<RateBound>& profile, std::size_t window = 8);

/// Default profile horizon: kMax, extended so sparse parts show four active indices.
long default_profile_horizon(const System& system);

}  // namespace mmdim
