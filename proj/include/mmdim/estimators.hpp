#pragma once

#include "mmdim/bowen.hpp"
#include "mmdim/symbolic.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace mmdim {

enum class SeedTag { cylinder_center, grid, user };
std::string to_string(SeedTag tag);

struct Seed {
    Point point;
    SeedTag tag = SeedTag::user;
};

/// Deduplicated seeds in lexicographic order of their points. A point added
/// twice keeps the first tag.
class SeedSet {
public:
    SeedSet() = default;
    explicit SeedSet(std::vector<Seed> seeds);

    std::size_t size() const { return seeds_.size(); }
    bool empty() const { return seeds_.empty(); }
    const Seed& operator[](std::size_t i) const { return seeds_[i]; }
    const std::vector<Seed>& seeds() const { return seeds_; }
    std::vector<Point> points() const;

private:
    std::vector<Seed> seeds_;
};

SeedSet make_seeds(const std::vector<Point>& points, SeedTag tag);

/// Centers of all depth-m cylinders of block k over the selected strips.
/// Throws UnmaterializedBlock or BudgetExceeded.
SeedSet cylinder_centers(const StackedSystem& system, long k, int m, const BigInt& budget);
SeedSet cylinder_centers(const HorseshoeMap& h, int m, const BigInt& budget);

/// Centers of the N^m boxes {x : phi^j(x) in V_{l_j}, j < m} over all odd
/// strips, for phi itself (not squared).
SeedSet full_coding_centers(const HorseshoeMap& h, int m, const BigInt& budget);

/// Points lo + (i + 1/2) (hi - lo) / per_axis on each axis.
SeedSet grid_seeds(const Cube& cube, int per_axis);

struct GreedyResult {
    /// Indices into the seed set, increasing.
    std::vector<std::size_t> chosen;
    /// witness[i]: chosen seed within eps of seed i (itself when chosen).
    std::vector<std::size_t> witness;
    int m = 1;
    Rational eps;
    Metric metric = Metric::maxnorm;
    bool truncated = false;

    std::size_t count() const { return chosen.size(); }
};

/// Greedy (m, eps)-separated subset in canonical seed order: a seed is kept
/// when its d_m distance to every kept seed is > eps. Deterministic for any
/// thread count. The cover witnesses are re-checked before returning.
GreedyResult greedy_separated(const PartialMap& map, const SeedSet& seeds, int m, const Rational& eps,
                              Metric metric = Metric::maxnorm, unsigned threads = 0);

/// Subset of `targets` whose closed d_m eps-balls cover every target; the
/// smaller of a greedy max-coverage cover and the greedy separated set.
GreedyResult greedy_spanning(const PartialMap& map, const SeedSet& targets, int m, const Rational& eps,
                             Metric metric = Metric::maxnorm, unsigned threads = 0);

/// Exhaustive check of both invariants of a result (pairwise separation of
/// the chosen set, cover witnesses). Empty string when they hold.
std::string check_greedy(const PartialMap& map, const SeedSet& seeds, const GreedyResult& result,
                         bool require_separated);

struct GrowthEstimate {
    double rate = 0;
    std::vector<int> ms;
    std::vector<std::size_t> counts;
    bool truncated = false;
};

using SeedFactory = std::function<SeedSet(int m)>;

/// Least-squares slope of log(count) against m. Needs at least two distinct m.
GrowthEstimate growth_rate(const PartialMap& map, const SeedFactory& seeds, const Rational& eps,
                           const std::vector<int>& ms, Metric metric = Metric::maxnorm, unsigned threads = 0);

enum class NumericStatus { ok, budget_exceeded, unmaterialized };
std::string to_string(NumericStatus s);

struct NumericRow {
    long k = 0;
    NumericStatus status = NumericStatus::ok;
    std::string message;
    std::optional<Rational> eps;  // physical scale used
    double rate = 0;
    /// rate / |log eps_{k+1}| (same denominator as the symbolic lower_ratio)
    double lower_ratio = 0;
    /// rate / |log eps_k|
    double ratio_at_scale = 0;
    std::vector<int> ms;
    std::vector<std::size_t> counts;
};

struct NumericOptions {
    /// Physical scale; eps_k (through the chart for two-block halves) when unset.
    /// With an explicit scale both ratios use |log eps|.
    std::optional<Rational> eps;
    /// Seeds on a grid over E_k with this many points per axis instead of cylinder centers.
    int grid_per_axis = 0;
    BigInt budget{1000000};
    unsigned threads = 0;
};

/// Growth rate of seeds of block k at eps_k under phi∘phi, per k. A single
/// m gives log(count)/m. For two-block systems each half is run through its
/// chart and the larger ratio kept.
std::vector<NumericRow> mdim_numeric_profile(const System& system, const std::vector<long>& ks,
                                             const std::vector<int>& ms, const NumericOptions& options = {});

}  // namespace mmdim
