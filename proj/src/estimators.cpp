#include "mmdim/estimators.hpp"

#include "mmdim/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>

namespace mmdim {

namespace {

// Orbits of all seeds, with an exact pairwise test "d_m(x_i, x_j) > eps".
// Coordinates are moved onto a common integer lattice when that fits in
// 64 bits; otherwise comparisons fall back to rationals.
class OrbitTable {
public:
    OrbitTable(const PartialMap& map, const SeedSet& seeds, int m, const Rational& eps, Metric metric,
               unsigned threads)
        : m_(m), dim_(map.dim()), metric_(metric), eps_(eps) {
        if (m < 1) throw std::invalid_argument("m must be >= 1");
        if (eps.sign() <= 0) throw std::invalid_argument("eps must be positive");
        orbits_.resize(seeds.size());
        parallel_for(seeds.size(), threads, [&](std::size_t i) { orbits_[i] = orbit(map, seeds[i].point, m); });
        for (const auto& o : orbits_)
            if (static_cast<int>(o.size()) < m) truncated_ = true;
        build_lattice();
    }

    std::size_t size() const { return orbits_.size(); }
    bool truncated() const { return truncated_; }

    bool separated(std::size_t i, std::size_t j) const {
        const std::size_t len = std::min(orbits_[i].size(), orbits_[j].size());
        if (lattice_) return separated_lattice(i, j, len);
        for (std::size_t t = 0; t < len; ++t)
            if (compare_separation(distance(orbits_[i][t], orbits_[j][t], metric_), eps_)) return true;
        return false;
    }

private:
    void build_lattice() {
        BigInt D = eps_.den();
        for (const auto& o : orbits_)
            for (const auto& p : o)
                for (const auto& x : p.coords) D = lcm(D, x.den());
        const BigInt limit = BigInt(1) << 50;
        const Rational scaled_eps = eps_ * Rational(D);
        if (abs(scaled_eps.num()) > limit) return;
        offsets_.resize(orbits_.size());
        std::vector<std::int64_t> values;
        for (std::size_t i = 0; i < orbits_.size(); ++i) {
            offsets_[i] = values.size();
            for (const auto& p : orbits_[i])
                for (const auto& x : p.coords) {
                    const Rational v = x * Rational(D);
                    if (abs(v.num()) > limit) return;
                    values.push_back(v.num().get_si());
                }
        }
        values_ = std::move(values);
        eps_scaled_ = scaled_eps.num().get_si();
        lattice_ = true;
    }

    bool separated_lattice(std::size_t i, std::size_t j, std::size_t len) const {
        const std::int64_t* a = values_.data() + offsets_[i];
        const std::int64_t* b = values_.data() + offsets_[j];
        const std::size_t d = static_cast<std::size_t>(dim_);
        if (metric_ == Metric::maxnorm) {
            for (std::size_t t = 0; t < len * d; ++t) {
                const std::int64_t diff = a[t] > b[t] ? a[t] - b[t] : b[t] - a[t];
                if (diff > eps_scaled_) return true;
            }
            return false;
        }
        const __int128 e2 = static_cast<__int128>(eps_scaled_) * eps_scaled_;
        for (std::size_t t = 0; t < len; ++t) {
            __int128 sum = 0;
            for (std::size_t c = 0; c < d; ++c) {
                const __int128 diff = static_cast<__int128>(a[t * d + c]) - b[t * d + c];
                sum += diff * diff;
            }
            if (sum > e2) return true;
        }
        return false;
    }

    int m_;
    int dim_;
    Metric metric_;
    Rational eps_;
    std::vector<std::vector<Point>> orbits_;
    bool truncated_ = false;
    bool lattice_ = false;
    std::vector<std::int64_t> values_;
    std::vector<std::size_t> offsets_;
    std::int64_t eps_scaled_ = 0;
};

constexpr std::size_t kGreedyBlock = 256;
constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

GreedyResult greedy_on_table(const OrbitTable& table, int m, const Rational& eps, Metric metric, unsigned threads) {
    GreedyResult out;
    out.m = m;
    out.eps = eps;
    out.metric = metric;
    out.truncated = table.truncated();
    out.witness.assign(table.size(), kNone);

    // Seeds of a block are tested against the earlier blocks' choices in
    // parallel, then resolved in order against choices made inside the block.
    std::vector<std::size_t> early(kGreedyBlock);
    for (std::size_t start = 0; start < table.size(); start += kGreedyBlock) {
        const std::size_t end = std::min(table.size(), start + kGreedyBlock);
        const std::size_t prior = out.chosen.size();
        parallel_for(end - start, threads, [&](std::size_t off) {
            const std::size_t i = start + off;
            early[off] = kNone;
            for (std::size_t c = 0; c < prior; ++c)
                if (!table.separated(i, out.chosen[c])) {
                    early[off] = out.chosen[c];
                    break;
                }
        });
        for (std::size_t i = start; i < end; ++i) {
            std::size_t w = early[i - start];
            for (std::size_t c = prior; w == kNone && c < out.chosen.size(); ++c)
                if (!table.separated(i, out.chosen[c])) w = out.chosen[c];
            if (w == kNone) {
                out.chosen.push_back(i);
                w = i;
            }
            out.witness[i] = w;
        }
    }
    for (std::size_t i = 0; i < table.size(); ++i)
        if (out.witness[i] != i && table.separated(i, out.witness[i]))
            throw std::logic_error("greedy cover witness failed re-check");
    return out;
}

GreedyResult cover_on_table(const OrbitTable& table, int m, const Rational& eps, Metric metric, unsigned threads) {
    const std::size_t n = table.size();
    std::vector<std::vector<std::size_t>> near(n);
    parallel_for(n, threads, [&](std::size_t i) {
        for (std::size_t j = 0; j < n; ++j)
            if (j == i || !table.separated(i, j)) near[i].push_back(j);
    });
    std::vector<std::size_t> gain(n);
    for (std::size_t i = 0; i < n; ++i) gain[i] = near[i].size();
    std::vector<bool> covered(n, false);
    std::size_t remaining = n;

    GreedyResult out;
    out.m = m;
    out.eps = eps;
    out.metric = metric;
    out.truncated = table.truncated();
    out.witness.assign(n, kNone);
    while (remaining > 0) {
        std::size_t best = 0;
        for (std::size_t c = 1; c < n; ++c)
            if (gain[c] > gain[best]) best = c;
        out.chosen.push_back(best);
        for (std::size_t t : near[best]) {
            if (covered[t]) continue;
            covered[t] = true;
            --remaining;
            for (std::size_t c : near[t]) --gain[c];
        }
    }
    std::sort(out.chosen.begin(), out.chosen.end());
    for (std::size_t c : out.chosen)
        for (std::size_t t : near[c])
            if (out.witness[t] == kNone || out.witness[t] > c) out.witness[t] = c;
    for (std::size_t c : out.chosen) out.witness[c] = c;
    for (std::size_t i = 0; i < n; ++i)
        if (out.witness[i] == kNone || (out.witness[i] != i && table.separated(i, out.witness[i])))
            throw std::logic_error("spanning cover witness failed re-check");
    return out;
}

// Box of strip words under phi itself: V_{w_0} ∩ phi^{-1}(box of the tail).
const AffinePiece& odd_piece(const HorseshoeMap& h, long l) {
    const auto& pieces = h.map().pieces();
    const std::size_t p = static_cast<std::size_t>((l - 1) / 2);
    if (p >= pieces.size() || !(pieces[p].domain == h.grid().strip_box(l)))
        throw std::logic_error("horseshoe pieces are not in strip order");
    return pieces[p];
}

double log_count(std::size_t c) { return std::log(static_cast<double>(c)); }

// Non-owning handle for PowerMap.
std::shared_ptr<const PartialMap> borrow(const PartialMap& map) {
    return std::shared_ptr<const PartialMap>(&map, [](const PartialMap*) {});
}

}  // namespace

std::string to_string(SeedTag tag) {
    switch (tag) {
        case SeedTag::cylinder_center: return "cylinder-center";
        case SeedTag::grid: return "grid";
        case SeedTag::user: return "user";
    }
    return "unknown";
}

SeedSet::SeedSet(std::vector<Seed> seeds) : seeds_(std::move(seeds)) {
    std::stable_sort(seeds_.begin(), seeds_.end(), [](const Seed& a, const Seed& b) { return a.point < b.point; });
    seeds_.erase(std::unique(seeds_.begin(), seeds_.end(), [](const Seed& a, const Seed& b) { return a.point == b.point; }),
                 seeds_.end());
}

std::vector<Point> SeedSet::points() const {
    std::vector<Point> out;
    out.reserve(seeds_.size());
    for (const auto& s : seeds_) out.push_back(s.point);
    return out;
}

SeedSet make_seeds(const std::vector<Point>& points, SeedTag tag) {
    std::vector<Seed> seeds;
    seeds.reserve(points.size());
    for (const auto& p : points) seeds.push_back(Seed{p, tag});
    return SeedSet(std::move(seeds));
}

SeedSet cylinder_centers(const HorseshoeMap& h, int m, const BigInt& budget) {
    const auto strips = selected_strips(h.grid().legs_per_axis(), h.grid().dim());
    std::vector<Seed> seeds;
    for (const auto& c : enumerate_cylinders(h, m, strips, budget))
        seeds.push_back(Seed{c.box.center(), SeedTag::cylinder_center});
    return SeedSet(std::move(seeds));
}

SeedSet cylinder_centers(const StackedSystem& system, long k, int m, const BigInt& budget) {
    return cylinder_centers(system.horseshoe(k), m, budget);
}

SeedSet full_coding_centers(const HorseshoeMap& h, int m, const BigInt& budget) {
    if (m < 1) throw std::invalid_argument("depth must be >= 1");
    const long N = h.grid().odd_strips();
    const BigInt total = ipow(BigInt(N), static_cast<unsigned long>(m));
    if (total > budget)
        throw BudgetExceeded("full coding at depth " + std::to_string(m) + " needs " + total.get_str() +
                             " words, budget is " + budget.get_str());
    std::vector<Box> boxes;
    for (long l = 1; l <= h.grid().strip_count(); l += 2) boxes.push_back(h.grid().strip_box(l));
    for (int depth = 1; depth < m; ++depth) {
        std::vector<Box> longer;
        for (long l = 1; l <= h.grid().strip_count(); l += 2) {
            const AffinePiece& piece = odd_piece(h, l);
            for (const Box& tail : boxes) {
                auto pre = piece.preimage(tail);
                if (pre && pre->has_interior()) longer.push_back(std::move(*pre));
            }
        }
        boxes = std::move(longer);
    }
    std::vector<Seed> seeds;
    for (const Box& b : boxes) seeds.push_back(Seed{b.center(), SeedTag::cylinder_center});
    return SeedSet(std::move(seeds));
}

SeedSet grid_seeds(const Cube& cube, int per_axis) {
    if (per_axis < 1) throw std::invalid_argument("grid needs at least one point per axis");
    const Rational step = cube.side() / Rational(per_axis);
    std::vector<Seed> seeds;
    std::vector<int> idx(static_cast<std::size_t>(cube.dim), 0);
    while (true) {
        std::vector<Rational> c;
        for (int i : idx) c.push_back(cube.lo + step * (Rational(i) + Rational(1, 2)));
        seeds.push_back(Seed{Point(std::move(c)), SeedTag::grid});
        std::size_t a = 0;
        while (a < idx.size() && ++idx[a] == per_axis) idx[a++] = 0;
        if (a == idx.size()) break;
    }
    return SeedSet(std::move(seeds));
}

GreedyResult greedy_separated(const PartialMap& map, const SeedSet& seeds, int m, const Rational& eps, Metric metric,
                              unsigned threads) {
    const unsigned t = thread_count(threads);
    const OrbitTable table(map, seeds, m, eps, metric, t);
    return greedy_on_table(table, m, eps, metric, t);
}

GreedyResult greedy_spanning(const PartialMap& map, const SeedSet& targets, int m, const Rational& eps, Metric metric,
                             unsigned threads) {
    const unsigned t = thread_count(threads);
    const OrbitTable table(map, targets, m, eps, metric, t);
    GreedyResult cover = cover_on_table(table, m, eps, metric, t);
    GreedyResult sep = greedy_on_table(table, m, eps, metric, t);
    return sep.count() < cover.count() ? sep : cover;
}

std::string check_greedy(const PartialMap& map, const SeedSet& seeds, const GreedyResult& result,
                         bool require_separated) {
    const OrbitTable table(map, seeds, result.m, result.eps, result.metric, thread_count());
    if (result.witness.size() != seeds.size()) return "witness list has the wrong length";
    for (std::size_t i = 0; i < result.chosen.size(); ++i) {
        if (result.chosen[i] >= seeds.size()) return "chosen index out of range";
        if (i > 0 && result.chosen[i] <= result.chosen[i - 1]) return "chosen indices not increasing";
    }
    if (require_separated)
        for (std::size_t a = 0; a < result.chosen.size(); ++a)
            for (std::size_t b = a + 1; b < result.chosen.size(); ++b)
                if (!table.separated(result.chosen[a], result.chosen[b]))
                    return "chosen seeds " + std::to_string(result.chosen[a]) + " and " +
                           std::to_string(result.chosen[b]) + " are within eps";
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        const std::size_t w = result.witness[i];
        if (!std::binary_search(result.chosen.begin(), result.chosen.end(), w))
            return "witness of seed " + std::to_string(i) + " is not chosen";
        if (w != i && table.separated(i, w)) return "seed " + std::to_string(i) + " is not covered by its witness";
    }
    return "";
}

GrowthEstimate growth_rate(const PartialMap& map, const SeedFactory& seeds, const Rational& eps,
                           const std::vector<int>& ms, Metric metric, unsigned threads) {
    GrowthEstimate out;
    for (int m : ms) {
        if (!out.ms.empty() && m <= out.ms.back()) throw std::invalid_argument("m values must be ascending");
        const SeedSet s = seeds(m);
        if (s.empty()) throw std::invalid_argument("empty seed set at m = " + std::to_string(m));
        const GreedyResult r = greedy_separated(map, s, m, eps, metric, threads);
        out.ms.push_back(m);
        out.counts.push_back(r.count());
        out.truncated = out.truncated || r.truncated;
    }
    if (out.ms.size() < 2) throw std::invalid_argument("growth rate needs at least 2 values of m");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(out.ms.size());
    for (std::size_t i = 0; i < out.ms.size(); ++i) {
        const double x = out.ms[i];
        const double y = log_count(out.counts[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    out.rate = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return out;
}

std::string to_string(NumericStatus s) {
    switch (s) {
        case NumericStatus::ok: return "ok";
        case NumericStatus::budget_exceeded: return "budget_exceeded";
        case NumericStatus::unmaterialized: return "unmaterialized";
    }
    return "unknown";
}

namespace {

// One half (or the whole) of a system: block k's seeds mapped to physical
// coordinates, iterated under phi∘phi of the full system.
NumericRow numeric_row(const PartialMap& full, const StackedSystem& part, Point (*to_physical)(const Point&),
                       const Rational& chart_scale, long k, const std::vector<int>& ms, const NumericOptions& opt) {
    NumericRow row;
    row.k = k;
    if (ms.empty()) throw std::invalid_argument("no values of m given");
    if (part.is_identity() || !part.schedule()->is_active(k)) {
        row.eps = opt.eps;
        return row;
    }
    try {
        const HorseshoeMap& h = part.horseshoe(k);
        const Schedule& s = *part.schedule();
        const Rational eps = opt.eps ? *opt.eps : *s.eps(k) * chart_scale;
        row.eps = eps;
        const PowerMap phi2(borrow(full), 2);
        auto factory = [&](int m) {
            SeedSet local = opt.grid_per_axis > 0 ? grid_seeds(h.cube(), opt.grid_per_axis) : cylinder_centers(h, m, opt.budget);
            if (!to_physical) return local;
            std::vector<Seed> moved;
            for (const auto& seed : local.seeds()) moved.push_back(Seed{to_physical(seed.point), seed.tag});
            return SeedSet(std::move(moved));
        };
        if (ms.size() == 1) {
            const GreedyResult r = greedy_separated(phi2, factory(ms[0]), ms[0], eps, Metric::maxnorm, opt.threads);
            row.ms = ms;
            row.counts = {r.count()};
            row.rate = log_count(r.count()) / ms[0];
        } else {
            const GrowthEstimate g = growth_rate(phi2, factory, eps, ms, Metric::maxnorm, opt.threads);
            row.rate = g.rate;
            row.ms = g.ms;
            row.counts = g.counts;
        }
        const double log_eps = std::fabs(std::log(eps.to_double()));
        auto divide = [&](double den) { return row.rate == 0 ? 0.0 : row.rate / den; };
        if (opt.eps) {
            row.ratio_at_scale = divide(log_eps);
            row.lower_ratio = row.ratio_at_scale;
        } else {
            const double log_next =
                std::fabs((s.log_eps(k + 1) + LogExpr::log_of(chart_scale)).evaluate(30).to_double());
            row.ratio_at_scale = divide(log_eps);
            row.lower_ratio = divide(log_next);
        }
    } catch (const UnmaterializedBlock& e) {
        row.status = NumericStatus::unmaterialized;
        row.message = e.what();
    } catch (const BudgetExceeded& e) {
        row.status = NumericStatus::budget_exceeded;
        row.message = e.what();
    }
    return row;
}

}  // namespace

std::vector<NumericRow> mdim_numeric_profile(const System& system, const std::vector<long>& ks,
                                             const std::vector<int>& ms, const NumericOptions& options) {
    std::vector<NumericRow> out;
    for (long k : ks) {
        if (k < 1) throw std::invalid_argument("block index must be >= 1");
        if (const auto* s = std::get_if<StackedSystem>(&system)) {
            out.push_back(numeric_row(*s, *s, nullptr, Rational(1), k, ms, options));
            continue;
        }
        const auto& tb = std::get<TwoBlockSystem>(system);
        const Rational half(1, 2);
        NumericRow lo = numeric_row(tb, tb.lower(), &TwoBlockSystem::from_lower_chart, half, k, ms, options);
        NumericRow up = numeric_row(tb, tb.upper(), &TwoBlockSystem::from_upper_chart, half, k, ms, options);
        if (lo.status != NumericStatus::ok) {
            out.push_back(std::move(lo));
        } else if (up.status != NumericStatus::ok) {
            out.push_back(std::move(up));
        } else {
            out.push_back(up.lower_ratio < lo.lower_ratio ? std::move(lo) : std::move(up));
        }
    }
    return out;
}

}  // namespace mmdim
