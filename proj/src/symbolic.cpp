#include "mmdim/symbolic.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace mmdim {

namespace {

// Piece of h whose domain is odd strip l; the horseshoe keeps them in strip order.
const AffinePiece& piece_for_strip(const HorseshoeMap& h, long l) {
    const auto& pieces = h.map().pieces();
    const Box strip = h.grid().strip_box(l);
    auto it = std::lower_bound(pieces.begin(), pieces.end(), strip.axis(0).lo,
                               [](const AffinePiece& p, const Rational& x) { return p.domain.axis(0).lo < x; });
    if (it == pieces.end() || !(it->domain == strip))
        throw std::logic_error("no piece on odd strip V_" + std::to_string(l));
    return *it;
}

// Part of C(letter) that phi∘phi sends into the union `targets`, given
// `first_pull` = phi^{-1}(targets).
std::vector<Box> pull_into_letter(const HorseshoeMap& h, const Letter& letter, const std::vector<Box>& first_pull) {
    const AffinePiece& piece = piece_for_strip(h, letter.strip);
    const Box leg = h.grid().leg_box(letter.leg);
    std::vector<Box> out;
    for (const Box& b : first_pull) {
        auto pre = piece.preimage(b);
        if (!pre) continue;
        auto cut = pre->intersect(leg);
        if (cut && cut->has_interior()) out.push_back(std::move(*cut));
    }
    return out;
}

std::vector<Box> positive(std::vector<Box> boxes) {
    boxes.erase(std::remove_if(boxes.begin(), boxes.end(), [](const Box& b) { return !b.has_interior(); }), boxes.end());
    return boxes;
}

std::optional<Box> single(std::vector<Box> boxes) {
    if (boxes.empty()) return std::nullopt;
    if (boxes.size() > 1) throw std::logic_error("cylinder preimage is not a single box");
    return std::move(boxes.front());
}

BigFloat ratio(const BigFloat& num, const BigFloat& den_log) {
    const BigFloat den = den_log.abs();
    if (num.is_zero()) return BigFloat(num.digits());
    if (den.is_zero()) throw std::domain_error("scale with |log eps| = 0");
    return num / den;
}

RateBound combine_max(const RateBound& a, const RateBound& b, const std::string& a_name, const std::string& b_name) {
    // Ties go to b.
    const bool lower_from_a = b.lower_ratio < a.lower_ratio;
    const bool upper_from_a = b.upper_ratio < a.upper_ratio;
    RateBound out = lower_from_a ? a : b;
    out.branch = (lower_from_a ? a_name : b_name) + "/" + (lower_from_a ? a.branch : b.branch);
    out.active = a.active || b.active;
    const RateBound& up = upper_from_a ? a : b;
    out.upper_rate = up.upper_rate;
    out.span_additive = up.span_additive;
    out.upper_rate_value = up.upper_rate_value;
    out.upper_ratio = up.upper_ratio;
    out.upper_ratio_4eps = up.upper_ratio_4eps;
    return out;
}

}  // namespace

std::optional<Box> cylinder_box(const HorseshoeMap& h, const std::vector<Letter>& word) {
    if (word.empty()) throw std::invalid_argument("cylinder word must have depth >= 1");
    for (const auto& letter : word) {
        if (letter.strip < 1 || letter.strip > h.grid().strip_count() || letter.strip % 2 == 0)
            throw std::invalid_argument("cylinder letter needs an odd strip index in range");
        if (!h.grid().valid_leg(letter.leg)) throw std::invalid_argument("cylinder letter has an invalid leg");
    }
    const Letter& last = word.back();
    auto box = h.grid().strip_box(last.strip).intersect(h.grid().leg_box(last.leg));
    std::vector<Box> current;
    if (box && box->has_interior()) current.push_back(std::move(*box));
    for (auto it = word.rbegin() + 1; it != word.rend() && !current.empty(); ++it) {
        std::vector<Box> first_pull;
        for (const Box& b : current) {
            auto pre = positive(h.map().preimage(b));
            first_pull.insert(first_pull.end(), pre.begin(), pre.end());
        }
        current = pull_into_letter(h, *it, first_pull);
    }
    return single(std::move(current));
}

Box cylinder_geometry(const StackedSystem& system, const CylinderCode& code) {
    const HorseshoeMap& h = system.horseshoe(code.k);
    auto box = cylinder_box(h, code.word);
    if (!box) throw std::invalid_argument("cylinder has empty interior");
    return *box;
}

std::vector<long> selected_strips(long legs, int n) {
    if (legs < 3 || legs % 2 == 0) throw std::invalid_argument("legs per axis must be odd and >= 3");
    if (n < 2) throw std::invalid_argument("n must be >= 2");
    long step = 1;
    for (int i = 0; i < n - 2; ++i) step *= legs;
    std::vector<long> out;
    out.reserve(static_cast<std::size_t>(legs));
    for (long j = 0; j < legs; ++j) out.push_back(2 * j * step + 1);
    return out;
}

std::vector<long> selected_strips(const StackedSystem& system, long k) {
    return selected_strips(system.horseshoe(k).grid().legs_per_axis(), system.dim());
}

BigInt count_cylinders(long k, int n, int m) {
    if (k < 1 || n < 2 || m < 1) throw std::invalid_argument("count_cylinders needs k >= 1, n >= 2, m >= 1");
    return ipow(BigInt(3), static_cast<unsigned long>(k) * static_cast<unsigned long>(n) * static_cast<unsigned long>(m));
}

BigInt count_cylinders_for_legs(const BigInt& legs, int n, int m) {
    if (legs < 3 || n < 2 || m < 1) throw std::invalid_argument("count_cylinders needs L >= 3, n >= 2, m >= 1");
    return ipow(legs, static_cast<unsigned long>(n) * static_cast<unsigned long>(m));
}

std::vector<Cylinder> enumerate_cylinders(const HorseshoeMap& h, int m, const std::vector<long>& strips,
                                          const BigInt& budget) {
    if (m < 1) throw std::invalid_argument("cylinder depth must be >= 1");
    const auto legs = h.grid().all_legs();
    std::vector<Letter> letters;
    for (long l : strips)
        for (const auto& leg : legs) letters.push_back(Letter{l, leg});
    std::sort(letters.begin(), letters.end());

    const BigInt total = ipow(BigInt(static_cast<unsigned long>(letters.size())), static_cast<unsigned long>(m));
    if (total > budget)
        throw BudgetExceeded("depth-" + std::to_string(m) + " enumeration needs " + total.get_str() +
                             " cylinders, budget is " + budget.get_str());

    std::vector<Cylinder> suffixes;
    suffixes.reserve(letters.size());
    for (const auto& a : letters) {
        auto b = h.grid().strip_box(a.strip).intersect(h.grid().leg_box(a.leg));
        if (b && b->has_interior()) suffixes.push_back(Cylinder{{a}, std::move(*b)});
    }
    for (int depth = 1; depth < m; ++depth) {
        // phi^{-1} of each suffix box does not depend on the new first letter.
        std::vector<std::vector<Box>> first_pull;
        first_pull.reserve(suffixes.size());
        for (const auto& s : suffixes) first_pull.push_back(positive(h.map().preimage(s.box)));

        std::vector<Cylinder> longer;
        longer.reserve(letters.size() * suffixes.size());
        for (const auto& a : letters) {
            for (std::size_t i = 0; i < suffixes.size(); ++i) {
                auto box = single(pull_into_letter(h, a, first_pull[i]));
                if (!box) continue;
                std::vector<Letter> word;
                word.reserve(suffixes[i].word.size() + 1);
                word.push_back(a);
                word.insert(word.end(), suffixes[i].word.begin(), suffixes[i].word.end());
                longer.push_back(Cylinder{std::move(word), std::move(*box)});
            }
        }
        suffixes = std::move(longer);
    }
    return suffixes;
}

BigFloat RateBound::upper_rate_at_depth(int m, int digits) const {
    if (m < 1) throw std::invalid_argument("depth must be >= 1");
    BigFloat v = span_additive.evaluate(digits) / BigFloat::from_int(BigInt(m), digits);
    return v + upper_rate.evaluate(digits);
}

std::vector<RateBound> rate_profile(const Schedule& schedule, int n, long k_first, long k_last, int digits,
                                    const Rational& chart_scale) {
    if (k_first < 1 || k_last < k_first) throw std::invalid_argument("profile needs 1 <= k_first <= k_last");
    if (chart_scale.sign() <= 0) throw std::invalid_argument("chart scale must be positive");
    schedule.validate();
    const LogExpr log_chart = LogExpr::log_of(chart_scale);
    const LogExpr log4 = LogExpr::log_of(BigInt(4));

    std::vector<RateBound> out;
    out.reserve(static_cast<std::size_t>(k_last - k_first + 1));
    for (long k = k_first; k <= k_last; ++k) {
        RateBound row;
        row.k = k;
        row.active = schedule.is_active(k);
        row.branch = schedule.active == ActiveSet::all ? "dense" : (row.active ? "active" : "inactive");
        row.log_eps = schedule.log_eps(k) + log_chart;
        row.log_eps_next = schedule.log_eps(k + 1) + log_chart;
        if (auto e = schedule.eps(k)) row.eps_exact = *e * chart_scale;
        if (row.active) {
            row.lower_rate = schedule.log_legs(k) * Rational(n);
            row.upper_rate = row.lower_rate;
            row.span_additive = LogExpr::log_of(BigInt(std::to_string(k), 10)) - row.log_eps;
        }
        const BigFloat log_eps = row.log_eps.evaluate(digits);
        const BigFloat log_eps_next = row.log_eps_next.evaluate(digits);
        const BigFloat log_4eps = (row.log_eps + log4).evaluate(digits);
        const BigFloat log_4_over_eps = (log4 - row.log_eps).evaluate(digits);
        // exp(log eps), evaluated through a rational when available
        row.eps_value = row.eps_exact ? BigFloat::from_rational(*row.eps_exact, digits) : BigFloat(digits);
        row.lower_rate_value = row.lower_rate.evaluate(digits);
        row.upper_rate_value = row.upper_rate.evaluate(digits);
        row.lower_ratio = ratio(row.lower_rate_value, log_eps_next);
        row.upper_ratio = ratio(row.upper_rate_value, log_4_over_eps);
        row.upper_ratio_4eps = log_4eps.sign() < 0 ? ratio(row.upper_rate_value, log_4eps) : BigFloat(digits);
        row.lower_ratio_at_scale = ratio(row.lower_rate_value, log_eps);
        out.push_back(std::move(row));
    }
    return out;
}

std::vector<RateBound> rate_profile(const StackedSystem& system, long k_first, long k_last, int digits,
                                    const Rational& chart_scale) {
    if (!system.is_identity()) return rate_profile(*system.schedule(), system.dim(), k_first, k_last, digits, chart_scale);
    if (k_first < 1 || k_last < k_first) throw std::invalid_argument("profile needs 1 <= k_first <= k_last");
    std::vector<RateBound> out;
    for (long k = k_first; k <= k_last; ++k) {
        RateBound row;
        row.k = k;
        row.branch = "identity";
        row.has_scale = false;
        row.eps_value = BigFloat(digits);
        row.lower_rate_value = BigFloat(digits);
        row.upper_rate_value = BigFloat(digits);
        row.lower_ratio = BigFloat(digits);
        row.upper_ratio = BigFloat(digits);
        row.upper_ratio_4eps = BigFloat(digits);
        row.lower_ratio_at_scale = BigFloat(digits);
        out.push_back(std::move(row));
    }
    return out;
}

std::vector<RateBound> rate_profile(const TwoBlockSystem& system, long k_first, long k_last, int digits) {
    const Rational to_physical = Rational(1) / TwoBlockSystem::chart_scale();
    const auto lower = rate_profile(system.lower(), k_first, k_last, digits, to_physical);
    const auto upper = rate_profile(system.upper(), k_first, k_last, digits, to_physical);
    std::vector<RateBound> out;
    out.reserve(lower.size());
    for (std::size_t i = 0; i < lower.size(); ++i) out.push_back(combine_max(lower[i], upper[i], "lower", "upper"));
    return out;
}

std::vector<RateBound> rate_profile(const System& system, long k_first, long k_last, int digits) {
    return std::visit([&](const auto& s) { return rate_profile(s, k_first, k_last, digits); }, system);
}

InverseKFit fit_inverse_k(const std::vector<double>& ks, const std::vector<double>& ys) {
    if (ks.size() != ys.size() || ks.empty()) throw std::invalid_argument("fit needs matching, non-empty samples");
    InverseKFit fit;
    fit.points = ks.size();
    // y = c + b u with u = -1/k
    long double su = 0, sy = 0, suu = 0, suy = 0;
    const long double cnt = static_cast<long double>(ks.size());
    for (std::size_t i = 0; i < ks.size(); ++i) {
        const long double u = -1.0L / ks[i];
        su += u;
        sy += ys[i];
        suu += u * u;
        suy += u * ys[i];
    }
    const long double det = cnt * suu - su * su;
    const bool distinct = std::any_of(ks.begin(), ks.end(), [&](double k) { return k != ks.front(); });
    if (!distinct || std::fabs(static_cast<double>(det)) < 1e-300) {
        fit.degenerate = true;
        fit.limit = static_cast<double>(sy / cnt);
    } else {
        const long double b = (cnt * suy - su * sy) / det;
        const long double c = (sy - b * su) / cnt;
        fit.limit = static_cast<double>(c);
        fit.slope = static_cast<double>(b);
    }
    long double ss = 0;
    for (std::size_t i = 0; i < ks.size(); ++i) {
        const long double pred = fit.limit - fit.slope / ks[i];
        ss += (ys[i] - pred) * (ys[i] - pred);
    }
    fit.residual = static_cast<double>(std::sqrt(ss / cnt));
    return fit;
}

Extrapolation extrapolate(const std::vector<RateBound>& profile, std::size_t window) {
    if (profile.size() < 4) throw std::invalid_argument("extrapolation needs at least 4 profile points");
    if (window < 2) throw std::invalid_argument("extrapolation window must be >= 2");
    std::map<std::string, std::vector<const RateBound*>> by_branch;
    for (const auto& row : profile) by_branch[row.branch].push_back(&row);

    Extrapolation out;
    bool first = true;
    for (auto& [name, rows] : by_branch) {
        std::sort(rows.begin(), rows.end(), [](const RateBound* a, const RateBound* b) { return a->k < b->k; });
        // The smallest index of a branch is the least asymptotic one; leave it
        // out whenever at least two points remain.
        const std::size_t usable = rows.size() > 2 ? rows.size() - 1 : rows.size();
        const std::size_t start = rows.size() - std::min(window, usable);
        std::vector<double> ks, lo, up;
        for (std::size_t i = start; i < rows.size(); ++i) {
            ks.push_back(static_cast<double>(rows[i]->k));
            lo.push_back(rows[i]->lower_ratio.to_double());
            up.push_back(rows[i]->upper_ratio.to_double());
        }
        BranchFit bf{name, fit_inverse_k(ks, lo), fit_inverse_k(ks, up)};
        if (first || bf.lower.limit < out.liminf) {
            out.liminf = bf.lower.limit;
            out.liminf_residual = bf.lower.residual;
            out.liminf_branch = name;
        }
        if (first || out.limsup < bf.upper.limit) {
            out.limsup = bf.upper.limit;
            out.limsup_residual = bf.upper.residual;
            out.limsup_branch = name;
        }
        first = false;
        out.branches.push_back(std::move(bf));
    }
    for (const auto& bf : out.branches) {
        if (bf.branch == out.liminf_branch && bf.lower.degenerate) out.degenerate = true;
        if (bf.branch == out.limsup_branch && bf.upper.degenerate) out.degenerate = true;
    }
    return out;
}

namespace {

long horizon_for(const StackedSystem& s) {
    long h = 24;
    if (!s.is_identity()) {
        if (s.schedule()->law == SizeLaw::quadratic) h = 100;
        if (s.schedule()->active == ActiveSet::self_powers) h = 256;  // 4^4, the fourth active index
    }
    return std::max(h, s.k_max());
}

}  // namespace

long default_profile_horizon(const System& system) {
    if (const auto* s = std::get_if<StackedSystem>(&system)) return horizon_for(*s);
    const auto& tb = std::get<TwoBlockSystem>(system);
    return std::max(horizon_for(tb.lower()), horizon_for(tb.upper()));
}

}  // namespace mmdim
