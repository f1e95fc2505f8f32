#include "mmdim/serialize.hpp"

#include <json.hpp>

#include <cmath>
#include <set>
#include <sstream>

namespace mmdim {

using nlohmann::json;

namespace {

Rational rational_field(const json& j, const std::string& field) {
    if (j.is_string()) {
        try {
            return Rational::parse(j.get<std::string>());
        } catch (const std::invalid_argument& e) {
            throw SpecError(field, e.what());
        }
    }
    if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
    throw SpecError(field, "expected a \"p/q\" string or an integer");
}

long integer_field(const json& j, const std::string& field) {
    if (!j.is_number_integer()) throw SpecError(field, "expected an integer");
    return j.get<long>();
}

const json& require(const json& obj, const std::string& key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) throw SpecError(where.empty() ? key : where + "." + key, "missing");
    return *it;
}

std::string path(const std::string& where, const std::string& key) { return where.empty() ? key : where + "." + key; }

// ---- writing ----

json to_json(const Rational& q) { return q.str(); }

json to_json(const Schedule& s) {
    json j;
    j["law"] = to_string(s.law);
    j["B"] = to_json(s.B);
    if (s.law == SizeLaw::geometric) j["r"] = to_json(s.r);
    j["active"] = to_string(s.active);
    j["legScheduleOverride"] = s.legs_override;
    return j;
}

json to_json(const Cube& c) { return json{{"lo", to_json(c.lo)}, {"hi", to_json(c.hi)}}; }

json to_json(const AffinePiece& p) {
    json domain = json::array();
    for (const auto& iv : p.domain.axes()) domain.push_back(json::array({to_json(iv.lo), to_json(iv.hi)}));
    json scale = json::array(), offset = json::array();
    for (const auto& s : p.scale) scale.push_back(to_json(s));
    for (const auto& o : p.offset) offset.push_back(to_json(o));
    std::vector<bool> reflect(p.reflect.begin(), p.reflect.end());
    return json{{"domain", domain}, {"scale", scale}, {"offset", offset}, {"reflect", reflect}};
}

json to_json(const Block& b) {
    json j;
    j["k"] = b.k;
    j["status"] = to_string(b.status);
    j["legs"] = b.legs.get_str();
    if (b.placement) {
        const auto& p = *b.placement;
        j["placement"] = json{{"side", to_json(p.side)},
                              {"slot_lo", to_json(p.slot_lo)},
                              {"slot_hi", to_json(p.slot_hi)},
                              {"cube", to_json(p.cube)},
                              {"outer", to_json(p.outer)}};
    }
    if (b.horseshoe) {
        json assignment = json::array();
        for (const auto& leg : b.horseshoe->assignment()) assignment.push_back(leg);
        json pieces = json::array();
        for (const auto& piece : b.horseshoe->map().pieces()) pieces.push_back(to_json(piece));
        j["horseshoe"] = json{{"assignment", assignment}, {"pieces", pieces}};
    }
    return j;
}

json stacked_json(const StackedSystem& s) {
    json j;
    j["n"] = s.dim();
    j["kind"] = system_kind(System(s));
    if (s.schedule()) j["schedule"] = to_json(*s.schedule());
    j["rescale"] = to_json(s.rescale());
    j["kMax"] = s.k_max();
    j["legLimit"] = s.leg_limit();
    json blocks = json::array();
    for (const auto& b : s.blocks()) blocks.push_back(to_json(b));
    j["blocks"] = blocks;
    return j;
}

// ---- reading ----

Schedule schedule_from(const json& j, const std::string& where) {
    Schedule s;
    const std::string law = require(j, "law", where).get<std::string>();
    if (law == "geometric") {
        s = Schedule::geometric(rational_field(require(j, "B", where), path(where, "B")),
                                rational_field(require(j, "r", where), path(where, "r")));
    } else if (law == "quadratic") {
        s = Schedule::quadratic(rational_field(require(j, "B", where), path(where, "B")));
    } else {
        throw SpecError(path(where, "law"), "unknown law '" + law + "'");
    }
    const std::string active = require(j, "active", where).get<std::string>();
    if (active == "self_powers") s.active = ActiveSet::self_powers;
    else if (active != "all") throw SpecError(path(where, "active"), "unknown active set '" + active + "'");
    if (auto it = j.find("legScheduleOverride"); it != j.end())
        for (const auto& v : *it) s.legs_override.push_back(integer_field(v, path(where, "legScheduleOverride")));
    try {
        s.validate();
    } catch (const std::invalid_argument& e) {
        throw SpecError(where, e.what());
    }
    return s;
}

Cube cube_from(const json& j, int n, const std::string& where) {
    try {
        return Cube(rational_field(require(j, "lo", where), path(where, "lo")),
                    rational_field(require(j, "hi", where), path(where, "hi")), n);
    } catch (const SpecError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw SpecError(where, e.what());
    }
}

AffinePiece piece_from(const json& j, int n, const std::string& where) {
    AffinePiece p;
    std::vector<Interval> axes;
    for (const auto& iv : require(j, "domain", where)) {
        if (!iv.is_array() || iv.size() != 2) throw SpecError(path(where, "domain"), "expected [lo, hi] pairs");
        axes.push_back(Interval{rational_field(iv[0], path(where, "domain")), rational_field(iv[1], path(where, "domain"))});
    }
    p.domain = Box(std::move(axes));
    for (const auto& v : require(j, "scale", where)) p.scale.push_back(rational_field(v, path(where, "scale")));
    for (const auto& v : require(j, "offset", where)) p.offset.push_back(rational_field(v, path(where, "offset")));
    for (const auto& v : require(j, "reflect", where)) {
        if (!v.is_boolean()) throw SpecError(path(where, "reflect"), "expected booleans");
        p.reflect.push_back(v.get<bool>());
    }
    if (p.dim() != n) throw SpecError(path(where, "domain"), "dimension does not match n");
    try {
        check_piece(p);
    } catch (const std::invalid_argument& e) {
        throw SpecError(where, e.what());
    }
    return p;
}

Block block_from(const json& j, int n, bool validate, const std::string& where) {
    Block b;
    b.k = integer_field(require(j, "k", where), path(where, "k"));
    const std::string status = require(j, "status", where).get<std::string>();
    if (status == "identity") b.status = BlockStatus::identity;
    else if (status == "horseshoe") b.status = BlockStatus::horseshoe;
    else if (status == "symbolic_only") b.status = BlockStatus::symbolic_only;
    else throw SpecError(path(where, "status"), "unknown status '" + status + "'");
    try {
        b.legs = BigInt(require(j, "legs", where).get<std::string>(), 10);
    } catch (const std::invalid_argument&) {
        throw SpecError(path(where, "legs"), "expected a decimal integer string");
    }
    if (auto it = j.find("placement"); it != j.end()) {
        const std::string pw = path(where, "placement");
        BlockPlacement p;
        p.k = b.k;
        p.side = rational_field(require(*it, "side", pw), path(pw, "side"));
        p.slot_lo = rational_field(require(*it, "slot_lo", pw), path(pw, "slot_lo"));
        p.slot_hi = rational_field(require(*it, "slot_hi", pw), path(pw, "slot_hi"));
        p.cube = cube_from(require(*it, "cube", pw), n, path(pw, "cube"));
        p.outer = cube_from(require(*it, "outer", pw), n, path(pw, "outer"));
        b.placement = p;
    }
    if (auto it = j.find("horseshoe"); it != j.end()) {
        const std::string hw = path(where, "horseshoe");
        if (!b.placement) throw SpecError(hw, "horseshoe block without placement");
        if (b.status != BlockStatus::horseshoe) throw SpecError(hw, "geometry on a block with status " + status);
        if (!b.legs.fits_sint_p() || b.legs < 3) throw SpecError(path(where, "legs"), "invalid leg count");
        SubdivisionGrid grid = [&] {
            try {
                return subdivide(b.placement->cube, static_cast<int>(b.legs.get_si()));
            } catch (const std::invalid_argument& e) {
                throw SpecError(path(where, "legs"), e.what());
            }
        }();
        std::vector<LegIndex> assignment;
        for (const auto& leg : require(*it, "assignment", hw)) {
            LegIndex idx;
            for (const auto& v : leg) idx.push_back(static_cast<int>(integer_field(v, path(hw, "assignment"))));
            assignment.push_back(std::move(idx));
        }
        std::vector<AffinePiece> pieces;
        for (const auto& pj : require(*it, "pieces", hw)) pieces.push_back(piece_from(pj, n, path(hw, "pieces")));
        HorseshoeMap h(std::move(grid), std::move(assignment), PAMap(b.placement->cube, std::move(pieces)));
        if (validate) {
            const ValidationReport report = validate_horseshoe(h);
            for (const auto& c : report.checks)
                if (!c.passed) throw SpecError(hw, "validation check " + c.name + " failed: " + c.detail);
        }
        b.horseshoe = std::move(h);
    } else if (b.status == BlockStatus::horseshoe) {
        throw SpecError(path(where, "horseshoe"), "missing for a horseshoe block");
    }
    return b;
}

StackedSystem stacked_from(const json& j, bool validate, const std::string& where) {
    const long n = integer_field(require(j, "n", where), path(where, "n"));
    if (n < 2) throw SpecError(path(where, "n"), "must be >= 2");
    std::optional<Schedule> schedule;
    if (auto it = j.find("schedule"); it != j.end()) schedule = schedule_from(*it, path(where, "schedule"));
    const Rational rescale = rational_field(require(j, "rescale", where), path(where, "rescale"));
    const long k_max = integer_field(require(j, "kMax", where), path(where, "kMax"));
    const long leg_limit = integer_field(require(j, "legLimit", where), path(where, "legLimit"));
    std::vector<Block> blocks;
    for (const auto& bj : require(j, "blocks", where))
        blocks.push_back(block_from(bj, static_cast<int>(n), validate,
                                    path(where, "blocks[" + std::to_string(blocks.size()) + "]")));
    if (!schedule && !blocks.empty()) throw SpecError(path(where, "blocks"), "identity system with blocks");
    try {
        StackedSystem s(static_cast<int>(n), schedule, rescale, k_max, leg_limit, std::move(blocks));
        if (validate) {
            const DisjointnessReport d = check_disjointness(s);
            if (!d.ok) throw SpecError(path(where, "blocks"), d.detail);
        }
        return s;
    } catch (const SpecError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw SpecError(path(where, "blocks"), e.what());
    }
}

void check_known(const json& j, const std::set<std::string>& known) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key())) throw SpecError(it.key(), "unknown field");
}

std::string fmt_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

SystemSpec parse_spec(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SpecError("spec", std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw SpecError("spec", "expected a JSON object");
    check_known(j, {"n", "kind", "B", "r", "kMax", "legScheduleOverride", "legLimit", "alpha", "beta"});

    SystemSpec s;
    s.n = static_cast<int>(integer_field(require(j, "n", ""), "n"));
    if (s.n < 2) throw SpecError("n", "must be >= 2");
    const json& kind = require(j, "kind", "");
    if (!kind.is_string()) throw SpecError("kind", "expected a string");
    s.kind = kind.get<std::string>();
    static const std::set<std::string> kinds{"geometric", "quadratic", "sparse", "two_block", "identity"};
    if (!kinds.count(s.kind)) throw SpecError("kind", "unknown kind '" + s.kind + "'");

    auto forbid = [&](const std::string& field, const std::string& why) {
        if (j.contains(field)) throw SpecError(field, why);
    };
    if (j.contains("kMax")) {
        s.k_max = integer_field(j["kMax"], "kMax");
        if (s.k_max < 1) throw SpecError("kMax", "must be >= 1");
    }
    if (j.contains("legLimit")) {
        s.leg_limit = integer_field(j["legLimit"], "legLimit");
        if (s.leg_limit < 1) throw SpecError("legLimit", "must be >= 1");
    }
    if (j.contains("legScheduleOverride")) {
        if (!j["legScheduleOverride"].is_array()) throw SpecError("legScheduleOverride", "expected an array");
        for (const auto& v : j["legScheduleOverride"]) {
            const long L = integer_field(v, "legScheduleOverride");
            if (L < 3 || L % 2 == 0) throw SpecError("legScheduleOverride", "entries must be odd and >= 3");
            s.legs_override.push_back(L);
        }
    }
    if (j.contains("B")) s.B = rational_field(j["B"], "B");
    if (j.contains("r")) s.r = rational_field(j["r"], "r");

    if (s.kind == "identity" || s.kind == "two_block") {
        const std::string why = "not allowed for kind " + s.kind;
        forbid("B", why);
        forbid("r", why);
        forbid("legScheduleOverride", why);
    }
    if (s.kind == "two_block") {
        s.alpha = rational_field(require(j, "alpha", ""), "alpha");
        s.beta = rational_field(require(j, "beta", ""), "beta");
        if (s.alpha.sign() < 0) throw SpecError("alpha", "must be >= 0");
        if (s.beta > Rational(s.n)) throw SpecError("beta", "must not exceed n");
        if (s.alpha > s.beta) throw SpecError("alpha", "must not exceed beta");
    } else {
        forbid("alpha", "only allowed for kind two_block");
        forbid("beta", "only allowed for kind two_block");
    }
    if (s.kind == "quadratic") forbid("r", "r is not allowed for a quadratic schedule");
    if (s.kind == "geometric" || s.kind == "sparse") {
        if (!s.r) throw SpecError("r", "missing");
        if (s.r->sign() <= 0) throw SpecError("r", "r must be positive, r in (0, inf)");
    }
    if (s.kind != "identity" && s.kind != "two_block") {
        if (s.B.sign() <= 0) throw SpecError("B", "B must be positive");
        Schedule sched = s.kind == "quadratic" ? Schedule::quadratic(s.B) : Schedule::geometric(s.B, *s.r);
        sched.legs_override = s.legs_override;
        try {
            sched.validate();
        } catch (const std::invalid_argument& e) {
            const std::string msg = e.what();
            throw SpecError(msg.rfind("legSchedule", 0) == 0 ? "legScheduleOverride" : "B", msg);
        }
    }
    return s;
}

System build_system(const SystemSpec& spec) {
    if (spec.kind == "identity") return StackedSystem::identity(spec.n);
    if (spec.kind == "two_block") return build_two_block(spec.alpha, spec.beta, spec.n, spec.k_max, spec.leg_limit);
    Schedule s = spec.kind == "quadratic" ? Schedule::quadratic(spec.B) : Schedule::geometric(spec.B, *spec.r);
    s.legs_override = spec.legs_override;
    if (spec.kind == "sparse") s = s.sparse();
    return build_stacked(s, spec.n, spec.k_max, spec.leg_limit);
}

std::string serialize_system(const System& system) {
    json j;
    if (const auto* s = std::get_if<StackedSystem>(&system)) {
        j = stacked_json(*s);
    } else {
        const auto& tb = std::get<TwoBlockSystem>(system);
        j["n"] = tb.dim();
        j["kind"] = "two_block";
        j["alpha"] = to_json(tb.alpha());
        j["beta"] = to_json(tb.beta());
        j["lower"] = stacked_json(tb.lower());
        j["upper"] = stacked_json(tb.upper());
    }
    j["format"] = "mmdim-system";
    j["version"] = 1;
    return j.dump(2) + "\n";
}

System load_system(const std::string& text, bool validate) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SpecError("system", std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw SpecError("system", "expected a JSON object");
    const json& format = require(j, "format", "");
    if (!format.is_string() || format.get<std::string>() != "mmdim-system") throw SpecError("format", "not an mmdim system file");
    if (integer_field(require(j, "version", ""), "version") != 1) throw SpecError("version", "unsupported version");
    const std::string kind = require(j, "kind", "").get<std::string>();
    try {
        if (kind == "two_block") {
            const Rational alpha = rational_field(require(j, "alpha", ""), "alpha");
            const Rational beta = rational_field(require(j, "beta", ""), "beta");
            StackedSystem lower = stacked_from(require(j, "lower", ""), validate, "lower");
            StackedSystem upper = stacked_from(require(j, "upper", ""), validate, "upper");
            return TwoBlockSystem(alpha, beta, std::move(lower), std::move(upper));
        }
        StackedSystem s = stacked_from(j, validate, "");
        if (system_kind(System(s)) != kind) throw SpecError("kind", "does not match the schedule");
        return s;
    } catch (const json::exception& e) {
        throw SpecError("system", std::string("malformed field: ") + e.what());
    }
}

std::string csv_header() { return "k,eps_exact,eps_float,lower_rate,upper_rate,lower_ratio,upper_ratio,source,counts,status"; }

std::string csv_row(const RateBound& row, int digits) {
    std::ostringstream os;
    os << row.k << ',';
    if (row.eps_exact) os << row.eps_exact->str();
    os << ',';
    if (row.has_scale) os << fmt_double(std::exp(row.log_eps.evaluate(digits).to_double()));
    os << ',' << row.lower_rate_value.str(digits) << ',' << row.upper_rate_value.str(digits) << ','
       << row.lower_ratio.str(digits) << ',' << row.upper_ratio.str(digits) << ",symbolic,,ok";
    return os.str();
}

std::string csv_row(const NumericRow& row) {
    std::ostringstream os;
    os << row.k << ',';
    if (row.eps) os << row.eps->str();
    os << ',';
    if (row.eps) os << fmt_double(row.eps->to_double());
    const bool ok = row.status == NumericStatus::ok;
    os << ',' << (ok ? fmt_double(row.rate) : "") << ",," << (ok ? fmt_double(row.lower_ratio) : "") << ",,numeric,";
    for (std::size_t i = 0; i < row.counts.size(); ++i) os << (i ? ";" : "") << row.counts[i];
    os << ',' << to_string(row.status);
    return os.str();
}

}  // namespace mmdim
