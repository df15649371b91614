#include "sdg/problem.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "sdg/rng.hpp"

namespace sdg {

void ControlSet::validate() const {
    if (points.empty()) throw ConfigError("ControlSet " + label + ": empty point list");
    size_t dim = points[0].size();
    for (const Vec& p : points)
        if (p.size() != dim) throw ConfigError("ControlSet " + label + ": inconsistent point dimensions");
    for (size_t i = 0; i < points.size(); ++i)
        for (size_t j = i + 1; j < points.size(); ++j)
            if (points[i] == points[j]) throw ConfigError("ControlSet " + label + ": duplicate point");
}

ControlSet ControlSet::grid(const Vec& lo, const Vec& hi, const std::vector<int>& counts,
                            std::string label) {
    if (lo.size() != hi.size() || lo.size() != counts.size())
        throw ConfigError("ControlSet::grid: dimension mismatch");
    ControlSet cs;
    cs.label = std::move(label);
    long total = 1;
    for (int c : counts) {
        if (c < 1) throw ConfigError("ControlSet::grid: counts must be >= 1");
        total *= c;
    }
    for (long flat = 0; flat < total; ++flat) {
        long rem = flat;
        Vec p(lo.size());
        for (int d = static_cast<int>(lo.size()) - 1; d >= 0; --d) {
            int i = static_cast<int>(rem % counts[d]);
            rem /= counts[d];
            p[d] = counts[d] == 1 ? lo[d] : lo[d] + (hi[d] - lo[d]) * i / (counts[d] - 1);
        }
        cs.points.push_back(std::move(p));
    }
    cs.validate();
    return cs;
}

void ProblemSpec::validate_dimensions() const {
    u_set.validate();
    v_set.validate();
    levy.validate();
    const double t = 0.0;
    Vec x(state_dim, 0.1);
    const Vec& u = u_set.at(0);
    const Vec& v = v_set.at(0);
    Vec b = coefficients.drift(t, x, u, v);
    if (static_cast<int>(b.size()) != state_dim) throw ConfigError("drift output dimension != state_dim");
    Mat s = coefficients.sigma(t, x, u, v);
    if (s.rows != state_dim || s.cols != brownian_dim)
        throw ConfigError("sigma output shape != state_dim x brownian_dim");
    if (!levy.atoms.empty()) {
        Vec g = coefficients.gamma(t, x, u, v, levy.atoms[0].mark);
        if (static_cast<int>(g.size()) != state_dim) throw ConfigError("gamma output dimension != state_dim");
    }
    coefficients.terminal(x);
    Vec z(brownian_dim, 0.0);
    coefficients.driver(t, x, 0.0, z, 0.0, u, v);
}

// ---------------------------------------------------------------------------
// hypothesis validator
// ---------------------------------------------------------------------------

namespace {

Vec random_point(CounterRng& rng, int dim, double radius) {
    Vec x(dim);
    for (double& v : x) v = radius * (2.0 * rng.next_uniform() - 1.0);
    return x;
}

struct RatioTracker {
    double worst = 0.0;
    std::string witness;
    void update(double ratio, const std::string& w) {
        if (ratio > worst) {
            worst = ratio;
            witness = w;
        }
    }
};

std::string point_str(const Vec& x) {
    std::string s = "(";
    for (size_t i = 0; i < x.size(); ++i) s += (i ? "," : "") + format_double(x[i]);
    return s + ")";
}

} // namespace

json ValidationReport::to_json() const {
    json arr = json::array();
    for (const auto& c : clauses) {
        arr.push_back({{"clause", c.clause},
                       {"worst_ratio", c.worst_ratio},
                       {"threshold", c.threshold},
                       {"pass", c.pass},
                       {"witness", c.witness}});
    }
    return {{"all_pass", all_pass()}, {"clauses", arr}};
}

ValidationReport validate_hypotheses(const ProblemSpec& spec, const ProbeConfig& probe) {
    spec.validate_dimensions();
    const auto& co = spec.coefficients;
    const double C = co.lipschitz_C;
    const int n = spec.state_dim;
    const int d = spec.brownian_dim;
    CounterRng rng(probe.seed, 0, 0, 7);

    RatioTracker lip_bs, gam_dom, rho_bound, f_lip, f_mono, phi_lip, l_bound, l_lip, t_cont;

    auto pick_uv = [&](CounterRng& r) {
        int iu = static_cast<int>(r.next_uniform() * spec.u_set.size()) % spec.u_set.size();
        int iv = static_cast<int>(r.next_uniform() * spec.v_set.size()) % spec.v_set.size();
        return std::pair<const Vec&, const Vec&>(spec.u_set.at(iu), spec.v_set.at(iv));
    };

    for (int i = 0; i < probe.n_probes; ++i) {
        double t = spec.horizon * rng.next_uniform();
        Vec x = random_point(rng, n, probe.x_radius);
        Vec xp = random_point(rng, n, probe.x_radius);
        auto [u, v] = pick_uv(rng);
        double dx = norm2(x - xp);
        if (dx < 1e-12) continue;

        Vec db = co.drift(t, x, u, v) - co.drift(t, xp, u, v);
        Mat s1 = co.sigma(t, x, u, v), s2 = co.sigma(t, xp, u, v);
        double ds = 0.0;
        for (size_t q = 0; q < s1.a.size(); ++q) ds += (s1.a[q] - s2.a[q]) * (s1.a[q] - s2.a[q]);
        lip_bs.update((norm2(db) + std::sqrt(ds)) / dx, "x=" + point_str(x) + " x'=" + point_str(xp));

        for (const auto& atom : spec.levy.atoms) {
            double rho_e = co.rho(atom.mark);
            double mark_wedge = std::min(1.0, norm2(atom.mark));
            Vec dg = co.gamma(t, x, u, v, atom.mark) - co.gamma(t, xp, u, v, atom.mark);
            Vec g0 = co.gamma(t, Vec(n, 0.0), u, v, atom.mark);
            double denom = std::max(rho_e, 1e-300);
            gam_dom.update(norm2(dg) / (denom * dx), "mark=" + point_str(atom.mark));
            gam_dom.update(norm2(g0) / denom, "mark=" + point_str(atom.mark) + " at x=0");
            rho_bound.update(rho_e / std::max(C * mark_wedge, 1e-300), "mark=" + point_str(atom.mark));

            double lv = co.jump_weight(x, atom.mark);
            double lvp = co.jump_weight(xp, atom.mark);
            double upper = C * mark_wedge;
            l_bound.update(lv < 0.0 ? 2.0 : (upper > 0 ? lv / upper : (lv > 0 ? 2.0 : 0.0)),
                           "mark=" + point_str(atom.mark) + " x=" + point_str(x));
            l_lip.update(std::fabs(lv - lvp) / std::max(C * dx * mark_wedge, 1e-300),
                         "mark=" + point_str(atom.mark));
        }

        double y = probe.yzk_radius * (2.0 * rng.next_uniform() - 1.0);
        double yp = probe.yzk_radius * (2.0 * rng.next_uniform() - 1.0);
        Vec z = random_point(rng, d, probe.yzk_radius);
        Vec zp = random_point(rng, d, probe.yzk_radius);
        double k = probe.yzk_radius * (2.0 * rng.next_uniform() - 1.0);
        double kp = probe.yzk_radius * (2.0 * rng.next_uniform() - 1.0);
        double df = std::fabs(co.driver(t, x, y, z, k, u, v) - co.driver(t, xp, yp, zp, kp, u, v));
        double denom_f = dx + std::fabs(y - yp) + norm2(z - zp) + std::fabs(k - kp);
        if (denom_f > 1e-12) f_lip.update(df / denom_f, "x=" + point_str(x));

        double klo = std::min(k, kp), khi = std::max(k, kp);
        if (khi - klo > 1e-12) {
            double drop = co.driver(t, x, y, z, klo, u, v) - co.driver(t, x, y, z, khi, u, v);
            f_mono.update(drop / (khi - klo), "k=" + format_double(klo) + " k'=" + format_double(khi));
        }

        phi_lip.update(std::fabs(co.terminal(x) - co.terminal(xp)) / dx,
                       "x=" + point_str(x) + " x'=" + point_str(xp));

        double t2 = std::min(spec.horizon, t + 1e-7);
        Vec dbt = co.drift(t, x, u, v) - co.drift(t2, x, u, v);
        Mat st1 = co.sigma(t, x, u, v), st2 = co.sigma(t2, x, u, v);
        double dst = 0.0;
        for (size_t q = 0; q < st1.a.size(); ++q) dst += (st1.a[q] - st2.a[q]) * (st1.a[q] - st2.a[q]);
        t_cont.update(norm2(dbt) + std::sqrt(dst), "t=" + format_double(t));
    }

    ValidationReport report;
    auto add = [&](const std::string& name, const RatioTracker& tr, double threshold) {
        ClauseReport c;
        c.clause = name;
        c.worst_ratio = tr.worst;
        c.threshold = threshold;
        c.pass = tr.worst <= threshold * (1.0 + 1e-9) + 1e-12;
        c.witness = tr.witness.empty() ? "no probe hit (vacuous)" : tr.witness;
        report.clauses.push_back(std::move(c));
    };
    add("drift_diffusion_x_lipschitz", lip_bs, C);
    add("jump_rho_domination", gam_dom, 1.0);
    add("rho_mark_bound", rho_bound, 1.0);
    add("driver_lipschitz", f_lip, C);
    add("driver_monotone_in_jump_arg", f_mono, 0.0);
    add("terminal_lipschitz", phi_lip, C);
    add("jump_weight_bounds", l_bound, 1.0);
    add("jump_weight_x_lipschitz", l_lip, 1.0);
    add("time_continuity", t_cont, 1e-4);
    return report;
}

// ---------------------------------------------------------------------------
// parametric coefficient family
// ---------------------------------------------------------------------------

namespace {

Mat mat_from_json(const json& j, const std::string& ptr, int rows, int cols) {
    if (!j.is_array() || static_cast<int>(j.size()) != rows)
        throw ParseError("problem file: expected " + std::to_string(rows) + " rows at " + ptr);
    Mat m(rows, cols);
    for (int r = 0; r < rows; ++r) {
        const json& row = j[r];
        if (!row.is_array() || static_cast<int>(row.size()) != cols)
            throw ParseError("problem file: expected " + std::to_string(cols) + " columns at " + ptr);
        for (int c = 0; c < cols; ++c) m(r, c) = row[c].get<double>();
    }
    return m;
}

Vec vec_from_json(const json& j, const std::string& ptr, int len) {
    if (!j.is_array() || static_cast<int>(j.size()) != len)
        throw ParseError("problem file: expected vector of length " + std::to_string(len) + " at " + ptr);
    Vec v(len);
    for (int i = 0; i < len; ++i) v[i] = j[i].get<double>();
    return v;
}

json mat_to_json(const Mat& m) {
    json rows = json::array();
    for (int r = 0; r < m.rows; ++r) {
        json row = json::array();
        for (int c = 0; c < m.cols; ++c) row.push_back(m(r, c));
        rows.push_back(row);
    }
    return rows;
}

struct Dims {
    int n, d, l, pu, pv;
};

Coefficients build_parametric(const json& coeff, const Dims& dims) {
    const int n = dims.n, d = dims.d, l = dims.l, pu = dims.pu, pv = dims.pv;
    if (!coeff.contains("params")) throw ParseError("problem file: missing key at /coefficients/params");
    const json& p = coeff["params"];
    Coefficients co;
    co.lipschitz_C = coeff.value("lipschitz_C", 1.0);
    co.family = coeff;

    // drift
    const json& dj = p.value("drift", json::object());
    std::string dkind = dj.value("kind", "affine");
    if (dkind == "affine") {
        Mat A = dj.contains("A") ? mat_from_json(dj["A"], "/coefficients/params/drift/A", n, n) : Mat(n, n);
        Vec b0 = dj.contains("b0") ? vec_from_json(dj["b0"], "/coefficients/params/drift/b0", n) : Vec(n, 0.0);
        Mat Bu = dj.contains("Bu") ? mat_from_json(dj["Bu"], "/coefficients/params/drift/Bu", n, pu) : Mat(n, pu);
        Mat Bv = dj.contains("Bv") ? mat_from_json(dj["Bv"], "/coefficients/params/drift/Bv", n, pv) : Mat(n, pv);
        co.drift = [A, b0, Bu, Bv](double, const Vec& x, const Vec& u, const Vec& v) {
            Vec b = A.apply(x);
            axpy(1.0, b0, b);
            axpy(1.0, Bu.apply(u), b);
            axpy(1.0, Bv.apply(v), b);
            return b;
        };
    } else if (dkind == "bilinear") {
        Vec c = vec_from_json(dj.at("c"), "/coefficients/params/drift/c", n);
        co.drift = [c](double, const Vec&, const Vec& u, const Vec& v) { return (u[0] * v[0]) * c; };
    } else {
        throw ParseError("problem file: unknown drift kind '" + dkind + "' at /coefficients/params/drift/kind");
    }

    // diffusion
    const json& sj = p.value("sigma", json::object());
    std::string skind = sj.value("kind", "constant");
    if (skind == "constant") {
        Mat S0 = sj.contains("S0") ? mat_from_json(sj["S0"], "/coefficients/params/sigma/S0", n, d) : Mat(n, d);
        co.sigma = [S0](double, const Vec&, const Vec&, const Vec&) { return S0; };
    } else {
        throw ParseError("problem file: unknown sigma kind '" + skind + "' at /coefficients/params/sigma/kind");
    }

    // jump coefficient
    const json& gj = p.value("gamma", json::object());
    std::string gkind = gj.value("kind", "linear_mark");
    if (gkind == "linear_mark") {
        Mat G = gj.contains("G") ? mat_from_json(gj["G"], "/coefficients/params/gamma/G", n, l) : Mat(n, l);
        co.gamma = [G](double, const Vec&, const Vec&, const Vec&, const Vec& e) { return G.apply(e); };
    } else {
        throw ParseError("problem file: unknown gamma kind '" + gkind + "' at /coefficients/params/gamma/kind");
    }

    // driver
    const json& fj = p.value("driver", json::object());
    std::string fkind = fj.value("kind", "affine");
    if (fkind == "affine") {
        double a0 = fj.value("a0", 0.0);
        double ay = fj.value("ay", 0.0);
        double ak = fj.value("ak", 0.0);
        Vec ax = fj.contains("ax") ? vec_from_json(fj["ax"], "/coefficients/params/driver/ax", n) : Vec(n, 0.0);
        Vec az = fj.contains("az") ? vec_from_json(fj["az"], "/coefficients/params/driver/az", d) : Vec(d, 0.0);
        Vec au = fj.contains("au") ? vec_from_json(fj["au"], "/coefficients/params/driver/au", pu) : Vec(pu, 0.0);
        Vec av = fj.contains("av") ? vec_from_json(fj["av"], "/coefficients/params/driver/av", pv) : Vec(pv, 0.0);
        co.driver = [a0, ay, ak, ax, az, au, av](double, const Vec& x, double y, const Vec& z, double kbar,
                                                 const Vec& u, const Vec& v) {
            return a0 + dot(ax, x) + ay * y + dot(az, z) + ak * kbar + dot(au, u) + dot(av, v);
        };
    } else {
        throw ParseError("problem file: unknown driver kind '" + fkind + "' at /coefficients/params/driver/kind");
    }

    // terminal
    const json& tj = p.value("terminal", json::object());
    std::string tkind = tj.value("kind", "linear");
    if (tkind == "linear") {
        Vec w = tj.contains("w") ? vec_from_json(tj["w"], "/coefficients/params/terminal/w", n) : Vec(n, 1.0);
        double c = tj.value("c", 0.0);
        co.terminal = [w, c](const Vec& x) { return dot(w, x) + c; };
    } else if (tkind == "abs") {
        Vec x0 = tj.contains("x0") ? vec_from_json(tj["x0"], "/coefficients/params/terminal/x0", n) : Vec(n, 0.0);
        double scale = tj.value("scale", 1.0);
        co.terminal = [x0, scale](const Vec& x) {
            double s = 0.0;
            for (size_t i = 0; i < x.size(); ++i) s += std::fabs(x[i] - x0[i]);
            return scale * s;
        };
    } else if (tkind == "quad") {
        double scale = tj.value("scale", 1.0);
        co.terminal = [scale](const Vec& x) { return scale * dot(x, x); };
    } else {
        throw ParseError("problem file: unknown terminal kind '" + tkind + "' at /coefficients/params/terminal/kind");
    }

    // jump weight l
    const json& lj = p.value("jump_weight", json::object());
    std::string lkind = lj.value("kind", "wedge");
    double lc = lj.value("c", 0.0);
    if (lkind == "wedge") {
        co.jump_weight = [lc](const Vec&, const Vec& e) { return lc * std::min(1.0, norm2(e)); };
    } else if (lkind == "tanh_scaled") {
        co.jump_weight = [lc](const Vec& x, const Vec& e) {
            double s = 0.0;
            for (double xi : x) s += xi;
            return lc * std::min(1.0, norm2(e)) * 0.5 * (1.0 + std::tanh(s));
        };
    } else {
        throw ParseError("problem file: unknown jump_weight kind '" + lkind +
                         "' at /coefficients/params/jump_weight/kind");
    }

    // rho
    double rc = p.value("rho", json::object()).value("c", 0.0);
    co.rho = [rc](const Vec& e) { return rc * std::min(1.0, norm2(e)); };

    return co;
}

ControlSet controls_from_json(const json& j, const std::string& key) {
    if (!j.contains(key)) throw ParseError("problem file: missing key at /controls/" + key);
    ControlSet cs;
    cs.label = key;
    for (const json& pt : j[key]) {
        Vec p;
        for (const json& c : pt) p.push_back(c.get<double>());
        cs.points.push_back(std::move(p));
    }
    cs.validate();
    return cs;
}

} // namespace

ProblemSpec problem_from_json(const json& j) {
    for (const char* key : {"dims", "horizon", "coefficients", "controls", "levy"}) {
        if (!j.contains(key)) throw ParseError("problem file: missing key at /" + std::string(key));
    }
    int version = j.value("schema_version", 1);
    if (version != 1) throw ParseError("problem file: unsupported schema_version at /schema_version");

    ProblemSpec spec;
    spec.name = j.value("name", "unnamed");
    const json& dims = j["dims"];
    for (const char* key : {"state", "brownian", "mark"}) {
        if (!dims.contains(key)) throw ParseError("problem file: missing key at /dims/" + std::string(key));
    }
    spec.state_dim = dims["state"].get<int>();
    spec.brownian_dim = dims["brownian"].get<int>();
    int mark_dim = dims["mark"].get<int>();
    if (spec.state_dim < 1 || spec.brownian_dim < 1 || mark_dim < 1)
        throw ParseError("problem file: dims must be positive at /dims");
    spec.horizon = j["horizon"].get<double>();
    if (!(spec.horizon > 0.0)) throw ParseError("problem file: horizon must be > 0 at /horizon");

    const json& levy = j["levy"];
    if (!levy.contains("atoms")) throw ParseError("problem file: missing key at /levy/atoms");
    for (const json& a : levy["atoms"]) {
        LevyAtom atom;
        atom.mark = vec_from_json(a.at("mark"), "/levy/atoms/mark", mark_dim);
        atom.rate = a.at("rate").get<double>();
        spec.levy.atoms.push_back(std::move(atom));
    }
    spec.levy.validate();

    spec.u_set = controls_from_json(j["controls"], "U");
    spec.v_set = controls_from_json(j["controls"], "V");

    const json& coeff = j["coefficients"];
    std::string family = coeff.value("family", "");
    Dims dd{spec.state_dim, spec.brownian_dim, mark_dim, static_cast<int>(spec.u_set.points[0].size()),
            static_cast<int>(spec.v_set.points[0].size())};
    if (family == "parametric") {
        spec.coefficients = build_parametric(coeff, dd);
    } else {
        throw ConfigError("problem file: unknown coefficient family '" + family + "' at /coefficients/family");
    }
    spec.validate_dimensions();
    return spec;
}

ProblemSpec parse_problem(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open problem file: " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ParseError(std::string("problem file: invalid JSON: ") + e.what());
    }
    return problem_from_json(j);
}

json serialize_problem(const ProblemSpec& spec) {
    if (spec.coefficients.family.is_null() || spec.coefficients.family.empty())
        throw ConfigError("serialize_problem: coefficients were built from in-process callables");
    json j;
    j["schema_version"] = 1;
    j["name"] = spec.name;
    j["dims"] = {{"state", spec.state_dim},
                 {"brownian", spec.brownian_dim},
                 {"mark", spec.levy.mark_dim()}};
    j["horizon"] = spec.horizon;
    j["coefficients"] = spec.coefficients.family;
    json us = json::array(), vs = json::array();
    for (const Vec& p : spec.u_set.points) us.push_back(p);
    for (const Vec& p : spec.v_set.points) vs.push_back(p);
    j["controls"] = {{"U", us}, {"V", vs}};
    json atoms = json::array();
    for (const auto& a : spec.levy.atoms) atoms.push_back({{"mark", a.mark}, {"rate", a.rate}});
    j["levy"] = {{"atoms", atoms}};
    return j;
}

// ---------------------------------------------------------------------------
// scenario registry
// ---------------------------------------------------------------------------

namespace {

json scenario_json(const std::string& name) {
    auto controls = [](std::initializer_list<double> pts) {
        json arr = json::array();
        for (double p : pts) arr.push_back(json::array({p}));
        return arr;
    };
    json j;
    j["schema_version"] = 1;
    j["name"] = name;
    j["dims"] = {{"state", 1}, {"brownian", 1}, {"mark", 1}};
    j["horizon"] = 1.0;

    if (name == "zero_dynamics") {
        j["coefficients"] = {{"family", "parametric"},
                             {"lipschitz_C", 1.0},
                             {"params",
                              {{"drift", {{"kind", "affine"}}},
                               {"sigma", {{"kind", "constant"}}},
                               {"gamma", {{"kind", "linear_mark"}}},
                               {"driver", {{"kind", "affine"}}},
                               {"terminal", {{"kind", "linear"}, {"w", json::array({1.0})}, {"c", 0.0}}},
                               {"jump_weight", {{"kind", "wedge"}, {"c", 0.0}}},
                               {"rho", {{"c", 0.0}}}}}};
        j["controls"] = {{"U", controls({-1.0, 0.0, 1.0})}, {"V", controls({-1.0, 0.0, 1.0})}};
        j["levy"] = {{"atoms", json::array()}};
    } else if (name == "separated_drift") {
        j["coefficients"] = {
            {"family", "parametric"},
            {"lipschitz_C", 1.0},
            {"params",
             {{"drift",
               {{"kind", "affine"},
                {"Bu", json::array({json::array({1.0})})},
                {"Bv", json::array({json::array({-1.0})})}}},
              {"sigma", {{"kind", "constant"}, {"S0", json::array({json::array({0.3})})}}},
              {"gamma", {{"kind", "linear_mark"}, {"G", json::array({json::array({0.2})})}}},
              {"driver", {{"kind", "affine"}}},
              {"terminal", {{"kind", "linear"}, {"w", json::array({1.0})}, {"c", 0.0}}},
              {"jump_weight", {{"kind", "wedge"}, {"c", 0.5}}},
              {"rho", {{"c", 0.25}}}}}};
        j["controls"] = {{"U", controls({-1.0, -0.5, 0.0, 0.5, 1.0})},
                         {"V", controls({-1.0, -0.5, 0.0, 0.5, 1.0})}};
        j["levy"] = {{"atoms", json::array({{{"mark", json::array({1.0})}, {"rate", 1.0}}})}};
    } else if (name == "bilinear_gap") {
        j["coefficients"] = {
            {"family", "parametric"},
            {"lipschitz_C", 1.0},
            {"params",
             {{"drift", {{"kind", "bilinear"}, {"c", json::array({1.0})}}},
              {"sigma", {{"kind", "constant"}, {"S0", json::array({json::array({0.3})})}}},
              {"gamma", {{"kind", "linear_mark"}, {"G", json::array({json::array({0.1})})}}},
              {"driver", {{"kind", "affine"}}},
              {"terminal", {{"kind", "linear"}, {"w", json::array({1.0})}, {"c", 0.0}}},
              {"jump_weight", {{"kind", "wedge"}, {"c", 0.5}}},
              {"rho", {{"c", 0.15}}}}}};
        j["controls"] = {{"U", controls({-1.0, 1.0})}, {"V", controls({-1.0, 1.0})}};
        j["levy"] = {{"atoms", json::array({{{"mark", json::array({1.0})}, {"rate", 1.0}}})}};
    } else if (name == "jump_heavy") {
        j["coefficients"] = {
            {"family", "parametric"},
            {"lipschitz_C", 1.5},
            {"params",
             {{"drift",
               {{"kind", "affine"},
                {"Bu", json::array({json::array({1.0})})},
                {"Bv", json::array({json::array({-1.0})})}}},
              {"sigma", {{"kind", "constant"}, {"S0", json::array({json::array({0.2})})}}},
              {"gamma", {{"kind", "linear_mark"}, {"G", json::array({json::array({1.0})})}}},
              {"driver", {{"kind", "affine"}}},
              {"terminal", {{"kind", "abs"}, {"x0", json::array({0.0})}, {"scale", 1.0}}},
              {"jump_weight", {{"kind", "wedge"}, {"c", 0.5}}},
              {"rho", {{"c", 1.0}}}}}};
        j["controls"] = {{"U", controls({-1.0, 0.0, 1.0})}, {"V", controls({-1.0, 0.0, 1.0})}};
        j["levy"] = {{"atoms", json::array({{{"mark", json::array({0.4})}, {"rate", 2.5}},
                                            {{"mark", json::array({-0.25})}, {"rate", 2.0}}})}};
    } else if (name == "driver_coupled") {
        j["coefficients"] = {
            {"family", "parametric"},
            {"lipschitz_C", 1.0},
            {"params",
             {{"drift",
               {{"kind", "affine"},
                {"Bu", json::array({json::array({0.5})})},
                {"Bv", json::array({json::array({-0.5})})}}},
              {"sigma", {{"kind", "constant"}, {"S0", json::array({json::array({0.3})})}}},
              {"gamma", {{"kind", "linear_mark"}, {"G", json::array({json::array({0.2})})}}},
              {"driver",
               {{"kind", "affine"},
                {"a0", 0.1},
                {"ay", 0.3},
                {"az", json::array({0.2})},
                {"ak", 0.4},
                {"au", json::array({0.2})},
                {"av", json::array({-0.2})}}},
              {"terminal", {{"kind", "linear"}, {"w", json::array({1.0})}, {"c", 0.0}}},
              {"jump_weight", {{"kind", "wedge"}, {"c", 0.5}}},
              {"rho", {{"c", 0.25}}}}}};
        j["controls"] = {{"U", controls({-1.0, 0.0, 1.0})}, {"V", controls({-1.0, 0.0, 1.0})}};
        j["levy"] = {{"atoms", json::array({{{"mark", json::array({1.0})}, {"rate", 1.0}}})}};
    } else {
        throw ConfigError("unknown scenario '" + name + "'");
    }
    return j;
}

} // namespace

std::vector<std::string> scenario_names() {
    return {"zero_dynamics", "separated_drift", "bilinear_gap", "jump_heavy", "driver_coupled"};
}

ProblemSpec make_scenario(const std::string& name) { return problem_from_json(scenario_json(name)); }

ProblemSpec load_problem(const std::string& name_or_path) {
    auto names = scenario_names();
    if (std::find(names.begin(), names.end(), name_or_path) != names.end())
        return make_scenario(name_or_path);
    return parse_problem(name_or_path);
}

} // namespace sdg
