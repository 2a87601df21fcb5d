#include "hk/cli.hpp"

#include <algorithm>
#include <chrono>
#include <set>

namespace hk::cli {

using nlohmann::json;

int exit_code(ErrorKind k) {
    switch (k) {
        case ErrorKind::ParseError:
            return kParse;
        case ErrorKind::NotCharge4:
        case ErrorKind::DependsOnZPlus:
        case ErrorKind::NonzeroAtOrigin:
        case ErrorKind::InvalidPrepotential:
        case ErrorKind::ChargeMismatch:
        case ErrorKind::BadDimensions:
            return kValidation;
        case ErrorKind::NotClosed:
        case ErrorKind::NonzeroTorsion:
        case ErrorKind::RouteMismatch:
        case ErrorKind::ShapeMismatch:
            return kResidual;
        default:
            return kNumeric;
    }
}

namespace {

Error schema(const std::string& where, const std::string& what) {
    return Error(ErrorKind::ParseError, "schema: " + where + ": " + what);
}

void allow_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
    if (!j.is_object()) throw schema(where, "expected an object");
    for (const auto& [k, v] : j.items()) {
        if (k == "zplus_exponents") throw schema(where, "z+ exponents are not allowed in a prepotential");
        if (std::none_of(keys.begin(), keys.end(), [&](const char* s) { return k == s; }))
            throw schema(where, "unknown key '" + k + "'");
    }
}

int get_int(const json& j, const std::string& where, long lo, long hi) {
    if (!j.is_number_integer()) throw schema(where, "expected an integer");
    long v = j.get<long>();
    if (v < lo || v > hi) throw schema(where, "out of range [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return int(v);
}

double get_positive(const json& j, const std::string& where) {
    if (!j.is_number()) throw schema(where, "expected a number");
    double v = j.get<double>();
    if (!(v > 0.0)) throw schema(where, "must be positive");
    return v;
}

mpz_class big_int(const json& j, const std::string& where) {
    if (j.is_number_integer()) return mpz_class(j.get<long>());
    if (j.is_string()) {
        mpz_class z;
        if (z.set_str(j.get<std::string>(), 10) != 0) throw schema(where, "not a decimal integer");
        return z;
    }
    throw schema(where, "expected an integer or a decimal string");
}

json big_json(const mpz_class& z) {
    if (z.fits_slong_p()) return z.get_si();
    return z.get_str();
}

std::string line_col(const std::string& text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

json error_json(const Error& e) { return {{"kind", error_name(e.kind())}, {"message", e.what()}}; }

template <class S>
json coeff_json(const S& c) {
    if constexpr (std::is_same_v<S, GaussQ>)
        return exact_json(c);
    else
        return json::array({c.real(), c.imag()});
}

template <class S>
json series_json(const SeriesT<S>& s) {
    json a = json::array();
    for (const auto& [k, h] : s.terms())
        for (const auto& [uk, c] : h.terms()) {
            json z = json::array();
            for (int i = 0; i < s.nvars(); ++i) z.push_back(zexp(k, i));
            auto u = uexp(uk);
            a.push_back({{"z", z}, {"u", {u[0], u[1], u[2], u[3]}}, {"c", coeff_json(c)}});
        }
    return a;
}

json residual_json(const ResidualReport& r) {
    json a = json::array();
    for (const auto& e : r.entries)
        a.push_back({{"family", e.family},
                     {"max_residual", e.max_residual},
                     {"valid_order", std::min(e.valid_order, kExactOrder)},
                     {"exact_zero", e.exact_zero}});
    return a;
}

json matrix_json(const Eigen::MatrixXd& m) {
    json a = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        a.push_back(row);
    }
    return a;
}

json vector_json(const Eigen::VectorXd& v) {
    json a = json::array();
    for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

JobSpec effective(const std::string& text, const RunOptions& opt) {
    JobSpec job = parse_job(text);
    if (opt.order) {
        if (*opt.order < 1 || *opt.order > 15) throw schema("--order", "out of range [1, 15]");
        job.order = *opt.order;
    }
    if (opt.backend) {
        if (*opt.backend != "exact" && *opt.backend != "float") throw schema("--backend", "expected exact or float");
        job.backend = *opt.backend;
    }
    if (opt.seed) job.seed = *opt.seed;
    return job;
}

int max_term_degree(const JobSpec& job) {
    int m = 0;
    for (const auto& t : job.terms) {
        int s = 0;
        for (int e : t.zminus) s += e;
        m = std::max(m, s);
    }
    return m;
}

class Clock {
public:
    explicit Clock(bool on) : on_(on), t_(std::chrono::steady_clock::now()) {}
    void lap(json& report, const char* name) {
        if (!on_) return;
        auto now = std::chrono::steady_clock::now();
        report["timings"][name] = std::chrono::duration<double>(now - t_).count();
        t_ = now;
    }

private:
    bool on_;
    std::chrono::steady_clock::time_point t_;
};

template <class S>
struct Pipeline {
    Dims d;
    PAlgebra P;
    PrepotentialT<S> L;
    FrameFieldT<S> Hpp;
    BridgeT<S> B;
    HKFrameT<S> F;

    Pipeline(const JobSpec& job) : d(job.dims), P(job.dims) {
        L = validate_prepotential(prepotential_series<S>(job), d);
        Hpp = build_Hpp(P, L);
        B = solve_bridge(P, L);
        F = build_frame(P, L, B, Hpp);
    }
};

ChartOptions chart_options(const JobSpec& job) {
    ChartOptions o;
    o.radius = job.radius;
    o.steps = job.steps;
    o.points = job.sample_points;
    o.seed = job.seed;
    return o;
}

constexpr double kGeomTol = 1e-8;

json metric_json(const ManifoldChart& C, const MetricSample& s, bool reality_ok, int transversal_rank) {
    const auto expect = std::make_pair(4 * C.d.p, 4 * C.d.q);
    bool ok = s.route_diff <= kGeomTol && s.tangency <= kGeomTol && s.section_diff <= kGeomTol &&
              s.asym_max <= kGeomTol && s.imag_max <= kGeomTol && s.signature == expect && reality_ok;
    return {{"x", vector_json(s.x)},
            {"g", matrix_json(s.g)},
            {"signature", {s.signature.first, s.signature.second}},
            {"flat_error", (s.g - flat_metric(C.d)).cwiseAbs().maxCoeff()},
            {"asym_max", s.asym_max},
            {"imag_max", s.imag_max},
            {"route_diff", s.route_diff},
            {"section_diff", s.section_diff},
            {"tangency", s.tangency},
            {"vertical_defect", s.vertical_defect},
            {"transversal_rank", transversal_rank},
            {"reality_ok", reality_ok},
            {"ok", ok}};
}

// Samples the chart at xs; returns true when every point passes.
bool metric_section(const ManifoldChart& C, const std::vector<Eigen::VectorXd>& xs, json& out) {
    std::vector<MetricSample> ms(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) ms[i] = evaluate_metric(C, xs[i]);
    RealityReport rr = reality_report(C, xs, kGeomTol);
    bool all = true;
    out = json::array();
    for (std::size_t i = 0; i < xs.size(); ++i) {
        json m = metric_json(C, ms[i], rr.points[i].ok, rr.points[i].transversal_rank);
        all = all && m["ok"].get<bool>();
        out.push_back(m);
    }
    return all;
}

template <class S>
Outcome run_build(const JobSpec& job, const RunOptions& opt) {
    Outcome out;
    json& r = out.report;
    Clock clock(opt.timings);
    r["command"] = "build";
    r["job"] = job_to_json(job);
    r["warnings"] = json::array();
    if (max_term_degree(job) > job.order)
        r["warnings"].push_back("prepotential terms above order " + std::to_string(job.order) +
                                " are dropped; curvature not resolvable at this order");

    Pipeline<S> pl(job);
    clock.lap(r, "frame");
    const double tol = std::is_same_v<S, GaussQ> ? 0.0 : 1e-9;

    ResidualReport br = bridge_residuals(pl.P, pl.L, pl.B);
    ResidualReport ax = check_hk_axioms(pl.P, pl.F);
    ResidualReport po = check_potentials_identities(pl.P, pl.F);
    bool res_ok = br.ok(tol) && ax.ok(tol) && po.ok(tol);
    r["residuals"] = {{"bridge", residual_json(br)}, {"axioms", residual_json(ax)}, {"potentials", residual_json(po)}};
    clock.lap(r, "residuals");

    auto cr = check_canonical(pl.P, pl.F);
    r["canonical"] = {{"H0_flat", cr.H0_flat},
                      {"E_flat", cr.E_flat},
                      {"ep_flat", cr.ep_flat},
                      {"Hpp_shape", cr.Hpp_shape},
                      {"Hmm_shape", cr.Hmm_shape},
                      {"em_shape", cr.em_shape},
                      {"vpp_vanishes_on_slice", cr.vpp_vanishes_on_slice},
                      {"vm_minus_zero", cr.vm_minus_zero},
                      {"canonical", cr.canonical()}};
    res_ok = res_ok && cr.canonical();
    json vp = json::array();
    for (const auto& v : cr.v_potential) vp.push_back(series_json(v));
    r["v_potential"] = vp;
    json phi = json::array();
    for (const auto& s : pl.B.phi_ia) phi.push_back(series_json(s));
    r["bridge"] = {{"phi_ia", phi}, {"iterations", pl.B.iterations}, {"psi_available", pl.B.psi_available}};

    auto curv = extract_curvature(pl.P, pl.F);
    json comps = json::array();
    for (int a = 0; a < int(curv.R.size()); ++a)
        for (int b = 0; b < int(curv.R[a].size()); ++b)
            for (int A = 0; A < int(curv.R[a][b].size()); ++A)
                if (!curv.R[a][b][A].is_zero())
                    comps.push_back({{"a", a}, {"b", b}, {"A", A}, {"series", series_json(curv.R[a][b][A])}});
    double sym = curvature_symmetry_residual(pl.P, curv);
    r["curvature"] = {{"components", comps},
                      {"valid_order", std::min(curv.valid, kExactOrder)},
                      {"symmetry_residual", sym}};
    res_ok = res_ok && sym <= tol;
    clock.lap(r, "curvature");

    bool geom_ok = true;
    if (!opt.skip_geometry) {
        ManifoldChart C = integrate_manifold(pl.F, pl.B, chart_options(job));
        r["chart"] = {{"rank_at_origin", C.rank_at_origin},
                      {"samples", int(C.samples.size())},
                      {"closure_defect", C.closure_defect}};
        std::vector<Eigen::VectorXd> xs;
        for (const auto& p : C.points) xs.push_back(p.x);
        json ms;
        geom_ok = metric_section(C, xs, ms);
        r["metric"] = ms;
        json ric = json::array();
        auto rx = chart_sample(4 * pl.d.n, 4, std::min(0.05, job.radius / 2), job.seed + 1);
        for (int i = 1; i < int(rx.size()); ++i) {
            Eigen::MatrixXd R = ricci_fd(C, rx[i], 1e-3);
            double mx = R.cwiseAbs().maxCoeff();
            ric.push_back({{"x", vector_json(rx[i])}, {"max_abs", mx}, {"ok", mx < 1e-3}});
            geom_ok = geom_ok && mx < 1e-3;
        }
        r["ricci"] = ric;
        clock.lap(r, "geometry");
    }
    r["residuals_ok"] = res_ok;
    r["geometry_ok"] = geom_ok;
    r["ok"] = res_ok && geom_ok;
    out.code = r["ok"].get<bool>() ? kOk : kResidual;
    return out;
}

template <class S>
Outcome run_roundtrip(const JobSpec& job, const RunOptions& opt) {
    Outcome out;
    json& r = out.report;
    r["command"] = "roundtrip";
    r["job"] = job_to_json(job);
    Pipeline<S> pl(job);
    if (opt.corrupt)
        for (int a = 0; a < 2 * pl.d.n; ++a) {
            const int l = ix_em(pl.d, a);
            pl.F.Hpp.set(l, pl.F.Hpp.coeff(l).scaled(Field<S>::from_int(2)));
        }
    PrepotentialT<S> back = extract_prepotential(pl.P, pl.F);
    const double tol = std::is_same_v<S, GaussQ> ? 0.0 : 1e-9;
    const int D = job.order;
    std::set<ZKey> keys;
    for (const auto& [k, h] : pl.L.L.terms()) keys.insert(k);
    for (const auto& [k, h] : back.L.terms()) keys.insert(k);
    json bad = json::array();
    for (ZKey k : keys) {
        if (zdegree(k, 4 * pl.d.n) > D) continue;
        HarmonicPolyT<S> a = pl.L.L.coeff(k), b = back.L.coeff(k);
        HarmonicPolyT<S> diff = a - b;
        bool same = tol == 0.0 ? diff.is_zero() : diff.chopped(tol).is_zero();
        if (same) continue;
        json z = json::array();
        for (int i = 0; i < 4 * pl.d.n; ++i) z.push_back(zexp(k, i));
        bad.push_back({{"z", z}, {"expected", series_json(SeriesT<S>::term(pl.d.n, D, k, a))},
                       {"got", series_json(SeriesT<S>::term(pl.d.n, D, k, b))}});
    }
    r["extracted"] = series_json(back.L);
    r["mismatches"] = bad;
    r["equal"] = bad.empty();
    out.code = bad.empty() ? kOk : kResidual;
    return out;
}

template <class S>
Outcome run_metric(const JobSpec& job, const RunOptions& opt) {
    Outcome out;
    json& r = out.report;
    r["command"] = "metric";
    r["job"] = job_to_json(job);
    Pipeline<S> pl(job);
    ManifoldChart C = integrate_manifold(pl.F, pl.B, chart_options(job));
    std::vector<Eigen::VectorXd> xs;
    if (opt.points) {
        xs = *opt.points;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            if (xs[i].size() != 4 * pl.d.n)
                throw schema("points[" + std::to_string(i) + "]", "expected " + std::to_string(4 * pl.d.n) + " coordinates");
            if (xs[i].norm() > job.radius * (1.0 + 1e-12))
                throw Error(ErrorKind::OutOfChart, "points[" + std::to_string(i) + "] lies outside the chart radius");
        }
    } else {
        for (const auto& p : C.points) xs.push_back(p.x);
    }
    json ms;
    bool ok = metric_section(C, xs, ms);
    r["metric"] = ms;
    r["ok"] = ok;
    out.code = ok ? kOk : kResidual;
    return out;
}

template <class F>
Outcome guarded(F&& f) {
    try {
        return f();
    } catch (const Error& e) {
        Outcome o;
        o.code = exit_code(e.kind());
        o.report["error"] = error_json(e);
        o.report["ok"] = false;
        return o;
    }
}

}  // namespace

nlohmann::json exact_json(const GaussQ& q) {
    return json::array({big_json(q.re.get_num()), big_json(q.re.get_den()), big_json(q.im.get_num()),
                        big_json(q.im.get_den())});
}

GaussQ exact_from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != 4) throw schema("coeff", "expected [re_num, re_den, im_num, im_den]");
    mpz_class v[4];
    for (int i = 0; i < 4; ++i) v[i] = big_int(j[i], "coeff[" + std::to_string(i) + "]");
    if (v[1] == 0 || v[3] == 0) throw schema("coeff", "zero denominator");
    return GaussQ(mpq_class(v[0], v[1]), mpq_class(v[2], v[3]));
}

JobSpec parse_job(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::ParseError, line_col(text, e.byte) + ": " + e.what());
    }
    allow_keys(j, "job", {"dims", "order", "prepotential", "chart", "sample_points", "backend", "seed"});
    JobSpec job;
    if (!j.contains("dims")) throw schema("job", "missing 'dims'");
    allow_keys(j["dims"], "dims", {"n", "p", "q"});
    int n = get_int(j["dims"].value("n", json()), "dims.n", 1, 3);
    int p = get_int(j["dims"].value("p", json(n)), "dims.p", 0, n);
    int q = get_int(j["dims"].value("q", json(n - p)), "dims.q", 0, n);
    if (p + q != n) throw schema("dims", "p + q must equal n");
    job.dims = Dims(n, p, q);
    if (j.contains("order")) job.order = get_int(j["order"], "order", 1, 15);
    if (j.contains("prepotential")) {
        const json& terms = j["prepotential"];
        if (!terms.is_array()) throw schema("prepotential", "expected an array of terms");
        for (std::size_t t = 0; t < terms.size(); ++t) {
            const std::string where = "prepotential[" + std::to_string(t) + "]";
            allow_keys(terms[t], where, {"coeff", "u_exponents", "zminus_exponents"});
            TermSpec ts;
            if (!terms[t].contains("coeff")) throw schema(where, "missing 'coeff'");
            ts.coeff = exact_from_json(terms[t]["coeff"]);
            const json& u = terms[t].value("u_exponents", json::array({0, 0, 0, 0}));
            if (!u.is_array() || u.size() != 4) throw schema(where + ".u_exponents", "expected 4 integers");
            for (int i = 0; i < 4; ++i) ts.u[i] = get_int(u[i], where + ".u_exponents", 0, 64);
            if (!terms[t].contains("zminus_exponents")) throw schema(where, "missing 'zminus_exponents'");
            const json& z = terms[t]["zminus_exponents"];
            if (!z.is_array() || int(z.size()) != 2 * n)
                throw schema(where + ".zminus_exponents", "expected " + std::to_string(2 * n) + " integers");
            for (int a = 0; a < 2 * n; ++a) ts.zminus.push_back(get_int(z[a], where + ".zminus_exponents", 0, 15));
            job.terms.push_back(ts);
        }
    }
    if (j.contains("chart")) {
        allow_keys(j["chart"], "chart", {"radius", "steps"});
        if (j["chart"].contains("radius")) job.radius = get_positive(j["chart"]["radius"], "chart.radius");
        if (j["chart"].contains("steps")) job.steps = get_int(j["chart"]["steps"], "chart.steps", 1, 100000);
    }
    if (j.contains("sample_points")) job.sample_points = get_int(j["sample_points"], "sample_points", 1, 10000);
    if (j.contains("backend")) {
        if (!j["backend"].is_string()) throw schema("backend", "expected a string");
        job.backend = j["backend"].get<std::string>();
        if (job.backend != "exact" && job.backend != "float") throw schema("backend", "expected exact or float");
    }
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned()) throw schema("seed", "expected a non-negative integer");
        job.seed = j["seed"].get<std::uint64_t>();
    }
    return job;
}

nlohmann::json job_to_json(const JobSpec& job) {
    json terms = json::array();
    for (const auto& t : job.terms)
        terms.push_back({{"coeff", exact_json(t.coeff)},
                         {"u_exponents", {t.u[0], t.u[1], t.u[2], t.u[3]}},
                         {"zminus_exponents", t.zminus}});
    return {{"dims", {{"n", job.dims.n}, {"p", job.dims.p}, {"q", job.dims.q}}},
            {"order", job.order},
            {"prepotential", terms},
            {"chart", {{"radius", job.radius}, {"steps", job.steps}}},
            {"sample_points", job.sample_points},
            {"backend", job.backend},
            {"seed", job.seed}};
}

template <class S>
SeriesT<S> prepotential_series(const JobSpec& job) {
    const int n = job.dims.n;
    SeriesT<S> L = SeriesT<S>::zero(n, job.order, 4);
    for (std::size_t i = 0; i < job.terms.size(); ++i) {
        const TermSpec& t = job.terms[i];
        ZKey k = 0;
        int deg = 0;
        for (int a = 0; a < 2 * n; ++a) {
            k += ZKey(t.zminus[a]) * zunit(2 * n + a);
            deg += t.zminus[a];
        }
        const int charge = t.u[0] + t.u[1] - t.u[2] - t.u[3] + deg;
        if (charge != 4)
            throw Error(ErrorKind::NotCharge4, "prepotential[" + std::to_string(i) + "] has charge " + std::to_string(charge));
        if (deg > job.order) continue;
        L.add_term(k, HarmonicPolyT<S>::monomial(t.u[0], t.u[1], t.u[2], t.u[3], convert_scalar<S>(t.coeff)));
    }
    return L;
}

template SeriesT<GaussQ> prepotential_series(const JobSpec&);
template SeriesT<cplx> prepotential_series(const JobSpec&);

Outcome cmd_validate(const std::string& text, const RunOptions& opt) {
    return guarded([&] {
        JobSpec job = effective(text, opt);
        validate_prepotential(prepotential_series<GaussQ>(job), job.dims);
        Outcome o;
        o.report = {{"command", "validate"}, {"job", job_to_json(job)}, {"ok", true}};
        return o;
    });
}

Outcome cmd_build(const std::string& text, const RunOptions& opt) {
    return guarded([&] {
        JobSpec job = effective(text, opt);
        return job.backend == "exact" ? run_build<GaussQ>(job, opt) : run_build<cplx>(job, opt);
    });
}

Outcome cmd_roundtrip(const std::string& text, const RunOptions& opt) {
    return guarded([&] {
        JobSpec job = effective(text, opt);
        return job.backend == "exact" ? run_roundtrip<GaussQ>(job, opt) : run_roundtrip<cplx>(job, opt);
    });
}

Outcome cmd_metric(const std::string& text, const RunOptions& opt) {
    return guarded([&] {
        JobSpec job = effective(text, opt);
        return job.backend == "exact" ? run_metric<GaussQ>(job, opt) : run_metric<cplx>(job, opt);
    });
}

Outcome cmd_flat_test(const std::vector<Dims>& dims, int order, int points, std::uint64_t seed) {
    return guarded([&] {
        Outcome o;
        json runs = json::array();
        bool all = true;
        for (const Dims& d : dims) {
            JobSpec job;
            job.dims = d;
            job.order = order;
            job.sample_points = points;
            job.seed = seed;
            Pipeline<GaussQ> pl(job);
            HKFrame flat = flat_frame<GaussQ>(d, order);
            bool frame_flat = true;
            for (int l = 0; l < d.dim_p(); ++l)
                frame_flat = frame_flat && (pl.F.field(l) - flat.field(l)).is_zero_upto(order);
            ManifoldChart C = integrate_manifold(pl.F, pl.B, chart_options(job));
            double err = 0.0;
            for (const auto& p : C.points) err = std::max(err, (metric_at(C, p.x).g - flat_metric(d)).cwiseAbs().maxCoeff());
            bool ok = frame_flat && err < 1e-10;
            all = all && ok;
            runs.push_back({{"dims", {{"n", d.n}, {"p", d.p}, {"q", d.q}}},
                            {"frame_flat", frame_flat},
                            {"points", int(C.points.size())},
                            {"max_error", err},
                            {"ok", ok}});
        }
        o.report = {{"command", "flat-test"}, {"order", order}, {"seed", seed}, {"runs", runs}, {"ok", all}};
        o.code = all ? kOk : kResidual;
        return o;
    });
}

std::vector<Eigen::VectorXd> parse_points(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::ParseError, line_col(text, e.byte) + ": " + e.what());
    }
    if (!j.is_array()) throw schema("points", "expected an array of coordinate arrays");
    std::vector<Eigen::VectorXd> r;
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_array()) throw schema("points[" + std::to_string(i) + "]", "expected an array");
        Eigen::VectorXd x(j[i].size());
        for (std::size_t k = 0; k < j[i].size(); ++k) {
            if (!j[i][k].is_number()) throw schema("points[" + std::to_string(i) + "]", "expected numbers");
            x(k) = j[i][k].get<double>();
        }
        r.push_back(x);
    }
    return r;
}

}  // namespace hk::cli
