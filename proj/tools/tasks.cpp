#include "tasks.hpp"

#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <thread>

#include "cusp/counting.hpp"
#include "cusp/modes.hpp"
#include "cusp/scattering.hpp"

namespace cusp::cli {

namespace {

using json = nlohmann::ordered_json;

struct Row {
    std::vector<std::string> cells;
    json meta = json::object();
    bool accuracy_failure = false;
};

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body)
{
    const std::size_t T = std::min<std::size_t>(std::max(threads, 1), std::max<std::size_t>(count, 1));
    if (T <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < T; ++t)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) body(i);
        });
    for (auto& th : pool) th.join();
}

std::string fd(double v) { return format_double(v); }
std::string fi(long long v) { return std::to_string(v); }

json kernel_meta(const KernelResult& k)
{
    json j;
    j["method"] = k.method;
    j["M"] = k.M;
    j["V"] = k.V;
    j["N"] = k.N;
    j["t_max"] = k.t_max;
    j["nodes"] = k.nodes;
    j["modes"] = k.modes;
    j["quad_error"] = k.quad_error;
    j["tail"] = k.tail;
    j["error_bound"] = k.error_bound;
    j["warnings"] = k.warnings;
    return j;
}

std::vector<std::string> point_header(const CuspModel& model, const std::string& suffix)
{
    std::vector<std::string> h = {"x" + suffix};
    for (int i = 0; i < model.fibre_dim(); ++i) h.push_back("y" + std::to_string(i + 1) + suffix);
    for (int i = 0; i < model.k(); ++i) h.push_back("z" + std::to_string(i + 1) + suffix);
    return h;
}

void push_point(std::vector<std::string>& row, const HPoint& p)
{
    row.push_back(fd(p.x));
    for (double v : p.y) row.push_back(fd(v));
    for (double v : p.z) row.push_back(fd(v));
}

// Evaluates f and turns library errors into a status string.
template <class F>
std::string guarded(F&& f, json& meta, bool& accuracy_failure)
{
    try {
        f();
        return "ok";
    } catch (const AccuracyError& e) {
        accuracy_failure = true;
        meta["error"] = e.what();
        meta["partial_re"] = e.partial().real();
        meta["partial_im"] = e.partial().imag();
        meta["estimate"] = e.estimate();
        return "accuracy_error";
    } catch (const PoleError& e) {
        meta["error"] = e.what();
        return "pole";
    } catch (const CapabilityError& e) {
        meta["error"] = e.what();
        return "unsupported";
    } catch (const ConditioningError& e) {
        meta["error"] = e.what();
        return "ill_conditioned";
    } catch (const std::exception& e) {
        meta["error"] = e.what();
        return "input_error";
    }
}

Table finish(std::vector<std::string> header, std::vector<Row> rows)
{
    Table t;
    t.header = std::move(header);
    for (auto& r : rows) {
        t.rows.push_back(std::move(r.cells));
        t.meta.push_back(std::move(r.meta));
        t.accuracy_failure = t.accuracy_failure || r.accuracy_failure;
    }
    return t;
}

Table task_modes(const RunConfig& cfg, const CuspModel& model)
{
    std::vector<std::string> h = {"m"};
    for (int l = 0; l < model.blocks(); ++l) h.push_back("c" + std::to_string(l + 1));
    for (int j = 0; j < model.k(); ++j) h.push_back("vstar" + std::to_string(j + 1));
    for (const char* c : {"mult", "b", "nu"}) h.push_back(c);
    std::vector<Row> rows;
    for (const auto& I : enumerate_modes(model, cfg.max_m, cfg.max_v)) {
        Row r;
        r.cells.push_back(fi(I.m));
        for (long c : I.c) r.cells.push_back(fi(c));
        for (long v : I.vstar) r.cells.push_back(fi(v));
        r.cells.push_back(fi(I.mult));
        r.cells.push_back(fd(I.b));
        r.cells.push_back(fd(I.nu));
        rows.push_back(std::move(r));
    }
    return finish(h, std::move(rows));
}

Table task_thresholds(const RunConfig& cfg, const CuspModel& model)
{
    std::vector<Row> rows;
    for (int M = 1; M <= std::max(cfg.max_m, 1); ++M) {
        Row r;
        r.cells = {fi(M), fi(std::max(cfg.max_v, 1)), fd(threshold_infimum(model, M, std::max(cfg.max_v, 1)))};
        rows.push_back(std::move(r));
    }
    return finish({"M", "V", "b_min"}, std::move(rows));
}

std::vector<std::string> resolvent_header(const CuspModel& model)
{
    std::vector<std::string> h = {"re_s", "im_s"};
    for (auto& c : point_header(model, "")) h.push_back(c);
    for (auto& c : point_header(model, "'")) h.push_back(c);
    for (const char* c : {"method", "re_val", "im_val", "err_bound", "M", "V", "N", "t_max", "status"}) h.push_back(c);
    return h;
}

Row kernel_row(const CuspModel& model, const RunConfig& cfg, cplx s, const PointPair& p, const std::string& method)
{
    Row r;
    KernelResult k;
    k.method = method;
    std::string status = guarded(
        [&] {
            k = method == "images" ? images_kernel(model, s, p.a, p.b, cfg.policy.N)
                                   : cusp_kernel(model, s, p.a, p.b, cfg.policy);
        },
        r.meta, r.accuracy_failure);
    r.cells = {fd(s.real()), fd(s.imag())};
    push_point(r.cells, p.a);
    push_point(r.cells, p.b);
    for (auto& c : std::vector<std::string>{method, fd(k.value.real()), fd(k.value.imag()), fd(k.error_bound),
                                            fi(k.M), fi(k.V), fi(k.N), fd(k.t_max), status})
        r.cells.push_back(c);
    json km = kernel_meta(k);
    km["re_val"] = k.value.real();
    km["im_val"] = k.value.imag();
    for (auto& [key, v] : r.meta.items()) km[key] = v;
    r.meta = km;
    r.meta["status"] = status;
    return r;
}

Table task_resolvent(const RunConfig& cfg, const CuspModel& model, bool compare)
{
    struct Job {
        cplx s;
        const PointPair* p;
    };
    std::vector<Job> jobs;
    for (cplx s : cfg.s_values)
        for (const auto& p : cfg.pairs) jobs.push_back({s, &p});
    const std::size_t per = compare ? 2 : 1;
    std::vector<Row> rows(jobs.size() * per);
    parallel_for(rows.size(), cfg.threads, [&](std::size_t i) {
        const Job& j = jobs[i / per];
        std::string method = compare ? (i % 2 == 0 ? "modes" : "images") : cfg.method;
        rows[i] = kernel_row(model, cfg, j.s, *j.p, method);
    });
    auto h = resolvent_header(model);
    if (compare) {
        h.push_back("abs_diff");
        h.push_back("combined_bound");
        h.push_back("agree");
        for (std::size_t i = 0; i < rows.size(); i += 2) {
            cplx a(rows[i].meta["re_val"].get<double>(), rows[i].meta["im_val"].get<double>());
            cplx b(rows[i + 1].meta["re_val"].get<double>(), rows[i + 1].meta["im_val"].get<double>());
            double bound = rows[i].meta["error_bound"].get<double>() + rows[i + 1].meta["error_bound"].get<double>();
            double diff = std::abs(a - b);
            bool ok = rows[i].meta["status"] == "ok" && rows[i + 1].meta["status"] == "ok" && diff <= bound;
            for (std::size_t q = i; q < i + 2; ++q) {
                rows[q].cells.push_back(fd(diff));
                rows[q].cells.push_back(fd(bound));
                rows[q].cells.push_back(ok ? "1" : "0");
            }
        }
    }
    return finish(h, std::move(rows));
}

Table task_scatter(const RunConfig& cfg, const CuspModel& model)
{
    std::vector<std::string> h = {"re_s", "im_s", "m"};
    for (int l = 0; l < model.blocks(); ++l) h.push_back("c" + std::to_string(l + 1));
    for (int j = 0; j < model.k(); ++j) h.push_back("vstar" + std::to_string(j + 1));
    for (const char* c : {"t", "re_mult", "im_mult", "status"}) h.push_back(c);
    auto modes = enumerate_modes(model, cfg.max_m, cfg.max_v);
    struct Job {
        cplx s;
        const ModeIndex* I;
        double t;
    };
    std::vector<Job> jobs;
    for (cplx s : cfg.s_values)
        for (const auto& I : modes)
            for (double t : cfg.t_values) jobs.push_back({s, &I, t});
    std::vector<Row> rows(jobs.size());
    parallel_for(jobs.size(), cfg.threads, [&](std::size_t i) {
        const Job& j = jobs[i];
        Row& r = rows[i];
        ComplexSpectral S(j.s, model.n());
        const double mu = j.t * j.t + j.I->b * j.I->b;
        cplx mult = 0.0;
        std::string status = guarded([&] { mult = scattering_multiplier(S, mu); }, r.meta, r.accuracy_failure);
        if (status == "ok") {
            // Boundary-expansion fit of the mode-level Poisson profile.
            json fit;
            std::string fs = guarded(
                [&] {
                    std::vector<std::pair<double, cplx>> smp;
                    const double x0 = 1e-3 / std::sqrt(mu);
                    for (int q = 0; q < 40; ++q) {
                        double x = x0 * std::pow(10.0, 2.5 * q / 39.0);
                        smp.push_back({x, poisson_mode(S, mu, x)});
                    }
                    auto e = extract_expansion(smp, S, 3);
                    fit["F_minus"] = {e.F_minus.real(), e.F_minus.imag()};
                    fit["F_plus"] = {e.F_plus.real(), e.F_plus.imag()};
                    fit["residual"] = e.residual;
                    fit["F_plus_vs_multiplier"] = std::abs(e.F_plus - mult) / std::abs(mult);
                },
                fit, r.accuracy_failure);
            fit["status"] = fs;
            r.meta["expansion_fit"] = fit;
        }
        r.meta["status"] = status;
        r.cells = {fd(j.s.real()), fd(j.s.imag()), fi(j.I->m)};
        for (long c : j.I->c) r.cells.push_back(fi(c));
        for (long v : j.I->vstar) r.cells.push_back(fi(v));
        for (auto& c : std::vector<std::string>{fd(j.t), fd(mult.real()), fd(mult.imag()), status}) r.cells.push_back(c);
    });
    return finish(h, std::move(rows));
}

Table task_poincare(const RunConfig& cfg, const CuspModel& model)
{
    struct Job {
        std::size_t pair;
        cplx s;
    };
    std::vector<Job> jobs;
    for (std::size_t p = 0; p < cfg.pairs.size(); ++p)
        for (cplx s : cfg.s_values) jobs.push_back({p, s});
    std::vector<Row> rows(jobs.size());
    parallel_for(jobs.size(), cfg.threads, [&](std::size_t i) {
        Row& r = rows[i];
        PoincareSum ps;
        const auto& pp = cfg.pairs[jobs[i].pair];
        std::string status = guarded([&] { ps = poincare_direct(model, jobs[i].s, pp.a, pp.b, cfg.poincare_N); },
                                     r.meta, r.accuracy_failure);
        r.meta["status"] = status;
        r.meta["terms"] = ps.terms;
        r.meta["warnings"] = ps.warnings;
        r.cells = {fi(static_cast<long long>(jobs[i].pair)),
                   fd(jobs[i].s.real()),
                   fd(jobs[i].s.imag()),
                   fd(ps.value.real()),
                   fd(ps.value.imag()),
                   fi(ps.N),
                   fd(ps.tail_bound),
                   status};
    });
    return finish({"pair", "re_s", "im_s", "partial_sum_re", "partial_sum_im", "N", "tail_bound", "status"},
                  std::move(rows));
}

Table task_count(const RunConfig& cfg, const CuspModel& model)
{
    std::vector<Row> rows;
    json fits = json::array();
    bool resource = false;
    for (std::size_t p = 0; p < cfg.pairs.size(); ++p) {
        CountProfile prof;
        json meta;
        bool acc = false;
        std::string status =
            guarded([&] { prof = orbit_count(model, cfg.pairs[p].a, cfg.pairs[p].b, cfg.radii); }, meta, acc);
        if (status != "ok") {
            resource = true;
            Row r;
            r.cells = {fi(static_cast<long long>(p)), "", "", status};
            r.meta = meta;
            rows.push_back(std::move(r));
            continue;
        }
        for (std::size_t i = 0; i < prof.radii.size(); ++i) {
            Row r;
            r.cells = {fi(static_cast<long long>(p)), fd(prof.radii[i]), fi(prof.counts[i]), "ok"};
            rows.push_back(std::move(r));
        }
        json f;
        f["pair"] = p;
        f["window"] = {cfg.fit_lo, cfg.fit_hi};
        try {
            DeltaFit df = delta_fit(prof, cfg.fit_lo, cfg.fit_hi);
            f["delta"] = df.delta;
            f["intercept"] = df.intercept;
            f["r2"] = df.r2;
            f["points"] = df.points;
            f["expected_delta"] = 0.5 * model.k();
        } catch (const std::exception& e) {
            f["error"] = e.what();
        }
        fits.push_back(f);
    }
    Table t = finish({"pair", "R", "count", "status"}, std::move(rows));
    t.extra["delta_fits"] = fits;
    if (resource) t.extra["note"] = "some pairs could not be counted; see row metadata";
    return t;
}

struct Suite {
    std::string name;
    double metric = 0.0;
    double threshold = 0.0;
    bool passed = false;
    std::string note;
};

// Running maximum that turns a NaN into +inf so the suite fails.
void track(double& worst, double v)
{
    if (std::isnan(v)) v = std::numeric_limits<double>::infinity();
    worst = std::max(worst, v);
}

std::vector<Suite> verify_suites(const RunConfig& cfg, const CuspModel& model)
{
    std::vector<Suite> out;
    std::mt19937_64 rng(20240917);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    const int n = model.n(), k = model.k(), d = model.fibre_dim();
    auto random_point = [&] {
        HPoint p;
        p.x = 0.5 + 1.5 * (U(rng) + 1.0) * 0.5;
        for (int i = 0; i < d; ++i) p.y.push_back(U(rng));
        for (int i = 0; i < k; ++i) p.z.push_back(U(rng));
        return p;
    };
    auto random_elem = [&] {
        IVec a(k);
        for (auto& v : a) v = std::lround(3.0 * U(rng));
        return GroupElement{a};
    };
    auto record = [&](std::string name, double metric, double thr, std::string note = "") {
        out.push_back({std::move(name), metric, thr, metric <= thr, std::move(note)});
    };

    {
        double e = 0.0;
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) {
                double dot = 0.0;
                for (int q = 0; q < k; ++q) dot += model.basis()[i][q] * model.dual_basis()[j][q];
                track(e, std::abs(dot - (i == j ? 1.0 : 0.0)));
            }
        record("dual_basis_pairing", e, 1e-12);
    }
    {
        double e = 0.0, iso = 0.0;
        for (int t = 0; t < 50; ++t) {
            HPoint w = random_point(), wp = random_point();
            GroupElement g1 = random_elem(), g2 = random_elem(), g12;
            for (int j = 0; j < k; ++j) g12.a.push_back(g1.a[j] + g2.a[j]);
            HPoint a = apply(model, g1, apply(model, g2, w)), b = apply(model, g12, w);
            for (int i = 0; i < d; ++i) track(e, std::abs(a.y[i] - b.y[i]));
            for (int i = 0; i < k; ++i) track(e, std::abs(a.z[i] - b.z[i]));
            double d0 = dist(w, wp), d1 = dist(apply(model, g1, w), apply(model, g1, wp));
            track(iso, std::abs(d0 - d1) / std::max(d0, 1e-300));
        }
        record("group_law", e, 1e-12);
        record("isometry_invariance", iso, 1e-10);
    }
    {
        double e = 0.0;
        for (int m = 0; m <= 8; ++m) {
            long sum = 0;
            for (const auto& [c, mult] : weight_multiplicities(model.trivial_dim(), model.blocks(), m)) sum += mult;
            track(e, static_cast<double>(std::labs(sum - harmonic_dimension(d, m))));
        }
        record("weight_sums", e, 0.0);
    }
    if (d <= 3) {
        double e = 0.0;
        auto modes = enumerate_modes(model, 3, 1);
        for (int t = 0; t < 50; ++t) {
            const ModeIndex& I = modes[static_cast<std::size_t>(t) % modes.size()];
            HPoint w = random_point();
            double r = 0.0;
            for (double v : w.y) r += v * v;
            r = std::sqrt(r);
            Vec om(d);
            for (int i = 0; i < d; ++i) om[i] = w.y[i] / r;
            int j = t % k;
            IVec a(k, 0);
            a[j] = -1;
            HPoint rot = apply(model, GroupElement{a}, HPoint{1.0, om, w.z});
            Vec zs = w.z;
            for (int i = 0; i < k; ++i) zs[i] += model.basis()[j][i];
            track(e, std::abs(eigenfunction(model, I, zs, om) - eigenfunction(model, I, w.z, rot.y)));
        }
        record("quasi_periodicity", e, 1e-12);
    }
    {
        double e = 0.0, u = 0.0;
        for (int t = 0; t < 40; ++t) {
            cplx s(0.5 * n + 3.0 * U(rng), 3.0 * U(rng));
            double mu = std::exp(2.0 * U(rng));
            ComplexSpectral S(s, n), Sb(static_cast<double>(n) - s, n);
            track(e, std::abs(scattering_multiplier(S, mu) * scattering_multiplier(Sb, mu) - 1.0));
            ComplexSpectral C(cplx(0.5 * n, 0.1 + 3.0 * std::abs(U(rng))), n);
            track(u, std::abs(std::abs(scattering_multiplier(C, mu)) - 1.0));
        }
        record("multiplier_functional_equation", e, 1e-12);
        record("critical_line_unitarity", u, 1e-12);
    }
    PointPair pp = cfg.pairs.empty() ? default_pair(model) : cfg.pairs.front();
    const cplx s0 = 0.5 * n + 0.7;
    if (d <= 3 && pp.a.x != pp.b.x) {
        KernelResult km = cusp_kernel(model, s0, pp.a, pp.b, cfg.policy);
        KernelResult ki = images_kernel(model, s0, pp.a, pp.b, cfg.policy.N);
        double diff = std::abs(km.value - ki.value);
        double bound = km.error_bound + ki.error_bound;
        record("cross_method_bound", diff / bound, 1.0, "|modes - images| / combined error bound");
        record("cross_method_relative", diff / std::abs(ki.value), 1e-4);
        IVec a(k, 0);
        a[0] = 1;
        KernelResult kg = cusp_kernel(model, s0, apply(model, GroupElement{a}, pp.a), pp.b, cfg.policy);
        record("kernel_periodicity", std::abs(kg.value - km.value) / std::abs(km.value), 1e-6);
    }
    {
        cplx s1 = 0.5 * n + 0.6;
        auto u = [&](const HPoint& w) { return images_kernel(model, s1, w, pp.b, 200).value; };
        double r1 = pde_residual(u, s1, n, pp.a, 2e-3), r2 = pde_residual(u, s1, n, pp.a, 1e-3);
        record("pde_residual_images", r2, 1e-4, "ratio h -> h/2: " + format_double(r1 / std::max(r2, 1e-300)));
    }
    {
        std::vector<double> radii = {1.5, 2.5, 3.5};
        HPoint m = pp.a, mp = pp.b;
        CountProfile prof = orbit_count(model, m, mp, radii);
        int N = 1;
        while (true) {
            // Enumerate until a whole shell lies outside the largest ball.
            bool any = false;
            for (const auto& g : shell(k, N))
                if (cosh_dist(m, apply(model, g, mp)) <= std::cosh(radii.back())) any = true;
            if (!any && N > 2) break;
            ++N;
        }
        double e = 0.0;
        for (std::size_t i = 0; i < radii.size(); ++i) {
            long long brute = 0;
            for (const auto& g : enumerate(model, N)) {
                bool ident = std::all_of(g.a.begin(), g.a.end(), [](long v) { return v == 0; });
                if (!ident && cosh_dist(m, apply(model, g, mp)) <= std::cosh(radii[i])) ++brute;
            }
            track(e, static_cast<double>(std::llabs(brute - prof.counts[i])));
        }
        record("orbit_count_exact", e, 0.0);
    }
    return out;
}

Table task_verify(const RunConfig& cfg, const CuspModel& model)
{
    std::vector<Row> rows;
    for (const auto& s : verify_suites(cfg, model)) {
        Row r;
        r.cells = {s.name, s.passed ? "pass" : "fail", fd(s.metric), fd(s.threshold)};
        r.meta["note"] = s.note;
        r.accuracy_failure = !s.passed;
        rows.push_back(std::move(r));
    }
    return finish({"suite", "result", "metric", "threshold"}, std::move(rows));
}

}  // namespace

PointPair default_pair(const CuspModel& model)
{
    PointPair p;
    p.a.x = 1.0;
    p.b.x = 1.6;
    const double ya[] = {0.3, 0.2, -0.1, 0.15}, yb[] = {-0.2, 0.1, 0.25, -0.05};
    for (int i = 0; i < model.fibre_dim(); ++i) {
        p.a.y.push_back(ya[i % 4]);
        p.b.y.push_back(yb[i % 4]);
    }
    for (int i = 0; i < model.k(); ++i) {
        p.a.z.push_back(0.1 * (i + 1));
        p.b.z.push_back(0.45 - 0.1 * i);
    }
    return p;
}

Table run_task(const RunConfig& cfg)
{
    CuspModel model = cfg.model.build();
    const std::string& t = cfg.task;
    if (t == "modes") return task_modes(cfg, model);
    if (t == "thresholds") return task_thresholds(cfg, model);
    if (t == "resolvent") return task_resolvent(cfg, model, false);
    if (t == "compare") return task_resolvent(cfg, model, true);
    if (t == "scatter") return task_scatter(cfg, model);
    if (t == "poincare") return task_poincare(cfg, model);
    if (t == "count") return task_count(cfg, model);
    if (t == "verify") return task_verify(cfg, model);
    throw ConfigError(0, "unknown task '" + t + "'");
}

std::string to_csv(const Table& t)
{
    std::string out;
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += cells[i];
        }
        out += '\n';
    };
    line(t.header);
    for (const auto& r : t.rows) line(r);
    return out;
}

}  // namespace cusp::cli
