#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace cusp::cli {

namespace {

std::string trim(const std::string& s)
{
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

double parse_double(const std::string& text, int line, const std::string& key)
{
    std::string t = trim(text);
    double v = 0.0;
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || p != t.data() + t.size() || !std::isfinite(v))
        throw ConfigError(line, "field '" + key + "': expected a number, got '" + t + "'");
    return v;
}

int parse_int(const std::string& text, int line, const std::string& key)
{
    std::string t = trim(text);
    int v = 0;
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || p != t.data() + t.size())
        throw ConfigError(line, "field '" + key + "': expected an integer, got '" + t + "'");
    return v;
}

// Entries separated by commas and/or whitespace.
Vec parse_vector(const std::string& text, int line, const std::string& key)
{
    std::string t = text;
    std::replace(t.begin(), t.end(), ',', ' ');
    std::istringstream in(t);
    Vec out;
    std::string tok;
    while (in >> tok) out.push_back(parse_double(tok, line, key));
    return out;
}

std::vector<Vec> parse_matrix(const std::string& text, int line, const std::string& key)
{
    std::vector<Vec> rows;
    for (const auto& r : split(text, ';')) {
        if (r.empty()) continue;
        rows.push_back(parse_vector(r, line, key));
    }
    return rows;
}

HPoint parse_point(const std::string& text, int line)
{
    auto parts = split(text, ':');
    if (parts.size() != 3) throw ConfigError(line, "field 'pair': a point is 'x : y... : z...'");
    HPoint p;
    p.x = parse_double(parts[0], line, "pair");
    p.y = parse_vector(parts[1], line, "pair");
    p.z = parse_vector(parts[2], line, "pair");
    return p;
}

std::string join(const Vec& v)
{
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ' ';
        out += format_double(v[i]);
    }
    return out;
}

std::string join_rows(const std::vector<Vec>& m)
{
    std::string out;
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (i) out += "; ";
        out += join(m[i]);
    }
    return out;
}

std::string point_text(const HPoint& p)
{
    return format_double(p.x) + " : " + join(p.y) + " : " + join(p.z);
}

}  // namespace

CuspModel ModelSpec::build() const
{
    return radians ? CuspModel::from_radians(n, k, basis, r, angles) : CuspModel(n, k, basis, r, angles);
}

const std::vector<std::string>& task_names()
{
    static const std::vector<std::string> names = {"modes",   "thresholds", "resolvent", "compare",
                                                   "scatter", "poincare",   "count",     "verify"};
    return names;
}

std::string format_double(double v)
{
    if (v == 0.0) v = 0.0;  // no negative zero in output
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific, 16);
    return std::string(buf, p);
}

std::string format_complex(cplx z)
{
    std::string re = format_double(z.real());
    if (z.imag() == 0.0) return re;
    std::string im = format_double(z.imag());
    if (im[0] != '-') im = "+" + im;
    return re + im + "i";
}

cplx parse_complex(const std::string& text)
{
    std::string t;
    for (char c : text)
        if (c != ' ' && c != '\t') t += c;
    if (t.empty()) throw std::invalid_argument("empty complex number");
    auto num = [](const std::string& s) {
        double v = 0.0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (s.empty() || ec != std::errc() || p != s.data() + s.size())
            throw std::invalid_argument("bad number '" + s + "'");
        return v;
    };
    if (t.back() != 'i') return {num(t), 0.0};
    t.pop_back();
    // Split at the last sign that is not part of an exponent.
    std::size_t cut = std::string::npos;
    for (std::size_t i = t.size(); i-- > 1;)
        if ((t[i] == '+' || t[i] == '-') && t[i - 1] != 'e' && t[i - 1] != 'E') {
            cut = i;
            break;
        }
    auto imag = [&](std::string s) {
        if (s.empty() || s == "+") return 1.0;
        if (s == "-") return -1.0;
        if (s[0] == '+') s.erase(0, 1);
        return num(s);
    };
    if (cut == std::string::npos) return {0.0, imag(t)};
    std::string re = t.substr(0, cut);
    if (!re.empty() && re[0] == '+') re.erase(0, 1);
    return {num(re), imag(t.substr(cut))};
}

RunConfig parse_config(const std::string& text)
{
    RunConfig cfg;
    std::istringstream in(text);
    std::string raw, section;
    int line = 0;
    std::set<std::string> seen;
    std::map<std::string, int> where;
    static const std::map<std::string, std::set<std::string>> keys = {
        {"model", {"n", "k", "r", "basis", "turns", "angles"}},
        {"policy", {"M", "V", "N", "t_max", "tol"}},
        {"task",
         {"task", "s", "pair", "method", "max_m", "max_v", "t", "radii", "fit_window", "poincare_N", "threads"}},
    };
    while (std::getline(in, raw)) {
        ++line;
        std::string l = trim(raw.substr(0, raw.find('#')));
        if (l.empty()) continue;
        if (l.front() == '[') {
            if (l.back() != ']') throw ConfigError(line, "unterminated section header");
            section = trim(l.substr(1, l.size() - 2));
            if (!keys.count(section)) throw ConfigError(line, "unknown section [" + section + "]");
            continue;
        }
        auto eq = l.find('=');
        if (eq == std::string::npos) throw ConfigError(line, "expected 'key = value'");
        std::string key = trim(l.substr(0, eq)), val = trim(l.substr(eq + 1));
        if (section.empty()) throw ConfigError(line, "key '" + key + "' outside any section");
        if (!keys.at(section).count(key)) throw ConfigError(line, "unknown key '" + key + "' in [" + section + "]");
        std::string full = section + "." + key;
        if (key != "pair" && seen.count(full)) throw ConfigError(line, "duplicate key '" + key + "'");
        seen.insert(full);
        where[full] = line;

        if (section == "model") {
            if (key == "n") cfg.model.n = parse_int(val, line, key);
            else if (key == "k") cfg.model.k = parse_int(val, line, key);
            else if (key == "r") cfg.model.r = parse_int(val, line, key);
            else if (key == "basis") cfg.model.basis = parse_matrix(val, line, key);
            else {
                if (seen.count("model.turns") && seen.count("model.angles"))
                    throw ConfigError(line, "give either 'turns' or 'angles', not both");
                cfg.model.angles = parse_matrix(val, line, key);
                cfg.model.radians = key == "angles";
            }
        } else if (section == "policy") {
            if (key == "M") cfg.policy.M = parse_int(val, line, key);
            else if (key == "V") cfg.policy.V = parse_int(val, line, key);
            else if (key == "N") cfg.policy.N = parse_int(val, line, key);
            else if (key == "t_max") cfg.policy.t_max = parse_double(val, line, key);
            else cfg.policy.tol = parse_double(val, line, key);
        } else {
            if (key == "task") {
                cfg.task = val;
                if (std::find(task_names().begin(), task_names().end(), val) == task_names().end())
                    throw ConfigError(line, "field 'task': unknown task '" + val + "'");
            } else if (key == "s") {
                for (const auto& item : split(val, ',')) {
                    try {
                        cfg.s_values.push_back(parse_complex(item));
                    } catch (const std::invalid_argument& e) {
                        throw ConfigError(line, std::string("field 's': ") + e.what());
                    }
                }
            } else if (key == "pair") {
                auto pts = split(val, '/');
                if (pts.size() != 2) throw ConfigError(line, "field 'pair': expected two points separated by '/'");
                cfg.pairs.push_back({parse_point(pts[0], line), parse_point(pts[1], line)});
            } else if (key == "method") {
                if (val != "modes" && val != "images")
                    throw ConfigError(line, "field 'method': expected 'modes' or 'images'");
                cfg.method = val;
            } else if (key == "max_m") cfg.max_m = parse_int(val, line, key);
            else if (key == "max_v") cfg.max_v = parse_int(val, line, key);
            else if (key == "t") cfg.t_values = parse_vector(val, line, key);
            else if (key == "radii") {
                auto parts = split(val, ':');
                if (parts.size() == 3) {
                    double lo = parse_double(parts[0], line, key), hi = parse_double(parts[1], line, key),
                           st = parse_double(parts[2], line, key);
                    if (!(st > 0.0) || hi < lo) throw ConfigError(line, "field 'radii': need lo <= hi and step > 0");
                    long cnt = std::lround(std::floor((hi - lo) / st + 1e-9));
                    for (long i = 0; i <= cnt; ++i) cfg.radii.push_back(lo + i * st);
                } else {
                    cfg.radii = parse_vector(val, line, key);
                }
            } else if (key == "fit_window") {
                Vec w = parse_vector(val, line, key);
                if (w.size() != 2 || !(w[0] < w[1])) throw ConfigError(line, "field 'fit_window': expected 'lo, hi'");
                cfg.fit_lo = w[0];
                cfg.fit_hi = w[1];
            } else if (key == "poincare_N") cfg.poincare_N = parse_int(val, line, key);
            else cfg.threads = parse_int(val, line, key);
        }
    }

    auto at = [&](const std::string& k) { return where.count(k) ? where[k] : 0; };
    for (const char* req : {"model.n", "model.k", "model.basis"})
        if (!seen.count(req)) throw ConfigError(0, std::string("missing required field '") + req + "'");
    try {
        cfg.model.build();
    } catch (const InputError& e) {
        int ln = at("model.turns") ? at("model.turns") : at("model.angles") ? at("model.angles") : at("model.basis");
        throw ConfigError(ln, std::string("[model] ") + e.what());
    }
    try {
        cfg.policy.validate();
    } catch (const InputError& e) {
        throw ConfigError(at("policy.tol"), std::string("[policy] ") + e.what());
    }
    const int d = cfg.model.n - cfg.model.k;
    for (const auto& p : cfg.pairs)
        for (const HPoint* q : {&p.a, &p.b}) {
            if (!(q->x > 0.0)) throw ConfigError(at("task.pair"), "field 'pair': heights x must be positive");
            if (static_cast<int>(q->y.size()) != d || static_cast<int>(q->z.size()) != cfg.model.k)
                throw ConfigError(at("task.pair"), "field 'pair': point dimensions must be (1, n-k, k) = (1, " +
                                                       std::to_string(d) + ", " + std::to_string(cfg.model.k) + ")");
        }
    if (cfg.max_m < 0 || cfg.max_v < 0) throw ConfigError(at("task.max_m"), "max_m and max_v must be nonnegative");
    if (cfg.threads < 1) throw ConfigError(at("task.threads"), "field 'threads' must be at least 1");
    if (cfg.poincare_N < 1) throw ConfigError(at("task.poincare_N"), "field 'poincare_N' must be at least 1");
    for (std::size_t i = 1; i < cfg.radii.size(); ++i)
        if (!(cfg.radii[i] > cfg.radii[i - 1])) throw ConfigError(at("task.radii"), "field 'radii' must increase");
    for (double t : cfg.t_values)
        if (!(t >= 0.0)) throw ConfigError(at("task.t"), "field 't' must be nonnegative");
    return cfg;
}

void validate_for_task(const RunConfig& cfg)
{
    const std::string& t = cfg.task;
    auto need = [&](bool ok, const std::string& field) {
        if (!ok) throw ConfigError(0, "task '" + t + "' requires field '" + field + "'");
    };
    if (t == "resolvent" || t == "compare" || t == "poincare") {
        need(!cfg.s_values.empty(), "s");
        need(!cfg.pairs.empty(), "pair");
    } else if (t == "scatter") {
        need(!cfg.s_values.empty(), "s");
        need(!cfg.t_values.empty(), "t");
    } else if (t == "count") {
        need(!cfg.pairs.empty(), "pair");
        need(!cfg.radii.empty(), "radii");
    }
}

std::string to_config_text(const RunConfig& cfg)
{
    std::ostringstream o;
    o << "[model]\n";
    o << "n = " << cfg.model.n << "\nk = " << cfg.model.k << "\nr = " << cfg.model.r << "\n";
    o << "basis = " << join_rows(cfg.model.basis) << "\n";
    if (!cfg.model.angles.empty()) o << (cfg.model.radians ? "angles = " : "turns = ") << join_rows(cfg.model.angles) << "\n";
    o << "\n[policy]\n";
    o << "M = " << cfg.policy.M << "\nV = " << cfg.policy.V << "\nN = " << cfg.policy.N << "\n";
    o << "t_max = " << format_double(cfg.policy.t_max) << "\ntol = " << format_double(cfg.policy.tol) << "\n";
    o << "\n[task]\n";
    if (!cfg.task.empty()) o << "task = " << cfg.task << "\n";
    if (!cfg.s_values.empty()) {
        o << "s = ";
        for (std::size_t i = 0; i < cfg.s_values.size(); ++i) o << (i ? ", " : "") << format_complex(cfg.s_values[i]);
        o << "\n";
    }
    for (const auto& p : cfg.pairs) o << "pair = " << point_text(p.a) << " / " << point_text(p.b) << "\n";
    o << "method = " << cfg.method << "\nmax_m = " << cfg.max_m << "\nmax_v = " << cfg.max_v << "\n";
    if (!cfg.t_values.empty()) o << "t = " << join(cfg.t_values) << "\n";
    if (!cfg.radii.empty()) o << "radii = " << join(cfg.radii) << "\n";
    o << "fit_window = " << format_double(cfg.fit_lo) << ", " << format_double(cfg.fit_hi) << "\n";
    o << "poincare_N = " << cfg.poincare_N << "\nthreads = " << cfg.threads << "\n";
    return o.str();
}

}  // namespace cusp::cli
